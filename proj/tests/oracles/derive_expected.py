"""Independent desk evaluations used to freeze expected values in the C++ tests.

Run with `python3 tests/oracles/derive_expected.py`. Nothing here imports the
C++ implementation; every value comes straight from the closed-form model
equations or a generic numerical method (linear solve, root finding, dense
quadrature).
"""
import math
import numpy as np
from scipy.optimize import brentq


def idm(gap, v, dv, a=1.4, v0=33.3, delta=4.0, s0=2.0, ts=1.5, b=2.0):
    s_star = s0 + max(0.0, v * ts + v * dv / (2.0 * math.sqrt(a * b)))
    return a * (1.0 - (v / v0) ** delta - (s_star / gap) ** 2)


def cah(gap, v, dv, a_lead, a_max):
    v_lead = v - dv
    a_eff = min(a_lead, a_max)
    if v_lead * dv <= -2.0 * gap * a_eff and v_lead * v_lead - 2.0 * gap * a_eff > 0:
        return v * v * a_eff / (v_lead * v_lead - 2.0 * gap * a_eff)
    return a_eff - (max(dv, 0.0) ** 2) / (2.0 * gap)


print("idm(20,15,3) =", repr(idm(20, 15, 3)))

# CAV approach scenario: leader braking gently, follower closing fast.
gap, v, dv, al = 30.0, 20.0, 6.0, -0.5
ai = max(-6.0, min(1.4, idm(gap, v, dv)))
ac = cah(gap, v, dv, al, 1.4)
c, b = 0.99, 2.0
print("cav scenario a_idm=%r a_cah=%r" % (ai, ac))
print("cav blended =", repr((1 - c) * ai + c * (ac + b * math.tanh((ai - ac) / b))))

u = 0.25
print("quintic y(25) =", repr(3.75 * (10 * u**3 - 15 * u**4 + 6 * u**5)))

# Linear gap ramp: gap(t) = 30 + 2 t, evaluated at now = 5 with tau = 0.5.
print("hdv ramp idm =", repr(idm(30 + 2 * 4.5, 20.0, 0.0)))

D, T, am = 2.0, 1.0, 6.0
vr = vf = 25.0
d = 114.21
print("u_safe =", repr(vr**2 / (2 * (d - D - vr * T + vf**2 / (2 * am)))))

Q = [0.1569e-3, 2.450e-5, -7.415e-7, 5.975e-8]
R = [0.07224e-3, 9.681e-5, 1.075e-6]
v, acc = 20.0, 1.0
print("fuel_rate(20,1) =", repr(Q[0] + Q[1]*v + Q[2]*v*v + Q[3]*v**3 + acc*(R[0] + R[1]*v + R[2]*v*v)))
print("fuel_rate(20,0) =", repr(Q[0] + Q[1]*v + Q[2]*v*v + Q[3]*v**3))

print("psi(-3) =", repr(0.5 * (math.tanh(-3) + 1)))

# Cubic BVP via a generic 4x4 solve on absolute time.
A = np.array([[1, 0, 0, 0], [1, 6, 36, 216], [0, 1, 0, 0], [0, 1, 12, 108]], float)
print("cubic coeffs =", np.linalg.solve(A, np.array([0, 150, 20, 25], float)).tolist())

# IDM equilibrium gap at v = 20 (leader at constant 20 m/s): root of the IDM right-hand side.
s_e = brentq(lambda s: idm(s, 20.0, 0.0), 2.5, 1e4)
print("idm equilibrium gap at 20 m/s =", repr(s_e))

# Scripted deceleration profile for metric integration: v(t) = 20 - 2 t on [0, 5],
# then 10 m/s. LSRV with v_low = 15: integral of (15 - v) v over the part below 15.
f = lambda t: max(15 - (20 - 2 * t), 0.0) * (20 - 2 * t) if t <= 5 else 5 * 10
from scipy.integrate import quad
lsrv, _ = quad(f, 0, 5, points=[2.5])
lsrv += 5 * 10 * 5  # t in [5, 10]
print("lsrv scripted =", repr(lsrv))
