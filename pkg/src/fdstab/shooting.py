"""Radial ODE shooting problems with numerically determined constants.

Two self-contained boundary-value problems are solved here:

* the radial optimizer on the unit disk, -f'' - f'/r + f = f^3 with
  f'(0) = 0, shot on the initial height f(0) = a with the Neumann
  criterion f'(1) = 0 on the one-sign-change branch; the optimal
  interpolation constant on radial functions is then
  (2 pi int_0^1 f^4 r dr)^{-1/2};

* the line problem -g'' + ((d-2)^2/4) g = g^{(d+2)/(d-2)}, whose even
  solution is g(s) = A sech(B s)^{2/(d-2)}; the coefficients are fixed by
  the height g(0) = (d(d-2)/4)^{(d-2)/4} and the residual of the ansatz
  is evaluated on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.optimize import brentq

_R0 = 1e-4         # series start radius removing the coordinate singularity
_ATOL, _RTOL = 1e-12, 1e-10


@dataclass(frozen=True)
class ShootResult:
    a_star: float
    constant: float
    residual: float
    sign_changes: int


def _disk_rhs(r, y):
    f, fp = y
    return [fp, -fp / r + f - f ** 3]


def _integrate_disk(a: float, rtol: float = _RTOL, atol: float = _ATOL):
    """Solve from the two-term series start f = a + (a - a^3) r^2 / 4."""
    f0 = a + (a - a ** 3) * _R0 ** 2 / 4.0
    fp0 = (a - a ** 3) * _R0 / 2.0
    sol = solve_ivp(_disk_rhs, (_R0, 1.0), [f0, fp0], method="RK45",
                    rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise RuntimeError(f"disk ODE integration failed at a = {a}: {sol.message}")
    return sol


def _sign_changes(sol, n: int = 2000) -> int:
    r = np.linspace(_R0, 1.0, n)
    f = sol.sol(r)[0]
    s = np.sign(f)
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def _slope_at_one(a: float, rtol: float = _RTOL) -> float:
    return float(_integrate_disk(a, rtol=rtol).y[1][-1])


def shoot_disk_radial(scan_lo: float = 1.5, scan_hi: float = 20.0,
                      scan_step: float = 0.25, rtol: float = _RTOL) -> ShootResult:
    """Locate the one-sign-change Neumann solution on the unit disk.

    Scans the initial height for a bracket of s(a) = f'(1) restricted to
    the branch with exactly one sign change, refines the root by
    bracketing bisection and extracts the radial optimal constant.
    a = 1 solves the ODE trivially (f == 1, no sign change) and is
    excluded by the scan range.
    """
    grid = np.arange(scan_lo, scan_hi + 0.5 * scan_step, scan_step)
    trace = []
    for a in grid:
        sol = _integrate_disk(a, rtol=rtol)
        trace.append((a, float(sol.y[1][-1]), _sign_changes(sol)))
    bracket = None
    for (a0, s0, n0), (a1, s1, n1) in zip(trace, trace[1:]):
        if n0 == 1 and n1 == 1 and s0 * s1 < 0.0:
            bracket = (a0, a1)
            break
    if bracket is None:
        lines = "\n".join(f"  a={a:.3f}  s={s:+.4e}  changes={n}" for a, s, n in trace)
        raise RuntimeError("no bracket on the one-sign-change branch; scan trace:\n" + lines)
    a_star = brentq(lambda a: _slope_at_one(a, rtol=rtol), *bracket, xtol=1e-12)

    sol = _integrate_disk(a_star, rtol=rtol)
    r = np.linspace(_R0, 1.0, 20001)
    f, fp = sol.sol(r)
    # quartic integral on (0,1); the series start contributes a^4 r0^2/2
    quartic = 2.0 * math.pi * (float(np.trapezoid(f ** 4 * r, r))
                               + a_star ** 4 * _R0 ** 2 / 2.0)
    constant = quartic ** -0.5
    # defect of the integrated flux identity (r f')' = r (f - f^3),
    # which avoids re-differentiating the dense output
    source = cumulative_simpson(r * (f - f ** 3), x=r, initial=0.0)
    residual = float(np.max(np.abs(r * fp - _R0 * fp[0] - source)))
    return ShootResult(a_star=float(a_star), constant=constant,
                       residual=residual, sign_changes=_sign_changes(sol))


@dataclass(frozen=True)
class LineSolution:
    a_coef: float
    b_coef: float
    residual: float
    first_integral_error: float


def emden_fowler_verify(d: int, s_max: float = 12.0, n: int = 4001) -> LineSolution:
    """Check the sech ansatz for the line problem in dimension d >= 3.

    The decaying even solution is g(s) = A sech(B s)^q with the soliton
    power q = 2/(kappa - 1) = (d-2)/2 for the nonlinearity exponent
    kappa = (d+2)/(d-2).  (Some sources print the reciprocal power
    2/(d-2); the two agree only at d = 4, and only q = (d-2)/2 satisfies
    the equation for every d.)  A is the height (d(d-2)/4)^{(d-2)/4}
    fixed by the vanishing first integral, B follows from matching the
    series at s = 0, and the residual of -g'' + ((d-2)^2/4) g -
    g^{(d+2)/(d-2)} plus the first integral are evaluated on a grid.
    """
    if d < 3:
        raise ValueError("the line problem requires d >= 3")
    q = (d - 2.0) / 2.0
    g0 = (0.25 * d * (d - 2.0)) ** ((d - 2.0) / 4.0)
    a_coef = g0
    # series matching at s = 0: g''(0) = -A q B^2 and the equation there
    # reads c A + A q B^2 = A^{(d+2)/(d-2)} with c = (d-2)^2/4
    c = 0.25 * (d - 2.0) ** 2
    b_sq = (a_coef ** (4.0 / (d - 2.0)) - c) / q
    if b_sq <= 0.0:
        raise RuntimeError("height incompatible with a decaying profile")
    b_coef = math.sqrt(b_sq)

    s = np.linspace(-s_max, s_max, n)
    sech = 1.0 / np.cosh(b_coef * s)
    g = a_coef * sech ** q
    th = np.tanh(b_coef * s)
    gp = -a_coef * q * b_coef * th * sech ** q
    gpp = a_coef * q * b_coef ** 2 * sech ** q * ((q + 1.0) * th ** 2 - 1.0)
    residual = float(np.max(np.abs(-gpp + c * g - g ** ((d + 2.0) / (d - 2.0)))))
    first_integral = -gp ** 2 + c * g ** 2 \
        - (d - 2.0) / d * g ** (2.0 * d / (d - 2.0))
    return LineSolution(a_coef=a_coef, b_coef=b_coef, residual=residual,
                        first_integral_error=float(np.max(np.abs(first_integral))))
