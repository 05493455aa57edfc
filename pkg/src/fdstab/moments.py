"""Second-moment phase plane: vector field, closed form, regions, delay.

The pair (X, Y) = (relative second moment, relative entropy integral)
obeys the linear comparison system

    X' = a Y - 4 X,   Y' = -b Y,     a = 2d(1-m)/m,  b = 2 alpha,

whose solution is explicit.  The admissible states live in the box
X >= -K_star, Y >= -S_star intersected with Y <= psi(X) <= m X, and the
classification into regions A/B/C determines the uniform lower bound
K_bullet used by the delay estimates.

The grouped closed-form display in the source material pairs a 1/(4m)
coefficient with (3 e^{-4t} + e^{-2 alpha t}); direct integration of the
system gives a/(4-b) = 1/m, which is what this module implements, with
the numerical integrator checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ExponentSet
from .profiles import closed_form_moments


@dataclass(frozen=True)
class PhaseState:
    """One point of the comparison system with its coefficients."""

    x: float
    y: float
    a: float
    b: float

    @staticmethod
    def make(ex: ExponentSet, x: float, y: float) -> "PhaseState":
        return PhaseState(x=x, y=y, a=ex.a_param, b=ex.b_param)

    def energy(self) -> float:
        """Lyapunov level L = (aY - 4X)^2 + 4 b X^2."""
        return (self.a * self.y - 4.0 * self.x) ** 2 + 4.0 * self.b * self.x ** 2


@dataclass(frozen=True)
class DelayRecord:
    """Delay bookkeeping along a rescaled trajectory."""

    t: float
    tau: float
    r_factor: float  # e^{2 tau}
    lam: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("matching scale must stay positive")


def admissibility_violation(ex: ExponentSet, x0: float, y0: float) -> str | None:
    """Name of the violated state constraint, or None if admissible."""
    mt = closed_form_moments(ex)
    if x0 < -mt.second_moment:
        return f"X >= -K_star violated (X = {x0}, -K_star = {-mt.second_moment})"
    if y0 < -mt.entropy:
        return f"Y >= -S_star violated (Y = {y0}, -S_star = {-mt.entropy})"
    cap = psi_upper(ex, x0)
    if y0 > cap * (1.0 + 1e-12) + 1e-14:
        return f"Y <= psi(X) violated (Y = {y0}, psi = {cap})"
    return None


def psi_upper(ex: ExponentSet, x: float) -> float:
    """Concave cap psi(X) = S_star (1 + X/S_star)^m - S_star on Y."""
    mt = closed_form_moments(ex)
    base = 1.0 + x / mt.entropy
    if base < 0.0:
        raise ValueError("X below the admissible box")
    return mt.entropy * base ** ex.m - mt.entropy


def xy_closed_form(state0: PhaseState, t) -> tuple[np.ndarray, np.ndarray]:
    """Explicit solution X(t), Y(t) of the comparison system."""
    t = np.asarray(t, dtype=float)
    a, b = state0.a, state0.b
    y = state0.y * np.exp(-b * t)
    if abs(4.0 - b) < 1e-14:
        mix = a * t * np.exp(-4.0 * t)
    else:
        mix = a / (4.0 - b) * (np.exp(-b * t) - np.exp(-4.0 * t))
    x = state0.x * np.exp(-4.0 * t) + mix * state0.y
    return x, y


def xy_integrate(state0: PhaseState, t_end: float, dt: float = 1e-3) -> dict:
    """Classical RK4 path of the comparison system on a fixed grid.

    Returns arrays t, x, y and the energy level along the path.  The
    closed form is the accuracy oracle; RK4 at dt = 1e-3 sits far below
    the 1e-8 comparison tolerance.
    """
    n = max(1, int(math.ceil(t_end / dt)))
    t = np.linspace(0.0, n * dt, n + 1)
    x = np.empty(n + 1)
    y = np.empty(n + 1)
    x[0], y[0] = state0.x, state0.y
    a, b = state0.a, state0.b

    def rhs(xv, yv):
        return a * yv - 4.0 * xv, -b * yv

    for i in range(n):
        xi, yi = x[i], y[i]
        k1 = rhs(xi, yi)
        k2 = rhs(xi + 0.5 * dt * k1[0], yi + 0.5 * dt * k1[1])
        k3 = rhs(xi + 0.5 * dt * k2[0], yi + 0.5 * dt * k2[1])
        k4 = rhs(xi + dt * k3[0], yi + dt * k3[1])
        x[i + 1] = xi + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y[i + 1] = yi + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    st = [PhaseState(xv, yv, a, b) for xv, yv in zip(x, y)]
    return {"t": t, "x": x, "y": y,
            "energy": np.array([s.energy() for s in st])}


def xy_integrate_batch(ex: ExponentSet, x0, y0, t_end: float,
                       dt: float = 1e-3) -> dict:
    """Vectorized RK4 over a batch of initial states (same fixed grid)."""
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    a, b = ex.a_param, ex.b_param
    n = max(1, int(math.ceil(t_end / dt)))
    t = np.linspace(0.0, n * dt, n + 1)
    xs = np.empty((n + 1,) + x.shape)
    ys = np.empty_like(xs)
    xs[0], ys[0] = x, y

    for i in range(n):
        k1x, k1y = a * y - 4.0 * x, -b * y
        x2, y2 = x + 0.5 * dt * k1x, y + 0.5 * dt * k1y
        k2x, k2y = a * y2 - 4.0 * x2, -b * y2
        x3, y3 = x + 0.5 * dt * k2x, y + 0.5 * dt * k2y
        k3x, k3y = a * y3 - 4.0 * x3, -b * y3
        x4, y4 = x + dt * k3x, y + dt * k3y
        k4x, k4y = a * y4 - 4.0 * x4, -b * y4
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        xs[i + 1], ys[i + 1] = x, y
    energy = (a * ys - 4.0 * xs) ** 2 + 4.0 * b * xs ** 2
    return {"t": t, "x": xs, "y": ys, "energy": energy}


# -- regions ----------------------------------------------------------------


@dataclass(frozen=True)
class RegionInfo:
    region: str          # "A" | "B" | "C"
    k_bullet: float
    x_star: float        # ellipse tangency abscissa -a S_star / (2 sqrt(4+b))


def classify_region(ex: ExponentSet, k0: float, s0: float) -> RegionInfo:
    """Region of an initial state and the associated uniform bound."""
    bad = admissibility_violation(ex, k0, s0)
    if bad is not None:
        raise ValueError(bad)
    mt = closed_form_moments(ex)
    a, b = ex.a_param, ex.b_param
    s_star = mt.entropy
    x_star = -a * s_star / (2.0 * math.sqrt(4.0 + b))
    level_special = a * a * b * s_star ** 2 / (4.0 + b)

    if k0 <= 0.0 and 4.0 * k0 / a <= s0 <= psi_upper(ex, k0) + 1e-15:
        return RegionInfo("A", k_bullet=k0, x_star=x_star)
    level0 = (a * s0 - 4.0 * k0) ** 2 + 4.0 * b * k0 ** 2
    inside_special = level0 <= level_special * (1.0 + 1e-12)
    if inside_special or k0 > -a * s_star / (4.0 + b):
        return RegionInfo("B", k_bullet=x_star, x_star=x_star)
    disc = (4.0 + b) * k0 ** 2 - 2.0 * a * k0 * s0 + a * a * s0 ** 2 / 4.0
    k_bullet = -math.sqrt(max(disc, 0.0) / b)
    return RegionInfo("C", k_bullet=k_bullet, x_star=x_star)


# -- delay bounds ------------------------------------------------------------


@dataclass(frozen=True)
class DelayBound:
    t1: float
    tau_bound: float
    tau_bullet: float | None  # defined when K[v0] = 0


def c_alpha_integral(alpha: float) -> float:
    """int_0^infty ((1 - e^{-2 alpha s}/2)^{-alpha/2} - 1) ds, < 1/4 for alpha <= 2."""
    s = np.linspace(0.0, 40.0 / alpha, 400001)
    g = (1.0 - 0.5 * np.exp(-2.0 * alpha * s)) ** (-alpha / 2.0) - 1.0
    return float(np.trapezoid(g, s))


def t1_uniform(ex: ExponentSet) -> float:
    """Uniform bound (1/(2 alpha)) log max{1, 4/(d(1-m))} on the entry time."""
    return math.log(max(1.0, 4.0 / (ex.d * (1.0 - ex.m)))) / (2.0 * ex.alpha)


def delay_bound(ex: ExponentSet, k0: float, s0: float) -> DelayBound:
    """Delay bound for one admissible initial state.

    t1 follows the stated branch formula (zero whenever the positive part
    of S(0) is below 2 m K_star); the overall bound multiplies it by the
    region factor and adds K_star/8.  When K[v0] = 0 the uniform constant
    tau_bullet (with t1 replaced by its uniform bound) is also returned.
    """
    info = classify_region(ex, k0, s0)
    mt = closed_form_moments(ex)
    k_star = mt.second_moment
    t1 = math.log(max(1.0, max(0.0, s0) / (2.0 * ex.m * k_star))) / (2.0 * ex.alpha)
    factor = max(1.0, (1.0 + info.k_bullet / k_star) ** (-ex.alpha / 2.0) - 1.0)
    tau_bound = factor * t1 + k_star / 8.0
    tau_bullet = None
    if k0 == 0.0:
        f0 = max(1.0, (1.0 - 1.0 / math.sqrt(1.0 + ex.alpha)) ** (-ex.alpha / 2.0) - 1.0)
        tau_bullet = f0 * t1_uniform(ex) + k_star / 8.0
    return DelayBound(t1=t1, tau_bound=tau_bound, tau_bullet=tau_bullet)
