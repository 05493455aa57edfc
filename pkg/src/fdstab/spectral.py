"""Spectrum of the weighted linearization operator and spectral gaps.

The operator L u = -(1+|x|^2)^{1-a} div[(1+|x|^2)^a grad u] acting on
L^2((1+|x|^2)^{a-1} dx) governs the linearized relaxation; for the
fast-diffusion dictionary a = 2p/(1-p) = 1/(m-1) < 0.  Its eigenvalues
have polynomial eigenfunctions and are known in closed form; a P1
finite-element discretization of the radial sector is included as an
independent numerical cross-check.

Two different "essential spectrum" expressions circulate for this
operator: the Persson form (a + (d-2)/2)^2, used here for the
discreteness filter, and a variant written with 2p/(p+1) instead of
2p/(p-1) in some displays, exposed verbatim as
:func:`lambda_ess_weighted_hardy_display`.  They do not agree; the
Persson form is the one consistent with the closed-form eigenvalues and
with the case boundaries of the improved-gap table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .params import ExponentSet


@dataclass(frozen=True)
class SpectrumQuery:
    """Weight parameters of one spectral problem."""

    d: int
    a: float  # weight exponent, < 0
    constraint_level: str = "mass"  # mass | mass+center | mass+center+moment

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if not self.a < 0.0:
            raise ValueError(f"weight exponent must be negative, got {self.a}")
        levels = ("mass", "mass+center", "mass+center+moment")
        if self.constraint_level not in levels:
            raise ValueError(f"constraint_level must be one of {levels}")

    @staticmethod
    def from_p(d: int, p: float, constraint_level: str = "mass") -> "SpectrumQuery":
        if p <= 1.0:
            raise ValueError("p must be > 1")
        return SpectrumQuery(d=d, a=2.0 * p / (1.0 - p),
                             constraint_level=constraint_level)

    @property
    def p(self) -> float:
        return self.a / (self.a + 2.0)

    def has_finite_measure(self) -> bool:
        return self.a < -self.d / 2.0


def lambda_ess(query: SpectrumQuery) -> float:
    """Bottom of the essential spectrum, (a + (d-2)/2)^2 (Persson form)."""
    return (query.a + 0.5 * (query.d - 2.0)) ** 2


def lambda_ess_weighted_hardy_display(d: int, p: float) -> float:
    """The variant (1/4)(d - 2 - 4p/(p+1))^2, reproduced verbatim.

    Kept separate because it disagrees with the Persson form (which the
    discreteness filter uses); see the module docstring.
    """
    return 0.25 * (d - 2.0 - 4.0 * p / (p + 1.0)) ** 2


@dataclass(frozen=True)
class EigenvalueResult:
    value: float
    discrete: bool
    status: str  # "discrete" | "not-square-integrable" | "embedded"


def eigenvalue(ell: int, k: int, query: SpectrumQuery) -> EigenvalueResult:
    """Closed-form eigenvalue lambda_{ell,k} with its discreteness status.

    For d >= 2, lambda_{ell,k} = -2a(ell+2k) - 4k(k+ell+d/2-1), a genuine
    point eigenvalue iff the polynomial eigenfunction is square integrable
    (ell + 2k - 1 < -(d+2a)/2); it belongs to the discrete spectrum iff it
    additionally sits below the essential spectrum.  For d = 1 the ladder
    is lambda_k = k(1-2a-k) with k in [1, 1/2-a].
    """
    if ell < 0 or k < 0:
        raise ValueError("mode indices must be nonnegative")
    if (ell, k) == (0, 0):
        raise ValueError("(0,0) is the trivial constant mode")
    a, d = query.a, query.d
    if d == 1:
        if ell != 0:
            raise ValueError("d = 1 modes are indexed by k only (use ell = 0)")
        value = k * (1.0 - 2.0 * a - k)
        integrable = 1 <= k <= 0.5 - a
    else:
        value = -2.0 * a * (ell + 2 * k) - 4.0 * k * (k + ell + d / 2.0 - 1.0)
        integrable = (ell + 2 * k - 1) < -(d + 2.0 * a) / 2.0
    if not integrable:
        return EigenvalueResult(value, False, "not-square-integrable")
    if value >= lambda_ess(query):
        return EigenvalueResult(value, False, "embedded")
    return EigenvalueResult(value, True, "discrete")


# -- gaps -------------------------------------------------------------------


@dataclass(frozen=True)
class GapResult:
    """Spectral gap in operator units and in flow units (I/F quotient)."""

    rayleigh: float        # gap of the Rayleigh quotient of L
    flow: float            # gap of the linearized entropy quotient
    case: str


def spectral_gap(query: SpectrumQuery, m: float | None = None) -> GapResult:
    """Gap of L under the query's constraint level.

    ``mass`` yields Lambda = -2a = 4p/(p-1); ``mass+center`` the improved
    constant Lambda_star (four cases below); ``mass+center+moment`` is
    only defined in the critical regime and is reported via
    :func:`critical_gap_parameters`.  The flow-units value is
    2(1-m) * rayleigh, i.e. 4 for the mass-only gap and 4*alpha for the
    improved one; ``m`` defaults to the fast-diffusion exponent matching
    the query.
    """
    d, a = query.d, query.a
    p = query.p
    if m is None:
        m = (p + 1.0) / (2.0 * p)
    two_1m = 2.0 * (1.0 - m)
    if query.constraint_level == "mass":
        lam = -2.0 * a
        return GapResult(rayleigh=lam, flow=two_1m * lam, case="mass")
    if query.constraint_level == "mass+center":
        lam, case = improved_gap(d, p)
        return GapResult(rayleigh=lam, flow=two_1m * lam, case=case)
    # mass + center + second moment: the critical-case improvement
    crit = critical_gap_parameters(d)
    return GapResult(rayleigh=2.0 * crit.a_gap / (1.0 - m) if m < 1 else math.nan,
                     flow=4.0 * crit.a_gap, case="critical")


def improved_gap(d: int, p: float) -> tuple[float, str]:
    """Lambda_star under mass and center constraints (four cases)."""
    if d == 1:
        if not 1.0 < p <= 3.0:
            raise ValueError("d = 1 improved gap requires 1 < p <= 3")
        return 6.0 * (p + 1.0) / (p - 1.0), "i"
    if d == 2 or (d >= 3 and p <= 1.0 + 2.0 / d):
        if p <= 1.0:
            raise ValueError("p must be > 1")
        return 8.0 * p / (p - 1.0), "ii"
    p_star = d / (d - 2.0)
    if d >= 3 and 1.0 + 2.0 / d <= p <= min(1.0 + 4.0 / (d + 2.0), p_star):
        return 16.0 * p / (p - 1.0) - 4.0 * (d + 2.0), "iii"
    if 3 <= d <= 5 and 1.0 + 4.0 / (d + 2.0) < p <= p_star:
        # essential-spectrum bottom, Persson form
        return (0.5 * (d - 2.0) - 2.0 * p / (p - 1.0)) ** 2, "iv"
    raise ValueError(f"(d, p) = ({d}, {p}) outside the case table "
                     "(i) d=1, p<=3; (ii) d=2 or p<=1+2/d; "
                     "(iii) 1+2/d<=p<=min(1+4/(d+2),p*); (iv) 3<=d<=5 above that")


def subcritical_flow_gap(ex: ExponentSet) -> float:
    """Improved entropy-production gap 4*alpha under mass+center constraints."""
    return 4.0 * ex.alpha


@dataclass(frozen=True)
class CriticalGap:
    """Critical-case gap parameter and its two published branches."""

    a_gap: float
    a_low: float          # (d+2)^2/(8d), stated for 3 <= d <= 6
    a_high: float         # 2(d-2)/d, stated for d >= 6
    eta_low: float        # (d-2)^2/(8d), stated for 3 <= d <= 6
    eta_high: float       # 2(d-4)/d, stated for d >= 6
    eta: float
    eta_branches_agree: bool


def critical_gap_parameters(d: int) -> CriticalGap:
    """Gap parameter a and improvement eta at the critical exponent.

    The two a-branches agree at d = 6; the two eta-branches do not
    ((d-2)^2/(8d) = 1/3 versus 2(d-4)/d = 2/3 there).  Both are returned
    and the discrepancy is flagged rather than resolved; ``eta`` carries
    the low branch for 3 <= d <= 6 and the high branch for d > 6.
    """
    if d < 3:
        raise ValueError("the critical case requires d >= 3")
    a_low = (d + 2.0) ** 2 / (8.0 * d)
    a_high = 2.0 * (d - 2.0) / d
    eta_low = (d - 2.0) ** 2 / (8.0 * d)
    eta_high = 2.0 * (d - 4.0) / d
    a_gap = a_low if d <= 6 else a_high
    eta = eta_low if d <= 6 else eta_high
    return CriticalGap(a_gap=a_gap, a_low=a_low, a_high=a_high,
                       eta_low=eta_low, eta_high=eta_high, eta=eta,
                       eta_branches_agree=math.isclose(eta_low, eta_high,
                                                       rel_tol=1e-12))


# -- discretized radial oracle ----------------------------------------------


def discretized_radial_eigs(query: SpectrumQuery, mesh: np.ndarray,
                            n_eigs: int = 6,
                            check_refinement: bool = True) -> np.ndarray:
    """Radial-sector eigenvalues from a P1 finite-element discretization.

    Assembles the quadratic forms int |u'|^2 (1+r^2)^a r^{d-1} dr against
    int u^2 (1+r^2)^{a-1} r^{d-1} dr with natural boundary conditions and
    returns the lowest ``n_eigs`` generalized eigenvalues (the first is
    the zero mode of the constants).  With ``check_refinement`` the first
    nonzero eigenvalue is recomputed on the mesh thinned by half and a
    disagreement above 5% raises, flagging a mesh too coarse to trust.
    """
    if check_refinement:
        vals = discretized_radial_eigs(query, mesh, n_eigs,
                                       check_refinement=False)
        coarse_mesh = np.asarray(mesh, dtype=float)[::2]
        if coarse_mesh[0] != 0.0:
            coarse_mesh = np.concatenate([[0.0], coarse_mesh])
        coarse = discretized_radial_eigs(query, coarse_mesh, min(n_eigs, 2),
                                         check_refinement=False)
        gap = abs(coarse[1] - vals[1]) / abs(vals[1])
        if gap > 0.05:
            raise ValueError(
                f"mesh too coarse: refinement changes the first nonzero "
                f"eigenvalue by {gap:.1%} (> 5%)")
        return vals
    if not query.a < -(query.d - 2.0) / 2.0:
        raise ValueError("no discrete spectrum for a >= -(d-2)/2")
    r = np.asarray(mesh, dtype=float)
    if r.ndim != 1 or r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
        raise ValueError("mesh must be 1D, increasing, starting at 0")
    d, a = query.d, query.a
    n = r.size
    h = np.diff(r)

    def seg_integral(f, lo, hi, order=8):
        # Gauss-Legendre per element
        x, w = np.polynomial.legendre.leggauss(order)
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * x[None, :]
        return (f(pts) * w[None, :]).sum(axis=1) * half

    w_stiff = seg_integral(lambda t: (1.0 + t ** 2) ** a * t ** (d - 1),
                           r[:-1], r[1:])
    stiff_diag = np.zeros(n)
    stiff_off = -w_stiff / h ** 2
    stiff_diag[:-1] += w_stiff / h ** 2
    stiff_diag[1:] += w_stiff / h ** 2

    def wfun(t):
        return (1.0 + t ** 2) ** (a - 1.0) * t ** (d - 1)

    # consistent P1 mass matrix entries per element
    m_ll = seg_integral(lambda t: wfun(t) * ((r[1:][None].T - t) / h[:, None]) ** 2,
                        r[:-1], r[1:])
    m_rr = seg_integral(lambda t: wfun(t) * ((t - r[:-1][None].T) / h[:, None]) ** 2,
                        r[:-1], r[1:])
    m_lr = seg_integral(lambda t: wfun(t) * (r[1:][None].T - t)
                        * (t - r[:-1][None].T) / h[:, None] ** 2,
                        r[:-1], r[1:])
    mass_diag = np.zeros(n)
    mass_diag[:-1] += m_ll
    mass_diag[1:] += m_rr

    A = np.diag(stiff_diag)
    A[np.arange(n - 1), np.arange(1, n)] = stiff_off
    A[np.arange(1, n), np.arange(n - 1)] = stiff_off
    B = np.diag(mass_diag)
    B[np.arange(n - 1), np.arange(1, n)] = m_lr
    B[np.arange(1, n), np.arange(n - 1)] = m_lr

    vals = scipy.linalg.eigh(A, B, eigvals_only=True,
                             subset_by_index=[0, n_eigs - 1])
    return vals


def radial_oracle_mesh(r_max: float = 120.0, n: int = 900) -> np.ndarray:
    """Graded mesh adapted to polynomial eigenfunctions with fat weights."""
    core = np.linspace(0.0, 10.0, int(0.6 * n))
    outer = 10.0 * (r_max / 10.0) ** (np.arange(1, n - int(0.6 * n) + 1)
                                      / (n - int(0.6 * n)))
    return np.concatenate([core, outer])
