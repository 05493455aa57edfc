"""Constant chains: exact anchors, scalings and the golden regression."""

import json
import math
import os

import mpmath as mp
import numpy as np
import pytest

from fdstab import constants as C
from fdstab.ledger import ConstantLedger, LedgerEntry
from fdstab.logscale import LogReal, logreal
from fdstab.params import derive_exponents

mp.mp.dps = 40
GOLDEN = os.path.join(os.path.dirname(__file__), "data",
                      "golden_ledger_d3_m075.json")


def test_embedding_constants():
    assert abs(C.embedding_constant(2) - 2.25675) <= 1e-5
    hp3 = float(4 / (mp.power(2, mp.mpf(2) / 3) * mp.power(mp.pi, mp.mpf(4) / 3)))
    assert abs(C.embedding_constant(3) - hp3) <= 1e-13 * hp3
    hp1 = float(mp.power(2, mp.mpf(5) / 4) * 6 / mp.pi ** 2)
    assert abs(C.embedding_constant(1, 8.0) - hp1) <= 1e-13 * hp1
    with pytest.raises(ValueError):
        C.embedding_constant(1)          # p required
    with pytest.raises(ValueError):
        C.embedding_constant(1, 3.0)     # p must exceed 4


def test_sigma_series_truncation_stability():
    s30 = C.sigma_series(3, rel_tail=1e-30)
    s35 = C.sigma_series(3, rel_tail=1e-35)
    assert abs(s30.ln_float() - s35.ln_float()) <= 1e-12 * abs(s30.ln_float())
    # larger dimensions stay finite through the log-space sum
    s20 = C.sigma_series(20)
    assert s20.log_representable


def test_moser_chain_anchors():
    mc = C.moser_chain(3, 0.5, 2.0)
    assert mc.c2 == 2592.0
    assert mc.mu_float == 4.0
    # nu stays in (0, 1) and matches 1/hbar at log-space resolution
    assert mc.nu.lnsign < 0
    assert mc.nu.lndepth == 0 and mc.hbar.lndepth == 0
    assert -mc.nu.lnmag >= -mc.hbar.lnmag * (1.0 + 1e-12)
    # vartheta = nu/(d + nu) collapses to nu/d at this scale
    assert mc.vartheta.lnmag == pytest.approx(mc.nu.lnmag, rel=1e-12)


def test_moser_chain_against_mpmath():
    # end-to-end recomputation of ln h at d = 3 with arbitrary-precision
    # arithmetic, fully independent of the tower representation
    d = 3
    K = 4 / (mp.power(2, mp.mpf(2) / 3) * mp.power(mp.pi, mp.mpf(4) / 3))
    q = 2 * d + 4
    sigma = mp.nsum(lambda j: (mp.mpf(3) / 4) ** j * ((2 + j) * (1 + j)) ** q,
                    [0, mp.inf])
    c0 = mp.power(3, mp.mpf(2) / d) \
        * mp.power(2, ((d + 2) * (3 * d * d + 18 * d + 24) + 13) / mp.mpf(2 * d)) \
        * mp.power(mp.power(2 + d, 1 + mp.mpf(4) / d ** 2)
                   / mp.power(d, 1 + mp.mpf(2) / d ** 2), (d + 1) * (d + 2)) \
        * mp.power(K, mp.mpf(2 * d + 4) / d)
    bracket = 1 + mp.power(2, d + 2) / mp.power(mp.sqrt(2) - 1, 2 * (d + 2))
    ln_h = mp.power(2, d + 4) * mp.power(3, d) * d \
        + c0 ** 3 * mp.power(2, 2 * (d + 2) + 3) * bracket * sigma
    mc = C.moser_chain(3, 0.5, 2.0)
    assert abs(mc.sigma.ln_float() - float(mp.log(sigma))) \
        <= 1e-13 * float(mp.log(sigma))
    assert abs(mc.c0.ln_float() - float(mp.log(c0))) \
        <= 1e-13 * float(mp.log(c0))
    assert abs(mc.h.ln_float() - float(ln_h)) <= 1e-12 * float(ln_h)


def test_nu_small_hbar_branches():
    # moderate hbar exercises the exact log1p branch
    assert math.isclose(C._nu_from_hbar(logreal(2.0)).to_float(), 0.5,
                        rel_tol=1e-12)
    nu = C._nu_from_hbar(logreal(4.0 / 3.0))
    assert math.isclose(nu.to_float(), 1.0, rel_tol=1e-12)


def test_kappa0_and_small_lemma_constants():
    k0 = C.bombieri_giusti_kappa0(5.0, 2.0, 2592.0, 0.5)
    # exponent max(2*2592, 8*8/(1/2)^10) = max(5184, 65536)
    assert math.isclose(k0.ln_float(), 65536.0, rel_tol=1e-12)
    assert math.isclose(C.weighted_poincare_constant(4.0, 1.0, 2.0, 2.0),
                        4.0, rel_tol=1e-14)
    with pytest.raises(ValueError):
        C.weighted_poincare_constant(4.0, 1.0, 0.0, 2.0)
    grad, lap = C.truncation_bounds(3, 1.0, 0.5)
    assert grad == 4.0 and lap == 48.0
    assert math.isclose(C.aleksandrov_constant(1), 2.0, rel_tol=1e-14)


def test_combined_operation_wrappers():
    out = C.interpolation_constants(3, nu=0.5)
    assert math.isclose(out["K"], C.embedding_constant(3), rel_tol=1e-15)
    assert out["C_holder"].to_float() > 0
    aux = C.auxiliary_lemma_constants(3, supp_volume=2.0 ** 3 * 4.19,
                                      sup_b=1.0, integral_b=4.19, diam=6.0,
                                      beta=5.0, c1=2.0, c2=2592.0,
                                      r0=1.0, r1=0.5)
    assert set(aux) == {"A_d", "lambda_b", "kappa0", "grad_bound",
                        "laplacian_bound"}
    assert math.isclose(aux["A_d"], C.aleksandrov_constant(3), rel_tol=1e-15)


def test_positivity_constants_exact_anchor():
    ex = derive_exponents(3, m=2.0 / 3.0)
    _, kappa_star = C.positivity_constants(ex)
    assert kappa_star == 96.0


def test_c_alpha():
    assert C.c_alpha_min(2.0) == 1.0
    # alpha = 1: the quotient at (x, y) = (1, 1) equals 1/3 and is optimal
    val = C.c_alpha_min(1.0)
    assert math.isclose(val, 1.0 / 3.0, rel_tol=1e-8)
    v125 = C.c_alpha_min(1.25)
    assert 0.0 < v125 < 1.0


def test_ghp_chain_values_and_scalings():
    ex = derive_exponents(3, m=0.75)
    chain = C.ghp_chain(ex, 1.0, 1.0)
    assert math.isclose(chain.kappa_star, 2.0 ** (3 * ex.alpha + 2) * 3 ** ex.alpha,
                        rel_tol=1e-13)
    assert chain.eps_md == 0.5
    assert chain.lam0 < chain.lam1
    # epsilon scalings of the outer radii and times
    eps = np.logspace(-4, -2, 7)
    rr = [C.outer_times_radii(chain, float(e)) for e in eps]
    for key, slope_want in (("rho_under", -0.5), ("rho_over", -0.5),
                            ("T_under", -1.0), ("T_over", -1.0)):
        vals = np.array([r[key] for r in rr])
        slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
        assert abs(slope - slope_want) <= 0.05
    with pytest.raises(ValueError):
        C.outer_times_radii(chain, 0.9)
    with pytest.raises(ValueError):
        C.ghp_chain(derive_exponents(3, m=0.75), -1.0, 1.0)
    with pytest.raises(ValueError):
        C.ghp_chain(derive_exponents(3, m=0.6), 1.0, 1.0)  # below m_1


def test_threshold_time_structure():
    ex = derive_exponents(3, m=0.75)
    chain = C.ghp_chain(ex, 1.0, 1.0)
    thr = C.threshold_time(chain, 1e-3)
    # Monotonicity in A, G and eps.  The A/G dependence enters through the
    # factor 1 + A^{1-m} + G^{alpha/2}, which sits below the resolution of
    # the astronomically large leading term, so the representation-level
    # statement is "never smaller", with the driving factor checked as a
    # plain float.
    up_a = C.threshold_time(chain, 1e-3, A=4.0)
    up_g = C.threshold_time(chain, 1e-3, G=9.0)
    dn_e = C.threshold_time(chain, 1e-2)
    assert not (up_a.t_star < thr.t_star)
    assert not (up_g.t_star < thr.t_star)
    assert not (thr.t_star < dn_e.t_star)
    m = ex.m
    assert 1 + 4.0 ** (1 - m) + 1 > 1 + 1 + 1          # A-factor grows
    assert 1 + 1 + 9.0 ** (ex.alpha / 2) > 1 + 1 + 1   # G-factor grows
    # T_star consistency: c_star = cbar_star lambda_bullet^{-alpha}
    want = thr.cbar_star * logreal(ex.lambda_bullet ** -ex.alpha)
    assert thr.c_star.close_to(want, rel=1e-12)


def test_cbar_star_divergence_near_m_one():
    # the eps kappa_3 term alone forces cbar >= 8/(alpha(1-m))
    for m in (0.75, 0.9):
        ex = derive_exponents(3, m=m)
        chain = C.ghp_chain(ex, 1.0, 1.0)
        cbar, _ = C.cbar_star(chain)
        floor = logreal(8.0 / (ex.alpha * (1.0 - m)))
        assert floor < cbar


def test_subcritical_stability_constants():
    ex = derive_exponents(3, m=0.75)
    stab = C.stability_constants_subcritical(ex, 1.0, 1.0)
    assert math.isclose(stab.eta, 0.5, rel_tol=1e-12)
    assert math.isclose(stab.chi, 1.0 / 580.0, rel_tol=1e-15)
    assert stab.zeta.lnsign < 0            # zeta is (astronomically) small
    assert stab.zeta_star.lnsign < 0
    # Z(A, G) never increases in A (the divisor change sits below the
    # resolution of the leading magnitude)
    z_big_a = C.stability_constants_subcritical(ex, 100.0, 1.0).Z
    assert not (stab.Z < z_big_a)
    with pytest.raises(ValueError):
        C.stability_constants_subcritical(derive_exponents(3, m=2.0 / 3.0),
                                          1.0, 1.0)


def test_critical_stability_constants():
    cs = C.stability_constants_critical(3, 1.0)
    assert math.isclose(cs.eta, 1.0 / 24.0, rel_tol=1e-12)
    assert cs.tau_bullet > 0
    assert math.isclose(cs.q_scale, 2.0 ** -0.5 / 5.0, rel_tol=1e-13)
    # C_star(A) never increases in A, and the dividing factor
    # 1 + A^{1/(2d)} is strictly increasing (the ratio itself saturates
    # at the representation's resolution)
    cs_big = C.stability_constants_critical(3, 64.0)
    assert not (cs.C_star < cs_big.C_star)
    assert not (cs.F_frak_star < cs.C_star)   # dividing by 1+A^{..} >= 1
    assert 1.0 + 64.0 ** (1.0 / 6.0) > 2.0
    with pytest.raises(ValueError):
        C.stability_constants_critical(2, 1.0)
    # the refined time bound dominates the base one by more than the delay
    lead, tau_b = C.critical_time_margin(cs, 1e-3, 1.0, 3)
    assert lead > tau_b


def test_ledger_regression_against_golden():
    led = C.build_ledger(3, 0.75, 0.5, 2.0, 1.0, 1.0)
    with open(GOLDEN) as fh:
        entries = json.load(fh)
    golden = ConstantLedger()
    for e in entries:
        ls = e["log_scale"]
        golden.entries[e["name"]] = LedgerEntry(
            e["name"], LogReal(ls["lnsign"], ls["lndepth"], ls["lnmag"]),
            e["formula"])
    bad = led.close_to(golden, rel=1e-12)
    assert not bad, f"ledger drifted from golden values: {bad}"


def test_ledger_json_schema():
    led = C.build_ledger(3, 0.75, 0.5, 2.0, 1.0, 1.0)
    payload = json.loads(led.to_json())
    assert [e["name"] for e in payload] == led.names()
    for e in payload:
        assert set(e) == {"name", "log_value", "value", "formula", "log_scale"}
        if e["value"] is not None:
            assert math.isfinite(e["value"]) and e["value"] > 0
        if e["log_value"] is not None:
            assert math.isfinite(e["log_value"])
        # every entry carries a finite leveled representation
        assert math.isfinite(e["log_scale"]["lnmag"])


def test_holder_interp_constant_plain_values():
    # at nu = 1/2, p = 1, d = 3 everything is order one
    val = C.holder_lp_interp_constant(3, 0.5, 1.0).to_float()
    d, nu, p = 3, 0.5, 1.0
    om = 4.0 * math.pi
    lead = 2.0 ** (((p - 1) * (d + p * nu) + d * p) / (p * (d + p * nu)))
    vol = (1.0 + d / om) ** (1 / p)
    dn = d / (p * nu)
    mid = (1.0 + dn ** (1 / p)) ** (d / (d + p * nu))
    last = (dn ** (p * nu / (d + p * nu)) + (1 / dn) ** (d / (d + p * nu))) ** (1 / p)
    assert math.isclose(val, lead * vol * mid * last, rel_tol=1e-12)
