import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwmax import gauss_walk as gw
from gwmax.errors import BranchError, DomainError
from gwmax.series import Precision
from gwmax.special_fn import riemann_zeta, std_normal_cdf

SQRT2PI = math.sqrt(2 * math.pi)
FINE = Precision(1e-11)

# P(M=0), E M, Var M from 30-digit mpmath summation of the Spitzer series
# (normal tail integrals by quadrature, sum over n by mpmath.nsum)
REFERENCE = {
    0.5: (0.52932514979927659925, 0.532062711965316482, 0.82294332117369307936),
    1.0: (0.80054311805563531382, 0.12637263468691298814, 0.12764600832385963598),
    2.0: (0.97626909786828803587, 0.0090226082937588012781, 0.006187450270184623719),
    4.0: (0.99996832540479246804, 7.1461696741853279875e-6, 3.0906282461748887651e-6),
}
J3_AT_1 = 0.17946357069238126704
J4_AT_2 = 0.0070825030054960412224


def truncated_asymptotic_mean(beta):
    return 1 / (2 * beta) - 1.4604 / SQRT2PI + beta / 4


def truncated_asymptotic_var(beta):
    return 1 / (4 * beta ** 2) - 0.25 + 2 * 0.2079 * beta / SQRT2PI - beta ** 2 / 24


class TestDrift:
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf, "1", True, None])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            gw.Drift(bad)

    def test_message(self):
        with pytest.raises(DomainError, match="beta must be positive"):
            gw.Drift(-1.0)

    def test_plain_floats_accepted(self):
        assert gw.mean_zeta(1.0).value == gw.mean_zeta(gw.Drift(1.0)).value


class TestFrozenReferences:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
    def test_zeta_route(self, beta):
        p, m, v = REFERENCE[beta]
        assert gw.p_zero_zeta(beta).value == pytest.approx(p, abs=1e-11)
        assert gw.mean_zeta(beta).value == pytest.approx(m, abs=1e-11)
        assert gw.var_zeta(beta).value == pytest.approx(v, abs=1e-11)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 4.0])
    def test_spitzer_route(self, beta):
        p, m, v = REFERENCE[beta]
        assert gw.p_zero_spitzer(beta).value == pytest.approx(p, abs=1e-11)
        assert gw.mean_spitzer(beta).value == pytest.approx(m, abs=1e-11)
        assert gw.var_spitzer(beta).value == pytest.approx(v, abs=1e-11)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 4.0])
    def test_extended_route(self, beta):
        ws = gw.stats_extended(beta)
        assert (ws.p_zero, ws.mean, ws.variance) == pytest.approx(REFERENCE[beta], abs=1e-11)

    def test_higher_moments(self):
        assert gw.jk_spitzer(3, 1.0).value == pytest.approx(J3_AT_1, abs=1e-11)
        assert gw.jk_zeta(3, 1.0).value == pytest.approx(J3_AT_1, abs=1e-11)
        assert gw.jk_spitzer(4, 2.0).value == pytest.approx(J4_AT_2, abs=1e-11)
        assert gw.jk_zeta(4, 2.0).value == pytest.approx(J4_AT_2, abs=1e-11)

    @pytest.mark.parametrize("beta", [0.5, 1.0, 4.0])
    def test_tail_bounds_cover_error(self, beta):
        p, m, v = REFERENCE[beta]
        for ev, ref in ((gw.p_zero_spitzer(beta), p), (gw.mean_spitzer(beta), m),
                        (gw.var_spitzer(beta), v)):
            assert abs(ev.value - ref) <= ev.tail_bound + 1e-14


class TestZetaRoute:
    def test_p_zero_first_order(self):
        assert gw.p_zero_zeta(0.01).value / (math.sqrt(2) * 0.01) == pytest.approx(1, abs=1e-2)

    def test_p_zero_matches_spitzer(self):
        assert gw.p_zero_zeta(0.5).value == pytest.approx(gw.p_zero_spitzer(0.5).value, abs=1e-10)
        assert gw.p_zero_zeta(3.0).value == pytest.approx(gw.p_zero_spitzer(3.0).value, abs=1e-9)

    def test_mean_examples(self):
        assert gw.mean_zeta(0.1).value == pytest.approx(4.4424, abs=1e-3)
        assert gw.mean_zeta(1.0).value == pytest.approx(gw.mean_spitzer(1.0).value, abs=1e-10)
        assert gw.mean_zeta(0.5).value < 1.0

    def test_variance_examples(self):
        assert gw.var_zeta(0.1).value == pytest.approx(24.7662, abs=1e-3)
        assert gw.var_zeta(1.5).value == pytest.approx(gw.var_spitzer(1.5).value, abs=1e-9)

    def test_variance_leading_term(self):
        scaled = [b * b * gw.var_zeta(b).value for b in (0.2, 0.1, 0.05)]
        gaps = [abs(x - 0.25) for x in scaled]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.002

    @pytest.mark.parametrize("fn", [gw.p_zero_zeta, gw.mean_zeta, gw.var_zeta])
    def test_domain(self, fn):
        with pytest.raises(DomainError):
            fn(gw.BETA_MAX)
        with pytest.raises(DomainError):
            fn(4.0)

    def test_domain_edge(self):
        for fn in (gw.p_zero_zeta, gw.mean_zeta, gw.var_zeta):
            ev = fn(3.4)
            assert ev.tail_bound <= 1e-8
        terms = gw.zeta_series_terms(0, 3.4, 400)
        ratio = abs(terms[-1] / terms[-2])
        rho = 3.4 ** 2 / (4 * math.pi)
        assert ratio < rho
        assert ratio == pytest.approx(rho, rel=0.01)

    def test_zeta_power_series_bound_is_rigorous(self):
        # term ratio never exceeds beta^2/(4 pi), the basis of the tail bound
        for k in (0, 1, 2, 5):
            terms = gw.zeta_series_terms(k, 3.0, 60)
            ratios = [abs(b / a) for a, b in zip(terms, terms[1:])]
            assert max(ratios) < 9.0 / (4 * math.pi)


class TestSpitzerRoute:
    def test_mc_scale_example(self):
        ev = gw.p_zero_spitzer(3.0)
        assert 0 < ev.value < 1

    def test_large_beta(self):
        ws = gw.stats_spitzer(10.0)
        q10 = std_normal_cdf(-10.0)
        assert ws.diagnostics["j0"].value == pytest.approx(q10, rel=1e-10)
        assert ws.diagnostics["j0"].terms_used == 1
        assert ws.p_zero <= 1.0
        assert 1.0 - ws.p_zero < 1e-15

    def test_variance_asymptotic(self):
        assert gw.var_spitzer(0.2).value == pytest.approx(truncated_asymptotic_var(0.2), abs=2e-3)

    def test_mean_asymptotic(self):
        assert gw.mean_spitzer(0.1).value == pytest.approx(4.4424, abs=1e-3)

    def test_mean_beyond_zeta_domain(self):
        assert gw.mean_spitzer(4.0).value == pytest.approx(gw.stats_extended(4.0).mean, abs=1e-6)

    @pytest.mark.parametrize("beta", [0.02, 0.005])
    def test_small_beta_uses_euler_maclaurin(self, beta):
        # the envelope would need far more than 1e5 terms here
        ws = gw.stats_spitzer(beta)
        zs = gw.stats_zeta(beta)
        assert ws.p_zero == pytest.approx(zs.p_zero, abs=1e-10)
        assert ws.mean == pytest.approx(zs.mean, abs=1e-9)
        assert ws.variance == pytest.approx(zs.variance, rel=1e-12, abs=1e-9)
        assert ws.diagnostics["mean"].terms_used < 10_000


class TestJk:
    @pytest.mark.parametrize("beta", [0.5, 1.5])
    def test_identities(self, beta):
        p = gw.p_zero_spitzer(beta).value
        assert gw.jk_spitzer(0, beta).value == pytest.approx(-math.log(p), abs=1e-10)
        assert gw.jk_zeta(1, beta).value == pytest.approx(gw.mean_zeta(beta).value, abs=1e-11)
        assert gw.jk_zeta(2, beta).value == pytest.approx(gw.var_zeta(beta).value, abs=1e-11)

    def test_zero_order_zeta(self):
        p = gw.p_zero_zeta(0.7).value
        assert gw.jk_zeta(0, 0.7).value == pytest.approx(-math.log(p), abs=1e-12)

    def test_spitzer_identities(self):
        assert gw.jk_spitzer(0, 0.7).value == pytest.approx(
            -math.log(gw.p_zero_spitzer(0.7).value), abs=1e-12)
        assert gw.jk_spitzer(1, 0.7).value == pytest.approx(gw.mean_spitzer(0.7).value, abs=1e-11)

    @pytest.mark.parametrize("k", range(3, 11))
    @pytest.mark.parametrize("beta", [0.4, 1.0, 2.0, 3.0])
    def test_general_formula_against_spitzer(self, k, beta):
        z = gw.jk_zeta(k, beta, FINE)
        s = gw.jk_spitzer(k, beta, FINE)
        assert z.value == pytest.approx(s.value, rel=1e-11, abs=1e-9)

    def test_refinement_stability(self):
        a = gw.jk_spitzer(4, 1.5, Precision(1e-12, 200_000)).value
        b = gw.jk_spitzer(4, 1.5, Precision(1e-12, 400_000)).value
        assert a > 0 and math.isfinite(a)
        assert abs(a - b) < 1e-9

    @pytest.mark.parametrize("k", [-1, 11, 2.0, True])
    def test_order_domain(self, k):
        with pytest.raises(DomainError):
            gw.jk_spitzer(k, 1.0)
        with pytest.raises(DomainError):
            gw.jk_zeta(k, 1.0)


class TestTruncatedNormalMoments:
    @pytest.mark.parametrize("a", [0.0, 0.3, 1.0, 1.0000001, 2.5, 9.0, 60.0])
    def test_against_quadrature(self, a):
        got = gw.truncated_normal_moments(a, 8)
        for j in range(9):
            ref = mp.quad(lambda t: t ** j * mp.exp(-t * t / 2 - a * t), [0, 1, 10, mp.inf])
            assert got[j] == pytest.approx(float(ref), rel=1e-13)

    def test_vector_matches_scalar(self):
        a = np.array([0.2, 0.9, 1.1, 4.0, 30.0])
        vec = gw.truncated_normal_moments(a, 5)
        for i, x in enumerate(a):
            np.testing.assert_allclose(vec[:, i], gw.truncated_normal_moments(float(x), 5),
                                       rtol=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.0, max_value=50.0))
    def test_recursion_identity(self, a):
        m = gw.truncated_normal_moments(a, 6)
        for j in range(1, 6):
            assert m[j + 1] == pytest.approx(j * m[j - 1] - a * m[j], rel=1e-9, abs=1e-300)


class TestAsymptotic:
    def test_values(self):
        ws = gw.asymptotic_stats(0.1)
        assert round(ws.mean, 4) == 4.4424
        assert round(ws.variance, 4) == 24.7662
        assert ws.method == "asymptotic"
        assert not ws.diagnostics["mean"].rigorous

    def test_matches_paper_constants(self):
        ws = gw.asymptotic_stats(0.1)
        assert ws.mean == pytest.approx(truncated_asymptotic_mean(0.1), abs=1e-4)
        assert ws.variance == pytest.approx(truncated_asymptotic_var(0.1), abs=1e-4)

    def test_residual_ratio(self):
        target = riemann_zeta(-0.5).value / (2 * SQRT2PI)
        residuals = [(gw.mean_zeta(b).value - gw.asymptotic_stats(b).mean) / b ** 2
                     for b in (0.4, 0.2, 0.1)]
        gaps = [abs(r - target) for r in residuals]
        assert gaps[0] > gaps[1] > gaps[2]
        assert residuals[-1] == pytest.approx(target, rel=0.05)

    def test_p_zero_truncation(self):
        ws = gw.asymptotic_stats(0.05)
        assert ws.p_zero == pytest.approx(gw.p_zero_zeta(0.05).value, rel=1e-3)


class TestSSeries:
    def test_small_b_limits(self):
        b = -1e-6j
        s1 = gw.s_series(1, b).value
        s2 = gw.s_series(2, b).value
        assert s1 == pytest.approx(math.sqrt(math.pi) / 4 * float(mp.zeta(1.5)), abs=1e-5)
        assert s2 == pytest.approx(math.sqrt(math.pi) / 8 * float(mp.zeta(2.5)), abs=1e-5)

    @pytest.mark.parametrize("j", [1, 2])
    @pytest.mark.parametrize("b", [-0.1j, -2.5j, 0.3 - 0.4j])
    def test_against_mpmath_summation(self, j, b):
        def term(n):
            return (mp.sqrt(n) - mp.sqrt(n - b)) / n ** j

        pref = mp.sqrt(mp.pi) / (2 * j * b)
        ref = complex(pref * mp.nsum(term, [1, mp.inf], method="euler-maclaurin"))
        assert abs(gw.s_series(j, b).value - ref) < 1e-12

    @pytest.mark.parametrize("b", [-0.1j, -2.5j, 0.3 - 0.4j])
    def test_arcsin_series_against_brute_force(self, b):
        # direct head in numpy plus the arcsin Taylor tail against Hurwitz zeta
        n_head = 200_000
        n = np.arange(1, n_head + 1, dtype=float)
        w = np.sqrt(b / n)
        head = np.sum(np.arcsin(w) - w)
        tail, g = 0j, 1.0
        for r in range(1, 8):
            g *= (2 * r - 1) / (2 * r)
            tail += g / (2 * r + 1) * complex(mp.mpc(b) ** (r + 0.5) * mp.zeta(r + 0.5, n_head + 1))
        ref = math.sqrt(math.pi) / np.sqrt(b) * (head + tail)
        assert abs(gw.s_series(0, b).value - ref) < 1e-12

    def test_reproduces_mean_series_at_one(self):
        beta = 1.0
        b = -1j * beta ** 2 / (4 * math.pi)
        ext = gw.stats_extended(beta).mean
        assert ext == pytest.approx(gw.mean_zeta(beta).value, abs=1e-6)
        assert abs(gw.s_series(1, b).value) > 0

    def test_branch_and_domain(self):
        with pytest.raises(BranchError):
            gw.s_series(1, 2.0)
        with pytest.raises(DomainError):
            gw.s_series(0, 0)
        with pytest.raises(DomainError):
            gw.s_series(3, -1j)


class TestExtended:
    @pytest.mark.parametrize("beta", [1.0, 2.0, 3.0])
    def test_overlap_with_zeta(self, beta):
        e, z = gw.stats_extended(beta), gw.stats_zeta(beta)
        assert e.p_zero == pytest.approx(z.p_zero, abs=1e-6)
        assert e.mean == pytest.approx(z.mean, abs=1e-6)
        assert e.variance == pytest.approx(z.variance, abs=1e-6)

    @pytest.mark.parametrize("beta", [4.0, 7.5, 25.0])
    def test_beyond_domain_matches_spitzer(self, beta):
        e, s = gw.stats_extended(beta), gw.stats_spitzer(beta)
        assert (e.p_zero, e.mean, e.variance) == pytest.approx(
            (s.p_zero, s.mean, s.variance), abs=1e-10)

    def test_method_tag(self):
        assert gw.stats_extended(4.0).method == "extended"


class TestDispatcherAndInvariants:
    def test_tags(self):
        assert gw.stats_auto(0.3).method == "zeta_series"
        assert gw.stats_auto(3.0).method == "spitzer"
        assert gw.stats_auto(2.2).method == "spitzer"

    @pytest.mark.parametrize("beta", [0.3, 1.7, 2.05, 2.06, 3.0, 6.0])
    def test_bit_identical(self, beta):
        auto = gw.stats_auto(beta)
        explicit = gw.stats_zeta(beta) if auto.method == "zeta_series" else gw.stats_spitzer(beta)
        assert auto.as_dict() == explicit.as_dict()

    @pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    def test_route_agreement(self, beta):
        z, s = gw.stats_zeta(beta, FINE), gw.stats_spitzer(beta, FINE)
        assert abs(z.p_zero - s.p_zero) <= 1e-9
        assert abs(z.mean - s.mean) <= 1e-9
        assert abs(z.variance - s.variance) <= 1e-9

    def test_monotone_and_bounded_on_grid(self):
        grid = np.linspace(0.1, 3.4, 50)
        stats = [gw.stats_auto(float(b)) for b in grid]
        p = [s.p_zero for s in stats]
        m = [s.mean for s in stats]
        assert all(x < y for x, y in zip(p, p[1:]))
        assert all(x > y for x, y in zip(m, m[1:]))
        for b, s in zip(grid, stats):
            assert 0 < s.p_zero < 1
            assert 0 < s.mean < 1 / (2 * b)
            assert s.variance > 0

    def test_gap_limit(self):
        gap = 1 / (2 * 0.01) - gw.mean_zeta(0.01).value
        assert gap == pytest.approx(0.5826, abs=5e-3)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(min_value=0.15, max_value=3.3))
    def test_property_route_agreement(self, beta):
        z, s = gw.stats_zeta(beta), gw.stats_spitzer(beta)
        assert z.mean == pytest.approx(s.mean, abs=1e-9)
        assert z.variance == pytest.approx(s.variance, abs=1e-9)
        assert z.p_zero == pytest.approx(s.p_zero, abs=1e-9)


class TestCrossover:
    def test_values(self):
        x0, beta0, common = gw.decay_crossover()
        assert round(x0, 4) == 1.4597
        assert round(beta0, 4) == 1.7086
        assert round(common, 4) == 0.2323

    def test_equation(self):
        x0, beta0, common = gw.decay_crossover()
        assert x0 * math.exp(x0) == pytest.approx(2 * math.pi, rel=1e-14)
        assert math.exp(-beta0 ** 2 / 2) == pytest.approx(beta0 ** 2 / (4 * math.pi), rel=1e-12)
        assert common == pytest.approx(math.exp(-x0), rel=1e-15)
