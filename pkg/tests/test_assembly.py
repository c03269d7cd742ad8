import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from viscid.analysis import fit_rate
from viscid.assembly import (
    CoverageError,
    MatchedConfig,
    MatchedSolution,
    RegionTag,
    contour_radius,
    cutoff_zeta,
    inner_distances,
    matched_solution,
    pde_residual,
    region_classify,
    theta,
)
from viscid.hyperbolic import InviscidSolution, inviscid_eval, outer_corrector_psi1
from viscid.model import make_burgers, make_burgers_transport
from viscid.parabolic import inner_profile_U
from viscid.profile import field_d, profile_uxx

BURGERS = make_burgers()
SOL = InviscidSolution()


@pytest.fixture(scope="module")
def U():
    return inner_profile_U(-50.0, 100.0, 0.1, store_times=np.linspace(-2, 0, 201), corrected=True)


class TestConfig:
    def test_defaults(self):
        mc = MatchedConfig(nu=1e-3)
        assert (mc.K, mc.L, mc.beta) == (1, 0, 0.47)

    @pytest.mark.parametrize("kw", [dict(beta=0.5), dict(beta=6 / 13), dict(K=2), dict(L=1),
                                    dict(cutoff_R=-1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            MatchedConfig(nu=1e-3, **kw)

    def test_contour_radius(self):
        assert contour_radius(1.0) == pytest.approx(1.0, abs=1e-8)
        assert contour_radius(2.0) == pytest.approx(0.5, abs=1e-8)
        for S in (1.0, 1.5, 2.0):
            assert 0.3 <= contour_radius(S) <= 1.0

    def test_contour_radius_brute_force(self):
        x = np.linspace(0, math.pi / 2, 200_001)
        for S in (1.0, 2.0, 3.0):
            assert contour_radius(S) == pytest.approx(np.min(np.hypot(np.cos(x) / S, x)), abs=1e-8)


class TestRegions:
    def test_examples(self):
        mc = MatchedConfig(nu=1e-3)
        assert region_classify(-1.0, 0.0, mc, BURGERS) == RegionTag.OUTER
        assert region_classify(0.0, 0.0, mc, BURGERS) == RegionTag.INNER | RegionTag.DIFFUSIVE
        e = 0.375 * mc.scale(BURGERS)
        assert RegionTag.MATCHING in region_classify(-e, 0.0, mc, BURGERS)

    @given(st.floats(-1, 0), st.floats(-1, 1), st.sampled_from([1e-2, 1e-3, 1e-4]))
    def test_partition(self, t, x, nu):
        mc = MatchedConfig(nu=nu)
        tag = region_classify(t, x, mc, BURGERS)
        zones = [z for z in (RegionTag.OUTER, RegionTag.MATCHING, RegionTag.INNER) if z in tag]
        assert len(zones) == 1
        assert (RegionTag.DIFFUSIVE in tag) == (field_d(t, x) <= nu**0.25)

    def test_diffusive_inside_inner(self):
        """Every diffusive point is tagged inner, at each acceptance viscosity."""
        outside = {}
        for nu in (1e-2, 10**-2.5, 1e-3, 10**-3.5, 1e-4):
            mc = MatchedConfig(nu=nu)
            t = -(nu**0.5) * np.linspace(0.0, 1.0, 41)
            x = nu**0.75 * np.linspace(-1.0, 1.0, 41)
            tags = [region_classify(tt, xx, mc, BURGERS) for tt in t for xx in x]
            bad = sum(RegionTag.DIFFUSIVE in g and RegionTag.INNER not in g for g in tags)
            if bad:
                outside[f"{nu:.3g}"] = bad
        assert not outside, f"diffusive points outside the inner zone per nu: {outside}"

    def test_tags_agree_with_cutoff(self):
        mc = MatchedConfig(nu=1e-3)
        for e in np.linspace(0, 2, 41) * mc.scale(BURGERS):
            z = cutoff_zeta(-e, 0.0, mc, BURGERS)
            tag = region_classify(-e, 0.0, mc, BURGERS)
            assert (z == 1.0) == (RegionTag.OUTER in tag)
            assert (z == 0.0) == (RegionTag.INNER in tag)

    @given(st.floats(-50, 0), st.floats(-50, 50), st.floats(1e-6, 1.0))
    def test_inner_euclidean(self, T, X, nu):
        E, D = inner_distances(T, X, nu)
        assert E == pytest.approx(nu**-0.5 * math.hypot(nu**0.5 * T, nu**0.75 * X), rel=1e-14,
                                  abs=1e-300)
        assert D == pytest.approx(field_d(T, X), rel=1e-15)


class TestCutoff:
    def test_theta_values(self):
        assert theta(0.5) == 0.0 and theta(1.0) == 1.0 and theta(0.2) == 0.0 and theta(3.0) == 1.0
        assert theta(0.75) == pytest.approx(0.5, abs=1e-15)
        s = np.linspace(0.5, 1.0, 201)
        assert np.allclose(theta(s) + theta(1.5 - s), 1.0)

    def test_zeta_examples(self):
        mc = MatchedConfig(nu=1e-3)
        sc = mc.scale(BURGERS)
        assert cutoff_zeta(-0.5 * sc, 0.0, mc, BURGERS) == 1.0
        assert cutoff_zeta(-0.25 * sc, 0.0, mc, BURGERS) == 0.0
        assert 0 < cutoff_zeta(-0.375 * sc, 0.0, mc, BURGERS) < 1

    def test_monotone_and_c1(self):
        mc = MatchedConfig(nu=1e-3)
        sc = mc.scale(BURGERS)
        e = np.linspace(0.2, 0.55, 4001) * sc
        z = cutoff_zeta(-e, 0.0 * e, mc, BURGERS)
        assert np.all(np.diff(z) >= 0)
        h = 1e-8 * sc
        for edge in (0.25 * sc, 0.5 * sc):
            left = (cutoff_zeta(-edge, 0.0, mc, BURGERS) - cutoff_zeta(-(edge - h), 0.0, mc, BURGERS)) / h
            right = (cutoff_zeta(-(edge + h), 0.0, mc, BURGERS) - cutoff_zeta(-edge, 0.0, mc, BURGERS)) / h
            assert abs(left - right) <= 1e-6


class TestMatchedSolution:
    def test_outer_region(self, U):
        mc = MatchedConfig(nu=1e-3)
        t, x = np.array([-0.5, -0.2]), np.array([0.3, -0.8])
        got = matched_solution(mc, t, x, U, SOL)
        want = inviscid_eval(SOL, t, x)[0] + 1e-3 * outer_corrector_psi1(SOL, t, x)
        assert np.array_equal(got[0], want)

    def test_inner_region(self, U):
        nu = 1e-3
        mc = MatchedConfig(nu=nu)
        t, x = np.array([-1e-4, -2e-3]), np.array([1e-4, -5e-4])
        got = matched_solution(mc, t, x, U, SOL)[0]
        assert np.array_equal(got, nu**0.25 * U.interpolate(t * nu**-0.5, x * nu**-0.75))

    def test_continuity(self, U):
        mc = MatchedConfig(nu=1e-3)
        M = MatchedSolution(mc, SOL, U)
        sc = mc.scale(BURGERS)
        eps = 1e-13
        for edge in (0.25 * sc, 0.5 * sc):
            th = np.linspace(-math.pi, 0, 37)
            a = M(edge * (1 - eps) * np.sin(th), edge * (1 - eps) * np.cos(th))
            b = M(edge * (1 + eps) * np.sin(th), edge * (1 + eps) * np.cos(th))
            assert np.max(np.abs(a - b)) <= 1e-10

    def test_coverage(self, U):
        with pytest.raises(CoverageError):
            MatchedSolution(MatchedConfig(nu=1e-4, cutoff_R=20.0), SOL, U)

    def test_two_component_needs_k0(self, U):
        sol = InviscidSolution(make_burgers_transport(1.0))
        with pytest.raises(NotImplementedError):
            MatchedSolution(MatchedConfig(nu=1e-3), sol, U)
        M = MatchedSolution(MatchedConfig(nu=1e-3, K=0), sol, U)
        assert M(np.array([-1e-4]), np.array([0.0]))[1, 0] == 0.0  # nonshocking inner part

    def test_matching_annulus_gap(self, U):
        """``sup |outer - inner|`` over the annulus decays faster than nu^(1/4)."""
        gaps = []
        nus = (1e-2, 1e-3, 1e-4)
        for nu in nus:
            mc = MatchedConfig(nu=nu)
            M = MatchedSolution(mc, SOL, U)
            r = np.linspace(0.25, 0.5, 26) * mc.scale(BURGERS)
            R, TH = np.meshgrid(r, np.linspace(-math.pi, 0, 181))
            t, x = R * np.sin(TH), R * np.cos(TH)
            gaps.append(float(np.max(np.abs(M.outer(t, x)[0] - M.inner(t, x)[0]))))
        fit = fit_rate(list(zip(nus, gaps)))
        assert gaps[0] > gaps[1] > gaps[2]
        assert fit.slope > 0.25


class TestResidual:
    def test_exact_viscous_solution(self):
        field = lambda t, x: (np.asarray(x, float) / np.asarray(t, float))[np.newaxis]
        assert np.max(np.abs(pde_residual(field, BURGERS, 0.1, -0.5, 0.3, 1e-4))) <= 1e-6

    def test_inviscid_residual_is_viscous_term(self):
        field = lambda t, x: inviscid_eval(SOL, t, x)
        for nu in (1e-2, 1e-3):
            r = pde_residual(field, BURGERS, nu, -0.5, 0.3, 1e-4)[0]
            assert r == pytest.approx(-nu * profile_uxx(-0.5, 0.3), rel=1e-2)

    def test_hierarchy_slopes(self):
        r0, r1 = [], []
        nus = (1e-2, 1e-3, 1e-4)
        for nu in nus:
            f0 = lambda t, x: inviscid_eval(SOL, t, x)
            f1 = lambda t, x, nu=nu: f0(t, x) + nu * np.asarray(outer_corrector_psi1(SOL, t, x))[None]
            r0.append(abs(pde_residual(f0, BURGERS, nu, -0.5, 0.3, 1e-4)[0]))
            r1.append(abs(pde_residual(f1, BURGERS, nu, -0.5, 0.3, 1e-4)[0]))
        assert fit_rate(list(zip(nus, r0))).slope == pytest.approx(1.0, abs=0.05)
        assert fit_rate(list(zip(nus, r1))).slope == pytest.approx(2.0, abs=0.1)

    def test_two_component_diffusion_branch(self):
        s = make_burgers_transport(1.0)
        field = lambda t, x: np.stack([np.asarray(x, float) / np.asarray(t, float),
                                       np.sin(np.asarray(x, float) + np.asarray(t, float))])
        r = pde_residual(field, s, 0.1, -0.5, 0.3, 1e-4)
        assert abs(r[0]) <= 1e-6  # x/t solves the first row exactly
        assert abs(r[1]) <= 1e-6  # second row: w_t - w_x = nu v_xx = 0

    def test_time_stencil_guard(self):
        with pytest.raises(ValueError):
            pde_residual(lambda t, x: inviscid_eval(SOL, t, x), BURGERS, 1e-3, -1e-5, 0.1, 1e-4)
