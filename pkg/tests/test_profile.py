import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from viscid.profile import (
    CubicParams,
    ProfileDomainError,
    SingularPointError,
    cubic_root,
    field_d,
    field_e,
    field_m,
    field_u,
    homogeneity_defect,
    profile_eval,
    profile_gradient,
    profile_uxx,
)


def bisect_root(t, x, a=-1.0, b=-1.0, lo=-10.0, hi=10.0, tol=1e-12):
    """Independent oracle: plain bisection on x - a|t|u - b u^3."""
    f = lambda u: x - a * abs(t) * u - b * u**3
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


times = st.floats(min_value=-5.0, max_value=0.0, allow_nan=False)
spaces = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


class TestCubicRoot:
    @pytest.mark.parametrize("t, x, expected", [(-1.0, 0.0, 0.0), (-1.0, -2.0, 1.0), (0.0, -8.0, 2.0)])
    def test_examples(self, t, x, expected):
        assert cubic_root(t, x) == pytest.approx(expected, abs=1e-14)

    def test_bisection_oracle(self):
        expected = bisect_root(-0.5, 0.3)
        assert expected == pytest.approx(-0.435175226473867, abs=1e-11)
        assert cubic_root(-0.5, 0.3) == pytest.approx(expected, abs=1e-11)

    def test_positive_time_rejected(self):
        with pytest.raises(ProfileDomainError):
            cubic_root(0.1, 0.0)

    @given(times, spaces)
    def test_residual(self, t, x):
        u = cubic_root(t, x)
        assert abs(x + abs(t) * u + u**3) <= 1e-12 * max(1.0, abs(x))

    @given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), times, spaces)
    def test_residual_general_params(self, a, b, t, x):
        for sign in (1.0, -1.0):
            c = CubicParams(sign * a, sign * b, 1.0)
            u = cubic_root(t, x, c)
            assert abs(x - c.a * abs(t) * u - c.b * u**3) <= 1e-12 * max(1.0, abs(x))

    @given(st.floats(-2.0, -1e-3), st.lists(spaces, min_size=2, max_size=40, unique=True))
    def test_strictly_decreasing(self, t, xs):
        xs = np.sort(np.array(xs))
        # below ~1e-300 the roots themselves round together in the subnormal range
        assume(np.all(np.diff(xs) >= 1e-300))
        u = cubic_root(np.full_like(xs, t), xs)
        assert np.all(np.diff(u) < 0)

    def test_vectorized_matches_scalar(self):
        t = np.linspace(-1, 0, 7)
        x = np.linspace(-3, 3, 7)
        vec = cubic_root(t, x)
        assert np.array_equal(vec, [cubic_root(a, b) for a, b in zip(t, x)])

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            CubicParams(1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            CubicParams(-1.0, -1.0, 0.0)


class TestProfileEval:
    def test_centreline(self):
        ev = profile_eval(-1.0, 0.0)
        assert (ev.u, ev.m, ev.d, ev.e) == (0.0, 1.0, 1.0, 1.0)

    def test_derived_point(self):
        ev = profile_eval(-0.5, -1.5)
        assert ev.u == pytest.approx(1.0, abs=1e-14)
        assert ev.m == pytest.approx(1 / 3.5, rel=1e-14)
        assert ev.d == pytest.approx(math.sqrt(3.5), rel=1e-14)
        assert ev.e == pytest.approx(math.hypot(0.5, 1.5), rel=1e-15)

    def test_origin_sentinel(self):
        ev = profile_eval(0.0, 0.0)
        assert ev.u == 0.0 and math.isinf(ev.m) and ev.d == 0.0 and ev.e == 0.0

    @given(times, spaces)
    def test_d2m_identity(self, t, x):
        ev = profile_eval(t, x)
        # m = 1/d^2 is representable only for d^2 above 1/max_float
        assume(ev.d**2 >= 1e-300)
        assert ev.d**2 * ev.m == pytest.approx(1.0, rel=1e-12)

    def test_distance_relation(self):
        T, X = np.meshgrid(np.linspace(-1, 0, 101), np.linspace(-1, 1, 201), indexing="ij")
        keep = (T != 0) | (X != 0)
        d, e = field_d(T[keep], X[keep]), field_e(T[keep], X[keep])
        assert np.min(d * d / e) >= 0.3
        assert np.max(d / np.cbrt(e)) <= 3.0


class TestGradient:
    def test_examples(self):
        assert profile_gradient(-1.0, 0.0) == pytest.approx((-1.0, 0.0))
        ux, ut = profile_gradient(-0.5, -1.5)
        assert ux == pytest.approx(-1 / 3.5, rel=1e-13)
        assert ut == pytest.approx(1 / 3.5, rel=1e-13)

    def test_origin(self):
        with pytest.raises(SingularPointError):
            profile_gradient(0.0, 0.0)

    @settings(max_examples=60)
    @given(st.floats(-1.0, -0.05), st.floats(-2.0, 2.0))
    def test_finite_differences(self, t, x):
        h = 1e-5
        ux, ut = profile_gradient(t, x)
        fx = (cubic_root(t, x + h) - cubic_root(t, x - h)) / (2 * h)
        ft = (cubic_root(t + h, x) - cubic_root(t - h, x)) / (2 * h)
        assert fx == pytest.approx(ux, rel=1e-6)
        assert abs(ft - ut) <= 1e-6 * max(abs(ut), abs(ux))

    def test_uxx_closed_form(self):
        t, x, h = -0.5, 0.3, 1e-4
        fd = (cubic_root(t, x + h) - 2 * cubic_root(t, x) + cubic_root(t, x - h)) / h**2
        assert profile_uxx(t, x) == pytest.approx(fd, rel=1e-6)


class TestHomogeneity:
    pts = [(-0.3, 0.2), (-1.0, -0.7), (-0.05, 0.9), (-2.0, 0.0)]

    @pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
    @pytest.mark.parametrize("f, r", [(field_u, 1), (field_d, 1), (field_m, -2)])
    def test_homogeneous_fields(self, f, r, lam):
        assert homogeneity_defect(r, lam, self.pts, lambda t, x: f(t, x)) <= 1e-12

    def test_euclidean_not_homogeneous(self):
        assert homogeneity_defect(1, 2.0, [(-1.0, 0.0)], field_e) == pytest.approx(1.0)

    def test_bad_lambda(self):
        with pytest.raises(ValueError):
            homogeneity_defect(1, 0.0, self.pts, field_u)
