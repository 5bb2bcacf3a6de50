import numpy as np
import pytest

from wormszego.multipliers import (
    block_symbol,
    block_symbol_table,
    block_symbol_z,
    d_factor,
    model_symbol_Ma,
    model_symbol_ma,
    mu_eta,
    strip_shift_check,
    strip_spec,
    tanh_symbol,
)
from wormszego.transforms import Grid2D

TWO_B_PI = lambda p: 2.0 * p.beta - np.pi

# nine-case exponent table, keyed by (k, l)
def expected_table(params):
    t = TWO_B_PI(params)
    table = {}
    table[(1, 1)] = (-np.pi, -t)
    table[(2, 2)] = (np.pi, -t)
    table[(3, 3)] = (np.pi, t)
    table[(4, 4)] = (-np.pi, t)
    for kl in ((2, 1), (1, 2)):
        table[kl] = (0.0, -t)
    for kl in ((4, 3), (3, 4)):
        table[kl] = (0.0, t)
    for kl in ((4, 1), (1, 4)):
        table[kl] = (-np.pi, 0.0)
    for kl in ((3, 2), (2, 3)):
        table[kl] = (np.pi, 0.0)
    for kl in ((1, 3), (3, 1), (2, 4), (4, 2)):
        table[kl] = (0.0, 0.0)
    return table


class TestMuEta:
    def test_full_table(self, params_2pi):
        for (k, l), (mu, eta) in expected_table(params_2pi).items():
            got = mu_eta(k, l, params_2pi)
            assert got.mu == pytest.approx(mu), (k, l)
            assert got.eta == pytest.approx(eta), (k, l)

    def test_examples(self, params_2pi):
        t = TWO_B_PI(params_2pi)
        got = mu_eta(1, 1, params_2pi)
        assert (got.mu, got.eta) == pytest.approx((-np.pi, -t))
        got = mu_eta(1, 3, params_2pi)
        assert (got.mu, got.eta) == (0.0, 0.0)
        got = mu_eta(3, 2, params_2pi)
        assert (got.mu, got.eta) == pytest.approx((np.pi, 0.0))

    def test_rejects_bad_index(self, params_2pi):
        with pytest.raises(ValueError):
            mu_eta(0, 1, params_2pi)


class TestDFactor:
    def test_center_value(self, params_2pi):
        val = d_factor(0.5, 0, params_2pi)
        assert val == pytest.approx(21.29100859807983, rel=1e-12)

    def test_critical_line_identity(self, params_2pi):
        rng = np.random.default_rng(2)
        t = TWO_B_PI(params_2pi)
        for _ in range(100):
            xi = rng.uniform(-3.0, 3.0)
            j = int(rng.integers(-6, 7))
            lhs = d_factor(0.5 - 1j * xi, j, params_2pi)
            rhs = 4 * np.cosh(np.pi * xi) * np.cosh(t * (xi - j / 2 - 0.25))
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_nonvanishing_on_line(self, params_2pi):
        xi = np.linspace(-50, 50, 20001)
        for j in (-4, 0, 5):
            vals = np.abs(d_factor(0.5 - 1j * xi, j, params_2pi))
            assert np.min(vals) > 1.0


class TestBlockSymbol:
    def test_11_at_origin(self, params_2pi):
        val = block_symbol(1, 1, params_2pi, 0.0, 0.0)
        assert val == pytest.approx(0.04696818355942926, rel=1e-12)

    def test_13_same_value_at_origin(self, params_2pi):
        assert block_symbol(1, 3, params_2pi, 0.0, 0.0) == pytest.approx(
            block_symbol(1, 1, params_2pi, 0.0, 0.0)
        )

    def test_factorization(self, params_2pi):
        # full block equals the one-variable factor times the shifted factor

        def tilted_sech(tilt, scale, arg, shift):
            # e^{tilt * arg} / (2 cosh(scale * (arg - shift))), log-stable
            a = np.abs(scale * (arg - shift))
            return np.exp(tilt * arg - (a + np.log1p(np.exp(-2 * a))))

        xi = np.linspace(-40, 40, 1601)
        for k in range(1, 5):
            for l in range(1, 5):
                me = mu_eta(k, l, params_2pi)
                for j in (-3, 0, 2):
                    full = block_symbol(k, l, params_2pi, xi, j)
                    mu_part = tilted_sech(me.mu, np.pi, xi, 0.0)
                    eta_part = tilted_sech(me.eta, TWO_B_PI(params_2pi), xi - j / 2, 0.25)
                    prod = mu_part * eta_part
                    ok = np.isclose(full, prod, rtol=1e-10, atol=0)
                    assert np.all(ok | (full < 1e-250))

    @pytest.mark.parametrize("beta_mult", [1.5, 2.0])
    def test_sup_stability_all_blocks(self, beta_mult):
        from wormszego.geometry import make_params

        params = make_params(beta_mult * np.pi)
        coarse = Grid2D.make(-30.0, 30.0, 2 ** 10, 16)
        fine = Grid2D.make(-30.0, 30.0, 2 ** 11, 16)
        for k in range(1, 5):
            for l in range(1, 5):
                sc = block_symbol_table(k, l, params, coarse).sup
                sf = block_symbol_table(k, l, params, fine).sup
                assert sc > 0 and np.isfinite(sc)
                assert abs(sc - sf) / sf < 0.01

    def test_bounded_over_wide_mode_range(self, params_2pi):
        xi = np.linspace(-3400, 3400, 4096)
        for j in (-64, -7, 0, 7, 64):
            vals = block_symbol(2, 2, params_2pi, xi, j)
            assert np.all(np.isfinite(vals))
            assert vals.max() < 20.0

    def test_projection_normalization_relation(self, params_2pi):
        # projection form = blockwise form * e^{-eta/4}, per block
        xi = np.linspace(-2, 2, 101)
        for k in range(1, 5):
            for l in range(1, 5):
                me = mu_eta(k, l, params_2pi)
                a = block_symbol(k, l, params_2pi, xi, 1, "projection")
                b = block_symbol(k, l, params_2pi, xi, 1, "blockwise")
                assert np.allclose(a, b * np.exp(-me.eta / 4.0), rtol=1e-12)

    def test_projection_composition_identity(self, params_2pi):
        # sum_l m(k,l) m(l,k') = m(k,k') pointwise for the projection form
        rng = np.random.default_rng(4)
        xi = rng.uniform(-3, 3, size=40)
        for j in (-5, 0, 3):
            m = np.array(
                [
                    [block_symbol(k, l, params_2pi, xi, j, "projection") for l in range(1, 5)]
                    for k in range(1, 5)
                ]
            )
            comp = np.einsum("klx,lmx->kmx", m, m)
            assert np.max(np.abs(comp - m) / np.abs(m)) < 1e-12

    def test_blockwise_composition_fails(self, params_2pi):
        # the same identity is violated by the blockwise constants
        xi = np.array([1.0])
        m = np.array(
            [
                [block_symbol(k, l, params_2pi, xi, 0, "blockwise") for l in range(1, 5)]
                for k in range(1, 5)
            ]
        )
        comp = np.einsum("klx,lmx->kmx", m, m)
        assert np.max(np.abs(comp - m) / np.abs(m)) > 0.1


class TestComplexSymbol:
    def test_matches_line_restriction(self, params_2pi):
        xi = np.linspace(-5, 5, 41)
        for (k, l) in ((1, 1), (2, 3), (1, 3)):
            line = block_symbol(k, l, params_2pi, xi, 2)
            cplx = block_symbol_z(k, l, params_2pi, 0.5 - 1j * xi, 2)
            assert np.max(np.abs(cplx - line) / line) < 1e-12

    def test_strip_bounds(self, params_2pi):
        spec = strip_spec(params_2pi)
        assert spec.lower == pytest.approx((1 - params_2pi.nu) / 2)
        assert spec.upper == pytest.approx((1 + params_2pi.nu) / 2)
        assert spec.lower < 0.5 < spec.upper


class TestModelSymbols:
    def test_ma_half_at_zero(self):
        for a in (np.pi, 2 * np.pi, -np.pi):
            assert model_symbol_ma(a, 0.0) == pytest.approx(0.5)

    def test_ma_value(self):
        assert model_symbol_ma(np.pi, 1.0) == pytest.approx(0.9981360381103751, rel=1e-12)

    def test_ma_reflection(self):
        xi = np.linspace(-10, 10, 101)
        s = model_symbol_ma(np.pi, xi) + model_symbol_ma(np.pi, -xi)
        assert np.allclose(s, 1.0, atol=1e-14)

    def test_ma_range_and_monotone(self):
        # strictly inside (0, 1) wherever tanh has not saturated in floats
        xi = np.linspace(-3.5, 3.5, 2001)
        vals = model_symbol_ma(1.5 * np.pi, xi)
        assert np.all((vals > 0) & (vals < 1))
        assert np.all(np.diff(vals) >= 0)
        wide = model_symbol_ma(1.5 * np.pi, np.linspace(-50, 50, 1001))
        assert np.all((wide >= 0) & (wide <= 1))

    def test_ma_rejects_small_a(self):
        with pytest.raises(ValueError):
            model_symbol_ma(1.0, 0.0)

    def test_Ma_quarter_point(self):
        for a in (np.pi, 2.5 * np.pi):
            assert model_symbol_Ma(a, 0.25, 0) == pytest.approx(np.exp(a / 4) * 0.5)

    def test_Ma_value(self):
        assert model_symbol_Ma(np.pi, 0.0, 0) == pytest.approx(0.3774698543570656, rel=1e-12)

    def test_Ma_shift_covariance(self):
        xi = np.linspace(-4, 4, 17)
        a = np.pi
        assert np.allclose(
            model_symbol_Ma(a, xi, 1), model_symbol_Ma(a, xi - 0.5, 0), rtol=1e-14
        )


class TestTanhSymbol:
    def test_value(self):
        val = tanh_symbol(np.pi, 0.0, 1.0)
        assert val == pytest.approx(6.259762071263516j, rel=1e-12)

    def test_zero_at_origin(self):
        assert tanh_symbol(np.pi, 0.0, 0.0) == 0

    def test_relation_to_ma(self):
        rng = np.random.default_rng(9)
        a = 1.7 * np.pi
        xi = rng.uniform(-5, 5, size=100)
        lhs = tanh_symbol(a, 0.0, xi)
        rhs = 4 * abs(a) * 1j * (model_symbol_ma(a, xi) - 0.5)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(np.abs(lhs))

    def test_bounded_and_stable(self):
        a = np.pi
        for kappa in (0.0, 0.3 / (2 * a) * np.pi):
            sup_c = np.max(np.abs(tanh_symbol(a, kappa, np.linspace(-100, 100, 10001))))
            sup_f = np.max(np.abs(tanh_symbol(a, kappa, np.linspace(-100, 100, 20001))))
            assert np.isfinite(sup_c)
            assert abs(sup_c - sup_f) / sup_f < 1e-6

    def test_kappa_domain(self):
        with pytest.raises(ValueError):
            tanh_symbol(np.pi, 0.5, 0.0)
        with pytest.raises(ValueError):
            tanh_symbol(np.pi, -0.1, 0.0)


class TestStripShift:
    @pytest.fixture(scope="class")
    def strip_setup(self, params_2pi):
        span = 168.0
        n = 2 ** 13
        grid = Grid2D.make(-span / 2, span / 2, n, 2)
        phi = np.exp(-grid.log.x ** 2)
        return grid, phi

    def test_center_is_exact(self, strip_setup, params_2pi):
        grid, phi = strip_setup
        assert strip_shift_check(1, 1, phi, grid, params_2pi, 0.5) == 0.0

    @pytest.mark.parametrize("sign", [1.0, -1.0])
    def test_quarter_shifts(self, strip_setup, params_2pi, sign):
        grid, phi = strip_setup
        c = 0.5 + sign * params_2pi.nu / 4
        assert strip_shift_check(1, 1, phi, grid, params_2pi, c) < 1e-6

    def test_outside_strip_rejected(self, strip_setup, params_2pi):
        grid, phi = strip_setup
        with pytest.raises(ValueError):
            strip_shift_check(1, 1, phi, grid, params_2pi, 0.9)
