import numpy as np
import pytest

from wormszego.transforms import (
    AngularGrid,
    BoundaryField,
    Grid2D,
    LogGrid,
    Spectrum,
    cayley,
    cayley_inverse,
    hilbert1,
    mf_forward,
    mf_forward_line,
    mf_inverse,
    mf_inverse_line,
)


class TestGrids:
    def test_validation(self):
        with pytest.raises(ValueError):
            LogGrid(1.0, 0.0, 64)
        with pytest.raises(ValueError):
            LogGrid(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            AngularGrid(3)

    def test_nodes(self):
        g = LogGrid(-2.0, 2.0, 16)
        assert g.dx == pytest.approx(0.25)
        assert g.x[0] == -2.0
        assert len(g.x) == 16
        a = AngularGrid(8)
        assert set(a.modes) == {-4, -3, -2, -1, 0, 1, 2, 3}


class TestCayley:
    def test_symbolic_example(self, small_grid):
        x = small_grid.log.x
        rho = np.exp(x)
        phi = rho ** (-0.5) * np.exp(-np.log(rho) ** 2)
        g = cayley(2.0, phi, small_grid.log)
        assert np.allclose(g, np.exp(-(x ** 2)), rtol=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_isometry(self, small_grid, p):
        rng = np.random.default_rng(0)
        x = small_grid.log.x
        # smooth decaying profile as samples phi(e^x)
        phi = np.exp(-((x - 0.5) ** 2)) * (1 + 0.2 * np.cos(3 * x)) * np.exp(-x / p)
        g = cayley(p, phi, small_grid.log)
        lhs = np.sum(np.abs(g) ** p) * small_grid.log.dx
        rhs = np.sum(np.abs(phi) ** p * np.exp(x)) * small_grid.log.dx
        assert abs(lhs - rhs) / rhs < 1e-10

    def test_zero(self, small_grid):
        assert np.all(cayley(2.0, np.zeros(small_grid.log.n), small_grid.log) == 0)

    def test_roundtrip_and_linearity(self, small_grid):
        rng = np.random.default_rng(1)
        v = rng.standard_normal(small_grid.log.n) + 1j * rng.standard_normal(small_grid.log.n)
        back = cayley_inverse(2.0, cayley(2.0, v, small_grid.log), small_grid.log)
        assert np.max(np.abs(back - v)) < 1e-12 * np.max(np.abs(v))
        a = 2.7 - 0.3j
        assert np.allclose(
            cayley_inverse(2.0, a * v, small_grid.log),
            a * cayley_inverse(2.0, v, small_grid.log),
            rtol=1e-14,
        )

    def test_inverse_symbolic(self, small_grid):
        x = small_grid.log.x
        g = np.exp(-(x ** 2))
        phi = cayley_inverse(2.0, g, small_grid.log)
        rho = np.exp(x)
        assert np.allclose(phi, rho ** (-0.5) * np.exp(-np.log(rho) ** 2), rtol=1e-12)

    def test_rejects_bad_p(self, small_grid):
        with pytest.raises(ValueError):
            cayley(1.0, np.zeros(small_grid.log.n), small_grid.log)


class TestForwardTransform:
    def test_gaussian_pair(self):
        grid = Grid2D.make(-30.0, 30.0, 2 ** 14, 8)
        x = grid.log.x
        f = np.exp(-(x ** 2))[:, None] * np.ones(8)[None, :]
        spec = mf_forward(f, grid)
        xi = grid.log.xi
        sel = np.abs(xi) <= 10.0
        expected = 2 * np.pi * np.sqrt(np.pi) * np.exp(-(xi[sel] ** 2) / 4)
        got = spec.data[sel, 0]
        peak = expected.max()
        # pure relative accuracy wherever the target is above the double
        # precision FFT floor; relative-to-peak on the deep tail
        resolvable = expected >= 1e-6 * peak
        assert np.max(np.abs(got - expected)[resolvable] / expected[resolvable]) < 1e-8
        assert np.max(np.abs(got - expected)) / peak < 1e-12
        # all other modes vanish
        assert np.max(np.abs(spec.data[:, 1:])) < 1e-12 * np.max(np.abs(spec.data))

    def test_single_mode_support(self, small_grid):
        x = small_grid.log.x
        theta = small_grid.ang.theta
        f = np.exp(-(x ** 2))[:, None] * np.exp(3j * theta)[None, :]
        spec = mf_forward(f, small_grid)
        modes = small_grid.ang.modes
        on = spec.data[:, modes == 3]
        off = spec.data[:, modes != 3]
        assert np.max(np.abs(off)) < 1e-12 * np.max(np.abs(on))

    def test_zero(self, small_grid):
        spec = mf_forward(np.zeros(small_grid.shape, dtype=complex), small_grid)
        assert np.all(spec.data == 0)

    def test_real_even_gives_real_even(self, small_grid):
        x = small_grid.log.x
        f = np.exp(-(x ** 2))[:, None] * np.ones(small_grid.ang.m_count)[None, :]
        spec = mf_forward(f, small_grid)
        col = spec.data[:, 0]
        assert np.max(np.abs(col.imag)) < 1e-12 * np.max(np.abs(col))
        # even: F(xi) = F(-xi) on the fft lattice
        flipped = np.roll(col[::-1], 1)
        assert np.max(np.abs(col - flipped)) < 1e-10 * np.max(np.abs(col))

    def test_refinement_stability(self):
        vals = {}
        for n in (2 ** 12, 2 ** 13):
            grid = Grid2D.make(-30.0, 30.0, n, 2)
            x = grid.log.x
            f = np.exp(-((x - 0.3) ** 2))[:, None] * np.ones(2)[None, :]
            spec = mf_forward(f, grid)
            xi = grid.log.xi
            sel = (np.abs(xi) <= 5.0) & (np.abs(xi % 0.5) < 1e-9)
            vals[n] = spec.data[sel, 0][np.argsort(xi[sel])]
        rel = np.max(np.abs(vals[2 ** 12] - vals[2 ** 13]) / np.abs(vals[2 ** 13]))
        assert rel < 1e-9

    def test_edge_decay_warning(self, small_grid):
        x = small_grid.log.x
        f = np.cos(x)[:, None] * np.ones(small_grid.ang.m_count)[None, :]
        spec = mf_forward(f, small_grid)
        assert spec.warnings and "edge-decay" in spec.warnings[0]


class TestInverseTransform:
    def test_roundtrip(self, small_grid):
        rng = np.random.default_rng(5)
        f = rng.standard_normal(small_grid.shape) + 1j * rng.standard_normal(small_grid.shape)
        back = mf_inverse(mf_forward(f, small_grid))
        assert np.max(np.abs(back - f)) < 1e-12 * np.max(np.abs(f))

    def test_point_mass(self, small_grid):
        spec_data = np.zeros(small_grid.shape, dtype=complex)
        q0, j0_idx = 17, 3
        spec_data[q0, j0_idx] = 1.0
        f = mf_inverse(Spectrum(small_grid, spec_data))
        xi0 = small_grid.log.xi[q0]
        j0 = small_grid.ang.modes[j0_idx]
        x = small_grid.log.x
        theta = small_grid.ang.theta
        expected = (
            small_grid.log.dxi
            / (2 * np.pi) ** 2
            * np.exp(1j * (np.outer(x, np.ones_like(theta)) * xi0 + j0 * theta[None, :]))
        )
        assert np.max(np.abs(f - expected)) < 1e-14

    def test_linearity(self, small_grid):
        rng = np.random.default_rng(6)
        a = rng.standard_normal(small_grid.shape) * (1 + 0j)
        b = rng.standard_normal(small_grid.shape) * (1 + 0j)
        lhs = mf_inverse(Spectrum(small_grid, a + 2j * b))
        rhs = mf_inverse(Spectrum(small_grid, a)) + 2j * mf_inverse(Spectrum(small_grid, b))
        assert np.max(np.abs(lhs - rhs)) < 1e-13 * max(np.max(np.abs(lhs)), 1.0)

    def test_plancherel(self, small_grid):
        x = small_grid.log.x
        theta = small_grid.ang.theta
        f = (np.exp(-((x - 1) ** 2)) + 0.5 * np.exp(-((x + 2) ** 2)))[:, None] * np.exp(
            1j * theta
        )[None, :]
        spec = mf_forward(f, small_grid)
        dtheta = 2 * np.pi / small_grid.ang.m_count
        lhs = np.sum(np.abs(f) ** 2) * small_grid.log.dx * dtheta
        rhs = np.sum(np.abs(spec.data) ** 2) * small_grid.log.dxi / (2 * np.pi) ** 2
        assert abs(lhs - rhs) / lhs < 1e-10


class TestHilbert:
    def test_cosine_to_sine(self):
        grid = LogGrid(-200.0, 200.0, 2 ** 16)
        x = grid.x
        env = np.exp(-((x / 40.0) ** 2))
        out = hilbert1(np.cos(x) * env, grid)
        assert np.max(np.abs(out - np.sin(x) * env)) < 1e-3

    def test_involution_on_mean_zero(self, small_grid):
        x = small_grid.log.x
        f = np.sin(2 * x) * np.exp(-(x ** 2))
        f = f - np.mean(f)
        # remove the dc component exactly
        F = np.fft.fft(f)
        F[0] = 0
        f = np.fft.ifft(F)
        twice = hilbert1(hilbert1(f, small_grid.log), small_grid.log)
        assert np.max(np.abs(twice + f)) < 1e-8 * np.max(np.abs(f))

    def test_zero(self, small_grid):
        assert np.all(hilbert1(np.zeros(small_grid.log.n), small_grid.log) == 0)


class TestBoundaryField:
    def test_shape_validation(self, small_grid):
        with pytest.raises(ValueError):
            BoundaryField(small_grid, np.zeros((3,) + small_grid.shape, dtype=complex))

    def test_rejects_nonfinite(self, small_grid):
        data = np.zeros((4,) + small_grid.shape, dtype=complex)
        data[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            BoundaryField(small_grid, data)

    def test_sheet_indexing(self, small_grid):
        f = BoundaryField.zeros(small_grid)
        f.sheet(2)[0, 0] = 1.0
        assert f.data[1, 0, 0] == 1.0
        with pytest.raises(ValueError):
            f.sheet(5)
