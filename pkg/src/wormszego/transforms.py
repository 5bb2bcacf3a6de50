"""Log-radial grids and the transform stack on the half-line times the circle.

Every operator in this package is built from three ingredients defined here:

* the substitution isometry ``C_p`` between L^p(0, inf) and L^p(R),
  (C_p f)(x) = e^{x/p} f(e^x),
* the Fourier transform on R x T with the convention
  F(xi, j) = int f(x, theta) e^{-i(x xi + j theta)} dx dtheta,
  inverted with density 1/(2 pi)^2, theta of period 2 pi and integer modes j,
* the Hilbert transform in the first variable, multiplier -i sgn(xi)
  with sgn(0) = 0.

Fields on a boundary sheet are stored as samples over a uniform grid in
x = log(rho) so that C_p is a diagonal (pointwise) operation and the Mellin
transform in rho becomes an FFT in x.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LogGrid",
    "AngularGrid",
    "Grid2D",
    "BoundaryField",
    "Spectrum",
    "cayley",
    "cayley_inverse",
    "mf_forward",
    "mf_forward_line",
    "mf_inverse",
    "mf_inverse_line",
    "hilbert1",
]

EDGE_DECAY_FRACTION = 1e-12


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in x = log(rho); x_k = x_min + k dx for k = 0..n-1."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("require x_min < x_max")
        if self.n < 8:
            raise ValueError("require n >= 8")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def xi(self) -> np.ndarray:
        """FFT-ordered frequencies 2 pi k' / (n dx)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / (self.n * self.dx)


@dataclass(frozen=True)
class AngularGrid:
    """Uniform grid on the circle, theta_m = 2 pi m / M, integer modes j."""

    m_count: int

    def __post_init__(self):
        if self.m_count < 2 or self.m_count % 2:
            raise ValueError("require even m_count >= 2")

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.m_count) / self.m_count

    @property
    def modes(self) -> np.ndarray:
        """FFT-ordered integer modes j in {-M/2, ..., M/2 - 1}."""
        return np.fft.fftfreq(self.m_count, d=1.0 / self.m_count).astype(int)


@dataclass(frozen=True)
class Grid2D:
    log: LogGrid
    ang: AngularGrid

    @classmethod
    def make(cls, x_min: float, x_max: float, n: int, m_count: int) -> "Grid2D":
        return cls(LogGrid(x_min, x_max, n), AngularGrid(m_count))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.log.n, self.ang.m_count)


def default_grid() -> Grid2D:
    """Grid used by the generic operator tests: x in [-30, 30], n = 2^16, M = 16."""
    return Grid2D.make(-30.0, 30.0, 2 ** 16, 16)


@dataclass
class BoundaryField:
    """Complex samples on the four boundary sheets over a shared grid.

    ``data[k-1, i, m]`` is the value on sheet k at (rho, theta) =
    (exp(x_i), theta_m).  The zero-measure circles at rho = 0 are not
    represented.
    """

    grid: Grid2D
    data: np.ndarray

    def __post_init__(self):
        expected = (4,) + self.grid.shape
        if self.data.shape != expected:
            raise ValueError(f"data shape {self.data.shape} != {expected}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("field contains non-finite entries")

    @classmethod
    def zeros(cls, grid: Grid2D) -> "BoundaryField":
        return cls(grid, np.zeros((4,) + grid.shape, dtype=complex))

    def sheet(self, k: int) -> np.ndarray:
        """View of the samples on sheet k (1-based)."""
        if k not in (1, 2, 3, 4):
            raise ValueError("sheet index must be 1..4")
        return self.data[k - 1]

    def copy(self) -> "BoundaryField":
        return BoundaryField(self.grid, self.data.copy())

    def check_same_grid(self, other: "BoundaryField") -> None:
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")


@dataclass
class Spectrum:
    """Fourier coefficients over (FFT-ordered xi) x (FFT-ordered modes j)."""

    grid: Grid2D
    data: np.ndarray
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.data.shape != self.grid.shape:
            raise ValueError(f"data shape {self.data.shape} != {self.grid.shape}")


def _as_linefirst(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.ndim not in (1, 2):
        raise ValueError("expected a (n,) line field or (n, M) field")
    return values


def _xcolumn(factor: np.ndarray, values: np.ndarray) -> np.ndarray:
    return factor * values if values.ndim == 1 else factor[:, None] * values


def cayley(p: float, values: np.ndarray, grid: LogGrid | Grid2D) -> np.ndarray:
    """(C_p f)(x) = e^{x/p} f(e^x) on the grid: multiply by e^{x/p}.

    ``values`` holds samples f(e^{x_k}[, theta_m]); the result holds samples
    of the transplanted function on the line.  An isometry of L^p by the
    change of variables rho = e^x, and an exact identity between the two
    Riemann sums on this grid.
    """
    if not 1.0 < p < np.inf:
        raise ValueError("require p in (1, inf)")
    log = grid.log if isinstance(grid, Grid2D) else grid
    values = _as_linefirst(values)
    return _xcolumn(np.exp(log.x / p), values)


def cayley_inverse(p: float, values: np.ndarray, grid: LogGrid | Grid2D) -> np.ndarray:
    """Inverse of :func:`cayley`: f(rho) = rho^{-1/p} g(log rho)."""
    if not 1.0 < p < np.inf:
        raise ValueError("require p in (1, inf)")
    log = grid.log if isinstance(grid, Grid2D) else grid
    values = _as_linefirst(values)
    return _xcolumn(np.exp(-log.x / p), values)


def mf_forward_line(values: np.ndarray, log: LogGrid) -> np.ndarray:
    """Trapezoid-sampled line transform V(xi_q) = dx sum_k v_k e^{-i x_k xi_q}."""
    values = np.asarray(values)
    phase = np.exp(-1j * log.x_min * log.xi)
    if values.ndim == 1:
        return log.dx * phase * np.fft.fft(values)
    return log.dx * phase[:, None] * np.fft.fft(values, axis=0)


def mf_inverse_line(spectrum_values: np.ndarray, log: LogGrid) -> np.ndarray:
    """Exact discrete inverse of :func:`mf_forward_line`."""
    spectrum_values = np.asarray(spectrum_values)
    phase = np.exp(1j * log.x_min * log.xi)
    if spectrum_values.ndim == 1:
        return np.fft.ifft(phase * spectrum_values) / log.dx
    return np.fft.ifft(phase[:, None] * spectrum_values, axis=0) / log.dx


def mf_forward(values: np.ndarray, grid: Grid2D) -> Spectrum:
    """Forward transform on R x T.

    F(xi, j) ~ int f(x, theta) e^{-i(x xi + j theta)} dx dtheta, realized as
    dx * (2 pi / M) * FFT over both axes with the x_min phase pulled out.
    The angular sum is an exact DFT, so j is literally the integer frequency.
    A field that has not decayed at the x-edges is flagged (the line
    transform silently periodizes it).
    """
    values = _as_linefirst(values)
    if values.ndim != 2:
        raise ValueError("mf_forward expects an (n, M) field; use mf_forward_line")
    log, ang = grid.log, grid.ang
    warnings = []
    peak = np.max(np.abs(values))
    if peak > 0:
        edge = max(np.max(np.abs(values[0])), np.max(np.abs(values[-1])))
        if edge > EDGE_DECAY_FRACTION * peak:
            warnings.append(
                f"edge-decay: boundary magnitude {edge:.3e} exceeds "
                f"{EDGE_DECAY_FRACTION:.0e} of peak {peak:.3e}"
            )
    data = np.fft.fft(values, axis=1) * (2.0 * np.pi / ang.m_count)
    data = mf_forward_line(data, log)
    return Spectrum(grid, data, warnings)


def mf_inverse(spectrum: Spectrum) -> np.ndarray:
    """Exact discrete inverse of :func:`mf_forward`.

    In the continuum limit this is (1/(2 pi)^2) sum_j int F e^{i(x xi + j
    theta)} d xi.
    """
    log, ang = spectrum.grid.log, spectrum.grid.ang
    data = mf_inverse_line(spectrum.data, log)
    return np.fft.ifft(data, axis=1) * (ang.m_count / (2.0 * np.pi))


def hilbert1(values: np.ndarray, grid: LogGrid | Grid2D) -> np.ndarray:
    """Hilbert transform in the first variable: multiplier -i sgn(xi), sgn(0) = 0."""
    log = grid.log if isinstance(grid, Grid2D) else grid
    values = _as_linefirst(values)
    sym = -1j * np.sign(log.xi)
    V = np.fft.fft(values, axis=0)
    V = _xcolumn(sym, V)
    return np.fft.ifft(V, axis=0)
