"""Closed-form multiplier symbols and their stability/consistency probes.

The sixteen sheet-to-sheet blocks of the boundary projection are Fourier
multipliers on the line-times-circle after the C_2 substitution.  On the
critical line z = 1/2 - i xi the block symbol factorizes as

    m_{k,l}(xi, j) = e^{mu xi} / (2 cosh(pi xi))
                   * e^{eta (xi - j/2 - shift)} / (2 cosh((2b - pi)(xi - j/2 - 1/4)))

with (mu, eta) from a nine-case table, b = beta.  Two normalizations of the
eta-exponential are provided:

* ``blockwise`` (shift = 0): each block in its standard single-block form;
* ``projection`` (shift = 1/4): the exponential carries the same quarter
  shift as the cosh.  The two differ per block by the constant e^{-eta/4}.
  Only the projection normalization makes the assembled 16-block operator
  an exact orthogonal projection (sum_l m_{k,l} m_{l,k'} = m_{k,k'} holds
  pointwise); the blockwise form violates that identity by the factor
  cosh((2b-pi)(xi - j/2)) / cosh((2b-pi)(xi - j/2 - 1/4)).

Block-by-block statements (boundedness, decay exponents, thresholds) are
insensitive to the choice; the operator assembly in :mod:`wormszego.szego`
uses ``projection``.

Everything is evaluated through log-magnitudes: e^{mu xi} and cosh(pi xi)
overflow doubles near |xi| ~ 230/pi while their ratio stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import WormParams
from .transforms import Grid2D, cayley, cayley_inverse, mf_forward_line, mf_inverse_line

__all__ = [
    "MuEta",
    "StripSpec",
    "MultiplierTable",
    "mu_eta",
    "strip_spec",
    "d_factor",
    "log_block_symbol",
    "block_symbol",
    "block_symbol_z",
    "block_symbol_table",
    "model_symbol_ma",
    "model_symbol_Ma",
    "tanh_symbol",
    "strip_shift_check",
]

# rank-one structure of the nine-case table: mu = -(pi/2)(u_k + u_l),
# eta = -((2 beta - pi)/2)(v_k + v_l)
_U = {1: 1.0, 2: -1.0, 3: -1.0, 4: 1.0}
_V = {1: 1.0, 2: 1.0, 3: -1.0, 4: -1.0}


@dataclass(frozen=True)
class MuEta:
    mu: float
    eta: float


@dataclass(frozen=True)
class StripSpec:
    """Vertical strip of analyticity of the block symbols."""

    lower: float
    upper: float
    center: float = 0.5


def mu_eta(k: int, l: int, params: WormParams) -> MuEta:
    """Exponent pair of block (k, l); mu in {-pi, 0, pi}, eta in {-(2b-pi), 0, 2b-pi}."""
    if k not in (1, 2, 3, 4) or l not in (1, 2, 3, 4):
        raise ValueError("sheet indices must be in 1..4")
    two_b_pi = 2.0 * params.beta - np.pi
    return MuEta(
        mu=-(np.pi / 2.0) * (_U[k] + _U[l]),
        eta=-(two_b_pi / 2.0) * (_V[k] + _V[l]),
    )


def strip_spec(params: WormParams) -> StripSpec:
    return StripSpec(lower=(1.0 - params.nu) / 2.0, upper=(1.0 + params.nu) / 2.0)


def _log_cosh(t: np.ndarray) -> np.ndarray:
    t = np.abs(t)
    return t + np.log1p(np.exp(-2.0 * t)) - np.log(2.0)


def _log_cosh_complex(w: np.ndarray) -> np.ndarray:
    # branch-consistent log cosh for symbol ratios: exact up to multiples of
    # 2 pi i, which cancel under exp()
    w = np.asarray(w, dtype=complex)
    s = np.where(np.real(w) >= 0, 1.0, -1.0)
    return s * w + np.log1p(np.exp(-2.0 * s * w)) - np.log(2.0)


def d_factor(z, j, params: WormParams):
    """Denominator D(z, j) = 4 cosh[i pi (z - 1/2)] cosh[i(2b-pi)(z - 1/2 + i(j/2 + 1/4))]."""
    z = np.asarray(z, dtype=complex)
    two_b_pi = 2.0 * params.beta - np.pi
    out = 4.0 * np.cosh(1j * np.pi * (z - 0.5)) * np.cosh(
        1j * two_b_pi * (z - 0.5 + 1j * (np.asarray(j) / 2.0 + 0.25))
    )
    return out if out.shape else complex(out)


def log_block_symbol(k, l, params, xi, j, normalization: str = "blockwise"):
    """log of the (real, positive) block symbol on the critical line.

    Stable for arbitrarily large |xi|: the exponent is assembled before a
    single exp().  ``normalization`` as described in the module docstring.
    """
    xi = np.asarray(xi, dtype=float)
    j = np.asarray(j, dtype=float)
    me = mu_eta(k, l, params)
    two_b_pi = 2.0 * params.beta - np.pi
    if normalization == "blockwise":
        shift = 0.0
    elif normalization == "projection":
        shift = 0.25
    else:
        raise ValueError("normalization must be 'blockwise' or 'projection'")
    u = xi - j / 2.0
    return (
        me.mu * xi
        + me.eta * (u - shift)
        - _log_cosh(np.pi * xi)
        - _log_cosh(two_b_pi * (u - 0.25))
        - np.log(4.0)
    )


def block_symbol(k, l, params, xi, j, normalization: str = "blockwise"):
    """Block symbol m_{k,l}(xi, j); real, positive, bounded on the line."""
    return np.exp(log_block_symbol(k, l, params, xi, j, normalization))


def block_symbol_z(k, l, params, z, j):
    """Analytic block symbol e^{i mu (z-1/2)} e^{i eta (z-1/2+i j/2)} / D(z, j).

    Complex z inside the strip; blockwise normalization.  Log-stable.
    """
    z = np.asarray(z, dtype=complex)
    j = np.asarray(j, dtype=float)
    me = mu_eta(k, l, params)
    two_b_pi = 2.0 * params.beta - np.pi
    lognum = 1j * me.mu * (z - 0.5) + 1j * me.eta * (z - 0.5 + 1j * j / 2.0)
    logden = (
        np.log(4.0)
        + _log_cosh_complex(1j * np.pi * (z - 0.5))
        + _log_cosh_complex(1j * two_b_pi * (z - 0.5 + 1j * (j / 2.0 + 0.25)))
    )
    return np.exp(lognum - logden)


@dataclass
class MultiplierTable:
    """A symbol materialized on a grid's (xi, j) lattice, FFT ordering."""

    grid: Grid2D
    values: np.ndarray
    provenance: str
    sup: float

    @classmethod
    def from_values(cls, grid: Grid2D, values: np.ndarray, provenance: str) -> "MultiplierTable":
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ValueError("table shape does not match grid")
        if not np.all(np.isfinite(values)):
            raise ValueError("table contains non-finite entries")
        return cls(grid, values, provenance, float(np.max(np.abs(values))))


def block_symbol_table(
    k: int, l: int, params: WormParams, grid: Grid2D, normalization: str = "blockwise"
) -> MultiplierTable:
    xi = grid.log.xi[:, None]
    j = grid.ang.modes[None, :]
    vals = block_symbol(k, l, params, xi, j, normalization)
    return MultiplierTable.from_values(grid, vals, f"block({k},{l})[{normalization}]")


def model_symbol_ma(a: float, xi):
    """Model half-line symbol m_a(xi) = e^{a xi} / (2 cosh(a xi)) = (1 + tanh(a xi))/2."""
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    return 0.5 * (1.0 + np.tanh(a * np.asarray(xi, dtype=float)))


def model_symbol_Ma(a: float, xi, j):
    """Mode-shifted model symbol M_a(xi, j) = e^{a/4} m_a(xi - j/2 - 1/4)."""
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    u = np.asarray(xi, dtype=float) - np.asarray(j, dtype=float) / 2.0 - 0.25
    return np.exp(a / 4.0) * 0.5 * (1.0 + np.tanh(a * u))


def tanh_symbol(a: float, kappa: float, xi):
    """Symbol 2|a| i tanh(a (xi - i kappa)) of the sinh-kernel convolution.

    Bounded on the line for 0 <= kappa < pi/(2|a|); the poles of tanh cross
    the integration line at kappa = pi/(2|a|), so that range is enforced.
    """
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    if not 0.0 <= kappa < np.pi / (2.0 * abs(a)):
        raise ValueError("require 0 <= kappa < pi/(2|a|)")
    z = a * (np.asarray(xi, dtype=float) - 1j * kappa)
    return 2.0 * abs(a) * 1j * np.tanh(z)


def strip_shift_check(
    k: int,
    l: int,
    phi_values: np.ndarray,
    grid: Grid2D | None,
    params: WormParams,
    c: float,
    window: float = 5.0,
):
    """Contour-shift invariance probe of the inverse Mellin representation.

    Evaluates rho^{-c} (1/2pi) int m(c - i xi) (M_1 phi)(c - i xi) e^{i xi
    log rho} d xi for the half-line profile ``phi_values`` (theta-independent,
    given as samples phi(e^{x_k})) and returns the sup difference against the
    c = 1/2 evaluation over |log rho| <= window.  Path independence of the
    contour integral makes the true difference zero; the returned value is
    pure quadrature error and shrinks as the grid refines.
    """
    if grid is None:
        raise ValueError("grid required")
    spec = strip_spec(params)
    if not spec.lower < c < spec.upper:
        raise ValueError(f"c = {c} outside the analyticity strip ({spec.lower}, {spec.upper})")
    log = grid.log

    def contour(cc: float) -> np.ndarray:
        g = cayley(1.0 / cc, phi_values, log)
        G = mf_forward_line(g, log)
        M = block_symbol_z(k, l, params, cc - 1j * log.xi, 0)
        w = mf_inverse_line(M * G, log)
        return cayley_inverse(1.0 / cc, w, log)

    ref = contour(0.5)
    test = contour(c)
    mask = np.abs(log.x) <= window
    return float(np.max(np.abs((test - ref)[mask])))
