"""Operator assembly: projection blocks, truncated singular integrals, models.

The boundary projection acts sheetwise: block (k, l) reads sheet l,
conjugates by C_2, applies the block multiplier, and deposits on sheet k.
With the projection-normalized symbols and the sheet-weight ratio
sqrt(w_l / w_k) the assembled 16-block operator is idempotent and
self-adjoint for the weighted boundary inner product to rounding accuracy
(both are exact pointwise identities of the discrete symbols).

The model operators P_a, Q_a and the truncated sinh-kernel convolution
live on the same half-line representation; the convolution is oriented so
that its symbol is +2|a| i tanh(a xi) (acting on e^{i xi x} by that factor),
matching the closed form the spectral route uses.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import fftconvolve

from .geometry import Sheet, WormParams, measure_weight
from .multipliers import (
    MultiplierTable,
    block_symbol,
    log_block_symbol,
    model_symbol_Ma,
    model_symbol_ma,
    tanh_symbol,
)
from .transforms import (
    BoundaryField,
    Grid2D,
    LogGrid,
    Spectrum,
    cayley,
    cayley_inverse,
    mf_forward,
    mf_inverse,
)

__all__ = [
    "BlockOperator",
    "TruncationWindow",
    "apply_block",
    "apply_szego",
    "apply_block_logspectrum",
    "weighted_inner",
    "weighted_l2",
    "truncated_cz",
    "cz_operator_norm",
    "lambda_plus",
    "lambda_a",
    "p_a",
    "q_a",
    "compose_multipliers",
]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("WORMSZEGO_THREADS", "1")))
    except ValueError:
        return 1


def _weight_ratio(k: int, l: int, params: WormParams, normalization: str) -> float:
    if normalization == "projection":
        return float(
            np.sqrt(measure_weight(Sheet(l), params) / measure_weight(Sheet(k), params))
        )
    return 1.0


@dataclass
class BlockOperator:
    """One sheet-to-sheet block: reads sheet ``l``, writes sheet ``k``."""

    k: int
    l: int
    table: MultiplierTable
    weight_ratio: float = 1.0

    def apply_spectrum(self, spectrum: Spectrum) -> np.ndarray:
        return self.weight_ratio * self.table.values * spectrum.data


def apply_block(
    k: int,
    l: int,
    field: BoundaryField,
    params: WormParams,
    normalization: str = "projection",
) -> BoundaryField:
    """Apply block (k, l): C_2^{-1} T_{m_{k,l}} C_2 on sheet l, deposit on sheet k.

    All sheets other than k are identically zero in the output.  Inputs whose
    transformed spectrum under-ranges double precision relative to the field
    scale (products symbol x spectrum smaller than ~1e-16 of the peak) lose
    accuracy to FFT roundoff; for closed-form spectra use
    :func:`apply_block_logspectrum`.
    """
    grid = field.grid
    xi = grid.log.xi[:, None]
    j = grid.ang.modes[None, :]
    sym = block_symbol(k, l, params, xi, j, normalization)
    sym = sym * _weight_ratio(k, l, params, normalization)
    spec = mf_forward(cayley(2.0, field.sheet(l), grid), grid)
    out_sheet = cayley_inverse(2.0, mf_inverse(Spectrum(grid, sym * spec.data)), grid)
    out = BoundaryField.zeros(grid)
    out.data[k - 1] = out_sheet
    return out


def apply_szego(
    field: BoundaryField,
    params: WormParams,
    normalization: str = "projection",
    threads: int | None = None,
) -> BoundaryField:
    """Sum of the sixteen blocks; the boundary projection.

    Each source sheet is transformed once, the sixteen symbol products are
    accumulated per target sheet in fixed l order, and each target sheet is
    inverted once.  The per-target work is independent and may run on a small
    thread pool (WORMSZEGO_THREADS); results are deterministic regardless.
    """
    grid = field.grid
    xi = grid.log.xi[:, None]
    j = grid.ang.modes[None, :]
    specs = [mf_forward(cayley(2.0, field.sheet(l), grid), grid) for l in (1, 2, 3, 4)]

    def one_target(k: int) -> np.ndarray:
        acc = np.zeros(grid.shape, dtype=complex)
        for l in (1, 2, 3, 4):
            sym = block_symbol(k, l, params, xi, j, normalization)
            acc += _weight_ratio(k, l, params, normalization) * sym * specs[l - 1].data
        return cayley_inverse(2.0, mf_inverse(Spectrum(grid, acc)), grid)

    n_threads = _thread_count() if threads is None else max(1, threads)
    out = BoundaryField.zeros(grid)
    if n_threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(one_target, (1, 2, 3, 4)))
        for k, sheet_vals in zip((1, 2, 3, 4), results):
            out.data[k - 1] = sheet_vals
    else:
        for k in (1, 2, 3, 4):
            out.data[k - 1] = one_target(k)
    return out


def apply_block_logspectrum(
    k: int,
    l: int,
    log_spectrum: Callable[[np.ndarray], np.ndarray],
    params: WormParams,
    grid: Grid2D,
    normalization: str = "blockwise",
):
    """Block application for a source with known positive closed-form spectrum.

    ``log_spectrum(xi)`` returns log of the (real, positive) line spectrum of
    C_2 (f restricted to sheet l) at mode j = 0.  The symbol and the spectrum
    are combined in log space, the common scale is factored out, and a single
    inverse transform produces the half-line output profile on sheet k.

    Returns ``(values, log_scale)``: the profile equals values * e^{log_scale}
    at (rho = e^{x_k}); values are normalized so their inverse-transform input
    had unit sup.  This path exists because a sampled forward transform has an
    additive noise floor ~1e-16 of the field scale, while products
    symbol x spectrum of interest here sit hundreds of e-folds below it.
    """
    log = grid.log
    xi = log.xi
    logW = (
        log_block_symbol(k, l, params, xi, 0.0, normalization)
        + np.asarray(log_spectrum(xi), dtype=float)
        + np.log(2.0 * np.pi)  # angular integral of a theta-independent source
    )
    log_scale = float(np.max(logW))
    W = np.exp(logW - log_scale)
    # j = 0 term of the 2-D inversion: (1/(2 pi)^2) int W e^{i x xi} d xi
    phase = np.exp(1j * log.x_min * xi)
    w = np.fft.ifft(phase * W) * (log.n * log.dxi / (2.0 * np.pi) ** 2)
    values = cayley_inverse(2.0, w, log)
    ratio = _weight_ratio(k, l, params, normalization)
    return ratio * values, log_scale


def weighted_inner(f: BoundaryField, g: BoundaryField, params: WormParams) -> complex:
    """Boundary inner product sum_l w_l int f_l conj(g_l) d rho d theta."""
    f.check_same_grid(g)
    grid = f.grid
    rho = np.exp(grid.log.x)[:, None]
    dmu = grid.log.dx * (2.0 * np.pi / grid.ang.m_count)
    total = 0.0 + 0.0j
    for sh in Sheet:
        w = measure_weight(sh, params)
        total += w * np.sum(f.sheet(sh) * np.conj(g.sheet(sh)) * rho) * dmu
    return complex(total)


def weighted_l2(f: BoundaryField, params: WormParams) -> float:
    return float(np.sqrt(np.real(weighted_inner(f, f, params))))


@dataclass(frozen=True)
class TruncationWindow:
    """Window eps < |pi t / (2 a)| < r for the truncated convolution."""

    eps: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.eps < self.r:
            raise ValueError("require 0 < eps < r")


def _cz_taps(a: float, window: TruncationWindow, dx: float) -> np.ndarray:
    """Antisymmetric tap array of the truncated kernel on the offset lattice.

    Offsets t_m = m dx for |m| >= 1; taps[center + m] is the quadrature
    weight of g(x + t_m), so the discrete symbol is 2 i sum_m w_m sin(xi t_m)
    -> 2|a| i tanh(a xi).  The symmetric pairing makes kernel oddness exact
    in floating point.
    """
    t_hi = 2.0 * abs(a) * window.r / np.pi
    m_max = int(np.floor(t_hi / dx))
    if m_max < 1:
        return np.zeros(1)
    m = np.arange(1, m_max + 1)
    t = m * dx
    scaled = np.pi * t / (2.0 * abs(a))
    w = np.where((scaled > window.eps) & (scaled < window.r), dx / np.sinh(scaled), 0.0)
    return np.concatenate([-w[::-1], [0.0], w])


def truncated_cz(
    a: float,
    window: TruncationWindow,
    values: np.ndarray,
    grid: LogGrid,
) -> np.ndarray:
    """Truncated convolution against the odd kernel 1/sinh(pi t/(2a)).

    out(x) = sum over the window of g(x + t) / sinh(pi t / (2a)) dt, acting
    along the first axis; the field is extended by zero outside the grid.
    Acting on e^{i xi x} this multiplies by 2|a| i tanh(a xi) up to window
    and step corrections (the step correction is -2 i xi dx + O(dx^2)).
    """
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    values = np.asarray(values)
    taps = _cz_taps(a, window, grid.dx)[::-1]
    if values.ndim == 1:
        return fftconvolve(values, taps, mode="same")
    out = np.empty_like(values, dtype=complex)
    for col in range(values.shape[1]):
        out[:, col] = fftconvolve(values[:, col], taps, mode="same")
    return out


def cz_operator_norm(a: float, window: TruncationWindow, grid: LogGrid) -> float:
    """l^2 operator norm of the discrete truncated convolution: max |symbol|."""
    taps = _cz_taps(a, window, grid.dx)[::-1]
    n_pad = 1 << int(np.ceil(np.log2(max(len(taps) * 2, 1024))))
    return float(np.max(np.abs(np.fft.fft(taps, n=n_pad))))


def lambda_plus(values: np.ndarray) -> np.ndarray:
    """Restriction factor on the half-line representation: the identity."""
    return np.asarray(values).copy()


def lambda_a(
    a: float,
    values: np.ndarray,
    grid: LogGrid | Grid2D,
    route: str = "spectral",
    window: TruncationWindow | None = None,
) -> np.ndarray:
    """C_2-conjugated sinh-kernel convolution on a half-line field (x theta).

    ``spectral`` applies the exact limiting symbol 2|a| i tanh(a xi);
    ``quadrature`` applies the truncated convolution (cross-validation
    route; needs ``window``).
    """
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    log = grid.log if isinstance(grid, Grid2D) else grid
    g = cayley(2.0, values, log)
    if route == "spectral":
        sym = tanh_symbol(a, 0.0, log.xi)
        G = np.fft.fft(g, axis=0)
        G = sym * G if g.ndim == 1 else sym[:, None] * G
        out = np.fft.ifft(G, axis=0)
    elif route == "quadrature":
        if window is None:
            raise ValueError("quadrature route needs a TruncationWindow")
        out = truncated_cz(a, window, g, log)
    else:
        raise ValueError("route must be 'spectral' or 'quadrature'")
    return cayley_inverse(2.0, out, log)


def _halfline_multiplier(values: np.ndarray, sym_1d: np.ndarray, log: LogGrid) -> np.ndarray:
    g = cayley(2.0, values, log)
    G = np.fft.fft(g, axis=0)
    G = sym_1d * G if g.ndim == 1 else sym_1d[:, None] * G
    return cayley_inverse(2.0, np.fft.ifft(G, axis=0), log)


def p_a(
    a: float,
    values: np.ndarray,
    grid: LogGrid | Grid2D,
    route: str = "multiplier",
) -> np.ndarray:
    """Model operator with symbol m_a on the half-line representation.

    ``multiplier``: direct C_2^{-1} T_{m_a} C_2.
    ``decomposition``: (1/2)(identity + (1/(2|a|i)) Lambda_a), using
    m_a = 1/2 (1 + tanh) and the tanh symbol of Lambda_a.  The two routes
    are the same pointwise symbol identity evaluated two ways.
    """
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    log = grid.log if isinstance(grid, Grid2D) else grid
    if route == "multiplier":
        return _halfline_multiplier(values, model_symbol_ma(a, log.xi), log)
    if route == "decomposition":
        lam = lambda_a(a, values, log, route="spectral")
        return 0.5 * (lambda_plus(values) + lam / (2.0 * abs(a) * 1j))
    raise ValueError("route must be 'multiplier' or 'decomposition'")


def q_a(
    a: float,
    values: np.ndarray,
    grid: Grid2D,
    route: str = "multiplier",
) -> np.ndarray:
    """Mode-shifted model operator with symbol M_a(xi, j) on (n, M) fields.

    ``multiplier``: 2-D symbol M_a(xi, j) = e^{a/4} m_a(xi - j/2 - 1/4).
    ``modeshift``: per mode j, demodulate by e^{-i c_j x} with
    c_j = j/2 + 1/4, apply the unshifted 1-D symbol m_a, remodulate, and
    scale by e^{a/4}; evaluates the same operator through the substitution
    the shifted symbol encodes.
    """
    if abs(a) < np.pi:
        raise ValueError("require |a| >= pi")
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("q_a expects an (n, M) field")
    log, ang = grid.log, grid.ang
    if route == "multiplier":
        sym = model_symbol_Ma(a, log.xi[:, None], ang.modes[None, :])
        g = cayley(2.0, values, log)
        Gm = np.fft.fft(np.fft.fft(g, axis=1), axis=0)
        out = np.fft.ifft(np.fft.ifft(sym * Gm, axis=0), axis=1)
        return cayley_inverse(2.0, out, log)
    if route == "modeshift":
        g = cayley(2.0, values, log)
        g_modes = np.fft.fft(g, axis=1)  # per integer mode j, FFT order
        out_modes = np.empty_like(g_modes)
        m_a_plain = model_symbol_ma(a, log.xi)
        for idx, j in enumerate(ang.modes):
            c = j / 2.0 + 0.25
            demod = np.exp(-1j * c * log.x)
            v = demod * g_modes[:, idx]
            v = np.fft.ifft(m_a_plain * np.fft.fft(v))
            out_modes[:, idx] = np.exp(a / 4.0) * np.conj(demod) * v
        out = np.fft.ifft(out_modes, axis=1)
        return cayley_inverse(2.0, out, log)
    raise ValueError("route must be 'multiplier' or 'modeshift'")


def compose_multipliers(
    table_a: MultiplierTable,
    table_b: MultiplierTable,
    field: BoundaryField | np.ndarray,
    grid: Grid2D | None = None,
):
    """Apply T_{m_A} T_{m_B} and T_{m_A m_B} to the same field; return both.

    The multiplier algebra makes the two results equal; the pair is returned
    so callers can assert it at their tolerance.  Operates on a single
    (n, M) half-line field.
    """
    if isinstance(field, BoundaryField):
        raise ValueError("pass a single-sheet (n, M) array")
    values = np.asarray(field)
    if grid is None:
        grid = table_a.grid
    if table_a.grid != grid or table_b.grid != grid:
        raise ValueError("tables and field must share one grid")

    def t_mult(vals: np.ndarray, table_vals: np.ndarray) -> np.ndarray:
        spec = mf_forward(cayley(2.0, vals, grid), grid)
        return cayley_inverse(2.0, mf_inverse(Spectrum(grid, table_vals * spec.data)), grid)

    sequential = t_mult(t_mult(values, table_b.values), table_a.values)
    combined = t_mult(values, table_a.values * table_b.values)
    return sequential, combined
