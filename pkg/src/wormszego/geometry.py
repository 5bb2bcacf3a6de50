"""Worm-domain geometry: parameters, sheets, measure, biholomorphism, isometry.

The model domain with parameter beta > pi is

    D_beta = { (z1, z2) : Re(z1 e^{-i log|z2|^2}) > 0, |log|z2|^2| < beta - pi/2 }.

Its distinguished boundary consists of the points with
|arg z1 - log|z2|^2| = pi/2 and |log|z2|^2| = beta - pi/2; away from two
zero-measure circles it splits into four sheets E1..E4, each parameterized
by (rho, theta) in (0, inf) x [0, 2 pi).  The sharp regularity exponent is
nu = pi / (2 beta - pi): the projection is L^p-bounded exactly for
2/(1+nu) < p < 2/(1-nu) and W^{s,2}-bounded exactly for 0 <= s < nu/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .transforms import BoundaryField

__all__ = [
    "Sheet",
    "WormParams",
    "SheetId",
    "BoundaryPoint",
    "make_params",
    "sheet_id",
    "embed",
    "measure_weight",
    "boundary_residuals",
    "map_phi",
    "psi_weight",
    "lambda_isometry",
    "lambda_isometry_inverse",
]


class Sheet(IntEnum):
    E1 = 1
    E2 = 2
    E3 = 3
    E4 = 4


# sign of the rho-coefficient in z1 and sign of log|z2|^2, per sheet
_RHO_SIGN = {Sheet.E1: 1.0, Sheet.E2: -1.0, Sheet.E3: 1.0, Sheet.E4: -1.0}
_ARG_SIGN = {Sheet.E1: 1.0, Sheet.E2: 1.0, Sheet.E3: -1.0, Sheet.E4: -1.0}
_LEVEL_SIGN = {Sheet.E1: 1.0, Sheet.E2: 1.0, Sheet.E3: -1.0, Sheet.E4: -1.0}


@dataclass(frozen=True)
class WormParams:
    """Domain parameter and the derived sharp thresholds."""

    beta: float
    nu: float
    sheet_height: float
    lp_lower: float
    lp_upper: float
    sobolev_l2_sup: float


def make_params(beta: float) -> WormParams:
    """Build :class:`WormParams`; rejects the degenerate range beta <= pi."""
    beta = float(beta)
    if not beta > np.pi:
        raise ValueError(f"beta must exceed pi, got {beta}")
    nu = np.pi / (2.0 * beta - np.pi)
    return WormParams(
        beta=beta,
        nu=nu,
        sheet_height=beta - np.pi / 2.0,
        lp_lower=2.0 / (1.0 + nu),
        lp_upper=2.0 / (1.0 - nu),
        sobolev_l2_sup=nu / 2.0,
    )


@dataclass(frozen=True)
class SheetId:
    tag: Sheet
    arg_z1: float
    log_mod_z2_sq: float


def sheet_id(sheet: Sheet, params: WormParams) -> SheetId:
    """Canonical (unwrapped) argument of z1 and the level of log|z2|^2."""
    beta, s = params.beta, params.sheet_height
    arg = {
        Sheet.E1: beta,
        Sheet.E2: beta - np.pi,
        Sheet.E3: -beta,
        Sheet.E4: -beta + np.pi,
    }[Sheet(sheet)]
    return SheetId(Sheet(sheet), arg, _LEVEL_SIGN[Sheet(sheet)] * s)


@dataclass(frozen=True)
class BoundaryPoint:
    sheet: Sheet
    rho: float
    theta: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be strictly positive")
        if not 0.0 <= self.theta < 2.0 * np.pi:
            raise ValueError("theta must lie in [0, 2 pi)")


def embed(point: BoundaryPoint, params: WormParams):
    """Map (sheet, rho, theta) to the boundary point (z1, z2) in C^2."""
    sh = Sheet(point.sheet)
    s = params.sheet_height
    z1 = _RHO_SIGN[sh] * point.rho * np.exp(1j * _ARG_SIGN[sh] * params.beta)
    z2 = np.exp(_LEVEL_SIGN[sh] * s / 2.0) * np.exp(1j * point.theta)
    return z1, z2


def measure_weight(sheet: Sheet, params: WormParams) -> float:
    """Density of the boundary measure against d rho d theta on the sheet.

    The measure is fixed to exactly e^{+s/2} on E1, E2 and e^{-s/2} on
    E3, E4 with s = beta - pi/2 (the normalization every norm in this
    package uses).
    """
    return float(np.exp(_LEVEL_SIGN[Sheet(sheet)] * params.sheet_height / 2.0))


def boundary_residuals(point: BoundaryPoint, params: WormParams):
    """Residuals of the two defining equations at the embedded point.

    Returns (| |arg z1 - log|z2|^2| - pi/2 |, | |log|z2|^2| - (beta - pi/2) |)
    where arg z1 is the sheet's canonical unwrapped argument (the principal
    argument of the embedded z1 agrees with it mod 2 pi).
    """
    z1, z2 = embed(point, params)
    ident = sheet_id(point.sheet, params)
    # principal-argument consistency, mod 2 pi
    wrapped = np.angle(z1)
    mism = abs((wrapped - ident.arg_z1 + np.pi) % (2.0 * np.pi) - np.pi)
    log_mod = 2.0 * np.log(np.abs(z2))
    r1 = abs(abs(ident.arg_z1 - log_mod) - np.pi / 2.0) + mism
    r2 = abs(abs(log_mod) - params.sheet_height)
    return r1, r2


def map_phi(z1: complex, z2: complex, direction: str = "forward"):
    """Biholomorphism between the straightened domain and D_beta.

    forward:  (z1, z2) -> (e^{z1}, z2)
    inverse:  (z1, z2) -> (Log(z1 e^{-i log|z2|^2}) + i log|z2|^2, z2),
              principal branch Log; rejects the singular set z1 = 0.
    """
    if direction == "forward":
        return np.exp(z1), z2
    if direction == "inverse":
        if z1 == 0:
            raise ValueError("inverse map is singular at z1 = 0")
        log_mod = 2.0 * np.log(np.abs(np.asarray(z2)))
        w = z1 * np.exp(-1j * log_mod)
        return np.log(w) + 1j * log_mod, z2
    raise ValueError("direction must be 'forward' or 'inverse'")


def psi_weight(z1, z2, p: float):
    """Holomorphic weight e^{-(i/p) log|z2|^2} (z1 e^{-i log|z2|^2})^{-1/p}.

    Principal branches throughout.  Inputs with z1 e^{-i log|z2|^2} on the
    branch cut (-inf, 0] of the principal root are rejected.
    """
    if not 1.0 < p < np.inf:
        raise ValueError("require p in (1, inf)")
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    log_mod = 2.0 * np.log(np.abs(z2))
    w = z1 * np.exp(-1j * log_mod)
    on_cut = (np.imag(w) == 0) & (np.real(w) <= 0)
    if np.any(on_cut):
        raise ValueError("argument lies on the branch cut of the principal root")
    out = np.exp(-1j * log_mod / p) * w ** (-1.0 / p)
    return out if out.shape else complex(out)


def _psi_on_sheet(sheet: Sheet, rho: np.ndarray, params: WormParams, p: float) -> np.ndarray:
    z1 = _RHO_SIGN[sheet] * rho * np.exp(1j * _ARG_SIGN[sheet] * params.beta)
    z2_level = np.exp(_LEVEL_SIGN[sheet] * params.sheet_height / 2.0)
    return psi_weight(z1, np.full_like(rho, z2_level, dtype=complex), p)


def lambda_isometry(field: BoundaryField, p: float, params: WormParams) -> BoundaryField:
    """Transplant a field from the straightened boundary to d_b(D_beta).

    The input lives on the four straightened sheets over the shared line
    grid (first variable x in R); the output lives on E1..E4 over the same
    grid read as x = log rho.  Sheet l maps to sheet l; pointwise
    (Lf)(rho, theta) = psi_p(rho, theta) f(log rho, theta).  The map
    preserves the weighted L^p boundary norm exactly (the two quadrature
    sums coincide term by term).
    """
    grid = field.grid
    rho = np.exp(grid.log.x)
    out = BoundaryField.zeros(grid)
    for sh in Sheet:
        psi = _psi_on_sheet(sh, rho, params, p)
        out.data[sh - 1] = psi[:, None] * field.sheet(sh)
    return out


def lambda_isometry_inverse(field: BoundaryField, p: float, params: WormParams) -> BoundaryField:
    """Pointwise inverse of :func:`lambda_isometry` (psi_p never vanishes)."""
    grid = field.grid
    rho = np.exp(grid.log.x)
    out = BoundaryField.zeros(grid)
    for sh in Sheet:
        psi = _psi_on_sheet(sh, rho, params, p)
        out.data[sh - 1] = field.sheet(sh) / psi[:, None]
    return out
