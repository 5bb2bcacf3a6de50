"""Counterexample experiments: decay laws, threshold sweeps, kernel checks.

The witness function lives on sheet 1, is theta-independent, and is scaled
so its samples are order one:

    g(rho) = e^{4 i beta log rho} e^{-(log rho)^2 - (1/2) log rho},

whose C_2 transplant is exactly e^{-x^2 + 4 i beta x} with line spectrum
sqrt(pi) e^{-(xi - 4 beta)^2 / 4} (times 2 pi at angular mode 0).  Its
projection decays like x^{-(1+nu)/2} at infinity and x^{(nu-1)/2} at the
origin, which pins the sharp L^p interval (2/(1+nu), 2/(1-nu)) and the
Sobolev threshold nu/2 through truncated-norm growth.

Dynamic range: applying the (1,1) block multiplies the unit-scale spectrum
by values around e^{-4 beta^2} (about 1e-69 at beta = 2 pi), far below the
1e-16 noise floor a sampled forward FFT carries.  The pipeline therefore
assembles symbol x closed-form spectrum in log space
(:func:`wormszego.szego.apply_block_logspectrum`) and reports the factored
scale; the closed-form spectrum itself is validated against the sampled
transform on the window where the latter is accurate.  All fitted
exponents, verdicts, and oracle comparisons are scale-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .geometry import WormParams, make_params
from .norms import fit_power_law, gagliardo_seminorm
from .szego import TruncationWindow, apply_block_logspectrum, truncated_cz
from .transforms import BoundaryField, Grid2D, LogGrid

__all__ = [
    "SweepReport",
    "CounterexampleProjection",
    "experiment_grid",
    "make_g",
    "analytic_g_spectrum",
    "log_analytic_g_spectrum",
    "project_counterexample",
    "p11_oracle",
    "pipeline_oracle_comparison",
    "decay_experiment",
    "decay_constants",
    "lp_sweep",
    "sobolev_sweep",
    "sobolev_lp_sweep",
    "verify_kernels",
    "isometry_check",
]

# verdict rule (build convention): a ladder diverges when the fitted
# growth exponent of its increments exceeds this, with r^2 above 0.9
GROWTH_EXPONENT_CUT = 0.02
CONVERGED_REL_CHANGE = 0.01
DEFAULT_R_LADDER = 2.0 ** np.arange(12, 29)


def experiment_grid() -> Grid2D:
    """Wide line grid for asymptotics: x in [-60, 60], n = 2^17, M = 16.

    Same spacing as the generic operator grid but twice the span, so the
    far-field power laws are reached before periodization is felt.
    """
    return Grid2D.make(-60.0, 60.0, 2 ** 17, 16)


def make_g(params: WormParams, grid: Grid2D) -> BoundaryField:
    """Witness field on sheet 1 (unit scale, theta-independent)."""
    x = grid.log.x
    profile = np.exp(4j * params.beta * x - x ** 2 - 0.5 * x)
    out = BoundaryField.zeros(grid)
    out.data[0] = profile[:, None]
    return out


def analytic_g_spectrum(params: WormParams):
    """Closed-form line spectrum of C_2 g: xi -> sqrt(pi) e^{-(xi-4 beta)^2/4}.

    (The Gauss integral int e^{-x^2} e^{i(4 beta - xi) x} dx.)  The full
    transform on the line-times-circle carries an extra 2 pi at mode 0.
    """
    four_beta = 4.0 * params.beta

    def spectrum(xi):
        return np.sqrt(np.pi) * np.exp(-((np.asarray(xi) - four_beta) ** 2) / 4.0)

    return spectrum


def log_analytic_g_spectrum(params: WormParams):
    four_beta = 4.0 * params.beta

    def log_spectrum(xi):
        return 0.5 * np.log(np.pi) - ((np.asarray(xi) - four_beta) ** 2) / 4.0

    return log_spectrum


@dataclass
class CounterexampleProjection:
    """Block (k, l) applied to the witness: unit-sup profile plus log scale."""

    params: WormParams
    grid: Grid2D
    k: int
    l: int
    normalization: str
    x: np.ndarray
    values: np.ndarray       # unit-sup complex profile at rho = e^x
    log_scale: float         # actual profile = values * e^{log_scale}

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def at_log(self, y: np.ndarray) -> np.ndarray:
        idx = np.round((np.asarray(y) - self.x[0]) / (self.x[1] - self.x[0])).astype(int)
        return self.values[idx]


def project_counterexample(
    params: WormParams,
    grid: Grid2D | None = None,
    k: int = 1,
    l: int = 1,
    normalization: str = "blockwise",
) -> CounterexampleProjection:
    """Block (k, l) of the projection applied to the witness field."""
    if grid is None:
        grid = experiment_grid()
    values, log_scale = apply_block_logspectrum(
        k, l, log_analytic_g_spectrum(params), params, grid, normalization
    )
    peak = float(np.max(np.abs(values)))
    values = values / peak
    log_scale += np.log(peak)
    return CounterexampleProjection(
        params=params,
        grid=grid,
        k=k,
        l=l,
        normalization=normalization,
        x=grid.log.x,
        values=values,
        log_scale=log_scale,
    )


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

@dataclass
class OracleValues:
    x: np.ndarray
    values: np.ndarray
    shifted: bool
    converged: bool
    refinement_delta: float


def _oracle_inner(t: np.ndarray, dt: float) -> np.ndarray:
    """w1(t) = int e^{-s^2} sech((t - s)/2) ds on the shared t-grid."""
    return fftconvolve(np.exp(-t ** 2), 1.0 / np.cosh(t / 2.0), mode="same") * dt


def _oracle_eval(y: np.ndarray, nu: float, dt: float, t_span: float, shifted: bool) -> np.ndarray:
    t = np.arange(-t_span, t_span + dt / 2.0, dt)
    w1 = _oracle_inner(t, dt)
    out = np.empty(y.shape, dtype=complex)
    for chunk in range(0, y.size, 64):
        ys = y[chunk : chunk + 64, None]
        ker = 1.0 / np.cosh(nu * (ys - t[None, :]) / 2.0)
        if shifted:
            ker = ker * np.exp(1j * (ys - t[None, :]) / 4.0)
        out[chunk : chunk + 64] = np.sum(ker * w1[None, :], axis=1) * dt
    return out


def p11_oracle(
    x_values: np.ndarray,
    params: WormParams,
    shifted: bool = False,
    dt: float = 1.0 / 256.0,
    t_span: float = 160.0,
    refine_check: bool = True,
) -> OracleValues:
    """Independent quadrature of the projected witness's closed form.

    Computes  x^{-1/2} * (nu / (4 pi^2 sqrt(pi))) * J(log x)  where J is the
    double integral  int int e^{-s^2} sech((t-s)/2) K(y - t) ds dt  with
    K(u) = sech(nu u / 2) (``shifted=False``, the literature's reduced form)
    or K(u) = e^{i u / 4} sech(nu u / 2) (``shifted=True``, retaining the
    quarter shift the block symbol's second factor actually carries).  The
    prefactor comes from composing the three closed-form inverse transforms
    of e^{-xi^2/4}, sech(pi xi), sech((2 beta - pi) xi): (1/sqrt(pi)) *
    (1/2 pi) * (nu/2 pi).

    With ``shifted=True`` the oracle equals the pipeline's block (1,1) output
    exactly, up to the derived constant (sqrt(pi)/4) e^{-4 beta^2}.
    """
    x_values = np.asarray(x_values, dtype=float)
    if np.any(x_values <= 0):
        raise ValueError("oracle is defined for rho > 0")
    y = np.log(x_values)
    nu = params.nu
    const = nu / (4.0 * np.pi ** 2 * np.sqrt(np.pi))
    J = _oracle_eval(y, nu, dt, t_span, shifted)
    vals = const * np.exp(-y / 2.0) * J
    delta = 0.0
    converged = True
    if refine_check:
        J2 = _oracle_eval(y, nu, dt / 2.0, t_span, shifted)
        vals2 = const * np.exp(-y / 2.0) * J2
        denom = float(np.max(np.abs(vals2)))
        delta = float(np.max(np.abs(vals - vals2)) / denom) if denom > 0 else np.inf
        converged = delta < 1e-8
    return OracleValues(
        x=x_values,
        values=vals,
        shifted=shifted,
        converged=converged,
        refinement_delta=delta,
    )


def p11_oracle_spotcheck(x_value: float, params: WormParams) -> float:
    """Adaptive nested quadrature of the unshifted double integral at one x.

    Slow reference for the grid-convolution evaluation; returns the relative
    difference of the two.
    """
    nu = params.nu
    y = float(np.log(x_value))

    def inner(t: float) -> float:
        val, _ = quad(lambda s_: np.exp(-s_ ** 2) / np.cosh((t - s_) / 2.0), -12.0, 12.0,
                      epsabs=1e-12, epsrel=1e-12)
        return val

    val, _ = quad(lambda t_: inner(t_) / np.cosh(nu * (y - t_) / 2.0), -120.0, 120.0,
                  epsabs=1e-12, epsrel=1e-10, limit=400)
    const = nu / (4.0 * np.pi ** 2 * np.sqrt(np.pi))
    reference = const * np.exp(-y / 2.0) * val
    fast = p11_oracle(np.array([x_value]), params, refine_check=False).values[0].real
    return abs(fast - reference) / abs(reference)


# ---------------------------------------------------------------------------
# decay experiment
# ---------------------------------------------------------------------------

@dataclass
class DecayReport:
    params: WormParams
    window: tuple[float, float]
    tail_slope: float
    origin_slope: float
    tail_r2: float
    origin_r2: float
    expected_tail: float
    expected_origin: float
    oracle_tail_slope: float | None = None
    oracle_origin_slope: float | None = None
    log_scale: float = 0.0

    def max_deviation(self) -> float:
        return max(
            abs(self.tail_slope - self.expected_tail),
            abs(self.origin_slope - self.expected_origin),
        )


def _slope_on_ladder(x: np.ndarray, mag: np.ndarray, lo: float, hi: float, npts: int):
    ys = np.linspace(lo, hi, npts)
    dx = x[1] - x[0]
    idx = np.round((ys - x[0]) / dx).astype(int)
    fit = fit_power_law(np.exp(x[idx]), mag[idx])
    return fit.exponent, fit.r2


def decay_experiment(
    params: WormParams,
    grid: Grid2D | None = None,
    window: tuple[float, float] = (10.0, 20.0),
    n_points: int = 21,
    with_oracle: bool = False,
) -> DecayReport:
    """Fit the far-field power laws of the projected witness.

    The fit windows sit at |log rho| in ``window``: the leading power law is
    approached at the rate x^{-(1-nu)/2} set by the gap to the next symbol
    pole, so fitting closer to rho = 1 biases the slopes (at |log rho| in
    [2, 8] the bias reaches ~0.07).
    """
    proj = project_counterexample(params, grid)
    lo, hi = window
    tail_slope, tail_r2 = _slope_on_ladder(proj.x, proj.magnitude, lo, hi, n_points)
    origin_slope, origin_r2 = _slope_on_ladder(proj.x, proj.magnitude, -hi, -lo, n_points)
    report = DecayReport(
        params=params,
        window=window,
        tail_slope=tail_slope,
        origin_slope=origin_slope,
        tail_r2=tail_r2,
        origin_r2=origin_r2,
        expected_tail=-(1.0 + params.nu) / 2.0,
        expected_origin=(params.nu - 1.0) / 2.0,
        log_scale=proj.log_scale,
    )
    if with_oracle:
        ys = np.linspace(lo, hi, n_points)
        o_tail = np.abs(p11_oracle(np.exp(ys), params, refine_check=False).values)
        o_origin = np.abs(p11_oracle(np.exp(-ys), params, refine_check=False).values)
        report.oracle_tail_slope = fit_power_law(np.exp(ys), o_tail).exponent
        report.oracle_origin_slope = fit_power_law(np.exp(-ys), o_origin).exponent
    return report


def decay_constants(params: WormParams, dt: float = 1.0 / 256.0, t_span: float = 200.0):
    """The two bracketing double integrals of the far-field bounds.

    A = int int sech(nu t / 2) e^{-s^2} sech((t - s)/2) ds dt
    B = 2 int int e^{nu t / 2} e^{-s^2} sech((t - s)/2) ds dt

    Reported without the shared positive prefactor (their ratio is
    prefactor-free); B >= A pointwise since sech(u) <= 2 e^{u}.  Returns
    (A, B, refinement) with the relative change under step halving.

    A is quadratured as sech(nu t/2) against the inner convolution (the
    decaying weight keeps roundoff harmless).  B's tilt factorizes exactly,
    e^{nu t/2} = e^{nu (t-s)/2} e^{nu s/2}, so B separates into two 1-D
    integrals; quadraturing the unseparated form would amplify the inner
    convolution's roundoff floor by e^{nu t_span / 2}.
    """
    nu = params.nu

    def eval_at(step: float):
        t = np.arange(-t_span, t_span + step / 2.0, step)
        w1 = _oracle_inner(t, step)
        A = float(np.sum(w1 / np.cosh(nu * t / 2.0)) * step)
        gauss_tilt = float(np.sum(np.exp(-t ** 2 + nu * t / 2.0)) * step)
        logsech = -(np.abs(t / 2.0) + np.log1p(np.exp(-np.abs(t))))
        sech_tilt = float(np.sum(2.0 * np.exp(nu * t / 2.0 + logsech)) * step)
        B = 2.0 * gauss_tilt * sech_tilt
        return A, B

    A1, B1 = eval_at(dt)
    A2, B2 = eval_at(dt / 2.0)
    refinement = max(abs(A1 - A2) / A2, abs(B1 - B2) / B2)
    return A2, B2, refinement


# ---------------------------------------------------------------------------
# truncation sweeps
# ---------------------------------------------------------------------------

@dataclass
class LadderResult:
    parameter: dict
    ladder: list
    values: list
    diff_exponent: float
    diff_r2: float
    top_rel_change: float
    verdict: str
    predicted_verdict: str
    predicted_exponent: float | None


@dataclass
class SweepReport:
    kind: str
    params: WormParams
    results: list[LadderResult] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def all_match(self) -> bool:
        return all(r.verdict == r.predicted_verdict for r in self.results)


def _classify_ladder(R: np.ndarray, vals: np.ndarray, fit_points: int = 6):
    """Verdict from the growth of nested-truncation values.

    The increments of the ladder isolate the divergent part (any convergent
    remainder cancels in differences): their log-log slope is the growth
    exponent.  Rule: divergent iff slope > 0.02 with r^2 > 0.9; convergent
    iff slope < -0.02 (decaying increments) or the top doubling changes the
    value by < 1%; marginal otherwise (log-type growth has flat positive
    increments).
    """
    vals = np.asarray(vals, dtype=float)
    D = np.diff(vals)
    top_rel = float(D[-1] / vals[-1]) if vals[-1] != 0 else 0.0
    if np.any(D <= 0):
        # increments at rounding level: the ladder has converged
        return 0.0, 1.0, top_rel, "convergent"
    npts = min(fit_points, D.size)
    fit = fit_power_law(R[1:][-npts:], D[-npts:])
    slope, r2 = fit.exponent, fit.r2
    if slope > GROWTH_EXPONENT_CUT and r2 > 0.9:
        verdict = "divergent"
    elif slope < -GROWTH_EXPONENT_CUT or top_rel < CONVERGED_REL_CHANGE:
        verdict = "convergent"
    else:
        verdict = "marginal"
    return float(slope), float(r2), top_rel, verdict


def _predicted_growth(params: WormParams, s: float, p: float):
    """Predicted truncation-growth exponent(s) of int |Pg|^p-type ladders.

    Origin side: p (s + (1 - nu)/2) - 1; tail side: 1 - p ((1 + nu)/2 + s).
    The predicted ladder exponent is the larger positive one; both negative
    means convergent, an exact zero means logarithmic (marginal).
    """
    nu = params.nu
    origin = p * (s + (1.0 - nu) / 2.0) - 1.0
    tail = 1.0 - p * ((1.0 + nu) / 2.0 + s)
    dominant = max(origin, tail)
    if abs(dominant) < 1e-9:
        return None, "marginal"
    if dominant > 0:
        return float(dominant), "divergent"
    return float(dominant), "convergent"


def lp_sweep(
    params: WormParams,
    p_list,
    R_list=None,
    grid: Grid2D | None = None,
    projection: CounterexampleProjection | None = None,
) -> SweepReport:
    """Truncated L^p growth of the projected witness over rho in [1/R, R]."""
    proj = projection or project_counterexample(params, grid)
    R = np.asarray(R_list if R_list is not None else DEFAULT_R_LADDER, dtype=float)
    x, mag = proj.x, proj.magnitude
    dx = x[1] - x[0]
    report = SweepReport(
        kind="lp",
        params=params,
        metadata={
            "R_ladder": R.tolist(),
            "log_scale": proj.log_scale,
            "lp_lower": params.lp_lower,
            "lp_upper": params.lp_upper,
        },
    )
    rho_measure = np.exp(x)
    for p in p_list:
        ladder = []
        for r in R:
            m = np.abs(x) <= np.log(r)
            ladder.append(float(np.sum(mag[m] ** p * rho_measure[m]) * dx))
        slope, r2, top_rel, verdict = _classify_ladder(R, np.asarray(ladder))
        pred_exp, pred_verdict = _predicted_growth(params, 0.0, p)
        report.results.append(
            LadderResult(
                parameter={"p": float(p)},
                ladder=R.tolist(),
                values=ladder,
                diff_exponent=slope,
                diff_r2=r2,
                top_rel_change=top_rel,
                verdict=verdict,
                predicted_verdict=pred_verdict,
                predicted_exponent=pred_exp,
            )
        )
    return report


def _gagliardo_ladder(
    proj: CounterexampleProjection,
    s: float,
    p: float,
    R: np.ndarray,
    upper: float = 16.0,
    stride: int = 16,
) -> list:
    """Truncated smoothness functional over rho in [1/R, upper], linear variable."""
    vals = []
    for r in R:
        rep = gagliardo_seminorm(
            np.exp(proj.x[::stride]),
            proj.values[::stride],
            s,
            p,
            window=(1.0 / r, upper),
            diagonal_rule="exclude",
        )
        vals.append(rep.value)
    return vals


def sobolev_sweep(
    params: WormParams,
    s_list,
    R_list=None,
    grid: Grid2D | None = None,
    projection: CounterexampleProjection | None = None,
) -> SweepReport:
    """Truncated Gagliardo ladder of the projected witness at p = 2."""
    proj = projection or project_counterexample(params, grid)
    R = np.asarray(R_list if R_list is not None else DEFAULT_R_LADDER, dtype=float)
    report = SweepReport(
        kind="sobolev",
        params=params,
        metadata={
            "R_ladder": R.tolist(),
            "log_scale": proj.log_scale,
            "threshold": params.sobolev_l2_sup,
        },
    )
    for s in s_list:
        ladder = _gagliardo_ladder(proj, float(s), 2.0, R)
        slope, r2, top_rel, verdict = _classify_ladder(R, np.asarray(ladder))
        pred_exp, pred_verdict = _predicted_growth(params, float(s), 2.0)
        report.results.append(
            LadderResult(
                parameter={"s": float(s)},
                ladder=R.tolist(),
                values=ladder,
                diff_exponent=slope,
                diff_r2=r2,
                top_rel_change=top_rel,
                verdict=verdict,
                predicted_verdict=pred_verdict,
                predicted_exponent=pred_exp,
            )
        )
    return report


def sobolev_lp_sweep(
    params: WormParams,
    pairs,
    R_list=None,
    grid: Grid2D | None = None,
    projection: CounterexampleProjection | None = None,
) -> SweepReport:
    """Truncated Gagliardo ladders over (s, p) pairs.

    The predicted two-sided window is -nu/2 < s + 1/2 - 1/p < nu/2.
    """
    proj = projection or project_counterexample(params, grid)
    R = np.asarray(R_list if R_list is not None else DEFAULT_R_LADDER, dtype=float)
    report = SweepReport(
        kind="sobolev_lp",
        params=params,
        metadata={"R_ladder": R.tolist(), "log_scale": proj.log_scale},
    )
    for s, p in pairs:
        ladder = _gagliardo_ladder(proj, float(s), float(p), R)
        slope, r2, top_rel, verdict = _classify_ladder(R, np.asarray(ladder))
        pred_exp, pred_verdict = _predicted_growth(params, float(s), float(p))
        window_value = float(s) + 0.5 - 1.0 / float(p)
        report.results.append(
            LadderResult(
                parameter={"s": float(s), "p": float(p), "s+1/2-1/p": window_value},
                ladder=R.tolist(),
                values=ladder,
                diff_exponent=slope,
                diff_r2=r2,
                top_rel_change=top_rel,
                verdict=verdict,
                predicted_verdict=pred_verdict,
                predicted_exponent=pred_exp,
            )
        )
    return report


# ---------------------------------------------------------------------------
# oracle comparison
# ---------------------------------------------------------------------------

@dataclass
class OracleComparison:
    params: WormParams
    window: tuple[float, float]
    shifted_max_rel_dev: float
    shifted_constant_ratio: float          # fitted / derived constant
    shifted_constant_phase: float
    plain_constant_max_rel_dev: float      # after a single magnitude-constant fit
    constant_only_agreement: bool
    pipeline_tail_slope: float
    oracle_tail_slope: float
    pipeline_origin_slope: float
    oracle_origin_slope: float

    def slope_agreement(self) -> float:
        return max(
            abs(self.pipeline_tail_slope - self.oracle_tail_slope),
            abs(self.pipeline_origin_slope - self.oracle_origin_slope),
        )


def pipeline_oracle_comparison(
    params: WormParams,
    grid: Grid2D | None = None,
    window: tuple[float, float] = (-5.0, 5.0),
    n_points: int = 41,
    slope_window: tuple[float, float] = (10.0, 20.0),
    constant_tol: float = 1e-3,
) -> OracleComparison:
    """Pipeline block (1,1) against the quadrature oracle, both flavors.

    * shifted oracle: pointwise comparison against the exact expected
      constant (sqrt(pi)/4) e^{-4 beta^2} (handled in log space);
    * reduced (unshifted) oracle: a single positive constant is fitted to
      the magnitudes; ``constant_only_agreement`` records whether that
      brings the pointwise relative deviation under ``constant_tol``
      (a quarter-shift modulation survives in the exact symbol, so this is
      expected to fail while the decay exponents still agree);
    * decay slopes of both are fitted on ``slope_window``.
    """
    proj = project_counterexample(params, grid)
    lo, hi = window
    ys = np.linspace(lo, hi, n_points)
    pipe = proj.at_log(ys)
    xs = np.exp(ys)

    # exact comparison: pipeline * e^{log_scale} = (sqrt(pi)/4) e^{-4 b^2} * oracle_shifted
    o_shift = p11_oracle(xs, params, shifted=True, refine_check=False).values
    log_expected_const = 0.5 * np.log(np.pi) - np.log(4.0) - 4.0 * params.beta ** 2
    expected = o_shift * np.exp(log_expected_const - proj.log_scale)
    shifted_dev = float(np.max(np.abs(pipe - expected) / np.abs(pipe)))
    c = np.vdot(o_shift, pipe) / np.vdot(o_shift, o_shift)
    ratio = float(np.abs(c) / np.exp(log_expected_const - proj.log_scale))
    phase = float(np.angle(c))

    # reduced oracle: fit one positive constant to the magnitudes
    o_plain = p11_oracle(xs, params, shifted=False, refine_check=False).values
    log_c = float(np.mean(np.log(np.abs(pipe)) - np.log(np.abs(o_plain))))
    plain_dev = float(
        np.max(np.abs(np.abs(pipe) - np.exp(log_c) * np.abs(o_plain)) / np.abs(pipe))
    )

    slo, shi = slope_window
    yy = np.linspace(slo, shi, 21)
    pipe_tail = fit_power_law(np.exp(yy), np.abs(proj.at_log(yy))).exponent
    pipe_origin = fit_power_law(np.exp(-yy), np.abs(proj.at_log(-yy))).exponent
    o_tail = fit_power_law(
        np.exp(yy), np.abs(p11_oracle(np.exp(yy), params, refine_check=False).values)
    ).exponent
    o_origin = fit_power_law(
        np.exp(-yy), np.abs(p11_oracle(np.exp(-yy), params, refine_check=False).values)
    ).exponent

    return OracleComparison(
        params=params,
        window=window,
        shifted_max_rel_dev=shifted_dev,
        shifted_constant_ratio=ratio,
        shifted_constant_phase=phase,
        plain_constant_max_rel_dev=plain_dev,
        constant_only_agreement=plain_dev < constant_tol,
        pipeline_tail_slope=pipe_tail,
        oracle_tail_slope=o_tail,
        pipeline_origin_slope=pipe_origin,
        oracle_origin_slope=o_origin,
    )


# ---------------------------------------------------------------------------
# closed-form kernel suite
# ---------------------------------------------------------------------------

@dataclass
class KernelCheck:
    name: str
    max_abs_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs_error < self.tolerance


@dataclass
class KernelReport:
    checks: list[KernelCheck] = field(default_factory=list)
    pv_raw_deviation: float = 0.0  # includes the first-order window mass

    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_kernels(
    params: WormParams,
    x_points: np.ndarray | None = None,
    xi_step: float = 1e-3,
    xi_span: float = 50.0,
) -> KernelReport:
    """Quadrature checks of the four closed-form transform pairs.

    Gaussian pair      F^{-1}[e^{-xi^2/4}](x)             = e^{-x^2}/sqrt(pi)
    sech pair          F^{-1}[sech(pi xi)](x)             = sech(x/2)/(2 pi)
    scaled sech pair   F^{-1}[sech((2b - pi) xi)](x)      = (nu/2 pi) sech(nu x/2)
    principal value    int_window e^{i xi t}/sinh(pi t/(2a)) dt -> 2|a| i tanh(a xi)

    The first three are trapezoid quadratures of (1/2 pi) int F e^{i x xi}
    d xi; the last sums the truncated odd kernel against e^{i xi t} with the
    (eps, R) = (1e-4, 50) window at a = pi.
    """
    if x_points is None:
        x_points = np.linspace(-10.0, 10.0, 21)
    xi = np.arange(-xi_span, xi_span + xi_step / 2.0, xi_step)
    report = KernelReport()

    def inv_quadrature(F_vals: np.ndarray) -> np.ndarray:
        kernel = np.exp(1j * np.outer(x_points, xi))
        return (kernel @ F_vals) * xi_step / (2.0 * np.pi)

    nu = params.nu
    two_b_pi = 2.0 * params.beta - np.pi
    pairs = [
        ("gaussian", np.exp(-(xi ** 2) / 4.0), np.exp(-(x_points ** 2)) / np.sqrt(np.pi), 1e-8),
        ("sech", 1.0 / np.cosh(np.pi * xi), 1.0 / (2.0 * np.pi * np.cosh(x_points / 2.0)), 1e-6),
        (
            "sech_scaled",
            1.0 / np.cosh(two_b_pi * xi),
            nu / (2.0 * np.pi * np.cosh(nu * x_points / 2.0)),
            1e-6,
        ),
    ]
    for name, F_vals, expected, tol in pairs:
        got = inv_quadrature(F_vals)
        err = float(np.max(np.abs(got - expected)))
        report.checks.append(KernelCheck(name, err, tol))

    # truncated principal value: window eps < |pi t/(2a)| < R, a = pi.
    # The window itself keeps the integral away from its limit by the mass
    # excluded near t = 0: the paired integrand tends to 2 xi there, so the
    # truncated value is 2|a| i tanh(a xi) - 8 i (a/pi)^2 xi eps + O(eps^3).
    # The convergence statement is checked at that sharp rate: the residual
    # after removing the first-order term must be below tolerance (the raw
    # deviation, reported alongside, is 8 (a/pi)^2 |xi| eps by itself).
    a = np.pi
    eps, big_r = 1e-4, 50.0
    dt = 2e-4
    t_lo = 2.0 * a * eps / np.pi
    t_hi = 2.0 * a * big_r / np.pi
    t = np.arange(t_lo, t_hi + dt / 2.0, dt)
    w = np.full(t.shape, dt)
    w[0] *= 0.5
    w[-1] *= 0.5
    kern = w / np.sinh(np.pi * t / (2.0 * a))
    xis = np.linspace(-5.0, 5.0, 41)
    truncated = 2j * np.sin(np.outer(xis, t)) @ kern
    limit = 2.0 * a * 1j * np.tanh(a * xis)
    deficit = 8j * (a / np.pi) ** 2 * xis * eps
    raw = float(np.max(np.abs(truncated - limit)))
    residual = float(np.max(np.abs(truncated - (limit - deficit))))
    check = KernelCheck("pv_tanh", residual, 1e-4)
    report.checks.append(check)
    report.pv_raw_deviation = raw
    return report


# ---------------------------------------------------------------------------
# isometry check
# ---------------------------------------------------------------------------

@dataclass
class IsometryCheck:
    p: float
    field_name: str
    rel_error: float


@dataclass
class IsometryReport:
    checks: list[IsometryCheck] = field(default_factory=list)

    def max_rel_error(self) -> float:
        return max(c.rel_error for c in self.checks)


def isometry_check(
    params: WormParams,
    p_list=(1.5, 2.0, 3.0),
    grid: Grid2D | None = None,
) -> IsometryReport:
    """Norm preservation of the boundary transplant on a panel of fields.

    The input norm is the straightened-boundary norm (Lebesgue dx dtheta),
    the output norm the worm-side norm (d rho d theta), both with the sheet
    weights.
    """
    from .geometry import lambda_isometry
    from .norms import lp_norm, lp_norm_line_boundary

    if grid is None:
        grid = Grid2D.make(-20.0, 20.0, 2 ** 12, 8)
    x = grid.log.x
    theta = grid.ang.theta
    panel = {
        "gaussian_sheet1": (0, np.exp(-(x ** 2))[:, None] * np.ones_like(theta)[None, :]),
        "shifted_gaussian_sheet3": (2, np.exp(-((x - 2.0) ** 2))[:, None] * np.ones_like(theta)[None, :]),
        "two_mode_sheet2": (
            1,
            np.exp(-(x ** 2))[:, None] * (1.0 + 0.5 * np.exp(2j * theta))[None, :],
        ),
    }
    report = IsometryReport()
    for name, (sheet_idx, data) in panel.items():
        f = BoundaryField.zeros(grid)
        f.data[sheet_idx] = data
        for p in p_list:
            before = lp_norm_line_boundary(f, p, params).value
            after = lp_norm(lambda_isometry(f, p, params), p, params).value
            report.checks.append(
                IsometryCheck(p=float(p), field_name=name, rel_error=abs(after - before) / before)
            )
    return report
