"""Command-line driver: experiment configuration and machine-readable reports.

Reports are JSON objects with a ``schema: 1`` field and a top-level
``verdicts`` array; exit code 0 iff every verdict passes, 1 when a verdict
fails (the failures are in the report), 2 on usage errors, 3 on numeric
failure.  Reports avoid wall-clock data so identical configurations produce
identical bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import experiments
from .geometry import make_params
from .szego import apply_szego
from .transforms import Grid2D
from . import fieldio

__all__ = ["main", "build_parser"]

SCHEMA = 1


def _jsonify(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _parse_number(token: str) -> float:
    token = token.strip()
    if "/" in token:
        num, den = token.split("/")
        return float(num) / float(den)
    return float(token)


def _parse_list(text: str) -> list[float]:
    return [_parse_number(tok) for tok in text.split(",") if tok.strip()]


def _parse_pairs(text: str) -> list[tuple[float, float]]:
    pairs = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        s_str, p_str = tok.split(":")
        pairs.append((_parse_number(s_str), _parse_number(p_str)))
    return pairs


def _parse_grid(text: str | None) -> Grid2D | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("grid must be x_min,x_max,n,M")
    return Grid2D.make(float(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]))


def _verdict(name: str, passed: bool, measured=None, expected=None, tolerance=None) -> dict:
    out = {"name": name, "status": "pass" if passed else "fail"}
    if measured is not None:
        out["measured"] = _jsonify(measured)
    if expected is not None:
        out["expected"] = _jsonify(expected)
    if tolerance is not None:
        out["tolerance"] = _jsonify(tolerance)
    return out


def _grid_meta(grid: Grid2D | None) -> dict:
    g = grid or experiments.experiment_grid()
    return {"x_min": g.log.x_min, "x_max": g.log.x_max, "n": g.log.n, "M": g.ang.m_count}


def _emit(report: dict, output: str | None) -> None:
    text = json.dumps(_jsonify(report), sort_keys=True, indent=1)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _base_report(command: str, args, params) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "config": {"beta": params.beta, "grid": args.grid},
        "grid": _grid_meta(_parse_grid(args.grid)),
        "predictions": {
            "nu": params.nu,
            "lp_interval": [params.lp_lower, params.lp_upper],
            "sobolev_l2_sup": params.sobolev_l2_sup,
        },
        "g_rescale_log": -4.0 * params.beta ** 2,
        "verdicts": [],
    }


def cmd_project(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    field, beta_file = fieldio.load_field(args.input)
    if abs(beta_file - args.beta) > 1e-12:
        raise ValueError(f"field file was written for beta={beta_file}, got --beta {args.beta}")
    out = apply_szego(field, params)
    fieldio.save_field(args.output_field, out, args.beta)
    report = _base_report("project", args, params)
    report["results"] = {"input": args.input, "output_field": args.output_field}
    return report, 0


def cmd_decay(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    grid = _parse_grid(args.grid)
    rep = experiments.decay_experiment(params, grid, with_oracle=True)
    comp = experiments.pipeline_oracle_comparison(params, grid)
    report = _base_report("decay", args, params)
    report["results"] = {"decay": rep, "oracle_comparison": comp}
    tol = args.slope_tol
    report["verdicts"] = [
        _verdict("tail_slope", abs(rep.tail_slope - rep.expected_tail) < tol,
                 rep.tail_slope, rep.expected_tail, tol),
        _verdict("origin_slope", abs(rep.origin_slope - rep.expected_origin) < tol,
                 rep.origin_slope, rep.expected_origin, tol),
        _verdict("oracle_slope_agreement", comp.slope_agreement() < tol,
                 comp.slope_agreement(), 0.0, tol),
        _verdict("shifted_oracle_pointwise", comp.shifted_max_rel_dev < args.oracle_tol,
                 comp.shifted_max_rel_dev, 0.0, args.oracle_tol),
    ]
    code = 0 if all(v["status"] == "pass" for v in report["verdicts"]) else 1
    return report, code


def _sweep_report(command: str, args, params, sweep) -> tuple[dict, int]:
    report = _base_report(command, args, params)
    report["results"] = {"sweep": sweep}
    for r in sweep.results:
        label = ",".join(f"{k}={v:.6g}" for k, v in r.parameter.items())
        report["verdicts"].append(
            _verdict(
                f"verdict[{label}] matches prediction",
                r.verdict == r.predicted_verdict,
                r.verdict,
                r.predicted_verdict,
            )
        )
        if r.predicted_exponent is not None and r.predicted_exponent > 0:
            report["verdicts"].append(
                _verdict(
                    f"growth_exponent[{label}]",
                    abs(r.diff_exponent - r.predicted_exponent) < args.exponent_tol,
                    r.diff_exponent,
                    r.predicted_exponent,
                    args.exponent_tol,
                )
            )
    code = 0 if all(v["status"] == "pass" for v in report["verdicts"]) else 1
    return report, code


def cmd_sweep_lp(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    R = _parse_list(args.R) if args.R else None
    sweep = experiments.lp_sweep(params, _parse_list(args.p), R, _parse_grid(args.grid))
    return _sweep_report("sweep-lp", args, params, sweep)


def cmd_sweep_sobolev(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    R = _parse_list(args.R) if args.R else None
    sweep = experiments.sobolev_sweep(params, _parse_list(args.s), R, _parse_grid(args.grid))
    return _sweep_report("sweep-sobolev", args, params, sweep)


def cmd_sweep_sobolev_lp(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    R = _parse_list(args.R) if args.R else None
    sweep = experiments.sobolev_lp_sweep(params, _parse_pairs(args.pairs), R, _parse_grid(args.grid))
    return _sweep_report("sweep-sobolev-lp", args, params, sweep)


def cmd_verify_kernels(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    rep = experiments.verify_kernels(params)
    report = _base_report("verify-kernels", args, params)
    report["results"] = {"kernels": rep}
    for c in rep.checks:
        report["verdicts"].append(_verdict(c.name, c.passed, c.max_abs_error, 0.0, c.tolerance))
    return report, 0 if rep.all_passed() else 1


def cmd_isometry(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    rep = experiments.isometry_check(params, _parse_list(args.p))
    report = _base_report("isometry", args, params)
    report["results"] = {"isometry": rep}
    for c in rep.checks:
        report["verdicts"].append(
            _verdict(f"p={c.p} {c.field_name}", c.rel_error < args.tol, c.rel_error, 0.0, args.tol)
        )
    return report, 0 if all(v["status"] == "pass" for v in report["verdicts"]) else 1


def _selftest_checks(params) -> list[tuple[str, float, float]]:
    """(name, measured, tolerance) triples over a reduced grid; fast."""
    from . import multipliers, norms, szego, transforms
    from .geometry import lambda_isometry, lambda_isometry_inverse
    from .transforms import BoundaryField, cayley, cayley_inverse, mf_forward, mf_inverse

    rng = np.random.default_rng(20260809)
    grid = Grid2D.make(-30.0, 30.0, 2 ** 12, 8)
    x = grid.log.x
    checks: list[tuple[str, float, float]] = []

    # transform round-trip and Plancherel
    f = (np.exp(-((x - 1.0) ** 2))[:, None]
         * (1.0 + 0.3 * np.exp(1j * grid.ang.theta))[None, :])
    spec = mf_forward(f, grid)
    back = mf_inverse(spec)
    checks.append(("roundtrip", float(np.max(np.abs(back - f)) / np.max(np.abs(f))), 1e-12))
    dtheta = 2.0 * np.pi / grid.ang.m_count
    left = np.sum(np.abs(f) ** 2) * grid.log.dx * dtheta
    right = np.sum(np.abs(spec.data) ** 2) * grid.log.dxi / (2.0 * np.pi) ** 2
    checks.append(("plancherel", abs(left - right) / left, 1e-10))

    # substitution isometry
    phi = np.exp(-x ** 2) * np.exp(-x / 2.0)
    for p in (1.5, 2.0, 3.0):
        g = cayley(p, phi, grid.log)
        lhs = np.sum(np.abs(g) ** p) * grid.log.dx
        rhs = np.sum(np.abs(phi) ** p * np.exp(x)) * grid.log.dx
        checks.append((f"cayley_isometry_p{p}", abs(lhs - rhs) / rhs, 1e-12))

    # symbol factorization: full block = mu-factor times eta-factor
    xi = np.linspace(-40.0, 40.0, 2001)
    two_b_pi = 2.0 * params.beta - np.pi
    worst = 0.0
    for k in (1, 2, 3, 4):
        for l in (1, 2, 3, 4):
            me = multipliers.mu_eta(k, l, params)
            full = multipliers.block_symbol(k, l, params, xi, 2.0)
            mu_part = np.exp(me.mu * xi - multipliers._log_cosh(np.pi * xi) - np.log(2.0))
            u = xi - 1.0
            eta_part = np.exp(
                me.eta * u - multipliers._log_cosh(two_b_pi * (u - 0.25)) - np.log(2.0)
            )
            err = np.max(np.abs(full - mu_part * eta_part) / np.maximum(full, 1e-280))
            worst = max(worst, float(err))
    checks.append(("block_factorization", worst, 1e-12))

    # projection structure on random band-limited fields
    field = BoundaryField.zeros(grid)
    field.data[:] = (
        rng.standard_normal((4, grid.log.n, grid.ang.m_count))
        + 1j * rng.standard_normal((4, grid.log.n, grid.ang.m_count))
    )
    envelope = np.exp(-((x / 6.0) ** 2))[:, None]
    smooth = np.fft.ifft(np.fft.fft(field.data, axis=1)
                         * np.exp(-(grid.log.xi ** 2))[None, :, None], axis=1)
    field.data = smooth * envelope
    pf = apply_szego(field, params)
    ppf = apply_szego(pf, params)
    num = szego.weighted_l2(BoundaryField(grid, ppf.data - pf.data), params)
    den = szego.weighted_l2(pf, params)
    checks.append(("idempotence", num / den, 1e-10))
    h = BoundaryField(grid, field.data[:, ::-1, :].copy())
    lhs_sa = szego.weighted_inner(pf, h, params)
    rhs_sa = szego.weighted_inner(field, apply_szego(h, params), params)
    scale = szego.weighted_l2(field, params) * szego.weighted_l2(h, params)
    checks.append(("self_adjointness", abs(lhs_sa - rhs_sa) / scale, 1e-10))

    # multiplier algebra
    tab_a = multipliers.block_symbol_table(1, 2, params, grid, "projection")
    tab_b = multipliers.block_symbol_table(2, 3, params, grid, "projection")
    seq, comb = szego.compose_multipliers(tab_a, tab_b, field.sheet(2), grid)
    checks.append(
        ("compose_multipliers", float(np.max(np.abs(seq - comb)) / np.max(np.abs(comb))), 1e-9)
    )

    # model operator routes
    u = np.exp(-((x - 1.0) ** 2))
    r1 = szego.p_a(np.pi, u, grid.log, route="multiplier")
    r2 = szego.p_a(np.pi, u, grid.log, route="decomposition")
    checks.append(("p_a_routes", float(np.max(np.abs(r1 - r2)) / np.max(np.abs(r1))), 1e-8))
    u2 = np.exp(-((x - 1.0) ** 2))[:, None] * np.exp(1j * 2 * grid.ang.theta)[None, :]
    q1 = szego.q_a(two_b_pi, u2, grid, route="multiplier")
    q2 = szego.q_a(two_b_pi, u2, grid, route="modeshift")
    checks.append(("q_a_routes", float(np.max(np.abs(q1 - q2)) / np.max(np.abs(q1))), 1e-7))

    # transplant isometry round trip
    fb = BoundaryField.zeros(grid)
    fb.data[0] = np.exp(-x ** 2)[:, None]
    lam = lambda_isometry(fb, 2.0, params)
    back2 = lambda_isometry_inverse(lam, 2.0, params)
    checks.append(
        ("transplant_roundtrip",
         float(np.max(np.abs(back2.data - fb.data)) / np.max(np.abs(fb.data))), 1e-12)
    )
    rep = experiments.isometry_check(params)
    checks.append(("transplant_isometry", rep.max_rel_error(), 1e-8))

    # closed-form kernels
    krep = experiments.verify_kernels(params)
    for c in krep.checks:
        checks.append((f"kernel_{c.name}", c.max_abs_error, c.tolerance))

    # contour-shift invariance
    span = max(168.0, 56.0 / params.nu)
    n_strip = 1 << int(np.ceil(np.log2(span / 0.02)))
    sgrid = Grid2D.make(-span / 2.0, span / 2.0, n_strip, 2)
    phi_line = np.exp(-sgrid.log.x ** 2)
    for c in (0.5 + params.nu / 4.0, 0.5 - params.nu / 4.0):
        d = multipliers.strip_shift_check(1, 1, phi_line, sgrid, params, c)
        checks.append((f"strip_shift_c={c:.4f}", d, 1e-6))

    return checks


def cmd_selftest(args) -> tuple[dict, int]:
    params = make_params(args.beta)
    report = _base_report("selftest", args, params)
    checks = _selftest_checks(params)
    results = {}
    for name, measured, tol in checks:
        results[name] = {"measured": measured, "tolerance": tol}
        report["verdicts"].append(_verdict(name, measured < tol, measured, 0.0, tol))
    report["results"] = results
    return report, 0 if all(v["status"] == "pass" for v in report["verdicts"]) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wormszego",
        description="Boundary projection pipeline and sharp-threshold experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--beta", type=_parse_number, default=2.0 * np.pi,
                       help="domain parameter beta > pi (default 2 pi)")
        p.add_argument("--grid", type=str, default=None, help="x_min,x_max,n,M")
        p.add_argument("--output", type=str, default=None, help="report path (default stdout)")

    p = sub.add_parser("project", help="apply the boundary projection to a field file")
    p.add_argument("--beta", type=_parse_number, default=2.0 * np.pi)
    p.add_argument("--grid", type=str, default=None)
    p.add_argument("--input", required=True, help="input field file (with .grid.json sidecar)")
    p.add_argument("--output", dest="output_field", required=True, help="output field file")
    p.add_argument("--report", dest="output", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("decay", help="far-field decay slopes plus oracle comparison")
    common(p)
    p.add_argument("--slope-tol", type=float, default=0.02)
    p.add_argument("--oracle-tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("sweep-lp", help="truncated L^p growth verdicts")
    common(p)
    p.add_argument("--p", type=str, default="1.2,2,4")
    p.add_argument("--R", type=str, default=None)
    p.add_argument("--exponent-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_sweep_lp)

    p = sub.add_parser("sweep-sobolev", help="truncated smoothness growth verdicts (p = 2)")
    common(p)
    p.add_argument("--s", type=str, default="0.05,0.1,1/6,0.25")
    p.add_argument("--R", type=str, default=None)
    p.add_argument("--exponent-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_sweep_sobolev)

    p = sub.add_parser("sweep-sobolev-lp", help="(s, p) window verdicts")
    common(p)
    p.add_argument("--pairs", type=str, default="0.1:2,0.1:4,0.05:1.5")
    p.add_argument("--R", type=str, default=None)
    p.add_argument("--exponent-tol", type=float, default=0.05)
    p.set_defaults(func=cmd_sweep_sobolev_lp)

    p = sub.add_parser("verify-kernels", help="closed-form transform pair suite")
    common(p)
    p.set_defaults(func=cmd_verify_kernels)

    p = sub.add_parser("isometry", help="boundary transplant norm preservation")
    common(p)
    p.add_argument("--p", type=str, default="1.5,2,3")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_isometry)

    p = sub.add_parser("selftest", help="full invariant suite on a reduced grid")
    common(p)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (ValueError, OSError) as exc:
        failure = {
            "schema": SCHEMA,
            "command": args.command,
            "error": str(exc),
            "verdicts": [{"name": "numeric_failure", "status": "fail", "detail": str(exc)}],
        }
        _emit(failure, getattr(args, "output", None))
        return 3
    _emit(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
