"""Command-line front end: ``hoquant analyze|reduce|spectrum|flow|verify``.

Exit codes: 0 success (warnings allowed), 1 usage or configuration error,
2 domain or numerical error, including a report whose ``errors`` list is
non-empty (an uncertified reduction).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence

from . import fock
from .critical import Kind, hocond_verdict, morse_quadratic_part
from .crosscheck import shift_comparison, zero_mode_comparison
from .dsl import Domain, Potential, to_text
from .errors import BlowUp, ExprSyntaxError, HoquantError, NoRealSolution, UnboundName
from .flow import PhaseState, hamiltonian_field, integrate, linearize
from .grid import GridSpec
from .potentials import NAMES, claims, resolve
from .reduction import (
    PG_MODEL_WARNING,
    PGParams,
    THOParams,
    bound_state_energies,
    get_plan,
    inverse_square_constant,
    pg_quadratic_model,
    predict_spectrum,
    reduction_check,
    sample_coefficients,
)
from .report import Report, rows_to_csv
from .spectral import discretize, eigenvalue_rows, richardson_refine

CERTIFY_TOLERANCE = 1e-9
HALF_LINE_CAVEAT = (
    "Dirichlet finite differences on a half-line select one self-adjoint realisation "
    "of singular inverse-square terms"
)

DEFAULTS = {
    "analyze": {"grid": 4001},
    "reduce": {"plan": "example1", "domain": "0.3,5", "grid": 200},
    "spectrum": {"method": "fd", "grid": 2400, "dim": 5, "n": 5, "kinetic": 1.0},
    "flow": {"state": "1,0", "step": 1e-3, "horizon": 100.0, "record_every": 1},
    "verify": {"plan": "example1", "domain": "0.3,5", "grid": 200, "n": 3},
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help=f"built-in ({', '.join(NAMES)}), inline expression, or @file")
    common.add_argument("--params", nargs="*", metavar="K=V", help="parameter bindings")
    common.add_argument("--domain", help="interval a,b (inf allowed)")
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-stable output")
    common.add_argument("--config", help="key=value file; flags override it")

    p = Parser(prog="hoquant", description="Harmonic-oscillator reductions of 1-D Hamiltonians.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)
    sub.add_parser("analyze", parents=[common], help="critical points and the integrability verdict")

    r = sub.add_parser("reduce", parents=[common], help="conjugate the THO by a plan and certify it")
    r.add_argument("--plan", help="built-in plan (example1, example2, identity) or JSON plan file")

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalues from fd, fock or predicted")
    s.add_argument("--method", choices=["fd", "fock", "predicted"])
    s.add_argument("--compare", choices=["fd", "fock", "predicted"])
    s.add_argument("--plan")
    s.add_argument("--dim", type=int, help="Fock truncation dimension")
    s.add_argument("--n", type=int, help="number of levels")
    s.add_argument("--kinetic", type=float, help="k in -k d^2/dq^2 (0.5 for the -1/2 convention)")
    s.add_argument("--richardson", action="store_true", help="extrapolate fd levels from h and h/2")

    f = sub.add_parser("flow", parents=[common], help="leapfrog trajectory of H = p^2 + V")
    f.add_argument("--state", help="initial q,p")
    f.add_argument("--step", type=float, help="time step h > 0")
    f.add_argument("--horizon", type=float, help="final time T > 0")
    f.add_argument("--record-every", type=int, dest="record_every")
    f.add_argument("--trajectory", help="also write the trajectory CSV here")

    v = sub.add_parser("verify", parents=[common], help="reduce plus spectral cross-checks")
    v.add_argument("--plan")
    v.add_argument("--n", type=int)
    return p


def read_config(path: str) -> dict[str, str]:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file {path} does not exist")
    out = {}
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def resolve_options(ns: argparse.Namespace) -> dict:
    opts = {k: v for k, v in vars(ns).items() if v is not None}
    cfg = read_config(ns.config) if ns.config else {}
    merged = dict(DEFAULTS.get(ns.command, {}))
    for k, v in cfg.items():
        if k == "params":
            merged[k] = v.split()
        elif k == "no_timestamp":
            merged[k] = v.lower() in ("1", "true", "yes")
        else:
            merged[k] = v
    for k, v in opts.items():
        if k == "no_timestamp" and not v:
            continue
        merged[k] = v
    for key, typ in (("grid", int), ("dim", int), ("n", int), ("record_every", int),
                     ("kinetic", float), ("step", float), ("horizon", float)):
        if key in merged:
            try:
                merged[key] = typ(merged[key])
            except (TypeError, ValueError):
                raise UsageError(f"{key} must be {typ.__name__}, got {merged[key]!r}")
    merged.setdefault("format", "json")
    if merged["format"] not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {merged['format']!r}")
    return merged


def parse_params(items: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"parameter binding {item!r} is not k=v")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"parameter {k!r} needs a number, got {v!r}")
    return out


def parse_domain(text: str) -> Domain:
    try:
        return Domain.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad domain {text!r}: {exc}")


def load_potential(opts: dict, required: bool = True) -> Potential | None:
    src = opts.get("potential")
    if src is None:
        if required:
            raise UsageError("--potential is required")
        return None
    if src.startswith("@") and not Path(src[1:]).exists():
        raise UsageError(f"potential file {src[1:]} does not exist")
    domain = parse_domain(opts["domain"]) if "domain" in opts and opts.get("command") != "reduce" else None
    return resolve(src, parse_params(opts.get("params")), domain)


def load_plan(opts: dict):
    try:
        return get_plan(opts["plan"])
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))


def interval(text: str) -> tuple[float, float]:
    d = parse_domain(text)
    if math.isinf(d.lower) or math.isinf(d.upper):
        raise UsageError("the check interval must be finite")
    return d.lower, d.upper


def _inputs(opts: dict) -> dict:
    skip = {"config", "out", "no_timestamp", "command", "trajectory"}
    return {k: v for k, v in sorted(opts.items()) if k not in skip}


def cmd_analyze(opts: dict) -> Report:
    V = load_potential(opts)
    rep = Report("analyze", _inputs(opts), timestamp=not opts.get("no_timestamp"))
    lo, hi = V.domain.finite_window()
    grid = GridSpec(lo, hi, opts["grid"])
    verdict = hocond_verdict(V, probe_grid=grid)
    points = []
    for cp in verdict.critical_points:
        row = cp.to_json()
        if cp.kind is not Kind.DEGENERATE:
            row["morse_model"] = to_text(morse_quadratic_part(cp))
            row["linearization"] = linearize(V, PhaseState(cp.q0, 0.0), tol=1e-6, hess_scale=cp.hess_scale).to_json()
        else:
            rep.warnings.append(f"degenerate critical point at q0={cp.q0!r}: V is not Morse there")
        points.append(row)
    rep.results = {
        "potential": V.describe(),
        "critical_points": points,
        "integrability": verdict.to_json(),
    }
    if verdict.proper.verdict.value == "false":
        rep.warnings.append(f"proper=false: {verdict.proper.note}")
    if verdict.bounded_below.verdict.value == "false":
        rep.warnings.append(f"bounded_below=false: {verdict.bounded_below.note}")
    name = opts.get("potential", "")
    measured = {"proper": verdict.proper.verdict.value, "bounded_below": verdict.bounded_below.verdict.value,
                "ho_integrable": verdict.ho_integrable.value}
    for key, claimed in sorted(claims(name).items()):
        if measured.get(key) != claimed:
            rep.warnings.append(
                f"discrepancy: the published claim {key}={claimed} for {name} disagrees with the probes ({measured[key]})"
            )
    if name == "pseudo-gaussian":
        p = parse_params(opts.get("params"))
        pg = PGParams(str(p.get("lambda", 1)), str(p.get("mu", 1)), int(p.get("s", 2)))
        rep.results["quadratic_model"] = {"expr": to_text(pg_quadratic_model(pg)), "note": PG_MODEL_WARNING}
    return rep


def cmd_reduce(opts: dict) -> Report:
    plan = load_plan(opts)
    rep = Report("reduce", _inputs(opts), timestamp=not opts.get("no_timestamp"))
    if "potential" not in opts and not plan.target:
        raise UsageError(f"plan {plan.name or opts['plan']} has no built-in target; pass --potential")
    target = resolve(opts.get("potential", plan.target), parse_params(opts.get("params")))
    a, b = interval(opts["domain"])
    grid = GridSpec.closed(a, b, opts["grid"])
    tho = THOParams.from_params({**target.params, **parse_params(opts.get("params"))})
    result = reduction_check(plan, target, grid, tho)
    op = result.operator
    certified = result.residual < CERTIFY_TOLERANCE
    rep.results = {
        "plan": plan.to_json(),
        "target": target.describe(),
        "tho": tho.as_params(),
        "coefficients": {k: to_text(e) for k, e in op.coefficients().items()},
        "inverse_square_constant": inverse_square_constant(plan),
        "induced_potential": to_text(plan.induced_potential),
        "energy_shift": {"expr": to_text(plan.shift), "value": result.shift_value,
                         "convention": f"c0 = V + {to_text(plan.shift)}; energies of V are shifted by -({to_text(plan.shift)})"},
        "residual": result.residual,
        "residual_parts": result.parts,
        "certified": certified,
    }
    if not certified:
        rep.errors.append(f"residual {result.residual:.3e} exceeds {CERTIFY_TOLERANCE:g}; plan not certified")
    if opts["format"] == "csv":
        cols = sample_coefficients(op, grid.nodes, {**target.params, **tho.as_params()})
        rep.results["samples"] = [
            {"q": float(q), "c2": float(cols["c2"][i]), "c1": float(cols["c1"][i]), "c0": float(cols["c0"][i])}
            for i, q in enumerate(grid.nodes)
        ]
    return rep


def _fd_grid(V: Potential, opts: dict) -> GridSpec:
    d = V.domain
    if math.isinf(d.lower) and math.isinf(d.upper):
        return GridSpec(-12.0, 12.0, opts["grid"])
    if math.isinf(d.upper):
        return GridSpec(d.lower, d.lower + 8.0, opts["grid"])
    if math.isinf(d.lower):
        return GridSpec(d.upper - 8.0, d.upper, opts["grid"])
    return GridSpec(d.lower, d.upper, opts["grid"])


def _levels(method: str, opts: dict, rep: Report) -> list[dict]:
    k = opts["n"]
    if method == "fock":
        dim = opts["dim"]
        report = fock.commutator_check(dim)
        rep.warnings.append(
            f"truncation: [lower, raise] equals 1 on indices 0..{dim - 2} and {report.diagonal[-1]} at index {dim - 1}"
        )
        return [{"index": i, "value": v} for i, v in enumerate(fock.spectrum(dim))]
    if method == "fd":
        V = load_potential(opts)
        g = _fd_grid(V, opts)
        if not (math.isinf(V.domain.lower) and math.isinf(V.domain.upper)):
            rep.warnings.append(HALF_LINE_CAVEAT)
        t = discretize(V, g, opts["kinetic"])
        rows = eigenvalue_rows(t, k)
        if opts.get("richardson"):
            refined = richardson_refine(V, g, k, opts["kinetic"])
            for row, value in zip(rows, refined):
                row["raw"] = row["value"]
                row["value"] = value
        rep.results["grid"] = {"a": g.a, "b": g.b, "n": g.n, "h": g.h}
        return rows
    if method == "predicted":
        plan = load_plan({"plan": opts.get("plan", "example1")})
        tho = THOParams.from_params({"omega": 1.0, "rho": 0.0, "lambda": 1.0, **parse_params(opts.get("params"))})
        preds = predict_spectrum(plan, tho, k - 1)
        energies = bound_state_energies(preds)
        rep.warnings.append("predicted levels use the full-line THO spectrum and are provisional")
        rep.results["relations"] = [p.to_json() for p in preds]
        return [{"index": p.n, "value": e} for p, e in zip(preds, energies)]
    raise UsageError(f"unknown method {method!r}")


def cmd_spectrum(opts: dict) -> Report:
    rep = Report("spectrum", _inputs(opts), timestamp=not opts.get("no_timestamp"))
    rows = _levels(opts["method"], opts, rep)
    rep.results["method"] = opts["method"]
    rep.results["eigenvalues"] = rows
    other = opts.get("compare")
    if other:
        cmp_rows = _levels(other, opts, rep)
        table = []
        for a, b in zip(rows, cmp_rows):
            dev = abs(float(a["value"]) - float(b["value"]))
            table.append({"index": a["index"], opts["method"]: a["value"], other: b["value"], "deviation": dev})
        rep.results["comparison"] = {"with": other, "table": table,
                                     "max_deviation": max((r["deviation"] for r in table), default=0.0)}
    return rep


def _pair(text: str, what: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in str(text).split(","))
    except ValueError:
        raise UsageError(f"{what} must be two numbers a,b; got {text!r}")
    return a, b


def cmd_flow(opts: dict) -> tuple[Report, str]:
    V = load_potential(opts)
    h, T = opts["step"], opts["horizon"]
    if not h > 0:
        raise UsageError(f"step must be positive, got {h}")
    if not T > 0:
        raise UsageError(f"horizon must be positive, got {T}")
    if opts["record_every"] < 1:
        raise UsageError("record-every must be >= 1")
    q0, p0 = _pair(opts["state"], "state")
    rep = Report("flow", _inputs(opts), timestamp=not opts.get("no_timestamp"))
    try:
        traj = integrate(hamiltonian_field(V), PhaseState(q0, p0), h, T, record_every=opts["record_every"])
        rep.results = {
            "blow_up": None,
            "final": {"t": traj.times[-1], "q": traj.final.q, "p": traj.final.p},
            "max_energy_drift": traj.max_energy_drift,
            "samples": len(traj.times),
            "method": traj.method,
        }
    except BlowUp as exc:
        traj = exc.trajectory
        rep.results = {
            "blow_up": {"t_star": exc.t_star, "reason": exc.reason, "q": exc.state.q, "p": exc.state.p},
            "max_energy_drift": traj.max_energy_drift,
            "samples": len(traj.times),
            "method": traj.method,
        }
        rep.warnings.append(f"trajectory escaped at t*={exc.t_star:.6g}: {exc.reason}")
    return rep, traj.to_csv()


def cmd_verify(opts: dict) -> Report:
    rep = cmd_reduce(opts)
    rep.command = "verify"
    plan = load_plan(opts)
    target = resolve(opts.get("potential", plan.target), parse_params(opts.get("params")))
    tho = THOParams.from_params({**target.params, **parse_params(opts.get("params"))})
    k = opts["n"]
    if not target.domain.lower == 0 or not math.isinf(target.domain.upper):
        rep.warnings.append("spectral cross-checks need a half-line target; skipped")
        return rep
    rep.warnings.append(HALF_LINE_CAVEAT)
    try:
        zm = zero_mode_comparison(plan, target, tho, k)
        rep.results["zero_mode"] = zm.to_json()
        rep.results["zero_mode_max_relative_error"] = max(zm.relative_errors)
    except (NoRealSolution, ValueError) as exc:
        rep.warnings.append(f"zero-mode comparison skipped: {exc}")
    sc = shift_comparison(plan, target, tho, k)
    rep.results["shift_law"] = sc.to_json()
    if max(sc.relative_errors) > 1e-2:
        rep.warnings.append(
            "the z-side and q-side levels on matched grids do not differ by the energy shift; "
            "the zero-mode rows carry the relation the conjugation actually implies"
        )
    return rep


def emit(text: str, opts: dict):
    if opts.get("out"):
        Path(opts["out"]).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        opts = resolve_options(ns)
        opts["command"] = ns.command
        if ns.command == "flow":
            rep, csv_text = cmd_flow(opts)
            if opts.get("trajectory"):
                Path(opts["trajectory"]).write_text(csv_text)
            emit(csv_text if opts["format"] == "csv" else rep.to_json(), opts)
            return 2 if rep.errors else 0
        rep = {"analyze": cmd_analyze, "reduce": cmd_reduce, "spectrum": cmd_spectrum, "verify": cmd_verify}[
            ns.command
        ](opts)
    except (UsageError, ExprSyntaxError, UnboundName) as exc:
        print(f"hoquant: error: {exc}", file=sys.stderr)
        return 1
    except (HoquantError, ArithmeticError) as exc:
        print(f"hoquant: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if opts["format"] == "csv":
        rows = rep.results.get("eigenvalues") or rep.results.get("samples") or rep.results.get("critical_points") or []
        emit(rows_to_csv(rows), opts)
    else:
        emit(rep.to_json(), opts)
    # exit 0 iff the report carries no errors
    return 2 if rep.errors else 0


def main(argv: Sequence[str] | None = None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
