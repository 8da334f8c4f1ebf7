"""Command-line front end.

Exit codes: 0 pass, 1 residual failure, 2 inadmissible input, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curvature import curvature_closed, weyl_traces
from .einstein import (
    FD_TOL,
    SamplePlan,
    classify,
    gauge_defects,
    seeded_gauge,
)
from .jets import ChartPoint, GaugeMap, InvalidPotential, PotentialSpec, evaluate_jet
from .solver import (
    GridField,
    InadmissibleProfile,
    NewtonConfig,
    NonConvergence,
    radial_exact,
    solve_liouville_k1,
    solve_radial,
    sphere_k1,
    sphere_shift,
    verify_solution,
)
from .structure import (
    BASIS_CONVENTION,
    DEFAULT_PROBE_SEED,
    HessianNotPositiveDefinite,
    axiom_residuals,
    basis_labels,
    build_structure,
    default_probes,
    frame_residuals,
    killing_residual,
    nijenhuis_residual,
)

EXIT_OK, EXIT_RESIDUAL, EXIT_INADMISSIBLE, EXIT_NONCONVERGENCE = 0, 1, 2, 3

# analytic-jet tolerance tier for the verify command
VERIFY_TOLS = {
    "axiom1": 1e-10,
    "axiom2": 1e-10,
    "axiom3": 1e-10,
    "axiom4": 1e-10,
    "axiom5": 1e-8,
    "axiom6": 1e-10,
    "deta": 1e-10,
    "frobenius": 1e-8,
    "killing": 1e-12,
}
GAUGE_TOL = 1e-12
SOLVE_VERIFY_TOL = 1e-3


@dataclass
class RunConfig:
    command: str
    potential: str | None = None
    k: int = 1
    q: int = 1
    n: int = 1
    c: float = 1.0
    points: int = 50
    radius: float = 1.0
    seed: int = 0
    out: str | None = None
    format: str = "json"
    grid: int = 64
    boundary: str = "sphere"
    k0: float = 0.0
    max_iters: int = 50
    tol: float = 1e-10
    u0: float | None = None
    s_max: float = 3.0
    nodes: int = 4001
    gauge: str | None = None
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# potential registry
# ---------------------------------------------------------------------------


def resolve_potential(cfg: RunConfig) -> PotentialSpec:
    """Builtin name, inline JSON, or a path to a JSON file."""
    ref = cfg.potential
    if ref is None:
        raise InvalidPotential("--potential is required")
    ref = ref.strip()
    if ref.startswith("{"):
        return PotentialSpec.from_dict(json.loads(ref))
    if ref == "sphere":
        return PotentialSpec.sphere(cfg.k)
    if ref == "product":
        return PotentialSpec.product(cfg.q, cfg.n)
    if ref == "quadratic":
        return PotentialSpec.quadratic(cfg.k)
    path = Path(ref)
    if path.is_file():
        return PotentialSpec.from_dict(json.loads(path.read_text(encoding="utf-8")))
    raise InvalidPotential(f"unknown potential {ref!r} (builtin name, inline JSON or file path)")


def _point_dict(p: ChartPoint) -> dict:
    return {"x": p.x, "z": [[complex(v).real, complex(v).imag] for v in p.z]}


def _cplx(a) -> list:
    a = np.asarray(a)
    return [np.real(a).tolist(), np.imag(a).tolist()]


def _header(cfg: RunConfig, spec: PotentialSpec | None, tier: str) -> dict:
    out = {"command": cfg.command, "basis_convention": BASIS_CONVENTION, "tolerance_tier": tier, "seed": cfg.seed}
    if spec is not None:
        out["potential"] = spec.to_dict()
        out["k"] = spec.k
    return out


def _emit(cfg: RunConfig, report: dict, stream) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        stream.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, stream=sys.stdout) -> int:
    spec = resolve_potential(cfg)
    plan = SamplePlan(cfg.points, cfg.radius, cfg.seed)
    probes = default_probes(spec.k, DEFAULT_PROBE_SEED)
    report = _header(cfg, spec, "analytic")
    report.update({"probe_seed": DEFAULT_PROBE_SEED, "tolerances": VERIFY_TOLS, "points": []})
    status = EXIT_OK
    maxima = {key: 0.0 for key in VERIFY_TOLS}
    for p in plan.points(spec.k):
        row = {"point": _point_dict(p)}
        try:
            jet = evaluate_jet(spec, p, 4)
            pack = build_structure(jet)
        except HessianNotPositiveDefinite as exc:
            row["inadmissible"] = str(exc)
            report["points"].append(row)
            status = EXIT_INADMISSIBLE
            continue
        res = axiom_residuals(pack, jet, probes).as_dict()
        res["axiom5"] = nijenhuis_residual(spec, p, probes)
        res["frobenius"], res["deta"] = frame_residuals(spec, p)
        res["killing"] = killing_residual(spec, p)
        for key in VERIFY_TOLS:
            row[key] = float(res[key])
            maxima[key] = max(maxima[key], float(res[key]))
        report["points"].append(row)
    report["summary"] = maxima
    failed = [key for key, tol in VERIFY_TOLS.items() if not maxima[key] < tol]
    if status == EXIT_OK and failed:
        status = EXIT_RESIDUAL
    report["failed"] = failed
    report["pass"] = status == EXIT_OK
    _emit(cfg, report, stream)
    return status


def cmd_einstein(cfg: RunConfig, stream=sys.stdout) -> int:
    spec = resolve_potential(cfg)
    plan = SamplePlan(cfg.points, cfg.radius, cfg.seed)
    try:
        summary = classify(spec, plan)
    except HessianNotPositiveDefinite as exc:
        _emit(cfg, {**_header(cfg, spec, "analytic"), "inadmissible": str(exc)}, stream)
        return EXIT_INADMISSIBLE
    report = _header(cfg, spec, "analytic")
    report.update(
        {
            "lambda": summary.lam,
            "banner": f"Sasakian-Einstein test with cosmological constant lambda = 2k = {summary.lam:g}",
            "tol": summary.tol,
            "points": [
                {"point": _point_dict(p), "max_abs": r.max_abs, "residual": _cplx(r.residual)}
                for p, r in zip(summary.points, summary.reports)
            ],
            "max_abs": summary.max_abs,
            "verdict": summary.verdict,
        }
    )
    _emit(cfg, report, stream)
    return EXIT_OK


def cmd_curvature(cfg: RunConfig, stream=sys.stdout) -> int:
    spec = resolve_potential(cfg)
    plan = SamplePlan(cfg.points, cfg.radius, cfg.seed)
    labels = basis_labels(spec.k)
    rows = []
    for i, p in enumerate(plan.points(spec.k)):
        try:
            jet = evaluate_jet(spec, p, 4)
            pack = build_structure(jet)
        except HessianNotPositiveDefinite as exc:
            _emit(cfg, {**_header(cfg, spec, "analytic"), "inadmissible": str(exc)}, stream)
            return EXIT_INADMISSIBLE
        tens = curvature_closed(jet, pack)
        trace = weyl_traces(tens.weyl, pack.g_inv)
        rows.append((i, p, tens, trace))
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point", "component", "re", "im"])
        for i, _, tens, trace in rows:
            for a, la in enumerate(labels):
                for b, lb in enumerate(labels):
                    v = complex(tens.ricci[a, b])
                    w.writerow([i, f"Ric[{la},{lb}]", repr(v.real), repr(v.imag)])
            w.writerow([i, "scalar", repr(float(np.real(tens.scalar))), repr(float(np.imag(tens.scalar)))])
            w.writerow([i, "weyl_max", repr(float(np.max(np.abs(tens.weyl)))), "0.0"])
            w.writerow([i, "weyl_trace", repr(trace), "0.0"])
        text = buf.getvalue()
        if cfg.out:
            Path(cfg.out).write_text(text, encoding="utf-8")
        else:
            stream.write(text)
        return EXIT_OK
    report = _header(cfg, spec, "analytic")
    report["labels"] = labels
    report["points"] = [
        {
            "point": _point_dict(p),
            "R_xx": float(np.real(tens.ricci[0, 0])),
            "ricci": _cplx(tens.ricci),
            "scalar": float(np.real(tens.scalar)),
            "weyl_max": float(np.max(np.abs(tens.weyl))),
            "weyl_trace": trace,
        }
        for _, p, tens, trace in rows
    ]
    _emit(cfg, report, stream)
    return EXIT_OK


def _write_grid(path: Path, field: GridField, header: dict) -> None:
    with open(path.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "ReZ", "ImZ", "K"])
        xs, ys = field.xs, field.ys
        for i in range(field.nx):
            for j in range(field.ny):
                w.writerow([i, j, repr(float(xs[i])), repr(float(ys[j])), repr(float(field.values[i, j]))])
    path.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")


def cmd_solve(cfg: RunConfig, stream=sys.stdout) -> int:
    if cfg.k != 1:
        raise InvalidPotential("grid solver supports k = 1 only; use `radial` for k > 1")
    n = cfg.grid + 1
    domain = (-0.5, 0.5, -0.5, 0.5)
    if cfg.boundary == "sphere":
        exact = GridField.from_function(sphere_k1, n, domain)
    elif cfg.boundary == "constant":
        exact = GridField(np.full((n, n), cfg.k0), domain)
    else:
        raise InvalidPotential(f"unknown boundary {cfg.boundary!r}")
    guess = GridField(np.zeros((n, n)), domain).with_boundary_of(exact)
    sol, newton = solve_liouville_k1(guess, cfg.c, NewtonConfig(tol=cfg.tol, max_iters=cfg.max_iters))
    report = _header(cfg, None, "fd")
    report.update(
        {
            "k": 1,
            "grid": {"domain": list(domain), "nx": n, "ny": n, "spacing": sol.h, "c": cfg.c, "k": 1},
            "boundary": cfg.boundary,
            "newton": newton.to_dict(),
        }
    )
    status = EXIT_OK
    if not newton.converged:
        status = EXIT_NONCONVERGENCE
    else:
        if cfg.boundary == "sphere" and cfg.c == 1.0:
            report["error_vs_exact"] = float(np.max(np.abs(sol.values - exact.values)))
        summary = verify_solution(sol, 1, tol=SOLVE_VERIFY_TOL)
        report["verification"] = summary.to_dict()
        if summary.verdict != "Einstein":
            status = EXIT_RESIDUAL
    report["pass"] = status == EXIT_OK
    if cfg.out:
        _write_grid(Path(cfg.out), sol, report)
    else:
        stream.write(json.dumps(report, indent=2) + "\n")
    return status


def cmd_radial(cfg: RunConfig, stream=sys.stdout) -> int:
    u0 = sphere_shift(cfg.k) if cfg.u0 is None else cfg.u0
    report = _header(cfg, None, "fd")
    report.update({"k": cfg.k, "c": cfg.c, "u0": u0, "s_max": cfg.s_max, "nodes": cfg.nodes})
    try:
        prof = solve_radial(cfg.k, cfg.c, cfg.s_max, cfg.nodes, u0, NewtonConfig(tol=1e-9, max_iters=cfg.max_iters))
    except NonConvergence as exc:
        report["error"] = str(exc)
        _emit(cfg, report, stream)
        return EXIT_NONCONVERGENCE
    except InadmissibleProfile as exc:
        report["error"] = str(exc)
        _emit(cfg, report, stream)
        return EXIT_INADMISSIBLE
    report["newton"] = prof.report.to_dict()
    report["error_vs_closed_form"] = float(np.max(np.abs(prof.u - radial_exact(cfg.k, cfg.c, u0, prof.s))))
    summary = verify_solution(prof, cfg.k, tol=FD_TOL)
    report["verification"] = summary.to_dict()
    status = EXIT_OK if summary.verdict == "Einstein" else EXIT_RESIDUAL
    report["pass"] = status == EXIT_OK
    if cfg.out:
        path = Path(cfg.out)
        with open(path.with_suffix(".csv"), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "u", "du", "ddu"])
            for row in zip(prof.s, prof.u, prof.du, prof.ddu):
                w.writerow([repr(float(v)) for v in row])
        path.with_suffix(".json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    else:
        stream.write(json.dumps(report, indent=2) + "\n")
    return status


def cmd_gauge_check(cfg: RunConfig, stream=sys.stdout) -> int:
    spec = resolve_potential(cfg)
    if cfg.gauge:
        gauge = GaugeMap(spec.k, tuple((tuple(t["a"]), complex(t.get("re", 0.0), t.get("im", 0.0))) for t in json.loads(cfg.gauge)))
    else:
        gauge = seeded_gauge(spec.k, cfg.seed)
    plan = SamplePlan(cfg.points, cfg.radius, cfg.seed)
    report = _header(cfg, spec, "analytic")
    report["gauge"] = [{"a": list(a), "re": cf.real, "im": cf.imag} for a, cf in gauge.terms]
    report["tol"] = GAUGE_TOL
    rows, worst = [], 0.0
    try:
        for p in plan.points(spec.k):
            d = gauge_defects(spec, gauge, p)
            worst = max(worst, *(v for key, v in d.items() if key != "x_shift"))
            rows.append({"point": _point_dict(p), **d})
    except HessianNotPositiveDefinite as exc:
        report["inadmissible"] = str(exc)
        _emit(cfg, report, stream)
        return EXIT_INADMISSIBLE
    report["points"] = rows
    report["max_defect"] = worst
    report["pass"] = worst < GAUGE_TOL
    _emit(cfg, report, stream)
    return EXIT_OK if worst < GAUGE_TOL else EXIT_RESIDUAL


COMMANDS = {
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "einstein": cmd_einstein,
    "solve": cmd_solve,
    "radial": cmd_radial,
    "gauge-check": cmd_gauge_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sasakian", description="Sasakian potentials: verification, curvature, solvers.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON file with default values for any option")
        sp.add_argument("--potential", help="builtin name (sphere, product, quadratic), inline JSON or path")
        sp.add_argument("--k", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--c", type=float, help="constant in det K_{m nbar} = c exp(-2(k+1)K)")
        sp.add_argument("--points", type=int)
        sp.add_argument("--radius", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "csv"))
        sp.add_argument("--grid", type=int, help="cells per side; the grid has grid+1 nodes")
        sp.add_argument("--boundary", choices=("sphere", "constant"))
        sp.add_argument("--k0", type=float, help="value for --boundary constant")
        sp.add_argument("--max-iters", dest="max_iters", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--u0", type=float)
        sp.add_argument("--s-max", dest="s_max", type=float)
        sp.add_argument("--nodes", type=int)
        sp.add_argument("--gauge", help="inline JSON list of {a, re, im} holomorphic monomials")
    return parser


def parse_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values: dict = {}
    if args.config:
        values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    for key, v in vars(args).items():
        if v is not None and key != "config":
            values[key] = v
    known = {f for f in RunConfig.__dataclass_fields__}
    extra = {key: v for key, v in values.items() if key not in known}
    cfg = RunConfig(**{key: v for key, v in values.items() if key in known})
    cfg.extra = extra
    if cfg.potential is None and cfg.command in ("verify", "curvature", "einstein", "gauge-check"):
        cfg.potential = "sphere"
    return cfg


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    cfg = parse_config(argv)
    try:
        return COMMANDS[cfg.command](cfg, stream)
    except InvalidPotential as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
