"""Command-line interface.

    graphpoincare metrics   --family path:3 [--omega 1] [--r-prime] [--json]
    graphpoincare constants --family path:3 --omega 1 [--exhaustion geometric_halfline --n-max 12]
    graphpoincare spectrum  --graph k3.edges [--measure m.txt] [--omega a b]
    graphpoincare verify    thm-computing --graph p2.edges
    graphpoincare verify    --all --family complete:3
    graphpoincare generate  --family comb:2,3 --out comb.edges

Graphs are loaded with their vertices (and edges) in sorted label order, so
every emitted matrix is in sorted order and re-reading an emitted graph block
reproduces the same numbers bit for bit.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import poincare
from .errors import GraphPoincareError, ParseError
from .graph import (
    Measure,
    WeightedGraph,
    as_subset,
    build_graph,
    family_from_spec,
    format_graph,
    parse_family_spec,
    read_graph,
    read_measure,
    uniform_measure,
)
from .metrics import (
    diameter,
    inradius,
    path_metric,
    resistance_metric,
    restricted_metric,
    sup_restricted_metric,
)
from .spectral import neumann_operator, omega_operator


@dataclass
class RunConfig:
    command: str
    graph_path: str | None = None
    family: str | None = None
    printed_weights: bool = False
    measure: str = "uniform"
    omega: list[str] | None = None
    f: list[str] | None = None
    floors: tuple[float, ...] = poincare.DEFAULT_FLOORS
    theorems: list[str] = field(default_factory=list)
    all_theorems: bool = False
    r_prime: bool = False
    exhaustion: str | None = None
    n_max: int = 10
    pad: int = 1
    json: bool = False
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.command != "generate" and (self.graph_path is None) == (self.family is None):
            raise ParseError("give exactly one of --graph or --family")


# --------------------------------------------------------------------------
# loading and serialization

def canonical(g: WeightedGraph) -> WeightedGraph:
    """Same graph with vertices and edges in sorted label order."""
    edges = sorted((min(u, v), max(u, v), w) for u, v, w in g.edges())
    return build_graph(edges, vertices=sorted(g.labels))


def load_graph(cfg: RunConfig) -> WeightedGraph:
    if cfg.family is not None:
        g = family_from_spec(cfg.family, printed_weights=cfg.printed_weights)
    else:
        g = read_graph(cfg.graph_path)
    return canonical(g)


def load_measure(cfg: RunConfig, g: WeightedGraph) -> Measure | None:
    if cfg.measure == "uniform":
        return None
    return read_measure(cfg.measure, g)


def graph_to_json(g: WeightedGraph) -> dict:
    return {"vertices": list(g.labels), "edges": [[u, v, w] for u, v, w in g.edges()]}


def graph_from_json(block: dict) -> WeightedGraph:
    try:
        return build_graph([tuple(e) for e in block["edges"]], vertices=block["vertices"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad graph block: {exc}") from None


def _matrix(pm) -> list[list[float]]:
    return np.asarray(pm.distances).tolist()


# --------------------------------------------------------------------------
# commands

def cmd_metrics(cfg: RunConfig) -> dict:
    g = load_graph(cfg)
    d, r = path_metric(g), resistance_metric(g)
    report = {
        "graph": graph_to_json(g),
        "labels": list(g.labels),
        "metrics": {"d": _matrix(d), "r": _matrix(r)},
        "diam": {"d": diameter(d), "r": diameter(r)},
        "inradius": {},
    }
    if cfg.omega:
        sub = as_subset(g, cfg.omega)
        r_om = restricted_metric(g, sub)
        report["omega"] = sub.labels(g)
        report["metrics"]["r_omega"] = _matrix(r_om)
        report["diam"]["r_omega"] = diameter(r_om)
        report["inradius"] = {
            "d": inradius(d, sub),
            "r": inradius(r, sub),
            "r_omega": inradius(r_om, sub),
        }
    if cfg.r_prime:
        rp = sup_restricted_metric(g)
        report["metrics"]["r_prime"] = _matrix(rp)
        report["diam"]["r_prime"] = diameter(rp)
    return report


def cmd_constants(cfg: RunConfig) -> dict:
    g = load_graph(cfg)
    report = {"graph": graph_to_json(g), "c_P": poincare.best_constant_global(g)}
    if cfg.omega:
        sub = as_subset(g, cfg.omega)
        report["omega"] = sub.labels(g)
        report["c_P_omega"] = poincare.best_constant_omega(g, sub)
    if cfg.exhaustion:
        name, params = parse_family_spec(cfg.exhaustion)
        ex = poincare.best_constant_zero_exhaustion(name, params, cfg.n_max, pad=cfg.pad)
        report["c_P_zero_sequence"] = {
            "family": cfg.exhaustion,
            "pad": ex.pad,
            "sequence": [[n, v] for n, v in ex.sequence],
            "verdict": ex.verdict,
        }
    return report


def cmd_spectrum(cfg: RunConfig) -> dict:
    """Neumann spectrum, or the Omega spectrum when ``--omega`` is given.

    Without ``--measure`` the Neumann operator uses the uniform probability
    measure on X and the Omega operator the uniform probability measure on Omega.
    """
    g = load_graph(cfg)
    m = load_measure(cfg, g)
    report = {"graph": graph_to_json(g)}
    if cfg.omega:
        sub = as_subset(g, cfg.omega)
        masses = m.masses if m is not None else np.full(len(sub), 1.0 / len(sub))
        op = omega_operator(g, sub, masses)
        report.update(kind="omega_restricted", omega=sub.labels(g), masses=op.masses.tolist())
    else:
        op = neumann_operator(g, m if m is not None else uniform_measure(g))
        report.update(kind="neumann", masses=op.masses.tolist())
    report["eigenvalues"] = op.eigenvalues.tolist()
    return report


def cmd_verify(cfg: RunConfig) -> tuple[int, list[dict]]:
    g = load_graph(cfg)
    m = load_measure(cfg, g)
    names = list(poincare.THEOREMS) if cfg.all_theorems else cfg.theorems
    if not names:
        raise ParseError("name at least one theorem or pass --all")
    reports = []
    for name in names:
        rep = poincare.verify_theorem(
            g, name, measure=m, omega=cfg.omega, F=cfg.f, floors=cfg.floors, seed=cfg.seed,
        )
        reports.append(rep)
    status = 0 if all(r.passed for r in reports) else 1
    return status, [r.to_dict() for r in reports]


def cmd_generate(cfg: RunConfig) -> str:
    if cfg.family is None:
        raise ParseError("generate needs --family")
    return format_graph(family_from_spec(cfg.family, printed_weights=cfg.printed_weights))


# --------------------------------------------------------------------------
# output

def _table(report: dict) -> str:
    lines = []
    labels = report.get("labels")
    for key, value in report.items():
        if key in ("graph", "labels"):
            continue
        if key == "metrics":
            for name, M in value.items():
                lines.append(f"{name}:")
                width = max(len(l) for l in labels)
                lines.append(" " * (width + 1) + " ".join(f"{l:>12}" for l in labels))
                for lab, row in zip(labels, M):
                    lines.append(f"{lab:>{width}} " + " ".join(f"{x:12.6g}" for x in row))
        elif isinstance(value, dict):
            for sub, v in value.items():
                lines.append(f"{key}.{sub}: {v}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphpoincare", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--graph", dest="graph_path", metavar="PATH")
        src.add_argument("--family", metavar="NAME:PARAMS")
        p.add_argument("--printed-weights", action="store_true",
                       help="comb teeth use weight 1/2^(k+1) instead of length 1/2^(k+1)")
        p.add_argument("--measure", default="uniform", metavar="PATH|uniform")
        p.add_argument("--omega", nargs="+", metavar="LABEL")
        p.add_argument("--f", nargs="+", metavar="LABEL")
        p.add_argument("--floors", default=",".join(str(x) for x in poincare.DEFAULT_FLOORS))
        p.add_argument("--json", action="store_true")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("metrics", help="d, r, r_Omega, r' matrices with diameters and inradii")
    common(p)
    p.add_argument("--r-prime", action="store_true")
    p = sub.add_parser("constants", help="c_P, c_P^Omega and exhaustion sequences")
    common(p)
    p.add_argument("--exhaustion", metavar="FAMILY[:PARAMS]")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--pad", type=int, default=1)
    p = sub.add_parser("spectrum", help="Neumann or Omega-restricted eigenvalues")
    common(p)
    p = sub.add_parser("verify", help="numerical checks of the theorems")
    common(p)
    p.add_argument("theorems", nargs="*", metavar="THEOREM",
                   help=", ".join(poincare.THEOREMS + tuple(poincare.ALIASES)))
    p.add_argument("--all", dest="all_theorems", action="store_true")
    p = sub.add_parser("generate", help="write a family member as a graph file")
    common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        floors = tuple(float(x) for x in args.floors.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"bad --floors {args.floors!r}") from None
    kwargs = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    kwargs["floors"] = floors
    return RunConfig(**kwargs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "generate":
            _emit(cmd_generate(cfg), cfg)
            return 0
        if cfg.command == "verify":
            status, reports = cmd_verify(cfg)
            if cfg.json:
                _emit(json.dumps(reports, indent=2), cfg)
            else:
                _emit("\n".join(poincare.VerificationReport(
                    r["theorem"], r["lhs"], r["rhs"], r["residual"], r["tolerance"], r["relation"]
                ).line() for r in reports), cfg)
            return status
        report = {"metrics": cmd_metrics, "constants": cmd_constants,
                  "spectrum": cmd_spectrum}[cfg.command](cfg)
        _emit(json.dumps(report, indent=2) if cfg.json else _table(report), cfg)
        return 0
    except (GraphPoincareError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
