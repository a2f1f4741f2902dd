"""Command-line interface: ``range``, ``diam``, ``map-analyze`` and ``replicate``.

Exit codes: 0 on success, 2 on invalid input, 3 when a size cap is exceeded.
Configuration comes from flags, then ``OPDIAM_*`` environment variables, then
built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diamnorm import Budget, analyze_map, default_levels, inequality_ledger
from .errors import ParseError, ResourceLimit, ValidationError
from .linalg import as_square, matrix_from_json, matrix_to_json
from .maps import EXAMPLE_IDS, named_example
from .numrange import numerical_diameter, range_sample
from .replicate import format_report, run_suite
from .superop import SuperOp, load_superop

FORMATS = ("json", "csv", "md")


@dataclass(frozen=True)
class CliConfig:
    seed: int = 7
    grid: int = 256
    restarts: int = 32
    iters: int = 400
    tol: float = 1e-8
    max_dim: int = 64
    format: str = "json"

    def budget(self) -> Budget:
        return Budget(restarts=self.restarts, iters=self.iters, seed=self.seed,
                      grid=self.grid, max_dim=self.max_dim)


_NUMERIC = {"seed": int, "grid": int, "restarts": int, "iters": int, "tol": float,
            "max_dim": int}


def resolve_config(args: argparse.Namespace, env=os.environ,
                   default_format: str = "json") -> CliConfig:
    """Flags win over ``OPDIAM_<NAME>`` variables, which win over defaults."""
    values = {}
    for name, kind in _NUMERIC.items():
        raw = getattr(args, name, None)
        source = f"--{name.replace('_', '-')}"
        if raw is None:
            raw = env.get(f"OPDIAM_{name.upper()}")
            source = f"OPDIAM_{name.upper()}"
        if raw is None:
            continue
        try:
            value = kind(raw)
        except ValueError:
            raise ValidationError(f"{source}: expected {kind.__name__}, got {raw!r}") from None
        if not value > 0:
            raise ValidationError(f"{source}: must be positive, got {raw!r}")
        values[name] = value
    fmt = getattr(args, "format", None) or env.get("OPDIAM_FORMAT") or default_format
    if fmt not in FORMATS:
        raise ValidationError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    return CliConfig(format=fmt, **values)


def load_matrix(path: str, max_dim: int) -> np.ndarray:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    M = matrix_from_json(obj, where=path)
    if max(M.shape) > max_dim:
        raise ResourceLimit(f"{path}: size {M.shape[0]} exceeds max_dim={max_dim}")
    return as_square(M)


def _load_map(args, cfg: CliConfig) -> SuperOp:
    if args.example:
        return named_example(args.example, args.n, cfg.max_dim)
    if not args.file:
        raise ValidationError("map-analyze needs a SuperOp file or --example")
    try:
        phi = load_superop(args.file)
    except OSError as exc:
        raise ParseError(f"{args.file}: {exc.strerror}") from None
    if max(phi.dim_in, phi.dim_out) > cfg.max_dim:
        raise ResourceLimit(f"map size exceeds max_dim={cfg.max_dim}")
    return phi


# ---------------------------------------------------------------------------
# output

def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _table(rows: list[dict], fmt: str) -> str:
    keys = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(keys) + " |", "|" + "---|" * len(keys)]
    lines += ["| " + " | ".join(repr(r[k]) if isinstance(r[k], float) else str(r[k])
                                for k in keys) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _vector_json(v: np.ndarray) -> dict:
    return matrix_to_json(np.asarray(v).reshape(-1, 1))


# ---------------------------------------------------------------------------
# commands

def cmd_range(args, cfg: CliConfig) -> str:
    sample = range_sample(load_matrix(args.file, cfg.max_dim), cfg.grid)
    rows = [{"theta": float(t), "support": float(h), "boundary_re": float(b.real),
             "boundary_im": float(b.imag)}
            for t, h, b in zip(sample.thetas, sample.support, sample.boundary)]
    if cfg.format == "json":
        return _json({"points": rows})
    return _table(rows, cfg.format)


def cmd_diam(args, cfg: CliConfig) -> str:
    E = load_matrix(args.file, cfg.max_dim)
    res = numerical_diameter(E, grid=cfg.grid, tol=cfg.tol)
    p, q = res.witness_points(E)
    out = {"value": res.value, "theta_star": res.theta_star,
           "witness_points": [[p.real, p.imag], [q.real, q.imag]],
           "witness_pair": [_vector_json(v) for v in res.witness_pair]}
    if cfg.format == "json":
        return _json(out)
    flat = {"value": res.value, "theta_star": res.theta_star,
            "point1_re": p.real, "point1_im": p.imag, "point2_re": q.real, "point2_im": q.imag}
    return _table([flat], cfg.format)


def cmd_map_analyze(args, cfg: CliConfig) -> str:
    phi = _load_map(args, cfg)
    budget = cfg.budget()
    levels = default_levels(phi, cfg.max_dim)
    for item in args.level or []:
        name, _, value = item.partition("=")
        if name not in levels or not value.isdigit() or int(value) < 1:
            raise ValidationError(f"--level expects cb|cbsdiam|cbdiam=K, got {item!r}")
        levels[name] = int(value)
    estimates = analyze_map(phi, budget, levels)
    ledger = inequality_ledger(phi, estimates, tol=max(cfg.tol, 1e-9))
    witness_dir = Path(args.witness_dir) if args.witness_dir else None
    if witness_dir:
        witness_dir.mkdir(parents=True, exist_ok=True)
    items = []
    for q, est in estimates.items():
        d = est.as_dict()
        d["witness_file"] = None
        if witness_dir and est.witness is not None:
            path = witness_dir / f"{q}.witness.json"
            path.write_text(_json(matrix_to_json(est.witness)))
            d["witness_file"] = str(path)
        items.append(d)
    if cfg.format == "json":
        return _json({"map": {"label": phi.label, "dim_in": phi.dim_in, "dim_out": phi.dim_out},
                      "flags": phi.flags.as_dict(), "estimates": items,
                      "ledger": [e.as_dict() for e in ledger]})
    return _table(items, cfg.format)


def cmd_replicate(args, cfg: CliConfig) -> str:
    rows = run_suite(args.filter, cfg.seed, cfg.budget())
    return format_report(rows, cfg.format, timings=args.timings)


# ---------------------------------------------------------------------------
# parser

def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override OPDIAM_* variables)")
    g.add_argument("--seed", help="random seed (default 7)")
    g.add_argument("--grid", help="angle grid size (default 256)")
    g.add_argument("--restarts", help="search restarts (default 32)")
    g.add_argument("--iters", help="iterations per restart (default 400)")
    g.add_argument("--tol", help="numerical tolerance (default 1e-8)")
    g.add_argument("--max-dim", dest="max_dim", help="cap on any matrix size (default 64)")
    g.add_argument("--format", help="json, csv or md")
    g.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opdiam", description="Numerical ranges, diameters and induced seminorms of maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", help="support function and boundary points of W(E)")
    p.add_argument("file", help="matrix JSON file")
    _add_config_flags(p)
    p.set_defaults(run=cmd_range, default_format="csv")

    p = sub.add_parser("diam", help="numerical diameter with witness vectors")
    p.add_argument("file", help="matrix JSON file")
    _add_config_flags(p)
    p.set_defaults(run=cmd_diam, default_format="json")

    p = sub.add_parser("map-analyze", help="certified intervals for every seminorm of a map")
    p.add_argument("file", nargs="?", help="SuperOp JSON file")
    p.add_argument("--example", choices=[e for e in EXAMPLE_IDS if e != "trig"],
                   help="analyze a named example instead of a file")
    p.add_argument("--n", type=int, help="size parameter for sized examples")
    p.add_argument("--level", action="append", metavar="Q=K",
                   help="amplification level for cb, cbsdiam or cbdiam (repeatable)")
    p.add_argument("--witness-dir", help="write each witness matrix to this directory")
    _add_config_flags(p)
    p.set_defaults(run=cmd_map_analyze, default_format="json")

    p = sub.add_parser("replicate", help="run the replication suite")
    p.add_argument("--filter", help="fact id glob, e.g. 'corner.*'")
    p.add_argument("--timings", action="store_true", help="include per-row runtimes")
    _add_config_flags(p)
    p.set_defaults(run=cmd_replicate, default_format="md")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, default_format=args.default_format)
        text = args.run(args, cfg)
    except ResourceLimit as exc:
        print(f"opdiam: resource limit: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"opdiam: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
