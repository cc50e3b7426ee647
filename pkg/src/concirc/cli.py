"""Command-line driver: ``concirc list`` and ``concirc verify``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence

from . import catalog
from .expr import ParseError
from .geometry import GeometryError
from .jet import JetError
from .verify import SUITES, SuiteReport, Tolerances, VerifyError, run_suites

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    manifold: str | None = None
    manifest: str | None = None
    dim: int | None = None
    suites: tuple[str, ...] = SUITES
    points: int = 32
    seed: int = 42
    tol_zero: float = 1e-9
    tol_nonzero: float = 1e-3
    k: float = 1.0
    format: str = "text"

    def __post_init__(self):
        if (self.manifold is None) == (self.manifest is None):
            raise ConfigError("give exactly one of --manifold or --manifest")
        if self.points < 1:
            raise ConfigError(f"--points must be at least 1, got {self.points}")
        if not 0 < self.tol_zero < self.tol_nonzero:
            raise ConfigError("need 0 < --tol-zero < --tol-nonzero")
        if not self.k > 0:
            raise ConfigError(f"--k must be positive, got {self.k}")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}; choose from {list(SUITES)}")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")

    def to_dict(self) -> dict:
        return {
            "manifold": self.manifold,
            "manifest": self.manifest,
            "dim": self.dim,
            "suites": list(self.suites),
            "points": self.points,
            "seed": self.seed,
            "tol_zero": self.tol_zero,
            "tol_nonzero": self.tol_nonzero,
            "k": self.k,
            "format": self.format,
        }


def resolve(config: RunConfig) -> catalog.CatalogEntry:
    if config.manifest is not None:
        entry = catalog.load_manifest(config.manifest)
        if config.dim is not None and config.dim != entry.dim:
            raise ConfigError(f"manifest has dimension {entry.dim}, not {config.dim}")
        return entry
    return catalog.builtin(config.manifold, config.dim)


def summarize(reports: Sequence[SuiteReport]) -> dict:
    checks = [c for r in reports for c in r.checks]
    passed = sum(c.passed for c in checks)
    return {
        "total": len(checks),
        "passed": passed,
        "failed": len(checks) - passed,
        "skipped": sum(r.status == "skipped" for r in reports),
    }


def build_report(config: RunConfig, entry: catalog.CatalogEntry, reports: Sequence[SuiteReport]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "manifold": {"name": entry.name, "dim": entry.dim},
        "config": config.to_dict(),
        "suites": [r.to_dict() for r in reports],
        "summary": summarize(reports),
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def render_text(report: dict) -> str:
    lines = [f"manifold {report['manifold']['name']} (n={report['manifold']['dim']})"]
    for suite in report["suites"]:
        if suite["status"] == "skipped":
            lines.append(f"\n[{suite['name']}] skipped: {suite.get('reason', '')}")
            continue
        by_id: dict[str, list[dict]] = {}
        for c in suite["checks"]:
            by_id.setdefault(c["id"], []).append(c)
        lines.append(f"\n[{suite['name']}]")
        lines.append(f"  {'check':<34} {'mode':<15} {'points':>6} {'failed':>6} {'worst residual':>15}")
        for cid, cs in by_id.items():
            failed = sum(not c["pass"] for c in cs)
            mode = cs[0]["mode"]
            # worst means largest for zero checks, smallest for nonzero checks
            worst = max((c["residual"] for c in cs if c["mode"] == "expect_zero"), default=None)
            if worst is None:
                worst = min(c["residual"] for c in cs)
            lines.append(f"  {cid:<34} {mode:<15} {len(cs):>6} {failed:>6} {worst:>15.3e}")
    s = report["summary"]
    lines.append(
        f"\ntotal {s['total']}  passed {s['passed']}  failed {s['failed']}  skipped suites {s['skipped']}"
    )
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> tuple[int, str]:
    """Execute a run; returns ``(exit_code, rendered_report)``."""
    entry = resolve(config)
    points = catalog.sample_points(entry, config.points, config.seed)
    tol = Tolerances(config.tol_zero, config.tol_nonzero)
    reports = run_suites(entry, config.suites, points, config.seed, tol, config.k)
    report = build_report(config, entry, reports)
    text = render_json(report) if config.format == "json" else render_text(report)
    return (EXIT_OK if report["summary"]["failed"] == 0 else EXIT_FAIL), text


def list_manifolds(fmt: str = "text") -> str:
    rows = [catalog.describe(name) for name in catalog.BUILTINS]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    lines = []
    for row in rows:
        dims = ",".join(str(d) for d in row["dims"])
        lines.append(
            f"{row['name']:<22} dims={dims:<8} omega={row['omega']!s:<4} suites={','.join(row['suites'])}"
        )
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="concirc", description="Numerical checks for concircularly semi-symmetric connections.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ls = sub.add_parser("list", help="list the built-in manifolds")
    ls.add_argument("--format", choices=["text", "json"], default="text")
    v = sub.add_parser("verify", help="run check suites on one manifold")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifold")
    src.add_argument("--manifest")
    v.add_argument("--dim", type=int)
    v.add_argument("--suites", default=",".join(SUITES))
    v.add_argument("--points", type=int, default=32)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tol-zero", type=float, default=1e-9)
    v.add_argument("--tol-nonzero", type=float, default=1e-3)
    v.add_argument("--k", type=float, default=1.0)
    v.add_argument("--format", choices=["text", "json"], default="text")
    v.add_argument("--out")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.command == "list":
            sys.stdout.write(list_manifolds(args.format))
            return EXIT_OK
        config = RunConfig(
            manifold=args.manifold,
            manifest=args.manifest,
            dim=args.dim,
            suites=tuple(s.strip() for s in args.suites.split(",") if s.strip()),
            points=args.points,
            seed=args.seed,
            tol_zero=args.tol_zero,
            tol_nonzero=args.tol_nonzero,
            k=args.k,
            format=args.format,
        )
        code, text = run(config)
    except (ConfigError, catalog.CatalogError, ParseError, GeometryError, JetError, VerifyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
