"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 physics precondition failed,
4 inadmissible partition, 5 assertion failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import reporting
from .current import boundary_current
from .experiments import SUITES, ConfigError, PreconditionError, run_suite
from .geometry import GeometryError, build_domain, make_partition
from .index import (AdmissibilityError, GaplessError, IndexSystem, bloch_chern, bulk_gaps,
                    crossing_windows, find_crossings, theta_report)
from .operators import FluxError, FluxSpec, harper_hamiltonian
from .spectral import eigendecompose, gap_filling_ratio

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_ADMISSIBILITY, EXIT_ASSERTION = 0, 2, 3, 4, 5

DEFAULTS: dict[str, dict[str, Any]] = {
    "bulk": {"flux": "1/3", "bbox": [30, 30]},
    "domain": {"flux": "1/3", "shape": {"kind": "cylinder"}, "bbox": [30, 90]},
    "index": {"flux": "1/3", "gap": 1, "shape": {"kind": "strip", "width": 30, "periodic_y": False},
              "bbox": [30, 60], "cut": {"kind": "horizontal", "y": 30}},
    "current": {"flux": "1/3", "gap": 1,
                "shape": {"kind": "strip", "width": 30, "periodic_y": False},
                "bbox": [30, 60], "cut": {"kind": "horizontal", "y": 30}},
}


def load_config(path: str | None, command: str) -> dict[str, Any]:
    cfg = dict(DEFAULTS.get(command, {}))
    if path:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        schema = doc.pop("schema", reporting.SCHEMA)
        if schema != reporting.SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        cfg.update(doc)
    return cfg


def _flux(cfg: dict[str, Any]) -> FluxSpec:
    try:
        return FluxSpec.parse(cfg["flux"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid flux: {exc}") from exc


def _domain(cfg: dict[str, Any], flux: FluxSpec):
    try:
        dom = build_domain(cfg["shape"], cfg["bbox"])
    except (KeyError, GeometryError) as exc:
        raise ConfigError(f"invalid domain: {exc}") from exc
    try:
        flux.check_domain(dom)
    except FluxError as exc:
        raise ConfigError(str(exc)) from exc
    return dom


def _gap_index(cfg: dict[str, Any], flux: FluxSpec, mass: float) -> int:
    """Validate the gap index: out of band range is a config error, a closed gap is gapless."""
    gap = int(cfg.get("gap", 1))
    positional = bulk_gaps(flux, mass)
    if not 1 <= gap <= len(positional):
        raise ConfigError(f"gap {gap} out of range: flux {flux} has {len(positional) + 1} band(s)")
    n_open = sum(g is not None for g in positional)
    if gap > n_open:
        raise GaplessError(f"flux {flux} has only {n_open} open gap(s); gap {gap} is closed")
    return gap


def cmd_bulk(cfg: dict[str, Any], out: Path, args: argparse.Namespace) -> int:
    flux = _flux(cfg)
    torus = build_domain({"kind": "torus"}, cfg.get("bbox", [30, 30]))
    try:
        flux.check_domain(torus)
    except FluxError as exc:
        raise ConfigError(str(exc)) from exc
    if "gap" in cfg:
        _gap_index(cfg, flux, 0.0)
    ed = eigendecompose(harper_hamiltonian(torus, flux))
    chern = bloch_chern(flux, cfg.get("k_grid"))
    gaps = [g for g in bulk_gaps(flux) if g is not None]
    reporting.write_csv(out / "spectrum.csv", ["index", "eigenvalue"],
                        [(i, float(v)) for i, v in enumerate(ed.eigenvalues)])
    reporting.write_json(out / "chern.json", {**chern.to_dict(), "gaps": gaps})
    reporting.write_text(out / "spectrum.svg",
                         reporting.svg_spectrum(ed.eigenvalues, gaps, title=f"flux {flux}"))
    print(f"flux {flux}: per-band Chern {chern.per_band}, cumulative {chern.cumulative}")
    return EXIT_OK


def cmd_domain(cfg: dict[str, Any], out: Path, args: argparse.Namespace) -> int:
    flux = _flux(cfg)
    mass = float(cfg.get("mass", 0.0))
    dom = _domain(cfg, flux)
    gaps = [g for g in bulk_gaps(flux, mass) if g is not None]
    ed = eigendecompose(harper_hamiltonian(dom, flux, mass=mass))
    fill = gap_filling_ratio(gaps, ed.eigenvalues, cfg.get("eps"))
    ok = True
    if "min_fill" in cfg:
        ok &= all(f >= cfg["min_fill"] for f in fill)
    if "max_fill" in cfg:
        ok &= all(f <= cfg["max_fill"] for f in fill)
    reporting.write_json(out / "domain.json", {"flux": str(flux), "mass": mass, "gaps": gaps,
                                               "fill": fill, "passed": ok,
                                               "n_sites": dom.n})
    reporting.write_csv(out / "spectrum.csv", ["index", "eigenvalue"],
                        [(i, float(v)) for i, v in enumerate(ed.eigenvalues)])
    reporting.write_text(out / "spectrum.svg", reporting.svg_spectrum(ed.eigenvalues, gaps))
    print("fill fractions:", ", ".join(f"{f:.4f}" for f in fill))
    return EXIT_OK if ok else EXIT_ASSERTION


def _index_setup(cfg: dict[str, Any]):
    flux = _flux(cfg)
    mass = float(cfg.get("mass", 0.0))
    dom = _domain(cfg, flux)
    gap = _gap_index(cfg, flux, mass)
    try:
        part = make_partition(dom, cfg["cut"])
    except (KeyError, GeometryError) as exc:
        raise ConfigError(f"invalid cut: {exc}") from exc
    return flux, mass, dom, gap, part


def _inadmissible(exc: AdmissibilityError, out: Path) -> int:
    reporting.write_json(out / "admissibility.json", exc.report.to_dict())
    print(f"inadmissible partition: {exc}", file=sys.stderr)
    print(reporting.dumps(exc.report), end="")
    return EXIT_ADMISSIBILITY


def cmd_index(cfg: dict[str, Any], out: Path, args: argparse.Namespace) -> int:
    flux, mass, dom, gap, part = _index_setup(cfg)
    radius = args.window if args.window is not None else cfg.get("window")
    system = IndexSystem(dom, flux, gap, kind=cfg.get("kind", "quintic"), mass=mass)
    try:
        rep = theta_report(dom, part, system=system, radius=radius)
    except AdmissibilityError as exc:
        return _inadmissible(exc, out)
    reporting.write_json(out / "index.json", rep.to_dict())
    print("crossing indices:", ", ".join(f"{c.raw:+.4f}" for c in rep.crossings) or "none")
    if "expected" in cfg:
        tol = args.tolerance if args.tolerance is not None else cfg.get("tolerance", 0.05)
        exp = list(cfg["expected"])
        if len(exp) != len(rep.crossings) or any(abs(c.raw - e) > tol
                                                 for c, e in zip(rep.crossings, exp)):
            return EXIT_ASSERTION
    return EXIT_OK


def cmd_current(cfg: dict[str, Any], out: Path, args: argparse.Namespace) -> int:
    flux, mass, dom, gap, part = _index_setup(cfg)
    radius = args.window if args.window is not None else cfg.get("window")
    system = IndexSystem(dom, flux, gap, kind=cfg.get("kind", "quintic"), mass=mass)
    projection = cfg.get("projection", "plus")
    if projection == "identity":
        pi = np.ones(dom.n)
    elif projection == "plus":
        pi = part.plus.astype(float)
    else:
        raise ConfigError(f"unknown projection {projection!r}")
    try:
        rep = theta_report(dom, part, system=system, radius=radius)
    except AdmissibilityError as exc:
        return _inadmissible(exc, out)
    crossings = find_crossings(dom, part)
    windows = [w for c, w in zip(crossings, crossing_windows(dom, crossings, radius)) if c.physical]
    cur = boundary_current(system.ed, system.step, pi, windows)
    index_raw = rep.raw if projection == "plus" else [0.0] * len(windows)
    tol = args.tolerance if args.tolerance is not None else cfg.get("tolerance", 0.05)
    agree = [abs(a - b) <= tol for a, b in zip(cur.scaled, index_raw)]
    reporting.write_json(out / "current.json", {"current": cur.to_dict(), "index": index_raw,
                                                "agreement": agree, "tolerance": tol})
    reporting.write_csv(out / "density.csv", ["x", "y", "value"], cur.density_rows(dom))
    reporting.write_text(out / "current.svg", reporting.svg_heatmap(dom.coords, cur.density))
    print("-2 pi windowed current:", ", ".join(f"{v:+.4f}" for v in cur.scaled) or "none")
    return EXIT_OK if all(agree) else EXIT_ASSERTION


def cmd_suite(cfg: dict[str, Any], out: Path, args: argparse.Namespace) -> int:
    name = args.name
    if name not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {name!r}")
    report = run_suite(name, seed=args.seed, out=out, jobs=args.jobs,
                       overrides={"window": args.window, "tolerance": args.tolerance})
    for res in report.results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name} ({res.runtime:.1f} s)")
    return EXIT_OK if report.passed else EXIT_ASSERTION


COMMANDS = {"bulk": cmd_bulk, "domain": cmd_domain, "index": cmd_index, "current": cmd_current,
            "suite": cmd_suite}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgeindex", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration document")
    common.add_argument("--out", default="results", help="results directory")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    common.add_argument("--seed", type=int, default=0, help="seed for generated deformations")
    common.add_argument("--window", type=float, default=None,
                        help="window radius around crossings (default: whole cell)")
    common.add_argument("--tolerance", type=float, default=None, help="index tolerance")
    common.add_argument("--flux", default=None, help="override the flux p/q")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bulk", "domain", "index", "current"):
        sub.add_parser(name, parents=[common])
    sp = sub.add_parser("suite", parents=[common])
    sp.add_argument("name", help=f"one of {', '.join(SUITES + ('all',))}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    out = Path(args.out)
    try:
        cfg = load_config(args.config, args.command)
        if args.flux is not None:
            cfg["flux"] = args.flux
        if args.command != "suite":
            out = out / args.command
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except (ConfigError, FluxError, GeometryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AdmissibilityError as exc:
        print(f"inadmissible partition: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except (GaplessError, PreconditionError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    raise SystemExit(main())
