"""Scenario harness: each scenario turns one claim into recorded pass/fail assertions.

Suites
------
bulk          Chern numbers of the Harper bands (grid doubling, gauge change).
gapfill       bulk gaps filled by boundary states; trivial and torus controls.
index         windowed relative index, orientation flip, spectral flow, current.
cobordism     index invariance under bordant cuts, rough walls, wall perturbations.
two-boundary  hyperbola domain cut three ways.
shifts        ring hopping and the compressed shift.
decay         periodization: functional calculus on W versus X.

Reports are deterministic for a fixed config and seed: floats are rounded,
keys sorted, and wall-clock data live under the ``meta`` key only.
"""
from __future__ import annotations

import datetime as _dt
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import reporting
from .current import boundary_current, current_density, density_decay
from .geometry import (Domain, GeometryError, bordant, build_domain, check_admissibility,
                       make_partition, min_distance, pairwise_distance)
from .index import (IndexSystem, bloch_chern, bulk_gap, bulk_gaps, crossing_windows,
                    find_crossings, relative_index_density, spectral_flow, theta_report)
from .operators import (FluxSpec, compress, harper_hamiltonian, hopping_unitary,
                        indicator_projection, ring_domain, ring_path)
from .spectral import (apply_function, detect_gaps, eigendecompose, gap_filling_ratio,
                       hausdorff_one_sided, kernel_decay_profile, make_smoothstep)

SUITES = ("bulk", "gapfill", "index", "cobordism", "two-boundary", "shifts", "decay")


class ConfigError(ValueError):
    """Malformed or physically invalid configuration."""


def _r(x: float, nd: int = 9) -> float:
    return round(float(x), nd)


# ---------------------------------------------------------------------------
# records


@dataclass
class Assertion:
    name: str
    observed: Any
    expected: Any
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "observed": self.observed, "expected": self.expected,
                "tolerance": self.tolerance, "passed": bool(self.passed)}


@dataclass
class Scenario:
    name: str
    suite: str
    params: dict[str, Any]

    def to_dict(self) -> dict:
        return {"name": self.name, "suite": self.suite, "params": self.params}


@dataclass
class ScenarioResult:
    name: str
    suite: str
    assertions: list[Assertion]
    data: dict[str, Any]
    runtime: float = 0.0
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {"name": self.name, "suite": self.suite, "passed": self.passed,
                "skipped": self.skipped,
                "assertions": [a.to_dict() for a in self.assertions], "data": self.data}


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list[ScenarioResult]
    created: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, name: str) -> ScenarioResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def runtime(self, suite: str | None = None) -> float:
        return sum(r.runtime for r in self.results if suite is None or r.suite == suite)

    def to_dict(self, meta: bool = True) -> dict:
        out = {"schema": reporting.SCHEMA, "suite": self.suite, "seed": self.seed,
               "passed": self.passed, "scenarios": [r.to_dict() for r in self.results]}
        if meta:
            out["meta"] = {"created": self.created,
                           "runtime": {r.name: round(r.runtime, 3) for r in self.results}}
        return out


class _Checker:
    def __init__(self) -> None:
        self.items: list[Assertion] = []

    def close(self, name: str, observed: float, expected: float, tol: float) -> bool:
        ok = bool(abs(float(observed) - float(expected)) <= tol)
        self.items.append(Assertion(name, _r(observed), expected, tol, ok))
        return ok

    def equal(self, name: str, observed: Any, expected: Any) -> bool:
        ok = observed == expected
        self.items.append(Assertion(name, observed, expected, 0.0, bool(ok)))
        return bool(ok)

    def at_most(self, name: str, observed: float, bound: float) -> bool:
        ok = bool(float(observed) <= bound)
        self.items.append(Assertion(name, _r(observed, 12), f"<= {bound}", bound, ok))
        return ok

    def at_least(self, name: str, observed: float, bound: float) -> bool:
        ok = bool(float(observed) >= bound)
        self.items.append(Assertion(name, _r(observed, 12), f">= {bound}", bound, ok))
        return ok

    def true(self, name: str, flag: bool, observed: Any = None) -> bool:
        self.items.append(Assertion(name, observed if observed is not None else bool(flag),
                                    True, 0.0, bool(flag)))
        return bool(flag)


# ---------------------------------------------------------------------------
# shared builders


def domain_from(params: Mapping[str, Any]) -> Domain:
    try:
        return build_domain(params["shape"], params["bbox"])
    except KeyError as exc:
        raise ConfigError(f"missing domain parameter {exc}") from exc
    except GeometryError as exc:
        raise ConfigError(str(exc)) from exc


@lru_cache(maxsize=8)
def _cached_system(shape_key: str, bbox: tuple[int, int], flux: str, gap_index: int,
                   kind: str, mass: float) -> tuple[Domain, IndexSystem]:
    import json
    shape = json.loads(shape_key)
    domain = build_domain(shape, bbox)
    return domain, IndexSystem(domain, flux, gap_index, kind=kind, mass=mass)


def shared_system(shape: Mapping[str, Any], bbox: Sequence[int], flux: str, gap_index: int,
                  kind: str = "quintic", mass: float = 0.0) -> tuple[Domain, IndexSystem]:
    """Domain and decomposition, reused across scenarios in the same process."""
    import json
    return _cached_system(json.dumps(dict(shape), sort_keys=True), tuple(int(v) for v in bbox),
                          str(flux), int(gap_index), kind, float(mass))


def boundary_perturbation(domain: Domain, norm: float, seed: int, reach: float = 2.0,
                          propagation: float = 2.0) -> np.ndarray:
    """Random local Hermitian matrix supported within ``reach`` of the physical boundary.

    Entries couple only sites at most ``propagation`` apart; the result is
    scaled to operator norm ``norm``.
    """
    rng = np.random.default_rng(seed)
    near = np.flatnonzero(domain.boundary_distance("physical") <= reach + 1e-9)
    pts = domain.coords[near]
    d = pairwise_distance(pts, pts, domain.periods)
    block = (rng.normal(size=d.shape) + 1j * rng.normal(size=d.shape)) * (d <= propagation + 1e-9)
    block = 0.5 * (block + block.conj().T)
    scale = np.linalg.norm(block, 2)
    out = np.zeros((domain.n, domain.n), complex)
    out[np.ix_(near, near)] = block * (norm / scale)
    return out


def check_depth(domain: Domain, correlation_length: float) -> float:
    depth = domain.depth("physical")
    if depth < 2 * correlation_length:
        raise PreconditionError(f"domain depth {depth:.1f} is below twice the correlation "
                                f"length {correlation_length}")
    return depth


class PreconditionError(ValueError):
    """A physics precondition of a scenario does not hold."""


# ---------------------------------------------------------------------------
# handlers


def _bulk(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    flux = FluxSpec.parse(p["flux"])
    data: dict[str, Any] = {}
    base = bloch_chern(flux, p.get("k_grid"))
    data["chern"] = base.to_dict()
    if "per_band" in p:
        chk.equal("per_band", base.per_band, p["per_band"])
    if "cumulative" in p:
        n = len(p["cumulative"])
        chk.equal("cumulative", base.cumulative[:n], p["cumulative"])
    fine = bloch_chern(flux, 2 * base.k_grid)
    chk.equal("stable under k-grid doubling", fine.per_band, base.per_band)
    other = bloch_chern(flux, base.k_grid, gauge="landau_y")
    chk.equal("stable under gauge change", other.per_band, base.per_band)
    gaps = bulk_gaps(flux)
    data["gaps"] = [None if g is None else [_r(g[0]), _r(g[1])] for g in gaps]
    if out is not None:
        reporting.write_json(out / "chern.json", base.to_dict())
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _gapfill(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    flux = FluxSpec.parse(p["flux"])
    mass = float(p.get("mass", 0.0))
    gaps = [g for g in bulk_gaps(flux, mass) if g is not None]
    domain = domain_from(p)
    ed = eigendecompose(harper_hamiltonian(domain, flux, mass=mass))
    fill = gap_filling_ratio(gaps, ed.eigenvalues, p.get("eps"))
    data = {"gaps": [[_r(a), _r(b)] for a, b in gaps], "fill": [_r(f) for f in fill],
            "n_sites": domain.n}
    for i, f in enumerate(fill):
        if "min_fill" in p:
            chk.at_least(f"gap {i + 1} fill", f, p["min_fill"])
        if "max_fill" in p:
            chk.at_most(f"gap {i + 1} fill", f, p["max_fill"])
    if out is not None:
        reporting.write_csv(out / "spectrum.csv", ["index", "eigenvalue"],
                            [(i, float(v)) for i, v in enumerate(ed.eigenvalues)])
        reporting.write_text(out / "spectrum.svg",
                             reporting.svg_spectrum(ed.eigenvalues, gaps, title=sc.name))
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _hausdorff(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    dist = []
    for w in p["widths"]:
        torus = build_domain({"kind": "torus"}, (w, p["height"]))
        cyl = build_domain({"kind": "cylinder"}, (w, p["height"]))
        t = eigendecompose(harper_hamiltonian(torus, p["flux"])).eigenvalues
        c = eigendecompose(harper_hamiltonian(cyl, p["flux"])).eigenvalues
        dist.append(hausdorff_one_sided(t, c))
    chk.true("one-sided Hausdorff distance decreases with width",
             all(b < a for a, b in zip(dist, dist[1:])), [_r(d) for d in dist])
    return ScenarioResult(sc.name, sc.suite, chk.items,
                          {"widths": list(p["widths"]), "hausdorff": [_r(d) for d in dist]})


def _index(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    tol = float(p.get("tolerance", 0.05))
    domain, system = shared_system(p["shape"], p["bbox"], p["flux"], p["gap"])
    check_depth(domain, p.get("correlation_length", 3.0))
    part = make_partition(domain, p["cut"])
    radius = p.get("window")
    rep = theta_report(domain, part, system=system, radius=radius)
    swp = theta_report(domain, part.swapped(), system=system, radius=radius)
    expected = list(p["expected"])
    data: dict[str, Any] = {"index": rep.to_dict(), "swapped": swp.to_dict(),
                            "gap": [_r(v) for v in system.gap]}
    chk.equal("crossing count", len(rep.crossings), len(expected))
    for k, (res, e) in enumerate(zip(rep.crossings, expected)):
        chk.close(f"crossing {k} index", res.raw, e, tol)
    for k, (a, b) in enumerate(zip(rep.crossings, swp.crossings)):
        chk.close(f"crossing {k} sign flip under swap", a.raw + b.raw, 0.0, 1e-9)
    chk.at_most("total trace", abs(rep.total_trace), 1e-9)
    # oracles
    chern = bloch_chern(system.flux).cumulative[p["gap"] - 1]
    sf = spectral_flow(system.flux, int(p["bbox"][0]), 0.5 * sum(system.gap))
    data["chern"] = chern
    data["spectral_flow"] = sf.to_dict()
    chk.equal("left-wall index equals cumulative Chern", rep.verdict[0] if rep.crossings else None,
              chern)
    chk.equal("spectral flow per wall equals cumulative Chern", [sf.left, sf.right], [chern, chern])
    # current formula on the same windows
    crossings = find_crossings(domain, part)
    windows = [w for c, w in zip(crossings, crossing_windows(domain, crossings, radius))
               if c.physical]
    pi = part.plus.astype(float)
    cur = {}
    for kind in ("quintic", "mollifier"):
        cur[kind] = boundary_current(system.ed, system.with_kind(kind).step, pi, windows)
    data["current"] = {k: v.to_dict() for k, v in cur.items()}
    for k, res in enumerate(rep.crossings):
        chk.close(f"crossing {k} current equals index", cur["quintic"].scaled[k], res.raw, 0.05)
        chk.close(f"crossing {k} current independent of step", cur["mollifier"].scaled[k],
                  cur["quintic"].scaled[k], 0.02)
        chk.at_most(f"crossing {k} anti-Hermitian part", abs(cur["quintic"].antihermitian_windowed[k]),
                    1e-9)
    anchors = np.array([c.center for c in crossings if c.physical])
    decay = density_decay(cur["quintic"].density, domain, anchors)
    data["current_decay"] = {str(k): float(f"{v:.4e}") for k, v in decay.items() if k <= 12}
    if out is not None:
        dens = system.density(pi)
        reporting.write_csv(out / "density.csv", ["x", "y", "relative_index", "current"],
                            [(int(x), int(y), float(a), float(b)) for (x, y), a, b in
                             zip(domain.coords, dens, cur["quintic"].density)])
        reporting.write_text(out / "relative_index.svg",
                             reporting.svg_heatmap(domain.coords, dens, title=sc.name))
        reporting.write_text(out / "current.svg",
                             reporting.svg_heatmap(domain.coords, cur["quintic"].density,
                                                   title=sc.name))
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _cobordism(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    drift_tol = float(p.get("drift", 0.05))
    base_shape = p["shape"]
    domain, system = shared_system(base_shape, p["bbox"], p["flux"], p["gap"])
    base_part = make_partition(domain, p["cut"])
    base = theta_report(domain, base_part, system=system)
    data: dict[str, Any] = {"base": {"raw": [_r(v) for v in base.raw], "verdict": base.verdict},
                            "variants": []}
    variants = 0

    def compare(label: str, rep: Any, extra: dict | None = None) -> None:
        nonlocal variants
        variants += 1
        entry = {"variant": label, "raw": [_r(v) for v in rep.raw], "verdict": rep.verdict}
        if extra:
            entry.update(extra)
        data["variants"].append(entry)
        chk.equal(f"{label}: rounded indices", rep.verdict, base.verdict)
        drift = max(abs(a - b) for a, b in zip(rep.raw, base.raw)) if rep.raw else float("inf")
        chk.at_most(f"{label}: raw drift", drift, drift_tol)

    family = p["family"]
    if family == "cuts":
        for cut in p["cuts"]:
            part = make_partition(domain, cut)
            ok, brep = bordant(base_part, part, domain)
            label = f"{cut['kind']} cut {cut.get('y', cut.get('y1', ''))}"
            chk.true(f"{label}: bordant to base", ok)
            compare(label, theta_report(domain, part, system=system), {"bordant": ok})
    elif family == "rough":
        for seed in p["seeds"]:
            shape = {**p["rough_shape"], "seed": int(seed)}
            rough = build_domain(shape, p["bbox"])
            flat = build_domain(base_shape, p["bbox"])
            far = min_distance(rough.coords[rough.boundary_mask],
                               flat.coords[flat.boundary_mask], flat.periods).max()
            label = f"rough seed {seed}"
            chk.at_most(f"{label}: wall displacement", far, float(shape.get("depth", 3)))
            part = make_partition(rough, p["cut"])
            adm = check_admissibility(rough, part)
            if not adm.admissible:
                data["variants"].append({"variant": label, "skipped": "inadmissible"})
                continue
            sysr = IndexSystem(rough, p["flux"], p["gap"])
            compare(label, theta_report(rough, part, system=sysr))
    elif family == "perturb":
        gap = system.gap
        norm = (gap[1] - gap[0]) / 4.0
        for seed in p["seeds"]:
            V = boundary_perturbation(domain, norm, int(seed))
            sysp = IndexSystem(domain, p["flux"], p["gap"], perturbation=V)
            label = f"perturbation seed {seed}"
            compare(label, theta_report(domain, base_part, system=sysp),
                    {"norm": _r(np.linalg.norm(V, 2))})
    else:
        raise ConfigError(f"unknown cobordism family {family!r}")
    data["variant_count"] = variants
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _two_boundary(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    tol = float(p.get("tolerance", 0.08))
    domain, system = shared_system(p["shape"], p["bbox"], p["flux"], p["gap"])
    j = int(p["chern"])
    cy = (domain.height - 1) / 2.0
    cx = (domain.width - 1) / 2.0
    off = float(p["offset"])
    cuts = {
        "N1": {"kind": "horizontal", "y": int(round(cy - off)), "side": "above"},
        "N2": {"kind": "horizontal", "y": int(round(cy + off)), "side": "above"},
        "N3": {"kind": "line", "point": [cx, cy], "direction": [1, 1], "side": "left"},
    }
    expected = {"N1": -j, "N2": j, "N3": 0}
    parts = {k: make_partition(domain, c) for k, c in cuts.items()}
    data: dict[str, Any] = {"cuts": cuts, "expected": expected, "theta": {}}
    for name, part in parts.items():
        rep = theta_report(domain, part, system=system)
        data["theta"][name] = rep.to_dict()
        chk.equal(f"{name}: physical crossings", len(rep.crossings), 0 if name == "N3" else 1)
        raw = sum(rep.raw)
        chk.close(f"{name}: theta", raw, expected[name], tol)
    # N3 has no physical crossing; probe the density along the walls as well
    dens = system.density(parts["N3"].plus.astype(float))
    near = domain.boundary_distance("physical") <= float(p.get("probe_reach", 8))
    data["N3_probe"] = _r(dens[near].sum())
    chk.close("N3: probe window along both walls", dens[near].sum(), 0.0, tol)
    swapped = theta_report(domain, parts["N2"].swapped(), system=system)
    chk.close("N2 swapped: theta", sum(swapped.raw), -j, tol)
    ok12, _ = bordant(parts["N1"], parts["N2"], domain)
    chk.true("N1 and N2 are not bordant", not ok12)
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _shifts(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    L = int(p.get("length", 40))
    ring = ring_domain(L)
    half = ring.coords[:, 0] < L // 2
    pi = indicator_projection(half, ring)
    v = hopping_unitary(ring_path(L), ring, closed=True)
    # windows around the two places where the half ring ends
    centers = np.array([[L // 2 - 0.5, 0.0], [-0.5, 0.0]])
    d = pairwise_distance(ring.coords, centers, ring.periods)
    windows = [d[:, 0] < d[:, 1], d[:, 1] < d[:, 0]]
    cases = {"forward": v.matrix, "reversed": v.matrix.conj().T, "identity": np.eye(L)}
    expect = {"forward": [1, -1], "reversed": [-1, 1], "identity": [0, 0]}
    data: dict[str, Any] = {"length": L}
    for name, U in cases.items():
        dens = relative_index_density(U, pi)
        vals = [float(dens[w].sum()) for w in windows]
        data[name] = [_r(x, 12) for x in vals]
        for k, (a, e) in enumerate(zip(vals, expect[name])):
            chk.close(f"{name} crossing {k}", a, e, 1e-12)
        chk.close(f"{name} total trace", dens.sum(), 0.0, 1e-12)
    # compressed bilateral shift: T = Pi v Pi on the half ring
    T = compress(v.matrix, ring, build_domain({"kind": "strip", "x0": 0, "width": L // 2,
                                               "periodic_y": False}, (L, 1)))
    P = np.eye(L // 2)
    ker = np.diag(P - T.conj().T @ T).real
    coker = np.diag(P - T @ T.conj().T).real
    sub = ring.coords[half]
    dsub = pairwise_distance(sub, centers, ring.periods)
    toeplitz = [float(ker[dsub[:, k] < dsub[:, 1 - k]].sum() - coker[dsub[:, k] < dsub[:, 1 - k]].sum())
                for k in range(2)]
    data["toeplitz"] = [_r(x, 12) for x in toeplitz]
    for k in range(2):
        chk.close(f"compressed shift window {k} matches ring", toeplitz[k], data["forward"][k], 1e-12)
    chk.true("compressed shift is nilpotent", bool(np.allclose(np.linalg.matrix_power(T, L // 2), 0)))
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


def _decay(sc: Scenario, out: Path | None) -> ScenarioResult:
    p = sc.params
    chk = _Checker()
    flux = FluxSpec.parse(p["flux"])
    X = build_domain({"kind": "torus"}, p["torus"])
    W = domain_from(p)
    step = make_smoothstep(bulk_gap(flux, p["gap"]), p.get("kind", "quintic"))
    fX = apply_function(eigendecompose(harper_hamiltonian(X, flux)), step)
    fW = apply_function(eigendecompose(harper_hamiltonian(W, flux)), step)
    diff = fW.matrix - compress(fX, X, W)
    prof = kernel_decay_profile(diff, W)
    bulk_prof = kernel_decay_profile(fW, W)
    floor = float(p.get("floor", 1e-12))
    table = [v for k, v in sorted(prof.boundary_pair.items()) if v > floor]
    chk.true("pair table decreases with depth", all(b < a for a, b in zip(table, table[1:])))
    chk.at_most("pair table bucket(10)/bucket(2)", prof.ratio("boundary_pair"), p["ratio"])
    fmt = {name: {str(k): float(f"{v:.4e}") for k, v in t.items()}
           for name, t in (("boundary_pair", prof.boundary_pair), ("boundary_row", prof.boundary),
                           ("offdiagonal", bulk_prof.offdiagonal))}
    data = {"tables": fmt, "ratio_pair": float(f"{prof.ratio('boundary_pair'):.4e}"),
            "ratio_row": float(f"{prof.ratio('boundary'):.4e}"),
            "ratio_offdiagonal": float(f"{bulk_prof.ratio('offdiagonal'):.4e}")}
    if out is not None:
        reporting.write_csv(out / "decay.csv", ["bucket", "pair", "row"],
                            [(k, prof.boundary_pair[k], prof.boundary[k]) for k in sorted(prof.boundary)])
    return ScenarioResult(sc.name, sc.suite, chk.items, data)


HANDLERS: dict[str, Callable[[Scenario, Path | None], ScenarioResult]] = {
    "bulk": _bulk, "gapfill": _gapfill, "hausdorff": _hausdorff, "index": _index,
    "cobordism": _cobordism, "two-boundary": _two_boundary, "shifts": _shifts, "decay": _decay,
}


# ---------------------------------------------------------------------------
# default scenarios


def _strip(width: int, height: int) -> dict:
    return {"shape": {"kind": "strip", "width": width, "periodic_y": False},
            "bbox": [width, height]}


def default_scenarios(suite: str, seed: int = 0) -> list[Scenario]:
    """The built-in desk-scale scenarios of a suite (``all`` for every suite)."""
    if suite == "all":
        return [s for name in SUITES for s in default_scenarios(name, seed)]
    if suite == "bulk":
        return [Scenario("bulk-1/3", "bulk", {"flux": "1/3", "per_band": [1, -2, 1],
                                              "cumulative": [1, -1]}),
                Scenario("bulk-1/5", "bulk", {"flux": "1/5", "cumulative": [1, 2]}),
                Scenario("bulk-0", "bulk", {"flux": "0", "k_grid": 12, "per_band": [0]})]
    if suite == "gapfill":
        return [
            Scenario("gapfill-cylinder-1/3", "gapfill",
                     {"flux": "1/3", "shape": {"kind": "cylinder"}, "bbox": [30, 90],
                      "min_fill": 0.95}),
            Scenario("gapfill-trivial", "gapfill",
                     {"flux": "0", "mass": 1.0, "shape": {"kind": "cylinder"}, "bbox": [30, 30],
                      "max_fill": 0.05}),
            Scenario("gapfill-torus", "gapfill",
                     {"flux": "1/3", "shape": {"kind": "torus"}, "bbox": [30, 30],
                      "max_fill": 0.0}),
            Scenario("gapfill-trend", "hausdorff",
                     {"flux": "1/3", "widths": [12, 18, 24, 30], "height": 30}),
        ]
    if suite == "index":
        return [
            Scenario("index-1/3-gap1", "index",
                     {**_strip(30, 60), "flux": "1/3", "gap": 1,
                      "cut": {"kind": "horizontal", "y": 30}, "expected": [1, -1],
                      "tolerance": 0.05}),
            Scenario("index-1/5-gap2", "index",
                     {**_strip(30, 90), "flux": "1/5", "gap": 2,
                      "cut": {"kind": "horizontal", "y": 45}, "expected": [2, -2],
                      "tolerance": 0.08}),
        ]
    if suite == "cobordism":
        base = {**_strip(30, 60), "flux": "1/3", "gap": 1, "cut": {"kind": "horizontal", "y": 30}}
        seeds = [seed * 100 + k for k in range(4)]
        return [
            Scenario("cobordism-cuts", "cobordism",
                     {**base, "family": "cuts", "cuts": [
                         {"kind": "horizontal", "y": 26}, {"kind": "horizontal", "y": 34},
                         {"kind": "bent", "y0": 30, "x_bend": 15, "y1": 34},
                         {"kind": "bent", "y0": 27, "x_bend": 12, "y1": 31}]}),
            Scenario("cobordism-rough", "cobordism",
                     {**base, "family": "rough", "seeds": seeds,
                      "rough_shape": {"kind": "rough_strip", "width": 30, "periodic_y": False,
                                      "depth": 3}}),
            Scenario("cobordism-perturb", "cobordism",
                     {**base, "family": "perturb", "seeds": seeds}),
        ]
    if suite == "two-boundary":
        return [
            Scenario("two-boundary-1/3", "two-boundary",
                     {"shape": {"kind": "two_boundary", "h": 50}, "bbox": [44, 44], "flux": "1/3",
                      "gap": 1, "chern": 1, "offset": 12}),
            Scenario("two-boundary-1/5", "two-boundary",
                     {"shape": {"kind": "two_boundary", "h": 80}, "bbox": [62, 62], "flux": "1/5",
                      "gap": 2, "chern": 2, "offset": 14}),
        ]
    if suite == "shifts":
        return [Scenario("shifts-ring-40", "shifts", {"length": 40})]
    if suite == "decay":
        return [Scenario("decay-1/3", "decay",
                         {"flux": "1/3", "gap": 1, "torus": [36, 30],
                          "shape": {"kind": "strip", "x0": 0, "width": 30, "periodic_y": True},
                          "bbox": [36, 30], "ratio": 1e-3})]
    raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")


# ---------------------------------------------------------------------------
# runners


def validate(sc: Scenario) -> None:
    """Check physical parameters before any computation."""
    if sc.suite not in HANDLERS:
        raise ConfigError(f"scenario {sc.name}: unknown kind {sc.suite!r}")
    p = sc.params
    try:
        flux = FluxSpec.parse(p["flux"]) if "flux" in p else None
    except ValueError as exc:
        raise ConfigError(f"scenario {sc.name}: {exc}") from exc
    if flux is not None and "bbox" in p and "shape" in p:
        dom = domain_from(p)
        try:
            flux.check_domain(dom)
        except ValueError as exc:
            raise ConfigError(f"scenario {sc.name}: {exc}") from exc
    if flux is not None and "gap" in p:
        open_gaps = [g for g in bulk_gaps(flux, float(p.get("mass", 0.0))) if g is not None]
        if not 1 <= int(p["gap"]) <= len(open_gaps):
            raise ConfigError(f"scenario {sc.name}: gap {p['gap']} out of range "
                              f"({len(open_gaps)} open gaps)")


def run_scenario(sc: Scenario, out: str | Path | None = None) -> ScenarioResult:
    t0 = time.perf_counter()
    target = Path(out) / sc.name.replace("/", "_") if out is not None else None
    res = HANDLERS[sc.suite](sc, target)
    res.runtime = time.perf_counter() - t0
    if target is not None:
        reporting.write_json(target / "report.json", res.to_dict())
    return res


def _run_one(args: tuple[Scenario, str | None]) -> ScenarioResult:
    return run_scenario(*args)


def run_suite(suite: str = "all", seed: int = 0, out: str | Path | None = None, jobs: int = 1,
              scenarios: Sequence[Scenario] | None = None,
              overrides: Mapping[str, Any] | None = None) -> SuiteReport:
    """Run a named suite (or explicit scenarios) and aggregate in scenario order."""
    scs = list(scenarios) if scenarios is not None else default_scenarios(suite, seed)
    if overrides:
        for sc in scs:
            for key, val in overrides.items():
                if val is None:
                    continue
                if key == "window" and sc.suite in ("index",):
                    sc.params["window"] = val
                if key == "tolerance" and sc.suite in ("index", "two-boundary"):
                    sc.params["tolerance"] = val
    for sc in scs:
        validate(sc)
    args = [(sc, str(out) if out is not None else None) for sc in scs]
    if jobs > 1 and len(scs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, args))
    else:
        results = [_run_one(a) for a in args]
    report = SuiteReport(suite, seed, results)
    if out is not None:
        reporting.write_json(Path(out) / "suite.json", report.to_dict())
    return report


def run_gap_filling(scenarios: Sequence[Scenario] | None = None, **kw: Any) -> SuiteReport:
    return run_suite("gapfill", scenarios=scenarios, **kw)


def run_cobordism_suite(scenarios: Sequence[Scenario] | None = None, **kw: Any) -> SuiteReport:
    return run_suite("cobordism", scenarios=scenarios, **kw)


def run_two_boundary(scenarios: Sequence[Scenario] | None = None, **kw: Any) -> SuiteReport:
    return run_suite("two-boundary", scenarios=scenarios, **kw)


def run_shift_models(**kw: Any) -> SuiteReport:
    return run_suite("shifts", **kw)
