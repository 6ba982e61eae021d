"""Bulk Chern numbers, the exponential unitary and windowed relative indices.

The partition index of a boundary unitary ``u`` is recovered on a finite
system as the trace of ``u Pi u^H - Pi`` restricted to a window around one
place where the interface meets the boundary.  The full trace vanishes by
cyclicity, so each window must isolate exactly one such crossing.

Sign convention: ``u = exp(+2 pi i phi(H_W))`` with ``phi = 1`` below the gap.
With positive flux, ``Pi`` the upper half and a horizontal cut, the crossing
with the left wall then carries ``+`` the cumulative Chern number of the
bands below the gap, and the bulk Chern, spectral flow and current formula
all agree with that sign.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Mapping, Sequence

import numpy as np

from .geometry import (DEFAULT_R_MAX, Domain, Partition, check_admissibility, clusters,
                       min_distance, pairwise_distance)
from .operators import (FluxSpec, HermitianOperator, ProjectionOperator, UnitaryOperator,
                        harper_hamiltonian)
from .spectral import EigenDecomposition, SmoothStep, eigendecompose, make_smoothstep

CONVENTION = ("u = exp(+2 pi i phi(H_W)); positive flux, Pi = upper half, "
              "left-wall crossing -> +cumulative Chern")
DEFAULT_RADII: tuple[float | None, ...] = (4, 6, 8, 10, 15, 20, 30, None)


class IndexError_(ValueError):
    """Physics precondition failed (gapless filling, unresolvable crossings)."""


class GaplessError(IndexError_):
    pass


class CrossingError(IndexError_):
    pass


class AdmissibilityError(IndexError_):
    def __init__(self, message: str, report: Any = None) -> None:
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# Bloch reduction


def unit_cell(flux: FluxSpec, mass: float = 0.0, gauge: str = "landau_x") -> tuple[int, int]:
    stagger = 2 if mass else 1
    period = flux.q * stagger // math.gcd(flux.q, stagger)
    if gauge == "landau_x":
        return period, stagger
    if gauge == "landau_y":
        return stagger, period
    raise ValueError(f"unknown gauge {gauge!r}")


def bloch_matrix(flux: FluxSpec | str, kx: float, ky: float, mass: float = 0.0,
                 gauge: str = "landau_x") -> np.ndarray:
    """Bloch Hamiltonian of the Harper model on its magnetic unit cell.

    ``landau_x`` uses the phase ``exp(2 pi i alpha x)`` on y hops (the gauge
    of :func:`harper_hamiltonian`); ``landau_y`` puts ``exp(-2 pi i alpha y)``
    on x hops instead.  Both describe the same flux per plaquette.
    """
    flux = FluxSpec.parse(flux)
    mx, my = unit_cell(flux, mass, gauge)
    n = mx * my
    alpha = flux.alpha
    h = np.zeros((n, n), complex)
    onsite = np.zeros(n)

    def idx(i: int, j: int) -> int:
        return (j % my) * mx + (i % mx)

    for j in range(my):
        for i in range(mx):
            s = idx(i, j)
            # +x hop
            t = -1.0 if gauge == "landau_x" else -np.exp(-2j * np.pi * alpha * j)
            if i + 1 == mx:
                t = t * np.exp(1j * kx)
            h[idx(i + 1, j), s] += t
            # +y hop
            t = -np.exp(2j * np.pi * alpha * i) if gauge == "landau_x" else -1.0
            if j + 1 == my:
                t = t * np.exp(1j * ky)
            h[idx(i, j + 1), s] += t
            onsite[s] = mass * (1 - 2 * ((i + j) % 2))
    return h + h.conj().T + np.diag(onsite)


def bloch_bands(flux: FluxSpec | str, k_grid: int = 96, mass: float = 0.0,
                gauge: str = "landau_x") -> np.ndarray:
    """Band energies on a ``k_grid`` x ``k_grid`` grid: array (k_grid, k_grid, nbands)."""
    flux = FluxSpec.parse(flux)
    ks = 2 * np.pi * np.arange(k_grid) / k_grid
    return np.array([[np.linalg.eigvalsh(bloch_matrix(flux, kx, ky, mass, gauge))
                      for ky in ks] for kx in ks])


def band_edges(flux: FluxSpec | str, mass: float = 0.0, k_grid: int = 48) -> list[tuple[float, float]]:
    """Band intervals of the bulk operator.

    Extremes are located on a coarse grid and polished by bounded
    minimisation, giving edges accurate to ~1e-10.
    """
    return list(_band_edges(FluxSpec.parse(flux), float(mass), int(k_grid)))


@lru_cache(maxsize=64)
def _band_edges(flux: FluxSpec, mass: float, k_grid: int) -> tuple[tuple[float, float], ...]:
    from scipy.optimize import minimize

    E = bloch_bands(flux, k_grid, mass)
    nb = E.shape[-1]
    ks = 2 * np.pi * np.arange(k_grid) / k_grid
    edges = []
    for band in range(nb):
        vals = []
        for sign in (1.0, -1.0):
            flat = sign * E[..., band]
            i, j = np.unravel_index(np.argmin(flat), flat.shape)

            def f(k: np.ndarray) -> float:
                return sign * np.linalg.eigvalsh(bloch_matrix(flux, k[0], k[1], mass))[band]

            res = minimize(f, [ks[i], ks[j]], method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
            vals.append(float(sign * min(res.fun, flat[i, j])))
        edges.append((vals[0], vals[1]))
    return tuple(edges)


def bulk_gaps(flux: FluxSpec | str, mass: float = 0.0, min_width: float = 1e-6,
              k_grid: int = 48) -> list[tuple[float, float] | None]:
    """Gap ``j`` (1-based, list index ``j - 1``) between bands ``j-1`` and ``j``; None if closed."""
    edges = band_edges(flux, mass, k_grid)
    gaps: list[tuple[float, float] | None] = []
    for j in range(1, len(edges)):
        # supercell bands may overlap, so take everything below and above
        a = max(e[1] for e in edges[:j])
        b = min(e[0] for e in edges[j:])
        gaps.append((a, b) if b - a > min_width else None)
    return gaps


def bulk_gap(flux: FluxSpec | str, gap_index: int, mass: float = 0.0) -> tuple[float, float]:
    """The ``gap_index``-th open bulk gap counted from below (1-based).

    Closed gaps, such as the central gap at even ``q`` or the spurious ones of
    a staggered supercell, are skipped; the numbering then matches the
    ``cumulative`` list of :func:`bloch_chern`.
    """
    gaps = [g for g in bulk_gaps(flux, mass) if g is not None]
    if not 1 <= gap_index <= len(gaps):
        raise GaplessError(f"gap index {gap_index} out of range: flux {flux} has "
                           f"{len(gaps)} open gap(s)")
    return gaps[gap_index - 1]


@dataclass
class ChernData:
    flux: FluxSpec
    per_band: list[int]
    cumulative: list[int]
    curvature_grid: np.ndarray
    raw: list[float]
    gauge: str = "landau_x"
    k_grid: int = 0

    def to_dict(self) -> dict:
        return {"flux": str(self.flux), "per_band": self.per_band, "cumulative": self.cumulative,
                "raw": [round(v, 10) for v in self.raw], "gauge": self.gauge, "k_grid": self.k_grid}


def _link(a: np.ndarray, b: np.ndarray) -> complex:
    m = a.conj().T @ b
    d = np.linalg.det(m) if m.ndim == 2 else complex(m)
    return d / abs(d)


def _fhs_curvature(states: np.ndarray) -> np.ndarray:
    """Plaquette curvature of a band set; ``states`` is (k, k, dim, nb)."""
    n = states.shape[0]
    F = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            s00 = states[i, j]
            s10 = states[(i + 1) % n, j]
            s11 = states[(i + 1) % n, (j + 1) % n]
            s01 = states[i, (j + 1) % n]
            loop = _link(s00, s10) * _link(s10, s11) * _link(s11, s01) * _link(s01, s00)
            F[i, j] = np.angle(loop)
    return F


def bloch_chern(flux: FluxSpec | str, k_grid: int | None = None, gauge: str = "landau_x",
                mass: float = 0.0, gap_tol: float = 1e-6) -> ChernData:
    """Chern numbers of the Harper bands by plaquette (lattice) Berry curvature.

    ``cumulative[j-1]`` is the Chern number of the projection onto all bands
    below gap ``j``, computed from the determinant of the multi-band overlap
    matrices.  Bands that touch are merged into one group, so ``per_band`` has
    one entry per isolated group and gaps are numbered as in :func:`bulk_gap`.
    """
    flux = FluxSpec.parse(flux)
    if k_grid is None:
        k_grid = 6 * max(flux.q, 2)
    if k_grid < 6 * flux.q:
        raise ValueError("k_grid must be at least 6 q")
    ks = 2 * np.pi * np.arange(k_grid) / k_grid
    dim = np.prod(unit_cell(flux, mass, gauge))
    E = np.empty((k_grid, k_grid, dim))
    V = np.empty((k_grid, k_grid, dim, dim), complex)
    for i, kx in enumerate(ks):
        for j, ky in enumerate(ks):
            E[i, j], V[i, j] = np.linalg.eigh(bloch_matrix(flux, kx, ky, mass, gauge))
    # group bands into isolated clusters
    groups: list[list[int]] = [[0]]
    for b in range(1, dim):
        if E[..., b].min() - E[..., b - 1].max() > gap_tol:
            groups.append([b])
        else:
            groups[-1].append(b)
    per_band, raw, grids = [], [], []
    for g in groups:
        F = _fhs_curvature(V[..., g])
        c = F.sum() / (2 * np.pi)
        raw.append(float(c))
        per_band.append(int(round(c)))
        grids.append(F)
    if any(abs(r - round(r)) > 1e-6 for r in raw):
        raise GaplessError("non-integer Chern number; refine k_grid")
    cumulative = list(np.cumsum(per_band)[:-1].astype(int)) if len(per_band) > 1 else []
    return ChernData(flux, per_band, [int(c) for c in cumulative], np.array(grids), raw,
                     gauge, k_grid)


# ---------------------------------------------------------------------------
# unitaries and traces


def exp_unitary(ed: EigenDecomposition, phi: SmoothStep | None,
                domain: Domain | None = None, check: bool = False) -> UnitaryOperator:
    """``exp(+2 pi i phi(H_W))``; the identity when no eigenvalue lies inside the step."""
    if phi is None:
        return UnitaryOperator(np.eye(ed.n, dtype=complex), domain, check=False)
    vals = np.exp(2j * np.pi * phi.phi(ed.eigenvalues))
    return UnitaryOperator(ed.matrix(vals), domain, check=check)


def _proj_diag(pi: ProjectionOperator | np.ndarray) -> np.ndarray:
    if isinstance(pi, ProjectionOperator):
        return pi.diagonal
    pi = np.asarray(pi)
    return pi.astype(float) if pi.ndim == 1 else pi.diagonal().real.copy()


def relative_index_density(u: UnitaryOperator | np.ndarray,
                           pi: ProjectionOperator | np.ndarray) -> np.ndarray:
    """Diagonal of ``u Pi u^H - Pi`` for an indicator ``Pi``."""
    U = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u)
    p = _proj_diag(pi)
    return (np.abs(U) ** 2) @ p - p


def total_relative_index(u: UnitaryOperator | np.ndarray,
                         pi: ProjectionOperator | np.ndarray) -> float:
    return float(relative_index_density(u, pi).sum())


# ---------------------------------------------------------------------------
# crossings and windows


@dataclass
class Crossing:
    center: tuple[int, int]
    members: np.ndarray
    physical: bool

    def to_dict(self) -> dict:
        return {"center": list(self.center), "size": int(len(self.members)),
                "physical": self.physical}


def find_crossings(domain: Domain, partition: Partition, reach: float = 2.0) -> list[Crossing]:
    """Clusters of interface sites within ``reach`` of the boundary.

    A crossing is physical when it touches the physical boundary; crossings
    with the artificial frame are kept so that windows can avoid them.
    """
    iface = np.flatnonzero(partition.interface_mask)
    if len(iface) == 0 or not domain.boundary_mask.any():
        return []
    coords = domain.coords
    d_all = min_distance(coords[iface], coords[domain.boundary_mask], domain.periods)
    near = iface[d_all <= reach + 1e-9]
    if len(near) == 0:
        return []
    phys = domain.physical_boundary_mask
    d_phys = min_distance(coords[near], coords[phys], domain.periods)
    out = []
    for g in clusters(coords[near], domain.periods, link=2.5):
        members = near[g]
        pts = coords[members]
        dm = pairwise_distance(pts, pts, domain.periods).sum(axis=1)
        c = pts[int(np.argmin(dm))]
        out.append(Crossing((int(c[0]), int(c[1])), members,
                            bool((d_phys[g] <= reach + 1e-9).any())))
    return out


def crossing_windows(domain: Domain, crossings: Sequence[Crossing],
                     radius: float | None = None) -> list[np.ndarray]:
    """Voronoi cells of the crossing centres, optionally cut to a ball of ``radius``."""
    if not crossings:
        return []
    centers = np.array([c.center for c in crossings], dtype=float)
    d = pairwise_distance(domain.coords, centers, domain.periods)
    owner = np.argmin(d, axis=1)
    out = []
    for k in range(len(crossings)):
        m = owner == k
        if radius is not None:
            m &= d[:, k] <= radius + 1e-9
        out.append(m)
    return out


def localized_relative_index(u: UnitaryOperator | np.ndarray, pi: ProjectionOperator | np.ndarray,
                             window: np.ndarray, domain: Domain | None = None,
                             crossings: Sequence[Crossing] | None = None,
                             density: np.ndarray | None = None) -> float:
    """``Tr`` of ``u Pi u^H - Pi`` restricted to ``window`` (a boolean site mask).

    With ``crossings`` given, a window holding two or more crossing centres is
    rejected because the opposite contributions would cancel.
    """
    window = np.asarray(window, dtype=bool)
    if crossings is not None:
        if domain is None:
            raise ValueError("domain required to check crossings")
        centers = [domain.lookup(np.array(c.center[0]), np.array(c.center[1])).item()
                   for c in crossings]
        inside = sum(1 for i in centers if i >= 0 and window[i])
        if inside >= 2:
            raise CrossingError("window contains more than one crossing")
    dens = relative_index_density(u, pi) if density is None else density
    return float(dens[window].sum())


# ---------------------------------------------------------------------------
# spectral flow oracle


def strip_bloch(flux: FluxSpec, width: int, ky: float, mass: float = 0.0) -> np.ndarray:
    """Open-x strip of ``width`` columns, periodic in y with momentum ``ky``.

    The y period is one row (two rows with a staggered mass); basis index
    ``row * width + x``.
    """
    rows = 2 if mass else 1
    n = rows * width
    h = np.zeros((n, n), complex)
    onsite = np.zeros(n)
    for r in range(rows):
        for x in range(width):
            s = r * width + x
            if x + 1 < width:
                h[s + 1, s] += -1.0
            t = -np.exp(2j * np.pi * flux.alpha * x)
            if r + 1 == rows:
                t *= np.exp(1j * ky)
            h[((r + 1) % rows) * width + x, s] += t
            onsite[s] = mass * (1 - 2 * ((x + r) % 2))
    return h + h.conj().T + np.diag(onsite)


@dataclass
class SpectralFlow:
    left: int
    right: int
    unassigned: int
    crossings: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"left": self.left, "right": self.right, "unassigned": self.unassigned}


def spectral_flow(flux: FluxSpec | str, width: int, fermi: float, k_samples: int = 400,
                  mass: float = 0.0, edge_cols: int = 5, weight: float = 0.8) -> SpectralFlow:
    """Signed count of edge bands crossing ``fermi`` as ``ky`` winds once.

    Each crossing is attributed to the left or right wall by eigenvector
    weight (at least ``weight`` within ``edge_cols`` columns).  Channels
    moving up the left wall or down the right wall count positively, which
    makes both walls report the cumulative Chern number below ``fermi``.
    """
    flux = FluxSpec.parse(flux)
    edges = band_edges(flux, mass)
    for lo, hi in edges:
        if lo - 1e-9 <= fermi <= hi + 1e-9:
            raise GaplessError(f"fermi level {fermi} lies inside a bulk band")
    rows = 2 if mass else 1
    ks = 2 * np.pi * np.arange(k_samples + 1) / k_samples
    E, V = [], []
    for ky in ks:
        w, v = np.linalg.eigh(strip_bloch(flux, width, ky, mass))
        E.append(w)
        V.append(v)
    E = np.array(E)
    col = np.tile(np.arange(width), rows)
    left = right = unassigned = 0
    events = []
    for i in range(k_samples):
        below0 = E[i] < fermi
        below1 = E[i + 1] < fermi
        for b in np.flatnonzero(below0 != below1):
            k = i if abs(E[i, b] - fermi) < abs(E[i + 1, b] - fermi) else i + 1
            prob = np.abs(V[k][:, b]) ** 2
            v = np.sign(E[i + 1, b] - E[i, b])
            wl = prob[col < edge_cols].sum()
            wr = prob[col >= width - edge_cols].sum()
            if wl >= weight:
                left += int(v)
                side = "left"
            elif wr >= weight:
                right += int(-v)
                side = "right"
            else:
                unassigned += 1
                side = "bulk"
            events.append({"ky": float(ks[k]), "band": int(b), "side": side, "velocity": int(v)})
    return SpectralFlow(left, right, unassigned, events)


# ---------------------------------------------------------------------------
# pipeline


class IndexSystem:
    """Hamiltonian, decomposition and boundary unitary of one (domain, flux, gap) setup.

    Partitions and windows vary cheaply on top of a single eigendecomposition,
    so one instance serves every cut of the same domain.
    """

    def __init__(self, domain: Domain, flux: FluxSpec | str, gap_index: int = 1,
                 kind: str = "quintic", mass: float = 0.0,
                 perturbation: np.ndarray | None = None,
                 gap: tuple[float, float] | None = None) -> None:
        self.domain = domain
        self.flux = FluxSpec.parse(flux)
        self.gap_index = int(gap_index)
        self.kind = kind
        self.mass = float(mass)
        self.perturbation = perturbation
        self.gap = tuple(gap) if gap is not None else bulk_gap(self.flux, self.gap_index, self.mass)

    @cached_property
    def hamiltonian(self) -> HermitianOperator:
        h = harper_hamiltonian(self.domain, self.flux, mass=self.mass)
        if self.perturbation is not None:
            return HermitianOperator(h.matrix + self.perturbation, self.domain)
        return h

    @cached_property
    def ed(self) -> EigenDecomposition:
        return eigendecompose(self.hamiltonian)

    @cached_property
    def step(self) -> SmoothStep:
        return make_smoothstep(self.gap, self.kind)

    @cached_property
    def unitary(self) -> UnitaryOperator:
        return exp_unitary(self.ed, self.step, self.domain)

    @cached_property
    def _abs2(self) -> np.ndarray:
        return np.abs(self.unitary.matrix) ** 2

    def density(self, pi: ProjectionOperator | np.ndarray) -> np.ndarray:
        p = _proj_diag(pi)
        return self._abs2 @ p - p

    def with_kind(self, kind: str) -> "IndexSystem":
        """Same decomposition, different smooth step."""
        other = IndexSystem.__new__(IndexSystem)
        other.__dict__.update({k: v for k, v in self.__dict__.items()
                               if k in ("domain", "flux", "gap_index", "mass", "perturbation",
                                        "gap", "hamiltonian", "ed")})
        other.kind = kind
        return other


@dataclass
class CrossingResult:
    crossing: Crossing
    raw: float
    rounded: int
    residual: float
    window_size: int
    sweep: dict[str, float]

    def to_dict(self) -> dict:
        return {**self.crossing.to_dict(), "raw": round(self.raw, 9), "rounded": self.rounded,
                "residual": round(self.residual, 9), "window_size": self.window_size,
                "sweep": {k: round(v, 9) for k, v in self.sweep.items()}}


@dataclass
class IndexReport:
    crossings: list[CrossingResult]
    total_trace: float
    convention: str = CONVENTION
    frame_crossings: list[dict] = field(default_factory=list)
    admissibility: dict | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> list[int]:
        return [c.rounded for c in self.crossings]

    @property
    def raw(self) -> list[float]:
        return [c.raw for c in self.crossings]

    @property
    def theta(self) -> int:
        return int(sum(self.verdict))

    def to_dict(self) -> dict:
        return {"crossings": [c.to_dict() for c in self.crossings],
                "total_trace": round(self.total_trace, 12), "verdict": self.verdict,
                "theta": self.theta, "convention": self.convention,
                "frame_crossings": self.frame_crossings, "admissibility": self.admissibility,
                "flags": self.flags}


def _radius_key(r: float | None) -> str:
    return "cell" if r is None else f"{r:g}"


def theta_report(domain: Domain, partition: Partition, flux: FluxSpec | str | None = None,
                 gap_index: int = 1, system: IndexSystem | None = None,
                 radius: float | None = None, radii: Sequence[float | None] = DEFAULT_RADII,
                 require_admissible: bool = True, r_max: int = DEFAULT_R_MAX,
                 bound_threshold: float | None = None, kind: str = "quintic",
                 mass: float = 0.0) -> IndexReport:
    """Windowed relative index at every physical crossing of the interface.

    Parameters
    ----------
    domain, partition
        The half-space window and its split.  The partition must pass
        :func:`check_admissibility` unless ``require_admissible`` is False.
    flux, gap_index
        Bulk data; ignored when a prepared ``system`` is given.
    radius
        Window radius around each crossing centre; ``None`` uses the whole
        Voronoi cell of the crossing.
    radii
        Radii of the convergence sweep recorded per crossing.
    """
    adm = check_admissibility(domain, partition, r_max=r_max, bound_threshold=bound_threshold)
    if require_admissible and not adm.admissible:
        raise AdmissibilityError("partition is not admissible", adm)
    crossings = find_crossings(domain, partition)
    physical = [c for c in crossings if c.physical]
    frame = [c.to_dict() for c in crossings if not c.physical]
    if not physical:
        return IndexReport([], 0.0, frame_crossings=frame, admissibility=adm.to_dict())
    if system is None:
        if flux is None:
            raise ValueError("flux or system required")
        system = IndexSystem(domain, flux, gap_index, kind=kind, mass=mass)
    if system.domain is not domain:
        raise ValueError("system was built for a different domain")
    pi = partition.plus.astype(float)
    dens = system.density(pi)
    results = []
    flags = []
    windows = {r: crossing_windows(domain, crossings, r) for r in set(radii) | {radius}}
    for k, c in enumerate(crossings):
        if not c.physical:
            continue
        win = windows[radius][k]
        raw = float(dens[win].sum())
        rounded = int(round(raw))
        sweep = {_radius_key(r): float(dens[windows[r][k]].sum()) for r in radii}
        res = [abs(v - round(v)) for v in sweep.values()]
        if any(b > a + 1e-6 for a, b in zip(res[1:], res[2:])):
            flags.append(f"non-monotone residual sweep at crossing {c.center}")
        results.append(CrossingResult(c, raw, rounded, abs(raw - rounded), int(win.sum()), sweep))
    return IndexReport(results, float(dens.sum()), frame_crossings=frame,
                       admissibility=adm.to_dict(), flags=flags)
