"""Lattice domains in Z^2, metric balls, boundaries and partitions.

Every domain lives inside a rectangular bounding box ``[0, width) x [0, height)``
with per-axis wrap flags.  Sites are stored row-major (sorted by ``y`` then
``x``), which fixes the matrix basis used by :mod:`edgeindex.operators`.

Two kinds of boundary are distinguished.  ``boundary`` is every site with a
lattice neighbour outside the domain.  ``physical_boundary`` is the part of it
adjacent to the *exterior*, the sites that stand for ``X \\ W``; the remainder
is the artificial ``frame`` where a finite window cuts off a domain that would
continue indefinitely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, NamedTuple

import numpy as np

NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))
# Largest ball radius of the admissibility tables.  At R = 3 even a perfectly
# transverse cut of a 30-wide window nearly reaches the default threshold.
DEFAULT_R_MAX = 2


class GeometryError(ValueError):
    """Invalid shape, cut or site set."""


class Site(NamedTuple):
    x: int
    y: int


# ---------------------------------------------------------------------------
# metric


def _as_coords(sites: Iterable[Any]) -> np.ndarray:
    arr = np.asarray([tuple(s) for s in sites], dtype=np.int64)
    return arr.reshape(-1, 2)


def displacement(p: np.ndarray, q: np.ndarray, periods: tuple[int, int]) -> np.ndarray:
    """Wrap-aware displacement ``p - q`` (broadcasting); period 0 means open."""
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    for axis, period in enumerate(periods):
        if period:
            d[..., axis] = (d[..., axis] + period / 2.0) % period - period / 2.0
    return d


def pairwise_distance(p: np.ndarray, q: np.ndarray, periods: tuple[int, int]) -> np.ndarray:
    """Euclidean distance matrix between coordinate arrays ``p`` (n,2) and ``q`` (m,2)."""
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    d = displacement(p[:, None, :], q[None, :, :], periods)
    return np.hypot(d[..., 0], d[..., 1])


def min_distance(points: np.ndarray, targets: np.ndarray, periods: tuple[int, int],
                 chunk: int = 2048) -> np.ndarray:
    """Distance from each of ``points`` to the nearest of ``targets`` (inf if none)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    targets = np.asarray(targets, dtype=float).reshape(-1, 2)
    out = np.full(len(points), np.inf)
    if len(targets) == 0:
        return out
    for start in range(0, len(points), chunk):
        block = pairwise_distance(points[start:start + chunk], targets, periods)
        out[start:start + chunk] = block.min(axis=1)
    return out


def set_diameter(coords: np.ndarray, periods: tuple[int, int]) -> float:
    coords = np.asarray(coords).reshape(-1, 2)
    if len(coords) < 2:
        return 0.0
    return float(pairwise_distance(coords, coords, periods).max())


def clusters(coords: np.ndarray, periods: tuple[int, int], link: float = 1.5) -> list[np.ndarray]:
    """Connected components of a site set, linking sites closer than ``link``.

    Returns index arrays into ``coords`` ordered by their smallest member.
    """
    coords = np.asarray(coords).reshape(-1, 2)
    n = len(coords)
    if n == 0:
        return []
    adj = pairwise_distance(coords, coords, periods) <= link + 1e-9
    label = np.full(n, -1)
    groups = []
    for seed in range(n):
        if label[seed] >= 0:
            continue
        label[seed] = len(groups)
        stack, members = [seed], [seed]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(adj[i] & (label < 0)):
                label[j] = len(groups)
                stack.append(j)
                members.append(j)
        groups.append(np.sort(np.asarray(members)))
    return groups


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True, eq=False)
class Domain:
    """A finite set of lattice sites inside a wrap-aware bounding box.

    ``exterior`` holds coordinates standing for ``X \\ W`` near the domain; they
    may lie one step outside the box when a box side is a physical wall.
    """

    width: int
    height: int
    wrap: tuple[bool, bool]
    coords: np.ndarray
    exterior: np.ndarray
    kind: str = "custom"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        coords = _as_coords(self.coords)
        if len(coords) == 0:
            raise GeometryError("domain has no sites")
        if (coords[:, 0].min() < 0 or coords[:, 0].max() >= self.width
                or coords[:, 1].min() < 0 or coords[:, 1].max() >= self.height):
            raise GeometryError("sites outside the bounding box")
        order = np.lexsort((coords[:, 0], coords[:, 1]))
        coords = coords[order]
        if len(np.unique(coords, axis=0)) != len(coords):
            raise GeometryError("duplicate sites")
        object.__setattr__(self, "coords", coords)
        ext = _as_coords(self.exterior)
        if len(ext):
            ext = np.unique(ext, axis=0)
            ext = ext[np.lexsort((ext[:, 0], ext[:, 1]))]
        object.__setattr__(self, "exterior", ext)
        object.__setattr__(self, "params", dict(self.params))

    # basic views ---------------------------------------------------------
    @property
    def periods(self) -> tuple[int, int]:
        return (self.width if self.wrap[0] else 0, self.height if self.wrap[1] else 0)

    @property
    def n(self) -> int:
        return len(self.coords)

    @cached_property
    def sites(self) -> tuple[Site, ...]:
        return tuple(Site(int(x), int(y)) for x, y in self.coords)

    @cached_property
    def index(self) -> dict[Site, int]:
        return {s: i for i, s in enumerate(self.sites)}

    @cached_property
    def _grid(self) -> np.ndarray:
        grid = np.full((self.width, self.height), -1, dtype=np.int64)
        grid[self.coords[:, 0], self.coords[:, 1]] = np.arange(self.n)
        return grid

    def lookup(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Site indices at (x, y) after wrapping; -1 where there is no site."""
        x = np.asarray(x)
        y = np.asarray(y)
        if self.wrap[0]:
            x = x % self.width
        if self.wrap[1]:
            y = y % self.height
        inside = (x >= 0) & (x < self.width) & (y >= 0) & (y < self.height)
        out = np.full(np.broadcast(x, y).shape, -1, dtype=np.int64)
        out[inside] = self._grid[x[inside], y[inside]]
        return out

    def neighbour_table(self) -> np.ndarray:
        """(n, 4) array of neighbour indices in NEIGHBOURS order, -1 if absent."""
        return np.stack([self.lookup(self.coords[:, 0] + dx, self.coords[:, 1] + dy)
                         for dx, dy in NEIGHBOURS], axis=1)

    def mask(self, sites: Iterable[Any]) -> np.ndarray:
        """Boolean mask over the domain for a collection of sites."""
        m = np.zeros(self.n, dtype=bool)
        coords = _as_coords(sites)
        if len(coords):
            idx = self.lookup(coords[:, 0], coords[:, 1])
            if (idx < 0).any():
                raise GeometryError("site not in domain")
            m[idx] = True
        return m

    def subset(self, mask: np.ndarray) -> frozenset[Site]:
        return frozenset(self.sites[i] for i in np.flatnonzero(mask))

    # boundaries ------------------------------------------------------------
    @cached_property
    def boundary_mask(self) -> np.ndarray:
        return (self.neighbour_table() < 0).any(axis=1)

    @cached_property
    def physical_boundary_mask(self) -> np.ndarray:
        if len(self.exterior) == 0:
            return np.zeros(self.n, dtype=bool)
        ext = {tuple(p) for p in self._wrap_coords(self.exterior)}
        hit = np.zeros(self.n, dtype=bool)
        for dx, dy in NEIGHBOURS:
            shifted = self._wrap_coords(self.coords + np.array([dx, dy]))
            hit |= np.fromiter((tuple(p) in ext for p in shifted), bool, self.n)
        return hit & self.boundary_mask

    @property
    def boundary(self) -> frozenset[Site]:
        return self.subset(self.boundary_mask)

    @property
    def physical_boundary(self) -> frozenset[Site]:
        return self.subset(self.physical_boundary_mask)

    @property
    def frame(self) -> frozenset[Site]:
        return self.subset(self.boundary_mask & ~self.physical_boundary_mask)

    def _wrap_coords(self, coords: np.ndarray) -> np.ndarray:
        coords = np.array(coords, dtype=np.int64).reshape(-1, 2)
        if self.wrap[0]:
            coords[:, 0] %= self.width
        if self.wrap[1]:
            coords[:, 1] %= self.height
        return coords

    @cached_property
    def box_coords(self) -> np.ndarray:
        """All bounding-box sites, row-major."""
        ys, xs = np.meshgrid(np.arange(self.height), np.arange(self.width), indexing="ij")
        return np.stack([xs.ravel(), ys.ravel()], axis=1)

    def boundary_distance(self, which: str = "all") -> np.ndarray:
        """Distance of every site to the boundary; ``which`` is 'all' or 'physical'."""
        mask = self.boundary_mask if which == "all" else self.physical_boundary_mask
        return min_distance(self.coords, self.coords[mask], self.periods)

    def depth(self, which: str = "physical") -> float:
        """Largest distance from a site to the boundary (inf without boundary)."""
        return float(self.boundary_distance(which).max())

    def to_csv_rows(self) -> list[tuple[int, int, int]]:
        return [(int(x), int(y), int(b)) for (x, y), b in zip(self.coords, self.boundary_mask)]

    def translated(self, dx: int, dy: int) -> "Domain":
        """The same shape shifted inside its box (sites must stay in the box)."""
        shift = np.array([dx, dy])
        return Domain(self.width, self.height, self.wrap,
                      self._wrap_coords(self.coords + shift),
                      self._wrap_coords(self.exterior + shift) if len(self.exterior) else self.exterior,
                      self.kind, {**self.params, "translated": [dx, dy]})

    def __repr__(self) -> str:
        return (f"Domain(kind={self.kind!r}, box={self.width}x{self.height}, "
                f"wrap={self.wrap}, n={self.n})")


def _wall_halo(width: int, height: int, walls: Iterable[str]) -> list[tuple[int, int]]:
    halo: list[tuple[int, int]] = []
    for wall in walls:
        if wall == "left":
            halo += [(-1, y) for y in range(height)]
        elif wall == "right":
            halo += [(width, y) for y in range(height)]
        elif wall == "bottom":
            halo += [(x, -1) for x in range(width)]
        elif wall == "top":
            halo += [(x, height) for x in range(width)]
        else:
            raise GeometryError(f"unknown wall {wall!r}")
    return halo


def _notches(rng: np.random.Generator, height: int, count: int, depth: int,
             max_len: int) -> list[tuple[int, int, int]]:
    out = []
    for _ in range(count):
        y0 = int(rng.integers(0, height))
        length = int(rng.integers(1, max_len + 1))
        d = int(rng.integers(1, depth + 1))
        out.append((y0, length, d))
    return out


def build_domain(shape: Mapping[str, Any], bbox: tuple[int, int] | Mapping[str, Any]) -> Domain:
    """Build a domain from a shape specification.

    ``bbox`` is ``(width, height)`` or a mapping with those keys.  Shape kinds:

    ``torus``
        every box site, both axes periodic.
    ``cylinder``
        every box site, ``y`` periodic, physical walls left and right.
    ``strip``
        columns ``x0 <= x < x0 + width``; ``periodic_y`` (default True) chooses a
        cylinder or a window whose top and bottom are frame.
    ``rough_strip``
        a strip whose walls carry seeded rectangular notches of depth at most
        ``depth`` (default 3).
    ``half_plane``
        columns ``x >= x0`` with a single physical wall on the left.
    ``two_boundary``
        the region ``(x-cx)(y-cy) >= -h`` between two hyperbola branches; the
        branches are physical, the box rim is frame.
    ``annulus``
        ``r_in <= |p - c| <= r_out``; the inner disc is the exterior, the outer
        circle is frame.
    """
    if isinstance(bbox, Mapping):
        width, height = int(bbox["width"]), int(bbox["height"])
    else:
        width, height = (int(v) for v in bbox)
    if width <= 0 or height <= 0:
        raise GeometryError("empty bounding box")
    kind = shape.get("kind")
    box = np.array([(x, y) for y in range(height) for x in range(width)], dtype=np.int64)
    X, Y = box[:, 0], box[:, 1]
    params = dict(shape)

    if kind == "torus":
        return Domain(width, height, (True, True), box, np.empty((0, 2)), "torus", params)

    if kind == "cylinder":
        return Domain(width, height, (False, True), box,
                      _wall_halo(width, height, ("left", "right")), "cylinder", params)

    if kind in ("strip", "rough_strip"):
        x0 = int(shape.get("x0", 0))
        w = int(shape.get("width", width - x0))
        if w <= 0 or x0 < 0 or x0 + w > width:
            raise GeometryError("strip exceeds bounding box")
        periodic = bool(shape.get("periodic_y", True))
        inside = (X >= x0) & (X < x0 + w)
        if kind == "rough_strip":
            depth = int(shape.get("depth", 3))
            seed = int(shape.get("seed", 0))
            count = int(shape.get("notches", max(1, height // 6)))
            max_len = int(shape.get("max_length", 4))
            if 2 * depth >= w:
                raise GeometryError("notch depth too large for strip width")
            rng = np.random.default_rng(seed)
            carved = np.zeros(len(box), dtype=bool)
            for side in ("left", "right"):
                for y0, length, d in _notches(rng, height, count, depth, max_len):
                    ys = (y0 + np.arange(length))
                    ys = ys % height if periodic else ys[ys < height]
                    cols = range(x0, x0 + d) if side == "left" else range(x0 + w - d, x0 + w)
                    for col in cols:
                        carved |= (X == col) & np.isin(Y, ys)
            inside &= ~carved
            params.setdefault("seed", seed)
            params.setdefault("depth", depth)
        exterior = [tuple(p) for p in box[~inside]]
        exterior += [(x0 - 1, y) for y in range(height)] + [(x0 + w, y) for y in range(height)]
        return Domain(width, height, (False, periodic), box[inside], exterior, kind, params)

    if kind == "half_plane":
        x0 = int(shape.get("x0", 0))
        if not 0 <= x0 < width:
            raise GeometryError("half-plane wall outside bounding box")
        periodic = bool(shape.get("periodic_y", False))
        inside = X >= x0
        exterior = [(x0 - 1, y) for y in range(height)]
        return Domain(width, height, (False, periodic), box[inside], exterior, kind, params)

    if kind == "two_boundary":
        cx = float(shape.get("cx", (width - 1) / 2))
        cy = float(shape.get("cy", (height - 1) / 2))
        h = float(shape["h"])
        if h <= 0:
            raise GeometryError("hyperbola constant must be positive")
        prod = (X - cx) * (Y - cy)
        inside = prod >= -h
        if inside.all():
            raise GeometryError("hyperbola branches lie outside the bounding box")
        return Domain(width, height, (False, False), box[inside], box[~inside], kind, params)

    if kind == "annulus":
        cx = float(shape.get("cx", (width - 1) / 2))
        cy = float(shape.get("cy", (height - 1) / 2))
        r_in, r_out = float(shape["r_in"]), float(shape["r_out"])
        if not 0 < r_in < r_out:
            raise GeometryError("annulus needs 0 < r_in < r_out")
        if cx - r_out < 0 or cx + r_out > width - 1 or cy - r_out < 0 or cy + r_out > height - 1:
            raise GeometryError("annulus exceeds bounding box")
        r = np.hypot(X - cx, Y - cy)
        inside = (r >= r_in) & (r <= r_out)
        return Domain(width, height, (False, False), box[inside], box[r < r_in], kind, params)

    raise GeometryError(f"unknown shape kind {kind!r}")


# ---------------------------------------------------------------------------
# balls and distances


def ball(a: Iterable[Any], r: float, domain: Domain) -> frozenset[Site]:
    """All bounding-box sites within distance ``r`` of the set ``a``."""
    if r < 0:
        raise GeometryError("negative radius")
    coords = _as_coords(a)
    box = domain.box_coords
    d = min_distance(box, coords, domain.periods)
    return frozenset(Site(int(x), int(y)) for x, y in box[d <= r + 1e-9])


def distance_to_boundary(domain: Domain, which: str = "all") -> dict[Site, float]:
    """Exact distance of every site to the boundary (``inf`` on a torus)."""
    d = domain.boundary_distance(which)
    return {s: float(v) for s, v in zip(domain.sites, d)}


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True, eq=False)
class Partition:
    """A split of a domain into two disjoint site sets with their interface collar."""

    domain: Domain
    plus: np.ndarray
    spec: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        plus = np.asarray(self.plus, dtype=bool)
        if plus.shape != (self.domain.n,):
            raise GeometryError("partition mask does not match domain")
        object.__setattr__(self, "plus", plus)

    @property
    def minus(self) -> np.ndarray:
        return ~self.plus

    @cached_property
    def interface_mask(self) -> np.ndarray:
        nb = self.domain.neighbour_table()
        valid = nb >= 0
        nb_plus = np.where(valid, self.plus[np.where(valid, nb, 0)], self.plus[:, None])
        other_side = valid & (nb_plus != self.plus[:, None])
        return other_side.any(axis=1)

    @property
    def w_plus(self) -> frozenset[Site]:
        return self.domain.subset(self.plus)

    @property
    def w_minus(self) -> frozenset[Site]:
        return self.domain.subset(self.minus)

    @property
    def interface(self) -> frozenset[Site]:
        return self.domain.subset(self.interface_mask)

    def swapped(self) -> "Partition":
        spec = dict(self.spec)
        spec["swap"] = not spec.get("swap", False)
        return Partition(self.domain, ~self.plus, spec)

    def intersect(self, other: "Partition") -> "Partition":
        """Partition whose plus side is the intersection of both plus sides."""
        return Partition(self.domain, self.plus & other.plus,
                         {"kind": "intersection", "parts": [dict(self.spec), dict(other.spec)]})


def _cut_plus(cut: Mapping[str, Any], X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    kind = cut.get("kind")
    if kind == "horizontal":
        y0 = float(cut["y"])
        side = cut.get("side", "above")
        return Y >= y0 if side == "above" else Y < y0
    if kind == "vertical":
        x0 = float(cut["x"])
        side = cut.get("side", "right")
        return X >= x0 if side == "right" else X < x0
    if kind == "ray":
        # W+ is the quadrant swept counterclockwise from the ray by a right angle.
        x0, y0 = (float(v) for v in cut["origin"])
        direction = cut.get("direction", "right")
        quadrants = {
            "right": (X >= x0) & (Y >= y0),
            "up": (X <= x0) & (Y >= y0),
            "left": (X <= x0) & (Y <= y0),
            "down": (X >= x0) & (Y <= y0),
        }
        if not isinstance(direction, str) or direction not in quadrants:
            raise GeometryError(f"unknown ray direction {direction!r}")
        return quadrants[direction]
    if kind == "bent":
        y0, y1 = float(cut["y0"]), float(cut["y1"])
        xb = float(cut["x_bend"])
        plus = np.where(X < xb, Y >= y0, Y >= y1)
        return plus if cut.get("side", "above") == "above" else ~plus
    if kind in ("line", "diagonal"):
        px, py = (float(v) for v in cut["point"])
        dx, dy = (float(v) for v in cut.get("direction", (1.0, 1.0)))
        cross = dx * (Y - py) - dy * (X - px)
        return cross >= 0 if cut.get("side", "left") == "left" else cross < 0
    raise GeometryError(f"unknown cut kind {kind!r}")


def make_partition(domain: Domain, cut: Mapping[str, Any]) -> Partition:
    """Split ``domain`` along a cut specification.

    Cut kinds: ``horizontal`` (``y``, side above/below), ``vertical`` (``x``,
    side right/left), ``ray`` (``origin``, ``direction``), ``bent`` (``y0``,
    ``x_bend``, ``y1``: an L-shaped step) and ``line``/``diagonal`` (``point``,
    ``direction``, side left/right of the directed line).  ``swap: true``
    exchanges the two halves.
    """
    X, Y = domain.coords[:, 0], domain.coords[:, 1]
    plus = np.asarray(_cut_plus(cut, X, Y), dtype=bool)
    if plus.all() or not plus.any():
        raise GeometryError("cut misses the domain")
    if cut.get("swap", False):
        plus = ~plus
    return Partition(domain, plus, dict(cut))


# ---------------------------------------------------------------------------
# admissibility and bordism


@dataclass
class AdmissibilityReport:
    radii: list[int]
    condition_i: list[float]
    condition_ii: list[float]
    threshold: float
    slope_max: float
    admissible: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "radii": self.radii,
            "condition_i": [round(v, 9) for v in self.condition_i],
            "condition_ii": [round(v, 9) for v in self.condition_ii],
            "threshold": self.threshold,
            "slope_max": self.slope_max,
            "admissible": self.admissible,
            "notes": self.notes,
        }


def default_threshold(domain: Domain) -> float:
    return min(domain.width, domain.height) / 4.0


def _universe(domain: Domain) -> np.ndarray:
    """Box sites plus exterior halo sites, the points on which balls are evaluated."""
    if len(domain.exterior) == 0:
        return domain.box_coords
    return np.unique(np.concatenate([domain.box_coords, domain.exterior]), axis=0)


def _max_cluster_diameter(coords: np.ndarray, periods: tuple[int, int]) -> float:
    if len(coords) == 0:
        return 0.0
    return max(set_diameter(coords[g], periods) for g in clusters(coords, periods))


def check_admissibility(domain: Domain, partition: Partition, r_max: int = DEFAULT_R_MAX,
                        bound_threshold: float | None = None,
                        slope_max: float = 2.0) -> AdmissibilityReport:
    """Finite-scale tables for the two admissibility conditions.

    condition_i[R] is the smallest S with B_R(W+) & B_R(W-) inside B_S(N);
    condition_ii[R] is the largest cluster diameter of B_R(exterior) & B_R(N).
    The verdict requires condition_i to grow with slope at most ``slope_max``
    and condition_ii to stay within ``bound_threshold`` for every R <= r_max.
    """
    if r_max < 1:
        raise GeometryError("r_max must be >= 1")
    threshold = default_threshold(domain) if bound_threshold is None else float(bound_threshold)
    periods = domain.periods
    uni = _universe(domain)
    d_plus = min_distance(uni, domain.coords[partition.plus], periods)
    d_minus = min_distance(uni, domain.coords[partition.minus], periods)
    d_n = min_distance(uni, domain.coords[partition.interface_mask], periods)
    d_ext = min_distance(uni, domain.exterior, periods)
    radii = list(range(1, r_max + 1))
    cond_i, cond_ii = [], []
    for R in radii:
        both = (d_plus <= R + 1e-9) & (d_minus <= R + 1e-9)
        cond_i.append(float(d_n[both].max()) if both.any() else 0.0)
        q = (d_ext <= R + 1e-9) & (d_n <= R + 1e-9)
        cond_ii.append(_max_cluster_diameter(uni[q], periods))
    slopes_ok = all(b - a <= slope_max + 1e-9 for a, b in zip(cond_i, cond_i[1:]))
    bounded = all(v <= threshold + 1e-9 for v in cond_ii)
    notes = ["condition (i) judged by slope of the S(R) table (finite-scale heuristic)"]
    if not bounded:
        notes.append("interface runs along the boundary: condition (ii) exceeds threshold")
    return AdmissibilityReport(radii, cond_i, cond_ii, threshold, slope_max,
                               slopes_ok and bounded, notes)


@dataclass
class BordismReport:
    radii: list[int]
    difference_diameter: list[float]
    threshold: float
    intersection: AdmissibilityReport
    bordant: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "radii": self.radii,
            "difference_diameter": [round(v, 9) for v in self.difference_diameter],
            "threshold": self.threshold,
            "intersection": self.intersection.to_dict(),
            "bordant": self.bordant,
        }


def bordant(p1: Partition, p2: Partition, domain: Domain, threshold: float | None = None,
            r_max: int = DEFAULT_R_MAX) -> tuple[bool, BordismReport]:
    """Whether two partitions differ only by a bounded region near the boundary."""
    threshold = default_threshold(domain) if threshold is None else float(threshold)
    periods = domain.periods
    diff = domain.coords[p1.plus ^ p2.plus]
    d_ext = min_distance(diff, domain.exterior, periods)
    radii = list(range(1, r_max + 1))
    diam = [_max_cluster_diameter(diff[d_ext <= R + 1e-9], periods) for R in radii]
    inter = p1.intersect(p2)
    if inter.plus.any() and inter.minus.any():
        rep = check_admissibility(domain, inter, r_max, threshold)
    else:
        rep = AdmissibilityReport(radii, [0.0] * r_max, [0.0] * r_max, threshold, 2.0, False,
                                  ["intersection of plus sides is empty"])
    ok = all(v <= threshold + 1e-9 for v in diam) and rep.admissible
    return ok, BordismReport(radii, diam, threshold, rep, ok)
