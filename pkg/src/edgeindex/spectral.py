"""Functional calculus by exact eigendecomposition, smooth steps and gap diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.special import expit

from .geometry import Domain, pairwise_distance
from .operators import HermitianOperator, Operator


class SpectralError(ValueError):
    """Degenerate gap, failed decomposition or similar."""


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    norm: float

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def matrix(self, values: np.ndarray) -> np.ndarray:
        """``V diag(values) V^H`` for arbitrary (complex) spectral values."""
        V = self.eigenvectors
        return (V * np.asarray(values)) @ V.conj().T

    def diagonal(self, values: np.ndarray) -> np.ndarray:
        """Diagonal of ``V diag(values) V^H`` without forming the matrix."""
        V = self.eigenvectors
        return np.einsum("ik,k,ik->i", V, np.asarray(values), V.conj())


def eigendecompose(h: HermitianOperator | np.ndarray, check: bool = True) -> EigenDecomposition:
    """Full eigendecomposition with ascending eigenvalues.

    Uses the LAPACK MRRR driver, the fastest dense Hermitian solver for the
    matrix sizes used here.  Raises if the residual exceeds ``1e-9 ||H||``.
    """
    mat = h.matrix if isinstance(h, Operator) else np.asarray(h, dtype=complex)
    try:
        w, V = scipy.linalg.eigh(mat, driver="evr", check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        w, V = np.linalg.eigh(mat)
    norm = float(np.abs(w).max()) if len(w) else 0.0
    residual = 0.0
    if check and len(w):
        residual = float(np.abs(mat @ V - V * w).max())
        if residual > 1e-9 * max(norm, 1.0):
            raise SpectralError(f"eigendecomposition residual {residual:.2e} too large")
    return EigenDecomposition(w, V, residual, norm)


def apply_function(ed: EigenDecomposition, f: Callable[[np.ndarray], np.ndarray],
                   domain: Domain | None = None) -> HermitianOperator:
    """``f(H) = sum f(lambda_i) |v_i><v_i|`` for a real function ``f``."""
    vals = np.asarray(f(ed.eigenvalues), dtype=float)
    if vals.shape == ():
        vals = np.full(ed.n, float(vals))
    return HermitianOperator(ed.matrix(vals), domain)


# ---------------------------------------------------------------------------
# smooth steps


@dataclass(frozen=True)
class SmoothStep:
    """Nonincreasing step from 1 (at ``a`` and below) to 0 (at ``b`` and above)."""

    a: float
    b: float
    kind: str = "quintic"

    def __post_init__(self) -> None:
        if not self.a < self.b:
            raise SpectralError(f"degenerate gap ({self.a}, {self.b})")
        if self.kind not in ("quintic", "mollifier"):
            raise SpectralError(f"unknown smooth step kind {self.kind!r}")

    def _t(self, x: np.ndarray) -> np.ndarray:
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def phi(self, x: np.ndarray) -> np.ndarray:
        t = self._t(x)
        if self.kind == "quintic":
            return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)
        return self._mollifier(t)[0]

    def dphi(self, x: np.ndarray) -> np.ndarray:
        t = self._t(x)
        if self.kind == "quintic":
            return -30.0 * t**2 * (1.0 - t) ** 2 / (self.b - self.a)
        return self._mollifier(t)[1] / (self.b - self.a)

    @staticmethod
    def _mollifier(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # psi = f(1-t) / (f(t) + f(1-t)) with f(s) = exp(-1/s), written as a
        # logistic function of s = 1/t - 1/(1-t) to avoid underflow.
        # Within 1e-3 of either end psi is 0 or 1 to double precision and the
        # derivative underflows, so the logistic form is only evaluated inside.
        t = np.asarray(t, dtype=float)
        inner = (t > 1e-3) & (t < 1 - 1e-3)
        psi = np.where(t <= 0.5, 1.0, 0.0)
        dpsi = np.zeros_like(t)
        ti = t[inner]
        s = 1.0 / ti - 1.0 / (1.0 - ti)
        val = expit(s)
        psi = psi.astype(float)
        psi[inner] = val
        dpsi[inner] = -val * (1.0 - val) * (1.0 / ti**2 + 1.0 / (1.0 - ti) ** 2)
        return psi, dpsi

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.phi(x)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "kind": self.kind}


def make_smoothstep(gap: tuple[float, float], kind: str = "quintic") -> SmoothStep:
    a, b = (float(v) for v in gap)
    return SmoothStep(a, b, kind)


# ---------------------------------------------------------------------------
# gaps


@dataclass
class GapReport:
    gaps: list[tuple[float, float]]
    min_width: float
    fill_fraction: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "gaps": [[round(a, 12), round(b, 12)] for a, b in self.gaps],
            "min_width": self.min_width,
            "fill_fraction": [round(f, 12) for f in self.fill_fraction],
        }


def detect_gaps(eigenvalues: Sequence[float], min_width: float | None = None) -> GapReport:
    """Maximal open intervals between consecutive eigenvalues of width >= ``min_width``.

    The default ``min_width`` is ``1e-3`` times the spectral diameter.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if len(w) and np.any(np.diff(w) < 0):
        raise SpectralError("eigenvalues must be sorted")
    if min_width is None:
        min_width = 1e-3 * float(w[-1] - w[0]) if len(w) > 1 else 0.0
    gaps = []
    if len(w) > 1:
        spacing = np.diff(w)
        for i in np.flatnonzero(spacing >= max(min_width, 0.0) + 0.0):
            if spacing[i] > 0:
                gaps.append((float(w[i]), float(w[i + 1])))
    return GapReport(gaps, float(min_width))


def gap_filling_ratio(bulk: GapReport | Sequence[tuple[float, float]],
                      domain_spectrum: Sequence[float], eps: float | None = None,
                      edge_tol: float = 1e-9) -> list[float]:
    """Fraction of each bulk gap lying within ``eps`` of a domain eigenvalue.

    Only eigenvalues strictly inside a gap (by more than ``edge_tol``) count,
    so a spectrum equal to the bulk spectrum fills nothing.  ``eps`` defaults
    to a twentieth of each gap.
    """
    gaps = bulk.gaps if isinstance(bulk, GapReport) else list(bulk)
    lam = np.asarray(domain_spectrum, dtype=float)
    out = []
    for lo, hi in gaps:
        e = (hi - lo) / 20.0 if eps is None else float(eps)
        if e <= 0:
            raise SpectralError("fill resolution must be positive")
        inside = np.sort(lam[(lam > lo + edge_tol) & (lam < hi - edge_tol)])
        covered = 0.0
        cur_lo = cur_hi = None
        for v in inside:
            s, t = max(lo, v - e), min(hi, v + e)
            if cur_hi is None or s > cur_hi:
                if cur_hi is not None:
                    covered += cur_hi - cur_lo
                cur_lo, cur_hi = s, t
            else:
                cur_hi = max(cur_hi, t)
        if cur_hi is not None:
            covered += cur_hi - cur_lo
        out.append(covered / (hi - lo))
    if isinstance(bulk, GapReport):
        bulk.fill_fraction = out
    return out


def hausdorff_one_sided(source: Sequence[float], target: Sequence[float]) -> float:
    """``max_{s in source} min_{t in target} |s - t|``."""
    s = np.asarray(source, dtype=float)
    t = np.sort(np.asarray(target, dtype=float))
    pos = np.clip(np.searchsorted(t, s), 1, len(t) - 1)
    return float(np.minimum(np.abs(s - t[pos - 1]), np.abs(s - t[pos])).max())


# ---------------------------------------------------------------------------
# kernel decay


@dataclass
class DecayProfile:
    offdiagonal: dict[int, float]
    boundary: dict[int, float]
    boundary_pair: dict[int, float] = field(default_factory=dict)

    def ratio(self, table: str, hi: int = 10, lo: int = 2) -> float:
        t = getattr(self, table)
        return t.get(hi, 0.0) / t[lo] if t.get(lo) else float("inf")

    def to_dict(self) -> dict:
        return {name: {str(k): v for k, v in getattr(self, name).items()}
                for name in ("offdiagonal", "boundary", "boundary_pair")}


def kernel_decay_profile(a: Operator | np.ndarray, domain: Domain, which: str = "physical",
                         max_bucket: int | None = None) -> DecayProfile:
    """Max-entry tables of an operator kernel.

    ``offdiagonal[k]`` is the largest ``|a(x, y)|`` with ``floor(d(x, y)) == k``
    for ``x != y``; ``boundary[k]`` is the largest row entry ``max_y |a(x, y)|``
    over sites with ``floor(d(x, dW)) == k``; ``boundary_pair[k]`` is the
    largest ``|a(x, y)|`` with ``floor(min(d(x, dW), d(y, dW))) == k``, the
    quantity bounded by ``(1 + d(x))^-nu + (1 + d(y))^-nu`` for kernels
    supported near the boundary.  ``which`` selects the physical or the full
    boundary.
    """
    mat = np.abs(a.matrix if isinstance(a, Operator) else np.asarray(a))
    d = pairwise_distance(domain.coords, domain.coords, domain.periods)
    bucket = np.floor(d + 1e-9).astype(int)
    off = ~np.eye(domain.n, dtype=bool)
    offdiag: dict[int, float] = {}
    top = bucket.max() if max_bucket is None else max_bucket
    for k in range(0, int(top) + 1):
        sel = off & (bucket == k)
        if sel.any():
            offdiag[k] = float(mat[sel].max())
    bd = domain.boundary_distance(which)
    boundary: dict[int, float] = {}
    pair: dict[int, float] = {}
    rowmax = mat.max(axis=1)
    if np.isfinite(bd).any():
        bb = np.floor(bd + 1e-9).astype(int)
        pb = np.minimum.outer(bb, bb)
        for k in range(0, int(bb.max()) + 1):
            sel = bb == k
            if sel.any():
                boundary[k] = float(rowmax[sel].max())
                pair[k] = float(mat[pb == k].max())
    return DecayProfile(offdiag, boundary, pair)
