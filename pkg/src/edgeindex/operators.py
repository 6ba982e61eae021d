"""Magnetic lattice Hamiltonians and the other operators of the model.

All operators are dense complex matrices over a domain's row-major site basis.
The Hamiltonian is the Harper model in Landau gauge ``A = x dy``::

    <x+1, y | H | x, y> = -1,     <x, y+1 | H | x, y> = -exp(2 pi i (p/q) x)

with Dirichlet conditions, i.e. hoppings leaving the domain are dropped.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .geometry import Domain, GeometryError, Site

DENSE_LIMIT = 4096


class OperatorError(ValueError):
    """Invalid operator construction."""


class FluxError(OperatorError):
    """Flux incompatible with itself or with the domain's periodic axes."""


@dataclass(frozen=True)
class FluxSpec:
    """Flux per plaquette ``p/q`` in units of the flux quantum."""

    p: int
    q: int = 1

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise FluxError("flux denominator must be positive")
        if math.gcd(self.p, self.q) != 1:
            raise FluxError(f"flux {self.p}/{self.q} is not in lowest terms")

    @classmethod
    def parse(cls, text: str | int | float | Sequence[int] | "FluxSpec") -> "FluxSpec":
        if isinstance(text, FluxSpec):
            return text
        if isinstance(text, (list, tuple)):
            return cls(int(text[0]), int(text[1]))
        if isinstance(text, int):
            return cls(text, 1)
        s = str(text).strip()
        if "/" in s:
            num, den = s.split("/", 1)
            try:
                return cls(int(num), int(den))
            except ValueError as exc:
                raise FluxError(f"malformed flux {text!r}") from exc
        try:
            frac = Fraction(s)
        except ValueError as exc:
            raise FluxError(f"malformed flux {text!r}") from exc
        return cls(frac.numerator, frac.denominator)

    @property
    def alpha(self) -> float:
        return self.p / self.q

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def check_domain(self, domain: Domain) -> None:
        if domain.wrap[0] and domain.width % self.q:
            raise FluxError(f"flux {self} needs q | width on a periodic x axis "
                            f"(width {domain.width})")


# ---------------------------------------------------------------------------
# operator classes


class Operator:
    """A square matrix tied to a domain's site order."""

    def __init__(self, matrix: np.ndarray, domain: Domain | None = None) -> None:
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise OperatorError("operator matrix must be square")
        if domain is not None and m.shape[0] != domain.n:
            raise OperatorError("matrix size does not match domain")
        m.setflags(write=False)
        self.matrix = m
        self.domain = domain

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "Operator | np.ndarray") -> np.ndarray:
        rhs = other.matrix if isinstance(other, Operator) else other
        return self.matrix @ rhs

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def to_coo_rows(self, tol: float = 0.0) -> list[tuple[int, int, float, float]]:
        rows, cols = np.nonzero(np.abs(self.matrix) > tol)
        vals = self.matrix[rows, cols]
        return [(int(r), int(c), float(v.real), float(v.imag)) for r, c, v in zip(rows, cols, vals)]

    def write_csv(self, path: str | Path, tol: float = 0.0) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "re", "im"])
            writer.writerows(self.to_coo_rows(tol))


class HermitianOperator(Operator):
    """Hermitian matrix; the Hermitian part is taken at construction, so M == M^H exactly."""

    def __init__(self, matrix: np.ndarray, domain: Domain | None = None) -> None:
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        super().__init__(m, domain)


class ProjectionOperator(HermitianOperator):
    def __init__(self, matrix: np.ndarray, domain: Domain | None = None,
                 kind: str = "spectral") -> None:
        super().__init__(matrix, domain)
        self.kind = kind

    @property
    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def idempotency_error(self) -> float:
        return float(np.abs(self.matrix @ self.matrix - self.matrix).max())


class UnitaryOperator(Operator):
    def __init__(self, matrix: np.ndarray, domain: Domain | None = None,
                 check: bool = True) -> None:
        super().__init__(matrix, domain)
        if check and self.unitarity_error() > 1e-10:
            raise OperatorError(f"matrix is not unitary (error {self.unitarity_error():.2e})")

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.abs(m @ m.conj().T - np.eye(self.n)).max())

    @property
    def H(self) -> "UnitaryOperator":
        return UnitaryOperator(self.matrix.conj().T, self.domain, check=False)


# ---------------------------------------------------------------------------
# Hamiltonians


def harper_hamiltonian(domain: Domain, flux: FluxSpec | str, mass: float = 0.0,
                       shift: float = 0.0) -> HermitianOperator:
    """Harper Hamiltonian on ``domain`` with Dirichlet conditions.

    Parameters
    ----------
    domain : Domain
        Site set and wrap flags.  A periodic x axis needs ``q | width``; the
        y hopping phase does not depend on y, so a periodic y axis is always fine.
    flux : FluxSpec or str
        Flux per plaquette ``p/q``.
    mass : float
        Optional staggered on-site potential ``mass * (-1)**(x+y)``; with zero
        flux this is a trivial insulator with a gap ``(-|mass|, |mass|)``.
    shift : float
        Constant added to the diagonal (``4`` recovers a non-negative operator).
    """
    flux = FluxSpec.parse(flux)
    flux.check_domain(domain)
    nb = domain.neighbour_table()
    x = domain.coords[:, 0]
    y = domain.coords[:, 1]
    rows, cols, vals = [], [], []
    src = np.arange(domain.n)
    # +x hopping
    right = nb[:, 0]
    ok = right >= 0
    rows.append(right[ok]); cols.append(src[ok]); vals.append(-np.ones(ok.sum(), complex))
    # +y hopping with the Landau phase
    up = nb[:, 2]
    ok = up >= 0
    rows.append(up[ok]); cols.append(src[ok])
    vals.append(-np.exp(2j * np.pi * flux.alpha * x[ok]))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    # Hermitian completion
    r, c, v = np.concatenate([r, c]), np.concatenate([c, r]), np.concatenate([v, v.conj()])
    onsite = shift + mass * (1 - 2 * ((x + y) % 2))
    if np.any(onsite):
        r = np.concatenate([r, src]); c = np.concatenate([c, src])
        v = np.concatenate([v, onsite.astype(complex)])
    mat = sp.coo_matrix((v, (r, c)), shape=(domain.n, domain.n)).toarray()
    return HermitianOperator(mat, domain)


def magnetic_translation(domain: Domain, step: tuple[int, int], flux: FluxSpec | str,
                         compensate: bool = True) -> UnitaryOperator:
    """Magnetic translation ``T|x,y> = exp(i chi)|x+a, y+b>`` on a torus.

    With ``compensate`` the phase is ``chi = 2 pi (p/q) a y``, which makes ``T``
    commute with the Harper Hamiltonian for every step whose phase is single
    valued around the y cycle, i.e. ``(p/q) a height`` is an integer.
    """
    flux = FluxSpec.parse(flux)
    if domain.kind != "torus" or not all(domain.wrap) or domain.n != domain.width * domain.height:
        raise OperatorError("magnetic translations are defined on full tori only")
    flux.check_domain(domain)
    a, b = (int(s) for s in step)
    x = domain.coords[:, 0]
    y = domain.coords[:, 1]
    chi = np.zeros(domain.n)
    if compensate:
        if (a * flux.p * domain.height) % flux.q:
            raise OperatorError(f"step {step} is incompatible with flux {flux} on this torus")
        chi = 2 * np.pi * flux.alpha * a * y
    target = domain.lookup(x + a, y + b)
    mat = np.zeros((domain.n, domain.n), complex)
    mat[target, np.arange(domain.n)] = np.exp(1j * chi)
    return UnitaryOperator(mat, domain)


def compress(op: Operator | np.ndarray, big: Domain, sub: Domain) -> np.ndarray:
    """Principal submatrix of ``op`` on the sites of ``sub`` (in ``sub``'s order)."""
    mat = op.matrix if isinstance(op, Operator) else np.asarray(op)
    if mat.shape != (big.n, big.n):
        raise OperatorError("operator does not live on the big domain")
    idx = big.lookup(sub.coords[:, 0], sub.coords[:, 1])
    if (idx < 0).any():
        raise GeometryError("sub-domain sites are not contained in the big domain")
    return mat[np.ix_(idx, idx)]


def hopping_unitary(path: Sequence[Any], domain: Domain, closed: bool = True) -> UnitaryOperator:
    """Permutation unitary moving each path site to the next one, identity elsewhere.

    ``v|s_k> = |s_{k+1}>`` and the last site returns to the first, so both
    variants are the same cyclic permutation.  ``closed=True`` additionally
    requires the path to be a lattice loop (last and first sites adjacent);
    ``closed=False`` accepts any path and the return hop is nonlocal.
    """
    coords = np.asarray([tuple(s) for s in path], dtype=np.int64).reshape(-1, 2)
    if len({tuple(p) for p in coords}) != len(coords):
        raise OperatorError("path visits a site twice")
    idx = domain.lookup(coords[:, 0], coords[:, 1]) if len(coords) else np.empty(0, int)
    if (idx < 0).any():
        raise GeometryError("path leaves the domain")
    if closed and len(coords) > 2:
        from .geometry import pairwise_distance
        d = pairwise_distance(coords[-1], coords[0], domain.periods)[0, 0]
        if abs(d - 1.0) > 1e-9:
            raise OperatorError("closed path must end next to its first site")
    perm = np.arange(domain.n)
    if len(idx) > 1:
        perm[idx] = np.roll(idx, -1)
    mat = np.zeros((domain.n, domain.n), complex)
    mat[perm, np.arange(domain.n)] = 1.0
    return UnitaryOperator(mat, domain)


def indicator_projection(sites: Iterable[Any] | np.ndarray, domain: Domain) -> ProjectionOperator:
    """Multiplication by the characteristic function of ``sites``.

    ``sites`` may be a boolean mask over the domain or a collection of sites.
    """
    if isinstance(sites, np.ndarray) and sites.dtype == bool:
        mask = sites
        if mask.shape != (domain.n,):
            raise OperatorError("mask does not match domain")
    else:
        mask = domain.mask(sites)
    return ProjectionOperator(np.diag(mask.astype(complex)), domain, kind="indicator")


def ring_domain(length: int) -> Domain:
    """A single periodic row of ``length`` sites, the home of the shift models."""
    from .geometry import build_domain
    if length < 3:
        raise GeometryError("ring needs at least three sites")
    return build_domain({"kind": "torus"}, (length, 1))


def ring_path(length: int) -> list[Site]:
    return [Site(i, 0) for i in range(length)]
