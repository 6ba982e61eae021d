"""Independent reference computations used by the tests.

These do not import the package: they rebuild the needed objects from
scratch so agreement is a genuine cross-check.
"""
from __future__ import annotations

import math

import numpy as np


def harper_chain(p: int, q: int, kx: float, ky: float) -> np.ndarray:
    """q x q Bloch matrix of the Harper model in the Landau gauge (x-periodic cell)."""
    a = p / q
    h = np.diag(-2 * np.cos(ky + 2 * np.pi * a * np.arange(q))).astype(complex)
    for j in range(q - 1):
        h[j + 1, j] = h[j, j + 1] = -1
    if q > 2:
        h[0, q - 1] += -np.exp(-1j * q * kx)
        h[q - 1, 0] += -np.exp(1j * q * kx)
    elif q == 2:
        h[0, 1] += -np.exp(-2j * kx)
        h[1, 0] += -np.exp(2j * kx)
    else:
        h[0, 0] += -2 * np.cos(kx)
    return h


def chambers_band_edges(p: int, q: int) -> list[tuple[float, float]]:
    """Band edges from det(E - H(k)) = P(E) - 2 cos(q kx) - 2 cos(q ky).

    P is read off at a k point where both cosines vanish; the edges are the
    roots of P(E) = +-4.
    """
    k = np.pi / (2 * q)
    poly = np.real(np.poly(np.linalg.eigvalsh(harper_chain(p, q, k, k))))
    up = np.sort(np.roots(poly - np.r_[np.zeros(q), 4.0]).real)
    dn = np.sort(np.roots(poly + np.r_[np.zeros(q), 4.0]).real)
    edges = np.sort(np.concatenate([up, dn]))
    return [(float(edges[2 * i]), float(edges[2 * i + 1])) for i in range(q)]


def tknn(p: int, q: int) -> list[int]:
    """Hall conductance below gap r from r = q s + p t with |t| <= q/2."""
    out = []
    for r in range(1, q):
        sols = [t for t in range(-q, q + 1)
                if abs(t) <= q / 2 and (r - p * t) % q == 0]
        if len(sols) != 1:
            raise ValueError(f"ambiguous Diophantine solution for r={r}")
        out.append(sols[0])
    return out


def gauss_integral(f, a: float, b: float, n: int = 64) -> float:
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return float(half * np.sum(w * f(mid + half * x)))


def quintic(t: float) -> float:
    t = min(max(t, 0.0), 1.0)
    return 1 - (10 * t**3 - 15 * t**4 + 6 * t**5)


SQ3 = math.sqrt(3)
# closed-form flux 1/3 band edges: roots of E^3 - 6E = +-4
FLUX13_BANDS = [(-1 - SQ3, -2.0), (1 - SQ3, SQ3 - 1), (2.0, 1 + SQ3)]
