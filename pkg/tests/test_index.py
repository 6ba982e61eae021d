from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgeindex.geometry import build_domain, make_partition
from edgeindex.index import (AdmissibilityError, CrossingError, GaplessError, IndexSystem,
                             bloch_chern, bulk_gap, bulk_gaps, crossing_windows, exp_unitary,
                             find_crossings, localized_relative_index, relative_index_density,
                             spectral_flow, theta_report, total_relative_index)
from edgeindex.operators import (harper_hamiltonian, hopping_unitary, indicator_projection,
                                 ring_domain, ring_path)
from edgeindex.spectral import eigendecompose, make_smoothstep

from oracles import tknn


def comm(a, b):
    return a @ b - b @ a


# Chern numbers -----------------------------------------------------------------

def test_flux13_per_band():
    c = bloch_chern("1/3")
    assert c.per_band == [1, -2, 1]
    assert c.cumulative == [1, -1]


def test_flux15_cumulative():
    assert bloch_chern("1/5").cumulative[:2] == [1, 2]


@pytest.mark.parametrize("flux", ["1/3", "2/3", "1/5", "2/5", "3/7", "1/7", "-1/3"])
def test_chern_matches_tknn_oracle(flux):
    p, q = (int(v) for v in flux.split("/"))
    assert bloch_chern(flux).cumulative == tknn(p, q)


def test_zero_flux_single_band():
    c = bloch_chern("0")
    assert c.per_band == [0] and c.cumulative == []


@pytest.mark.parametrize("flux", ["1/3", "1/5"])
def test_chern_data_invariants(flux):
    c = bloch_chern(flux)
    assert sum(c.per_band) == 0
    assert c.cumulative == list(np.cumsum(c.per_band)[:-1])
    for grid, n in zip(c.curvature_grid, c.per_band):
        assert grid.sum() == pytest.approx(2 * np.pi * n, abs=1e-8)


@pytest.mark.parametrize("flux", ["1/3", "1/5"])
def test_chern_stable_under_refinement_and_gauge(flux):
    base = bloch_chern(flux)
    assert bloch_chern(flux, 2 * base.k_grid).per_band == base.per_band
    assert bloch_chern(flux, gauge="landau_y").per_band == base.per_band


def test_chern_grid_too_coarse():
    with pytest.raises(ValueError):
        bloch_chern("1/5", k_grid=12)


def test_even_denominator_closes_central_gap():
    gaps = bulk_gaps("1/4")
    assert gaps[1] is None and gaps[0] is not None and gaps[2] is not None
    assert bloch_chern("1/4").cumulative == [1, -1]
    with pytest.raises(GaplessError):
        bulk_gap("1/4", 3)


def test_trivial_insulator_chern_zero():
    c = bloch_chern("0", mass=1.0)
    assert c.cumulative == [0]


# exponential unitary ------------------------------------------------------------

def test_torus_unitary_is_identity():
    d = build_domain({"kind": "torus"}, (12, 12))
    ed = eigendecompose(harper_hamiltonian(d, "1/3"))
    u = exp_unitary(ed, make_smoothstep(bulk_gap("1/3", 1)), d, check=True)
    assert np.abs(u.matrix - np.eye(d.n)).max() <= 1e-10


def test_zero_step_gives_identity():
    d = build_domain({"kind": "cylinder"}, (6, 6))
    ed = eigendecompose(harper_hamiltonian(d, "1/3"))
    assert np.array_equal(exp_unitary(ed, None).matrix, np.eye(d.n))


def test_cylinder_unitary_twisted():
    d = build_domain({"kind": "cylinder"}, (30, 30))
    ed = eigendecompose(harper_hamiltonian(d, "1/3"))
    u = exp_unitary(ed, make_smoothstep(bulk_gap("1/3", 1)), d, check=True)
    assert np.linalg.norm(u.matrix - np.eye(d.n), 2) > 0.5


# traces ----------------------------------------------------------------------

RING = ring_domain(40)
V = hopping_unitary(ring_path(40), RING).matrix
HALF = indicator_projection(RING.coords[:, 0] < 20, RING)


def test_ring_windows_exact():
    left = RING.coords[:, 0] >= 10
    left &= RING.coords[:, 0] < 30
    right = ~left
    assert localized_relative_index(V, HALF, left) == 1.0
    assert localized_relative_index(V, HALF, right) == -1.0
    assert total_relative_index(V, HALF) == 0.0


def test_identity_unitary_zero():
    for w in (RING.coords[:, 0] < 7, RING.coords[:, 0] >= 0):
        assert localized_relative_index(np.eye(40), HALF, w) == 0.0


def test_window_with_two_crossings_rejected():
    d = build_domain({"kind": "strip", "width": 12, "periodic_y": False}, (12, 12))
    part = make_partition(d, {"kind": "horizontal", "y": 6})
    cr = [c for c in find_crossings(d, part) if c.physical]
    with pytest.raises(CrossingError):
        localized_relative_index(np.eye(d.n), part.plus, np.ones(d.n, bool), d, cr)


@given(st.integers(0, 2**31 - 1), st.integers(4, 30))
def test_total_trace_vanishes(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u, _ = np.linalg.qr(a)
    pi = rng.integers(0, 2, n).astype(float)
    assert abs(total_relative_index(u, pi)) <= 1e-9


@given(st.integers(0, 2**31 - 1), st.integers(3, 25))
def test_trace_identities(seed, n):
    rng = np.random.default_rng(seed)

    def herm():
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return m + m.conj().T

    a, b = herm(), herm()
    p = np.diag(rng.integers(0, 2, n).astype(float))
    assert abs(np.trace(comm(p, a))) <= 1e-10
    lhs = np.trace(a @ comm(p, b))
    mid = np.trace(comm(p @ a @ p, p @ b @ p) - p @ comm(a, b) @ p)
    rhs = -np.trace(b @ comm(p, a))
    assert abs(lhs - mid) <= 1e-10 * max(1.0, abs(lhs))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_relative_index_density_matches_matrix():
    rng = np.random.default_rng(3)
    u, _ = np.linalg.qr(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
    p = np.diag(rng.integers(0, 2, 9).astype(float))
    ref = np.diag(u @ p @ u.conj().T - p).real
    assert np.allclose(relative_index_density(u, p), ref, atol=1e-14)


# spectral flow ----------------------------------------------------------------

def test_spectral_flow_trivial():
    sf = spectral_flow("0", 20, 0.0, mass=1.0)
    assert (sf.left, sf.right) == (0, 0)


@pytest.mark.parametrize("flux,gap,expected", [("1/3", 1, 1), ("1/3", 2, -1), ("1/5", 2, 2),
                                               ("1/5", 1, 1)])
def test_spectral_flow_equals_cumulative_chern(flux, gap, expected):
    a, b = bulk_gap(flux, gap)
    sf = spectral_flow(flux, 30, 0.5 * (a + b))
    assert sf.left == sf.right == expected == bloch_chern(flux).cumulative[gap - 1]
    assert sf.unassigned == 0


def test_spectral_flow_rejects_band_energy():
    with pytest.raises(GaplessError):
        spectral_flow("1/3", 20, 0.0)


# pipeline ---------------------------------------------------------------------

STRIP = build_domain({"kind": "strip", "width": 30, "periodic_y": False}, (30, 60))
CUT = {"kind": "horizontal", "y": 30}


@pytest.fixture(scope="module")
def strip_system():
    return IndexSystem(STRIP, "1/3", 1)


@pytest.fixture(scope="module")
def strip_report(strip_system):
    return theta_report(STRIP, make_partition(STRIP, CUT), system=strip_system)


def test_strip_crossings_plus_minus_one(strip_report):
    assert strip_report.verdict == [1, -1]
    left, right = (c.crossing.center for c in strip_report.crossings)
    assert left[0] <= 2 and right[0] >= 27 and left[1] == right[1] in (29, 30)
    for c in strip_report.crossings:
        assert c.residual <= 0.05
        assert c.residual == pytest.approx(abs(c.raw - c.rounded))


def test_strip_regression_value(strip_report):
    # frozen from the full pipeline; agrees with the spectral-flow and Chern oracles
    assert strip_report.raw == pytest.approx([0.999988, -0.999988], abs=2e-6)


def test_total_trace_cancels(strip_report):
    assert abs(strip_report.total_trace) <= 1e-9


def test_swap_negates(strip_system, strip_report):
    swp = theta_report(STRIP, make_partition(STRIP, CUT).swapped(), system=strip_system)
    assert np.allclose(swp.raw, [-v for v in strip_report.raw], atol=1e-12)


def test_sweep_recorded(strip_report):
    sweep = strip_report.crossings[0].sweep
    assert set(sweep) >= {"4", "6", "8", "10", "cell"}
    assert abs(sweep["10"] - 1) < abs(sweep["4"] - 1)


def test_frame_crossings_reported(strip_report):
    # the cut reaches the left and right walls only; the frame rows are parallel to it
    assert strip_report.frame_crossings == []


def test_direct_sum_doubles(strip_system, strip_report):
    u = strip_system.unitary.matrix
    n = u.shape[0]
    big = np.zeros((2 * n, 2 * n), complex)
    big[:n, :n] = big[n:, n:] = u
    pi = make_partition(STRIP, CUT).plus.astype(float)
    crossings = find_crossings(STRIP, make_partition(STRIP, CUT))
    win = crossing_windows(STRIP, crossings)[0]
    doubled = localized_relative_index(big, np.r_[pi, pi], np.r_[win, win])
    assert doubled == pytest.approx(2 * strip_report.raw[0], abs=1e-9)


def test_torus_report_empty():
    t = build_domain({"kind": "torus"}, (12, 12))
    rep = theta_report(t, make_partition(t, {"kind": "horizontal", "y": 6}), "1/3", 1)
    assert rep.crossings == [] and rep.theta == 0


def test_inadmissible_partition_raises():
    part = make_partition(STRIP, {"kind": "vertical", "x": 2})
    with pytest.raises(AdmissibilityError) as exc:
        theta_report(STRIP, part, "1/3", 1)
    assert not exc.value.report.admissible


def test_report_serialises(strip_report):
    d = strip_report.to_dict()
    assert d["verdict"] == [1, -1] and d["convention"]
    assert d["admissibility"]["admissible"]
