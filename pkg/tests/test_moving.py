import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from coldgate import cli, moving, traps
from coldgate.errors import HierarchyViolated, PerturbationInvalid


def test_coherent_solution_matches_grid_oracle():
    # two representative paths; the full benchmark set runs in the
    # acceptance gate
    for traj in (traps.sine_squared_path(4.0, 30.0, 0.5), traps.sine_squared_path(6.0, 25.0, 2.0)):
        assert cli.transport_grid_overlap(traj) >= 1 - 1e-6


def test_adiabaticity_relation():
    traj = traps.sine_squared_path(6.0, 9.0, 1.0)
    r, pop = moving.adiabaticity_residual(traj)
    ev = moving.evolve_coherent(traj, traj.tau)
    alpha = float(np.asarray(traj.x(traj.tau))) / np.sqrt(2)
    ground = abs(ev.overlap_with_coherent(alpha)) ** 2
    assert (1.0 - ground) == pytest.approx(pop, abs=1e-8)
    assert pop == pytest.approx(-np.expm1(-(r**2) / 2), abs=1e-12)


def test_kinetic_phase_adiabatic_limit():
    # slow transport: the exact phase approaches the velocity-squared integral
    traj = traps.sine_squared_path(2.0, 80.0, 1.0)
    exact = moving.kinetic_phase(traj, exact=True)
    approx = moving.kinetic_phase(traj, exact=False)
    assert exact == pytest.approx(approx, abs=2e-3)


def test_evolution_amplitudes_normalized():
    traj = traps.sine_squared_path(3.0, 6.0, 1.0)
    ev = moving.evolve_coherent(traj, traj.tau)
    occ = ev.occupation(60)
    assert float(np.sum(occ)) == pytest.approx(1.0, abs=1e-10)
    n = np.arange(61)
    assert float(np.dot(n, occ)) == pytest.approx(abs(ev.gamma) ** 2, abs=1e-9)


def test_gaussian_density_product_against_quadrature():
    sep, w1, w2 = 1.3, 0.8, 1.4

    def n1(x):
        return np.exp(-(x**2) / w1**2) / (w1 * np.sqrt(np.pi))

    def n2(x):
        return np.exp(-((x - sep) ** 2) / w2**2) / (w2 * np.sqrt(np.pi))

    ref, _ = quad(lambda x: n1(x) * n2(x), -20, 20)
    assert moving.gaussian_density_product(sep, w1, w2) == pytest.approx(ref, rel=1e-10)


@given(st.floats(0, 5), st.floats(0.3, 3), st.floats(0.3, 3))
@settings(max_examples=50)
def test_mode_overlap_bounded(sep, w1, w2):
    ov = moving.gaussian_mode_overlap(sep, w1, w2)
    assert 0.0 < ov <= 1.0 + 1e-12


def test_mode_overlap_identical_is_one():
    assert moving.gaussian_mode_overlap(0.0, 1.2, 1.2) == pytest.approx(1.0)


def test_interaction_shift_analytic():
    a_s = 5e-3
    full = moving.interaction_shift(0.0, a_s, same_state=True)
    assert full == pytest.approx(np.sqrt(2 / np.pi) * a_s, abs=1e-12)
    # at full overlap the bosonic enhancement exactly cancels the
    # symmetrization denominator
    assert full == pytest.approx(moving.interaction_shift(0.0, a_s, same_state=False), abs=1e-14)


def test_interaction_shift_same_state_doubles_at_large_separation():
    a_s = 1e-3
    sep = 8.0
    distinct = moving.interaction_shift(sep, a_s, same_state=False)
    same = moving.interaction_shift(sep, a_s, same_state=True)
    assert same == pytest.approx(2 * distinct, rel=1e-8)


def test_collisional_phase_perturbative_matches_direct_integral():
    t1 = traps.Trajectory(tau=10.0, x=lambda t: -2.0 + 0.0 * np.asarray(t), dx=lambda t: 0.0 * np.asarray(t))
    t2 = traps.Trajectory(tau=10.0, x=lambda t: 2.0 + 0.0 * np.asarray(t), dx=lambda t: 0.0 * np.asarray(t))
    a_s = 1e-3
    phi = moving.collisional_phase_perturbative(t1, t2, a_s)
    expected = 20.0 * moving.interaction_shift(4.0, a_s)
    assert phi == pytest.approx(expected, rel=1e-8)


def test_collisional_phase_validity_guard():
    t1 = traps.Trajectory(tau=5.0, x=lambda t: 0.0 * np.asarray(t))
    t2 = traps.Trajectory(tau=5.0, x=lambda t: 0.0 * np.asarray(t))
    with pytest.raises(PerturbationInvalid):
        moving.collisional_phase_perturbative(t1, t2, 1.0)
    with pytest.warns(UserWarning):
        moving.collisional_phase_perturbative(t1, t2, 0.2)


def test_gate_map_reduction():
    p = moving.GatePhases(phi_a=0.3, phi_b=0.7, phi_ab=0.1, phi_aa=0.05, phi_bb=0.9)
    full, reduced = moving.gate_map(p)
    assert full["ab"] == pytest.approx(np.exp(-1j * (0.3 + 0.7)) * reduced["ab"])
    assert reduced["ba"] == reduced["ab"]
    assert reduced["bb"] == pytest.approx(np.exp(-1j * 0.9))


def test_correction_expansion_is_exact_identity():
    traj = traps.sine_squared_path(3.0, 12.0, 1.0)
    tau = traj.tau
    direct, _ = quad(lambda s: float(np.asarray(traj.x(s))) * np.cos(s + tau) / np.sqrt(2), -tau, tau, limit=400)
    directi, _ = quad(lambda s: float(np.asarray(traj.x(s))) * np.sin(s + tau) / np.sqrt(2), -tau, tau, limit=400)
    ref = direct + 1j * directi
    for order in (1, 2, 4):
        exp = moving.correction_terms(traj, order)
        assert exp.total == pytest.approx(ref, abs=1e-9)


def test_correction_expansion_hierarchy_warning():
    # a fast path has no small parameter; higher boundary terms grow
    traj = traps.sine_squared_path(5.0, 2.0, 4.0)
    with pytest.warns(HierarchyViolated):
        moving.correction_terms(traj, 4)
