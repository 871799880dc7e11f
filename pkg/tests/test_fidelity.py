import numpy as np
import pytest

from coldgate import fidelity, switching, traps
from coldgate.errors import ValidationError


def test_thermal_state_zero_temperature():
    st = fidelity.thermal_state(1.0, 0.0)
    assert st.p[0] == 1.0
    assert st.n_max == 0


def test_thermal_state_normalization_and_tail():
    st = fidelity.thermal_state(1.0, 0.5)
    assert float(np.sum(st.p)) == pytest.approx(1.0, abs=1e-12)
    q = np.exp(-1.0 / 0.5)
    assert q ** (st.n_max + 1) <= 1e-10
    # geometric ratio
    assert st.p[1] / st.p[0] == pytest.approx(q, rel=1e-9)


def test_thermal_state_negative_kt_rejected():
    with pytest.raises(ValidationError):
        fidelity.thermal_state(1.0, -0.1)


def test_ideal_channel_is_perfect():
    assert fidelity.min_fidelity(fidelity.ideal_channel()) == pytest.approx(1.0, abs=1e-9)
    assert fidelity.min_fidelity(fidelity.ideal_channel(symmetrized=True), symmetrized=True) == pytest.approx(1.0, abs=1e-9)


def test_min_fidelity_finds_phase_conflict():
    # opposite unit phases on two channels: the balanced superposition has
    # zero fidelity
    vs = {"aa": 1.0 + 0j, "ab": 1.0 + 0j, "ba": 1.0 + 0j, "bb": -1.0 + 0j}
    chan = fidelity.GateChannel(basis=("aa", "ab", "ba", "bb"), overlaps=lambda n1, n2: vs)
    assert fidelity.min_fidelity(chan) == pytest.approx(0.0, abs=1e-8)


def test_min_fidelity_pure_loss_channel():
    # a single channel with amplitude o < 1 and no phase error: the worst
    # input concentrates all weight there, F = o^2 + (1 - o^2) recovers the
    # incoherent floor at w = 1
    o = 0.6
    vs = {"aa": 1.0 + 0j, "ab": 1.0 + 0j, "ba": 1.0 + 0j, "bb": o + 0j}
    chan = fidelity.GateChannel(basis=("aa", "ab", "ba", "bb"), overlaps=lambda n1, n2: vs)
    f = fidelity.min_fidelity(chan)
    # minimize w*o + ... analytically over the two-level reduction
    ws = np.linspace(0, 1, 20001)
    ref = np.min((1 - ws + ws * o) ** 2 + ws**2 * (1 - o**2))
    assert f == pytest.approx(float(ref), abs=1e-6)


def test_symmetrized_flag_requires_symmetrized_basis():
    with pytest.raises(ValidationError):
        fidelity.min_fidelity(fidelity.ideal_channel(), symmetrized=True)


def test_moving_channel_trivial_paths_are_ideal():
    slow = traps.sine_squared_path(0.05, 60.0, 1.0)
    chan = fidelity.moving_channel(slow, slow)
    assert fidelity.min_fidelity(chan) == pytest.approx(1.0, abs=1e-6)


def test_moving_channel_monotone_in_temperature():
    traj_a = traps.sine_squared_path(0.5, 8.0, 1.0)
    traj_b = traps.sine_squared_path(6.0, 8.0, 1.0)
    chan = fidelity.moving_channel(traj_a, traj_b)
    fs = []
    for kt in (0.0, 0.1, 0.2, 0.4):
        rho = fidelity.thermal_state(1.0, kt) if kt > 0 else None
        fs.append(fidelity.min_fidelity(chan, rho))
    assert all(fs[i + 1] <= fs[i] + 1e-12 for i in range(3))


def test_switching_channel_reference_point(ref_cfg, bb_series, b_series):
    chan = fidelity.switching_channel(ref_cfg, bb_series, b_series, tau=bb_series.tau, frame_tau=bb_series.tau)
    vs = chan.overlaps(0, 0)
    assert set(vs) == {"aa", "ab", "bb"}
    # frame calibration makes the one-particle channels pure-amplitude
    assert np.angle(vs["aa"]) == pytest.approx(0.0, abs=1e-9)
    assert abs(np.angle(vs["ab"])) < 1e-6
    assert abs(vs["bb"]) == pytest.approx(np.sqrt(bb_series.revival) * abs(switching.cm_overlap_complex(2.0, 1.0, bb_series.tau)), abs=5e-3)
    f = fidelity.min_fidelity(chan, symmetrized=True)
    assert f > 0.98


def test_timing_sensitivity_shape(ref_cfg, bb_series, b_series):
    def factory(tau):
        return fidelity.switching_channel(ref_cfg, bb_series, b_series, tau=tau, frame_tau=bb_series.tau)

    curve = fidelity.timing_sensitivity(factory, bb_series.tau, delta=2e-3, n_side=6, symmetrized=True)
    assert len(curve.offsets) == 13
    imax = int(np.argmax(curve.fidelity))
    assert abs(curve.offsets[imax]) <= 4e-3
    assert np.isfinite(curve.half_width)

