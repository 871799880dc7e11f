import numpy as np
import pytest

from coldgate import mott
from coldgate.errors import ValidationError


def test_superlattice_profile():
    assert mott.superlattice(0, 0, 40.0, 9.0) == pytest.approx(0.0)
    assert mott.superlattice(4.5, 0, 40.0, 9.0) == pytest.approx(40.0)
    assert mott.superlattice(4.5, 4.5, 40.0, 9.0) == pytest.approx(80.0)
    with pytest.raises(ValidationError):
        mott.superlattice(0, 0, 40.0, 0.0)


def test_lattice_validation():
    with pytest.raises(ValidationError):
        mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=0.0, mu=1.0)
    with pytest.raises(ValidationError):
        mott.BoseHubbardLattice(Lx=0, Ly=4, J=1.0, U=1.0, mu=1.0)
    with pytest.raises(ValidationError):
        mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=1.0, mu=1.0, boundary="twisted")
    with pytest.raises(ValidationError):
        mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=1.0, mu=1.0, eps=np.zeros((3, 3)))


def test_neighbors_periodic_vs_open():
    lat = mott.BoseHubbardLattice(Lx=3, Ly=3, J=1.0, U=1.0, mu=1.0, boundary="periodic")
    assert len(lat.neighbors(0, 0)) == 4
    lat_o = mott.BoseHubbardLattice(Lx=3, Ly=3, J=1.0, U=1.0, mu=1.0, boundary="open")
    assert len(lat_o.neighbors(0, 0)) == 2
    assert len(lat_o.neighbors(1, 1)) == 4


def test_uniform_mott_phase():
    lat = mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=30.0, mu=15.0)
    st = mott.gutzwiller_minimize(lat)
    assert np.allclose(st.density, 1.0, atol=1e-8)
    assert np.max(st.number_variance) < 1e-8
    labels = mott.phase_classify(st)
    assert all(labels[i, j] == "MI(1)" for i in range(4) for j in range(4))


def test_shallow_lattice_is_superfluid():
    lat = mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=2.0, mu=1.0)
    st = mott.gutzwiller_minimize(lat)
    assert np.max(np.abs(st.order_parameter)) > 0.1
    labels = mott.phase_classify(st)
    assert "SF" in labels


def test_atomic_limit_exact():
    lat = mott.BoseHubbardLattice.with_superlattice(6, 6, J=0.0, U=30.0, mu=15.0, amplitude=40.0, period=3.0)
    st = mott.gutzwiller_minimize(lat)
    n = np.arange(st.n_max + 1)
    for i in range(6):
        for j in range(6):
            n_star = int(np.argmin(0.5 * lat.U * n * (n - 1) + (lat.eps[i, j] - lat.mu) * n))
            assert st.density[i, j] == pytest.approx(n_star, abs=1e-10)


def test_energy_not_above_atomic_start():
    lat = mott.BoseHubbardLattice(Lx=4, Ly=4, J=1.0, U=8.0, mu=4.0)
    st = mott.gutzwiller_minimize(lat)
    atomic = mott.GutzwillerState(lattice=lat, f=mott._atomic_limit_f(lat, st.n_max).astype(complex))
    assert st.energy() <= atomic.energy() + 1e-9


def test_superlattice_loading_patterns():
    # deep superlattice, mu below the offset: only the low-offset sites fill
    lat = mott.BoseHubbardLattice.with_superlattice(18, 18, J=1.0, U=30.0, mu=15.0, amplitude=40.0, period=9.0)
    st = mott.gutzwiller_minimize(lat)
    rho = st.density
    assert np.all(np.minimum(np.abs(rho), np.abs(rho - 1.0)) < 1e-3)
    assert int(np.sum(rho > 0.5)) == 36
    # raising mu over the first offset shell fills more sites
    lat2 = mott.BoseHubbardLattice.with_superlattice(18, 18, J=1.0, U=50.0, mu=27.0, amplitude=40.0, period=9.0)
    st2 = mott.gutzwiller_minimize(lat2)
    assert int(np.sum(st2.density > 0.5)) == 84


def test_density_and_variance_definitions():
    lat = mott.BoseHubbardLattice(Lx=2, Ly=2, J=0.1, U=10.0, mu=5.0)
    f = np.zeros((2, 2, 4), dtype=complex)
    f[:, :, 1] = np.sqrt(0.5)
    f[:, :, 2] = np.sqrt(0.5)
    st = mott.GutzwillerState(lattice=lat, f=f)
    assert np.allclose(st.density, 1.5)
    assert np.allclose(st.number_variance, 0.25)
    assert st.total_particles == pytest.approx(6.0)
