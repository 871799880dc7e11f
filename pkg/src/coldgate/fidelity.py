"""Minimum gate fidelity over internal two-atom inputs with thermal motion.

A gate channel is modeled per internal basis pair s by a single complex
number v_s = e^{i(theta_s - theta_ideal_s)} * o_s: the actual phase relative
to the ideal one times the motional revival amplitude.  Motional components
that fail to revive are treated as orthogonal between channels (worst case),
giving

    F(|phi>) = |sum_s w_s v_s|^2 + sum_s w_s^2 (1 - |v_s|^2),  w_s = |c_s|^2

per thermally occupied level, averaged with the level probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize
from scipy.special import eval_laguerre

from .errors import OptimizationNotConverged, ValidationError
from .moving import evolve_coherent
from .switching import SingleParticleSeries, SwitchTimeSeries, cm_overlap_complex
from .traps import SwitchingConfig, Trajectory


@dataclass
class ThermalMotionalState:
    """Boltzmann occupation of oscillator levels; kT and omega in the same
    energy convention (only the ratio kT/(hbar*omega) matters)."""

    omega: float
    kT: float
    n_max: int
    p: np.ndarray

    def __post_init__(self):
        if abs(float(np.sum(self.p)) - 1.0) > 1e-12:
            raise ValidationError("occupations not normalized")


def thermal_state(omega: float, kT: float, n_max: int = 0) -> ThermalMotionalState:
    """p_n proportional to exp(-n*omega/kT); n_max auto-raised until the
    truncated tail is below 1e-10."""
    if kT < 0:
        raise ValidationError("kT must be >= 0")
    if kT == 0:
        return ThermalMotionalState(omega=omega, kT=kT, n_max=max(n_max, 0), p=np.r_[1.0, np.zeros(max(n_max, 0))])
    q = float(np.exp(-omega / kT))
    n = max(n_max, 1)
    while q ** (n + 1) > 1e-10:
        n += 1
    ns = np.arange(n + 1)
    p = (1 - q) * q**ns
    p = p / p.sum()  # fold the sub-1e-10 tail back in
    return ThermalMotionalState(omega=omega, kT=kT, n_max=n, p=p)


@dataclass
class GateChannel:
    """Internal-basis channel description.

    basis: internal pair labels; overlaps(n1, n2) returns {s: v_s} for both
    atoms starting in motional levels n1, n2.  two_mode=False means the
    channel does not resolve per-atom levels (evaluated at (0, 0) only).
    """

    basis: tuple
    overlaps: Callable[[int, int], dict]
    two_mode: bool = True
    name: str = ""


def ideal_channel(symmetrized: bool = False) -> GateChannel:
    basis = ("aa", "ab", "bb") if symmetrized else ("aa", "ab", "ba", "bb")
    return GateChannel(basis=basis, overlaps=lambda n1, n2: {s: 1.0 + 0j for s in basis}, name="ideal")


def _levels(rho_ext: ThermalMotionalState | None, two_mode: bool):
    """(p, n1, n2) triples for the thermal product ensemble, plus leftover mass."""
    if rho_ext is None or rho_ext.kT == 0:
        return [(1.0, 0, 0)], 0.0
    if not two_mode:
        return [(1.0, 0, 0)], 0.0
    p = rho_ext.p
    levs = [(float(p[i] * p[j]), i, j) for i in range(len(p)) for j in range(len(p))]
    mass = sum(w for w, _, _ in levs)
    return levs, max(0.0, 1.0 - mass)


def _fidelity_of_weights(w, vs_per_level, level_probs, rest):
    f = 0.0
    for plev, vs in zip(level_probs, vs_per_level):
        coh = abs(np.dot(w, vs)) ** 2
        inc = float(np.dot(w**2, 1.0 - np.abs(vs) ** 2))
        f += plev * (coh + inc)
    # levels beyond the truncation contribute zero fidelity (lower bound)
    return f + 0.0 * rest


def min_fidelity(
    channel: GateChannel,
    rho_ext: ThermalMotionalState | None = None,
    symmetrized: bool = False,
    seed: int = 7,
    return_state: bool = False,
):
    """Minimum of the channel fidelity over all normalized internal inputs.

    The input state enters only through its basis weights w_s; we still
    minimize over a full complex-state parametrization (multi-start) and
    require the converged minima to agree to 1e-6.
    """
    basis = channel.basis
    if symmetrized and "ba" in basis:
        raise ValidationError("symmetrized minimization needs a symmetrized channel basis")
    dim = len(basis)
    levs, rest = _levels(rho_ext, channel.two_mode)
    level_probs = [w for w, _, _ in levs]
    vs_per_level = []
    for _, n1, n2 in levs:
        d = channel.overlaps(n1, n2)
        vs_per_level.append(np.array([d[s] for s in basis], dtype=complex))

    def cost(u):
        c = u[:dim] + 1j * u[dim:]
        nrm = np.linalg.norm(c)
        if nrm < 1e-12:
            return 1.0
        w = np.abs(c / nrm) ** 2
        return _fidelity_of_weights(w, vs_per_level, level_probs, rest)

    rng = np.random.default_rng(seed)
    starts = [rng.standard_normal(2 * dim) for _ in range(32)]
    for i in range(dim):  # basis states
        u = np.zeros(2 * dim)
        u[i] = 1.0
        starts.append(u)
    for i in range(dim):  # balanced pairs
        for j in range(i + 1, dim):
            u = np.zeros(2 * dim)
            u[i] = u[j] = 1.0
            starts.append(u)

    best = None
    vals = []
    for u0 in starts:
        res = minimize(cost, u0, method="L-BFGS-B")
        vals.append(res.fun)
        if best is None or res.fun < best[0]:
            best = (res.fun, res.x)
    vals = np.sort(np.asarray(vals))
    if np.count_nonzero(vals - vals[0] < 1e-6) < 3:
        raise OptimizationNotConverged(f"multi-start minima spread: best values {vals[:5]}")
    fmin = float(np.clip(best[0], 0.0, 1.0))
    if return_state:
        c = best[1][:dim] + 1j * best[1][dim:]
        return fmin, dict(zip(basis, c / np.linalg.norm(c)))
    return fmin


def moving_channel(
    traj_a: Trajectory,
    traj_b: Trajectory,
) -> GateChannel:
    """Channel of the moving gate: imperfection is the residual motional
    excitation left by the transport of each internal state.

    Diagonal displacement matrix elements <n|D(g)|n> = e^{-|g|^2/2} L_n(|g|^2)
    give the per-level revival amplitude; collisional/kinetic phases are
    taken at their intended values.
    """
    resid = {}
    for lab, traj in (("a", traj_a), ("b", traj_b)):
        ev = evolve_coherent(traj, traj.tau)
        alpha_end = float(np.asarray(traj.x(traj.tau))) / np.sqrt(2)
        resid[lab] = ev.gamma - alpha_end

    def atom_amp(lab, n):
        g2 = abs(resid[lab]) ** 2
        return float(np.exp(-g2 / 2) * eval_laguerre(n, g2))

    basis = ("aa", "ab", "ba", "bb")

    def overlaps(n1, n2):
        return {
            "aa": atom_amp("a", n1) * atom_amp("a", n2),
            "ab": atom_amp("a", n1) * atom_amp("b", n2),
            "ba": atom_amp("b", n1) * atom_amp("a", n2),
            "bb": atom_amp("b", n1) * atom_amp("b", n2),
        }

    return GateChannel(basis=basis, overlaps=overlaps, name="moving")


def switching_channel(
    cfg: SwitchingConfig,
    bb_series: SwitchTimeSeries,
    b_series: SingleParticleSeries,
    tau: float | None = None,
    frame_tau: float | None = None,
    target_phase: float = np.pi,
) -> GateChannel:
    """Symmetrized channel of the switching gate at hold time tau.

    One-particle phases are absorbed by a fixed frame calibrated at
    ``frame_tau`` (default: tau itself); away from the calibration time the
    inter-channel phases drift at the channel energy differences, which is
    what limits the timing precision.  The bb channel carries the
    interacting relative-coordinate amplitude times the analytic
    center-of-mass amplitude, compared against the target collisional
    phase (pi).
    """
    if tau is None:
        tau = bb_series.tau
    if frame_tau is None:
        frame_tau = tau
    nu = cfg.omega0 / cfg.omega
    # one-particle frame phases, calibrated at frame_tau: the a atom is
    # stationary at energy nu/2, the b atom's phase is read off its
    # noninteracting revival amplitude
    lam_a = -0.5 * nu * frame_tau
    lam_b = float(np.angle(b_series.amp_at(frame_tau)))
    a_aa = np.exp(-1j * nu * tau)
    a_ab = np.exp(-1j * 0.5 * nu * tau) * b_series.amp_at(tau)
    a_bb = cm_overlap_complex(nu, 1.0, tau) * bb_series.amp_init_at(tau)
    v_aa = a_aa * np.exp(-2j * lam_a)
    v_ab = a_ab * np.exp(-1j * (lam_a + lam_b))
    v_bb = a_bb * np.exp(-1j * (2 * lam_b + target_phase))
    vs = {"aa": complex(v_aa), "ab": complex(v_ab), "bb": complex(v_bb)}
    return GateChannel(basis=("aa", "ab", "bb"), overlaps=lambda n1, n2: vs, two_mode=False, name="switching")


@dataclass
class TimingCurve:
    offsets: np.ndarray
    fidelity: np.ndarray
    half_width: float


def timing_sensitivity(
    channel_factory: Callable[[float], GateChannel],
    tau0: float,
    delta: float,
    n_side: int = 24,
    rho_ext: ThermalMotionalState | None = None,
    symmetrized: bool = False,
    drop: float = 0.01,
) -> TimingCurve:
    """Sample F(tau0 + k*delta) and report the half-width at which the
    fidelity has dropped by ``drop`` below its maximum."""
    offs = np.arange(-n_side, n_side + 1) * delta
    fs = np.array([min_fidelity(channel_factory(tau0 + o), rho_ext, symmetrized=symmetrized) for o in offs])
    fmax = float(fs.max())
    half = float("inf")
    thresh = fmax - drop
    for sgn in (1, -1):
        sel = offs * sgn >= 0
        o = np.abs(offs[sel])
        f = fs[sel]
        order = np.argsort(o)
        o, f = o[order], f[order]
        below = np.flatnonzero(f < thresh)
        if below.size:
            i = below[0]
            if i == 0:
                w = o[0]
            else:
                w = o[i - 1] + (o[i] - o[i - 1]) * (f[i - 1] - thresh) / (f[i - 1] - f[i])
            half = min(half, float(w))
    return TimingCurve(offsets=offs, fidelity=fs, half_width=half)
