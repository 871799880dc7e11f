"""Sudden-switching collision gate.

The barrier of a state-selective double well is switched off for state b;
the two b atoms oscillate through each other and accumulate an interaction
phase.  Center-of-mass motion is analytic; the relative coordinate is
propagated on a 1D grid with a regularized contact term.  The (a,b) channel
needs the full 2D two-particle grid and does not revive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceFailure, NormLoss, ValidationError
from .traps import HBAR, SwitchingConfig


def cm_overlap_complex(omega0: float, omega: float, t):
    """Complex overlap <psi_cm(0)|psi_cm(t)> of the center-of-mass Gaussian
    (initial frequency omega0) evolving in the omega trap.

    Closed form [cos(wt) + i (w0^2+w^2)/(2 w0 w) sin(wt)]^{-1/2}, with the
    branch of the square root tracked continuously in t.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    c = (omega0**2 + omega**2) / (2 * omega0 * omega)
    z = np.cos(omega * t) + 1j * c * np.sin(omega * t)
    # z traces an ellipse at rate omega; z e^{-i omega t} stays in the right
    # half plane, so the continuous phase is omega*t plus a bounded angle
    ph = omega * t + np.angle(z * np.exp(-1j * omega * t))
    out = np.abs(z) ** (-0.5) * np.exp(-0.5j * ph)
    return out if out.size > 1 else complex(out[0])


def cm_overlap_analytic(omega0: float, omega: float, t):
    """|<psi_cm(0)|psi_cm(t)>|^2 = [1 + (w0^2-w^2)^2/(4 w0^2 w^2) sin^2 wt]^{-1/2}."""
    if omega0 <= 0 or omega <= 0:
        raise ValidationError("frequencies must be positive")
    t = np.asarray(t, dtype=float)
    fac = (omega0**2 - omega**2) ** 2 / (4 * omega0**2 * omega**2)
    return (1.0 + fac * np.sin(omega * t) ** 2) ** (-0.5)


def _big_omega(cfg: SwitchingConfig, t):
    w, w0 = cfg.omega, cfg.omega0
    return w**2 * w0 / (w**2 * np.cos(w * t) ** 2 + w0**2 * np.sin(w * t) ** 2)


def energy_shift_bb(cfg: SwitchingConfig, t):
    """Perturbative interaction energy shift DeltaE^{bb}(t) in joules.

    The two b atoms breathe through each other in the merged well; the shift
    peaks when they meet at the center (omega*t = pi/2 mod pi).
    """
    t = np.asarray(t, dtype=float)
    m, w, w0 = cfg.mass, cfg.omega, cfg.omega0
    Om = _big_omega(cfg, t)
    a_s = cfg.a_s_bb
    pref = a_s * HBAR * cfg.omega_perp * np.sqrt(8 * m * Om / (np.pi * HBAR))
    expo = -(2 * m * w0 / HBAR) * cfg.x0**2 * (1.0 - np.sin(w * t) ** 2 * w0 * Om / w**2)
    return pref * np.exp(expo)


@dataclass(frozen=True)
class PerturbativePhase:
    closed_form: float
    quadrature: float


def phase_per_period_perturbative(cfg: SwitchingConfig) -> PerturbativePhase:
    """Interaction phase per oscillation period phi^{bb}_T (radians).

    closed_form: saddle-point result
        8 a_s sqrt[(m w0/hbar) w_y w_z / (w0^2 + w^2 (4 x0^2 m w0/hbar - 1))]
    quadrature: direct integral of DeltaE^{bb}(t)/hbar over one period.
    """
    m, w, w0 = cfg.mass, cfg.omega, cfg.omega0
    chi = 4 * cfg.x0**2 * m * w0 / HBAR
    closed = 8 * cfg.a_s_bb * np.sqrt((m * w0 / HBAR) * cfg.omega_y * cfg.omega_z / (w0**2 + w**2 * (chi - 1.0)))
    T = cfg.period
    val, _ = quad(lambda t: float(energy_shift_bb(cfg, t)) / HBAR, 0.0, T, limit=400)
    return PerturbativePhase(closed_form=float(closed), quadrature=float(val))


@dataclass
class TwoParticleGrid:
    """Uniform 1D grid for the relative (or a single-particle) coordinate."""

    L: float
    N: int
    dt: float

    def __post_init__(self):
        if self.N < 16 or self.L <= 0 or self.dt <= 0:
            raise ValidationError("bad grid parameters")

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def x(self):
        return (np.arange(self.N) - self.N // 2) * self.dx

    @property
    def k(self):
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)


def _norm(psi, dx):
    return float(np.sum(np.abs(psi) ** 2) * dx)


def _split_step_run(grid: TwoParticleGrid, psis, V, n_steps, observer=None, observe_every=1):
    """Strang-split propagation of one or more wavefunctions in the static
    potential V; observer(step_index, psis) is called every observe_every
    steps (and at step 0)."""
    dt = grid.dt
    expV = np.exp(-0.5j * dt * V)
    expK = np.exp(-0.5j * dt * grid.k**2)
    psis = [p.astype(complex).copy() for p in psis]
    if observer is not None:
        observer(0, psis)
    for s in range(1, n_steps + 1):
        for i, p in enumerate(psis):
            p = expV * p
            p = np.fft.ifft(expK * np.fft.fft(p))
            psis[i] = expV * p
        if observer is not None and s % observe_every == 0:
            observer(s, psis)
    return psis


def _regularized_delta(x, sigma):
    return np.exp(-(x**2) / (2 * sigma**2)) / (sigma * np.sqrt(2 * np.pi))


@dataclass
class SwitchTimeSeries:
    """Sampled gate dynamics (times in units of 1/omega, T = 2 pi)."""

    t: np.ndarray
    phase: np.ndarray
    overlap_ref: np.ndarray
    overlap_init: np.ndarray
    amp_init: np.ndarray
    amp_init_ref: np.ndarray
    period: float
    deltaT: float
    tau: float
    phase_final: float
    revival: float
    channel: str = "bb"
    non_revival: bool = False
    revival_times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def phase_at(self, t: float) -> float:
        return float(np.interp(t, self.t, self.phase))

    def amp_init_at(self, t: float) -> complex:
        return complex(np.interp(t, self.t, self.amp_init.real) + 1j * np.interp(t, self.t, self.amp_init.imag))

    def amp_init_ref_at(self, t: float) -> complex:
        return complex(np.interp(t, self.t, self.amp_init_ref.real) + 1j * np.interp(t, self.t, self.amp_init_ref.imag))


def _refine_peak(t, y, idx):
    """Parabolic interpolation of a local maximum around sample idx."""
    if idx <= 0 or idx >= len(y) - 1:
        return t[idx], y[idx]
    y0, y1, y2 = y[idx - 1], y[idx], y[idx + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return t[idx], y[idx]
    d = 0.5 * (y0 - y2) / denom
    d = float(np.clip(d, -1.0, 1.0))
    tp = t[idx] + d * (t[idx + 1] - t[idx])
    yp = y1 - 0.25 * (y0 - y2) * d
    return float(tp), float(yp)


def _extract_revivals(t, ov, period, n_periods):
    """Locate the revival maximum near each k*T and fit the drift:
    peak_k ~ k (T + deltaT)."""
    peaks = []
    for k in range(1, n_periods + 1):
        lo, hi = (k - 0.12) * period, (k + 0.12) * period
        m = (t >= lo) & (t <= hi)
        if not np.any(m):
            continue
        seg_t, seg_y = t[m], ov[m]
        idx = int(np.argmax(seg_y))
        gidx = np.flatnonzero(m)[idx]
        tp, yp = _refine_peak(t, ov, gidx)
        peaks.append((k, tp, yp))
    ks = np.array([p[0] for p in peaks], dtype=float)
    tp = np.array([p[1] for p in peaks])
    deltaT = float(np.sum(ks * tp) / np.sum(ks**2) - period)
    return deltaT, peaks


def _bb_initial_state(cfg: SwitchingConfig, x):
    """Exchange-symmetric relative-coordinate state: both atoms in their own
    well ground states, centers 2*x0 apart (relative-oscillator units)."""
    nu0 = cfg.omega0 / cfg.omega
    mu = cfg.mass / 2.0
    a_r = np.sqrt(HBAR / (mu * cfg.omega))
    r0 = 2 * cfg.x0 / a_r
    g = np.exp(-0.5 * nu0 * (x - r0) ** 2) + np.exp(-0.5 * nu0 * (x + r0) ** 2)
    g /= np.sqrt(np.sum(np.abs(g) ** 2) * (x[1] - x[0]))
    return g, r0


def propagate(
    cfg: SwitchingConfig,
    channel: tuple = ("b", "b"),
    n_periods: int = 7,
    N: int = 4096,
    L: float = 32.0,
    steps_per_period: int = 4000,
    sigma_reg: float = 0.0176,
    check_convergence: bool = True,
    interacting: bool = True,
) -> SwitchTimeSeries:
    """Propagate a collision channel through ``n_periods`` oscillations.

    (b,b): relative coordinate only (CM is analytic); (a,b): full 2D grid
    via propagate_ab.  Returns phase relative to a co-propagated g=0
    reference, overlap series, and the revival period shift deltaT.
    """
    if tuple(channel) == ("a", "b") or tuple(channel) == ("b", "a"):
        return propagate_ab(cfg, n_periods=min(n_periods, 2))
    if tuple(channel) == ("a", "a"):
        raise ValidationError("the (a,a) channel has no dynamics: both atoms stay in their wells")

    period = 2 * np.pi
    dt = period / steps_per_period
    grid = TwoParticleGrid(L=L, N=N, dt=dt)
    x = grid.x

    mu = cfg.mass / 2.0
    a_r = np.sqrt(HBAR / (mu * cfg.omega))
    g_tilde = cfg.g1d("bb") / (HBAR * cfg.omega * a_r) if interacting else 0.0

    if check_convergence:
        p1 = _propagate_bb_once(cfg, TwoParticleGrid(L=L, N=N, dt=dt), g_tilde, sigma_reg, 1, steps_per_period)
        p2 = _propagate_bb_once(cfg, TwoParticleGrid(L=L, N=2 * N, dt=dt), g_tilde, sigma_reg, 1, steps_per_period)
        if abs(p1 - p2) > 1e-3:
            raise ConvergenceFailure(f"phase changes by {abs(p1 - p2):.2e} rad when halving dx")

    psi0, _r0 = _bb_initial_state(cfg, x)
    V0 = 0.5 * x**2
    V = V0 + g_tilde * _regularized_delta(x, sigma_reg)

    n_steps = int(round((n_periods + 0.1) * steps_per_period))
    rec = {"t": [], "a_init": [], "a_ref": [], "a_init_ref": []}
    dx = grid.dx
    psi0c = psi0.copy()

    def obs(s, psis):
        psi, ref = psis
        rec["t"].append(s * dt)
        rec["a_init"].append(np.vdot(psi0c, psi) * dx)
        rec["a_ref"].append(np.vdot(ref, psi) * dx)
        rec["a_init_ref"].append(np.vdot(psi0c, ref) * dx)

    # interacting state and its g=0 reference propagate side by side
    expV = np.exp(-0.5j * dt * V)
    expV0 = np.exp(-0.5j * dt * V0)
    expK = np.exp(-0.5j * dt * grid.k**2)
    psi = psi0.astype(complex).copy()
    ref = psi0.astype(complex).copy()
    obs(0, [psi, ref])
    for s in range(1, n_steps + 1):
        psi = expV * np.fft.ifft(expK * np.fft.fft(expV * psi))
        ref = expV0 * np.fft.ifft(expK * np.fft.fft(expV0 * ref))
        obs(s, [psi, ref])

    if abs(_norm(psi, dx) - 1.0) > 1e-6:
        raise NormLoss(f"norm drifted to {_norm(psi, dx):.8f}")

    t = np.asarray(rec["t"])
    a_init = np.asarray(rec["a_init"])
    a_ref = np.asarray(rec["a_ref"])
    a_init_ref = np.asarray(rec["a_init_ref"])
    phase = -np.unwrap(np.angle(a_ref))
    ov_init = np.abs(a_init) ** 2
    deltaT, peaks = _extract_revivals(t, ov_init, period, n_periods)
    tau = n_periods * (period + deltaT)
    _, revival = _refine_peak(t, ov_init, int(np.argmin(np.abs(t - tau))))
    return SwitchTimeSeries(
        t=t,
        phase=phase,
        overlap_ref=np.abs(a_ref) ** 2,
        overlap_init=ov_init,
        amp_init=a_init,
        amp_init_ref=a_init_ref,
        period=period,
        deltaT=deltaT,
        tau=tau,
        phase_final=float(np.interp(tau, t, phase)),
        revival=float(revival),
        channel="bb",
        revival_times=np.array([p[1] for p in peaks]),
    )


def _propagate_bb_once(cfg, grid, g_tilde, sigma_reg, n_periods, steps_per_period):
    """One-shot short propagation returning the phase after n_periods periods
    (used by the resolution pre-check)."""
    x = grid.x
    psi0, _ = _bb_initial_state(cfg, x)
    V0 = 0.5 * x**2
    V = V0 + g_tilde * _regularized_delta(x, sigma_reg)
    n_steps = n_periods * steps_per_period
    psi = psi0.astype(complex).copy()
    ref = psi0.astype(complex).copy()
    expV = np.exp(-0.5j * grid.dt * V)
    expV0 = np.exp(-0.5j * grid.dt * V0)
    expK = np.exp(-0.5j * grid.dt * grid.k**2)
    for _ in range(n_steps):
        psi = expV * np.fft.ifft(expK * np.fft.fft(expV * psi))
        ref = expV0 * np.fft.ifft(expK * np.fft.fft(expV0 * ref))
    return float(-np.angle(np.vdot(ref, psi) * grid.dx))


def propagate_ab(
    cfg: SwitchingConfig,
    n_periods: int = 2,
    N: int = 256,
    L: float = 24.0,
    steps_per_period: int = 1000,
    sigma_reg: float = 0.08,
) -> SwitchTimeSeries:
    """Full 2D (x1, x2) propagation of the (a,b) channel.

    The a atom stays in its double well while the b atom oscillates through
    the merged well; the joint state does not return to itself, so the
    series is flagged non-revival.  Single-particle oscillator units of the
    merged well.
    """
    period = 2 * np.pi
    dt = period / steps_per_period
    dx = L / N
    x = (np.arange(N) - N // 2) * dx
    k = 2 * np.pi * np.fft.fftfreq(N, d=dx)
    units = cfg.units
    a_x = units.length_si
    x0 = cfg.x0 / a_x
    nu0 = cfg.omega0 / cfg.omega
    g2 = cfg.g1d("ab") / (HBAR * cfg.omega * a_x)

    X1, X2 = np.meshgrid(x, x, indexing="ij")
    Va = 0.5 * nu0**2 * (np.abs(X1) - x0) ** 2  # a atom keeps its double well
    Vb = 0.5 * X2**2
    V0 = Va + Vb
    V = V0 + g2 * _regularized_delta(X1 - X2, sigma_reg)

    phi_a = (nu0 / np.pi) ** 0.25 * np.exp(-0.5 * nu0 * (x + x0) ** 2)
    phi_b = (nu0 / np.pi) ** 0.25 * np.exp(-0.5 * nu0 * (x - x0) ** 2)
    psi0 = np.outer(phi_a, phi_b).astype(complex)
    psi0 /= np.sqrt(np.sum(np.abs(psi0) ** 2) * dx * dx)

    K1, K2 = np.meshgrid(k, k, indexing="ij")
    expK = np.exp(-0.5j * dt * (K1**2 + K2**2))
    expV = np.exp(-0.5j * dt * V)
    expV0 = np.exp(-0.5j * dt * V0)

    n_steps = int(round((n_periods + 0.1) * steps_per_period))
    psi = psi0.copy()
    ref = psi0.copy()
    ts, a_init, a_ref, a_init_ref = [0.0], [1.0 + 0j], [1.0 + 0j], [1.0 + 0j]
    for s in range(1, n_steps + 1):
        psi = expV * np.fft.ifft2(expK * np.fft.fft2(expV * psi))
        ref = expV0 * np.fft.ifft2(expK * np.fft.fft2(expV0 * ref))
        if s % 4 == 0:
            ts.append(s * dt)
            a_init.append(np.vdot(psi0, psi) * dx * dx)
            a_ref.append(np.vdot(ref, psi) * dx * dx)
            a_init_ref.append(np.vdot(psi0, ref) * dx * dx)

    nrm = float(np.sum(np.abs(psi) ** 2) * dx * dx)
    if abs(nrm - 1.0) > 1e-6:
        raise NormLoss(f"norm drifted to {nrm:.8f}")

    t = np.asarray(ts)
    a_init = np.asarray(a_init)
    a_ref = np.asarray(a_ref)
    phase = -np.unwrap(np.angle(a_ref))
    ov_init = np.abs(a_init) ** 2
    deltaT, peaks = _extract_revivals(t, ov_init, period, n_periods)
    tau = n_periods * (period + deltaT)
    return SwitchTimeSeries(
        t=t,
        phase=phase,
        overlap_ref=np.abs(a_ref) ** 2,
        overlap_init=ov_init,
        amp_init=a_init,
        amp_init_ref=np.asarray(a_init_ref),
        period=period,
        deltaT=deltaT,
        tau=tau,
        phase_final=float(np.interp(tau, t, phase)),
        revival=float(np.interp(tau, t, ov_init)),
        channel="ab",
        non_revival=True,
        revival_times=np.array([p[1] for p in peaks]),
    )


@dataclass
class SingleParticleSeries:
    """Revival amplitude <psi(0)|psi(t)> of one b atom released into the
    merged well (no partner, no interaction)."""

    t: np.ndarray
    amp: np.ndarray

    def amp_at(self, t: float) -> complex:
        return complex(np.interp(t, self.t, self.amp.real) + 1j * np.interp(t, self.t, self.amp.imag))


def propagate_single_b(
    cfg: SwitchingConfig,
    n_periods: float = 7.2,
    N: int = 1024,
    L: float = 24.0,
    steps_per_period: int = 2000,
) -> SingleParticleSeries:
    period = 2 * np.pi
    dt = period / steps_per_period
    grid = TwoParticleGrid(L=L, N=N, dt=dt)
    x = grid.x
    units = cfg.units
    x0 = cfg.x0 / units.length_si
    nu0 = cfg.omega0 / cfg.omega
    psi0 = (nu0 / np.pi) ** 0.25 * np.exp(-0.5 * nu0 * (x - x0) ** 2)
    psi0 = psi0 / np.sqrt(np.sum(np.abs(psi0) ** 2) * grid.dx)
    V = 0.5 * x**2
    expV = np.exp(-0.5j * dt * V)
    expK = np.exp(-0.5j * dt * grid.k**2)
    psi = psi0.astype(complex).copy()
    ts, amps = [0.0], [1.0 + 0j]
    n_steps = int(round(n_periods * steps_per_period))
    for s in range(1, n_steps + 1):
        psi = expV * np.fft.ifft(expK * np.fft.fft(expV * psi))
        ts.append(s * dt)
        amps.append(np.vdot(psi0, psi) * grid.dx)
    return SingleParticleSeries(t=np.asarray(ts), amp=np.asarray(amps))


@dataclass(frozen=True)
class NetPhaseResult:
    net_phase: float
    tau: float
    phi_bb_total: float
    phi_ab_total: float


def net_phase_gate(
    cfg: SwitchingConfig,
    n: int = 7,
    variant: str = "transverse-displacement",
    series: SwitchTimeSeries | None = None,
) -> NetPhaseResult:
    """Net conditional phase after n oscillations, phi^{bb} - 2 phi^{ab}.

    In the transverse-displacement variant the a-state well is offset so
    that only b-b pairs collide and phi^{ab} = 0 identically; phi^{aa} = 0
    always (the a atoms never leave their wells).
    """
    if series is None:
        series = propagate(cfg, ("b", "b"), n_periods=n)
    phi_bb = series.phase_at(series.tau)
    if variant == "transverse-displacement":
        phi_ab = 0.0
    elif variant == "aligned":
        ab = propagate_ab(cfg, n_periods=min(n, 2))
        phi_ab = ab.phase_at(ab.t[-1]) / (ab.t[-1] / series.period) * n  # per-period extrapolation
    else:
        raise ValidationError(f"unknown variant {variant!r}")
    return NetPhaseResult(net_phase=phi_bb - 2 * phi_ab, tau=series.tau, phi_bb_total=phi_bb, phi_ab_total=phi_ab)
