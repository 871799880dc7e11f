"""Exact statevector engine for lattice-parallel quantum computing.

Qubits live on 1D or 2D lattice sites (row-major site order, site 0 most
significant in the basis index).  Collisions between neighboring atoms are
ideal diagonal phase gates (lift & shift); lattice shifts LX/LY phase every
adjacent (0,1) pair along rows/columns.  On top of these the module builds
Ramsey interferometry, the 9-qubit Shor-code memory with its full syndrome
table, a fault-tolerant CNOT between blocks, Armada parity checks, and the
sweep constructions (GHZ, QFT).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryMismatch, NonBasisSyndrome, ValidationError

MAX_QUBITS = 20

H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X_GATE = np.array([[0, 1], [1, 0]], dtype=complex)
Y_GATE = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_GATE = np.array([[1, 0], [0, -1]], dtype=complex)
# quarter and three-quarter pulses: the quarter pulse is the Hadamard of the
# collision-gate constructions; the three-quarter pulse adds a bit flip,
# which is what removes the sign of the block CNOT
R90_GATE = H_GATE
R270_GATE = X_GATE @ H_GATE


def phase_gate(lam: float):
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


_NAMED_GATES = {
    "H": H_GATE,
    "X": X_GATE,
    "Y": Y_GATE,
    "Z": Z_GATE,
    "R90": R90_GATE,
    "R270": R270_GATE,
}


@dataclass
class LatticeRegister:
    """Statevector register bound to lattice coordinates.

    shape: (n,) for a 1D string or (rows, cols); ``sites`` lists the
    occupied lattice sites (flattened row-major indices) in ascending order;
    ``dims`` gives the level count per occupied site (2, or 3 when the
    transport level r is enabled).  state is flat with site order =
    ``sites`` order, first site most significant.
    """

    shape: tuple
    sites: tuple
    dims: tuple
    state: np.ndarray

    def __post_init__(self):
        self.shape = tuple(self.shape)
        self.sites = tuple(self.sites)
        self.dims = tuple(self.dims)
        n_lattice = int(np.prod(self.shape))
        if any(s < 0 or s >= n_lattice for s in self.sites):
            raise GeometryMismatch("occupied site outside the lattice")
        if len(self.dims) != len(self.sites):
            raise GeometryMismatch("dims/sites length mismatch")
        if len(self.sites) > MAX_QUBITS:
            raise ValidationError(f"register capped at {MAX_QUBITS} sites")
        D = int(np.prod(self.dims)) if self.dims else 1
        self.state = np.asarray(self.state, dtype=complex).reshape(D)
        n = np.linalg.norm(self.state)
        if abs(n - 1.0) > 1e-9:
            raise ValidationError(f"state norm {n} != 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def basis(cls, shape, bits, mask=None, dims=None) -> "LatticeRegister":
        """Computational basis state; ``bits`` indexed per occupied site."""
        shape = tuple(shape) if np.iterable(shape) else (int(shape),)
        n_lattice = int(np.prod(shape))
        sites = tuple(range(n_lattice)) if mask is None else tuple(int(s) for s in np.flatnonzero(np.asarray(mask).ravel()))
        if dims is None:
            dims = (2,) * len(sites)
        D = int(np.prod(dims)) if dims else 1
        idx = 0
        for b, d in zip(bits, dims):
            idx = idx * d + int(b)
        state = np.zeros(D, dtype=complex)
        state[idx] = 1.0
        return cls(shape=shape, sites=sites, dims=tuple(dims), state=state)

    def copy(self) -> "LatticeRegister":
        return LatticeRegister(self.shape, self.sites, self.dims, self.state.copy())

    # -- geometry helpers --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def rows(self) -> int:
        return self.shape[0] if len(self.shape) == 2 else 1

    @property
    def cols(self) -> int:
        return self.shape[-1]

    def axis_of_site(self, lattice_site: int) -> int:
        """Tensor axis of an occupied lattice site."""
        try:
            return self.sites.index(lattice_site)
        except ValueError:
            raise GeometryMismatch(f"site {lattice_site} is not occupied") from None

    def digits(self):
        """Per-axis digit arrays over the full basis (axis 0 most significant)."""
        D = self.state.size
        out = []
        stride = D
        for d in self.dims:
            stride //= d
            out.append((np.arange(D) // stride) % d)
        return out

    # -- inspection --------------------------------------------------------

    def probabilities(self, axes):
        """Marginal distribution over the listed tensor axes."""
        t = np.abs(self.state.reshape(self.dims)) ** 2
        keep = sorted(axes)
        other = tuple(a for a in range(self.n) if a not in keep)
        return t.sum(axis=other) if other else t

    def fidelity_with(self, other_state) -> float:
        return float(np.abs(np.vdot(np.asarray(other_state).ravel(), self.state)) ** 2)


def normalized_global_phase(state):
    """Rotate the global phase so the largest-magnitude amplitude is real
    positive (the convention for codeword comparisons)."""
    state = np.asarray(state, dtype=complex).ravel()
    k = int(np.argmax(np.abs(state)))
    ph = np.exp(-1j * np.angle(state[k]))
    return state * ph


# -- elementary operations -------------------------------------------------


def single_qubit(reg: LatticeRegister, lattice_site: int, gate) -> LatticeRegister:
    """Apply a 2x2 unitary (by name or matrix) to one occupied site."""
    if isinstance(gate, str):
        if gate not in _NAMED_GATES:
            raise ValidationError(f"unknown gate {gate!r}")
        U = _NAMED_GATES[gate]
    else:
        U = np.asarray(gate, dtype=complex)
    ax = reg.axis_of_site(lattice_site)
    d = reg.dims[ax]
    if U.shape != (2, 2):
        raise ValidationError("single_qubit expects a 2x2 gate")
    if d == 2:
        Ufull = U
    else:  # act on the {0,1} subspace of a 3-level site
        Ufull = np.eye(d, dtype=complex)
        Ufull[:2, :2] = U
    t = reg.state.reshape(reg.dims)
    t = np.moveaxis(np.tensordot(Ufull, t, axes=([1], [ax])), 0, ax)
    return LatticeRegister(reg.shape, reg.sites, reg.dims, t.ravel())


def _row_col(reg: LatticeRegister, lattice_site: int):
    return divmod(lattice_site, reg.cols)


def _pair_phase(reg: LatticeRegister, pairs_phi, sign=-1.0) -> LatticeRegister:
    """Diagonal phase: each (site_a, site_b, phi) contributes
    exp(sign*i*phi) on basis states with digit(site_a)=0 and digit(site_b)=1."""
    digs = reg.digits()
    accum = np.zeros(reg.state.size)
    for sa, sb, phi in pairs_phi:
        da = digs[reg.axis_of_site(sa)]
        db = digs[reg.axis_of_site(sb)]
        accum = accum + phi * ((da == 0) & (db == 1))
    return LatticeRegister(reg.shape, reg.sites, reg.dims, reg.state * np.exp(sign * 1j * accum))


def _lx_pairs(reg: LatticeRegister, phases):
    occ = set(reg.sites)
    pairs = []
    for s in reg.sites:
        r, c = _row_col(reg, s)
        if c + 1 < reg.cols and (s + 1) in occ:
            phi = phases[c + 1] if np.iterable(phases) else phases
            pairs.append((s, s + 1, float(phi)))
    return pairs


def _ly_pairs(reg: LatticeRegister, phases):
    occ = set(reg.sites)
    pairs = []
    for s in reg.sites:
        r, c = _row_col(reg, s)
        if r + 1 < reg.rows and (s + reg.cols) in occ:
            phi = phases[r + 1] if np.iterable(phases) else phases
            pairs.append((s, s + reg.cols, float(phi)))
    return pairs


def apply_lx(reg: LatticeRegister, phases=np.pi) -> LatticeRegister:
    """Horizontal lattice shift: phase e^{-i phi} on every row-adjacent
    occupied pair with states (0, 1); empty sites contribute nothing."""
    return _pair_phase(reg, _lx_pairs(reg, phases))


def apply_ly(reg: LatticeRegister, phases=np.pi) -> LatticeRegister:
    """Vertical lattice shift (2D lattices only)."""
    if len(reg.shape) != 2:
        raise GeometryMismatch("apply_ly needs a 2D lattice")
    return _pair_phase(reg, _ly_pairs(reg, phases))


def measure(reg: LatticeRegister, lattice_sites, seed=None, rng=None):
    """Projective measurement of the listed sites in the computational basis.

    Returns (outcomes dict site->digit, collapsed register).
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    axes = [reg.axis_of_site(s) for s in lattice_sites]
    probs = reg.probabilities(axes)
    flat = probs.ravel()
    choice = rng.choice(flat.size, p=flat / flat.sum())
    digs = np.unravel_index(choice, probs.shape)
    t = reg.state.reshape(reg.dims)
    sl = [slice(None)] * reg.n
    for ax, dg in zip(sorted(axes), digs):
        sl[ax] = dg
    collapsed = np.zeros_like(t)
    collapsed[tuple(sl)] = t[tuple(sl)]
    collapsed = collapsed.ravel()
    collapsed /= np.linalg.norm(collapsed)
    out = {}
    for s in lattice_sites:
        pos = sorted(axes).index(reg.axis_of_site(s))
        out[s] = int(digs[pos])
    return out, LatticeRegister(reg.shape, reg.sites, reg.dims, collapsed)


# -- Ramsey interferometry and random filling ------------------------------


def ramsey_sequence(reg: LatticeRegister, phi: float) -> LatticeRegister:
    """pi/2 pulse, lattice shift by one site, second pi/2 pulse.

    The collision phase is applied as e^{+i phi} per adjacent (0,1) pair;
    this sign reproduces the (1 + e^{i phi})/2 interference amplitudes of
    the neighboring-pair and triplet output states.
    """
    for s in reg.sites:
        reg = single_qubit(reg, s, "H")
    reg = _pair_phase(reg, _lx_pairs(reg, phi), sign=+1.0)
    for s in reg.sites:
        reg = single_qubit(reg, s, "H")
    return reg


def random_fill(shape, eta: float, seed=None):
    """Bernoulli(eta) site occupation and a census of maximal row clusters.

    Returns (mask, census dict cluster_size -> count).
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError("eta must be in [0, 1]")
    shape = tuple(shape) if np.iterable(shape) else (int(shape),)
    rng = np.random.default_rng(seed)
    mask = rng.random(shape) < eta
    rows = mask.reshape(-1, shape[-1])
    census: dict = {}
    for row in rows:
        run = 0
        for v in np.append(row, False):
            if v:
                run += 1
            elif run:
                census[run] = census.get(run, 0) + 1
                run = 0
    return mask, census


def cluster_scaling_exponent(etas, counts, n_sites: int):
    """Fitted exponent of cluster frequency vs filling factor.

    A maximal N-cluster occurs with probability ~ eta^N (1-eta)^2 per site,
    so count/(sites*(1-eta)^2) ~ eta^N; the log-log slope estimates N.
    """
    etas = np.asarray(etas, dtype=float)
    y = np.asarray(counts, dtype=float) / (n_sites * (1 - etas) ** 2)
    if np.any(y <= 0):
        raise ValidationError("empty cluster counts; increase the sample")
    slope, _ = np.polyfit(np.log(etas), np.log(y), 1)
    return float(slope)


# -- Shor nine-qubit code --------------------------------------------------

# 3x3 block site layout (row-major):   0 1 2
#                                      3 4 5
#                                      6 7 8
_OUTER = (0, 1, 2, 3, 5, 6, 7, 8)  # the eight syndrome atoms
_ENC_H_STAGE1 = (0, 2, 3, 5, 6, 8)
_ENC_X_STAGE1 = (2, 5, 8)
_ENC_H_STAGE2 = (3, 4, 5)
_ENC_H_STAGE3 = (3, 5)


def bare_block(alpha: complex, beta: complex) -> LatticeRegister:
    """3x3 block with the central atom carrying alpha|0> + beta|1>."""
    nrm = np.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
    reg = LatticeRegister.basis((3, 3), [0] * 9)
    state = np.zeros(512, dtype=complex)
    state[0] = alpha / nrm
    state[1 << (8 - 4)] = beta / nrm
    return LatticeRegister((3, 3), reg.sites, reg.dims, state)


def shor_encode(reg: LatticeRegister, lx_phase: float = np.pi) -> LatticeRegister:
    """Encode a bare 3x3 block into the lattice Shor code.

    Pulse/shift sequence (all collision phases pi): Hadamards on the eight
    outer atoms, horizontal shift, Hadamards on the corner/edge set with bit
    flips on the right column, vertical shift, Hadamards on the middle row,
    horizontal shift, Hadamards on the middle-row edges.
    """
    if reg.shape != (3, 3) or reg.n != 9:
        raise GeometryMismatch("shor_encode needs a fully occupied 3x3 block")
    for s in _OUTER:
        reg = single_qubit(reg, s, "H")
    reg = apply_lx(reg, lx_phase)
    for s in _ENC_H_STAGE1:
        reg = single_qubit(reg, s, "H")
    for s in _ENC_X_STAGE1:
        reg = single_qubit(reg, s, "X")
    reg = apply_ly(reg, np.pi)
    for s in _ENC_H_STAGE2:
        reg = single_qubit(reg, s, "H")
    reg = apply_lx(reg, lx_phase)
    for s in _ENC_H_STAGE3:
        reg = single_qubit(reg, s, "H")
    return reg


def shor_decode(reg: LatticeRegister, lx_phase: float = np.pi) -> LatticeRegister:
    """Inverse of shor_encode (every stage is self-inverse)."""
    for s in _ENC_H_STAGE3:
        reg = single_qubit(reg, s, "H")
    reg = apply_lx(reg, lx_phase)
    for s in _ENC_H_STAGE2:
        reg = single_qubit(reg, s, "H")
    reg = apply_ly(reg, np.pi)
    for s in _ENC_X_STAGE1:
        reg = single_qubit(reg, s, "X")
    for s in _ENC_H_STAGE1:
        reg = single_qubit(reg, s, "H")
    reg = apply_lx(reg, lx_phase)
    for s in _OUTER:
        reg = single_qubit(reg, s, "H")
    return reg


def logical_codewords():
    """(|0_L>, |1_L>) of the lattice code as 512-component vectors."""
    zero = shor_encode(bare_block(1.0, 0.0)).state
    one = shor_encode(bare_block(0.0, 1.0)).state
    return zero, one


_RESIDUAL_FORMS = {
    "a0+b1": np.array([[1, 0], [0, 1]], dtype=complex),
    "a0-b1": np.array([[1, 0], [0, -1]], dtype=complex),
    "a1+b0": np.array([[0, 1], [1, 0]], dtype=complex),
    "a1-b0": np.array([[0, 1], [-1, 0]], dtype=complex),
}
# the listed map M sends (alpha, beta) to the residual; the correction is its
# inverse
_CORRECTIONS = {k: np.linalg.inv(M) for k, M in _RESIDUAL_FORMS.items()}


@dataclass
class SyndromeRecord:
    syndrome: str  # bits of atoms (1,2,3, 4,6, 7,8,9) formatted "abc de fgh"
    residual: str  # one of a0+b1, a0-b1, a1+b0, a1-b0
    correction: np.ndarray = field(repr=False)
    central_state: np.ndarray = field(repr=False)


def shor_decode_and_syndrome(reg: LatticeRegister, alpha: complex, beta: complex, lx_phase: float = np.pi) -> SyndromeRecord:
    """Decode a (possibly corrupted) block and read the error syndrome.

    The eight non-central atoms must land in a deterministic basis state;
    the central qubit is classified against the four residual forms of
    (alpha, beta) up to global phase.
    """
    dec = shor_decode(reg, lx_phase)
    t = dec.state.reshape((2,) * 9)
    central_ax = 4
    probs = np.abs(t) ** 2
    marg = probs.sum(axis=central_ax)
    flat = marg.ravel()
    k = int(np.argmax(flat))
    if abs(flat[k] - 1.0) > 1e-8:
        raise NonBasisSyndrome(f"syndrome register not a basis state (p_max={flat[k]:.6f})")
    bits = list(np.unravel_index(k, (2,) * 8))
    sl = bits[:central_ax] + [slice(None)] + bits[central_ax:]
    central = np.asarray(t[tuple(sl)]).ravel()
    central = central / np.linalg.norm(central)

    v = np.array([alpha, beta], dtype=complex)
    v = v / np.linalg.norm(v)
    best = None
    for name, M in _RESIDUAL_FORMS.items():
        ov = abs(np.vdot(M @ v, central))
        if best is None or ov > best[1]:
            best = (name, ov)
    name, ov = best
    if ov**2 < 1.0 - 1e-8:
        raise NonBasisSyndrome(f"central residual matches no tabulated form (best {name}, |ov|^2={ov**2:.6f})")
    syn = "".join(str(b) for b in bits)
    return SyndromeRecord(
        syndrome=f"{syn[0:3]} {syn[3:5]} {syn[5:8]}",
        residual=name,
        correction=_CORRECTIONS[name],
        central_state=central,
    )


def apply_pauli_error(reg: LatticeRegister, kind: str, atom: int) -> LatticeRegister:
    """Single-site Pauli error; ``atom`` is 1-based as in the syndrome table."""
    if kind not in ("x", "y", "z"):
        raise ValidationError("kind must be x, y or z")
    return single_qubit(reg, atom - 1, kind.upper())


def syndrome_table(alpha: complex = 1.0, beta: complex = 0.0, lx_phase: float = np.pi):
    """All 27 single-Pauli syndromes: list of (error_label, syndrome, residual)."""
    rows = []
    for kind in ("x", "y", "z"):
        for atom in range(1, 10):
            enc = shor_encode(bare_block(alpha, beta), lx_phase)
            err = apply_pauli_error(enc, kind, atom)
            rec = shor_decode_and_syndrome(err, alpha, beta, lx_phase)
            rows.append((f"s{kind},{atom}", rec.syndrome, rec.residual))
    return rows


# -- fault-tolerant CNOT and Armada parity checks --------------------------


def shor_codewords_standard():
    """GHZ-product Shor codewords (|0_S>, |1_S>) as 512-component vectors."""
    plus = np.zeros(8)
    plus[0] = plus[7] = 1.0
    minus = np.zeros(8)
    minus[0], minus[7] = 1.0, -1.0
    zero = np.kron(np.kron(plus, plus), plus) / np.sqrt(8)
    one = np.kron(np.kron(minus, minus), minus) / np.sqrt(8)
    return zero.astype(complex), one.astype(complex)


def two_block_register(control_state, target_state) -> LatticeRegister:
    """18-qubit register: control block on rows 0-2, target on rows 3-5."""
    state = np.kron(np.asarray(control_state).ravel(), np.asarray(target_state).ravel())
    return LatticeRegister((6, 3), tuple(range(18)), (2,) * 18, state)


def ft_cnot(reg: LatticeRegister, exact_sign: bool = True) -> LatticeRegister:
    """Transversal CNOT between two stacked 9-atom blocks.

    A pulse is applied to the control block, the blocks are moved on top of
    each other so every corresponding atom pair acquires a pi collision
    phase, and a closing pulse is applied.  With the three-quarter closing
    pulse (exact_sign=True) the logical action is exactly CNOT; with the
    quarter pulse it is CNOT with a minus sign on the control-1 branch.
    """
    if reg.shape != (6, 3) or reg.n != 18:
        raise GeometryMismatch("ft_cnot needs two stacked 3x3 blocks (6x3)")
    for s in range(9):
        reg = single_qubit(reg, s, "H")
    pairs = [(s, s + 9, np.pi) for s in range(9)]  # phase when control=1, target=0
    reg = _pair_phase_condition(reg, pairs, cond=(1, 0))
    for s in range(9):
        reg = single_qubit(reg, s, "H")
    if exact_sign:
        for s in range(9):
            reg = single_qubit(reg, s, "X")
    return reg


def _pair_phase_condition(reg: LatticeRegister, pairs_phi, cond, sign=-1.0) -> LatticeRegister:
    """Like _pair_phase but with an explicit (digit_a, digit_b) condition;
    pairs are (site_a, site_b, phi) with phi applied when digit(site_a) ==
    cond[0] and digit(site_b) == cond[1]."""
    digs = reg.digits()
    accum = np.zeros(reg.state.size)
    for sa, sb, phi in pairs_phi:
        da = digs[reg.axis_of_site(sa)]
        db = digs[reg.axis_of_site(sb)]
        accum = accum + phi * ((da == cond[0]) & (db == cond[1]))
    return LatticeRegister(reg.shape, reg.sites, reg.dims, reg.state * np.exp(sign * 1j * accum))


def armada_parity_check(block_state, kind: str = "spin-flip", seed=None):
    """Parity extraction with an armada of 3x2 Bell-pair ancillas.

    spin-flip: each row's ancilla pair collides with the first two atoms of
    that block row and returns the Z-parity of those atoms; a single bit
    flip in the probed columns flips the row parity with certainty.
    phase-flip: the block is Hadamard-rotated, a 6-atom GHZ armada collides
    with the first two rows and returns their collective parity.

    Returns (parities, post-measurement block state as a 512-vector).
    """
    block = np.asarray(block_state, dtype=complex).ravel()
    if block.size != 512:
        raise GeometryMismatch("armada_parity_check needs a 9-qubit block state")
    rng = np.random.default_rng(seed)

    if kind == "spin-flip":
        bell = np.zeros(4)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        anc = np.kron(np.kron(bell, bell), bell)
        full = np.kron(block, anc)
        reg = LatticeRegister((5, 3), tuple(range(15)), (2,) * 15, full)
        # ancilla sites 9..14: rows (9,10), (11,12), (13,14)
        pairs = []
        for row in range(3):
            for col in range(2):
                pairs.append((9 + 2 * row + col, 3 * row + col, np.pi))
        reg = _pair_phase_condition(reg, pairs, cond=(0, 1))
        for a in range(9, 15):
            reg = single_qubit(reg, a, "H")
        out, reg = measure(reg, list(range(9, 15)), rng=rng)
        parities = tuple((out[9 + 2 * r] + out[10 + 2 * r]) % 2 for r in range(3))
    elif kind == "phase-flip":
        reg0 = LatticeRegister((3, 3), tuple(range(9)), (2,) * 9, block)
        for s in range(9):
            reg0 = single_qubit(reg0, s, "H")
        ghz = np.zeros(64)
        ghz[0] = ghz[63] = 1 / np.sqrt(2)
        full = np.kron(reg0.state, ghz)
        reg = LatticeRegister((5, 3), tuple(range(15)), (2,) * 15, full)
        # the rotated codewords have deterministic parity only over complete
        # rows, so the GHZ armada probes the six atoms of the first two rows
        pairs = [(9 + k, k, np.pi) for k in range(6)]
        reg = _pair_phase_condition(reg, pairs, cond=(0, 1))
        for a in range(9, 15):
            reg = single_qubit(reg, a, "H")
        out, reg = measure(reg, list(range(9, 15)), rng=rng)
        parities = (sum(out[a] for a in range(9, 15)) % 2,)
    else:
        raise ValidationError("kind must be 'spin-flip' or 'phase-flip'")

    # strip the (now product) ancillas and, for phase-flip, undo the rotation
    t = reg.state.reshape(512, 64)
    col = int(np.argmax(np.linalg.norm(t, axis=0)))
    post = t[:, col]
    post = post / np.linalg.norm(post)
    if kind == "phase-flip":
        pr = LatticeRegister((3, 3), tuple(range(9)), (2,) * 9, post)
        for s in range(9):
            pr = single_qubit(pr, s, "H")
        post = pr.state
    return parities, post


# -- sweep constructions ---------------------------------------------------


def sweep(phases, phi0: float = 0.0) -> LatticeRegister:
    """Sweep a selected 3-level atom across a string of N = len(phases) atoms.

    Selected atom starts in (|0> + |r>)/sqrt(2), the string in (|0>+|1>)
    per atom; transporting the |r> branch applies phase phases[j] to string
    atom j's |1> component (and phi0 to its |0> component).
    """
    phases = [float(p) for p in np.atleast_1d(phases)]
    N = len(phases)
    dims = (3,) + (2,) * N
    sel = np.zeros(3, dtype=complex)
    sel[0] = sel[2] = 1 / np.sqrt(2)  # level 2 is the transport level r
    state = sel
    for _ in range(N):
        state = np.kron(state, np.array([1, 1], dtype=complex) / np.sqrt(2))
    reg = LatticeRegister((N + 1,), tuple(range(N + 1)), dims, state)
    digs = reg.digits()
    r_branch = digs[0] == 2
    accum = np.zeros(reg.state.size)
    for j in range(N):
        accum += np.where(digs[1 + j] == 1, phases[j], phi0) * r_branch
    return LatticeRegister(reg.shape, reg.sites, reg.dims, reg.state * np.exp(1j * accum))


def ghz_from_sweep(N: int):
    """(N+1)-party GHZ state from a pi-phase sweep plus local rotations.

    Returns a 2^(N+1) statevector with the transport level relabeled |1>.
    """
    reg = sweep([np.pi] * N)
    for j in range(1, N + 1):
        reg = single_qubit(reg, j, "H")
    t = reg.state.reshape(reg.dims)
    out = np.zeros((2,) * (N + 1), dtype=complex)
    out[0] = t[0]
    out[1] = t[2]
    leak = np.linalg.norm(t[1])
    if leak > 1e-12:
        raise ValidationError(f"selected atom leaked into |1> ({leak:.2e})")
    return out.ravel()


def sweep_qft(source_bits):
    """Fourier-transform phases written onto a fresh target register.

    source_bits a_1..a_m is a classical basis state; target atom j ends in
    (|0> + e^{2 pi i 0.a_j...a_m}|1>)/sqrt(2).  Returns (state over the m
    target qubits, tracked scalar phase Phi(a) = 0 in the lift & shift
    model).
    """
    a = [int(b) for b in source_bits]
    if any(b not in (0, 1) for b in a):
        raise ValidationError("source must be a computational basis state")
    m = len(a)
    amps1 = []
    for j in range(m):
        frac = sum(a[l] / 2 ** (l - j + 1) for l in range(j, m))
        amps1.append(np.exp(2j * np.pi * frac))
    state = np.array([1.0], dtype=complex)
    for j in range(m):
        state = np.kron(state, np.array([1.0, amps1[j]], dtype=complex) / np.sqrt(2))
    return state, 0.0


# -- second-level concatenation bookkeeping --------------------------------


def sparse_block_pair_phase(bits_a, bits_b, phi: float = np.pi) -> complex:
    """Collision phase factor for a level-2 shift of one 81-site block over
    another, applied to a pair of sparse basis occupation patterns.

    Each corresponding-atom pair with (x_a, x_b) = (0, 1) contributes
    e^{-i phi}; patterns are dicts site->bit (missing sites are 0).
    """
    sites = set(bits_a) | set(bits_b)
    count = sum(1 for s in sites if bits_a.get(s, 0) == 0 and bits_b.get(s, 0) == 1)
    return complex(np.exp(-1j * phi * count))


def sparse_shift(superposition, phi: float = np.pi):
    """Apply the level-2 pairwise phase to a sparse two-block superposition.

    ``superposition`` maps (pattern_a, pattern_b) keys to amplitudes, where
    each pattern is a tuple of (site, bit) items; returns the phased dict.
    """
    out = {}
    for (pa, pb), amp in superposition.items():
        f = sparse_block_pair_phase(dict(pa), dict(pb), phi)
        out[(pa, pb)] = amp * f
    return out


# -- circuit scripts -------------------------------------------------------


def run_script(text: str, seed=None):
    """Execute a line-oriented circuit script.

    Commands: INIT <n|RxC> <bits>; H j; X j; Z j; LX phi; LY phi;
    SWEEP phi1,phi2,...; MEASURE j [j ...].  '#' starts a comment.
    Returns dict with the final register and measurement outcomes.
    """
    rng = np.random.default_rng(seed)
    reg = None
    outcomes = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        cmd = parts[0].upper()
        try:
            if cmd == "INIT":
                geom = parts[1]
                shape = tuple(int(v) for v in geom.lower().split("x")) if "x" in geom.lower() else (int(geom),)
                bits = [int(c) for c in parts[2]]
                reg = LatticeRegister.basis(shape, bits)
            elif cmd in ("H", "X", "Z"):
                reg = single_qubit(reg, int(parts[1]), cmd)
            elif cmd == "LX":
                reg = apply_lx(reg, float(parts[1]))
            elif cmd == "LY":
                reg = apply_ly(reg, float(parts[1]))
            elif cmd == "SWEEP":
                phis = [float(v) for v in parts[1].split(",")]
                reg = sweep(phis)
            elif cmd == "MEASURE":
                out, reg = measure(reg, [int(v) for v in parts[1:]], rng=rng)
                outcomes.append(out)
            else:
                raise ValidationError(f"unknown command {cmd!r}")
        except (TypeError, AttributeError) as e:
            raise ValidationError(f"script line {ln}: {e}") from e
    return {"register": reg, "measurements": outcomes}
