"""Cold-collision quantum gates for neutral atoms in optical lattices.

Simulation suite covering transported-trap and trap-switching two-qubit
phase gates, perturbative contact-interaction shifts, Mott-insulator
lattice loading, minimum gate fidelity with thermal motion, and lattice
quantum-computing primitives (Shor-code syndrome extraction, sweep
circuits, fault-tolerant CNOT).
"""

from . import errors, fidelity, mott, moving, qc, switching, traps

__version__ = "0.1.0"

__all__ = [
    "errors",
    "fidelity",
    "mott",
    "moving",
    "qc",
    "switching",
    "traps",
    "__version__",
]
