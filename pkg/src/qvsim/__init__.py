"""Qudit quantum-variable simulation: generalized Pauli/Clifford algebra,
ancilla-driven measured computation with Pauli-frame feed-forward, and the
globally unitary minimal-control model, all checked against a direct
dense-unitary oracle."""

from .core import (Gate, MeasurementRecord, NumericalInvariantError, QState,
                   ZeroProbabilityError,
                   apply_gate, fidelity, make_basis_state, make_plus_state,
                   measure_observable_xU, measure_x, product,
                   subsystem_distribution)
from .gates import (Observable, PhaseFunction, TwoPhaseFunction, cubic_phase,
                    cz, diag2, fourier, observable_p, observable_x, omega,
                    pauli_x, pauli_z, phase_gate, rotation, swap, tau)
from .pauli import (PauliElement, PauliFrame, conjugate, find_pauli,
                    frame_absorb_pauli, frame_update_FP, frame_update_FR,
                    frame_update_entangle, frame_update_entangle_checkE,
                    pauli_compose, pauli_to_matrix)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
