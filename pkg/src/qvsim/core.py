"""State construction, gate application and projective measurement.

A register is a tensor product of subsystems of possibly differing
dimensions, addressed row-major (the last subsystem varies fastest).
States are immutable after construction; every operation returns a new
:class:`QState`.  Measurement is destructive: the measured subsystem is
removed from the register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

NORM_TOL = 1e-9
UNITARY_TOL = 1e-9
PROB_FLOOR = 1e-12

# ~24 qubit equivalents; larger registers are out of scope.
MAX_TOTAL_DIM = 1 << 26


class NumericalInvariantError(RuntimeError):
    """A numerical contract (norm, unitarity, probability) was violated."""


class ZeroProbabilityError(NumericalInvariantError):
    """A forced measurement outcome has (numerically) zero probability."""


def validate_dims(dims: Sequence[int]) -> tuple[int, ...]:
    """Check a subsystem dimension tuple and return it normalized."""
    out = tuple(int(d) for d in dims)
    for d in out:
        if d < 2:
            raise ValueError(f"subsystem dimension must be >= 2, got {d}")
    total = 1
    for d in out:
        total *= d
        if total > MAX_TOTAL_DIM:
            raise ValueError(f"total Hilbert dimension exceeds {MAX_TOTAL_DIM}")
    return out


class QState:
    """Normalized amplitude vector over a tuple of subsystem dimensions."""

    __slots__ = ("dims", "amps")

    def __init__(self, dims, amps, *, _internal=False):
        self.dims = validate_dims(dims)
        total = math.prod(self.dims)
        if _internal:
            a = amps
        else:
            a = np.array(amps, dtype=np.complex128).reshape(-1)
        if a.shape != (total,):
            raise ValueError(f"expected {total} amplitudes, got {a.shape}")
        nrm = np.linalg.norm(a)
        if abs(nrm - 1.0) > NORM_TOL:
            raise NumericalInvariantError(f"state norm {nrm} deviates from 1")
        a.flags.writeable = False
        self.amps = a

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __repr__(self):
        return f"QState(dims={self.dims})"


class Gate:
    """Unitary on one or two subsystems.

    Either a dense ``matrix`` or a structured form (basis permutation
    ``perm`` plus diagonal ``phases``, acting as ``|j> -> phases[j]
    |perm[j]>`` on the joint target space) or both.  Structured gates are
    applied without materializing their matrix.
    """

    __slots__ = ("name", "dims", "matrix", "perm", "phases")

    def __init__(self, name, dims, matrix=None, perm=None, phases=None,
                 validate=True):
        self.name = name
        self.dims = tuple(int(d) for d in dims)
        block = math.prod(self.dims)
        # own copies: gate arrays are frozen below, caller arrays stay loose
        self.matrix = None if matrix is None else np.array(matrix, dtype=np.complex128)
        if (perm is None) != (phases is None):
            raise ValueError("structured form needs both perm and phases")
        self.perm = None if perm is None else np.array(perm, dtype=np.int64)
        self.phases = None if phases is None else np.array(phases, dtype=np.complex128)
        if self.matrix is None and self.perm is None:
            raise ValueError("gate needs a matrix or a structured form")
        if validate:
            self._validate(block)
        # gates are immutable and shareable (constructors cache them)
        for arr in (self.matrix, self.perm, self.phases):
            if arr is not None:
                arr.flags.writeable = False

    def _validate(self, block):
        if self.matrix is not None:
            if self.matrix.shape != (block, block):
                raise ValueError(f"matrix shape {self.matrix.shape} != {(block, block)}")
            dev = np.abs(self.matrix.conj().T @ self.matrix - np.eye(block)).max()
            if dev > UNITARY_TOL:
                raise NumericalInvariantError(f"gate {self.name!r} not unitary (dev {dev:.2e})")
        if self.perm is not None:
            if sorted(self.perm.tolist()) != list(range(block)):
                raise ValueError(f"perm of gate {self.name!r} is not a permutation")
            if np.abs(np.abs(self.phases) - 1.0).max() > UNITARY_TOL:
                raise NumericalInvariantError(f"gate {self.name!r} phases not unimodular")
        if self.matrix is not None and self.perm is not None:
            if np.abs(self.matrix - self._expand()).max() > UNITARY_TOL:
                raise NumericalInvariantError(
                    f"gate {self.name!r}: structured form disagrees with matrix")

    def _expand(self):
        block = math.prod(self.dims)
        m = np.zeros((block, block), dtype=np.complex128)
        m[self.perm, np.arange(block)] = self.phases
        return m

    @property
    def arity(self) -> int:
        return len(self.dims)

    def as_matrix(self) -> np.ndarray:
        return self.matrix if self.matrix is not None else self._expand()

    def dagger(self) -> "Gate":
        if self.matrix is not None:
            return Gate(self.name + "^", self.dims, matrix=self.matrix.conj().T,
                        validate=False)
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return Gate(self.name + "^", self.dims, perm=inv,
                    phases=self.phases[inv].conj(), validate=False)

    def __repr__(self):
        form = "matrix" if self.matrix is not None else "structured"
        return f"Gate({self.name!r}, dims={self.dims}, {form})"


@dataclass(frozen=True)
class MeasurementRecord:
    """One projective measurement: target, observable label, outcome."""

    target: int
    observable: str
    outcome: int
    forced: bool


def make_basis_state(dims, labels) -> QState:
    """Computational basis state |q_1 ... q_n> over ``dims``."""
    dims = validate_dims(dims)
    labels = tuple(int(q) for q in labels)
    if len(labels) != len(dims):
        raise ValueError("one label per subsystem required")
    idx = 0
    for q, d in zip(labels, dims):
        if not 0 <= q < d:
            raise ValueError(f"label {q} out of range for dimension {d}")
        idx = idx * d + q
    amps = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    amps[idx] = 1.0
    return QState(dims, amps, _internal=True)


def make_plus_state(d: int, q: int = 0) -> QState:
    """Single conjugate-basis state with amplitudes omega^(q q')/sqrt(d)."""
    d = int(d)
    if not 0 <= q < d:
        raise ValueError(f"label {q} out of range for dimension {d}")
    qs = np.arange(d)
    amps = np.exp(2j * np.pi * ((q * qs) % d) / d) / np.sqrt(d)
    return QState((d,), amps, _internal=True)


def product(a: QState, b: QState) -> QState:
    """Tensor product; ``b``'s subsystems are appended after ``a``'s."""
    return QState(a.dims + b.dims, np.kron(a.amps, b.amps), _internal=True)


def apply_gate(state: QState, gate: Gate, targets) -> QState:
    """Apply ``gate`` to the given subsystems of ``state``."""
    targets = tuple(int(t) for t in targets)
    if len(targets) != gate.arity:
        raise ValueError(f"gate expects {gate.arity} targets, got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target in {targets}")
    for t, d in zip(targets, gate.dims):
        if not 0 <= t < state.n:
            raise ValueError(f"target {t} out of range")
        if state.dims[t] != d:
            raise ValueError(f"gate dimension {d} != subsystem dimension {state.dims[t]}")
    if gate.perm is not None:
        amps = kernels.apply_permphase(state.amps, state.dims, targets,
                                       gate.perm, gate.phases)
    else:
        amps = kernels.apply_unitary(state.amps, state.dims, targets, gate.matrix)
    return QState(state.dims, amps, _internal=True)


def subsystem_distribution(state: QState, target: int, basis_change: Gate | None = None):
    """Exact outcome distribution of a computational measurement on ``target``,
    optionally after a local basis-change gate."""
    if basis_change is not None:
        state = apply_gate(state, basis_change, (target,))
    probs = kernels.subsystem_probs(state.amps, state.dims, target)
    if abs(probs.sum() - 1.0) > NORM_TOL:
        raise NumericalInvariantError(f"probabilities sum to {probs.sum()}")
    return probs


def sample_outcome(probs, rng) -> int:
    """Draw an outcome index from ``probs`` with the given generator."""
    cum = np.cumsum(probs)
    r = rng.random() * cum[-1]
    return min(int(np.searchsorted(cum, r, side="right")), len(probs) - 1)


def measure_x(state: QState, target: int, *, rng=None, forced: int | None = None):
    """Destructive computational-basis measurement of one subsystem.

    Returns ``(outcome, post_state)``; the measured subsystem is removed.
    ``forced`` projects on the given outcome and raises if its probability
    is below ``PROB_FLOOR``; otherwise ``rng`` draws from the Born rule.
    """
    target = int(target)
    if not 0 <= target < state.n:
        raise ValueError(f"target {target} out of range")
    probs = kernels.subsystem_probs(state.amps, state.dims, target)
    if forced is not None:
        m = int(forced)
        if not 0 <= m < state.dims[target]:
            raise ValueError(f"forced outcome {m} out of range")
        if probs[m] < PROB_FLOOR:
            raise ZeroProbabilityError(
                f"forced outcome {m} has probability {probs[m]:.3e}")
    else:
        if rng is None:
            raise ValueError("measurement needs an rng or a forced outcome")
        m = sample_outcome(probs, rng)
    reduced = kernels.collapse(state.amps, state.dims, target, m)
    reduced = reduced / np.sqrt(probs[m])
    new_dims = state.dims[:target] + state.dims[target + 1:]
    return m, QState(new_dims, reduced, _internal=True)


def measure_observable_xU(state: QState, target: int, basis_change: Gate,
                          *, rng=None, forced: int | None = None):
    """Measure in the rotated basis: apply ``basis_change`` to ``target``,
    then measure the computational observable.  Outcome labels are the
    computational labels after rotation."""
    rotated = apply_gate(state, basis_change, (target,))
    return measure_x(rotated, target, rng=rng, forced=forced)


def fidelity(a: QState, b: QState) -> float:
    """Global-phase-insensitive overlap |<a|b>|^2."""
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")
    return float(np.abs(np.vdot(a.amps, b.amps)) ** 2)
