"""Measurement-driven ancilla computation: protocols, compiler, executor.

Every logical gate is realized by interacting a fresh ancilla (prepared
in the conjugate-basis zero state) with register QVs through one fixed
two-body interaction, then destructively measuring the ancilla.  The
measurement outcome leaves a Pauli error on the register which is never
corrected physically: a classical :class:`~qvsim.pauli.PauliFrame` is
updated instead, and non-Clifford steps adapt their measurement basis to
the current frame so the logical gate stays deterministic branch by
branch.

Interaction variants:

``E``       F_r F_a^dag CZ        (the default)
``checkE``  F_a SWAP CZ           (swap-based alternative)
``hybrid``  F_r F_a^dag C^r_a Z   (ancilla dimension d_a != d)

For the hybrid variant the outcome error is the conjugate-basis phase
gate u(m); it is the Pauli X(k m) exactly when d_a = d / k, which is the
condition for deterministic frame tracking.  For non-divisible d_a the
executor refuses deterministic mode and offers a single-shot stochastic
mode that reports each residual u(m) as an explicit gate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (Gate, MeasurementRecord, QState, apply_gate,
                   make_basis_state, make_plus_state, measure_observable_xU,
                   measure_x, product)
from .gates import (PhaseFunction, controlled_u, cubic_phase_table, cz,
                    fourier, pauli_x, pauli_z, phase_gate, swap)
from .pauli import (PauliFrame, frame_absorb_pauli, frame_update_FP,
                    frame_update_FR, frame_update_entangle,
                    frame_update_entangle_checkE)

VARIANTS = ("E", "checkE", "hybrid")


# --------------------------------------------------------------------------
# program representation

@dataclass(frozen=True)
class Entangle:
    r: int
    s: int


@dataclass(frozen=True)
class Local:
    """Measured FR(theta) step; ``adaptive`` shifts the measurement table
    by the current frame x so the logical gate is exactly FR(theta)."""

    r: int
    table: tuple
    adaptive: bool = False


@dataclass(frozen=True)
class LocalFP:
    """Clifford FP(p) step; never adapted, the frame absorbs everything."""

    r: int
    p: int


@dataclass(frozen=True)
class AbsorbPauli:
    """Logical X(q)Z(qp) as pure classical processing."""

    r: int
    q: int
    qp: int


@dataclass(frozen=True)
class MeasureX:
    """Simulated register computational measurement (QV removed)."""

    r: int


Step = Entangle | Local | LocalFP | AbsorbPauli | MeasureX


def _step_qvs(step: Step):
    if isinstance(step, Entangle):
        return (step.r, step.s)
    return (step.r,)


@dataclass(frozen=True)
class AdqcProgram:
    d: int
    n: int
    steps: tuple
    variant: str = "E"
    d_a: int | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "hybrid" and self.d_a is None:
            raise ValueError("hybrid programs need an ancilla dimension")
        for st in self.steps:
            for qv in _step_qvs(st):
                if not 0 <= qv < self.n:
                    raise ValueError(f"step {st} addresses QV out of range")

    @property
    def ancilla_dim(self) -> int:
        return self.d_a if self.variant == "hybrid" else self.d

    @property
    def deterministic(self) -> bool:
        """Frame tracking is exact iff the ancilla dimension divides d."""
        return self.d % self.ancilla_dim == 0


@dataclass(frozen=True)
class RunResult:
    """Register state, frame and bookkeeping of one program execution.

    ``frame`` stays indexed by logical QV id (size n); entries of removed
    QVs are zero.  ``alive`` lists the logical ids still in the register,
    in register order.
    """

    state: QState
    frame: PauliFrame
    records: tuple            # every physical measurement, in order
    outcomes: tuple           # raw outcome log (same order as records)
    register_outcomes: tuple  # frame-corrected results of MeasureX steps
    alive: tuple
    layers: int
    adaptive_measurements: int
    ancillas_used: int
    interactions_used: int
    residuals: tuple = ()     # (logical qv, Gate) pairs in stochastic mode


# --------------------------------------------------------------------------
# interactions and measured-basis gates

@lru_cache(maxsize=None)
def build_interaction(variant: str, d: int, d_a: int | None = None) -> Gate:
    """Two-QV interaction gate on (register, ancilla)."""
    if variant == "E":
        f = fourier(d).as_matrix()
        m = np.kron(f, f.conj().T) @ cz(d, d).as_matrix()
        return Gate("E", (d, d), matrix=m)
    if variant == "checkE":
        f = fourier(d).as_matrix()
        m = np.kron(np.eye(d), f) @ swap(d).as_matrix() @ cz(d, d).as_matrix()
        return Gate("checkE", (d, d), matrix=m)
    if variant == "hybrid":
        if d_a is None:
            raise ValueError("hybrid interaction needs d_a")
        fr = fourier(d).as_matrix()
        fa = fourier(d_a).as_matrix()
        m = np.kron(fr, fa.conj().T) @ cz(d, d_a).as_matrix()
        return Gate(f"E'[{d},{d_a}]", (d, d_a), matrix=m)
    raise ValueError(f"unknown variant {variant!r}")


def u_gate(d: int, d_a: int, m: int) -> Gate:
    """Hybrid outcome error u(m): diagonal exp(-2 pi i q m / d_a) in the
    register conjugate basis.  Equals X(k m) when d_a = d / k."""
    f = fourier(d).as_matrix()
    ph = np.exp(-2j * np.pi * ((np.arange(d) * m) % d_a) / d_a)
    return Gate(f"u({m})", (d,), matrix=f @ np.diag(ph) @ f.conj().T)


def etilde(d: int) -> Gate:
    """Logical entangling gate of the measured entangle step, F_r F_s CZ."""
    f = fourier(d).as_matrix()
    return Gate("Et", (d, d), matrix=np.kron(f, f) @ cz(d, d).as_matrix())


def etilde_checkE(d: int) -> Gate:
    """Logical entangling gate of the swap-based variant, F_r F_s CX."""
    f = fourier(d).as_matrix()
    cx = controlled_u(pauli_x(d, 1), d).as_matrix()
    return Gate("Etc", (d, d), matrix=np.kron(f, f) @ cx)


def etilde_hybrid(d: int, d_a: int) -> Gate:
    """Logical entangling gate of the hybrid protocol,
    (F x F) . diag(exp(2 pi i q q' / d_a))."""
    f = fourier(d).as_matrix()
    expo = np.outer(np.arange(d), np.arange(d)) % d_a
    m = np.kron(f, f) @ np.diag(np.exp(2j * np.pi * expo.reshape(-1) / d_a))
    return Gate("Et'", (d, d), matrix=m)


def _adapted(table: np.ndarray, shift: int) -> np.ndarray:
    """Measurement table for frame x = shift: theta'(v) = theta(v - shift)."""
    return np.roll(table, shift % len(table))


@lru_cache(maxsize=None)
def _identity_gate(d: int) -> Gate:
    return Gate("I", (d,), perm=np.arange(d), phases=np.ones(d))


def _fr_basis(d: int, table, conj_by_f: bool = False) -> Gate:
    """Basis change for x_{FR(theta)} (or x_{FR(theta)F^dag} for the swap
    variant)."""
    table = np.asarray(table, dtype=np.float64)
    if not table.any():
        # theta = 0: x_F for the main interaction, plain x for the swap one
        return _identity_gate(d) if conj_by_f else fourier(d)
    r = np.diag(np.exp(1j * table))
    f = fourier(d).as_matrix()
    m = f @ r @ f.conj().T if conj_by_f else f @ r
    return Gate("FR", (d,), matrix=m, validate=False)


def _as_table(theta, d: int) -> np.ndarray:
    table = np.asarray(theta.table if isinstance(theta, PhaseFunction) else theta,
                       dtype=np.float64)
    if len(table) != d:
        raise ValueError(f"phase table length {len(table)} != {d}")
    return table


# --------------------------------------------------------------------------
# single protocol steps (positions refer to the given state)

def _append_plus(state: QState, d: int) -> QState:
    return product(state, make_plus_state(d, 0))


def protocol_entangle(state, r, s, *, rng=None, forced=None, variant="E",
                      d_a=None):
    """Interact a fresh ancilla with QVs ``r`` then ``s`` and measure it.

    Returns ``(state', m)``.  The register gains the variant's entangling
    gate up to the outcome-dependent error; the outcome distribution is
    uniform for every input.
    """
    d = state.dims[r]
    d_anc = d_a if variant == "hybrid" else d
    inter = build_interaction(variant, d, d_anc)
    st = _append_plus(state, d_anc)
    anc = st.n - 1
    st = apply_gate(st, inter, (r, anc))
    st = apply_gate(st, inter, (s, anc))
    m, st = measure_x(st, anc, rng=rng, forced=forced)
    return st, m


def protocol_local(state, r, theta, *, frame=None, adaptive=False, rng=None,
                   forced=None, variant="E"):
    """Measured FR(theta) on QV ``r``: one ancilla interaction followed by
    an x_{FR(theta)} measurement (x_{FR(theta)F^dag} for the swap variant).

    With ``adaptive`` the table is shifted by the frame's x entry for QV
    ``r`` so the logical gate is exactly FR(theta) up to a Pauli error.
    """
    d = state.dims[r]
    table = _as_table(theta, d)
    if adaptive:
        if frame is None:
            raise ValueError("adaptive step needs the current frame")
        table = _adapted(table, frame.x[r])
    inter = build_interaction(variant, d, d)
    basis = _fr_basis(d, table, conj_by_f=(variant == "checkE"))
    st = _append_plus(state, d)
    anc = st.n - 1
    st = apply_gate(st, inter, (r, anc))
    m, st = measure_observable_xU(st, anc, basis, rng=rng, forced=forced)
    return st, m


def protocol_local_fp(state, r, p, *, rng=None, forced=None, variant="E"):
    """Clifford FP(p) step via the fixed x_{FP(p)} measurement."""
    d = state.dims[r]
    pg = phase_gate(d, p).as_matrix()
    f = fourier(d).as_matrix()
    m_basis = f @ pg @ f.conj().T if variant == "checkE" else f @ pg
    inter = build_interaction(variant, d, d)
    st = _append_plus(state, d)
    anc = st.n - 1
    st = apply_gate(st, inter, (r, anc))
    basis = Gate("FP", (d,), matrix=m_basis, validate=False)
    m, st = measure_observable_xU(st, anc, basis, rng=rng, forced=forced)
    return st, m


def protocol_measure_x(state, r, *, rng=None, forced=None, variant="E"):
    """Simulated computational measurement of register QV ``r``.

    One ancilla interaction, an ancilla measurement carrying the outcome,
    then the (now disentangled) register QV is discarded.  Returns
    ``(m, state')`` with the QV removed; the outcome distribution equals a
    direct computational measurement of ``r``.
    """
    if variant == "hybrid":
        raise ValueError("register measurement is not supported with hybrid ancillas")
    d = state.dims[r]
    inter = build_interaction(variant, d, d)
    st = _append_plus(state, d)
    anc = st.n - 1
    st = apply_gate(st, inter, (r, anc))
    if variant == "checkE":
        # the register label sits in the ancilla conjugate basis here
        m, st = measure_observable_xU(st, anc, fourier(d).dagger(),
                                      rng=rng, forced=forced)
    else:
        m, st = measure_x(st, anc, rng=rng, forced=forced)
    # register QV r is left in |+_m>: rotate back and retire it
    st = apply_gate(st, fourier(d).dagger(), (r,))
    _, st = measure_x(st, r, forced=m)
    return m, st


def protocol_entangle_hybrid(state, r, s, d_a, *, rng=None, forced=None):
    """Hybrid-dimension entangling step; see :func:`protocol_entangle`."""
    return protocol_entangle(state, r, s, rng=rng, forced=forced,
                             variant="hybrid", d_a=d_a)


def protocol_local_hybrid(state, r, theta_a, d_a, *, frame=None,
                          adaptive=False, rng=None, forced=None):
    """Hybrid local step: ``theta_a`` is a table over Z(d_a); the register
    gains u(-m) F R(theta_bar) with theta_bar(q) = theta_a(q mod d_a)."""
    d = state.dims[r]
    table = _as_table(theta_a, d_a)
    if adaptive:
        if frame is None:
            raise ValueError("adaptive step needs the current frame")
        table = _adapted(table, frame.x[r])
    inter = build_interaction("hybrid", d, d_a)
    basis = _fr_basis(d_a, table)
    st = _append_plus(state, d_a)
    anc = st.n - 1
    st = apply_gate(st, inter, (r, anc))
    m, st = measure_observable_xU(st, anc, basis, rng=rng, forced=forced)
    return st, m


def protocol_entangle_checkE(state, r, s, *, rng=None, forced=None):
    """Swap-based entangling step; see :func:`protocol_entangle`."""
    return protocol_entangle(state, r, s, rng=rng, forced=forced,
                             variant="checkE")


def protocol_local_checkE(state, r, theta, *, frame=None, adaptive=False,
                          rng=None, forced=None):
    """Swap-based local step; see :func:`protocol_local`."""
    return protocol_local(state, r, theta, frame=frame, adaptive=adaptive,
                          rng=rng, forced=forced, variant="checkE")


# --------------------------------------------------------------------------
# compiler

CLIFFORD_NAMES = frozenset({"F", "P", "X", "Z", "CZ"})
GATE_NAMES = CLIFFORD_NAMES | {"R", "D3", "M"}


def compile_logical(ops, d: int, n: int, variant: str = "E",
                    d_a: int | None = None) -> AdqcProgram:
    """Compile a logical gate list into measured-protocol steps.

    ``ops`` entries: ("F", t), ("P", p, t), ("X", q, t), ("Z", q, t),
    ("CZ", r, s), ("R", table, t), ("D3", qp, t), ("M", t).

    Decompositions (identities pinned in the test suite):
      F      = FR(0)
      P(p)   = F^3 . FP(p)
      R(th)  = F^3 . FR(th)            (adaptive measurement)
      D3(qp) = R(cubic table)
      CZ     = (F^3 x F^3) . Etilde           [E variant]
      CZ     = F_r^3 . Etilde_check . F_s^3   [checkE variant]

    Clifford-only inputs compile with zero adaptive measurements and use
    only the x, x_F and x_FP observables.  With hybrid ancillas the gate
    alphabet shrinks to F, X, Z and rotations whose table has period d_a:
    the other generators are not reachable deterministically.
    """
    hybrid = variant == "hybrid"
    if hybrid:
        if d_a is None:
            raise ValueError("hybrid compilation needs d_a")
        if d % d_a != 0:
            raise ValueError("deterministic hybrid compilation needs d_a | d")
    zero = (0.0,) * (d_a if hybrid else d)

    def f_step(t):
        return Local(t, zero, adaptive=False)

    steps: list[Step] = []
    for op in ops:
        name = op[0]
        if name == "F":
            steps.append(f_step(op[1]))
        elif name == "X":
            _, q, t = op
            steps.append(AbsorbPauli(t, int(q), 0))
        elif name == "Z":
            _, q, t = op
            steps.append(AbsorbPauli(t, 0, int(q)))
        elif name == "P":
            if hybrid:
                raise ValueError("P is not reachable with hybrid ancillas")
            _, p, t = op
            steps.append(LocalFP(t, int(p)))
            steps.extend(f_step(t) for _ in range(3))
        elif name == "CZ":
            if hybrid:
                raise ValueError("CZ is not reachable with hybrid ancillas")
            _, r, s = op
            if r == s:
                raise ValueError("CZ needs two distinct QVs")
            if variant == "checkE":
                steps.extend(f_step(s) for _ in range(3))
                steps.append(Entangle(r, s))
                steps.extend(f_step(r) for _ in range(3))
            else:
                steps.append(Entangle(r, s))
                steps.extend(f_step(r) for _ in range(3))
                steps.extend(f_step(s) for _ in range(3))
        elif name in ("R", "D3"):
            if name == "R":
                _, table, t = op
                tab = tuple(float(v) for v in table)
            else:
                _, qp, t = op
                tab = cubic_phase_table(d, int(qp)).table
            if hybrid:
                tab = _hybrid_table(tab, d, d_a)
            steps.append(Local(t, tab, adaptive=True))
            steps.extend(f_step(t) for _ in range(3))
        elif name == "M":
            if hybrid:
                raise ValueError("register measurement is not supported with "
                                 "hybrid ancillas")
            steps.append(MeasureX(op[1]))
        else:
            raise ValueError(f"unsupported gate {name!r}")
    return AdqcProgram(d, n, tuple(steps), variant, d_a)


def _hybrid_table(tab, d: int, d_a: int) -> tuple:
    """Restrict a register phase table to the ancilla alphabet.

    Only tables with period d_a are implementable when d_a < d."""
    arr = np.asarray(tab, dtype=np.float64)
    if len(arr) == d_a:
        return tuple(arr)
    if len(arr) != d:
        raise ValueError(f"phase table length {len(arr)} != d={d}")
    folded = arr[:d_a]
    if not np.allclose(arr, np.resize(folded, d), atol=1e-12):
        raise ValueError("phase table is not periodic mod d_a; the gate is "
                         "not implementable with this ancilla dimension")
    return tuple(folded)


def program_layers(program: AdqcProgram) -> int:
    """Greedy layer count: steps on disjoint QVs share a layer, classical
    absorptions are free."""
    busy_until = [0] * program.n
    layers = 0
    for st in program.steps:
        if isinstance(st, AbsorbPauli):
            continue
        qvs = _step_qvs(st)
        layer = max(busy_until[q] for q in qvs) + 1
        for q in qvs:
            busy_until[q] = layer
        layers = max(layers, layer)
    return layers


def program_adaptive_count(program: AdqcProgram) -> int:
    return sum(1 for st in program.steps
               if isinstance(st, Local) and st.adaptive)


def program_observables(program: AdqcProgram) -> list:
    """Measurement observable label of every measuring step, in order."""
    labels = []
    for st in program.steps:
        if isinstance(st, (Entangle, MeasureX)):
            labels.append("x")
        elif isinstance(st, LocalFP):
            labels.append("x_FP")
        elif isinstance(st, Local):
            labels.append("x_F" if not any(st.table) else "x_FR")
    return labels


# --------------------------------------------------------------------------
# executor

class _Forcing:
    """Hands out forced outcomes until the list runs dry, then samples."""

    def __init__(self, forced, seed):
        self.queue = [] if forced is None else [int(v) for v in forced]
        self.pos = 0
        self.rng = np.random.default_rng(seed)

    def next(self):
        if self.pos < len(self.queue):
            self.pos += 1
            return self.queue[self.pos - 1], None
        return None, self.rng


def run(program: AdqcProgram, initial: QState | None = None, *, forced=None,
        seed=None, stochastic: bool = False) -> RunResult:
    """Execute a program, consuming one fresh ancilla per measuring step.

    ``forced`` pins raw measurement outcomes in order; remaining steps
    sample from the seeded generator.  Replaying the same forcing and seed
    reproduces the outcome log bit for bit.
    """
    d, n = program.d, program.n
    if initial is None:
        initial = make_basis_state((d,) * n, (0,) * n)
    if initial.dims != (d,) * n:
        raise ValueError(f"initial state dims {initial.dims} != {(d,) * n}")
    if program.variant == "hybrid" and not program.deterministic and not stochastic:
        raise ValueError(
            f"d_a={program.d_a} does not divide d={d}: deterministic frame "
            "tracking is impossible; pass stochastic=True for a single-shot run")

    k = d // program.ancilla_dim
    state = initial
    frame = PauliFrame.zero((d,) * n)   # indexed by logical QV id throughout
    alive = list(range(n))
    forcing = _Forcing(forced, seed)
    records: list[MeasurementRecord] = []
    reg_out: list[int] = []
    residuals: list = []
    ancillas = interactions = 0

    for st in program.steps:
        if isinstance(st, AbsorbPauli):
            frame = frame_absorb_pauli(frame, st.r, st.q, st.qp)
            continue
        fm, rng = forcing.next()
        was_forced = fm is not None
        if isinstance(st, Entangle):
            state, m = protocol_entangle(
                state, alive.index(st.r), alive.index(st.s),
                rng=rng, forced=fm, variant=program.variant, d_a=program.d_a)
            if program.deterministic:
                frame = (frame_update_entangle_checkE(frame, st.r, st.s, m)
                         if program.variant == "checkE"
                         else frame_update_entangle(frame, st.r, st.s, m, k))
            else:
                residuals.append((st.r, u_gate(d, program.d_a, m)))
            records.append(MeasurementRecord(st.r, "x", m, was_forced))
            ancillas += 1
            interactions += 2
        elif isinstance(st, Local):
            label = "x_F" if not any(st.table) else "x_FR"
            pos_frame = _positional_frame(frame, alive) if st.adaptive else None
            if program.variant == "hybrid":
                tab = _hybrid_table(st.table, d, program.d_a)
                state, m = protocol_local_hybrid(
                    state, alive.index(st.r), tab, program.d_a,
                    frame=pos_frame, adaptive=st.adaptive, rng=rng, forced=fm)
            else:
                state, m = protocol_local(
                    state, alive.index(st.r), st.table,
                    frame=pos_frame, adaptive=st.adaptive, rng=rng, forced=fm,
                    variant=program.variant)
            if program.deterministic:
                frame = frame_update_FR(frame, st.r, m, k)
            else:
                residuals.append((st.r, u_gate(d, program.d_a,
                                               (-m) % program.d_a)))
            records.append(MeasurementRecord(st.r, label, m, was_forced))
            ancillas += 1
            interactions += 1
        elif isinstance(st, LocalFP):
            if program.variant == "hybrid" and program.d_a != d:
                raise ValueError("LocalFP steps need same-dimension ancillas")
            state, m = protocol_local_fp(state, alive.index(st.r), st.p,
                                         rng=rng, forced=fm,
                                         variant=program.variant)
            frame = frame_update_FP(frame, st.r, st.p, m)
            records.append(MeasurementRecord(st.r, "x_FP", m, was_forced))
            ancillas += 1
            interactions += 1
        elif isinstance(st, MeasureX):
            if program.variant == "hybrid" and program.d_a != d:
                raise ValueError("register measurement is not supported with "
                                 "hybrid ancillas")
            m, state = protocol_measure_x(state, alive.index(st.r), rng=rng,
                                          forced=fm, variant=program.variant)
            records.append(MeasurementRecord(st.r, "x", m, was_forced))
            reg_out.append((m - frame.x[st.r]) % d)
            frame = frame_absorb_pauli(frame, st.r, frame.x[st.r], frame.z[st.r])
            alive.remove(st.r)
            ancillas += 1
            interactions += 1
        else:
            raise ValueError(f"unknown step {st!r}")

    return RunResult(
        state=state, frame=frame,
        records=tuple(records), outcomes=tuple(rec.outcome for rec in records),
        register_outcomes=tuple(reg_out), alive=tuple(alive),
        layers=program_layers(program),
        adaptive_measurements=program_adaptive_count(program),
        ancillas_used=ancillas, interactions_used=interactions,
        residuals=tuple(residuals))


def _positional_frame(frame: PauliFrame, alive: list) -> PauliFrame:
    """Frame re-indexed by current register position (logical ids in
    ``alive`` order)."""
    return PauliFrame(tuple(frame.dims[i] for i in alive),
                      tuple(frame.x[i] for i in alive),
                      tuple(frame.z[i] for i in alive), frame.xi)


def correct_frame(result: RunResult) -> QState:
    """Undo the tracked Pauli error: maps the physical register state to
    the logical circuit output, up to global phase."""
    state = result.state
    for pos, qv in enumerate(result.alive):
        d = result.frame.dims[qv]
        if result.frame.x[qv]:
            state = apply_gate(state, pauli_x(d, (-result.frame.x[qv]) % d), (pos,))
        if result.frame.z[qv]:
            state = apply_gate(state, pauli_z(d, (-result.frame.z[qv]) % d), (pos,))
    return state
