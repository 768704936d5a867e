"""Circuit execution in three modes and JSON result documents.

``direct`` applies each gate's unitary to the state vector and is the
brute-force oracle the other modes are compared against.  ``adqc`` runs
the compiled measured-ancilla program and reports the Pauli frame.
``mincontrol`` drives every gate through the globally unitary
swap-interaction model (single-QV gates exactly via programmed ancillas;
CZ only under a parameter choice whose W is locally correctable to CZ).

``--compare`` replays the protocol's register measurement outcomes into a
direct run and reports the frame-corrected fidelity between the two final
states.  Documents round floats to 15 significant digits and are byte
identical under replay.
"""

from __future__ import annotations

import json

import numpy as np

from . import adqc, mincontrol
from .circuits import Circuit
from .core import (QState, apply_gate, fidelity, make_basis_state,
                   make_plus_state, measure_x, product)
from .gates import (PhaseFunction, cubic_phase, cz, fourier, pauli_x, pauli_z,
                    phase_gate, rotation)

MODES = ("direct", "adqc", "mincontrol")


def initial_state(circ: Circuit) -> QState:
    if circ.init is None:
        return make_basis_state((circ.d,) * circ.n, (0,) * circ.n)
    state = None
    for kind, label in circ.init:
        part = (make_plus_state(circ.d, label) if kind == "+"
                else make_basis_state((circ.d,), (label,)))
        state = part if state is None else product(state, part)
    return state


def _gate_for(op, d):
    name = op[0]
    if name == "F":
        return fourier(d), (op[1],)
    if name == "P":
        return phase_gate(d, op[1]), (op[2],)
    if name == "X":
        return pauli_x(d, op[1]), (op[2],)
    if name == "Z":
        return pauli_z(d, op[1]), (op[2],)
    if name == "D3":
        return cubic_phase(d, op[1]), (op[2],)
    if name == "CZ":
        return cz(d, d), (op[1], op[2])
    if name == "R":
        return rotation(PhaseFunction(d, op[1])), (op[2],)
    raise ValueError(f"unsupported gate {name!r}")


def run_direct(circ: Circuit, *, forced=None, seed=None):
    """Direct-unitary execution; ``forced`` feeds measure lines in order.

    Returns (state, alive logical ids, measured outcomes).
    """
    state = initial_state(circ)
    alive = list(range(circ.n))
    queue = list(forced) if forced is not None else []
    rng = np.random.default_rng(seed)
    outcomes = []
    for op in circ.ops:
        if op[0] == "M":
            fm = queue.pop(0) if queue else None
            m, state = measure_x(state, alive.index(op[1]),
                                 rng=None if fm is not None else rng, forced=fm)
            outcomes.append(m)
            alive.remove(op[1])
        else:
            gate, targets = _gate_for(op, circ.d)
            state = apply_gate(state, gate, tuple(alive.index(t) for t in targets))
    return state, alive, outcomes


def run_mincontrol(circ: Circuit, *, forced=None, seed=None, spec=None,
                   spec_seed=None):
    """Execute through the minimal-control model.

    Single-QV gates are exact: F via the programmed s(0) when the spec
    provides it, everything else via an ancilla-side local gate.  CZ uses
    one W application plus programmed locals and a wire relabel, available
    only when the spec's phase table supports it (``cz_decomposition``).
    """
    if circ.variant == "hybrid":
        raise ValueError("unsupported combination: hybrid + mincontrol")
    d = circ.d
    if spec is None:
        spec = mincontrol.universal_spec(d, seed=spec_seed)
    s0_is_f = np.abs(mincontrol.s_matrix(spec, 0).as_matrix()
                     - fourier(d).as_matrix()).max() < 1e-12
    czdec = mincontrol.cz_decomposition(spec)

    state = initial_state(circ)
    wire = list(range(circ.n))       # wire[pos] = logical id
    queue = list(forced) if forced is not None else []
    rng = np.random.default_rng(seed)
    outcomes = []
    ancillas = 0

    def pos(t):
        return wire.index(t)

    for op in circ.ops:
        name = op[0]
        if name == "M":
            fm = queue.pop(0) if queue else None
            m, state = measure_x(state, pos(op[1]),
                                 rng=None if fm is not None else rng, forced=fm)
            outcomes.append(m)
            wire.remove(op[1])
        elif name == "CZ":
            if czdec is None:
                raise ValueError(
                    "unsupported combination: CZ in mincontrol mode needs a "
                    "spec whose W is locally correctable to CZ (see cz_spec)")
            pre_r, pre_s, post_r, post_s = czdec
            r, s = pos(op[1]), pos(op[2])
            state = mincontrol.mc_ancilla_controlled(state, s, pre_s, spec)
            state = mincontrol.mc_ancilla_controlled(state, r, pre_r, spec)
            state = mincontrol.mc_entangle(state, r, s, spec)
            state = mincontrol.mc_ancilla_controlled(state, r, post_r, spec)
            # the trailing SWAP of the decomposition is a wire relabel
            wire[r], wire[s] = wire[s], wire[r]
            ancillas += 4
        elif name == "F" and s0_is_f:
            state = mincontrol.mc_local(state, pos(op[1]), 0, spec)
            ancillas += 1
        else:
            gate, targets = _gate_for(op, d)
            state = mincontrol.mc_ancilla_controlled(state, pos(targets[0]),
                                                     gate, spec)
            ancillas += 1

    # report amplitudes in logical wire order
    if wire != sorted(wire):
        perm_state = state.amps.reshape(state.dims)
        order = np.argsort(wire)
        perm_state = np.transpose(perm_state, order)
        state = QState(tuple(state.dims[i] for i in order),
                       np.ascontiguousarray(perm_state.reshape(-1)), _internal=True)
    return state, sorted(wire), outcomes, ancillas


def run_mode(circ: Circuit, mode: str, *, compare: bool = False, seed=None,
             forced=None, spec_seed=None, mc_spec=None) -> dict:
    """Run a circuit in one mode and build the result document."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    seed = circ.seed if seed is None else seed
    forced = circ.forced if forced is None else forced

    doc = {
        "mode": mode,
        "dim": circ.d,
        "qvs": circ.n,
        "variant": circ.variant,
        "ancilla_dim": circ.d_a,
        "seed": seed,
    }

    if mode == "direct":
        state, alive, outcomes = run_direct(circ, forced=forced, seed=seed)
        doc.update({
            "alive": list(alive),
            "amplitudes": _amps(state),
            "frame": None,
            "frame_corrected_amplitudes": _amps(state),
            "outcomes": list(outcomes),
            "register_outcomes": list(outcomes),
            "layers": None,
            "adaptive_measurements": None,
            "ancillas_used": 0,
        })
        reference = state
        register_outcomes = outcomes
    elif mode == "adqc":
        program = adqc.compile_logical(circ.ops, circ.d, circ.n,
                                       variant=circ.variant, d_a=circ.d_a)
        res = adqc.run(program, initial_state(circ), forced=forced, seed=seed)
        corrected = adqc.correct_frame(res)
        doc.update({
            "alive": list(res.alive),
            "amplitudes": _amps(res.state),
            "frame": {"x": list(res.frame.x), "z": list(res.frame.z),
                      "xi": res.frame.xi},
            "frame_corrected_amplitudes": _amps(corrected),
            "outcomes": list(res.outcomes),
            "register_outcomes": list(res.register_outcomes),
            "layers": res.layers,
            "adaptive_measurements": res.adaptive_measurements,
            "ancillas_used": res.ancillas_used,
        })
        reference = corrected
        register_outcomes = list(res.register_outcomes)
    else:
        spec = mc_spec
        if isinstance(spec, str):
            spec = (mincontrol.cz_spec(circ.d) if spec == "cz"
                    else mincontrol.universal_spec(circ.d, seed=spec_seed))
        state, alive, outcomes, ancillas = run_mincontrol(
            circ, forced=forced, seed=seed, spec=spec, spec_seed=spec_seed)
        doc.update({
            "alive": list(alive),
            "amplitudes": _amps(state),
            "frame": None,
            "frame_corrected_amplitudes": _amps(state),
            "outcomes": list(outcomes),
            "register_outcomes": list(outcomes),
            "layers": None,
            "adaptive_measurements": None,
            "ancillas_used": ancillas,
        })
        reference = state
        register_outcomes = outcomes

    if compare:
        oracle, _, _ = run_direct(circ, forced=register_outcomes, seed=seed)
        doc["oracle_fidelity"] = _round15(fidelity(reference, oracle))
    else:
        doc["oracle_fidelity"] = None
    return doc


def report_layers(circ: Circuit) -> dict:
    """Static layer/adaptivity accounting of the compiled program."""
    program = adqc.compile_logical(circ.ops, circ.d, circ.n,
                                   variant=circ.variant, d_a=circ.d_a)
    observables = adqc.program_observables(program)
    return {
        "layers": adqc.program_layers(program),
        "adaptive_measurements": adqc.program_adaptive_count(program),
        "measurements": len(observables),
        "observables": sorted(set(observables)),
    }


def _round15(x: float) -> float:
    return float(f"{x:.15g}")


def _amps(state: QState) -> list:
    return [[_round15(float(a.real)), _round15(float(a.imag))]
            for a in state.amps]


def document_to_json(doc: dict) -> str:
    """Deterministic JSON encoding (stable key order, 15-digit floats)."""
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"
