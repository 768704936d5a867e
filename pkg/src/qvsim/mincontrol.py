"""Globally unitary ancilla model: gates selected by ancilla preparation.

The fixed interaction is E^(u, phi) = u_a . SWAP . D_ra(phi) for a chosen
single-QV unitary u and two-QV phase table phi.  Preparing an ancilla in
|q> and interacting twice applies the programmed local gate
s(q) = R(phi(q, .)) u R(phi(., q)); three interactions with an ancilla in
|0> apply the two-QV gate W(u, phi).  No measurement ever drives the
computation: ancillas end in u|q> exactly and are discarded.

``universal_spec`` builds the explicit universal parameter choice
(u = F with a sparse random phi); ``universality_witness`` evidences the
density of the programmed gate set by breadth-first word search against
Haar-random targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (Gate, NumericalInvariantError, QState, apply_gate,
                   make_basis_state, measure_x, product,
                   subsystem_distribution)
from .gates import TwoPhaseFunction, fourier, swap

ANCILLA_PURITY_TOL = 1e-9
SCHMIDT_TOL = 1e-9
ENTANGLING_TOL = 1e-9


@dataclass(frozen=True)
class MinControlSpec:
    """Interaction parameters: dimension, programmed unitary u, phase table."""

    d: int
    u: Gate
    phi: TwoPhaseFunction

    def __post_init__(self):
        if self.u.dims != (self.d,):
            raise ValueError("u must be a single-QV gate of the spec dimension")
        if self.phi.d != self.d:
            raise ValueError("phi must be a d x d table")


@dataclass(frozen=True)
class SynthesisReport:
    """Breadth-first synthesis outcome against sampled targets."""

    n_targets: int
    depth: int
    eps: float
    distances: tuple
    success_fraction: float
    words_explored: int
    partial: bool = False

    def __post_init__(self):
        for v in self.distances:
            if not 0.0 <= v <= 2.0 + 1e-12:
                raise ValueError(f"distance {v} outside [0, 2]")


def _rot(table) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(table, dtype=np.float64)))


def build_E_hat(spec: MinControlSpec) -> Gate:
    """The interaction u_a . SWAP . D_ra(phi) on (register, ancilla)."""
    d = spec.d
    diag = np.exp(1j * spec.phi.as_array().reshape(-1))
    m = np.kron(np.eye(d), spec.u.as_matrix()) @ swap(d).as_matrix() @ np.diag(diag)
    return Gate("E^", (d, d), matrix=m)


def s_matrix(spec: MinControlSpec, q: int) -> Gate:
    """Programmed local gate s(q) = R(phi(q, .)) u R(phi(., q))."""
    m = _rot(spec.phi.row(q)) @ spec.u.as_matrix() @ _rot(spec.phi.col(q))
    return Gate(f"s({q})", (spec.d,), matrix=m)


def W_matrix(spec: MinControlSpec) -> Gate:
    """Two-QV gate W = R_r(phi(0, .)) . E^_rs . u_r R_r(phi(., 0)).

    E^_rs follows the interaction's subscript convention (u acts on the
    first-listed wire, the phase table takes the second-listed value
    first), i.e. it is the (register, ancilla) gate conjugated by SWAP.
    Equals the register action of :func:`mc_entangle` exactly.
    """
    d = spec.d
    sw = swap(d).as_matrix()
    e_rs = sw @ build_E_hat(spec).as_matrix() @ sw
    pre = np.kron(spec.u.as_matrix() @ _rot(spec.phi.col(0)), np.eye(d))
    post = np.kron(_rot(spec.phi.row(0)), np.eye(d))
    return Gate("W", (d, d), matrix=post @ e_rs @ pre)


def _retire_ancilla(state: QState, anc: int, expected: int, u_dag: Gate) -> QState:
    """Rotate the ancilla by u^dag and discard it, checking it really is
    disentangled in |expected>."""
    state = apply_gate(state, u_dag, (anc,))
    prob = subsystem_distribution(state, anc)[expected]
    if abs(prob - 1.0) > ANCILLA_PURITY_TOL:
        raise NumericalInvariantError(
            f"ancilla failed to disentangle (p={prob:.12f})")
    _, state = measure_x(state, anc, forced=expected)
    return state


def mc_local(state: QState, r: int, q: int, spec: MinControlSpec) -> QState:
    """Apply s(q) to QV ``r`` with two interactions of an ancilla |q>."""
    e_hat = build_E_hat(spec)
    st = product(state, make_basis_state((spec.d,), (q,)))
    anc = st.n - 1
    st = apply_gate(st, e_hat, (r, anc))
    st = apply_gate(st, e_hat, (r, anc))
    return _retire_ancilla(st, anc, q, spec.u.dagger())


def mc_entangle(state: QState, r: int, s: int, spec: MinControlSpec) -> QState:
    """Apply W(u, phi) to QVs ``(r, s)`` with three interactions of an
    ancilla |0> (the minimum for a unitary-only mediator)."""
    e_hat = build_E_hat(spec)
    st = product(state, make_basis_state((spec.d,), (0,)))
    anc = st.n - 1
    st = apply_gate(st, e_hat, (r, anc))
    st = apply_gate(st, e_hat, (s, anc))
    st = apply_gate(st, e_hat, (r, anc))
    return _retire_ancilla(st, anc, 0, spec.u.dagger())


def mc_ancilla_controlled(state: QState, r: int, v: Gate,
                          spec: MinControlSpec) -> QState:
    """Apply an arbitrary single-QV gate ``v`` to QV ``r`` by acting on the
    mediating ancilla between its two interactions.

    The ancilla-side gate is v' = R(-phi(0, .)) v R(-phi(., 0)) u^dag; the
    ancilla still ends in u|0> (reusable when u = I).
    """
    d = spec.d
    vp = (_rot(-spec.phi.row(0)) @ v.as_matrix()
          @ _rot(-spec.phi.col(0)) @ spec.u.as_matrix().conj().T)
    e_hat = build_E_hat(spec)
    st = product(state, make_basis_state((d,), (0,)))
    anc = st.n - 1
    st = apply_gate(st, e_hat, (r, anc))
    st = apply_gate(st, Gate("v'", (d,), matrix=vp), (anc,))
    st = apply_gate(st, e_hat, (r, anc))
    return _retire_ancilla(st, anc, 0, spec.u.dagger())


def entangling_condition(phi: TwoPhaseFunction) -> bool:
    """Sufficient entangling test: some pair (q, q') has
    phi(q,q) + phi(q',q') - phi(q,q') - phi(q',q) != 0 mod 2 pi."""
    t = phi.as_array()
    diag = np.diag(t)
    val = diag[:, None] + diag[None, :] - t - t.T
    r = np.mod(val, 2 * np.pi)
    dist = np.minimum(r, 2 * np.pi - r)
    return bool((dist > ENTANGLING_TOL).any())


def operator_schmidt_values(w: np.ndarray, d1: int, d2: int) -> np.ndarray:
    """Singular values of the realigned operator; their count above
    threshold is the operator-Schmidt rank."""
    m = np.asarray(w, dtype=np.complex128).reshape(d1, d2, d1, d2)
    m = m.transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    return np.linalg.svd(m, compute_uv=False)


def is_product_unitary(w, d1: int | None = None, d2: int | None = None) -> bool:
    """True iff the two-QV unitary factorizes as A (x) B."""
    if isinstance(w, Gate):
        d1, d2 = w.dims
        w = w.as_matrix()
    elif d1 is None or d2 is None:
        d1 = d2 = int(round(np.sqrt(w.shape[0])))
    sv = operator_schmidt_values(w, d1, d2)
    return int((sv > SCHMIDT_TOL).sum()) == 1


def universal_spec(d: int, seed=None) -> MinControlSpec:
    """The explicit universal parameter choice: u = F and phi zero except
    phi(q, d-1) = theta_q, with theta_0 = 0 and the other theta_q drawn
    independently and uniformly from [0, 2 pi)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    t = np.zeros((d, d))
    t[1:, d - 1] = rng.uniform(0.0, 2 * np.pi, d - 1)
    return MinControlSpec(d, fourier(d), TwoPhaseFunction(d, tuple(map(tuple, t))))


def cz_spec(d: int) -> MinControlSpec:
    """Parameter choice u = F, phi(q, q') = 2 pi q q' / d, under which the
    interaction coincides with the swap-based measured-model gate and CZ
    is exactly recoverable from W plus programmed locals."""
    t = 2 * np.pi * (np.outer(np.arange(d), np.arange(d)) % d) / d
    return MinControlSpec(d, fourier(d), TwoPhaseFunction(d, tuple(map(tuple, t))))


def cz_decomposition(spec: MinControlSpec):
    """Exact CZ from one W application plus programmed locals, when possible.

    Whenever delta(q, q') = 2 pi q q'/d - phi(q, q') splits as
    a(q) + b(q') mod 2 pi, then up to global phase and a final r<->s
    relabel (the SWAP inside the interaction):

        CZ = SWAP . u_r^dag R_r(-phi(0,.)) . W . R_r(-phi(.,0)) u_r^dag
                  . R_r(b) R_s(a)

    Returns the four local gates (pre_r, pre_s, post_r, post_s) to wrap
    around :func:`mc_entangle`, or None when no split exists (e.g. for
    the sparse universal parameters, where CZ is only approximable).
    """
    d = spec.d
    delta = 2 * np.pi * (np.outer(np.arange(d), np.arange(d)) % d) / d \
        - spec.phi.as_array()
    resid = delta - delta[:, :1] - delta[:1, :] + delta[0, 0]
    r = np.mod(resid, 2 * np.pi)
    if (np.minimum(r, 2 * np.pi - r) > 1e-10).any():
        return None
    a = delta[:, 0]
    b = delta[0, :] - delta[0, 0]
    u_dag = spec.u.as_matrix().conj().T
    pre_r = _rot(-spec.phi.col(0)) @ u_dag @ _rot(b)
    pre_s = _rot(a)
    post_r = u_dag @ _rot(-spec.phi.row(0))
    post_s = np.eye(d)
    return (Gate("czfix_r", (d,), matrix=pre_r),
            Gate("czfix_s", (d,), matrix=pre_s),
            Gate("czfix_r'", (d,), matrix=post_r),
            Gate("czfix_s'", (d,), matrix=post_s))


def haar_unitary(d: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix (phase-fixed R)."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def phase_distance(w: np.ndarray, target: np.ndarray) -> float:
    """Global-phase-invariant normalized Frobenius distance
    sqrt(2 - 2 |tr(T^dag w)| / d), ranging over [0, 2]."""
    d = w.shape[0]
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * abs(np.trace(target.conj().T @ w)) / d)))


def _canonical_key(m: np.ndarray) -> bytes:
    flat = m.reshape(-1)
    pivot = flat[np.abs(flat).argmax()]
    return np.round(flat / (pivot / abs(pivot)), 8).tobytes()


def universality_witness(gates, depth: int, targets, eps: float,
                         max_words: int = 200_000) -> SynthesisReport:
    """Breadth-first search over words of the gate set, reporting the best
    phase-invariant distance to each target and the success fraction at
    ``eps``.

    Duplicate words (up to global phase, at 1e-8 resolution) are pruned.
    If the word budget is exhausted the report is flagged partial.
    """
    mats = [np.asarray(g.as_matrix() if isinstance(g, Gate) else g,
                       dtype=np.complex128) for g in gates]
    if not mats:
        raise ValueError("empty gate set")
    d = mats[0].shape[0]
    eye = np.eye(d, dtype=np.complex128)
    seen = {_canonical_key(eye)}
    words = [eye]
    frontier = [eye]
    partial = False
    for _ in range(depth):
        if partial or not frontier:
            break
        nxt = []
        for w in frontier:
            for g in mats:
                cand = g @ w
                k = _canonical_key(cand)
                if k in seen:
                    continue
                seen.add(k)
                nxt.append(cand)
                words.append(cand)
                if len(words) >= max_words:
                    partial = True
                    break
            if partial:
                break
        frontier = nxt
    stack = np.stack(words)
    dists = []
    for t in np.asarray(targets):
        overlaps = np.abs(np.einsum("nij,ij->n", stack, np.conj(t)))
        dists.append(float(np.sqrt(max(0.0, 2.0 - 2.0 * overlaps.max() / d))))
    success = float(np.mean([v <= eps for v in dists]))
    return SynthesisReport(n_targets=len(dists), depth=depth, eps=eps,
                           distances=tuple(dists), success_fraction=success,
                           words_explored=len(words), partial=partial)
