"""Pure-numpy state-vector kernels (fallback backend).

Every function takes a flat complex amplitude vector together with the
subsystem dimension tuple and returns a fresh array; inputs are never
mutated.  Semantics are shared with the compiled backend in
``_kernels_cy`` and pinned by the contract tests.
"""

import numpy as np

BACKEND = "python"


def _to_front(amps, dims, targets):
    """View ``amps`` with the target axes moved to the front."""
    t = amps.reshape(dims)
    return np.moveaxis(t, targets, range(len(targets)))


def apply_unitary(amps, dims, targets, matrix):
    """Apply a dense unitary on the joint space of ``targets``."""
    k = len(targets)
    tdims = [dims[i] for i in targets]
    front = _to_front(amps, dims, targets).reshape(int(np.prod(tdims)), -1)
    out = matrix @ front
    rest = [d for i, d in enumerate(dims) if i not in targets]
    out = out.reshape(tdims + rest)
    out = np.moveaxis(out, range(k), targets)
    return np.ascontiguousarray(out.reshape(-1))


def apply_permphase(amps, dims, targets, perm, phases):
    """Apply a structured gate ``|j> -> phases[j] |perm[j]>`` on ``targets``."""
    k = len(targets)
    tdims = [dims[i] for i in targets]
    front = _to_front(amps, dims, targets).reshape(int(np.prod(tdims)), -1)
    out = np.empty_like(front)
    out[perm] = front * phases[:, None]
    rest = [d for i, d in enumerate(dims) if i not in targets]
    out = out.reshape(tdims + rest)
    out = np.moveaxis(out, range(k), targets)
    return np.ascontiguousarray(out.reshape(-1))


def subsystem_probs(amps, dims, target):
    """Born probabilities of computational outcomes on one subsystem."""
    front = _to_front(amps, dims, (target,)).reshape(dims[target], -1)
    return (np.abs(front) ** 2).sum(axis=1)


def collapse(amps, dims, target, outcome):
    """Project onto ``outcome`` of ``target`` and drop that subsystem.

    The result is unnormalized; remaining axes keep their original order.
    """
    front = _to_front(amps, dims, (target,))
    return np.ascontiguousarray(front[outcome].reshape(-1))
