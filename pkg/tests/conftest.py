import math

import numpy as np
import pytest

from qvsim.core import QState


def rand_state(dims, rng) -> QState:
    total = math.prod(dims)
    a = rng.normal(size=total) + 1j * rng.normal(size=total)
    return QState(dims, a / np.linalg.norm(a))


def embed_gate_matrix(u, dims, targets) -> np.ndarray:
    """Independent oracle: the full register matrix of a gate, built by
    brute-force digit manipulation (no strides, no reshapes)."""
    u = np.asarray(u)
    dims = tuple(dims)
    total = math.prod(dims)
    tdims = [dims[t] for t in targets]
    block = math.prod(tdims)
    full = np.zeros((total, total), dtype=complex)

    def digits_of(idx):
        out = []
        for d in reversed(dims):
            out.append(idx % d)
            idx //= d
        return list(reversed(out))

    def index_of(digits):
        idx = 0
        for q, d in zip(digits, dims):
            idx = idx * d + q
        return idx

    for col in range(total):
        dg = digits_of(col)
        sub = 0
        for t, td in zip(targets, tdims):
            sub = sub * td + dg[t]
        for row_sub in range(block):
            rs, out_digits = row_sub, list(dg)
            for t, td in zip(reversed(targets), reversed(tdims)):
                out_digits[t] = rs % td
                rs //= td
            full[index_of(out_digits), col] += u[row_sub, sub]
    return full


def random_ops(d, n, depth, rng, names=("F", "P", "X", "Z", "CZ", "R", "D3")):
    """Random logical circuit over the supported alphabet."""
    if n < 2:
        names = tuple(g for g in names if g != "CZ")
    ops = []
    for _ in range(depth):
        name = names[rng.integers(len(names))]
        if name == "F":
            ops.append(("F", int(rng.integers(n))))
        elif name == "P":
            ops.append(("P", int(rng.integers(2 * d)), int(rng.integers(n))))
        elif name == "X":
            ops.append(("X", int(rng.integers(1, d)), int(rng.integers(n))))
        elif name == "Z":
            ops.append(("Z", int(rng.integers(1, d)), int(rng.integers(n))))
        elif name == "CZ":
            r, s = rng.choice(n, 2, replace=False)
            ops.append(("CZ", int(r), int(s)))
        elif name == "R":
            ops.append(("R", tuple(rng.uniform(0, 2 * np.pi, d)),
                        int(rng.integers(n))))
        else:
            ops.append(("D3", int(rng.integers(1, d)), int(rng.integers(n))))
    return ops


def direct_apply(ops, d, state) -> QState:
    """Direct-unitary application of a logical circuit (the oracle side)."""
    from qvsim.core import apply_gate
    from qvsim.runner import _gate_for
    for op in ops:
        gate, targets = _gate_for(op, d)
        state = apply_gate(state, gate, targets)
    return state


def measuring_steps(program) -> int:
    from qvsim.adqc import AbsorbPauli
    return sum(1 for s in program.steps if not isinstance(s, AbsorbPauli))


@pytest.fixture(params=["python", "cython"])
def kernel_backend(request):
    if request.param == "python":
        from qvsim import _kernels_py as impl
    else:
        impl = pytest.importorskip("qvsim._kernels_cy")
    return impl
