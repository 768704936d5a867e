"""Symplectic Pauli-group algebra, Clifford conjugation rules, and the
classical side-processing (Pauli frame) used by the ancilla-driven engine.

An n-QV Pauli element is stored as (xi, vec) with the phase exponent
xi in Z(2d) (the operator carries tau^xi = omega^(xi/2)) and vec in
Z(d)^(2n) ordered (x_1..x_n, z_1..z_n), representing
tau^xi X(x_1)Z(z_1) (x) ... (x) X(x_n)Z(z_n).

All rules here are exact, phase included, and are pinned against dense
matrix oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import Gate
from .gates import pauli_x, pauli_z, rho_d, _tau_pow


@dataclass(frozen=True)
class PauliElement:
    """Phase exponent xi in Z(2d) plus symplectic vector in Z(d)^(2n)."""

    d: int
    n: int
    xi: int
    vec: tuple

    def __post_init__(self):
        if len(self.vec) != 2 * self.n:
            raise ValueError(f"vec length {len(self.vec)} != 2n = {2 * self.n}")
        object.__setattr__(self, "xi", int(self.xi) % (2 * self.d))
        object.__setattr__(self, "vec", tuple(int(v) % self.d for v in self.vec))

    @classmethod
    def identity(cls, d: int, n: int = 1) -> "PauliElement":
        return cls(d, n, 0, (0,) * (2 * n))

    def x(self, k: int) -> int:
        return self.vec[k]

    def z(self, k: int) -> int:
        return self.vec[self.n + k]

    def with_site(self, k: int, x: int, z: int, xi: int) -> "PauliElement":
        vec = list(self.vec)
        vec[k] = x
        vec[self.n + k] = z
        return PauliElement(self.d, self.n, xi, tuple(vec))


def pauli_compose(a: PauliElement, b: PauliElement) -> PauliElement:
    """Operator product a.b (b acts first), matching the matrix product
    exactly.  The commutation cost is delta = sum_k z_a[k] x_b[k], entering
    the phase as omega^delta = tau^(2 delta)."""
    if (a.d, a.n) != (b.d, b.n):
        raise ValueError("shape mismatch in Pauli composition")
    delta = sum(a.z(k) * b.x(k) for k in range(a.n))
    vec = tuple(va + vb for va, vb in zip(a.vec, b.vec))
    return PauliElement(a.d, a.n, a.xi + b.xi + 2 * delta, vec)


def pauli_inverse(p: PauliElement) -> PauliElement:
    """Inverse element: p . pauli_inverse(p) = identity."""
    delta = sum(p.z(k) * p.x(k) for k in range(p.n))
    vec = tuple(-v for v in p.vec)
    return PauliElement(p.d, p.n, -p.xi + 2 * delta, vec)


def pauli_to_matrix(p: PauliElement) -> Gate:
    """Dense form tau^xi X(x_1)Z(z_1) (x) ... ; for oracle use (n small)."""
    if p.d ** p.n > 1 << 12:
        raise ValueError("Pauli element too large to densify")
    m = np.ones((1, 1), dtype=np.complex128)
    for k in range(p.n):
        xk = pauli_x(p.d, p.x(k)).as_matrix()
        zk = pauli_z(p.d, p.z(k)).as_matrix()
        m = np.kron(m, xk @ zk)
    m = _tau_pow(p.d, [p.xi])[0] * m
    return Gate(f"p[{p.xi},{p.vec}]", (p.d,) * p.n, matrix=m)


def conjugate(p: PauliElement, gate) -> PauliElement:
    """Clifford conjugation g p g^dagger for g in {F@k, P(pp)@k, CZ@(j,k)}.

    ``gate`` is a label tuple: ("F", k), ("P", pp, k) or ("CZ", j, k).
    Exact including the phase exponent.
    """
    kind = gate[0]
    if kind == "F":
        (_, k) = gate
        x, z = p.x(k), p.z(k)
        return p.with_site(k, -z, x, p.xi - 2 * x * z)
    if kind == "P":
        (_, pp, k) = gate
        x, z = p.x(k), p.z(k)
        return p.with_site(k, x, z + pp * x, p.xi + pp * x * (x + rho_d(p.d)))
    if kind == "CZ":
        (_, j, k) = gate
        if j == k:
            raise ValueError("CZ sites must differ")
        xj, zj = p.x(j), p.z(j)
        xk, zk = p.x(k), p.z(k)
        q = p.with_site(j, xj, zj + xk, p.xi + 2 * xj * xk)
        return q.with_site(k, xk, zk + xj, q.xi)
    raise ValueError(f"unknown Clifford generator label {gate!r}")


def find_pauli(matrix: np.ndarray, d: int, n: int = 1, tol: float = 1e-10):
    """Search the n-QV Pauli group for an element matching ``matrix``.

    Returns the PauliElement or None.  Exhaustive over the d^(2n) vectors
    with the phase recovered from the first nonzero column, so it doubles
    as a certification oracle for (non-)Pauli residual gates.
    """
    from itertools import product as iproduct

    matrix = np.asarray(matrix, dtype=np.complex128)
    for vec in iproduct(range(d), repeat=2 * n):
        cand = PauliElement(d, n, 0, vec)
        base = pauli_to_matrix(cand).as_matrix()
        # matrix must equal tau^xi * base for an integer xi
        nz = np.flatnonzero(np.abs(base) > 0.5)
        ratio = matrix.reshape(-1)[nz[0]] / base.reshape(-1)[nz[0]]
        if abs(abs(ratio) - 1.0) > tol:
            continue
        xi = round(np.angle(ratio) * d / np.pi) % (2 * d)
        full = _tau_pow(d, [xi])[0] * base
        if np.abs(matrix - full).max() <= tol:
            return PauliElement(d, n, xi, vec)
    return None


@dataclass(frozen=True)
class PauliFrame:
    """Per-QV Pauli error record (x_k, z_k), plus a global phase exponent.

    The physical register state is tau^xi . prod_k X_k(x_k) Z_k(z_k)
    applied to the logical state.  xi is bookkeeping only: corrections and
    comparisons never need it (and it is only meaningful for uniform-d
    frames).
    """

    dims: tuple
    x: tuple
    z: tuple
    xi: int = 0

    def __post_init__(self):
        if not (len(self.x) == len(self.z) == len(self.dims)):
            raise ValueError("frame fields must have one entry per QV")
        object.__setattr__(self, "x", tuple(int(v) % d for v, d in zip(self.x, self.dims)))
        object.__setattr__(self, "z", tuple(int(v) % d for v, d in zip(self.z, self.dims)))
        object.__setattr__(self, "xi", int(self.xi) % (2 * self.dims[0]) if self.dims else 0)

    @classmethod
    def zero(cls, dims) -> "PauliFrame":
        dims = tuple(int(d) for d in dims)
        return cls(dims, (0,) * len(dims), (0,) * len(dims), 0)

    def is_zero(self) -> bool:
        return not any(self.x) and not any(self.z)

    def _set(self, updates: dict, dxi: int = 0) -> "PauliFrame":
        x = list(self.x)
        z = list(self.z)
        for r, (xr, zr) in updates.items():
            x[r], z[r] = xr, zr
        return replace(self, x=tuple(x), z=tuple(z), xi=self.xi + dxi)


def frame_update_entangle(f: PauliFrame, r: int, s: int, m: int, k: int = 1) -> PauliFrame:
    """Frame map for the measured entangling step; k = d / d_a for the
    hybrid interaction (k = 1 in the plain model)."""
    if r == s:
        raise ValueError("entangling step needs two distinct QVs")
    xr, zr, xs, zs = f.x[r], f.z[r], f.x[s], f.z[s]
    dxi = -2 * xr * zr - 2 * xs * zs - 2 * k * xr * xs
    return f._set({r: (k * m - zr - k * xs, xr), s: (-zs - k * xr, xs)}, dxi)


def frame_update_FR(f: PauliFrame, r: int, m: int, k: int = 1) -> PauliFrame:
    """Frame map for a measured FR(theta) step: (x, z) -> (-z - k m, x)."""
    xr, zr = f.x[r], f.z[r]
    return f._set({r: (-zr - k * m, xr)}, -2 * xr * zr)


def frame_update_FP(f: PauliFrame, r: int, p: int, m: int) -> PauliFrame:
    """Frame map for the non-adapted Clifford FP(p) step:
    (x, z) -> (-z - p x - m, x)."""
    xr, zr = f.x[r], f.z[r]
    dxi = -p * xr * xr + p * rho_d(f.dims[r]) * xr - 2 * xr * zr
    return f._set({r: (-zr - p * xr - m, xr)}, dxi)


def frame_update_entangle_checkE(f: PauliFrame, r: int, s: int, m: int) -> PauliFrame:
    """Frame map for the swap-based interaction's entangling step.

    Derived by tableau conjugation through F_r F_s CX (and the outcome
    errors X_r(m) X_s(-m)); pinned against the matrix oracle in tests.
    """
    if r == s:
        raise ValueError("entangling step needs two distinct QVs")
    xr, zr, xs, zs = f.x[r], f.z[r], f.x[s], f.z[s]
    dxi = -2 * xr * zr - 2 * xs * zs
    return f._set({r: (m - zr + zs, xr), s: (-zs - m, xr + xs)}, dxi)


def frame_absorb_pauli(f: PauliFrame, r: int, q: int, qp: int) -> PauliFrame:
    """Implement a logical X(q)Z(qp) purely classically:
    (x, z) -> (x - q, z - qp)."""
    xr, zr = f.x[r], f.z[r]
    return f._set({r: (xr - q, zr - qp)}, 2 * q * qp - 2 * zr * q)


def frame_remove(f: PauliFrame, r: int) -> PauliFrame:
    """Drop the entry of a destructively measured QV."""
    keep = [i for i in range(len(f.dims)) if i != r]
    return PauliFrame(tuple(f.dims[i] for i in keep),
                      tuple(f.x[i] for i in keep),
                      tuple(f.z[i] for i in keep), f.xi)


def frame_to_pauli(f: PauliFrame) -> PauliElement:
    """The frame as an explicit Pauli element (uniform dimension only)."""
    d = f.dims[0]
    if any(dk != d for dk in f.dims):
        raise ValueError("frame has mixed dimensions")
    return PauliElement(d, len(f.dims), f.xi, f.x + f.z)


def frame_correction_ops(f: PauliFrame):
    """Gates mapping the physical state back to the logical one, as
    (qv, gate) pairs: X(-x) then Z(-z) per QV, up to global phase."""
    ops = []
    for r, d in enumerate(f.dims):
        if f.x[r]:
            ops.append((r, pauli_x(d, (-f.x[r]) % d)))
        if f.z[r]:
            ops.append((r, pauli_z(d, (-f.z[r]) % d)))
    return ops
