"""Constructors for the named single- and two-QV gates and observables.

Phase bookkeeping is exact: diagonal entries are built from integer
exponents reduced modulo the relevant root order before exponentiation,
so even-dimension half-integer phases (tau = exp(i pi / d), a 2d-th root
of unity) never accumulate rounding from large angles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Gate


def omega(d: int) -> complex:
    """Primitive d-th root of unity exp(2 pi i / d)."""
    return np.exp(2j * np.pi / d)


def tau(d: int) -> complex:
    """Primitive 2d-th root exp(i pi / d); tau^2 = omega."""
    return np.exp(1j * np.pi / d)


def rho_d(d: int) -> int:
    """Phase-gate offset: 1 for odd d, 0 for even d."""
    return d % 2


def _tau_pow(d: int, exponents) -> np.ndarray:
    """tau(d)**k elementwise, with k reduced mod 2d exactly."""
    k = np.asarray(exponents, dtype=object) % (2 * d)
    return np.exp(1j * np.pi * np.asarray(k, dtype=np.float64) / d)


@dataclass(frozen=True)
class PhaseFunction:
    """Length-d table of rotation angles theta(q)."""

    d: int
    table: tuple

    def __post_init__(self):
        tab = tuple(float(v) for v in self.table)
        if len(tab) != self.d:
            raise ValueError(f"phase table length {len(tab)} != d={self.d}")
        if not all(np.isfinite(tab)):
            raise ValueError("phase table entries must be finite")
        object.__setattr__(self, "table", tab)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.float64)


@dataclass(frozen=True)
class TwoPhaseFunction:
    """d x d table of two-QV phases phi(q, q')."""

    d: int
    table: tuple

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.float64)
        if arr.shape != (self.d, self.d):
            raise ValueError(f"phase table shape {arr.shape} != ({self.d}, {self.d})")
        if not np.isfinite(arr).all():
            raise ValueError("phase table entries must be finite")
        object.__setattr__(self, "table", tuple(map(tuple, arr.tolist())))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.float64)

    def row(self, q: int) -> np.ndarray:
        """phi(q, .) with the first argument fixed."""
        return self.as_array()[q, :]

    def col(self, q: int) -> np.ndarray:
        """phi(., q) with the second argument fixed."""
        return self.as_array()[:, q]


@lru_cache(maxsize=None)
def fourier(d: int) -> Gate:
    """F|q> = (1/sqrt d) sum_q' omega^(q q') |q'>; satisfies F^4 = I."""
    qs = np.arange(d)
    m = np.exp(2j * np.pi * (np.outer(qs, qs) % d) / d) / np.sqrt(d)
    return Gate("F", (d,), matrix=m)


@lru_cache(maxsize=None)
def pauli_x(d: int, q: int = 1) -> Gate:
    """Cyclic shift X(q)|v> = |v + q mod d>."""
    v = np.arange(d)
    return Gate(f"X({q})", (d,), perm=(v + q) % d, phases=np.ones(d))


@lru_cache(maxsize=None)
def pauli_z(d: int, q: int = 1) -> Gate:
    """Phase operator Z(q)|v> = omega^(v q) |v>."""
    v = np.arange(d)
    return Gate(f"Z({q})", (d,), perm=v, phases=_tau_pow(d, 2 * v * (q % d)))


@lru_cache(maxsize=None)
def phase_gate(d: int, p: int = 1) -> Gate:
    """P(p)|q> = tau^(p q (q + rho_d)) |q>, with p in Z(2d)."""
    p = int(p) % (2 * d)
    v = np.arange(d, dtype=object)
    return Gate(f"P({p})", (d,), perm=np.arange(d),
                phases=_tau_pow(d, p * v * (v + rho_d(d))))


@lru_cache(maxsize=None)
def cz(d_r: int, d_a: int) -> Gate:
    """Controlled-Z |q>|q'> -> exp(2 pi i q q' / d_a) |q>|q'>.

    The target (second) dimension sets the phase root, which makes the
    hybrid control-direction explicit; for d_r == d_a the gate is the
    symmetric omega^(q q') gate.
    """
    q = np.arange(d_r)[:, None]
    qp = np.arange(d_a)[None, :]
    ph = np.exp(2j * np.pi * ((q * qp) % d_a) / d_a).reshape(-1)
    block = d_r * d_a
    return Gate(f"CZ[{d_r},{d_a}]", (d_r, d_a), perm=np.arange(block), phases=ph)


@lru_cache(maxsize=None)
def swap(d: int) -> Gate:
    """SWAP |q>|q'> = |q'>|q> on two dimension-d subsystems."""
    q = np.arange(d)[:, None]
    qp = np.arange(d)[None, :]
    perm = (qp * d + q).reshape(-1)
    return Gate("SWAP", (d, d), perm=perm, phases=np.ones(d * d))


def rotation(theta: PhaseFunction) -> Gate:
    """R(theta)|q> = exp(i theta(q)) |q>."""
    return Gate("R", (theta.d,), perm=np.arange(theta.d),
                phases=np.exp(1j * theta.as_array()))


def cubic_phase(d: int, q: int = 1, c: int | None = None) -> Gate:
    """Cubic phase gate D3(q)|v> = omega^(v^3 q / c) |v>.

    Default c = d^3 (the pi/8-gate generalization).  c = 1 is accepted as
    well; it yields a non-Clifford gate only for prime d > 3, which is the
    caller's concern.
    """
    if c is None:
        c = d ** 3
    if c not in (1, d ** 3):
        raise ValueError(f"cubic phase constant must be 1 or d^3, got {c}")
    root = d * c
    v = np.arange(d, dtype=object)
    expo = (v ** 3 * q) % root
    ph = np.exp(2j * np.pi * np.asarray(expo, dtype=np.float64) / root)
    return Gate(f"D3({q})", (d,), perm=np.arange(d), phases=ph)


def cubic_phase_table(d: int, q: int = 1, c: int | None = None) -> PhaseFunction:
    """Rotation-table form of the cubic phase gate."""
    if c is None:
        c = d ** 3
    root = d * c
    v = np.arange(d, dtype=object)
    expo = (v ** 3 * q) % root
    ang = 2 * np.pi * np.asarray(expo, dtype=np.float64) / root
    return PhaseFunction(d, tuple(ang))


def phase_gate_table(d: int, p: int = 1) -> PhaseFunction:
    """Rotation-table form of P(p)."""
    p = int(p) % (2 * d)
    v = np.arange(d, dtype=object)
    expo = (p * v * (v + rho_d(d))) % (2 * d)
    ang = np.pi * np.asarray(expo, dtype=np.float64) / d
    return PhaseFunction(d, tuple(ang))


def controlled_u(u: Gate, d_c: int) -> Gate:
    """C_u |q>_c |q'>_t = |q>_c u^q |q'>_t (control first)."""
    if u.arity != 1:
        raise ValueError("controlled_u needs a single-QV gate")
    d_t = u.dims[0]
    if u.perm is not None:
        # u^q stays structured: compose the permutation/phase action q times.
        perm = np.arange(d_c * d_t, dtype=np.int64)
        phases = np.ones(d_c * d_t, dtype=np.complex128)
        pw_perm = np.arange(d_t, dtype=np.int64)
        pw_ph = np.ones(d_t, dtype=np.complex128)
        for q in range(d_c):
            perm[q * d_t:(q + 1) * d_t] = q * d_t + pw_perm
            phases[q * d_t:(q + 1) * d_t] = pw_ph
            pw_ph = pw_ph * u.phases[pw_perm]  # next power acts after pw
            pw_perm = u.perm[pw_perm]
        return Gate(f"C[{u.name}]", (d_c, d_t), perm=perm, phases=phases)
    m = np.zeros((d_c * d_t, d_c * d_t), dtype=np.complex128)
    upow = np.eye(d_t, dtype=np.complex128)
    for q in range(d_c):
        m[q * d_t:(q + 1) * d_t, q * d_t:(q + 1) * d_t] = upow
        upow = u.matrix @ upow
    return Gate(f"C[{u.name}]", (d_c, d_t), matrix=m)


def diag2(phi: TwoPhaseFunction) -> Gate:
    """Two-QV diagonal gate |q>|q'> -> exp(i phi(q, q')) |q>|q'>."""
    d = phi.d
    ph = np.exp(1j * phi.as_array()).reshape(-1)
    return Gate("D(phi)", (d, d), perm=np.arange(d * d), phases=ph)


@dataclass(frozen=True)
class Observable:
    """Rank-1 projective observable given as (basis-change gate, labels).

    Measuring it means applying ``basis_change`` and reading the
    computational label; ``basis_change=None`` is the plain x observable.
    """

    name: str
    d: int
    basis_change: Gate | None
    labels: tuple


def observable_x(d: int) -> Observable:
    """Computational-basis ('position') observable."""
    return Observable("x", d, None, tuple(range(d)))


def observable_p(d: int) -> Observable:
    """Conjugate-basis ('momentum') observable: eigenstates |+_q> = F|q>,
    measured by rotating with F^dagger."""
    return Observable("p", d, fourier(d).dagger(), tuple(range(d)))
