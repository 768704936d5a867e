"""Symplectic algebra against dense-matrix oracles, exact phase included."""

import itertools

import numpy as np
import pytest

from conftest import rand_state
from qvsim.core import fidelity, QState
from qvsim.gates import cz, fourier, omega, pauli_x, pauli_z, phase_gate
from qvsim.pauli import (PauliElement, PauliFrame, conjugate, find_pauli,
                         frame_absorb_pauli, frame_correction_ops,
                         frame_to_pauli, frame_update_FP, frame_update_FR,
                         frame_update_entangle, frame_update_entangle_checkE,
                         pauli_compose, pauli_inverse, pauli_to_matrix)


def mat(p):
    return pauli_to_matrix(p).as_matrix()


def test_to_matrix_examples():
    assert np.allclose(mat(PauliElement(3, 1, 0, (0, 0))), np.eye(3))
    # d=2: xi=1, vec=(1,1) is tau^1 XZ = iXZ (the qubit Y)
    y = mat(PauliElement(2, 1, 1, (1, 1)))
    assert np.allclose(y, [[0, -1j], [1j, 0]])
    # tensor structure
    p = PauliElement(3, 2, 0, (1, 0, 0, 2))
    want = np.kron(pauli_x(3, 1).as_matrix(), pauli_z(3, 2).as_matrix())
    assert np.allclose(mat(p), want)


def test_compose_identity():
    a = PauliElement(3, 1, 2, (1, 2))
    assert pauli_compose(a, PauliElement.identity(3)) == a
    assert pauli_compose(PauliElement.identity(3), a) == a


def test_compose_x_then_z_qubit():
    # X(1) . Z(1) as a matrix product is exactly XZ, with no extra phase;
    # the oracle fixes the commutation cost as z(left) * x(right)
    a = PauliElement(2, 1, 0, (1, 0))
    b = PauliElement(2, 1, 0, (0, 1))
    c = pauli_compose(a, b)
    assert np.allclose(mat(c), mat(a) @ mat(b))
    assert c == PauliElement(2, 1, 0, (1, 1))
    # reversed order picks up the Weyl phase omega = tau^2
    c_rev = pauli_compose(b, a)
    assert c_rev.xi == 2
    assert np.allclose(mat(c_rev), mat(b) @ mat(a))


def test_compose_weyl_shift_d3():
    za, xb = PauliElement(3, 1, 0, (0, 1)), PauliElement(3, 1, 0, (2, 0))
    ab = pauli_compose(za, xb)
    ba = pauli_compose(xb, za)
    assert (ab.xi - ba.xi) % 6 == 2 * (2 * 1) % 6
    assert np.allclose(mat(ab), mat(za) @ mat(xb))
    assert np.allclose(mat(ba), mat(xb) @ mat(za))


@pytest.mark.parametrize("d", (2, 3, 4, 5, 7))
def test_compose_matches_matrix_product(d):
    rng = np.random.default_rng(d)
    for _ in range(200):
        n = int(rng.integers(1, 3))
        a = PauliElement(d, n, int(rng.integers(2 * d)),
                         tuple(int(v) for v in rng.integers(0, d, 2 * n)))
        b = PauliElement(d, n, int(rng.integers(2 * d)),
                         tuple(int(v) for v in rng.integers(0, d, 2 * n)))
        c = pauli_compose(a, b)
        assert np.abs(mat(c) - mat(a) @ mat(b)).max() < 1e-10


def test_inverse():
    rng = np.random.default_rng(9)
    for d in (2, 3, 5):
        for _ in range(20):
            a = PauliElement(d, 2, int(rng.integers(2 * d)),
                             tuple(int(v) for v in rng.integers(0, d, 4)))
            assert pauli_compose(a, pauli_inverse(a)) == PauliElement.identity(d, 2)


@pytest.mark.parametrize("d", (2, 3, 4, 5))
def test_conjugation_tableau_exhaustive(d):
    f = fourier(d).as_matrix()
    P = {p: phase_gate(d, p).as_matrix() for p in range(2 * d)}
    for x in range(d):
        for z in range(d):
            p = PauliElement(d, 1, 1, (x, z))
            got = mat(conjugate(p, ("F", 0)))
            assert np.abs(got - f @ mat(p) @ f.conj().T).max() < 1e-10
            for pp in (1, d, 2 * d - 1):
                got = mat(conjugate(p, ("P", pp, 0)))
                assert np.abs(got - P[pp] @ mat(p) @ P[pp].conj().T).max() < 1e-10
    m_cz = cz(d, d).as_matrix()
    for vec in itertools.product(range(d), repeat=4):
        p = PauliElement(d, 2, 0, vec)
        got = mat(conjugate(p, ("CZ", 0, 1)))
        assert np.abs(got - m_cz @ mat(p) @ m_cz.conj().T).max() < 1e-10


def test_conjugate_identity_stays_identity():
    for g in (("F", 0), ("P", 1, 0), ("CZ", 0, 1)):
        n = 2 if g[0] == "CZ" else 1
        p = PauliElement(3, n, 0, (0,) * (2 * n))
        assert conjugate(p, g) == p


def test_conjugate_f_example():
    # F X F^dag = Z at d=3
    p = conjugate(PauliElement(3, 1, 0, (1, 0)), ("F", 0))
    assert p == PauliElement(3, 1, 0, (0, 1))


def test_conjugate_cz_example():
    # CZ puts a Z on the partner QV of an X error (d=2)
    p = conjugate(PauliElement(2, 2, 0, (1, 0, 0, 0)), ("CZ", 0, 1))
    assert p == PauliElement(2, 2, 0, (1, 0, 0, 1))


def test_find_pauli_roundtrip_and_negative():
    rng = np.random.default_rng(4)
    for d in (2, 3):
        for _ in range(10):
            p = PauliElement(d, 1, int(rng.integers(2 * d)),
                             tuple(int(v) for v in rng.integers(0, d, 2)))
            assert find_pauli(mat(p), d) == p
    assert find_pauli(fourier(3).as_matrix(), 3) is None


# ---------------------------------------------------------------------------
# frames

def test_frame_entangle_update_example():
    f = PauliFrame((3, 3), (1, 0), (2, 1))
    g = frame_update_entangle(f, 0, 1, 2)
    assert g.x == (0, 1) and g.z == (1, 0)
    zero = frame_update_entangle(PauliFrame.zero((3, 3)), 0, 1, 0)
    assert zero.is_zero()
    with pytest.raises(ValueError):
        frame_update_entangle(f, 1, 1, 0)


def test_frame_fr_update_example():
    f = PauliFrame((5,), (2,), (3,))
    g = frame_update_FR(f, 0, 1)
    assert (g.x[0], g.z[0]) == (1, 2)
    zero = frame_update_FR(PauliFrame.zero((5,)), 0, 0)
    assert zero.is_zero()


def test_frame_fp_update_examples():
    for d in (2, 3, 5):
        f = PauliFrame((d,), (1,), (d - 1,))
        assert frame_update_FP(f, 0, 0, 2).x == frame_update_FR(f, 0, 2).x
    f = PauliFrame((2,), (1,), (0,))
    g = frame_update_FP(f, 0, 1, 1)
    assert (g.x[0], g.z[0]) == (0, 1)


def test_frame_absorb_examples():
    f = PauliFrame((3,), (0,), (0,))
    assert frame_absorb_pauli(f, 0, 0, 0) == f
    g = frame_absorb_pauli(f, 0, 1, 2)
    assert (g.x[0], g.z[0]) == (2, 1)
    back = frame_absorb_pauli(g, 0, -1, -2)
    assert (back.x[0], back.z[0]) == (0, 0)


def test_frame_updates_are_bijections():
    d = 3
    for update in (lambda f: frame_update_FR(f, 0, 1),
                   lambda f: frame_update_FP(f, 0, 2, 1),
                   lambda f: frame_absorb_pauli(f, 0, 1, 2)):
        images = {update(PauliFrame((d,), (x,), (z,))).x
                  + update(PauliFrame((d,), (x,), (z,))).z
                  for x in range(d) for z in range(d)}
        assert len(images) == d * d
    for update in (frame_update_entangle, frame_update_entangle_checkE):
        images = set()
        for vec in itertools.product(range(d), repeat=4):
            f = PauliFrame((d, d), vec[:2], vec[2:])
            g = update(f, 0, 1, 2)
            images.add(g.x + g.z)
        assert len(images) == d ** 4


def test_frame_phase_tracking_is_exact_for_absorb():
    # absorbing X(q)Z(qp) must reproduce the physical state exactly when
    # the xi-carrying frame is reapplied
    d = 3
    rng = np.random.default_rng(12)
    psi = rand_state((d,), rng)
    f = PauliFrame((d,), (2,), (1,), xi=3)
    phys = QState((d,), mat(frame_to_pauli(f)) @ psi.amps)
    q, qp = 2, 1
    g = frame_absorb_pauli(f, 0, q, qp)
    logical = mat(PauliElement(d, 1, 0, (q, qp))) @ psi.amps
    back = mat(frame_to_pauli(g)) @ logical
    assert np.abs(phys.amps - back).max() < 1e-12


def test_adapted_measurement_identity():
    # X(-m) F R(theta shifted by -x) X(x) Z(z)
    #   = omega^{-xz} X(-z-m) Z(x) F R(theta), as matrices
    rng = np.random.default_rng(21)
    for d in (2, 3, 5):
        f = fourier(d).as_matrix()
        for _ in range(100 // 3):
            tab = rng.uniform(0, 2 * np.pi, d)
            x, z, m = (int(v) for v in rng.integers(0, d, 3))
            shifted = np.roll(tab, x)  # theta'(v) = theta(v - x)
            lhs = (pauli_x(d, (-m) % d).as_matrix() @ f
                   @ np.diag(np.exp(1j * shifted))
                   @ pauli_x(d, x).as_matrix() @ pauli_z(d, z).as_matrix())
            rhs = (omega(d) ** (-(x * z) % d)
                   * pauli_x(d, (-z - m) % d).as_matrix()
                   @ pauli_z(d, x).as_matrix() @ f @ np.diag(np.exp(1j * tab)))
            assert np.abs(lhs - rhs).max() < 1e-10
            psi = rand_state((d,), rng)
            a = QState((d,), lhs @ psi.amps)
            b = QState((d,), rhs @ psi.amps)
            assert fidelity(a, b) > 1 - 1e-10


def test_double_fr_tracks_parity():
    # two measured-F steps implement F^2 (the parity); exhaust (x, z, m1, m2)
    d = 3
    f = fourier(d).as_matrix()
    for x, z, m1, m2 in itertools.product(range(d), repeat=4):
        frame = PauliFrame((d,), (x,), (z,))
        frame = frame_update_FR(frame, 0, m1)
        frame = frame_update_FR(frame, 0, m2)
        lhs = (pauli_x(d, (-m2) % d).as_matrix() @ f
               @ pauli_x(d, (-m1) % d).as_matrix() @ f
               @ pauli_x(d, x).as_matrix() @ pauli_z(d, z).as_matrix())
        err = (pauli_x(d, frame.x[0]).as_matrix()
               @ pauli_z(d, frame.z[0]).as_matrix())
        rhs = err @ f @ f
        # equal up to global phase
        ratio = lhs @ rhs.conj().T
        assert np.abs(ratio - ratio[0, 0] * np.eye(d)).max() < 1e-10


def test_frame_correction_ops_invert_the_error():
    rng = np.random.default_rng(31)
    d = 3
    psi = rand_state((d, d), rng)
    f = PauliFrame((d, d), (1, 2), (2, 0))
    err = mat(frame_to_pauli(f))
    phys = QState((d, d), err @ psi.amps)
    from qvsim.core import apply_gate
    st = phys
    for r, gate in frame_correction_ops(f):
        st = apply_gate(st, gate, (r,))
    assert fidelity(st, psi) > 1 - 1e-12
