import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holospt.pauli import (
    JordanWignerMap,
    PauliString,
    commutation_matrix,
    jw_encode,
    majorana,
    pauli_commutes,
    pauli_mul,
    pauli_product,
)


@st.composite
def paulis(draw, n=None):
    n = draw(st.integers(1, 5)) if n is None else n
    full = (1 << n) - 1
    return PauliString(n, draw(st.integers(0, full)), draw(st.integers(0, full)), draw(st.integers(0, 3)))


@st.composite
def pauli_pairs(draw):
    n = draw(st.integers(1, 5))
    return draw(paulis(n)), draw(paulis(n))


def test_single_qubit_matrices():
    X = PauliString.from_str("X").to_dense()
    Y = PauliString.from_str("Y").to_dense()
    Z = PauliString.from_str("Z").to_dense()
    assert np.allclose(X, [[0, 1], [1, 0]])
    assert np.allclose(Y, [[0, -1j], [1j, 0]])
    assert np.allclose(Z, [[1, 0], [0, -1]])


def test_qubit_zero_is_leftmost_factor():
    p = PauliString.from_str("XZ")
    X = np.array([[0, 1], [1, 0]])
    Z = np.diag([1, -1])
    assert np.allclose(p.to_dense(), np.kron(X, Z))


def test_xy_product_is_iz():
    p = pauli_mul(PauliString.from_str("X"), PauliString.from_str("Y"))
    assert p == PauliString.from_str("+iZ")


def test_from_str_roundtrip_and_bad_letter():
    p = PauliString.from_str("-iXYZI")
    assert str(p) == "-iXYZI"
    assert p.weight == 3
    with pytest.raises(ValueError):
        PauliString.from_str("XQ")


def test_bits_beyond_width_rejected():
    with pytest.raises(ValueError):
        PauliString(2, 0b100, 0)


@settings(max_examples=60, deadline=None)
@given(pauli_pairs())
def test_product_matches_dense(pair):
    a, b = pair
    assert np.allclose(pauli_mul(a, b).to_dense(), a.to_dense() @ b.to_dense())


@settings(max_examples=60, deadline=None)
@given(pauli_pairs())
def test_commutation_matches_dense(pair):
    a, b = pair
    A, B = a.to_dense(), b.to_dense()
    assert pauli_commutes(a, b) == np.allclose(A @ B, B @ A)


@settings(max_examples=40, deadline=None)
@given(paulis())
def test_dagger_and_hermiticity(p):
    D = p.to_dense()
    assert np.allclose(p.dagger().to_dense(), D.conj().T)
    assert p.is_hermitian() == np.allclose(D, D.conj().T)
    assert np.allclose(D @ p.dagger().to_dense(), np.eye(len(D)))


@settings(max_examples=40, deadline=None)
@given(paulis(), st.integers(0, 3))
def test_apply_matches_dense(p, seed):
    rng = np.random.default_rng(seed)
    d = 1 << p.n_qubits
    v = rng.normal(size=(d, 3)) + 1j * rng.normal(size=(d, 3))
    D = p.to_dense()
    assert np.allclose(p.apply(v), D @ v)
    assert np.allclose(p.apply_right(v.T), v.T @ D)


def test_embed_places_letters():
    p = PauliString.from_str("XZ").embed(4, [3, 1])
    assert str(p) == "+IZIX"


def test_product_of_list():
    ps = [PauliString.from_str(s) for s in ("XI", "IX", "ZZ")]
    assert np.allclose(pauli_product(ps).to_dense(), ps[0].to_dense() @ ps[1].to_dense() @ ps[2].to_dense())


def test_commutation_matrix_symmetric():
    ps = [PauliString.from_str(s) for s in ("XX", "ZZ", "XZ", "YI")]
    m = commutation_matrix(ps)
    assert (m == m.T).all()
    expect = [[0 if pauli_commutes(a, b) else 1 for b in ps] for a in ps]
    assert (m == np.array(expect)).all()


# Majorana and Jordan-Wigner


def test_majorana_canonical_sign():
    m = majorana(3, 1, 2).canonical()
    assert m.mode_indices == (1, 2, 3)
    assert m.coefficient == 1  # two transpositions
    assert majorana(2, 1).canonical().coefficient == -1
    assert majorana(1, 1).canonical().mode_indices == ()


def test_jw_clifford_algebra():
    jw = JordanWignerMap((0, 1, 2, 3, 4, 5))
    g = [jw.encode_mode(m).to_dense() for m in range(6)]
    for a in range(6):
        for b in range(6):
            anti = g[a] @ g[b] + g[b] @ g[a]
            assert np.allclose(anti, 2 * np.eye(8) * (a == b))


def test_jw_annihilator_convention():
    jw = JordanWignerMap((0, 1))
    c = (jw.encode_mode(0).to_dense() + 1j * jw.encode_mode(1).to_dense()) / 2
    # |1> is occupied: c|1> = |0>, c|0> = 0
    assert np.allclose(c @ [0, 1], [1, 0])
    assert np.allclose(c @ [1, 0], [0, 0])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=5))
def test_jw_is_a_homomorphism(modes):
    jw = JordanWignerMap((4, 0, 5, 2, 1, 3))
    m = majorana(*modes)
    dense = np.eye(8, dtype=complex)
    for k in modes:
        dense = dense @ jw.encode_mode(k).to_dense()
    assert np.allclose(jw_encode(m, jw).to_dense(), dense)
    assert np.allclose(jw_encode(m.canonical(), jw).to_dense(), dense)


def test_jw_parity_guard():
    jw = JordanWignerMap((0, 1))
    with pytest.raises(ValueError):
        jw_encode(majorana(0), jw, require_even=True)
    with pytest.raises(ValueError):
        JordanWignerMap((0, 1, 2))
    with pytest.raises(KeyError):
        jw.encode_mode(7)


def test_bilinear_is_number_operator():
    jw = JordanWignerMap((0, 1))
    # i gamma_0 gamma_1 = -Z = 2n - 1
    p = jw_encode(majorana(0, 1, coefficient=1j), jw)
    assert np.allclose(p.to_dense(), np.diag([-1, 1]))
