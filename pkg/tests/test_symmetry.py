import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holospt import models as MD
from holospt.hilbert import DensityMatrix, maximally_mixed, random_density
from holospt.pauli import PauliString
from holospt.symmetry import (
    PhaseGate,
    SymmetryOp,
    build_ug,
    build_uk,
    chain_sites,
    classify,
    pauli_conj,
)


def test_phase_gate_on_z_is_diagonal():
    g = PhaseGate(PauliString.from_str("Z"), 0.7)
    assert np.allclose(g.apply(np.eye(2)), np.diag([1, np.exp(0.7j)]))


def test_phase_gate_rejects_non_hermitian():
    with pytest.raises(ValueError):
        PhaseGate(PauliString.from_str("iZ"), 0.1)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["X", "Y", "Z", "XZ", "YY", "ZIX"]), st.floats(-4, 4))
def test_phase_gate_is_unitary_and_dagger(label, theta):
    g = PhaseGate(PauliString.from_str(label), theta)
    d = 1 << g.n_qubits
    U = g.apply(np.eye(d))
    assert np.allclose(U @ U.conj().T, np.eye(d))
    assert np.allclose(g.dagger().apply(np.eye(d)), U.conj().T)
    assert np.allclose(g.conj().apply(np.eye(d)), U.conj())
    assert np.allclose(g.apply_right(np.eye(d)), U)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1),
                                                     st.integers(0, 2**n - 1), st.integers(0, 3))))
def test_pauli_conj_matches_dense(args):
    p = PauliString(*args)
    assert np.allclose(pauli_conj(p).to_dense(), p.to_dense().conj())


def test_symmetry_op_dense_dagger_compose():
    sites = ("a", "b")
    U = SymmetryOp((PauliString.from_str("XI"), PhaseGate(PauliString.from_str("ZZ"), 0.3)), sites, "u", 0.2)
    D = U.dense()
    assert np.allclose(D @ U.dagger().dense(), np.eye(4))
    assert np.allclose(U.conj().dense(), D.conj())
    assert np.allclose(U.compose(U).dense(), D @ D)
    # applying on a larger site map embeds the gates
    big = U.dense(("c", "a", "b"))
    assert np.allclose(big, np.kron(np.eye(2), D))


def test_conjugate_pauli_matches_dense():
    U = build_ug(2)
    D = U.dense()
    n = len(U.sites)
    rng = np.random.default_rng(0)
    for _ in range(10):
        p = PauliString(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)))
        terms = U.conjugate_pauli(p)
        rebuilt = sum(c * q.to_dense() for q, c in terms.items())
        assert np.allclose(rebuilt, D @ p.to_dense() @ D.conj().T)


def test_classify_strong_weak_none():
    Z = PauliString.from_str("Z")
    X = PauliString.from_str("X")
    up = DensityMatrix(np.diag([1.0, 0.0]), ("q",))
    mixed = maximally_mixed(1, ("q",))
    v = classify(up, SymmetryOp.from_pauli(Z, ("q",)))
    assert v.kind == "strong" and v.theta == 0.0
    down = DensityMatrix(np.diag([0.0, 1.0]), ("q",))
    assert abs(classify(down, SymmetryOp.from_pauli(Z, ("q",))).theta - np.pi) < 1e-12
    assert classify(mixed, SymmetryOp.from_pauli(Z, ("q",))).kind == "weak"
    assert classify(up, SymmetryOp.from_pauli(X, ("q",))).kind == "none"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_classify_invariant_under_conjugation(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(2, rng)
    W = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    P = np.kron(np.diag([1, -1]), np.eye(2))
    # a state that is a mixture of P-eigenstates is weakly symmetric under P
    r = (rho.matrix + P @ rho.matrix @ P) / 2
    assert classify(r, P).kind in ("weak", "strong")
    assert classify(W @ r @ W.conj().T, W @ P @ W.conj().T).kind == classify(r, P).kind


def test_classify_support_outside_state():
    U = SymmetryOp.from_pauli(PauliString.from_str("X"), ("zz",))
    with pytest.raises(ValueError):
        classify(maximally_mixed(1, ("q",)), U)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("boundary", ["periodic", "open"])
def test_chain_group_relations(N, boundary):
    ug, uk = build_ug(N, boundary).dense(), build_uk(N, boundary).dense()
    assert np.allclose(ug @ ug, uk)
    assert np.allclose(uk @ uk, np.eye(len(uk)))
    assert np.allclose(ug @ uk, uk @ ug)


def test_chain_sites_layout():
    assert chain_sites(2) == (("s", 0), ("t", 0), ("s", 1), ("t", 1))
    assert chain_sites(2, "open") == (("s", 0), ("t", 0), ("s", 1))
    with pytest.raises(ValueError):
        chain_sites(1)


def test_levin_gu_form_agrees_on_constrained_space():
    cfg = MD.SpinChainConfig(3)
    P = MD.chain_projector_dense(cfg)
    lg = MD.levin_gu_ug(cfg).dense()
    assert np.allclose(lg @ P, build_ug(3).dense() @ P)
