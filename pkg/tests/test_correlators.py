import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holospt import correlators as C
from holospt import holography as H
from holospt import models as MD
from holospt.hilbert import fidelity, maximally_mixed, random_density, random_unitary
from holospt.pauli import PauliString
from holospt.symmetry import build_uk

seeds = st.integers(0, 2**32 - 1)


def _rand_pair(rng, d):
    M = np.eye(d) + 0.3 * (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    MO = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return C.InsertionPair(M, MO)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(2, 4))
def test_dense_block_and_trace_routes_agree(seed, n_total):
    rng = np.random.default_rng(seed)
    rho = random_density(1, rng, site_map=("a",))
    ins = _rand_pair(rng, 2)
    A, B = C.duality_insertions(ins)
    w = H.extend(rho, n_total)
    t = H.trivial_blocks(n_total, rho.site_map, ins.M)
    t_dense = t.dense()
    w_dense = w.dense()
    for sep in range(n_total - 1):
        oa = C.LocalOperator(A, [(0, "R", "a")])
        ob = C.LocalOperator(B, [(sep + 1, "R", "a")])
        dense = C.strange_correlator(t_dense, w_dense, oa, ob).value
        block = C.strange_correlator_blocks(t, w, oa, ob).value
        trace = C.twisted_renyi_n(rho, ins, sep, n_total).value
        assert abs(dense - block) < 1e-10
        assert abs(block - trace) < 1e-10


def test_tube_value_is_one():
    rho = maximally_mixed(1, ("s",))
    X = np.array([[0, 1], [1, 0]])
    ins = C.InsertionPair(np.eye(2), X)
    for n in (2, 3, 4, 5):
        for d in range(n - 1):
            assert abs(C.twisted_renyi_n(rho, ins, d, n).value - 1) < 1e-14


def test_twisted_renyi_validation():
    rho = maximally_mixed(1)
    ins = C.InsertionPair(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        C.twisted_renyi_n(rho, ins, 3, 4)
    with pytest.raises(ValueError):
        C.twisted_renyi_n(rho, ins, 0, 1)
    with pytest.raises(ValueError):
        C.twisted_renyi_n(rho, ins, 0, 3, boundary="open")
    with pytest.raises(ValueError):
        C.InsertionPair(np.eye(2), np.eye(4))


def test_strange_correlator_orthogonal_reference():
    from holospt.hilbert import StateVector

    a = StateVector.basis([0])
    b = StateVector.basis([1])
    with pytest.raises(ZeroDivisionError):
        C.strange_correlator(a, b)


def test_strange_correlator_allowed_sites():
    from holospt.hilbert import StateVector

    a = StateVector.normalized([1, 1, 1, 1], ("p", "q"))
    z = C.LocalOperator(np.diag([1, -1]), ["q"])
    with pytest.raises(ValueError):
        C.strange_correlator(a, a, z, None, allowed_sites=["p"])
    assert abs(C.strange_correlator(a, a, z, z, allowed_sites=["q"]).value - 1) < 1e-12


def test_renyi2_on_chain():
    cfg = MD.SpinChainConfig(3)
    rho = MD.mspt_chain_rho(cfg)
    n = len(cfg.sites)
    a = PauliString.from_ops(n, {cfg.index(("s", 0)): "Z"})
    b = PauliString.from_ops(n, {cfg.index(("s", 2)): "Z"})
    assert abs(C.renyi2_correlator(rho, a, b).value - 1) < 1e-12
    x = PauliString.from_ops(n, {cfg.index(("s", 0)): "X"})
    assert abs(C.renyi2_correlator(rho, x).value) < 1e-12


def test_fidelity_strange_trivial_cases():
    cfg = MD.SpinChainConfig(3)
    rho = MD.mspt_chain_rho(cfg)
    assert C.fidelity_strange(rho, rho).value == 1.0
    pure = MD.disorder_state(cfg, MD.DisorderRealization((1, -1, 1))).density()
    assert abs(C.fidelity_strange(pure, pure, build_uk(3).dense()).value - 1) < 1e-14


GOLDEN_FIDELITY_STRANGE = 1.0


def test_fidelity_strange_golden():
    cfg = MD.SpinChainConfig(3)
    rho = MD.mspt_chain_rho(cfg)
    n = len(cfg.sites)
    rho0 = maximally_mixed(n, cfg.sites)
    a = PauliString.from_ops(n, {cfg.index(("s", 0)): "Z"})
    b = PauliString.from_ops(n, {cfg.index(("s", 2)): "Z"})
    assert abs(C.fidelity_strange(rho, rho0, a, b).value - GOLDEN_FIDELITY_STRANGE) < 1e-12


def test_fidelity_strange_with_channel():
    lat = MD.PlaquetteLattice(1, 1)
    rng = np.random.default_rng(4)
    rho = lat.random_ground_state(rng)
    rho0 = lat.ground_state_mixture()
    res = C.fidelity_strange(rho, rho0, None, None, channel=lambda r: MD.measurement_channel(r, lat))
    assert res.value == 1.0


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_purification_overlap_bounded_by_fidelity(seed):
    rng = np.random.default_rng(seed)
    r, s = random_density(2, rng), random_density(2, rng)
    F = fidelity(r, s)
    psi = C.purification(r, random_unitary(4, rng))
    phi = C.purification(s, random_unitary(4, rng))
    assert abs(np.vdot(psi, phi)) <= F + 1e-12
    p1, p2 = C.optimal_purifications(r, s, random_unitary(4, rng))
    assert abs(abs(np.vdot(p1, p2)) - F) < 1e-10
    # both vectors really purify their states
    m1 = p1.reshape(4, 4)
    assert np.allclose(m1 @ m1.conj().T, r.matrix)


def test_uhlmann_optimizer_reaches_fidelity():
    rng = np.random.default_rng(11)
    for _ in range(5):
        r, s = random_density(2, rng), random_density(2, rng, rank=2)
        assert abs(C.uhlmann_maximize(r, s, rng, starts=2) - fidelity(r, s)) < 1e-3


def test_result_json():
    res = C.twisted_renyi_n(maximally_mixed(1), C.InsertionPair(np.eye(2), np.eye(2)), 0, 2)
    js = res.to_json()
    assert js["value"] == [1.0, 0.0]
    assert js["parameters"] == {"i_minus_j": 0, "n_total": 2}
