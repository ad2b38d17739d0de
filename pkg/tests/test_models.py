import numpy as np
import pytest

from holospt import models as MD
from holospt.hilbert import CapacityError, random_density
from holospt.pauli import PauliString, commutation_matrix
from holospt.symmetry import build_subsystem_parity, build_ug, build_uk, classify

# spin chain


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("boundary", ["periodic", "open"])
def test_dephased_construction_matches_ensemble(N, boundary):
    cfg = MD.SpinChainConfig(N, boundary)
    a = MD.mspt_chain_rho(cfg).matrix
    b = MD.mspt_chain_rho_dephased(cfg).matrix
    assert np.abs(a - b).max() < 1e-12


def test_chain_rho_is_valid_and_mixed():
    rho = MD.mspt_chain_rho(MD.SpinChainConfig(3))
    w = np.linalg.eigvalsh(rho.matrix)
    assert abs(w.sum() - 1) < 1e-12 and w.min() > -1e-12
    # 2^N orthogonal disorder states with equal weight
    assert np.sum(w > 1e-9) == 8
    assert np.allclose(w[w > 1e-9], 1 / 8)


def test_disorder_states_are_projector_eigenstates():
    cfg = MD.SpinChainConfig(3)
    for d in MD.all_realizations(3):
        v = MD.disorder_state(cfg, d).amplitudes
        assert np.allclose(MD.chain_projector_apply(cfg, v), v)


def test_open_chain_uk_is_weak():
    cfg = MD.SpinChainConfig(3, "open")
    rho = MD.mspt_chain_rho(cfg)
    assert classify(rho, build_uk(3, "open")).kind == "weak"
    assert classify(rho, build_ug(3, "open")).kind == "weak"


def test_chain_caps_and_validation():
    with pytest.raises(CapacityError):
        MD.mspt_chain_rho(MD.SpinChainConfig(7))
    with pytest.raises(ValueError):
        MD.SpinChainConfig(1)
    with pytest.raises(ValueError):
        MD.DisorderRealization((1, 0))


# 2d stabilizer model


def test_sspt2d_periodic_code():
    cfg = MD.Sspt2dConfig(4, 4, False, False)
    stabs = cfg.stabilizer_list()
    assert len(stabs) == 64
    assert not commutation_matrix(stabs).any()
    assert cfg.logical_count() == 0


def test_sspt2d_small_lattice_symmetries():
    cfg = MD.Sspt2dConfig(2, 2, False, False)
    stabs = cfg.stabilizer_list()
    ok, bad = MD.preserves_stabilizer_group(cfg.ug(), stabs)
    assert ok and not bad
    for y in range(2):
        assert all(cfg.us(y).conjugate_pauli(s) == {s.unsigned(): s.phase} for s in stabs)


def test_sspt2d_ground_state_symmetric_dense():
    # 2x2 periodic has 16 qubits; the code state is unique, so check U_g and U_s on it
    cfg = MD.Sspt2dConfig(2, 2, False, False)
    stabs = cfg.stabilizer_list()
    rng = np.random.default_rng(1)
    v = rng.normal(size=1 << 16) + 0j
    psi = MD.code_projector_apply(stabs, v)
    psi /= np.linalg.norm(psi)
    for U in [cfg.ug(), cfg.us(0), cfg.us(1)]:
        out = U.apply(psi, cfg.sites)
        assert abs(abs(np.vdot(psi, out)) - 1) < 1e-10


def test_ug_squared_is_total_tau_parity():
    cfg = MD.Sspt2dConfig(2, 2, False, False)
    stabs = cfg.stabilizer_list()
    ug2 = cfg.ug().compose(cfg.ug())
    total = cfg.us(0).compose(cfg.us(1))
    for s in stabs[:12]:
        assert ug2.conjugate_pauli(s) == total.conjugate_pauli(s)


def test_in_stabilizer_group():
    stabs = [PauliString.from_str("XX"), PauliString.from_str("ZZ")]
    assert MD.in_stabilizer_group(PauliString.from_str("-YY"), stabs)
    assert not MD.in_stabilizer_group(PauliString.from_str("YY"), stabs)
    assert not MD.in_stabilizer_group(PauliString.from_str("XI"), stabs)


def test_open_corner_algebra():
    cfg = MD.Sspt2dConfig(4, 4, True, True)
    stabs = cfg.stabilizer_list()
    assert not commutation_matrix(stabs).any()
    z, x, y = MD.corner_operators(cfg)
    assert all(s.commutes(o) for s in stabs for o in (z, x, y))
    assert not z.commutes(x)
    phases = [MD.symmetry_phase(cfg.us(0), o) for o in (z, x, y)]
    assert np.allclose(phases, [1, -1, -1])


# cube block

GOLDEN_SPECTRUM = (-6, -2, -2, -2, -2, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 10)


def test_block_spectrum_golden():
    g = MD.hotsc_block_ground()
    assert g.energy == -6.0 and g.gap == 4.0
    assert np.allclose(g.spectrum, GOLDEN_SPECTRUM)


def test_block_terms_commute_pattern():
    terms = MD.HotscBlock().hamiltonian_terms()
    assert all(t.is_hermitian() for t in terms)
    h = MD.HotscBlock().hamiltonian()
    assert np.allclose(h, h.conj().T)


def test_block_ground_state_occupations_and_spins():
    block = MD.HotscBlock()
    psi = MD.hotsc_block_ground(block).state.amplitudes
    n_psi, n_psip = block.number_ops()
    assert abs(np.vdot(psi, n_psi @ psi) - 1) < 1e-12
    assert abs(np.vdot(psi, n_psip @ psi) - 1) < 1e-12
    n, m = block.spins()
    xy = np.vdot(psi, (n[0] @ m[0] + n[1] @ m[1]) @ psi)
    zz = np.vdot(psi, n[2] @ m[2] @ psi)
    # golden values of this encoding
    assert abs(xy) < 1e-12 and abs(zz - 1) < 1e-12


def test_upper_half_state_is_maximally_mixed_doublet():
    rho = MD.upper_half_state().matrix
    assert np.abs(rho - np.diag([0, 0.5, 0.5, 0])).max() < 1e-12


def test_block_rotation_invariance():
    rot = MD.HotscBlock(relabel={1: 5, 2: 6, 3: 7, 4: 8, 5: 1, 6: 2, 7: 3, 8: 4})
    assert np.allclose(rot.hamiltonian(), MD.HotscBlock().hamiltonian())


def test_slab_top_layer_is_product_of_blocks():
    from holospt.holography import BlockProduct, reduce

    slab = MD.HotscSlab(2, 1, 2)
    lazy = reduce(BlockProduct.from_states(slab.block_states()), slab.top_sites()).matrix
    assert np.abs(lazy - slab.top_reduced().matrix).max() < 1e-12
    with pytest.raises(CapacityError):
        MD.HotscSlab(3, 3, 1)


# plaquette lattice and channel


def test_plaquette_ground_space():
    lat = MD.PlaquetteLattice(2, 1)
    pr = lat.ground_projector()
    assert np.allclose(pr @ pr, pr)
    assert round(np.trace(pr).real) == 2 ** len(lat.plaquettes)


@pytest.mark.parametrize("shape", [(1, 1), (2, 1), (1, 2)])
def test_channel_idempotent_and_fixed_point(shape):
    lat = MD.PlaquetteLattice(*shape)
    rng = np.random.default_rng(5)
    rho = random_density(len(lat.sites), rng, site_map=lat.sites)
    e1 = MD.measurement_channel(rho, lat)
    e2 = MD.measurement_channel(e1, lat)
    assert np.abs(e1.matrix - e2.matrix).max() < 1e-12
    assert abs(np.trace(e1.matrix) - 1) < 1e-12
    g = MD.measurement_channel(lat.random_ground_state(rng), lat)
    target = MD.upper_half_state().matrix
    for _ in range(len(lat.plaquettes) - 1):
        target = np.kron(target, MD.upper_half_state().matrix)
    assert np.abs(g.matrix - target).max() < 1e-12
    assert classify(g, build_subsystem_parity(lat, "total")).kind == "strong"


def test_channel_rejects_wrong_sites():
    lat = MD.PlaquetteLattice(1, 1)
    rho = random_density(2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        MD.measurement_channel(rho, lat)


# four-Majorana corner


def test_corner_operators_are_hermitian_involutions():
    for name in ("P_f", "P_f^x", "P_f'^x", "P_f^y", "P_f'^y", "ig1g3"):
        m = MD.corner_operator(name)
        assert np.allclose(m, m.conj().T)
        assert np.allclose(m @ m, np.eye(4))
    with pytest.raises(ValueError):
        MD.corner_operator("nope")


def test_fock_basis_is_unitary_with_parity():
    F = MD.corner_fock_basis()
    assert np.allclose(F.conj().T @ F, np.eye(4))
    pf = MD.corner_operator("P_f")
    assert np.allclose(np.diag(F.conj().T @ pf @ F).real, [1, -1, -1, 1])


def test_as_written_constraints_are_infeasible():
    for sector in ("even", "odd"):
        fam = MD.corner_constraint_solver(MD.CornerConstraintSet.preset("as_written", sector))
        assert not fam.feasible


@pytest.mark.parametrize("preset", ["conjugation", "x_only"])
def test_corner_family_members_satisfy_constraints(preset):
    cs = MD.CornerConstraintSet.preset(preset, "even")
    fam = MD.corner_constraint_solver(cs)
    assert fam.feasible
    for m in fam.sample(np.random.default_rng(0), 10):
        assert cs.holds(m, 1e-12)
        assert np.linalg.eigvalsh(m).min() > -1e-12


def test_corner_report_records_discrepancy():
    rep = MD.corner_report("conjugation", "even")
    assert rep["feasible"] and rep["family_dimension"] == 0
    assert rep["diagonal_mixture_satisfies"]
    assert rep["bell_states_satisfy"] == [False, False]
    assert rep["negativity_max"] < 1e-12
