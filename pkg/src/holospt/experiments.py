"""Named experiments run by the command line tool.

Each experiment takes a parameter dict and a numpy Generator and returns a
list of plain-JSON records. Records never contain timestamps; the runner adds
provenance fields separately.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import correlators as C
from . import holography as H
from . import kmatrix as KM
from . import models as MD
from .hilbert import DensityMatrix, fidelity, maximally_mixed, random_density, random_unitary
from .pauli import PauliString, commutation_matrix
from .symmetry import build_subsystem_parity, build_ug, build_uk, classify


@dataclass(frozen=True)
class Experiment:
    name: str
    anchor: str
    func: object
    defaults: dict = field(default_factory=dict)
    params_schema: dict = field(default_factory=dict)
    tolerance: float = 1e-10


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _mat(m) -> list:
    m = np.asarray(m)
    return [[_c(x) for x in row] for row in m]


# ---------------------------------------------------------------------------


def exp_symmetry_1d(p, rng):
    out = []
    for N in p["N"]:
        cfg = MD.SpinChainConfig(N, p["boundary"])
        rho = MD.mspt_chain_rho(cfg)
        ug, uk = build_ug(N, p["boundary"]), build_uk(N, p["boundary"])
        vg, vk = classify(rho, ug), classify(rho, uk)
        dg, dk = ug.dense(), uk.dense()
        alt = MD.mspt_chain_rho_dephased(cfg)
        out.append({
            "N": N, "boundary": p["boundary"],
            "U_g": {"kind": vg.kind, "residual": vg.residual},
            "U_k": {"kind": vk.kind, "residual": vk.residual, "theta": vk.theta},
            "ug_squared_minus_uk": float(np.abs(dg @ dg - dk).max()),
            "uk_squared_minus_identity": float(np.abs(dk @ dk - np.eye(len(dk))).max()),
            "dephased_construction_deviation": float(np.abs(alt.matrix - rho.matrix).max()),
        })
    return out


def _named_rho(name: str, rng) -> DensityMatrix:
    if name == "mspt2":
        return MD.mspt_chain_rho(MD.SpinChainConfig(2))
    if name == "tube":
        return maximally_mixed(1, ("s",))
    if name.startswith("random"):
        rank = int(name[6:] or 4)
        return random_density(2, rng, rank=rank)
    raise ValueError(f"unknown density matrix {name!r}")


def exp_replica_roundtrip(p, rng):
    out = []
    for name in p["rho"]:
        rho = _named_rho(name, rng)
        r2 = rho.matrix @ rho.matrix
        r2 = r2 / np.trace(r2)
        for layers in p["layers"]:
            for boundary in ("periodic", "open"):
                w = H.extend(rho, layers, boundary=boundary)
                cell = 1 if boundary == "open" else 0
                red = H.reduce(w, w.unit_cell(cell)).matrix
                rec = {"rho": name, "layers": layers, "boundary": boundary,
                       "deviation": float(np.abs(red - r2).max()), "raw_norm": w.raw_norm}
                if boundary == "periodic":
                    full = H.reduce(w, keep_layers=[0]).matrix
                    rec["layer_product_deviation"] = float(np.abs(full - np.kron(r2.T, r2)).max())
                out.append(rec)
    return out


def exp_duality_check(p, rng):
    N, n_total = p["N"], p["replicas"]
    rho = MD.mspt_chain_rho(MD.SpinChainConfig(N))
    d = rho.dim
    Z = np.diag([1.0, -1.0])
    MO = np.kron(Z, np.eye(d // 2))
    ins = C.InsertionPair(np.eye(d), MO)
    A, B = C.duality_insertions(ins)
    w = H.extend(rho, n_total)
    t = H.trivial_blocks(n_total, rho.site_map)
    out = []
    for sep in range(n_total - 1):
        sc = C.strange_correlator_blocks(
            t, w, C.LocalOperator(A, [(0, "R", s) for s in rho.site_map]),
            C.LocalOperator(B, [(sep + 1, "R", s) for s in rho.site_map]))
        tr = C.twisted_renyi_n(rho, ins, sep, n_total)
        out.append({"N": N, "replicas": n_total, "i_minus_j": sep, "twisted_renyi": _c(tr.value),
                    "strange_correlator": _c(sc.value), "max_deviation": float(abs(sc.value - tr.value))})
    return out


def exp_renyi2(p, rng):
    out = []
    for N in p["N"]:
        cfg = MD.SpinChainConfig(N)
        rho = MD.mspt_chain_rho(cfg)
        n = len(cfg.sites)
        for j in range(1, N):
            a = PauliString.from_ops(n, {cfg.index(("s", 0)): "Z"})
            b = PauliString.from_ops(n, {cfg.index(("s", j)): "Z"})
            r = C.renyi2_correlator(rho, a, b)
            out.append({"N": N, "pair": [0, j], "operator": "sigma^z sigma^z", "value": _c(r.value)})
    return out


def exp_hotsc_block(p, rng):
    block = MD.HotscBlock()
    g = MD.hotsc_block_ground(block)
    rho_p = MD.upper_half_state(block)
    target = np.diag([0, 0.5, 0.5, 0])
    n, m = block.spins()
    psi = g.state.amplitudes

    def ev(op):
        return float(np.real(np.vdot(psi, op @ psi)))

    rot = MD.HotscBlock(relabel={1: 5, 2: 6, 3: 7, 4: 8, 5: 1, 6: 2, 7: 3, 8: 4})
    n_psi, n_psip = block.number_ops()
    number_form = np.linalg.eigvalsh(block.hamiltonian("number"))
    slab = MD.HotscSlab(2, 2, 2)
    lazy = H.reduce(H.BlockProduct.from_states(slab.block_states()), slab.top_sites()).matrix
    return [{
        "energy": g.energy, "gap": g.gap, "spectrum": list(g.spectrum),
        "rho_p": _mat(rho_p.matrix), "rho_p_deviation": float(np.abs(rho_p.matrix - target).max()),
        "occupations": [ev(n_psi), ev(n_psip)],
        "spin_xy": ev(n[0] @ m[0] + n[1] @ m[1]), "spin_zz": ev(n[2] @ m[2]),
        "rotation_invariance": float(np.abs(rot.hamiltonian() - block.hamiltonian()).max()),
        "number_form_spectrum": [float(x) for x in np.round(number_form, 12)],
        "slab_top_deviation": float(np.abs(lazy - slab.top_reduced().matrix).max()),
    }]


def exp_corner_family(p, rng):
    out = []
    for preset in p["presets"]:
        for sector in p["sectors"]:
            out.append(MD.corner_report(preset, sector, rng))
    return out


def exp_sspt2d(p, rng):
    out = []
    for open_b in (False, True):
        cfg = MD.Sspt2dConfig(p["Lx"], p["Ly"], open_b, open_b)
        stabs = cfg.stabilizer_list()
        ug_ok, ug_bad = MD.preserves_stabilizer_group(cfg.ug(), stabs)
        rec = {
            "config": cfg.to_json(), "n_stabilizers": len(stabs),
            "anticommuting_pairs": int(np.triu(commutation_matrix(stabs)).sum()),
            "us_commute": [all(cfg.us(y).conjugate_pauli(s) == {s.unsigned(): s.phase} for s in stabs)
                           for y in range(cfg.Ly)],
            "ug_preserves_code": ug_ok, "ug_failures": len(ug_bad),
            "logical_qubits": cfg.logical_count(),
        }
        if open_b:
            z, x, y = MD.corner_operators(cfg)
            rec["corner_commutes_with_stabilizers"] = [all(s.commutes(o) for s in stabs) for o in (z, x, y)]
            rec["corner_zx_anticommute"] = not z.commutes(x)
            rec["corner_us0_phases"] = [_c(MD.symmetry_phase(cfg.us(0), o)) for o in (z, x, y)]
        out.append(rec)
    return out


def exp_channel(p, rng):
    out = []
    for px, py in p["lattices"]:
        lat = MD.PlaquetteLattice(px, py)
        rho_in = lat.random_ground_state(rng)
        e1 = MD.measurement_channel(rho_in, lat)
        e2 = MD.measurement_channel(e1, lat)
        rp = MD.upper_half_state().matrix
        target = rp
        for _ in range(len(lat.plaquettes) - 1):
            target = np.kron(target, rp)
        generic = random_density(len(lat.sites), rng, site_map=lat.sites)
        g1 = MD.measurement_channel(generic, lat)
        sels = ["total"] + [("row", y) for y in range(py + 1)] + [("col", x) for x in range(px + 1)]
        verdicts = {str(s): classify(e1, build_subsystem_parity(lat, s)).kind for s in sels}
        out.append({
            "lattice": [px, py],
            "idempotence_ground": float(np.abs(e2.matrix - e1.matrix).max()),
            "idempotence_generic": float(np.abs(MD.measurement_channel(g1, lat).matrix - g1.matrix).max()),
            "fixed_point_deviation": float(np.abs(e1.matrix - target).max()),
            "verdicts": verdicts,
        })
    return out


def exp_uhlmann(p, rng):
    worst_opt, worst_pur, violations = 0.0, 0.0, 0
    for _ in range(p["pairs"]):
        r = random_density(2, rng)
        s = random_density(2, rng)
        F = fidelity(r, s)
        for _ in range(p["random_purifications"]):
            ov = abs(np.vdot(C.purification(r, random_unitary(4, rng)), C.purification(s, random_unitary(4, rng))))
            violations += ov > F + 1e-12
        psi, phi = C.optimal_purifications(r, s, random_unitary(4, rng))
        worst_pur = max(worst_pur, abs(abs(np.vdot(psi, phi)) - F))
        if p["starts"]:
            worst_opt = max(worst_opt, abs(F - C.uhlmann_maximize(r, s, rng, p["starts"])))
    return [{"pairs": p["pairs"], "bound_violations": int(violations),
             "optimal_purification_deviation": worst_pur, "optimizer_deviation": worst_opt}]


def exp_fidelity_strange(p, rng):
    N = p["N"]
    cfg = MD.SpinChainConfig(N)
    rho = MD.mspt_chain_rho(cfg)
    rho0 = maximally_mixed(len(cfg.sites), cfg.sites)
    n = len(cfg.sites)
    a = PauliString.from_ops(n, {cfg.index(("s", 0)): "Z"})
    b = PauliString.from_ops(n, {cfg.index(("s", N - 1)): "Z"})
    golden = C.fidelity_strange(rho, rho0, a, b)
    same = C.fidelity_strange(rho, rho, None, None)
    uk = build_uk(N).dense()
    pure = MD.disorder_state(cfg, MD.DisorderRealization((1,) * N)).density()
    commuting = C.fidelity_strange(pure, pure, uk, None)
    return [{"N": N, "value_sz_ends_vs_maximally_mixed": golden.value,
             "self": same.value, "pure_commuting_unitary": commuting.value}]


def exp_kmatrix(p, rng):
    out = []
    for name in p["theories"]:
        t = KM.load_theory(name)
        rec = {"theory": name, "n_fields": t.n}
        if p["enumerate"] and t.n <= 4:
            allowed = KM.enumerate_allowed(t, p["cutoff"])
            rec["allowed"] = [list(v) for v in allowed]
            rec["gappable"] = KM.gappable(t, p["cutoff"]).to_json()
            rec["gappable_raw"] = KM.gappable(t, p["cutoff"], ssb_check=False).to_json()
        if name in p["sets"]:
            rec["set_check"] = KM.check_gapping_set(t, p["sets"][name]).to_json()
        out.append(rec)
    return out


_KM_SETS = {
    "dipole_block": [[1, -1, -1, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, -1, -1, 1],
                     [-1, 1, 0, 0, 1, -1, 0, 0], [-1, 0, 1, 0, 1, 0, -1, 0]],
    "hotsc_wires": [[1, 1, 1, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 1, 1, 1],
                    [1, 0, 1, 0, -1, 0, -1, 0], [1, 0, 0, 1, 1, 0, 0, 1]],
    "z2t_hinge": [[2, 0, 0, 0], [0, 0, 2, 0]],
    "doubled_hinge": [[1, 1, 1, 1], [1, -1, 1, -1]],
}

_INT_LIST = {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1}

REGISTRY = {e.name: e for e in [
    Experiment("symmetry-1d", "strong U_k and weak U_g of the decorated domain-wall ensemble",
               exp_symmetry_1d, {"N": [2, 3, 4], "boundary": "periodic"},
               {"N": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 6}},
                "boundary": {"enum": ["periodic", "open"]}}),
    Experiment("replica-roundtrip", "reduce(extend(rho)) on one unit cell equals rho^2 / Tr rho^2",
               exp_replica_roundtrip, {"rho": ["mspt2", "tube", "random4"], "layers": [3, 4]},
               {"rho": {"type": "array", "items": {"type": "string"}}, "layers": _INT_LIST}),
    Experiment("duality-check", "twisted Renyi-N correlator equals the replica strange correlator",
               exp_duality_check, {"N": 3, "replicas": 4},
               {"N": {"type": "integer", "minimum": 2, "maximum": 4},
                "replicas": {"type": "integer", "minimum": 2, "maximum": 6}}),
    Experiment("renyi2", "Renyi-2 correlator of the mixed chain", exp_renyi2, {"N": [3, 4]},
               {"N": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 6}}}),
    Experiment("hotsc-block", "cube block ground state and its upper-half reduced state",
               exp_hotsc_block, {}, {}, 1e-12),
    Experiment("corner-family", "corner density matrices allowed by the parity constraints",
               exp_corner_family, {"presets": ["as_written", "conjugation", "x_only"], "sectors": ["even", "odd"]},
               {"presets": {"type": "array", "items": {"enum": list(MD.CORNER_PRESETS)}},
                "sectors": {"type": "array", "items": {"enum": ["even", "odd"]}}}, 1e-12),
    Experiment("sspt2d", "coupled-chain subsystem SPT stabilizers, symmetries and corner modes",
               exp_sspt2d, {"Lx": 4, "Ly": 4},
               {"Lx": {"type": "integer", "minimum": 2, "maximum": 8},
                "Ly": {"type": "integer", "minimum": 2, "maximum": 8}}),
    Experiment("channel", "bilinear measurement channel on the Majorana plaquette lattice",
               exp_channel, {"lattices": [[1, 1], [2, 1]]},
               {"lattices": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 1},
                                                         "minItems": 2, "maxItems": 2}}}, 1e-12),
    Experiment("uhlmann", "purification overlaps are bounded by the Uhlmann fidelity",
               exp_uhlmann, {"pairs": 20, "random_purifications": 5, "starts": 1},
               {"pairs": {"type": "integer", "minimum": 1}, "random_purifications": {"type": "integer", "minimum": 0},
                "starts": {"type": "integer", "minimum": 0}}, 1e-3),
    Experiment("fidelity-strange", "fidelity strange correlator of the mixed chain",
               exp_fidelity_strange, {"N": 3}, {"N": {"type": "integer", "minimum": 2, "maximum": 5}}),
    Experiment("kmatrix", "symmetric null vectors and gappability of Luttinger theories",
               exp_kmatrix,
               {"theories": ["sspt4d", "z2t_hinge", "doubled_hinge", "dipole_block", "hotsc_wires"],
                "cutoff": 2, "enumerate": True, "sets": _KM_SETS},
               {"theories": {"type": "array", "items": {"type": "string"}},
                "cutoff": {"type": "integer", "minimum": 1, "maximum": 3},
                "enumerate": {"type": "boolean"}, "sets": {"type": "object"}}, 0.0),
]}


def catalog() -> list[dict]:
    return [{"name": e.name, "anchor": e.anchor, "defaults": e.defaults, "tolerance": e.tolerance}
            for e in REGISTRY.values()]
