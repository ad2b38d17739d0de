"""Dimensional extension and reduction between density matrices and layered states.

A density matrix rho on sites S becomes a chain of N layers. Layer i owns two
copies of S: the bra-side component L_i and the ket-side component R_i. With
the fixed-point T-tensor, the state is a product of inter-layer blocks

    |rho>>_i = sum_g lambda_g |g>_{R_i} |g*>_{L_{i+1}},

i.e. vec(rho) with the row index on R_i and the column index on L_{i+1}.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    MAX_QUBITS,
    MAX_STATE_QUBITS,
    CapacityError,
    DensityMatrix,
    StateVector,
    apply_operator,
    as_density,
    partial_trace,
    permute_sites,
    site_indices,
    tensor,
)
from .symmetry import SymmetryOp


def layer_site(i: int, comp: str, s):
    return (i, comp, s)


@dataclass(frozen=True)
class TTensor:
    """Rank-4 tensor T_{ijkl} on one layer's (L, R) space.

    It acts as the operator with matrix element <i k| T |j l> = T_{ijkl}, with
    (i, j) on L and (k, l) on R. delta_ij delta_kl is then the identity, which is
    the fixed-point choice; anything else couples the two components.
    """

    array: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.array, dtype=complex)
        if a.ndim != 4 or len(set(a.shape)) != 1:
            raise ValueError("T must be a rank-4 tensor with equal dimensions")
        object.__setattr__(self, "array", a)

    @classmethod
    def identity(cls, d: int) -> "TTensor":
        e = np.eye(d)
        return cls(np.einsum("ij,kl->ijkl", e, e))

    @classmethod
    def from_operator(cls, op: np.ndarray) -> "TTensor":
        op = np.asarray(op, dtype=complex)
        d = int(round(np.sqrt(op.shape[0])))
        return cls(op.reshape(d, d, d, d).transpose(0, 2, 1, 3))

    @property
    def d(self) -> int:
        return self.array.shape[0]

    def operator(self) -> np.ndarray:
        d = self.d
        return self.array.transpose(0, 2, 1, 3).reshape(d * d, d * d)

    def is_identity(self) -> bool:
        return np.allclose(self.operator(), np.eye(self.d ** 2), atol=1e-14)


@dataclass
class BlockProduct:
    """Tensor product of pure blocks, each a (sites, vector) pair.

    `site_map` fixes the Kronecker order of the dense state; blocks may appear
    in any order and need not be contiguous in it.
    """

    blocks: list
    site_map: tuple

    def __post_init__(self):
        self.site_map = tuple(self.site_map)
        seen = [s for sites, _ in self.blocks for s in sites]
        if sorted(map(repr, seen)) != sorted(map(repr, self.site_map)):
            raise ValueError("blocks do not cover the site map exactly once")

    @classmethod
    def from_states(cls, states, site_map=None) -> "BlockProduct":
        blocks = [(tuple(s.site_map), s.amplitudes) for s in states]
        if site_map is None:
            site_map = tuple(x for sites, _ in blocks for x in sites)
        return cls(blocks, site_map)

    @property
    def n_qubits(self) -> int:
        return len(self.site_map)

    def dense(self) -> StateVector:
        if self.n_qubits > MAX_STATE_QUBITS:
            raise CapacityError(f"{self.n_qubits} qubits exceeds the dense state cap")
        amp = np.ones(1, dtype=complex)
        order = []
        for sites, v in self.blocks:
            amp = np.kron(amp, v)
            order += list(sites)
        n = len(order)
        perm = site_indices(order, self.site_map)
        amp = amp.reshape([2] * n).transpose(perm).reshape(-1)
        return StateVector(amp, self.site_map)

    def reduce(self, keep) -> DensityMatrix:
        """Partial trace computed block by block; output order follows `keep`."""
        keep = list(keep)
        if len(keep) > MAX_QUBITS:
            raise CapacityError(f"{len(keep)} kept qubits exceeds the cap of {MAX_QUBITS}")
        site_indices(self.site_map, keep)
        kset = set(keep)
        out = None
        for sites, v in self.blocks:
            kept = [s for s in sites if s in kset]
            if not kept:
                continue
            piece = StateVector(v, sites).reduced(kept)
            out = piece if out is None else tensor(out, piece)
        return permute_sites(out, keep)


@dataclass
class ReplicaWavefunction(BlockProduct):
    layers: int = 2
    boundary: str = "periodic"
    local_sites: tuple = ()
    spectrum: tuple = ()
    raw_norm: float = 1.0
    t: TTensor | None = None
    layer_map: dict = field(default_factory=dict)

    def dense(self) -> StateVector:
        psi = super().dense()
        if self.t is None or self.t.is_identity():
            return psi
        amp = psi.amplitudes
        for i in range(self.layers):
            ls, rs = self.layer_map[i]
            if ls and rs:
                amp = apply_operator(amp, self.site_map, self.t.operator(), list(ls) + list(rs))
        return StateVector.normalized(amp, self.site_map)

    def reduce(self, keep) -> DensityMatrix:
        if self.t is None or self.t.is_identity():
            return super().reduce(keep)
        return partial_trace(self.dense(), keep)

    def unit_cell(self, i: int = 0) -> list:
        """Ket-side component R_i of layer i (the copy that carries rho itself)."""
        ls, rs = self.layer_map[i]
        if not rs:
            raise ValueError(f"layer {i} has no ket component on an open chain")
        return list(rs)

    def layer(self, i: int) -> list:
        ls, rs = self.layer_map[i]
        return list(ls) + list(rs)

    def to_json(self) -> dict:
        return {
            "layers": self.layers,
            "boundary": self.boundary,
            "local_sites": [repr(s) for s in self.local_sites],
            "layer_map": {str(i): {"L": [repr(s) for s in ls], "R": [repr(s) for s in rs]}
                          for i, (ls, rs) in self.layer_map.items()},
            "spectrum": [float(x) for x in self.spectrum],
            "raw_norm": float(self.raw_norm),
            "t_tensor": "identity" if self.t is None or self.t.is_identity() else "custom",
        }


def sorted_spectrum(rho: DensityMatrix):
    """Eigenpairs sorted by descending eigenvalue; ties broken lexicographically on
    the rounded eigenvector entries after fixing each vector's phase."""
    w, v = np.linalg.eigh(rho.matrix)
    vecs = []
    for k in range(len(w)):
        x = v[:, k]
        j = int(np.argmax(np.abs(x) > 1e-9))
        x = x * np.exp(-1j * np.angle(x[j]))
        vecs.append(x)
    key = [(-round(float(w[k]), 12), tuple(np.round(vecs[k].real, 9)), tuple(np.round(vecs[k].imag, 9)))
           for k in range(len(w))]
    order = sorted(range(len(w)), key=lambda k: key[k])
    return np.array([w[k] for k in order]), np.array([vecs[k] for k in order]).T


def _layer_layout(N: int, local, boundary):
    layer_map = {}
    site_map = []
    for i in range(N):
        ls = tuple(layer_site(i, "L", s) for s in local)
        rs = tuple(layer_site(i, "R", s) for s in local)
        if boundary == "open":
            if i == 0:
                ls = ()
            if i == N - 1:
                rs = ()
        layer_map[i] = (ls, rs)
        site_map += list(ls) + list(rs)
    return layer_map, tuple(site_map)


def extend(rho, layers: int = 2, t: TTensor | None = None, boundary: str = "periodic") -> ReplicaWavefunction:
    """Replicate rho into `layers` layers glued by |rho>> blocks.

    The product is normalized numerically; `raw_norm` records the norm of the
    unnormalized product, (Tr rho^2)^{blocks/2}.
    """
    rho = as_density(rho)
    if layers < 2:
        raise ValueError("need at least two layers")
    if boundary not in ("periodic", "open"):
        raise ValueError("boundary must be periodic or open")
    if np.linalg.eigvalsh(rho.matrix).min() < -1e-10:
        raise ValueError("rho is not positive semidefinite")
    local = rho.site_map
    d = rho.dim
    if t is not None and t.d != d:
        raise ValueError("T-tensor dimension does not match rho")
    if t is not None and not t.is_identity() and 2 * len(local) * layers > MAX_STATE_QUBITS:
        raise CapacityError("nondefault T-tensors need the dense state")
    lam, _ = sorted_spectrum(rho)
    vec = rho.matrix.reshape(-1)
    nrm = np.linalg.norm(vec)
    layer_map, site_map = _layer_layout(layers, local, boundary)
    n_blocks = layers if boundary == "periodic" else layers - 1
    blocks = []
    for i in range(n_blocks):
        j = (i + 1) % layers
        sites = tuple(layer_site(i, "R", s) for s in local) + tuple(layer_site(j, "L", s) for s in local)
        blocks.append((sites, vec / nrm))
    return ReplicaWavefunction(
        blocks, site_map, layers=layers, boundary=boundary, local_sites=local,
        spectrum=tuple(lam), raw_norm=float(nrm ** n_blocks), t=t, layer_map=layer_map,
    )


def trivial_blocks(layers: int, local_sites, M: np.ndarray | None = None, boundary: str = "periodic") -> BlockProduct:
    """prod_i sum_{ab} conj(M_ab) |a>_{L_i} |b>_{R_i}, normalized, as a block product.

    M = I gives intra-layer maximally entangled pairs. Dangling components of
    an open chain carry the uniform superposition.
    """
    local = tuple(local_sites)
    d = 1 << len(local)
    M = np.eye(d) if M is None else np.asarray(M, dtype=complex)
    if M.shape != (d, d):
        raise ValueError("M has the wrong dimension")
    pair = M.conj().reshape(-1)
    pair = pair / np.linalg.norm(pair)
    layer_map, site_map = _layer_layout(layers, local, boundary)
    blocks = []
    for i in range(layers):
        ls, rs = layer_map[i]
        if ls and rs:
            blocks.append((ls + rs, pair))
        else:
            blocks.append((ls or rs, np.ones(d, dtype=complex) / np.sqrt(d)))
    return BlockProduct(blocks, site_map)


def trivial_state(layers: int, local_sites, M: np.ndarray | None = None, boundary: str = "periodic") -> StateVector:
    """Dense form of trivial_blocks."""
    return trivial_blocks(layers, local_sites, M, boundary).dense()


def reduce(psi, keep=None, keep_layers=None) -> DensityMatrix:
    """Reduced density matrix on site labels `keep` or on whole layers `keep_layers`."""
    if keep is None:
        if keep_layers is None:
            raise ValueError("give keep or keep_layers")
        if not isinstance(psi, ReplicaWavefunction):
            raise ValueError("keep_layers needs a ReplicaWavefunction")
        keep = [s for i in keep_layers for s in psi.layer(i)]
    if isinstance(psi, BlockProduct):
        return psi.reduce(keep)
    return partial_trace(psi, keep)


def layer_action(U: SymmetryOp, w: ReplicaWavefunction, layer: int, comp: str) -> SymmetryOp:
    """U acting on one component of one layer; the L (bra) side carries conj(U)."""
    ls, rs = w.layer_map[layer]
    sites = rs if comp == "R" else ls
    if not sites:
        return None
    pos = site_indices(w.local_sites, U.sites)
    target = [sites[p] for p in pos]
    op = U if comp == "R" else U.conj()
    return op.relabel(target)


def replica_symmetry_check(w: ReplicaWavefunction, U: SymmetryOp, mode: str = "weak-as-global",
                           layer: int = 0, dense: bool = False) -> float:
    """min_phi || U_applied w - e^{i phi} w ||.

    strong-as-subsystem: U on R_layer and conj(U) on L_layer.
    weak-as-global: U on every R component and conj(U) on every L component.
    """
    if w.t is not None and not w.t.is_identity():
        dense = True
        U_T = U.dense(w.local_sites)
        V = np.kron(U_T.conj(), U_T)
        if np.abs(V @ w.t.operator() - w.t.operator() @ V).max() > 1e-10:
            warnings.warn("T-tensor does not commute with the layer symmetry action")
    missing = set(U.sites) - set(w.local_sites)
    if missing:
        raise ValueError("symmetry support lies outside the replicated sites")
    if mode == "strong-as-subsystem":
        layers = [layer]
    elif mode == "weak-as-global":
        layers = list(range(w.layers))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ops = []
    for i in layers:
        for comp in ("R", "L"):
            op = layer_action(U, w, i, comp)
            if op is not None:
                ops.append(op)
    if dense:
        psi = w.dense()
        out = psi.amplitudes
        for op in ops:
            out = op.apply(out, psi.site_map)
        ov = np.vdot(psi.amplitudes, out)
        return float(np.linalg.norm(out - np.exp(1j * np.angle(ov)) * psi.amplitudes))
    # ||U w - e^{i phi} w||^2 = 2 (1 - prod_k |<v_k|U v_k>|); each factor's
    # deficit is taken from a direct vector difference to keep precision
    log_ov = 0.0
    for sites, v in w.blocks:
        out = v
        sset = set(sites)
        for op in ops:
            if set(op.sites) <= sset:
                out = op.apply(out, sites)
            elif set(op.sites) & sset:
                raise ValueError("symmetry action straddles two blocks")
        ov = np.vdot(v, out)
        deficit = 0.5 * np.linalg.norm(out - np.exp(1j * np.angle(ov)) * v) ** 2
        log_ov += np.log1p(-min(deficit, 1.0))
    return float(np.sqrt(max(0.0, -2 * np.expm1(log_ov))))
