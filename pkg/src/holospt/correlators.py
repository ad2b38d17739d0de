"""Strange, twisted-Renyi, fidelity-strange and Renyi-2 correlators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .hilbert import (
    DensityMatrix,
    StateVector,
    apply_operator,
    as_density,
    fidelity,
    sqrtm_psd,
)
from .pauli import PauliString

DENOM_TOL = 1e-14


@dataclass(frozen=True)
class InsertionPair:
    """M fixes the trivial reference; M_O is the inserted operator."""

    M: np.ndarray
    M_O: np.ndarray
    labels: tuple = ("M", "M_O")

    def __post_init__(self):
        M = np.asarray(self.M, dtype=complex)
        MO = np.asarray(self.M_O, dtype=complex)
        if M.shape != MO.shape or M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("M and M_O must be square matrices of the same size")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "M_O", MO)


@dataclass(frozen=True)
class CorrelatorResult:
    value: complex
    numerator: complex
    denominator: complex
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def c(z):
            z = complex(z)
            return [z.real, z.imag]

        return {"value": c(self.value), "numerator": c(self.numerator),
                "denominator": c(self.denominator), "parameters": self.parameters}


def _result(num, den, params) -> CorrelatorResult:
    if abs(den) <= DENOM_TOL:
        raise ZeroDivisionError(f"normalization {abs(den):.3e} vanishes")
    return CorrelatorResult(num / den, num, den, params)


@dataclass(frozen=True)
class LocalOperator:
    """Dense operator on a list of site labels."""

    matrix: np.ndarray
    sites: tuple

    def apply(self, vec, site_map):
        return apply_operator(vec, site_map, self.matrix, self.sites)

    def dagger(self) -> "LocalOperator":
        return LocalOperator(np.asarray(self.matrix).conj().T, self.sites)


def _apply(op, vec, site_map):
    if op is None:
        return vec
    if isinstance(op, PauliString):
        if op.n_qubits != len(site_map):
            raise ValueError("PauliString size does not match the state")
        return op.apply(vec)
    if isinstance(op, LocalOperator):
        return op.apply(vec, site_map)
    m = np.asarray(op, dtype=complex)
    if m.shape != (vec.size, vec.size):
        raise ValueError("dense operator has the wrong dimension")
    return m @ vec


def _dagger(op):
    if op is None:
        return None
    if isinstance(op, (PauliString, LocalOperator)):
        return op.dagger()
    return np.asarray(op, dtype=complex).conj().T


def _sites_of(op, site_map):
    if isinstance(op, LocalOperator):
        return set(op.sites)
    if isinstance(op, PauliString):
        return {site_map[q] for q in op.support}
    return None


def strange_correlator(psi0, psi, O_r=None, O_rp=None, allowed_sites=None) -> CorrelatorResult:
    """<psi0| O_r O_rp^dag |psi> / <psi0|psi>.

    Operators are PauliStrings over the full site map, LocalOperators or dense
    matrices. With `allowed_sites`, both insertions must lie inside that set
    (e.g. a designated bottom layer).
    """
    if psi0.site_map != psi.site_map:
        raise ValueError("states live on different site maps")
    site_map = psi.site_map
    if allowed_sites is not None:
        allowed = set(allowed_sites)
        for op in (O_r, O_rp):
            s = _sites_of(op, site_map)
            if s is not None and not s <= allowed:
                raise ValueError("insertion outside the designated sites")
    den = np.vdot(psi0.amplitudes, psi.amplitudes)
    if abs(den) <= DENOM_TOL:
        raise ZeroDivisionError("reference state is orthogonal to the target")
    v = _apply(_dagger(O_rp), psi.amplitudes, site_map)
    v = _apply(O_r, v, site_map)
    num = np.vdot(psi0.amplitudes, v)
    return _result(num, den, {"n_qubits": len(site_map)})


def block_overlap(bra, ket, ops=()) -> complex:
    """<bra| ops[-1] ... ops[0] |ket> for two block products over the same sites.

    Each LocalOperator must lie inside one ket block. The network is contracted
    greedily, one block at a time, without forming either dense state.
    """
    if set(bra.site_map) != set(ket.site_map):
        raise ValueError("states live on different sites")
    kets = [(list(sites), np.asarray(v, dtype=complex)) for sites, v in ket.blocks]
    for op in ops:
        hit = [k for k, (sites, _) in enumerate(kets) if set(op.sites) <= set(sites)]
        if not hit:
            raise ValueError("insertion straddles two blocks")
        sites, v = kets[hit[0]]
        kets[hit[0]] = (sites, op.apply(v, sites))
    pool = [([("k", s) for s in sites], v.reshape([2] * len(sites))) for sites, v in kets]
    pool += [([("b", s) for s in sites], np.asarray(v, dtype=complex).conj().reshape([2] * len(sites)))
             for sites, v in bra.blocks]

    def bare(label):
        return label[1]

    cur_labels, cur = pool.pop(0)
    while pool:
        names = {bare(x) for x in cur_labels}
        best = max(range(len(pool)), key=lambda k: sum(bare(x) in names for x in pool[k][0]))
        labels, t = pool.pop(best)
        shared = [bare(x) for x in labels if bare(x) in names]
        ia = [next(i for i, x in enumerate(cur_labels) if bare(x) == s) for s in shared]
        ib = [next(i for i, x in enumerate(labels) if bare(x) == s) for s in shared]
        cur = np.tensordot(cur, t, axes=(ia, ib))
        cur_labels = [x for i, x in enumerate(cur_labels) if i not in ia] + \
                     [x for i, x in enumerate(labels) if i not in ib]
    return complex(cur)


def strange_correlator_blocks(psi0, psi, O_r=None, O_rp=None) -> CorrelatorResult:
    """strange_correlator for block products with LocalOperator insertions."""
    den = block_overlap(psi0, psi)
    if abs(den) <= DENOM_TOL:
        raise ZeroDivisionError("reference state is orthogonal to the target")
    ops = [op for op in (_dagger(O_rp), O_r) if op is not None]
    num = block_overlap(psi0, psi, ops)
    return _result(num, den, {"n_qubits": len(psi.site_map), "route": "block network"})


def twisted_renyi_n(rho, ins: InsertionPair, i_minus_j: int, n_total: int,
                    boundary: str = "periodic") -> CorrelatorResult:
    """Tr[rho M_O (rho M)^d rho M_O^dag (rho M)^{n-2-d}] / Tr[(rho M)^n], d = i_minus_j.

    The remaining n - 2 - d replicas fill the ring with rho M factors.
    """
    if boundary != "periodic":
        raise ValueError("only the periodic replica ring is supported")
    rho = as_density(rho).matrix
    if ins.M.shape != rho.shape:
        raise ValueError("insertion matrices do not match rho")
    if n_total < 2:
        raise ValueError("n_total must be >= 2")
    d = int(i_minus_j)
    if not 0 <= d <= n_total - 2:
        raise ValueError(f"separation must lie in [0, {n_total - 2}]")
    rm = rho @ ins.M
    mp = np.linalg.matrix_power
    num = np.trace(rho @ ins.M_O @ mp(rm, d) @ rho @ ins.M_O.conj().T @ mp(rm, n_total - 2 - d))
    den = np.trace(mp(rm, n_total))
    return _result(num, den, {"i_minus_j": d, "n_total": n_total})


def duality_insertions(ins: InsertionPair):
    """Layer operators (A, B) such that A on R_p and B on R_q = R_{p+d+1} turn the
    strange correlator of extend(rho) against trivial_state(M) into the twisted
    Renyi correlator: <Psi0| A B^dag |Psi> with A = M^-1 M_O, B^dag = M^-1 M_O^dag.
    """
    Minv = np.linalg.inv(ins.M)
    A = Minv @ ins.M_O
    Bdag = Minv @ ins.M_O.conj().T
    return A, Bdag.conj().T


def fidelity_strange(rho, rho0, O_r=None, O_rp=None, channel=None) -> CorrelatorResult:
    """F(E[rho], O_r O_rp^dag E[rho0] O_rp O_r^dag) / F(E[rho], E[rho0]).

    Operators are dense matrices or PauliStrings on rho's space; `channel` is an
    optional callable DensityMatrix -> DensityMatrix (identity by default).
    """
    rho, rho0 = as_density(rho), as_density(rho0)
    if channel is not None:
        rho, rho0 = channel(rho), channel(rho0)
    d = rho.dim

    def dense(op):
        if op is None:
            return np.eye(d)
        if isinstance(op, PauliString):
            return op.to_dense()
        return np.asarray(op, dtype=complex)

    den = fidelity(rho, rho0)
    if O_r is None and O_rp is None:
        res = _result(den, den, {"trace_after_insertion": 1.0})
        return CorrelatorResult(float(np.real(res.value)), den, den, res.parameters)
    O = dense(O_r) @ dense(O_rp).conj().T
    moved = O @ rho0.matrix @ O.conj().T
    tr = np.trace(moved).real
    if tr <= DENOM_TOL:
        raise ZeroDivisionError("inserted operators annihilate the reference state")
    # operators need not be unitary; the moved state is renormalized
    num = fidelity(rho, DensityMatrix(moved / tr, rho0.site_map, check=False))
    res = _result(num, den, {"trace_after_insertion": float(tr)})
    return CorrelatorResult(float(np.real(res.value)), num, den, res.parameters)


def renyi2_correlator(rho, A=None, B=None) -> CorrelatorResult:
    """Tr[A B rho B^dag A^dag rho] / Tr[rho^2]."""
    m = as_density(rho).matrix
    d = m.shape[0]

    def dense(op):
        if op is None:
            return np.eye(d)
        if isinstance(op, PauliString):
            return op.to_dense()
        return np.asarray(op, dtype=complex)

    ab = dense(A) @ dense(B)
    num = np.trace(ab @ m @ ab.conj().T @ m)
    den = np.trace(m @ m)
    return _result(num, den, {})


# Uhlmann purifications


def purification(rho, V: np.ndarray) -> np.ndarray:
    """vec(sqrt(rho) V): a purification of rho on system (x) ancilla for unitary V."""
    return (sqrtm_psd(as_density(rho).matrix) @ V).reshape(-1)


def optimal_purifications(rho, sigma, V: np.ndarray):
    """(psi, phi) purifying rho, sigma with |<psi|phi>| = F(rho, sigma).

    psi = vec(sqrt(rho) V); phi = vec(sqrt(sigma) W) with W = B A^dag V where
    sqrt(rho) sqrt(sigma) = A S B^dag.
    """
    sr = sqrtm_psd(as_density(rho).matrix)
    ss = sqrtm_psd(as_density(sigma).matrix)
    A, _, Bh = np.linalg.svd(sr @ ss)
    W = Bh.conj().T @ A.conj().T @ V
    return (sr @ V).reshape(-1), (ss @ W).reshape(-1)


def uhlmann_maximize(rho, sigma, rng, starts: int = 1) -> float:
    """max over ancilla unitaries W of |<vec sqrt(rho)|vec(sqrt(sigma) W)>| by
    BFGS on a Hermitian generator, from `starts` random initial points."""
    sr = sqrtm_psd(as_density(rho).matrix)
    ss = sqrtm_psd(as_density(sigma).matrix)
    G = sr.conj().T @ ss  # overlap = Tr(G W)
    d = G.shape[0]
    iu = np.triu_indices(d, 1)

    def herm(x):
        h = np.diag(x[:d]).astype(complex)
        k = len(iu[0])
        h[iu] = x[d:d + k] + 1j * x[d + k:]
        h[(iu[1], iu[0])] = x[d:d + k] - 1j * x[d + k:]
        return h

    def f(x):
        lam, V = np.linalg.eigh(herm(x))
        e = np.exp(1j * lam)
        T = np.trace(G @ (V * e) @ V.conj().T)
        # divided differences of exp(i lambda) give the Frechet derivative
        dl = lam[:, None] - lam[None, :]
        close = np.abs(dl) < 1e-9
        phi = np.where(close, 1j * e[:, None], (e[:, None] - e[None, :]) / np.where(close, 1, dl))
        R = V @ ((V.conj().T @ G @ V).T * phi).T @ V.conj().T
        c = np.conj(T) / max(abs(T), 1e-300)
        g_diag = -np.real(c * np.diag(R))
        g_re = -np.real(c * (R[iu[1], iu[0]] + R[iu]))
        g_im = -np.real(c * 1j * (R[iu[1], iu[0]] - R[iu]))
        return -abs(T), np.concatenate([g_diag, g_re, g_im])

    best = 0.0
    for _ in range(starts):
        x0 = rng.normal(size=d * d)
        r = minimize(f, x0, jac=True, method="BFGS", options={"gtol": 1e-6})
        best = max(best, -r.fun)
    return float(best)
