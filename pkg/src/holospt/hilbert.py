"""Dense state vectors and density matrices with labelled qubit factorizations.

Every object carries a `site_map`: a tuple of hashable labels, one per qubit,
in Kronecker order (qubit 0 leftmost). Operations that select subsystems take
labels, never raw indices.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import unitary_group

MAX_QUBITS = 16
MAX_STATE_QUBITS = 22
TOL = 1e-12
PSD_TOL = 1e-10
# eigenvalues of PSD inputs below this are treated as exact zeros in sqrt
SQRT_FLOOR = 1e-13

_MAGIC = b"HSPTMAT\x00"
_VERSION = 1


class CapacityError(ValueError):
    """Requested system exceeds the dense size cap."""


def _check_dim(dim: int, cap: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds the dense cap of {cap}")
    return n


def _labels(site_map, n):
    if site_map is None:
        return tuple(range(n))
    site_map = tuple(site_map)
    if len(site_map) != n:
        raise ValueError(f"site_map has {len(site_map)} labels for {n} qubits")
    if len(set(site_map)) != n:
        raise ValueError("site_map labels must be distinct")
    return site_map


def site_indices(site_map, sites) -> list[int]:
    """Qubit indices of `sites` inside `site_map` (raises on unknown labels)."""
    index = {s: i for i, s in enumerate(site_map)}
    out = []
    for s in sites:
        if s not in index:
            raise KeyError(f"unknown site label {s!r}")
        out.append(index[s])
    if len(set(out)) != len(out):
        raise ValueError("repeated site labels")
    return out


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    site_map: tuple = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = _check_dim(amp.size, MAX_STATE_QUBITS)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "site_map", _labels(self.site_map, n))

    @classmethod
    def normalized(cls, amplitudes, site_map=None) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amp)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amp / nrm, site_map)

    @classmethod
    def basis(cls, bits, site_map=None) -> "StateVector":
        bits = list(bits)
        amp = np.zeros(1 << len(bits), dtype=complex)
        amp[int("".join(str(int(b)) for b in bits), 2) if bits else 0] = 1
        return cls(amp, site_map)

    @property
    def n_qubits(self) -> int:
        return len(self.site_map)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.site_map)

    def reduced(self, keep) -> "DensityMatrix":
        """Reduced density matrix on `keep`, with qubits in the order given."""
        keep_idx = site_indices(self.site_map, keep)
        n = self.n_qubits
        if len(keep_idx) > MAX_QUBITS:
            raise CapacityError(f"{len(keep_idx)} kept qubits exceeds the cap of {MAX_QUBITS}")
        rest = [i for i in range(n) if i not in keep_idx]
        psi = self.amplitudes.reshape([2] * n).transpose(keep_idx + rest)
        m = psi.reshape(1 << len(keep_idx), -1)
        rho = m @ m.conj().T
        return DensityMatrix(rho / np.trace(rho).real, tuple(keep), check=False)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    site_map: tuple = None
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        n = _check_dim(m.shape[0], MAX_QUBITS)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "site_map", _labels(self.site_map, n))
        if self.check:
            validate_density(m)

    @property
    def n_qubits(self) -> int:
        return len(self.site_map)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_sites(self, site_map) -> "DensityMatrix":
        return DensityMatrix(self.matrix, site_map, check=False)

    def eigh(self):
        return np.linalg.eigh(self.matrix)


def validate_density(m: np.ndarray, tol: float = TOL, psd_tol: float = PSD_TOL):
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.conj().T).max() > tol * scale:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(m) - 1) > tol * m.shape[0]:
        raise ValueError(f"density matrix trace {np.trace(m).real:.3e} is not 1")
    if np.linalg.eigvalsh(m).min() < -psd_tol:
        raise ValueError("density matrix is not positive semidefinite")


def as_density(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, StateVector):
        return rho.density()
    return DensityMatrix(np.asarray(rho))


def maximally_mixed(n: int, site_map=None) -> DensityMatrix:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
    d = 1 << n
    return DensityMatrix(np.eye(d) / d, site_map, check=False)


def tensor(a, b):
    """Kronecker product of two states of the same kind; site maps concatenate."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.site_map + b.site_map)
    a, b = as_density(a), as_density(b)
    return DensityMatrix(np.kron(a.matrix, b.matrix), a.site_map + b.site_map, check=False)


def permute_sites(rho: DensityMatrix, order) -> DensityMatrix:
    """Reorder qubits so that the new site_map equals `order`."""
    idx = site_indices(rho.site_map, order)
    if len(idx) != rho.n_qubits:
        raise ValueError("order must list every site")
    n = rho.n_qubits
    t = rho.matrix.reshape([2] * (2 * n)).transpose(idx + [n + i for i in idx])
    return DensityMatrix(t.reshape(rho.dim, rho.dim), tuple(order), check=False)


def partial_trace(rho, keep) -> DensityMatrix:
    """Trace out everything except `keep`; kept qubits appear in the order given."""
    keep = list(keep)
    if not keep:
        raise ValueError("keep must be nonempty")
    if isinstance(rho, StateVector):
        return rho.reduced(keep)
    rho = as_density(rho)
    n = rho.n_qubits
    keep_idx = site_indices(rho.site_map, keep)
    rest = [i for i in range(n) if i not in keep_idx]
    dk, dr = 1 << len(keep_idx), 1 << len(rest)
    t = rho.matrix.reshape([2] * (2 * n))
    t = t.transpose(keep_idx + rest + [n + i for i in keep_idx] + [n + i for i in rest])
    out = np.trace(t.reshape(dk, dr, dk, dr), axis1=1, axis2=3)
    return DensityMatrix(out, tuple(keep), check=False)


def partial_transpose(rho, part) -> np.ndarray:
    rho = as_density(rho)
    n = rho.n_qubits
    idx = set(site_indices(rho.site_map, part))
    axes = [n + i if i in idx else i for i in range(n)] + [i if i in idx else n + i for i in range(n)]
    return rho.matrix.reshape([2] * (2 * n)).transpose(axes).reshape(rho.dim, rho.dim)


def ppt_negativity(rho, part) -> float:
    """Sum of |negative eigenvalues| of the partial transpose over `part`.

    Zero for separable states. Conclusive (zero iff separable) only for 2x2 and
    2x3 bipartitions; otherwise a necessary test.
    """
    rho = as_density(rho)
    part = list(part)
    if not part or len(part) >= rho.n_qubits:
        raise ValueError("bipartition must be a proper nonempty subset")
    ev = np.linalg.eigvalsh(partial_transpose(rho, part))
    return float(-ev[ev < 0].sum())


def sqrtm_psd(m: np.ndarray, floor: float = SQRT_FLOOR) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    if w.min() < -PSD_TOL:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    w = np.where(w < floor, 0.0, w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)) (not squared).

    Evaluated as the trace norm of sqrt(rho) sqrt(sigma), which equals the
    definition and is symmetric by construction.
    """
    a = as_density(rho).matrix
    b = as_density(sigma).matrix
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    s = np.linalg.svd(sqrtm_psd(a) @ sqrtm_psd(b), compute_uv=False)
    return float(min(1.0, s.sum()))


def purity(rho) -> float:
    m = as_density(rho).matrix
    return float(np.real(np.einsum("ij,ji->", m, m)))


def renyi_entropy(rho, order: int = 2) -> float:
    """Renyi entropy (natural log). order=1 gives von Neumann."""
    if order < 1:
        raise ValueError("order must be >= 1")
    w = np.linalg.eigvalsh(as_density(rho).matrix)
    w = w[w > 1e-14]
    if order == 1:
        return float(max(0.0, -(w * np.log(w)).sum()))
    return float(max(0.0, np.log((w**order).sum()) / (1 - order)))


def von_neumann_entropy(rho) -> float:
    return renyi_entropy(rho, 1)


def random_unitary(d: int, rng) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_density(n: int, rng, rank: int | None = None, site_map=None) -> DensityMatrix:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense cap of {MAX_QUBITS}")
    d = 1 << n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, site_map)


def random_state(n: int, rng, site_map=None) -> StateVector:
    d = 1 << n
    return StateVector.normalized(rng.normal(size=d) + 1j * rng.normal(size=d), site_map)


def save_matrix(path, m: np.ndarray):
    """Write a complex matrix: magic, version, rows, cols, then row-major complex128 LE."""
    m = np.ascontiguousarray(np.asarray(m, dtype="<c16"))
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQQ", _VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(len(_MAGIC))
        if head != _MAGIC:
            raise ValueError("not a matrix container")
        version, rows, cols = struct.unpack("<IQQ", fh.read(20))
        if version != _VERSION:
            raise ValueError(f"unsupported container version {version}")
        data = fh.read()
    if len(data) != rows * cols * 16:
        raise ValueError("truncated matrix container")
    return np.frombuffer(data, dtype="<c16").reshape(rows, cols).astype(complex)


def apply_operator(vec: np.ndarray, site_map, op: np.ndarray, sites) -> np.ndarray:
    """Apply a dense operator on `sites` (in the order given) to a state vector over `site_map`."""
    idx = site_indices(site_map, sites)
    n, k = len(site_map), len(idx)
    op = np.asarray(op, dtype=complex)
    if op.shape != (1 << k, 1 << k):
        raise ValueError(f"operator shape {op.shape} does not match {k} sites")
    psi = np.asarray(vec, dtype=complex).reshape([2] * n)
    out = np.tensordot(op.reshape([2] * (2 * k)), psi, axes=(list(range(k, 2 * k)), idx))
    rest = [i for i in range(n) if i not in idx]
    inv = np.argsort(idx + rest)
    return out.transpose(inv).reshape(-1)
