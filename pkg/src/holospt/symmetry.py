"""Symmetry operators as gate lists, and strong/weak classification of density matrices."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import DensityMatrix, as_density, site_indices
from .pauli import PauliString, pauli_commutes, pauli_mul

TOL = 1e-10


@dataclass(frozen=True)
class PhaseGate:
    """(1 + P)/2 + e^{i theta} (1 - P)/2 for a Hermitian Pauli P.

    With P = Z on one qubit this is diag(1, e^{i theta}).
    """

    pauli: PauliString
    theta: float

    def __post_init__(self):
        if not self.pauli.is_hermitian():
            raise ValueError("PhaseGate needs a Hermitian Pauli string")

    @property
    def n_qubits(self) -> int:
        return self.pauli.n_qubits

    def apply(self, m: np.ndarray) -> np.ndarray:
        pm = self.pauli.apply(m)
        e = np.exp(1j * self.theta)
        return 0.5 * (1 + e) * m + 0.5 * (1 - e) * pm

    def apply_right(self, m: np.ndarray) -> np.ndarray:
        mp = self.pauli.apply_right(m)
        e = np.exp(1j * self.theta)
        return 0.5 * (1 + e) * m + 0.5 * (1 - e) * mp

    def dagger(self) -> "PhaseGate":
        return PhaseGate(self.pauli, -self.theta)

    def conj(self) -> "PhaseGate":
        return PhaseGate(pauli_conj(self.pauli), -self.theta)

    def embed(self, n_total, positions) -> "PhaseGate":
        return PhaseGate(self.pauli.embed(n_total, positions), self.theta)

    def __str__(self) -> str:
        return f"phase {self.pauli} {self.theta!r}"


def pauli_conj(p: PauliString) -> PauliString:
    """Complex conjugate: Y -> -Y and the phase i^k -> i^-k."""
    n_y = bin(p.x_bits & p.z_bits).count("1")
    return PauliString(p.n_qubits, p.x_bits, p.z_bits, (-p.k + 2 * n_y) % 4)


def _gate_str(g) -> str:
    return f"pauli {g}" if isinstance(g, PauliString) else str(g)


@dataclass(frozen=True)
class SymmetryOp:
    """U = e^{i global_phase} * gates[0] @ gates[1] @ ... over the labelled `sites`.

    Gates are PauliStrings or PhaseGates on len(sites) qubits. `strength` is
    the intended kind ("strong", "weak" or None) and is informational only.
    """

    gates: tuple
    sites: tuple
    tag: str = ""
    global_phase: float = 0.0
    strength: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "sites", tuple(self.sites))
        for g in self.gates:
            if g.n_qubits != len(self.sites):
                raise ValueError("gate size does not match the support")

    @property
    def n_qubits(self) -> int:
        return len(self.sites)

    @classmethod
    def from_pauli(cls, p: PauliString, sites, tag="", strength=None) -> "SymmetryOp":
        return cls((p,), sites, tag, 0.0, strength)

    def _embedded(self, site_map):
        pos = site_indices(site_map, self.sites)
        n = len(site_map)
        return [g.embed(n, pos) for g in self.gates]

    def apply(self, m: np.ndarray, site_map) -> np.ndarray:
        """U @ m for a vector or matrix over `site_map` (which must contain the support)."""
        out = np.asarray(m, dtype=complex)
        for g in reversed(self._embedded(site_map)):
            out = g.apply(out)
        return np.exp(1j * self.global_phase) * out

    def apply_right(self, m: np.ndarray, site_map) -> np.ndarray:
        """m @ U."""
        out = np.asarray(m, dtype=complex)
        for g in self._embedded(site_map):
            out = g.apply_right(out)
        return np.exp(1j * self.global_phase) * out

    def conjugate_matrix(self, m: np.ndarray, site_map) -> np.ndarray:
        """U m U^dagger."""
        return self.dagger().apply_right(self.apply(m, site_map), site_map)

    def dagger(self) -> "SymmetryOp":
        gates = []
        for g in reversed(self.gates):
            gates.append(g.dagger())
        return SymmetryOp(tuple(gates), self.sites, self.tag + "^dag", -self.global_phase, self.strength)

    def conj(self) -> "SymmetryOp":
        """Entrywise complex conjugate in the computational basis."""
        gates = tuple(pauli_conj(g) if isinstance(g, PauliString) else g.conj() for g in self.gates)
        return SymmetryOp(gates, self.sites, self.tag + "^*", -self.global_phase, self.strength)

    def relabel(self, sites) -> "SymmetryOp":
        """Same gates on a new set of site labels (one per qubit, same order)."""
        return SymmetryOp(self.gates, tuple(sites), self.tag, self.global_phase, self.strength)

    def dense(self, site_map=None) -> np.ndarray:
        site_map = self.sites if site_map is None else tuple(site_map)
        d = 1 << len(site_map)
        return self.apply(np.eye(d, dtype=complex), site_map)

    def compose(self, other: "SymmetryOp", tag="") -> "SymmetryOp":
        """self @ other (same support)."""
        if self.sites != other.sites:
            raise ValueError("compose needs identical supports")
        return SymmetryOp(
            self.gates + other.gates, self.sites, tag or f"{self.tag}*{other.tag}",
            self.global_phase + other.global_phase,
        )

    def conjugate_pauli(self, s: PauliString) -> dict:
        """U s U^dagger as {unsigned PauliString: complex coefficient}."""
        if s.n_qubits != self.n_qubits:
            raise ValueError("size mismatch")
        terms = {s.unsigned(): complex(s.phase)}
        for g in reversed(self.gates):
            new = {}
            for p, c in terms.items():
                if isinstance(g, PauliString):
                    sign = 1 if pauli_commutes(g, p) else -1
                    _acc(new, p, sign * c)
                elif pauli_commutes(g.pauli, p):
                    _acc(new, p, c)
                else:
                    # G p G^dag = p (cos t + i sin t P) when p anticommutes with P
                    _acc(new, p, c * np.cos(g.theta))
                    q = pauli_mul(p, g.pauli)
                    _acc(new, q.unsigned(), c * 1j * np.sin(g.theta) * q.phase)
            terms = {p: c for p, c in new.items() if abs(c) > 1e-14}
        return terms

    def render(self) -> str:
        lines = [f"# {self.tag} sites={list(self.sites)} global_phase={self.global_phase!r}"]
        lines += [_gate_str(g) for g in self.gates]
        return "\n".join(lines)


def _acc(d, key, val):
    d[key] = d.get(key, 0) + val


@dataclass(frozen=True)
class SymmetryVerdict:
    kind: str  # "strong", "weak" or "none"
    residual: float
    theta: float | None = None
    weak_residual: float = field(default=0.0)

    def __str__(self) -> str:
        if self.kind == "strong":
            return f"Strong(theta={self.theta:.6g}) residual={self.residual:.2e}"
        return f"{self.kind.capitalize()} residual={self.residual:.2e}"


def _left_right(rho: DensityMatrix, U):
    m = rho.matrix
    if isinstance(U, SymmetryOp):
        missing = set(U.sites) - set(rho.site_map)
        if missing:
            raise ValueError(f"symmetry support {sorted(map(str, missing))} outside the state")
        um = U.apply(m, rho.site_map)
        umu = U.dagger().apply_right(um, rho.site_map)
        return um, umu
    u = np.asarray(U, dtype=complex)
    if u.shape != m.shape:
        raise ValueError("dense symmetry has the wrong dimension")
    um = u @ m
    return um, um @ u.conj().T


def classify(rho, U, tol: float = TOL) -> SymmetryVerdict:
    """Strong(theta) if U rho = e^{i theta} rho, else Weak if U rho U^dag = rho, else None.

    theta is read off arg Tr(U rho); all norms are Frobenius.
    """
    rho = as_density(rho)
    um, umu = _left_right(rho, U)
    weak = float(np.linalg.norm(umu - rho.matrix))
    tr = np.trace(um)
    theta = float(np.angle(tr)) if abs(tr) > 1e-14 else 0.0
    strong = float(np.linalg.norm(um - np.exp(1j * theta) * rho.matrix))
    if strong < tol:
        return SymmetryVerdict("strong", strong, theta, weak)
    if weak < tol:
        return SymmetryVerdict("weak", weak, None, weak)
    return SymmetryVerdict("none", weak, None, weak)


# 1d chain operators; the chain layout is ('s', j) sites interleaved with ('t', j) links


def chain_sites(N: int, boundary: str = "periodic") -> tuple:
    if N < 2:
        raise ValueError("chain needs N >= 2")
    n_links = N if boundary == "periodic" else N - 1
    out = []
    for j in range(N):
        out.append(("s", j))
        if j < n_links:
            out.append(("t", j))
    return tuple(out)


def build_ug(N: int, boundary: str = "periodic") -> SymmetryOp:
    """prod_j sigma^x_j exp(i pi/4 (1 - tau^x_{j+1/2})).

    exp(i pi/4 (1 - tau^x)) is diag(1, i) in the tau^x eigenbasis, i.e. a
    PhaseGate on tau^x with theta = pi/2.
    """
    sites = chain_sites(N, boundary)
    n = len(sites)
    pos = {s: i for i, s in enumerate(sites)}
    flips = PauliString.from_ops(n, {pos[("s", j)]: "X" for j in range(N)})
    gates = [flips]
    for s in sites:
        if s[0] == "t":
            gates.append(PhaseGate(PauliString.single(n, pos[s], "X"), np.pi / 2))
    return SymmetryOp(tuple(gates), sites, "U_g", 0.0, "weak")


def build_uk(N: int, boundary: str = "periodic") -> SymmetryOp:
    """prod_j tau^x_{j+1/2}."""
    sites = chain_sites(N, boundary)
    ops = {i: "X" for i, s in enumerate(sites) if s[0] == "t"}
    return SymmetryOp((PauliString.from_ops(len(sites), ops),), sites, "U_k", 0.0, "strong")


def build_subsystem_parity(geometry, selector) -> SymmetryOp:
    """Involutive Pauli symmetry picked out of `geometry` by `selector`.

    `geometry` is any model object exposing subsystem_parity(selector) ->
    (PauliString, sites, tag), e.g. Sspt2dConfig with ("row", y) or a
    Majorana plaquette lattice with ("row", y), ("col", x) or "total".
    """
    p, sites, tag = geometry.subsystem_parity(selector)
    if p.weight == 0:
        raise ValueError(f"selector {selector!r} selects nothing")
    return SymmetryOp.from_pauli(p, sites, tag)
