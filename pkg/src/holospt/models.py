"""Concrete lattice models.

* the decorated-domain-wall spin chain and its disorder ensemble,
* the two-flavour coupled-chain stabilizer model on a 2d lattice,
* the eight-Majorana cube block, its upper-half reduced state and slabs of blocks,
* the Majorana plaquette lattice with its bilinear measurement channel,
* the four-Majorana corner and its symmetry-constraint solver.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from . import kernels
from .hilbert import (
    CapacityError,
    DensityMatrix,
    StateVector,
    partial_trace,
    ppt_negativity,
    tensor,
)
from .pauli import (
    JordanWignerMap,
    MajoranaMonomial,
    PauliString,
    jw_encode,
    pauli_commutes,
    pauli_mul,
)
from .symmetry import PhaseGate, SymmetryOp, chain_sites

# ---------------------------------------------------------------------------
# decorated-domain-wall chain


@dataclass(frozen=True)
class DisorderRealization:
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(int(v) for v in self.h))
        if any(v not in (-1, 1) for v in self.h):
            raise ValueError("disorder entries must be +1 or -1")


@dataclass(frozen=True)
class SpinChainConfig:
    """N sites; qubits interleave sigma_j ('s', j) with tau_{j+1/2} ('t', j)."""

    N: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.boundary not in ("periodic", "open"):
            raise ValueError("boundary must be periodic or open")

    @property
    def sites(self) -> tuple:
        return chain_sites(self.N, self.boundary)

    @property
    def n_links(self) -> int:
        return self.N if self.boundary == "periodic" else self.N - 1

    @property
    def flagged(self) -> bool:
        # on open chains prod tau^x = h_0 h_{N-1} varies across the ensemble
        return self.boundary == "open"

    def index(self, label) -> int:
        return self.sites.index(label)

    def link_ends(self, j: int) -> tuple[int, int]:
        return j, (j + 1) % self.N

    def projector_terms(self) -> list[PauliString]:
        """sigma^z_j tau^x_{j+1/2} sigma^z_{j+1} for every link."""
        n = len(self.sites)
        out = []
        for j in range(self.n_links):
            a, b = self.link_ends(j)
            out.append(PauliString.from_ops(
                n, {self.index(("s", a)): "Z", self.index(("t", j)): "X", self.index(("s", b)): "Z"}))
        return out

    def to_json(self) -> dict:
        return {"model": "mspt_chain", "N": self.N, "boundary": self.boundary}


_KET0 = np.array([1, 0], dtype=complex)
_KET1 = np.array([0, 1], dtype=complex)
_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def disorder_state(cfg: SpinChainConfig, d: DisorderRealization) -> StateVector:
    """|sigma^z_j = h_j> (x) |tau^x_{j+1/2} = h_j h_{j+1}> in the interleaved layout."""
    if len(d.h) != cfg.N:
        raise ValueError(f"need {cfg.N} disorder entries, got {len(d.h)}")
    amp = np.ones(1, dtype=complex)
    for s in cfg.sites:
        if s[0] == "s":
            f = _KET0 if d.h[s[1]] == 1 else _KET1
        else:
            a, b = cfg.link_ends(s[1])
            f = _PLUS if d.h[a] * d.h[b] == 1 else _MINUS
        amp = np.kron(amp, f)
    return StateVector(amp, cfg.sites)


def all_realizations(N: int):
    for h in itertools.product((1, -1), repeat=N):
        yield DisorderRealization(h)


def _chain_cap(cfg: SpinChainConfig):
    if cfg.N > 6:
        raise CapacityError("mspt chain density matrix is capped at N = 6")


def mspt_chain_rho(cfg: SpinChainConfig) -> DensityMatrix:
    """Equal-weight mixture of all 2^N disorder states."""
    _chain_cap(cfg)
    states = np.array([disorder_state(cfg, d).amplitudes for d in all_realizations(cfg.N)])
    rho = states.T @ states.conj() / len(states)
    return DensityMatrix(rho, cfg.sites, check=False)


def chain_projector_apply(cfg: SpinChainConfig, vec: np.ndarray) -> np.ndarray:
    """prod_j (1 + sigma^z tau^x sigma^z)/2 applied to a vector."""
    out = vec
    for p in cfg.projector_terms():
        out = 0.5 * (out + p.apply(out))
    return out


def chain_projector_dense(cfg: SpinChainConfig) -> np.ndarray:
    d = 1 << len(cfg.sites)
    return chain_projector_apply(cfg, np.eye(d, dtype=complex))


def mspt_chain_rho_dephased(cfg: SpinChainConfig) -> DensityMatrix:
    """Same ensemble built another way: project |+..+>_sigma |0..0>_tau onto P = 1,
    then dephase in the sigma^z basis."""
    _chain_cap(cfg)
    amp = np.ones(1, dtype=complex)
    for s in cfg.sites:
        amp = np.kron(amp, _PLUS if s[0] == "s" else _KET0)
    phi = chain_projector_apply(cfg, amp)
    n = len(cfg.sites)
    idx = np.arange(1 << n)
    sig_pos = [cfg.index(("s", j)) for j in range(cfg.N)]
    sig_bits = np.zeros(1 << n, dtype=np.int64)
    for j, p in enumerate(sig_pos):
        sig_bits |= ((idx >> (n - 1 - p)) & 1) << j
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    for h in range(1 << cfg.N):
        v = np.where(sig_bits == h, phi, 0)
        rho += np.outer(v, v.conj())
    return DensityMatrix(rho / np.trace(rho).real, cfg.sites, check=False)


def levin_gu_ug(cfg: SpinChainConfig) -> SymmetryOp:
    """(prod sigma^x) prod_j exp(i pi/4 (1 - sigma^z_j sigma^z_{j+1})) on the same qubits."""
    n = len(cfg.sites)
    flips = PauliString.from_ops(n, {cfg.index(("s", j)): "X" for j in range(cfg.N)})
    gates = [flips]
    for j in range(cfg.n_links):
        a, b = cfg.link_ends(j)
        zz = PauliString.from_ops(n, {cfg.index(("s", a)): "Z", cfg.index(("s", b)): "Z"})
        gates.append(PhaseGate(zz, np.pi / 2))
    return SymmetryOp(tuple(gates), cfg.sites, "U_LG")


# ---------------------------------------------------------------------------
# 2d coupled-chain stabilizer model

_FLAVOURS = ("sL", "tL", "sR", "tR")


@dataclass(frozen=True)
class Sspt2dConfig:
    """Lx x Ly rows of L/R flavoured sigma/tau chains.

    open_x / open_y cut the lattice at x = 0 and y = 0 (and hence at the far
    edges). On open_x the rung J(0, y) is switched off; on open_y the R chain
    of row 0 carries transverse fields tau^x_R, sigma^x_R instead of its
    cluster terms. edge_singlets optionally couples the dangling x = 0 pair.
    """

    Lx: int
    Ly: int
    open_x: bool = False
    open_y: bool = False
    J: int = 1
    edge_singlets: bool = False

    def __post_init__(self):
        if self.Lx < 2 or self.Ly < 2:
            raise ValueError("Lx, Ly must be >= 2")
        if self.J not in (1, -1):
            raise ValueError("J is a coupling sign, +1 or -1")

    @cached_property
    def sites(self) -> tuple:
        return tuple((f, x, y) for y in range(self.Ly) for x in range(self.Lx) for f in _FLAVOURS)

    @property
    def n_qubits(self) -> int:
        return 4 * self.Lx * self.Ly

    @cached_property
    def _index(self) -> dict:
        return {s: i for i, s in enumerate(self.sites)}

    def q(self, flavour: str, x: int, y: int) -> int:
        return self._index[(flavour, x % self.Lx, y % self.Ly)]

    def op(self, *terms, sign: int = 1) -> PauliString:
        """terms: (letter, flavour, x, y); letters on the same qubit multiply."""
        out = PauliString.identity(self.n_qubits)
        for letter, f, x, y in terms:
            out = pauli_mul(out, PauliString.single(self.n_qubits, self.q(f, x, y), letter))
        return out.times_phase(sign)

    def stabilizers(self) -> list[tuple[str, PauliString]]:
        Lx, Ly = self.Lx, self.Ly
        xs_bond = range(Lx - 1) if self.open_x else range(Lx)
        ys_link = range(Ly - 1) if self.open_y else range(Ly)
        out = []
        for y in range(Ly):
            for x in xs_bond:
                for a in ("L", "R"):
                    if a == "R" and self.open_y and y == 0:
                        continue
                    out.append((f"A{a}({x},{y})", self.op(
                        ("Z", "s" + a, x, y), ("X", "t" + a, x, y), ("Z", "s" + a, x + 1, y))))
        for y in ys_link:
            for x in range(Lx):
                if self.open_x and x == 0:
                    continue
                out.append((f"J({x},{y})", self.op(("Z", "sL", x, y), ("Z", "sR", x, y + 1), sign=self.J)))
        for y in ys_link:
            for x in xs_bond:
                out.append((f"B({x},{y})", self.op(
                    ("Z", "tL", x, y), ("X", "sL", x + 1, y), ("Z", "tL", x + 1, y),
                    ("Z", "tR", x, y + 1), ("X", "sR", x + 1, y + 1), ("Z", "tR", x + 1, y + 1))))
        if self.open_y:
            for x in range(Lx):
                out.append((f"edge_tR({x},0)", self.op(("X", "tR", x, 0))))
                out.append((f"edge_sR({x},0)", self.op(("X", "sR", x, 0))))
        if self.edge_singlets and self.open_x:
            y0 = 1 if self.open_y else 0
            for y in range(y0, Ly):
                for letter in ("X", "Z"):
                    out.append((f"singlet_{letter}({y})", self.op(
                        (letter, "sL", 0, y), (letter, "sR", 0, y))))
        return out

    def stabilizer_list(self) -> list[PauliString]:
        return [p for _, p in self.stabilizers()]

    def subsystem_parity(self, selector):
        """("row", y) -> U_s(y) = prod_x tau^x_R(x, y) tau^x_L(x, y)."""
        kind, y = selector
        if kind != "row" or not 0 <= y < self.Ly:
            raise ValueError(f"bad selector {selector!r}")
        p = self.op(*[("X", f, x, y) for x in range(self.Lx) for f in ("tL", "tR")])
        return p, self.sites, f"U_s({y})"

    def us(self, y: int) -> SymmetryOp:
        p, sites, tag = self.subsystem_parity(("row", y))
        return SymmetryOp.from_pauli(p, sites, tag, "subsystem")

    def ug(self) -> SymmetryOp:
        """prod sigma^x_L sigma^x_R exp(i pi/4 sum (tau^x_L - tau^x_R)).

        exp(+i pi/4 tau^x) = e^{i pi/4} PhaseGate(tau^x, -pi/2) and the R factor
        carries the opposite phase, so the scalar prefactors cancel pairwise.
        """
        n = self.n_qubits
        flips = self.op(*[("X", f, x, y) for y in range(self.Ly) for x in range(self.Lx) for f in ("sL", "sR")])
        gates = [flips]
        for y in range(self.Ly):
            for x in range(self.Lx):
                gates.append(PhaseGate(PauliString.single(n, self.q("tL", x, y), "X"), -np.pi / 2))
                gates.append(PhaseGate(PauliString.single(n, self.q("tR", x, y), "X"), np.pi / 2))
        return SymmetryOp(tuple(gates), self.sites, "U_g", 0.0, "global")

    def logical_count(self) -> int:
        stabs = self.stabilizer_list()
        return self.n_qubits - symplectic_rank(stabs)

    def to_json(self) -> dict:
        return {"model": "sspt2d", "Lx": self.Lx, "Ly": self.Ly, "open_x": self.open_x,
                "open_y": self.open_y, "J": self.J, "edge_singlets": self.edge_singlets}


def sspt2d_stabilizers(cfg: Sspt2dConfig) -> list[PauliString]:
    return cfg.stabilizer_list()


def symplectic_vector(p: PauliString) -> int:
    """x bits in the low half, z bits in the high half."""
    return p.x_bits | (p.z_bits << p.n_qubits)


def symplectic_rank(strings) -> int:
    strings = list(strings)
    if not strings:
        return 0
    n = strings[0].n_qubits
    return kernels.gf2_rank([symplectic_vector(s) for s in strings], 2 * n)


def in_stabilizer_group(p: PauliString, stabs) -> bool:
    """True iff p (with its phase) is a product of the given commuting stabilizers."""
    stabs = list(stabs)
    n = p.n_qubits
    sel = kernels.gf2_solve([symplectic_vector(s) for s in stabs], symplectic_vector(p), 2 * n)
    if sel is None:
        return False
    prod = PauliString.identity(n)
    for i in sel:
        prod = pauli_mul(prod, stabs[i])
    return prod == p


def preserves_stabilizer_group(U: SymmetryOp, stabs) -> tuple[bool, list[str]]:
    """Check U S U^dag is a signed element of the group for each generator S.

    Returns (ok, list of failing descriptions).
    """
    stabs = list(stabs)
    bad = []
    for i, s in enumerate(stabs):
        terms = U.conjugate_pauli(s)
        if len(terms) != 1:
            bad.append(f"#{i}: maps to a sum of {len(terms)} strings")
            continue
        (p, c), = terms.items()
        if abs(abs(c) - 1) > 1e-12:
            bad.append(f"#{i}: coefficient {c}")
            continue
        image = p.times_phase(complex(np.round(c.real) + 1j * np.round(c.imag)))
        if not in_stabilizer_group(image, stabs):
            bad.append(f"#{i}: image {image} outside the group")
    return not bad, bad


def code_projector_apply(stabs, vec: np.ndarray) -> np.ndarray:
    out = vec
    for s in stabs:
        out = 0.5 * (out + s.apply(out))
    return out


def corner_operators(cfg: Sspt2dConfig) -> tuple[PauliString, PauliString, PauliString]:
    """(Z~_L, X~_L, Y~_L) at x = y = 0."""
    if not (cfg.open_x and cfg.open_y):
        raise ValueError("corner operators need open boundaries at x = 0 and y = 0")
    z = cfg.op(("Z", "sL", 0, 0))
    x = cfg.op(("X", "sL", 0, 0), ("Z", "tL", 0, 0))
    y = cfg.op(("Y", "sL", 0, 0), ("Z", "tL", 0, 0))
    return z, x, y


def edge_operators(cfg: Sspt2dConfig, y: int, flavour: str = "L"):
    """(Z~, X~, Y~) of row y at the x = 0 edge."""
    if not cfg.open_x:
        raise ValueError("edge operators need an open boundary at x = 0")
    s, t = "s" + flavour, "t" + flavour
    return (cfg.op(("Z", s, 0, y)), cfg.op(("X", s, 0, y), ("Z", t, 0, y)),
            cfg.op(("Y", s, 0, y), ("Z", t, 0, y)))


def symmetry_phase(U: SymmetryOp, p: PauliString):
    """c with U p U^dag = c p, or None if U does not map p to a multiple of itself."""
    terms = U.conjugate_pauli(p)
    if len(terms) != 1:
        return None
    (q, c), = terms.items()
    if q != p.unsigned():
        return None
    return c / p.phase


# ---------------------------------------------------------------------------
# eight-Majorana cube block

# offsets of each eta relative to the block origin r
BLOCK_OFFSETS = {
    1: (0, 0, 0), 4: (-1, 0, 0), 2: (0, -1, 0), 3: (-1, -1, 0),
    5: (0, 0, 1), 8: (-1, 0, 1), 6: (0, -1, 1), 7: (-1, -1, 1),
}
UPPER = (5, 6, 7, 8)
LOWER = (1, 2, 3, 4)
BLOCK_SITES = (("Psi", "up"), ("Psi", "dn"), ("Psi'", "up"), ("Psi'", "dn"))

# quartet and XY terms as (coefficient, modes)
H1_TERMS = ((1, (5, 6, 7, 8)), (1, (1, 2, 3, 4)))
H2_TERMS = (
    (1, (5, 6, 1, 2)), (-1, (5, 6, 3, 4)), (-1, (7, 8, 1, 2)), (1, (7, 8, 3, 4)),
    (1, (5, 8, 1, 4)), (-1, (5, 8, 2, 3)), (-1, (6, 7, 1, 4)), (1, (6, 7, 2, 3)),
)


@dataclass(frozen=True)
class HotscBlock:
    """One cube: modes eta_1..eta_8 at the corners given by BLOCK_OFFSETS.

    The Jordan-Wigner order puts the upper half (eta_5..eta_8) first so the
    lower half is a contiguous tail. Qubit 0 holds Psi_up = (eta_5 + i eta_6),
    qubit 1 Psi_dn, qubits 2, 3 the primed doublet.
    """

    origin: tuple = (0, 0, 0)
    jw: JordanWignerMap = field(default_factory=lambda: JordanWignerMap((5, 6, 7, 8, 1, 2, 3, 4)))
    relabel: dict | None = None

    def __post_init__(self):
        if set(self.jw.mode_order) != set(range(1, 9)):
            raise ValueError("block needs modes 1..8")
        if self.jw.mode_order[:4] != UPPER and self.relabel is None:
            raise ValueError("upper-half modes must come first in the ordering")

    def mode_site(self, k: int) -> tuple:
        o = BLOCK_OFFSETS[k]
        return tuple(a + b for a, b in zip(self.origin, o))

    def _mode(self, k):
        return self.relabel.get(k, k) if self.relabel else k

    def encode(self, coef, modes) -> PauliString:
        return jw_encode(MajoranaMonomial(tuple(self._mode(k) for k in modes), coef), self.jw)

    def hamiltonian_terms(self, form: str = "majorana"):
        if form == "majorana":
            terms = H1_TERMS + H2_TERMS
            return [self.encode(c, m) for c, m in terms]
        raise ValueError(f"unknown form {form!r}")

    def hamiltonian(self, form: str = "majorana") -> np.ndarray:
        if form == "majorana":
            return sum(p.to_dense() for p in self.hamiltonian_terms())
        if form == "number":
            n = [a.conj().T @ a for a in self.annihilators()]
            one = np.eye(16)
            h1 = (n[0] + n[1] - one) @ (n[0] + n[1] - one) + (n[2] + n[3] - one) @ (n[2] + n[3] - one)
            h2 = sum(self.encode(c, m).to_dense() for c, m in H2_TERMS)
            return h1 + h2
        raise ValueError(f"unknown form {form!r}")

    def annihilators(self) -> list[np.ndarray]:
        """(eta_a + i eta_b)/2 for the pairs (5,6), (7,8), (1,2), (3,4)."""
        out = []
        for a, b in ((5, 6), (7, 8), (1, 2), (3, 4)):
            ga = self.encode(1, (a,)).to_dense()
            gb = self.encode(1, (b,)).to_dense()
            out.append((ga + 1j * gb) / 2)
        return out

    def spins(self):
        """(n_vec, m_vec): Psi^dag sigma Psi and the primed analogue, each a list of 3 matrices."""
        c = self.annihilators()
        pauli = (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]]))

        def vec(up, dn):
            cs = (up, dn)
            return [sum(s[a, b] * cs[a].conj().T @ cs[b] for a in range(2) for b in range(2)) for s in pauli]

        return vec(c[0], c[1]), vec(c[2], c[3])

    def number_ops(self):
        c = self.annihilators()
        n = [a.conj().T @ a for a in c]
        return n[0] + n[1], n[2] + n[3]


@dataclass(frozen=True)
class BlockGround:
    state: StateVector
    energy: float
    gap: float
    spectrum: tuple


def hotsc_block_ground(block: HotscBlock | None = None, form: str = "majorana") -> BlockGround:
    """Unique ground state of H_1 + H_2 on the block's four qubits."""
    block = block or HotscBlock()
    h = block.hamiltonian(form)
    if np.abs(h - h.conj().T).max() > 1e-12:
        raise ValueError("block Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(h)
    if w[1] - w[0] < 1e-10:
        raise RuntimeError("degenerate block ground space; construction error")
    psi = v[:, 0]
    # fix the global phase on the largest component
    k = int(np.argmax(np.abs(psi)))
    psi = psi * np.exp(-1j * np.angle(psi[k]))
    return BlockGround(StateVector(psi, BLOCK_SITES), float(w[0]), float(w[1] - w[0]), tuple(np.round(w, 12)))


def upper_half_state(block: HotscBlock | None = None) -> DensityMatrix:
    """rho_p: reduced state of the upper-half modes (qubits Psi_up, Psi_dn)."""
    g = hotsc_block_ground(block)
    return partial_trace(g.state, BLOCK_SITES[:2])


@dataclass(frozen=True)
class HotscSlab:
    """nx x ny x nz blocks. The ground state is the tensor product of block
    ground states; only the top layer's upper halves survive the cut."""

    nx: int = 2
    ny: int = 2
    nz: int = 2

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1 or self.nx * self.ny * self.nz > 8:
            raise CapacityError("slabs are limited to 2x2x2 blocks")

    def blocks(self):
        return [(x, y, z) for z in range(self.nz) for y in range(self.ny) for x in range(self.nx)]

    def block_states(self) -> list[StateVector]:
        g = hotsc_block_ground()
        return [StateVector(g.state.amplitudes, tuple((b, s) for s in BLOCK_SITES)) for b in self.blocks()]

    def top_sites(self) -> list:
        top = self.nz - 1
        return [(b, s) for b in self.blocks() if b[2] == top for s in BLOCK_SITES[:2]]

    def top_reduced(self) -> DensityMatrix:
        """Per-block partial traces tensored together."""
        rho_p = upper_half_state()
        out = None
        top = self.nz - 1
        for b in self.blocks():
            if b[2] != top:
                continue
            r = rho_p.with_sites(tuple((b, s) for s in BLOCK_SITES[:2]))
            out = r if out is None else tensor(out, r)
        return out

    def to_json(self) -> dict:
        return {"model": "hotsc_slab", "nx": self.nx, "ny": self.ny, "nz": self.nz}


# ---------------------------------------------------------------------------
# Majorana plaquette lattice and the bilinear measurement channel


@dataclass(frozen=True)
class PlaquetteLattice:
    """px x py plaquettes; plaquette (a, b) couples eta_1(s), eta_2(s+x),
    eta_3(s+x+y), eta_4(s+y) with s = (a, b).

    Only modes that belong to a plaquette are kept (two qubits per plaquette).
    Within a plaquette the Jordan-Wigner order is (eta_3, eta_2, eta_1, eta_4),
    which is the order (eta_5, eta_6, eta_7, eta_8) of the cube block whose
    upper half lands on that plaquette, so reduced block states compare directly.
    """

    px: int = 1
    py: int = 1

    def __post_init__(self):
        if self.px < 1 or self.py < 1 or self.px * self.py > 6:
            raise CapacityError("plaquette lattice limited to 6 plaquettes")

    @cached_property
    def plaquettes(self) -> tuple:
        return tuple((a, b) for b in range(self.py) for a in range(self.px))

    @staticmethod
    def modes_of(p) -> dict:
        a, b = p
        return {1: ("eta", 1, (a, b)), 2: ("eta", 2, (a + 1, b)),
                3: ("eta", 3, (a + 1, b + 1)), 4: ("eta", 4, (a, b + 1))}

    @cached_property
    def jw(self) -> JordanWignerMap:
        order = []
        for p in self.plaquettes:
            m = self.modes_of(p)
            order += [m[3], m[2], m[1], m[4]]
        return JordanWignerMap(tuple(order))

    @cached_property
    def sites(self) -> tuple:
        return tuple((p, q) for p in self.plaquettes for q in (0, 1))

    def encode(self, modes, coef=1) -> PauliString:
        return jw_encode(MajoranaMonomial(tuple(modes), coef), self.jw)

    def quartet(self, p) -> PauliString:
        m = self.modes_of(p)
        return self.encode((m[1], m[2], m[3], m[4]))

    def bilinears(self, p) -> tuple[PauliString, PauliString]:
        """eta_1 eta_2 and eta_1 eta_4 of plaquette p (the channel's Kraus factors)."""
        m = self.modes_of(p)
        return self.encode((m[1], m[2])), self.encode((m[1], m[4]))

    def ground_projector(self) -> np.ndarray:
        d = 1 << len(self.sites)
        out = np.eye(d, dtype=complex)
        for p in self.plaquettes:
            q = self.quartet(p)
            out = 0.5 * (out - q.apply(out))
        return out

    def ground_state_mixture(self) -> DensityMatrix:
        pr = self.ground_projector()
        return DensityMatrix(pr / np.trace(pr).real, self.sites, check=False)

    def random_ground_state(self, rng) -> DensityMatrix:
        pr = self.ground_projector()
        d = pr.shape[0]
        v = pr @ (rng.normal(size=d) + 1j * rng.normal(size=d))
        v /= np.linalg.norm(v)
        return DensityMatrix(np.outer(v, v.conj()), self.sites, check=False)

    def _pair_parity(self, m1, m2) -> PauliString:
        return self.encode((m1, m2), 1j)

    def subsystem_parity(self, selector):
        """"total", ("row", y) over vertex row y, or ("col", x) over vertex column x."""
        n = len(self.sites)
        if selector == "total":
            p = PauliString.from_ops(n, {i: "Z" for i in range(n)})
            return p, self.sites, "P_f"
        kind, c = selector
        out = PauliString.identity(n)
        found = False
        for p in self.plaquettes:
            m = self.modes_of(p)
            picked = [m[k] for k in (1, 2, 3, 4) if m[k][2][1 if kind == "row" else 0] == c]
            if kind not in ("row", "col"):
                raise ValueError(f"bad selector {selector!r}")
            if picked:
                found = True
                out = pauli_mul(out, self._pair_parity(*picked))
        if not found:
            raise ValueError(f"selector {selector!r} selects nothing")
        return out, self.sites, f"P_f^{kind}({c})"

    def to_json(self) -> dict:
        return {"model": "plaquette_lattice", "px": self.px, "py": self.py}


def measurement_channel(rho: DensityMatrix, lattice: PlaquetteLattice) -> DensityMatrix:
    """prod_p E^x_p E^y_p with E[rho] = rho/2 + K rho K^dag / 2 for the two bilinears."""
    if tuple(rho.site_map) != lattice.sites:
        raise ValueError("density matrix does not live on the lattice's plaquette modes")
    m = rho.matrix
    for p in lattice.plaquettes:
        for k in lattice.bilinears(p):
            m = 0.5 * m + 0.5 * k.dagger().apply_right(k.apply(m))
    return DensityMatrix(m, rho.site_map, check=False)


# ---------------------------------------------------------------------------
# four-Majorana corner

# gamma_4, gamma_1 on qubit 0 and gamma_3, gamma_2 on qubit 1: qubit 0's
# annihilator is i c_14 and qubit 1's is i c_23, so occupations agree with
# |n14 n23>; the ket phases are fixed numerically in corner_fock_basis.
CORNER_JW = JordanWignerMap((4, 1, 3, 2))
CORNER_SITES = ("c14", "c23")


def corner_operator(name: str) -> np.ndarray:
    """Dense 4x4 realization of P_f, P_f^x, P_f'^x, P_f^y, P_f'^y, I or 'ig<a>g<b>'."""
    table = {
        "I": None,
        "P_f": (-1, (1, 2, 3, 4)),
        "P_f^x": (1j, (1, 2)),
        "P_f'^x": (1j, (3, 4)),
        "P_f^y": (1j, (1, 4)),
        "P_f'^y": (1j, (2, 3)),
    }
    if name == "I":
        return np.eye(4, dtype=complex)
    if name in table:
        coef, modes = table[name]
    elif name.startswith("ig") and len(name) == 5 and name[3] == "g":
        coef, modes = 1j, (int(name[2]), int(name[4]))
    else:
        raise ValueError(f"unknown corner operator {name!r}")
    return jw_encode(MajoranaMonomial(modes, coef), CORNER_JW).to_dense()


def corner_fock_basis() -> np.ndarray:
    """Columns are |n14 n23> = (c14^dag)^n14 (c23^dag)^n23 |vac> in qubit coordinates."""
    g = {k: corner_operator_gamma(k) for k in (1, 2, 3, 4)}
    c14d = (g[1] + 1j * g[4]) / 2
    c23d = (g[2] + 1j * g[3]) / 2
    c14, c23 = c14d.conj().T, c23d.conj().T
    kernel = null_space(np.vstack([c14, c23]))
    vac = kernel[:, 0]
    vac = vac * np.exp(-1j * np.angle(vac[np.argmax(np.abs(vac))]))
    cols = [vac, c23d @ vac, c14d @ vac, c14d @ c23d @ vac]
    return np.array(cols).T


def corner_operator_gamma(k: int) -> np.ndarray:
    return jw_encode(MajoranaMonomial((k,), 1), CORNER_JW).to_dense()


@dataclass(frozen=True)
class CornerConstraint:
    left: str
    right: str
    sign: int = 1
    uses_theta: bool = False

    def describe(self) -> str:
        rhs = ("" if self.sign == 1 else "-") + ("e^{i theta} " if self.uses_theta else "") + "rho"
        return f"{self.left} rho {self.right} = {rhs}"


SYM1_AS_WRITTEN = (
    CornerConstraint("P_f", "I", 1, True),
    CornerConstraint("P_f^x", "P_f^x"),
    CornerConstraint("P_f'^x", "P_f'^x"),
    CornerConstraint("P_f^y", "P_f^x"),
    CornerConstraint("P_f'^x", "P_f'^y"),
)
SYM1_CONJUGATION = (
    CornerConstraint("P_f", "I", 1, True),
    CornerConstraint("P_f^x", "P_f^x"),
    CornerConstraint("P_f'^x", "P_f'^x"),
    CornerConstraint("P_f^y", "P_f^y"),
    CornerConstraint("P_f'^y", "P_f'^y"),
)
SYM2 = (
    CornerConstraint("ig1g2", "ig3g4", 1, True),
    CornerConstraint("ig1g3", "ig2g4", -1, True),
    CornerConstraint("ig1g4", "ig2g3", 1, True),
)
CORNER_PRESETS = {
    "as_written": SYM1_AS_WRITTEN + SYM2,
    "conjugation": SYM1_CONJUGATION + SYM2,
    "x_only": SYM1_CONJUGATION[:3] + SYM2,
}


@dataclass(frozen=True)
class CornerConstraintSet:
    """Constraints L rho R = sign e^{i theta uses_theta} rho within one parity sector."""

    constraints: tuple
    sector: str = "even"
    theta: float | None = None

    def __post_init__(self):
        if self.sector not in ("even", "odd"):
            raise ValueError("sector must be even or odd")
        if self.theta is None:
            object.__setattr__(self, "theta", 0.0 if self.sector == "even" else float(np.pi))

    @classmethod
    def preset(cls, name: str, sector: str = "even", theta=None) -> "CornerConstraintSet":
        return cls(CORNER_PRESETS[name], sector, theta)

    def residuals(self, rho: np.ndarray) -> list[float]:
        out = []
        for c in self.constraints:
            lhs = corner_operator(c.left) @ rho @ corner_operator(c.right)
            rhs = c.sign * (np.exp(1j * self.theta) if c.uses_theta else 1) * rho
            out.append(float(np.abs(lhs - rhs).max()))
        return out

    def holds(self, rho: np.ndarray, tol: float = 1e-12) -> bool:
        return max(self.residuals(rho)) <= tol


def corner_sector_basis(sector: str) -> np.ndarray:
    """4x2 isometry onto the P_f = +1 (even) or -1 (odd) subspace."""
    pf = corner_operator("P_f")
    w, v = np.linalg.eigh(pf)
    target = 1 if sector == "even" else -1
    cols = v[:, np.abs(w - target) < 1e-9]
    # align to the computational basis for reproducibility
    basis = np.zeros((4, 2), dtype=complex)
    picks = [i for i in range(4) if np.linalg.norm(cols.conj().T[:, i]) > 0.5]
    for j, i in enumerate(picks[:2]):
        e = np.zeros(4)
        e[i] = 1
        basis[:, j] = cols @ (cols.conj().T @ e)
        basis[:, j] /= np.linalg.norm(basis[:, j])
    return basis


_HERM2 = (
    np.array([[1, 0], [0, 0]], dtype=complex),
    np.array([[0, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
)


@dataclass
class CornerFamily:
    """Affine family rho(t) = particular + sum_k t_k directions[k] (4x4, qubit basis).

    `feasible` is False when no trace-one PSD matrix satisfies the constraints.
    """

    constraints: CornerConstraintSet
    solution_space: list  # Hermitian 4x4 matrices spanning all solutions
    particular: np.ndarray | None
    directions: list
    feasible: bool
    witness: np.ndarray | None = None

    @property
    def dimension(self) -> int:
        return len(self.directions) if self.particular is not None else -1

    def member(self, t=()) -> np.ndarray:
        if self.particular is None:
            raise ValueError("empty family")
        out = self.particular.copy()
        for tk, d in zip(t, self.directions):
            out = out + tk * d
        return out

    def is_psd(self, t=(), tol: float = 1e-12) -> bool:
        return np.linalg.eigvalsh(self.member(t)).min() >= -tol

    def sample(self, rng, count: int = 20) -> list[np.ndarray]:
        """PSD members: the witness plus random points in the PSD region."""
        if not self.feasible:
            return []
        out = [self.witness]
        if not self.directions:
            return out
        tries = 0
        while len(out) < count and tries < 100 * count:
            tries += 1
            t = rng.uniform(-1, 1, size=len(self.directions))
            if self.is_psd(t):
                out.append(self.member(t))
        return out


def corner_constraint_solver(cs: CornerConstraintSet) -> CornerFamily:
    """All Hermitian rho supported on the chosen parity sector satisfying every constraint."""
    V = corner_sector_basis(cs.sector)
    ops = [(corner_operator(c.left), corner_operator(c.right),
            c.sign * (np.exp(1j * cs.theta) if c.uses_theta else 1)) for c in cs.constraints]
    cols = []
    for h in _HERM2:
        rho = V @ h @ V.conj().T
        res = [lo @ rho @ ro - f * rho for lo, ro, f in ops]
        flat = np.concatenate([r.ravel() for r in res]) if res else np.zeros(0)
        cols.append(np.concatenate([flat.real, flat.imag]))
    A = np.array(cols).T
    if A.size:
        ker = null_space(A, rcond=1e-10)
    else:
        ker = np.eye(4)
    space = [V @ sum(k[i] * _HERM2[i] for i in range(4)) @ V.conj().T for k in ker.T]
    traces = np.array([np.trace(s).real for s in space])
    if len(space) == 0 or np.abs(traces).max() < 1e-12:
        return CornerFamily(cs, space, None, [], False)
    j = int(np.argmax(np.abs(traces)))
    particular = space[j] / traces[j]
    directions = []
    for i, s in enumerate(space):
        if i == j:
            continue
        d = s - traces[i] * particular
        directions.append(d / np.abs(d).max())
    directions = _orthonormal_hermitian(directions)
    fam = CornerFamily(cs, space, particular, directions, False)
    witness = _find_psd(fam)
    if witness is not None:
        fam.feasible = True
        fam.witness = witness
    return fam


def _orthonormal_hermitian(mats) -> list:
    out = []
    for m in mats:
        for o in out:
            m = m - np.vdot(o, m).real * o
        nrm = np.linalg.norm(m)
        if nrm > 1e-10:
            out.append(m / nrm)
    return out


def _find_psd(fam: CornerFamily):
    if not fam.directions:
        return fam.particular if fam.is_psd() else None

    def neg_min_eig(t):
        return -np.linalg.eigvalsh(fam.member(t)).min()

    best = minimize(neg_min_eig, np.zeros(len(fam.directions)), method="Nelder-Mead",
                    options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return fam.member(best.x) if -best.fun >= -1e-12 else None


def corner_negativity(rho: np.ndarray) -> float:
    return ppt_negativity(DensityMatrix(rho, CORNER_SITES, check=False), ["c14"])


def bell_sum_states(sector: str) -> list[np.ndarray]:
    """The two Bell-type projectors named for each sector, written in the
    |n14 n23> Fock basis and converted to qubit coordinates."""
    F = corner_fock_basis()
    if sector == "even":
        a, b = F[:, 0], F[:, 3]
    else:
        a, b = F[:, 1], F[:, 2]
    out = []
    for s in (1j, -1j):
        v = (a + s * b) / np.sqrt(2)
        out.append(np.outer(v, v.conj()))
    return out


def corner_report(preset: str = "conjugation", sector: str = "even", rng=None) -> dict:
    """Solve one constraint preset and compare with the two-Bell-state family."""
    rng = rng or np.random.default_rng(0)
    cs = CornerConstraintSet.preset(preset, sector)
    fam = corner_constraint_solver(cs)
    bells = bell_sum_states(sector)
    F = corner_fock_basis()
    idx = (0, 3) if sector == "even" else (1, 2)
    diag = 0.5 * (np.outer(F[:, idx[0]], F[:, idx[0]].conj()) + np.outer(F[:, idx[1]], F[:, idx[1]].conj()))
    members = fam.sample(rng, 12)
    negs = [corner_negativity(m) for m in members]
    return {
        "preset": preset,
        "sector": sector,
        "theta": cs.theta,
        "constraints": [c.describe() for c in cs.constraints],
        "feasible": fam.feasible,
        "family_dimension": fam.dimension if fam.feasible else None,
        "solution_space_dimension": len(fam.solution_space),
        "negativity_min": min(negs) if negs else None,
        "negativity_max": max(negs) if negs else None,
        "diagonal_mixture_satisfies": cs.holds(diag, 1e-12),
        "diagonal_mixture_residuals": cs.residuals(diag),
        "bell_states_satisfy": [cs.holds(b, 1e-12) for b in bells],
        "bell_residuals": [max(cs.residuals(b)) for b in bells],
        "witness_fock_basis": None if not fam.feasible else
        np.round(F.conj().T @ fam.witness @ F, 12).tolist(),
    }
