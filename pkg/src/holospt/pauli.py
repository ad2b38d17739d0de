"""Multi-qubit Pauli strings, Majorana monomials and the Jordan-Wigner encoding.

A PauliString is i^k * sigma(x_0, z_0) (x) ... (x) sigma(x_{n-1}, z_{n-1}) with
sigma(1, 0) = X, sigma(0, 1) = Z and sigma(1, 1) = Y. Qubit j is bit j of the
masks and qubit 0 is the leftmost Kronecker factor, i.e. the most significant
bit of a computational-basis index.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PHASE_VALUE = (1, 1j, -1, -1j)
_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


def phase_exponent(value) -> int:
    """Map one of {1, i, -1, -i} to its exponent k."""
    for k, v in enumerate(_PHASE_VALUE):
        if abs(complex(value) - v) < 1e-12:
            return k
    raise ValueError(f"phase {value!r} is not a fourth root of unity")


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _reverse_bits(mask: int, n: int) -> int:
    out = 0
    for j in range(n):
        if (mask >> j) & 1:
            out |= 1 << (n - 1 - j)
    return out


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x_bits: int = 0
    z_bits: int = 0
    k: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        full = (1 << self.n_qubits) - 1
        if self.x_bits & ~full or self.z_bits & ~full:
            raise ValueError("bit pattern exceeds n_qubits")
        object.__setattr__(self, "k", self.k % 4)

    # construction
    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_ops(cls, n: int, ops: dict, phase=1) -> "PauliString":
        """Build from {qubit: "X"|"Y"|"Z"}."""
        x = z = 0
        for q, letter in ops.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for {n} qubits")
            bx, bz = _BITS[letter.upper()]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, phase_exponent(phase))

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> "PauliString":
        return cls.from_ops(n, {q: letter})

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse the "+iXZI" form (a bare label such as "XZ" means phase +1)."""
        m = re.match(r"^([+-]?)(i?)(.*)$", text.strip())
        sign, imag, body = m.groups()
        k = (2 if sign == "-" else 0) + (1 if imag else 0)
        x = z = 0
        for q, letter in enumerate(body):
            if letter not in _BITS:
                raise ValueError(f"bad Pauli letter {letter!r}")
            bx, bz = _BITS[letter]
            x |= bx << q
            z |= bz << q
        return cls(len(body), x, z, k)

    # properties
    @property
    def phase(self) -> complex:
        return _PHASE_VALUE[self.k]

    @property
    def support(self) -> tuple[int, ...]:
        m = self.x_bits | self.z_bits
        return tuple(j for j in range(self.n_qubits) if (m >> j) & 1)

    @property
    def weight(self) -> int:
        return _popcount(self.x_bits | self.z_bits)

    def letters(self) -> str:
        return "".join(
            _LETTER[((self.x_bits >> j) & 1, (self.z_bits >> j) & 1)] for j in range(self.n_qubits)
        )

    def __str__(self) -> str:
        return _PHASE_TEXT[self.k] + self.letters()

    def is_hermitian(self) -> bool:
        # X, Y, Z are Hermitian, so only the scalar matters
        return self.k in (0, 2)

    # algebra
    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, self.k + 2)

    def times_phase(self, phase) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, self.k + phase_exponent(phase))

    def dagger(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, -self.k)

    def unsigned(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x_bits, self.z_bits, 0)

    def commutes(self, other: "PauliString") -> bool:
        return pauli_commutes(self, other)

    def embed(self, n_total: int, positions) -> "PauliString":
        """Place qubit j of self at qubit positions[j] of an n_total-qubit string."""
        positions = list(positions)
        if len(positions) != self.n_qubits:
            raise ValueError("need one position per qubit")
        x = z = 0
        for j, p in enumerate(positions):
            x |= ((self.x_bits >> j) & 1) << p
            z |= ((self.z_bits >> j) & 1) << p
        return PauliString(n_total, x, z, self.k)

    # dense realizations
    @cached_property
    def _index_masks(self):
        n = self.n_qubits
        return _reverse_bits(self.x_bits, n), _reverse_bits(self.z_bits, n)

    def _column_phases(self) -> tuple[np.ndarray, np.ndarray]:
        """(rows, values): column b of the matrix has value values[b] at row rows[b]."""
        n = self.n_qubits
        xm, zm = self._index_masks
        idx = np.arange(1 << n, dtype=np.uint64)
        signs = 1 - 2 * (np.bitwise_count(idx & np.uint64(zm)) & 1).astype(np.int64)
        scalar = _PHASE_VALUE[(self.k + _popcount(self.x_bits & self.z_bits)) % 4]
        return (idx ^ np.uint64(xm)).astype(np.intp), scalar * signs

    def to_dense(self) -> np.ndarray:
        if self.n_qubits > 14:
            raise ValueError("dense Pauli realization capped at 14 qubits")
        rows, vals = self._column_phases()
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        out[rows, np.arange(dim)] = vals
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """P @ vec for a state vector or a matrix acting from the left."""
        rows, vals = self._column_phases()
        out = np.empty_like(vec, dtype=complex)
        if vec.ndim == 1:
            out[rows] = vals * vec
        else:
            out[rows] = vals[:, None] * vec
        return out

    def apply_right(self, mat: np.ndarray) -> np.ndarray:
        """mat @ P."""
        rows, vals = self._column_phases()
        return mat[:, rows] * vals[None, :]


def _check_sizes(a: PauliString, b: PauliString):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Exact product a*b with tracked Z4 phase."""
    _check_sizes(a, b)
    x1, z1, x2, z2 = a.x_bits, a.z_bits, b.x_bits, b.z_bits
    X1, Y1, Z1 = x1 & ~z1, x1 & z1, ~x1 & z1
    X2, Y2, Z2 = x2 & ~z2, x2 & z2, ~x2 & z2
    # XY = iZ, YZ = iX, ZX = iY and the reversed orders give -i
    plus = (X1 & Y2) | (Y1 & Z2) | (Z1 & X2)
    minus = (Y1 & X2) | (Z1 & Y2) | (X1 & Z2)
    k = a.k + b.k + _popcount(plus) - _popcount(minus)
    return PauliString(a.n_qubits, x1 ^ x2, z1 ^ z2, k)


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff ab = ba, i.e. the symplectic form of the bit patterns is even."""
    _check_sizes(a, b)
    return _popcount((a.x_bits & b.z_bits) ^ (a.z_bits & b.x_bits)) % 2 == 0


def pauli_product(strings, n: int | None = None) -> PauliString:
    strings = list(strings)
    if not strings:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliString.identity(n)
    out = strings[0]
    for s in strings[1:]:
        out = pauli_mul(out, s)
    return out


@dataclass(frozen=True)
class MajoranaMonomial:
    """coefficient * gamma_{m_0} gamma_{m_1} ... with coefficient in {+-1, +-i}."""

    mode_indices: tuple
    coefficient: complex = 1

    def __post_init__(self):
        object.__setattr__(self, "mode_indices", tuple(self.mode_indices))
        phase_exponent(self.coefficient)

    @property
    def degree(self) -> int:
        return len(self.mode_indices)

    def is_even(self) -> bool:
        return self.degree % 2 == 0

    def canonical(self) -> "MajoranaMonomial":
        """Sort modes ascending (one sign per transposition) and cancel gamma^2 = 1."""
        modes = list(self.mode_indices)
        sign = 1
        # bubble sort counts adjacent swaps of distinct modes
        for i in range(len(modes)):
            for j in range(len(modes) - 1 - i):
                if modes[j] > modes[j + 1]:
                    modes[j], modes[j + 1] = modes[j + 1], modes[j]
                    sign = -sign
        out = []
        for m in modes:
            if out and out[-1] == m:
                out.pop()
            else:
                out.append(m)
        return MajoranaMonomial(tuple(out), sign * self.coefficient)

    def __mul__(self, other: "MajoranaMonomial") -> "MajoranaMonomial":
        return MajoranaMonomial(
            self.mode_indices + other.mode_indices, self.coefficient * other.coefficient
        ).canonical()

    def dagger(self) -> "MajoranaMonomial":
        return MajoranaMonomial(self.mode_indices[::-1], np.conj(self.coefficient)).canonical()


def majorana(*modes, coefficient=1) -> MajoranaMonomial:
    return MajoranaMonomial(tuple(modes), coefficient)


@dataclass(frozen=True)
class JordanWignerMap:
    """mode_order[p] is the mode sitting at Majorana position p; qubit p // 2.

    Even positions encode as Z...Z X_q and odd positions as Z...Z Y_q, so the
    annihilator of qubit q is (gamma_{2q} + i gamma_{2q+1}) / 2 and qubit state
    |1> means occupied.
    """

    mode_order: tuple

    def __post_init__(self):
        object.__setattr__(self, "mode_order", tuple(self.mode_order))
        if len(set(self.mode_order)) != len(self.mode_order):
            raise ValueError("mode_order must not repeat modes")
        if len(self.mode_order) % 2:
            raise ValueError("need an even number of Majorana modes")

    @property
    def n_qubits(self) -> int:
        return len(self.mode_order) // 2

    @cached_property
    def position(self) -> dict:
        return {m: p for p, m in enumerate(self.mode_order)}

    def encode_mode(self, mode) -> PauliString:
        if mode not in self.position:
            raise KeyError(f"mode {mode!r} not in Jordan-Wigner map")
        p = self.position[mode]
        q = p // 2
        ops = {j: "Z" for j in range(q)}
        ops[q] = "X" if p % 2 == 0 else "Y"
        return PauliString.from_ops(self.n_qubits, ops)

    def encode(self, m: MajoranaMonomial, require_even: bool = False) -> PauliString:
        return jw_encode(m, self, require_even=require_even)


def jw_encode(m: MajoranaMonomial, jw: JordanWignerMap, require_even: bool = False) -> PauliString:
    if require_even and not m.is_even():
        raise ValueError(f"odd monomial {m.mode_indices} in a parity-even context")
    out = PauliString.identity(jw.n_qubits)
    for mode in m.mode_indices:
        out = pauli_mul(out, jw.encode_mode(mode))
    return out.times_phase(m.coefficient)


def commutation_matrix(strings) -> np.ndarray:
    """0/1 matrix with 1 where two strings anticommute (compiled kernel when present)."""
    from . import kernels

    strings = list(strings)
    if not strings:
        return np.zeros((0, 0), dtype=np.uint8)
    n = strings[0].n_qubits
    return kernels.symplectic_gram([s.x_bits for s in strings], [s.z_bits for s in strings], n)
