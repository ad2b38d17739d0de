"""K-matrix analysis of multi-component Luttinger liquids.

A cosine cos(l . Phi) with integer l is a candidate gapping term. It is
allowed when it is invariant under every symmetry action Phi -> W Phi + delta
and l^T K^-1 l = 0. A set of such vectors gaps the theory (Haldane criterion)
when it has n/2 independent, mutually commuting members; we additionally
require that pinning them does not spontaneously break a symmetry.

Shifts are given in units of pi. Continuous shifts are linear in named
parameters and stored as {parameter: coefficient vector}.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import gcd

import numpy as np

from . import kernels


def _frac(x) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


def exact_inverse(K) -> list[list[Fraction]]:
    """Gauss-Jordan inverse over the rationals."""
    n = len(K)
    a = [[Fraction(int(K[i][j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ValueError("K is singular")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [v / piv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def _bilinear(Kinv, l1, l2) -> Fraction:
    n = len(l1)
    return sum(Fraction(int(l1[i])) * Kinv[i][j] * int(l2[j]) for i in range(n) for j in range(n))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def primitive(l) -> tuple:
    g = 0
    for v in l:
        g = gcd(g, abs(int(v)))
    if g == 0:
        raise ValueError("zero vector")
    return tuple(int(v) // g for v in l)


def canonical_sign(l) -> tuple:
    l = tuple(int(v) for v in l)
    first = next((v for v in l if v != 0), 0)
    return l if first >= 0 else tuple(-v for v in l)


# integer lattices


def hermite_rows(rows) -> list[list[int]]:
    """Row-style Hermite echelon basis of the integer span of `rows`."""
    rows = [list(map(int, r)) for r in rows if any(r)]
    if not rows:
        return []
    k = len(rows[0])
    basis = []
    col = 0
    while rows and col < k:
        nz = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not nz:
            col += 1
            continue
        # Euclid on the pivot column
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            new = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [a - q * b for a, b in zip(r, p)]
                (new if r[col] != 0 else rest).append(r)
            nz = new
        p = nz[0]
        if p[col] < 0:
            p = [-a for a in p]
        basis.append(p)
        rows = [r for r in rest if any(r)]
        col += 1
    # reduce entries above each pivot
    for i, b in enumerate(basis):
        c = next(j for j, v in enumerate(b) if v)
        for a in basis[:i]:
            q = a[c] // b[c]
            if q:
                a[:] = [x - q * y for x, y in zip(a, b)]
    return basis


def lattice_contains(basis, v) -> bool:
    """Is the integer vector v in the row lattice with Hermite basis `basis`?"""
    v = list(map(int, v))
    for b in basis:
        c = next(j for j, x in enumerate(b) if x)
        if v[c] % b[c]:
            return False
        q = v[c] // b[c]
        v = [x - q * y for x, y in zip(v, b)]
    return not any(v)


# theory description


@dataclass(frozen=True)
class SymmetryAction:
    """Phi -> W Phi + delta, delta = pi * shift + sum_p p * continuous[p]."""

    name: str
    shift: tuple = ()
    linear: tuple | None = None
    antiunitary: bool = False
    continuous: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "shift", tuple(_frac(x) for x in self.shift))
        if self.linear is not None:
            W = tuple(tuple(int(x) for x in row) for row in self.linear)
            Wm = np.array(W)
            if np.abs(Wm).max() > 1 or not np.array_equal(Wm.T @ Wm, np.eye(len(W), dtype=int)):
                raise ValueError(f"{self.name}: W must be a signed permutation")
            object.__setattr__(self, "linear", W)
        object.__setattr__(self, "continuous", {k: tuple(_frac(x) for x in v) for k, v in self.continuous.items()})

    def W(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64) if self.linear is None else np.array(self.linear, dtype=np.int64)

    def shift_vec(self, n: int) -> tuple:
        return self.shift if self.shift else tuple(Fraction(0) for _ in range(n))

    def sign_on(self, l) -> int | None:
        """s with W^T l = s l, or None."""
        n = len(l)
        wl = self.W(n).T @ np.array(l, dtype=np.int64)
        if np.array_equal(wl, l):
            return 1
        if np.array_equal(wl, -np.array(l)):
            return -1
        return None

    def to_json(self) -> dict:
        return {"name": self.name, "shift": [str(x) for x in self.shift],
                "linear": None if self.linear is None else [list(r) for r in self.linear],
                "antiunitary": self.antiunitary,
                "continuous": {k: [str(x) for x in v] for k, v in self.continuous.items()}}

    @classmethod
    def from_json(cls, d: dict) -> "SymmetryAction":
        return cls(d["name"], tuple(d.get("shift") or ()), d.get("linear"), bool(d.get("antiunitary", False)),
                   dict(d.get("continuous") or {}))


@dataclass(frozen=True)
class LuttingerTheory:
    K: tuple
    field_labels: tuple = ()
    symmetries: tuple = ()
    name: str = ""
    V: tuple | None = None

    def __post_init__(self):
        K = tuple(tuple(int(x) for x in row) for row in self.K)
        n = len(K)
        if any(len(r) != n for r in K) or n % 2:
            raise ValueError("K must be square with an even number of fields")
        if any(K[i][j] != K[j][i] for i in range(n) for j in range(n)):
            raise ValueError("K must be symmetric")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "symmetries", tuple(self.symmetries))
        if not self.field_labels:
            object.__setattr__(self, "field_labels", tuple(f"phi{i + 1}" for i in range(n)))
        exact_inverse(K)  # raises when singular
        for s in self.symmetries:
            if s.shift and len(s.shift) != n:
                raise ValueError(f"{s.name}: shift has the wrong length")
            if s.linear is not None and len(s.linear) != n:
                raise ValueError(f"{s.name}: W has the wrong size")
            for p, v in s.continuous.items():
                if len(v) != n:
                    raise ValueError(f"{s.name}: continuous shift {p} has the wrong length")

    @property
    def n(self) -> int:
        return len(self.K)

    @cached_property
    def Kinv(self):
        return exact_inverse(self.K)

    def without(self, *names) -> "LuttingerTheory":
        keep = tuple(s for s in self.symmetries if s.name not in names)
        if len(keep) == len(self.symmetries):
            raise KeyError(f"no symmetry named {names}")
        return LuttingerTheory(self.K, self.field_labels, keep, self.name + "-" + "-".join(names), self.V)

    def to_json(self) -> dict:
        return {"name": self.name, "K": [list(r) for r in self.K], "field_labels": list(self.field_labels),
                "symmetries": [s.to_json() for s in self.symmetries]}

    @classmethod
    def from_json(cls, d: dict) -> "LuttingerTheory":
        return cls(tuple(map(tuple, d["K"])), tuple(d.get("field_labels") or ()),
                   tuple(SymmetryAction.from_json(s) for s in d.get("symmetries", [])), d.get("name", ""),
                   None if d.get("V") is None else tuple(map(tuple, d["V"])))


def load_theory(name_or_path: str) -> LuttingerTheory:
    """A bundled theory by name (e.g. 'sspt4d') or a JSON file path."""
    if name_or_path.endswith(".json"):
        with open(name_or_path) as fh:
            return LuttingerTheory.from_json(json.load(fh))
    text = resources.files("holospt").joinpath("theories", name_or_path + ".json").read_text()
    return LuttingerTheory.from_json(json.loads(text))


def bundled_theories() -> list[str]:
    root = resources.files("holospt").joinpath("theories")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _check_dim(theory, l):
    if len(l) != theory.n:
        raise ValueError(f"vector of length {len(l)} for a {theory.n}-field theory")


def is_null(theory: LuttingerTheory, l) -> bool:
    _check_dim(theory, l)
    return _bilinear(theory.Kinv, l, l) == 0


def mutually_commuting(theory: LuttingerTheory, l1, l2) -> bool:
    _check_dim(theory, l1)
    _check_dim(theory, l2)
    return _bilinear(theory.Kinv, l1, l2) == 0


def _shift_ok(action: SymmetryAction, l) -> bool:
    n = len(l)
    dot = sum(Fraction(int(a)) * b for a, b in zip(l, action.shift_vec(n)))
    if dot.denominator != 1 or dot.numerator % 2:
        return False
    return all(sum(Fraction(int(a)) * b for a, b in zip(l, v)) == 0 for v in action.continuous.values())


def is_symmetric(theory: LuttingerTheory, l, symmetries=None) -> bool:
    _check_dim(theory, l)
    syms = theory.symmetries if symmetries is None else symmetries
    return all(s.sign_on(l) is not None and _shift_ok(s, l) for s in syms)


def identification_lattice(theory: LuttingerTheory, gapping_set):
    """Hermite basis and common denominator of {(l_i^T K^-1 Lambda)_i : Lambda in Z^n}."""
    n = theory.n
    rows = [[sum(Fraction(int(l[a])) * theory.Kinv[a][b] for a in range(n)) for b in range(n)] for l in gapping_set]
    den = 1
    for r in rows:
        for x in r:
            den = _lcm(den, x.denominator)
    # generators are the columns (one per unit Lambda), scaled to integers
    gens = [[int(rows[i][b] * den) for i in range(len(rows))] for b in range(n)]
    return hermite_rows(gens), den


def vacuum_shift(theory: LuttingerTheory, action: SymmetryAction, gapping_set):
    """(S, c) with m -> S m + c on the pinned labels m_i = l_i . Phi / 2 pi, or None
    if the action does not map the cosines into themselves."""
    S, c = [], []
    for l in gapping_set:
        s = action.sign_on(l)
        if s is None:
            return None
        S.append(s)
        c.append(sum(Fraction(int(a)) * b for a, b in zip(l, action.shift_vec(theory.n))) / 2)
    return S, c


def ssb_witness(theory: LuttingerTheory, gapping_set, symmetries=None):
    """Name of the first symmetry whose vacuum shift is not an identification, else None."""
    gapping_set = [tuple(map(int, l)) for l in gapping_set]
    if not gapping_set:
        return None
    basis, den = identification_lattice(theory, gapping_set)
    k = len(gapping_set)
    for act in (theory.symmetries if symmetries is None else symmetries):
        vs = vacuum_shift(theory, act, gapping_set)
        if vs is None:
            return act.name
        S, c = vs
        if any(x.denominator != 1 for x in c):
            return act.name
        if not lattice_contains(basis, [int(x) * den for x in c]):
            return act.name
        for j in range(k):
            col = [0] * k
            col[j] = (S[j] - 1) * den
            if not lattice_contains(basis, col):
                return act.name
    return None


def breaks_spontaneously(theory: LuttingerTheory, gapping_set) -> bool:
    return ssb_witness(theory, gapping_set) is not None


def _quadratic_form(theory) -> np.ndarray:
    den = 1
    for row in theory.Kinv:
        for x in row:
            den = _lcm(den, x.denominator)
    return np.array([[int(x * den) for x in row] for row in theory.Kinv], dtype=np.int64)


def enumerate_allowed(theory: LuttingerTheory, cutoff: int = 2, impl=None) -> list[tuple]:
    """Primitive symmetric null vectors with max |l_i| <= cutoff, one per sign pair."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    n = theory.n
    eq, mod_rows, mod_vals = [], [], []
    for s in theory.symmetries:
        for v in s.continuous.values():
            den = 1
            for x in v:
                den = _lcm(den, x.denominator)
            eq.append([int(x * den) for x in v])
        if s.shift:
            den = 1
            for x in s.shift:
                den = _lcm(den, x.denominator)
            mod_rows.append([int(x * den) for x in s.shift])
            mod_vals.append(2 * den)
    found = kernels.null_box(_quadratic_form(theory), np.array(eq, dtype=np.int64).reshape(-1, n),
                             np.array(mod_rows, dtype=np.int64).reshape(-1, n),
                             np.array(mod_vals, dtype=np.int64), cutoff, impl=impl)
    out = []
    for l in found:
        l = tuple(int(x) for x in l)
        if all(s.sign_on(l) is not None for s in theory.symmetries):
            out.append(canonical_sign(l))
    return sorted(set(out))


@dataclass
class GapReport:
    gappable: bool
    witness: list
    max_set_size: int
    residual_modes: int
    cutoff: int
    ssb_check: bool
    candidates: list
    rejected_ssb: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"gappable": "yes" if self.gappable else "no-within-cutoff",
                "witness": [list(l) for l in self.witness], "max_set_size": self.max_set_size,
                "residual_modes": self.residual_modes, "cutoff": self.cutoff, "ssb_check": self.ssb_check,
                "candidates": [list(l) for l in self.candidates],
                "rejected_ssb": [[list(l) for l in s] for s in self.rejected_ssb]}


def _rank(vectors) -> int:
    return int(np.linalg.matrix_rank(np.array(vectors, dtype=float))) if vectors else 0


def gappable(theory: LuttingerTheory, cutoff: int = 2, ssb_check: bool = True, candidates=None) -> GapReport:
    """Largest independent, commuting, symmetric null set (non-breaking if ssb_check)."""
    cands = enumerate_allowed(theory, cutoff) if candidates is None else [tuple(map(int, c)) for c in candidates]
    cands = [c for c in cands if is_null(theory, c) and is_symmetric(theory, c)]
    target = theory.n // 2
    best: list = []
    rejected = []

    def grow(current, start):
        nonlocal best
        if len(current) > len(best):
            if not ssb_check or not breaks_spontaneously(theory, current):
                best = list(current)
            elif len(rejected) < 16:
                rejected.append(list(current))
        if len(best) == target or len(current) == target:
            return
        for i in range(start, len(cands)):
            c = cands[i]
            if all(mutually_commuting(theory, c, x) for x in current) and _rank(current + [c]) == len(current) + 1:
                grow(current + [c], i + 1)
                if len(best) == target:
                    return

    grow([], 0)
    return GapReport(len(best) == target, best, len(best), theory.n - 2 * len(best), cutoff, ssb_check,
                     cands, rejected)


@dataclass
class GappingSetReport:
    vectors: list
    null: list
    symmetric: list
    pairwise_commuting: bool
    commutator_matrix: list
    independent: bool
    ssb: bool
    ssb_symmetry: str | None

    @property
    def all_pass(self) -> bool:
        return all(self.null) and all(self.symmetric) and self.pairwise_commuting and self.independent and not self.ssb

    def to_json(self) -> dict:
        return {"vectors": [list(v) for v in self.vectors], "null": self.null, "symmetric": self.symmetric,
                "pairwise_commuting": self.pairwise_commuting,
                "commutator_matrix": [[str(x) for x in r] for r in self.commutator_matrix],
                "independent": self.independent, "ssb": self.ssb, "ssb_symmetry": self.ssb_symmetry,
                "all_pass": self.all_pass}


def check_gapping_set(theory: LuttingerTheory, vectors) -> GappingSetReport:
    vectors = [tuple(map(int, v)) for v in vectors]
    for v in vectors:
        _check_dim(theory, v)
    comm = [[_bilinear(theory.Kinv, a, b) for b in vectors] for a in vectors]
    pair_ok = all(comm[i][j] == 0 for i, j in itertools.combinations(range(len(vectors)), 2))
    witness = ssb_witness(theory, vectors)
    return GappingSetReport(
        vectors, [is_null(theory, v) for v in vectors], [is_symmetric(theory, v) for v in vectors],
        pair_ok, comm, _rank(vectors) == len(vectors), witness is not None, witness,
    )
