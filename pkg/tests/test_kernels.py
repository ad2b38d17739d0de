import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holospt import kernels

try:
    kernels.backend("cython")
    HAVE_EXT = True
except ImportError:
    HAVE_EXT = False

needs_ext = pytest.mark.skipif(not HAVE_EXT, reason="compiled extension not built")
py = kernels.backend("python")

masks = st.lists(st.integers(0, 2**70 - 1), min_size=1, max_size=12)


def _xor_rank(rows):
    # independent oracle: greedy basis on Python ints
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


@settings(max_examples=80, deadline=None)
@given(masks)
def test_gf2_rank_matches_oracle(rows):
    assert kernels.gf2_rank(rows, 70, impl=py) == _xor_rank(rows)


@settings(max_examples=80, deadline=None)
@given(masks, st.integers(0, 2**70 - 1))
def test_gf2_solve_reproduces_target(rows, target):
    sol = kernels.gf2_solve(rows, target, 70, impl=py)
    in_span = _xor_rank(rows + [target]) == _xor_rank(rows)
    assert (sol is not None) == in_span
    if sol is not None:
        acc = 0
        for i in sol:
            acc ^= rows[i]
        assert acc == target


def _gram_oracle(x, z):
    n = len(x)
    return np.array([[bin((x[i] & z[j]) ^ (z[i] & x[j])).count("1") & 1 for j in range(n)] for i in range(n)])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2**70 - 1), st.integers(0, 2**70 - 1)), min_size=1, max_size=10))
def test_symplectic_gram_matches_oracle(pairs):
    x = [p[0] for p in pairs]
    z = [p[1] for p in pairs]
    assert (kernels.symplectic_gram(x, z, 70, impl=py) == _gram_oracle(x, z)).all()


def _null_box_oracle(A, cutoff):
    import itertools

    n = len(A)
    out = set()
    for v in itertools.product(range(-cutoff, cutoff + 1), repeat=n):
        if not any(v):
            continue
        v = np.array(v)
        if v @ A @ v != 0 or np.gcd.reduce(np.abs(v)) != 1:
            continue
        first = v[np.nonzero(v)[0][0]]
        out.add(tuple(int(a) for a in (v if first > 0 else -v)))
    return sorted(out)


def test_null_box_matches_brute_force():
    A = np.diag([1, -1, 1, -1])
    got = kernels.null_box(A, np.zeros((0, 4)), np.zeros((0, 4)), [], 2, impl=py)
    assert [tuple(r) for r in got] == _null_box_oracle(A, 2)


def test_null_box_constraints():
    A = np.diag([1, -1, 1, -1])
    eq = [[1, 1, 0, 0]]
    got = kernels.null_box(A, eq, np.zeros((0, 4)), [], 2, impl=py)
    assert all(r[0] + r[1] == 0 for r in got)
    mod = kernels.null_box(A, np.zeros((0, 4)), [[1, 0, 0, 0]], [2], 2, impl=py)
    assert all(r[0] % 2 == 0 for r in mod)


@needs_ext
@settings(max_examples=60, deadline=None)
@given(masks, st.integers(0, 2**70 - 1))
def test_backends_agree_gf2(rows, target):
    cy = kernels.backend("cython")
    assert kernels.gf2_rank(rows, 70, impl=py) == kernels.gf2_rank(rows, 70, impl=cy)
    assert kernels.gf2_solve(rows, target, 70, impl=py) == kernels.gf2_solve(rows, target, 70, impl=cy)


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2**130 - 1), st.integers(0, 2**130 - 1)), min_size=1, max_size=10))
def test_backends_agree_gram(pairs):
    cy = kernels.backend("cython")
    x = [p[0] for p in pairs]
    z = [p[1] for p in pairs]
    assert (kernels.symplectic_gram(x, z, 130, impl=py) == kernels.symplectic_gram(x, z, 130, impl=cy)).all()


@needs_ext
@pytest.mark.parametrize("cutoff", [1, 2, 3])
def test_backends_agree_null_box(cutoff):
    cy = kernels.backend("cython")
    A = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 2, 1], [0, 0, 1, -2]])
    args = (A, [[1, 0, -1, 0]], [[0, 1, 1, 0]], [2], cutoff)
    assert (kernels.null_box(*args, impl=py) == kernels.null_box(*args, impl=cy)).all()


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend("fortran")
