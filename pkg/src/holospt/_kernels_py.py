"""Pure-Python/numpy versions of the compiled kernels. Same signatures and results."""
import numpy as np


def _parity(words):
    return (np.bitwise_count(words).sum(axis=-1) & 1).astype(np.uint8)


def symplectic_gram(x, z):
    x = np.asarray(x, dtype=np.uint64)
    z = np.asarray(z, dtype=np.uint64)
    cross = (x[:, None, :] & z[None, :, :]) ^ (z[:, None, :] & x[None, :, :])
    return _parity(cross)


def gf2_rank(rows):
    r = np.array(rows, dtype=np.uint64, copy=True)
    m, w = r.shape
    rank = 0
    for col in range(w * 64):
        word, mask = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(mask)
        hits = np.nonzero(r[rank:, word] & mask)[0]
        if hits.size == 0:
            continue
        piv = rank + hits[0]
        r[[rank, piv]] = r[[piv, rank]]
        sel = np.nonzero(r[:, word] & mask)[0]
        sel = sel[sel != rank]
        r[sel] ^= r[rank]
        rank += 1
        if rank == m:
            break
    return rank


def gf2_solve(rows, target):
    r = np.array(rows, dtype=np.uint64, copy=True)
    t = np.array(target, dtype=np.uint64, copy=True)
    m, w = r.shape
    comb = np.eye(m, dtype=np.uint8)
    tc = np.zeros(m, dtype=np.uint8)
    rank = 0
    for col in range(w * 64):
        word, bit = divmod(col, 64)
        mask = np.uint64(1) << np.uint64(bit)
        hits = np.nonzero(r[rank:, word] & mask)[0]
        if hits.size == 0:
            continue
        piv = rank + hits[0]
        r[[rank, piv]] = r[[piv, rank]]
        comb[[rank, piv]] = comb[[piv, rank]]
        sel = np.nonzero(r[:, word] & mask)[0]
        sel = sel[sel != rank]
        r[sel] ^= r[rank]
        comb[sel] ^= comb[rank]
        if t[word] & mask:
            t ^= r[rank]
            tc ^= comb[rank]
        rank += 1
    if np.any(t):
        return None
    return tc


def null_box(A, eq, mod_rows, mod_vals, cutoff):
    A = np.asarray(A, dtype=np.int64)
    eq = np.asarray(eq, dtype=np.int64)
    mod_rows = np.asarray(mod_rows, dtype=np.int64)
    mod_vals = np.asarray(mod_vals, dtype=np.int64)
    n = A.shape[0]
    axis = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
    out = []
    # shard on the leading coordinate to bound memory
    for lead in axis:
        if lead < 0:
            continue
        if n == 1:
            block = np.array([[lead]], dtype=np.int64)
        else:
            grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
            rest = np.stack([g.ravel() for g in grids], axis=1)
            block = np.concatenate([np.full((rest.shape[0], 1), lead), rest], axis=1)
        nz = block != 0
        first = np.argmax(nz, axis=1)
        lead_val = block[np.arange(block.shape[0]), first]
        keep = nz.any(axis=1) & (lead_val > 0)
        if eq.size:
            keep &= np.all(block @ eq.T == 0, axis=1)
        if mod_rows.size:
            keep &= np.all((block @ mod_rows.T) % mod_vals == 0, axis=1)
        block = block[keep]
        if block.size == 0:
            continue
        quad = np.einsum("ki,ij,kj->k", block, A, block)
        block = block[quad == 0]
        g = np.gcd.reduce(np.abs(block), axis=1)
        block = block[g == 1]
        out.append(block)
    if not out:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(out, axis=0)
