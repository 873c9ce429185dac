"""Batched arithmetic for realised matrices over Z/p (uint8 storage, exact float products)."""

from __future__ import annotations

import numpy as np


def _check(p: int, N: int) -> None:
    if N * (p - 1) ** 2 >= 2**53:
        raise OverflowError("products would lose exactness")


def mul(p: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Single matrix product mod p."""
    out = a.astype(np.float64) @ b.astype(np.float64)
    return np.fmod(out, p).astype(np.uint8)


def rmul(p: int, stack: np.ndarray, g: np.ndarray) -> np.ndarray:
    """stack[i] @ g for every i, one gemm."""
    B, N, _ = stack.shape
    out = stack.reshape(B * N, N).astype(np.float64) @ g.astype(np.float64)
    return np.fmod(out, p).astype(np.uint8).reshape(B, N, N)


def lmul(p: int, g: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """g @ stack[i] for every i, one gemm."""
    B, N, _ = stack.shape
    t = stack.transpose(0, 2, 1).reshape(B * N, N).astype(np.float64) @ g.T.astype(np.float64)
    return np.ascontiguousarray(np.fmod(t, p).astype(np.uint8).reshape(B, N, N).transpose(0, 2, 1))


def bmul(p: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise a[i] @ b[i]."""
    out = np.matmul(a.astype(np.float64), b.astype(np.float64))
    return np.fmod(out, p).astype(np.uint8)


def act(p: int, stack: np.ndarray, v: np.ndarray) -> np.ndarray:
    """stack[i] @ v for every i; returns (B, N)."""
    B, N, _ = stack.shape
    out = stack.reshape(B * N, N).astype(np.float64) @ v.astype(np.float64)
    return np.fmod(out, p).astype(np.uint8).reshape(B, N)


def act_many(p: int, g: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """g applied to each row of vecs."""
    out = vecs.astype(np.float64) @ g.T.astype(np.float64)
    return np.fmod(out, p).astype(np.uint8)


def inverse(p: int, a: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse mod p."""
    N = a.shape[0]
    M = np.concatenate([a.astype(np.int64), np.eye(N, dtype=np.int64)], axis=1)
    for c in range(N):
        nz = np.nonzero(M[c:, c] % p)[0]
        if nz.size == 0:
            raise ZeroDivisionError("singular matrix")
        r = c + nz[0]
        if r != c:
            M[[c, r]] = M[[r, c]]
        M[c] = (M[c] * pow(int(M[c, c]), p - 2, p)) % p
        col = M[:, c].copy()
        col[c] = 0
        M = (M - col[:, None] * M[c][None, :]) % p
    return M[:, N:].astype(np.uint8)


def rank(p: int, a: np.ndarray) -> int:
    M = np.array(a, dtype=np.int64) % p
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        M = (M - col[:, None] * M[r][None, :]) % p
        r += 1
    return r


def is_identity(stack: np.ndarray) -> np.ndarray:
    N = stack.shape[-1]
    return np.all(stack == np.eye(N, dtype=np.uint8), axis=(-2, -1))


def keys(stack: np.ndarray) -> list[bytes]:
    flat = np.ascontiguousarray(stack).reshape(len(stack), -1)
    return [row.tobytes() for row in flat]


def vec_weights(p: int, N: int) -> np.ndarray:
    """Weights turning a vector into an integer whose order is the lexicographic order."""
    if p**N >= 2**62:
        raise OverflowError("vector space too large for integer codes")
    return p ** np.arange(N - 1, -1, -1, dtype=np.int64)


def vec_codes(p: int, vecs: np.ndarray) -> np.ndarray:
    vecs = np.asarray(vecs)
    return vecs.astype(np.int64) @ vec_weights(p, vecs.shape[-1])


def code_vecs(p: int, N: int, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return ((codes[..., None] // vec_weights(p, N)) % p).astype(np.uint8)


def nullspace(p: int, a: np.ndarray) -> np.ndarray:
    """Row basis of {x : a x = 0} over Z/p, read off the reduced echelon form."""
    M = np.array(a, dtype=np.int64) % p
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            M[hit] = (M[hit] - col[hit, None] * M[r][None, :]) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = (-M[row, fc]) % p
    return basis.astype(np.uint8)
