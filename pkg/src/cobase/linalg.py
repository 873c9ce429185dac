"""Gaussian elimination over GF(q) on arrays of element codes."""

from __future__ import annotations

import numpy as np

from .field import DivisionByZero, FieldSpec


def rref(spec: FieldSpec, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(A, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("expected a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = spec.mul(R[r], spec.inv(R[r, c]))
        col = R[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            R[hit] = spec.sub(R[hit], spec.mul(col[hit, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(spec: FieldSpec, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(spec, A)[1])


def nullspace(spec: FieldSpec, A) -> np.ndarray:
    """Basis (as rows) of {v : A v = 0}, in the canonical form read off the RREF."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(spec, A)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = spec.neg(R[row, fc])
    return basis


def inverse(spec: FieldSpec, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    R, pivots = rref(spec, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return R[:, n:]


def det(spec: FieldSpec, A) -> int:
    R = np.array(A, dtype=np.int64, copy=True)
    n = R.shape[0]
    d = 1
    for c in range(n):
        nz = np.nonzero(R[c:, c])[0]
        if nz.size == 0:
            return 0
        piv = c + nz[0]
        if piv != c:
            R[[c, piv]] = R[[piv, c]]
            d = int(spec.neg(d))
        d = int(spec.mul(d, R[c, c]))
        inv = spec.inv(R[c, c])
        below = R[c + 1 :, c]
        hit = np.nonzero(below)[0] + c + 1
        if hit.size:
            factors = spec.mul(R[hit, c], inv)
            R[hit] = spec.sub(R[hit], spec.mul(factors[:, None], R[c][None, :]))
    return d


def matmul(spec: FieldSpec, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if spec.is_prime_field:
        return (A @ B) % spec.p
    prods = spec.mul(A[:, :, None], B[None, :, :])
    out = prods[:, 0, :]
    for k in range(1, A.shape[1]):
        out = spec.add(out, prods[:, k, :])
    return out


def span_contains(spec: FieldSpec, basis, v) -> bool:
    basis = np.asarray(basis, dtype=np.int64).reshape(-1, len(v))
    return rank(spec, np.vstack([basis, [v]])) == rank(spec, basis)


def intersect_subspaces(spec: FieldSpec, U, W) -> np.ndarray:
    """Row basis of the intersection of two row spaces."""
    U = np.asarray(U, dtype=np.int64)
    W = np.asarray(W, dtype=np.int64)
    if len(U) == 0 or len(W) == 0:
        return np.zeros((0, U.shape[1] if U.ndim == 2 else W.shape[1]), dtype=np.int64)
    # a U = b W  <=>  [U; -W]^T (a, b) = 0
    M = np.vstack([U, spec.neg(W)]).T
    ker = nullspace(spec, M)
    vecs = matmul(spec, ker[:, : len(U)], U) if len(ker) else np.zeros((0, U.shape[1]), np.int64)
    R, piv = rref(spec, vecs) if len(vecs) else (vecs, [])
    return R[: len(piv)]
