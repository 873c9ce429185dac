"""Matrices and vectors over GF(q), and their realisation over the prime field.

An n x n matrix over GF(p^f) is realised as an nf x nf matrix over Z/p by
replacing each entry ``a`` with the f x f matrix of multiplication by ``a``.
A vector becomes the concatenation of its entries' coefficient lists, so the
lexicographic order on vectors is the lexicographic order on realised tuples.
All group computations run on realised matrices; semilinear maps
``v -> M sigma^d(v)`` are realised the same way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .field import FieldElement, FieldError, FieldSpec


class DimensionMismatch(ValueError):
    pass


def _as_codes(spec: FieldSpec, entries) -> np.ndarray:
    arr = np.asarray(
        [[e.code if isinstance(e, FieldElement) else int(e) % spec.q for e in row] for row in entries]
        if not isinstance(entries, np.ndarray)
        else entries,
        dtype=np.int64,
    )
    return arr


@dataclass(frozen=True, eq=False)
class SquareMatrix:
    """n x n matrix over GF(q), stored as element codes."""

    spec: FieldSpec
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        if codes.ndim != 2 or codes.shape[0] != codes.shape[1]:
            raise DimensionMismatch("matrix must be square")
        if codes.min(initial=0) < 0 or codes.max(initial=0) >= self.spec.q:
            raise FieldError("entry code out of range")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_entries(cls, spec: FieldSpec, entries) -> SquareMatrix:
        return cls(spec, _as_codes(spec, entries))

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> SquareMatrix:
        return cls(spec, np.eye(n, dtype=np.int64))

    @classmethod
    def scalar(cls, spec: FieldSpec, n: int, code: int) -> SquareMatrix:
        return cls(spec, np.eye(n, dtype=np.int64) * int(code))

    @classmethod
    def diagonal(cls, spec: FieldSpec, codes) -> SquareMatrix:
        return cls(spec, np.diag(np.asarray(codes, dtype=np.int64)))

    @classmethod
    def permutation(cls, spec: FieldSpec, images) -> SquareMatrix:
        """Matrix sending basis vector i to basis vector images[i]."""
        n = len(images)
        m = np.zeros((n, n), dtype=np.int64)
        m[list(images), list(range(n))] = 1
        return cls(spec, m)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def entry(self, i: int, j: int) -> FieldElement:
        return self.spec.element(int(self.codes[i, j]))

    def __matmul__(self, other):
        if isinstance(other, VectorQ):
            return other.apply(self)
        if other.spec != self.spec or other.n != self.n:
            raise DimensionMismatch("incompatible matrices")
        return SquareMatrix(self.spec, linalg.matmul(self.spec, self.codes, other.codes))

    def inverse(self) -> SquareMatrix:
        return SquareMatrix(self.spec, linalg.inverse(self.spec, self.codes))

    def det(self) -> int:
        return linalg.det(self.spec, self.codes)

    def transpose(self) -> SquareMatrix:
        return SquareMatrix(self.spec, self.codes.T.copy())

    def kron(self, other: SquareMatrix) -> SquareMatrix:
        """Kronecker product, left factor most significant."""
        prod = self.spec.mul(self.codes[:, None, :, None], other.codes[None, :, None, :])
        return SquareMatrix(self.spec, prod.reshape(self.n * other.n, self.n * other.n))

    def is_scalar(self) -> bool:
        d = self.codes[0, 0]
        return bool(np.all(self.codes == np.eye(self.n, dtype=np.int64) * d))

    def realize(self) -> np.ndarray:
        return realize_matrix(self.spec, self.codes)

    def __eq__(self, other):
        return (
            isinstance(other, SquareMatrix)
            and self.spec == other.spec
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self):
        return hash((self.spec, self.codes.tobytes()))

    def __repr__(self):
        return f"SquareMatrix(n={self.n}, q={self.spec.q}, {self.codes.tolist()})"


@dataclass(frozen=True, eq=False)
class VectorQ:
    spec: FieldSpec
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64).reshape(-1)
        if codes.min(initial=0) < 0 or codes.max(initial=0) >= self.spec.q:
            raise FieldError("entry code out of range")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @classmethod
    def from_entries(cls, spec: FieldSpec, entries) -> VectorQ:
        return cls(spec, [e.code if isinstance(e, FieldElement) else int(e) % spec.q for e in entries])

    @classmethod
    def zero(cls, spec: FieldSpec, n: int) -> VectorQ:
        return cls(spec, np.zeros(n, dtype=np.int64))

    @classmethod
    def unit(cls, spec: FieldSpec, n: int, i: int) -> VectorQ:
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        return cls(spec, v)

    @property
    def n(self) -> int:
        return len(self.codes)

    def __add__(self, other: VectorQ) -> VectorQ:
        return VectorQ(self.spec, self.spec.add(self.codes, other.codes))

    def __sub__(self, other: VectorQ) -> VectorQ:
        return VectorQ(self.spec, self.spec.sub(self.codes, other.codes))

    def scale(self, c) -> VectorQ:
        c = c.code if isinstance(c, FieldElement) else int(c)
        return VectorQ(self.spec, self.spec.mul(self.codes, c))

    def apply(self, m: SquareMatrix) -> VectorQ:
        if m.n != self.n:
            raise DimensionMismatch("matrix/vector dimension mismatch")
        return VectorQ(self.spec, linalg.matmul(self.spec, m.codes, self.codes[:, None])[:, 0])

    def kron(self, other: VectorQ) -> VectorQ:
        return VectorQ(self.spec, self.spec.mul(self.codes[:, None], other.codes[None, :]).reshape(-1))

    def support(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.codes)[0]]

    def is_zero(self) -> bool:
        return not self.codes.any()

    def realize(self) -> np.ndarray:
        return realize_vector(self.spec, self.codes)

    def lex_key(self) -> tuple[int, ...]:
        return tuple(self.realize().tolist())

    def to_text(self) -> str:
        """Flat comma list of all coefficients, entry by entry."""
        return ",".join(str(int(c)) for c in self.realize())

    @classmethod
    def from_text(cls, spec: FieldSpec, text: str, n: int | None = None) -> VectorQ:
        try:
            flat = [int(t) for t in text.replace(" ", "").split(",") if t != ""]
        except ValueError as exc:
            raise FieldError(f"bad vector text {text!r}") from exc
        if len(flat) % spec.f or (n is not None and len(flat) != n * spec.f):
            raise DimensionMismatch(f"vector {text!r} has {len(flat)} coefficients")
        if any(c < 0 or c >= spec.p for c in flat):
            raise FieldError(f"coefficient out of range in {text!r}")
        return cls(spec, contract_vector(spec, np.array(flat, dtype=np.int64)))

    def __eq__(self, other):
        return isinstance(other, VectorQ) and self.spec == other.spec and np.array_equal(self.codes, other.codes)

    def __hash__(self):
        return hash((self.spec, self.codes.tobytes()))

    def __repr__(self):
        return f"VectorQ({self.to_text()})"


# --- realisation over Z/p -------------------------------------------------------


def _mult_blocks(spec: FieldSpec) -> np.ndarray:
    cache = spec._cache
    if "mult_blocks" not in cache:
        cache["mult_blocks"] = np.stack([spec.mult_matrix(c) for c in range(spec.q)])
    return cache["mult_blocks"]


def realize_matrix(spec: FieldSpec, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    f = spec.f
    if f == 1:
        return codes.astype(np.uint8)
    n = codes.shape[0]
    blocks = _mult_blocks(spec)[codes]  # n, n, f, f
    return blocks.transpose(0, 2, 1, 3).reshape(n * f, n * f).astype(np.uint8)


def contract_matrix(spec: FieldSpec, real) -> np.ndarray:
    """Inverse of realize_matrix for GF(q)-linear realised matrices."""
    real = np.asarray(real, dtype=np.int64)
    f = spec.f
    if f == 1:
        return real.copy()
    n = real.shape[0] // f
    first_cols = real.reshape(n, f, n, f)[:, :, :, 0]  # coefficients of entry (i, j)
    return (first_cols.transpose(0, 2, 1) * (spec.p ** np.arange(f))).sum(axis=-1)


def realize_vector(spec: FieldSpec, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    if spec.f == 1:
        return codes.astype(np.uint8)
    digits = (codes[..., None] // (spec.p ** np.arange(spec.f))) % spec.p
    return digits.reshape(*codes.shape[:-1], -1).astype(np.uint8)


def contract_vector(spec: FieldSpec, real) -> np.ndarray:
    real = np.asarray(real, dtype=np.int64)
    if spec.f == 1:
        return real.copy()
    digits = real.reshape(*real.shape[:-1], -1, spec.f)
    return (digits * (spec.p ** np.arange(spec.f))).sum(axis=-1)


def frobenius_block(spec: FieldSpec, n: int, d: int) -> np.ndarray:
    """Realised entry-wise map v -> v^(p^d) on GF(q)^n."""
    phi = spec.frobenius_matrix(d) if spec.f > 1 else np.eye(1, dtype=np.int64)
    return np.kron(np.eye(n, dtype=np.int64), phi).astype(np.uint8)


def realize_semilinear(spec: FieldSpec, codes, d: int) -> np.ndarray:
    """Realised map v -> M sigma^d(v)."""
    M = realize_matrix(spec, codes).astype(np.int64)
    F = frobenius_block(spec, np.asarray(codes).shape[0], d).astype(np.int64)
    return ((M @ F) % spec.p).astype(np.uint8)
