"""Groups of symplectic type: the monomial scaffold N = Z D1 S, regular partitions
of W = F_r^k, the explicit base vectors, and normalizers built by lifting
automorphisms of N.

Basis indexing: basis vector u_{i+1} corresponds to the vector of F_r^k whose
little-endian base-r digits are i, so u_1 is the zero vector and e_j has index
r^(j-1).  For r = 2 this puts <e1, e2> on u_1..u_4.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from . import fp
from .field import FieldSpec, primitive_element, root_of_unity
from .group import (
    GroupError,
    MatrixGroup,
    Closure,
    close_realized,
)
from .matrix import SquareMatrix, VectorQ, realize_matrix


class SymplecticError(ValueError):
    pass


class RootOfUnityMissing(SymplecticError):
    pass


class CaseNotCovered(SymplecticError):
    pass


class NotMonomial(SymplecticError):
    pass


class EvenCharacteristic(SymplecticError):
    pass


class BadIndexing(SymplecticError):
    pass


class WrongCharacterClass(SymplecticError):
    pass


class NormalizerError(GroupError):
    pass


# --- indexing ---------------------------------------------------------------


def index_to_vector(i: int, r: int, k: int) -> tuple[int, ...]:
    return tuple((i // r**j) % r for j in range(k))


def vector_to_index(v, r: int) -> int:
    return sum(int(c) % r * r**j for j, c in enumerate(v))


def unit_vector(j: int, k: int) -> tuple[int, ...]:
    """e_j, 1-based."""
    return tuple(1 if t == j - 1 else 0 for t in range(k))


def _vadd(a, b, r):
    return tuple((x + y) % r for x, y in zip(a, b))


# --- the monomial scaffold --------------------------------------------------


@dataclass
class MonomialStructure:
    """N = Z x D1 . S on GF(q)^(r^k) in the indexed basis."""

    r: int
    k: int
    spec: FieldSpec
    zeta: int  # code of the primitive r-th root of unity
    D1_gens: list[SquareMatrix]
    S_gens: list[SquareMatrix]
    Z_gen: SquareMatrix

    @property
    def n(self) -> int:
        return self.r**self.k

    def vector(self, i: int) -> tuple[int, ...]:
        return index_to_vector(i, self.r, self.k)

    def index(self, v) -> int:
        if len(v) != self.k:
            raise BadIndexing(f"expected a vector of length {self.k}")
        return vector_to_index(v, self.r)

    def e(self, j: int) -> int:
        """Basis index of e_j (1-based j)."""
        return self.r ** (j - 1)

    @property
    def extraspecial_gens(self) -> list[SquareMatrix]:
        return list(self.D1_gens) + list(self.S_gens)

    def generators(self) -> list[SquareMatrix]:
        return [self.Z_gen] + self.extraspecial_gens

    def group(self) -> MatrixGroup:
        G = MatrixGroup.from_matrices(self.generators(), name=f"N({self.r},{self.k},{self.spec.q})")
        return G.enumerate()

    def check(self) -> None:
        """Assert the structural invariants by direct enumeration of D1 and S."""
        n, r, k = self.n, self.r, self.k
        S = close_realized(self.spec.p, [g.realize() for g in self.S_gens])
        D = close_realized(self.spec.p, [g.realize() for g in self.D1_gens])
        assert S.order == r**k and D.order == r**k
        for g in self.S_gens:
            c = g.codes
            assert np.all((c == 0) | (c == 1)) and np.all(c.sum(axis=0) == 1)
        # regular on the basis: each basis vector is hit exactly once from u1
        starts = np.array([np.argmax(contract(self.spec, s)[:, 0]) for s in S.elements])
        assert sorted(starts.tolist()) == list(range(n))
        diag_sets = []
        for d in D.elements:
            c = contract(self.spec, d)
            assert np.count_nonzero(c - np.diag(np.diag(c))) == 0
            diag = np.diag(c)
            assert diag[0] == 1
            vals, counts = np.unique(diag, return_counts=True)
            o = len(vals)
            # entries are exactly the o-th roots of unity, equally often
            assert len(set(counts.tolist())) == 1 and counts[0] * o == n
            assert all(self.spec.element(int(v)) ** o == self.spec.one for v in vals)
            diag_sets.append(tuple(diag.tolist()))
        # pairwise distinct characters of D1
        assert len(set(diag_sets)) == len(diag_sets)


def contract(spec: FieldSpec, real: np.ndarray) -> np.ndarray:
    from .matrix import contract_matrix

    return contract_matrix(spec, real)


def build_monomial_normal(r: int, k: int, spec: FieldSpec) -> MonomialStructure:
    if (spec.q - 1) % r:
        raise RootOfUnityMissing(f"GF({spec.q}) has no primitive {r}-th root of unity")
    if k < 1:
        raise CaseNotCovered("need k >= 1")
    zeta = root_of_unity(spec, r)
    n = r**k
    powers = [(zeta**e).code for e in range(r)]
    D1, S = [], []
    for j in range(1, k + 1):
        D1.append(SquareMatrix.diagonal(spec, [powers[index_to_vector(i, r, k)[j - 1]] for i in range(n)]))
        ej = unit_vector(j, k)
        images = [vector_to_index(_vadd(index_to_vector(i, r, k), ej, r), r) for i in range(n)]
        S.append(SquareMatrix.permutation(spec, images))
    Zg = SquareMatrix.scalar(spec, n, primitive_element(spec).code)
    return MonomialStructure(r, k, spec, zeta.code, D1, S, Zg)


@dataclass
class MonomialElement:
    delta: SquareMatrix
    pi: tuple[int, ...]  # basis index i goes to pi[i]

    def matrix(self) -> SquareMatrix:
        return self.delta @ SquareMatrix.permutation(self.delta.spec, self.pi)

    def diagonal(self) -> list[int]:
        return [int(c) for c in np.diag(self.delta.codes)]


def monomial_decompose(g: SquareMatrix) -> MonomialElement:
    """g = delta(g) pi(g) with pi(g) the 0/1 pattern of g."""
    c = g.codes
    nz = c != 0
    if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
        raise NotMonomial("matrix is not monomial")
    pi = tuple(int(np.argmax(nz[:, j])) for j in range(g.n))
    diag = np.zeros(g.n, dtype=np.int64)
    for j, i in enumerate(pi):
        diag[i] = c[i, j]
    return MonomialElement(SquareMatrix.diagonal(g.spec, diag), pi)


def is_monomial(g: SquareMatrix) -> bool:
    nz = g.codes != 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


# --- regular partitions of W ------------------------------------------------


@dataclass
class WPartition:
    r: int
    k: int
    case: int
    parts: list[list[tuple[int, ...]]]

    @property
    def size(self) -> int:
        return self.r**self.k

    def labels(self) -> list[int]:
        """Part number of each basis index."""
        lab = [-1] * self.size
        for t, part in enumerate(self.parts):
            for v in part:
                lab[vector_to_index(v, self.r)] = t
        return lab

    def bound(self) -> bool | None:
        """The cardinality bound for this case, or None where the size exclusion applies."""
        W = self.size
        if self.case == 1:
            return None if W == 3 else 4 * len(self.parts[0]) < W
        if self.case == 2:
            return None if W == 9 else 4 * (len(self.parts[1]) + 2) < W
        return None if W == 16 else 4 * len(self.parts[2]) < W

    def stabilizer_count(self) -> int:
        """Number of elements of GL(k, r) fixing every part setwise (1 means regular)."""
        return _gl_part_stabilizer(self.r, self.k, self.labels())

    def is_regular(self) -> bool:
        return self.stabilizer_count() == 1


def _gl_part_stabilizer(r: int, k: int, labels: list[int]) -> int:
    """Backtrack over images of e_1..e_k; every element of GL(k,r) is reached once."""
    vecs = [index_to_vector(i, r, k) for i in range(r**k)]
    count = 0

    def extend(images, span_map):
        nonlocal count
        t = len(images)
        if t == k:
            count += 1
            return
        e = unit_vector(t + 1, k)
        for cand in range(r**k):
            if labels[cand] != labels[vector_to_index(e, r)]:
                continue
            img = vecs[cand]
            new_map = dict(span_map)
            ok = True
            for src, dst in span_map.items():
                for c in range(1, r):
                    s = vector_to_index(_vadd(vecs[src], tuple(c * x for x in e), r), r)
                    d = vector_to_index(_vadd(vecs[dst], tuple(c * x for x in img), r), r)
                    if labels[s] != labels[d]:
                        ok = False
                        break
                    new_map[s] = d
                if not ok:
                    break
            if not ok:
                continue
            if len(set(new_map.values())) != len(new_map):
                continue  # images dependent
            extend(images + [cand], new_map)

    extend([], {0: 0})
    return count


def w_partition(r: int, k: int) -> WPartition:
    if r == 2 and k <= 2:
        raise CaseNotCovered("r = 2 needs k >= 3")
    if k < 1:
        raise CaseNotCovered("need k >= 1")
    W = [index_to_vector(i, r, k) for i in range(r**k)]
    e = [None] + [unit_vector(j, k) for j in range(1, k + 1)]

    def rest(*taken):
        used = set(itertools.chain(*taken))
        return [v for v in W if v not in used]

    if r >= 3 and k == 1:
        p1 = [e[1]]
        return WPartition(r, k, 1, [p1, rest(p1)])
    if r >= 3:
        p1 = [e[1]]
        p2 = [e[j] for j in range(2, k + 1)] + [_vadd(e[j], e[j + 1], r) for j in range(1, k)]
        return WPartition(r, k, 2, [p1, p2, rest(p1, p2)])
    p1, p2 = [e[1]], [e[2]]
    if k == 3:
        p3 = [e[3]]
    else:
        p3 = [e[j] for j in range(3, k + 1)] + [_vadd(e[j], e[j + 1], r) for j in range(2, k)]
        p3.append(_vadd(e[k], e[1], r))
    return WPartition(r, k, 3, [p1, p2, p3, rest(p1, p2, p3)])


# --- base vectors -----------------------------------------------------------


def _vec(spec: FieldSpec, n: int, entries: dict[int, int]) -> VectorQ:
    codes = np.zeros(n, dtype=np.int64)
    for i, c in entries.items():
        codes[i] = c
    return VectorQ(spec, codes)


def symplectic_vectors_r_odd(M: MonomialStructure) -> tuple[VectorQ, VectorQ]:
    if M.r < 3:
        raise CaseNotCovered("needs an odd prime r")
    spec, n, r, k = M.spec, M.n, M.r, M.k
    alpha = primitive_element(spec).code
    x = _vec(spec, n, {0: 1})
    if n == 3:
        return x, _vec(spec, n, {1: alpha, 2: 1})
    P = w_partition(r, k)
    if k == 1:
        return x, _vec(spec, n, {vector_to_index(v, r): 1 for v in P.parts[1]})
    if n == 9:
        y = {i: 1 for i in range(n) if i not in (M.e(1), M.e(2))}
        y[M.e(1)] = alpha
        return x, _vec(spec, n, y)
    y = {vector_to_index(v, r): 1 for v in P.parts[2]}
    y[M.e(1)] = alpha
    return x, _vec(spec, n, y)


def gl4_vectors(spec: FieldSpec) -> tuple[VectorQ, VectorQ]:
    """The dimension four pair (x0, y0) for N = Z<d1, d2, s1, s2>."""
    if spec.p == 2:
        raise EvenCharacteristic("needs odd q")
    a = primitive_element(spec)
    q = spec.q
    if q == 3:
        return _vec(spec, 4, {0: 1}), _vec(spec, 4, {0: 1, 2: 1, 3: 1})
    if q == 9:
        return _vec(spec, 4, {0: 1, 2: 1, 3: 1}), _vec(spec, 4, {1: 1, 2: 1, 3: a.code})
    if q == 5:
        return _vec(spec, 4, {0: 1, 1: 1, 2: 2}), _vec(spec, 4, {1: 1, 2: 1, 3: 2})
    assert a**8 != spec.one
    return _vec(spec, 4, {0: 1}), _vec(spec, 4, {1: 1, 2: a.code, 3: a.inverse().code})


def gl4_branch(q: int) -> str:
    return f"gl4-q{q}" if q in (3, 5, 9) else "gl4-generic"


def symplectic_vectors_r2(M: MonomialStructure) -> tuple[VectorQ, VectorQ]:
    if M.r != 2 or M.k < 3:
        raise CaseNotCovered("needs r = 2 and k >= 3")
    spec, n, k = M.spec, M.n, M.k
    if [M.e(1), M.e(2)] != [1, 2]:
        raise BadIndexing("<e1, e2> must sit on u1..u4")
    x0, y0 = gl4_vectors(spec)
    if len(y0.support()) != 3:
        raise BadIndexing("y0 must combine exactly three basis vectors")
    x = VectorQ(spec, np.concatenate([y0.codes, np.zeros(n - 4, dtype=np.int64)]))
    v = np.zeros(n, dtype=np.int64)
    if n == 16:
        for i in range(4, 16):
            v[i] = 1
        v[M.e(3)] = 0
        v[M.e(4)] = 2 % spec.p
    else:
        P = w_partition(2, k)
        for u in P.parts[3]:
            i = vector_to_index(u, 2)
            if i >= 4:
                v[i] = 1
    y = VectorQ(spec, np.concatenate([x0.codes, np.zeros(n - 4, dtype=np.int64)])) + VectorQ(spec, v)
    return x, y


def symplectic_vectors(M: MonomialStructure) -> tuple[VectorQ, VectorQ, str]:
    """Dispatch on (r, k, q); returns the pair and the branch name."""
    if M.r >= 3:
        if M.n == 3:
            b = "W3"
        elif M.k == 1:
            b = "k1"
        elif M.n == 9:
            b = "W9"
        else:
            b = "generic"
        return (*symplectic_vectors_r_odd(M), f"r-odd-{b}")
    if M.k == 1:
        return _vec(M.spec, 2, {0: 1}), _vec(M.spec, 2, {1: 1}), "n2"
    if M.k == 2:
        return (*gl4_vectors(M.spec), gl4_branch(M.spec.q))
    return (*symplectic_vectors_r2(M), "r2-W16" if M.n == 16 else "r2-generic")


# --- the non-monomial case --------------------------------------------------


def quaternion_pair(spec: FieldSpec) -> tuple[SquareMatrix, SquareMatrix]:
    """i, j in GL(2, q) with i^2 = j^2 = -1 and ij = -ji."""
    if spec.p == 2:
        raise EvenCharacteristic("needs odd q")
    minus_one = spec.neg(1)
    for a in spec.lex_codes():
        for b in spec.lex_codes():
            if spec.add(spec.mul(a, a), spec.mul(b, b)) == minus_one:
                i = SquareMatrix.from_entries(spec, [[0, minus_one], [1, 0]])
                j = SquareMatrix.from_entries(spec, [[a, b], [b, spec.neg(a)]])
                return i, j
    raise AssertionError("a^2 + b^2 = -1 is always solvable")  # unreachable


@dataclass
class NonmonomialStructure:
    """N = Q * N1 * Z on W (x) V, with W two-dimensional; w_a (x) u_i has index a (n/2) + i."""

    spec: FieldSpec
    k: int  # n = 2^k
    quat: tuple[SquareMatrix, SquareMatrix]
    inner: MonomialStructure

    @property
    def n(self) -> int:
        return 2**self.k

    @property
    def extraspecial_gens(self) -> list[SquareMatrix]:
        I2 = SquareMatrix.identity(self.spec, 2)
        Iv = SquareMatrix.identity(self.spec, self.n // 2)
        return [q.kron(Iv) for q in self.quat] + [I2.kron(g) for g in self.inner.extraspecial_gens]

    @property
    def Z_gen(self) -> SquareMatrix:
        return SquareMatrix.scalar(self.spec, self.n, primitive_element(self.spec).code)

    def generators(self) -> list[SquareMatrix]:
        return [self.Z_gen] + self.extraspecial_gens

    def group(self) -> MatrixGroup:
        return MatrixGroup.from_matrices(self.generators(), name=f"Nq({self.n},{self.spec.q})").enumerate()


def build_nonmonomial_normal(k: int, spec: FieldSpec) -> NonmonomialStructure:
    if spec.q % 4 != 3:
        raise WrongCharacterClass("the quaternion case needs q = -1 mod 4")
    if k < 2:
        raise CaseNotCovered("needs n >= 4")
    return NonmonomialStructure(spec, k, quaternion_pair(spec), build_monomial_normal(2, k - 1, spec))


def nonmonomial_vectors(S: NonmonomialStructure) -> tuple[VectorQ, VectorQ, str]:
    spec, n = S.spec, S.n
    if spec.q % 4 != 3:
        raise WrongCharacterClass("the quaternion case needs q = -1 mod 4")
    h = n // 2
    if h == 2:
        return _vec(spec, n, {0: 1}), _vec(spec, n, {h: 1, 1: 1}), "dimV2"
    if h == 4:
        x0, y0 = gl4_vectors(spec)
        x1, y1, branch = y0, x0, gl4_branch(spec.q)
    else:
        x1, y1 = symplectic_vectors_r2(S.inner)
        branch = "r2-W16" if h == 16 else "r2-generic"
    x = np.zeros(n, dtype=np.int64)
    x[:h] = x1.codes
    x[h] = spec.add(x[h], 1)
    y = np.zeros(n, dtype=np.int64)
    y[:h] = y1.codes
    return VectorQ(spec, x), VectorQ(spec, y), f"dimV{h}-{branch}"


# --- normalizers by automorphism lifting ------------------------------------


def sp_order(r: int, k: int) -> int:
    o = r ** (k * k)
    for i in range(1, k + 1):
        o *= r ** (2 * i) - 1
    return o


def orthogonal_order(k: int, sign: int) -> int:
    """|O^(+/-)(2k, 2)|."""
    o = 2 * 2 ** (k * (k - 1)) * (2**k - sign)
    for i in range(1, k):
        o *= 2 ** (2 * i) - 1
    return o


def form_kind(r: int, q: int, monomial: bool = True) -> str:
    if r != 2 or q % 4 == 1:
        return "Sp"
    return "O+" if monomial else "O-"


def outer_order(r: int, k: int, kind: str) -> int:
    if kind == "Sp":
        return sp_order(r, k)
    return orthogonal_order(k, 1 if kind == "O+" else -1)


@dataclass
class ExtraspecialAction:
    """Realised generators of N together with coset coordinates of N/Z."""

    spec: FieldSpec
    n: int
    r: int
    gens: list[np.ndarray]  # the 2k extraspecial generators, realised
    scalars: np.ndarray  # realised scalar matrices, one per element of GF(q)*
    elements: np.ndarray = field(default=None, repr=False)
    coords: np.ndarray = field(default=None, repr=False)
    index: dict = field(default=None, repr=False)

    def __post_init__(self):
        p, r = self.spec.p, self.r
        m = len(self.gens)
        N = self.gens[0].shape[0]
        reps, coords = [], []
        for a in itertools.product(range(r), repeat=m):
            g = np.eye(N, dtype=np.uint8)
            for gi, e in zip(self.gens, a):
                for _ in range(e):
                    g = fp.mul(p, g, gi)
            reps.append(g)
            coords.append(a)
        reps = np.stack(reps)
        els = np.concatenate([fp.rmul(p, reps, z) for z in self.scalars])
        self.elements = els
        self.coords = np.tile(np.array(coords, dtype=np.int64), (len(self.scalars), 1))
        self.index = {key: i for i, key in enumerate(fp.keys(els))}
        if len(self.index) != len(els):
            raise NormalizerError("generators do not give an extraspecial group of the expected order")

    @property
    def p(self) -> int:
        return self.spec.p

    def coord(self, g: np.ndarray) -> np.ndarray:
        return self.coords[self.index[np.ascontiguousarray(g).tobytes()]]


def _power(p, g, e):
    out = np.eye(g.shape[0], dtype=np.uint8)
    for _ in range(e):
        out = fp.mul(p, out, g)
    return out


def _commutator(p, a, b, ai, bi):
    return fp.mul(p, fp.mul(p, ai, bi), fp.mul(p, a, b))


def random_automorphism(X: ExtraspecialAction, rng: random.Random) -> list[np.ndarray]:
    """Images of the generators under a random automorphism of N fixing Z pointwise."""
    p, r = X.p, X.r
    gens = X.gens
    invs = [fp.inverse(p, g) for g in gens]
    powers = [_power(p, g, r).tobytes() for g in gens]
    comms = {
        (i, j): _commutator(p, gens[i], gens[j], invs[i], invs[j]).tobytes()
        for i in range(len(gens))
        for j in range(i)
    }
    els = X.elements
    el_pow = [_power(p, g, r).tobytes() for g in els]
    el_inv = [fp.inverse(p, g) for g in els]
    m = len(gens)
    chosen: list[int] = []

    def extend() -> bool:
        i = len(chosen)
        if i == m:
            return True
        cands = [c for c in range(len(els)) if el_pow[c] == powers[i]]
        rng.shuffle(cands)
        for c in cands:
            ok = all(
                _commutator(p, els[c], els[chosen[j]], el_inv[c], el_inv[chosen[j]]).tobytes() == comms[(i, j)]
                for j in range(i)
            )
            if ok:
                chosen.append(c)
                if extend():
                    return True
                chosen.pop()
        return False

    if not extend():
        raise NormalizerError("no automorphism found")
    return [els[c] for c in chosen]


def lift_automorphism(X: ExtraspecialAction, images) -> np.ndarray:
    """The realised g with g n_i g^-1 = images[i] (unique up to scalars)."""
    p = X.p
    N = X.gens[0].shape[0]
    I = np.eye(N, dtype=np.int64)
    blocks = []
    pairs = list(zip(X.gens, images))
    if X.spec.f > 1:
        # stay GF(q)-linear: commute with multiplication by the primitive element
        mu = realize_matrix(X.spec, np.eye(X.n, dtype=np.int64) * primitive_element(X.spec).code)
        pairs.append((mu, mu))
    for n_i, m_i in pairs:
        blocks.append(np.kron(m_i.astype(np.int64), I) - np.kron(I, n_i.T.astype(np.int64)))
    ker = fp.nullspace(p, np.vstack(blocks))
    if len(ker) == 0:
        raise NormalizerError("automorphism does not lift")
    g = ker[0].reshape(N, N)
    if fp.rank(p, g) != N:
        raise NormalizerError("lifted map is singular")
    gi = fp.inverse(p, g)
    for n_i, m_i in zip(X.gens, images):
        if not np.array_equal(fp.mul(p, fp.mul(p, g, n_i), gi), m_i):
            raise NormalizerError("lift check failed")
    return g


def _action_matrix(X: ExtraspecialAction, images) -> np.ndarray:
    return np.stack([X.coord(m) for m in images], axis=1).astype(np.uint8)


def _scalar_stack(spec: FieldSpec, n: int) -> np.ndarray:
    codes = [c for c in spec.lex_codes() if c]
    return np.stack([realize_matrix(spec, np.eye(n, dtype=np.int64) * c) for c in codes])


def extraspecial_action(struct) -> ExtraspecialAction:
    r = getattr(struct, "r", 2)
    gens = [g.realize() for g in struct.extraspecial_gens]
    return ExtraspecialAction(struct.spec, struct.n, r, gens, _scalar_stack(struct.spec, struct.n))


def _struct_params(struct) -> tuple[int, int, bool]:
    if isinstance(struct, NonmonomialStructure):
        return 2, struct.k, False
    return struct.r, struct.k, True


def normalizer_order(struct) -> int:
    r, k, mono = _struct_params(struct)
    q = struct.spec.q
    return (q - 1) * r ** (2 * k) * outer_order(r, k, form_kind(r, q, mono))


@dataclass
class NormalizerData:
    """A normalizer of N with its action on N/Z; image is None when too large to track."""

    struct: object
    action: ExtraspecialAction
    group: MatrixGroup
    kind: str
    seed: int
    image: Closure | None = None


def _group_name(struct) -> str:
    r, k, mono = _struct_params(struct)
    return f"N({r},{k},{struct.spec.q})" if mono else f"Nq({struct.n},{struct.spec.q})"


def build_normalizer(struct, seed: int = 0, track_image: bool = True, lifts: int = 4, max_tries: int = 200):
    """N_GL(V)(N), generated by N and lifts of random automorphisms of N.

    With track_image the image in Aut(N/Z) is followed exactly and lifting stops
    once it is the full isometry group of the commutator (and squaring) form, so
    the order is known.  Otherwise a fixed number of random lifts is added and
    the order is left open.
    """
    r, k, mono = _struct_params(struct)
    spec = struct.spec
    kind = form_kind(r, spec.q, mono)
    target = outer_order(r, k, kind)
    X = extraspecial_action(struct)
    rng = random.Random(seed)
    found = []
    image = None
    if track_image:
        image = Closure(r, 2 * k, cap=target)
        tries = 0
        while image.order < target:
            tries += 1
            if tries > max_tries:
                raise NormalizerError(f"image stuck at order {image.order} < {target}")
            imgs = random_automorphism(X, rng)
            A = _action_matrix(X, imgs)
            if A in image:
                continue
            found.append(lift_automorphism(X, imgs))
            image.add(A)
    else:
        for _ in range(lifts):
            found.append(lift_automorphism(X, random_automorphism(X, rng)))
    gens = [struct.Z_gen.realize()] + list(X.gens) + found
    G = MatrixGroup(
        spec,
        struct.n,
        gens,
        name=f"normalizer {_group_name(struct)}",
        order=(spec.q - 1) * r ** (2 * k) * target if track_image else None,
        meta={"normalizer_method": f"automorphism-lift seed={seed} image={kind}", "acting_group": "full"},
    )
    return NormalizerData(struct, X, G, kind, seed, image)


def normalizer(struct, seed: int = 0) -> MatrixGroup:
    return build_normalizer(struct, seed).group


def action_matrix(X: ExtraspecialAction, g: np.ndarray) -> np.ndarray:
    """Matrix of conjugation by g on N/Z in the generator coordinates."""
    gi = fp.inverse(X.p, g)
    return _action_matrix(X, [fp.mul(X.p, fp.mul(X.p, g, n), gi) for n in X.gens])


def lift_matrix(X: ExtraspecialAction, A: np.ndarray) -> np.ndarray:
    """A normalizing element inducing the isometry A of N/Z."""
    p, r = X.p, X.r
    pows = [_power(p, g, r).tobytes() for g in X.gens]
    imgs = []
    for i in range(len(X.gens)):
        col = np.asarray(A[:, i], dtype=np.int64) % r
        hits = np.nonzero(np.all(X.coords == col, axis=1))[0]
        pick = next((h for h in hits if _power(p, X.elements[h], r).tobytes() == pows[i]), None)
        if pick is None:
            raise NormalizerError("matrix is not an isometry of N/Z")
        imgs.append(X.elements[pick])
    return lift_automorphism(X, imgs)


def hadamard(struct: MonomialStructure, j: int) -> SquareMatrix:
    """Unnormalised Hadamard matrix on tensor factor j (1-based digit)."""
    if struct.r != 2:
        raise CaseNotCovered("needs r = 2")
    spec, n, k = struct.spec, struct.n, struct.k
    m = np.zeros((n, n), dtype=np.int64)
    minus = spec.neg(1)
    for v in range(n):
        a = index_to_vector(v, 2, k)
        for b in (0, 1):
            w = list(a)
            w[j - 1] = b
            m[vector_to_index(w, 2), v] = minus if a[j - 1] and b else 1
    return SquareMatrix(spec, m)


def _unitriangular_gens(struct: MonomialStructure) -> list[SquareMatrix]:
    """Quadratic phases diag((-1)^(v_i v_j)) and unit transvections v -> v + v_j e_i, i < j."""
    spec, n, k = struct.spec, struct.n, struct.k
    minus = spec.neg(1)
    out = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            diag = [minus if index_to_vector(t, 2, k)[i - 1] and index_to_vector(t, 2, k)[j - 1] else 1 for t in range(n)]
            out.append(SquareMatrix.diagonal(spec, diag))
            images = []
            for t in range(n):
                v = list(index_to_vector(t, 2, k))
                v[i - 1] = (v[i - 1] + v[j - 1]) % 2
                images.append(vector_to_index(v, 2))
            out.append(SquareMatrix.permutation(spec, images))
    return out


def _ell_part(n: int, ell: int) -> int:
    out = 1
    while n % ell == 0:
        n //= ell
        out *= ell
    return out


def _image_sylow(image: Closure, ell: int) -> list[np.ndarray]:
    """Generators of a Sylow ell-subgroup of an enumerated matrix group.

    Grows P by ell-elements normalizing it; a proper subgroup of a Sylow
    subgroup always has a larger normalizer inside it, so the scan cannot stall.
    """
    p = image.p
    target = _ell_part(image.order, ell)
    P = Closure(p, image.N, cap=target)
    els = image.elements
    orders = _element_orders(p, els)
    cand = [i for i in range(len(els)) if orders[i] > 1 and _ell_part(orders[i], ell) == orders[i]]
    while P.order < target:
        grown = False
        for i in cand:
            h = els[i]
            if h in P:
                continue
            hi = fp.inverse(p, h)
            if all(fp.mul(p, fp.mul(p, h, g), hi) in P for g in P.gens):
                P.add(h)
                grown = True
                break
        if not grown:
            raise NormalizerError("Sylow search stalled")
    return list(P.gens)


def _element_orders(p: int, els: np.ndarray) -> list[int]:
    from .group import element_orders

    return [int(o) for o in element_orders(p, els)]


def sylow_acting_group(data: NormalizerData, ell: int) -> MatrixGroup:
    """N extended by a Sylow ell-subgroup of the image; a coprime acting group when ell != p.

    For r = 2 in the monomial case the Sylow 2-subgroup is explicit: the
    unitriangular lifts together with one Hadamard factor.
    """
    struct, X = data.struct, data.action
    r, k, mono = _struct_params(struct)
    spec = struct.spec
    full_part = _ell_part(outer_order(r, k, data.kind), ell)
    if mono and r == 2 and ell == 2:
        extra = [g.realize() for g in _unitriangular_gens(struct)] + [hadamard(struct, 1).realize()]
        P = close_realized(2, [action_matrix(X, g) for g in extra], cap=full_part)
        if P.order != full_part:
            raise NormalizerError(f"explicit 2-subgroup has image order {P.order}, expected {full_part}")
        lifts = extra
    else:
        if data.image is None:
            raise NormalizerError("needs the tracked image")
        lifts = [lift_matrix(X, A) for A in _image_sylow(data.image, ell)]
    n_order = (spec.q - 1) * r ** (2 * k)
    if _ell_part(n_order, ell) != n_order:
        raise CaseNotCovered(f"N is not an {ell}-group here")
    gens = [struct.Z_gen.realize()] + list(X.gens) + lifts
    order = n_order * full_part
    G = MatrixGroup(spec, struct.n, gens, name=f"sylow-{ell} {_group_name(struct)}", order=order)
    G.meta = {"normalizer_method": data.group.meta["normalizer_method"], "acting_group": f"sylow-{ell}"}
    return G


def _random_word(p: int, gens, rng: random.Random, length: int = 24) -> np.ndarray:
    g = np.eye(gens[0].shape[0], dtype=np.uint8)
    for _ in range(length):
        g = fp.mul(p, g, gens[rng.randrange(len(gens))])
    return g


def suitable_conjugate(P: MatrixGroup, ambient: MatrixGroup, vectors, seed: int = 0, tries: int = 200):
    """A conjugate gPg^-1 (g in the ambient group) on which the vectors form a base.

    Candidates are the identity and then seeded random words in the ambient
    generators; the check runs on P with the vectors moved by g^-1.  Returns
    (H, attempts) or (None, attempts).
    """
    from .group import verify_base

    p = P.p
    rng = random.Random(seed)
    if P.chain is None and P.order is not None and P.order > 200_000:
        P.build_chain()
    real = [P.vec(v) for v in vectors]
    for attempt in range(tries):
        g = np.eye(P.N, dtype=np.uint8) if attempt == 0 else _random_word(p, ambient.gens, rng)
        gi = fp.inverse(p, g)
        moved = [fp.act_many(p, gi, v[None])[0] for v in real]
        if verify_base(P, moved).verified:
            gens = [fp.mul(p, fp.mul(p, g, h), gi) for h in P.gens]
            H = MatrixGroup(P.spec, P.n, gens, name=P.name + " conjugate", order=P.order)
            H.meta = dict(P.meta)
            H.meta["acting_group"] = f"{P.meta.get('acting_group', 'subgroup')} conjugate #{attempt}"
            return H, attempt + 1
    return None, tries


# --- end-to-end pipeline --------------------------------------------------------

TRACK_LIMIT = 2_000_000


@dataclass
class SymplecticRun:
    struct: object
    vectors: tuple[VectorQ, VectorQ]
    branch: str
    certificate: object
    acting: MatrixGroup
    attempts: int = 0
    full_certificate: object = None

    def supports(self) -> list[list[int]]:
        return [[i + 1 for i in v.support()] for v in self.vectors]


def symplectic_case(r: int, k: int, q: int, nonmonomial: bool = False):
    """The normal subgroup N for the case and the constructed pair (x, y, branch)."""
    from .field import field_of_order

    spec = field_of_order(q)
    if nonmonomial:
        if r != 2:
            raise SymplecticError("the non-monomial case has r = 2")
        struct = build_nonmonomial_normal(k, spec)
        x, y, branch = nonmonomial_vectors(struct)
    else:
        struct = build_monomial_normal(r, k, spec)
        x, y, branch = symplectic_vectors(struct)
    return struct, x, y, branch


def run_symplectic(
    r: int, k: int, q: int, nonmonomial: bool = False, acting: str = "auto", seed: int = 0, method: str = "auto"
) -> SymplecticRun:
    """Build the pair, the normalizer and certify.

    acting="full" checks the pair against the whole normalizer.  acting="sylow"
    uses a conjugate of a Sylow r-subgroup of the normalizer on which the pair is
    a base.  "auto" tries the full normalizer when its order is trackable and
    falls back to the Sylow conjugate when that fails.
    """
    from .group import verify_base

    if acting not in ("auto", "full", "sylow"):
        raise ValueError(f"unknown acting group {acting!r}")
    struct, x, y, branch = symplectic_case(r, k, q, nonmonomial)
    rr, kk, mono = _struct_params(struct)
    track = outer_order(rr, kk, form_kind(rr, q, mono)) <= TRACK_LIMIT
    if acting == "full" and not track:
        raise NormalizerError("normalizer image too large to track; use the Sylow acting group")
    data = build_normalizer(struct, seed=seed, track_image=track)
    full_cert = None
    if acting != "sylow" and track:
        G = data.group
        G.meta["branch"] = branch
        if G.order > 200_000 and method != "enum":
            G.build_chain()
        full_cert = verify_base(G, [x, y], method=method)
        if full_cert.verified or acting == "full":
            return SymplecticRun(struct, (x, y), branch, full_cert, G, 0, full_cert)
    P = sylow_acting_group(data, rr)
    P.meta["branch"] = branch
    H, attempts = suitable_conjugate(P, data.group, [x, y], seed=seed)
    if H is None:
        cert = verify_base(P, [x, y])
        return SymplecticRun(struct, (x, y), branch, cert, P, attempts, full_cert)
    if H.order > 200_000:
        H.build_chain()
    cert = verify_base(H, [x, y])
    return SymplecticRun(struct, (x, y), branch, cert, H, attempts, full_cert)
