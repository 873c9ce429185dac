"""Generic base constructions: imprimitive gluing, strong bases, tensor powers,
semilinear lifts, the deleted permutation module and the fixed-space covering
search for groups with a small vector stabilizer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fp, linalg
from .field import FieldSpec, field_make, primitive_element, subfield_sizes
from .group import (
    GroupError,
    MatrixGroup,
    NoBaseWithin,
    coprimality_check,
    minimal_base_size,
    minimal_subgroups,
    vector_stabilizer,
    verify_base,
)
from .matrix import (
    DimensionMismatch,
    SquareMatrix,
    VectorQ,
    realize_matrix,
    realize_semilinear,
)
from .perm import PermGroup, PreconditionViolated, RegularPartition


class ConstructError(ValueError):
    pass


class LabelCountMismatch(ConstructError):
    pass


class NotABase(ConstructError):
    pass


class ScalarsMissing(ConstructError):
    pass


class NotCoprime(ConstructError):
    pass


class ShapeExcluded(ConstructError):
    pass


class BadZ1(ConstructError):
    pass


class TheoremViolation(AssertionError):
    pass


class NotABaseForH(ConstructError):
    pass


class CoverIsWholeSpace(ConstructError):
    pass


def _lex_field(spec: FieldSpec, nonzero: bool = False) -> list[int]:
    return [c for c in spec.lex_codes() if not (nonzero and c == 0)]


# --- imprimitive gluing ------------------------------------------------------------


@dataclass
class BlockSystem:
    """V = V_1 + ... + V_k with V_i = g_i V_1 and g_1 = 1."""

    blocks: list[list[VectorQ]]
    coset_reps: list[SquareMatrix]
    block_perm_group: PermGroup | None = None

    def check(self) -> None:
        spec = self.coset_reps[0].spec
        if not self.coset_reps[0] == SquareMatrix.identity(spec, self.coset_reps[0].n):
            raise ConstructError("first coset representative must be the identity")
        rows = np.array([v.codes for blk in self.blocks for v in blk])
        if linalg.rank(spec, rows) != self.coset_reps[0].n or len(rows) != self.coset_reps[0].n:
            raise ConstructError("blocks are not independent or do not span V")
        V1 = np.array([v.codes for v in self.blocks[0]])
        for g, blk in zip(self.coset_reps, self.blocks):
            img = np.array([(g @ v).codes for v in self.blocks[0]])
            both = np.vstack([img, [v.codes for v in blk]])
            if linalg.rank(spec, both) != len(V1):
                raise ConstructError("coset representative does not map V_1 onto its block")


def imprimitive_glue(blocks: BlockSystem, x1: VectorQ, y1: VectorQ, labels: RegularPartition):
    """x = sum g_i x_1, y = sum g_i y_1 + a_i g_i x_1 with a_i the block's label in F_p."""
    spec = x1.spec
    k = len(blocks.coset_reps)
    if len(labels.labels) != k or labels.t != spec.p:
        raise LabelCountMismatch(f"need {k} labels with t = p = {spec.p}")
    if x1.n != blocks.coset_reps[0].n or y1.n != x1.n:
        raise DimensionMismatch("vectors do not live in V")
    x = VectorQ.zero(spec, x1.n)
    y = VectorQ.zero(spec, x1.n)
    for g, a in zip(blocks.coset_reps, labels.labels):
        gx = g @ x1
        x = x + gx
        y = y + (g @ y1) + gx.scale(a)
    return x, y


def block_permutation_matrix(spec: FieldSpec, m: int, perm) -> SquareMatrix:
    """Moves block i onto block perm[i], blocks of size m."""
    images = [perm[i] * m + j for i in range(len(perm)) for j in range(m)]
    return SquareMatrix.permutation(spec, images)


def imprimitive_wreath(G1: MatrixGroup, top: PermGroup, name: str = "") -> tuple[MatrixGroup, BlockSystem]:
    """G1 wr top on V_1 + ... + V_k with the coordinate blocks, and its block system.

    The top group must be transitive; coset representatives come from a
    breadth-first walk over its generators starting at block 0.
    """
    spec, m, k = G1.spec, G1.n, top.degree
    gens = []
    for g in G1.square_matrices(G1.gens):
        M = np.eye(m * k, dtype=np.int64)
        M[:m, :m] = g.codes
        gens.append(SquareMatrix(spec, M))
    tops = [block_permutation_matrix(spec, m, list(t.images)) for t in top.gens]
    reps: dict[int, SquareMatrix] = {0: SquareMatrix.identity(spec, m * k)}
    queue = [0]
    while queue:
        i = queue.pop(0)
        for t, T in zip(top.gens, tops):
            j = t.images[i]
            if j not in reps:
                reps[j] = T @ reps[i]
                queue.append(j)
    if len(reps) != k:
        raise ConstructError("top group is not transitive")
    blocks = [[VectorQ.unit(spec, m * k, i * m + j) for j in range(m)] for i in range(k)]
    bs = BlockSystem(blocks, [reps[i] for i in range(k)], top)
    G = MatrixGroup.from_matrices(gens + tops, name=name or f"{G1.name} wr {top.name}")
    return G, bs


def embed_block(v: VectorQ, k: int) -> VectorQ:
    """A vector of V_1 as a vector of the first block of V_1 + ... + V_k."""
    return VectorQ(v.spec, np.concatenate([v.codes, np.zeros(v.n * (k - 1), dtype=np.int64)]))


# --- strong bases ------------------------------------------------------------------


def _scalar_group_present(G: MatrixGroup) -> bool:
    G.enumerate()
    return all(
        realize_matrix(G.spec, np.eye(G.n, dtype=np.int64) * c).tobytes() in G.index for c in range(1, G.spec.q)
    )


def x_gamma(G: MatrixGroup, u1: VectorQ, u2: VectorQ, gamma: int, C1: MatrixGroup | None = None) -> set[int]:
    """{lambda != 1 : some g fixes u1 and maps u1 + gamma u2 to lambda (u1 + gamma u2)}."""
    spec = G.spec
    C1 = C1 or vector_stabilizer(G, u1, "enum")
    v = u1 + u2.scale(gamma)
    imgs = fp.act(G.p, C1.elements, v.realize())
    out = set()
    for lam in range(2, spec.q):
        target = v.scale(lam).realize()
        if np.any(np.all(imgs == target, axis=1)):
            out.add(lam)
    return out


def strong_base_from_base(G: MatrixGroup, u1: VectorQ, u2: VectorQ, check_coprime: bool = True):
    """(u1, u1 + gamma u2) for the first gamma with empty X_gamma; returns (v1, v2, gamma)."""
    G.enumerate()
    if check_coprime and not coprimality_check(G):
        raise NotCoprime(f"p = {G.p} divides |G| = {G.order}")
    if not _scalar_group_present(G):
        raise ScalarsMissing("G must contain every scalar matrix")
    if not verify_base(G, [u1, u2], "enum").verified:
        raise NotABase("u1, u2 is not a base")
    spec = G.spec
    if linalg.rank(spec, np.array([u1.codes, u2.codes])) < 2:
        return u1, u1, None
    C1 = vector_stabilizer(G, u1, "enum")
    for gamma in _lex_field(spec, nonzero=True):
        if not x_gamma(G, u1, u2, gamma, C1):
            return u1, u1 + u2.scale(gamma), gamma
    raise TheoremViolation("every X_gamma is nonempty")


# --- tensor products ----------------------------------------------------------------


@dataclass(frozen=True)
class TensorShape:
    m: int
    t: int
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.m < 2 or self.t < 1:
            raise ConstructError("need m >= 2 and t >= 1")

    @property
    def dim(self) -> int:
        return self.m**self.t

    def __str__(self):
        return f"{self.m}^{self.t}"

    @classmethod
    def parse(cls, text: str) -> TensorShape:
        m, t = text.split("^")
        return cls(int(m), int(t))


def tensor_vector(vs) -> VectorQ:
    out = vs[0]
    for v in vs[1:]:
        out = out.kron(v)
    return out


def tensor_power(v: VectorQ, t: int) -> VectorQ:
    return tensor_vector([v] * t)


def tensor_power_vectors(shape: TensorShape, x1: VectorQ, y1: VectorQ, z1: VectorQ | None = None):
    m, t = shape.m, shape.t
    if (m, t) == (2, 2):
        raise ShapeExcluded("the (2,2) shape is excluded")
    if x1.n != m or y1.n != m:
        raise DimensionMismatch("factor vectors must have dimension m")
    spec = x1.spec
    if linalg.rank(spec, np.array([x1.codes, y1.codes])) < 2:
        raise ConstructError("x1 and y1 must be independent")
    x = tensor_power(x1, t) + tensor_power(y1, t)
    if t == 2:
        if z1 is None or z1.n != m or linalg.span_contains(spec, [x1.codes, y1.codes], z1.codes):
            raise BadZ1("need z1 outside <x1, y1>")
        return x, x1.kron(z1) + y1.kron(x1)
    y = tensor_power(x1, t)
    for i in range(1, t):
        y = y + tensor_vector([x1] * (t - i) + [y1] * i)
    return x, y


def _embed(g: SquareMatrix, pos: int, t: int) -> SquareMatrix:
    spec, m = g.spec, g.n
    eye = SquareMatrix.identity(spec, m)
    out = None
    for i in range(t):
        f = g if i == pos else eye
        out = f if out is None else out.kron(f)
    return out


def factor_permutation_matrix(spec: FieldSpec, m: int, t: int, perm) -> SquareMatrix:
    """Permutation of tensor factors: factor i goes to position perm[i]."""
    images = []
    for idx in itertools.product(range(m), repeat=t):
        new = [0] * t
        for i, j in enumerate(perm):
            new[j] = idx[i]
        images.append(sum(c * m ** (t - 1 - k) for k, c in enumerate(new)))
    return SquareMatrix.permutation(spec, images)


def central_wreath_generators(factor_gens, t: int, with_symmetric: bool = True) -> list[SquareMatrix]:
    spec, m = factor_gens[0].spec, factor_gens[0].n
    gens = [_embed(g, i, t) for g in factor_gens for i in range(t)]
    if with_symmetric and t > 1:
        gens.append(factor_permutation_matrix(spec, m, t, [1, 0] + list(range(2, t))))
        if t > 2:
            gens.append(factor_permutation_matrix(spec, m, t, list(range(1, t)) + [0]))
    return gens


def central_wreath(G1: MatrixGroup, t: int, name: str = "") -> MatrixGroup:
    return MatrixGroup.from_matrices(central_wreath_generators(G1.square_matrices(), t), name=name)


def tensor_22_search(G1: MatrixGroup, x1: VectorQ, x2: VectorQ, check_coprime: bool = True):
    """Base for the central wreath G1 wr_c S2 on V1 (x) V1 with dim V1 = 2.

    Tries u_i = x_i (x) x_i, v_i = x_i (x) x_{3-i} + alpha x_{3-i} (x) x_i, then an
    exhaustive search.  Returns (x, y, branch, G).
    """
    spec = G1.spec
    if G1.n != 2:
        raise DimensionMismatch("factor must be 2-dimensional")
    G1.enumerate()
    if check_coprime and not coprimality_check(G1):
        raise NotCoprime(f"p = {spec.p} divides |G1| = {G1.order}")
    G = central_wreath(G1, 2, name=f"wreath2({G1.name})")
    G.enumerate()
    alpha = primitive_element(spec).code
    xs = [x1, x2]
    if spec.p != 2:
        for i in range(2):
            a, b = xs[i], xs[1 - i]
            u = a.kron(a)
            v = a.kron(b) + b.kron(a).scale(alpha)
            if verify_base(G, [u, v], "enum").verified:
                return u, v, f"candidate-{i + 1}", G
    try:
        size, witness = minimal_base_size(G, max_size=2)
    except NoBaseWithin:
        raise TheoremViolation("no two-element base found") from None
    while len(witness) < 2:
        witness.append(VectorQ.zero(spec, 4))
    return witness[0], witness[1], "exhaustive", G


# --- semilinear lift ------------------------------------------------------------------


def semilinear_group(spec: FieldSpec, n: int, elements, name: str = "") -> MatrixGroup:
    """Group of maps v -> M sigma^d(v) from (SquareMatrix, d) pairs."""
    gens = [realize_semilinear(spec, m.codes, d % spec.f if spec.f > 1 else 0) for m, d in elements]
    return MatrixGroup(spec, n, gens, name=name, semilinear=True)


def linear_part(Gamma: MatrixGroup) -> MatrixGroup:
    """Gamma intersected with GL(V): elements commuting with multiplication by x."""
    Gamma.enumerate()
    spec = Gamma.spec
    if spec.f == 1:
        return Gamma.subgroup(Gamma.elements, name="H")
    xcode = spec.p  # the element x
    S = realize_matrix(spec, np.eye(Gamma.n, dtype=np.int64) * xcode)
    E = Gamma.elements
    keep = np.all(fp.rmul(spec.p, E, S) == fp.lmul(spec.p, S, E), axis=(1, 2))
    H = Gamma.subgroup(E[keep], name="H")
    H.semilinear = False
    return H


def _base_trivial(G: MatrixGroup, vecs) -> bool:
    E = G.elements
    keep = np.ones(len(E), dtype=bool)
    for v in vecs:
        keep &= np.all(fp.act(G.p, E, G.vec(v)) == G.vec(v), axis=1)
    return int(keep.sum()) == 1


def semilinear_lift(Gamma: MatrixGroup, u1: VectorQ, u2: VectorQ, check_coprime: bool = True):
    """(u1, u2 + gamma u1, gamma) for the first gamma giving a base of Gamma."""
    Gamma.enumerate()
    if check_coprime and not coprimality_check(Gamma):
        raise NotCoprime(f"p = {Gamma.p} divides |Gamma| = {Gamma.order}")
    H = linear_part(Gamma)
    if not _base_trivial(H, [u1, u2]):
        raise NotABaseForH("u1, u2 is not a base for the linear part")
    for gamma in _lex_field(Gamma.spec):
        v = u2 + u1.scale(gamma)
        if _base_trivial(Gamma, [u1, v]):
            return u1, v, gamma
    raise TheoremViolation("no gamma gives a base")


def k_sets(Gamma: MatrixGroup, u1: VectorQ, u2: VectorQ) -> dict[bytes, set[int]]:
    """K_g = {alpha : g in C(u1) and C(u2 + alpha u1)} for every non-identity g that occurs."""
    Gamma.enumerate()
    E = Gamma.elements
    fix1 = np.all(fp.act(Gamma.p, E, u1.realize()) == u1.realize(), axis=1)
    out: dict[bytes, set[int]] = {}
    ident = np.eye(Gamma.N, dtype=np.uint8).tobytes()
    for alpha in _lex_field(Gamma.spec):
        v = (u2 + u1.scale(alpha)).realize()
        fixv = np.all(fp.act(Gamma.p, E, v) == v, axis=1)
        for i in np.nonzero(fix1 & fixv)[0]:
            key = E[i].tobytes()
            if key != ident:
                out.setdefault(key, set()).add(alpha)
    return out


def is_proper_subfield_coset(spec: FieldSpec, codes: set[int]) -> bool:
    """True when the set is a + F for a proper subfield F of GF(q)."""
    size = len(codes)
    if size not in subfield_sizes(spec.p, spec.f) or size == spec.q:
        return False
    d = next(d for d in range(1, spec.f + 1) if spec.p**d == size)
    sub = {e.code for e in spec.elements() if (e ** (spec.p**d)) == e}
    a = min(codes)
    return {int(spec.add(a, s)) for s in sub} == codes


# --- deleted permutation module --------------------------------------------------------


def deleted_module_matrix(spec: FieldSpec, perm) -> SquareMatrix:
    """Matrix of a permutation of c points on the sum-zero submodule, basis e_i - e_c."""
    c = len(perm)
    P = np.zeros((c, c), dtype=np.int64)
    P[list(perm), list(range(c))] = 1
    E = np.zeros((c, c - 1), dtype=np.int64)
    E[: c - 1] = np.eye(c - 1, dtype=np.int64)
    E[c - 1] = spec.p - 1
    return SquareMatrix(spec, ((P @ E) % spec.p)[: c - 1])


def deleted_module_group(c: int, p: int, alternating: bool = False, scalars: bool = True) -> MatrixGroup:
    """Image of S_c (or A_c), optionally times the scalars, on the deleted permutation module."""
    spec = field_make(p)
    if alternating:
        gens = []
        for i in range(2, c):
            perm = list(range(c))
            perm[0], perm[1], perm[i] = 1, i, 0
            gens.append(perm)
    else:
        gens = [list(range(1, c)) + [0], [1, 0] + list(range(2, c))]
    mats = [deleted_module_matrix(spec, g) for g in gens]
    if scalars:
        mats.append(SquareMatrix.scalar(spec, c - 1, primitive_element(spec).code))
    name = f"{'A' if alternating else 'S'}{c}{'xZ' if scalars else ''} on deleted module mod {p}"
    return MatrixGroup.from_matrices(mats, name=name)


def deleted_permutation_vector(c: int, p: int, G: MatrixGroup | None = None, N: MatrixGroup | None = None):
    """x = projection of e_1 + 2e_2 + ... + c e_c, then y from a regular orbit of C_G(x).

    Returns (x, y, info) with info recording |C_G(x)|, whether it is abelian and |C_N(x)|.
    """
    if c >= p:
        raise PreconditionViolated(f"need c < p (c={c}, p={p})")
    spec = field_make(p)
    w = np.arange(1, c + 1, dtype=np.int64) % p
    mean = (int(w.sum()) * pow(c, p - 2, p)) % p
    proj = (w - mean) % p
    x = VectorQ(spec, proj[: c - 1])
    G = G or deleted_module_group(c, p)
    N = N or deleted_module_group(c, p, alternating=True, scalars=False)
    G.enumerate()
    N.enumerate()
    CN = vector_stabilizer(N, x, "enum")
    Cx = vector_stabilizer(G, x, "enum")
    E = Cx.elements
    abelian = all(
        np.array_equal(fp.mul(p, a, b), fp.mul(p, b, a)) for a, b in itertools.combinations(E, 2)
    )
    y = None
    for code in range(p ** (c - 1)):
        cand = fp.code_vecs(p, c - 1, code)
        if int(np.all(fp.act(p, E, cand) == cand, axis=1).sum()) == 1:
            y = VectorQ(spec, cand.astype(np.int64))
            break
    if y is None:
        raise TheoremViolation("abelian stabilizer has no regular orbit")
    info = {"C_G(x)": Cx.order, "abelian": abelian, "C_N(x)": CN.order}
    return x, y, info


# --- fixed-space covering -------------------------------------------------------------


@dataclass
class CoveringReport:
    minimal_subgroups: int
    fixed_dims: list[int]
    part1: bool
    r: int
    t: int
    part2: bool
    union_size: int
    bound: int | None
    y: VectorQ | None = None


def quasisimple_search(G: MatrixGroup, x: VectorQ, Cx: MatrixGroup | None = None):
    """y outside the union of fixed spaces of the minimal subgroups of C_G(x).

    Returns (y, report).  The report holds both counting certificates and the
    exact size of the union of fixed spaces.
    """
    if G.semilinear or G.spec.f != 1:
        raise ConstructError("expects a linear group over a prime field")
    p, n = G.p, G.n
    Cx = Cx or vector_stabilizer(G, x)
    if not Cx.is_enumerated:
        raise GroupError("C_G(x) must be enumerated")
    if p**n > 10**7:
        raise ConstructError("vector space too large for the scan")
    allv = fp.code_vecs(p, n, np.arange(p**n))
    covered = np.zeros(p**n, dtype=bool)
    subs = minimal_subgroups(Cx) if Cx.order > 1 else []
    dims = []
    for H in subs:
        fixed = np.all(fp.act_many(p, H.gens[0], allv) == allv, axis=1)
        covered |= fixed
        dims.append(int(round(np.log(fixed.sum()) / np.log(p))))
    s = len(subs)
    r = sum(1 for d in dims if d > n - 2)
    t = s - r
    part2 = r * p - r + t + 1 < p * p
    bound = p ** (n - 2) * (r * p - r + t + 1) if n >= 2 else None
    report = CoveringReport(s, dims, s < p + 1, r, t, part2, int(covered.sum()), bound)
    free = np.nonzero(~covered)[0]
    if not len(free):
        raise CoverIsWholeSpace("fixed spaces cover V")
    y = VectorQ(G.spec, allv[free[0]].astype(np.int64))
    if not verify_base(G, [x, y]).verified:
        raise TheoremViolation("vector outside the cover is not a base partner")
    report.y = y
    return y, report



# --- centralizer of the diagonal tensor in GL(m,q)^{(x)t} ----------------------


def tensor_product_group(spec: FieldSpec, m: int, t: int) -> MatrixGroup:
    """GL(m,q) (x) ... (x) GL(m,q) acting on the t-fold tensor power, order |GL|^t / (q-1)^(t-1)."""
    from .group import general_linear_group

    GL = general_linear_group(spec, m)
    gens = [_embed(g, i, t) for g in GL.square_matrices(GL.gens) for i in range(t)]
    order = GL.order_known() ** t // (spec.q - 1) ** (t - 1)
    return MatrixGroup.from_matrices(gens, name=f"GL({m},{spec.q})^{t}", order=order)


def diagonal_tensor(spec: FieldSpec, m: int, t: int) -> VectorQ:
    """sum_i e_i (x) ... (x) e_i."""
    out = VectorQ.zero(spec, m**t)
    for i in range(m):
        out = out + tensor_power(VectorQ.unit(spec, m, i), t)
    return out


def _keys(stack) -> set[bytes]:
    return {np.ascontiguousarray(g, dtype=np.uint8).tobytes() for g in stack}


def diagonal_tensor_centralizer_closed_form(spec: FieldSpec, m: int, t: int) -> set[bytes]:
    """Realized keys of the predicted centralizer.

    t = 2: A (x) A^{-T} for A in GL(m,q).
    t >= 3: A_1 S (x) ... (x) A_t S, S a permutation matrix, A_i diagonal, A_1...A_t = 1.
    """
    if t < 2:
        raise ValueError("need t >= 2")
    if t == 2:
        from .group import general_linear_group

        GL = general_linear_group(spec, m).enumerate()
        out = set()
        for A in GL.square_matrices(GL.elements):
            out.add((A.kron(A.inverse().transpose())).realize().tobytes())
        return out
    units = _lex_field(spec, nonzero=True)
    out = set()
    for perm in itertools.permutations(range(m)):
        S = SquareMatrix.permutation(spec, list(perm))
        for diags in itertools.product(itertools.product(units, repeat=m), repeat=t - 1):
            prod = np.ones(m, dtype=np.int64)
            for d in diags:
                prod = spec.mul(prod, np.array(d))
            last = [int(c) for c in spec.inv(prod)]
            factors = [SquareMatrix.diagonal(spec, list(d)) @ S for d in list(diags) + [last]]
            M = factors[0]
            for F in factors[1:]:
                M = M.kron(F)
            out.add(M.realize().tobytes())
    return out


def diagonal_tensor_centralizer(spec: FieldSpec, m: int, t: int, method: str = "auto") -> MatrixGroup:
    """C_B(x) for B the tensor product group, computed by stabilizer machinery."""
    B = tensor_product_group(spec, m, t)
    return vector_stabilizer(B, diagonal_tensor(spec, m, t), method=method)


def check_diagonal_tensor_centralizer(spec: FieldSpec, m: int, t: int, method: str = "auto") -> dict:
    C = diagonal_tensor_centralizer(spec, m, t, method=method)
    predicted = diagonal_tensor_centralizer_closed_form(spec, m, t)
    found = _keys(C.elements)
    return {
        "m": m,
        "t": t,
        "q": spec.q,
        "order": len(found),
        "predicted": len(predicted),
        "equal": found == predicted,
        "method": C.meta.get("method"),
    }
