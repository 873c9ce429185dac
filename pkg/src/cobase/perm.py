"""Permutation groups, setwise stabilizers and regular (distinguishing) partitions.

A labeling of the points with labels in ``range(t)`` is an ordered partition;
it is encoded as the base-t integer ``sum(labels[i] * t**i)``, so point 0 is
the least significant digit.  Searches run over these codes in increasing
order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import field_make, primitive_element, prime_factors

DEFAULT_DEGREE_BOUND = 16
DEFAULT_LABEL_BOUND = 10**8


class PermError(ValueError):
    pass


class NotEnumerated(PermError):
    pass


class PreconditionViolated(PermError):
    pass


class SearchSpaceTooLarge(PermError):
    pass


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise PermError(f"{images} is not a permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def from_cycles(cls, degree: int, cycles, one_based: bool = False) -> Permutation:
        img = list(range(degree))
        off = 1 if one_based else 0
        for cyc in cycles:
            cyc = [c - off for c in cyc]
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img)

    @classmethod
    def parse(cls, text: str) -> Permutation:
        return cls(int(t) for t in text.split())

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition: apply other first."""
        return Permutation(self.images[j] for j in other.images)

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def cycles(self) -> list[list[int]]:
        seen = [False] * self.degree
        out = []
        for i in range(self.degree):
            if not seen[i]:
                cyc = []
                j = i
                while not seen[j]:
                    seen[j] = True
                    cyc.append(j)
                    j = self.images[j]
                out.append(cyc)
        return out

    def __str__(self):
        return " ".join(map(str, self.images))


class PermGroup:
    def __init__(self, gens, degree: int | None = None, name: str = "", elements: np.ndarray | None = None):
        gens = [g if isinstance(g, Permutation) else Permutation(g) for g in gens]
        if degree is None:
            if not gens:
                raise PermError("degree needed for a group without generators")
            degree = gens[0].degree
        if any(g.degree != degree for g in gens):
            raise PermError("generators must share a degree")
        self.gens = gens
        self.degree = degree
        self.name = name
        self._elements = elements

    @property
    def is_enumerated(self) -> bool:
        return self._elements is not None

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            raise NotEnumerated(f"{self.name or 'group'} is not enumerated")
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def enumerate(self, cap: int = 10**7) -> PermGroup:
        """Closure by right cosets, as for matrix groups."""
        if self._elements is not None:
            return self
        m = self.degree
        dtype = np.uint8 if m < 256 else np.uint16
        elems = np.arange(m, dtype=dtype)[None]
        index = {elems[0].tobytes()}
        used: list[np.ndarray] = []
        for s in self.gens:
            s = np.array(s.images, dtype=dtype)
            if s.tobytes() in index:
                continue
            H = elems
            gens = used + [s]
            blocks = [H]
            reps = [np.arange(m, dtype=dtype)]
            i = 0
            while i < len(reps):
                for g in gens:
                    e = g[reps[i]]  # reps[i] then g
                    if e.tobytes() in index:
                        continue
                    coset = e[H]  # h then e
                    index.update(row.tobytes() for row in coset)
                    if len(index) > cap:
                        raise SearchSpaceTooLarge("permutation group exceeds cap")
                    blocks.append(coset)
                    reps.append(e)
                i += 1
            elems = np.concatenate(blocks)
            used.append(s)
        self._elements = elems
        return self

    def identity_mask(self) -> np.ndarray:
        return np.all(self.elements == np.arange(self.degree), axis=1)


def setwise_stabilizer(G: PermGroup, X) -> PermGroup:
    mask = np.zeros(G.degree, dtype=bool)
    mask[list(X)] = True
    E = G.elements
    keep = mask[E[:, mask]].all(axis=1)
    return PermGroup([], G.degree, elements=E[keep])


@dataclass(frozen=True)
class RegularPartition:
    labels: tuple[int, ...]
    t: int

    def parts(self) -> list[list[int]]:
        return [[i for i, l in enumerate(self.labels) if l == k] for k in range(self.t)]

    def __str__(self):
        return " ".join(map(str, self.labels))

    @classmethod
    def parse(cls, text: str, t: int | None = None) -> RegularPartition:
        labels = tuple(int(x) for x in text.split())
        return cls(labels, t if t is not None else max(labels) + 1)


def is_regular_partition(G: PermGroup, P) -> bool:
    labels = np.asarray(P.labels if isinstance(P, RegularPartition) else P)
    E = G.elements
    fixed = np.all(labels[E] == labels, axis=1)
    return int(fixed.sum()) == 1


def _labeling_codes(m: int, t: int, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[..., None] // (t ** np.arange(m, dtype=np.int64))) % t


def _prime_order_reps(G: PermGroup) -> np.ndarray:
    """One generator of each subgroup of prime order."""
    E = G.elements.astype(np.int64)
    m = G.degree
    ident = np.arange(m)
    orders = np.ones(len(E), dtype=np.int64)
    cur = E.copy()
    alive = ~np.all(E == ident, axis=1)
    k = 1
    while alive.any():
        k += 1
        cur = np.take_along_axis(E, cur, axis=1)
        done = alive & np.all(cur == ident, axis=1)
        orders[done] = k
        alive &= ~done
    reps = []
    seen = set()
    for i in np.nonzero(orders > 1)[0]:
        o = int(orders[i])
        if prime_factors(o) != [o]:
            continue
        g = E[i]
        powers = [g]
        for _ in range(o - 2):
            powers.append(g[powers[-1]])
        key = min(pw.tobytes() for pw in powers)
        if key not in seen:
            seen.add(key)
            reps.append(g)
    return np.array(reps, dtype=np.int64).reshape(-1, m)


def regular_labeling_mask(G: PermGroup, t: int, bound: int = DEFAULT_LABEL_BOUND) -> np.ndarray:
    """Boolean array over all t^m labeling codes: True where the labeling is regular.

    A labeling is non-regular iff some element of prime order fixes it, i.e. it
    is constant on that element's cycles; those labelings are marked directly.
    """
    m = G.degree
    if t**m > bound:
        raise SearchSpaceTooLarge(f"{t}^{m} labelings exceed bound {bound}")
    bad = np.zeros(t**m, dtype=bool)
    weights = t ** np.arange(m, dtype=np.int64)
    for g in _prime_order_reps(G):
        cycles = Permutation(g).cycles()
        cw = np.array([weights[c].sum() for c in cycles], dtype=np.int64)
        codes = np.zeros(1, dtype=np.int64)
        for w in cw:
            codes = (codes[:, None] + np.arange(t, dtype=np.int64)[None, :] * w).reshape(-1)
        bad[codes] = True
    return ~bad


def regular_orbit_count(G: PermGroup, t: int, bound: int = DEFAULT_LABEL_BOUND) -> int:
    """Number of G-orbits of regular ordered t-partitions (parts may be empty)."""
    G.enumerate()
    regular = int(regular_labeling_mask(G, t, bound).sum())
    if regular % G.order:
        raise AssertionError("regular labelings are not a union of free orbits")
    return regular // G.order


def regular_orbit_count_naive(G: PermGroup, t: int) -> int:
    """Direct check of every labeling against every group element."""
    G.enumerate()
    m = G.degree
    E = G.elements.astype(np.int64)
    count = 0
    for code in range(t**m):
        labels = _labeling_codes(m, t, code)
        if int(np.all(labels[E] == labels, axis=1).sum()) == 1:
            count += 1
    assert count % G.order == 0
    return count // G.order


def distinguishing_number(G: PermGroup, bound: int = DEFAULT_LABEL_BOUND) -> int:
    G.enumerate()
    t = 1
    while True:
        if t == 1:
            if G.order == 1:
                return 1
        elif regular_labeling_mask(G, t, bound).any():
            return t
        t += 1


def regular_partition_search(
    G: PermGroup, t: int, bound: int = DEFAULT_LABEL_BOUND, surjective: bool = True
) -> RegularPartition | None:
    """First regular labeling in code order; by default one that uses all t labels."""
    G.enumerate()
    m = G.degree
    if m > DEFAULT_DEGREE_BOUND:
        raise SearchSpaceTooLarge(f"degree {m} exceeds {DEFAULT_DEGREE_BOUND}")
    if t == 1:
        return RegularPartition((0,) * m, 1) if G.order == 1 else None
    mask = regular_labeling_mask(G, t, bound)
    codes = np.nonzero(mask)[0]
    if surjective and m >= t and len(codes):
        labels = _labeling_codes(m, t, codes)
        used = np.stack([(labels == k).any(axis=1) for k in range(t)], axis=1).all(axis=1)
        codes = codes[used]
    if not len(codes):
        return None
    return RegularPartition(tuple(int(x) for x in _labeling_codes(m, t, codes[0])), t)


def regular_partition_coprime(G: PermGroup, t: int, bound: int = DEFAULT_LABEL_BOUND) -> RegularPartition:
    G.enumerate()
    # t = 1 divides everything; the single part is regular exactly for the trivial group
    if G.order % t == 0 and not (t == 1 and G.order == 1):
        raise PreconditionViolated(f"t={t} divides |G|={G.order}")
    P = regular_partition_search(G, t, bound)
    if P is None:
        raise AssertionError(f"no regular {t}-partition found although t does not divide |G|")
    return P


# --- named groups ---------------------------------------------------------------


def symmetric_group(m: int) -> PermGroup:
    if m == 1:
        return PermGroup([Permutation([0])], 1, name="S1")
    gens = [Permutation(list(range(1, m)) + [0]), Permutation([1, 0] + list(range(2, m)))]
    return PermGroup(gens, m, name=f"S{m}")


def alternating_group(m: int) -> PermGroup:
    gens = [Permutation.from_cycles(m, [[0, 1, i]]) for i in range(2, m)]
    return PermGroup(gens or [Permutation(range(m))], m, name=f"A{m}")


def cyclic_group(m: int) -> PermGroup:
    return PermGroup([Permutation(list(range(1, m)) + [0])], m, name=f"C{m}")


def _projective_line(q_p: int, q_f: int):
    F = field_make(q_p, q_f)
    elems = list(F.elements())
    points = [e.code for e in elems] + ["inf"]
    pos = {pt: i for i, pt in enumerate(points)}

    def perm_of(fn):
        return Permutation(pos[fn(pt)] for pt in points)

    def mobius(a, b, c, d):
        # z -> (a z + b) / (c z + d)
        def fn(pt):
            if pt == "inf":
                return "inf" if c.is_zero() else (a / c).code
            z = F.element(pt)
            den = c * z + d
            if den.is_zero():
                return "inf"
            return ((a * z + b) / den).code

        return perm_of(fn)

    return F, perm_of, mobius


def psl2(q: int) -> PermGroup:
    """PSL(2, q) on the projective line, q prime."""
    F, _, mob = _projective_line(q, 1)
    one, zero = F.one, F.zero
    alpha = primitive_element(F)
    gens = [mob(one, one, zero, one), mob(alpha**2, zero, zero, one), mob(zero, -one, one, zero)]
    return PermGroup(gens, q + 1, name=f"PSL(2,{q})")


def pgl2(q: int) -> PermGroup:
    F, _, mob = _projective_line(q, 1)
    one, zero = F.one, F.zero
    alpha = primitive_element(F)
    gens = [mob(one, one, zero, one), mob(alpha, zero, zero, one), mob(zero, one, one, zero)]
    return PermGroup(gens, q + 1, name=f"PGL(2,{q})")


def pgaml2(p: int, f: int) -> PermGroup:
    """PGammaL(2, p^f) on the projective line."""
    F, perm_of, mob = _projective_line(p, f)
    one, zero = F.one, F.zero
    alpha = primitive_element(F)
    frob = perm_of(lambda pt: pt if pt == "inf" else (F.element(pt) ** p).code)
    gens = [mob(one, one, zero, one), mob(alpha, zero, zero, one), mob(zero, one, one, zero), frob]
    return PermGroup(gens, p**f + 1, name=f"PGammaL(2,{p**f})")


def _f2_vectors(k: int):
    return [tuple((v >> i) & 1 for i in range(k)) for v in range(2**k)]


def _gl_f2_gens(k: int):
    gens = []
    for i in range(k):
        for j in range(k):
            if i != j:
                m = np.eye(k, dtype=np.int64)
                m[i, j] = 1
                gens.append(m)
    return gens


def psl3_2() -> PermGroup:
    """GL(3,2) on the 7 nonzero vectors of F_2^3."""
    pts = _f2_vectors(3)[1:]
    pos = {v: i for i, v in enumerate(pts)}
    gens = [
        Permutation(pos[tuple(int(x) for x in (m @ np.array(v)) % 2)] for v in pts) for m in _gl_f2_gens(3)
    ]
    return PermGroup(gens, 7, name="PSL(3,2)")


def asl3_2() -> PermGroup:
    pts = _f2_vectors(3)
    pos = {v: i for i, v in enumerate(pts)}
    gens = [
        Permutation(pos[tuple(int(x) for x in (m @ np.array(v)) % 2)] for v in pts) for m in _gl_f2_gens(3)
    ]
    gens.append(Permutation(pos[((v[0] + 1) % 2,) + v[1:]] for v in pts))
    return PermGroup(gens, 8, name="ASL(3,2)")


def mathieu11() -> PermGroup:
    a = Permutation.from_cycles(11, [list(range(1, 12))], one_based=True)
    b = Permutation.from_cycles(11, [[3, 7, 11, 8], [4, 10, 5, 6]], one_based=True)
    return PermGroup([a, b], 11, name="M11")


def mathieu12() -> PermGroup:
    a = Permutation.from_cycles(12, [list(range(1, 12))], one_based=True)
    b = Permutation.from_cycles(12, [[3, 7, 11, 8], [4, 10, 5, 6]], one_based=True)
    c = Permutation.from_cycles(12, [[1, 12], [2, 11], [3, 6], [4, 8], [5, 9], [7, 10]], one_based=True)
    return PermGroup([a, b, c], 12, name="M12")


def table1_groups() -> dict[str, PermGroup]:
    """Generators for the groups of the primitive-group regression table."""
    return {
        "S3": symmetric_group(3),
        "PSL(2,5)": psl2(5),
        "PGammaL(2,8)": pgaml2(2, 3),
        "S4": symmetric_group(4),
        "PGL(2,5)": pgl2(5),
        "PSL(3,2)": psl3_2(),
        "M11": mathieu11(),
        "M12": mathieu12(),
        "ASL(3,2)": asl3_2(),
    }


TABLE1_ORDERS = {
    "S3": 6,
    "PSL(2,5)": 60,
    "PGammaL(2,8)": 1512,
    "S4": 24,
    "PGL(2,5)": 120,
    "PSL(3,2)": 168,
    "M11": 7920,
    "M12": 95040,
    "ASL(3,2)": 1344,
}
