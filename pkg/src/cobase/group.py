"""Matrix groups over GF(q): closure, orbits, Schreier stabilizers, base verification.

Groups are stored through their realisation over the prime field (see
``matrix``); an element is an ``N x N`` uint8 array with ``N = n f`` and its
canonical key is ``tobytes()``.  Two stabilizer paths exist: filtering an
enumerated group, and the orbit/Schreier-generator construction for groups
too large to enumerate.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import fp, linalg
from .field import FieldSpec, prime_factors
from .matrix import (
    DimensionMismatch,
    SquareMatrix,
    VectorQ,
    contract_matrix,
    contract_vector,
    realize_matrix,
    realize_vector,
)

DEFAULT_CAP = 2_000_000
DEFAULT_SEARCH_BOUND = 10**6
TRANSVERSAL_BYTES = 1 << 30

FULL_ENUMERATION = "FullEnumeration"
SCHREIER_STABILIZER = "SchreierStabilizer"


class GroupError(Exception):
    pass


class CapExceeded(GroupError):
    def __init__(self, message: str, partial: int = 0):
        super().__init__(message)
        self.partial = partial
        self.certificate = None


class SingularGenerator(GroupError):
    pass


class OrderUnknown(GroupError):
    pass


class SearchSpaceTooLarge(GroupError):
    pass


class NotEnumerated(GroupError):
    pass


class NoBaseWithin(GroupError):
    """No base of at most the requested size exists."""


def default_cap() -> int:
    env = os.environ.get("COBASE_CAP")
    return int(env) if env else DEFAULT_CAP


# --- incremental closure ------------------------------------------------------


class Closure:
    """A finite matrix group grown one generator at a time.

    Adding a generator uses right cosets of the current group: the group is kept
    as a union of cosets ``H c`` and a new coset is added whenever ``c s`` falls
    outside it.
    """

    def __init__(self, p: int, N: int, cap: int | None = None):
        self.p = p
        self.N = N
        self.cap = default_cap() if cap is None else cap
        ident = np.eye(N, dtype=np.uint8)[None]
        self._blocks = [ident]
        self._flat: np.ndarray | None = ident
        self.index: dict[bytes, int] = {ident[0].tobytes(): 0}
        self.gens: list[np.ndarray] = []

    @property
    def order(self) -> int:
        return len(self.index)

    @property
    def elements(self) -> np.ndarray:
        if self._flat is None:
            self._flat = np.concatenate(self._blocks)
            self._blocks = [self._flat]
        return self._flat

    def __contains__(self, g: np.ndarray) -> bool:
        return g.tobytes() in self.index

    def add(self, s: np.ndarray) -> bool:
        """Extend by s; returns False when s was already a member."""
        s = np.ascontiguousarray(s, dtype=np.uint8)
        if s.tobytes() in self.index:
            return False
        H = self.elements
        gens = self.gens + [s]
        reps = [np.eye(self.N, dtype=np.uint8)]
        i = 0
        while i < len(reps):
            for g in gens:
                e = fp.mul(self.p, reps[i], g)
                if e.tobytes() in self.index:
                    continue
                if self.order + len(H) > self.cap:
                    raise CapExceeded(f"group order exceeds cap {self.cap}", self.order + len(H))
                coset = fp.rmul(self.p, H, e)
                base = self.order
                for k, key in enumerate(fp.keys(coset)):
                    self.index[key] = base + k
                self._blocks.append(coset)
                self._flat = None
                reps.append(e)
            i += 1
        self.gens.append(s)
        return True


def close_realized(p: int, gens, cap: int | None = None) -> Closure:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    c = Closure(p, gens[0].shape[0], cap)
    for g in gens:
        c.add(g)
    return c


# --- orbits --------------------------------------------------------------------


@dataclass
class Orbit:
    """Orbit of a vector with BFS transversal."""

    p: int
    vecs: np.ndarray  # (M, N) in BFS order
    codes: np.ndarray
    parent: np.ndarray
    via: np.ndarray
    T: np.ndarray | None = None  # T[i] maps the root to vecs[i]
    T_inv: np.ndarray | None = None
    _sorted: np.ndarray = field(default=None, repr=False)
    _perm: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.codes)

    def lookup(self, codes) -> np.ndarray:
        """Orbit indices of the given vector codes (-1 when absent)."""
        if self._sorted is None:
            self._perm = np.argsort(self.codes, kind="stable")
            self._sorted = self.codes[self._perm]
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(self._sorted, codes)
        pos = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos] == codes
        return np.where(hit, self._perm[pos], -1)


def orbit(p: int, gens, x: np.ndarray, transversal: bool = True, cap: int | None = None) -> Orbit:
    cap = default_cap() if cap is None else cap
    N = len(x)
    x = np.asarray(x, dtype=np.uint8)
    gens = [np.asarray(g, dtype=np.uint8) for g in gens]
    vec_layers = [x[None]]
    code_layers = [fp.vec_codes(p, x[None])]
    parent_layers = [np.array([-1])]
    via_layers = [np.array([-1])]
    visited = code_layers[0].copy()
    frontier = x[None]
    frontier_start = 0
    total = 1
    while len(frontier):
        imgs = np.stack([fp.act_many(p, g, frontier) for g in gens], axis=1)  # F, G, N
        F = len(frontier)
        flat = imgs.reshape(F * len(gens), N)
        codes = fp.vec_codes(p, flat)
        fresh = ~np.isin(codes, visited)
        if not fresh.any():
            break
        cand = np.nonzero(fresh)[0]
        _, first = np.unique(codes[cand], return_index=True)
        pick = np.sort(cand[first])
        total += len(pick)
        if total > cap:
            raise CapExceeded(f"orbit size exceeds cap {cap}", total)
        vec_layers.append(flat[pick])
        code_layers.append(codes[pick])
        parent_layers.append(frontier_start + pick // len(gens))
        via_layers.append(pick % len(gens))
        visited = np.union1d(visited, codes[pick])
        frontier_start += F
        frontier = flat[pick]
    orb = Orbit(
        p,
        np.concatenate(vec_layers),
        np.concatenate(code_layers),
        np.concatenate(parent_layers),
        np.concatenate(via_layers),
    )
    if transversal:
        if len(orb) * N * N * 2 > TRANSVERSAL_BYTES:
            raise CapExceeded("transversal would exceed the memory budget", len(orb))
        _fill_transversal(orb, gens)
    return orb


def _fill_transversal(orb: Orbit, gens) -> None:
    p = orb.p
    N = orb.vecs.shape[1]
    M = len(orb)
    invs = [fp.inverse(p, g) for g in gens]
    T = np.empty((M, N, N), dtype=np.uint8)
    Ti = np.empty((M, N, N), dtype=np.uint8)
    T[0] = np.eye(N, dtype=np.uint8)
    Ti[0] = T[0]
    # parents always precede children, so fill by BFS layers
    done = np.zeros(M, dtype=bool)
    done[0] = True
    while not done.all():
        ready = np.nonzero(~done & done[np.maximum(orb.parent, 0)])[0]
        for gi, g in enumerate(gens):
            sel = ready[orb.via[ready] == gi]
            if len(sel) == 0:
                continue
            T[sel] = fp.lmul(p, g, T[orb.parent[sel]])
            Ti[sel] = fp.rmul(p, Ti[orb.parent[sel]], invs[gi])
        done[ready] = True
    orb.T, orb.T_inv = T, Ti


def schreier_stabilizer(
    p: int,
    gens,
    orb: Orbit,
    target: int | None = None,
    cap: int | None = None,
    chunk: int = 4096,
) -> Closure:
    """Close the Schreier generators T(sw)^-1 s T(w), in canonical (w, s) order.

    With a known target order the scan stops as soon as it is reached;
    otherwise every Schreier generator is examined.
    """
    N = orb.vecs.shape[1]
    stab = Closure(p, N, cap)
    if target is not None and target == 1:
        return stab
    gens = [np.asarray(g, dtype=np.uint8) for g in gens]
    M = len(orb)
    for start in range(0, M, chunk):
        idx = np.arange(start, min(M, start + chunk))
        per_gen = []
        for s in gens:
            imgs = fp.act_many(p, s, orb.vecs[idx])
            j = orb.lookup(fp.vec_codes(p, imgs))
            if np.any(j < 0):
                raise AssertionError("orbit not closed under generators")
            sg = fp.bmul(p, orb.T_inv[j], fp.lmul(p, s, orb.T[idx]))
            per_gen.append(sg)
        cands = np.stack(per_gen, axis=1).reshape(-1, N, N)
        for c, key in zip(cands, fp.keys(cands)):
            if key in stab.index:
                continue
            stab.add(c)
            if target is not None and stab.order == target:
                return stab
    return stab


# --- groups --------------------------------------------------------------------


@dataclass
class StabilizerChainLite:
    """One level of a stabilizer chain: base point, orbit with witnesses, stabilizer."""

    base_point: np.ndarray
    orbit: Orbit
    stabilizer: MatrixGroup

    def witness(self, vec: np.ndarray) -> np.ndarray | None:
        i = self.orbit.lookup(fp.vec_codes(self.orbit.p, np.asarray(vec)[None]))[0]
        return None if i < 0 else self.orbit.T[i]

    @property
    def stabilizer_generators(self) -> list[np.ndarray]:
        return self.stabilizer.gens


class MatrixGroup:
    """A group of realised matrices; optionally enumerated or carrying a stabilizer chain."""

    def __init__(
        self,
        spec: FieldSpec,
        n: int,
        gens,
        name: str = "",
        order: int | None = None,
        semilinear: bool = False,
        elements: np.ndarray | None = None,
        meta: dict | None = None,
    ):
        self.spec = spec
        self.n = n
        self.N = n * spec.f
        self.semilinear = semilinear
        self._gens = None if gens is None else [np.ascontiguousarray(g, dtype=np.uint8) for g in gens]
        for g in self._gens or []:
            if g.shape != (self.N, self.N):
                raise DimensionMismatch("generator has wrong dimension")
            if fp.rank(spec.p, g) != self.N:
                raise SingularGenerator("generator is singular")
        self.name = name
        self.order = order
        self._elements = elements
        self._index: dict[bytes, int] | None = None
        self.chain: StabilizerChainLite | None = None
        self.meta = dict(meta or {})
        if elements is not None:
            if order is not None and order != len(elements):
                raise GroupError("element count disagrees with order")
            self.order = len(elements)

    @classmethod
    def from_matrices(cls, mats, name: str = "", order: int | None = None, **kw) -> MatrixGroup:
        mats = list(mats)
        if not mats:
            raise ValueError("need generators")
        spec, n = mats[0].spec, mats[0].n
        for m in mats:
            if m.spec != spec or m.n != n:
                raise DimensionMismatch("generators must share field and dimension")
            if m.det() == 0:
                raise SingularGenerator("generator is singular")
        return cls(spec, n, [m.realize() for m in mats], name=name, order=order, **kw)

    # basic data

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def gens(self) -> list[np.ndarray]:
        if self._gens is None:
            self._gens = _generating_set(self.p, self.elements)
        return self._gens

    @property
    def is_enumerated(self) -> bool:
        return self._elements is not None

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            raise NotEnumerated(f"group {self.name!r} is not enumerated")
        return self._elements

    @property
    def index(self) -> dict[bytes, int]:
        if self._index is None:
            self._index = {k: i for i, k in enumerate(fp.keys(self.elements))}
        return self._index

    def enumerate(self, cap: int | None = None) -> MatrixGroup:
        if self._elements is None:
            c = close_realized(self.p, self.gens, cap)
            if self.order is not None and self.order != c.order:
                raise GroupError(f"closure has order {c.order}, expected {self.order}")
            self._elements = c.elements
            self._index = c.index
            self.order = c.order
        return self

    def contains(self, g: np.ndarray) -> bool:
        return np.ascontiguousarray(g, dtype=np.uint8).tobytes() in self.index

    def identity(self) -> np.ndarray:
        return np.eye(self.N, dtype=np.uint8)

    def square_matrices(self, stack=None) -> list[SquareMatrix]:
        if self.semilinear:
            raise GroupError("semilinear elements have no GF(q) matrix")
        stack = self.gens if stack is None else stack
        return [SquareMatrix(self.spec, contract_matrix(self.spec, g)) for g in stack]

    def subgroup(self, elements: np.ndarray, name: str = "") -> MatrixGroup:
        return MatrixGroup(
            self.spec, self.n, None, name=name, semilinear=self.semilinear, elements=elements
        )

    def vec(self, v) -> np.ndarray:
        """Realise a VectorQ (or pass through a realised vector)."""
        if isinstance(v, VectorQ):
            if v.spec != self.spec or v.n != self.n:
                raise DimensionMismatch("vector does not match group")
            return v.realize()
        v = np.asarray(v, dtype=np.uint8)
        if v.shape != (self.N,):
            raise DimensionMismatch("vector does not match group")
        return v

    def order_known(self) -> int:
        if self.order is None:
            raise OrderUnknown(f"order of {self.name!r} is unknown")
        return self.order

    def build_chain(self, base_point=None, cap: int | None = None) -> StabilizerChainLite:
        """Orbit of the base point plus its full Schreier stabilizer; certifies the order."""
        x = self.vec(base_point) if base_point is not None else np.eye(self.N, dtype=np.uint8)[0]
        orb = orbit(self.p, self.gens, x, cap=cap)
        target = None if self.order is None else self.order // len(orb)
        stab = schreier_stabilizer(self.p, self.gens, orb, target, cap)
        K = MatrixGroup(self.spec, self.n, stab.gens, semilinear=self.semilinear, elements=stab.elements)
        K._index = stab.index
        order = len(orb) * stab.order
        if self.order is not None and order != self.order:
            raise GroupError(f"orbit-stabilizer gives {order}, expected {self.order}")
        self.order = order
        self.chain = StabilizerChainLite(x, orb, K)
        return self.chain

    def __repr__(self):
        return f"MatrixGroup({self.name!r}, n={self.n}, q={self.spec.q}, order={self.order})"


def _generating_set(p: int, elements: np.ndarray) -> list[np.ndarray]:
    """Greedy generating set in element order."""
    N = elements.shape[1]
    if len(elements) == 1:
        return [np.eye(N, dtype=np.uint8)]
    c = Closure(p, N, cap=len(elements))
    for g in elements:
        if c.order == len(elements):
            break
        c.add(g)
    return c.gens


def group_close(generators, cap: int | None = None, name: str = "") -> MatrixGroup:
    """Enumerate the group generated by SquareMatrix generators."""
    G = MatrixGroup.from_matrices(generators, name=name)
    return G.enumerate(cap)


def general_linear_group(spec: FieldSpec, n: int) -> MatrixGroup:
    """GL(n, q) from diag(alpha, 1, ..., 1) and the unit transvections."""
    from .field import primitive_element

    alpha = primitive_element(spec).code
    gens = [SquareMatrix.diagonal(spec, [alpha] + [1] * (n - 1))]
    for i in range(n):
        for j in range(n):
            if i != j:
                m = np.eye(n, dtype=np.int64)
                m[i, j] = 1
                gens.append(SquareMatrix(spec, m))
    order = 1
    for i in range(n):
        order *= spec.q**n - spec.q**i
    return MatrixGroup.from_matrices(gens, name=f"GL({n},{spec.q})", order=order)


def coprimality_check(G: MatrixGroup) -> bool:
    return G.order_known() % G.p != 0


# --- stabilizers and bases -------------------------------------------------------


def _filter_fixing(G: MatrixGroup, elements: np.ndarray, x: np.ndarray) -> np.ndarray:
    imgs = fp.act(G.p, elements, x)
    return elements[np.all(imgs == x, axis=1)]


def _stabilizer_via_chain(G: MatrixGroup, x: np.ndarray) -> np.ndarray:
    ch = G.chain
    K = ch.stabilizer.elements
    kx = fp.vec_codes(G.p, fp.act(G.p, K, x))
    order = np.argsort(kx, kind="stable")
    sorted_kx = kx[order]
    targets = fp.vec_codes(G.p, fp.act(G.p, ch.orbit.T_inv, x))
    parts = []
    for i, t in enumerate(targets):
        lo, hi = np.searchsorted(sorted_kx, [t, t + 1])
        if hi > lo:
            ks = np.sort(order[lo:hi])
            parts.append(fp.lmul(G.p, ch.orbit.T[i], K[ks]))
    return np.concatenate(parts)


def vector_stabilizer(
    G: MatrixGroup, x, method: str = "auto", cap: int | None = None
) -> MatrixGroup:
    """C_G(x), enumerated, with |orbit| |C_G(x)| = |G| asserted when |G| is known."""
    xr = G.vec(x)
    method = _resolve_method(G, method)
    if method == FULL_ENUMERATION:
        G.enumerate(cap)
        H = G.subgroup(_filter_fixing(G, G.elements, xr))
        H.meta["method"] = FULL_ENUMERATION
        return H
    if G.chain is not None:
        H = G.subgroup(_stabilizer_via_chain(G, xr))
        H.meta["method"] = SCHREIER_STABILIZER
        return H
    orb = orbit(G.p, G.gens, xr, cap=cap)
    target = None if G.order is None else G.order // len(orb)
    if G.order is not None and G.order % len(orb):
        raise GroupError("orbit size does not divide the group order")
    stab = schreier_stabilizer(G.p, G.gens, orb, target, cap)
    if G.order is None:
        G.order = len(orb) * stab.order
    elif len(orb) * stab.order != G.order:
        raise GroupError("orbit-stabilizer identity violated")
    H = MatrixGroup(G.spec, G.n, stab.gens, semilinear=G.semilinear, elements=stab.elements)
    H._index = stab.index
    H.meta["method"] = SCHREIER_STABILIZER
    H.meta["orbit_size"] = len(orb)
    return H


def _resolve_method(G: MatrixGroup, method: str) -> str:
    method = {"enum": FULL_ENUMERATION, "schreier": SCHREIER_STABILIZER}.get(method, method)
    if method in (FULL_ENUMERATION, SCHREIER_STABILIZER):
        return method
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if G.is_enumerated or (G.order is not None and G.order <= 200_000):
        return FULL_ENUMERATION
    return SCHREIER_STABILIZER


def iterated_stabilizer(G: MatrixGroup, vectors, method: str = "auto", cap: int | None = None):
    """Pointwise stabilizer of the vectors, with the order chain and the method used."""
    vectors = list(vectors)
    method = _resolve_method(G, method)
    if not vectors:
        if method == FULL_ENUMERATION:
            G.enumerate(cap)
        return G, [G.order_known()], method
    H = vector_stabilizer(G, vectors[0], method, cap)
    chain = [G.order_known(), H.order]
    for v in vectors[1:]:
        H = H.subgroup(_filter_fixing(H, H.elements, H.vec(v)))
        chain.append(H.order)
    return H, chain, method


@dataclass
class BaseCertificate:
    group_ref: str
    field: str
    vectors: list[VectorQ]
    method: str
    verified: bool
    stabilizer_order_chain: list[int]
    meta: dict = field(default_factory=dict)
    stabilizer: object = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = {
            "group": self.group_ref,
            "field": self.field,
            "vectors": [v.to_text() for v in self.vectors],
            "method": self.method,
            "verified": self.verified,
            "order_chain": [int(o) for o in self.stabilizer_order_chain],
        }
        if self.meta:
            d["meta"] = self.meta
        return d

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_dict(), sort_keys=True)


def verify_base(
    G: MatrixGroup, vectors, method: str = "auto", cap: int | None = None, group_ref: str | None = None
) -> BaseCertificate:
    vectors = [v if isinstance(v, VectorQ) else VectorQ(G.spec, contract_vector(G.spec, v)) for v in vectors]
    ref = group_ref or G.name
    try:
        H, chain, used = iterated_stabilizer(G, vectors, method, cap)
    except CapExceeded as exc:
        exc.certificate = BaseCertificate(ref, str(G.spec), vectors, _resolve_method(G, method), False, [])
        raise
    cert = BaseCertificate(ref, str(G.spec), vectors, used, chain[-1] == 1, chain)
    for k in ("normalizer_method", "branch", "acting_group"):
        if k in G.meta:
            cert.meta[k] = G.meta[k]
    cert.stabilizer = H
    return cert


def intersection_stabilizer(G: MatrixGroup, vectors, method: str = "auto", cap=None) -> MatrixGroup:
    return iterated_stabilizer(G, vectors, method, cap)[0]


# --- exhaustive searches --------------------------------------------------------


def _all_vectors(p: int, N: int, bound: int) -> np.ndarray:
    if p**N > bound:
        raise SearchSpaceTooLarge(f"{p}^{N} vectors exceed the search bound {bound}")
    return fp.code_vecs(p, N, np.arange(p**N))


def _fix_table(G: MatrixGroup, vecs: np.ndarray, lines: bool = False) -> np.ndarray:
    """fix[g, v] = g fixes v (or the line through v)."""
    E = G.elements
    if len(E) * len(vecs) > 5 * 10**8:
        raise SearchSpaceTooLarge("fixing table too large")
    imgs = np.einsum("gij,vj->gvi", E.astype(np.int32), vecs.astype(np.int32)) % G.p
    if not lines:
        return np.all(imgs == vecs[None], axis=2)
    scal = [realize_matrix(G.spec, np.array([[c]]))[..., :].astype(np.int64) for c in range(1, G.spec.q)]
    f = G.spec.f
    fix = np.zeros((len(E), len(vecs)), dtype=bool)
    for S in scal:
        sv = np.einsum("ab,vkb->vka", S, vecs.reshape(len(vecs), -1, f).astype(np.int64)) % G.p
        fix |= np.all(imgs == sv.reshape(len(vecs), -1)[None], axis=2)
    return fix


def _orbit_minima(G: MatrixGroup, codes: np.ndarray) -> np.ndarray:
    """Codes that are the least element of their orbit."""
    seen = np.zeros(len(codes), dtype=bool)
    minima = []
    vecs = fp.code_vecs(G.p, G.N, codes)
    pos = {int(c): i for i, c in enumerate(codes)}
    for i in range(len(codes)):
        if seen[i]:
            continue
        minima.append(codes[i])
        orb_codes = np.unique(fp.vec_codes(G.p, fp.act(G.p, G.elements, vecs[i])))
        for c in orb_codes:
            seen[pos[int(c)]] = True
    return np.array(minima, dtype=np.int64)


def _base_search(G: MatrixGroup, target_mask: np.ndarray, lines: bool, max_size: int, bound: int):
    vecs = _all_vectors(G.p, G.N, bound)
    codes = np.arange(len(vecs))
    fix = _fix_table(G, vecs, lines)
    useful = ~np.all(fix, axis=0)
    full = np.ones(len(G.elements), dtype=bool)
    if not (full & ~target_mask).any():
        return 0, []
    firsts = set(_orbit_minima(G, codes).tolist())

    def dfs(S, start, depth, chosen):
        for v in range(start, len(vecs)):
            if not useful[v] or (depth == 0 and v not in firsts):
                continue
            S2 = S & fix[:, v]
            if (S2 == S).all():
                continue
            if depth == size - 1:
                if not (S2 & ~target_mask).any():
                    return chosen + [v]
            elif (S2 & ~target_mask).any():
                r = dfs(S2, v + 1, depth + 1, chosen + [v])
                if r is not None:
                    return r
        return None

    for size in range(1, max_size + 1):
        w = dfs(full, 0, 0, [])
        if w is not None:
            return size, [VectorQ(G.spec, contract_vector(G.spec, vecs[v])) for v in w]
    raise NoBaseWithin(f"no base of size <= {max_size}")


def minimal_base_size(G: MatrixGroup, max_size: int | None = None, bound: int = DEFAULT_SEARCH_BOUND):
    """Exact b(G) with the lexicographically least witness base."""
    G.enumerate()
    ident = fp.is_identity(G.elements)
    return _base_search(G, ident, False, G.N + 1 if max_size is None else max_size, bound)


def scalar_mask(G: MatrixGroup) -> np.ndarray:
    scal = {
        realize_matrix(G.spec, np.eye(G.n, dtype=np.int64) * c).tobytes() for c in range(1, G.spec.q)
    }
    return np.array([k in scal for k in fp.keys(G.elements)])


def minimal_strong_base_size(G: MatrixGroup, max_size: int | None = None, bound: int = DEFAULT_SEARCH_BOUND):
    """Exact b*(G): fewest vectors whose lines are fixed only by scalars."""
    G.enumerate()
    return _base_search(G, scalar_mask(G), True, G.N + 1 if max_size is None else max_size, bound)


def strong_base_check(G: MatrixGroup, vectors) -> bool:
    G.enumerate()
    vecs = np.stack([G.vec(v) for v in vectors])
    fix = _fix_table(G, vecs, lines=True).all(axis=1)
    return not (fix & ~scalar_mask(G)).any()


def fixed_space(H, n: int | None = None) -> list[VectorQ]:
    """Common fixed vectors of a matrix or of a group's generators, as a GF(q) basis."""
    if isinstance(H, SquareMatrix):
        mats, spec = [H.codes], H.spec
    elif isinstance(H, MatrixGroup):
        if H.semilinear:
            raise GroupError("fixed_space expects a linear group")
        mats, spec = [contract_matrix(H.spec, g) for g in H.gens], H.spec
    else:
        mats = [m.codes for m in H]
        spec = H[0].spec
    dim = mats[0].shape[0]
    if n is not None and n != dim:
        raise DimensionMismatch("dimension mismatch")
    eye = np.eye(dim, dtype=np.int64)
    stacked = np.vstack([spec.sub(m, eye) for m in mats])
    basis = linalg.nullspace(spec, stacked)
    return [VectorQ(spec, b) for b in basis]


def fixed_space_realized(p: int, mats) -> np.ndarray:
    """Row basis over Z/p of the common fixed space of realised matrices."""
    N = mats[0].shape[0]
    from .field import field_make

    Fp = field_make(p)
    stacked = np.vstack([(m.astype(np.int64) - np.eye(N, dtype=np.int64)) % p for m in mats])
    return linalg.nullspace(Fp, stacked)


def centralizer_bruteforce(H: MatrixGroup, ambient: MatrixGroup) -> MatrixGroup:
    """Elements of the (enumerated) ambient commuting with every generator of H."""
    ambient.enumerate()
    E = ambient.elements
    keep = np.ones(len(E), dtype=bool)
    for h in H.gens:
        keep &= np.all(fp.rmul(H.p, E, h) == fp.lmul(H.p, h, E), axis=(1, 2))
    return ambient.subgroup(E[keep], name=f"C({H.name})")


def normalizer_bruteforce(H: MatrixGroup, ambient: MatrixGroup) -> MatrixGroup:
    """Elements g of the ambient with g h g^-1 in H for every generator h."""
    ambient.enumerate()
    H.enumerate()
    E = ambient.elements
    Einv = np.stack([fp.inverse(H.p, g) for g in E])
    keep = np.ones(len(E), dtype=bool)
    for h in H.gens:
        conj = fp.bmul(H.p, fp.rmul(H.p, E, h), Einv)
        keep &= np.array([k in H.index for k in fp.keys(conj)])
    return ambient.subgroup(E[keep], name=f"N({H.name})")


# --- element orders and minimal subgroups --------------------------------------


def element_orders(p: int, stack: np.ndarray, limit: int = 10**6) -> np.ndarray:
    B, N, _ = stack.shape
    orders = np.zeros(B, dtype=np.int64)
    cur = stack.copy()
    k = 1
    alive = np.arange(B)
    while len(alive):
        done = fp.is_identity(cur)
        orders[alive[done]] = k
        alive = alive[~done]
        cur = fp.bmul(p, cur[~done], stack[alive])
        k += 1
        if k > limit:
            raise GroupError("element order exceeds limit")
    return orders


def minimal_subgroups(G: MatrixGroup) -> list[MatrixGroup]:
    """Cyclic subgroups of prime order, keyed canonically by their least element bytes."""
    E = G.elements
    orders = element_orders(G.p, E)
    seen: dict[bytes, MatrixGroup] = {}
    for i in np.nonzero(orders > 1)[0]:
        o = int(orders[i])
        if len(prime_factors(o)) != 1 or prime_factors(o)[0] != o:
            continue
        powers = [E[i]]
        for _ in range(o - 2):
            powers.append(fp.mul(G.p, powers[-1], E[i]))
        key = min(g.tobytes() for g in powers)
        if key not in seen:
            elems = np.concatenate([np.eye(G.N, dtype=np.uint8)[None], np.stack(powers)])
            H = G.subgroup(elems)
            H._gens = [E[i]]
            seen[key] = H
    return [seen[k] for k in sorted(seen)]


def is_p_prime_free(p: int, stack: np.ndarray) -> bool:
    """True when every non-identity element has order divisible by p."""
    orders = element_orders(p, stack)
    return bool(np.all((orders == 1) | (orders % p == 0)))


def group_from_elements(spec: FieldSpec, n: int, elements: np.ndarray, name: str = "") -> MatrixGroup:
    return MatrixGroup(spec, n, None, name=name, elements=elements)


def lex_vectors(spec: FieldSpec, n: int):
    """All vectors of GF(q)^n in lexicographic order."""
    N = n * spec.f
    for code in range(spec.p**N):
        yield VectorQ(spec, contract_vector(spec, fp.code_vecs(spec.p, N, code)))


__all__ = [
    "BaseCertificate",
    "CapExceeded",
    "Closure",
    "MatrixGroup",
    "NotEnumerated",
    "OrderUnknown",
    "SearchSpaceTooLarge",
    "NoBaseWithin",
    "SingularGenerator",
    "StabilizerChainLite",
    "centralizer_bruteforce",
    "coprimality_check",
    "element_orders",
    "fixed_space",
    "general_linear_group",
    "group_close",
    "iterated_stabilizer",
    "minimal_base_size",
    "minimal_strong_base_size",
    "minimal_subgroups",
    "normalizer_bruteforce",
    "orbit",
    "strong_base_check",
    "vector_stabilizer",
    "verify_base",
]
