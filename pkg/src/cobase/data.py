"""Group files, the two regression tables, and the bundled desk-scale corpus.

Group file format (line oriented, '#' starts a comment)::

    field 3 2 1 0 1      # p, f, then optionally the f+1 modulus coefficients
    dim 2
    name SL(2,3)         # optional
    order 24             # optional; checked against the closure
    min_stabilizer 5     # optional
    table_row ...        # optional free text

followed by the generators, each as ``dim`` rows of ``dim`` field-element tokens
(``1,2`` for 1 + 2x over an extension field).  Blank lines between matrices are
ignored.

Permutation group files hold one image list per line (``2 0 1``), with optional
``degree`` and ``name`` headers.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import fp
from .field import FieldError, FieldSpec, field_make
from .group import GroupError, MatrixGroup, SearchSpaceTooLarge, close_realized
from .matrix import SquareMatrix, VectorQ
from .perm import Permutation, PermGroup


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class OrderMismatch(GroupError):
    pass


@dataclass
class GroupRecord:
    name: str
    spec: FieldSpec
    n: int
    generators: list[SquareMatrix]
    expected_order: int | None = None
    expected_min_stabilizer_order: int | None = None
    table_row_ref: str | None = None

    def group(self, check: bool = True, cap: int | None = None) -> MatrixGroup:
        G = MatrixGroup.from_matrices(self.generators, name=self.name)
        if check and self.expected_order is not None:
            c = close_realized(self.spec.p, G.gens, cap)
            if c.order != self.expected_order:
                raise OrderMismatch(f"{self.name}: closure has order {c.order}, file says {self.expected_order}")
            G._elements, G._index, G.order = c.elements, c.index, c.order
        return G


def _tokens(line: str):
    """(column, token) pairs of a line with the comment stripped."""
    body = line.split("#", 1)[0]
    out = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((i + 1, body[i:j]))
        i = j
    return out


def _int(tok, lineno, col, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer for {what}, got {tok!r}", lineno, col) from None


def parse_group(text: str, source: str = "<string>") -> GroupRecord:
    lines = text.splitlines()
    spec = None
    n = None
    meta: dict = {}
    rows: list[tuple[int, list]] = []
    for lineno, line in enumerate(lines, 1):
        toks = _tokens(line)
        if not toks:
            continue
        col, head = toks[0]
        if head == "field":
            if spec is not None:
                raise ParseError("duplicate field line", lineno, col)
            if len(toks) < 3:
                raise ParseError("field needs p and f", lineno, col)
            p = _int(toks[1][1], lineno, toks[1][0], "p")
            f = _int(toks[2][1], lineno, toks[2][0], "f")
            mod = [c for tc, t in toks[3:] for c in t.split(",") if c != ""]
            try:
                if mod:
                    spec = FieldSpec(p, f, tuple(_int(c, lineno, toks[3][0], "modulus") for c in mod))
                else:
                    spec = field_make(p, f)
            except FieldError as exc:
                raise ParseError(str(exc), lineno, toks[1][0]) from None
        elif head == "dim":
            if len(toks) != 2:
                raise ParseError("dim takes one integer", lineno, col)
            n = _int(toks[1][1], lineno, toks[1][0], "dim")
            if n < 1:
                raise ParseError("dim must be positive", lineno, toks[1][0])
        elif head in ("name", "table_row"):
            meta[head] = line.split("#", 1)[0].strip()[len(head) :].strip()
        elif head in ("order", "min_stabilizer"):
            if len(toks) != 2:
                raise ParseError(f"{head} takes one integer", lineno, col)
            meta[head] = _int(toks[1][1], lineno, toks[1][0], head)
        else:
            if spec is None or n is None:
                raise ParseError("matrix rows before the field and dim headers", lineno, col)
            if len(toks) != n:
                raise ParseError(f"expected {n} entries, found {len(toks)}", lineno, toks[-1][0])
            row = []
            for c, t in toks:
                try:
                    row.append(spec.parse_element(t))
                except (FieldError, ValueError) as exc:
                    raise ParseError(str(exc), lineno, c) from None
            rows.append((lineno, row))
    if spec is None:
        raise ParseError("missing field header", len(lines) or 1)
    if n is None:
        raise ParseError("missing dim header", len(lines) or 1)
    if not rows or len(rows) % n:
        last = rows[-1][0] if rows else len(lines) or 1
        raise ParseError(f"generator rows must come in blocks of {n}", last)
    gens = []
    for b in range(0, len(rows), n):
        m = SquareMatrix(spec, np.array([r for _, r in rows[b : b + n]], dtype=np.int64))
        if m.det() == 0:
            raise ParseError("generator is singular", rows[b][0])
        gens.append(m)
    return GroupRecord(
        meta.get("name") or Path(source).stem,
        spec,
        n,
        gens,
        meta.get("order"),
        meta.get("min_stabilizer"),
        meta.get("table_row"),
    )


def load_group(path) -> GroupRecord:
    path = Path(path)
    return parse_group(path.read_text(), str(path))


def dump_group(rec: GroupRecord) -> str:
    spec = rec.spec
    out = [f"field {spec.p} {spec.f} {' '.join(map(str, spec.modulus))}", f"dim {rec.n}"]
    if rec.name:
        out.append(f"name {rec.name}")
    if rec.expected_order is not None:
        out.append(f"order {rec.expected_order}")
    if rec.expected_min_stabilizer_order is not None:
        out.append(f"min_stabilizer {rec.expected_min_stabilizer_order}")
    if rec.table_row_ref:
        out.append(f"table_row {rec.table_row_ref}")
    for g in rec.generators:
        out.append("")
        for row in g.codes:
            out.append(" ".join(spec.format_element(int(c)) for c in row))
    return "\n".join(out) + "\n"


def parse_perm_group(text: str, source: str = "<string>") -> PermGroup:
    degree = None
    name = Path(source).stem
    gens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        col, head = toks[0]
        if head == "degree":
            degree = _int(toks[1][1], lineno, toks[1][0], "degree") if len(toks) == 2 else None
            if degree is None:
                raise ParseError("degree takes one integer", lineno, col)
            continue
        if head == "name":
            name = line.split("#", 1)[0].strip()[4:].strip()
            continue
        images = [_int(t, lineno, c, "image") for c, t in toks]
        if sorted(images) != list(range(len(images))):
            raise ParseError("not a permutation of 0..m-1", lineno, col)
        if degree is not None and len(images) != degree:
            raise ParseError(f"expected {degree} images", lineno, toks[-1][0])
        gens.append(Permutation(images))
    if not gens:
        if degree is None:
            raise ParseError("no generators and no degree", 1)
        gens = [Permutation(list(range(degree)))]
    return PermGroup(gens, degree or gens[0].degree, name=name)


def load_perm_group(path) -> PermGroup:
    path = Path(path)
    return parse_perm_group(path.read_text(), str(path))


def parse_vectors(spec: FieldSpec, n: int, text: str) -> list[VectorQ]:
    """'v1;v2' with each vector a flat comma list of coefficients."""
    return [VectorQ.from_text(spec, part, n) for part in text.split(";") if part.strip()]


# --- regression tables ---------------------------------------------------------


@dataclass(frozen=True)
class Table1Row:
    group: str
    degree: int
    max_alternating: int
    regular_p3: int | None  # None where the table has "-" (no regular orbit)
    regular_p4: str  # "1" or ">=4"

    def p3_count(self) -> int:
        return self.regular_p3 or 0


@dataclass(frozen=True)
class Table2Row:
    group: str
    n: int
    primes: tuple[int, ...]
    min_stabilizers: tuple[str, ...]

    def entries(self):
        return list(zip(self.primes, self.min_stabilizers))


TABLE1 = (
    Table1Row("S3", 3, 3, 1, ">=4"),
    Table1Row("PSL(2,5)", 6, 5, 1, ">=4"),
    Table1Row("PGammaL(2,8)", 9, 3, 1, ">=4"),
    Table1Row("S4", 4, 4, None, "1"),
    Table1Row("PGL(2,5)", 6, 5, None, ">=4"),
    Table1Row("PSL(3,2)", 7, 4, None, ">=4"),
    Table1Row("M11", 11, 6, None, ">=4"),
    Table1Row("M12", 12, 6, None, ">=4"),
    Table1Row("ASL(3,2)", 8, 4, None, "1"),
)

TABLE2 = (
    Table2Row("A5xZ", 3, (11,), ("C2",)),
    Table2Row("A5.2xZ", 4, (7,), ("C2",)),
    Table2Row("2.A5*Z", 2, (29, 41, 61, 11, 19, 31), ("C2", "C2", "C2", "C5", "C3", "C3")),
    Table2Row("Z.(8*2.A5).2", 4, (7,), ("V4",)),
    Table2Row("A6.2xZ", 5, (7,), ("C2",)),
    Table2Row("2.A6.2*Z", 4, (7,), ("C3",)),
    Table2Row("3.A6*Z", 3, (19, 31), ("C2", "C2")),
    Table2Row("2.A7*Z", 4, (11,), ("C3",)),
    Table2Row("L2(7)xZ", 3, (11,), ("C2",)),
    Table2Row("Z.(6xL2(7)).2", 6, (5,), ("C2",)),
    Table2Row("U3(3)xZ", 7, (5,), ("C2",)),
    Table2Row("U3(3).2xZ", 7, (5,), ("C2",)),
    Table2Row("(U3(3)xZ).2", 6, (5,), ("S3",)),
    Table2Row("U4(2)xZ", 5, (7, 13, 19), ("S4", "V4", "C2")),
    Table2Row("U4(2).2xZ", 6, (7, 11, 13), ("D12", "V4", "C2")),
    Table2Row("2.U4(2)*Z", 4, (7, 13, 19, 31, 37), ("U72", "U18", "C3^2|C9", "C3", "C2")),
    Table2Row("6_1.U4(3).2_2*Z", 6, (13, 19, 31, 37), ("W(B3)", "S3xC2", "V4", "C2")),
    Table2Row("U5(2)xZ", 10, (7,), ("V4",)),
    Table2Row("Sp6(2)xZ", 7, (11, 13, 17, 19), ("C2^3", "V4", "C2", "C2")),
    Table2Row("2.O8+(2)*Z", 8, (11, 13, 17, 19, 23), ("W(B3)", "S4", "S3", "V4", "C2")),
    Table2Row("2.J2*Z", 6, (11,), ("S3",)),
)

STABILIZER_ORDERS = {
    "C2": 2,
    "C3": 3,
    "C5": 5,
    "V4": 4,
    "S3": 6,
    "S4": 24,
    "D12": 12,
    "U72": 72,
    "U18": 18,
    "C3^2|C9": 9,
    "W(B3)": 48,
    "S3xC2": 12,
    "C2^3": 8,
}


def table1_rows() -> list[Table1Row]:
    return list(TABLE1)


def table2_rows() -> list[Table2Row]:
    return list(TABLE2)


def tables_json() -> str:
    doc = {
        "table1": [asdict(r) for r in TABLE1],
        "table2": [
            {**asdict(r), "primes": list(r.primes), "min_stabilizers": list(r.min_stabilizers),
             "orders": [STABILIZER_ORDERS[s] for s in r.min_stabilizers]}
            for r in TABLE2
        ],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def bundled_tables() -> dict:
    return json.loads(resources.files("cobase.resources").joinpath("tables.json").read_text())


# --- bundled groups ----------------------------------------------------------------

BUNDLED_2A5_PRIMES = (11, 19, 29, 31, 41, 61)


def sl25_generators(p: int) -> tuple[SquareMatrix, SquareMatrix]:
    """A = [[0,-1],[1,0]] and the first B (in code order) of trace 1 and det 1 with
    tr(AB)^2 - tr(AB) - 1 = 0; these generate 2.A5 inside SL(2, p)."""
    if p % 10 not in (1, 9):
        raise ValueError("2.A5 < SL(2,p) needs p = +-1 mod 10")
    spec = field_make(p)
    A = SquareMatrix.from_entries(spec, [[0, p - 1], [1, 0]])
    for a in range(p):
        d = (1 - a) % p
        for b in range(p):
            for c in range(p):
                if (a * d - b * c) % p != 1:
                    continue
                # tr(AB) for B = [[a,b],[c,d]] is c - b
                t = (c - b) % p
                if (t * t - t - 1) % p:
                    continue
                B = SquareMatrix.from_entries(spec, [[a, b], [c, d]])
                if close_realized(p, [A.realize(), B.realize()], cap=240).order == 120:
                    return A, B
    raise AssertionError("no 2.A5 found")  # unreachable for admissible p


def bundled_2a5(p: int) -> GroupRecord:
    spec = field_make(p)
    A, B = sl25_generators(p)
    from .field import primitive_element

    Zg = SquareMatrix.scalar(spec, 2, primitive_element(spec).code)
    row = dict(zip(TABLE2[2].primes, TABLE2[2].min_stabilizers))[p]
    return GroupRecord(
        f"2.A5*Z mod {p}",
        spec,
        2,
        [A, B, Zg],
        expected_order=60 * (p - 1),
        expected_min_stabilizer_order=STABILIZER_ORDERS[row],
        table_row_ref=f"2.A5*Z n=2 p={p} {row}",
    )


def bundled_group_path(name: str) -> Path:
    return Path(str(resources.files("cobase.resources").joinpath(name)))


def bundled_files() -> list[str]:
    return [f"2a5z_p{p}.grp" for p in BUNDLED_2A5_PRIMES]


# --- minimal stabilizers --------------------------------------------------------------


def min_stabilizer_scan(G: MatrixGroup, bound: int = 10**6) -> tuple[int, VectorQ]:
    """Smallest |C_G(x)| over nonzero x and the lexicographically least witness."""
    p, N = G.p, G.N
    if p**N > bound:
        raise SearchSpaceTooLarge(f"|V| = {p ** N} exceeds {bound}")
    G.enumerate()
    E = G.elements
    allv = fp.code_vecs(p, N, np.arange(1, p**N))
    counts = np.zeros(len(allv), dtype=np.int64)
    chunk = max(1, 2**24 // (len(allv) * N + 1))
    for s in range(0, len(E), chunk):
        imgs = np.einsum("bij,vj->bvi", E[s : s + chunk].astype(np.int64), allv.astype(np.int64)) % p
        counts += np.all(imgs == allv[None], axis=2).sum(axis=0)
    best = int(counts.min())
    idx = int(np.nonzero(counts == best)[0][0])
    from .matrix import contract_vector

    return best, VectorQ(G.spec, contract_vector(G.spec, allv[idx]))
