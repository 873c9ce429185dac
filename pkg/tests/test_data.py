import pytest

from cobase.data import (
    BUNDLED_2A5_PRIMES,
    STABILIZER_ORDERS,
    OrderMismatch,
    ParseError,
    bundled_2a5,
    bundled_files,
    bundled_group_path,
    bundled_tables,
    dump_group,
    load_group,
    min_stabilizer_scan,
    parse_group,
    parse_perm_group,
    parse_vectors,
    table1_rows,
    table2_rows,
    tables_json,
)
from cobase.field import field_make, primitive_element
from cobase.group import MatrixGroup, SearchSpaceTooLarge
from cobase.matrix import SquareMatrix

SWAP = """\
# the coordinate swap in GL(2,3)
field 3 1
dim 2
name swap
order 2

0 1
1 0
"""


def test_parse_example():
    rec = parse_group(SWAP)
    assert rec.name == "swap" and rec.n == 2 and rec.spec.q == 3
    assert rec.group().order == 2


def test_roundtrip_text():
    rec = parse_group(SWAP)
    again = parse_group(dump_group(rec))
    assert dump_group(again) == dump_group(rec)
    assert [g.codes.tolist() for g in again.generators] == [[[0, 1], [1, 0]]]


def test_roundtrip_extension_field():
    F = field_make(3, 2)
    a = primitive_element(F).code
    g = SquareMatrix.from_entries(F, [[a, 0], [0, 1]])
    from cobase.data import GroupRecord

    rec = GroupRecord("diag", F, 2, [g], expected_order=8)
    back = parse_group(dump_group(rec))
    assert back.generators[0] == g and back.spec == F
    assert back.group().order == 8


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("dim 2\n1 0\n0 1\n", 2, 1),
        ("field 3 1\ndim 2\n1 0\n0 1 2\n", 4, 5),
        ("field 3 1\ndim 2\n1 x\n0 1\n", 3, 3),
        ("field 4 1\ndim 1\n1\n", 1, 7),
        ("field 3 1\ndim 2\n1 1\n1 1\n", 3, 1),
        ("field 3 1\n", 1, 1),
        ("field 3 1\ndim 2\n1 0\n", 3, 1),
        ("field 3 1\ndim zero\n", 2, 5),
    ],
)
def test_parse_errors_point_at_position(text, line, col):
    with pytest.raises(ParseError) as err:
        parse_group(text)
    assert (err.value.line, err.value.col) == (line, col)
    assert f"line {line}, col {col}" in str(err.value)


def test_order_mismatch():
    rec = parse_group(SWAP.replace("order 2", "order 4"))
    with pytest.raises(OrderMismatch):
        rec.group()
    assert rec.group(check=False).enumerate().order == 2


def test_perm_group_file():
    G = parse_perm_group("degree 3\n1 2 0\n1 0 2\n")
    assert G.enumerate().order == 6
    with pytest.raises(ParseError):
        parse_perm_group("0 0 1\n")


def test_parse_vectors(gf5):
    vs = parse_vectors(gf5, 2, "1,0;2,3")
    assert [v.codes.tolist() for v in vs] == [[1, 0], [2, 3]]


@pytest.mark.parametrize("p", BUNDLED_2A5_PRIMES)
def test_bundled_files_match_generator(p):
    rec = load_group(bundled_group_path(f"2a5z_p{p}.grp"))
    fresh = bundled_2a5(p)
    assert dump_group(rec) == dump_group(fresh)
    G = rec.group()
    assert G.order == 60 * (p - 1)


def test_bundled_listing():
    assert bundled_files() == [f"2a5z_p{p}.grp" for p in BUNDLED_2A5_PRIMES]


@pytest.mark.parametrize("p", BUNDLED_2A5_PRIMES)
def test_min_stabilizer_matches_table(p):
    rec = bundled_2a5(p)
    order, x = min_stabilizer_scan(rec.group())
    assert order == rec.expected_min_stabilizer_order
    assert not x.is_zero()


def test_min_stabilizer_scalars_gl17():
    F = field_make(7)
    G = MatrixGroup.from_matrices([SquareMatrix.scalar(F, 1, primitive_element(F).code)])
    order, x = min_stabilizer_scan(G)
    assert order == 1 and x.codes.tolist() == [1]


def test_min_stabilizer_bound():
    G = bundled_2a5(61).group()
    with pytest.raises(SearchSpaceTooLarge):
        min_stabilizer_scan(G, bound=100)


def test_tables():
    assert [r.group for r in table1_rows()] == [
        "S3", "PSL(2,5)", "PGammaL(2,8)", "S4", "PGL(2,5)", "PSL(3,2)", "M11", "M12", "ASL(3,2)",
    ]
    assert len(table2_rows()) == 21
    for row in table2_rows():
        assert len(row.primes) == len(row.min_stabilizers)
        for s in row.min_stabilizers:
            assert s in STABILIZER_ORDERS


def test_bundled_tables_json_is_current():
    import json

    assert bundled_tables() == json.loads(tables_json())
