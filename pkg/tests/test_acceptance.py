"""Acceptance criteria, one test each.

Each test carries an ``acceptance`` mark; the conftest hook prints one
PASS/FAIL line per criterion after the run.  Run on its own with

    python3 -m pytest tests/test_acceptance.py
"""

import itertools
import json
import subprocess
import sys
import time

import numpy as np
import pytest

from cobase import linalg
from cobase.construct import (
    central_wreath,
    check_diagonal_tensor_centralizer,
    is_proper_subfield_coset,
    k_sets,
    quasisimple_search,
    semilinear_group,
    semilinear_lift,
    strong_base_from_base,
    x_gamma,
)
from cobase.data import bundled_2a5, min_stabilizer_scan, table1_rows
from cobase.field import field_make, primitive_element
from cobase.group import (
    MatrixGroup,
    element_orders,
    intersection_stabilizer,
    minimal_base_size,
    minimal_strong_base_size,
    orbit,
    vector_stabilizer,
    verify_base,
)
from cobase.matrix import SquareMatrix, VectorQ
from cobase.perm import regular_orbit_count, table1_groups
from cobase.symplectic import build_monomial_normal, normalizer_order, run_symplectic, w_partition

from corpus import corpus_groups  # noqa: E402

acceptance = pytest.mark.acceptance


def timed(limit: float):
    """Context manager asserting a wall-clock budget in seconds."""

    class _T:
        def __enter__(self):
            self.t = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.t
            if exc[0] is None:
                assert self.elapsed < limit, f"took {self.elapsed:.1f}s, budget {limit}s"

    return _T()


@acceptance(1, "Table 1 regular-orbit counts for S3 and S4")
def test_table1_regression():
    with timed(1.0):
        groups = table1_groups()
        S3, S4 = groups["S3"].enumerate(), groups["S4"].enumerate()
        assert regular_orbit_count(S3, 3) == 1
        assert regular_orbit_count(S3, 4) >= 4
        assert regular_orbit_count(S4, 3) == 0
        assert regular_orbit_count(S4, 4) == 1
    rows = {r.group: r for r in table1_rows()}
    assert rows["S3"].regular_p3 == 1 and rows["S4"].regular_p4 == "1"


@acceptance(2, "tensor (2,2) exception: SL(2,3).Z wr S2 on F_3^4 has b = 3")
def test_tensor_22_exception():
    with timed(10.0):
        F = field_make(3)
        G1 = MatrixGroup.from_matrices(
            [
                SquareMatrix.from_entries(F, [[1, 1], [0, 1]]),
                SquareMatrix.from_entries(F, [[1, 0], [1, 1]]),
                SquareMatrix.scalar(F, 2, F.neg(1)),
            ]
        ).enumerate()
        assert G1.order == 24
        b1, w1 = minimal_base_size(G1)
        s1, _ = minimal_strong_base_size(G1)
        assert b1 == 2 and s1 == 2
        G = central_wreath(G1, 2).enumerate()
        assert G.order == 24 * 24 // 2 * 2
        b, w = minimal_base_size(G)
        assert b == 3
        assert verify_base(G, w).verified


@acceptance(3, "GL(4,7) normalizer: (x0, y0) verified by SchreierStabilizer")
def test_gl4_q7_schreier():
    with timed(60.0):
        run = run_symplectic(2, 2, 7, acting="full", method="schreier")
    cert = run.certificate
    assert cert.method == "SchreierStabilizer"
    assert cert.verified and cert.stabilizer_order_chain[-1] == 1
    # the order is certified twice: by the outer image and by the chain
    assert cert.stabilizer_order_chain[0] == normalizer_order(run.struct) == run.acting.order
    print("order chain", cert.stabilizer_order_chain, "(stated order 138240; computed", run.acting.order, ")")


@acceptance(4, "GL(4,3) normalizer: no 2-base, and C(x0) ∩ C(y0) is a 3-group")
def test_gl4_q3_full_normalizer():
    with timed(30.0):
        run = run_symplectic(2, 2, 3, acting="full")
        assert not run.certificate.verified
        H = intersection_stabilizer(run.acting, list(run.vectors))
        orders = element_orders(3, H.elements)
    bad = sorted({int(o) for o in orders if o != 1 and o % 3})
    assert not bad, f"C(x0) ∩ C(y0) has order {H.order} with element orders {sorted(set(orders.tolist()))}"


@acceptance(5, "GL(4,9) and GL(4,5) normalizers: (x0, y0) verify")
@pytest.mark.parametrize("q", [9, 5])
def test_gl4_q9_q5(q):
    with timed(60.0):
        run = run_symplectic(2, 2, q)
    assert run.branch == f"gl4-q{q}"
    assert run.certificate.verified


@acceptance(6, "odd r monomial instances verify; n = 9 uses SchreierStabilizer")
def test_odd_r_instances():
    with timed(300.0):
        for r, k, q in [(3, 1, 4), (3, 1, 7), (3, 2, 7), (5, 1, 11)]:
            run = run_symplectic(r, k, q)
            assert run.certificate.verified, (r, k, q)
            if (r, k) == (3, 2):
                assert run.certificate.method == "SchreierStabilizer"


@acceptance(7, "r = 2 instances (2,3,3) and (2,4,3) verify on both branches")
def test_r2_instances():
    with timed(300.0):
        a = run_symplectic(2, 3, 3)
        b = run_symplectic(2, 4, 3)
    assert a.branch == "r2-generic" and a.certificate.verified
    assert b.branch == "r2-W16" and b.certificate.verified


@acceptance(8, "non-monomial instances (n, q) = (4, 3) and (8, 3) verify")
def test_nonmonomial_instances():
    with timed(600.0):
        for k in (2, 3):
            run = run_symplectic(2, k, 3, nonmonomial=True)
            assert run.certificate.verified, k


@acceptance(9, "diagonal tensor centralizers equal the closed forms")
def test_centralizer_oracle():
    with timed(300.0):
        for m, t, q in [(2, 2, 3), (2, 2, 5), (3, 2, 3), (2, 3, 3)]:
            r = check_diagonal_tensor_centralizer(field_make(q), m, t)
            assert r["equal"], r


@acceptance(10, "2.A5*Z in GL(2,11): minimal stabilizer 5 and a verified 2-base")
def test_table2_desk_row():
    with timed(10.0):
        G = bundled_2a5(11).group()
        order, x = min_stabilizer_scan(G)
        assert order == 5
        y, _ = quasisimple_search(G, x)
        assert verify_base(G, [x, y]).verified


# --- criterion 11: property suites --------------------------------------------------------


def _prime_powers(limit):
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79):
        f = 1
        while p**f <= limit:
            yield p, f
            f += 1


def _field_axioms(F):
    c = np.arange(F.q)
    a, b = np.meshgrid(c, c, indexing="ij")
    add, mul = F.add(a, b), F.mul(a, b)
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    assert np.all(add[:, 0] == c) and np.all(mul[:, 1] == c)
    assert np.all(add[c, F.neg(c)] == 0)
    nz = c[1:]
    assert np.all(mul[nz, F.inv(nz)] == 1)
    # associativity and distributivity over all triples
    A, B, C = np.meshgrid(c, c, c, indexing="ij")
    assert np.array_equal(add[add[A, B], C], add[A, add[B, C]])
    assert np.array_equal(mul[mul[A, B], C], mul[A, mul[B, C]])
    assert np.array_equal(mul[A, add[B, C]], add[mul[A, B], mul[A, C]])


def _orbit_stabilizer(G):
    G.enumerate()
    for x in itertools.islice(
        (VectorQ(G.spec, np.array(v)) for v in itertools.product(range(G.spec.q), repeat=G.n) if any(v)), 12
    ):
        orb = orbit(G.p, G.gens, x.realize())
        assert len(orb) * vector_stabilizer(G, x).order == G.order


def _w_partitions():
    cases = [(r, 1) for r in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)]
    cases += [(3, 2), (3, 3), (5, 2), (7, 2), (2, 3), (2, 4), (2, 5), (2, 6)]
    for r, k in cases:
        P = w_partition(r, k)
        assert P.stabilizer_count() == 1, (r, k)
        assert P.bound() in (True, None), (r, k)
        assert P.bound() is None or r**k not in (3, 9, 16)


def _independent(u):
    n = len(u.codes)
    return next(e for e in (VectorQ.unit(u.spec, n, i) for i in range(n))
                if not linalg.span_contains(u.spec, [u.codes], e.codes))


def _strong_base_disjoint():
    for name in ["Z.diag<=GL(2,5)", "Q8.Z<=GL(2,5)", "Q8.Z<=GL(2,7)", "S4xZ deleted mod 5", "2.A5*Z mod 11"]:
        G = corpus_groups()[name]
        _, w = minimal_base_size(G)
        u1, u2 = w[0], _independent(w[0])
        C1 = vector_stabilizer(G, u1, "enum")
        sets = [x_gamma(G, u1, u2, g, C1) for g in range(1, G.spec.q)]
        for s, t in itertools.combinations(sets, 2):
            assert not (s & t), name
        # disjoint subsets of the q - 2 values lambda != 0, 1, so one of them is empty
        assert sum(len(s) for s in sets) <= G.spec.q - 2
        assert any(not s for s in sets)
        strong_base_from_base(G, u1, u2)


def _semilinear_gf4():
    F = field_make(2, 2)
    a = primitive_element(F).code
    Gamma = semilinear_group(F, 1, [(SquareMatrix.scalar(F, 1, a), 0), (SquareMatrix.identity(F, 1), 1)])
    one = VectorQ.unit(F, 1, 0)
    K = k_sets(Gamma, one, one)
    assert K and all(is_proper_subfield_coset(F, s) for s in K.values())
    u, v, _ = semilinear_lift(Gamma, one, one, check_coprime=False)
    assert verify_base(Gamma, [u, v]).verified


def _base_inequality():
    for name, G in corpus_groups().items():
        b, _ = minimal_base_size(G)
        s, _ = minimal_strong_base_size(G)
        if all(g.is_scalar() for g in G.square_matrices(G.gens)):
            # the empty set is a strong base of a scalar group
            assert s == 0 and b == 1, name
        else:
            assert b <= s <= b + 1, name


@acceptance(11, "property suites: fields, orbits, W-partitions, X_gamma, K_g, b <= b* <= b+1")
def test_property_suites():
    with timed(600.0):
        for p, f in _prime_powers(81):
            _field_axioms(field_make(p, f))
        for G in corpus_groups().values():
            _orbit_stabilizer(G)
        _w_partitions()
        _strong_base_disjoint()
        _semilinear_gf4()
        _base_inequality()


# --- criterion 12: determinism ------------------------------------------------------------

COMMANDS = [
    ["regress", "--table", "1"],
    ["construct", "symplectic", "--r", "2", "--k", "2", "--q", "7", "--acting", "full", "--method", "schreier"],
    ["construct", "symplectic", "--r", "2", "--k", "2", "--q", "3", "--acting", "full"],
    ["construct", "symplectic", "--r", "2", "--k", "2", "--q", "9"],
    ["construct", "symplectic", "--r", "2", "--k", "2", "--q", "5"],
    ["construct", "symplectic", "--r", "3", "--k", "1", "--q", "4"],
    ["construct", "symplectic", "--r", "3", "--k", "1", "--q", "7"],
    ["construct", "symplectic", "--r", "3", "--k", "2", "--q", "7"],
    ["construct", "symplectic", "--r", "5", "--k", "1", "--q", "11"],
    ["construct", "symplectic", "--r", "2", "--k", "3", "--q", "3"],
    ["construct", "symplectic", "--r", "2", "--k", "4", "--q", "3"],
    ["construct", "symplectic", "--r", "2", "--k", "2", "--q", "3", "--nonmonomial"],
    ["construct", "symplectic", "--r", "2", "--k", "3", "--q", "3", "--nonmonomial"],
    ["construct", "tensor"],
    ["scan", "--group", "bundled:2a5z_p11", "--pair"],
    ["regress", "--table", "2"],
]


def _cli(argv):
    out = subprocess.run([sys.executable, "-m", "cobase.cli", *argv, "--json"], capture_output=True)
    assert out.returncode in (0, 1), (argv, out.stderr.decode())
    return out.stdout


@acceptance(12, "repeated acceptance commands give byte-identical certificates")
def test_determinism():
    for argv in COMMANDS:
        first, second = _cli(argv), _cli(argv)
        assert first == second, argv
        assert json.loads(first)["certificates"] or "regress" in argv


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
