import numpy as np
import pytest

from cobase.construct import (
    BadZ1,
    BlockSystem,
    CoverIsWholeSpace,
    LabelCountMismatch,
    NotCoprime,
    ShapeExcluded,
    TensorShape,
    central_wreath,
    check_diagonal_tensor_centralizer,
    deleted_module_group,
    deleted_permutation_vector,
    embed_block,
    imprimitive_glue,
    imprimitive_wreath,
    is_proper_subfield_coset,
    k_sets,
    quasisimple_search,
    semilinear_group,
    semilinear_lift,
    strong_base_from_base,
    tensor_22_search,
    tensor_power_vectors,
    x_gamma,
)
from cobase import linalg
from cobase.data import bundled_2a5, min_stabilizer_scan
from cobase.field import field_make, primitive_element
from cobase.group import (
    MatrixGroup,
    coprimality_check,
    minimal_base_size,
    strong_base_check,
    vector_stabilizer,
    verify_base,
)
from cobase.matrix import SquareMatrix, VectorQ
from cobase.perm import PreconditionViolated, RegularPartition, cyclic_group, regular_partition_coprime
from cobase.symplectic import build_monomial_normal, build_normalizer, sylow_acting_group

from corpus import corpus_groups  # noqa: E402


def vec(spec, entries):
    return VectorQ(spec, np.array(entries, dtype=np.int64))


# --- imprimitive gluing --------------------------------------------------------------


@pytest.fixture
def signed_swap(gf3):
    G = corpus_groups()["+-1 wr S2<=GL(2,3)"]
    blocks = BlockSystem(
        [[vec(gf3, [1, 0])], [vec(gf3, [0, 1])]],
        [SquareMatrix.identity(gf3, 2), SquareMatrix.permutation(gf3, [1, 0])],
    )
    blocks.check()
    return G, blocks


def test_glue_example(gf3, signed_swap):
    G, blocks = signed_swap
    assert G.order == 8
    e1 = vec(gf3, [1, 0])
    x, y = imprimitive_glue(blocks, e1, e1, RegularPartition((0, 1), 3))
    assert x == vec(gf3, [1, 1]) and y == vec(gf3, [1, 2])
    assert verify_base(G, [x, y]).verified


def test_constant_labels_fail(gf3, signed_swap):
    G, blocks = signed_swap
    e1 = vec(gf3, [1, 0])
    x, y = imprimitive_glue(blocks, e1, e1, RegularPartition((1, 1), 3))
    assert not verify_base(G, [x, y]).verified


def test_label_count_checked(gf3, signed_swap):
    _, blocks = signed_swap
    e1 = vec(gf3, [1, 0])
    with pytest.raises(LabelCountMismatch):
        imprimitive_glue(blocks, e1, e1, RegularPartition((0, 1, 2), 3))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_glue_on_wreath_products(k):
    G1 = corpus_groups()["Q8.Z<=GL(2,5)"]
    _, w = minimal_base_size(G1)
    G, blocks = imprimitive_wreath(G1, cyclic_group(k))
    blocks.check()
    labels = regular_partition_coprime(cyclic_group(k).enumerate(), 5)
    x, y = imprimitive_glue(blocks, embed_block(w[0], k), embed_block(w[1], k), labels)
    assert verify_base(G, [x, y]).verified


# --- strong bases ------------------------------------------------------------------------


def test_dependent_pair_is_its_own_strong_base(gf5):
    G = corpus_groups()["Z.diag<=GL(2,5)"]
    e1, e2 = vec(gf5, [1, 0]), vec(gf5, [0, 1])
    v1, v2, gamma = strong_base_from_base(G, e1, e2)
    assert v1 == e1 and strong_base_check(G, [v1, v2])
    assert gamma is not None


def test_strong_base_keeps_linear_dependence():
    G = corpus_groups()["2.A5*Z mod 11"]
    _, x = min_stabilizer_scan(G)
    y, _ = quasisimple_search(G, x)
    v1, v2, gamma = strong_base_from_base(G, x, y)
    assert v1 == x and strong_base_check(G, [v1, v2])


SCALAR_CORPUS = ["Z.diag<=GL(2,5)", "Q8.Z<=GL(2,5)", "Q8.Z<=GL(2,7)", "S4xZ deleted mod 5", "2.A5*Z mod 11"]


@pytest.mark.parametrize("name", SCALAR_CORPUS)
def test_x_gamma_sets_are_disjoint(name):
    G = corpus_groups()[name]
    assert coprimality_check(G)
    _, w = minimal_base_size(G)
    u1 = w[0]
    u2 = next(VectorQ.unit(G.spec, G.n, i) for i in range(G.n)
              if not linalg.span_contains(G.spec, [u1.codes], VectorQ.unit(G.spec, G.n, i).codes))
    C1 = vector_stabilizer(G, u1, "enum")
    sets = {g: x_gamma(G, u1, u2, g, C1) for g in range(1, G.spec.q)}
    for a in sets:
        for b in sets:
            if a < b:
                assert not (sets[a] & sets[b])
    assert any(not s for s in sets.values())
    v1, v2, _ = strong_base_from_base(G, u1, u2)
    assert strong_base_check(G, [v1, v2])


# --- tensor products ---------------------------------------------------------------------


def test_tensor_vectors_t2_supports(gf5):
    e = [VectorQ.unit(gf5, 3, i) for i in range(3)]
    x, y = tensor_power_vectors(TensorShape(3, 2), e[0], e[1], e[2])
    # index (i, j) -> 3 i + j
    assert x.support() == [0, 4]
    assert y.support() == [2, 3]


def test_tensor_vectors_t3_formula(gf5):
    e1, e2 = VectorQ.unit(gf5, 2, 0), VectorQ.unit(gf5, 2, 1)
    x, y = tensor_power_vectors(TensorShape(2, 3), e1, e2)
    assert x.support() == [0, 7]
    want = e1.kron(e1).kron(e1) + e1.kron(e1).kron(e2) + e1.kron(e2).kron(e2)
    assert y == want


def test_tensor_shape_errors(gf5):
    e1, e2 = VectorQ.unit(gf5, 2, 0), VectorQ.unit(gf5, 2, 1)
    with pytest.raises(ShapeExcluded):
        tensor_power_vectors(TensorShape(2, 2), e1, e2)
    f = [VectorQ.unit(gf5, 3, i) for i in range(3)]
    with pytest.raises(BadZ1):
        tensor_power_vectors(TensorShape(3, 2), f[0], f[1], f[0] + f[1])
    assert str(TensorShape(3, 2)) == "3^2" and TensorShape.parse("3^2") == TensorShape(3, 2)


def test_tensor_square_of_coprime_monomial_group_gl34():
    F4 = field_make(2, 2)
    data = build_normalizer(build_monomial_normal(3, 1, F4))
    G1 = sylow_acting_group(data, 3).enumerate()
    assert G1.order == 81 and coprimality_check(G1)
    _, w = minimal_base_size(G1)
    x1, y1, _ = strong_base_from_base(G1, w[0], w[1])
    z1 = next(
        VectorQ.unit(F4, 3, i)
        for i in range(3)
        if not linalg.span_contains(F4, [x1.codes, y1.codes], VectorQ.unit(F4, 3, i).codes)
    )
    x, y = tensor_power_vectors(TensorShape(3, 2), x1, y1, z1)
    G = central_wreath(G1, 2)
    assert verify_base(G, [x, y]).verified


def test_tensor_22_coprime_q5():
    G1 = corpus_groups()["Q8.Z<=GL(2,5)"]
    F = G1.spec
    x, y, branch, G = tensor_22_search(G1, VectorQ.unit(F, 2, 0), VectorQ.unit(F, 2, 1))
    assert branch.startswith("candidate")
    assert verify_base(G, [x, y]).verified


def test_tensor_22_even_q():
    F = field_make(2, 2)
    a = primitive_element(F).code
    G1 = MatrixGroup.from_matrices([SquareMatrix.scalar(F, 2, a), SquareMatrix.diagonal(F, [a, 1])])
    x, y, branch, G = tensor_22_search(G1, VectorQ.unit(F, 2, 0), VectorQ.unit(F, 2, 1))
    assert verify_base(G, [x, y]).verified


def test_tensor_22_sl23_rejected(gf3):
    G1 = MatrixGroup.from_matrices(
        [SquareMatrix(gf3, np.array([[1, 1], [0, 1]])), SquareMatrix(gf3, np.array([[1, 0], [1, 1]]))]
    )
    with pytest.raises(NotCoprime):
        tensor_22_search(G1, VectorQ.unit(gf3, 2, 0), VectorQ.unit(gf3, 2, 1))


@pytest.mark.parametrize("m,t,p,f", [(2, 2, 3, 1), (2, 2, 5, 1), (2, 2, 2, 2), (2, 3, 3, 1), (2, 3, 2, 2), (3, 2, 3, 1)])
def test_diagonal_tensor_centralizer_closed_form(m, t, p, f):
    r = check_diagonal_tensor_centralizer(field_make(p, f), m, t)
    assert r["equal"], r


@pytest.mark.slow
def test_diagonal_tensor_centralizer_closed_form_gl34():
    r = check_diagonal_tensor_centralizer(field_make(2, 2), 3, 2)
    assert r["equal"] and r["order"] == 60480


# --- semilinear lift -------------------------------------------------------------------------


def _gamma_l1(spec):
    a = primitive_element(spec).code
    return semilinear_group(
        spec, 1, [(SquareMatrix.scalar(spec, 1, a), 0), (SquareMatrix.identity(spec, 1), 1)]
    )


def test_semilinear_gf4():
    F4 = field_make(2, 2)
    Gamma = _gamma_l1(F4).enumerate()
    assert Gamma.order == 6
    one = VectorQ.unit(F4, 1, 0)
    u1, v, gamma = semilinear_lift(Gamma, one, one, check_coprime=False)
    assert verify_base(Gamma, [u1, v]).verified
    assert v == one + one.scale(gamma)


def test_semilinear_not_coprime_is_rejected_by_default():
    F4 = field_make(2, 2)
    one = VectorQ.unit(F4, 1, 0)
    with pytest.raises(NotCoprime):
        semilinear_lift(_gamma_l1(F4), one, one)


def test_prime_field_lift_takes_gamma_zero():
    G = corpus_groups()["Q8.Z<=GL(2,5)"]
    H = MatrixGroup(G.spec, G.n, G.gens, semilinear=True)
    _, w = minimal_base_size(G)
    _, _, gamma = semilinear_lift(H, w[0], w[1])
    assert gamma == 0


@pytest.mark.parametrize("p,f", [(2, 2), (2, 4), (3, 2)])
def test_k_sets_are_subfield_cosets(p, f):
    F = field_make(p, f)
    Gamma = _gamma_l1(F).enumerate()
    one = VectorQ.unit(F, 1, 0)
    K = k_sets(Gamma, one, one)
    assert K
    for codes in K.values():
        assert is_proper_subfield_coset(F, codes)


# --- deleted permutation module --------------------------------------------------------------


def test_deleted_module_c3_p5():
    x, y, info = deleted_permutation_vector(3, 5)
    assert info["C_N(x)"] == 1
    # projection of (1,2,3): subtract the mean 2
    assert x == vec(field_make(5), [4, 0])


def test_deleted_module_c4_p5():
    G = deleted_module_group(4, 5)
    assert G.enumerate().order == 96
    x, y, info = deleted_permutation_vector(4, 5, G)
    assert info["abelian"] and info["C_N(x)"] == 1
    assert verify_base(G, [x, y]).verified


@pytest.mark.parametrize("c,p", [(3, 7), (4, 7), (5, 7), (5, 11)])
def test_deleted_module_more(c, p):
    G = deleted_module_group(c, p)
    x, y, info = deleted_permutation_vector(c, p, G)
    assert info["C_N(x)"] == 1 and verify_base(G, [x, y]).verified


def test_deleted_module_precondition():
    with pytest.raises(PreconditionViolated):
        deleted_permutation_vector(5, 5)


# --- fixed-space covering --------------------------------------------------------------------


def test_quasisimple_on_deleted_module():
    G = corpus_groups()["S4xZ deleted mod 5"]
    _, x = min_stabilizer_scan(G)
    y, rep = quasisimple_search(G, x)
    assert verify_base(G, [x, y]).verified
    assert rep.minimal_subgroups == len(rep.fixed_dims)


@pytest.mark.parametrize("p", [11, 19, 29])
def test_quasisimple_on_bundled(p):
    G = bundled_2a5(p).group()
    order, x = min_stabilizer_scan(G)
    y, rep = quasisimple_search(G, x)
    assert verify_base(G, [x, y]).verified
    assert rep.part1
    if rep.bound is not None and rep.part2:
        assert rep.union_size <= rep.bound


def test_cover_of_whole_space(gf3):
    # transvections of GL(2,3) fix every line, so nothing is left over
    with pytest.raises(CoverIsWholeSpace):
        quasisimple_search(corpus_groups()["GL(2,3)"], vec(gf3, [0, 0]))
