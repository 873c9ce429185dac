"""Small groups shared by several test modules."""

from functools import lru_cache

import numpy as np

from cobase.construct import deleted_module_group
from cobase.data import bundled_2a5
from cobase.field import field_make, primitive_element
from cobase.group import MatrixGroup, general_linear_group
from cobase.matrix import SquareMatrix
from cobase.symplectic import build_monomial_normal, quaternion_pair


@lru_cache(maxsize=None)
def corpus_groups() -> dict[str, MatrixGroup]:
    F3, F5, F7 = field_make(3), field_make(5), field_make(7)
    out = {}

    def add(name, mats):
        out[name] = MatrixGroup.from_matrices(mats, name=name).enumerate()

    add("Z<=GL(2,5)", [SquareMatrix.scalar(F5, 2, 2)])
    add("swap<=GL(2,3)", [SquareMatrix.permutation(F3, [1, 0])])
    add("+-1 wr S2<=GL(2,3)", [SquareMatrix.diagonal(F3, [2, 1]), SquareMatrix.permutation(F3, [1, 0])])
    i, j = quaternion_pair(F5)
    add("Q8.Z<=GL(2,5)", [i, j, SquareMatrix.scalar(F5, 2, primitive_element(F5).code)])
    i, j = quaternion_pair(F7)
    add("Q8.Z<=GL(2,7)", [i, j, SquareMatrix.scalar(F7, 2, 3)])
    out["GL(2,3)"] = general_linear_group(F3, 2).enumerate()
    add("Z.diag<=GL(2,5)", [SquareMatrix.scalar(F5, 2, 2), SquareMatrix.diagonal(F5, [1, 2])])
    add("N(2,2,3)", build_monomial_normal(2, 2, F3).generators())
    add("N(3,1,7)", build_monomial_normal(3, 1, F7).generators())
    G = deleted_module_group(4, 5)
    out["S4xZ deleted mod 5"] = G.enumerate()
    out["2.A5*Z mod 11"] = bundled_2a5(11).group()
    return out
