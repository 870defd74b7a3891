from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from sympy.matrices.normalforms import invariant_factors
from hypothesis import given, settings
from hypothesis import strategies as st

from tropper.exact import (
    GaussianRational,
    LaurentCoefficient,
    MultiplicativeValue,
    det,
    divisibility_index,
    hermite_rows,
    kernel_sublattice,
    matmul,
    primitive,
    smith_diagonal,
    smith_normal_form,
    solve_in_lattice,
)

small = st.integers(-6, 6)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_gaussian_arithmetic_collapses_to_fraction():
    i = GaussianRational(0, 1)
    assert i * i == -1
    assert isinstance(i * i, Fraction)
    z = GaussianRational(Fraction(1, 2), 3)
    assert z / z == 1
    assert complex(z) == complex(0.5, 3)


@given(matrices(3, 4))
@settings(max_examples=60, deadline=None)
def test_smith_form_reconstructs(M):
    U, D, V = smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    diag = [D[i][i] for i in range(3)]
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(det([row[:3] for row in U])) == 1


@given(matrices(3, 3))
@settings(max_examples=60, deadline=None)
def test_smith_diagonal_matches_sympy_invariants(M):
    ours = [d for d in smith_diagonal(M) if d]
    theirs = [abs(int(d)) for d in invariant_factors(sympy.Matrix(M), domain=sympy.ZZ) if d != 0]
    assert ours == theirs


@given(matrices(2, 5))
@settings(max_examples=60, deadline=None)
def test_kernel_sublattice_is_saturated_kernel(M):
    ker = kernel_sublattice(M)
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)
    rank = sympy.Matrix(M).rank()
    assert len(ker) == 5 - rank
    if ker:
        # saturation: all invariant factors of the basis matrix are 1
        assert smith_diagonal(ker) == [1] * len(ker)


def test_divisibility_index_and_primitive():
    assert divisibility_index((4, -6)) == 2
    assert primitive((4, -6)) == (2, -3)
    with pytest.raises(ValueError):
        divisibility_index((0, 0))


def test_hermite_and_solve():
    basis = hermite_rows([(2, 4, 0), (0, 3, 3), (2, 7, 3)], 3)
    assert len(basis) == 2
    assert solve_in_lattice(basis, (2, 4, 0)) is not None
    assert solve_in_lattice(basis, (2, 7, 3)) is not None
    assert solve_in_lattice(basis, (1, 2, 0)) is None


def test_laurent_coefficients():
    a = LaurentCoefficient.param("a")
    b = LaurentCoefficient.param("b")
    c = (a + b) * (a - b)
    assert c == a * a - b * b
    assert (a * b / a) == b
    assert a.inverse() == LaurentCoefficient.param("a", -1)
    assert c.evaluate({"a": 2, "b": 1}) == 3
    with pytest.raises(Exception):
        (a + 1).inverse()


def test_multiplicative_values():
    g = MultiplicativeValue.generator("g")
    z = MultiplicativeValue.root_of_unity(1, 3)
    assert (z ** 3).is_identity()
    assert z.order() == 3
    assert g.order() is None
    assert str(g ** 2 * z) == "exp(2*pi*I*1/3)*g^2"
    assert MultiplicativeValue.from_json((g * z).to_json()) == g * z
    assert (g / g).is_identity()
