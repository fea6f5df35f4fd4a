from fractions import Fraction

import pytest
from hypothesis import given, settings

from tensor_surgery.exact import (
    Leg,
    RationalMatrix,
    SignatureMismatchError,
    SparseTensor,
    apply_at_leg,
    factor_permutation_matrix,
    flatten,
    group_legs,
    matrix_rank,
    pairwise_product,
    permute_legs,
    rank_factorization,
    scalar_tensor,
    tensor_product,
    zero_tensor,
)
from tensor_surgery.graphs import Hypergraph, HyperEdge, cycle, graph_tensor

from conftest import small_matrices, small_tensors

F = Fraction


def vec_tensor(values):
    return SparseTensor((Leg(len(values)),), {(i,): v for i, v in enumerate(values)})


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------


def test_pairwise_square_of_triangle_tensor():
    """The leg-pairwise square of the dimension-2 triangle tensor is the
    dimension-4 triangle tensor once each leg's four factors are regrouped
    edgewise (copy-major packing vs edge-major packing)."""
    t = graph_tensor(cycle(3))
    sq = pairwise_product(t, t)
    assert sq.nnz == 64
    assert all(leg.dim == 16 and leg.split == (4, 4) for leg in sq.legs)
    regroup = factor_permutation_matrix((2, 2, 2, 2), (0, 2, 1, 3))
    fixed = sq
    for leg_no in range(3):
        fixed = apply_at_leg(fixed, leg_no, regroup)
    assert fixed == graph_tensor(cycle(3, 4))


def test_product_with_scalar_is_identity():
    t = graph_tensor(cycle(3))
    assert tensor_product(t, scalar_tensor(1)).entries == t.entries


def test_pairwise_of_basis_vectors():
    v1 = vec_tensor([1, 1, 0])
    v2 = vec_tensor([1, 0])
    out = pairwise_product(v1, v2)
    assert out.legs[0].dim == 6 and out.legs[0].split == (3, 2)
    assert out.entries == {(0,): F(1), (2,): F(1)}


def test_pairwise_leg_count_mismatch():
    with pytest.raises(SignatureMismatchError):
        pairwise_product(vec_tensor([1]), scalar_tensor(1))


@given(small_tensors(), small_tensors())
def test_concat_nnz_multiplicative_without_cancellation(t1, t2):
    pos1 = SparseTensor(t1.legs, {k: abs(v) for k, v in t1.entries.items()})
    pos2 = SparseTensor(t2.legs, {k: abs(v) for k, v in t2.entries.items()})
    assert tensor_product(pos1, pos2).nnz == pos1.nnz * pos2.nnz


# ---------------------------------------------------------------------------
# permute / group
# ---------------------------------------------------------------------------


def test_rotation_of_triangle_tensor_up_to_boundary_swaps():
    """Rotating the triangle tensor by one leg is a symmetry only after the
    in/out factor order is repaired at the two legs whose orientation the
    edge-list layout flips (positions 0 and 2)."""
    t = graph_tensor(cycle(3))
    rotated = permute_legs(t, (1, 2, 0))
    assert rotated != t
    swap = factor_permutation_matrix((2, 2), (1, 0))
    fixed = apply_at_leg(apply_at_leg(rotated, 0, swap), 2, swap)
    assert fixed == t


def test_identity_permutation():
    t = graph_tensor(cycle(3))
    assert permute_legs(t, (0, 1, 2)) == t


def test_swap_two_legs():
    t = SparseTensor((Leg(2), Leg(2)), {(0, 1): F(1)})
    assert permute_legs(t, (1, 0)).entries == {(1, 0): F(1)}


def test_permute_rejects_non_bijection():
    with pytest.raises(ValueError):
        permute_legs(graph_tensor(cycle(3)), (0, 0, 1))


def test_group_six_leg_form_into_pairs():
    """A perfect matching on six vertices carries the 6-leg form of the
    triangle tensor; grouping adjacent pairs recovers the 3-leg form."""
    six = Hypergraph(
        6,
        (
            HyperEdge((0, 2), 2),  # the leg-0/leg-1 shared index
            HyperEdge((1, 5), 2),
            HyperEdge((3, 4), 2),
        ),
    )
    grouped = group_legs(graph_tensor(six), [(0, 1), (2, 3), (4, 5)])
    assert grouped == graph_tensor(cycle(3))
    assert all(leg.split == (2, 2) for leg in grouped.legs)


def test_group_singletons_is_identity():
    t = graph_tensor(cycle(3))
    assert group_legs(t, [(0,), (1,), (2,)]) == t


def test_group_all_legs_into_vector():
    t = graph_tensor(cycle(3))
    v = group_legs(t, [(0, 1, 2)])
    assert v.dims == (64,)
    assert v.nnz == 8
    # frozen expansion of the defining sum: index 16*(2x+z) + 4*(2x+y) + (2y+z)
    expected = set()
    for x in range(2):
        for y in range(2):
            for z in range(2):
                expected.add((16 * (2 * x + z) + 4 * (2 * x + y) + (2 * y + z),))
    assert set(v.entries) == expected


def test_group_rejects_non_partition():
    with pytest.raises(ValueError):
        group_legs(graph_tensor(cycle(3)), [(0, 1), (1, 2)])


# ---------------------------------------------------------------------------
# apply_at_leg
# ---------------------------------------------------------------------------


def test_apply_identity_and_zero():
    t = graph_tensor(cycle(3))
    assert apply_at_leg(t, 1, RationalMatrix.identity(4)) == t
    assert apply_at_leg(t, 1, RationalMatrix.zeros(4, 4)).nnz == 0


@given(small_tensors(max_legs=3, max_dim=3), small_matrices(max_dim=3), small_matrices(max_dim=3))
@settings(max_examples=60)
def test_apply_at_distinct_legs_commutes(t, m1, m2):
    if len(t.legs) < 2:
        return
    u = RationalMatrix(m1.rows, t.legs[0].dim, {
        (r, c): v for (r, c), v in m1.entries.items() if c < t.legs[0].dim})
    v = RationalMatrix(m2.rows, t.legs[1].dim, {
        (r, c): v for (r, c), v in m2.entries.items() if c < t.legs[1].dim})
    a = apply_at_leg(apply_at_leg(t, 0, u), 1, v)
    b = apply_at_leg(apply_at_leg(t, 1, v), 0, u)
    assert a == b


def test_apply_invertible_then_inverse_is_identity():
    t = graph_tensor(cycle(3))
    m = RationalMatrix.from_rows([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 2], [0, 0, 0, 1]])
    minv = RationalMatrix.from_rows([[1, -1, 0, 0], [0, 1, 0, 0], [0, 0, 1, -2], [0, 0, 0, 1]])
    assert apply_at_leg(apply_at_leg(t, 2, m), 2, minv) == t


def test_apply_dimension_mismatch():
    with pytest.raises(SignatureMismatchError):
        apply_at_leg(graph_tensor(cycle(3)), 0, RationalMatrix.identity(3))


# ---------------------------------------------------------------------------
# flatten / rank / factorization
# ---------------------------------------------------------------------------


def test_flatten_triangle_single_leg():
    m = flatten(graph_tensor(cycle(3)), (0,))
    assert (m.rows, m.cols) == (4, 16)
    assert matrix_rank(m) == 4


def test_flatten_rank_one_tensor():
    t = SparseTensor((Leg(2), Leg(3), Leg(2)), {
        (i, j, k): F(2) ** i * F(3) ** j * F(5) ** k
        for i in range(2) for j in range(3) for k in range(2)
    })
    for side in [(0,), (1,), (2,), (0, 1), (0, 2)]:
        assert matrix_rank(flatten(t, side)) == 1


def test_flatten_c5_cut_ranks():
    t = graph_tensor(cycle(5))
    # contiguous arc {0,1}: only two edges straddle, so the rank is 2^2
    assert matrix_rank(flatten(t, (0, 1))) == 4
    # max cuts straddle four edges and reach the 2^(k-1) flattening bound
    assert matrix_rank(flatten(t, (0, 2))) == 16
    assert matrix_rank(flatten(t, (0, 1, 3))) == 16


def test_flatten_rejects_empty_side():
    t = graph_tensor(cycle(3))
    with pytest.raises(ValueError):
        flatten(t, ())
    with pytest.raises(ValueError):
        flatten(t, (0, 1, 2))


def test_flatten_invariant_under_permutation_within_side():
    t = graph_tensor(cycle(5))
    perm = (1, 0, 2, 4, 3)  # permutes inside {0,1} and inside {2,3,4}
    assert matrix_rank(flatten(t, (0, 1))) == matrix_rank(flatten(permute_legs(t, perm), (0, 1)))


def test_matrix_rank_basics():
    assert matrix_rank(RationalMatrix.identity(2)) == 2
    assert matrix_rank(RationalMatrix.zeros(3, 4)) == 0
    m = RationalMatrix.from_rows([[F(1, 2), F(1, 3)], [F(3, 2), F(1)]])
    assert matrix_rank(m) == 1


@given(small_matrices())
def test_rank_equals_transpose_rank(m):
    assert matrix_rank(m) == matrix_rank(m.transpose())


@given(small_matrices())
def test_rank_factorization_reproduces(m):
    u, v = rank_factorization(m)
    assert u.cols == v.cols == matrix_rank(m)
    assert u.matmul(v.transpose()) == m


def test_rank_factorization_examples():
    u, v = rank_factorization(RationalMatrix.identity(2))
    assert u.cols == 2
    assert u.matmul(v.transpose()) == RationalMatrix.identity(2)

    outer = RationalMatrix.from_rows([[3, 4], [6, 8]])  # (1,2) x (3,4)
    u, v = rank_factorization(outer)
    assert u.cols == 1
    assert u.matmul(v.transpose()) == outer

    z = RationalMatrix.zeros(2, 3)
    u, v = rank_factorization(z)
    assert u.cols == 0 and v.cols == 0
    assert u.matmul(v.transpose()) == z


def test_rank_factorization_deterministic():
    m = RationalMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    a = rank_factorization(m)
    b = rank_factorization(m)
    assert a[0] == b[0] and a[1] == b[1]


# ---------------------------------------------------------------------------
# misc invariants
# ---------------------------------------------------------------------------


def test_tensor_equality_ignores_splits():
    a = SparseTensor((Leg(4, (2, 2)),), {(1,): F(1)})
    b = SparseTensor((Leg(4, (4,)),), {(1,): F(1)})
    assert a == b
    assert a != SparseTensor((Leg(4),), {(2,): F(1)})


def test_zero_pruning_and_bounds():
    t = SparseTensor((Leg(2),), {(0,): F(0), (1,): F(5)})
    assert t.entries == {(1,): F(5)}
    with pytest.raises(ValueError):
        SparseTensor((Leg(2),), {(2,): F(1)})
    assert zero_tensor((Leg(3),)).nnz == 0


def test_leg_split_validation():
    with pytest.raises(ValueError):
        Leg(4, (3, 2))
    with pytest.raises(ValueError):
        Leg(0)
