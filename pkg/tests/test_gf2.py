"""Packed GF(2) linear algebra, cross-checked against dense numpy mod-2."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csstat.gf2 import (
    BitMatrix,
    BitVector,
    complete_basis,
    dot,
    kernel_basis,
    matvec,
    rank,
    row_reduce,
    row_space_basis,
    solve,
)


def to_dense(m: BitMatrix) -> np.ndarray:
    return np.array([[m[r, c] for c in range(m.cols)] for r in range(m.rows)],
                    dtype=np.uint8)


def from_dense(arr: np.ndarray) -> BitMatrix:
    lines = ["".join(str(int(x)) for x in row) for row in arr]
    return BitMatrix.from01(lines, cols=arr.shape[1])


matrices = st.integers(1, 9).flatmap(
    lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=1, max_size=9).map(
        lambda rows: BitMatrix(c, tuple(rows))
    )
)


# --- BitVector basics -------------------------------------------------------


def test_bitvector_round_trips():
    v = BitVector.from01("10110")
    assert v.n == 5
    assert v.to01() == "10110"
    assert list(v) == [1, 0, 1, 1, 0]
    assert v.weight() == 3
    assert BitVector.from_bits([1, 0, 1, 1, 0]) == v
    assert BitVector.unit(5, 2) == BitVector.from01("00100")


def test_bitvector_low_bit_first():
    # from01("10") means bit 0 set, bit 1 clear
    v = BitVector.from01("10")
    assert v[0] == 1 and v[1] == 0
    assert v.bits == 1


def test_bitvector_validation():
    with pytest.raises(ValueError):
        BitVector(3, 8)  # bit outside length
    with pytest.raises(ValueError):
        BitVector.from_bits([2])
    with pytest.raises(ValueError):
        BitVector.from01("01") ^ BitVector.from01("011")
    with pytest.raises(IndexError):
        BitVector.from01("01")[5]


def test_xor_and_dot():
    u = BitVector.from01("1100")
    v = BitVector.from01("1010")
    assert (u ^ v).to01() == "0110"
    assert dot(u, v) == 1
    assert dot(u, u) == 0  # even weight


# --- row reduction ----------------------------------------------------------


def test_row_reduce_known():
    m = BitMatrix.from01(["110", "011", "101"])
    r, pivots = row_reduce(m)
    # rows sum to zero, so rank 2 with pivots at the first two columns
    assert list(pivots) == [0, 1]
    assert r.to01_lines()[:2] == ["101", "011"]
    assert r.row(2).is_zero()


def test_rank_matches_numpy_gaussian():
    rng = np.random.default_rng(5)
    for _ in range(40):
        arr = rng.integers(0, 2, size=(rng.integers(1, 8), rng.integers(1, 8)))
        assert rank(from_dense(arr)) == _dense_rank(arr)


def _dense_rank(arr: np.ndarray) -> int:
    a = arr.copy() % 2
    r = 0
    for c in range(a.shape[1]):
        nz = [i for i in range(r, a.shape[0]) if a[i, c]]
        if not nz:
            continue
        a[[r, nz[0]]] = a[[nz[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


@settings(max_examples=150)
@given(matrices)
def test_row_reduce_idempotent_and_rank_consistent(m):
    r, pivots = row_reduce(m)
    r2, pivots2 = row_reduce(r)
    assert r2 == r
    assert pivots2 == pivots
    assert len(pivots) == rank(m)
    # pivot columns each contain exactly one 1, in their own row
    for i, c in enumerate(pivots):
        col = [r[j, c] for j in range(r.rows)]
        assert col[i] == 1 and sum(col) == 1


@settings(max_examples=150)
@given(matrices)
def test_kernel_is_exact_null_space(m):
    ker = kernel_basis(m)
    assert ker.rows == m.cols - rank(m)
    for v in ker.row_list():
        assert matvec(m, v).is_zero()
    assert rank(ker) == ker.rows  # independent rows
    # exhaustively confirm the kernel size on small widths
    if m.cols <= 12:
        count = sum(
            1 for bits in range(1 << m.cols)
            if matvec(m, BitVector(m.cols, bits)).is_zero()
        )
        assert count == 1 << ker.rows


@settings(max_examples=150)
@given(matrices, st.integers(0, 1 << 9))
def test_solve_substitutes(m, seed):
    # build a guaranteed-solvable rhs, check the solution and minimality
    x = BitVector(m.cols, seed & ((1 << m.cols) - 1))
    y = matvec(m, x)
    got = solve(m, y)
    assert got is not None
    assert matvec(m, got) == y
    # free variables are pinned to zero: the solution is supported on pivots
    _, pivots = row_reduce(m)
    for c in range(m.cols):
        if c not in pivots:
            assert got[c] == 0


def test_solve_reports_unsolvable():
    m = BitMatrix.from01(["10", "10"])
    assert solve(m, BitVector.from01("01")) is None


def test_row_space_basis_spans():
    m = BitMatrix.from01(["1100", "0110", "1010", "0000"])
    basis = row_space_basis(m)
    assert basis.rows == rank(m) == 2
    # every original row is a combination of the basis rows
    for r in m.row_list():
        assert solve(basis.transpose(), r) is not None


def test_complete_basis_cases():
    full = BitMatrix.identity(4)
    sub = BitMatrix.from01(["1000", "0100"])
    ext = complete_basis(sub, full)
    assert ext.rows == 2
    assert rank(sub.vstack(ext)) == 4
    # already complete -> nothing to add
    assert complete_basis(full, full).rows == 0
    with pytest.raises(ValueError):
        complete_basis(BitMatrix.from01(["11", "01"]), BitMatrix.from01(["10"]))


def test_matvec_dimension_check():
    with pytest.raises(ValueError):
        matvec(BitMatrix.from01(["101"]), BitVector.from01("10"))
