"""Exact sparse tensors and fraction-free rational linear algebra.

Representation conventions (used by every other module and by the file
formats):

* Indices are 0-based everywhere.
* A tensor leg may carry an internal *split*, an ordered tuple of factor
  dimensions whose product equals the leg dimension.  Multi-factor indices
  are packed row-major in the declared factor order, so a leg of dimension 6
  with split (3, 2) stores the factor pair (i, j) at index ``i*2 + j``.
* A SparseTensor stores only nonzero coefficients, keyed by multi-index
  (one 0-based index per leg).  Two tensors are equal iff their leg
  dimensions and entry maps agree; splits are interpretation metadata and do
  not participate in equality.
* All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm, prod
from typing import Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


class SignatureMismatchError(ValueError):
    """Leg counts or leg dimensions of two objects do not agree."""


# ---------------------------------------------------------------------------
# Legs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leg:
    """One tensor leg: its dimension and optional internal factor split."""

    dim: int
    split: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"leg dimension must be >= 1, got {self.dim}")
        if self.split is not None:
            s = tuple(int(d) for d in self.split)
            object.__setattr__(self, "split", s)
            if any(d < 1 for d in s):
                raise ValueError(f"split factors must be >= 1, got {s}")
            if prod(s) != self.dim:
                raise ValueError(f"split {s} does not factor dimension {self.dim}")


LegSignature = tuple[Leg, ...]


def signature(dims: Sequence[int], splits: Sequence[tuple[int, ...] | None] | None = None) -> LegSignature:
    """Build a leg signature from dimensions and optional per-leg splits."""
    if splits is None:
        return tuple(Leg(d) for d in dims)
    if len(splits) != len(dims):
        raise ValueError("dims and splits length mismatch")
    return tuple(Leg(d, s) for d, s in zip(dims, splits))


# ---------------------------------------------------------------------------
# Sparse tensors
# ---------------------------------------------------------------------------


class SparseTensor:
    """Multi-leg tensor over exact rationals, stored as {multi-index: value}.

    The constructor validates index bounds, coerces coefficients to Fraction
    and drops explicit zeros, so the nonzero invariant holds by construction.
    """

    __slots__ = ("legs", "entries")

    def __init__(self, legs: Iterable[Leg], entries: Mapping[tuple[int, ...], Fraction | int]):
        legs = tuple(legs)
        dims = tuple(leg.dim for leg in legs)
        clean: dict[tuple[int, ...], Fraction] = {}
        for idx, value in entries.items():
            idx = tuple(idx)
            if len(idx) != len(dims):
                raise ValueError(f"index {idx} has {len(idx)} positions, tensor has {len(dims)} legs")
            for i, d in zip(idx, dims):
                if not 0 <= i < d:
                    raise ValueError(f"index {idx} out of bounds for dims {dims}")
            value = Fraction(value)
            if value:
                clean[idx] = value
        object.__setattr__(self, "legs", legs)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("SparseTensor is immutable")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(leg.dim for leg in self.legs)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return self.dims == other.dims and self.entries == other.entries

    def __hash__(self):  # entry dicts are mutable containers; keep unhashable
        return NotImplemented  # pragma: no cover

    def __repr__(self) -> str:
        return f"SparseTensor(dims={self.dims}, nnz={self.nnz})"


def zero_tensor(legs: Iterable[Leg]) -> SparseTensor:
    return SparseTensor(legs, {})


def scalar_tensor(value: Fraction | int = 1) -> SparseTensor:
    """Zero-leg tensor holding a single scalar entry."""
    return SparseTensor((), {(): Fraction(value)})


def tensor_product(t1: SparseTensor, t2: SparseTensor) -> SparseTensor:
    """Concatenation product: legs of t1 followed by legs of t2."""
    entries: dict[tuple[int, ...], Fraction] = {}
    for i1, c1 in t1.entries.items():
        for i2, c2 in t2.entries.items():
            entries[i1 + i2] = c1 * c2
    return SparseTensor(t1.legs + t2.legs, entries)


def pairwise_product(t1: SparseTensor, t2: SparseTensor) -> SparseTensor:
    """Leg-pairwise Kronecker product.

    Both tensors must have the same number of legs; output leg i has
    dimension dim1_i * dim2_i with split (dim1_i, dim2_i).
    """
    if len(t1.legs) != len(t2.legs):
        raise SignatureMismatchError(
            f"pairwise product needs equal leg counts, got {len(t1.legs)} and {len(t2.legs)}"
        )
    d2 = t2.dims
    legs = tuple(Leg(a.dim * b.dim, (a.dim, b.dim)) for a, b in zip(t1.legs, t2.legs))
    entries: dict[tuple[int, ...], Fraction] = {}
    for i1, c1 in t1.entries.items():
        for i2, c2 in t2.entries.items():
            idx = tuple(a * d + b for a, b, d in zip(i1, i2, d2))
            entries[idx] = c1 * c2
    return SparseTensor(legs, entries)


def permute_legs(t: SparseTensor, perm: Sequence[int]) -> SparseTensor:
    """Reorder legs: output leg p is input leg perm[p]."""
    perm = tuple(perm)
    if sorted(perm) != list(range(len(t.legs))):
        raise ValueError(f"{perm} is not a permutation of {len(t.legs)} legs")
    legs = tuple(t.legs[p] for p in perm)
    entries = {tuple(idx[p] for p in perm): c for idx, c in t.entries.items()}
    return SparseTensor(legs, entries)


def group_legs(t: SparseTensor, partition: Sequence[Sequence[int]]) -> SparseTensor:
    """Merge legs blockwise into one leg per block.

    ``partition`` is an ordered list of blocks, each an ordered list of leg
    positions; together they must cover every leg exactly once.  The merged
    leg has dimension = product of the block's leg dimensions, split = those
    dimensions in block order, and packs indices row-major in that order.
    """
    blocks = [tuple(b) for b in partition]
    flat = [p for b in blocks for p in b]
    if sorted(flat) != list(range(len(t.legs))):
        raise ValueError("partition must cover all legs exactly once")
    dims = t.dims
    legs = tuple(Leg(prod(dims[p] for p in b), tuple(dims[p] for p in b)) for b in blocks)
    entries: dict[tuple[int, ...], Fraction] = {}
    for idx, c in t.entries.items():
        packed = []
        for b in blocks:
            acc = 0
            for p in b:
                acc = acc * dims[p] + idx[p]
            packed.append(acc)
        entries[tuple(packed)] = c
    return SparseTensor(legs, entries)


def apply_at_leg(t: SparseTensor, leg: int, matrix: "RationalMatrix") -> SparseTensor:
    """Apply a linear map at one leg; zero results are pruned.

    The leg's dimension becomes matrix.rows.  The split is kept only when the
    matrix is square (a basis change within the same space); otherwise the
    factor structure is no longer meaningful and is dropped.
    """
    if not 0 <= leg < len(t.legs):
        raise ValueError(f"leg {leg} out of range")
    old = t.legs[leg]
    if matrix.cols != old.dim:
        raise SignatureMismatchError(f"matrix has {matrix.cols} columns, leg has dimension {old.dim}")
    by_col: dict[int, list[tuple[int, Fraction]]] = {}
    for (r, c), v in matrix.entries.items():
        by_col.setdefault(c, []).append((r, v))
    split = old.split if matrix.rows == old.dim else None
    legs = t.legs[:leg] + (Leg(matrix.rows, split),) + t.legs[leg + 1 :]
    acc: dict[tuple[int, ...], Fraction] = {}
    for idx, coef in t.entries.items():
        for r, v in by_col.get(idx[leg], ()):
            nidx = idx[:leg] + (r,) + idx[leg + 1 :]
            s = acc.get(nidx, ZERO) + coef * v
            if s:
                acc[nidx] = s
            elif nidx in acc:
                del acc[nidx]
    return SparseTensor(legs, acc)


def flatten(t: SparseTensor, side: Iterable[int]) -> "RationalMatrix":
    """Flatten to a matrix along the bipartition (side, complement).

    Rows are indexed by the ``side`` legs, columns by the rest, both packed
    row-major in ascending leg order.  The result is sparse; its nonzero
    count equals the tensor's.
    """
    side = sorted(set(side))
    k = len(t.legs)
    if any(not 0 <= p < k for p in side):
        raise ValueError("side contains invalid leg positions")
    other = [p for p in range(k) if p not in side]
    if not side or not other:
        raise ValueError("both sides of the bipartition must be nonempty")
    dims = t.dims
    entries: dict[tuple[int, int], Fraction] = {}
    for idx, c in t.entries.items():
        r = 0
        for p in side:
            r = r * dims[p] + idx[p]
        col = 0
        for p in other:
            col = col * dims[p] + idx[p]
        entries[(r, col)] = c
    nrows = prod(dims[p] for p in side)
    ncols = prod(dims[p] for p in other)
    return RationalMatrix(nrows, ncols, entries)


# ---------------------------------------------------------------------------
# Rational matrices
# ---------------------------------------------------------------------------


class RationalMatrix:
    """Sparse exact-rational matrix.

    Zero-width factors (0 columns) are allowed so that rank factorizations of
    the zero matrix can be represented.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], Fraction | int]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        clean: dict[tuple[int, int], Fraction] = {}
        for (r, c), v in entries.items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"entry ({r},{c}) out of bounds for {rows}x{cols}")
            v = Fraction(v)
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("RationalMatrix is immutable")

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[Fraction | int]]) -> "RationalMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = Fraction(v)
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols, {})

    def entry(self, r: int, c: int) -> Fraction:
        return self.entries.get((r, c), ZERO)

    def to_rows(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def matmul(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise SignatureMismatchError("inner dimensions do not match")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], Fraction] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                key = (r, c)
                s = acc.get(key, ZERO) + v * w
                if s:
                    acc[key] = s
                elif key in acc:
                    del acc[key]
        return RationalMatrix(self.rows, other.cols, acc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _integer_rows(m: RationalMatrix) -> dict[int, dict[int, int]]:
    """Rows as {col: int} dicts after clearing denominators and gcd-reducing.

    Row scaling by a nonzero rational preserves rank, so this is lossless for
    rank purposes and keeps all later arithmetic in (small) integers.
    """
    rows: dict[int, dict[int, Fraction]] = {}
    for (r, c), v in m.entries.items():
        rows.setdefault(r, {})[c] = v
    out: dict[int, dict[int, int]] = {}
    for r, row in rows.items():
        mult = lcm(*(v.denominator for v in row.values()))
        ints = {c: int(v * mult) for c, v in row.items()}
        g = gcd(*ints.values())
        if g > 1:
            ints = {c: x // g for c, x in ints.items()}
        out[r] = ints
    return out


def matrix_rank(m: RationalMatrix) -> int:
    """Exact rank over the rationals.

    Fraction-free sparse elimination: rows are cleared to integers, then each
    row is reduced against the pivot rows found so far using integer
    cross-multiplication followed by a gcd reduction (which bounds
    coefficient growth the way fraction-free pivoting does, without the dense
    rescale that would destroy sparsity).  Pivot columns are taken left to
    right, pivot rows in ascending row order, so the scan is deterministic.
    """
    rows = _integer_rows(m)
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for r in sorted(rows):
        row = rows[r]
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = row
                rank += 1
                break
            a, b = piv[lead], row[lead]
            new: dict[int, int] = {}
            for c in row.keys() | piv.keys():
                val = a * row.get(c, 0) - b * piv.get(c, 0)
                if val:
                    new[c] = val
            if not new:
                break
            g = gcd(*new.values())
            if g > 1:
                new = {c: x // g for c, x in new.items()}
            row = new
    return rank


def _rref(dense: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with deterministic pivoting.

    Columns are scanned left to right; the pivot is the first remaining row
    with a nonzero entry in the current column.  Returns (rref, pivot_cols).
    """
    nrows = len(dense)
    ncols = len(dense[0]) if nrows else 0
    a = [list(row) for row in dense]
    pivot_cols: list[int] = []
    pr = 0
    for c in range(ncols):
        sel = next((r for r in range(pr, nrows) if a[r][c]), None)
        if sel is None:
            continue
        a[pr], a[sel] = a[sel], a[pr]
        inv = ONE / a[pr][c]
        a[pr] = [x * inv for x in a[pr]]
        for r in range(nrows):
            if r != pr and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[pr])]
        pivot_cols.append(c)
        pr += 1
        if pr == nrows:
            break
    return a, pivot_cols


def rank_factorization(m: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """Deterministic full-rank factorization M = U * V^T.

    U collects the pivot columns of M (rows x r) and V^T is the nonzero part
    of the reduced row echelon form (so V is cols x r).  The zero matrix
    yields r = 0 with empty factors.
    """
    rref, pivot_cols = _rref(m.to_rows())
    r = len(pivot_cols)
    u_entries = {}
    for (row, col), v in m.entries.items():
        for j, pc in enumerate(pivot_cols):
            if col == pc:
                u_entries[(row, j)] = v
    v_entries = {}
    for j in range(r):
        for col in range(m.cols):
            val = rref[j][col]
            if val:
                v_entries[(col, j)] = val
    return RationalMatrix(m.rows, r, u_entries), RationalMatrix(m.cols, r, v_entries)


def factor_permutation_matrix(split: Sequence[int], perm: Sequence[int]) -> RationalMatrix:
    """Permutation matrix reordering the factors of a row-major packed index.

    Output factor p is input factor perm[p]; the matrix maps the old packed
    index to the new one, suitable for apply_at_leg.
    """
    split = tuple(split)
    perm = tuple(perm)
    if sorted(perm) != list(range(len(split))):
        raise ValueError(f"{perm} is not a permutation of {len(split)} factors")
    new_split = tuple(split[p] for p in perm)
    n = prod(split)
    entries = {}
    for old_factors in product(*(range(d) for d in split)):
        old_idx = 0
        for d, i in zip(split, old_factors):
            old_idx = old_idx * d + i
        new_idx = 0
        for d, p in zip(new_split, perm):
            new_idx = new_idx * d + old_factors[p]
        entries[(new_idx, old_idx)] = ONE
    return RationalMatrix(n, n, entries)
