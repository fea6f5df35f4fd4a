"""Rank decompositions: construction, exact verification, local ranks,
symmetry transforms, and serialization.

A decomposition stores an ordered list of simple terms; each term holds one
dense coefficient vector per leg.  Scalar signs are folded into the first leg
vector so that a term is exactly the outer product of its vectors.  The
``verified`` flag is never serialized: imported decompositions start
unverified and earn the flag only by passing ``verify``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Sequence

from .exact import (
    Leg,
    RationalMatrix,
    SignatureMismatchError,
    SparseTensor,
    matrix_rank,
    rank_factorization,
)
from .graphs import Hypergraph, SchemaError, cycle, graph_tensor, weighted_cycle
from .rational import format_rational, parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)

Vector = tuple[Fraction, ...]
Term = tuple[Vector, ...]


@dataclass
class Decomposition:
    legs: tuple[Leg, ...]
    terms: tuple[Term, ...]
    provenance: str = ""
    verified: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        self.legs = tuple(self.legs)
        terms = []
        for t, term in enumerate(self.terms):
            term = tuple(tuple(Fraction(x) for x in vec) for vec in term)
            if len(term) != len(self.legs):
                raise ValueError(f"term {t} has {len(term)} vectors for {len(self.legs)} legs")
            for leg_no, (vec, leg) in enumerate(zip(term, self.legs)):
                if len(vec) != leg.dim:
                    raise ValueError(
                        f"term {t}, leg {leg_no}: vector length {len(vec)} != dimension {leg.dim}"
                    )
                if not any(vec):
                    raise ValueError(f"term {t}, leg {leg_no}: zero vector (term would vanish)")
            terms.append(term)
        self.terms = tuple(terms)

    @property
    def rank_bound(self) -> int:
        return len(self.terms)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(leg.dim for leg in self.legs)


@dataclass(frozen=True)
class LocalRankProfile:
    """Histogram of per-term matrix ranks of one leg under a given split."""

    leg: int
    split: tuple[int, int]
    histogram: dict[int, int]

    def total(self) -> int:
        return sum(self.histogram.values())


@dataclass(frozen=True)
class VerifyReport:
    equal: bool
    term_count: int
    first_discrepant_index: tuple[int, ...] | None = None


# ---------------------------------------------------------------------------
# Reconstruction and verification
# ---------------------------------------------------------------------------


def reconstruct(d: Decomposition) -> SparseTensor:
    """Exact sum of the simple terms, with cancellation.

    Terms are expanded in order, entries in lexicographic index order; the
    accumulation is exact, so the result is independent of that order.
    """
    acc: dict[tuple[int, ...], Fraction] = {}
    for term in d.terms:
        supports = [[(i, c) for i, c in enumerate(vec) if c] for vec in term]
        # depth-first expansion sharing coefficient prefixes
        idx = [0] * len(supports)
        coefs = [ONE] * (len(supports) + 1)
        pos = 0
        cursor = [0] * len(supports)
        if not supports:
            acc[()] = acc.get((), ZERO) + ONE
            continue
        while pos >= 0:
            if cursor[pos] == len(supports[pos]):
                cursor[pos] = 0
                pos -= 1
                if pos >= 0:
                    cursor[pos] += 1
                continue
            i, c = supports[pos][cursor[pos]]
            idx[pos] = i
            coefs[pos + 1] = coefs[pos] * c
            if pos == len(supports) - 1:
                key = tuple(idx)
                s = acc.get(key, ZERO) + coefs[pos + 1]
                if s:
                    acc[key] = s
                elif key in acc:
                    del acc[key]
                cursor[pos] += 1
            else:
                pos += 1
    return SparseTensor(d.legs, acc)


def verify(d: Decomposition, target: SparseTensor) -> VerifyReport:
    """Exact entrywise comparison of the reconstruction against a target.

    A leg-count or dimension mismatch raises SignatureMismatchError (that is
    a different condition from the tensors being unequal).  On success the
    decomposition's ``verified`` flag is set.
    """
    if d.dims != target.dims:
        raise SignatureMismatchError(
            f"decomposition has dims {d.dims}, target has dims {target.dims}"
        )
    got = reconstruct(d)
    if got == target:
        d.verified = True
        return VerifyReport(True, len(d.terms))
    diff = [k for k in got.entries.keys() | target.entries.keys()
            if got.entries.get(k) != target.entries.get(k)]
    return VerifyReport(False, len(d.terms), min(diff))


def local_rank_profile(d: Decomposition, leg: int, split: tuple[int, int]) -> LocalRankProfile:
    """Per-term rank of the chosen leg's vector reshaped to an a x b matrix."""
    a, b = split
    if not 0 <= leg < len(d.legs):
        raise ValueError(f"leg {leg} out of range")
    if a * b != d.legs[leg].dim:
        raise ValueError(f"split {split} does not factor leg dimension {d.legs[leg].dim}")
    counts: Counter[int] = Counter()
    for term in d.terms:
        counts[matrix_rank(_leg_matrix(term[leg], a, b))] += 1
    return LocalRankProfile(leg, (a, b), dict(sorted(counts.items())))


def _leg_matrix(vec: Vector, a: int, b: int) -> RationalMatrix:
    return RationalMatrix(a, b, {(i // b, i % b): c for i, c in enumerate(vec) if c})


def local_rank_sum(d: Decomposition, leg: int, split: tuple[int, int]) -> int:
    profile = local_rank_profile(d, leg, split)
    return sum(r * n for r, n in profile.histogram.items())


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

_B0 = (ONE, ZERO)
_B1 = (ZERO, ONE)
_BPLUS = (ONE, ONE)
_BMINUS = (ONE, -ONE)


def _kron2(u: Vector, v: Vector) -> Vector:
    return tuple(a * b for a in u for b in v)


def _neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


_DIAG = tuple(a + b for a, b in zip(_kron2(_B0, _B0), _kron2(_B1, _B1)))  # e00 + e11


def strassen() -> Decomposition:
    """The classical seven-term decomposition of the 2x2 matrix
    multiplication tensor, laid out against graph_tensor(cycle(3)).

    Three terms carry a negative sign (folded into the first leg vector).
    Every leg has split (2, 2); the local-rank histogram at each leg is
    {1: 6, 2: 1}.
    """
    terms = (
        (_neg(_kron2(_B0, _BMINUS)), _kron2(_B0, _BPLUS), _kron2(_B1, _B1)),
        (_neg(_kron2(_B1, _B1)), _kron2(_BMINUS, _B0), _kron2(_B0, _BPLUS)),
        (_neg(_kron2(_BPLUS, _B0)), _kron2(_B1, _B1), _kron2(_BMINUS, _B0)),
        (_kron2(_B1, _BMINUS), _kron2(_B1, _BPLUS), _kron2(_B0, _B0)),
        (_kron2(_B0, _B0), _kron2(_BMINUS, _B1), _kron2(_B1, _BPLUS)),
        (_kron2(_BPLUS, _B1), _kron2(_B0, _B0), _kron2(_BMINUS, _B1)),
        (_DIAG, _DIAG, _DIAG),
    )
    legs = tuple(Leg(4, (2, 2)) for _ in range(3))
    d = Decomposition(legs, terms, provenance="strassen()")
    report = verify(d, graph_tensor(cycle(3)))
    if not report.equal:  # pragma: no cover - construction self-check
        raise AssertionError("built-in seven-term decomposition failed verification")
    return d


def trivial_decomposition(h: Hypergraph) -> Decomposition:
    """The defining expansion of a graph tensor: one basis term per
    edge-index tuple, so the term count is the product of edge dimensions."""
    target = graph_tensor(h)
    incidence = [h.incident(v) for v in range(h.num_vertices)]
    dims = target.dims
    terms = []
    for vals in product(*(range(e.dim) for e in h.edges)):
        term = []
        for v, inc in enumerate(incidence):
            packed = 0
            for i in inc:
                packed = packed * h.edges[i].dim + vals[i]
            vec = [ZERO] * dims[v]
            vec[packed] = ONE
            term.append(tuple(vec))
        terms.append(tuple(term))
    d = Decomposition(target.legs, tuple(terms), provenance=f"trivial({hypergraph_label(h)})")
    d.verified = True  # basis expansion; equal to the defining sum by construction
    return d


def hypergraph_label(h: Hypergraph) -> str:
    return f"{h.num_vertices}v/" + ",".join(
        f"{{{'+'.join(map(str, e.verts))}}}:{e.dim}" for e in h.edges
    )


# ---------------------------------------------------------------------------
# Products
# ---------------------------------------------------------------------------


def decomp_product(d1: Decomposition, d2: Decomposition) -> Decomposition:
    """Leg-pairwise Kronecker product of two decompositions.

    The reconstruction equals the pairwise product of the reconstructions;
    output leg i has split (dim1_i, dim2_i).
    """
    if len(d1.legs) != len(d2.legs):
        raise SignatureMismatchError(
            f"products need equal leg counts, got {len(d1.legs)} and {len(d2.legs)}"
        )
    legs = tuple(Leg(a.dim * b.dim, (a.dim, b.dim)) for a, b in zip(d1.legs, d2.legs))
    terms = []
    for t1 in d1.terms:
        for t2 in d2.terms:
            terms.append(tuple(_kron_any(v1, v2) for v1, v2 in zip(t1, t2)))
    return Decomposition(
        legs, tuple(terms), provenance=f"product[{d1.provenance} x {d2.provenance}]"
    )


def _kron_any(u: Vector, v: Vector) -> Vector:
    return tuple(a * b for a in u for b in v)


def cycle_product(d1: Decomposition, d2: Decomposition) -> Decomposition:
    """Pairwise product of two cycle-style decompositions with the leg
    factors regrouped edgewise.

    Every leg of both inputs must carry a 2-factor split (a, b).  The plain
    pairwise product packs leg indices as (a1, b1, a2, b2); here they are
    regrouped to (a1, a2, b1, b2) so that the output leg split is
    (a1*a2, b1*b2) and squaring a cycle decomposition lands exactly on the
    graph tensor of the cycle with squared edge dimensions.
    """
    if len(d1.legs) != len(d2.legs):
        raise SignatureMismatchError("cycle_product needs equal leg counts")
    splits = []
    for leg_no, (l1, l2) in enumerate(zip(d1.legs, d2.legs)):
        if l1.split is None or len(l1.split) != 2 or l2.split is None or len(l2.split) != 2:
            raise ValueError(f"leg {leg_no}: cycle_product needs 2-factor splits on both inputs")
        splits.append((l1.split, l2.split))
    legs = tuple(
        Leg(a1 * b1 * a2 * b2, (a1 * a2, b1 * b2)) for (a1, b1), (a2, b2) in splits
    )
    terms = []
    for t1 in d1.terms:
        for t2 in d2.terms:
            term = []
            for (s1, s2), v1, v2 in zip(splits, t1, t2):
                a1, b1 = s1
                a2, b2 = s2
                vec = [ZERO] * (a1 * a2 * b1 * b2)
                for x1 in range(a1):
                    for y1 in range(b1):
                        c1 = v1[x1 * b1 + y1]
                        if not c1:
                            continue
                        for x2 in range(a2):
                            for y2 in range(b2):
                                c2 = v2[x2 * b2 + y2]
                                if c2:
                                    vec[((x1 * a2 + x2) * b1 + y1) * b2 + y2] = c1 * c2
                term.append(tuple(vec))
            terms.append(tuple(term))
    return Decomposition(
        legs, tuple(terms), provenance=f"cycle_product[{d1.provenance} x {d2.provenance}]"
    )


# ---------------------------------------------------------------------------
# Symmetry transforms
# ---------------------------------------------------------------------------


def rotate_legs(d: Decomposition, shift: int) -> Decomposition:
    """Cyclic leg rotation: output leg i is input leg (i + shift) mod k."""
    k = len(d.legs)
    shift %= k
    order = [(i + shift) % k for i in range(k)]
    legs = tuple(d.legs[p] for p in order)
    terms = tuple(tuple(term[p] for p in order) for term in d.terms)
    return Decomposition(legs, terms, provenance=f"rotate[{shift}]({d.provenance})")


def swap_split_factors(vec: Vector, a: int, b: int) -> Vector:
    """Transpose a vector viewed as an a x b row-major matrix."""
    return tuple(vec[x * b + y] for y in range(b) for x in range(a))


def reflect(d: Decomposition) -> Decomposition:
    """Reverse the leg order and swap the two split factors of every leg.

    This is the reflection symmetry of a cycle tensor: reversing the cycle
    also swaps each vertex's pair of incident edge indices.  Every leg must
    carry a 2-factor split.
    """
    for leg_no, leg in enumerate(d.legs):
        if leg.split is None or len(leg.split) != 2:
            raise ValueError(f"leg {leg_no}: reflect needs a 2-factor split")
    rev = list(reversed(range(len(d.legs))))
    legs = []
    for p in rev:
        a, b = d.legs[p].split
        legs.append(Leg(d.legs[p].dim, (b, a)))
    terms = []
    for term in d.terms:
        new_term = []
        for p in rev:
            a, b = d.legs[p].split
            new_term.append(swap_split_factors(term[p], a, b))
        terms.append(tuple(new_term))
    return Decomposition(tuple(legs), tuple(terms), provenance=f"reflect({d.provenance})")


def apply_maps(d: Decomposition, maps: Sequence[RationalMatrix | None]) -> Decomposition:
    """Apply a linear map per leg (None = identity); terms whose image
    acquires a zero vector are dropped."""
    if len(maps) != len(d.legs):
        raise SignatureMismatchError("one map (or None) per leg required")
    legs = []
    for leg, m in zip(d.legs, maps):
        if m is None:
            legs.append(leg)
            continue
        if m.cols != leg.dim:
            raise SignatureMismatchError(f"map has {m.cols} columns, leg has dimension {leg.dim}")
        split = leg.split if m.rows == leg.dim else None
        legs.append(Leg(m.rows, split))
    terms = []
    for term in d.terms:
        new_term = []
        for vec, m in zip(term, maps):
            if m is None:
                new_term.append(vec)
                continue
            out = [ZERO] * m.rows
            for (r, c), v in m.entries.items():
                if vec[c]:
                    out[r] += v * vec[c]
            new_term.append(tuple(out))
        if all(any(vec) for vec in new_term):
            terms.append(tuple(new_term))
    return Decomposition(tuple(legs), tuple(terms), provenance=f"maps({d.provenance})")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def decomposition_to_dict(d: Decomposition, cycle_weights: Sequence[int] | None = None) -> dict:
    data: dict = {
        "legs": [
            {"dim": leg.dim, "split": list(leg.split) if leg.split is not None else None}
            for leg in d.legs
        ],
        "terms": [
            [[format_rational(x) for x in vec] for vec in term] for term in d.terms
        ],
        "provenance": d.provenance,
    }
    if cycle_weights is not None:
        data["cycle_weights"] = list(cycle_weights)
    return data


def decomposition_from_dict(data: object) -> tuple[Decomposition, tuple[int, ...] | None]:
    """Parse and validate the decomposition file schema.

    Returns the decomposition (unverified) and the optional cycle_weights
    header.  Field-level problems raise SchemaError naming the offending
    term/leg.
    """
    if not isinstance(data, dict):
        raise SchemaError("decomposition file must contain an object")
    for key in ("legs", "terms"):
        if key not in data:
            raise SchemaError(f"missing required field '{key}'")
    scalar = data.get("scalar", "rational")
    if scalar != "rational":
        raise SchemaError(f"unsupported scalar field {scalar!r} (only 'rational')")
    raw_legs = data["legs"]
    if not isinstance(raw_legs, list) or not raw_legs:
        raise SchemaError("'legs' must be a nonempty list")
    legs = []
    for i, item in enumerate(raw_legs):
        if not isinstance(item, dict) or "dim" not in item:
            raise SchemaError(f"legs[{i}]: need a 'dim' field")
        dim = item["dim"]
        if not isinstance(dim, int) or dim < 1:
            raise SchemaError(f"legs[{i}].dim: must be a positive integer")
        split = item.get("split")
        if split is not None:
            if not isinstance(split, list) or not all(isinstance(x, int) for x in split):
                raise SchemaError(f"legs[{i}].split: must be a list of integers or null")
        try:
            legs.append(Leg(dim, tuple(split) if split is not None else None))
        except ValueError as exc:
            raise SchemaError(f"legs[{i}]: {exc}") from exc
    raw_terms = data["terms"]
    if not isinstance(raw_terms, list):
        raise SchemaError("'terms' must be a list")
    terms = []
    for t, raw_term in enumerate(raw_terms):
        if not isinstance(raw_term, list) or len(raw_term) != len(legs):
            raise SchemaError(f"terms[{t}]: need one vector per leg ({len(legs)})")
        term = []
        for leg_no, raw_vec in enumerate(raw_term):
            if not isinstance(raw_vec, list):
                raise SchemaError(f"terms[{t}][{leg_no}]: vector must be a list")
            if len(raw_vec) != legs[leg_no].dim:
                raise SchemaError(
                    f"terms[{t}][{leg_no}]: vector length {len(raw_vec)} "
                    f"!= leg dimension {legs[leg_no].dim}"
                )
            try:
                term.append(tuple(parse_rational(x) for x in raw_vec))
            except ValueError as exc:
                raise SchemaError(f"terms[{t}][{leg_no}]: {exc}") from exc
        terms.append(tuple(term))
    provenance = data.get("provenance", "")
    if not isinstance(provenance, str):
        raise SchemaError("'provenance' must be a string")
    weights = data.get("cycle_weights")
    if weights is not None:
        if not isinstance(weights, list) or not all(isinstance(w, int) and w >= 1 for w in weights):
            raise SchemaError("'cycle_weights' must be a list of positive integers")
        weights = tuple(weights)
    try:
        d = Decomposition(tuple(legs), tuple(terms), provenance=provenance)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return d, weights


def export_decomposition(d: Decomposition, path: str, cycle_weights: Sequence[int] | None = None) -> None:
    """Write the byte-stable file form (fixed key order, fixed indentation)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(decomposition_to_dict(d, cycle_weights), fh, indent=1)
        fh.write("\n")


def import_decomposition(path: str) -> tuple[Decomposition, tuple[int, ...] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return decomposition_from_dict(data)
