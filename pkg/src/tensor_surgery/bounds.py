"""Closed-form rank and exponent bounds with provenance-tagged records.

Every bound is produced as a BoundRecord carrying the quantity it bounds,
the direction, an exact integer / rational or an 8-significant-digit float,
a citation, and a derivation trace.  The matrix multiplication exponent
``omega`` and the rectangular dual exponent ``alpha`` are always inputs,
never baked into formula bodies; the defaults are the currently published
values (Le Gall 2014 for omega, Le Gall 2012 for alpha).

Rank bounds are exact integers.  Exponent formulas use binary64 floats and
are displayed to 8 significant digits, which is the precision the published
constants themselves carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import matrix_rank, flatten
from .graphs import Hypergraph, HyperEdge, CutResult, cycle, dome, graph_tensor, max_cut

DEFAULT_OMEGA = 2.3728639
DEFAULT_ALPHA = 0.3029805

# Recorded constants from the literature; these are never re-derived here.
MATMUL_RANK_442 = 26          # Hopcroft & Kerr 1971
MATMUL_RANK_444 = 49          # square of the seven-term 2x2 algorithm
MATMUL_BORDER_442 = 24        # Smirnov 2013 / earlier approximate algorithms
MATMUL_BORDER_444 = 46        # Smirnov 2013
CYCLE_TO_UNIT_SUBEXPONENT = 2  # triangle: Strassen 1987; all cycles: Vrana et al.


@dataclass(frozen=True)
class ExponentParams:
    """Input constants for the exponent formulas."""

    omega: float = DEFAULT_OMEGA
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not 2.0 <= self.omega <= 3.0:
            raise ValueError(f"omega must lie in [2, 3], got {self.omega}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class BoundRecord:
    quantity: str                # "rank" | "border-rank" | "exponent"
    subject: str
    direction: str               # "lower" | "upper" | "equal"
    value: int | Fraction | float | None
    citation: str = ""
    trace: str = ""
    verified_construction: bool = False

    def value_str(self) -> str:
        return format_value(self.value)


def format_value(value: int | Fraction | float | None) -> str:
    if value is None:
        return "(symbolic)"
    if isinstance(value, bool):  # pragma: no cover - guard
        raise TypeError("bool is not a bound value")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    return f"{value:.8g}"


# ---------------------------------------------------------------------------
# Flattening lower bounds
# ---------------------------------------------------------------------------


def flattening_lower(h: Hypergraph, subject: str = "graph tensor") -> BoundRecord:
    """Max-cut flattening lower bound on rank (and border rank).

    The flattening along a vertex bipartition has matrix rank equal to the
    product of the straddling edge dimensions, so the max-cut value bounds
    rank from below.  With uniform edge dimension n the bound reads
    n^f where f counts straddling edges; f is reported in the trace.
    """
    cut = max_cut(h)
    dims = {e.dim for e in h.edges}
    trace = f"max cut {cut.side0} | {cut.side1}; straddles {len(cut.straddling)} edges; value {cut.value}"
    if len(dims) == 1:
        n = dims.pop()
        trace += f"; uniform dimension {n}: exponent >= {len(cut.straddling)}"
    return BoundRecord(
        quantity="rank",
        subject=subject,
        direction="lower",
        value=cut.value,
        citation="flattening rank bound (matrix rank of a leg bipartition)",
        trace=trace,
    )


def flattening_cross_check(h: Hypergraph, cut: CutResult | None = None) -> bool:
    """Confirm by exact elimination that the flattening rank equals the cut
    value.  Only usable at desk scale (the tensor is materialized)."""
    if cut is None:
        cut = max_cut(h)
    t = graph_tensor(h)
    return matrix_rank(flatten(t, cut.side0)) == cut.value


def cycle_rank_lower(k: int) -> list[BoundRecord]:
    """Rank and border-rank lower bounds for the dimension-2 odd cycle.

    Two formula-derived records: flattening the k-cycle to a 2 x 2 x 2^(k-2)
    multiplication tensor gives border rank >= 2^k - 2^(k-2) + 1 (via the
    published Young-flattening value) and rank >= 2^k - 2^(k-2) + 2 (via the
    Blaser bound 2mn + 2n - m - 2).  For k in {3, 5} the literature records
    slightly different constants; those are emitted as separate records
    rather than silently reconciled.
    """
    if k % 2 == 0 or k < 3:
        raise ValueError(f"odd k >= 3 required, got {k}")
    subject = f"T_2(C_{k})"
    rank_formula = 2**k - 2 ** (k - 2) + 2
    border_formula = 2**k - 2 ** (k - 2) + 1
    records = [
        BoundRecord(
            "rank", subject, "lower", rank_formula,
            citation="Blaser 2003 rank bound applied to the (2, 2, 2^(k-2)) flattening",
            trace=f"2^{k} - 2^{k-2} + 2 = {rank_formula}",
        ),
        BoundRecord(
            "border-rank", subject, "lower", border_formula,
            citation="Young flattening of the (2, 2, 2^(k-2)) reshaping",
            trace=f"2^{k} - 2^{k-2} + 1 = {border_formula}",
        ),
    ]
    recorded = {
        3: (7, 7, "Winograd 1971 (rank); Landsberg 2006 (border rank)"),
        5: (25, 24, "recorded five-cycle interval"),
    }
    if k in recorded:
        rank_rec, border_rec, cite = recorded[k]
        records.append(
            BoundRecord(
                "rank", subject, "lower", rank_rec,
                citation=cite, trace="recorded constant (differs from the formula value; both emitted)",
            )
        )
        records.append(
            BoundRecord(
                "border-rank", subject, "lower", border_rec,
                citation=cite, trace="recorded constant (differs from the formula value; both emitted)",
            )
        )
    return records


# ---------------------------------------------------------------------------
# Exponent upper bounds for odd cycles
# ---------------------------------------------------------------------------


def surgery_exponent_upper(
    k: int, table: dict[int, float] | None = None, params: ExponentParams | None = None
) -> BoundRecord:
    """Best exponent bound obtainable from the splitting rule
    w_{a+b-1} <= w_a + w_b over known odd-cycle exponents.

    ``table`` maps odd cycle lengths to known upper bounds; it must contain
    an entry for 3 and defaults to {3: omega}, in which case the combined
    bound collapses to ((k-1)/2) * omega.
    """
    params = params or ExponentParams()
    if k % 2 == 0 or k < 3:
        raise ValueError(f"odd k >= 3 required, got {k}")
    table = dict(table) if table else {3: params.omega}
    if 3 not in table:
        raise ValueError("table must contain an entry for k = 3")
    best: dict[int, float] = {}
    for j in range(3, k + 1, 2):
        cands = [table[j]] if j in table else []
        cands += [best[a] + best[j + 1 - a] for a in range(3, j - 1, 2)]
        best[j] = min(cands)
    return BoundRecord(
        "exponent", f"T_2(C_{k})", "upper", best[k],
        citation="odd-cycle splitting rule w(k+l-1) <= w(k) + w(l)",
        trace=f"dynamic program over table {sorted(table)}",
    )


def alpha_exponent_upper(k: int, params: ExponentParams | None = None) -> BoundRecord:
    """Rectangular-multiplication bound w_k <= k - a(1 + (1-a)/(k-1+a)).

    The relaxed form k - a is recorded in the trace.
    """
    params = params or ExponentParams()
    if k % 2 == 0 or k < 3:
        raise ValueError(f"odd k >= 3 required, got {k}")
    a = params.alpha
    tight = k - a * (1 + (1 - a) / (k - 1 + a))
    return BoundRecord(
        "exponent", f"T_2(C_{k})", "upper", tight,
        citation="weighted-cycle surgery with rectangular multiplication (dual exponent alpha)",
        trace=f"tight k - a(1 + (1-a)/(k-1+a)) = {tight:.8g}; relaxed k - a = {k - a:.8g}",
    )


def laser_exponent_upper(k: int, q_max: int = 10_000) -> BoundRecord:
    """Laser-method bound min over integers q >= 2 of log_q((q+1)^k / 4)."""
    if k % 2 == 0 or k < 3:
        raise ValueError(f"odd k >= 3 required, got {k}")
    best_q, best_val = None, math.inf
    for q in range(2, q_max + 1):
        val = (k * math.log(q + 1) - math.log(4)) / math.log(q)
        if val < best_val:
            best_q, best_val = q, val
    return BoundRecord(
        "exponent", f"T_2(C_{k})", "upper", best_val,
        citation="laser method with cycle distillation (Buhrman et al. 2016)",
        trace=f"minimized at q = {best_q} over q in [2, {q_max}]",
    )


@dataclass(frozen=True)
class TableRow:
    k: int
    lower: int
    upper: float
    source: str
    citation: str


def best_known_table(params: ExponentParams | None = None, k_max: int = 13) -> list[TableRow]:
    """Best lower/upper exponent bounds for odd cycles up to k_max.

    Lower bounds are the flattening value k - 1.  Upper bounds take the
    minimum of the input omega (k = 3), the splitting rule fed with the best
    smaller entries, the alpha bound, and the laser bound.
    """
    params = params or ExponentParams()
    rows: list[TableRow] = []
    best: dict[int, float] = {}
    for k in range(3, k_max + 1, 2):
        candidates: list[tuple[float, str, str]] = []
        if k == 3:
            candidates.append((params.omega, "omega", "matrix multiplication exponent (input constant)"))
        else:
            split = min(best[a] + best[k + 1 - a] for a in range(3, k - 1, 2))
            candidates.append((split, "surgery", "odd-cycle splitting rule"))
            alpha_rec = alpha_exponent_upper(k, params)
            candidates.append((float(alpha_rec.value), "alpha", alpha_rec.citation))
            laser_rec = laser_exponent_upper(k)
            candidates.append((float(laser_rec.value), "laser", laser_rec.citation))
        value, source, citation = min(candidates, key=lambda c: c[0])
        best[k] = value
        rows.append(TableRow(k, k - 1, value, source, citation))
    return rows


def covering_distill_c5(params: ExponentParams | None = None) -> list[BoundRecord]:
    """Triangle-covering/distillation bound for the five-cycle plus the
    general k - alpha covering variant (instantiated at k = 5).

    Covering the complete 5-vertex graph with ten triangles and distilling
    unit tensors from one five-cycle factor gives w_5 <= (10w - 2*3)/3.
    """
    params = params or ExponentParams()
    value = (10 * params.omega - 2 * 3) / 3
    records = [
        BoundRecord(
            "exponent", "T_2(C_5)", "upper", value,
            citation="triangle covering of the complete 5-graph with unit-tensor distillation",
            trace=f"(10*omega - 6)/3 with omega = {params.omega}; "
                  f"uses cycle-to-unit conversion rate {CYCLE_TO_UNIT_SUBEXPONENT}",
        ),
        BoundRecord(
            "exponent", "T_2(C_5)", "upper", 5 - params.alpha,
            citation="covering by rectangular triangles with distillation",
            trace=f"k - alpha at k = 5; general odd k gives k - {params.alpha}",
        ),
    ]
    return records


# ---------------------------------------------------------------------------
# Scaling identity and rectangular exponents
# ---------------------------------------------------------------------------


def scaling_identity_check(
    gamma: Sequence[float], delta: float = 1.0, params: ExponentParams | None = None
) -> BoundRecord:
    """Record for the scaling identity w(d*g1, d*g2, d*g3) = d * w(g1, g2, g3).

    When the scaled triple, normalized by its maximum, has its two largest
    entries equal and the smallest strictly below alpha, the rectangular
    exponent is known exactly: w = 2 * max(scaled entries).  Otherwise the
    record is symbolic (value None).
    """
    params = params or ExponentParams()
    g = tuple(float(x) for x in gamma)
    if len(g) != 3 or any(x < 0 for x in g) or delta < 0:
        raise ValueError("need three nonnegative components and nonnegative delta")
    scaled = tuple(sorted(delta * x for x in g))
    subject = f"matmul exponent w{tuple(round(delta * x, 6) for x in g)}"
    value: float | None = None
    note = f"identity: w({delta}*g) = {delta} * w(g)"
    if scaled[2] > 0 and scaled[1] == scaled[2] and scaled[0] / scaled[2] < params.alpha:
        value = 2 * scaled[2]
        note += (
            f"; normalized triple ({scaled[0]/scaled[2]:.6g}, 1, 1) has smallest entry"
            f" below alpha = {params.alpha}, so the value is 2 * {scaled[2]:.6g}"
        )
    return BoundRecord(
        "exponent", subject, "equal", value,
        citation="scaling identity for rectangular multiplication exponents",
        trace=note,
    )


# ---------------------------------------------------------------------------
# Dome and hypergraph bounds
# ---------------------------------------------------------------------------


def apex_multigraph(dim: int = 2) -> Hypergraph:
    """Six-vertex multigraph with an apex joined by multiplicity-8 bundles.

    Vertices 0..4 carry a pentagon-like frame (edges {4,0}, {3,1}, {2,1} x3,
    {1,0} x4); vertex 5 is the apex, joined to vertices 2, 3, 4 by eight
    parallel edges each.  All edges have the given dimension.  Its max cut
    (the 2-coloring {0,2,3,4} vs {1,5}) straddles 32 of the 33 edges.
    """
    edges: list[HyperEdge] = []
    edges += [HyperEdge((3, 5), dim) for _ in range(8)]
    edges += [HyperEdge((2, 5), dim) for _ in range(8)]
    edges += [HyperEdge((4, 5), dim) for _ in range(8)]
    edges.append(HyperEdge((0, 4), dim))
    edges.append(HyperEdge((1, 3), dim))
    edges += [HyperEdge((1, 2), dim) for _ in range(3)]
    edges += [HyperEdge((0, 1), dim) for _ in range(4)]
    return Hypergraph(6, tuple(edges))


def linked_domes(dim: int = 2) -> Hypergraph:
    """Two domes sharing a base vertex, apexes bridged.

    Vertices: 0, 1 the two apexes; 2, 4 and 3, 6 their private base
    vertices; 5 the shared base vertex.  Each dome keeps its 3-vertex base
    hyperedge but only the two pendant edges to its private base vertices;
    the apexes are joined by one edge.
    """
    edges = (
        HyperEdge((0, 1), dim),       # apex bridge
        HyperEdge((0, 2), dim),       # left pendants
        HyperEdge((0, 4), dim),
        HyperEdge((2, 4, 5), dim),    # left base
        HyperEdge((1, 3), dim),       # right pendants
        HyperEdge((1, 6), dim),
        HyperEdge((3, 5, 6), dim),    # right base
    )
    return Hypergraph(7, edges)


def dome_and_hypergraph_bounds(
    params: ExponentParams | None = None, cross_check: bool = True
) -> list[BoundRecord]:
    """Exponent bounds for the dome tensors and the two worked multigraph /
    hypergraph surgeries, lower bounds cross-checked by exact flattening.

    * dome(1,1): exponent in [3, 3*omega/2].
    * dome(1,4): exponent exactly 12 (needs alpha > 1/4).
    * apex multigraph: exponent exactly 32 (needs alpha > 1/4).
    * linked domes: exponent in [6, 3*omega].
    """
    params = params or ExponentParams()
    records: list[BoundRecord] = []

    d11 = dome(1, 1, 2, 2)
    cut = max_cut(d11)
    checked = cross_check and flattening_cross_check(d11, cut)
    records.append(BoundRecord(
        "exponent", "dome(1,1)", "lower", 3,
        citation="flattening across the three pendant edges",
        trace=f"max cut value {cut.value} = 2^3 at dimension 2"
              + ("; flattening rank confirmed by elimination" if checked else ""),
    ))
    records.append(BoundRecord(
        "exponent", "dome(1,1)", "upper", 3 * params.omega / 2,
        citation="three triangles cover the support; unit tensors distilled from the base",
        trace=f"3*omega/2 with omega = {params.omega}; the covering costs 3*omega and the"
              " factor-2 distillation rate halves it (the published derivation's closing"
              " line reads 3*omega, its stated bound 3*omega/2; the stated bound is the"
              " one implemented and the one the linked-domes bound consumes)",
    ))

    d14 = dome(1, 4, 2, 2)
    cut14 = max_cut(d14)
    checked14 = cross_check and flattening_cross_check(d14, cut14)
    records.append(BoundRecord(
        "exponent", "dome(1,4)", "lower", 12,
        citation="flattening across the twelve pendant edges",
        trace=f"max cut value {cut14.value} = 2^12 at dimension 2"
              + ("; flattening rank confirmed by elimination" if checked14 else ""),
    ))
    upper14: float | None = 12.0 if params.alpha > 0.25 else None
    records.append(BoundRecord(
        "exponent", "dome(1,4)", "upper", upper14,
        citation="rectangular triangles at exponent w(1,4,4) = 8 with distillation",
        trace="3 * w(1,4,4)/2 = 12 using w(1,4,4) = 8, valid since alpha > 1/4"
        if upper14 is not None
        else f"needs alpha > 1/4; alpha = {params.alpha} does not qualify",
    ))

    apex = apex_multigraph(2)
    cut_apex = max_cut(apex)
    records.append(BoundRecord(
        "exponent", "apex multigraph", "lower", len(cut_apex.straddling),
        citation="max cut of the weighted multigraph",
        trace=f"cut {cut_apex.side0} | {cut_apex.side1} straddles {len(cut_apex.straddling)}"
              f" edges; value 2^{len(cut_apex.straddling)} = {cut_apex.value} at dimension 2",
    ))
    upper_apex: float | None = 32.0 if params.alpha > 0.25 else None
    records.append(BoundRecord(
        "exponent", "apex multigraph", "upper", upper_apex,
        citation="rectangular start w(1,4,4) = 8 plus two dome(1,4) insertions",
        trace="4*2 + 2*12 = 32, valid since alpha > 1/4"
        if upper_apex is not None
        else f"needs alpha > 1/4; alpha = {params.alpha} does not qualify",
    ))

    h = linked_domes(2)
    cut_h = max_cut(h)
    checked_h = cross_check and flattening_cross_check(h, cut_h)
    records.append(BoundRecord(
        "exponent", "linked domes", "lower", 6,
        citation="flattening across the white/black 2-coloring",
        trace=f"max cut value {cut_h.value} = 2^6 at dimension 2"
              + ("; flattening rank confirmed by elimination" if checked_h else ""),
    ))
    records.append(BoundRecord(
        "exponent", "linked domes", "upper", 3 * params.omega,
        citation="two dome(1,1) insertions",
        trace=f"2 * (3*omega/2) = 3*omega with omega = {params.omega}",
    ))
    return records


# ---------------------------------------------------------------------------
# Component-cost bounds for the dimension-4 five-cycle
# ---------------------------------------------------------------------------


def c5_dim4_component_bounds() -> list[BoundRecord]:
    """Arithmetic rank / border-rank bounds for the dimension-4 five-cycle
    from the local-rank class sizes 36 / 12 / 1 of the squared seven-term
    base and recorded multiplication-tensor costs."""
    rank_total = 36 * 16 + 12 * MATMUL_RANK_442 + 1 * MATMUL_RANK_444
    border_total = 36 * 16 + 12 * MATMUL_BORDER_442 + 1 * MATMUL_BORDER_444
    return [
        BoundRecord(
            "rank", "T_4(C_5)", "upper", rank_total,
            citation="surgery cost accounting with recorded (4,4,2) and (4,4,4) ranks",
            trace=f"36*16 + 12*{MATMUL_RANK_442} + 1*{MATMUL_RANK_444} = {rank_total}",
        ),
        BoundRecord(
            "border-rank", "T_4(C_5)", "upper", border_total,
            citation="surgery cost accounting with recorded border ranks",
            trace=f"36*16 + 12*{MATMUL_BORDER_442} + 1*{MATMUL_BORDER_444} = {border_total}",
        ),
    ]
