"""Hypergraphs, graph tensors, and brute-force weighted max-cut.

A hypergraph is a vertex count plus an ordered list of weighted edges; the
weight of an edge is the dimension of the summation index it contributes.
Multi-edges are simply repeated entries.  Edge order is part of the
hypergraph's identity: the tensor leg of vertex v lists the dimensions of
its incident edges in edge-list order, and that order fixes the row-major
index packing of every leg.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod
from typing import Iterable, Sequence

from .exact import Leg, SparseTensor

# Cap on the number of nonzero entries a graph tensor may expand to.  Keeps
# accidental huge builds (e.g. 33-edge multigraphs) from exhausting memory;
# bound arithmetic on such graphs goes through max_cut instead.
MAX_TENSOR_ENTRIES = 1 << 22

MAX_CUT_VERTICES = 30


class SchemaError(ValueError):
    """A hypergraph or decomposition file violates its schema."""


@dataclass(frozen=True)
class HyperEdge:
    verts: tuple[int, ...]
    dim: int

    def __post_init__(self) -> None:
        vs = tuple(sorted(set(int(v) for v in self.verts)))
        if len(vs) != len(self.verts):
            raise ValueError(f"edge vertices must be distinct, got {self.verts}")
        object.__setattr__(self, "verts", vs)
        if not vs:
            raise ValueError("edge must contain at least one vertex")
        if self.dim < 1:
            raise ValueError(f"edge dimension must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class Hypergraph:
    num_vertices: int
    edges: tuple[HyperEdge, ...]

    def __post_init__(self) -> None:
        if self.num_vertices < 1:
            raise ValueError("hypergraph needs at least one vertex")
        object.__setattr__(self, "edges", tuple(self.edges))
        for e in self.edges:
            if e.verts[-1] >= self.num_vertices:
                raise ValueError(f"edge {e.verts} exceeds vertex range [0, {self.num_vertices})")

    def incident(self, v: int) -> list[int]:
        """Positions (in edge-list order) of the edges containing v."""
        return [i for i, e in enumerate(self.edges) if v in e.verts]


@dataclass(frozen=True)
class CutResult:
    """A vertex bipartition, the edges straddling it, and the cut value.

    The value is the exact integer product of the dimensions of the
    straddling edges (an edge straddles when it has vertices on both sides).
    """

    side0: tuple[int, ...]
    side1: tuple[int, ...]
    straddling: tuple[int, ...]
    value: int


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def weighted_cycle(weights: Sequence[int]) -> Hypergraph:
    """Cycle on len(weights) vertices with edge j = {j, j+1 mod k} of
    dimension weights[j], edges listed in that order."""
    k = len(weights)
    if k < 3:
        raise ValueError("cycle needs at least 3 vertices")
    edges = tuple(HyperEdge((j, (j + 1) % k), int(w)) for j, w in enumerate(weights))
    return Hypergraph(k, edges)


def cycle(k: int, dim: int = 2) -> Hypergraph:
    if k < 3:
        raise ValueError(f"cycle needs k >= 3, got {k}")
    return weighted_cycle([dim] * k)


def triangle(n1: int, n2: int, n3: int) -> Hypergraph:
    """Weighted triangle; its tensor is the (n1, n2, n3) matrix
    multiplication tensor up to the leg layout documented in graph_tensor."""
    return weighted_cycle([n1, n2, n3])


def unit_hyperedge(k: int, n: int) -> Hypergraph:
    """Single hyperedge over k vertices with dimension n (diagonal tensor)."""
    if k < 1:
        raise ValueError("unit hyperedge needs k >= 1")
    return Hypergraph(k, (HyperEdge(tuple(range(k)), n),))


def dome(k: int, ell: int, base_dim: int = 2, leg_dim: int = 2) -> Hypergraph:
    """Four-vertex dome: the base hyperedge {1,2,3} repeated k times with
    dimension base_dim, then pendant edges {0,1}, {0,2}, {0,3} each repeated
    ell times with dimension leg_dim."""
    if k < 1 or ell < 1:
        raise ValueError("dome multiplicities must be >= 1")
    edges: list[HyperEdge] = [HyperEdge((1, 2, 3), base_dim) for _ in range(k)]
    for v in (1, 2, 3):
        edges.extend(HyperEdge((0, v), leg_dim) for _ in range(ell))
    return Hypergraph(4, tuple(edges))


def path_graph(k: int, dim: int = 2) -> Hypergraph:
    """Path with k edges on k+1 vertices, edges {v, v+1} in order."""
    if k < 1:
        raise ValueError("path needs at least one edge")
    return Hypergraph(k + 1, tuple(HyperEdge((v, v + 1), dim) for v in range(k)))


def disjoint_union(g1: Hypergraph, g2: Hypergraph) -> Hypergraph:
    shift = g1.num_vertices
    edges = g1.edges + tuple(
        HyperEdge(tuple(v + shift for v in e.verts), e.dim) for e in g2.edges
    )
    return Hypergraph(g1.num_vertices + g2.num_vertices, edges)


# ---------------------------------------------------------------------------
# Graph tensor
# ---------------------------------------------------------------------------


def graph_tensor(h: Hypergraph) -> SparseTensor:
    """The tensor of a weighted hypergraph.

    One leg per vertex; every edge contributes one summation index of its
    dimension, shared by all its vertices.  Leg v has dimension equal to the
    product of its incident edge dimensions, split listing those dimensions
    in edge-list order; isolated vertices get a dimension-1 leg.  The tensor
    has one unit entry per edge-index tuple, so nnz is the product of all
    edge dimensions.
    """
    total = prod(e.dim for e in h.edges)
    if total > MAX_TENSOR_ENTRIES:
        raise ValueError(f"graph tensor would have {total} entries (cap {MAX_TENSOR_ENTRIES})")
    incidence = [h.incident(v) for v in range(h.num_vertices)]
    legs = tuple(
        Leg(prod(h.edges[i].dim for i in inc), tuple(h.edges[i].dim for i in inc))
        for inc in incidence
    )
    entries: dict[tuple[int, ...], Fraction] = {}
    for vals in product(*(range(e.dim) for e in h.edges)):
        idx = []
        for v, inc in enumerate(incidence):
            packed = 0
            for i in inc:
                packed = packed * h.edges[i].dim + vals[i]
            idx.append(packed)
        entries[tuple(idx)] = Fraction(1)
    return SparseTensor(legs, entries)


# ---------------------------------------------------------------------------
# Max cut
# ---------------------------------------------------------------------------


def cut_value(h: Hypergraph, side0: Iterable[int]) -> CutResult:
    """Cut data for an explicit bipartition (side0, complement)."""
    s0 = frozenset(side0)
    straddling = tuple(
        i
        for i, e in enumerate(h.edges)
        if any(v in s0 for v in e.verts) and any(v not in s0 for v in e.verts)
    )
    value = prod(h.edges[i].dim for i in straddling)
    side1 = tuple(v for v in range(h.num_vertices) if v not in s0)
    return CutResult(tuple(sorted(s0)), side1, straddling, value)


def max_cut(h: Hypergraph) -> CutResult:
    """Exhaustive weighted max cut over all 2^(k-1) bipartitions.

    The cut value of a bipartition is the product of the dimensions of the
    straddling edges.  Ties are broken by the lexicographically smallest
    sorted side containing vertex 0, so the result is schedule-independent.
    """
    k = h.num_vertices
    if k > MAX_CUT_VERTICES:
        raise ValueError(f"max_cut brute force is capped at {MAX_CUT_VERTICES} vertices, got {k}")
    edge_masks = []
    for e in h.edges:
        mask = 0
        for v in e.verts:
            mask |= 1 << v
        edge_masks.append(mask)
    dims = [e.dim for e in h.edges]
    best_value = -1
    best_side: tuple[int, ...] | None = None
    full = (1 << k) - 1
    for bits in range(1 << (k - 1)):
        s0_mask = (bits << 1) | 1
        value = 1
        for mask, d in zip(edge_masks, dims):
            inside = mask & s0_mask
            if inside and inside != mask:
                value *= d
        if value > best_value:
            best_value = value
            best_side = None  # recomputed lazily below
            best_mask = s0_mask
        elif value == best_value:
            cand = tuple(v for v in range(k) if (s0_mask >> v) & 1)
            cur = tuple(v for v in range(k) if (best_mask >> v) & 1)
            if cand < cur:
                best_mask = s0_mask
    side0 = tuple(v for v in range(k) if (best_mask >> v) & 1)
    return cut_value(h, side0)


# ---------------------------------------------------------------------------
# File format and CLI graph specs
# ---------------------------------------------------------------------------


def hypergraph_to_dict(h: Hypergraph) -> dict:
    return {
        "vertices": h.num_vertices,
        "edges": [{"verts": list(e.verts), "dim": e.dim} for e in h.edges],
    }


def hypergraph_from_dict(data: object) -> Hypergraph:
    if not isinstance(data, dict):
        raise SchemaError("hypergraph file must contain an object")
    if "vertices" not in data or "edges" not in data:
        raise SchemaError("hypergraph object needs 'vertices' and 'edges' fields")
    n = data["vertices"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"'vertices' must be a positive integer, got {n!r}")
    raw = data["edges"]
    if not isinstance(raw, list):
        raise SchemaError("'edges' must be a list")
    edges = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "verts" not in item or "dim" not in item:
            raise SchemaError(f"edges[{i}]: need 'verts' and 'dim'")
        verts, dim = item["verts"], item["dim"]
        if not isinstance(verts, list) or not all(isinstance(v, int) for v in verts):
            raise SchemaError(f"edges[{i}].verts: must be a list of integers")
        if not isinstance(dim, int) or dim < 1:
            raise SchemaError(f"edges[{i}].dim: must be a positive integer")
        try:
            edges.append(HyperEdge(tuple(verts), dim))
        except ValueError as exc:
            raise SchemaError(f"edges[{i}]: {exc}") from exc
    try:
        return Hypergraph(n, tuple(edges))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def save_hypergraph(h: Hypergraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hypergraph_to_dict(h), fh, indent=1)
        fh.write("\n")


def load_hypergraph(path: str) -> Hypergraph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return hypergraph_from_dict(data)


def parse_graph_spec(spec: str, dim: int | None = None) -> Hypergraph:
    """Build a hypergraph from a CLI spec: a named builder or a file path.

    Named builders: ``cycle:K[,N]``, ``weighted:W0,W1,...``, ``unit:K[,N]``,
    ``triangle:N1,N2,N3``, ``dome:K,L[,BASE,LEG]``, ``path:K[,N]``.  An
    optional uniform dimension override applies to cycle/unit/path/dome.
    Anything that is not a recognized builder name is treated as a file path.
    """
    name, _, rest = spec.partition(":")
    args = [a for a in rest.split(",") if a] if rest else []
    builders = {"cycle", "weighted", "unit", "triangle", "dome", "path"}
    if name not in builders:
        return load_hypergraph(spec)
    try:
        ints = [int(a) for a in args]
    except ValueError as exc:
        raise SchemaError(f"bad builder arguments in {spec!r}: {exc}") from exc
    if name == "cycle":
        if len(ints) not in (1, 2):
            raise SchemaError("cycle builder takes cycle:K or cycle:K,N")
        n = dim if dim is not None else (ints[1] if len(ints) == 2 else 2)
        return cycle(ints[0], n)
    if name == "weighted":
        if len(ints) < 3:
            raise SchemaError("weighted builder needs at least 3 weights")
        return weighted_cycle(ints)
    if name == "unit":
        if len(ints) not in (1, 2):
            raise SchemaError("unit builder takes unit:K or unit:K,N")
        n = dim if dim is not None else (ints[1] if len(ints) == 2 else 2)
        return unit_hyperedge(ints[0], n)
    if name == "triangle":
        if len(ints) != 3:
            raise SchemaError("triangle builder takes triangle:N1,N2,N3")
        return triangle(*ints)
    if name == "dome":
        if len(ints) not in (2, 4):
            raise SchemaError("dome builder takes dome:K,L or dome:K,L,BASE,LEG")
        if len(ints) == 2:
            n = dim if dim is not None else 2
            return dome(ints[0], ints[1], n, n)
        return dome(*ints)
    if len(ints) not in (1, 2):
        raise SchemaError("path builder takes path:K or path:K,N")
    n = dim if dim is not None else (ints[1] if len(ints) == 2 else 2)
    return path_graph(ints[0], n)
