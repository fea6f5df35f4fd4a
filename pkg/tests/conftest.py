"""Shared hypothesis strategies for small exact-arithmetic objects."""

from fractions import Fraction

from hypothesis import strategies as st

from tensor_surgery.exact import Leg, RationalMatrix, SparseTensor
from tensor_surgery.decomp import Decomposition
from tensor_surgery.graphs import Hypergraph, HyperEdge

small_fractions = st.fractions(min_value=-3, max_value=3, max_denominator=4)
nonzero_fractions = small_fractions.filter(bool)


@st.composite
def small_matrices(draw, max_dim=4):
    rows = draw(st.integers(1, max_dim))
    cols = draw(st.integers(1, max_dim))
    entries = {}
    for r in range(rows):
        for c in range(cols):
            if draw(st.booleans()):
                entries[(r, c)] = draw(small_fractions)
    return RationalMatrix(rows, cols, entries)


@st.composite
def small_tensors(draw, max_legs=3, max_dim=3):
    dims = draw(st.lists(st.integers(1, max_dim), min_size=1, max_size=max_legs))
    legs = tuple(Leg(d) for d in dims)
    n_entries = draw(st.integers(0, 6))
    entries = {}
    for _ in range(n_entries):
        idx = tuple(draw(st.integers(0, d - 1)) for d in dims)
        entries[idx] = draw(small_fractions)
    return SparseTensor(legs, entries)


@st.composite
def small_hypergraphs(draw, max_vertices=5, max_edges=4, max_dim=3):
    n = draw(st.integers(2, max_vertices))
    n_edges = draw(st.integers(1, max_edges))
    edges = []
    for _ in range(n_edges):
        size = draw(st.integers(1, min(3, n)))
        verts = draw(st.lists(st.integers(0, n - 1), min_size=size, max_size=size, unique=True))
        dim = draw(st.integers(1, max_dim))
        edges.append(HyperEdge(tuple(verts), dim))
    return Hypergraph(n, tuple(edges))


@st.composite
def nonzero_vectors(draw, dim):
    vec = draw(
        st.lists(small_fractions, min_size=dim, max_size=dim).filter(lambda v: any(v))
    )
    return tuple(vec)


@st.composite
def split_decompositions(draw, max_legs=3, max_factor=3, max_terms=3):
    """Decompositions whose every leg carries a 2-factor split (the shape
    surgery plans operate on)."""
    n_legs = draw(st.integers(2, max_legs))
    splits = [
        (draw(st.integers(1, max_factor)), draw(st.integers(1, max_factor)))
        for _ in range(n_legs)
    ]
    legs = tuple(Leg(a * b, (a, b)) for a, b in splits)
    n_terms = draw(st.integers(1, max_terms))
    terms = tuple(
        tuple(draw(nonzero_vectors(leg.dim)) for leg in legs) for _ in range(n_terms)
    )
    return Decomposition(legs, terms, provenance="random")


@st.composite
def decompositions_with_plans(draw, max_legs=3, max_factor=3, max_terms=3):
    """A random decomposition plus a valid surgery plan for one of its legs."""
    from tensor_surgery.surgery import SurgeryPlan

    d = draw(split_decompositions(max_legs, max_factor, max_terms))
    leg = draw(st.integers(0, len(d.legs) - 1))
    a, b = d.legs[leg].split
    path = tuple(draw(st.lists(st.integers(1, 3), min_size=0, max_size=2)))
    return d, SurgeryPlan(leg, (a, b), path)
