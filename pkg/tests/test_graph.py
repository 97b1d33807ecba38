import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import k3, p2, p3, random_graph, relabel
from graphpoincare.errors import (
    BadParams,
    DisconnectedGraph,
    DuplicateEdgeConflict,
    LengthMismatch,
    NonpositiveMass,
    NonpositiveWeight,
    OmegaNotProper,
    ParseError,
    SelfLoop,
    UnknownFamily,
)
from graphpoincare.graph import (
    Measure,
    VertexSubset,
    as_subset,
    build_graph,
    energy,
    energy_bilinear,
    family_from_spec,
    format_graph,
    generate_family,
    parse_family_spec,
    parse_graph,
    parse_measure,
    read_graph,
    uniform_measure,
    variational_seminorm,
    write_graph,
)


# --- construction ---------------------------------------------------------

def test_single_edge():
    g = build_graph([("a", "b", 1.0)])
    assert g.n == 2
    assert list(g.edges()) == [("a", "b", 1.0)]


def test_path_p3():
    g = build_graph([("a", "b", 1.0), ("b", "c", 1.0)])
    assert g.labels == ("a", "b", "c")
    np.testing.assert_array_equal(g.laplacian, [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])


def test_disconnected_rejected():
    with pytest.raises(DisconnectedGraph):
        build_graph([("a", "b", 1.0), ("c", "d", 1.0)])


@pytest.mark.parametrize("edges, exc", [
    ([("a", "a", 1.0), ("a", "b", 1.0)], SelfLoop),
    ([("a", "b", 0.0)], NonpositiveWeight),
    ([("a", "b", -1.0)], NonpositiveWeight),
    ([("a", "b", 1.0), ("b", "a", 2.0)], DuplicateEdgeConflict),
    ([("a", "b", float("nan"))], NonpositiveWeight),
])
def test_bad_edges(edges, exc):
    with pytest.raises(exc):
        build_graph(edges)


def test_duplicate_consistent_edge_accepted():
    g = build_graph([("a", "b", 2.0), ("b", "a", 2.0)])
    assert g.weight("a", "b") == g.weight("b", "a") == 2.0


def test_weight_matrix_symmetric_and_zero_diagonal():
    g, _ = random_graph(3)
    W = g.weight_matrix
    np.testing.assert_array_equal(W, W.T)
    assert np.all(np.diag(W) == 0)
    np.testing.assert_allclose(g.laplacian.sum(axis=1), 0, atol=1e-12)


# --- energy ---------------------------------------------------------------

def test_energy_examples():
    assert energy(p2(), [0, 1]) == 1
    assert energy(p3(), [0, 1, 0]) == 2
    assert energy(k3(), [5, 5, 5]) == 0


def test_energy_bilinear_examples():
    assert energy_bilinear(p2(), [0, 1], [1, 0]) == -1
    f = [0.3, -1.2, 2.0]
    assert energy_bilinear(p3(), f, f) == pytest.approx(energy(p3(), f))
    assert energy_bilinear(p3(), f, [4, 4, 4]) == 0


def test_energy_length_mismatch():
    with pytest.raises(LengthMismatch):
        energy(p3(), [1, 2])


@pytest.mark.parametrize("f, expected", [([1, -1], 2), ([3, 3, 3], 0), ([0, 1, 3], 3)])
def test_variational_seminorm(f, expected):
    assert variational_seminorm(f) == expected


graph_seeds = st.integers(0, 10_000)


@settings(max_examples=60, deadline=None)
@given(graph_seeds, st.floats(-100, 100))
def test_energy_shift_invariant(seed, c):
    g, rng = random_graph(seed)
    f = rng.normal(size=g.n)
    assert energy(g, f + c) == pytest.approx(energy(g, f), rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(graph_seeds)
def test_energy_of_absolute_value_is_smaller(seed):
    g, rng = random_graph(seed)
    f = rng.normal(size=g.n)
    assert energy(g, np.abs(f)) <= energy(g, f) + 1e-12


@settings(max_examples=60, deadline=None)
@given(graph_seeds)
def test_positive_and_negative_parts_interact_negatively(seed):
    g, rng = random_graph(seed)
    f = rng.normal(size=g.n)
    fp, fm = np.maximum(f, 0), np.maximum(-f, 0)
    assert energy_bilinear(g, fp, fm) <= 1e-12
    assert energy_bilinear(g, fp, -fm) >= -1e-12


@settings(max_examples=40, deadline=None)
@given(graph_seeds)
def test_energy_invariant_under_relabeling(seed):
    g, rng = random_graph(seed)
    perm = rng.permutation(g.n)
    h = relabel(g, perm)
    f = rng.normal(size=g.n)
    f_h = np.empty(g.n)
    for i in range(g.n):
        f_h[h.index(f"v{perm[i]}")] = f[i]
    assert energy(h, f_h) == pytest.approx(energy(g, f), rel=1e-12)


# --- measures and subsets ---------------------------------------------------

def test_uniform_measure():
    m = uniform_measure(k3())
    np.testing.assert_allclose(m.masses, [1 / 3] * 3)
    assert m.total() == pytest.approx(1.0)


def test_measure_validation():
    with pytest.raises(NonpositiveMass):
        Measure([0.5, 0.5, 0.0])
    with pytest.raises(BadParams):
        Measure([0.5, 0.6])
    np.testing.assert_allclose(Measure([1, 3], normalize=True).masses, [0.25, 0.75])
    assert Measure([2.0, 3.0], probability=False).total() == 5.0


def test_subsets():
    g = p3()
    sub = as_subset(g, ["1"])
    assert sub.labels(g) == ["1"]
    np.testing.assert_array_equal(sub.complement_indices, [0, 2])
    assert len(as_subset(g, np.array([True, False, True]))) == 2
    assert as_subset(g, VertexSubset([1, 0, 0])).labels(g) == ["0"]
    with pytest.raises(OmegaNotProper):
        as_subset(g, [])
    with pytest.raises(OmegaNotProper):
        as_subset(g, ["0", "1", "2"])
    with pytest.raises(KeyError):
        as_subset(g, ["zz"])


# --- families -------------------------------------------------------------

def test_path_family():
    g = generate_family("path", 3)
    assert list(g.edges()) == [("0", "1", 1.0), ("1", "2", 1.0)]


def test_comb_printed_weights():
    g = generate_family("comb", 1, 1, printed_weights=True)
    assert g.n == 6
    assert set(g.labels) == {"(-1,0)", "(0,0)", "(1,0)", "(-1,1)", "(0,1)", "(1,1)"}
    assert g.weight("(0,0)", "(0,1)") == 0.5
    assert g.weight("(-1,0)", "(0,0)") == 1.0


def test_comb_default_tooth_lengths_halve():
    g = generate_family("comb", 1, 3)
    # tooth edge (i,k)-(i,k+1) has length 1/2^(k+1)
    assert [g.weight("(0,%d)" % k, "(0,%d)" % (k + 1)) for k in range(3)] == [2.0, 4.0, 8.0]


def test_geometric_halfline():
    g = generate_family("geometric_halfline", 3)
    assert [w for *_, w in g.edges()] == [2.0, 4.0, 8.0]


def test_other_families():
    assert generate_family("cycle", 5).n == 5
    assert len(list(generate_family("cycle", 5).edges())) == 5
    assert len(list(generate_family("complete", 4).edges())) == 6
    star = generate_family("star", 4)
    assert star.n == 4 and star.labels[0] == "center"


def test_family_errors():
    with pytest.raises(UnknownFamily):
        generate_family("lattice", 3)
    with pytest.raises(BadParams):
        generate_family("path", 1)
    with pytest.raises(BadParams):
        generate_family("comb", 2)


def test_family_spec():
    assert parse_family_spec("comb:2,3") == ("comb", (2, 3))
    assert family_from_spec("path:4").n == 4
    with pytest.raises(BadParams):
        parse_family_spec("path:x")


# --- text formats ---------------------------------------------------------

def test_parse_graph_with_comments():
    text = "# triangle\n a b 1\n\nb c 2.5  # heavy\nc a 1\n"
    g = parse_graph(text)
    assert g.labels == ("a", "b", "c")
    assert g.weight("b", "c") == 2.5


@pytest.mark.parametrize("text", ["a b", "a b x", "a b 1 2"])
def test_parse_graph_errors(text):
    with pytest.raises(ParseError):
        parse_graph(text)


def test_graph_file_round_trip(tmp_path):
    g, _ = random_graph(7)
    path = tmp_path / "g.edges"
    write_graph(g, path)
    h = read_graph(path)
    # vertices are renumbered by first appearance, weights survive exactly
    assert sorted(h.labels) == sorted(g.labels)
    def undirected(graph):
        return sorted((min(u, v), max(u, v), w) for u, v, w in graph.edges())

    assert undirected(h) == undirected(g)
    assert parse_graph(format_graph(h)).labels == h.labels


def test_parse_measure():
    g = p3()
    m = parse_measure("0 0.25\n1 0.5\n2 0.25\n", g)
    np.testing.assert_array_equal(m.masses, [0.25, 0.5, 0.25])
    with pytest.raises(ParseError):
        parse_measure("0 0.5\n1 0.5\n", g)
    with pytest.raises(ParseError):
        parse_measure("0 0.5\n1 0.25\n7 0.25\n", g)
    assert parse_measure("0 1\n1 2\n2 1\n", g, normalize=True).masses[1] == 0.5
