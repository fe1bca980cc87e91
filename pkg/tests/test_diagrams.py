import pytest
from graphviz import Digraph

from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import transposition
from dblcat_fibrations.dblcat import grid
from dblcat_fibrations.diagrams import doubles_of, export_dot, to_digraph, to_dot
from dblcat_fibrations.two_cat import constant_two_functor, two_cell


def test_grid_drawing():
    text = to_dot(grid(1, 1), "g")
    assert text.startswith("digraph g {")
    assert text.count("subgraph cluster") == 1
    assert text.count("style=dashed") == 2
    assert text.count("->") == 4


def test_digraph():
    graph = to_digraph(grid(1, 0), "line")
    assert isinstance(graph, Digraph)
    assert graph.name == "line"
    assert graph.source == to_dot(grid(1, 0), "line")


def test_marked_arrows_are_bold():
    d = grid(0, 1)
    marked = frozenset(v for v in d.vertical.morphisms if not d.vertical.is_identity(v))
    assert 'style="dashed,bold"' in to_dot(d, marked=marked)


def test_functors_give_two_files(tmp_path):
    written = export_dot(transposition(chain(1)), tmp_path / "t.dot", "t")
    assert sorted(p.name for p in written) == ["t.source.dot", "t.target.dot"]
    assert all(p.exists() for p in written)
    assert (tmp_path / "t.source.dot").read_text(encoding="utf-8").startswith('digraph "t.source" {')


def test_no_diagram_for_two_functors_into_cat():
    with pytest.raises(ValueError):
        doubles_of(constant_two_functor(two_cell(), chain(0)))
