"""
DOT export for human inspection of small instances

Horizontal arrows are solid edges, vertical arrows dashed edges, and each
non-identity square is a cluster holding a note with its boundary. Identity
cells are left out. The output is never parsed back.
"""

import logging
from pathlib import Path
from typing import List, Tuple, Union

from graphviz import Digraph

from .core_cat import chain
from .dblcat import FinDoubleCategory, boxtimes
from .groth import copresheaf_of
from .serialization import Structure, encode_cell, kind_of
from .two_cat import double_nerve

logger = logging.getLogger(__name__)


def to_digraph(d: FinDoubleCategory, name: str = "double", marked: frozenset = frozenset()) -> Digraph:
    """One double category as a graphviz Digraph; marked arrows are drawn bold"""
    graph = Digraph(name, graph_attr={'rankdir': "LR"}, node_attr={'shape': "box", 'fontsize': "10"})
    lookup = {x: f"n{i}" for i, x in enumerate(d.objects)}
    for x, node in lookup.items():
        graph.node(node, label=encode_cell(x))
    H, V = d.horizontal, d.vertical
    for f in H.morphisms:
        if H.is_identity(f):
            continue
        if f in marked:
            graph.edge(lookup[H.src[f]], lookup[H.tgt[f]], label=encode_cell(f), style="bold")
        else:
            graph.edge(lookup[H.src[f]], lookup[H.tgt[f]], label=encode_cell(f))
    for v in V.morphisms:
        if V.is_identity(v):
            continue
        graph.edge(lookup[V.src[v]], lookup[V.tgt[v]], label=encode_cell(v),
                   style="dashed,bold" if v in marked else "dashed")
    identities = set(d.squares_h.ident.values()) | set(d.squares_v.ident.values())
    for i, s in enumerate(d.squares):
        if s in identities:
            continue
        top, bottom, left, right = d.boundary(s)
        note = r"\n".join((encode_cell(s),
                           f"top {encode_cell(top)}  bottom {encode_cell(bottom)}",
                           f"left {encode_cell(left)}  right {encode_cell(right)}"))
        with graph.subgraph(name=f"cluster_s{i}") as cluster:
            cluster.attr(style="dotted")
            cluster.node(f"s{i}", label=note, shape="plaintext")
    return graph


def to_dot(d: FinDoubleCategory, name: str = "double", marked: frozenset = frozenset()) -> str:
    """DOT source for one double category"""
    return to_digraph(d, name, marked).source


def doubles_of(value: Structure) -> List[Tuple[str, FinDoubleCategory, frozenset]]:
    """Every double category an instance carries, with a file suffix and its marking"""
    kind = kind_of(value)
    if kind == "double":
        return [("", value, frozenset())]
    if kind == "marked-double":
        return [("", value.base, frozenset(value.marked))]
    if kind == "category":
        return [("", boxtimes(value, chain(0)), frozenset())]
    if kind == "double-functor":
        return [(".source", value.source, frozenset()), (".target", value.target, frozenset())]
    if kind == "two-category":
        return [("", double_nerve(value), frozenset())]
    if kind == "two-functor":
        return [(".source", double_nerve(value.source), frozenset()),
                (".target", double_nerve(value.target), frozenset())]
    if kind == "cat-valued-functor":
        projection, _ = copresheaf_of(value)
        return [("", projection.source, frozenset())]
    if kind == "functor":
        return [(".source", boxtimes(value.source, chain(0)), frozenset()),
                (".target", boxtimes(value.target, chain(0)), frozenset())]
    raise ValueError(f"no diagram for {kind} instances")


def export_dot(value: Structure, out: Union[str, Path], name: str = "instance") -> List[Path]:
    """
    Write one .dot file per double category of the instance

    Args:
        value: any serializable structure except 2-functors into Cat
        out: target file; extra double categories get .source/.target suffixes

    Returns:
        List[Path]: files written
    """
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    stem = out.name[:-4] if out.name.endswith(".dot") else out.name
    written = []
    for suffix, d, marked in doubles_of(value):
        path = out.with_name(f"{stem}{suffix}.dot")
        to_digraph(d, f"{name}{suffix}", marked).save(filename=path.name, directory=str(path.parent))
        written.append(path)
    logger.info("exported %d diagram(s) for %s", len(written), name)
    return written
