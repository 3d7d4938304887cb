# tests/test_schemas.py
from __future__ import annotations

from fractions import Fraction

import pytest

from cristalq.errors import InvalidFile, InvalidGraph, UnknownEdge
from cristalq.schemas import load_graph_file, parse_graph, parse_point
from cristalq.services.exact_arith import QuadElem


def test_parse_graph_reads_aliases_and_group():
    graph, generators = parse_graph(
        {
            "vertices": ["x", "y"],
            "edges": [{"id": "e1", "from": "x", "to": "y"}, {"id": "e2", "from": "y", "to": "x"}],
            "vanishing_group": [{"e1": 1, "e2": 1}],
        }
    )
    assert graph.edge("e2").origin == "y"
    assert generators[0].as_dict() == {"e1": 1, "e2": 1}


def test_missing_group_is_none():
    _, generators = parse_graph({"vertices": ["v"], "edges": [{"id": "e1", "from": "v", "to": "v"}]})
    assert generators is None


@pytest.mark.parametrize(
    "payload",
    [
        {"vertices": ["v"]},
        {"vertices": ["v"], "edges": [{"id": "e1", "from": "v"}]},
        {"vertices": ["v"], "edges": [], "extra": 1},
        {"vertices": ["v"], "edges": [], "vanishing_group": [{"e1": 1.5}]},
        {"vertices": ["v"], "edges": [], "vanishing_group": [{"e1": True}]},
        [],
    ],
)
def test_parse_graph_rejects(payload):
    with pytest.raises(InvalidFile):
        parse_graph(payload)


def test_parse_graph_structural_errors():
    with pytest.raises(UnknownEdge):
        parse_graph(
            {
                "vertices": ["v"],
                "edges": [{"id": "e1", "from": "v", "to": "v"}],
                "vanishing_group": [{"e2": 1}],
            }
        )
    with pytest.raises(InvalidGraph):
        parse_graph({"vertices": ["v"], "edges": [{"id": "e1", "from": "v", "to": "w"}]})


def test_parse_point_canonicalises_radicand():
    point = parse_point({"D": 12, "coords": [{"a": "1/2", "b": "1/2"}, {"a": -1}]})
    assert point.coords == (QuadElem(Fraction(1, 2), 1, 3), QuadElem.rational(-1))


@pytest.mark.parametrize(
    "payload",
    [
        {"D": 0, "coords": [{"a": 1}]},
        {"D": 3, "coords": []},
        {"D": 3, "coords": [{"a": "0.5"}]},
        {"D": 3, "coords": [{"a": 0, "b": 0}]},
        {"D": "3", "coords": [{"a": 1}]},
    ],
)
def test_parse_point_rejects(payload):
    with pytest.raises(InvalidFile):
        parse_point(payload)


def test_load_graph_file_errors(tmp_path):
    with pytest.raises(InvalidFile):
        load_graph_file(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("[1, 2", encoding="utf-8")
    with pytest.raises(InvalidFile):
        load_graph_file(broken)
