import io

import numpy as np
import pytest

from trustlab.algebra import TrustTriple
from trustlab.graph import (GraphFormatError, GraphKind, TrustGraph, classify, export, is_acyclic,
                            load_edge_list, load_graph, load_json, random_graph, save_graph)


def test_load_edge_list():
    g = load_edge_list(b'A,B,0.9,0.05\nB,C,0.8,0.1')
    assert g.nodes == ['A', 'B', 'C']
    assert g.n == 3 and g.n_edges == 2
    assert g.weight(0, 1) == TrustTriple(0.9, 0.05)
    assert g.edge_id(1, 2) == 1 and g.edge_id(0, 2) == -1


def test_load_header_comments_and_file_object():
    text = 'src,dst,td,dtd\n# a comment\n\nA,B,0.5,0.25,0.25\r\nB,A,0.1,0.0\n'
    g = load_edge_list(io.BytesIO(text.encode('utf-8')))
    assert g.n_edges == 2
    assert g.weight(1, 0) == TrustTriple(0.1, 0.0)


@pytest.mark.parametrize('text, lineno, needle', [
    ('A,A,0.5,0.1', 1, 'self-loop'),
    ('A,B,0.5,0.1\nB,C,0.7,0.6', 2, 'bad weight'),
    ('A,B,0.5,0.1\nB,C,0.2,0.1\nA,B,0.1,0.1', 3, 'duplicate edge A -> B'),
    ('A,B,0.5', 1, 'fields'),
    ('A,B,x,0.1', 1, 'bad weight'),
])
def test_load_errors(text, lineno, needle):
    with pytest.raises(GraphFormatError) as err:
        load_edge_list(text)
    assert err.value.lineno == lineno
    assert needle in str(err.value)
    assert str(err.value).startswith('line %d:' % lineno)


def test_no_relation_edge_is_skipped():
    g = load_edge_list('A,B,0.0,0.0\nB,C,0.5,0.5')
    assert g.n == 3 and g.n_edges == 1


def test_graph_invariants():
    with pytest.raises(GraphFormatError):
        TrustGraph(['a', 'b'], [0, 0], [1, 1], [0.5, 0.5], [0.1, 0.1])
    with pytest.raises(GraphFormatError):
        TrustGraph(['a', 'b'], [0], [0], [0.5], [0.1])
    with pytest.raises(GraphFormatError):
        TrustGraph(['a', 'b'], [0], [1], [0.0], [0.0])
    g = TrustGraph(['a', 'b'], [0], [1], [0.5], [0.1])
    with pytest.raises(ValueError):
        g.td[0] = 0.9


def test_load_quoted_fields_and_late_directive():
    g = load_edge_list('"A",B,0.5,0.1\n# nodes: Z\nB,C, 0.25 ,0.5\n')
    assert g.nodes == ['Z', 'A', 'B', 'C']
    assert g.weight(2, 3) == TrustTriple(0.25, 0.5)


def test_load_error_lines_count_comments_and_blanks():
    text = '# nodes: A,B\n\nsrc,dst,td,dtd\n# note\nA,B,0.5,0.1\n\nB,A,0.5\n'
    with pytest.raises(GraphFormatError) as err:
        load_edge_list(text)
    assert err.value.lineno == 7


@pytest.mark.parametrize('bad', ['a,b', '#a', ' a', '', 'a"b'])
def test_node_ids_must_fit_an_edge_list(bad):
    with pytest.raises(GraphFormatError):
        TrustGraph(['x', bad], [0], [1], [0.5], [0.1])


def test_edge_weights_normalized_like_triples():
    g = TrustGraph(['a', 'b', 'c'], [0, 1], [1, 2], [0.6, -5e-13], [0.4 + 5e-10, 0.5])
    for e, (s, d) in enumerate([(0, 1), (1, 2)]):
        w = g.weight(s, d)
        assert (g.td[e], g.dtd[e]) == (w.td, w.dtd)
    assert g.weight(0, 1) == TrustTriple(0.6, 0.4 + 5e-10)
    assert g.td[0] + g.dtd[0] <= 1.0
    assert g.td[1] == 0.0
    with pytest.raises(GraphFormatError):
        TrustGraph(['a', 'b'], [0], [1], [float('nan')], [0.1])


def test_is_acyclic():
    chain = load_edge_list('A,B,0.5,0.1')
    assert is_acyclic(chain) == (True, [0, 1])
    triangle = load_edge_list('A,B,0.5,0.1\nB,C,0.5,0.1\nC,A,0.5,0.1')
    assert is_acyclic(triangle) == (False, None)
    assert classify(triangle) is GraphKind.GENERAL


def test_cycle_demo_graph(cycle_graph, w):
    g = cycle_graph
    assert g.nodes == ['1', '2', '3', '4']
    assert [(s, d) for _, s, d, _ in g.edges()] == [(0, 1), (1, 2), (2, 3), (3, 1)]
    assert [t for _, _, _, t in g.edges()] == [w['a'], w['b'], w['c'], w['d']]
    assert not is_acyclic(g)[0]
    assert list(g.predecessors(1)) == [0, 3]
    assert list(g.successors(1)) == [2]


def test_adjacency_holds_edge_ids(cycle_graph):
    adj = cycle_graph.adjacency()
    assert adj.shape == (4, 4)
    assert adj[3, 1] - 1 == 3
    assert adj[0, 1] - 1 == 0


def _roundtrip_graphs():
    isolated = TrustGraph(['x', 'lonely', 'y'], [0], [2], [0.1 + 0.2], [1.0 / 3.0])
    return [random_graph(8, 20, GraphKind.GENERAL, seed=3),
            random_graph(8, 12, GraphKind.CONFIRMED_ACYCLIC, seed=4),
            isolated]


@pytest.mark.parametrize('g', _roundtrip_graphs())
def test_roundtrip_csv_json(g):
    assert load_edge_list(export(g, 'csv')) == g
    assert load_json(export(g, 'json')) == g


def test_save_and_load_by_extension(tmp_path):
    g = random_graph(6, 10, GraphKind.GENERAL, seed=9)
    for name in ('g.csv', 'g.json'):
        path = str(tmp_path / name)
        save_graph(g, path)
        assert load_graph(path) == g
    dot = export(g, 'dot').decode('utf-8')
    assert dot.startswith('digraph trust {') and dot.count('->') == g.n_edges
    with pytest.raises(ValueError):
        export(g, 'xml')


def test_load_json_errors():
    with pytest.raises(GraphFormatError):
        load_json('{"nodes": []}')
    with pytest.raises(GraphFormatError):
        load_json('{"edges": [{"src": "a", "dst": "a", "td": 0.5, "dtd": 0.1}]}')
    with pytest.raises(GraphFormatError):
        load_json('not json')


def test_random_graph_deterministic():
    a = random_graph(30, 100, 'general', seed=11)
    b = random_graph(30, 100, 'general', seed=11)
    c = random_graph(30, 100, 'general', seed=12)
    assert a == b and a != c
    assert export(a) == export(b)
    assert np.array_equal(np.arange(a.n_edges), [a.edge_id(s, d) for _, s, d, _ in a.edges()])
    assert np.all(a.td + a.dtd <= 1.0)


def test_random_dag_is_acyclic():
    for seed in range(20):
        g = random_graph(15, 60, GraphKind.CONFIRMED_ACYCLIC, seed=seed)
        assert g.n_edges == 60
        assert is_acyclic(g)[0]
        assert classify(g) is GraphKind.CONFIRMED_ACYCLIC


def test_random_graph_force_cycle():
    g = random_graph(4, 4, GraphKind.GENERAL, seed=1, force_cycle=True)
    assert g.n_edges == 4
    assert not is_acyclic(g)[0]


def test_random_graph_edgeless_and_infeasible():
    g = random_graph(10, 0, GraphKind.GENERAL, seed=0)
    assert g.n == 10 and g.n_edges == 0
    with pytest.raises(ValueError):
        random_graph(4, 7, GraphKind.CONFIRMED_ACYCLIC, seed=0)
    with pytest.raises(ValueError):
        random_graph(4, 13, GraphKind.GENERAL, seed=0)
    with pytest.raises(ValueError):
        random_graph(4, 3, GraphKind.CONFIRMED_ACYCLIC, seed=0, force_cycle=True)
