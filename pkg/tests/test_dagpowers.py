import numpy as np
import pytest

from trustlab.algebra import NO_RELATION, TrustTriple, par, seq, seq_path
from trustlab.dagpowers import CyclicGraphError, PowerState, evaluate_dag, matrix_power, next_power
from trustlab.graph import GraphKind, TrustGraph, random_graph
from trustlab.options import EvalOptions
from trustlab.oracle import graph_longest_path, recursive_eval
from trustlab.trustmat import matrix_from_graph

TOL = 1e-12


def close(x, y, tol=TOL):
    return abs(x.td - y.td) <= tol and abs(x.dtd - y.dtd) <= tol


def sweep_graphs(count, seed0=0):
    ''' seeded random DAGs with 2..12 vertices
    '''
    rng = np.random.default_rng(seed0)
    for s in range(count):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(0, n * (n - 1) // 2 + 1))
        yield random_graph(n, m, GraphKind.CONFIRMED_ACYCLIC, seed=seed0 * 1000 + s)


def test_two_strategies(strategies_graph, w):
    a, b, c, d = w['a'], w['b'], w['c'], w['d']
    report = evaluate_dag(strategies_graph, EvalOptions(threads=1))
    assert close(report.trust('1', '4'), par([seq_path([a, b, c]), seq(a, d)]))
    assert report.termination == 'fixpoint'
    assert report.iterations == 3


def test_single_edge():
    t = TrustTriple(0.3, 0.6)
    g = TrustGraph.from_edges([('A', 'B', t)])
    report = evaluate_dag(g, EvalOptions(threads=1))
    assert report.iterations == 1 and report.termination == 'fixpoint'
    assert report.matrix == matrix_from_graph(g)
    assert report.deltas == [0.0]


def test_edgeless():
    g = random_graph(10, 0, GraphKind.CONFIRMED_ACYCLIC, seed=0)
    report = evaluate_dag(g, EvalOptions(threads=1))
    assert report.iterations == 1
    assert list(report.pairs()) == []


def test_cyclic_input_refused(cycle_graph):
    with pytest.raises(CyclicGraphError) as err:
        evaluate_dag(cycle_graph)
    assert 'evaluate_general' in str(err.value)


def test_early_stops():
    chain = TrustGraph.from_edges([(str(i), str(i + 1), 0.9, 0.05) for i in range(6)])
    capped = evaluate_dag(chain, EvalOptions(max_iters=2, threads=1))
    assert capped.termination == 'max_iters' and capped.iterations == 2
    loose = evaluate_dag(chain, EvalOptions(epsilon=1.0, threads=1))
    assert loose.termination == 'epsilon' and loose.iterations == 1
    exact = evaluate_dag(chain, EvalOptions(threads=1))
    assert exact.termination == 'fixpoint' and exact.iterations == 6
    assert len(exact.deltas) == len(exact.times) == len(exact.changed) == exact.iterations


def test_options_validated():
    g = random_graph(4, 3, GraphKind.CONFIRMED_ACYCLIC, seed=1)
    with pytest.raises(ValueError):
        evaluate_dag(g, EvalOptions(epsilon=-1.0, threads=1))
    with pytest.raises(ValueError):
        evaluate_dag(g, EvalOptions(backend='gpu', threads=1))
    with pytest.raises(ValueError):
        evaluate_dag(g, EvalOptions(zero_distrust=True, threads=1))


def test_verbose_logs_iterations(capsys):
    g = random_graph(6, 8, GraphKind.CONFIRMED_ACYCLIC, seed=2)
    evaluate_dag(g, EvalOptions(verbose=True, threads=1))
    assert 'dag: C^2 max-delta' in capsys.readouterr().out


def test_backends_and_threads_agree():
    g = random_graph(30, 200, GraphKind.CONFIRMED_ACYCLIC, seed=6)
    base = evaluate_dag(g, EvalOptions(backend='dense', threads=1))
    for opts in (EvalOptions(backend='sparse', threads=1), EvalOptions(threads=4)):
        other = evaluate_dag(g, opts)
        assert other.to_csv() == base.to_csv()
        assert other.iterations == base.iterations


def test_power_state():
    with pytest.raises(ValueError):
        PowerState(None, exponent=0)
    g = random_graph(8, 15, GraphKind.CONFIRMED_ACYCLIC, seed=3)
    C = matrix_from_graph(g)
    state = next_power(PowerState(C, 1), C)
    assert state.exponent == 2
    assert state.current == matrix_power(C, 2)
    with pytest.raises(ValueError):
        matrix_power(C, 0)


def test_oracle_equivalence_sweep():
    for g in sweep_graphs(200):
        report = evaluate_dag(g, EvalOptions(threads=1))
        ell = graph_longest_path(g)
        assert report.iterations <= max(ell, 1)
        for i in range(g.n):
            for j in range(g.n):
                if i != j:
                    assert close(report.matrix[i, j], recursive_eval(g, i, j))


def test_fixpoint_at_longest_path():
    for g in sweep_graphs(200, seed0=1):
        C = matrix_from_graph(g)
        ell = max(graph_longest_path(g), 1)
        assert matrix_power(C, ell + 1) == matrix_power(C, ell)
        assert matrix_power(C, ell + 3) == matrix_power(C, ell)


def _depth_capped(g):
    C = matrix_from_graph(g)
    for d in range(1, graph_longest_path(g) + 1):
        Cd = matrix_power(C, d)
        for i in range(g.n):
            for j in range(g.n):
                if i != j:
                    assert close(Cd[i, j], recursive_eval(g, i, j, depth_cap=d))


def test_power_covers_paths_up_to_d():
    for g in sweep_graphs(30, seed0=2):
        _depth_capped(g)


@pytest.mark.slow
def test_power_covers_paths_up_to_d_full_sweep():
    for g in sweep_graphs(200):
        _depth_capped(g)


def test_no_path_gives_no_relation():
    g = TrustGraph.from_edges([('A', 'B', 0.5, 0.5), ('C', 'B', 0.5, 0.5)])
    report = evaluate_dag(g, EvalOptions(threads=1))
    assert report.trust('A', 'C') == NO_RELATION
