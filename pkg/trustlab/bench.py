'''
bench.py
Benchmark suites: DAG matrix powers on the large sparse fixture, the cyclic
engine on a dense general graph and the error of bounded evaluation against
the full fixpoint over many seeds
'''

import json
import time
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .cyclic import evaluate_general, initial_state, step
from .dagpowers import evaluate_dag
from .graph import GraphKind, random_graph
from .options import EvalOptions
from .utils.logs import logmsg, progressbar

# default fixture per suite
SUITES = {
    'dag': {'n': 1000, 'edges': 250000, 'epsilon': 1e-12},
    'general': {'n': 200, 'edges': 10000, 'epsilon': 0.0},
    # a quarter of all ordered pairs, the density of the large DAG fixture
    'bounded': {'n': 200, 'edges': 10000, 'epsilon': 0.0, 'seeds': 50},
}
BOUNDED_MARKS = (6, 7)


@dataclass
class BenchResult:
    ''' one suite run
    PARAMETERS
        suite:      (str) suite name
        seed:       (int) base seed
        n, edges:   (int) fixture size
        table:      (pandas.DataFrame) per-iteration (dag, general) or per-seed (bounded) rows
        summary:    (dict) scalar results
        report:     (EvalReport or None) evaluation report of single-run suites
    '''
    suite: str
    seed: int
    n: int
    edges: int
    table: pd.DataFrame
    summary: dict = field(default_factory=dict)
    report: object = None

    def to_dict(self):
        return {'suite': self.suite, 'seed': self.seed, 'n': self.n, 'edges': self.edges,
                'summary': self.summary,
                'rows': json.loads(self.table.to_json(orient='records', double_precision=15))}


def _timed_run(suite, evaluate, g, opts, seed):
    t0 = time.perf_counter()
    report = evaluate(g, opts)
    total = time.perf_counter() - t0
    table = report.trace_frame()
    table['iteration'] = table['iteration'] + 1
    table = table.rename(columns={'iteration': 'power'})
    summary = {'iterations': report.iterations, 'termination': report.termination,
               'first_seconds': float(report.times[0]) if report.times else 0.0,
               'total_seconds': total}
    return BenchResult(suite, seed, g.n, g.n_edges, table, summary, report)


def bench_dag(seed, n=None, edges=None, epsilon=None, threads=1, verbose=False):
    ''' evaluate_dag on a random DAG (default 1000 vertices, 250K edges)
    '''
    cfg = SUITES['dag']
    n = cfg['n'] if n is None else n
    edges = cfg['edges'] if edges is None else edges
    epsilon = cfg['epsilon'] if epsilon is None else epsilon
    logmsg('bench dag: generating n=%d, %d edges, seed %d' % (n, edges, seed))
    g = random_graph(n, edges, GraphKind.CONFIRMED_ACYCLIC, seed=seed)
    opts = EvalOptions(epsilon=epsilon, threads=threads, verbose=verbose)
    return _timed_run('dag', evaluate_dag, g, opts, seed)


def bench_general(seed, n=None, edges=None, epsilon=None, threads=1, verbose=False):
    ''' evaluate_general on a random general graph (default 200 vertices, 10K edges)
    '''
    cfg = SUITES['general']
    n = cfg['n'] if n is None else n
    edges = cfg['edges'] if edges is None else edges
    epsilon = cfg['epsilon'] if epsilon is None else epsilon
    logmsg('bench general: generating n=%d, %d edges, seed %d' % (n, edges, seed))
    g = random_graph(n, edges, GraphKind.GENERAL, seed=seed)
    opts = EvalOptions(epsilon=epsilon, threads=threads, verbose=verbose)
    return _timed_run('general', evaluate_general, g, opts, seed)


def bounded_errors(g, opts=None, marks=BOUNDED_MARKS):
    ''' max componentwise error of the result after `marks` steps against the fixpoint
    RETURNS
        (errors, steps):    ({mark: float}, int) steps taken to the fixpoint
    '''
    if opts is None:
        opts = EvalOptions(threads=1)
    opts = replace(opts, epsilon=0.0).validate()
    state = initial_state(g, opts)
    snaps = {}
    steps = 0
    cap = max((g.n - 1) * g.n_edges + 1, 1)
    while True:
        state = step(state, opts)
        steps += 1
        if steps in marks:
            snaps[steps] = state.current
        if state.changed == 0 or steps >= cap:
            break
    final = state.current
    errors = {m: (snaps[m].max_delta(final) if m in snaps else 0.0) for m in marks}
    return errors, steps


def bench_bounded(seed, n=None, edges=None, seeds=None, threads=1, verbose=False):
    ''' bounded-vs-full error over `seeds` random general graphs (seeds seed, seed+1, ...)
    '''
    cfg = SUITES['bounded']
    n = cfg['n'] if n is None else n
    edges = cfg['edges'] if edges is None else edges
    seeds = cfg['seeds'] if seeds is None else seeds
    opts = EvalOptions(threads=threads)
    rows = []
    logmsg('bench bounded: %d graphs n=%d, %d edges, seeds %d..%d' % (seeds, n, edges, seed, seed + seeds - 1))
    for s in range(seeds):
        g = random_graph(n, edges, GraphKind.GENERAL, seed=seed + s)
        errors, steps = bounded_errors(g, opts)
        row = {'seed': seed + s, 'steps': steps}
        row.update({'error_%d' % m: errors[m] for m in BOUNDED_MARKS})
        rows.append(row)
        if not verbose:
            progressbar(s + 1, seeds, 'seed %d' % (seed + s))
        else:
            logmsg('seed %d: %d steps, errors %s' % (seed + s, steps, errors))
    table = pd.DataFrame(rows, columns=['seed', 'steps'] + ['error_%d' % m for m in BOUNDED_MARKS])
    hi, lo = max(BOUNDED_MARKS), min(BOUNDED_MARKS)
    summary = {'seeds': seeds,
               'share_error_%d_le_1e-6' % hi: float(np.mean(table['error_%d' % hi] <= 1e-6)) if seeds else 0.0,
               'mean_error_%d' % lo: float(table['error_%d' % lo].mean()) if seeds else 0.0,
               'mean_steps': float(table['steps'].mean()) if seeds else 0.0}
    return BenchResult('bounded', seed, n, edges, table, summary)


def run_suite(suite, seed, n=None, edges=None, seeds=None, epsilon=None, threads=1, verbose=False):
    ''' run one suite ('dag', 'general', 'bounded') or 'all'
    RETURNS
        results:    (list of BenchResult)
    '''
    if suite == 'all':
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValueError('unknown bench suite %r (choose from %s, all)' % (suite, ', '.join(SUITES)))
    results = []
    for name in names:
        if name == 'dag':
            results.append(bench_dag(seed, n, edges, epsilon, threads, verbose))
        elif name == 'general':
            results.append(bench_general(seed, n, edges, epsilon, threads, verbose))
        else:
            results.append(bench_bounded(seed, n, edges, seeds, threads, verbose))
    return results


def format_results(results):
    ''' text tables of the suite results
    '''
    out = []
    for r in results:
        out.append('== %s (n=%d, %d edges, seed %d) ==' % (r.suite, r.n, r.edges, r.seed))
        out.append(r.table.to_string(index=False))
        for k, v in r.summary.items():
            out.append('%s: %s' % (k, v))
        out.append('')
    return '\n'.join(out)


def plot_results(results, path):
    ''' per-iteration seconds of the single-run suites
    '''
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    fig = plt.figure(figsize=(6, 4))
    for r in results:
        if r.report is None:
            continue
        plt.plot(r.table['power'], r.table['seconds'], 'o-', label='%s n=%d' % (r.suite, r.n))
    plt.xlabel('matrix power')
    plt.ylabel('seconds')
    plt.legend()
    fig.savefig(path)
    plt.close(fig)
    return path
