'''
dagpowers.py
Matrix powers of the trust matrix on acyclic graphs: C^d holds the trust
aggregated over all paths of length <= d and C^l (l = longest path) is a fixed point
'''

import time
from dataclasses import replace

import numpy as np

from .graph import is_acyclic
from .options import EvalOptions
from .report import EvalReport
from .trustmat import matrix_from_graph, product
from .utils.logs import logmsg


class CyclicGraphError(ValueError):
    pass


class PowerState(object):
    ''' C^d together with the exponent d and the change against C^(d-1)
    '''

    def __init__(self, current, exponent=1, delta=0.0, changed=0):
        if exponent < 1:
            raise ValueError('PowerState: exponent must be >= 1')
        self.current = current
        self.exponent = exponent
        self.delta = delta
        self.changed = changed


def next_power(state, C, opts=None):
    ''' C^(d+1) = C^d * C
    '''
    N = product(state.current, C, opts)
    P = state.current
    changed = int(np.count_nonzero((N.td != P.td) | (N.dtd != P.dtd)))
    return PowerState(N, state.exponent + 1, N.max_delta(P), changed)


def matrix_power(C, d, opts=None):
    ''' C^d (d >= 1) under the trust-matrix product
    '''
    if d < 1:
        raise ValueError('matrix_power: d must be >= 1, got %r' % (d,))
    state = PowerState(C.to_dense(), 1)
    while state.exponent < d:
        state = next_power(state, C, opts)
    return state.current


def evaluate_dag(g, opts=None):
    ''' evaluate the trust between all pairs of an acyclic graph by matrix powers
    PARAMETERS
        g:      (TrustGraph) acyclic graph
        opts:   (EvalOptions) epsilon, max_iters (default n), backend, threads, zero_distrust
    RETURNS
        report: (EvalReport) engine 'dag'; the fixpoint is reached at d = longest path length
    '''
    if opts is None:
        opts = EvalOptions()
    opts.validate()
    acyclic, _ = is_acyclic(g)
    if not acyclic:
        raise CyclicGraphError('evaluate_dag: the graph has a directed cycle, '
                               'use the cyclic engine (evaluate_general / --engine general)')
    if opts.zero_distrust and not g.has_zero_distrust():
        raise ValueError('evaluate_dag: zero_distrust requested but some edge has dtd > 0')
    backend = opts.pick_backend(g.n, g.n_edges)
    run_opts = replace(opts, backend=backend)
    C = matrix_from_graph(g, sparse=(backend == 'sparse'))
    max_iters = opts.max_iters if opts.max_iters is not None else max(g.n, 1)

    state = PowerState(C.to_dense(), 1)
    deltas, times, changed = [], [], []
    while True:
        t0 = time.perf_counter()
        state = next_power(state, C, run_opts)
        times.append(time.perf_counter() - t0)
        deltas.append(state.delta)
        changed.append(state.changed)
        if opts.verbose or opts.trace:
            logmsg('dag: C^%d max-delta %.3e, %d pairs changed (%.2fs, %s)'
                   % (state.exponent, state.delta, state.changed, times[-1], backend))
        if state.delta == 0.0:
            termination = 'fixpoint'
            break
        if opts.epsilon > 0 and state.delta <= opts.epsilon:
            termination = 'epsilon'
            break
        if len(deltas) >= max_iters:
            termination = 'max_iters'
            break
    return EvalReport(matrix=state.current, nodes=list(g.nodes), engine='dag',
                      iterations=len(deltas), termination=termination,
                      deltas=deltas, times=times, changed=changed)
