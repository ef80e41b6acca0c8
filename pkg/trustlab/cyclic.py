'''
cyclic.py
Matrix powers on generic (cyclic) trust graphs: each pair keeps the set of edges
already used for its evaluation (edge memory R) and a pair only takes a new
value when its accumulated paths bring an edge it has not seen yet.
Also the bounded (early-stopped / thresholded) evaluation.
'''

import math
import time

import numpy as np

from .options import EvalOptions
from .report import EvalReport
from .trustmat import (TrustMatrix, matrix_from_graph, right_operand, fold_block,
                       row_blocks, map_blocks)
from .utils.logs import logmsg


def _words(n_edges):
    return (n_edges + 63) // 64


class EdgeMemory(object):
    ''' R_ij edge-id sets stored as bitsets, shape (n, n, ceil(phi/64)) uint64
    bit b of word w stands for edge id 64*w + b
    '''

    def __init__(self, bits, n_edges):
        self.bits = bits
        self.n_edges = n_edges

    @classmethod
    def empty(cls, n, n_edges):
        return cls(np.zeros((n, n, _words(n_edges)), dtype=np.uint64), n_edges)

    @classmethod
    def initial(cls, g):
        ''' R^1: the direct edge i->j for every edge, empty elsewhere
        '''
        mem = cls.empty(g.n, g.n_edges)
        eids = np.arange(g.n_edges, dtype=np.int64)
        mem.bits[g.src, g.dst, eids >> 6] |= np.left_shift(np.uint64(1), (eids & 63).astype(np.uint64))
        return mem

    @staticmethod
    def nbytes_for(n, n_edges):
        return n * n * _words(n_edges) * 8

    @property
    def n(self):
        return self.bits.shape[0]

    def edges(self, i, j):
        ''' sorted edge ids in R_ij
        '''
        raw = np.unpackbits(self.bits[i, j].astype('<u8').view(np.uint8), bitorder='little')
        return [int(e) for e in np.flatnonzero(raw[:self.n_edges])]

    def count(self, i, j):
        return len(self.edges(i, j))

    def issubset(self, other):
        ''' every R_ij of self is contained in the matching set of other
        '''
        return not np.any(self.bits & ~other.bits)

    def copy(self):
        return EdgeMemory(self.bits.copy(), self.n_edges)

    def __eq__(self, other):
        if not isinstance(other, EdgeMemory):
            return NotImplemented
        return self.n_edges == other.n_edges and np.array_equal(self.bits, other.bits)

    __hash__ = None


class CyclicState(object):
    ''' loop variables of the cyclic engine: C^l, R^l, the previous C^(l-1), R^(l-1) and l
    '''

    def __init__(self, right, current, memory, iteration=1, previous=None, previous_memory=None,
                 frozen=None, delta=0.0, changed=0):
        self.right = right
        self.current = current
        self.memory = memory
        self.iteration = iteration
        self.previous = previous
        self.previous_memory = previous_memory
        self.frozen = frozen if frozen is not None else np.zeros((current.n, current.n), dtype=bool)
        self.delta = delta
        self.changed = changed

    @property
    def n(self):
        return self.current.n


def initial_state(g, opts=None):
    ''' C^1 = C and R^1 = direct edges
    Raises MemoryError when the edge-memory planes would not fit in opts.memory_limit.
    '''
    if opts is None:
        opts = EvalOptions(threads=1)
    need = 3 * EdgeMemory.nbytes_for(g.n, g.n_edges)
    if need > opts.memory_limit:
        raise MemoryError('edge memory for n=%d, %d edges needs about %d MiB (limit %d MiB)'
                          % (g.n, g.n_edges, need // 2 ** 20, opts.memory_limit // 2 ** 20))
    C = matrix_from_graph(g, sparse=True)
    return CyclicState(right_operand(C, 'sparse'), C.to_dense(), EdgeMemory.initial(g))


def _step_block(lo, hi, P_td, P_dtd, right, td_only, R_prev, frozen):
    acc_td, acc_dtd, R_new = fold_block(lo, hi, P_td, P_dtd, right, td_only, R_prev)
    # no new edge discovered (R_new subset of R_prev): keep previous value and memory
    grew = np.any(R_new & ~R_prev, axis=2)
    accept = grew & ~frozen
    td = np.where(accept, acc_td, P_td)
    dtd = np.where(accept, acc_dtd, P_dtd)
    bits = np.where(accept[:, :, None], R_new, R_prev)
    return td, dtd, bits, accept


def step(state, opts=None, threshold=1.0):
    ''' one iteration C^(l+1), R^(l+1) from C^l, R^l
    PARAMETERS
        state:      (CyclicState) current state
        opts:       (EvalOptions) threads and zero_distrust are used
        threshold:  (float) pairs whose td exceeds it are frozen before the step
    RETURNS
        state:      (CyclicState) next state; pairs computed from the frozen previous state
    '''
    if opts is None:
        opts = EvalOptions(threads=1)
    n = state.n
    P = state.current
    R = state.memory.bits
    frozen = state.frozen | (P.td > threshold)
    np.fill_diagonal(frozen, False)
    td_only = bool(opts.zero_distrust)
    args = [(lo, hi, P.td[lo:hi], P.dtd[lo:hi], state.right, td_only, R[lo:hi], frozen[lo:hi])
            for lo, hi in row_blocks(n, opts.threads)]
    parts = map_blocks(_step_block, args, opts.threads)
    if len(parts) == 0:
        return CyclicState(state.right, P, state.memory, state.iteration + 1, P, state.memory, frozen)
    N = TrustMatrix(np.vstack([p[0] for p in parts]), np.vstack([p[1] for p in parts]))
    memory = EdgeMemory(np.concatenate([p[2] for p in parts]), state.memory.n_edges)
    changed = int(sum(np.count_nonzero(p[3]) for p in parts))
    return CyclicState(state.right, N, memory, state.iteration + 1, P, state.memory,
                       frozen, N.max_delta(P), changed)


def _run(g, opts, max_len, threshold):
    if opts is None:
        opts = EvalOptions()
    opts.validate()
    if opts.zero_distrust and not g.has_zero_distrust():
        raise ValueError('zero_distrust requested but some edge has dtd > 0')
    state = initial_state(g, opts)
    if opts.max_iters is not None:
        max_iters = opts.max_iters
    else:
        max_iters = max((g.n - 1) * g.n_edges + 1, 1)
    deltas, times, changed = [], [], []
    while True:
        t0 = time.perf_counter()
        state = step(state, opts, threshold)
        times.append(time.perf_counter() - t0)
        deltas.append(state.delta)
        changed.append(state.changed)
        if opts.verbose or opts.trace:
            logmsg('general: C^%d max-delta %.3e, %d pairs changed (%.2fs)'
                   % (state.iteration, state.delta, state.changed, times[-1]))
        if state.changed == 0:
            termination = 'fixpoint'
            break
        if opts.epsilon > 0 and state.delta <= opts.epsilon:
            termination = 'epsilon'
            break
        if max_len is not None and len(deltas) >= max_len:
            termination = 'bounded'
            break
        if len(deltas) >= max_iters:
            termination = 'max_iters'
            break
    return state, EvalReport(matrix=state.current, nodes=list(g.nodes), engine='general',
                             iterations=len(deltas), termination=termination,
                             deltas=deltas, times=times, changed=changed, memory=state.memory)


def evaluate_general(g, opts=None):
    ''' evaluate the trust between all pairs of any directed graph (acyclic allowed)
    PARAMETERS
        g:      (TrustGraph) graph
        opts:   (EvalOptions) epsilon, max_iters (default (n-1)*phi+1), threads, zero_distrust
    RETURNS
        report: (EvalReport) engine 'general', with the final edge memory
    The run ends at the fixpoint (no pair took a new edge) or, with epsilon > 0, as soon
    as the largest value change is <= epsilon; that stop looks at the values only, the
    edge memory may still be growing.
    '''
    return _run(g, opts, None, 1.0)[1]


def evaluate_bounded(g, max_len, threshold, opts=None):
    ''' early-stopped evaluation: at most max_len iterations, and pairs whose trust
    degree already exceeds threshold are frozen
    PARAMETERS
        g:          (TrustGraph) graph
        max_len:    (int, None or inf) iteration bound
        threshold:  (float) in [0,1]; 1.0 disables freezing
        opts:       (EvalOptions)
    RETURNS
        report:     (EvalReport) approximate unless the fixpoint was reached without freezing
    '''
    if max_len is not None and math.isinf(max_len):
        max_len = None
    if max_len is not None:
        if max_len < 1:
            raise ValueError('evaluate_bounded: max_len must be >= 1, got %r' % (max_len,))
        max_len = int(max_len)
    if not (0.0 <= threshold <= 1.0):
        raise ValueError('evaluate_bounded: threshold must be in [0,1], got %r' % (threshold,))
    state, report = _run(g, opts, max_len, threshold)
    report.frozen = state.frozen.copy()
    report.approximate = report.termination != 'fixpoint' or bool(state.frozen.any())
    return report
