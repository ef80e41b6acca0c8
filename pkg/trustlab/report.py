'''
report.py
Evaluation reports: converged matrix, iteration trace, termination reason,
result tables (CSV via pandas) and the versioned JSON form
'''

import json
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .algebra import TrustTriple
from .trustmat import TrustMatrix

SCHEMA = 'trustlab.report/1'
TERMINATIONS = ('fixpoint', 'epsilon', 'max_iters', 'bounded')
RESULT_COLUMNS = ['src', 'dst', 'td', 'dtd']


@dataclass
class EvalReport:
    ''' outcome of one evaluation
    PARAMETERS
        matrix:     (TrustMatrix) evaluated trust between all pairs
        nodes:      (list of str) node ids, index = matrix row/column
        engine:     (str) 'dag' or 'general'
        iterations: (int) number of products computed
        termination:(str) one of TERMINATIONS
        deltas:     (list of float) max componentwise change per iteration
        times:      (list of float) wall clock seconds per iteration
        changed:    (list of int) pairs changed per iteration
        approximate:(bool) bounded evaluation that may differ from the fixpoint
        frozen:     (bool array or None) pairs frozen by the trust threshold
        memory:     (EdgeMemory or None) final edge memory of the cyclic engine
    '''
    matrix: TrustMatrix
    nodes: list
    engine: str
    iterations: int
    termination: str
    deltas: list = field(default_factory=list)
    times: list = field(default_factory=list)
    changed: list = field(default_factory=list)
    approximate: bool = False
    frozen: np.ndarray = None
    memory: object = None

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise ValueError('unknown termination %r' % (self.termination,))

    def trust(self, a, b):
        ''' evaluated trust between node ids a and b
        '''
        index = {v: i for i, v in enumerate(self.nodes)}
        return self.matrix[index[a], index[b]]

    def pairs(self):
        ''' (i, j, TrustTriple) for every ordered pair i != j with trust other than <0,0,1>
        '''
        td, dtd = self.matrix.td, self.matrix.dtd
        mask = (td != 0) | (dtd != 0)
        np.fill_diagonal(mask, False)
        for i, j in zip(*np.nonzero(mask)):
            yield int(i), int(j), TrustTriple(td[i, j], dtd[i, j])

    def to_frame(self):
        ''' pandas table of the non-<0,0,1> pairs with columns src, dst, td, dtd
        '''
        td, dtd = self.matrix.td, self.matrix.dtd
        mask = (td != 0) | (dtd != 0)
        np.fill_diagonal(mask, False)
        rows, cols = np.nonzero(mask)
        names = np.array(self.nodes, dtype=object)
        return pd.DataFrame({'src': names[rows], 'dst': names[cols],
                             'td': td[rows, cols], 'dtd': dtd[rows, cols]},
                            columns=RESULT_COLUMNS)

    def to_csv(self):
        return self.to_frame().to_csv(index=False, float_format='%.17g',
                                      lineterminator='\n').encode('utf-8')

    def trace_frame(self):
        k = self.iterations
        return pd.DataFrame({'iteration': np.arange(1, k + 1),
                             'max_delta': (list(self.deltas) + [np.nan] * k)[:k],
                             'changed': (list(self.changed) + [np.nan] * k)[:k],
                             'seconds': (list(self.times) + [np.nan] * k)[:k]})

    def to_json(self, include_times=False):
        doc = {'schema': SCHEMA,
               'engine': self.engine,
               'iterations': self.iterations,
               'termination': self.termination,
               'approximate': self.approximate,
               'deltas': [float(x) for x in self.deltas],
               'changed': [int(x) for x in self.changed],
               'nodes': list(self.nodes),
               'pairs': [{'src': self.nodes[i], 'dst': self.nodes[j], 'td': t.td, 'dtd': t.dtd}
                         for i, j, t in self.pairs()]}
        if self.frozen is not None:
            rows, cols = np.nonzero(self.frozen)
            doc['frozen'] = [[self.nodes[i], self.nodes[j]] for i, j in zip(rows, cols)]
        if include_times:
            doc['times'] = [float(x) for x in self.times]
        return json.dumps(doc, indent=1) + '\n'

    def plot_trace(self, path):
        ''' save the per-iteration max-delta trace as an image
        '''
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        fig = plt.figure(figsize=(6, 4))
        x = np.arange(1, len(self.deltas) + 1)
        plt.semilogy(x, np.maximum(np.asarray(self.deltas, dtype=float), 1e-300), 'o-')
        plt.xlabel('iteration')
        plt.ylabel('max componentwise change')
        plt.title('%s engine, %s after %d iterations' % (self.engine, self.termination, self.iterations))
        fig.savefig(path)
        plt.close(fig)
        return path


def report_from_json(text):
    ''' parse the JSON written by EvalReport.to_json (schema trustlab.report/1)
    '''
    doc = json.loads(text)
    if doc.get('schema') != SCHEMA:
        raise ValueError('unsupported report schema %r' % (doc.get('schema'),))
    nodes = list(doc['nodes'])
    index = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    td = np.zeros((n, n))
    dtd = np.zeros((n, n))
    for p in doc['pairs']:
        i, j = index[p['src']], index[p['dst']]
        td[i, j] = p['td']
        dtd[i, j] = p['dtd']
    frozen = None
    if 'frozen' in doc:
        frozen = np.zeros((n, n), dtype=bool)
        for a, b in doc['frozen']:
            frozen[index[a], index[b]] = True
    return EvalReport(matrix=TrustMatrix(td, dtd), nodes=nodes, engine=doc['engine'],
                      iterations=doc['iterations'], termination=doc['termination'],
                      deltas=doc['deltas'], times=doc.get('times', []),
                      changed=doc.get('changed', []), approximate=doc['approximate'],
                      frozen=frozen)


def engine_divergence(a, b, tol=0.0):
    ''' pairs where two evaluations of the same graph differ by more than tol
    RETURNS
        diffs:  (list of (i, j, TrustTriple, TrustTriple)) in row-major order
    '''
    if a.matrix.n != b.matrix.n:
        raise ValueError('engine_divergence: reports of different sizes')
    d = np.maximum(np.abs(a.matrix.td - b.matrix.td), np.abs(a.matrix.dtd - b.matrix.dtd))
    return [(int(i), int(j), a.matrix[i, j], b.matrix[i, j]) for i, j in zip(*np.nonzero(d > tol))]
