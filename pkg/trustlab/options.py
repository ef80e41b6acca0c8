'''
options.py
Evaluation options shared by the DAG and the cyclic engines
'''

import math
import os
from dataclasses import dataclass, field, asdict

BACKENDS = ('auto', 'dense', 'sparse')
# dense backend is chosen by 'auto' above this fill ratio phi / n^2
DENSE_FILL = 0.25


def default_threads():
    ''' worker count from env TRUSTLAB_THREADS (default 1)
    '''
    value = os.environ.get('TRUSTLAB_THREADS', '').strip()
    if len(value) == 0:
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ValueError('TRUSTLAB_THREADS must be an integer, got %r' % value)
    if threads < 1:
        raise ValueError('TRUSTLAB_THREADS must be >= 1, got %d' % threads)
    return threads


@dataclass
class EvalOptions:
    ''' options of evaluate_dag / evaluate_general / evaluate_bounded
    PARAMETERS
        epsilon:        (float) stop when max componentwise change <= epsilon (0: exact fixpoint)
        max_iters:      (int or None) iteration cap; None means n (dag) or (n-1)*phi+1 (general)
        backend:        (str) 'dense', 'sparse' or 'auto' (dense when phi/n^2 > 0.25)
        threads:        (int) row-block workers; results do not depend on it
        threshold:      (float) bounded evaluation freezes pairs whose td exceeds it
        max_len:        (int or None) bounded evaluation iteration bound
        trace:          (bool) keep per-iteration changed-pair counts
        verbose:        (bool) log one line per iteration
        zero_distrust:  (bool) td-only kernel, graph must have dtd = 0 everywhere
        memory_limit:   (int) bytes allowed for the edge-memory planes of the cyclic engine
    '''
    epsilon: float = 0.0
    max_iters: int = None
    backend: str = 'auto'
    threads: int = field(default_factory=default_threads)
    threshold: float = 1.0
    max_len: int = None
    trace: bool = False
    verbose: bool = False
    zero_distrust: bool = False
    memory_limit: int = 4 * 1024 ** 3

    def validate(self):
        if math.isnan(self.epsilon) or self.epsilon < 0:
            raise ValueError('epsilon must be >= 0, got %r' % (self.epsilon,))
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError('max_iters must be >= 1, got %r' % (self.max_iters,))
        if self.backend not in BACKENDS:
            raise ValueError('backend must be one of %s, got %r' % (', '.join(BACKENDS), self.backend))
        if self.threads < 1:
            raise ValueError('threads must be >= 1, got %r' % (self.threads,))
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError('threshold must be in [0,1], got %r' % (self.threshold,))
        if self.max_len is not None and self.max_len < 1:
            raise ValueError('max_len must be >= 1, got %r' % (self.max_len,))
        return self

    def pick_backend(self, n, n_edges):
        if self.backend != 'auto':
            return self.backend
        if n > 0 and n_edges / float(n * n) > DENSE_FILL:
            return 'dense'
        return 'sparse'

    def as_dict(self):
        return asdict(self)
