'''
oracle.py
Brute-force reference evaluations for small graphs: right-to-left recursive
trust evaluation, longest paths and simple-path enumeration
'''

import numpy as np
from scipy.sparse.csgraph import breadth_first_order

from .algebra import FULL_TRUST, NO_RELATION, is_no_relation, par, seq
from .dagpowers import CyclicGraphError
from .graph import is_acyclic

# exhaustive searches refuse graphs with more nodes than this
MAX_SEARCH_NODES = 20


class SizeGuardError(ValueError):
    pass


def _node(g, v):
    ''' node index from an index or a node id
    '''
    if isinstance(v, str):
        if v not in g.index:
            raise ValueError('unknown node %r' % v)
        return g.index[v]
    v = int(v)
    if v < 0 or v >= g.n:
        raise ValueError('node index %d out of range' % v)
    return v


def _guard(g, what):
    if g.n > MAX_SEARCH_NODES:
        raise SizeGuardError('%s: exhaustive search limited to %d nodes, graph has %d'
                             % (what, MAX_SEARCH_NODES, g.n))


class PathSet(object):
    ''' simple directed paths (tuples of node indices) sharing the endpoints source, target
    '''

    def __init__(self, source, target, paths=()):
        self.source = source
        self.target = target
        self.paths = []
        for p in paths:
            self.add(p)

    def add(self, path):
        path = tuple(int(v) for v in path)
        if len(path) < 2 or path[0] != self.source or path[-1] != self.target:
            raise ValueError('PathSet: path %r does not join %d and %d' % (path, self.source, self.target))
        if len(set(path)) != len(path):
            raise ValueError('PathSet: path %r is not simple' % (path,))
        self.paths.append(path)

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def longest(self):
        return max((len(p) - 1 for p in self.paths), default=0)

    def __repr__(self):
        return 'PathSet(%d -> %d, %d paths)' % (self.source, self.target, len(self.paths))


def recursive_eval(g, a, b, depth_cap=None):
    ''' trust between a and b evaluated from the predecessors of b backwards
        trust(a,b) = par( seq(trust(a,p), C[p][b]) for p in Pred(b) \\ {a}  and  C[a][b] )
    predecessors in ascending index order, the direct edge standing at p = a
    PARAMETERS
        g:          (TrustGraph) acyclic graph
        a, b:       (int or str) node index or id
        depth_cap:  (int, optional) only paths of at most this many edges
    RETURNS
        trust:      (TrustTriple) NO_RELATION when no path
    '''
    if not is_acyclic(g)[0]:
        raise CyclicGraphError('recursive_eval: the graph has a directed cycle, use evaluate_general')
    if depth_cap is not None and depth_cap < 0:
        raise ValueError('recursive_eval: depth_cap must be >= 0')
    a, b = _node(g, a), _node(g, b)
    if a == b:
        return FULL_TRUST
    preds = [g.predecessors(j) for j in range(g.n)]
    memo = {}

    def trust(j, depth):
        # paths a -> j of at most `depth` edges (None: unbounded)
        key = (j, depth)
        if key in memo:
            return memo[key]
        terms = []
        if depth is None or depth >= 1:
            for p in preds[j]:
                p = int(p)
                w = g.weight(p, j)
                if p == a:
                    terms.append(w)
                    continue
                if depth is not None and depth < 2:
                    continue
                t = trust(p, None if depth is None else depth - 1)
                if is_no_relation(t):
                    continue
                t = seq(t, w)
                if not is_no_relation(t):
                    terms.append(t)
        result = par(terms) if len(terms) > 0 else NO_RELATION
        memo[key] = result
        return result

    return trust(b, depth_cap)


def _longest_dp(g, a, b, order):
    lam = np.full(g.n, -1, dtype=np.int64)
    lam[a] = 0
    for j in order:
        for p in g.predecessors(j):
            if lam[p] >= 0 and lam[p] + 1 > lam[j] and j != a:
                lam[j] = lam[p] + 1
    return int(max(lam[b], 0))


def _longest_search(g, a, b):
    best = 0
    succ = [g.successors(i) for i in range(g.n)]
    visited = np.zeros(g.n, dtype=bool)
    visited[a] = True
    stack = [(a, 0, iter(succ[a]))]
    while stack:
        v, depth, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            visited[v] = False
            stack.pop()
            continue
        nxt = int(nxt)
        if visited[nxt]:
            continue
        if nxt == b:
            best = max(best, depth + 1)
            continue
        visited[nxt] = True
        stack.append((nxt, depth + 1, iter(succ[nxt])))
    return best


def longest_path(g, a, b, method='auto'):
    ''' number of edges of the longest simple path a -> b, 0 if none
    PARAMETERS
        method: (str) 'dp' (acyclic graphs, predecessor recursion),
                'search' (exhaustive, at most MAX_SEARCH_NODES nodes) or 'auto'
    '''
    a, b = _node(g, a), _node(g, b)
    if method not in ('auto', 'dp', 'search'):
        raise ValueError('longest_path: unknown method %r' % (method,))
    if a == b:
        return 0
    acyclic, order = is_acyclic(g)
    if method == 'auto':
        method = 'dp' if acyclic else 'search'
    if method == 'dp':
        if not acyclic:
            raise CyclicGraphError('longest_path: method dp needs an acyclic graph')
        return _longest_dp(g, a, b, order)
    _guard(g, 'longest_path')
    return _longest_search(g, a, b)


def graph_longest_path(g):
    ''' longest simple path over all pairs (the fixpoint exponent of the DAG engine)
    '''
    acyclic, order = is_acyclic(g)
    if acyclic:
        depth = np.zeros(g.n, dtype=np.int64)
        for j in order:
            p = g.predecessors(j)
            if len(p) > 0:
                depth[j] = depth[p].max() + 1
        return int(depth.max()) if g.n > 0 else 0
    _guard(g, 'graph_longest_path')
    return max((_longest_search(g, a, b) for a in range(g.n) for b in range(g.n) if a != b), default=0)


def enumerate_simple_paths(g, a, b, max_len=None):
    ''' all simple paths a -> b with at most max_len edges, depth first in
    ascending successor order
    '''
    _guard(g, 'enumerate_simple_paths')
    a, b = _node(g, a), _node(g, b)
    found = PathSet(a, b)
    if a == b:
        return found
    succ = [g.successors(i) for i in range(g.n)]
    path = [a]
    stack = [iter(succ[a])]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            path.pop()
            continue
        nxt = int(nxt)
        if nxt in path:
            continue
        if nxt == b:
            if max_len is None or len(path) <= max_len:
                found.add(path + [b])
            continue
        if max_len is not None and len(path) >= max_len:
            continue
        path.append(nxt)
        stack.append(iter(succ[nxt]))
    return found


def path_edges(g, paths):
    ''' edge ids lying on any of the paths
    '''
    edges = set()
    for p in paths:
        for u, v in zip(p[:-1], p[1:]):
            edges.add(g.edge_id(u, v))
    return edges


def walk_edges(g, a, b):
    ''' edge ids u -> v on some walk a -> b: u reachable from a and b reachable from v
    '''
    a, b = _node(g, a), _node(g, b)
    adj = g.adjacency()
    fwd = np.zeros(g.n, dtype=bool)
    fwd[breadth_first_order(adj, a, directed=True, return_predecessors=False)] = True
    bwd = np.zeros(g.n, dtype=bool)
    bwd[breadth_first_order(adj.T.tocsr(), b, directed=True, return_predecessors=False)] = True
    return set(int(e) for e in np.flatnonzero(fwd[g.src] & bwd[g.dst]))
