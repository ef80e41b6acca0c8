'''
graph.py
Trust graphs: node registry, weighted edges with dense edge ids,
edge-list/JSON/DOT input and output, and random instances for benchmarks
'''

import enum
import heapq
import io
import json
import os

import numpy as np
import pandas as pd
import scipy.sparse as sp

from .algebra import TrustTriple, NO_RELATION, NEG_TOLERANCE, SUM_TOLERANCE


class GraphKind(enum.Enum):
    CONFIRMED_ACYCLIC = 'dag'
    GENERAL = 'general'


class GraphFormatError(ValueError):
    ''' malformed or invalid graph input; `lineno` is 1-based (None if not line based)
    '''
    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = 'line %d: %s' % (lineno, msg)
        ValueError.__init__(self, msg)
        self.lineno = lineno


CSV_HEADER = ['src', 'dst', 'td', 'dtd']
NODES_DIRECTIVE = '# nodes:'


class TrustGraph(object):
    ''' directed trust graph with TrustTriple edge weights
    Nodes are external string ids mapped to dense indices 0..n-1; edge e (0..phi-1)
    goes from src[e] to dst[e] with weight <td[e], dtd[e]>.
    Invariants: no self-loops, at most one edge per ordered pair, no <0,0,1> edge.
    PARAMETERS
        nodes:  (list of str) node ids, index = position
        src:    (array of int) source index per edge
        dst:    (array of int) destination index per edge
        td:     (array of float) trust degree per edge
        dtd:    (array of float) distrust degree per edge
    '''

    def __init__(self, nodes, src, dst, td, dtd):
        self.nodes = [str(v) for v in nodes]
        self.index = {v: i for i, v in enumerate(self.nodes)}
        if len(self.index) != len(self.nodes):
            raise GraphFormatError('duplicate node ids')
        for v in self.nodes:
            # ids are written comma separated in the `# nodes:` directive
            if len(v) == 0 or v != v.strip() or v.startswith('#') or any(c in v for c in ',\n\r"'):
                raise GraphFormatError('node id %r cannot be stored in an edge list' % v)
        src = np.array(src, dtype=np.int64).reshape(-1)
        dst = np.array(dst, dtype=np.int64).reshape(-1)
        td = np.array(td, dtype=np.float64).reshape(-1)
        dtd = np.array(dtd, dtype=np.float64).reshape(-1)
        m = len(src)
        if not (len(dst) == m and len(td) == m and len(dtd) == m):
            raise GraphFormatError('edge arrays of different lengths')
        n = len(self.nodes)
        if m > 0:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise GraphFormatError('edge endpoint out of range')
            loops = np.flatnonzero(src == dst)
            if len(loops) > 0:
                raise GraphFormatError('self-loop on %s' % self.nodes[src[loops[0]]])
            if (not np.all(np.isfinite(td + dtd)) or td.min() < -NEG_TOLERANCE or dtd.min() < -NEG_TOLERANCE
                    or np.max(td + dtd) > 1.0 + SUM_TOLERANCE):
                raise GraphFormatError('edge weight outside the trust simplex')
            # same clamping and rescaling as TrustTriple
            td = np.maximum(td, 0.0)
            dtd = np.maximum(dtd, 0.0)
            s = td + dtd
            over = s > 1.0
            if np.any(over):
                td = np.where(over, td / s, td)
                dtd = np.where(over, np.minimum(dtd / s, 1.0 - td), dtd)
            if np.any((td == 0) & (dtd == 0)):
                raise GraphFormatError('<0,0,1> edge stored (it is a non-edge)')
            codes = src * n + dst
            uniq, counts = np.unique(codes, return_counts=True)
            if np.any(counts > 1):
                c = uniq[np.argmax(counts > 1)]
                raise GraphFormatError('duplicate edge %s -> %s'
                                       % (self.nodes[c // n], self.nodes[c % n]))
        for a in (src, dst, td, dtd):
            a.flags.writeable = False
        self.src, self.dst, self.td, self.dtd = src, dst, td, dtd
        self._kind = None
        self._adj = None
        self._eid = None

    @classmethod
    def from_edges(cls, rows, nodes=None):
        ''' build from rows (src_id, dst_id, td, dtd) or (src_id, dst_id, TrustTriple)
        Node indices follow `nodes` (if given) then first appearance.
        '''
        names = list(nodes) if nodes is not None else []
        index = {v: i for i, v in enumerate(names)}
        src, dst, td, dtd = [], [], [], []
        for row in rows:
            if len(row) == 3:
                a, b, w = row
            else:
                a, b = row[0], row[1]
                w = TrustTriple(row[2], row[3])
            for v in (a, b):
                if v not in index:
                    index[v] = len(names)
                    names.append(v)
            if w.td == 0 and w.dtd == 0:
                continue
            src.append(index[a])
            dst.append(index[b])
            td.append(w.td)
            dtd.append(w.dtd)
        return cls(names, src, dst, td, dtd)

    @property
    def n(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.src)

    def edges(self):
        ''' iterate (edge id, src index, dst index, TrustTriple) in edge id order
        '''
        for e in range(self.n_edges):
            yield e, int(self.src[e]), int(self.dst[e]), TrustTriple(self.td[e], self.dtd[e])

    def _edge_lookup(self):
        if self._eid is None:
            self._eid = {(int(a), int(b)): e for e, (a, b) in enumerate(zip(self.src, self.dst))}
        return self._eid

    def edge_id(self, i, j):
        return self._edge_lookup().get((i, j), -1)

    def weight(self, i, j):
        e = self.edge_id(i, j)
        if e < 0:
            return NO_RELATION
        return TrustTriple(self.td[e], self.dtd[e])

    def adjacency(self):
        ''' csr structure of the graph; data holds edge id + 1, column indices sorted per row
        '''
        if self._adj is None:
            eids = np.arange(self.n_edges, dtype=np.int64) + 1
            adj = sp.csr_matrix((eids, (self.src, self.dst)), shape=(self.n, self.n), dtype=np.int64)
            adj.sort_indices()
            self._adj = adj
        return self._adj

    def successors(self, i):
        adj = self.adjacency()
        return adj.indices[adj.indptr[i]:adj.indptr[i+1]].copy()

    def predecessors(self, j):
        return np.sort(self.src[self.dst == j])

    def has_zero_distrust(self):
        return bool(np.all(self.dtd == 0))

    def __eq__(self, other):
        if not isinstance(other, TrustGraph):
            return NotImplemented
        return (self.nodes == other.nodes
                and np.array_equal(self.src, other.src)
                and np.array_equal(self.dst, other.dst)
                and np.array_equal(self.td, other.td)
                and np.array_equal(self.dtd, other.dtd))

    __hash__ = None

    def __repr__(self):
        return 'TrustGraph(n=%d, edges=%d)' % (self.n, self.n_edges)


def is_acyclic(g):
    ''' check for directed cycles (Kahn's algorithm, smallest index first)
    RETURNS
        (acyclic, order):   (bool, list of int or None) topological order when acyclic
    '''
    indeg = np.bincount(g.dst, minlength=g.n).tolist()
    adj = g.adjacency()
    ready = [i for i in range(g.n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in adj.indices[adj.indptr[i]:adj.indptr[i+1]]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, int(j))
    if len(order) == g.n:
        g._kind = GraphKind.CONFIRMED_ACYCLIC
        return True, order
    g._kind = GraphKind.GENERAL
    return False, None


def classify(g):
    if g._kind is None:
        is_acyclic(g)
    return g._kind


# ---------- input ----------

def _read_text(source):
    if isinstance(source, bytes):
        return source.decode('utf-8')
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode('utf-8')
    return data


def _split_comments(text):
    ''' blank out `#` lines (keeping line numbers) and collect the ids of `# nodes:` directives
    RETURNS
        (body, directive_nodes, width): text for read_csv, ids, widest comma count + 1
    '''
    lines = text.split('\n')
    nodes = []
    width = 4
    for k, line in enumerate(lines):
        line = line.rstrip('\r')
        if line.startswith(NODES_DIRECTIVE):
            nodes.extend(v.strip() for v in line[len(NODES_DIRECTIVE):].split(','))
            line = ''
        elif line.lstrip().startswith('#'):
            line = ''
        else:
            width = max(width, line.count(',') + 1)
        lines[k] = line
    return '\n'.join(lines), [v for v in nodes if len(v) > 0], width


def _csv_rows(body, width):
    ''' (lineno, fields) of the non-blank lines of a comment-free edge list
    '''
    if len(body.strip()) == 0:
        return
    frame = pd.read_csv(io.StringIO(body), header=None, names=list(range(width)), dtype=str,
                        skip_blank_lines=False, keep_default_na=False, na_values=[''],
                        skipinitialspace=True)
    for r, row in enumerate(frame.itertuples(index=False, name=None)):
        present = [isinstance(v, str) for v in row]
        if not any(present):
            continue
        count = len(present) - present[::-1].index(True)
        yield r + 1, [row[c].strip() if present[c] else '' for c in range(count)]


def load_edge_list(source):
    ''' load a CSV edge list `src,dst,td,dtd` (header optional, `#` comments skipped)
    PARAMETERS
        source: (bytes, str or file object) UTF-8 text
    RETURNS
        g:      (TrustGraph) `# nodes:` directive ids first, then nodes in first-appearance order
    '''
    body, listed, width = _split_comments(_read_text(source))
    names = []
    index = {}
    seen = {}
    src, dst, td, dtd = [], [], [], []

    def node(v):
        if v not in index:
            index[v] = len(names)
            names.append(v)
        return index[v]

    for v in listed:
        node(v)
    first_data = True
    for lineno, fields in _csv_rows(body, width):
        if first_data and [f.lower() for f in fields[:4]] == CSV_HEADER:
            first_data = False
            continue
        first_data = False
        if len(fields) not in (4, 5):
            raise GraphFormatError('expected src,dst,td,dtd, got %d fields' % len(fields), lineno)
        a, b = fields[0], fields[1]
        if len(a) == 0 or len(b) == 0:
            raise GraphFormatError('empty node id', lineno)
        if a == b:
            raise GraphFormatError('self-loop on %s' % a, lineno)
        try:
            w = TrustTriple(*[float(f) for f in fields[2:]])
        except ValueError as err:
            raise GraphFormatError('bad weight %s: %s' % (','.join(fields[2:]), err), lineno)
        i, j = node(a), node(b)
        if (i, j) in seen:
            raise GraphFormatError('duplicate edge %s -> %s (first on line %d)'
                                   % (a, b, seen[(i, j)]), lineno)
        seen[(i, j)] = lineno
        if w.td == 0 and w.dtd == 0:
            continue
        src.append(i)
        dst.append(j)
        td.append(w.td)
        dtd.append(w.dtd)
    return TrustGraph(names, src, dst, td, dtd)


def load_json(source):
    ''' load `{"nodes": [...], "edges": [{"src", "dst", "td", "dtd"}, ...]}`
    '''
    try:
        doc = json.loads(_read_text(source))
    except ValueError as err:
        raise GraphFormatError('invalid JSON: %s' % err)
    if not isinstance(doc, dict) or 'edges' not in doc:
        raise GraphFormatError('JSON graph needs an "edges" list')
    rows = []
    seen = set()
    for k, e in enumerate(doc['edges']):
        try:
            a, b = str(e['src']), str(e['dst'])
            w = TrustTriple(e['td'], e['dtd'])
        except (KeyError, TypeError, ValueError) as err:
            raise GraphFormatError('edge #%d: %s' % (k, err))
        if a == b:
            raise GraphFormatError('self-loop on %s' % a)
        if (a, b) in seen:
            raise GraphFormatError('duplicate edge %s -> %s' % (a, b))
        seen.add((a, b))
        rows.append((a, b, w))
    return TrustGraph.from_edges(rows, nodes=[str(v) for v in doc.get('nodes', [])])


def load_graph(path):
    ''' load a graph file, JSON if the name ends with .json, otherwise CSV
    '''
    with open(path, 'rb') as fh:
        if path.endswith('.json'):
            return load_json(fh)
        return load_edge_list(fh)


# ---------- output ----------

def export(g, fmt='csv'):
    ''' serialize a graph
    PARAMETERS
        g:      (TrustGraph) graph
        fmt:    (str) 'csv', 'json' or 'dot'
    RETURNS
        data:   (bytes) UTF-8 text
    '''
    if fmt == 'csv':
        out = io.StringIO()
        out.write('%s %s\n' % (NODES_DIRECTIVE, ','.join(g.nodes)))
        out.write(','.join(CSV_HEADER) + '\n')
        for e in range(g.n_edges):
            out.write('%s,%s,%r,%r\n' % (g.nodes[g.src[e]], g.nodes[g.dst[e]],
                                         float(g.td[e]), float(g.dtd[e])))
        return out.getvalue().encode('utf-8')
    if fmt == 'json':
        doc = {'nodes': g.nodes,
               'edges': [{'src': g.nodes[g.src[e]], 'dst': g.nodes[g.dst[e]],
                          'td': float(g.td[e]), 'dtd': float(g.dtd[e])}
                         for e in range(g.n_edges)]}
        return (json.dumps(doc) + '\n').encode('utf-8')
    if fmt == 'dot':
        lines = ['digraph trust {']
        for v in g.nodes:
            lines.append('  "%s";' % v)
        for e in range(g.n_edges):
            lines.append('  "%s" -> "%s" [label="%.3g,%.3g"];'
                         % (g.nodes[g.src[e]], g.nodes[g.dst[e]], g.td[e], g.dtd[e]))
        lines.append('}')
        return ('\n'.join(lines) + '\n').encode('utf-8')
    raise ValueError('export: unknown format %r' % (fmt,))


def save_graph(g, path, fmt=None):
    if fmt is None:
        fmt = os.path.splitext(path)[1].lstrip('.') or 'csv'
    with open(path, 'wb') as fh:
        fh.write(export(g, fmt))


# ---------- generators ----------

def _simplex_weights(rng, m):
    ''' (td, dtd) uniform on the simplex td + dtd <= 1
    '''
    u = rng.random(m)
    v = rng.random(m)
    flip = u + v > 1.0
    return np.where(flip, 1.0 - u, u), np.where(flip, 1.0 - v, v)


def random_graph(n, n_edges, kind=GraphKind.GENERAL, seed=None, force_cycle=False):
    ''' random trust graph, deterministic for a fixed seed
    ConfirmedAcyclic graphs sample a random topological order then forward edges.
    PARAMETERS
        n:          (int) number of vertices
        n_edges:    (int) number of edges (phi)
        kind:       (GraphKind or 'dag'/'general')
        seed:       (int) seed for numpy.random.default_rng
        force_cycle:(bool) plant a directed cycle first (General only)
    RETURNS
        g:          (TrustGraph) nodes 'v0'..'v{n-1}', edges sorted by (src, dst)
    '''
    kind = GraphKind(kind)
    if n < 0 or n_edges < 0:
        raise ValueError('random_graph: negative size')
    rng = np.random.default_rng(seed)
    if kind is GraphKind.CONFIRMED_ACYCLIC:
        cap = n * (n - 1) // 2
        if n_edges > cap:
            raise ValueError('random_graph: %d edges infeasible for a DAG on %d vertices (max %d)'
                             % (n_edges, n, cap))
        if force_cycle:
            raise ValueError('random_graph: force_cycle needs kind general')
        order = rng.permutation(n)
        a, b = np.triu_indices(n, 1)
        pick = np.sort(rng.choice(cap, size=n_edges, replace=False))
        src, dst = order[a[pick]], order[b[pick]]
    else:
        cap = n * (n - 1)
        if n_edges > cap:
            raise ValueError('random_graph: %d edges infeasible on %d vertices (max %d)'
                             % (n_edges, n, cap))
        planted = np.zeros(0, dtype=np.int64)
        if force_cycle:
            length = min(n, 3)
            if length < 2 or n_edges < length:
                raise ValueError('random_graph: cannot plant a cycle with %d vertices, %d edges'
                                 % (n, n_edges))
            ring = rng.choice(n, size=length, replace=False)
            ci, cj = ring, np.roll(ring, -1)
            planted = ci * (n - 1) + cj - (cj > ci)
        pool = np.setdiff1d(np.arange(cap, dtype=np.int64), planted)
        pick = rng.choice(pool, size=n_edges - len(planted), replace=False)
        codes = np.concatenate([planted, pick])
        src = codes // max(n - 1, 1)
        r = codes % max(n - 1, 1)
        dst = r + (r >= src)
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    td, dtd = _simplex_weights(rng, len(src))
    g = TrustGraph(['v%d' % i for i in range(n)], src, dst, td, dtd)
    is_acyclic(g)
    return g


DEMO_WEIGHTS = {'a': TrustTriple(0.9, 0.05), 'b': TrustTriple(0.8, 0.1),
                'c': TrustTriple(0.7, 0.2), 'd': TrustTriple(0.6, 0.3)}


def cycle_demo_graph(a=None, b=None, c=None, d=None):
    ''' the one-cycle graph 1 -a-> 2 -b-> 3 -c-> 4 -d-> 2 (edge ids 0..3 = a, b, c, d)
    '''
    w = dict(DEMO_WEIGHTS)
    w.update({k: v for k, v in zip('abcd', (a, b, c, d)) if v is not None})
    return TrustGraph.from_edges([('1', '2', w['a']), ('2', '3', w['b']),
                                  ('3', '4', w['c']), ('4', '2', w['d'])])


def two_strategies_graph(a=None, b=None, c=None, d=None):
    ''' 1 -a-> 2 -b-> 3 -c-> 4 plus 2 -d-> 4; right-to-left evaluation of (1,4)
    gives par(seq(a,b,c), seq(a,d))
    '''
    w = dict(DEMO_WEIGHTS)
    w.update({k: v for k, v in zip('abcd', (a, b, c, d)) if v is not None})
    return TrustGraph.from_edges([('1', '2', w['a']), ('2', '3', w['b']),
                                  ('3', '4', w['c']), ('2', '4', w['d'])])
