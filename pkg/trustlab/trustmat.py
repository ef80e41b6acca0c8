'''
trustmat.py
Matrices of trust triples and the modified trust-matrix product
    N_ij = sum_{k != j} C_ik . M_kj  (i != j),   N_ii = <1,0,0>
with "+" = parallel and "." = sequential aggregation
'''

import multiprocessing as mps

import numpy as np

from .algebra import TrustTriple
from .options import EvalOptions


class TrustMatrix(object):
    ''' n x n matrix of TrustTriple with a <1,0,0> diagonal; absent entries read as <0,0,1>
    Dense matrices hold two float64 planes (td, dtd); sparse ones hold csr rows of the
    off-diagonal entries (optionally with the graph edge id of each entry).
    '''

    def __init__(self, td, dtd):
        td = np.array(td, dtype=np.float64)
        dtd = np.array(dtd, dtype=np.float64)
        if td.ndim != 2 or td.shape[0] != td.shape[1] or td.shape != dtd.shape:
            raise ValueError('TrustMatrix: td and dtd must be the same square shape')
        np.fill_diagonal(td, 1.0)
        np.fill_diagonal(dtd, 0.0)
        self._td, self._dtd = td, dtd
        self._csr = None
        self._sparse = False

    @classmethod
    def from_csr(cls, n, indptr, indices, vtd, vdtd, eids=None):
        ''' sparse matrix from csr arrays (off-diagonal entries, columns sorted per row)
        '''
        m = cls.__new__(cls)
        m._td, m._dtd = None, None
        m._sparse = True
        m._csr = (int(n), np.asarray(indptr), np.asarray(indices),
                  np.asarray(vtd, dtype=np.float64), np.asarray(vdtd, dtype=np.float64),
                  None if eids is None else np.asarray(eids, dtype=np.int64))
        return m

    @classmethod
    def identity(cls, n):
        ''' the identity-like matrix: FULL_TRUST diagonal, NO_RELATION elsewhere
        '''
        return cls(np.zeros((n, n)), np.zeros((n, n)))

    @property
    def n(self):
        if self._csr is not None:
            return self._csr[0]
        return self._td.shape[0]

    @property
    def is_sparse(self):
        return self._sparse

    @property
    def td(self):
        if self._td is None:
            self._materialize()
        return self._td

    @property
    def dtd(self):
        if self._dtd is None:
            self._materialize()
        return self._dtd

    def _materialize(self):
        n, indptr, indices, vtd, vdtd, _ = self._csr
        rows = np.repeat(np.arange(n), np.diff(indptr))
        td = np.zeros((n, n))
        dtd = np.zeros((n, n))
        td[rows, indices] = vtd
        dtd[rows, indices] = vdtd
        np.fill_diagonal(td, 1.0)
        self._td, self._dtd = td, dtd

    def csr(self):
        ''' (n, indptr, indices, td values, dtd values, edge ids or None) of the off-diagonal entries
        '''
        if self._csr is None:
            n = self.n
            mask = (self._td != 0) | (self._dtd != 0)
            np.fill_diagonal(mask, False)
            rows, cols = np.nonzero(mask)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
            self._csr = (n, indptr, cols, self._td[rows, cols], self._dtd[rows, cols], None)
        return self._csr

    def to_dense(self):
        return TrustMatrix(self.td, self.dtd)

    def to_sparse(self):
        n, indptr, indices, vtd, vdtd, eids = self.csr()
        return TrustMatrix.from_csr(n, indptr, indices, vtd, vdtd, eids)

    def __getitem__(self, ij):
        i, j = ij
        return TrustTriple(self.td[i, j], self.dtd[i, j])

    def __eq__(self, other):
        if not isinstance(other, TrustMatrix):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.td, other.td)
                and np.array_equal(self.dtd, other.dtd))

    __hash__ = None

    def max_delta(self, other):
        ''' largest componentwise |delta td| or |delta dtd| against another matrix
        '''
        if self.n == 0:
            return 0.0
        return float(max(np.max(np.abs(self.td - other.td)),
                         np.max(np.abs(self.dtd - other.dtd))))

    def __repr__(self):
        return 'TrustMatrix(n=%d, %s)' % (self.n, 'sparse' if self.is_sparse else 'dense')


def matrix_from_graph(g, sparse=False):
    ''' the matrix of trust C of a graph
    PARAMETERS
        g:      (TrustGraph) graph
        sparse: (bool) keep csr rows (with edge ids) instead of dense planes
    RETURNS
        C:      (TrustMatrix) C_ij = weight of i->j or <0,0,1>, C_ii = <1,0,0>
    '''
    adj = g.adjacency()
    eids = adj.data - 1
    C = TrustMatrix.from_csr(g.n, adj.indptr, adj.indices, g.td[eids], g.dtd[eids], eids)
    if sparse:
        return C
    return C.to_dense()


# ---------- kernel ----------

def right_operand(M, backend):
    ''' picklable description of the right operand's rows for `fold_block`
    '''
    if backend == 'sparse':
        n, indptr, indices, vtd, vdtd, eids = M.csr()
        return ('sparse', indptr, indices, vtd, vdtd, eids)
    return ('dense', M.td, M.dtd)


def _right_row(right, k):
    ''' (columns, td, dtd, edge ids) of row k of the right operand, diagonal excluded
    '''
    if right[0] == 'sparse':
        _, indptr, indices, vtd, vdtd, eids = right
        s, e = indptr[k], indptr[k+1]
        return indices[s:e], vtd[s:e], vdtd[s:e], None if eids is None else eids[s:e]
    _, mtd, mdtd = right
    cols = np.delete(np.arange(mtd.shape[1]), k)
    return cols, mtd[k, cols], mdtd[k, cols], None


def _scratch(buf, rows, cols):
    ''' rows x cols contiguous view at the start of a flat buffer
    '''
    return buf[:rows * cols].reshape(rows, cols)


def fold_block(lo, hi, L_td, L_dtd, right, td_only=False, R_prev=None):
    ''' parallel-accumulate t = L_ik . M_kj over k (ascending, k != j) for rows lo..hi-1
    Terms equal to <0,0,1> are skipped and the first accepted term replaces the
    empty accumulator, so pairs without any term stay <0,0,1>.
    PARAMETERS
        lo, hi:     (int) global row range of this block
        L_td/L_dtd: (array) rows lo..hi-1 of the left operand, shape (hi-lo, n)
        right:      (tuple) from `right_operand`
        td_only:    (bool) skip the distrust plane (all dtd are 0)
        R_prev:     (uint64 array, optional) edge memory rows lo..hi-1, shape (hi-lo, n, W);
                    when given the union R_prev[i,k] | {k->j} is accumulated alongside
    RETURNS
        (acc_td, acc_dtd, R_new):   R_new is None without R_prev
    '''
    b, n = L_td.shape
    # accumulators are kept transposed: acc[j] is column j of the block, so the
    # columns of a right-operand row are gathered as whole contiguous rows.
    # td starts at 0 and dtd at 1, the first term t then gives 0 + (1-0)*t = t
    # and 1*t = t exactly; a <0,0,1> term leaves td as is and multiplies dtd by 1.
    x_td = np.ascontiguousarray(L_td.T)
    x_dtd = None if td_only else np.ascontiguousarray(L_dtd.T)
    acc_td = np.zeros((n, b))
    acc_dtd = None if td_only else np.ones((n, b))
    empty = None if td_only else np.ones((n, b), dtype=bool)
    R_new = None if R_prev is None else np.zeros_like(R_prev)
    rows = np.arange(lo, hi)
    need_keep = not td_only or R_prev is not None
    fbuf = [np.empty(n * b) for _ in range(5)]
    bbuf = [np.empty(n * b, dtype=bool) for _ in range(2)]
    for k in range(n):
        cols, ctd, cdtd, eids = _right_row(right, k)
        c = len(cols)
        if c == 0:
            continue
        xt = x_td[k]
        xd = None if td_only else x_dtd[k]
        nz = (xt != 0) if td_only else (xt != 0) | (xd != 0)
        live = np.flatnonzero(nz)
        if len(live) == 0:
            continue
        full = 2 * len(live) >= b
        if full:
            # rows of the block without a left entry only get <0,0,1> terms
            m = b
            ix = cols
        else:
            m = len(live)
            ix = np.ix_(cols, live)
            xt = xt[live]
            xd = None if td_only else xd[live]
        t_td = _scratch(fbuf[0], c, m)
        tmp = _scratch(fbuf[1], c, m)
        np.multiply(ctd[:, None], xt[None, :], out=t_td)
        if not td_only:
            t_dtd = _scratch(fbuf[2], c, m)
            np.multiply(cdtd[:, None], xd[None, :], out=tmp)
            t_td += tmp
            np.multiply(ctd[:, None], xd[None, :], out=t_dtd)
            np.multiply(cdtd[:, None], xt[None, :], out=tmp)
            t_dtd += tmp
        if need_keep:
            keep = _scratch(bbuf[0], c, m)
            np.not_equal(t_td, 0.0, out=keep)
            if not td_only:
                drop = _scratch(bbuf[1], c, m)
                np.not_equal(t_dtd, 0.0, out=drop)
                keep |= drop
                np.logical_not(keep, out=drop)

        if full:
            a = np.take(acc_td, cols, axis=0, out=_scratch(fbuf[3], c, m), mode='clip')
        else:
            a = acc_td[ix]
        np.subtract(1.0, a, out=tmp)
        tmp *= t_td
        a += tmp
        acc_td[ix] = a
        if not td_only:
            np.copyto(t_dtd, 1.0, where=drop)
            if full:
                d = np.take(acc_dtd, cols, axis=0, out=_scratch(fbuf[4], c, m), mode='clip')
            else:
                d = acc_dtd[ix]
            d *= t_dtd
            acc_dtd[ix] = d
            e = empty[ix]
            e &= drop
            empty[ix] = e

        if R_prev is not None:
            sel = rows - lo if full else live
            kr = keep.T & (rows[sel][:, None] != cols[None, :])
            upd = np.repeat(R_prev[sel, k, :][:, None, :], c, axis=1)
            bits = np.left_shift(np.uint64(1), (eids & 63).astype(np.uint64))
            upd[:, np.arange(c), eids >> 6] |= bits
            upd[~kr] = 0
            R_new[np.ix_(sel, cols)] |= upd
    td = np.ascontiguousarray(acc_td.T)
    if td_only:
        dtd = np.zeros((b, n))
    else:
        acc_dtd[empty] = 0.0
        dtd = np.ascontiguousarray(acc_dtd.T)
    td[np.arange(b), rows] = 1.0
    dtd[np.arange(b), rows] = 0.0
    return td, dtd, R_new


def row_blocks(n, threads):
    ''' contiguous (lo, hi) row ranges, at most `threads` of them
    '''
    bounds = np.linspace(0, n, min(max(threads, 1), max(n, 1)) + 1).astype(int)
    return [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def map_blocks(func, args, threads):
    ''' run func(*a) for every a in args, in a process pool when threads > 1; order preserved
    '''
    if threads <= 1 or len(args) <= 1:
        return [func(*a) for a in args]
    pool = mps.Pool(min(threads, len(args)))
    try:
        results = pool.starmap(func, args)
    finally:
        pool.close()
        pool.join()
    return results


def product(C, M, opts=None):
    ''' trust-matrix product N = C * M
    PARAMETERS
        C, M:   (TrustMatrix) same order n
        opts:   (EvalOptions, optional) backend, threads and zero_distrust are used
    RETURNS
        N:      (TrustMatrix) dense result
    '''
    if opts is None:
        opts = EvalOptions(threads=1)
    if C.n != M.n:
        raise ValueError('product: order mismatch %d vs %d' % (C.n, M.n))
    n = C.n
    td_only = False
    if opts.zero_distrust:
        if np.any(C.dtd != 0) or np.any(M.dtd != 0):
            raise ValueError('product: zero_distrust requested but a distrust degree is nonzero')
        td_only = True
    backend = opts.backend
    if backend == 'auto':
        backend = opts.pick_backend(n, len(M.csr()[2]))
    right = right_operand(M, backend)
    L_td, L_dtd = C.td, C.dtd
    args = [(lo, hi, L_td[lo:hi], L_dtd[lo:hi], right, td_only) for lo, hi in row_blocks(n, opts.threads)]
    parts = map_blocks(fold_block, args, opts.threads)
    if len(parts) == 0:
        return TrustMatrix.identity(n)
    return TrustMatrix(np.vstack([p[0] for p in parts]), np.vstack([p[1] for p in parts]))
