import numpy as np
import pytest

from trustlab.algebra import FULL_TRUST, NO_RELATION, TrustTriple, is_no_relation, par, seq
from trustlab.graph import GraphKind, TrustGraph, random_graph
from trustlab.options import EvalOptions
from trustlab.trustmat import TrustMatrix, matrix_from_graph, product, row_blocks


def test_matrix_from_graph(cycle_graph, w):
    C = matrix_from_graph(cycle_graph)
    assert C.n == 4
    for i in range(4):
        assert C[i, i] == FULL_TRUST
    assert C[0, 1] == w['a'] and C[1, 2] == w['b'] and C[2, 3] == w['c'] and C[3, 1] == w['d']
    assert C[0, 2] == NO_RELATION and C[1, 3] == NO_RELATION


def test_edgeless_and_single_edge():
    g = TrustGraph(['x', 'y', 'z'], [], [], [], [])
    assert matrix_from_graph(g) == TrustMatrix.identity(3)
    t = TrustTriple(0.4, 0.35)
    C = matrix_from_graph(TrustGraph.from_edges([('A', 'B', t)]))
    assert C[0, 1] == t and C[1, 0] == NO_RELATION


def test_sparse_and_dense_views_agree(cycle_graph):
    S = matrix_from_graph(cycle_graph, sparse=True)
    D = matrix_from_graph(cycle_graph)
    assert S.is_sparse and not D.is_sparse
    assert S == D
    assert S.to_dense() == D and D.to_sparse() == S
    n, indptr, indices, vtd, vdtd, eids = S.csr()
    assert list(eids) == [0, 1, 2, 3]


def test_square_product_of_cycle_graph(cycle_graph, w):
    a, b, c, d = w['a'], w['b'], w['c'], w['d']
    C = matrix_from_graph(cycle_graph)
    C2 = product(C, C)
    assert C2[0, 2] == seq(a, b)
    assert C2[1, 3] == seq(b, c)
    assert C2[2, 1] == seq(c, d)
    assert C2[3, 2] == seq(d, b)
    assert C2[0, 1] == a
    for i in range(4):
        assert C2[i, i] == FULL_TRUST


def test_product_with_identity():
    g = random_graph(12, 40, GraphKind.GENERAL, seed=5)
    C = matrix_from_graph(g)
    I = TrustMatrix.identity(12)
    assert product(I, C) == C
    # k != j leaves C_ik . I_kj nothing to contribute
    assert product(C, I) == I


def test_path_of_two():
    x, y = TrustTriple(0.7, 0.1), TrustTriple(0.6, 0.3)
    C = matrix_from_graph(TrustGraph.from_edges([('A', 'B', x), ('B', 'C', y)]))
    assert product(C, C)[0, 2] == seq(x, y)


def test_distrust_is_not_wiped_by_missing_terms():
    # <0.5,0.4> reaches C through B only; the absent A->C term must not zero the distrust
    x, y = TrustTriple(0.5, 0.4), TrustTriple(0.5, 0.4)
    C = matrix_from_graph(TrustGraph.from_edges([('A', 'B', x), ('B', 'C', y)]))
    assert product(C, C)[0, 2].dtd == pytest.approx(0.4)


def test_order_mismatch():
    with pytest.raises(ValueError):
        product(TrustMatrix.identity(2), TrustMatrix.identity(3))


@pytest.mark.parametrize('seed', range(5))
def test_backends_bit_identical(seed):
    g = random_graph(25, 150, GraphKind.GENERAL, seed=seed)
    C = matrix_from_graph(g)
    M = product(C, C)
    dense = product(M, C, EvalOptions(backend='dense', threads=1))
    sparse = product(M, matrix_from_graph(g, sparse=True), EvalOptions(backend='sparse', threads=1))
    assert np.array_equal(dense.td, sparse.td) and np.array_equal(dense.dtd, sparse.dtd)


def test_threads_do_not_change_result():
    g = random_graph(40, 300, GraphKind.GENERAL, seed=8)
    C = matrix_from_graph(g)
    one = product(C, C, EvalOptions(threads=1))
    many = product(C, C, EvalOptions(threads=3))
    assert one == many


def test_zero_distrust_kernel():
    g = random_graph(20, 80, GraphKind.GENERAL, seed=2)
    g0 = TrustGraph(g.nodes, g.src, g.dst, g.td, np.zeros(g.n_edges))
    C = matrix_from_graph(g0)
    fast = product(C, C, EvalOptions(zero_distrust=True, threads=1))
    full = product(C, C, EvalOptions(threads=1))
    assert fast == full
    with pytest.raises(ValueError):
        product(matrix_from_graph(g), matrix_from_graph(g), EvalOptions(zero_distrust=True, threads=1))


def test_row_blocks():
    assert row_blocks(10, 1) == [(0, 10)]
    blocks = row_blocks(10, 3)
    assert blocks[0][0] == 0 and blocks[-1][1] == 10 and len(blocks) == 3
    assert row_blocks(2, 8) == [(0, 1), (1, 2)]
    assert row_blocks(0, 4) == []


def test_max_delta():
    A = TrustMatrix.identity(3)
    B = TrustMatrix(np.full((3, 3), 0.25), np.zeros((3, 3)))
    assert A.max_delta(B) == 0.25
    assert A.max_delta(A) == 0.0


def _mixed_fill_matrix(n, seed):
    # column k of the left operand goes from nearly empty to nearly full
    rng = np.random.default_rng(seed)
    u, v = rng.random((n, n)), rng.random((n, n))
    flip = u + v > 1.0
    td, dtd = np.where(flip, 1.0 - u, u), np.where(flip, 1.0 - v, v)
    mask = rng.random((n, n)) < np.linspace(0.05, 0.95, n)[None, :]
    return TrustMatrix(np.where(mask, td, 0.0), np.where(mask, dtd, 0.0))


@pytest.mark.parametrize('backend', ['dense', 'sparse'])
def test_product_matches_algebra_fold(backend):
    n = 14
    L = _mixed_fill_matrix(n, 11)
    M = matrix_from_graph(random_graph(n, 60, GraphKind.GENERAL, seed=5))
    N = product(L, M, EvalOptions(backend=backend, threads=1))
    for i in range(n):
        assert N[i, i] == FULL_TRUST
        for j in range(n):
            if i == j:
                continue
            terms = [seq(L[i, k], M[k, j]) for k in range(n) if k != j]
            terms = [t for t in terms if not is_no_relation(t)]
            want = par(terms) if len(terms) > 0 else NO_RELATION
            assert N[i, j].td == pytest.approx(want.td, abs=1e-15)
            assert N[i, j].dtd == pytest.approx(want.dtd, abs=1e-15)
    # row blocks of other sizes take other gather paths, the result must not move
    for threads in (2, 5):
        assert product(L, M, EvalOptions(backend=backend, threads=threads)) == N


def test_product_block_kernel_keeps_empty_pairs():
    # full distrust is a term, <0,0,1> is not
    L = TrustMatrix(np.eye(3), np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    M = matrix_from_graph(TrustGraph.from_edges([('a', 'b', 1.0, 0.0)], nodes=['a', 'b', 'c']))
    N = product(L, M, EvalOptions(backend='sparse', threads=1))
    assert N[0, 1] == TrustTriple(1.0, 0.0)
    assert N[2, 1] == TrustTriple(0.0, 1.0)
    assert N[1, 0] == NO_RELATION
    assert N[1, 2] == NO_RELATION
    assert N[2, 0] == NO_RELATION
