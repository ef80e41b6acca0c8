import os

import pytest

from trustlab.graph import DEMO_WEIGHTS, TrustGraph, cycle_demo_graph, two_strategies_graph


def pytest_collection_modifyitems(config, items):
    if os.environ.get('TRUSTLAB_SLOW') == '1':
        return
    skip = pytest.mark.skip(reason='set TRUSTLAB_SLOW=1 to run')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def w():
    ''' the named weights a, b, c, d of the demo graphs
    '''
    return dict(DEMO_WEIGHTS)


@pytest.fixture
def cycle_graph():
    return cycle_demo_graph()


@pytest.fixture
def strategies_graph():
    return two_strategies_graph()


@pytest.fixture
def divergence_graph():
    ''' DAG where a length-4 path only uses edges of shorter paths
    '''
    t = (0.6, 0.2)
    rows = [('i', 'a'), ('a', 'b'), ('b', 'j'), ('i', 'b'), ('b', 'c'), ('c', 'j')]
    return TrustGraph.from_edges([(s, d) + t for s, d in rows])
