from .algebra import *
from . import graph
from . import trustmat
from . import dagpowers
from . import cyclic
from . import oracle
from . import report
from .graph import TrustGraph, load_graph, random_graph
from .options import EvalOptions
from .dagpowers import evaluate_dag
from .cyclic import evaluate_general, evaluate_bounded
from .utils.logs import logmsg, progressbar
