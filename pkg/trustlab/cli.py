'''
cli.py
Command line front end
    trustlab eval <graph file> [options]
    trustlab gen <n> <edges> <dag|general|cycle-demo> --seed S [options]
    trustlab bench [suite] --seed S [options]
Exit codes: 0 success, 1 verification mismatch, 2 usage or input error
'''

import getopt
import json
import sys

from . import bench
from .algebra import is_no_relation
from .cyclic import evaluate_bounded, evaluate_general
from .dagpowers import evaluate_dag
from .graph import GraphKind, classify, cycle_demo_graph, export, load_graph, random_graph
from .oracle import MAX_SEARCH_NODES, SizeGuardError, recursive_eval, walk_edges
from .options import EvalOptions, default_threads
from .utils.logs import logmsg, set_logfile

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
VERIFY_TOL = 1e-12


class UsageError(ValueError):
    pass


def print_help():
    print('Usage: trustlab <command> [options]')
    print('')
    print('  eval <file>          evaluate the trust between all pairs of a graph (csv or json)')
    print('    --engine E           dag, general or auto (default: auto, dag when acyclic)')
    print('    --force-general      same as --engine general')
    print('    --epsilon E          stop when the largest change is <= E, default: 0 (exact)')
    print('    --max-iters K        iteration cap')
    print('    --threshold T        bounded evaluation: freeze pairs with td > T, default: 1')
    print('    --max-len L          bounded evaluation: at most L iterations')
    print('    --verify             check the result against the brute-force oracle (small graphs)')
    print('    --threads N          row-block workers, default: $TRUSTLAB_THREADS or 1')
    print('    --backend B          dense, sparse or auto (dag engine)')
    print('    --zero-distrust      td-only kernel (every dtd must be 0)')
    print('    -o, --out FILE       result file, default: stdout')
    print('    -f, --format F       csv or json, default: from --out extension, else csv')
    print('    --timings            include wall clock per iteration in json output')
    print('    --plot FILE          save the convergence trace')
    print('    --log FILE           append log lines to FILE')
    print('    -v                   log every iteration')
    print('  gen <n> <edges> <dag|general|cycle-demo>')
    print('    --seed S             random seed (required for dag and general)')
    print('    --force-cycle        plant a directed cycle (general)')
    print('    -o, --out FILE       graph file, default: stdout')
    print('    -f, --format F       csv or json, default: from --out extension, else csv')
    print('  bench [suite]        benchmark suites: %s, all' % ', '.join(bench.SUITES))
    print('    --seed S             base random seed (required)')
    print('    --n N, --edges M     fixture size')
    print('    --seeds K            graphs of the bounded suite')
    print('    --epsilon E          early stop of the single-run suites')
    print('    --threads N          row-block workers')
    print('    -o, --out FILE       JSON results')
    print('    --plot FILE          per-iteration seconds')
    print('    -v                   log every iteration')


def _int(text, name, lo=None):
    try:
        value = int(text)
    except ValueError:
        raise UsageError('%s expects an integer, got %r' % (name, text))
    if lo is not None and value < lo:
        raise UsageError('%s must be >= %d, got %d' % (name, lo, value))
    return value


def _float(text, name):
    try:
        return float(text)
    except ValueError:
        raise UsageError('%s expects a number, got %r' % (name, text))


def _format(fmt, out):
    if fmt is None:
        fmt = 'json' if out is not None and out.endswith('.json') else 'csv'
    if fmt not in ('csv', 'json'):
        raise UsageError('--format must be csv or json, got %r' % fmt)
    return fmt


def _write(data, out):
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, 'wb') as fh:
            fh.write(data)


def verify(g, report):
    ''' compare a report with the oracle
    acyclic graphs: every pair against recursive_eval within VERIFY_TOL;
    cyclic graphs: every edge memory set within the edges of i -> j walks
    RETURNS
        mismatches: (list of str)
    '''
    if g.n > MAX_SEARCH_NODES:
        raise SizeGuardError('--verify is limited to graphs with at most %d nodes' % MAX_SEARCH_NODES)
    bad = []
    if classify(g) is GraphKind.CONFIRMED_ACYCLIC:
        for i in range(g.n):
            for j in range(g.n):
                if i == j:
                    continue
                want = recursive_eval(g, i, j)
                got = report.matrix[i, j]
                if abs(want.td - got.td) > VERIFY_TOL or abs(want.dtd - got.dtd) > VERIFY_TOL:
                    bad.append('%s -> %s: engine %r, oracle %r' % (g.nodes[i], g.nodes[j], got, want))
    if report.memory is not None:
        for i in range(g.n):
            for j in range(g.n):
                if i == j or is_no_relation(report.matrix[i, j]):
                    continue
                extra = set(report.memory.edges(i, j)) - walk_edges(g, i, j)
                if extra:
                    bad.append('%s -> %s: edge memory holds edges %s off every walk'
                               % (g.nodes[i], g.nodes[j], sorted(extra)))
    return bad


def cmd_eval(argv):
    try:
        opts, args = getopt.gnu_getopt(argv, 'ho:f:v',
                                       ['help', 'engine=', 'force-general', 'epsilon=', 'max-iters=',
                                        'threshold=', 'max-len=', 'verify', 'threads=', 'backend=',
                                        'zero-distrust', 'out=', 'format=', 'timings', 'plot=', 'log='])
    except getopt.GetoptError as err:
        raise UsageError(str(err))
    engine = 'auto'
    options = EvalOptions(threads=default_threads())
    do_verify, timings = False, False
    out, fmt, plot = None, None, None
    bounded = False
    for opt, arg in opts:
        if opt in ('-h', '--help'):
            print_help()
            return EXIT_OK
        elif opt == '--engine':
            if arg not in ('dag', 'general', 'auto'):
                raise UsageError('--engine must be dag, general or auto, got %r' % arg)
            engine = arg
        elif opt == '--force-general':
            engine = 'general'
        elif opt == '--epsilon':
            options.epsilon = _float(arg, opt)
        elif opt == '--max-iters':
            options.max_iters = _int(arg, opt, 1)
        elif opt == '--threshold':
            options.threshold = _float(arg, opt)
            bounded = True
        elif opt == '--max-len':
            options.max_len = _int(arg, opt, 1)
            bounded = True
        elif opt == '--verify':
            do_verify = True
        elif opt == '--threads':
            options.threads = _int(arg, opt, 1)
        elif opt == '--backend':
            options.backend = arg
        elif opt == '--zero-distrust':
            options.zero_distrust = True
        elif opt in ('-o', '--out'):
            out = arg
        elif opt in ('-f', '--format'):
            fmt = arg
        elif opt == '--timings':
            timings = True
        elif opt == '--plot':
            plot = arg
        elif opt == '--log':
            set_logfile(arg)
        elif opt == '-v':
            options.verbose = True
    if len(args) != 1:
        raise UsageError('eval expects exactly one graph file')
    fmt = _format(fmt, out)
    try:
        options.validate()
    except ValueError as err:
        raise UsageError(str(err))

    g = load_graph(args[0])
    if engine == 'auto':
        engine = 'dag' if classify(g) is GraphKind.CONFIRMED_ACYCLIC else 'general'
    if engine == 'dag' and bounded:
        raise UsageError('--threshold/--max-len need the general engine (--engine general)')
    if options.verbose:
        logmsg('eval %s: n=%d, %d edges, engine %s' % (args[0], g.n, g.n_edges, engine))
    if engine == 'dag':
        report = evaluate_dag(g, options)
    elif bounded:
        report = evaluate_bounded(g, options.max_len, options.threshold, options)
    else:
        report = evaluate_general(g, options)

    if fmt == 'json':
        _write(report.to_json(include_times=timings).encode('utf-8'), out)
    else:
        _write(report.to_csv(), out)
    if plot is not None:
        report.plot_trace(plot)
    if do_verify:
        bad = verify(g, report)
        for line in bad:
            print('MISMATCH: %s' % line, file=sys.stderr)
        if bad:
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_gen(argv):
    try:
        opts, args = getopt.gnu_getopt(argv, 'ho:f:', ['help', 'seed=', 'force-cycle', 'out=', 'format='])
    except getopt.GetoptError as err:
        raise UsageError(str(err))
    seed, force_cycle, out, fmt = None, False, None, None
    for opt, arg in opts:
        if opt in ('-h', '--help'):
            print_help()
            return EXIT_OK
        elif opt == '--seed':
            seed = _int(arg, opt)
        elif opt == '--force-cycle':
            force_cycle = True
        elif opt in ('-o', '--out'):
            out = arg
        elif opt in ('-f', '--format'):
            fmt = arg
    if len(args) != 3:
        raise UsageError('gen expects <n> <edges> <dag|general|cycle-demo>')
    n, edges, kind = _int(args[0], 'n', 0), _int(args[1], 'edges', 0), args[2]
    fmt = _format(fmt, out)
    if kind == 'cycle-demo':
        if (n, edges) != (4, 4):
            raise UsageError('cycle-demo is the fixed 4-node, 4-edge graph (gen 4 4 cycle-demo)')
        g = cycle_demo_graph()
    elif kind in ('dag', 'general'):
        if seed is None:
            raise UsageError('gen %s needs --seed' % kind)
        g = random_graph(n, edges, GraphKind(kind), seed=seed, force_cycle=force_cycle)
    else:
        raise UsageError('unknown graph kind %r' % kind)
    _write(export(g, fmt), out)
    return EXIT_OK


def cmd_bench(argv):
    try:
        opts, args = getopt.gnu_getopt(argv, 'ho:v', ['help', 'seed=', 'n=', 'edges=', 'seeds=', 'epsilon=',
                                                      'threads=', 'out=', 'plot='])
    except getopt.GetoptError as err:
        raise UsageError(str(err))
    seed, n, edges, seeds, epsilon = None, None, None, None, None
    threads, out, plot, verbose = default_threads(), None, None, False
    for opt, arg in opts:
        if opt in ('-h', '--help'):
            print_help()
            return EXIT_OK
        elif opt == '--seed':
            seed = _int(arg, opt)
        elif opt == '--n':
            n = _int(arg, opt, 0)
        elif opt == '--edges':
            edges = _int(arg, opt, 0)
        elif opt == '--seeds':
            seeds = _int(arg, opt, 1)
        elif opt == '--epsilon':
            epsilon = _float(arg, opt)
        elif opt == '--threads':
            threads = _int(arg, opt, 1)
        elif opt in ('-o', '--out'):
            out = arg
        elif opt == '--plot':
            plot = arg
        elif opt == '-v':
            verbose = True
    if len(args) == 0:
        print('available suites:')
        for name, cfg in bench.SUITES.items():
            print('  %-8s %s' % (name, ', '.join('%s=%s' % kv for kv in cfg.items())))
        print('  %-8s every suite above' % 'all')
        return EXIT_OK
    if len(args) > 1:
        raise UsageError('bench expects one suite')
    if seed is None:
        raise UsageError('bench needs --seed')
    results = bench.run_suite(args[0], seed, n, edges, seeds, epsilon, threads, verbose)
    print(bench.format_results(results))
    if out is not None:
        with open(out, 'w') as fh:
            json.dump([r.to_dict() for r in results], fh, indent=1)
            fh.write('\n')
    if plot is not None:
        bench.plot_results(results, plot)
    return EXIT_OK


COMMANDS = {'eval': cmd_eval, 'gen': cmd_gen, 'bench': cmd_bench}


def main(argv):
    ''' run one command
    PARAMETERS
        argv:   (list of str) arguments without the program name
    RETURNS
        code:   (int) exit code
    '''
    if len(argv) == 0 or argv[0] in ('-h', '--help'):
        print_help()
        return EXIT_OK if len(argv) > 0 else EXIT_USAGE
    if argv[0] not in COMMANDS:
        print('ERROR: unknown command %r' % argv[0], file=sys.stderr)
        print_help()
        return EXIT_USAGE
    # GraphFormatError, CyclicGraphError, SizeGuardError and UsageError are ValueErrors
    try:
        return COMMANDS[argv[0]](argv[1:])
    except (ValueError, MemoryError, OSError) as err:
        print('ERROR: %s' % err, file=sys.stderr)
        return EXIT_USAGE


def run():
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
