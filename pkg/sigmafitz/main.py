import sys
import time
import argparse

import numpy as np

from sigmafitz import __version__
from sigmafitz.data import load_operator, load_points, parse_sigma
from sigmafitz.engine import (FitzStatus, WindowConfig, SolverConfig, MinorantConfig, evaluate_fitzpatrick,
                              fitz_closed_form, check_sigma_monotone, is_sigma_related, estimate_sigma_T,
                              check_sigma_t_vanishing, refute_maximality, verify_fitz_inequality,
                              verify_fitz_inf_identity, verify_extension_monotonicity, membership_bound_check,
                              m_set_value, verify_m_set_finiteness, verify_convexity, resolvent_solve,
                              verify_resolvent_bound, quadratic_minorant_search)
from sigmafitz.operators import ConstantSigma, PrimalDualPair, create_operator, Expression1D, sample_graph
from sigmafitz.utils.config import get_config
from sigmafitz.utils.errors import FitzError, UsageError
from sigmafitz.utils.logger import create_logger
from sigmafitz.utils.report import CheckReport, RunReport, write_grid_csv

VERIFY_TARGETS = ['inequality', 'extension', 'convexity', 'inf-identity', 'membership', 'm-set', 'resolvent-bound']


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    # operator
    parser.add_argument('--graph', type=str, help='operator document (JSON)')
    parser.add_argument('--builtin', type=str, help='builtin operator name')
    parser.add_argument('--expr', type=str, help='1-D operator expression in x')
    parser.add_argument('--a', type=float, help='slope of the affine builtin')
    parser.add_argument('--b', type=float, help='offset of the affine builtin')
    parser.add_argument('--sigma', type=str, help='sigma as a constant, a sigma document path or an expression in x')
    # point
    parser.add_argument('--x', type=float, nargs='+', help='primal point')
    parser.add_argument('--xstar', type=float, nargs='+', help='dual point')
    parser.add_argument('--points', type=str, help='points document (JSON)')
    parser.add_argument('--random', type=int, help='number of seeded random test points')
    # easy config modification
    parser.add_argument('--cfg', type=str, metavar="FILE", help='path to config file')
    parser.add_argument('--tol', type=float, help='check tolerance')
    parser.add_argument('--window-radii', type=float, nargs='+', help='window radii R_k')
    parser.add_argument('--samples', type=int, help='grid points per window')
    parser.add_argument('--resolution', type=int, help='unit interval discretization m')
    parser.add_argument('--solver-tol', type=float, help='resolvent residual tolerance')
    parser.add_argument('--scan-range', type=float, help='resolvent scan half-width')
    parser.add_argument('--seed', type=int, help='random seed')
    parser.add_argument('--method', type=str, choices=['auto', 'exact', 'sampled', 'closed_form'])
    parser.add_argument('--out', type=str, help='write the report (or the grid CSV) to this path')
    parser.add_argument('--log-dir', type=str, help='directory of log.txt')
    parser.add_argument('--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    parser.add_argument("--opts", help="Modify config options by adding 'KEY VALUE' pairs. ", default=None, nargs='+')
    return parser


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser('fitz', description='Fitzpatrick functions of sigma-monotone operators')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('eval', parents=[common], help='evaluate F_T at (x, x*)')
    grid = sub.add_parser('grid', parents=[common], help='export F_T on a grid as CSV')
    grid.add_argument('--x-range', type=float, nargs=2, required=True)
    grid.add_argument('--xstar-range', type=float, nargs=2, required=True)
    grid.add_argument('--steps', type=int, default=5)
    check = sub.add_parser('check', parents=[common], help='sigma-monotonicity and relatedness')
    check.add_argument('what', choices=['sigma', 'related'])
    sub.add_parser('sigma-t', parents=[common], help='estimate sigma_T(x)')
    refute = sub.add_parser('refute-max', parents=[common], help='search candidates refuting maximality')
    refute.add_argument('--candidates', type=str, required=True, help='points document, optional "sigma" per point')
    verify = sub.add_parser('verify', parents=[common], help='verify a Fitzpatrick property')
    verify.add_argument('what', choices=VERIFY_TARGETS)
    verify.add_argument('--super-graph', type=str, help='graph document of the extension S')
    resolvent = sub.add_parser('resolvent', parents=[common], help='solve x + T(x) = z')
    resolvent.add_argument('--z', type=float, nargs='+', required=True)
    sub.add_parser('minorant', parents=[common], help='quadratic minorant search')
    reproduce = sub.add_parser('reproduce', parents=[common], help='reproduce the worked examples')
    reproduce.add_argument('what', choices=['examples'])
    return parser


def parse_option(argv=None):
    args = build_parser().parse_args(argv)
    config = get_config(args)
    return args, config


# -----------------------------------------------------------------------------
# Argument helpers
# -----------------------------------------------------------------------------

def operator_from_args(args, config):
    given = [name for name in ('graph', 'builtin', 'expr') if getattr(args, name)]
    if len(given) != 1:
        raise UsageError("give exactly one of --graph, --builtin, --expr")
    if args.graph:
        return load_operator(args.graph, config)
    if args.expr:
        return Expression1D(args.expr)
    kwargs = {k: getattr(args, k) for k in ('a', 'b') if getattr(args, k) is not None}
    return create_operator(args.builtin, resolution=config.OPERATOR.UNIT_INTERVAL_RESOLUTION, **kwargs)


def graph_from_op(op, config):
    grid = np.linspace(-config.SOLVER.GRAPH_RANGE, config.SOLVER.GRAPH_RANGE, config.SOLVER.GRAPH_POINTS)
    return sample_graph(op, grid)


def sigma_from_args(args, default=0.0):
    if args.sigma is None:
        return None if default is None else ConstantSigma(default)
    return parse_sigma(args.sigma)


def pair_from_args(args):
    if args.x is None or args.xstar is None:
        raise UsageError("--x and --xstar are required")
    return PrimalDualPair(args.x, args.xstar)


def points_from_args(args, config, dim, default_count=100):
    if args.points:
        return load_points(args.points)[0]
    if args.x is not None and args.xstar is not None:
        return [pair_from_args(args)]
    rng = np.random.default_rng(config.SEED)
    values = rng.uniform(-5.0, 5.0, size=(args.random or default_count, 2 * dim))
    return [PrimalDualPair.from_stacked(v) for v in values]


# -----------------------------------------------------------------------------
# Grid export and example reproduction
# -----------------------------------------------------------------------------

def _axis(lo, hi, steps):
    return np.array([lo]) if lo == hi else np.linspace(lo, hi, steps)


def export_grid(op, x_range, xstar_range, steps, out_path, cfg=None, method='auto'):
    """Evaluate F_T on the Cartesian grid (x outer, x* inner) and write the grid CSV."""
    if steps < 2:
        raise UsageError(f"grid needs at least 2 steps, got {steps}")
    if not np.all(np.isfinite(list(x_range) + list(xstar_range))):
        raise UsageError("grid ranges must be finite")
    rows = []
    for x in _axis(*x_range, steps):
        for x_star in _axis(*xstar_range, steps):
            rows.append((x, x_star, evaluate_fitzpatrick(op, PrimalDualPair(x, x_star), cfg, method)))
    with open(out_path, 'w', newline='') as f:
        write_grid_csv(rows, f)
    return rows


def _closed_form_case(name, op, p, cfg, tol):
    fv = evaluate_fitzpatrick(op, p, cfg, method='sampled')
    expected = fitz_closed_form(op, p)
    error = abs(fv.value - expected) if fv.is_finite() else float('inf')
    passed = error <= tol
    return CheckReport(name, passed, tol - error, None if passed else (p,), {
        'sampled': fv.value,
        'closed_form': expected,
        'error': error,
        'status': fv.status.value,
    })


def _divergence_case(name, op, p, cfg):
    fv = evaluate_fitzpatrick(op, p, cfg, method='sampled')
    passed = fv.status is FitzStatus.DIVERGENT
    return CheckReport(name, passed, float('inf') if passed else 0.0, None if passed else (p,), {
        'status': fv.status.value,
        'growth_trace': fv.growth_trace,
    })


def reproduce_examples(config):
    """Closed form against sampled evaluation for the triangular and normal examples, divergence elsewhere."""
    cfg = WindowConfig.from_config(config)
    tol = config.REPRODUCE.TOL
    triangular, normal = create_operator('triangular'), create_operator('normal')
    unit = create_operator('unit_interval', resolution=config.OPERATOR.UNIT_INTERVAL_RESOLUTION)

    results = []
    for x in (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0):
        results.append(_closed_form_case(f'triangular x={x} x*=0', triangular, PrimalDualPair(x, 0.0), cfg, tol))
    for x_star in (-1.0, 0.5, 1.0):
        results.append(_divergence_case(f'triangular x=0 x*={x_star}', triangular, PrimalDualPair(0.0, x_star), cfg))
    for x in (-1.0, 0.0, 1.0, 2.0):
        results.append(_closed_form_case(f'normal x={x} x*=0', normal, PrimalDualPair(x, 0.0), cfg, tol))
    for x_star in (-1.0, 0.5, 1.0):
        results.append(_divergence_case(f'normal x=0 x*={x_star}', normal, PrimalDualPair(0.0, x_star), cfg))
    probes = np.linspace(-2.0, 2.0, 5)
    for x in probes:
        for x_star in probes:
            results.append(_divergence_case(f'unit_interval x={x} x*={x_star}', unit, PrimalDualPair(x, x_star), cfg))
    return results


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------

def cmd_eval(args, config):
    op = operator_from_args(args, config)
    return [evaluate_fitzpatrick(op, pair_from_args(args), WindowConfig.from_config(config), args.method or 'sampled')]


def cmd_grid(args, config):
    if not args.out:
        raise UsageError("grid needs --out for the CSV")
    op = operator_from_args(args, config)
    rows = export_grid(op, args.x_range, args.xstar_range, args.steps, args.out,
                       WindowConfig.from_config(config), args.method or 'auto')
    return [{'rows': len(rows), 'divergent': sum(not fv.is_finite() for _, _, fv in rows), 'csv': args.out}]


def cmd_check(args, config):
    graph = graph_from_op(operator_from_args(args, config), config)
    sigma = sigma_from_args(args)
    if args.what == 'sigma':
        return [check_sigma_monotone(graph, sigma, config.CHECK.TOL, config.CHECK.CHUNK_ROWS)]
    return [is_sigma_related(pair_from_args(args), graph, sigma, config.CHECK.TOL)]


def cmd_sigma_t(args, config):
    graph = graph_from_op(operator_from_args(args, config), config)
    if args.x is None:
        raise UsageError("--x is required")
    return [{'x': args.x, 'sigma_T': estimate_sigma_T(args.x, graph)},
            check_sigma_t_vanishing(graph, args.x, config.CHECK.TOL)]


def cmd_refute_max(args, config):
    graph = graph_from_op(operator_from_args(args, config), config)
    candidates, sigmas = load_points(args.candidates)
    sigmas = [0.0 if s is None else s for s in sigmas]
    return [refute_maximality(graph, sigma_from_args(args), candidates, sigmas, config.CHECK.TOL)]


def cmd_verify(args, config):
    window = WindowConfig.from_config(config)
    solver = SolverConfig.from_config(config)
    op = operator_from_args(args, config)
    tol = config.CHECK.TOL
    if args.what == 'inequality':
        points = points_from_args(args, config, op.dim)
        return [verify_fitz_inequality(op, points, window, sigma_from_args(args, default=None), tol)]
    if args.what == 'resolvent-bound':
        return [verify_resolvent_bound(op, sigma_from_args(args), pair_from_args(args), solver)]
    if args.what == 'convexity':
        rng = np.random.default_rng(config.SEED)
        count = args.random or 200
        values = rng.uniform(-5.0, 5.0, size=(count, 2, 2 * op.dim))
        lams = rng.uniform(0.0, 1.0, size=count)
        triples = [(PrimalDualPair.from_stacked(p), PrimalDualPair.from_stacked(q), lam)
                   for (p, q), lam in zip(values, lams)]
        return [verify_convexity(op, triples, window, tol)]

    graph = graph_from_op(op, config)
    if args.what == 'extension':
        if not args.super_graph:
            raise UsageError("--super-graph is required")
        super_graph = load_operator(args.super_graph, config).graph()
        points = points_from_args(args, config, graph.dim)
        return [verify_extension_monotonicity(graph, super_graph, points, config.CHECK.EXTENSION_TOL)]
    if args.what == 'inf-identity':
        points = points_from_args(args, config, graph.dim)
        return [verify_fitz_inf_identity(graph, p, config.CHECK.IDENTITY_TOL) for p in points]
    if args.what == 'membership':
        return [membership_bound_check(graph, sigma_from_args(args), pair_from_args(args), tol)]
    # m-set
    sigma = sigma_from_args(args)
    if args.x is not None and args.xstar is not None:
        p = pair_from_args(args)
        return [{'point': p, 'm_sup': m_set_value(graph, sigma, p)}]
    points = load_points(args.points)[0] if args.points else None
    return [verify_m_set_finiteness(graph, sigma, points, tol)]


def cmd_resolvent(args, config):
    op = operator_from_args(args, config)
    return [resolvent_solve(op, args.z, SolverConfig.from_config(config))]


def cmd_minorant(args, config):
    op = operator_from_args(args, config)
    shift, report = quadratic_minorant_search(op, MinorantConfig.from_config(config), WindowConfig.from_config(config))
    return [{'shift': shift}, report]


def cmd_reproduce(args, config):
    return reproduce_examples(config)


COMMANDS = {
    'eval': cmd_eval,
    'grid': cmd_grid,
    'check': cmd_check,
    'sigma-t': cmd_sigma_t,
    'refute-max': cmd_refute_max,
    'verify': cmd_verify,
    'resolvent': cmd_resolvent,
    'minorant': cmd_minorant,
    'reproduce': cmd_reproduce,
}


def main(config, args):
    logger = create_logger(output_dir=config.OUTPUT or None, level=config.LOG_LEVEL)
    command = args.command + (f" {args.what}" if getattr(args, 'what', None) else '')
    logger.info(f"running {command}")

    start = time.perf_counter()
    results = COMMANDS[args.command](args, config)
    timing_ms = (time.perf_counter() - start) * 1000.0

    inputs = {k: v for k, v in sorted(vars(args).items()) if v is not None}
    report = RunReport(command, inputs, results, timing_ms, __version__)
    failed = [r for r in results if isinstance(r, CheckReport) and not r.passed]
    for r in failed:
        logger.warning(f"{r.name} failed with margin {r.margin}")

    text = report.to_json()
    # grid writes its CSV to --out, the report always goes to stdout
    if args.out and args.command != 'grid':
        with open(args.out, 'w') as f:
            f.write(text)
        logger.info(f"report saved to {args.out}")
    else:
        sys.stdout.write(text)
    return 1 if failed else 0


def run_command(argv=None):
    """Run one CLI invocation, returning 0 (passed), 1 (a check failed) or 2 (usage or input error)."""
    try:
        args, config = parse_option(argv)
    except SystemExit as e:
        return 0 if not e.code else 2
    try:
        return main(config, args)
    except (FitzError, OSError) as e:
        sys.stderr.write(f"fitz: error: {e}\n")
        return 2


if __name__ == '__main__':
    sys.exit(run_command(sys.argv[1:]))
