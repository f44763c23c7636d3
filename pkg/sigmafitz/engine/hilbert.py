"""
Resolvents of I + T, the nearness bound for sigma-related pairs, the maximality probe of
monotone operators, and the quadratic minorant of F_T + 1/2 ||.||^2.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .fitzpatrick import FitzStatus, WindowConfig, evaluate_fitzpatrick, fitz_closed_form, has_closed_form
from .sigma_analysis import check_sigma_monotone, is_sigma_related
from ..operators import ConstantSigma, PrimalDualPair, as_vector, sample_graph
from ..utils.errors import ConfigError, DimensionMismatch, NoSolutionInRange, NowhereFinite
from ..utils.report import CheckReport

logger = logging.getLogger(__name__)

# cap on the number of points of the initial minorant grid
MAX_GRID_POINTS = 200_000


@dataclass(frozen=True)
class SolverConfig:
    scan_range: float = 64.0
    scan_points: int = 2 ** 16 + 1
    tol: float = 1e-8
    max_refine_iters: int = 200
    graph_range: float = 4.0
    graph_points: int = 801

    def __post_init__(self):
        if self.scan_points < 3:
            raise ConfigError(f"scan_points must be >= 3, got {self.scan_points}")
        if not self.tol > 0:
            raise ConfigError(f"solver tol must be positive, got {self.tol}")
        if not (self.scan_range > 0 and self.graph_range > 0):
            raise ConfigError("scan and graph ranges must be positive")

    @classmethod
    def from_config(cls, config):
        return cls(scan_range=float(config.SOLVER.SCAN_RANGE),
                   scan_points=int(config.SOLVER.SCAN_POINTS),
                   tol=float(config.SOLVER.TOL),
                   max_refine_iters=int(config.SOLVER.MAX_REFINE_ITERS),
                   graph_range=float(config.SOLVER.GRAPH_RANGE),
                   graph_points=int(config.SOLVER.GRAPH_POINTS))

    def graph_grid(self):
        return np.linspace(-self.graph_range, self.graph_range, self.graph_points)


@dataclass(frozen=True)
class MinorantConfig:
    box: float = 4.0
    steps: int = 41
    refine_steps: int = 30
    verify_samples: int = 1000
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.steps < 3:
            raise ConfigError(f"minorant grid needs at least 3 steps, got {self.steps}")
        if not self.box > 0:
            raise ConfigError(f"minorant box must be positive, got {self.box}")

    @classmethod
    def from_config(cls, config):
        return cls(box=float(config.MINORANT.BOX),
                   steps=int(config.MINORANT.STEPS),
                   refine_steps=int(config.MINORANT.REFINE_STEPS),
                   verify_samples=int(config.MINORANT.VERIFY_SAMPLES),
                   tol=float(config.MINORANT.TOL),
                   seed=int(config.SEED))


@dataclass(frozen=True)
class ResolventSolution:
    x: np.ndarray
    x_star: np.ndarray
    residual: float
    method: str = 'scan'
    converged: bool = True

    @property
    def pair(self):
        return PrimalDualPair(self.x, self.x_star)

    def to_dict(self):
        return {'x': self.x.tolist(), 'x_star': self.x_star.tolist(), 'residual': self.residual,
                'method': self.method, 'converged': self.converged}


# -----------------------------------------------------------------------------
# Resolvent
# -----------------------------------------------------------------------------

def _resolvent_finite(graph, z, cfg):
    if z.size != graph.dim:
        raise DimensionMismatch(f"graph has dimension {graph.dim}, got z of dimension {z.size}")
    residuals = np.linalg.norm(graph.xs + graph.x_stars - z, axis=1)
    j = int(np.argmin(residuals))
    return ResolventSolution(graph.xs[j].copy(), graph.x_stars[j].copy(), float(residuals[j]),
                             method='graph', converged=bool(residuals[j] <= cfg.tol))


def _bisect(g, lo, hi, g_lo, max_iter):
    """Shrink a sign-change bracket of g down to adjacent floats, return the better endpoint."""
    g_hi = g(hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid, 0.0
        if math.copysign(1.0, g_mid) == math.copysign(1.0, g_lo):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    # ties go to the smaller x
    if abs(g_lo) <= abs(g_hi):
        return lo, g_lo
    return hi, g_hi


def _first_root_on_branch(op, xs, g_branch, branch, z, cfg):
    def g(t):
        return t + float(op.images(np.array([t]))[0, branch]) - z

    zeros = g_branch == 0.0
    changes = np.flatnonzero(g_branch[:-1] * g_branch[1:] < 0)
    events = sorted([(int(i), 'zero') for i in np.flatnonzero(zeros)] + [(int(i), 'bracket') for i in changes])
    for i, kind in events:
        if kind == 'zero':
            return xs[i], 0.0
        root, value = _bisect(g, xs[i], xs[i + 1], g_branch[i], cfg.max_refine_iters)
        # a jump of T can fake a sign change
        if abs(value) <= cfg.tol:
            return root, value
    return None


def resolvent_solve(op, z, cfg=None):
    """
    Solve x + x* = z with x* in T(x).

    Finite graphs return the element nearest to a solution. Continuous 1-D operators are scanned
    on [-scan_range, scan_range], every sign change is bisected, and the smallest root wins.
    """
    cfg = cfg or SolverConfig()
    z = as_vector(z, 'z')
    if op.is_finite:
        return _resolvent_finite(op.graph(), z, cfg)
    if op.dim != 1 or z.size != 1:
        raise DimensionMismatch("continuous resolvents are 1-D")

    z0 = float(z[0])
    xs = np.linspace(-cfg.scan_range, cfg.scan_range, cfg.scan_points)
    images = op.images(xs)
    G = xs[:, None] + images - z0

    best = None
    for branch in range(G.shape[1]):
        found = _first_root_on_branch(op, xs, G[:, branch], branch, z0, cfg)
        if found is not None and (best is None or found[0] < best[0]):
            best = (found[0], branch)
    if best is not None:
        x, branch = best
        x_star = float(op.images(np.array([x]))[0, branch])
        return ResolventSolution(np.array([x]), np.array([x_star]), abs(x + x_star - z0), method='bisection')

    abs_g = np.abs(G)
    flat = int(np.argmin(abs_g))
    i, branch = divmod(flat, G.shape[1])
    scan_min = float(abs_g[i, branch])
    if scan_min <= cfg.tol:
        return ResolventSolution(np.array([xs[i]]), np.array([images[i, branch]]), scan_min, method='scan')
    raise NoSolutionInRange(
        f"x + T(x) = {z0} has no solution in [-{cfg.scan_range}, {cfg.scan_range}], "
        f"smallest residual {scan_min:.3e} at x={xs[i]}",
        scan_minimum=scan_min, scan_argmin=float(xs[i]))


# -----------------------------------------------------------------------------
# Nearness bound and maximality probe
# -----------------------------------------------------------------------------

def verify_resolvent_bound(op, sigma, related, cfg=None, tol=None):
    """
    For (y, y*) sigma-related to gr T and x + x* = y + y*, the solved pair satisfies
    ||x* - y*|| = ||x - y|| <= sigma(x), and (y, y*) lies on the graph when sigma(x) = 0.
    """
    cfg = cfg or SolverConfig()
    tol = cfg.tol if tol is None else tol
    graph = sample_graph(op, cfg.graph_grid())
    pre = is_sigma_related(related, graph, sigma)
    if not pre.passed:
        logger.debug(f"{related} is not sigma-related to the sampled graph, bound skipped")
        return CheckReport('resolvent_bound', True, math.inf, None,
                           {'precondition': False, 'skipped': True, 'related_margin': pre.margin})

    sol = resolvent_solve(op, related.x + related.x_star, cfg)
    dist = float(np.linalg.norm(sol.x - related.x))
    dist_star = float(np.linalg.norm(sol.x_star - related.x_star))
    s = sigma.value(sol.x)
    slacks = [tol - abs(dist_star - dist), s + tol - dist]
    if s <= tol:
        slacks += [tol - dist, tol - dist_star]
    margin = min(slacks)
    passed = margin >= 0
    return CheckReport('resolvent_bound', passed, margin, None if passed else (related, sol.pair), {
        'precondition': True,
        'skipped': False,
        'solution': sol,
        'distance': dist,
        'distance_star': dist_star,
        'sigma_at_solution': s,
        # y - x = x* - y* holds by construction, up to the residual
        'identity_error': float(np.max(np.abs((related.x - sol.x) - (sol.x_star - related.x_star)))),
    })


def corollary_monotone_maximality_probe(op, candidates, cfg=None, tol=None):
    """Monotonically related candidates must be solved back onto themselves."""
    cfg = cfg or SolverConfig()
    tol = cfg.tol if tol is None else tol
    zero = ConstantSigma(0.0)
    graph = sample_graph(op, cfg.graph_grid())
    mono = check_sigma_monotone(graph, zero)
    if not mono.passed:
        return CheckReport('monotone_maximality_probe', False, mono.margin, mono.witness,
                           {'precondition': False})

    margin, witness, skipped, solutions = math.inf, None, [], []
    for i, c in enumerate(candidates):
        if not is_sigma_related(c, graph, zero).passed:
            skipped.append(i)
            continue
        sol = resolvent_solve(op, c.x + c.x_star, cfg)
        solutions.append(sol)
        slack = tol - max(np.linalg.norm(sol.x - c.x), np.linalg.norm(sol.x_star - c.x_star))
        margin = min(margin, float(slack))
        if slack < 0 and witness is None:
            witness = (c, sol.pair)
    return CheckReport('monotone_maximality_probe', witness is None, margin, witness,
                       {'precondition': True, 'skipped_unrelated': skipped, 'solutions': solutions})


# -----------------------------------------------------------------------------
# Quadratic minorant
# -----------------------------------------------------------------------------

def _fitz_batch(op, P, window_cfg):
    """F_T at every row of the stacked (M, 2n) array P, +inf where divergent."""
    n = P.shape[1] // 2
    if op.is_finite:
        graph = op.graph()
        c = np.einsum('ij,ij->i', graph.x_stars, graph.xs)
        out = np.empty(P.shape[0])
        for start in range(0, P.shape[0], 4096):
            block = P[start:start + 4096]
            terms = block[:, n:] @ graph.xs.T + block[:, :n] @ graph.x_stars.T - c[None, :]
            out[start:start + 4096] = terms.max(axis=1)
        return out
    if has_closed_form(op):
        return np.array([fitz_closed_form(op, PrimalDualPair.from_stacked(p)) for p in P])
    values = []
    for p in P:
        fv = evaluate_fitzpatrick(op, PrimalDualPair.from_stacked(p), window_cfg)
        values.append(fv.value if fv.status is FitzStatus.FINITE else math.inf)
    return np.array(values)


def _objective(op, P, window_cfg):
    P = np.atleast_2d(P)
    return _fitz_batch(op, P, window_cfg) + 0.5 * np.einsum('ij,ij->i', P, P)


def _axis(box, steps):
    k = max(1, (steps - 1) // 2)
    # symmetric, with 0 exactly on the grid
    return box * np.arange(-k, k + 1) / k


def quadratic_minorant_search(op, cfg=None, window_cfg=None):
    """
    Minimize G = F_T + 1/2 ||p||^2 over a grid and a halving compass search, then verify
    G(p) >= 1/2 ||p + v||^2 with the shift v = -argmin at random points of the box.
    """
    cfg = cfg or MinorantConfig()
    window_cfg = window_cfg or WindowConfig()
    n = op.dim
    d = 2 * n
    steps = cfg.steps
    if steps ** d > MAX_GRID_POINTS:
        steps = max(3, int(MAX_GRID_POINTS ** (1.0 / d)))
        logger.warning(f"minorant grid reduced to {steps} points per axis in dimension {d}")
    axis = _axis(cfg.box, steps)
    P = np.stack(np.meshgrid(*([axis] * d), indexing='ij'), axis=-1).reshape(-1, d)
    G = _objective(op, P, window_cfg)
    if not np.any(np.isfinite(G)):
        raise NowhereFinite(f"F_T is +inf on every point of the search box [-{cfg.box}, {cfg.box}]^{d}")

    j = int(np.argmin(G))
    best, best_val = P[j].copy(), float(G[j])
    grid_step = h = axis[1] - axis[0]
    directions = np.vstack([np.eye(d), -np.eye(d)])
    halvings, moves = 0, 0
    while halvings < cfg.refine_steps and moves < 100 * cfg.refine_steps:
        trial = best[None, :] + h * directions
        values = _objective(op, trial, window_cfg)
        k = int(np.argmin(values))
        if values[k] < best_val:
            best, best_val = trial[k], float(values[k])
            moves += 1
        else:
            h *= 0.5
            halvings += 1

    # + 0.0 drops negative zeros
    shift = PrimalDualPair.from_stacked(-best + 0.0)
    v = shift.stacked()
    rng = np.random.default_rng(cfg.seed)
    uniform = rng.uniform(-cfg.box, cfg.box, size=(cfg.verify_samples, d))
    # F_T may be finite only on a thin set that uniform draws miss: also use the finite grid
    # points and copies of them jittered along one random axis
    on_grid = np.isfinite(G)
    anchors = P[on_grid]
    jittered = anchors[rng.integers(anchors.shape[0], size=cfg.verify_samples)]
    axes = rng.integers(d, size=cfg.verify_samples)
    jittered[np.arange(cfg.verify_samples), axes] += rng.uniform(-grid_step, grid_step, size=cfg.verify_samples)
    drawn = np.vstack([uniform, jittered])
    Q = np.vstack([anchors, drawn])
    GQ = np.concatenate([G[on_grid], _objective(op, drawn, window_cfg)])
    finite = np.isfinite(GQ)
    slack = GQ[finite] - 0.5 * np.sum((Q[finite] + v) ** 2, axis=1)
    margin = float(np.min(slack)) if slack.size else math.inf
    passed = margin >= -cfg.tol
    witness = None
    if not passed:
        witness = (PrimalDualPair.from_stacked(Q[finite][int(np.argmin(slack))]),)
    logger.info(f"minorant argmin {best.tolist()} with G = {best_val:.6g}, verification margin {margin:.3e}")
    report = CheckReport('quadratic_minorant', passed, margin, witness, {
        'argmin': best,
        'min_value': best_val,
        'hypothesis_holds': best_val >= -cfg.tol,
        'grid_steps': steps,
        'verified': int(finite.sum()),
        'skipped_divergent': int((~finite).sum()),
        'tol': cfg.tol,
    })
    return shift, report


def verify_shift_inequality(graph, shift, points, tol=1e-6):
    """
    With (z*, z) = shift: <x* - z*, x - z> >= 1/2 ||z + z*||^2 + inf over gr T of <x* - y*, x - y>.
    """
    if shift.dim != graph.dim:
        raise DimensionMismatch(f"graph has dimension {graph.dim}, shift has dimension {shift.dim}")
    z_star, z = shift.x, shift.x_star
    rhs_const = 0.5 * float(np.dot(z + z_star, z + z_star))
    margin, witness = math.inf, None
    for p in points:
        inf_gr = float(np.min(np.einsum('ij,ij->i', p.x_star - graph.x_stars, p.x - graph.xs)))
        slack = float(np.dot(p.x_star - z_star, p.x - z)) - rhs_const - inf_gr
        margin = min(margin, slack)
        if slack < -tol and witness is None:
            witness = (p,)
    return CheckReport('shift_inequality', witness is None, margin, witness,
                       {'z': z, 'z_star': z_star, 'points': len(points), 'tol': tol})
