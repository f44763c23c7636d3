"""
sigma-monotonicity certificates on finite graphs.

A graph is sigma-monotone when every pair of its points satisfies

    <x* - y*, x - y> >= -min{sigma(x), sigma(y)} ||x - y||.

All scans run over row blocks and reduce deterministically: the reported witness
is the first minimizing pair in index-lexicographic order.
"""
import logging
import math

import numpy as np

from ..operators import PrimalDualPair
from ..operators.operator import MATCH_TOL
from ..utils.errors import NotInDomain, NotSigmaMonotone
from ..utils.report import CheckReport

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


def pair_slack(X, X_star, s, Y, Y_star, t):
    """lhs - rhs of the sigma-monotonicity inequality between rows of (X, X*) and (Y, Y*)."""
    D = X[:, None, :] - Y[None, :, :]
    D_star = X_star[:, None, :] - Y_star[None, :, :]
    lhs = np.einsum('ijk,ijk->ij', D_star, D)
    dist = np.linalg.norm(D, axis=2)
    return lhs + np.minimum(s[:, None], t[None, :]) * dist


def check_sigma_monotone(graph, sigma, tol=DEFAULT_TOL, chunk_rows=512):
    """Certify sigma-monotonicity of a finite graph over all unordered pairs i < j."""
    s = sigma.values(graph.xs)
    n = len(graph)
    best, best_ij = math.inf, None
    for start in range(0, n, chunk_rows):
        rows = slice(start, min(start + chunk_rows, n))
        slack = pair_slack(graph.xs[rows], graph.x_stars[rows], s[rows],
                           graph.xs, graph.x_stars, s)
        # keep j > i only
        i_idx = np.arange(rows.start, rows.stop)[:, None]
        slack = np.where(np.arange(n)[None, :] > i_idx, slack, math.inf)
        flat = int(np.argmin(slack))
        i, j = divmod(flat, n)
        # blocks are visited in row order, strict < keeps the first minimizer
        if slack[i, j] < best:
            best, best_ij = float(slack[i, j]), (rows.start + i, j)

    passed = best >= -tol
    witness = None
    if not passed:
        i, j = best_ij
        witness = (PrimalDualPair(graph.xs[i], graph.x_stars[i]), PrimalDualPair(graph.xs[j], graph.x_stars[j]))
        logger.debug(f"sigma-monotonicity fails at pair {best_ij} with slack {best}")
    return CheckReport('sigma_monotone', passed, best, witness, {'pairs': n * (n - 1) // 2, 'tol': tol})


def related_slack(candidate, graph, sigma_ext):
    """Slack of the candidate against every graph point, one value per graph row."""
    s_x = sigma_ext.values(candidate.x[None, :])
    t = sigma_ext.values(graph.xs)
    return pair_slack(candidate.x[None, :], candidate.x_star[None, :], s_x,
                      graph.xs, graph.x_stars, t)[0]


def is_sigma_related(candidate, graph, sigma_ext, tol=DEFAULT_TOL):
    slack = related_slack(candidate, graph, sigma_ext)
    j = int(np.argmin(slack))
    margin = float(slack[j])
    passed = margin >= -tol
    witness = None if passed else (candidate, PrimalDualPair(graph.xs[j], graph.x_stars[j]))
    return CheckReport('sigma_related', passed, margin, witness, {'tol': tol})


def estimate_sigma_T(x, graph):
    """
    sigma_T(x): the smallest a >= 0 with <x* - y*, x - y> >= -a ||x - y|| for every
    x* in T(x) and every (y, y*) in the graph. Pairs with y = x are vacuous.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    at_x = graph.matches(x)
    if not np.any(at_x):
        raise NotInDomain(f"x={x.tolist()} is not in the domain of the graph")
    others = ~at_x
    if not np.any(others):
        return 0.0
    Y, Y_star = graph.xs[others], graph.x_stars[others]
    D = x[None, :] - Y
    dist = np.linalg.norm(D, axis=1)
    best = 0.0
    for x_star in graph.x_stars[at_x]:
        ratio = -np.einsum('ij,ij->i', x_star[None, :] - Y_star, D) / dist
        best = max(best, float(np.max(ratio)))
    return best


def estimate_sigma_T_graph(graph):
    """sigma_T at every graph point, in graph order."""
    return np.array([estimate_sigma_T(x, graph) for x in graph.xs])


def check_sigma_t_vanishing(graph, x, tol=DEFAULT_TOL):
    """
    If F_T(x, x*) = <x*, x> for every x* in T(x), then sigma_T(x) = 0.
    Passes vacuously when the hypothesis fails at some x*.
    """
    from .fitzpatrick import fitz_exact_finite

    x = np.asarray(x, dtype=float).reshape(-1)
    at_x = graph.matches(x)
    if not np.any(at_x):
        raise NotInDomain(f"x={x.tolist()} is not in the domain of the graph")
    gaps = []
    for x_star in graph.x_stars[at_x]:
        p = PrimalDualPair(x, x_star)
        gaps.append(fitz_exact_finite(graph, p).value - p.pairing())
    hypothesis = all(abs(g) <= tol for g in gaps)
    sigma_t = estimate_sigma_T(x, graph)
    passed = (not hypothesis) or sigma_t <= tol
    witness = None if passed else (PrimalDualPair(x, graph.x_stars[at_x][0]),)
    return CheckReport('sigma_t_vanishing', passed, tol - sigma_t if hypothesis else math.inf, witness,
                       {'hypothesis_holds': hypothesis, 'sigma_T': sigma_t, 'gaps': gaps})


def refute_maximality(graph, sigma, candidates, sigma_candidate_values, tol=DEFAULT_TOL):
    """
    Search for a point outside the graph that is sigma'-related to all of it. Finding
    one refutes maximality; finding none proves nothing.
    """
    candidates = list(candidates)
    sigma_candidate_values = list(sigma_candidate_values)
    if len(candidates) != len(sigma_candidate_values):
        raise ValueError(f"{len(candidates)} candidates but {len(sigma_candidate_values)} sigma values")
    base = check_sigma_monotone(graph, sigma, tol)
    if not base.passed:
        raise NotSigmaMonotone(f"graph is not sigma-monotone (margin {base.margin})")

    closest, examined, skipped = math.inf, 0, 0
    for candidate, value in zip(candidates, sigma_candidate_values):
        if graph.contains(candidate):
            skipped += 1
            continue
        # sigma' must agree with sigma on D(T)
        in_domain = bool(np.any(graph.matches(candidate.x, MATCH_TOL)))
        sigma_ext = sigma if in_domain else sigma.extend(candidate.x, value)
        report = is_sigma_related(candidate, graph, sigma_ext, tol)
        examined += 1
        if report.passed:
            logger.info(f"maximality refuted by {candidate}")
            return CheckReport('refute_maximality', False, min(0.0, -report.margin), (candidate,),
                               {'examined': examined, 'skipped_on_graph': skipped, 'related_margin': report.margin})
        closest = min(closest, -report.margin)
    return CheckReport('refute_maximality', True, closest, None,
                       {'examined': examined, 'skipped_on_graph': skipped})
