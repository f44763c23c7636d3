"""
Finitely checkable consequences of the Fitzpatrick theory: the graph inequality with its
equality case, the sup/inf identity, monotonicity under graph extension, the membership
bound, the M-set sup and convexity.
"""
import logging
import math

import numpy as np

from .fitzpatrick import FitzStatus, evaluate_fitzpatrick, fitz_exact_finite
from ..operators import PrimalDualPair
from ..utils.errors import NotAnExtension, NotInGraph
from ..utils.report import CheckReport

logger = logging.getLogger(__name__)


def verify_fitz_inequality(op, test_points, cfg=None, sigma=None, tol=1e-9, maximal=True):
    """
    F_T(x, x*) >= <x*, x> at every test point with a finite evaluation.

    With a sigma, on-graph points with sigma(x) = 0 are checked for equality, and off-graph
    points where F_T meets <x*, x> are counted. Neither count fails the check.
    """
    margin, witness = math.inf, None
    divergent, equality_points, equality_missed, off_graph_equalities = 0, [], [], []
    for i, p in enumerate(test_points):
        fv = evaluate_fitzpatrick(op, p, cfg)
        if fv.status is FitzStatus.DIVERGENT:
            divergent += 1
            continue
        gap = fv.value - p.pairing()
        margin = min(margin, gap)
        if gap < -tol and witness is None:
            witness = (p,)
        if sigma is None:
            continue
        if op.contains(p):
            if sigma.value(p.x) <= tol:
                (equality_points if abs(gap) <= tol else equality_missed).append(i)
        elif abs(gap) <= tol:
            off_graph_equalities.append(i)

    if off_graph_equalities and maximal:
        logger.info(f"{len(off_graph_equalities)} off-graph points meet F = <x*, x>")
    return CheckReport('fitz_inequality', witness is None, margin, witness, {
        'maximal_asserted': maximal,
        'points': len(test_points),
        'divergent': divergent,
        'equality_points': equality_points,
        'equality_missed': equality_missed,
        'off_graph_equalities': off_graph_equalities,
        'tol': tol,
    })


def verify_fitz_inf_identity(graph, p, tol=1e-9):
    """F_T(x, x*) = <x*, x> - inf over gr T of <y* - x*, y - x>."""
    left = fitz_exact_finite(graph, p).value
    inner = np.einsum('ij,ij->i', graph.x_stars - p.x_star, graph.xs - p.x)
    right = p.pairing() - float(np.min(inner))
    margin = tol - abs(left - right)
    passed = margin >= 0
    return CheckReport('fitz_inf_identity', passed, margin, None if passed else (p,),
                       {'sup_side': left, 'inf_side': right})


def verify_extension_monotonicity(graph_T, graph_S, test_points, tol=1e-12):
    """gr T within gr S implies F_T <= F_S."""
    if not graph_S.includes(graph_T):
        raise NotAnExtension("the second graph does not contain the first")
    margin, witness = math.inf, None
    for p in test_points:
        gap = fitz_exact_finite(graph_S, p).value - fitz_exact_finite(graph_T, p).value
        margin = min(margin, gap)
        if gap < -tol and witness is None:
            witness = (p,)
    return CheckReport('extension_monotonicity', witness is None, margin, witness,
                       {'points': len(test_points), 'tol': tol})


def _sigma_sup(graph, sigma, p):
    """max over the graph domain of min{sigma(x), sigma(y)} ||x - y||."""
    s_x = sigma.value(p.x)
    t = sigma.values(graph.xs)
    dist = np.linalg.norm(graph.xs - p.x, axis=1)
    return float(np.max(np.minimum(s_x, t) * dist))


def membership_bound_check(graph, sigma, p, tol=1e-9):
    """
    On gr T, <x*, x> + sup_y min{sigma(x), sigma(y)} ||x - y|| bounds F_T from above.
    Only the checkable direction is asserted: a point on the graph never breaks the bound.
    """
    bound = p.pairing() + _sigma_sup(graph, sigma, p)
    fitz = fitz_exact_finite(graph, p).value
    in_graph = graph.contains(p)
    excluded = bound < fitz - tol
    passed = not (in_graph and excluded)
    margin = bound - fitz + tol if in_graph else math.inf
    return CheckReport('membership_bound', passed, margin, None if passed else (p,), {
        'B': bound,
        'F': fitz,
        'in_graph': in_graph,
        'excluded_by_bound': excluded,
    })


def m_set_value(graph, sigma, p):
    if not graph.contains(p):
        raise NotInGraph(f"{p} is not a point of the graph")
    return _sigma_sup(graph, sigma, p)


def verify_m_set_finiteness(graph, sigma, points=None, tol=1e-9):
    """Every point with a finite M-set sup lies in the domain of F_T, with F_T >= <x*, x> there."""
    points = graph.points if points is None else list(points)
    margin, witness, rows = math.inf, None, []
    for p in points:
        s = m_set_value(graph, sigma, p)
        fv = fitz_exact_finite(graph, p)
        gap = fv.value - p.pairing()
        rows.append({'point': p, 'm_sup': s, 'F': fv.value})
        ok = (not math.isfinite(s)) or (math.isfinite(fv.value) and gap >= -tol)
        margin = min(margin, gap)
        if not ok and witness is None:
            witness = (p,)
    return CheckReport('m_set_finiteness', witness is None, margin, witness, {'rows': rows})


def verify_convexity(op_or_graph, triples, cfg=None, tol=1e-9):
    """F(lam p + (1 - lam) q) <= lam F(p) + (1 - lam) F(q), componentwise in (x, x*)."""
    margin, witness, skipped = math.inf, None, 0
    for p, q, lam in triples:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"convex weight must lie in [0, 1], got {lam}")
        fp = evaluate_fitzpatrick(op_or_graph, p, cfg)
        fq = evaluate_fitzpatrick(op_or_graph, q, cfg)
        if not (fp.is_finite() and fq.is_finite()):
            skipped += 1
            continue
        mid = PrimalDualPair(lam * p.x + (1.0 - lam) * q.x, lam * p.x_star + (1.0 - lam) * q.x_star)
        fm = evaluate_fitzpatrick(op_or_graph, mid, cfg)
        rhs = lam * fp.value + (1.0 - lam) * fq.value
        slack = rhs - fm.value if fm.is_finite() else -math.inf
        margin = min(margin, slack)
        if slack < -tol and witness is None:
            witness = (p, q)
    return CheckReport('convexity', witness is None, margin, witness,
                       {'triples': len(triples), 'skipped_divergent': skipped, 'tol': tol})
