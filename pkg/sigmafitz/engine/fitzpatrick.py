"""
Evaluation of the Fitzpatrick function

    F_T(x, x*) = sup over (y, y*) in gr T of <x*, y> + <y*, x> - <y*, y>

exactly on finite graphs, on nested windows for continuous 1-D operators, and in
closed form for the catalogued builtins.
"""
import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..operators import Builtin, PrimalDualPair
from ..utils.errors import ConfigError, DimensionMismatch, EmptyGraph, UnsupportedKind

logger = logging.getLogger(__name__)


class FitzStatus(enum.Enum):
    FINITE = 'finite'
    DIVERGENT = 'divergent'


@dataclass(frozen=True)
class FitzValue:
    status: FitzStatus
    value: float
    witness: PrimalDualPair = None
    growth_trace: tuple = ()
    method: str = 'exact'
    stabilized: bool = True

    def is_finite(self):
        return self.status is FitzStatus.FINITE

    def to_dict(self):
        return {
            'status': self.status.value,
            'value': self.value if self.is_finite() else math.inf,
            'witness': None if self.witness is None else self.witness.to_dict(),
            'growth_trace': [list(t) for t in self.growth_trace],
            'method': self.method,
            'stabilized': self.stabilized,
        }


@dataclass(frozen=True)
class WindowConfig:
    radii: tuple = tuple(float(2 ** k) for k in range(13))
    samples_per_window: int = 4097
    growth_threshold: float = 0.1
    tol: float = 1e-9

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if not radii or any(b <= a for a, b in zip(radii, radii[1:])) or radii[0] <= 0:
            raise ConfigError(f"window radii must be positive and strictly increasing, got {radii}")
        if self.samples_per_window < 3:
            raise ConfigError(f"samples_per_window must be >= 3, got {self.samples_per_window}")
        object.__setattr__(self, 'radii', radii)

    @classmethod
    def from_config(cls, config):
        return cls(radii=tuple(config.WINDOW.RADII),
                   samples_per_window=int(config.WINDOW.SAMPLES),
                   growth_threshold=float(config.WINDOW.GROWTH_THRESHOLD),
                   tol=float(config.WINDOW.TOL))


def affine_terms(Y, Y_star, p):
    """<x*, y> + <y*, x> - <y*, y> for every graph row (y, y*)."""
    if Y.shape[1] != p.dim:
        raise DimensionMismatch(f"graph has dimension {Y.shape[1]}, got a pair of dimension {p.dim}")
    return Y @ p.x_star + Y_star @ p.x - np.einsum('ij,ij->i', Y_star, Y)


def fitz_exact_finite(graph, p):
    if len(graph) == 0:
        raise EmptyGraph("the Fitzpatrick function of an empty graph is -inf")
    terms = affine_terms(graph.xs, graph.x_stars, p)
    # argmax returns the first maximizer
    j = int(np.argmax(terms))
    return FitzValue(FitzStatus.FINITE, float(terms[j]),
                     witness=PrimalDualPair(graph.xs[j], graph.x_stars[j]), method='exact')


def windowed_sups(op, p, cfg):
    """Cumulative windowed suprema as a list of (R_k, sup_k, witness_k)."""
    trace = []
    if op.is_finite:
        graph = op.graph()
        terms = affine_terms(graph.xs, graph.x_stars, p)
        radius = np.max(np.abs(graph.xs), axis=1)
        for R in cfg.radii:
            # windows are nested, so the masked sup is already cumulative
            masked = np.where(radius <= R, terms, -np.inf)
            j = int(np.argmax(masked))
            if masked[j] == -np.inf:
                trace.append((R, -math.inf, None))
            else:
                trace.append((R, float(masked[j]), PrimalDualPair(graph.xs[j], graph.x_stars[j])))
        return trace

    if p.dim != op.dim:
        raise DimensionMismatch(f"{op.kind} operator is {op.dim}-D, got a pair of dimension {p.dim}")
    best, best_pair = -math.inf, None
    for R in cfg.radii:
        ys = np.linspace(-R, R, cfg.samples_per_window)
        Y, Y_star = op.sample(ys)
        terms = affine_terms(Y, Y_star, p)
        j = int(np.argmax(terms))
        if terms[j] > best:
            best, best_pair = float(terms[j]), PrimalDualPair(Y[j], Y_star[j])
        trace.append((R, best, best_pair))
    return trace


def _has_growth_run(trace, threshold, run=3):
    count = 0
    for (_, prev, _), (R, cur, _) in zip(trace, trace[1:]):
        grew = math.isfinite(prev) and cur - prev > 0 and cur - prev >= threshold * R
        count = count + 1 if grew else 0
        if count >= run:
            return True
    return False


def fitz_sampled(op, p, cfg=None):
    cfg = cfg or WindowConfig()
    trace = windowed_sups(op, p, cfg)
    sups = [s for _, s, _ in trace]
    value, witness = sups[-1], trace[-1][2]
    if value == -math.inf:
        raise EmptyGraph("no graph point falls inside the largest window")
    growth = tuple((R, s) for R, s, _ in trace)

    last = sups[-3:]
    if len(last) == 3 and all(math.isfinite(s) for s in last) and \
            max(last) - min(last) <= cfg.tol * (1.0 + abs(value)):
        return FitzValue(FitzStatus.FINITE, value, witness=witness, method='sampled')
    if _has_growth_run(trace, cfg.growth_threshold):
        logger.debug(f"windowed sup keeps growing at {p}: {growth}")
        return FitzValue(FitzStatus.DIVERGENT, math.inf, growth_trace=growth, method='sampled')
    logger.info(f"windowed sup at {p} neither stabilized nor diverged, reporting the last window")
    return FitzValue(FitzStatus.FINITE, value, witness=witness, method='sampled', stabilized=False)


def _triangular_closed_form(x, x_star):
    if x_star != 0.0:
        return math.inf
    # 1/4 (x+1)^2 only holds on [-1, 1], outside the sup is attained at y = 0 or on the tails
    if x < -1.0:
        return 0.0
    if x > 1.0:
        return x
    return 0.25 * (x + 1.0) ** 2


def _normal_closed_form(x, x_star):
    if x_star != 0.0:
        return math.inf
    root = math.hypot(x, 1.0)
    # 1 / (2 (sqrt(x^2+1) - x)) == (sqrt(x^2+1) + x) / 2, pick the form without cancellation
    if x >= 0.0:
        return 0.5 * (root + x)
    return 1.0 / (2.0 * (root - x))


def _affine_closed_form(x, x_star, a, b):
    if a > 0.0:
        return (x_star + a * x - b) ** 2 / (4.0 * a) + b * x
    if a == 0.0 and x_star == b:
        return b * x
    return math.inf


CLOSED_FORMS = ('triangular', 'normal', 'identity', 'affine', 'unit_interval')


def fitz_closed_form(kind, p, a=1.0, b=0.0):
    """Closed-form F_T for a builtin kind (name or Builtin operator), +inf outside its domain."""
    if isinstance(kind, Builtin):
        kind, a, b = kind.name, kind.a, kind.b
    kind = str(kind).lower()
    if kind not in CLOSED_FORMS:
        raise UnsupportedKind(f"no closed form for {kind!r}, choose from {list(CLOSED_FORMS)}")
    if kind == 'identity':
        s = p.x + p.x_star
        return float(np.dot(s, s)) / 4.0
    if p.dim != 1:
        raise DimensionMismatch(f"the {kind} closed form is 1-D, got a pair of dimension {p.dim}")
    x, x_star = float(p.x[0]), float(p.x_star[0])
    if kind == 'triangular':
        return _triangular_closed_form(x, x_star)
    if kind == 'normal':
        return _normal_closed_form(x, x_star)
    if kind == 'affine':
        return _affine_closed_form(x, x_star, a, b)
    return math.inf


def has_closed_form(op):
    return isinstance(op, Builtin) and op.name in CLOSED_FORMS


def evaluate_fitzpatrick(op, p, cfg=None, method='auto'):
    """
    Dispatch an evaluation of F_T at p.

    auto: exact on finite graphs, closed form for builtins, windowed sampling otherwise.
    """
    if method not in ('auto', 'exact', 'sampled', 'closed_form'):
        raise ValueError(f"unknown evaluation method {method!r}")
    if method in ('auto', 'exact') and op.is_finite:
        return fitz_exact_finite(op.graph(), p)
    if method == 'exact':
        raise UnsupportedKind(f"exact evaluation needs a finite graph, got a {op.kind} operator")
    if method == 'closed_form' or (method == 'auto' and has_closed_form(op)):
        if not has_closed_form(op):
            raise UnsupportedKind(f"{op.kind} operator has no closed form")
        value = fitz_closed_form(op, p)
        if math.isinf(value):
            return FitzValue(FitzStatus.DIVERGENT, math.inf, method='closed_form')
        return FitzValue(FitzStatus.FINITE, value, method='closed_form')
    return fitz_sampled(op, p, cfg)
