import numpy as np

from .expression import parse_expression
from .types import PrimalDualPair, ValueSet, as_vector
from ..utils.errors import DimensionMismatch, EmptyGraph, InvalidGrid, NonFiniteValue

# exact-match tolerance of graph and table lookups
MATCH_TOL = 1e-12


class Operator:
    """A set-valued operator T: R^n -> 2^(R^n)."""
    kind = None
    dim = 1
    # finite operators carry their whole graph, continuous ones are sampled
    is_finite = False

    def evaluate(self, x):
        raise NotImplementedError

    def images(self, ys):
        """Images of a 1-D grid as an (N, k) array, one column per image branch."""
        raise NotImplementedError

    def sample(self, ys):
        """Graph pairs over a 1-D grid, sample-major: rows (y_i, T(y_i)[j]) for i, then j."""
        ys = np.asarray(ys, dtype=float).reshape(-1)
        values = self.images(ys)
        k = values.shape[1]
        return np.repeat(ys, k).reshape(-1, 1), values.reshape(-1, 1)

    def graph(self):
        raise NotImplementedError(f"{self.kind} operators have no finite graph, use sample_graph")

    def contains(self, p, tol=MATCH_TOL):
        values = self.evaluate(p.x)
        if values.is_empty():
            return False
        return bool(np.any(np.max(np.abs(values.values - p.x_star), axis=1) <= tol))

    def _check_dim(self, x):
        x = as_vector(x)
        if x.size != self.dim:
            raise DimensionMismatch(f"{self.kind} operator has dimension {self.dim}, got a point of dimension {x.size}")
        return x


class FiniteGraph(Operator):
    """A finite graph {(x_i, x*_i)} stored as two (N, n) arrays."""
    kind = 'finite_graph'
    is_finite = True

    def __init__(self, xs, x_stars):
        xs = np.atleast_2d(np.asarray(xs, dtype=float)).copy()
        x_stars = np.atleast_2d(np.asarray(x_stars, dtype=float)).copy()
        if xs.size == 0:
            raise EmptyGraph("a finite graph needs at least one point")
        if xs.shape != x_stars.shape:
            raise DimensionMismatch(f"graph arrays disagree: {xs.shape} vs {x_stars.shape}")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(x_stars))):
            raise NonFiniteValue("graph points must be finite")
        xs.setflags(write=False)
        x_stars.setflags(write=False)
        self.xs = xs
        self.x_stars = x_stars
        self.dim = xs.shape[1]

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            raise EmptyGraph("a finite graph needs at least one point")
        dims = {p.dim for p in pairs}
        if len(dims) != 1:
            raise DimensionMismatch(f"graph points have mixed dimensions {sorted(dims)}")
        return cls([p.x for p in pairs], [p.x_star for p in pairs])

    def __len__(self):
        return self.xs.shape[0]

    @property
    def points(self):
        return [PrimalDualPair(x, xs) for x, xs in zip(self.xs, self.x_stars)]

    def graph(self):
        return self

    def matches(self, x, tol=MATCH_TOL):
        return np.max(np.abs(self.xs - x), axis=1) <= tol

    def evaluate(self, x):
        x = self._check_dim(x)
        return ValueSet(self.x_stars[self.matches(x)])

    def contains(self, p, tol=MATCH_TOL):
        if p.dim != self.dim:
            raise DimensionMismatch(f"graph has dimension {self.dim}, got a pair of dimension {p.dim}")
        hit = self.matches(p.x, tol) & (np.max(np.abs(self.x_stars - p.x_star), axis=1) <= tol)
        return bool(np.any(hit))

    def includes(self, other, tol=MATCH_TOL):
        """True when every point of `other` lies on this graph."""
        return all(self.contains(p, tol) for p in other.points)

    def images(self, ys):
        raise NotImplementedError("finite graphs are not sampled on grids")

    def to_document(self):
        return {'kind': self.kind, 'points': [p.to_dict() for p in self.points]}


class Tabulated1D(Operator):
    """A 1-D operator known on a strictly increasing grid, no interpolation in between."""
    kind = 'tabulated'
    is_finite = True

    def __init__(self, xs, value_sets):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        if xs.size == 0:
            raise EmptyGraph("a tabulated operator needs at least one grid point")
        if xs.size != len(value_sets):
            raise DimensionMismatch(f"{xs.size} grid points but {len(value_sets)} value sets")
        if np.any(np.diff(xs) <= 0):
            raise InvalidGrid(f"tabulated grid must be strictly increasing, got {xs.tolist()}")
        value_sets = tuple(tuple(float(v) for v in np.atleast_1d(vs)) for vs in value_sets)
        if any(len(vs) == 0 for vs in value_sets):
            raise EmptyGraph("every tabulated value set must be non-empty")
        xs.setflags(write=False)
        self.xs = xs
        self.value_sets = value_sets

    def evaluate(self, x):
        x = self._check_dim(x)[0]
        idx = int(np.clip(np.searchsorted(self.xs, x), 1, self.xs.size - 1)) if self.xs.size > 1 else 0
        # nearest of the two neighbours
        if idx > 0 and abs(self.xs[idx - 1] - x) <= abs(self.xs[idx] - x):
            idx -= 1
        if abs(self.xs[idx] - x) > MATCH_TOL:
            return ValueSet(np.empty((0, 1)))
        return ValueSet(np.asarray(self.value_sets[idx]).reshape(-1, 1))

    def graph(self):
        ys = [x for x, vs in zip(self.xs, self.value_sets) for _ in vs]
        y_stars = [v for vs in self.value_sets for v in vs]
        return FiniteGraph(np.reshape(ys, (-1, 1)), np.reshape(y_stars, (-1, 1)))

    def to_document(self):
        return {'kind': self.kind, 'xs': self.xs.tolist(), 'value_sets': [list(vs) for vs in self.value_sets]}


class Expression1D(Operator):
    """A single-valued 1-D operator given by an expression in x."""
    kind = 'expression'

    def __init__(self, source):
        self.source = source
        self.compiled = parse_expression(source)

    def evaluate(self, x):
        x = self._check_dim(x)
        return ValueSet(np.array([[self.compiled(float(x[0]))]]))

    def images(self, ys):
        ys = np.asarray(ys, dtype=float).reshape(-1)
        return np.asarray(self.compiled(ys), dtype=float).reshape(-1, 1)

    def to_document(self):
        return {'kind': self.kind, 'source': self.source}


def evaluate_operator(op, x):
    return op.evaluate(x)


def sample_graph(op, ys):
    """Finite graph of `op` over the grid `ys`; finite operators return their own graph."""
    if op.is_finite:
        return op.graph()
    Y, Y_star = op.sample(ys)
    return FiniteGraph(Y, Y_star)
