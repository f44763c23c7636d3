import numpy as np

from .expression import parse_expression
from .operator import MATCH_TOL
from .types import as_vector
from ..utils.errors import DimensionMismatch, EvalError, MissingKey, NegativeSigma


class SigmaSpec:
    """A map sigma: D(T) -> R_+."""
    kind = None

    def value(self, x):
        return float(self.values(np.atleast_2d(as_vector(x)))[0])

    def values(self, X):
        """sigma at every row of the (N, n) array X."""
        raise NotImplementedError

    def extend(self, point, value):
        return ExtendedSigma(self, point, value)


class ConstantSigma(SigmaSpec):
    kind = 'constant'

    def __init__(self, c):
        c = float(c)
        if not np.isfinite(c) or c < 0:
            raise NegativeSigma(f"sigma must be a finite non-negative constant, got {c}")
        self.c = c

    def values(self, X):
        return np.full(np.atleast_2d(X).shape[0], self.c)

    def to_document(self):
        return {'kind': self.kind, 'c': self.c}


def _lookup(keys, X, tol=MATCH_TOL, chunk=1024):
    """Index of the first key matching each row of X within tol, -1 when absent."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != keys.shape[1]:
        raise DimensionMismatch(f"sigma table has dimension {keys.shape[1]}, got points of dimension {X.shape[1]}")
    out = np.full(X.shape[0], -1, dtype=int)
    for start in range(0, X.shape[0], chunk):
        block = X[start:start + chunk]
        hit = np.max(np.abs(block[:, None, :] - keys[None, :, :]), axis=2) <= tol
        found = hit.any(axis=1)
        out[start:start + chunk] = np.where(found, hit.argmax(axis=1), -1)
    return out


class TableSigma(SigmaSpec):
    kind = 'table'

    def __init__(self, keys, sigmas):
        keys = np.atleast_2d(np.asarray(keys, dtype=float)).copy()
        sigmas = np.asarray(sigmas, dtype=float).reshape(-1).copy()
        if keys.shape[0] != sigmas.size:
            raise DimensionMismatch(f"{keys.shape[0]} keys but {sigmas.size} sigma values")
        if np.any(sigmas < 0) or not np.all(np.isfinite(sigmas)):
            raise NegativeSigma(f"sigma table has negative or non-finite entries: {sigmas[sigmas < 0].tolist()}")
        keys.setflags(write=False)
        sigmas.setflags(write=False)
        self.keys = keys
        self.sigmas = sigmas

    @classmethod
    def from_mapping(cls, mapping):
        items = list(mapping.items())
        return cls([np.atleast_1d(k) for k, _ in items], [v for _, v in items])

    def values(self, X):
        idx = _lookup(self.keys, X)
        if np.any(idx < 0):
            missing = np.atleast_2d(X)[np.argmax(idx < 0)]
            raise MissingKey(f"sigma is not defined at x={missing.tolist()}")
        return self.sigmas[idx]

    def to_document(self):
        return {'kind': self.kind,
                'entries': [{'x': k.tolist(), 'sigma': float(s)} for k, s in zip(self.keys, self.sigmas)]}


class ExpressionSigma(SigmaSpec):
    kind = 'expression'

    def __init__(self, source, check_points=None):
        self.source = source
        self.compiled = parse_expression(source)
        if check_points is None:
            check_points = np.linspace(-10.0, 10.0, 2001)
        check_points, sampled = self._defined_at(np.asarray(check_points, dtype=float).reshape(-1))
        if np.any(sampled < 0):
            bad = check_points[np.argmax(sampled < 0)]
            raise NegativeSigma(f"sigma expression {source!r} is negative at x={float(bad)}")

    def _defined_at(self, points):
        """The check points inside the domain of the expression, with their values."""
        try:
            return points, self.compiled(points)
        except EvalError:
            pass
        kept, values = [], []
        for x in points:
            try:
                values.append(self.compiled(float(x)))
            except EvalError:
                continue
            kept.append(x)
        if not kept:
            raise EvalError(f"sigma expression {self.source!r} is undefined at every check point")
        return np.asarray(kept), np.asarray(values)

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != 1:
            raise DimensionMismatch("sigma expressions are 1-D")
        out = np.asarray(self.compiled(X[:, 0]), dtype=float).reshape(-1)
        if np.any(out < 0):
            bad = X[np.argmax(out < 0), 0]
            raise NegativeSigma(f"sigma expression {self.source!r} is negative at x={float(bad)}")
        return out

    def to_document(self):
        return {'kind': self.kind, 'source': self.source}


class ExtendedSigma(SigmaSpec):
    """sigma' agreeing with a base sigma and additionally defined at one point."""
    kind = 'extended'

    def __init__(self, base, point, value):
        value = float(value)
        if not np.isfinite(value) or value < 0:
            raise NegativeSigma(f"extension value must be non-negative, got {value}")
        self.base = base
        self.point = as_vector(point)
        self.extra = value

    def values(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        at_point = np.max(np.abs(X - self.point), axis=1) <= MATCH_TOL
        out = np.empty(X.shape[0])
        out[at_point] = self.extra
        if np.any(~at_point):
            out[~at_point] = self.base.values(X[~at_point])
        return out


def sigma_value(sigma, x):
    return sigma.value(x)
