from dataclasses import dataclass

import numpy as np

from ..utils.errors import DimensionMismatch, NonFiniteValue


def as_vector(value, name='x'):
    """Coerce a scalar or sequence into a read-only 1-D float vector."""
    vec = np.atleast_1d(np.asarray(value, dtype=float)).copy()
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise NonFiniteValue(f"{name} has non-finite components: {vec.tolist()}")
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, eq=False)
class PrimalDualPair:
    """A point (x, x*) of R^n x R^n, paired through the Euclidean dot product."""
    x: np.ndarray
    x_star: np.ndarray

    def __post_init__(self):
        x = as_vector(self.x, 'x')
        x_star = as_vector(self.x_star, 'x_star')
        if x.shape != x_star.shape:
            raise DimensionMismatch(f"dim(x)={x.size} but dim(x_star)={x_star.size}")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'x_star', x_star)

    @property
    def dim(self):
        return self.x.size

    def pairing(self):
        return float(np.dot(self.x_star, self.x))

    def stacked(self):
        return np.concatenate([self.x, self.x_star])

    @classmethod
    def from_stacked(cls, p):
        p = np.asarray(p, dtype=float)
        n = p.size // 2
        return cls(p[:n], p[n:])

    def __eq__(self, other):
        if not isinstance(other, PrimalDualPair):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.x_star, other.x_star)

    def __hash__(self):
        return hash((self.x.tobytes(), self.x_star.tobytes()))

    def __repr__(self):
        return f"PrimalDualPair(x={self.x.tolist()}, x_star={self.x_star.tolist()})"

    def to_dict(self):
        return {'x': self.x.tolist(), 'x_star': self.x_star.tolist()}


@dataclass(frozen=True, eq=False)
class ValueSet:
    """The image T(x) as a (k, n) array, k = 0 only when x is outside D(T)."""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.shape[0]

    def __iter__(self):
        return iter(self.values)

    def is_empty(self):
        return len(self) == 0

    def tolist(self):
        return self.values.tolist()
