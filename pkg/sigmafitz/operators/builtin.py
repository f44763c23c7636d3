import numpy as np

from .operator import Operator
from .types import ValueSet
from ..utils.errors import ConfigError, UnsupportedKind

_operator_entrypoints = {}


def register_operator(fn):
    _operator_entrypoints[fn.__name__] = fn
    return fn


def list_operators():
    return sorted(_operator_entrypoints)


def create_operator(name, **kwargs):
    name = name.lower().replace('-', '_')
    if name not in _operator_entrypoints:
        raise UnsupportedKind(f"unknown builtin operator {name!r}, choose from {list_operators()}")
    return _operator_entrypoints[name](**kwargs)


class Builtin(Operator):
    """A catalogued 1-D operator, evaluated from its defining formula."""
    kind = 'builtin'

    def __init__(self, name, formula, a=1.0, b=0.0, resolution=16):
        if int(resolution) < 1:
            raise ConfigError(f"resolution must be >= 1, got {resolution}")
        self.name = name
        self.formula = formula
        self.a = float(a)
        self.b = float(b)
        self.resolution = int(resolution)

    def evaluate(self, x):
        x = self._check_dim(x)
        return ValueSet(self.images(x).reshape(-1, 1))

    def images(self, ys):
        ys = np.asarray(ys, dtype=float).reshape(-1)
        return self.formula(self, ys).reshape(ys.size, -1)

    def to_document(self):
        doc = {'kind': self.kind, 'name': self.name}
        if self.name == 'affine':
            doc.update(a=self.a, b=self.b)
        if self.name == 'unit_interval':
            doc['resolution'] = self.resolution
        return doc

    def __repr__(self):
        return f"Builtin({self.name!r})"


def _triangular(op, ys):
    return np.maximum(1.0 - np.abs(ys), 0.0)


def _normal(op, ys):
    return 1.0 / (1.0 + ys ** 2)


def _identity(op, ys):
    return ys.copy()


def _affine(op, ys):
    return op.a * ys + op.b


def _unit_interval(op, ys):
    # endpoints 0 and 1 are always present
    levels = np.linspace(0.0, 1.0, op.resolution + 1)
    return np.broadcast_to(levels, (ys.size, levels.size)).copy()


@register_operator
def triangular(**kwargs):
    return Builtin('triangular', _triangular)


@register_operator
def normal(**kwargs):
    return Builtin('normal', _normal)


@register_operator
def identity(**kwargs):
    return Builtin('identity', _identity)


@register_operator
def affine(a=1.0, b=0.0, **kwargs):
    return Builtin('affine', _affine, a=a, b=b)


@register_operator
def unit_interval(resolution=16, **kwargs):
    return Builtin('unit_interval', _unit_interval, resolution=resolution)
