# --------------------------------------------------------
# sigmafitz
# Fitzpatrick functions of sigma-monotone operators
# --------------------------------------------------------

import os
import json

from ..operators import (FiniteGraph, Tabulated1D, Expression1D, ConstantSigma, TableSigma, ExpressionSigma,
                         PrimalDualPair, create_operator)
from ..utils.errors import DocumentError, FitzError


def _require(doc, key, kind):
    if key not in doc:
        raise DocumentError(f"{kind} document is missing the field {key!r}")
    return doc[key]


def _read_json(path):
    with open(path, 'r') as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise DocumentError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e


def _malformed(what, build, *args):
    """Run `build`, turning bare TypeError and ValueError into DocumentError."""
    try:
        return build(*args)
    except (TypeError, ValueError) as e:
        if isinstance(e, FitzError):
            raise
        raise DocumentError(f"malformed {what}: {e}") from e


def _build_pair(doc):
    return PrimalDualPair(_require(doc, 'x', 'point'), _require(doc, 'x_star', 'point'))


def build_pair(doc):
    return _malformed(f"point {doc!r}", _build_pair, doc)


def build_operator(doc, config=None):
    return _malformed("operator document", _build_operator, doc, config)


def _build_operator(doc, config):
    if not isinstance(doc, dict):
        raise DocumentError(f"operator document must be an object, got {type(doc).__name__}")
    kind = _require(doc, 'kind', 'operator')
    if kind == 'finite_graph':
        return FiniteGraph.from_pairs([build_pair(p) for p in _require(doc, 'points', kind)])
    elif kind == 'tabulated':
        return Tabulated1D(_require(doc, 'xs', kind), _require(doc, 'value_sets', kind))
    elif kind == 'expression':
        return Expression1D(_require(doc, 'source', kind))
    elif kind == 'builtin':
        kwargs = {k: doc[k] for k in ('a', 'b') if k in doc}
        resolution = doc.get('resolution')
        if resolution is None and config is not None:
            resolution = config.OPERATOR.UNIT_INTERVAL_RESOLUTION
        if resolution is not None:
            kwargs['resolution'] = resolution
        return create_operator(_require(doc, 'name', kind), **kwargs)
    else:
        raise DocumentError(f"unknown operator kind {kind!r}")


def build_sigma(doc):
    return _malformed("sigma document", _build_sigma, doc)


def _build_sigma(doc):
    if not isinstance(doc, dict):
        raise DocumentError(f"sigma document must be an object, got {type(doc).__name__}")
    kind = _require(doc, 'kind', 'sigma')
    if kind == 'constant':
        return ConstantSigma(_require(doc, 'c', kind))
    elif kind == 'table':
        entries = _require(doc, 'entries', kind)
        if not entries:
            raise DocumentError("a sigma table needs at least one entry")
        return TableSigma([_require(e, 'x', 'sigma entry') for e in entries],
                          [_require(e, 'sigma', 'sigma entry') for e in entries])
    elif kind == 'expression':
        return ExpressionSigma(_require(doc, 'source', kind))
    else:
        raise DocumentError(f"unknown sigma kind {kind!r}")


def load_operator(path, config=None):
    return build_operator(_read_json(path), config)


def parse_sigma(text):
    """A sigma given on the command line: a constant, a path to a sigma document, or an expression in x."""
    try:
        return ConstantSigma(float(text))
    except ValueError as e:
        if isinstance(e, FitzError):
            raise
    if os.path.isfile(text):
        return build_sigma(_read_json(text))
    return ExpressionSigma(text)


def load_points(path):
    """Points as a list, or {"points": [...]}, of {"x", "x_star"} objects with an optional "sigma"."""
    doc = _read_json(path)
    if isinstance(doc, dict):
        doc = _require(doc, 'points', 'points')
    if not isinstance(doc, list):
        raise DocumentError(f"{path}: expected a list of points")
    points = [build_pair(p) for p in doc]
    sigmas = [p.get('sigma') for p in doc]
    return points, sigmas


def save_document(obj, path):
    with open(path, 'w') as f:
        json.dump(obj.to_document(), f, indent=2)
        f.write('\n')
