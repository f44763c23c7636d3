import json

import numpy as np
import pytest

from sigmafitz.data import build_operator, build_sigma, load_operator, load_points, parse_sigma, save_document
from sigmafitz.operators import (ConstantSigma, Expression1D, ExpressionSigma, FiniteGraph, PrimalDualPair,
                                 Tabulated1D, TableSigma, create_operator, evaluate_operator, list_operators,
                                 sample_graph, sigma_value)
from sigmafitz.utils.errors import (DimensionMismatch, DocumentError, EmptyGraph, EvalError, FitzError, InvalidGrid,
                                    MissingKey, NegativeSigma, NonFiniteValue, UnsupportedKind)

FORMULAS = {
    'triangular': lambda x: np.maximum(1.0 - np.abs(x), 0.0),
    'normal': lambda x: 1.0 / (1.0 + x ** 2),
    'identity': lambda x: x,
    'affine': lambda x: 2.0 * x - 0.5,
}


def test_registry_lists_builtins():
    assert list_operators() == ['affine', 'identity', 'normal', 'triangular', 'unit_interval']
    with pytest.raises(UnsupportedKind):
        create_operator('sawtooth')


@pytest.mark.parametrize('name', sorted(FORMULAS))
def test_builtin_matches_formula(name, rng):
    op = create_operator(name, a=2.0, b=-0.5)
    xs = rng.uniform(-10.0, 10.0, size=10 ** 4)
    values = op.images(xs)[:, 0]
    np.testing.assert_allclose(values, FORMULAS[name](xs), rtol=0, atol=1e-12)
    assert evaluate_operator(op, xs[0]).tolist() == [[values[0]]]


def test_triangular_at_zero():
    assert create_operator('triangular').evaluate(0.0).tolist() == [[1.0]]


def test_unit_interval_discretization():
    op = create_operator('unit_interval', resolution=2)
    assert op.evaluate(5.0).tolist() == [[0.0], [0.5], [1.0]]
    assert len(create_operator('unit_interval').evaluate(0.0)) == 17


def test_expression_agrees_with_triangular(rng):
    xs = np.concatenate([rng.uniform(-10.0, 10.0, size=1000), [-1.0, 0.0, 1.0]])
    expr = Expression1D('max(1-abs(x),0)')
    np.testing.assert_array_equal(expr.images(xs), create_operator('triangular').images(xs))


def test_finite_graph_lookup():
    graph = FiniteGraph([[0.0], [1.0], [1.0]], [[0.0], [1.0], [2.0]])
    assert graph.evaluate(2.0).is_empty()
    assert graph.evaluate(1.0).tolist() == [[1.0], [2.0]]
    assert graph.contains(PrimalDualPair(1.0, 2.0))
    assert not graph.contains(PrimalDualPair(1.0, 3.0))
    with pytest.raises(DimensionMismatch):
        graph.evaluate([1.0, 2.0])


def test_finite_graph_invariants():
    with pytest.raises(EmptyGraph):
        FiniteGraph([], [])
    with pytest.raises(DimensionMismatch):
        FiniteGraph([[0.0, 1.0]], [[0.0]])
    with pytest.raises(DimensionMismatch):
        FiniteGraph.from_pairs([PrimalDualPair(0.0, 0.0), PrimalDualPair([0.0, 1.0], [0.0, 1.0])])


def test_tabulated_lookup():
    op = Tabulated1D([0.0, 1.0, 2.0], [[0.0], [0.0, 1.0], [3.0]])
    assert op.evaluate(1.0).tolist() == [[0.0], [1.0]]
    assert op.evaluate(1.0 + 1e-13).tolist() == [[0.0], [1.0]]
    assert op.evaluate(1.5).is_empty()
    assert len(op.graph()) == 4
    with pytest.raises(InvalidGrid):
        Tabulated1D([0.0, 0.0], [[1.0], [1.0]])
    with pytest.raises(EmptyGraph):
        Tabulated1D([0.0, 1.0], [[1.0], []])
    with pytest.raises(DimensionMismatch):
        Tabulated1D([0.0, 1.0], [[1.0]])


def test_pair_invariants():
    with pytest.raises(DimensionMismatch):
        PrimalDualPair([0.0, 1.0], [0.0])
    with pytest.raises(NonFiniteValue):
        PrimalDualPair(np.inf, 0.0)
    with pytest.raises(NonFiniteValue):
        FiniteGraph([[np.nan]], [[0.0]])
    p = PrimalDualPair([1.0, 2.0], [3.0, 4.0])
    assert p.pairing() == 11.0
    assert PrimalDualPair.from_stacked(p.stacked()) == p


def test_sample_graph_takes_every_branch():
    graph = sample_graph(create_operator('unit_interval', resolution=4), np.linspace(-1.0, 1.0, 3))
    assert len(graph) == 15
    assert graph.evaluate(0.0).tolist() == [[0.0], [0.25], [0.5], [0.75], [1.0]]


def test_sigma_values():
    assert sigma_value(ConstantSigma(1.0), 7.0) == 1.0
    assert sigma_value(ConstantSigma(0.0), -3.0) == 0.0
    table = TableSigma.from_mapping({0.0: 0.3})
    assert sigma_value(table, 0.0) == 0.3
    with pytest.raises(MissingKey):
        sigma_value(table, 1.0)
    with pytest.raises(NegativeSigma):
        ConstantSigma(-1.0)
    with pytest.raises(NegativeSigma):
        ExpressionSigma('x')
    assert sigma_value(ExpressionSigma('abs(x)'), -2.0) == 2.0


def test_expression_sigma_on_a_half_line():
    sigma = ExpressionSigma('sqrt(x)')
    assert sigma_value(sigma, 4.0) == 2.0
    with pytest.raises(EvalError):
        sigma_value(sigma, -1.0)
    with pytest.raises(NegativeSigma):
        ExpressionSigma('sqrt(x) - 1')
    with pytest.raises(EvalError):
        ExpressionSigma('sqrt(-1 - x*x)')


def test_extended_sigma():
    table = TableSigma([[0.0]], [0.3])
    ext = table.extend(2.0, 1.5)
    np.testing.assert_array_equal(ext.values(np.array([[0.0], [2.0]])), [0.3, 1.5])
    with pytest.raises(MissingKey):
        ext.value(1.0)


def test_operator_documents():
    graph = build_operator({'kind': 'finite_graph', 'points': [{'x': [0.0], 'x_star': [1.0]}]})
    assert graph.contains(PrimalDualPair(0.0, 1.0))
    tab = build_operator({'kind': 'tabulated', 'xs': [0, 1], 'value_sets': [[0], [1, 2]]})
    assert len(tab.evaluate(1.0)) == 2
    expr = build_operator({'kind': 'expression', 'source': 'x^2'})
    assert expr.evaluate(3.0).tolist() == [[9.0]]
    affine = build_operator({'kind': 'builtin', 'name': 'affine', 'a': 1.0, 'b': 1.0})
    assert affine.evaluate(2.0).tolist() == [[3.0]]
    # round trip through the document form
    for op in (graph, tab, expr, affine):
        assert build_operator(json.loads(json.dumps(op.to_document()))).to_document() == op.to_document()


@pytest.mark.parametrize('doc', [
    {'points': []},
    {'kind': 'spline'},
    {'kind': 'finite_graph', 'points': [{'x': [0.0]}]},
    {'kind': 'expression'},
    {'kind': 'tabulated', 'xs': [1.0, 0.0], 'value_sets': [[0.0], [0.0]]},
    {'kind': 'tabulated', 'xs': ['a'], 'value_sets': [[0.0]]},
    {'kind': 'builtin', 'name': 'affine', 'a': 'steep'},
    [],
])
def test_malformed_operator_documents(doc):
    with pytest.raises(FitzError):
        build_operator(doc)


def test_sigma_documents(tmp_path):
    assert build_sigma({'kind': 'constant', 'c': 2}).value(5.0) == 2.0
    table = build_sigma({'kind': 'table', 'entries': [{'x': [0.0], 'sigma': 2.0}, {'x': [3.0], 'sigma': 1.0}]})
    assert table.value(3.0) == 1.0
    path = tmp_path / 'sigma.json'
    path.write_text(json.dumps(table.to_document()))
    assert parse_sigma(str(path)).value(0.0) == 2.0
    assert parse_sigma('0.5').value(9.0) == 0.5
    assert parse_sigma('abs(x)').value(-3.0) == 3.0
    with pytest.raises(NegativeSigma):
        parse_sigma('-1')


def test_load_points(tmp_path):
    path = tmp_path / 'points.json'
    path.write_text(json.dumps({'points': [{'x': [0.5], 'x_star': [0.5], 'sigma': 0.0}, {'x': 1, 'x_star': 2}]}))
    points, sigmas = load_points(str(path))
    assert points == [PrimalDualPair(0.5, 0.5), PrimalDualPair(1.0, 2.0)]
    assert sigmas == [0.0, None]
    path.write_text('{not json')
    with pytest.raises(DocumentError):
        load_points(str(path))


def test_save_and_load_operator(tmp_path):
    graph = FiniteGraph([[0.0, 1.0], [2.0, 3.0]], [[1.0, 0.0], [0.0, 1.0]])
    path = tmp_path / 'graph.json'
    save_document(graph, path)
    loaded = load_operator(str(path))
    assert loaded.includes(graph)
    assert graph.includes(loaded)
