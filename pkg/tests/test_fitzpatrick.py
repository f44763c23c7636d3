import io
import math

import numpy as np
import pytest

from sigmafitz.engine import (FitzStatus, WindowConfig, affine_terms, evaluate_fitzpatrick, fitz_closed_form,
                              fitz_exact_finite, fitz_sampled, windowed_sups)
from sigmafitz.operators import Expression1D, FiniteGraph, PrimalDualPair, create_operator
from sigmafitz.utils.errors import DimensionMismatch, UnsupportedKind
from sigmafitz.utils.report import write_grid_csv

SMALL_WINDOWS = WindowConfig(radii=(1.0, 2.0, 4.0, 8.0, 16.0), samples_per_window=257)


def random_graph(rng, n=15, dim=1):
    return FiniteGraph(rng.uniform(-3.0, 3.0, size=(n, dim)), rng.uniform(-3.0, 3.0, size=(n, dim)))


def test_single_point_graph():
    fv = fitz_exact_finite(FiniteGraph([[0.0]], [[0.0]]), PrimalDualPair(3.0, 5.0))
    assert fv.status is FitzStatus.FINITE
    assert fv.value == 0.0
    assert fv.witness == PrimalDualPair(0.0, 0.0)


def test_two_point_graph():
    fv = fitz_exact_finite(FiniteGraph([[0.0], [1.0]], [[0.0], [1.0]]), PrimalDualPair(1.0, 1.0))
    assert fv.value == 1.0
    assert fv.witness == PrimalDualPair(1.0, 1.0)


def test_dense_triangular_graph(make_triangular_graph):
    graph = make_triangular_graph(-20.0, 20.0, 1e-3)
    assert abs(fitz_exact_finite(graph, PrimalDualPair(1.0, 0.0)).value - 1.0) <= 1e-3


def test_exact_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fitz_exact_finite(FiniteGraph([[0.0]], [[0.0]]), PrimalDualPair([1.0, 2.0], [0.0, 0.0]))


def test_witness_reproduces_value(rng):
    for _ in range(50):
        graph = random_graph(rng, dim=2)
        p = PrimalDualPair(rng.uniform(-3, 3, 2), rng.uniform(-3, 3, 2))
        fv = fitz_exact_finite(graph, p)
        w = fv.witness
        again = np.dot(p.x_star, w.x) + np.dot(w.x_star, p.x) - np.dot(w.x_star, w.x)
        assert abs(fv.value - again) <= 1e-12


def test_graph_points_bound_F_below(rng):
    for _ in range(50):
        graph = random_graph(rng)
        for p in graph.points:
            assert fitz_exact_finite(graph, p).value >= p.pairing()


def test_sampled_normal_at_origin(window_cfg):
    fv = fitz_sampled(create_operator('normal'), PrimalDualPair(0.0, 0.0), window_cfg)
    assert fv.status is FitzStatus.FINITE
    assert abs(fv.value - 0.5) <= 1e-4
    assert fv.stabilized


@pytest.mark.parametrize('name, p', [
    ('normal', PrimalDualPair(0.0, 1.0)),
    ('unit_interval', PrimalDualPair(0.0, 0.0)),
    ('triangular', PrimalDualPair(1.0, -1.0)),
])
def test_sampled_divergence(name, p, window_cfg):
    fv = fitz_sampled(create_operator(name), p, window_cfg)
    assert fv.status is FitzStatus.DIVERGENT
    assert not fv.is_finite()
    assert len(fv.growth_trace) == len(window_cfg.radii)


def test_exact_and_sampled_agree_on_finite_graphs(rng, window_cfg):
    for _ in range(20):
        graph = random_graph(rng)
        p = PrimalDualPair(rng.uniform(-3, 3), rng.uniform(-3, 3))
        exact = fitz_exact_finite(graph, p)
        sampled = fitz_sampled(graph, p, window_cfg)
        assert sampled.value == exact.value
        assert sampled.witness == exact.witness
        assert sampled.status is FitzStatus.FINITE


def test_windowed_sups_never_decrease(rng):
    ops = [create_operator('triangular'), create_operator('normal'), create_operator('identity'),
           Expression1D('sqrt(abs(x)) - x/3')]
    for trial in range(100):
        op = ops[trial % len(ops)]
        p = PrimalDualPair(rng.uniform(-3, 3), rng.uniform(-2, 2))
        sups = [s for _, s, _ in windowed_sups(op, p, SMALL_WINDOWS)]
        assert all(b >= a for a, b in zip(sups, sups[1:]))
    for _ in range(20):
        graph = random_graph(rng)
        p = PrimalDualPair(rng.uniform(-3, 3), rng.uniform(-3, 3))
        sups = [s for _, s, _ in windowed_sups(graph, p, SMALL_WINDOWS)]
        assert all(b >= a for a, b in zip(sups, sups[1:]))


def test_window_config_invariants():
    with pytest.raises(ValueError):
        WindowConfig(radii=(2.0, 1.0))
    with pytest.raises(ValueError):
        WindowConfig(samples_per_window=2)


@pytest.mark.parametrize('kind, p, expected', [
    ('triangular', PrimalDualPair(1.0, 0.0), 1.0),
    ('normal', PrimalDualPair(1.0, 0.0), 1.0 / (2.0 * (math.sqrt(2.0) - 1.0))),
    ('identity', PrimalDualPair(1.0, 1.0), 1.0),
    ('triangular', PrimalDualPair(0.0, 0.5), math.inf),
    ('normal', PrimalDualPair(0.0, -1.0), math.inf),
    ('unit_interval', PrimalDualPair(0.0, 0.0), math.inf),
    ('identity', PrimalDualPair([1.0, 2.0], [3.0, 0.0]), 5.0),
])
def test_closed_forms(kind, p, expected):
    assert fitz_closed_form(kind, p) == pytest.approx(expected, rel=1e-12)


def test_triangular_closed_form_outside_the_unit_interval():
    assert fitz_closed_form('triangular', PrimalDualPair(2.0, 0.0)) == 2.0
    assert fitz_closed_form('triangular', PrimalDualPair(-2.0, 0.0)) == 0.0
    for x in np.linspace(-1.0, 1.0, 9):
        assert fitz_closed_form('triangular', PrimalDualPair(x, 0.0)) == pytest.approx(0.25 * (x + 1.0) ** 2)


def test_affine_closed_form():
    op = create_operator('affine', a=2.0, b=1.0)
    p = PrimalDualPair(0.5, 1.0)
    expected = (1.0 + 2.0 * 0.5 - 1.0) ** 2 / 8.0 + 0.5
    assert fitz_closed_form(op, p) == pytest.approx(expected)
    assert fitz_closed_form(create_operator('affine', a=0.0, b=1.0), PrimalDualPair(3.0, 1.0)) == 3.0
    assert fitz_closed_form(create_operator('affine', a=-1.0), PrimalDualPair(0.0, 0.0)) == math.inf


def test_closed_form_rejects_unknown_kinds():
    with pytest.raises(UnsupportedKind):
        fitz_closed_form('sawtooth', PrimalDualPair(0.0, 0.0))


@pytest.mark.parametrize('name', ['triangular', 'normal'])
def test_closed_form_matches_sampled(name, window_cfg):
    op = create_operator(name)
    for x in np.linspace(-3.0, 3.0, 13):
        p = PrimalDualPair(x, 0.0)
        fv = fitz_sampled(op, p, window_cfg)
        assert fv.is_finite()
        assert abs(fv.value - fitz_closed_form(name, p)) <= 1e-4


def test_identity_closed_form_against_brute_force(rng):
    ys = np.linspace(-20.0, 20.0, 400001)
    for _ in range(20):
        x, x_star = rng.uniform(-5.0, 5.0, size=2)
        brute = np.max(x_star * ys + ys * x - ys * ys)
        assert abs(fitz_closed_form('identity', PrimalDualPair(x, x_star)) - brute) <= 1e-8


def test_dispatch(window_cfg):
    normal = create_operator('normal')
    p = PrimalDualPair(0.0, 0.0)
    assert evaluate_fitzpatrick(normal, p, window_cfg).method == 'closed_form'
    assert evaluate_fitzpatrick(normal, p, window_cfg, 'sampled').method == 'sampled'
    graph = FiniteGraph([[0.0]], [[1.0]])
    assert evaluate_fitzpatrick(graph, p).method == 'exact'
    diverged = evaluate_fitzpatrick(normal, PrimalDualPair(0.0, 1.0), window_cfg)
    assert diverged.status is FitzStatus.DIVERGENT
    with pytest.raises(UnsupportedKind):
        evaluate_fitzpatrick(normal, p, method='exact')
    with pytest.raises(UnsupportedKind):
        evaluate_fitzpatrick(Expression1D('x'), p, method='closed_form')
    with pytest.raises(ValueError):
        evaluate_fitzpatrick(normal, p, method='guess')


def test_affine_terms_shape():
    Y = np.array([[0.0], [1.0]])
    np.testing.assert_array_equal(affine_terms(Y, Y, PrimalDualPair(1.0, 1.0)), [0.0, 1.0])


def test_grid_csv():
    graph = FiniteGraph([[0.0]], [[0.0]])
    rows = [(0.0, 0.0, fitz_exact_finite(graph, PrimalDualPair(0.0, 0.0))),
            (1.0, 2.0, evaluate_fitzpatrick(create_operator('unit_interval'), PrimalDualPair(1.0, 2.0)))]
    out = io.StringIO()
    write_grid_csv(rows, out)
    lines = out.getvalue().splitlines()
    assert lines[0] == 'x,xstar,F,status,witness_y,witness_ystar'
    assert lines[1] == '0.0,0.0,0.0,finite,0.0,0.0'
    assert lines[2] == '1.0,2.0,inf,divergent,,'
