"""Tests for the grid / step-function model and the weighted-power quadrature."""

import math

import numpy as np
import pytest

import oracles
from hardylab import (
    DivergentIntegralError,
    Grid,
    InvalidParameterError,
    MalformedCSVError,
    PiecewisePoly,
    StepFunction,
    check_exponent,
    integrate_weighted_power,
    make_graded_grid,
    make_rng,
    p_norm,
    random_step_function,
    read_step_csv,
    step_function,
    write_step_csv,
)
from hardylab.grid import step_csv_text
from hardylab.operators import cumulative, double_cumulative


def indicator(a=0.0, b=1.0, value=1.0):
    if a == 0.0:
        return step_function([0.0, b], [value])
    return step_function([0.0, a, b], [0.0, value])


def oracle_square_integral(P, alpha):
    """Independent closed-form value of ``int r^alpha P(r)^2 dr``."""
    segments = oracles.segments_from_cells(P.grid.edges, P.coeffs,
                                           P.tail_value, P.tail_slope)
    return oracles.weighted_square_integral(segments, alpha)


# ---------------------------------------------------------------------------
# Exponents and basic containers
# ---------------------------------------------------------------------------


def test_check_exponent_accepts_valid():
    assert check_exponent(2) == 2.0
    assert check_exponent(1.0000001) == 1.0000001
    assert check_exponent("3") == 3.0  # float() coercion


@pytest.mark.parametrize("bad", [1.0, 0.5, 0.0, -2.0, math.inf, math.nan, "abc", None])
def test_check_exponent_rejects_invalid(bad):
    with pytest.raises(InvalidParameterError):
        check_exponent(bad)


class TestGrid:
    def test_basic_properties(self):
        g = Grid(np.array([0.0, 0.5, 2.0]))
        assert g.n_cells == 2
        assert g.support_end == 2.0
        assert np.allclose(g.widths, [0.5, 1.5])
        assert not g.edges.flags.writeable

    @pytest.mark.parametrize("edges", [
        [0.0],                      # a single edge is no cell
        [0.5, 1.0],                 # must start at zero
        [0.0, 1.0, 1.0],            # strictly increasing
        [0.0, 2.0, 1.0],
        [0.0, math.inf],
    ])
    def test_invalid_edges(self, edges):
        with pytest.raises(InvalidParameterError):
            Grid(np.asarray(edges, dtype=float))


class TestStepFunction:
    def test_value_count_must_match(self):
        with pytest.raises(InvalidParameterError):
            step_function([0.0, 1.0, 2.0], [1.0])
        with pytest.raises(InvalidParameterError):
            step_function([0.0, 1.0], [1.0, 2.0])

    def test_values_must_be_finite(self):
        with pytest.raises(InvalidParameterError):
            step_function([0.0, 1.0], [math.nan])

    def test_evaluate_right_continuous_cells(self):
        # value v_i is taken on (edges[i], edges[i+1]]
        f = step_function([0.0, 1.0, 2.0], [3.0, -1.0])
        assert f.evaluate(0.0) == 0.0
        assert f.evaluate(0.5) == 3.0
        assert f.evaluate(1.0) == 3.0      # right edge belongs to the cell
        assert f.evaluate(1.5) == -1.0
        assert f.evaluate(2.0) == -1.0
        assert f.evaluate(2.5) == 0.0      # zero beyond support
        out = f.evaluate(np.array([0.5, 1.0, 1.5, 3.0]))
        assert np.array_equal(out, [3.0, 3.0, -1.0, 0.0])

    def test_evaluate_rejects_bad_points(self):
        f = indicator()
        with pytest.raises(InvalidParameterError):
            f.evaluate(-0.1)
        with pytest.raises(InvalidParameterError):
            f.evaluate(math.inf)

    def test_abs(self):
        f = step_function([0.0, 1.0, 2.0], [-2.0, 1.0])
        assert np.array_equal(abs(f).values, [2.0, 1.0])


class TestPiecewisePoly:
    def test_coefficient_shape_validated(self):
        g = Grid(np.array([0.0, 1.0]))
        with pytest.raises(InvalidParameterError):
            PiecewisePoly(g, np.zeros((2, 3)))
        with pytest.raises(InvalidParameterError):
            PiecewisePoly(g, np.zeros((1, 2)))
        with pytest.raises(InvalidParameterError):
            PiecewisePoly(g, np.full((1, 3), math.nan))

    def test_from_step_reproduces_values(self):
        f = step_function([0.0, 1.0, 3.0], [2.0, -1.0])
        P = PiecewisePoly.from_step(f)
        assert P.evaluate(0.5) == 2.0
        assert P.evaluate(2.0) == -1.0
        assert P.evaluate(5.0) == 0.0  # zero tail

    def test_affine_tail_evaluation(self):
        g = Grid(np.array([0.0, 1.0]))
        P = PiecewisePoly(g, np.array([[0.0, 0.0, 0.5]]), tail_value=0.5, tail_slope=1.0)
        assert P.evaluate(1.0) == 0.5
        assert P.evaluate(3.0) == 0.5 + 2.0

    def test_continuity_of_cumulatives_on_random_input(self):
        rng = make_rng(11)
        for _ in range(20):
            f = random_step_function(rng)
            for P in (cumulative(f), double_cumulative(f)):
                edges = f.grid.edges
                # value at each interior edge must match the next cell's c0
                left_vals = P.evaluate(edges[1:-1])
                right_c0 = P.coeffs[1:, 0]
                scale = np.maximum(np.abs(left_vals), 1e-30)
                assert np.all(np.abs(left_vals - right_c0) <= 1e-12 * scale)


# ---------------------------------------------------------------------------
# Grid construction
# ---------------------------------------------------------------------------


class TestMakeGradedGrid:
    def test_uniform_bisection(self):
        assert np.array_equal(make_graded_grid(1.0, 2).edges, [0.0, 0.5, 1.0])

    def test_single_cell(self):
        assert np.array_equal(make_graded_grid(1.0, 1).edges, [0.0, 1.0])

    def test_geometric_ratio_two(self):
        g = make_graded_grid(2.0, 4, "geometric", r_min=0.25)
        assert np.allclose(g.edges, [0.0, 0.25, 0.5, 1.0, 2.0], rtol=1e-12, atol=0.0)
        assert g.edges[-1] == 2.0  # last edge pinned exactly

    def test_geometric_single_cell(self):
        g = make_graded_grid(1.0, 1, "geometric", r_min=0.5)
        assert np.array_equal(g.edges, [0.0, 1.0])

    @pytest.mark.parametrize("kwargs", [
        dict(R=0.0, n_cells=4),
        dict(R=1.0, n_cells=0),
        dict(R=1.0, n_cells=4, grading="geometric"),                 # missing r_min
        dict(R=1.0, n_cells=4, grading="geometric", r_min=0.0),
        dict(R=1.0, n_cells=4, grading="geometric", r_min=1.0),
        dict(R=1.0, n_cells=4, grading="uniform", r_min=0.1),        # r_min is geometric-only
        dict(R=1.0, n_cells=4, grading="random"),
    ])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(InvalidParameterError):
            make_graded_grid(**kwargs)


# ---------------------------------------------------------------------------
# p-th power mass
# ---------------------------------------------------------------------------


class TestPNorm:
    def test_unit_indicator(self):
        assert p_norm(indicator(), 2.0) == 1.0

    def test_two_cells(self):
        f = step_function([0.0, 1.0, 2.0], [2.0, 1.0])
        assert p_norm(f, 2.0) == 5.0  # 4*1 + 1*1

    def test_zero_function(self):
        assert p_norm(step_function([0.0, 1.0], [0.0]), 3.0) == 0.0

    def test_positive_unless_zero(self):
        rng = make_rng(5)
        for _ in range(20):
            f = random_step_function(rng)
            assert p_norm(f, 1.5) > 0.0

    def test_exponent_validated(self):
        with pytest.raises(InvalidParameterError):
            p_norm(indicator(), 1.0)


# ---------------------------------------------------------------------------
# Weighted-power quadrature
# ---------------------------------------------------------------------------


class TestIntegrateWeightedPower:
    def test_hardy_indicator_value(self):
        # int_0^1 1 dr + int_1^inf r^-2 dr = 2
        val = integrate_weighted_power(cumulative(indicator()), -2.0, 2.0)
        assert abs(val - 2.0) <= 1e-12

    def test_zero_polynomial(self):
        P = PiecewisePoly(Grid(np.array([0.0, 1.0])), np.zeros((1, 3)))
        assert integrate_weighted_power(P, -4.0, 2.0) == 0.0

    def test_rellich_indicator_value(self):
        # int_0^1 1/4 dr + int_1^inf (r^-2 - r^-3 + r^-4/4) dr = 5/6
        val = integrate_weighted_power(double_cumulative(indicator()), -4.0, 2.0)
        assert abs(val - 5.0 / 6.0) <= 1e-12

    def test_alpha_zero_reproduces_p_norm(self):
        rng = make_rng(17)
        for _ in range(20):
            f = random_step_function(rng)
            for p in (1.5, 2.0, 3.0):
                val = integrate_weighted_power(PiecewisePoly.from_step(f), 0.0, p)
                ref = p_norm(f, p)
                assert abs(val - ref) <= 1e-12 * ref, f"p={p}: {val} vs {ref}"

    def test_doubling_order_stays_within_estimate(self):
        rng = make_rng(23)
        for _ in range(10):
            f = random_step_function(rng)
            for p, alpha in ((1.5, -1.5), (2.0, -2.0), (3.0, -3.0)):
                P = cumulative(f)
                val, est = integrate_weighted_power(P, alpha, p, 16, return_estimate=True)
                refined = integrate_weighted_power(P, alpha, p, 32)
                assert abs(refined - val) <= est, \
                    f"order doubling moved by {abs(refined - val)} > estimate {est}"

    def test_oracle_agreement_on_indicators(self):
        # p = 2, alpha in {-2, -4}: quadrature vs closed-form antiderivative
        for b, c in ((0.5, 1.0), (1.0, -2.0), (2.0, 3.0)):
            f = indicator(b=b, value=c)
            F, D = cumulative(f), double_cumulative(f)
            v = integrate_weighted_power(F, -2.0, 2.0)
            ref = oracle_square_integral(F, -2.0)
            assert abs(v - ref) <= 1e-10 * abs(ref)
            v = integrate_weighted_power(D, -4.0, 2.0)
            ref = oracle_square_integral(D, -4.0)
            assert abs(v - ref) <= 1e-10 * abs(ref)

    def test_oracle_agreement_on_random_functions(self):
        rng = make_rng(29)
        for _ in range(25):
            f = random_step_function(rng)
            F, D = cumulative(f), double_cumulative(f)
            for P, alpha in ((F, -2.0), (D, -4.0)):
                v = integrate_weighted_power(P, alpha, 2.0)
                ref = oracle_square_integral(P, alpha)
                assert abs(v - ref) <= 1e-10 * max(abs(ref), 1e-30), \
                    f"alpha={alpha}: {v} vs oracle {ref}"

    def test_divergent_at_origin(self):
        # F vanishes to first order only: alpha + p <= -1 diverges
        with pytest.raises(DivergentIntegralError):
            integrate_weighted_power(cumulative(indicator()), -4.0, 2.0)
        # constant near 0: alpha <= -1 diverges
        with pytest.raises(DivergentIntegralError):
            integrate_weighted_power(PiecewisePoly.from_step(indicator()), -1.0, 2.0)

    def test_divergent_in_tail(self):
        D = double_cumulative(indicator())  # affine tail
        with pytest.raises(DivergentIntegralError):
            integrate_weighted_power(D, -2.0, 2.0)   # decays like r^0
        with pytest.raises(DivergentIntegralError):
            integrate_weighted_power(D, -3.0, 2.0)   # r^-1 boundary case

    def test_parameter_validation(self):
        P = cumulative(indicator())
        with pytest.raises(InvalidParameterError):
            integrate_weighted_power(P, -2.0, 1.0)
        with pytest.raises(InvalidParameterError):
            integrate_weighted_power(P, math.nan, 2.0)
        with pytest.raises(InvalidParameterError):
            integrate_weighted_power(P, -2.0, 2.0, quad_order=1)


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------


class TestStepCSV:
    def test_text_format(self):
        assert step_csv_text(indicator()) == "edge,value\n0,\n1,1\n"

    def test_roundtrip_exact(self, tmp_path):
        rng = make_rng(31)
        for i in range(10):
            f = random_step_function(rng)
            path = tmp_path / f"f{i}.csv"
            write_step_csv(f, path)
            g = read_step_csv(path)
            assert np.array_equal(f.grid.edges, g.grid.edges)
            assert np.array_equal(f.values, g.values)

    @pytest.mark.parametrize("text", [
        "",                                   # empty
        "edge;value\n0,\n1,1\n",              # wrong header
        "edge,value\n0,1\n1,1\n",             # origin row must have empty value
        "edge,value\n0.5,\n1,1\n",            # origin row must be at 0
        "edge,value\n0,\n",                   # no cells
        "edge,value\n0,\n1,\n",               # missing cell value
        "edge,value\n0,\nx,1\n",              # bad edge
        "edge,value\n0,\n1,zz\n",             # bad value
        "edge,value\n0,\n1,1,9\n",            # too many columns
        "edge,value\n0,\n2,1\n1,1\n",         # edges must increase
    ])
    def test_malformed_inputs(self, tmp_path, text):
        path = tmp_path / "bad.csv"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(MalformedCSVError):
            read_step_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MalformedCSVError):
            read_step_csv(tmp_path / "nope.csv")
