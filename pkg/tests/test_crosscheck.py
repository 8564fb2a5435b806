import math

import pytest

from hoquant.crosscheck import (
    matched_grids,
    shift_comparison,
    tho_level,
    zero_mode_comparison,
    zero_mode_parameter,
)
from hoquant.errors import NoRealSolution
from hoquant.grid import GridSpec
from hoquant.potentials import builtin
from hoquant.reduction import BUILTIN_PLANS, THOParams

Z_GRID = GridSpec(0.0, 16.0, 3000)


def test_matched_grids_share_node_count():
    gq, gz = matched_grids(BUILTIN_PLANS["example1"], 60.0, 500)
    assert gq.n == gz.n == 500
    assert gz.b == pytest.approx((1.5 * 60.0) ** (2 / 3))


def test_half_line_tho_odd_levels():
    # with rho = lambda = 0 the Dirichlet half-line levels are the odd HO levels omega (4n + 3)
    tho = THOParams(1.0, 0.0, 0.0)
    assert [tho_level(tho, i, Z_GRID) for i in range(3)] == pytest.approx([3.0, 7.0, 11.0], rel=1e-4)


def test_zero_mode_parameter_makes_level_vanish():
    tho = THOParams(1.0, 0.0, 1.0)
    rho = zero_mode_parameter(tho, "rho", 0, Z_GRID)
    assert abs(tho_level(THOParams(1.0, rho, 1.0), 0, Z_GRID)) < 1e-8
    assert rho < 0


def test_zero_mode_parameter_omega_impossible():
    # with rho = 0 and lambda > 0 every level is positive
    with pytest.raises(NoRealSolution):
        zero_mode_parameter(THOParams(1.0, 0.0, 1.0), "omega", 0, Z_GRID)


def test_example1_zero_mode_law():
    tho = THOParams(1.0, 1.0, 1.0)
    cmp = zero_mode_comparison(BUILTIN_PLANS["example1"], builtin("example1", tho.as_params()), tho)
    assert max(cmp.relative_errors) < 1e-2
    assert all(b > a for a, b in zip(cmp.q_levels, cmp.q_levels[1:]))
    js = cmp.to_json()
    assert [r["n"] for r in js["rows"]] == [0, 1, 2]


def test_example2_zero_mode_law():
    tho = THOParams(1.0, -1.0, 1.0)
    cmp = zero_mode_comparison(BUILTIN_PLANS["example2"], builtin("example2", tho.as_params()), tho)
    assert cmp.parameter == "omega"
    assert max(cmp.relative_errors) < 1e-2


def test_shift_comparison_reports_differences():
    tho = THOParams(1.0, 1.0, 1.0)
    cmp = shift_comparison(BUILTIN_PLANS["example1"], builtin("example1", tho.as_params()), tho, n=1500)
    assert cmp.shift == 1.0
    assert len(cmp.differences) == 3
    assert all(math.isfinite(d) for d in cmp.differences)
    assert cmp.to_json()["rows"][0]["difference"] == cmp.differences[0]
