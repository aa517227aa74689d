"""Exact simplex and contextual-fraction tests with frozen values."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amcc.errors import PreconditionError
from amcc.lp import (
    EQUAL,
    GREATER,
    LESS,
    CfResult,
    LinearProgram,
    contextual_fraction,
    is_noncontextual,
    simplex_solve,
    stacked_weights,
)
from amcc.model import (
    deterministic_model,
    ghz_322,
    mix_models,
    parity_amcc_422,
    pr_box,
    uniform_model,
)
from amcc.rational import ONE, ZERO, rat
from amcc.scenario import bell_scenario


# ---------------------------------------------------------------------------
# raw simplex


def test_simplex_box_maximum():
    # max x + y with x <= 2, y <= 3
    lp = LinearProgram(
        objective=(1, 1),
        matrix=((1, 0), (0, 1)),
        rhs=(2, 3),
        senses=(LESS, LESS),
    )
    sol = simplex_solve(lp)
    assert sol.status == "optimal"
    assert sol.value == rat(5)
    assert sol.x == (rat(2), rat(3))


def test_simplex_fractional_vertex():
    # max x + y with 2x + y <= 4, x + 2y <= 4: optimum at x = y = 4/3
    lp = LinearProgram(
        objective=(1, 1),
        matrix=((2, 1), (1, 2)),
        rhs=(4, 4),
        senses=(LESS, LESS),
    )
    sol = simplex_solve(lp)
    assert sol.status == "optimal"
    assert sol.value == rat(8, 3)
    assert sol.x == (rat(4, 3), rat(4, 3))


def test_simplex_equality_and_greater_rows():
    # max x + 2y with x + y = 1, y >= 1/4
    lp = LinearProgram(
        objective=(1, 2),
        matrix=((1, 1), (0, 1)),
        rhs=(1, rat(1, 4)),
        senses=(EQUAL, GREATER),
    )
    sol = simplex_solve(lp)
    assert sol.status == "optimal"
    assert sol.value == rat(2)
    assert sol.x == (rat(0), rat(1))


def test_simplex_negative_rhs_is_normalized():
    # max x with -x <= -2 (i.e. x >= 2) and x <= 5
    lp = LinearProgram(
        objective=(1,),
        matrix=((-1,), (1,)),
        rhs=(-2, 5),
        senses=(LESS, LESS),
    )
    sol = simplex_solve(lp)
    assert sol.status == "optimal"
    assert sol.value == rat(5)


def test_simplex_infeasible():
    lp = LinearProgram(
        objective=(1,),
        matrix=((1,), (1,)),
        rhs=(1, 3),
        senses=(LESS, GREATER),
    )
    assert simplex_solve(lp).status == "infeasible"


def test_simplex_unbounded():
    lp = LinearProgram(
        objective=(1, 0),
        matrix=((0, 1),),
        rhs=(1,),
        senses=(LESS,),
    )
    assert simplex_solve(lp).status == "unbounded"


def test_simplex_exactness_on_awkward_rationals():
    # max x with 3x <= 1: the answer is exactly 1/3, no rounding
    lp = LinearProgram(objective=(1,), matrix=((3,),), rhs=(1,), senses=(LESS,))
    sol = simplex_solve(lp)
    assert sol.value == rat(1, 3)


def test_linear_program_shape_validation():
    with pytest.raises(ValueError):
        LinearProgram(objective=(1,), matrix=((1, 2),), rhs=(1,), senses=(LESS,))
    with pytest.raises(ValueError):
        LinearProgram(objective=(1,), matrix=((1,),), rhs=(1, 2), senses=(LESS,))
    with pytest.raises(ValueError):
        LinearProgram(objective=(1,), matrix=((1,),), rhs=(1,), senses=("<",))


# ---------------------------------------------------------------------------
# contextual fraction, frozen values


def test_pr_box_is_fully_contextual():
    res = contextual_fraction(pr_box(0))
    assert res.cf == ONE
    assert res.ncf == ZERO
    assert res.noncontextual is None
    assert res.strongly_contextual is not None


def test_uniform_model_is_noncontextual():
    res = contextual_fraction(uniform_model(bell_scenario(2, 2, 2)))
    assert res.cf == ZERO
    assert res.noncontextual is not None
    assert res.strongly_contextual is None


def test_noisy_pr_box_has_fraction_one_half():
    # 3/4 PR + 1/4 uniform sits at CHSH 3: cf = (3 - 2) / 2 = 1/2
    sc = bell_scenario(2, 2, 2)
    noisy = mix_models(
        [(rat(3, 4), pr_box(0)), (rat(1, 4), uniform_model(sc))]
    )
    res = contextual_fraction(noisy)
    assert res.cf == rat(1, 2)
    assert res.ncf == rat(1, 2)
    assert res.noncontextual is not None and res.strongly_contextual is not None


def test_ghz_and_parity_models_are_fully_contextual():
    for model in (ghz_322(), parity_amcc_422()):
        res = contextual_fraction(model)
        assert res.cf == ONE


def test_deterministic_model_is_noncontextual():
    res = contextual_fraction(deterministic_model(bell_scenario(2, 2, 2), 9))
    assert res.cf == ZERO
    # the witnessing distribution is the point mass on that assignment
    assert res.distribution[9] == ONE
    assert sum(res.distribution) == ONE


def test_decomposition_recomposes_the_model():
    sc = bell_scenario(2, 2, 2)
    noisy = mix_models(
        [(rat(7, 8), pr_box(0)), (rat(1, 8), uniform_model(sc))]
    )
    res = contextual_fraction(noisy)
    assert res.cf == rat(3, 4)
    for ci, row in enumerate(noisy.tables):
        for si, w in enumerate(row):
            acc = res.ncf * res.noncontextual.tables[ci][si]
            acc += res.cf * res.strongly_contextual.tables[ci][si]
            assert acc == w


def test_fraction_agrees_with_the_equality_feasibility_route():
    sc = bell_scenario(2, 2, 2)
    models = [
        pr_box(0),
        pr_box(5),
        uniform_model(sc),
        deterministic_model(sc, 3),
        mix_models([(rat(1, 2), pr_box(0)), (rat(1, 2), uniform_model(sc))]),
    ]
    for model in models:
        res = contextual_fraction(model)
        assert (res.cf == ZERO) == is_noncontextual(model)


def test_signaling_model_is_rejected():
    sc = bell_scenario(2, 2, 2)
    det = deterministic_model(sc, 0)
    rows = [list(r) for r in det.tables]
    # context 0 sees Y1=0 for sure while context 1 splits it, so Y1's
    # marginal depends on the partner's setting
    rows[1] = [rat(1, 2), ZERO, ZERO, rat(1, 2)]
    bad = type(det)(sc, tuple(tuple(r) for r in rows))
    with pytest.raises(PreconditionError, match="signaling"):
        contextual_fraction(bad)
    with pytest.raises(PreconditionError, match="signaling"):
        is_noncontextual(bad)


def test_stacked_weights_are_context_major():
    model = pr_box(0)
    flat = stacked_weights(model)
    assert len(flat) == 16
    assert tuple(flat[:4]) == model.tables[0]


@given(st.integers(0, 7), st.integers(0, 8), st.integers(1, 8))
@settings(max_examples=12, deadline=None)
def test_fraction_is_convex_under_uniform_noise(k, num, den):
    # mixing toward uniform can only shrink the fraction, and for PR boxes
    # the value is known in closed form: max(0, (2 - 4t) / 2) at noise t...
    # equivalently cf = 1 - 2t for t <= 1/2
    if num > den:
        num = den
    t = rat(num, den)
    sc = bell_scenario(2, 2, 2)
    mixed = mix_models([(ONE - t, pr_box(k)), (t, uniform_model(sc))])
    res = contextual_fraction(mixed)
    expected = max(ZERO, ONE - 2 * t)
    assert res.cf == expected


def test_cf_result_has_pivot_count():
    res = contextual_fraction(pr_box(0))
    assert isinstance(res, CfResult)
    assert res.pivots >= 1
