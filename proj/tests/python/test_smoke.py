import json
import math

import pytest

import mmot


def mixed_marginal():
    doc = {
        "d": 1,
        "atoms": [{"x": [2.0], "b": 0.3}],
        "diffuse": {
            "type": "uniform_box",
            "lo": [0.0],
            "hi": [1.0],
            "total_mass": 0.7,
            "samples": 128,
            "seed": 11,
        },
    }
    return mmot.Marginal.from_json(json.dumps(doc))


def test_construct_and_certify():
    m = mixed_marginal()
    assert mmot.validate(m, 2) == []
    plan = mmot.construct(m, 2)
    assert plan.arity == 2
    assert plan.mass == pytest.approx(1.0, abs=1e-12)

    cert = mmot.certify(plan, m, 2)
    assert cert["pass"]
    assert cert["separation"] > 0.0
    assert math.isfinite(cert["cost"])
    assert cert["marginal"]["max_atom_residual"] <= 1e-9


def test_plan_roundtrip_and_marginal():
    m = mixed_marginal()
    plan = mmot.construct(m, 3)
    again = mmot.Plan.from_json(plan.to_json())
    assert again.to_json() == plan.to_json()

    back = mmot.plan_marginal(plan)
    assert back.mass == pytest.approx(1.0, abs=1e-9)
    assert back.concentration == pytest.approx(0.3, abs=1e-9)


def test_boundary_marginal_is_rejected():
    sharp = mmot.sharpness_marginal(mmot.Omega.identity(), 2, 3, 256, seed=4)
    assert sharp.concentration == pytest.approx(1.0 / 3.0, abs=0)
    assert mmot.validate(sharp, 3) != []
    with pytest.raises(mmot.ValidationFailed):
        mmot.construct(sharp, 3)


def test_omega_profiles():
    assert mmot.Omega.power(2.0)(0.5) == pytest.approx(0.25)
    table = mmot.Omega.table([0.0, 0.5, 1.0], [0.0, 0.25, 1.0])
    assert table(0.25) == pytest.approx(0.125)
    assert table.inverse(0.25) == pytest.approx(0.5)


def test_sharpness_bound_closed_form():
    omega = mmot.Omega.identity()
    assert mmot.sharpness_lower_bound(omega, 3, 1e-3) == pytest.approx(
        math.log(1000.0) / 3.0, abs=1e-12
    )
    mc = mmot.sharpness_monte_carlo(omega, 2, 3, 1e-2, 50000, seed=1)
    assert mc == pytest.approx(math.log(100.0) / 3.0, rel=0.02)


def test_exact_optimum_matches_two_point_plan():
    doc = {"d": 1, "atoms": [{"x": [0.0], "b": 0.5}, {"x": [1.0], "b": 0.5}]}
    m = mmot.Marginal.from_json(json.dumps(doc))
    assert mmot.exact_optimum_tiny(m, 2) == pytest.approx(1.0, abs=1e-9)


def test_cost_is_infinite_on_touching_plan():
    plan_doc = {
        "N": 2,
        "d": 1,
        "blocks": [
            {
                "kind": "map",
                "symmetrized": True,
                "tuples": [{"x": [[0.5], [0.5]], "w": 1.0}],
            }
        ],
    }
    plan = mmot.Plan.from_json(json.dumps(plan_doc))
    assert math.isinf(mmot.plan_cost(plan))
    assert mmot.min_separation(plan) == 0.0
