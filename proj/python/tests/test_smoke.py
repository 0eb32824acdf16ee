import os
import subprocess

import numpy as np
import pytest

import ppgkit


def test_bandit_evaluation():
    mdp = ppgkit.bandit(gamma=0.9, delta=0.5)
    out = ppgkit.evaluate(mdp, np.array([[0.5, 0.5]]))
    assert out["v"][0] == pytest.approx(5.0, abs=1e-12)
    np.testing.assert_allclose(out["adv"], [[0.25, -0.25]], atol=1e-12)
    np.testing.assert_allclose(out["visitation"], [1.0], atol=1e-12)


def test_projection_matches_known_point():
    point, offset, support = ppgkit.project_simplex(np.array([0.75, 0.25, -1.0]))
    np.testing.assert_allclose(point, [0.75, 0.25, 0.0], atol=1e-15)
    assert offset == pytest.approx(0.0, abs=1e-15)
    assert support == [0, 1]


def test_pqa_step_on_bandit():
    mdp = ppgkit.bandit()
    step = ppgkit.pqa_step(mdp, np.array([[0.5, 0.5]]), 1.0)
    np.testing.assert_allclose(step["policy"], [[0.75, 0.25]], atol=1e-12)


def test_pi_bound_example():
    k0, raw = ppgkit.finite_k0("pi", 0.9, 0.5)
    assert k0 == 41
    assert raw == pytest.approx(40.943445622221, rel=1e-12)


def test_run_reaches_optimum_and_values_are_monotone():
    mdp = ppgkit.random_mdp(seed=3, states=4, actions=3, gamma=0.8)
    opt = ppgkit.solve_optimal(mdp)
    trace = ppgkit.run(mdp, "pqa", eta=1.0, iters=500, stop_on_optimal=True)
    values = [r["value_mu"] for r in trace["records"]]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert trace["first_optimal"] is not None
    assert values[-1] == pytest.approx(float(mdp.mu @ opt["v_star"]), abs=1e-9)


def test_json_round_trip(tmp_path):
    mdp = ppgkit.random_mdp(seed=7, states=3, actions=2, sparsity=0.3)
    path = tmp_path / "mdp.json"
    mdp.save(str(path))
    back = ppgkit.Mdp.load(str(path))
    np.testing.assert_array_equal(back.P, mdp.P)
    np.testing.assert_array_equal(back.r, mdp.r)
    assert back.gamma == mdp.gamma


def test_invalid_mdp_raises_with_code():
    with pytest.raises(ppgkit.Error) as info:
        ppgkit.Mdp(np.full((2, 2, 2), 0.4), np.zeros((2, 2, 2)), 0.9, np.array([0.5, 0.5]))
    assert info.value.code == "RowNotStochastic"


def test_verify_homotopic_suite():
    passed, text = ppgkit.verify("homotopic")
    assert passed, text
    assert "homotopic/" in text


@pytest.mark.skipif("PPGKIT_CLI" not in os.environ, reason="command-line tool path not provided")
def test_cli_gen_and_run(tmp_path):
    cli = os.environ["PPGKIT_CLI"]
    mdp_path = tmp_path / "bandit.json"
    subprocess.run([cli, "gen", "--kind", "bandit", "--out", str(mdp_path)], check=True)
    csv_path = tmp_path / "trace.csv"
    subprocess.run([cli, "run", "--mdp", str(mdp_path), "--rule", "pi", "--iters", "5", "--out", str(csv_path)],
                   check=True)
    assert csv_path.read_text().splitlines()[0].startswith("k,")
    assert (tmp_path / "trace.meta.json").exists()
