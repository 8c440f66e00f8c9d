import numpy as np
import pytest

import tfred


def test_registry():
    names = tfred.list_systems()
    assert len(names) == 5
    assert "maltose_transport" in names
    with pytest.raises(KeyError):
        tfred.Example("nope")


def test_reduced_field_matches_closed_form():
    ex = tfred.Example("mm_reversible_small_e0")
    for x in ex.sample_manifold(50):
        np.testing.assert_allclose(ex.reduced_rhs(x), ex.closed_form_rhs(x), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(ex.closed_form_rhs(np.array([1.0, 0.0])), [-1.0 / 3.0, 0.0])


def test_projection_is_idempotent():
    ex = tfred.Example("maltose_transport")
    x = ex.sample_manifold(10)[3]
    Q = ex.projection(x)
    np.testing.assert_allclose(Q @ Q, Q, atol=1e-12)
    assert np.trace(Q) == pytest.approx(ex.dim - ex.rank)


def test_params_and_stationary_point():
    ex = tfred.Example("mm_reversible_small_e0", {"s0": 2.0})
    assert ex.params["s0"] == 2.0
    (z,) = ex.stationary_points()
    assert z[0] == pytest.approx(1.0)


def test_check_and_converge():
    ex = tfred.Example("mm_irrev_slow_k2")
    passed, verdicts, text = ex.check()
    assert passed
    assert verdicts["TFII"] == "certified-at-samples"
    assert "[summary]" in text
    res = ex.converge(eps=[1e-1, 1e-2, 1e-3], T=20.0)
    assert res["passed"]
    errs = [r["sup_err"] for r in res["rows"]]
    assert errs == sorted(errs, reverse=True)
    assert res["csv"].startswith("eps,sup_err")


def test_hurwitz_origin():
    assert tfred.hurwitz_computed(0, 0, 0, 0) == pytest.approx((3.0, 8.0, 1.0))


def test_cli_exit_codes():
    code, out, _ = tfred.run_cli(["list"])
    assert code == 0 and len(out.splitlines()) == 6
    code, _, err = tfred.run_cli(["check", "--system", "nope"])
    assert code == 2 and "maltose_transport" in err
