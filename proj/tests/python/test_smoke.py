"""Smoke tests for the Python surface: import, kernels, one short run."""

import math
import os

import pytest

import predictorlab as pl

SCENARIO_DIR = os.environ.get("PREDICTORLAB_SCENARIO_DIR", "scenarios")
SHORT = os.path.join(SCENARIO_DIR, "short_delay.json")


def test_expm_matches_hyperbolic_closed_form():
    # A = [[0, 1], [0.1, 0]] satisfies A^2 = 0.1 I, so
    # exp(A t) = cosh(r t) I + sinh(r t)/r A with r = sqrt(0.1).
    a = [[0.0, 1.0], [0.1, 0.0]]
    t = 1.0
    m = pl.expm(a, t)
    r = math.sqrt(0.1)
    assert m[0][0] == pytest.approx(math.cosh(r * t), rel=1e-12)
    assert m[0][1] == pytest.approx(math.sinh(r * t) / r, rel=1e-12)
    assert m[1][0] == pytest.approx(0.1 * math.sinh(r * t) / r, rel=1e-12)
    assert m[1][1] == pytest.approx(math.cosh(r * t), rel=1e-12)


def test_solve_and_norms():
    x = pl.solve_linear([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0])
    assert x == pytest.approx([1.0, 2.0])
    assert pl.operator_norm([[3.0, 0.0], [0.0, -4.0]]) == pytest.approx(4.0)
    assert pl.spectral_radius([[0.0, 1.0], [-1.0, 0.0]]) == pytest.approx(1.0)
    assert pl.spectral_abscissa([[0.0, 1.0], [0.1, 0.0]]) == pytest.approx(
        math.sqrt(0.1), rel=1e-6
    )
    cert = pl.hurwitz_certificate([[-1.0, 0.0], [0.0, -2.0]])
    assert cert["is_hurwitz"] is True
    with pytest.raises(ArithmeticError):
        pl.solve_linear([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])


def test_simulate_short_run_is_bounded_and_consistent():
    out = pl.simulate(SHORT, t_end=8.0, h=1e-3)
    assert out["mode"] == "modified"
    assert not out["diverged"]
    assert out["identity_applicable"] and out["identity_ok"]
    assert len(out["t"]) == 8001
    assert len(out["x"]) == 2 and len(out["x"][0]) == 8001
    peak = max(max(abs(v) for v in column) for column in out["x"])
    assert 0.0 < peak < 100.0
    # z = zeta + eps, re-checked from the Python side.
    for j in range(2):
        for k in range(0, 8001, 997):
            assert out["z"][j][k] == pytest.approx(
                out["zeta"][j][k] + out["eps"][j][k], abs=1e-15
            )


def test_analyze_reference_scenario():
    report = pl.analyze(SHORT)
    assert report["gains_valid"] is True
    assert report["rho"] < 1.0
    assert report["spectral_stable"] is True
    assert report["lyapunov_valid"] is True
    assert report["alpha"] == pytest.approx(0.48790923984375406, rel=1e-6)
    assert report["integral_identity_residual"] < 1e-8


def test_sweep_finds_threshold():
    result = pl.find_min_stable_T(SHORT, t_lo=4.0, t_hi=6.0, t_step=0.5)
    assert result["found"] is True
    assert result["min_stable_T"] == pytest.approx(4.5)
    assert len(result["rows"]) == 5


def test_errors_surface_as_python_exceptions():
    with pytest.raises(OSError):
        pl.simulate("/tmp/predictorlab_missing_scenario.json")
    with pytest.raises(ValueError):
        pl.find_min_stable_T(SHORT, criterion="bogus")
