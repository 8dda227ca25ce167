import math

import numpy as np
import pytest

from qdl import reading
from qdl.discrimination import pure_overlap_error


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def test_collective_excess_risk_value():
    assert reading.collective_excess_risk(1.0) == pytest.approx(0.0747, abs=5e-5)


def test_collective_excess_risk_limits():
    # exponential suppression for bright sources; for faint sources the
    # closed form grows like 1/(16 a) (the prior-rescaled problem never
    # becomes trivial as the hypotheses merge)
    assert reading.collective_excess_risk(8.0) < 1e-10
    for a in (1e-3, 1e-5):
        assert reading.collective_excess_risk(a) == pytest.approx(1 / (16 * a), rel=1e-3)
    with pytest.raises(ValueError):
        reading.collective_excess_risk(0.0)


def test_collective_excess_risk_phase_invariant():
    base = reading.collective_excess_risk(0.8)
    for phase in (0.3, 2.0, -1.1):
        assert reading.collective_excess_risk(0.8 * np.exp(1j * phase)) == pytest.approx(
            base, abs=1e-15
        )


def test_finite_prior_risk_approaches_wide_prior():
    a0 = 0.9
    wide = reading.collective_excess_risk(a0)
    assert reading.collective_excess_risk_finite_prior(a0, 300.0) == pytest.approx(
        wide, rel=1e-4
    )
    # finite width is always below the wide-prior limit
    assert reading.collective_excess_risk_finite_prior(a0, 1.0) < wide


def test_optimal_squeezing_properties():
    values = [reading.optimal_squeezing(a) for a in (0.2, 0.5, 1.0, 2.0, 4.0)]
    assert all(v < 0 for v in values)
    assert abs(values[-1]) < 1e-2  # approaches zero for bright signals
    assert values[0] < values[2] < values[-1]  # diverges toward homodyne


def test_optimal_squeezing_minimizes_closed_form():
    for a0 in (0.5, 1.0, 1.5):
        r = reading.optimal_squeezing(a0)
        base = reading.eyd_excess_risk(a0, r)
        for dr in (-0.05, -0.01, 0.01, 0.05):
            assert reading.eyd_excess_risk(a0, r + dr) >= base - 1e-14


def test_eyd_gap_closes_for_bright_signals():
    gaps = []
    for a0 in (1.0, 2.0, 3.0):
        gaps.append(
            reading.eyd_excess_risk(a0, reading.optimal_squeezing(a0))
            - reading.collective_excess_risk(a0)
        )
    assert gaps[0] > gaps[1] > gaps[2] >= 0


def test_collective_beats_eyd_on_grid_with_factor_two():
    grid = np.linspace(0.3, 1.5, 25)
    ratios = []
    for a0 in grid:
        col = reading.collective_excess_risk(float(a0))
        eyd = reading.eyd_excess_risk(float(a0), reading.optimal_squeezing(float(a0)))
        assert col < eyd
        ratios.append(eyd / col)
    assert max(ratios) > 2.0


def test_plain_heterodyne_value():
    # squeezing zero evaluates the closed form directly
    a0 = 1.0
    x = a0 * a0
    e = math.exp(x)
    s = math.sqrt(1 - math.exp(-x))
    bracket = 4 * e * (1 - e) * (s - 1) + x * (4 * e * s - 2)
    want = math.exp(-x) / (16 * s * (e - 1)) * bracket
    assert reading.eyd_excess_risk(1.0, 0.0) == pytest.approx(want, abs=1e-15)


def test_concentrate_modes():
    assert reading.concentrate_modes(0.5 + 0.5j, 1) == 0.5 + 0.5j
    assert reading.concentrate_modes(0.3 + 0.1j, 4) == pytest.approx(0.6 + 0.2j)
    alpha, n = 0.7 + 0.2j, 9
    assert abs(reading.concentrate_modes(alpha, n)) ** 2 == pytest.approx(
        n * abs(alpha) ** 2
    )


# ---------------------------------------------------------------------------
# Fock-space helpers
# ---------------------------------------------------------------------------


def test_coherent_vector_normalized_at_rule_cutoff():
    for a in (0.5, 2.0, 5.0, 9.0):
        vec = reading.coherent_vector(a, reading.fock_cutoff(a))
        assert 1.0 - float(np.vdot(vec, vec).real) < 1e-12


def test_coherent_vector_overlap():
    k = reading.fock_cutoff(2.0)
    va = reading.coherent_vector(1.2, k)
    vb = reading.coherent_vector(-0.4 + 0.3j, k)
    want = math.exp(-abs(1.2 - (-0.4 + 0.3j)) ** 2)
    assert abs(np.vdot(va, vb)) ** 2 == pytest.approx(want, abs=1e-12)


def test_coherent_vector_tail_violation_raises():
    with pytest.raises(ValueError, match="cutoff"):
        reading.coherent_vector(4.0, 10)


def test_gaussian_prior_quadrature_moments():
    for mu in (0.7, 1.3):
        u, wt = reading._prior_grid(mu, 24)
        assert float(wt.sum()) == pytest.approx(1.0, abs=1e-12)
        assert float((wt * np.abs(u) ** 2).sum()) == pytest.approx(mu * mu, abs=1e-10)
        assert abs(complex((wt * (u + np.conj(u))).sum())) < 1e-10


def test_eigvec_overlap_identities():
    for a0 in (0.6, 1.0, 1.7):
        ids = reading.eigvec_overlap_identities(a0)
        for key in ("+", "-"):
            assert ids["overlap0"][key] == pytest.approx(
                ids["overlap0"]["closed" + key], abs=1e-12
            )
            assert ids["overlap1"][key] == pytest.approx(
                ids["overlap1"]["closed" + key], abs=1e-12
            )
        assert abs(ids["completeness_defect"]) < 1e-10
        assert ids["zero_order_gap"] == pytest.approx(
            2 * math.sqrt(1 - math.exp(-a0 * a0)), abs=1e-14
        )


# ---------------------------------------------------------------------------
# finite-copy oracle
# ---------------------------------------------------------------------------


def test_oracle_known_state_limit():
    # a vanishing prior width makes the source amplitude known: the error is
    # the pure-state rate at overlap e^(-|a|^2/2)
    for a0 in (0.6, 1.1):
        cfg = reading.ReadingConfig(alpha0=a0, mu=1e-5, n_aux=1)
        got = reading.finite_n_oracle(cfg, "collective", quadrature_order=8)
        want = pure_overlap_error(math.exp(-a0 * a0 / 2), 0.5)
        assert got == pytest.approx(want, abs=1e-9)


def test_oracle_collective_beats_eyd_at_finite_n():
    cfg = reading.ReadingConfig(alpha0=0.5, mu=1.0, n_aux=64)
    col = reading.finite_n_oracle(cfg, "collective", quadrature_order=10)
    eyd = reading.finite_n_oracle(cfg, "eyd", quadrature_order=10, squeeze=0.0)
    assert col < eyd


def test_oracle_eyd_squeezing_helps():
    cfg = reading.ReadingConfig(alpha0=0.5, mu=1.0, n_aux=64)
    r_opt = reading.optimal_squeezing(0.5)
    tuned = reading.finite_n_oracle(cfg, "eyd", quadrature_order=10, squeeze=r_opt)
    plain = reading.finite_n_oracle(cfg, "eyd", quadrature_order=10, squeeze=0.0)
    assert tuned < plain


def test_oracle_rejects_unknown_strategy():
    cfg = reading.ReadingConfig(alpha0=1.0, mu=1.0, n_aux=4)
    with pytest.raises(ValueError, match="strategy"):
        reading.finite_n_oracle(cfg, "homodyne")


def test_reading_config_validation():
    with pytest.raises(ValueError):
        reading.ReadingConfig(alpha0=1.0, mu=0.0, n_aux=4)
    with pytest.raises(ValueError):
        reading.ReadingConfig(alpha0=1.0, mu=1.0, n_aux=0)
