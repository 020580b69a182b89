import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, stats

from payoffgap import scoring as sc
from payoffgap.errors import DomainError, SeriesTruncationError, ValidationError


# -------------------------------------------------------------------- metrics

def test_pl_score_examples():
    rep = sc.pl_score([1.0, -2.0, 3.0])
    assert rep.value == 2.0
    assert not rep.absorbed

    # barrier crossed after two losses: the +5 never accrues
    rep = sc.pl_score([-1.0, -1.0, 5.0], sc.SurvivalConfig(b=-1.5))
    assert rep.value == -2.0
    assert rep.absorbed and rep.absorbed_at == 3

    # initial capital is additive bookkeeping only
    rep = sc.pl_score([1.0, 1.0], sc.SurvivalConfig(b=-10.0, initial=100.0))
    assert rep.value == 102.0


def test_pl_score_nonnegative_barrier_absorbs_immediately():
    # the empty pre-sum is 0, which is not strictly above b = 0
    rep = sc.pl_score([5.0, 5.0], sc.SurvivalConfig(b=0.0))
    assert rep.absorbed and rep.absorbed_at == 1
    assert rep.value == 0.0


def test_pl_score_empty_stream():
    rep = sc.pl_score([])
    assert rep.value == 0.0 and rep.n == 0 and not rep.absorbed


def test_tally():
    rep = sc.tally([1, 0, 1, 1])
    assert rep.value == 0.75 and rep.n == 4
    with pytest.raises(ValidationError):
        sc.tally([0.5, 1.0])
    with pytest.raises(ValidationError):
        sc.tally([])


def test_brier_examples():
    s = sc.ForecastSeries.from_probabilities([0.5, 0.5], [1, 0])
    assert sc.brier(s).value == 0.25
    s = sc.ForecastSeries.from_probabilities([1.0, 0.0], [1, 0])
    assert sc.brier(s).value == 0.0
    s = sc.ForecastSeries.from_probabilities([0.0], [1])
    assert sc.brier(s).value == 1.0


def test_brier_constant_forecast_converges_to_p_one_minus_p():
    rng = np.random.default_rng(5)
    p = 0.3
    hits = rng.binomial(1, p, size=200_000)
    s = sc.ForecastSeries.from_probabilities(np.full(hits.size, p), hits)
    assert sc.brier(s).value == pytest.approx(p * (1 - p), abs=2e-3)


def test_forecast_series_validation():
    with pytest.raises(ValidationError):
        sc.ForecastSeries.from_probabilities([1.2], [1])
    with pytest.raises(ValidationError):
        sc.ForecastSeries.from_probabilities([0.5], [2])
    with pytest.raises(ValidationError):
        sc.ForecastSeries.from_probabilities([0.5, 0.5], [1])
    with pytest.raises(ValidationError):
        sc.brier(sc.ForecastSeries.from_points([1.0], [1.0]))


def test_m4_smape():
    s = sc.ForecastSeries.from_points([10.0], [8.0])
    assert sc.m4_score(s).value == pytest.approx(2.0 / 9.0, rel=1e-12)
    # symmetric in sign of the error but not scale-free
    s = sc.ForecastSeries.from_points([8.0], [10.0])
    assert sc.m4_score(s).value == pytest.approx(2.0 / 9.0, rel=1e-12)


def test_m4_smape_zero_zero_skipped():
    s = sc.ForecastSeries.from_points([0.0, 10.0], [0.0, 8.0])
    with pytest.warns(UserWarning):
        rep = sc.m4_score(s)
    assert rep.skipped == 1
    assert rep.value == pytest.approx(2.0 / 9.0, rel=1e-12)
    s = sc.ForecastSeries.from_points([0.0], [0.0])
    with pytest.warns(UserWarning), pytest.raises(ValidationError):
        sc.m4_score(s)


def test_m4_mase():
    s = sc.ForecastSeries.from_points([10.0, 4.0], [8.0, 1.0])
    rep = sc.m4_score(s, variant="s2_mase", naive_errors=2.0)
    assert rep.value == pytest.approx((1.0 + 1.5) / 2.0, rel=1e-12)
    with pytest.raises(ValidationError):
        sc.m4_score(s, variant="s2_mase")
    with pytest.raises(ValidationError):
        sc.m4_score(s, variant="s2_mase", naive_errors=0.0)
    with pytest.raises(ValidationError):
        sc.m4_score(s, variant="median")


def test_naive_mad():
    assert sc.naive_mad([1.0, 3.0, 2.0]) == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        sc.naive_mad([1.0])


def test_m5_extrema_score():
    path = [2.0, 5.0, 1.0, 4.0]  # min 1, max 5
    rep = sc.m5_extrema_score(1.0, 4.0, path)
    # min term exact -> 0; max term |4-5| / (0.5 (4+5)) = 2/9
    assert rep.value == pytest.approx(0.5 * (0.0 + 2.0 / 9.0), rel=1e-12)
    # exact forecasts score 0 even with a degenerate zero scale
    assert sc.m5_extrema_score(0.0, 3.0, [0.0, 3.0]).value == 0.0
    rep = sc.m5_extrema_score(0.0, 6.0, path, variant="s2_mase", naive_errors=2.0)
    assert rep.value == pytest.approx(0.5 * (0.5 + 0.5), rel=1e-12)
    with pytest.raises(ValidationError):
        sc.m5_extrema_score(0.0, 1.0, [])


def test_read_forecast_csv(tmp_path):
    p = tmp_path / "probs.csv"
    p.write_text("f,hit\n0.9,1\n0.2,0\n")
    s = sc.read_forecast_csv(p)
    assert s.n == 2 and s.probabilities[0] == 0.9

    q = tmp_path / "points.csv"
    q.write_text("forecast,realized\n10,8\n")
    s = sc.read_forecast_csv(q)
    assert s.forecasts[0] == 10.0

    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValidationError):
        sc.read_forecast_csv(bad)


# ------------------------------------------------------------ Brier analytics

PARAM_SETS = [(1.0, 1.0, 0.5), (2.0, 3.0, 0.4), (0.5, 0.5, 0.2)]


def _mc_scores(a, b, p, n, reps, seed):
    return sc.simulate_brier_scores(sc.BrierModel(a, b, p), n, reps, seed)


@pytest.mark.parametrize("a,b,p", PARAM_SETS)
def test_brier_moments_vs_monte_carlo(a, b, p):
    model = sc.BrierModel(a, b, p)
    n = 50
    mu, s2 = sc.brier_moments(model, n)
    scores = _mc_scores(a, b, p, n, 40_000, seed=17)
    assert scores.mean() == pytest.approx(mu, abs=4 * math.sqrt(s2 / 40_000) + 1e-4)
    assert scores.var(ddof=1) == pytest.approx(s2, rel=0.05)


def test_brier_moments_uniform_exact():
    # a = b = 1: mu = 1/3 for every p
    for p in (0.0, 0.2, 0.5, 0.9, 1.0):
        mu, _ = sc.brier_moments(sc.BrierModel(1.0, 1.0, p), 10)
        assert mu == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_brier_moments_quadrature_oracle():
    # mu against direct integration of z * pdf_single(z)
    for a, b, p in PARAM_SETS:
        model = sc.BrierModel(a, b, p)
        mu, _ = sc.brier_moments(model, 1)
        oracle, _ = integrate.quad(
            lambda z: z * sc.brier_pdf_single(z, model), 0.0, 1.0, limit=200
        )
        assert mu == pytest.approx(oracle, rel=1e-8)


def test_brier_moments_validation():
    with pytest.raises(ValidationError):
        sc.brier_moments(sc.BrierModel(1, 1, 0.5), 0)
    with pytest.raises(ValidationError):
        sc.BrierModel(0.0, 1.0, 0.5)
    with pytest.raises(ValidationError):
        sc.BrierModel(1.0, 1.0, 1.5)


def test_brier_kurtosis():
    assert sc.brier_kurtosis(sc.BrierModel(1, 1, 0.5), 7, "max_entropy") == pytest.approx(
        -6.0 / 49.0, rel=1e-12
    )
    # max-variance limit at p = 1/2: -(6 * (-1/4) + 1) / (n * (-1/4)) = -2/n
    assert sc.brier_kurtosis(sc.BrierModel(1, 1, 0.5), 5, "max_variance") == pytest.approx(
        -2.0 / 5.0, rel=1e-12
    )
    with pytest.raises(DomainError):
        sc.brier_kurtosis(sc.BrierModel(1, 1, 1.0), 5, "max_variance")
    with pytest.raises(ValidationError):
        sc.brier_kurtosis(sc.BrierModel(1, 1, 0.5), 5, "platykurtic")


def test_brier_kurtosis_max_entropy_matches_beta_moments():
    # -6/(7n) is the standardized excess kurtosis of the n-evaluation score:
    # the single-evaluation excess kurtosis (from quadrature moments) over n
    n = 7
    model = sc.BrierModel(1.0, 1.0, 0.5)
    mu, _ = sc.brier_moments(model, 1)
    m2, _ = integrate.quad(
        lambda z: (z - mu) ** 2 * sc.brier_pdf_single(z, model), 0, 1, limit=200
    )
    m4, _ = integrate.quad(
        lambda z: (z - mu) ** 4 * sc.brier_pdf_single(z, model), 0, 1, limit=200
    )
    excess_single = m4 / m2**2 - 3.0
    assert excess_single == pytest.approx(-6.0 / 7.0, rel=1e-8)
    assert sc.brier_kurtosis(model, n, "max_entropy") == pytest.approx(
        excess_single / n, rel=1e-8
    )


def test_brier_pdf_single():
    model = sc.BrierModel(1.0, 1.0, 0.5)
    for z in (0.04, 0.25, 0.81):
        assert sc.brier_pdf_single(z, model) == pytest.approx(
            1.0 / (2.0 * math.sqrt(z)), rel=1e-12
        )
    for a, b, p in PARAM_SETS:
        total, _ = integrate.quad(
            lambda z: sc.brier_pdf_single(z, sc.BrierModel(a, b, p)), 0, 1, limit=200
        )
        assert total == pytest.approx(1.0, rel=1e-7)
    with pytest.raises(DomainError):
        sc.brier_pdf_single(0.0, model)
    with pytest.raises(DomainError):
        sc.brier_pdf_single(1.5, model)


@pytest.mark.parametrize("a,b,p", PARAM_SETS)
def test_brier_pdf_single_gof(a, b, p):
    model = sc.BrierModel(a, b, p)
    z = _mc_scores(a, b, p, 1, 100_000, seed=7)
    edges = np.linspace(0.001, 0.999, 41)
    observed, _ = np.histogram(z, bins=edges)
    expected = np.array(
        [
            integrate.quad(lambda t: sc.brier_pdf_single(t, model), lo, hi, limit=100)[0]
            for lo, hi in zip(edges[:-1], edges[1:])
        ]
    )
    expected = expected / expected.sum() * observed.sum()
    assert stats.chisquare(observed, expected).pvalue > 0.005


def test_charfn_basics():
    model = sc.BrierModel(2.0, 3.0, 0.4)
    assert sc.brier_charfn(0.0, model, 5) == 1.0 + 0.0j
    for t in (0.5, 2.0, 10.0):
        assert abs(sc.brier_charfn(t, model, 5)) <= 1.0 + 1e-10
        # conjugate symmetry
        assert sc.brier_charfn(-t, model, 5) == pytest.approx(
            sc.brier_charfn(t, model, 5).conjugate(), rel=1e-10
        )


@pytest.mark.parametrize("a,b,p", PARAM_SETS)
def test_charfn_vs_quadrature(a, b, p):
    model = sc.BrierModel(a, b, p)
    for t in (1.0, 3.0):
        oracle = complex(
            integrate.quad(
                lambda z: math.cos(t * z) * sc.brier_pdf_single(z, model), 0, 1, limit=200
            )[0],
            integrate.quad(
                lambda z: math.sin(t * z) * sc.brier_pdf_single(z, model), 0, 1, limit=200
            )[0],
        )
        got = sc.brier_charfn(t, model, 1)
        assert got.real == pytest.approx(oracle.real, abs=1e-8)
        assert got.imag == pytest.approx(oracle.imag, abs=1e-8)


def test_charfn_vs_mpmath_hyper():
    # the regularized 2F2 building block against mpmath
    a1, a2, b1, b2 = 1.5, 1.0, 2.5, 3.0
    for t in (0.7, 5.0, 20.0):
        ours = sc._hyp2f2_regularized(a1, a2, b1, b2, 1j * t)
        ref = mpmath.hyper([a1, a2], [b1, b2], 1j * t) / (
            mpmath.gamma(b1) * mpmath.gamma(b2)
        )
        assert ours.real == pytest.approx(float(ref.real), rel=1e-9, abs=1e-12)
        assert ours.imag == pytest.approx(float(ref.imag), rel=1e-9, abs=1e-12)


def test_charfn_derivative_gives_mean():
    model = sc.BrierModel(2.0, 3.0, 0.4)
    mu, _ = sc.brier_moments(model, 6)
    h = 1e-5
    deriv = (sc.brier_charfn(h, model, 6) - sc.brier_charfn(-h, model, 6)) / (2 * h)
    assert deriv.imag == pytest.approx(mu, rel=1e-6)
    assert abs(deriv.real) < 1e-8


def test_charfn_vs_empirical():
    model = sc.BrierModel(1.0, 1.0, 0.5)
    n = 4
    scores = _mc_scores(1.0, 1.0, 0.5, n, 60_000, seed=23)
    for t in (1.0, 3.0):
        emp = np.mean(np.exp(1j * t * scores))
        got = sc.brier_charfn(t, model, n)
        assert abs(got - emp) < 0.02


def test_charfn_series_truncation():
    with pytest.raises(SeriesTruncationError) as exc:
        sc._hyp2f2_regularized(1.0, 0.5, 1.0, 1.0, 1j * 300.0)
    assert exc.value.achieved > 0


def test_charfn_validation():
    with pytest.raises(ValidationError):
        sc.brier_charfn(1.0, sc.BrierModel(1, 1, 0.5), 0)


def test_tally_cumulants_exact():
    k1, k2, k3, k4 = sc.tally_cumulants(0.3, 100)
    assert k1 == 0.3
    assert k2 == pytest.approx(0.21 / 100)
    assert k3 == pytest.approx(-0.7 * 0.3 * -0.4 / 100**2)
    assert k4 == pytest.approx(0.21 * (6 * -0.7 * 0.3 + 1) / 100**3)
    # symmetric case: odd cumulant vanishes
    assert sc.tally_cumulants(0.5, 10)[2] == 0.0
    with pytest.raises(ValidationError):
        sc.tally_cumulants(1.2, 10)
    with pytest.raises(ValidationError):
        sc.tally_cumulants(0.5, 0)


def test_tally_cumulants_vs_empirical():
    p, N = 0.3, 50
    rng = np.random.default_rng(11)
    tallies = rng.binomial(N, p, size=200_000) / N
    k1, k2, k3, k4 = sc.tally_cumulants(p, N)
    assert stats.kstat(tallies, 1) == pytest.approx(k1, abs=1e-3)
    assert stats.kstat(tallies, 2) == pytest.approx(k2, rel=0.02)
    assert stats.kstat(tallies, 3) == pytest.approx(k3, rel=0.2)
    assert stats.kstat(tallies, 4) == pytest.approx(k4, rel=0.5, abs=2e-7)


def test_tally_variance_bounded():
    # the tally's variance is bounded by 1/(4N) no matter the generator tails
    for p in np.linspace(0.01, 0.99, 25):
        assert sc.tally_cumulants(p, 30)[1] <= 1.0 / (4 * 30) + 1e-15


def test_simulate_brier_scores_deterministic():
    model = sc.BrierModel(2.0, 3.0, 0.4)
    a = sc.simulate_brier_scores(model, 10, 100, seed=3)
    b = sc.simulate_brier_scores(model, 10, 100, seed=3)
    np.testing.assert_array_equal(a, b)
    assert a.shape == (100,)
    assert np.all((a >= 0) & (a <= 1))
