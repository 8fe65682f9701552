import math

import pytest

import benchstat

SPEC = """beta=0.2
sigma0=0.01
cv_noise=0.01
algorithms=rf:0,svm:0.003,knn:0.05
n_datasets=20
delta_sd=0.05
delta_seed=1
"""


@pytest.fixture(scope="module")
def table():
    return benchstat.synthesize(SPEC, 7)


@pytest.fixture(scope="module")
def matrix(table):
    return benchstat.aggregate_errors(table)


def small_config():
    cfg = benchstat.McmcConfig()
    cfg.chains = 2
    cfg.adaptation = 100
    cfg.burn_in = 100
    cfg.draws = 300
    return cfg


def test_special_functions():
    assert benchstat.chi_square_sf(6.0, 2) == pytest.approx(math.exp(-3.0), abs=1e-12)
    q = 1.5
    assert benchstat.studentized_range_sf(q, 2) == pytest.approx(math.erfc(q / 2.0), abs=1e-6)
    shape, rate = benchstat.gamma_shape_rate_from_mode_sd(1.0, 1.0)
    assert rate == pytest.approx((1 + 5**0.5) / 2, abs=1e-9)
    assert shape == pytest.approx(1 + rate, abs=1e-9)


def test_tables_and_ranks(table, matrix):
    assert len(table) == 3 * 20 * 2
    assert matrix.algorithms == ["knn", "rf", "svm"]
    again = benchstat.read_errors(table.to_csv())
    assert again.to_csv() == table.to_csv()
    summary = benchstat.rank_summary(matrix)
    assert summary[-1]["algorithm"] == "knn"
    assert sum(row["top_count"] for row in summary) >= 20


def test_demsar_and_threshold(table, matrix):
    result = benchstat.demsar(matrix)
    assert result["p_value"] < 0.05
    assert result["nemenyi"] is not None
    thr = benchstat.irrelevance_threshold(table)
    assert thr["threshold"] == min(thr["median_delta_resample"], thr["median_delta_cv"])


def test_input_errors():
    with pytest.raises(benchstat.InputError):
        benchstat.read_errors("")
    with pytest.raises(ValueError):
        benchstat.read_errors("dataset,algorithm,subset,test_error\na,x,7,0.1\n")


def test_bayes_roundtrip(tmp_path, matrix):
    draws = benchstat.run_bayes(matrix, config=small_config(), seed=3)
    assert draws.n_chains == 2
    rope = draws.rope_matrix(0.0112)
    assert rope["values"][0][0] is None
    i, j = rope["algorithms"].index("rf"), rope["algorithms"].index("knn")
    assert rope["values"][i][j] < 0.05
    path = tmp_path / "draws.txt"
    draws.save(str(path))
    loaded = benchstat.load_draws(str(path))
    assert loaded.rope_matrix(0.0112) == rope
    diag = draws.diagnose()
    assert all(d["rhat"] < 1.1 for d in diag)
    ppc = benchstat.posterior_predictive_check(draws, matrix, 200, 1)
    assert 0.0 <= ppc["p_value"] <= 1.0
    assert len(ppc["t_real"]) == 200


def test_robust_ppc_refused(matrix):
    draws = benchstat.run_bayes(matrix, variant="robust", config=small_config(), seed=4)
    with pytest.raises(benchstat.InputError, match="degrees of freedom below 2"):
        benchstat.posterior_predictive_check(draws, matrix, 10, 1)


def test_diagnostics():
    chains = [[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]]
    assert benchstat.psrf(chains) == pytest.approx(math.sqrt(0.75))
    assert benchstat.psrf([[1.0, 1.0], [1.0, 1.0]]) is None
    assert benchstat.effective_sample_size([[1.0, 1.0], [1.0, 1.0]]) is None
