import numpy as np
import pytest

from gdakit import datagen
from gdakit.errors import DataError, UnknownScenario
from gdakit.estimation import estimate_priors


def test_reference_parameters():
    np.testing.assert_array_equal(datagen.MEANS[0], [-4, 4])
    np.testing.assert_array_equal(datagen.MEANS[1], [3, -3])
    np.testing.assert_array_equal(datagen.MEANS[2], [-3, 3])
    np.testing.assert_array_equal(datagen.COVS[0], [[10, 1], [1, 5]])
    np.testing.assert_array_equal(datagen.COVS[1], [[3, 0], [0, 4]])
    np.testing.assert_array_equal(datagen.COVS[2], [[6, 1.5], [1.5, 4]])


@pytest.mark.parametrize(
    "sid,counts",
    [
        ("a", (200, 200, 200)),
        ("b", (200, 200)),
        ("c", (10, 10, 10)),
        ("d", (10, 10)),
        ("e", (200, 100, 10)),
        ("f", (200, 10)),
        ("g", (400, 200)),
    ],
)
def test_scenario_counts(sid, counts):
    spec = datagen.builtin_scenario(sid, 3)
    assert spec.counts == counts
    ds = datagen.generate(spec)
    assert tuple(ds.class_counts) == counts
    np.testing.assert_array_equal(estimate_priors(ds), np.array(counts) / sum(counts))


def test_scenario_a_parameters():
    spec = datagen.builtin_scenario("a")
    for k, cls in enumerate(spec.classes):
        assert len(cls) == 1
        np.testing.assert_array_equal(cls[0].mean, datagen.MEANS[k])
        np.testing.assert_array_equal(cls[0].cov, datagen.COVS[k])


def test_scenario_g_bimodal():
    spec = datagen.builtin_scenario("g")
    assert len(spec.classes[0]) == 2 and len(spec.classes[1]) == 1
    np.testing.assert_array_equal(spec.classes[1][0].mean, datagen.MEANS[2])
    ds = datagen.generate(spec)
    assert (ds.y == 0).sum() == 400 and (ds.y == 1).sum() == 200


def test_pair_is_configurable():
    spec = datagen.builtin_scenario("b", pair=(1, 2))
    np.testing.assert_array_equal(spec.classes[0][0].mean, datagen.MEANS[1])
    np.testing.assert_array_equal(spec.classes[1][0].mean, datagen.MEANS[2])


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        datagen.builtin_scenario("z")


def test_determinism():
    a = datagen.to_csv(datagen.generate(datagen.builtin_scenario("a", 11)))
    b = datagen.to_csv(datagen.generate(datagen.builtin_scenario("a", 11)))
    c = datagen.to_csv(datagen.generate(datagen.builtin_scenario("a", 12)))
    assert a == b
    assert a != c


def test_class_mean_bound():
    for seed in range(20):
        ds = datagen.generate(datagen.builtin_scenario("a", seed))
        assert np.max(np.abs(ds.rows(0).mean(axis=0) - datagen.MEANS[0])) < 0.7


def test_true_likelihoods_g():
    lik = datagen.builtin_scenario("g").true_likelihoods()
    np.testing.assert_array_equal(lik[0].weights, [0.5, 0.5])
    np.testing.assert_array_equal(lik[1].mean, datagen.MEANS[2])


def test_csv_round_trip(tmp_path):
    ds = datagen.generate(datagen.builtin_scenario("e", 2))
    path = tmp_path / "e.csv"
    datagen.write_csv(ds, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,label"
    assert len(lines) == 311
    back = datagen.read_csv(path)
    np.testing.assert_array_equal(back.X, ds.X)
    np.testing.assert_array_equal(back.y, ds.y)


@pytest.mark.parametrize(
    "text,where",
    [
        ("", "empty"),
        ("x1,x2\n1,2\n", ":1:"),
        ("x1,x2,label\n1,2,0\n1,2\n", ":3:"),
        ("x1,x2,label\n1,abc,0\n", ":2:"),
        ("x1,x2,label\n1,2,-1\n", ":2:"),
        ("x1,x2,label\n", "no data"),
    ],
)
def test_csv_errors(tmp_path, text, where):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(DataError, match=where):
        datagen.read_csv(path)
