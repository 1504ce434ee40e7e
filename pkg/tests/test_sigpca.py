import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cechain.sigpca import (
    Centroids,
    Confusion,
    PcaModel,
    SchemaError,
    SigRecord,
    classify,
    covariance,
    fit_and_score,
    ingest_csv,
    jacobi_eigh,
    parse_csv,
    principal_components,
    project,
    reconstruct,
    sample_corpus_path,
    standardize,
    synthetic_corpus,
    write_csv,
)


def _random_sym(seed, n=3):
    a = np.random.default_rng(seed).normal(size=(n, n))
    return (a + a.T) / 2


def _charpoly_roots(m):
    # det(lambda I - M) = l^3 - tr l^2 + c1 l - det
    tr = np.trace(m)
    c1 = sum(m[i, i] * m[j, j] - m[i, j] * m[j, i] for i in range(3) for j in range(i + 1, 3))
    det = np.linalg.det(m)
    return np.sort(np.roots([1.0, -tr, c1, -det]).real)[::-1]


def test_constant_column_becomes_zero():
    x = np.array([[1.0, 5.0], [3.0, 5.0], [2.0, 5.0]])
    z = standardize(x)
    assert np.all(z[:, 1] == 0)


def test_two_point_feature():
    z = standardize(np.array([[1.0], [3.0]]))
    assert z[:, 0] == pytest.approx([-1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_standardized_means_zero():
    z = standardize(np.random.default_rng(0).normal(5, 3, size=(50, 3)))
    assert np.abs(z.mean(axis=0)).max() < 1e-12


def test_standardize_rejects_empty():
    with pytest.raises(ValueError):
        standardize([])


def test_covariance_single_feature():
    z = standardize(np.array([[1.0], [2.0], [4.0]]))
    assert covariance(z) == pytest.approx(np.array([[1.0]]))


def test_covariance_matches_double_loop():
    x = np.random.default_rng(3).normal(size=(100, 3))
    c = covariance(x)
    assert np.abs(c - c.T).max() < 1e-12
    n = x.shape[0]
    mu = [sum(x[r, j] for r in range(n)) / n for j in range(3)]
    naive = np.array([[sum((x[r, i] - mu[i]) * (x[r, j] - mu[j]) for r in range(n)) / (n - 1)
                       for j in range(3)] for i in range(3)])
    assert np.abs(c - naive).max() < 1e-10


def test_covariance_needs_two_rows():
    with pytest.raises(ValueError):
        covariance(np.ones((1, 3)))


def test_identity_eigenvalues():
    vals, _ = jacobi_eigh(np.eye(3))
    assert vals == pytest.approx([1, 1, 1])


def test_diag_first_pair():
    (lam, v), = principal_components(np.diag([2.0, 1.0]), 1)
    assert lam == 2.0 and v == pytest.approx([1.0, 0.0])


def test_nonsymmetric_rejected():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("seed", range(20))
def test_random_sym_against_cubic_roots(seed):
    m = _random_sym(seed)
    vals, vecs = jacobi_eigh(m)
    assert np.abs(vals - _charpoly_roots(m)).max() < 1e-9
    for j in range(3):
        assert np.abs(m @ vecs[:, j] - vals[j] * vecs[:, j]).max() < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=6, max_size=6))
def test_eigen_invariants(entries):
    m = np.zeros((3, 3))
    m[np.triu_indices(3)] = entries
    m = m + np.triu(m, 1).T
    vals, vecs = jacobi_eigh(m)
    scale = max(1.0, np.abs(m).max())
    assert np.all(np.diff(vals) <= 1e-9 * scale)
    assert np.abs(vecs.T @ vecs - np.eye(3)).max() < 1e-9
    assert abs(vals.sum() - np.trace(m)) < 1e-9 * scale
    assert np.abs(m @ vecs - vecs * vals).max() < 1e-9 * scale
    for j in range(3):
        col = vecs[:, j]
        assert col[np.flatnonzero(np.abs(col) > 1e-15)[0]] > 0


def test_score_variance_matches_eigenvalues():
    recs = synthetic_corpus(20, 4)
    model = PcaModel.fit(recs, k=3)
    scores = model.transform(recs)
    assert np.abs(scores.var(axis=0, ddof=1) - model.eigenvalues).max() < 1e-9
    assert model.eigenvalues[:2].sum() <= np.trace(covariance(standardize(recs))) + 1e-12


def test_full_rank_reconstruction():
    recs = synthetic_corpus(10, 5)
    model = PcaModel.fit(recs, k=3)
    z = standardize(recs, model)
    assert np.abs(reconstruct(project(z, model), model) - z).max() < 1e-9


def test_identity_covariance_scores_equal_z_up_to_sign():
    z = np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]])
    model = PcaModel.fit(z, k=2)
    scores = project(standardize(z, model), model)
    assert np.abs(np.abs(scores) - np.abs(standardize(z, model))).max() < 1e-12


def test_project_dimension_mismatch():
    model = PcaModel.fit(synthetic_corpus(5, 0))
    with pytest.raises(ValueError):
        project(np.zeros((2, 2)), model)


@pytest.mark.parametrize("seed", range(3))
def test_synthetic_five_ap_perfect(seed):
    rep = fit_and_score(synthetic_corpus(40, seed), synthetic_corpus(20, seed + 50))
    assert rep.ap.accuracy == 1.0
    assert rep.ce.accuracy == 1.0
    assert len(rep.ap.labels) == 5


def test_single_class_trivial():
    recs = [SigRecord(6.0, 100.0 + i, 150.0 + i, "only") for i in range(5)]
    model = PcaModel.fit(recs)
    cents = Centroids.fit(model.transform(recs), [r.ap_label for r in recs])
    _, conf = classify(recs, model, cents)
    assert conf.accuracy == 1.0


def test_tie_break_is_lexicographic():
    c = Centroids(("a", "b"), np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert c.predict(np.array([[0.0, 0.0]])) == ["a"]
    c2 = Centroids.fit(np.array([[0.0], [0.0]]), ["zeta", "alpha"])
    assert c2.predict(np.array([[0.0]])) == ["alpha"]


def test_unlabelled_centroids_rejected():
    with pytest.raises(ValueError):
        Centroids.fit(np.zeros((2, 2)), ["a", None])


@pytest.mark.parametrize("scale,shift", [((2.0, 0.5, 10.0), (3.0, -7.0, 1.0)),
                                         ((-1.0, 1.0, -3.0), (0.0, 0.0, 0.0))])
def test_affine_rescaling_does_not_change_labels(scale, shift):
    train, test = synthetic_corpus(20, 8), synthetic_corpus(10, 9)

    def labels(scale, shift):
        xtr = np.array([r.features for r in train]) * scale + shift
        xte = np.array([r.features for r in test]) * scale + shift
        model = PcaModel.fit(xtr)
        cents = Centroids.fit(project(standardize(xtr, model), model), [r.ap_label for r in train])
        return cents.predict(project(standardize(xte, model), model))

    assert labels(scale, shift) == labels((1.0, 1.0, 1.0), (0.0, 0.0, 0.0))


def test_confusion_json_shape():
    conf = Confusion.build(["a", "b", "b"], ["a", "a", "b"])
    assert conf.to_json() == {"labels": ["a", "b"], "matrix": [[1, 0], [1, 1]]}
    json.dumps(conf.to_json())


def test_record_validation():
    with pytest.raises(ValueError):
        SigRecord(0.0, 10.0, 10.0)
    with pytest.raises(ValueError):
        SigRecord(6.0, 10.0, 10.0, frame_class="data")


def test_csv_three_rows():
    text = "rate_mbps,length_bytes,duration_us\n6,100,153.3\n12,100,86.7\n24,60,40\n"
    assert len(parse_csv(text)) == 3


def test_csv_missing_column_named():
    with pytest.raises(SchemaError, match="duration_us"):
        parse_csv("rate_mbps,length_bytes\n6,100\n")


def test_csv_non_numeric_reports_line():
    with pytest.raises(SchemaError, match="line 3"):
        parse_csv("rate_mbps,length_bytes,duration_us\n6,100,153\n6,abc,153\n")


def test_shipped_corpus_round_trips(tmp_path):
    recs = ingest_csv(sample_corpus_path())
    assert len(recs) > 0 and {r.ap_label for r in recs} == {"ap1", "ap2", "ap3", "ap4", "ap5"}
    out = tmp_path / "again.csv"
    write_csv(recs, out)
    assert ingest_csv(out) == recs
    assert out.read_text() == sample_corpus_path().read_text()
