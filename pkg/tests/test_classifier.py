"""Softmax classifier training and per-example gradient magnitudes.

The closed-form gradient norm is checked against central finite
differences of an independently written cross-entropy loss, entry by
entry, so the two implementations share nothing but the definition.
"""

import numpy as np
import pytest
from sklearn.base import clone

from privcore import (
    Dataset,
    EmptyClassError,
    GradientTrace,
    ROLE_COARSE,
    ROLE_FINE,
    SoftmaxClassifier,
    TASK_COARSE,
    TASK_FINE,
    TrainConfig,
    accuracy,
    example_gradient_norms,
    gen_hierarchical,
    train_tracer,
)


def ce_loss(weights, x, label):
    logits = weights @ np.append(x, 1.0)
    logits = logits - logits.max()
    return float(np.log(np.exp(logits).sum()) - logits[label])


def fd_gradient_norm(weights, x, label, h=1e-5):
    total = 0.0
    for i in range(weights.shape[0]):
        for j in range(weights.shape[1]):
            bumped = weights.copy()
            bumped[i, j] += h
            up = ce_loss(bumped, x, label)
            bumped[i, j] -= 2 * h
            down = ce_loss(bumped, x, label)
            total += ((up - down) / (2 * h)) ** 2
    return np.sqrt(total)


def test_gradient_norms_match_finite_differences(rng):
    for _ in range(10):
        c = int(rng.integers(2, 5))
        d = int(rng.integers(2, 6))
        n = int(rng.integers(3, 8))
        weights = rng.standard_normal((c, d + 1))
        X = rng.standard_normal((n, d))
        labels = rng.integers(0, c, size=n)
        got = example_gradient_norms(weights, X, labels)
        for i in range(n):
            want = fd_gradient_norm(weights, X[i], labels[i])
            assert got[i] == pytest.approx(want, rel=1e-4)


def test_zero_weights_norm_closed_form(rng):
    # Uniform predictions make the residual norm sqrt(1 - 1/C) exactly.
    c, d, n = 4, 3, 12
    X = rng.standard_normal((n, d))
    labels = rng.integers(0, c, size=n)
    got = example_gradient_norms(np.zeros((c, d + 1)), X, labels)
    aug = np.sqrt((X**2).sum(axis=1) + 1.0)
    assert np.allclose(got, np.sqrt(1 - 1 / c) * aug, atol=1e-12)


def test_chunked_norms_match_serial(rng):
    weights = rng.standard_normal((3, 5))
    X = rng.standard_normal((200, 4))
    labels = rng.integers(0, 3, size=200)
    assert np.array_equal(
        example_gradient_norms(weights, X, labels, jobs=4),
        example_gradient_norms(weights, X, labels),
    )


def test_training_is_deterministic(small_hier, fast_train):
    _, a = train_tracer(small_hier, TASK_FINE, fast_train)
    _, b = train_tracer(small_hier, TASK_FINE, fast_train)
    assert np.array_equal(a.per_example_avg_norm, b.per_example_avg_norm)
    other = TrainConfig(epochs=3, learning_rate=0.1, batch_size=16, seed=1)
    _, c = train_tracer(small_hier, TASK_FINE, other)
    assert not np.array_equal(a.per_example_avg_norm, c.per_example_avg_norm)


def test_duplicate_rows_get_identical_trace_values(fast_train):
    base = gen_hierarchical(1, 2, 1, 8, d=4)
    X = base.features.copy()
    X[1] = X[0]  # duplicate row with matching label
    labels = base.target(ROLE_COARSE).copy()
    labels[1] = labels[0]
    ds = Dataset(features=X, targets={ROLE_COARSE: labels, ROLE_FINE: labels})
    _, trace = train_tracer(ds, TASK_COARSE, fast_train)
    assert trace.per_example_avg_norm[0] == trace.per_example_avg_norm[1]


def test_loss_curve_starts_before_training_and_descends(small_hier):
    # Full-batch updates with a gentle step should never climb.
    config = TrainConfig(epochs=8, learning_rate=0.01, batch_size=small_hier.n, seed=0)
    clf, _ = train_tracer(small_hier, TASK_COARSE, config)
    curve = clf.loss_curve_
    assert len(curve) == 9
    assert curve[0] == pytest.approx(np.log(3), rel=1e-6)  # uniform start, 3 classes
    assert all(b <= a + 1e-9 for a, b in zip(curve, curve[1:]))


def test_easy_data_reaches_full_accuracy():
    ds = gen_hierarchical(0, 3, 1, 10, d=4, within_sd=1e-3)
    clf, _ = train_tracer(ds, TASK_COARSE, TrainConfig(epochs=10, learning_rate=0.5, seed=0))
    assert accuracy(clf, ds, TASK_COARSE) == 1.0


def test_random_labels_stay_near_chance(rng):
    n, d, c = 600, 4, 3
    X = rng.standard_normal((n, d))
    labels = rng.integers(0, c, size=n)
    ds = Dataset(features=X, targets={ROLE_COARSE: labels, ROLE_FINE: labels})
    clf, _ = train_tracer(ds, TASK_COARSE, TrainConfig(epochs=3, learning_rate=0.1, seed=0))
    fresh = rng.integers(0, c, size=n)
    hit = float((clf.predict(X) == fresh).mean())
    assert 0.2 < hit < 0.47


def test_predict_proba_rows_normalized(small_hier, fast_train):
    clf, _ = train_tracer(small_hier, TASK_FINE, fast_train)
    proba = clf.predict_proba(small_hier.features[:10])
    assert proba.shape == (10, 6)
    assert np.allclose(proba.sum(axis=1), 1.0)
    assert np.array_equal(clf.predict(small_hier.features[:10]), proba.argmax(axis=1))


def test_explicit_class_count_tolerates_missing_classes(rng):
    X = rng.standard_normal((30, 3))
    labels = np.where(np.arange(30) % 2 == 0, 0, 2)  # class 1 absent
    clf = SoftmaxClassifier(epochs=2, num_classes=4).fit(X, labels)
    assert clf.weights_.shape == (4, 4)
    assert set(np.unique(clf.predict(X))) <= {0, 1, 2, 3}


def test_inferred_class_count_requires_all_classes(rng):
    X = rng.standard_normal((10, 2))
    labels = np.array([0, 2] * 5)
    with pytest.raises(EmptyClassError) as err:
        SoftmaxClassifier(epochs=1).fit(X, labels)
    assert 1 in err.value.missing_classes


def test_labels_beyond_class_count_rejected(rng):
    X = rng.standard_normal((6, 2))
    with pytest.raises(ValueError):
        SoftmaxClassifier(epochs=1, num_classes=2).fit(X, np.array([0, 1, 2, 0, 1, 2]))


def test_l2_shrinks_weights(small_hier):
    plain = SoftmaxClassifier(epochs=5, seed=0).fit(
        small_hier.features, small_hier.target(ROLE_FINE)
    )
    shrunk = SoftmaxClassifier(epochs=5, seed=0, l2=0.5).fit(
        small_hier.features, small_hier.target(ROLE_FINE)
    )
    assert np.linalg.norm(shrunk.weights_[:, :-1]) < np.linalg.norm(plain.weights_[:, :-1])


def test_estimator_contract(small_hier):
    clf = SoftmaxClassifier(epochs=2)
    assert isinstance(clone(clf), SoftmaxClassifier)
    clf.fit(small_hier.features, small_hier.target(ROLE_COARSE))
    assert clf.n_features_in_ == small_hier.d
    assert clf.num_classes_ == 3
    score = clf.score(small_hier.features, small_hier.target(ROLE_COARSE))
    assert 0.0 <= score <= 1.0


def test_trace_round_trip_and_csv(small_hier, fast_train, tmp_path):
    _, trace = train_tracer(small_hier, TASK_COARSE, fast_train)
    assert trace.task == TASK_COARSE
    assert trace.epochs_recorded == fast_train.epochs
    assert trace.per_example_avg_norm.shape == (small_hier.n,)
    assert np.all(trace.per_example_avg_norm >= 0)
    back = GradientTrace.from_dict(trace.to_dict())
    assert np.array_equal(back.per_example_avg_norm, trace.per_example_avg_norm)
    assert back.config == trace.config
    path = tmp_path / "trace.csv"
    trace.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,avg_norm"
    assert len(lines) == small_hier.n + 1


def test_accuracy_helper_matches_score(small_hier, fast_train):
    clf, _ = train_tracer(small_hier, TASK_FINE, fast_train)
    want = clf.score(small_hier.features, small_hier.target(ROLE_FINE))
    assert accuracy(clf, small_hier, TASK_FINE) == pytest.approx(want)
