"""Synthetic generators, CSV round trips, and split behavior."""

import json

import numpy as np
import pytest

from privcore import (
    CsvParseError,
    Dataset,
    GeneratorManifest,
    ROLE_COARSE,
    ROLE_FINE,
    ROLE_PUBLIC,
    ROLE_SECRET,
    fit_least_squares,
    gen_hierarchical,
    gen_linear,
    gen_normal_scalar,
    read_csv,
    read_manifest,
    stratified_split,
    write_csv,
    write_manifest,
)


def test_gen_linear_deterministic():
    a = gen_linear(11, 50)
    b = gen_linear(11, 50)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.target(ROLE_PUBLIC), b.target(ROLE_PUBLIC))
    assert np.array_equal(a.target(ROLE_SECRET), b.target(ROLE_SECRET))
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != gen_linear(12, 50).fingerprint()


def test_gen_linear_shapes_and_roles():
    ds = gen_linear(0, 30, d=4)
    assert ds.features.shape == (30, 4)
    assert ds.has_role(ROLE_PUBLIC) and ds.has_role(ROLE_SECRET)
    assert not ds.has_role(ROLE_COARSE) and not ds.has_role(ROLE_FINE)


def test_gen_linear_feature_marginals():
    X = gen_linear(1, 4000).features
    # Column families cycle by position: gaussian, bounded uniform, nonnegative.
    assert abs(X[:, 0].mean()) < 0.1 and abs(X[:, 0].std() - 1.0) < 0.1
    assert X[:, 1].min() >= -1.0 and X[:, 1].max() <= 1.0
    assert X[:, 2].min() >= 0.0 and abs(X[:, 2].mean() - 1.0) < 0.1


def test_zero_noise_targets_identifiable():
    ds = gen_linear(5, 200, noise_sd=0.0)
    m = ds.manifest
    fit_y = fit_least_squares(ds.features, ds.target(ROLE_PUBLIC))
    fit_z = fit_least_squares(ds.features, ds.target(ROLE_SECRET))
    assert np.allclose(fit_y.weights, m.true_y_model.weights, atol=1e-6)
    assert fit_y.intercept == pytest.approx(m.true_y_model.intercept, abs=1e-6)
    assert np.allclose(fit_z.weights, m.true_z_model.weights, atol=1e-6)


def test_manifest_json_round_trip(tmp_path):
    for ds in (gen_linear(2, 10), gen_hierarchical(2, 2, 2, 3, d=6), gen_normal_scalar(2, 10)):
        path = tmp_path / "m.json"
        write_manifest(ds.manifest, path)
        back = read_manifest(path)
        assert isinstance(back, GeneratorManifest)
        assert back.to_dict() == ds.manifest.to_dict()


def test_csv_round_trip_is_bit_exact(tmp_path):
    ds = gen_linear(9, 40)
    path = tmp_path / "data.csv"
    write_csv(ds, path, manifest_path=tmp_path / "manifest.json")
    back = read_csv(path, manifest_path=tmp_path / "manifest.json")
    assert np.array_equal(back.features, ds.features)
    for role in (ROLE_PUBLIC, ROLE_SECRET):
        assert np.array_equal(back.target(role), ds.target(role))
    assert back.fingerprint() == ds.fingerprint()


def test_csv_round_trip_hierarchical_labels(tmp_path):
    ds = gen_hierarchical(4, 2, 2, 5, d=6)
    path = tmp_path / "h.csv"
    write_csv(ds, path)
    back = read_csv(path, manifest_path=tmp_path / "h.manifest.json")
    assert back.target(ROLE_FINE).dtype.kind == "i"
    assert np.array_equal(back.target(ROLE_FINE), ds.target(ROLE_FINE))
    assert np.array_equal(back.target(ROLE_COARSE), ds.target(ROLE_COARSE))


def test_csv_write_twice_identical_bytes(tmp_path):
    ds = gen_linear(3, 25)
    write_csv(ds, tmp_path / "a.csv")
    write_csv(ds, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_bad_numeric_cell_names_row_and_column(tmp_path):
    ds = gen_linear(6, 8)
    path = tmp_path / "data.csv"
    write_csv(ds, path)
    lines = path.read_text().splitlines()
    parts = lines[4].split(",")
    parts[0] = "not-a-number"
    lines[4] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CsvParseError) as err:
        read_csv(path)
    assert err.value.row == 5  # 1-based file line, header included
    assert err.value.column == "x0"


def test_fractional_label_cell_rejected(tmp_path):
    ds = gen_hierarchical(1, 2, 1, 3, d=4)
    path = tmp_path / "h.csv"
    write_csv(ds, path)
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    col = header.index("fine")
    parts = lines[1].split(",")
    parts[col] = "1.5"
    lines[1] = ",".join(parts)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CsvParseError) as err:
        read_csv(path)
    assert err.value.column == "fine"


def test_subset_preserves_rows_and_drops_lineage():
    ds = gen_linear(7, 20)
    idx = [1, 4, 7]
    sub = ds.subset(idx)
    assert np.array_equal(sub.features, ds.features[idx])
    assert np.array_equal(sub.target(ROLE_PUBLIC), ds.target(ROLE_PUBLIC)[idx])
    assert sub.fingerprint() != ds.fingerprint()
    assert sub.manifest == "external"


def test_hierarchical_row_layout():
    ds = gen_hierarchical(0, 3, 2, 4, d=8)
    fine = ds.target(ROLE_FINE)
    coarse = ds.target(ROLE_COARSE)
    assert np.array_equal(fine, np.repeat(np.arange(6), 4))
    assert np.array_equal(coarse, fine // 2)
    assert ds.num_classes(ROLE_FINE) == 6
    assert ds.num_classes(ROLE_COARSE) == 3


def test_hierarchical_exact_separations():
    # Noise shrunk to nothing so distances reflect pure geometry.
    ds = gen_hierarchical(8, 3, 2, 1, d=8, coarse_sep=4.0, fine_sep=2.5, within_sd=1e-12)
    X = ds.features
    fine = ds.target(ROLE_FINE)
    coarse = ds.target(ROLE_COARSE)
    for i in range(ds.n):
        for j in range(i + 1, ds.n):
            dist = np.linalg.norm(X[i] - X[j])
            if coarse[i] == coarse[j] and fine[i] != fine[j]:
                assert dist == pytest.approx(2.5, abs=1e-6)
            elif coarse[i] != coarse[j]:
                assert dist >= 4.0 - 1e-6  # coarse gap dominates


def test_single_fine_per_coarse_collapses_to_coarse():
    ds = gen_hierarchical(2, 4, 1, 2, d=4, within_sd=1e-12)
    assert np.array_equal(ds.target(ROLE_FINE), ds.target(ROLE_COARSE))
    # With offsets gone the class means are the centers themselves.
    X = ds.features
    centers = np.stack([X[ds.target(ROLE_COARSE) == c].mean(axis=0) for c in range(4)])
    for a in range(4):
        for b in range(a + 1, 4):
            assert np.linalg.norm(centers[a] - centers[b]) == pytest.approx(4.0, abs=1e-6)


def test_hierarchical_dimension_check():
    with pytest.raises(ValueError, match="need d >="):
        gen_hierarchical(0, 5, 4, 2, d=8)


def test_separation_ordering_check():
    with pytest.raises(ValueError, match="coarse_sep > fine_sep"):
        gen_hierarchical(0, 2, 2, 2, d=6, coarse_sep=2.0, fine_sep=3.0)


def test_gen_normal_scalar_stats():
    ds = gen_normal_scalar(0, 5000, mu=2.0, sigma=3.0)
    x = ds.features[:, 0]
    assert x.mean() == pytest.approx(2.0, abs=0.2)
    assert x.std() == pytest.approx(3.0, abs=0.2)
    assert ds.manifest.mu == 2.0 and ds.manifest.sigma == 3.0


def test_stratified_split_properties(small_hier):
    train, test = stratified_split(small_hier, 0.25, seed=0)
    assert np.array_equal(train, np.sort(train))
    assert np.array_equal(test, np.sort(test))
    assert set(train).isdisjoint(test)
    assert len(train) + len(test) == small_hier.n
    fine = small_hier.target(ROLE_FINE)
    for cls in range(small_hier.num_classes(ROLE_FINE)):
        count = int((fine == cls).sum())
        want = min(round(0.25 * count), count - 1)
        assert int((fine[test] == cls).sum()) == want


def test_stratified_split_deterministic(small_hier):
    a = stratified_split(small_hier, 0.2, seed=3)
    b = stratified_split(small_hier, 0.2, seed=3)
    c = stratified_split(small_hier, 0.2, seed=4)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[1], c[1])


def test_dataset_rejects_mismatched_target_length():
    with pytest.raises(ValueError):
        Dataset(features=np.zeros((3, 2)), targets={ROLE_PUBLIC: np.zeros(4)})


def test_manifest_survives_csv_sidecar(tmp_path):
    ds = gen_linear(13, 12)
    write_csv(ds, tmp_path / "d.csv", manifest_path=tmp_path / "d.manifest.json")
    raw = json.loads((tmp_path / "d.manifest.json").read_text())
    assert raw["kind"] == "linear-synthetic"
    assert raw["seed"] == 13
