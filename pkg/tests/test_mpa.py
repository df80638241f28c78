"""Training-loop checks: hand-worked steps, guard properties, and a plain
sequential reimplementation of the epoch loop to pin the vectorized one."""

import json

import numpy as np
import pytest

from movingpoints import mpa
from movingpoints.datasets import Dataset, NonBinaryLabelsError, make_blobs
from movingpoints.geometry import (
    DegeneratePointsError,
    Hyperplane,
    region_sign,
    signed_displacement,
)
from movingpoints.mpa import (
    IdenticalMeansError,
    MeanOnBoundaryError,
    MpaConfig,
    MpaModel,
    ZeroDisplacementError,
    assign_pseudo,
    fit,
    initialize,
    lambda_value,
    movement_vector,
    near_clusters,
    overfit_guard,
    predict,
    predict_many,
    train,
    training_accuracy,
)
from movingpoints.rng import BlockSplitMix64, SplitMix64


def vertical_model(x0=0.0, pseudo=None, alpha=0.5):
    """Model whose boundary is x = x0, oriented so displacement = x - x0."""
    pts = np.array([[x0, 1.0], [x0, 0.0]])
    return MpaModel(pts, pseudo or {0: -1, 1: 1}, alpha=alpha, config=MpaConfig())


class TestInitialize:
    def test_2d_construction(self):
        c0 = np.array([[-1.0, 0.0], [1.0, 0.0]])  # mean (0, 0)
        c1 = np.array([[3.0, 0.0], [5.0, 0.0]])   # mean (4, 0)
        model = initialize(c0, c1, MpaConfig(init_spread=0.5))
        np.testing.assert_allclose(
            np.sort(model.moving_points, axis=0), [[2.0, 0.0], [2.0, 2.0]]
        )
        h = model.hyperplane
        # boundary is x = 2: normal parallel to e1, passes through (2, 0)
        assert abs(h.weights[1]) <= 1e-12 * abs(h.weights[0])
        assert abs(signed_displacement(h, (2.0, 123.0))) <= 1e-9

    def test_3d_construction(self):
        c0 = np.zeros((2, 3))
        c1 = np.full((2, 3), [4.0, 0.0, 0.0])
        model = initialize(c0, c1, MpaConfig(init_spread=0.5))
        got = model.moving_points[np.lexsort(model.moving_points.T)]
        want = np.array([[2.0, 0.0, 0.0], [2.0, 0.0, 2.0], [2.0, 2.0, 0.0]])
        want = want[np.lexsort(want.T)]
        np.testing.assert_allclose(got, want)

    def test_identical_means(self):
        pts = np.array([[1.0, 1.0]])
        with pytest.raises(IdenticalMeansError):
            initialize(pts, pts.copy(), MpaConfig())

    def test_alpha_resolves_from_point_spacing(self):
        c0 = np.array([[-1.0, 0.0], [1.0, 0.0]])
        c1 = np.array([[3.0, 0.0], [5.0, 0.0]])
        model = initialize(c0, c1, MpaConfig(init_spread=0.5))
        # points are 2 apart, so the auto threshold is 0.2
        assert model.alpha == pytest.approx(0.2)

    def test_explicit_alpha_kept(self):
        c0 = np.array([[-1.0, 0.0], [1.0, 0.0]])
        c1 = np.array([[3.0, 0.0], [5.0, 0.0]])
        model = initialize(c0, c1, MpaConfig(alpha=0.7))
        assert model.alpha == 0.7


class TestAssignPseudo:
    def test_readout(self):
        h = Hyperplane(np.array([1.0, 0.0]), 0.0)
        assert assign_pseudo(h, (-2, 0), (2, 0)) == {0: -1, 1: 1}

    def test_swapped(self):
        h = Hyperplane(np.array([1.0, 0.0]), 0.0)
        assert assign_pseudo(h, (2, 0), (-2, 0)) == {0: 1, 1: -1}

    def test_mean_on_boundary(self):
        h = Hyperplane(np.array([1.0, 0.0]), 0.0)
        with pytest.raises(MeanOnBoundaryError):
            assign_pseudo(h, (0, 0), (2, 0))


class TestLambda:
    def test_correct_point_is_positive(self):
        m = vertical_model()
        assert lambda_value(m, (-3, 0), 0) == pytest.approx(3.0)

    def test_misclassified_point_is_negative(self):
        m = vertical_model()
        assert lambda_value(m, (-3, 0), 1) == pytest.approx(-3.0)

    def test_magnitude_is_distance(self):
        m = vertical_model()
        assert lambda_value(m, (0.5, 9), 1) == pytest.approx(0.5)


class TestMovementVector:
    def test_hand_worked_step(self):
        # mover c=(0,1); q=(2,2); g=(4,1); eta=0.1; lambda=-0.5
        pts = np.array([[0.0, 1.0], [9.0, 9.0]])
        model = MpaModel(pts, {0: -1, 1: 1}, alpha=0.1, config=MpaConfig(eta=0.1))
        mover, t = movement_vector(model, (2, 2), (4, 1), -0.5)
        assert mover == 0
        np.testing.assert_allclose(t, [0.05, 0.0], atol=1e-15)
        np.testing.assert_allclose(pts[0] + t, [0.05, 1.0])

    def test_nearest_mover_tie_prefers_lowest_index(self):
        pts = np.array([[0.0, 1.0], [0.0, -1.0]])  # equidistant from q
        model = MpaModel(pts, {0: -1, 1: 1}, alpha=0.1, config=MpaConfig(eta=0.1))
        mover, _ = movement_vector(model, (5.0, 0.0), (9.0, 0.5), -1.0)
        assert mover == 0

    def test_g_equal_mover_rejected(self):
        model = vertical_model()
        # nearest moving point to q=(2, 0) is (0, 0), index 1
        with pytest.raises(ZeroDisplacementError):
            movement_vector(model, (2, 0), model.moving_points[1], -1.0)

    def test_magnitude_scales_with_eta_times_lambda(self):
        model = vertical_model()
        for eta, lam in [(0.1, -0.5), (0.01, -2.0), (1.0, -0.125)]:
            _, t = movement_vector(model, (3, 4), (-2, 5), lam,
                                   MpaConfig(eta=eta))
            assert np.linalg.norm(t) == pytest.approx(abs(eta * lam))


class TestOverfitGuard:
    def build(self, points, alpha):
        return MpaModel(np.asarray(points, dtype=float), {0: -1, 1: 1},
                        alpha=alpha, config=MpaConfig())

    def test_projects_out_approach(self):
        model = self.build([[0.0, 0.0], [1.0, 0.0]], alpha=2.0)
        t = overfit_guard(model, 0, np.array([0.5, 0.5]))
        np.testing.assert_allclose(t, [0.0, 0.5], atol=1e-15)

    def test_receding_move_untouched_bitwise(self):
        model = self.build([[0.0, 0.0], [1.0, 0.0]], alpha=2.0)
        t_in = np.array([-0.5, 0.5])
        t_out = overfit_guard(model, 0, t_in)
        assert t_out is t_in  # pass-through, not a copy

    def test_far_neighbor_untouched(self):
        model = self.build([[0.0, 0.0], [1.0, 0.0]], alpha=0.5)
        t_in = np.array([0.5, 0.5])
        assert overfit_guard(model, 0, t_in) is t_in

    def test_two_neighbors_iterative(self):
        # mover pinched between two close neighbors in 3-D
        pts = np.array([[0.0, 0.0, 0.0],
                        [1.0, 0.0, 0.0],
                        [0.0, 1.0, 0.0]])
        model = self.build(pts, alpha=2.0)
        t = overfit_guard(model, 0, np.array([0.6, 0.7, 0.4]))
        for other in (1, 2):
            r = pts[other] - pts[0]
            r = r / np.linalg.norm(r)
            assert float(t @ r) <= 1e-12

    def test_random_activations_orthogonal(self):
        stream = BlockSplitMix64(71)
        for _ in range(200):
            pts = stream.normals(9).reshape(3, 3)
            try:
                model = self.build(pts, alpha=10.0)  # everything triggers
            except DegeneratePointsError:
                continue
            t = overfit_guard(model, 0, stream.normals(3))
            for other in (1, 2):
                r = pts[other] - pts[0]
                nr = np.linalg.norm(r)
                if nr <= 1e-9:
                    continue
                assert float(t @ (r / nr)) <= 1e-12


class TestNearClusters:
    def test_full_percentile_keeps_everyone(self, two_blobs):
        out = near_clusters(two_blobs, 100.0)
        assert out[0].members.size == 50
        assert out[1].members.size == 50
        np.testing.assert_allclose(out[0].mean,
                                   two_blobs.class_points(0).mean(axis=0))

    def test_membership_rule(self, two_blobs):
        out = near_clusters(two_blobs, 50.0)
        for label in (0, 1):
            idx = np.nonzero(two_blobs.labels == label)[0]
            pts = two_blobs.features[idx]
            mean = pts.mean(axis=0)
            dist = np.linalg.norm(pts - mean, axis=1)
            radius = np.percentile(dist, 50.0)
            want = set(idx[dist <= radius].tolist())
            assert set(out[label].members.tolist()) == want
            assert 0 < len(want) < idx.size

    def test_members_index_into_dataset(self, two_blobs):
        out = near_clusters(two_blobs, 50.0)
        assert np.all(two_blobs.labels[out[0].members] == 0)
        assert np.all(two_blobs.labels[out[1].members] == 1)


class TestFit:
    def test_separated_blobs_reach_perfect_accuracy(self, two_blobs):
        model, log = train(two_blobs, MpaConfig(eta=0.5, epochs=200, seed=7))
        assert training_accuracy(model, two_blobs) == 1.0
        assert log.epochs_run <= 200

    def test_iris_pair_reaches_perfect_accuracy(self, iris_easy):
        model, log = train(iris_easy, MpaConfig(eta=0.5, epochs=200, seed=0))
        assert training_accuracy(model, iris_easy) == 1.0

    def test_single_class_rejected(self):
        ds = Dataset(np.arange(8, dtype=float).reshape(4, 2),
                     np.array([1, 1, 1, 1]))
        with pytest.raises(NonBinaryLabelsError):
            train(ds, MpaConfig())

    def test_deterministic(self):
        ds = make_blobs(seed=12, std=1.6)
        cfg = MpaConfig(eta=5e-5, epochs=40, seed=3)
        a, la = train(ds, cfg)
        b, lb = train(ds, cfg)
        assert np.array_equal(a.moving_points, b.moving_points)
        assert la.misclassified == lb.misclassified
        assert la.moves == lb.moves

    def test_log_shapes(self):
        ds = make_blobs(seed=2, std=1.8)
        cfg = MpaConfig(eta=1e-4, epochs=25, seed=1, early_stop=False)
        model, log = train(ds, cfg)
        assert log.epochs_run == 25
        assert len(log.misclassified) == 25
        assert log.trajectory.shape == (26, 2, 2)  # initial + per-epoch
        np.testing.assert_array_equal(log.trajectory[-1], model.moving_points)

    def test_early_stop_halts_after_clean_epoch(self, two_blobs):
        model, log = train(two_blobs, MpaConfig(eta=0.5, epochs=200, seed=7))
        assert log.stopped_early
        assert log.misclassified[-1] == 0
        assert log.epochs_run < 200

    def test_matches_plain_sequential_loop(self):
        # overlapping blobs so moves keep happening
        ds = make_blobs(seed=4, std=1.9)
        cfg = MpaConfig(eta=0.01, epochs=30, seed=5, early_stop=False)

        model = initialize(ds.class_points(0), ds.class_points(1), cfg)
        log = fit(model, ds, cfg)

        ref = initialize(ds.class_points(0), ds.class_points(1), cfg)
        ref_log = self.plain_fit(ref, ds, cfg)

        assert log.misclassified == ref_log["misclassified"]
        assert log.moves == ref_log["moves"]
        assert np.array_equal(model.moving_points, ref.moving_points)

    @staticmethod
    def plain_fit(model, ds, cfg):
        """One example at a time, nothing vectorized, same draw discipline."""
        clusters = near_clusters(ds, cfg.near_cluster_percentile)
        rng = SplitMix64(cfg.seed)
        X, y = ds.features, ds.labels
        out = {"misclassified": [], "moves": 0}
        for _ in range(cfg.epochs):
            miss = 0
            for j in rng.permutation(ds.m):
                lam = lambda_value(model, X[j], int(y[j]))
                if lam >= 0:
                    continue
                miss += 1
                members = clusters[1 - int(y[j])].members
                pair = None
                for _attempt in range(1 + mpa.MAX_RESAMPLES):
                    g = X[members[rng.randint(members.size)]]
                    try:
                        pair = movement_vector(model, X[j], g, lam, cfg)
                        break
                    except ZeroDisplacementError:
                        pair = None
                if pair is None:
                    continue
                mover, t = pair
                t = overfit_guard(model, mover, t, cfg)
                if not np.any(t):
                    continue
                old = model.moving_points[mover].copy()
                model.moving_points[mover] = old + t
                try:
                    model.refresh()
                except DegeneratePointsError:
                    model.moving_points[mover] = old
                    continue
                out["moves"] += 1
            out["misclassified"].append(miss)
        return out


class TestPredict:
    def test_positive_side(self):
        m = vertical_model(2.0)
        assert predict(m, (5, 0)) == 1

    def test_negative_side(self):
        m = vertical_model(2.0)
        assert predict(m, (0, 0)) == 0

    def test_on_boundary_tie_rule(self):
        m = vertical_model(2.0)
        assert predict(m, (2, 0)) == 1  # pseudo +1 class wins ties
        flipped = vertical_model(2.0, pseudo={0: 1, 1: -1})
        assert predict(flipped, (2, 0)) == 0

    def test_predict_many_agrees_with_scalar(self):
        stream = BlockSplitMix64(90)
        m = vertical_model(0.5)
        X = stream.normals(60).reshape(30, 2) * 3.0
        got = predict_many(m, X)
        want = np.array([predict(m, row) for row in X])
        np.testing.assert_array_equal(got, want)

    def test_prediction_consistent_with_lambda_sign(self, two_blobs):
        model, _ = train(two_blobs, MpaConfig(eta=0.5, epochs=50, seed=1))
        for row, label in zip(two_blobs.features, two_blobs.labels):
            if predict(model, row) == label:
                assert lambda_value(model, row, int(label)) >= 0
            else:
                assert lambda_value(model, row, int(label)) <= 0


class TestSerialization:
    def test_round_trip_bit_exact(self, iris_easy):
        model, _ = train(iris_easy, MpaConfig(eta=0.5, epochs=200, seed=0))
        doc = mpa.model_document(model)
        clone = mpa.parse_model_document(doc)
        assert np.array_equal(clone.moving_points, model.moving_points)
        assert clone.pseudo_sign == model.pseudo_sign
        assert clone.alpha == model.alpha
        assert clone.feature_names == model.feature_names
        assert mpa.model_document(clone) == doc

    def test_document_structure(self, two_blobs):
        model, _ = train(two_blobs, MpaConfig(eta=0.5, epochs=10, seed=0))
        doc = json.loads(mpa.model_document(model))
        assert doc["format"] == "moving-points-model"
        assert doc["version"] == 1
        assert doc["dim"] == 2
        assert set(doc["pseudo_sign"]) == {"0", "1"}

    def test_save_load_file(self, tmp_path, two_blobs):
        model, _ = train(two_blobs, MpaConfig(eta=0.5, epochs=10, seed=0))
        path = tmp_path / "model.json"
        mpa.save_model(model, path)
        clone = mpa.load_model(path)
        assert np.array_equal(clone.moving_points, model.moving_points)
        X = two_blobs.features
        np.testing.assert_array_equal(predict_many(clone, X),
                                      predict_many(model, X))


class TestConfig:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            MpaConfig(eta=0.0)
        with pytest.raises(ValueError):
            MpaConfig(epochs=0)
        with pytest.raises(ValueError):
            MpaConfig(near_cluster_percentile=0.0)
        with pytest.raises(ValueError):
            MpaConfig(init_spread=-1.0)
        with pytest.raises(ValueError):
            MpaConfig(seed=-1)
        with pytest.raises(ValueError):
            MpaConfig(alpha=-0.5)

    def test_alpha_none_is_allowed(self):
        assert MpaConfig(alpha=None).alpha is None
