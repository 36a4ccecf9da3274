"""
Tests for the SMO solver and the multiclass wrappers.

Tests cover:
- An analytically solvable two-point problem
- Dual feasibility and KKT residuals on random problems
- Prediction, including the sign(0) convention and shape checks
- One-vs-one and one-vs-all training and tie breaking
"""

import numpy as np
import pytest

from app.errors import DimensionMismatch, NonConvergence, NoSupportVectors
from app.gram import GramMatrix
from app.svm import (
    BinaryMember,
    MulticlassModel,
    SvmModel,
    decision_values,
    kkt_residual,
    multiclass_predict,
    multiclass_predict_many,
    multiclass_train,
    svm_predict,
    svm_train,
)


def _linear_problem(rng, n=30, shift=1.5, noise=1.0):
    labels = np.where(np.arange(n) % 2 == 0, 1, -1)
    features = rng.normal(scale=noise, size=(n, 3))
    features[:, 0] += shift * labels
    return features @ features.T, labels


def _clusters(rng, per_class=8, classes=(1, 2, 3)):
    """Points around orthogonal unit vectors; each class is linearly separable from the rest."""
    centers = np.eye(len(classes)) * 3.0
    features = np.vstack([c + rng.normal(scale=0.3, size=(per_class, len(classes))) for c in centers])
    labels = np.repeat(classes, per_class)
    return features, labels


def _stub_model(bias):
    return SvmModel(
        support_indices=np.array([0]),
        multipliers=np.array([1.0]),
        labels=np.array([1]),
        bias=bias,
        C=1.0,
        n_train=1,
    )


class TestSvmTrain:
    def test_two_point_problem(self):
        gram = np.array([[1.0, -1.0], [-1.0, 1.0]])
        model = svm_train(gram, [1, -1], C=10.0)
        assert model.support_indices.tolist() == [0, 1]
        assert model.multipliers == pytest.approx([0.5, 0.5])
        assert model.bias == pytest.approx(0.0, abs=1e-12)
        assert decision_values(model, gram).tolist() == pytest.approx([1.0, -1.0])

    def test_box_constraint_caps_multipliers(self):
        gram = np.array([[1.0, -1.0], [-1.0, 1.0]])
        model = svm_train(gram, [1, -1], C=0.1)
        assert model.multipliers == pytest.approx([0.1, 0.1])

    def test_dual_feasibility(self, rng):
        for C in (0.1, 1.0, 10.0):
            gram, labels = _linear_problem(rng)
            model = svm_train(gram, labels, C)
            assert np.all(model.multipliers > 0)
            assert np.all(model.multipliers <= C)
            assert float(np.dot(model.multipliers, model.labels)) == pytest.approx(0.0, abs=1e-9)

    def test_kkt_residual_within_tolerance(self, rng):
        gram, labels = _linear_problem(rng, noise=1.5)
        model = svm_train(gram, labels, C=1.0)
        assert kkt_residual(model, gram, labels) <= 1e-5

    def test_separable_training_set_is_fit(self, rng):
        gram, labels = _linear_problem(rng, shift=4.0, noise=0.5)
        model = svm_train(gram, labels, C=100.0)
        predicted = np.where(decision_values(model, gram) >= 0, 1, -1)
        assert predicted.tolist() == labels.tolist()

    def test_keeps_kernel_descriptor(self):
        gram = GramMatrix(
            values=np.array([[1.0, -1.0], [-1.0, 1.0]]),
            graph_ids=("a", "b"),
            kernel_descriptor={"kernel": "vh"},
        )
        model = svm_train(gram, [1, -1], C=1.0)
        assert model.kernel_descriptor == {"kernel": "vh"}
        assert model.n_train == 2

    def test_single_class_has_no_support_vectors(self):
        with pytest.raises(NoSupportVectors):
            svm_train(np.eye(3), [1, 1, 1], C=1.0)

    def test_invalid_inputs(self):
        with pytest.raises(DimensionMismatch):
            svm_train(np.eye(3), [1, -1], C=1.0)
        with pytest.raises(ValueError):
            svm_train(np.eye(2), [1, -1], C=0.0)
        with pytest.raises(ValueError):
            svm_train(np.eye(2), [0, 2], C=1.0)

    def test_iteration_limit(self, rng):
        gram, labels = _linear_problem(rng)
        with pytest.raises(NonConvergence):
            svm_train(gram, labels, C=1.0, max_iter=0)


class TestSvmPredict:
    def test_zero_decision_value_predicts_positive(self):
        prediction = svm_predict(_stub_model(0.0), [0.0])
        assert prediction.label == 1
        assert prediction.decision_value == 0.0

    def test_negative_decision_value(self):
        prediction = svm_predict(_stub_model(-0.25), [0.0])
        assert prediction == (-1, -0.25)

    def test_row_length_must_match_training_set(self):
        with pytest.raises(DimensionMismatch):
            svm_predict(_stub_model(0.0), [0.0, 1.0])
        with pytest.raises(DimensionMismatch):
            svm_predict(_stub_model(0.0), [[0.0]])


class TestMulticlass:
    @pytest.mark.parametrize("scheme", ["ovo", "ova"])
    def test_separable_clusters(self, rng, scheme):
        features, labels = _clusters(rng)
        gram = features @ features.T
        bundle = multiclass_train(gram, labels, C=10.0, scheme=scheme)
        assert bundle.classes == (1, 2, 3)
        assert len(bundle.members) == 3
        assert multiclass_predict_many(bundle, gram).tolist() == labels.tolist()

        unseen, unseen_labels = _clusters(rng, per_class=3)
        rows = unseen @ features.T
        assert multiclass_predict_many(bundle, rows).tolist() == unseen_labels.tolist()
        assert multiclass_predict(bundle, rows[0]) == unseen_labels[0]

    def test_one_vs_one_members_use_pair_subsets(self, rng):
        features, labels = _clusters(rng, per_class=4)
        bundle = multiclass_train(features @ features.T, labels, C=1.0, scheme="ovo")
        for member in bundle.members:
            assert set(labels[member.train_index].tolist()) == {member.positive, member.negative}

    def test_two_classes_train_a_single_machine(self, rng):
        features, labels = _clusters(rng, classes=(0, 5))
        bundle = multiclass_train(features @ features.T, labels, C=1.0, scheme="ova")
        assert len(bundle.members) == 1
        assert set(multiclass_predict_many(bundle, features @ features.T).tolist()) == {0, 5}

    def test_one_vs_one_ties_use_confidence_then_smallest_class(self):
        def bundle(b21, b31, b32):
            members = [
                BinaryMember(2, 1, np.array([0]), _stub_model(b21)),
                BinaryMember(3, 1, np.array([0]), _stub_model(b31)),
                BinaryMember(3, 2, np.array([0]), _stub_model(b32)),
            ]
            return MulticlassModel(scheme="ovo", classes=(1, 2, 3), members=tuple(members))

        # one vote each; class 3 has the largest summed decision value
        assert multiclass_predict(bundle(1.0, -1.0, 2.0), [0.0]) == 3
        # one vote each with equal confidence
        assert multiclass_predict(bundle(0.5, -0.5, 0.5), [0.0]) == 1

    def test_one_vs_all_absolute_value_rule(self):
        members = tuple(BinaryMember(c, None, np.array([0]), _stub_model(b)) for c, b in zip((1, 2), (0.5, -2.0)))
        plain = MulticlassModel(scheme="ova", classes=(1, 2), members=members)
        absolute = MulticlassModel(scheme="ova", classes=(1, 2), members=members, absolute_value_rule=True)
        assert multiclass_predict(plain, [0.0]) == 1
        assert multiclass_predict(absolute, [0.0]) == 2

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            multiclass_train(np.eye(4), [1, 1, 2, 2], C=1.0, scheme="tree")
        with pytest.raises(NoSupportVectors):
            multiclass_train(np.eye(2), [1, 1], C=1.0)
        with pytest.raises(DimensionMismatch):
            multiclass_train(np.eye(3), [1, 2], C=1.0)
