import numpy as np
import pytest

from ricap import (
    RngStream,
    crop_sizes,
    entropy,
    grad_soft_ce,
    kl_loss,
    mix_labels,
    mix_weights,
    one_hot,
    soft_ce_loss,
    softmax,
    weighted_ce_loss,
)


def random_weights(rng):
    boundary = (rng.uniform_int(0, 32), rng.uniform_int(0, 32))
    return mix_weights(crop_sizes(boundary, 32, 32), 32, 32)


class TestSoftmax:
    def test_uniform_on_equal_logits(self):
        for k in (2, 4, 10):
            assert np.allclose(softmax(np.zeros(k)), np.full(k, 1 / k), atol=1e-15)

    def test_large_logits_do_not_overflow(self):
        p = softmax(np.array([1000.0, 0.0]))
        assert np.all(np.isfinite(p))
        assert p[0] > 1 - 1e-12 and p[1] < 1e-12

    def test_reference_values(self):
        p = softmax(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(p, [0.09003057, 0.24472847, 0.66524096], atol=1e-8)

    def test_batched_rows_sum_to_one(self):
        gen = np.random.default_rng(0)
        logits = gen.normal(size=(8, 5)) * 4
        p = softmax(logits)
        assert p.shape == (8, 5)
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            softmax(np.array([np.inf, 0.0]))


class TestSoftCrossEntropy:
    def test_one_hot_reduces_to_standard_ce(self):
        gen = np.random.default_rng(1)
        logits = gen.normal(size=6)
        target = one_hot(2, 6)
        expected = -np.log(softmax(logits)[2])
        assert abs(soft_ce_loss(logits, target) - expected) < 1e-12

    def test_matching_target_gives_entropy(self):
        gen = np.random.default_rng(2)
        logits = gen.normal(size=5)
        target = softmax(logits)
        assert abs(soft_ce_loss(logits, target) - entropy(target)) < 1e-12

    def test_uniform_case_closed_form(self):
        logits = np.zeros(4)
        target = np.full(4, 0.25)
        assert abs(soft_ce_loss(logits, target) - np.log(4)) < 1e-12


class TestWeightedCrossEntropy:
    def test_degenerate_weights_uniform_logits(self):
        from ricap import QuadrantWeights

        weights = QuadrantWeights((16, 0, 0, 0), 16)
        loss = weighted_ce_loss(np.zeros(4), [0, 1, 2, 3], weights)
        assert abs(loss - 1.3862943611198906) < 1e-12

    def test_equal_weights_uniform_logits(self):
        from ricap import QuadrantWeights

        weights = QuadrantWeights((4, 4, 4, 4), 16)
        loss = weighted_ce_loss(np.zeros(4), [0, 1, 2, 3], weights)
        assert abs(loss - 1.3862943611198906) < 1e-12

    def test_identity_with_soft_ce_on_mixed_label(self):
        gen = np.random.default_rng(3)
        rng = RngStream(5)
        for _ in range(1000):
            k = int(gen.integers(4, 12))
            logits = gen.normal(size=k) * 3
            classes = gen.integers(0, k, size=4)
            weights = random_weights(rng)
            direct = weighted_ce_loss(logits, classes, weights)
            mixed = soft_ce_loss(logits, mix_labels(classes, weights, k))
            assert abs(direct - mixed) < 1e-12

    def test_class_out_of_range_rejected(self):
        from ricap import QuadrantWeights

        weights = QuadrantWeights((4, 4, 4, 4), 16)
        with pytest.raises(ValueError, match="class id"):
            weighted_ce_loss(np.zeros(4), [0, 1, 2, 7], weights)


class TestKlLoss:
    def test_zero_when_target_matches(self):
        gen = np.random.default_rng(4)
        logits = gen.normal(size=7)
        assert abs(kl_loss(logits, softmax(logits))) < 1e-12

    def test_identity_with_soft_ce_minus_entropy(self):
        gen = np.random.default_rng(5)
        for _ in range(500):
            k = int(gen.integers(2, 10))
            logits = gen.normal(size=k) * 2
            target = gen.dirichlet(np.ones(k))
            gap = kl_loss(logits, target) - (
                soft_ce_loss(logits, target) - entropy(target)
            )
            assert abs(gap) < 1e-12

    def test_zero_log_zero_handled(self):
        logits = np.array([1.0, 2.0, 3.0])
        target = np.array([0.0, 0.5, 0.5])
        value = kl_loss(logits, target)
        assert np.isfinite(value)

    def test_non_negative_and_zero_iff_match(self):
        gen = np.random.default_rng(6)
        for _ in range(200):
            k = int(gen.integers(2, 8))
            logits = gen.normal(size=k)
            target = gen.dirichlet(np.ones(k))
            value = kl_loss(logits, target)
            assert value > -1e-15
            if value < 1e-12:
                assert np.allclose(target, softmax(logits), atol=1e-6)


class TestGradient:
    def test_stationary_at_matching_target(self):
        gen = np.random.default_rng(7)
        logits = gen.normal(size=6)
        grad = grad_soft_ce(logits, softmax(logits))
        assert np.allclose(grad, 0.0, atol=1e-15)

    def test_entries_sum_to_zero(self):
        gen = np.random.default_rng(8)
        for _ in range(100):
            k = int(gen.integers(2, 10))
            logits = gen.normal(size=k) * 3
            target = gen.dirichlet(np.ones(k))
            assert abs(grad_soft_ce(logits, target).sum()) < 1e-12

    def test_finite_difference_agreement(self):
        gen = np.random.default_rng(9)
        eps = 1e-5
        for _ in range(100):
            k = int(gen.integers(2, 10))
            logits = gen.normal(size=k) * 2
            target = gen.dirichlet(np.ones(k))
            grad = grad_soft_ce(logits, target)
            for j in range(k):
                bump = np.zeros(k)
                bump[j] = eps
                fd = (
                    soft_ce_loss(logits + bump, target)
                    - soft_ce_loss(logits - bump, target)
                ) / (2 * eps)
                denom = max(abs(fd), abs(grad[j]), 1e-10)
                assert abs(fd - grad[j]) / denom < 1e-6

    def test_kl_gradient_equals_soft_ce_gradient(self):
        gen = np.random.default_rng(10)
        eps = 1e-5
        for _ in range(50):
            k = int(gen.integers(2, 8))
            logits = gen.normal(size=k)
            target = gen.dirichlet(np.ones(k))
            grad = grad_soft_ce(logits, target)
            for j in range(k):
                bump = np.zeros(k)
                bump[j] = eps
                fd = (kl_loss(logits + bump, target) - kl_loss(logits - bump, target)) / (
                    2 * eps
                )
                denom = max(abs(fd), abs(grad[j]), 1e-10)
                assert abs(fd - grad[j]) / denom < 1e-6


class TestOneHot:
    def test_single(self):
        assert np.array_equal(one_hot(2, 4), [0, 0, 1, 0])

    def test_batch(self):
        out = one_hot([0, 3], 4)
        assert np.array_equal(out, [[1, 0, 0, 0], [0, 0, 0, 1]])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            one_hot(4, 4)
