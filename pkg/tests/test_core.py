import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbat import (
    DimensionMismatchError,
    SpaceConfig,
    bind,
    bundle,
    dot,
    gen_orthogonal,
    normalize,
    orthogonality_defect,
    similarity,
    unbind,
)
from mbat.core import orthogonal_from_rng, random_unit_vector


def unit(rng, n):
    return normalize(rng.standard_normal(n))


class TestSpaceConfig:
    def test_defaults(self):
        cfg = SpaceConfig()
        assert cfg.dimension == 1000
        assert cfg.orthogonality_tolerance == 1e-8
        assert cfg.entry_kind == "gaussian_unit"

    @pytest.mark.parametrize("kwargs", [
        {"dimension": 0},
        {"dimension": -3},
        {"orthogonality_tolerance": 0.0},
        {"orthogonality_tolerance": -1e-9},
        {"entry_kind": "uniform"},
        {"master_seed": -1},
        {"master_seed": 2**64},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SpaceConfig(**kwargs)


class TestGenOrthogonal:
    def test_one_dimensional_matrix_is_a_sign(self):
        for seed in range(10):
            m = gen_orthogonal(seed, SpaceConfig(dimension=1, master_seed=seed * 11))
            assert m.shape == (1, 1)
            assert m[0, 0] in (1.0, -1.0)

    def test_gram_matrix_close_to_identity(self):
        cfg = SpaceConfig(dimension=300, master_seed=0)
        m = gen_orthogonal(7, cfg)
        gram = m.T @ m
        assert np.abs(gram - np.eye(300)).max() < 1e-10

    def test_column_norms_are_one(self):
        cfg = SpaceConfig(dimension=300, master_seed=0)
        m = gen_orthogonal(7, cfg)
        assert np.abs(np.linalg.norm(m, axis=0) - 1.0).max() < 1e-12

    def test_deterministic_and_seed_sensitive(self):
        cfg = SpaceConfig(dimension=80, master_seed=5)
        a = gen_orthogonal(3, cfg)
        b = gen_orthogonal(3, cfg)
        c = gen_orthogonal(4, cfg)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_master_seed_changes_output(self):
        a = gen_orthogonal(3, SpaceConfig(dimension=40, master_seed=1))
        b = gen_orthogonal(3, SpaceConfig(dimension=40, master_seed=2))
        assert not np.array_equal(a, b)

    def test_signed_binary_entries_still_orthogonal(self):
        cfg = SpaceConfig(dimension=120, master_seed=9, entry_kind="signed_binary")
        m = gen_orthogonal(0, cfg)
        assert orthogonality_defect(m) < 1e-10


class TestBindUnbind:
    def test_bind_identity_exact(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(50)
        assert np.array_equal(bind(np.eye(50), v), v)

    def test_bind_preserves_norm(self, matrix_pool):
        rng = np.random.default_rng(1)
        for m in matrix_pool:
            v = rng.standard_normal(m.shape[0])
            assert abs(np.linalg.norm(bind(m, v)) - np.linalg.norm(v)) <= 1e-12 * np.linalg.norm(v)

    def test_bind_is_linear(self, matrix_pool):
        rng = np.random.default_rng(2)
        m = matrix_pool[0]
        a, b = rng.standard_normal((2, m.shape[0]))
        lhs = bind(m, a + b)
        rhs = bind(m, a) + bind(m, b)
        assert np.abs(lhs - rhs).max() <= 1e-12 * np.linalg.norm(lhs)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            bind(np.eye(4), np.zeros(5))
        with pytest.raises(DimensionMismatchError):
            unbind(np.eye(4), np.zeros(5))

    def test_unbind_inverts_bind(self, matrix_pool):
        rng = np.random.default_rng(3)
        for m in matrix_pool[:5]:
            v = rng.standard_normal(m.shape[0])
            back = unbind(m, bind(m, v))
            assert np.abs(back - v).max() <= 1e-10 * np.linalg.norm(v)

    def test_unbind_identity_exact(self):
        rng = np.random.default_rng(4)
        v = rng.standard_normal(32)
        assert np.array_equal(unbind(np.eye(32), v), v)

    def test_adjoint_identity(self, matrix_pool):
        # dot(unbind(M, W), A) == dot(W, bind(M, A)): probing with the
        # transpose equals probing every bound candidate.
        rng = np.random.default_rng(5)
        m = matrix_pool[1]
        for _ in range(20):
            w, a = rng.standard_normal((2, m.shape[0]))
            lhs = dot(unbind(m, w), a)
            rhs = dot(w, bind(m, a))
            assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-30)


class TestBundle:
    def test_single_vector(self):
        v = np.random.default_rng(0).standard_normal(10)
        assert np.array_equal(bundle([v]), v)

    def test_two_element_commutativity_bitwise(self):
        rng = np.random.default_rng(1)
        a, b = rng.standard_normal((2, 100))
        assert np.array_equal(bundle([a, b]), bundle([b, a]))

    def test_empty_needs_dimension(self):
        assert np.array_equal(bundle([], dimension=7), np.zeros(7))
        with pytest.raises(ValueError):
            bundle([])

    def test_mismatched_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            bundle([np.zeros(3), np.zeros(4)])

    def test_membership_signal_means(self):
        # Member dots against a 20-vector bundle have mean ~1, non-member
        # dots mean ~0; check 3 standard errors over 1000 trials.
        n, size, trials = 1000, 20, 1000
        rng = np.random.default_rng(42)
        member_dots, outsider_dots = [], []
        for _ in range(trials):
            vecs = [unit(rng, n) for _ in range(size)]
            total = bundle(vecs)
            member_dots.append(dot(vecs[0], total))
            outsider_dots.append(dot(unit(rng, n), total))
        member_dots = np.array(member_dots)
        outsider_dots = np.array(outsider_dots)
        assert abs(member_dots.mean() - 1.0) <= 3 * member_dots.std() / np.sqrt(trials)
        assert abs(outsider_dots.mean()) <= 3 * outsider_dots.std() / np.sqrt(trials)
        # noise scale is sqrt(S/n) up to small corrections
        assert outsider_dots.std() == pytest.approx(np.sqrt(size / n), rel=0.2)

    def test_argmax_robustness(self):
        # every member's dot beats a fresh distractor's in >= 99% of trials
        n, size, trials = 1000, 20, 1000
        rng = np.random.default_rng(43)
        wins = 0
        for _ in range(trials):
            vecs = np.stack([unit(rng, n) for _ in range(size)])
            total = vecs.sum(axis=0)
            if (vecs @ total).min() > dot(unit(rng, n), total):
                wins += 1
        assert wins >= 0.99 * trials


class TestNormalize:
    def test_zero_unchanged(self):
        z = np.zeros(12)
        out = normalize(z)
        assert np.array_equal(out, z)
        assert out is not z

    def test_scaling_exact(self):
        e1 = np.zeros(8)
        e1[0] = 1.0
        assert np.array_equal(normalize(2.0 * e1), e1)

    def test_unit_norm(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            v = rng.standard_normal(257)
            assert abs(np.linalg.norm(normalize(v)) - 1.0) <= 1e-12


class TestSimilarity:
    def test_self_similarity(self):
        rng = np.random.default_rng(7)
        v = rng.standard_normal(100)
        assert abs(similarity(v, v) - 1.0) <= 1e-12

    def test_zero_vector_scores_zero(self):
        assert similarity(np.zeros(5), np.ones(5)) == 0.0

    def test_random_unit_pairs_nearly_orthogonal(self):
        n, pairs = 1000, 1000
        rng = np.random.default_rng(8)
        bound = 5 / np.sqrt(n)
        hits = sum(
            abs(similarity(unit(rng, n), unit(rng, n))) < bound for _ in range(pairs)
        )
        assert hits >= 0.99 * pairs

    def test_bag_overlap_exact_for_orthonormal_words(self):
        # {the, large, elephant} vs {the, huge, elephant} with orthonormal
        # word vectors: shared mass 2 over norms sqrt(3)*sqrt(3).
        eye = np.eye(4)
        left = bundle([eye[0], eye[1], eye[2]])
        right = bundle([eye[0], eye[3], eye[2]])
        assert abs(similarity(left, right) - 2.0 / 3.0) <= 1e-12

    def test_bag_overlap_monte_carlo(self):
        n, trials = 1000, 100
        rng = np.random.default_rng(9)
        sims = []
        for _ in range(trials):
            the, large, elephant, huge = (unit(rng, n) for _ in range(4))
            sims.append(similarity(bundle([the, large, elephant]),
                                   bundle([the, huge, elephant])))
        assert abs(np.mean(sims) - 2.0 / 3.0) <= 0.05


class TestIsometryChains:
    def test_chains_up_to_depth_20(self, matrix_pool):
        rng = np.random.default_rng(10)
        n = matrix_pool[0].shape[0]
        for depth in (1, 5, 20):
            v = rng.standard_normal(n)
            out = v
            for i in range(depth):
                out = bind(matrix_pool[int(rng.integers(0, len(matrix_pool)))], out)
            assert abs(np.linalg.norm(out) - np.linalg.norm(v)) <= 1e-9 * np.linalg.norm(v)


class TestProperties:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 64))
    def test_similarity_symmetric_and_bounded(self, seed, n):
        rng = np.random.default_rng(seed)
        a, b = rng.standard_normal((2, n))
        s = similarity(a, b)
        assert -1.0 <= s <= 1.0
        assert s == similarity(b, a)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(2, 32))
    def test_bundle_permutation_invariant_in_value(self, seed, count, n):
        rng = np.random.default_rng(seed)
        vecs = list(rng.standard_normal((count, n)))
        forward = bundle(vecs)
        backward = bundle(vecs[::-1])
        assert np.allclose(forward, backward, rtol=1e-12, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 48))
    def test_generated_matrices_meet_tolerance(self, seed, n):
        rng = np.random.default_rng(seed)
        m = orthogonal_from_rng(rng, n)
        assert orthogonality_defect(m) <= 1e-8

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 64))
    def test_random_unit_vector_has_unit_norm(self, seed, n):
        rng = np.random.default_rng(seed)
        for kind in ("gaussian_unit", "signed_binary"):
            v = random_unit_vector(rng, n, kind)
            assert abs(np.linalg.norm(v) - 1.0) <= 1e-12
