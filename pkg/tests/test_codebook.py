import io
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbat import (
    Codebook,
    DimensionMismatchError,
    FileFormatError,
    SpaceConfig,
    orthogonality_defect,
    similarity,
)
from mbat.codebook import SEQ_ROLE, canonical_symbol


@pytest.fixture(scope="module")
def tiny_book():
    return Codebook(SpaceConfig(dimension=32, master_seed=100))


class TestSymbolVectors:
    def test_deterministic(self, book):
        a = book.symbol_vector("elephant")
        b = book.symbol_vector("elephant")
        assert np.array_equal(a, b)

    def test_unit_norm(self, book):
        assert abs(np.linalg.norm(book.symbol_vector("elephant")) - 1.0) <= 1e-12

    def test_fresh_name_pairs_nearly_orthogonal(self, book):
        n = book.dimension
        bound = 5 / np.sqrt(n)
        hits = sum(
            abs(similarity(book.symbol_vector(f"name{i}a"), book.symbol_vector(f"name{i}b"))) < bound
            for i in range(1000)
        )
        assert hits >= 990

    def test_canonicalization_lowercase(self, book):
        assert np.array_equal(book.symbol_vector("Elephant"), book.symbol_vector("elephant"))

    def test_canonicalization_nfc(self, book):
        composed = "café"
        decomposed = "café"
        assert canonical_symbol(decomposed) == canonical_symbol(composed)
        assert np.array_equal(book.symbol_vector(decomposed), book.symbol_vector(composed))

    def test_empty_name_rejected(self, book):
        with pytest.raises(ValueError):
            book.symbol_vector("")

    def test_cached_vectors_are_read_only(self, book):
        v = book.symbol_vector("frozen")
        with pytest.raises(ValueError):
            v[0] = 5.0


class TestRoleMatrices:
    def test_deterministic(self, tiny_book):
        assert np.array_equal(tiny_book.role_matrix("actor"), tiny_book.role_matrix("actor"))

    def test_seq_is_orthogonal(self, book):
        assert orthogonality_defect(book.role_matrix(SEQ_ROLE)) < 1e-8

    def test_distinct_roles_rotate_differently(self, book):
        n = book.dimension
        actor = book.role_matrix("actor")
        obj = book.role_matrix("object")
        rng = np.random.default_rng(11)
        bound = 5 / np.sqrt(n)
        hits = 0
        for _ in range(1000):
            v = rng.standard_normal(n)
            if abs(similarity(actor @ v, obj @ v)) < bound:
                hits += 1
        assert hits >= 990

    def test_roles_are_case_sensitive(self, tiny_book):
        assert not np.array_equal(tiny_book.role_matrix("Name"), tiny_book.role_matrix("name"))

    def test_empty_role_rejected(self, tiny_book):
        with pytest.raises(ValueError):
            tiny_book.role_matrix("")


class TestLiteralVectors:
    def test_deterministic_and_unit(self, book):
        assert np.array_equal(book.literal_vector(True), book.literal_vector("true"))
        assert abs(np.linalg.norm(book.literal_vector(None)) - 1.0) <= 1e-12

    def test_true_false_nearly_orthogonal_across_seeds(self):
        n = 1000
        bound = 5 / np.sqrt(n)
        hits = 0
        for seed in range(50):
            b = Codebook(SpaceConfig(dimension=n, master_seed=seed))
            if abs(similarity(b.literal_vector(True), b.literal_vector(False))) < bound:
                hits += 1
        assert hits >= 49

    def test_namespace_separation_from_symbols(self, book):
        lit = book.literal_vector(True)
        sym = book.symbol_vector("true")
        assert not np.array_equal(lit, sym)
        assert abs(similarity(lit, sym)) < 0.5

    def test_bad_literal_rejected(self, book):
        with pytest.raises(ValueError):
            book.literal_vector("maybe")


class TestPersistence:
    def test_round_trip_preserves_config_and_lookups(self, tiny_book):
        loaded = Codebook.load(tiny_book.save_bytes())
        assert loaded.space == tiny_book.space
        assert np.array_equal(loaded.symbol_vector("x"), tiny_book.symbol_vector("x"))
        assert np.array_equal(loaded.role_matrix("r"), tiny_book.role_matrix("r"))

    def test_bad_magic(self):
        with pytest.raises(FileFormatError, match="bad magic"):
            Codebook.load(b"NOTACB" + b"\x00" * 40)

    def test_version_mismatch(self, tiny_book):
        data = bytearray(tiny_book.save_bytes())
        data[6] = 9
        with pytest.raises(FileFormatError, match="version"):
            Codebook.load(bytes(data))

    def test_truncated_stream(self, tiny_book):
        data = tiny_book.save_bytes()
        with pytest.raises(FileFormatError, match="truncated"):
            Codebook.load(data[:10])

    def test_trailing_data(self, tiny_book):
        with pytest.raises(FileFormatError, match="trailing"):
            Codebook.load(tiny_book.save_bytes() + b"\x00")

    def test_dimension_check_against_expected(self, tiny_book):
        data = tiny_book.save_bytes()
        with pytest.raises(DimensionMismatchError):
            Codebook.load(data, expected=SpaceConfig(dimension=33))
        ok = Codebook.load(data, expected=SpaceConfig(dimension=32, orthogonality_tolerance=1e-6))
        assert ok.space.orthogonality_tolerance == 1e-6

    def test_imported_entries_survive_round_trip(self):
        space = SpaceConfig(dimension=16, master_seed=3)
        book = Codebook(space)
        rng = np.random.default_rng(0)
        words = [f"word{i}" for i in range(5)]
        for w in words:
            book.import_symbol(w, rng.standard_normal(16))
        loaded = Codebook.load(book.save_bytes())
        for w in words:
            assert np.array_equal(loaded.symbol_vector(w), book.symbol_vector(w))
        # imported vectors shadow the derived ones
        derived = Codebook(space)
        assert not np.array_equal(loaded.symbol_vector(words[0]), derived.symbol_vector(words[0]))


class TestImport:
    def test_normalized_by_default(self):
        book = Codebook(SpaceConfig(dimension=4, master_seed=0))
        book.import_symbol("big", [2.0, 0.0, 0.0, 0.0])
        assert np.array_equal(book.symbol_vector("big"), [1.0, 0.0, 0.0, 0.0])

    def test_verbatim_keeps_raw_values(self):
        book = Codebook(SpaceConfig(dimension=4, master_seed=0))
        book.import_symbol("big", [2.0, 0.0, 0.0, 0.0], verbatim=True)
        assert np.array_equal(book.symbol_vector("big"), [2.0, 0.0, 0.0, 0.0])

    def test_zero_vector_rejected_without_verbatim(self):
        book = Codebook(SpaceConfig(dimension=4, master_seed=0))
        with pytest.raises(ValueError):
            book.import_symbol("zero", [0.0, 0.0, 0.0, 0.0])

    def test_text_table(self):
        book = Codebook(SpaceConfig(dimension=3, master_seed=0))
        count = book.import_text_table(["alpha 1 0 0", "", "Beta 0 3 4"])
        assert count == 2
        assert np.allclose(book.symbol_vector("beta"), [0.0, 0.6, 0.8])

    def test_text_table_wrong_width(self):
        book = Codebook(SpaceConfig(dimension=3, master_seed=0))
        with pytest.raises(DimensionMismatchError):
            book.import_text_table(["alpha 1 0"])

    def test_text_table_bad_float(self):
        book = Codebook(SpaceConfig(dimension=2, master_seed=0))
        with pytest.raises(ValueError):
            book.import_text_table(["alpha 1 bogus"])

    def test_text_table_duplicate_word(self):
        book = Codebook(SpaceConfig(dimension=2, master_seed=0))
        with pytest.raises(ValueError):
            book.import_text_table(["alpha 1 0", "Alpha 0 1"])

    def test_import_dimension_mismatch(self):
        book = Codebook(SpaceConfig(dimension=3, master_seed=0))
        with pytest.raises(DimensionMismatchError):
            book.import_symbol("alpha", [1.0, 2.0])

    def test_non_finite_rejected(self):
        book = Codebook(SpaceConfig(dimension=2, master_seed=0))
        with pytest.raises(ValueError):
            book.import_symbol("alpha", [1.0, float("nan")])


class TestConcurrency:
    def test_concurrent_first_lookups_observe_one_value(self):
        book = Codebook(SpaceConfig(dimension=64, master_seed=55))
        results = [None] * 8
        barrier = threading.Barrier(8)

        def fetch(i):
            barrier.wait()
            results[i] = book.symbol_vector("race")

        threads = [threading.Thread(target=fetch, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r is results[0] for r in results)


class TestLookupPurity:
    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.sampled_from(["ant", "Bee", "cat", "dog", "emu"]),
                    min_size=1, max_size=8),
           st.integers(0, 2**16))
    def test_order_of_lookups_never_matters(self, names, master_seed):
        space = SpaceConfig(dimension=24, master_seed=master_seed)
        first = Codebook(space)
        second = Codebook(space)
        forward = {n: first.symbol_vector(n) for n in names}
        for n in reversed(names):
            assert np.array_equal(second.symbol_vector(n), forward[n])
