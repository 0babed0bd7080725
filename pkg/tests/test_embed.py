import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ktsne.embed import (
    EmbedError,
    pwm2vec,
    spaced_kmers,
    spike2vec,
    standardize_columns,
)
from ktsne.seqio import AMINO, NUCLEOTIDE, Corpus, SequenceRecord


def corpus_of(*seqs, alphabet=NUCLEOTIDE):
    records = [
        SequenceRecord(id=f"s{i}", label="x", residues=s) for i, s in enumerate(seqs)
    ]
    return Corpus(records=records, alphabet=alphabet)


def bin_of(kmer, alphabet):
    base = len(alphabet.symbols)
    code = 0
    for ch in kmer:
        code = code * base + alphabet.symbols.index(ch)
    return code


class TestSpike2vec:
    def test_single_symbol_counts(self):
        fm = spike2vec(corpus_of("AA"), k=1)
        expected = np.zeros(5)
        expected[bin_of("A", NUCLEOTIDE)] = 2.0
        assert np.array_equal(fm.values[0], expected)

    def test_acgt_two_mers(self):
        # windows of ACGT: AC, CG, GT, each once; row sum = 4 - 2 + 1 = 3
        fm = spike2vec(corpus_of("ACGT"), k=2)
        row = fm.values[0]
        assert row.sum() == 3
        for mer in ("AC", "CG", "GT"):
            assert row[bin_of(mer, NUCLEOTIDE)] == 1.0

    def test_dimension_is_alphabet_power_k(self):
        assert spike2vec(corpus_of("ACGT"), k=2).dim == 5**2
        amino = corpus_of("MKVLQ", alphabet=AMINO)
        assert spike2vec(amino, k=3).dim == 21**3

    def test_row_permutation_equivariance(self):
        c1 = corpus_of("ACGT", "GGTA", "TTAC")
        c2 = corpus_of("GGTA", "TTAC", "ACGT")
        f1 = spike2vec(c1, k=2).values
        f2 = spike2vec(c2, k=2).values
        assert np.array_equal(f1[[1, 2, 0]], f2)

    def test_sequence_shorter_than_k_rejected(self):
        with pytest.raises(EmbedError, match="shorter"):
            spike2vec(corpus_of("AC"), k=3)

    def test_ambiguity_symbol_gets_its_own_slot(self):
        fm = spike2vec(corpus_of("AN"), k=1)
        assert fm.values[0][bin_of("N", NUCLEOTIDE)] == 1.0


class TestSpacedKmers:
    def test_hand_enumerated_example(self):
        # g-mers of ACGTA at g=4: ACGT, CGTA; first-2 extracts: AC, CG
        fm = spaced_kmers(corpus_of("ACGTA"), k=2, g=4)
        row = fm.values[0]
        assert row.sum() == 2
        assert row[bin_of("AC", NUCLEOTIDE)] == 1.0
        assert row[bin_of("CG", NUCLEOTIDE)] == 1.0

    def test_length_exactly_g_single_window(self):
        fm = spaced_kmers(corpus_of("ACGT"), k=2, g=4)
        assert fm.values[0].sum() == 1

    def test_g_equal_k_plus_one_matches_truncated_spike2vec(self):
        seq = "ACGTAGCTTAGC"
        spaced = spaced_kmers(corpus_of(seq), k=3, g=4).values[0]
        truncated = spike2vec(corpus_of(seq[:-1]), k=3).values[0]
        assert np.array_equal(spaced, truncated)

    def test_g_not_larger_than_k_rejected(self):
        with pytest.raises(EmbedError, match="g must exceed k"):
            spaced_kmers(corpus_of("ACGTA"), k=3, g=3)

    def test_sequence_shorter_than_g_rejected(self):
        with pytest.raises(EmbedError, match="shorter"):
            spaced_kmers(corpus_of("ACG"), k=2, g=4)


class TestPwm2vec:
    def test_repeated_symbol_hand_computed(self):
        # AAAA, k=2: three AA windows; PWM column prob of A is
        # p = (3 + c) / (3 + 5 c) with pseudocount c; the single occupied bin
        # holds 3 occurrences * 2 positions * p
        c = 0.1
        fm = pwm2vec(corpus_of("AAAA"), k=2, pseudocount=c)
        p = (3 + c) / (3 + 5 * c)
        expected = 3 * 2 * p
        row = fm.values[0]
        assert row[bin_of("AA", NUCLEOTIDE)] == pytest.approx(expected, rel=1e-12)
        assert row.sum() == pytest.approx(expected, rel=1e-12)

    def test_huge_pseudocount_approaches_uniform_scoring(self):
        # as the pseudocount grows every PWM entry tends to 1/|alphabet| and
        # each occurrence scores k / |alphabet|
        fm = pwm2vec(corpus_of("ACGT"), k=2, pseudocount=1e9)
        row = fm.values[0]
        per_occurrence = 2 / 5
        for mer in ("AC", "CG", "GT"):
            assert row[bin_of(mer, NUCLEOTIDE)] == pytest.approx(per_occurrence, rel=1e-6)

    def test_identical_kmer_multisets_give_identical_rows(self):
        # ACGA and GACG share the 2-mer multiset {AC, CG, GA}
        fm = pwm2vec(corpus_of("ACGA", "GACG"), k=2)
        assert np.allclose(fm.values[0], fm.values[1], rtol=0, atol=1e-15)

    def test_nonpositive_pseudocount_rejected(self):
        with pytest.raises(EmbedError, match="pseudocount"):
            pwm2vec(corpus_of("ACGT"), k=2, pseudocount=0.0)


sequences = st.text(alphabet="ACGT", min_size=4, max_size=30)


@settings(max_examples=40, deadline=None)
@given(st.lists(sequences, min_size=1, max_size=5), st.integers(1, 3))
def test_spike2vec_row_sums_are_window_counts(seqs, k):
    corpus = corpus_of(*seqs)
    fm = spike2vec(corpus, k=k)
    for row, rec in zip(fm.values, corpus.records):
        assert row.sum() == len(rec.residues) - k + 1
    assert np.all(fm.values >= 0)
    assert np.all(np.isfinite(fm.values))


@settings(max_examples=20, deadline=None)
@given(st.lists(sequences, min_size=2, max_size=5), st.integers(1, 2))
def test_methods_are_deterministic(seqs, k):
    corpus = corpus_of(*seqs)
    assert np.array_equal(spike2vec(corpus, k=k).values, spike2vec(corpus, k=k).values)
    assert np.array_equal(pwm2vec(corpus, k=k).values, pwm2vec(corpus, k=k).values)


def test_standardize_columns():
    corpus = corpus_of("ACGT", "AATT", "CCGG")
    fm = standardize_columns(spike2vec(corpus, k=1))
    occupied = fm.values.std(axis=0) > 0
    assert np.allclose(fm.values.mean(axis=0), 0.0, atol=1e-12)
    assert np.allclose(fm.values.std(axis=0)[occupied], 1.0, rtol=1e-12)
    # constant columns stay at zero
    constant = spike2vec(corpus, k=1).values.std(axis=0) == 0
    assert np.array_equal(fm.values[:, constant], np.zeros((3, constant.sum())))


def test_metadata_carried_through():
    corpus = corpus_of("ACGT", "GGTA")
    fm = spike2vec(corpus, k=2)
    assert fm.point_ids == ["s0", "s1"]
    assert fm.labels == ["x", "x"]
    assert fm.method == "spike2vec"
