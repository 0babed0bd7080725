"""Fixed-length numeric embeddings of sequence corpora.

Three methods over the k-mer spectrum of dimension |alphabet|^k:

* kmer_spectrum  -- sliding-window k-mer counts
* spaced_kmers   -- counts of the first k letters of every g-mer (g > k)
* pwm_spectrum   -- k-mer occurrences scored by a per-sequence position
                    weight matrix instead of raw counts

All three are deterministic and permutation-equivariant over records.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .seqio import Corpus

# dense spectra only; keeps n x |alphabet|^k matrices at desk scale
MAX_SPECTRUM_DIM = 5_000_000


class EmbedError(ValueError):
    pass


@dataclass
class FeatureMatrix:
    """n x d matrix of row-per-point embeddings with ids and class labels."""

    values: np.ndarray
    point_ids: list[str]
    labels: list[str]
    method: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def _symbol_indices(corpus: Corpus, seq: str, rec_id: str) -> np.ndarray:
    table = np.full(128, -1, dtype=np.int64)
    for i, ch in enumerate(corpus.alphabet.symbols):
        table[ord(ch)] = i
    codes = table[np.frombuffer(seq.encode("ascii"), dtype=np.uint8)]
    if (codes < 0).any():
        bad = seq[int(np.argmax(codes < 0))]
        raise EmbedError(f"record '{rec_id}': character '{bad}' outside alphabet")
    return codes


def _spectrum_dim(base: int, k: int) -> int:
    dim = base**k
    if dim > MAX_SPECTRUM_DIM:
        raise EmbedError(f"spectrum dimension {base}^{k} = {dim} exceeds {MAX_SPECTRUM_DIM}")
    return dim


def _window_codes(codes: np.ndarray, k: int, base: int) -> np.ndarray:
    """Integer bin of every length-k window, first position most significant."""
    powers = base ** np.arange(k - 1, -1, -1, dtype=np.int64)
    windows = np.lib.stride_tricks.sliding_window_view(codes, k)
    return windows @ powers


def kmer_spectrum(corpus: Corpus, k: int = 3) -> FeatureMatrix:
    """Sliding-window k-mer counts; row sums equal len - k + 1."""
    if k < 1:
        raise EmbedError(f"k must be >= 1, got {k}")
    base = len(corpus.alphabet.symbols)
    dim = _spectrum_dim(base, k)
    out = np.zeros((len(corpus), dim))
    for row, rec in enumerate(corpus.records):
        if len(rec.residues) < k:
            raise EmbedError(f"record '{rec.id}' shorter than k={k}")
        codes = _symbol_indices(corpus, rec.residues, rec.id)
        bins = _window_codes(codes, k, base)
        np.add.at(out[row], bins, 1.0)
    return FeatureMatrix(out, corpus.ids, corpus.labels, method="spike2vec")


# method name used throughout the CLI
spike2vec = kmer_spectrum


def spaced_kmers(corpus: Corpus, k: int = 4, g: int = 9) -> FeatureMatrix:
    """Gapped k-mer counts: the first k letters of each sliding g-mer, g > k."""
    if k < 1:
        raise EmbedError(f"k must be >= 1, got {k}")
    if g <= k:
        raise EmbedError(f"g must exceed k, got g={g}, k={k}")
    base = len(corpus.alphabet.symbols)
    dim = _spectrum_dim(base, k)
    out = np.zeros((len(corpus), dim))
    for row, rec in enumerate(corpus.records):
        if len(rec.residues) < g:
            raise EmbedError(f"record '{rec.id}' shorter than g={g}")
        codes = _symbol_indices(corpus, rec.residues, rec.id)
        # g-mers start at 0 .. len-g; their first k letters are the k-mers there
        n_windows = len(codes) - g + 1
        bins = _window_codes(codes[: n_windows + k - 1], k, base)
        np.add.at(out[row], bins, 1.0)
    return FeatureMatrix(out, corpus.ids, corpus.labels, method="spaced")


def pwm_spectrum(corpus: Corpus, k: int = 3, pseudocount: float = 0.1) -> FeatureMatrix:
    """Spectrum of per-occurrence PWM scores instead of counts.

    Per sequence: build a |alphabet| x k positional count matrix over its
    k-mers, smooth by ``pseudocount``, column-normalize, then score each k-mer
    occurrence by the sum of its positional probabilities and accumulate the
    score into that k-mer's spectrum bin.
    """
    if k < 1:
        raise EmbedError(f"k must be >= 1, got {k}")
    if pseudocount <= 0:
        raise EmbedError(f"pseudocount must be positive, got {pseudocount}")
    base = len(corpus.alphabet.symbols)
    dim = _spectrum_dim(base, k)
    out = np.zeros((len(corpus), dim))
    for row, rec in enumerate(corpus.records):
        if len(rec.residues) < k:
            raise EmbedError(f"record '{rec.id}' shorter than k={k}")
        codes = _symbol_indices(corpus, rec.residues, rec.id)
        windows = np.lib.stride_tricks.sliding_window_view(codes, k)
        counts = np.zeros((base, k))
        for j in range(k):
            np.add.at(counts[:, j], windows[:, j], 1.0)
        pwm = counts + pseudocount
        pwm /= pwm.sum(axis=0, keepdims=True)
        scores = pwm[windows, np.arange(k)].sum(axis=1)
        bins = _window_codes(codes, k, base)
        np.add.at(out[row], bins, scores)
    return FeatureMatrix(out, corpus.ids, corpus.labels, method="pwm2vec")


pwm2vec = pwm_spectrum


def standardize_columns(fm: FeatureMatrix) -> FeatureMatrix:
    """Column-wise zero mean, unit variance; constant columns stay at 0."""
    mu = fm.values.mean(axis=0)
    sd = fm.values.std(axis=0)
    centered = fm.values - mu
    scaled = np.divide(centered, sd, out=np.zeros_like(centered), where=sd > 0)
    return replace(fm, values=scaled)
