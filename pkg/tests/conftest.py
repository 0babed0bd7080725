import numpy as np
import pytest

from ktsne import spike2vec, synth_corpus


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def blob_corpus():
    """Three clearly separated sequence classes, small enough for fast tests."""
    return synth_corpus(3, 25, 40, 0.05, seed=7)


@pytest.fixture(scope="session")
def blob_features(blob_corpus):
    return spike2vec(blob_corpus, k=3)


@pytest.fixture(scope="session")
def gaussian_blobs():
    """Three well-separated numeric blobs in R^10 (n=150)."""
    r = np.random.default_rng(3)
    centers = r.normal(scale=20.0, size=(3, 10))
    X = np.vstack([r.normal(size=(50, 10)) + c for c in centers])
    labels = ["b0"] * 50 + ["b1"] * 50 + ["b2"] * 50
    return X, labels
