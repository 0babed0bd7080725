"""Kernelized t-SNE for labeled sequence corpora.

Pipeline pieces: FASTA/synthetic corpora (`seqio`), k-mer feature embeddings
(`embed`), DBSCAN density weights (`density`), Gaussian / isolation / modified
isolation affinities (`kernel`), low-dimensional initializations
(`initialization`), the KL gradient-descent optimizer (`tsne`), and embedding
quality metrics (`metrics`). The `cli` module exposes everything as a batch
command line.
"""

from .density import DbscanParams, DensityProfile, dbscan, density_estimates, weights_from_roles
from .embed import FeatureMatrix, pwm2vec, spaced_kmers, spike2vec
from .initialization import LowDimEmbedding, init_pca, init_random, init_random_walk
from .kernel import (
    AffinityMatrix,
    BandwidthProfile,
    calibrate_bandwidths,
    gaussian_affinity,
    isolation_affinity,
    mik_affinity,
    mik_gram,
    validate_mercer,
)
from .metrics import (
    MetricReport,
    kmeans,
    knn_classify,
    metric_report,
    na_distance_ratio,
    na_knn_overlap,
    trustworthiness,
)
from .seqio import AMINO, NUCLEOTIDE, Corpus, SequenceRecord, read_fasta, synth_corpus, write_fasta
from .tsne import (
    DivergenceError,
    JointDistribution,
    OptimizerConfig,
    TsneTrace,
    gradient,
    joint_p,
    joint_q,
    kl_loss,
    optimize,
    run_pipeline,
)

__version__ = "0.1.0"

__all__ = [
    "AMINO",
    "NUCLEOTIDE",
    "AffinityMatrix",
    "BandwidthProfile",
    "Corpus",
    "DbscanParams",
    "DensityProfile",
    "DivergenceError",
    "FeatureMatrix",
    "JointDistribution",
    "LowDimEmbedding",
    "MetricReport",
    "OptimizerConfig",
    "SequenceRecord",
    "TsneTrace",
    "calibrate_bandwidths",
    "dbscan",
    "density_estimates",
    "gaussian_affinity",
    "gradient",
    "init_pca",
    "init_random",
    "init_random_walk",
    "isolation_affinity",
    "joint_p",
    "joint_q",
    "kl_loss",
    "kmeans",
    "knn_classify",
    "metric_report",
    "mik_affinity",
    "mik_gram",
    "na_distance_ratio",
    "na_knn_overlap",
    "optimize",
    "pwm2vec",
    "read_fasta",
    "run_pipeline",
    "spaced_kmers",
    "spike2vec",
    "synth_corpus",
    "trustworthiness",
    "validate_mercer",
    "weights_from_roles",
    "write_fasta",
]
