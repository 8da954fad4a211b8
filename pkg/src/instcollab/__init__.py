"""Thematic research strengths of institutions and collaboration recommendations."""

from .corpus import (
    CorpusConfig,
    InstitutionDataset,
    PublicationRecord,
    apply_inclusion_filter,
    parse_wos_export,
    read_corpus_dir,
    write_wos_export,
)
from .embeddings import (
    EmbeddingTable,
    TrainParams,
    load_embeddings,
    top_k_similar,
    train_skipgram,
)
from .evaluation import (
    FrequencyTable,
    assign_groups,
    equitability,
    evaluate_recommendations,
    gini_index,
    interpret_score,
    jaccard_dissimilarity,
    novelty_index,
    shannon_entropy,
)
from .expertise import ExpertiseProfiler, RankedProfile, rank_profile, x_index, xg_index
from .matrices import TIMatrices, build_ti_matrices
from .network import (
    AffiliationNetwork,
    ThematicProfile,
    build_wka,
    inject_scores,
    weighted_indegree,
)
from .normalize import (
    CanonicalMap,
    KeywordNormalizer,
    canonicalize_by_similarity,
    fold_plurals,
)
from .pipeline import PipelineConfig, run_pipeline, run_stage
from .recommender import CollaborationRecommender, strategy1, strategy2

__version__ = "0.1.0"

__all__ = [
    "AffiliationNetwork",
    "CanonicalMap",
    "CollaborationRecommender",
    "CorpusConfig",
    "EmbeddingTable",
    "ExpertiseProfiler",
    "FrequencyTable",
    "InstitutionDataset",
    "KeywordNormalizer",
    "PipelineConfig",
    "PublicationRecord",
    "RankedProfile",
    "TIMatrices",
    "ThematicProfile",
    "TrainParams",
    "apply_inclusion_filter",
    "assign_groups",
    "build_ti_matrices",
    "build_wka",
    "canonicalize_by_similarity",
    "equitability",
    "evaluate_recommendations",
    "fold_plurals",
    "gini_index",
    "inject_scores",
    "interpret_score",
    "jaccard_dissimilarity",
    "load_embeddings",
    "novelty_index",
    "parse_wos_export",
    "rank_profile",
    "read_corpus_dir",
    "run_pipeline",
    "run_stage",
    "shannon_entropy",
    "strategy1",
    "strategy2",
    "top_k_similar",
    "train_skipgram",
    "weighted_indegree",
    "write_wos_export",
    "x_index",
    "xg_index",
]
