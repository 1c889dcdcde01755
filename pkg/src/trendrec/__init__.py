"""Trend-aware content-based fashion recommendation with a synthetic
evaluation harness: catalog loading, category semantics, trend-driven
purchase simulation, fused-score Top-K ranking, geo annotation and metrics."""

from .catalog import (
    Catalog,
    EmbeddingTable,
    Gender,
    ItemRecord,
    Store,
    assign_stores,
    build_catalog,
    compose_item_filename,
    load_embeddings,
    parse_item_filename,
    write_embeddings,
)
from .evaluate import (
    MetricsReport,
    TrendinessStratum,
    category_similarity_metric,
    compute_metrics,
    gender_alignment_metric,
    popularity_mae_metric,
    run_ablation,
    trendiness_stratification,
)
from .geo import GeoPoint, annotate_distances, haversine_km, random_locations
from .recommend import (
    Recommendation,
    RecommendationRow,
    RelevanceBreakdown,
    ScoringWeights,
    cosine_similarity,
    flatten_recommendations,
    popularity_alignment,
    recommend_all,
    recommend_for_purchase,
    relevance,
)
from .simulate import (
    PurchaseEvent,
    SimConfig,
    UserProfile,
    init_popularity,
    normalize_popularity,
    purchase_distribution,
    simulate_histories,
)
from .synthetic import SyntheticConfig, synthetic_embeddings
from .taxonomy import CategoryTaxonomy, default_taxonomy, load_taxonomy, validate_taxonomy

__version__ = "0.1.0"
