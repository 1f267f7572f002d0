"""Default hyperparameters used throughout the engine and CLI."""

K = 10
ALPHA = 0.7
BM25_K1 = 1.5
BM25_B = 0.75
PENALTY_WEIGHT = 0.1
UNREACHABLE_DISTANCE = 8.0
RELEVANCE_KS = (1, 5, 10)
EMBED_DIMENSION = 64
REFERENCE_SEED = 42
SIGNIFICANT_P = 0.05
MARGINAL_P = 0.10
