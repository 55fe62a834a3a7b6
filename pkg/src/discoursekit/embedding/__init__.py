"""Word-level embeddings over deduplicated snippets, plus neighbor queries."""

from .model import (
    EmbeddingModel,
    Hyperparams,
    contrastive_neighbors,
    cosine_similarity,
    export_text,
    load_model,
    nearest_neighbors,
    save_model,
)
from .preprocess import (
    RuleLemmatizer,
    TokenizedSnippet,
    default_stopwords,
    load_stopwords,
    preprocess,
    preprocess_many,
    preprocess_snippet,
    tokenize,
)
from .train import (
    init_vectors,
    negative_sampling_gradients,
    negative_sampling_loss,
    train_embeddings,
)
from .vocab import Vocabulary, build_vocab

__all__ = [
    "EmbeddingModel",
    "Hyperparams",
    "contrastive_neighbors",
    "cosine_similarity",
    "export_text",
    "load_model",
    "nearest_neighbors",
    "save_model",
    "RuleLemmatizer",
    "TokenizedSnippet",
    "default_stopwords",
    "load_stopwords",
    "preprocess",
    "preprocess_many",
    "preprocess_snippet",
    "tokenize",
    "init_vectors",
    "negative_sampling_gradients",
    "negative_sampling_loss",
    "train_embeddings",
    "Vocabulary",
    "build_vocab",
]
