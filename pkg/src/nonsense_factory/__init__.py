"""Deterministic factory and verification toolkit for synthetic pretraining corpora."""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    DocPolicy,
    Document,
    Sentence,
    sample_document_by_sentences,
    sample_document_by_tokens,
    sample_sentence,
)
from .dataset import (  # noqa: F401
    DatasetRecord,
    TaskInstance,
    dataset_stats,
    ingest_real_corpus,
    read_dataset,
    write_dataset,
)
from .denoising import (  # noqa: F401
    DENOISING_KINDS,
    MaskConfig,
    make_mdg,
    make_mdg_adjusted,
    make_nsg,
    make_sr,
    make_sr_adjusted,
    verify_denoising_instance,
)
from .elementary import (  # noqa: F401
    ELEMENTARY_KINDS,
    TaskRecord,
    apply_modification,
    compute_gold,
    generate_elementary,
    oracle_accepts,
)
from .ensemble import EnsembleConfig, compose, verify_instance  # noqa: F401
from .keywords import KeywordScheme, default_scheme, load_scheme  # noqa: F401
from .rng import derive_rng, derive_seed  # noqa: F401
from .rouge import RougeScore, corpus_rouge, rouge_l, rouge_n  # noqa: F401
from .vocab import Vocabulary, build_vocabulary, index_of, word_at  # noqa: F401
