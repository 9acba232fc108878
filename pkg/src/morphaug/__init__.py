"""morphaug: synthetic parallel data for low-resource machine translation.

Builds tiered training datasets by replacing aligned words in a small seed
corpus with dictionary entries, inflecting them to match the original
morphology, and keeping the lowest-perplexity generations.
"""

from .aligner import (
    IbmModel1Aligner,
    TranslationTable,
    read_pharaoh,
    symmetrize,
    train,
    viterbi_align,
    write_pharaoh,
)
from .assemble import GenerationDriver, TierSpec, build_tiers, emit_dataset, stats
from .augment import (
    AugmentationConfig,
    SyntheticPair,
    augment_informed,
    augment_naive,
    generate_pool,
    select_replaceable,
)
from .config import RunConfig
from .corpus import (
    AlignmentLink,
    ParallelCorpus,
    SentencePair,
    Token,
    filter_seed_eligible,
    load_parallel,
    load_parallel_tsv,
    tokenize,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    EncodingError,
    MorphAugError,
    StructuralError,
)
from .lexicon import BilingualLexicon, LexEntry, VocabularyRestriction, candidates, load_lexicon
from .lm import NGramLanguageModel, ScoredPair, filter_rank, train_lm
from .metrics import BleuResult, corpus_bleu
from .morphology import (
    Analysis,
    FeatureBundle,
    ParadigmLexicon,
    analyze,
    inflect,
    lemmatize,
    load_paradigms,
)

__version__ = "0.1.0"
