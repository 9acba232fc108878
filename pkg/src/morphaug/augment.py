"""Synthetic pair generation by lexical replacement over aligned seeds.

Two strategies: `informed` replaces an aligned word pair with a lexicon
entry inflected to carry the original tokens' exact feature bundles on
both sides; `naive` matches POS only and inserts citation forms verbatim.
Replacements may produce semantically odd sentences by design; filtering
is the language model's job.

Randomness comes from one stream per (run seed, stream tag, seed sentence
id), derived via SHA-256, so per-seed generation is order-independent and
reproducible across runs and worker counts.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace as dc_replace
from typing import NamedTuple, Optional

from .corpus import ParallelCorpus, SentencePair, Token
from .errors import StructuralError
from .lexicon import BilingualLexicon, LexEntry, VocabularyRestriction, candidates
from .morphology import (
    ELIGIBLE_POS,
    Analysis,
    ParadigmLexicon,
    analyze,
    inflect,
    lemmatize,
)


@dataclass(frozen=True)
class AugmentationConfig:
    strategy: str = "informed"
    per_seed: int = 1
    max_replacements: int = 2
    eligible_pos: frozenset[str] = ELIGIBLE_POS
    rng_seed: int = 0
    restriction: Optional[VocabularyRestriction] = None
    inflect_source: bool = True
    inflect_target: bool = True
    max_attempts: int = 10

    def __post_init__(self):
        if self.strategy not in ("informed", "naive"):
            raise ValueError(f"unknown strategy: {self.strategy!r}")
        if self.per_seed < 1:
            raise ValueError("per_seed must be >= 1")
        if self.max_replacements < 1:
            raise ValueError("max_replacements must be >= 1")


class Replacement(NamedTuple):
    src_index: int
    old_lemma: str
    new_lemma: str


@dataclass(frozen=True)
class SyntheticPair:
    source: tuple[Token, ...]
    target: tuple[Token, ...]
    seed_id: str
    replacements: tuple[Replacement, ...]
    strategy: str

    def __post_init__(self):
        if not self.replacements:
            raise ValueError("a synthetic pair must carry at least one replacement")

    @property
    def source_text(self) -> str:
        return " ".join(t.surface for t in self.source)

    @property
    def target_text(self) -> str:
        return " ".join(t.surface for t in self.target)

    @property
    def key(self) -> tuple[str, str]:
        return (self.source_text, self.target_text)


class ReplacementSlot(NamedTuple):
    src_index: int
    tgt_index: int
    src_analysis: Analysis
    tgt_analysis: Analysis


def select_replaceable(
    pair: SentencePair,
    src_paradigms: ParadigmLexicon,
    tgt_paradigms: ParadigmLexicon,
    cfg: AugmentationConfig,
) -> list[ReplacementSlot]:
    """Positions eligible for replacement: 1-to-1 aligned, unambiguous.

    A slot requires the source token to have exactly one analysis with an
    eligible POS, to sit in exactly one alignment link, and the linked
    target token to also sit in exactly one link with exactly one analysis.
    """
    if pair.links is None:
        raise StructuralError(f"pair {pair.id} has no alignment links")
    src_degree: dict[int, int] = {}
    tgt_degree: dict[int, int] = {}
    for link in pair.links:
        src_degree[link.src_index] = src_degree.get(link.src_index, 0) + 1
        tgt_degree[link.tgt_index] = tgt_degree.get(link.tgt_index, 0) + 1
    slots = []
    for link in sorted(pair.links, key=lambda l: (l.src_index, l.tgt_index)):
        if src_degree[link.src_index] != 1 or tgt_degree[link.tgt_index] != 1:
            continue
        src_analyses = analyze(pair.source[link.src_index].surface, src_paradigms)
        if len(src_analyses) != 1:
            continue
        (src_analysis,) = src_analyses
        if src_analysis.bundle.pos not in cfg.eligible_pos:
            continue
        tgt_analyses = analyze(pair.target[link.tgt_index].surface, tgt_paradigms)
        if len(tgt_analyses) != 1:
            continue
        (tgt_analysis,) = tgt_analyses
        slots.append(
            ReplacementSlot(link.src_index, link.tgt_index, src_analysis, tgt_analysis)
        )
    return slots


def _draw_count(rng: random.Random, n_slots: int, max_replacements: int) -> int:
    upper = min(n_slots, max_replacements)
    return 1 if upper <= 1 else rng.randint(1, upper)


def _pick_entry(
    rng: random.Random,
    lexicon: BilingualLexicon,
    slot: ReplacementSlot,
    cfg: AugmentationConfig,
    match: str,
) -> Optional[LexEntry]:
    bundle = slot.src_analysis.bundle
    lemma_cf = slot.src_analysis.lemma.casefold()
    unrestricted = cfg.restriction is None or cfg.restriction.mode == "all"
    if unrestricted:
        # Hot path: the same-lemma-excluded pool only depends on the slot.
        cache_key = (bundle, match, lemma_cf)
        pool = lexicon._cand_cache.get(cache_key)
        if pool is None:
            pool = [
                e
                for e in candidates(lexicon, bundle, None, match=match)
                if e.src_lemma.casefold() != lemma_cf
            ]
            lexicon._cand_cache[cache_key] = pool
    else:
        pool = [
            e
            for e in candidates(lexicon, bundle, cfg.restriction, match=match)
            if e.src_lemma.casefold() != lemma_cf
        ]
    if not pool:
        return None
    return rng.choice(pool)


def _apply(
    pair: SentencePair,
    edits: list[tuple[ReplacementSlot, str, str, LexEntry]],
    strategy: str,
) -> Optional[SyntheticPair]:
    source = list(pair.source)
    target = list(pair.target)
    replacements = []
    for slot, new_src, new_tgt, entry in edits:
        if new_src == source[slot.src_index].surface:
            return None  # replacement must actually change the sentence
        source[slot.src_index] = Token(new_src, slot.src_index)
        target[slot.tgt_index] = Token(new_tgt, slot.tgt_index)
        replacements.append(
            Replacement(slot.src_index, slot.src_analysis.lemma, entry.src_lemma)
        )
    return SyntheticPair(
        tuple(source), tuple(target), pair.id, tuple(replacements), strategy
    )


def augment_informed(
    pair: SentencePair,
    slots: list[ReplacementSlot],
    lexicon: BilingualLexicon,
    src_paradigms: ParadigmLexicon,
    tgt_paradigms: ParadigmLexicon,
    rng: random.Random,
    cfg: AugmentationConfig,
) -> Optional[SyntheticPair]:
    """One morphologically-informed attempt; None when any step lacks data.

    For each chosen slot: a candidate with the source token's exact bundle
    is drawn, its source lemma is inflected to that bundle, its translation
    is lemmatized and re-inflected to the original target token's bundle.
    A failed step discards the whole attempt rather than degrading it.
    """
    if not slots:
        return None
    k = _draw_count(rng, len(slots), cfg.max_replacements)
    chosen = sorted(rng.sample(slots, k), key=lambda s: s.src_index)
    edits = []
    for slot in chosen:
        entry = _pick_entry(rng, lexicon, slot, cfg, match="exact")
        if entry is None:
            return None
        if cfg.inflect_source:
            new_src = inflect(entry.src_lemma, slot.src_analysis.bundle, src_paradigms)
            if new_src is None:
                return None
        else:
            new_src = entry.src_lemma
        tgt_bundle = slot.tgt_analysis.bundle
        # Dictionary entries are not guaranteed to be citation forms.
        lemma = lemmatize(entry.tgt_lemma, tgt_bundle, tgt_paradigms) or entry.tgt_lemma
        if cfg.inflect_target:
            new_tgt = inflect(lemma, tgt_bundle, tgt_paradigms)
            if new_tgt is None:
                return None
        else:
            new_tgt = lemma
        edits.append((slot, new_src, new_tgt, entry))
    result = _apply(pair, edits, "informed")
    if result is not None and cfg.restriction is not None:
        for _, _, _, entry in edits:
            cfg.restriction.consume(entry)
    return result


def augment_naive(
    pair: SentencePair,
    slots: list[ReplacementSlot],
    lexicon: BilingualLexicon,
    rng: random.Random,
    cfg: AugmentationConfig,
) -> Optional[SyntheticPair]:
    """One naive attempt: POS-matched citation forms, no inflection."""
    if not slots:
        return None
    k = _draw_count(rng, len(slots), cfg.max_replacements)
    chosen = sorted(rng.sample(slots, k), key=lambda s: s.src_index)
    edits = []
    for slot in chosen:
        entry = _pick_entry(rng, lexicon, slot, cfg, match="pos")
        if entry is None:
            return None
        edits.append((slot, entry.src_lemma, entry.tgt_lemma, entry))
    result = _apply(pair, edits, "naive")
    if result is not None and cfg.restriction is not None:
        for _, _, _, entry in edits:
            cfg.restriction.consume(entry)
    return result


def seed_rng(run_seed: int, *tags: str) -> random.Random:
    """Independent RNG stream named by the run seed plus string tags."""
    material = ("\x1f".join([str(run_seed), *tags])).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def generate_pool(
    corpus: ParallelCorpus,
    lexicon: BilingualLexicon,
    src_paradigms: ParadigmLexicon,
    tgt_paradigms: ParadigmLexicon,
    cfg: AugmentationConfig,
    stream: str = "",
) -> list[SyntheticPair]:
    """Up to `per_seed` unique synthetic pairs per seed, deduped pool-wide.

    Each requested sentence gets up to `max_attempts` tries; duplicates keep
    the first occurrence. Deterministic given the config and stream tag.
    """
    seen: set[tuple[str, str]] = set()
    pool: list[SyntheticPair] = []
    for pair in corpus.pairs:
        slots = select_replaceable(pair, src_paradigms, tgt_paradigms, cfg)
        if not slots:
            continue
        rng = seed_rng(cfg.rng_seed, stream, pair.id)
        for _ in range(cfg.per_seed):
            for _ in range(cfg.max_attempts):
                if cfg.strategy == "informed":
                    attempt = augment_informed(
                        pair, slots, lexicon, src_paradigms, tgt_paradigms, rng, cfg
                    )
                else:
                    attempt = augment_naive(pair, slots, lexicon, rng, cfg)
                if attempt is not None and attempt.key not in seen:
                    seen.add(attempt.key)
                    pool.append(attempt)
                    break
    return pool


def dump_pool(pool: list[SyntheticPair], path) -> None:
    """TSV dump: seed_id, strategy, source, target, replacement descriptors."""
    with open(path, "w", encoding="utf-8") as fh:
        for sp in pool:
            desc = ";".join(
                f"{r.src_index}:{r.old_lemma}>{r.new_lemma}" for r in sp.replacements
            )
            fh.write(
                f"{sp.seed_id}\t{sp.strategy}\t{sp.source_text}\t{sp.target_text}\t{desc}\n"
            )


def load_pool(path) -> list[SyntheticPair]:
    pool = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 5:
                raise StructuralError(f"{path}: line {lineno} has {len(cols)} columns")
            seed_id, strategy, src, tgt, desc = cols
            replacements = []
            for chunk in desc.split(";"):
                idx, lemmas = chunk.split(":", 1)
                old, new = lemmas.split(">", 1)
                replacements.append(Replacement(int(idx), old, new))
            pool.append(
                SyntheticPair(
                    tuple(Token(s, i) for i, s in enumerate(src.split(" "))),
                    tuple(Token(s, i) for i, s in enumerate(tgt.split(" "))),
                    seed_id,
                    tuple(replacements),
                    strategy,
                )
            )
    return pool
