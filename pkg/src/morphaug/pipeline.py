"""Stage functions composing the end-to-end pipeline.

`run_build` is literally align, train-lm, augment, filter, emit in
sequence over the same intermediate files, so running the stage commands
separately reproduces a build byte for byte. Tier increments use disjoint
RNG streams and each increment's candidate pool excludes all earlier
pools' sentences, so pools are pairwise disjoint and the selected tiers
nest without cross-increment duplicates.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Optional

from . import aligner as al
from .assemble import GenerationDriver, TierSpec, emit_all, stats
from .augment import AugmentationConfig, SyntheticPair, dump_pool, load_pool
from .config import RunConfig
from .corpus import ParallelCorpus, filter_seed_eligible, load_parallel
from .errors import CapacityError, ConfigurationError
from .lexicon import VocabularyRestriction, load_lexicon
from .lm import (
    NGramLanguageModel,
    dump_arpa,
    dump_scored,
    filter_rank,
    load_arpa,
    score_pool,
    train_lm,
)
from .morphology import load_paradigms


def _out(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def load_seed(cfg: RunConfig) -> ParallelCorpus:
    corpus = load_parallel(cfg.seed_src, cfg.seed_tgt)
    return filter_seed_eligible(corpus, cfg.min_seed_len)


def run_align(cfg: RunConfig) -> Path:
    """Train both directions, symmetrize, and write the Pharaoh file."""
    cfg.require_valid()
    seed = load_seed(cfg)
    out = _out(cfg)
    path = out / "alignments.pharaoh"
    if cfg.alignments:
        # Precomputed alignments short-circuit training (copy for provenance).
        links = al.read_pharaoh(cfg.alignments)
        al.write_pharaoh(links, path)
        return path
    forward = al.train(seed, cfg.align_iterations, cfg.align_tension, cfg.align_use_null)
    reversed_corpus = ParallelCorpus(
        tuple(
            p.__class__(p.target, p.source, p.id) for p in seed.pairs
        ),
        seed.target_lang,
        seed.source_lang,
    )
    reverse = al.train(
        reversed_corpus, cfg.align_iterations, cfg.align_tension, cfg.align_use_null
    )
    alignments = []
    for pair, rpair in zip(seed.pairs, reversed_corpus.pairs):
        fwd = al.viterbi_align(pair, forward)
        rev_links = al.viterbi_align(rpair, reverse)
        rev = frozenset(
            al.AlignmentLink(l.tgt_index, l.src_index) for l in rev_links
        )
        alignments.append(al.symmetrize(fwd, rev, cfg.symmetrization))
    al.write_pharaoh(alignments, path)
    forward.dump_tsv(out / "table.fwd.tsv")
    return path


def run_train_lm(cfg: RunConfig) -> Path:
    cfg.require_valid()
    out = _out(cfg)
    if cfg.monolingual:
        from .corpus import _read_lines, tokenize

        sentences = [
            [t.surface for t in tokenize(line)]
            for line in _read_lines(Path(cfg.monolingual))
            if line.strip()
        ]
    else:
        seed = load_seed(cfg)
        side = "source" if cfg.score_side == "source" else "target"
        sentences = [
            [t.surface for t in (p.source if side == "source" else p.target)]
            for p in seed.pairs
        ]
    lm = train_lm(sentences, cfg.lm_order, cfg.lm_discount)
    path = out / "lm.arpa"
    dump_arpa(lm, path)
    return path


def _driver(cfg: RunConfig, seed: ParallelCorpus) -> GenerationDriver:
    lexicon_src_par = load_paradigms(cfg.src_paradigms)
    tgt_par = load_paradigms(cfg.tgt_paradigms)
    lexicon = load_lexicon(cfg.lexicon, lexicon_src_par, tgt_par)
    aug_cfg = AugmentationConfig(
        strategy=cfg.strategy,
        per_seed=cfg.per_seed,
        max_replacements=cfg.max_replacements,
        eligible_pos=frozenset(cfg.eligible_pos),
        rng_seed=cfg.rng_seed,
        restriction=VocabularyRestriction(cfg.restriction),
        inflect_source=cfg.inflect_source,
        inflect_target=cfg.inflect_target,
    )
    return GenerationDriver(seed, lexicon, lexicon_src_par, tgt_par, aug_cfg)


def _aligned_seed(cfg: RunConfig) -> ParallelCorpus:
    seed = load_seed(cfg)
    path = Path(cfg.out_dir) / "alignments.pharaoh"
    if not path.is_file():
        raise ConfigurationError(f"alignments not found at {path}; run `align` first")
    return al.attach_alignments(seed, al.read_pharaoh(path))


def _deltas(cfg: RunConfig) -> list[int]:
    sizes = list(cfg.tier_sizes)
    return [b - a for a, b in zip([0] + sizes, sizes)]


def run_augment(cfg: RunConfig) -> list[Path]:
    """Write pool_<i>.tsv for every tier increment (pairwise disjoint)."""
    cfg.require_valid()
    seed = _aligned_seed(cfg)
    out = _out(cfg)
    driver = _driver(cfg, seed)
    paths = []
    exclude: set[tuple[str, str]] = set()
    targets = [cfg.tier_sizes[-1]] if cfg.global_pool else _deltas(cfg)
    for i, need in enumerate(targets):
        pool = driver.generate(i, need, exclude=exclude)
        if len(pool) < need:
            achieved = sum(len(load_pool(p)) for p in paths) + len(pool)
            raise CapacityError(sum(targets[: i + 1]), achieved)
        exclude.update(p.key for p in pool)
        path = out / f"pool_{i}.tsv"
        dump_pool(pool, path)
        paths.append(path)
    return paths


def run_filter(cfg: RunConfig) -> list[Path]:
    """Score each increment pool and select its delta; write selected_<i>.tsv."""
    cfg.require_valid()
    out = _out(cfg)
    lm_path = out / "lm.arpa"
    if not lm_path.is_file():
        raise ConfigurationError(f"LM not found at {lm_path}; run `train-lm` first")
    lm = load_arpa(lm_path)
    rng = random.Random(cfg.rng_seed)
    paths = []
    if cfg.global_pool:
        pool = load_pool(out / "pool_0.tsv")
        dump_scored(score_pool(pool, lm, cfg.score_side), out / "scored_0.tsv")
        ranked = filter_rank(
            pool, lm, cfg.tier_sizes[-1], cfg.selection_mode, rng, cfg.score_side
        )
        cursor = 0
        for i, delta in enumerate(_deltas(cfg)):
            path = out / f"selected_{i}.tsv"
            dump_pool(ranked[cursor : cursor + delta], path)
            cursor += delta
            paths.append(path)
        return paths
    for i, delta in enumerate(_deltas(cfg)):
        pool = load_pool(out / f"pool_{i}.tsv")
        dump_scored(score_pool(pool, lm, cfg.score_side), out / f"scored_{i}.tsv")
        chosen = filter_rank(pool, lm, delta, cfg.selection_mode, rng, cfg.score_side)
        path = out / f"selected_{i}.tsv"
        dump_pool(chosen, path)
        paths.append(path)
    return paths


def _load_tiers(cfg: RunConfig) -> dict[int, list[SyntheticPair]]:
    out = Path(cfg.out_dir)
    tiers: dict[int, list[SyntheticPair]] = {}
    cumulative: list[SyntheticPair] = []
    for i, size in enumerate(cfg.tier_sizes):
        path = out / f"selected_{i}.tsv"
        if not path.is_file():
            raise ConfigurationError(f"selection not found at {path}; run `filter` first")
        cumulative = cumulative + load_pool(path)
        tiers[size] = list(cumulative)
    return tiers


def run_emit(cfg: RunConfig) -> Path:
    cfg.require_valid()
    seed = load_seed(cfg)
    tiers = _load_tiers(cfg)
    spec = TierSpec(tuple(cfg.tier_sizes), cfg.clean_tag, cfg.noisy_tag)
    return emit_all(seed, tiers, spec, cfg.out_dir, rng_seed=cfg.rng_seed)


def run_build(cfg: RunConfig) -> Path:
    """align -> train-lm -> augment -> filter -> emit, sharing one out_dir."""
    run_align(cfg)
    run_train_lm(cfg)
    run_augment(cfg)
    run_filter(cfg)
    return run_emit(cfg)


def run_stats(cfg: RunConfig) -> list[dict]:
    cfg.require_valid()
    seed = load_seed(cfg)
    tiers = _load_tiers(cfg)
    lm_path = Path(cfg.out_dir) / "lm.arpa"
    lm = load_arpa(lm_path) if lm_path.is_file() else None
    reports = []
    for size in cfg.tier_sizes:
        report = stats(seed, tiers[size], lm, cfg.score_side)
        report["tier"] = size
        reports.append(report)
    return reports
