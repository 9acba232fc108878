"""Nested tier construction and dataset emission.

Tiers are strictly nested: each size extends the previous tier with a
freshly generated and perplexity-filtered delta, so experiments at
consecutive sizes differ only in the newly added synthetic data. Emitted
files prefix real lines with the clean tag and synthetic lines with the
noisy tag; the untagged emission is the seed-only baseline.
"""

from __future__ import annotations

import hashlib
import math
import random
import statistics
from dataclasses import dataclass, field, replace as dc_replace
from pathlib import Path
from typing import Optional, Sequence

from .augment import AugmentationConfig, SyntheticPair, generate_pool
from .corpus import ParallelCorpus
from .errors import CapacityError, ConfigurationError
from .lexicon import BilingualLexicon
from .lm import NGramLanguageModel, filter_rank, score_pair
from .morphology import ParadigmLexicon

DEFAULT_TIER_SIZES = (5000, 10000, 50000, 100000, 200000)


@dataclass(frozen=True)
class TierSpec:
    sizes: tuple[int, ...] = DEFAULT_TIER_SIZES
    clean_tag: str = "<clean>"
    noisy_tag: str = "<noisy>"

    def __post_init__(self):
        if not self.sizes or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigurationError("tier sizes must be strictly increasing")
        if any(s < 1 for s in self.sizes):
            raise ConfigurationError("tier sizes must be positive")
        for tag in (self.clean_tag, self.noisy_tag):
            if not tag or any(ch.isspace() for ch in tag):
                raise ConfigurationError(f"bad tier tag: {tag!r}")


class GenerationDriver:
    """Produces unique synthetic candidates for one tier increment at a time.

    Each increment draws from its own RNG stream; within an increment the
    per-seed count escalates (doubling, bounded) until enough pairs unique
    against `exclude` exist. Regenerating with a larger per-seed count
    extends each seed's stream, so earlier members reappear as a prefix and
    escalation stays deterministic.
    """

    def __init__(
        self,
        corpus: ParallelCorpus,
        lexicon: BilingualLexicon,
        src_paradigms: ParadigmLexicon,
        tgt_paradigms: ParadigmLexicon,
        cfg: AugmentationConfig,
        oversample: float = 1.5,
        max_escalations: int = 8,
    ):
        self.corpus = corpus
        self.lexicon = lexicon
        self.src_paradigms = src_paradigms
        self.tgt_paradigms = tgt_paradigms
        self.cfg = cfg
        self.oversample = oversample
        self.max_escalations = max_escalations

    def generate(
        self, increment: int, need: int, exclude: Optional[set[tuple[str, str]]] = None
    ) -> list[SyntheticPair]:
        """Candidates for one increment, all unique against `exclude`.

        Returns at least `need` pairs when possible; fewer signals that the
        generator is exhausted (the caller raises the capacity error).
        """
        exclude = exclude or set()
        n_seeds = max(len(self.corpus), 1)
        per_seed = max(self.cfg.per_seed, math.ceil(need * self.oversample / n_seeds))
        stream = f"increment-{increment}"
        best: list[SyntheticPair] = []
        for _ in range(self.max_escalations + 1):
            if self.cfg.restriction is not None:
                self.cfg.restriction.reset()
            cfg = dc_replace(self.cfg, per_seed=per_seed)
            pool = generate_pool(
                self.corpus, self.lexicon, self.src_paradigms,
                self.tgt_paradigms, cfg, stream=stream,
            )
            fresh = [p for p in pool if p.key not in exclude]
            if len(fresh) >= need:
                return fresh
            if len(fresh) <= len(best):
                return best if best else fresh  # exhausted: growing M adds nothing
            best = fresh
            per_seed *= 2
        return best


def build_tiers(
    seed: ParallelCorpus,
    driver: GenerationDriver,
    lm: NGramLanguageModel,
    spec: TierSpec,
    mode: str = "filtered",
    rng: Optional[random.Random] = None,
    side: str = "target",
    global_pool: bool = False,
) -> dict[int, list[SyntheticPair]]:
    """Map each requested size to its (nested) synthetic tier.

    Default is incremental construction: a fresh pool per delta, ranked and
    truncated. `global_pool` instead ranks one pool generated for the
    largest size and takes nested prefixes (the random-vs-filtered ablation
    uses this mode so both selections draw from the same candidates).
    """
    tiers: dict[int, list[SyntheticPair]] = {}
    if global_pool:
        pool = driver.generate(0, spec.sizes[-1])
        if len(pool) < spec.sizes[-1]:
            raise CapacityError(spec.sizes[-1], len(pool))
        ranked = filter_rank(pool, lm, spec.sizes[-1], mode=mode, rng=rng, side=side)
        for size in spec.sizes:
            tiers[size] = ranked[:size]
        return tiers

    selected: list[SyntheticPair] = []
    seen: set[tuple[str, str]] = set()
    for increment, size in enumerate(spec.sizes):
        delta = size - len(selected)
        fresh = driver.generate(increment, delta, exclude=seen)
        if len(fresh) < delta:
            raise CapacityError(size, len(selected) + len(fresh))
        chosen = filter_rank(fresh, lm, delta, mode=mode, rng=rng, side=side)
        selected = selected + chosen
        seen.update(p.key for p in chosen)
        tiers[size] = list(selected)
    return tiers


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _count_lines(path: Path) -> int:
    data = path.read_bytes()
    return data.count(b"\n")


def emit_dataset(
    seed: ParallelCorpus,
    tier: Sequence[SyntheticPair],
    spec: TierSpec,
    out_dir,
    tagging: str = "tagged",
) -> list[tuple[str, int, str]]:
    """Write train.src/train.tgt under out_dir; returns manifest records.

    Tagged mode prefixes every real line with the clean tag and every
    synthetic line with the noisy tag; untagged mode emits the seed only,
    with no prefixes (the zero-synthetic baseline).
    """
    if tagging not in ("tagged", "untagged"):
        raise ConfigurationError(f"unknown tagging mode: {tagging!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    src_lines = []
    tgt_lines = []
    if tagging == "untagged":
        for pair in seed.pairs:
            src_lines.append(pair.source_text)
            tgt_lines.append(pair.target_text)
    else:
        for pair in seed.pairs:
            src_lines.append(f"{spec.clean_tag} {pair.source_text}")
            tgt_lines.append(f"{spec.clean_tag} {pair.target_text}")
        for sp in tier:
            src_lines.append(f"{spec.noisy_tag} {sp.source_text}")
            tgt_lines.append(f"{spec.noisy_tag} {sp.target_text}")
    records = []
    for name, lines in (("train.src", src_lines), ("train.tgt", tgt_lines)):
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        records.append((str(path), len(lines), _sha256(path)))
    return records


def emit_all(
    seed: ParallelCorpus,
    tiers: dict[int, list[SyntheticPair]],
    spec: TierSpec,
    out_dir,
    rng_seed: int = 0,
) -> Path:
    """Emit the untagged baseline plus every tier; write and return the manifest."""
    out_dir = Path(out_dir)
    records = emit_dataset(seed, [], spec, out_dir / "0K", tagging="untagged")
    for size in spec.sizes:
        records += emit_dataset(seed, tiers[size], spec, out_dir / str(size), "tagged")
    manifest = out_dir / "manifest"
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write(f"# rng_seed={rng_seed}\n")
        for path, lines, digest in records:
            rel = str(Path(path).relative_to(out_dir))
            fh.write(f"{rel}\t{lines}\t{digest}\n")
    return manifest


def stats(
    seed: ParallelCorpus,
    tier: Sequence[SyntheticPair],
    lm: Optional[NGramLanguageModel] = None,
    side: str = "target",
) -> dict:
    """Per-tier report: size, seeds used, new vocabulary types, perplexity."""
    seed_src_types = {t.surface for p in seed.pairs for t in p.source}
    seed_tgt_types = {t.surface for p in seed.pairs for t in p.target}
    tier_src_types = {t.surface for sp in tier for t in sp.source}
    tier_tgt_types = {t.surface for sp in tier for t in sp.target}
    report = {
        "size": len(tier),
        "unique_seeds": len({sp.seed_id for sp in tier}),
        "new_src_types": len(tier_src_types - seed_src_types),
        "new_tgt_types": len(tier_tgt_types - seed_tgt_types),
        "seed_src_types": len(seed_src_types),
        "seed_tgt_types": len(seed_tgt_types),
        "mean_ppl": 0.0,
        "median_ppl": 0.0,
    }
    if lm is not None and tier:
        ppls = [score_pair(sp, lm, side) for sp in tier]
        report["mean_ppl"] = statistics.fmean(ppls)
        report["median_ppl"] = statistics.median(ppls)
    return report
