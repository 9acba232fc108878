"""Statistical word alignment: IBM Model 1 EM with an optional diagonal prior.

The diagonal prior reweights alignment positions by how close they sit to
the sentence diagonal, controlled by a non-negative tension parameter;
tension 0 disables it and recovers plain Model 1. An artificial source-side
null word (index -1) can absorb target tokens that translate nothing.

Training is deterministic: uniform initialization and fixed iteration order
yield bit-reproducible tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from sklearn.base import BaseEstimator

from .corpus import AlignmentLink, ParallelCorpus, SentencePair
from .errors import ConfigurationError, StructuralError

NULL_WORD = "<NULL>"
PROB_FLOOR = 1e-12


@dataclass
class TranslationTable:
    """Conditional probabilities t(target | source) plus both vocabularies."""

    probs: dict[tuple[str, str], float]
    src_vocab: frozenset[str]
    tgt_vocab: frozenset[str]
    tension: float = 0.0
    use_null: bool = True

    def prob(self, src: str, tgt: str) -> float:
        return self.probs.get((src, tgt), PROB_FLOOR)

    def dump_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for (src, tgt), p in sorted(self.probs.items()):
                fh.write(f"{src}\t{tgt}\t{p!r}\n")

    @classmethod
    def load_tsv(cls, path, tension: float = 0.0, use_null: bool = True) -> "TranslationTable":
        probs: dict[tuple[str, str], float] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                src, tgt, p = line.rstrip("\n").split("\t")
                probs[(src, tgt)] = float(p)
        src_vocab = frozenset(s for s, _ in probs)
        tgt_vocab = frozenset(t for _, t in probs)
        return cls(probs, src_vocab, tgt_vocab, tension, use_null)


@lru_cache(maxsize=65536)
def _prior_weights(n_src: int, tgt_pos: int, tgt_len: int, tension: float, use_null: bool):
    """Normalized alignment prior over source positions (index 0 = null slot).

    Returns a list of length n_src + 1 when use_null else n_src; entry 0 is
    the null weight when enabled, real positions follow in order.
    """
    weights = []
    if use_null:
        weights.append(1.0)
    for i in range(n_src):
        if tension > 0.0:
            d = abs((i + 1) / n_src - (tgt_pos + 1) / tgt_len)
            weights.append(math.exp(-tension * d))
        else:
            weights.append(1.0)
    total = sum(weights)
    return tuple(w / total for w in weights)


class IbmModel1Aligner(BaseEstimator):
    """IBM Model 1 word aligner with EM training.

    Parameters
    ----------
    iterations : number of EM iterations (>= 1).
    tension : diagonal prior strength; 0 disables the prior.
    use_null : add an artificial source null word absorbing unaligned
        target tokens; target tokens whose argmax is the null produce
        no link.
    """

    def __init__(self, iterations: int = 5, tension: float = 0.0, use_null: bool = True):
        self.iterations = iterations
        self.tension = tension
        self.use_null = use_null

    def fit(self, corpus: ParallelCorpus, y=None) -> "IbmModel1Aligner":
        if len(corpus) == 0:
            raise ConfigurationError("cannot train an aligner on an empty corpus")
        if self.iterations < 1:
            raise ConfigurationError(f"iterations must be >= 1, got {self.iterations}")

        sents = [
            ([t.surface for t in p.source], [t.surface for t in p.target])
            for p in corpus.pairs
        ]
        src_vocab = sorted({w for src, _ in sents for w in src})
        tgt_vocab = sorted({w for _, tgt in sents for w in tgt})
        src_types = src_vocab + ([NULL_WORD] if self.use_null else [])

        uniform = 1.0 / len(tgt_vocab)
        t: dict[tuple[str, str], float] = {}
        # Seed only co-occurring pairs; everything else stays at the floor.
        for src, tgt in sents:
            rows = src + ([NULL_WORD] if self.use_null else [])
            for s in rows:
                for w in tgt:
                    t[(s, w)] = uniform

        loglik_history = []
        for _ in range(self.iterations):
            counts: dict[tuple[str, str], float] = {}
            totals: dict[str, float] = {}
            loglik = 0.0
            for src, tgt in sents:
                n, m = len(src), len(tgt)
                rows = ([NULL_WORD] if self.use_null else []) + src
                # With a flat prior the weights cancel in the posterior and
                # only shift the log-likelihood by a constant.
                flat = self.tension == 0.0
                log_flat = math.log(len(rows)) if flat else 0.0
                for j, w in enumerate(tgt):
                    if flat:
                        contrib = [t[(s, w)] for s in rows]
                        z = sum(contrib)
                        loglik += math.log(z) - log_flat
                    else:
                        prior = _prior_weights(n, j, m, self.tension, self.use_null)
                        contrib = [prior[k] * t[(s, w)] for k, s in enumerate(rows)]
                        z = sum(contrib)
                        loglik += math.log(z)
                    for s, c in zip(rows, contrib):
                        share = c / z
                        key = (s, w)
                        counts[key] = counts.get(key, 0.0) + share
                        totals[s] = totals.get(s, 0.0) + share
            for (s, w) in t:
                c = counts.get((s, w), 0.0)
                tot = totals.get(s, 0.0)
                t[(s, w)] = c / tot if tot > 0.0 else 0.0
            loglik_history.append(loglik)

        self.table_ = TranslationTable(
            t, frozenset(src_types), frozenset(tgt_vocab), self.tension, self.use_null
        )
        self.loglik_history_ = loglik_history
        return self

    def predict(self, pairs: Iterable[SentencePair]) -> list[frozenset[AlignmentLink]]:
        return [viterbi_align(p, self.table_) for p in pairs]


def train(
    corpus: ParallelCorpus,
    iterations: int = 5,
    tension: float = 0.0,
    use_null: bool = True,
) -> TranslationTable:
    """EM-train a translation table over the corpus."""
    return IbmModel1Aligner(iterations, tension, use_null).fit(corpus).table_


def viterbi_align(pair: SentencePair, table: TranslationTable) -> frozenset[AlignmentLink]:
    """Link each target token to its most likely source token.

    Ties go to the smallest source index; a null-word argmax yields no link.
    """
    src = [t.surface for t in pair.source]
    tgt = [t.surface for t in pair.target]
    n, m = len(src), len(tgt)
    links = set()
    for j, w in enumerate(tgt):
        prior = _prior_weights(n, j, m, table.tension, table.use_null)
        best_i = -1
        best_score = -1.0
        if table.use_null:
            best_score = prior[0] * table.prob(NULL_WORD, w)
        offset = 1 if table.use_null else 0
        for i, s in enumerate(src):
            score = prior[i + offset] * table.prob(s, w)
            if score > best_score:
                best_score = score
                best_i = i
        if best_i >= 0:
            links.add(AlignmentLink(best_i, j))
    return frozenset(links)


_NEIGHBORS = [(-1, 0), (0, -1), (1, 0), (0, 1), (-1, -1), (-1, 1), (1, -1), (1, 1)]


def symmetrize(
    forward: frozenset[AlignmentLink],
    reverse: frozenset[AlignmentLink],
    mode: str = "grow-diag",
) -> frozenset[AlignmentLink]:
    """Combine two directional alignments of the same sentence pair."""
    fwd = set(forward)
    rev = set(reverse)
    if mode == "intersection":
        return frozenset(fwd & rev)
    if mode == "union":
        return frozenset(fwd | rev)
    if mode != "grow-diag":
        raise ValueError(f"unknown symmetrization mode: {mode!r}")

    union = fwd | rev
    aligned = set(fwd & rev)
    aligned_src = {l.src_index for l in aligned}
    aligned_tgt = {l.tgt_index for l in aligned}
    changed = True
    while changed:
        changed = False
        for link in sorted(aligned, key=lambda l: (l.src_index, l.tgt_index)):
            for di, dj in _NEIGHBORS:
                cand = AlignmentLink(link.src_index + di, link.tgt_index + dj)
                if cand in aligned or cand not in union:
                    continue
                if cand.src_index not in aligned_src or cand.tgt_index not in aligned_tgt:
                    aligned.add(cand)
                    aligned_src.add(cand.src_index)
                    aligned_tgt.add(cand.tgt_index)
                    changed = True
    return frozenset(aligned)


def write_pharaoh(alignments: Iterable[Iterable[AlignmentLink]], path) -> None:
    """Dump per-sentence alignments as space-separated `i-j` pairs."""
    with open(path, "w", encoding="utf-8") as fh:
        for links in alignments:
            ordered = sorted(links, key=lambda l: (l.src_index, l.tgt_index))
            fh.write(" ".join(f"{l.src_index}-{l.tgt_index}" for l in ordered) + "\n")


def read_pharaoh(path) -> list[frozenset[AlignmentLink]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            links = set()
            for chunk in line.split():
                try:
                    i, j = chunk.split("-")
                    links.add(AlignmentLink(int(i), int(j)))
                except ValueError as exc:
                    raise StructuralError(
                        f"{path}: line {lineno}: bad alignment token {chunk!r}"
                    ) from exc
            out.append(frozenset(links))
    return out


def attach_alignments(
    corpus: ParallelCorpus, alignments: list[frozenset[AlignmentLink]]
) -> ParallelCorpus:
    if len(alignments) != len(corpus):
        raise StructuralError(
            f"alignment count {len(alignments)} != corpus size {len(corpus)}"
        )
    pairs = tuple(p.with_links(a) for p, a in zip(corpus.pairs, alignments))
    return ParallelCorpus(pairs, corpus.source_lang, corpus.target_lang)
