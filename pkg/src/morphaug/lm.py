"""N-gram language model with interpolated absolute discounting, perplexity
scoring, and lowest-perplexity selection.

Perplexity of a sentence is exp of the negative mean log-probability over
the scored positions. For order >= 2, sentences are padded with begin
symbols (which only condition, never get scored) and the end symbol is
scored; pure unigram models score the raw tokens with no padding.

Smoothing: at each order, counts are discounted by a constant and the
freed mass escapes to the next lower order; the unigram level escapes to
a closed unknown-word floor of 1/(vocabulary size + 1). Every probability
is therefore positive and, for each observed context, the distribution
over vocabulary plus unknown sums to one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from sklearn.base import BaseEstimator

from .augment import SyntheticPair
from .errors import ConfigurationError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


class NGramLanguageModel(BaseEstimator):
    """Deterministic n-gram LM trained on tokenized sentences."""

    def __init__(self, order: int = 3, discount: float = 0.75):
        self.order = order
        self.discount = discount

    @classmethod
    def uniform(cls, vocab: Iterable[str]) -> "NGramLanguageModel":
        """Closed-vocabulary uniform model: every token scores 1/|V|."""
        model = cls(order=1, discount=0.0)
        model.vocab_ = frozenset(vocab)
        if not model.vocab_:
            raise ConfigurationError("uniform model needs a non-empty vocabulary")
        model._uniform_p = 1.0 / len(model.vocab_)
        return model

    def fit(self, sentences: Sequence[Sequence[str]], y=None) -> "NGramLanguageModel":
        if self.order < 1:
            raise ConfigurationError(f"order must be >= 1, got {self.order}")
        sentences = [list(s) for s in sentences if len(s) > 0]
        if not sentences:
            raise ConfigurationError("cannot train a language model on empty input")
        self._uniform_p = None

        counts: dict[tuple[str, ...], dict[str, int]] = {}
        for sent in sentences:
            if self.order == 1:
                events = [((), w) for w in sent]
            else:
                padded = [BOS] * (self.order - 1) + sent + [EOS]
                events = []
                for i in range(self.order - 1, len(padded)):
                    for k in range(1, self.order + 1):
                        events.append((tuple(padded[i - k + 1 : i]), padded[i]))
            for ctx, w in events:
                bucket = counts.setdefault(ctx, {})
                bucket[w] = bucket.get(w, 0) + 1

        self._counts = counts
        self._totals = {ctx: sum(b.values()) for ctx, b in counts.items()}
        self._distinct = {ctx: len(b) for ctx, b in counts.items()}
        vocab = {w for b in counts.values() for w in b}
        vocab.discard(BOS)
        self.vocab_ = frozenset(vocab)
        self._unk_floor = 1.0 / (len(self.vocab_) + 1)
        return self

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        """Smoothed conditional probability p(word | context)."""
        if self._uniform_p is not None:
            return self._uniform_p
        ctx = tuple(context)[-(self.order - 1) :] if self.order > 1 else ()
        return self._prob(word, ctx)

    def _prob(self, word: str, ctx: tuple[str, ...]) -> float:
        if not ctx:
            total = self._totals.get((), 0)
            c = self._counts.get((), {}).get(word, 0)
            distinct = self._distinct.get((), 0)
            if total == 0:
                return self._unk_floor
            discounted = max(c - self.discount, 0.0) / total
            escape = self.discount * distinct / total
            return discounted + escape * self._unk_floor
        total = self._totals.get(ctx, 0)
        if total == 0:
            return self._prob(word, ctx[1:])
        c = self._counts[ctx].get(word, 0)
        discounted = max(c - self.discount, 0.0) / total
        escape = self.discount * self._distinct[ctx] / total
        return discounted + escape * self._prob(word, ctx[1:])

    def _scored_events(self, sentence: Sequence[str]):
        if self._uniform_p is not None or self.order == 1:
            return [((), w) for w in sentence]
        padded = [BOS] * (self.order - 1) + list(sentence) + [EOS]
        return [
            (tuple(padded[i - self.order + 1 : i]), padded[i])
            for i in range(self.order - 1, len(padded))
        ]

    def loglikelihood(self, sentence: Sequence[str]) -> tuple[float, int]:
        """Natural-log likelihood and number of scored positions."""
        if len(sentence) == 0:
            raise ValueError("cannot score an empty sentence")
        events = self._scored_events(sentence)
        ll = 0.0
        for ctx, w in events:
            if self._uniform_p is not None:
                ll += math.log(self._uniform_p)
            else:
                ll += math.log(self._prob(w, ctx))
        return ll, len(events)

    def perplexity(self, sentence: Sequence[str]) -> float:
        if self._uniform_p is not None:
            if len(sentence) == 0:
                raise ValueError("cannot score an empty sentence")
            return 1.0 / self._uniform_p  # exact: every position scores the same
        ll, t = self.loglikelihood(sentence)
        return math.exp(-ll / t)


def train_lm(monolingual: Sequence[Sequence[str]], order: int = 3,
             discount: float = 0.75) -> NGramLanguageModel:
    return NGramLanguageModel(order=order, discount=discount).fit(monolingual)


@dataclass(frozen=True)
class ScoredPair:
    pair: SyntheticPair
    ppl: float

    def __post_init__(self):
        if not (self.ppl > 0.0 and math.isfinite(self.ppl)):
            raise ValueError(f"perplexity must be positive and finite: {self.ppl}")


def score_pair(
    pair: SyntheticPair,
    lm: NGramLanguageModel,
    side: str = "target",
    src_lm: Optional[NGramLanguageModel] = None,
) -> float:
    """Perplexity of one synthetic pair on the chosen side.

    `both` combines the sides as the length-weighted geometric mean of the
    per-sentence perplexities, i.e. a single perplexity over all positions.
    """
    src_tokens = [t.surface for t in pair.source]
    tgt_tokens = [t.surface for t in pair.target]
    if side == "target":
        return lm.perplexity(tgt_tokens)
    if side == "source":
        return (src_lm or lm).perplexity(src_tokens)
    if side == "both":
        ll_s, t_s = (src_lm or lm).loglikelihood(src_tokens)
        ll_t, t_t = lm.loglikelihood(tgt_tokens)
        return math.exp(-(ll_s + ll_t) / (t_s + t_t))
    raise ValueError(f"unknown scoring side: {side!r}")


def score_pool(
    pool: Sequence[SyntheticPair],
    lm: NGramLanguageModel,
    side: str = "target",
    src_lm: Optional[NGramLanguageModel] = None,
) -> list[ScoredPair]:
    return [ScoredPair(p, score_pair(p, lm, side, src_lm)) for p in pool]


def filter_rank(
    pool: Sequence[SyntheticPair],
    lm: NGramLanguageModel,
    k: int,
    mode: str = "filtered",
    rng: Optional[random.Random] = None,
    side: str = "target",
    src_lm: Optional[NGramLanguageModel] = None,
) -> list[SyntheticPair]:
    """The k lowest-perplexity pairs (ties by pool order), or k random ones."""
    if k > len(pool):
        raise ConfigurationError(
            f"cannot select k={k} pairs from a pool of {len(pool)}"
        )
    if mode == "random":
        if rng is None:
            raise ConfigurationError("random selection mode requires an rng")
        return rng.sample(list(pool), k)
    if mode != "filtered":
        raise ConfigurationError(f"unknown selection mode: {mode!r}")
    scored = score_pool(pool, lm, side, src_lm)
    order = sorted(range(len(scored)), key=lambda i: (scored[i].ppl, i))
    return [scored[i].pair for i in order[:k]]


def dump_scored(scored: Sequence[ScoredPair], path) -> None:
    """Pool TSV with a trailing perplexity column."""
    with open(path, "w", encoding="utf-8") as fh:
        for sp in scored:
            p = sp.pair
            desc = ";".join(
                f"{r.src_index}:{r.old_lemma}>{r.new_lemma}" for r in p.replacements
            )
            fh.write(
                f"{p.seed_id}\t{p.strategy}\t{p.source_text}\t{p.target_text}"
                f"\t{desc}\t{sp.ppl!r}\n"
            )


def dump_arpa(lm: NGramLanguageModel, path) -> None:
    """Serialize a trained model in ARPA-style text form.

    Stored probabilities are the interpolated values; back-off weights are
    the per-context escape mass, which reproduces the model's scores
    exactly on reload.
    """
    if getattr(lm, "_uniform_p", None) is not None:
        raise ConfigurationError("uniform models are not serialized to ARPA")
    grams: dict[int, list[tuple[tuple[str, ...], float, Optional[float]]]] = {
        n: [] for n in range(1, lm.order + 1)
    }

    def bow(ctx: tuple[str, ...]) -> Optional[float]:
        total = lm._totals.get(ctx)
        if not total:
            return None
        return lm.discount * lm._distinct[ctx] / total

    unigrams = sorted(lm.vocab_ | {UNK})
    if lm.order > 1:
        unigrams = [BOS] + unigrams
    for w in unigrams:
        logp = -99.0 if w == BOS else math.log10(lm._prob(w, ()))
        w_bow = bow((w,)) if lm.order > 1 else None
        grams[1].append(((w,), logp, math.log10(w_bow) if w_bow else None))
    for n in range(2, lm.order + 1):
        rows = []
        listed = set()
        for ctx, bucket in lm._counts.items():
            if len(ctx) != n - 1:
                continue
            for w in bucket:
                ngram = ctx + (w,)
                listed.add(ngram)
                g_bow = bow(ngram) if n < lm.order else None
                rows.append(
                    (ngram, math.log10(lm._prob(w, ctx)),
                     math.log10(g_bow) if g_bow else None)
                )
        if n < lm.order:
            # Contexts never counted as events (those starting with begin
            # symbols) still need their back-off weight on file.
            for ctx in lm._totals:
                if len(ctx) == n and ctx not in listed:
                    c_bow = bow(ctx)
                    if c_bow:
                        rows.append((ctx, -99.0, math.log10(c_bow)))
        grams[n] = sorted(rows)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\\data\\\n")
        for n in range(1, lm.order + 1):
            fh.write(f"ngram {n}={len(grams[n])}\n")
        for n in range(1, lm.order + 1):
            fh.write(f"\n\\{n}-grams:\n")
            for ngram, logp, logbow in grams[n]:
                line = f"{logp!r}\t{' '.join(ngram)}"
                if logbow is not None:
                    line += f"\t{logbow!r}"
                fh.write(line + "\n")
        fh.write("\n\\end\\\n")


class ArpaModel:
    """Back-off scorer over a loaded ARPA file; mirrors NGramLanguageModel's
    scoring interface."""

    def __init__(self, order: int, probs: dict[tuple[str, ...], float],
                 bows: dict[tuple[str, ...], float]):
        self.order = order
        self._probs = probs
        self._bows = bows
        self.vocab_ = frozenset(
            g[0] for g in probs if len(g) == 1 and g[0] not in (BOS,)
        )

    def prob(self, word: str, context: Sequence[str] = ()) -> float:
        ctx = tuple(context)[-(self.order - 1) :] if self.order > 1 else ()
        return self._prob(word, ctx)

    def _prob(self, word: str, ctx: tuple[str, ...]) -> float:
        if not ctx:
            key = (word,) if (word,) in self._probs else (UNK,)
            return 10.0 ** self._probs[key]
        ngram = ctx + (word,)
        if ngram in self._probs:
            return 10.0 ** self._probs[ngram]
        backoff = 10.0 ** self._bows[ctx] if ctx in self._bows else 1.0
        return backoff * self._prob(word, ctx[1:])

    def loglikelihood(self, sentence: Sequence[str]) -> tuple[float, int]:
        if len(sentence) == 0:
            raise ValueError("cannot score an empty sentence")
        if self.order == 1:
            events = [((), w) for w in sentence]
        else:
            padded = [BOS] * (self.order - 1) + list(sentence) + [EOS]
            events = [
                (tuple(padded[i - self.order + 1 : i]), padded[i])
                for i in range(self.order - 1, len(padded))
            ]
        ll = sum(math.log(self._prob(w, ctx)) for ctx, w in events)
        return ll, len(events)

    def perplexity(self, sentence: Sequence[str]) -> float:
        ll, t = self.loglikelihood(sentence)
        return math.exp(-ll / t)


def load_arpa(path) -> ArpaModel:
    probs: dict[tuple[str, ...], float] = {}
    bows: dict[tuple[str, ...], float] = {}
    order = 0
    current = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line in ("\\data\\", "\\end\\"):
                continue
            if line.startswith("ngram "):
                order = max(order, int(line.split("=")[0].split()[1]))
                continue
            if line.endswith("-grams:"):
                current = int(line[1:].split("-")[0])
                continue
            cols = line.split("\t")
            ngram = tuple(cols[1].split(" "))
            assert len(ngram) == current
            probs[ngram] = float(cols[0])
            if len(cols) > 2:
                bows[ngram] = float(cols[2])
    return ArpaModel(order, probs, bows)
