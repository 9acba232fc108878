"""Corpus-level BLEU over pre-tokenized sentences."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import StructuralError


@dataclass(frozen=True)
class BleuResult:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float

    def __str__(self) -> str:
        ps = "/".join(f"{p * 100:.1f}" for p in self.precisions)
        return f"BLEU = {self.score:.2f} {ps} (BP = {self.brevity_penalty:.3f})"


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    hypotheses: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    max_n: int = 4,
    smooth: bool = False,
) -> BleuResult:
    """Standard 4-gram corpus BLEU with clipping and brevity penalty.

    `smooth` adds one to numerator and denominator of the precisions for
    n >= 2 (off by default, giving strict BLEU).
    """
    if len(hypotheses) != len(references):
        raise StructuralError(
            f"hypothesis count {len(hypotheses)} != reference count {len(references)}"
        )
    if not hypotheses:
        raise StructuralError("need at least one hypothesis/reference pair")

    matched = [0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp = list(hyp)
        ref = list(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            totals[n - 1] += sum(hyp_counts.values())
            matched[n - 1] += sum(
                min(c, ref_counts.get(g, 0)) for g, c in hyp_counts.items()
            )

    precisions = []
    for n in range(1, max_n + 1):
        num, den = matched[n - 1], totals[n - 1]
        if smooth and n >= 2:
            num, den = num + 1, den + 1
        precisions.append(num / den if den > 0 else 0.0)

    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n) * 100.0
    return BleuResult(score, tuple(precisions), bp)
