"""Bilingual lexicon loading and candidate selection.

Dictionary rows are TSV: src_lemma<TAB>tgt_lemma<TAB>POS, with an optional
fourth column of semicolon-joined source features. Only the first
translation of each source lemma is kept; later rows for the same lemma
are discarded, so load order is file order and the loader never re-sorts.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigurationError
from .morphology import Analysis, FeatureBundle, ParadigmLexicon, analyze, inflect


@dataclass(frozen=True)
class LexEntry:
    src_lemma: str
    tgt_lemma: str
    pos: str
    src_bundle: Optional[FeatureBundle] = None

    def __post_init__(self):
        if not self.src_lemma or not self.tgt_lemma:
            raise ValueError("lexicon entry lemmas must be non-empty")


@dataclass
class VocabularyRestriction:
    """Candidate-pool restriction applied during generation.

    Modes: `all` (no restriction), `first-half` (keep the first half of the
    sorted candidates), `consume-once` (each entry may be drawn at most once
    per run; state is owned by a single generation driver).
    """

    mode: str = "all"
    used: set[str] = field(default_factory=set)

    def __post_init__(self):
        if self.mode not in ("all", "first-half", "consume-once"):
            raise ValueError(f"unknown restriction mode: {self.mode!r}")

    def apply(self, entries: list[LexEntry]) -> list[LexEntry]:
        if self.mode == "first-half":
            return entries[: (len(entries) + 1) // 2]
        if self.mode == "consume-once":
            return [e for e in entries if e.src_lemma.casefold() not in self.used]
        return entries

    def consume(self, entry: LexEntry) -> None:
        if self.mode == "consume-once":
            self.used.add(entry.src_lemma.casefold())

    def reset(self) -> None:
        self.used.clear()


@dataclass
class BilingualLexicon:
    src_lang: str = ""
    tgt_lang: str = ""
    src_paradigms: Optional[ParadigmLexicon] = None
    _entries: dict[str, LexEntry] = field(default_factory=dict)
    _cand_cache: dict[tuple[FeatureBundle, str], list[LexEntry]] = field(
        default_factory=dict, repr=False
    )

    @property
    def size(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def get(self, src_lemma: str) -> Optional[LexEntry]:
        return self._entries.get(src_lemma.casefold())


def _pos_compatible(lemma: str, pos: str, paradigms: Optional[ParadigmLexicon]) -> bool:
    """A side mismatches only if it has analyses and none carries the POS."""
    if paradigms is None:
        return True
    analyses = analyze(lemma, paradigms)
    if not analyses:
        return True
    return any(a.bundle.pos == pos for a in analyses)


def load_lexicon(
    path,
    src_paradigms: Optional[ParadigmLexicon] = None,
    tgt_paradigms: Optional[ParadigmLexicon] = None,
    src_lang: str = "",
    tgt_lang: str = "",
) -> BilingualLexicon:
    """Load and normalize a dictionary into a one-to-one lemma mapping."""
    entries: dict[str, LexEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = unicodedata.normalize("NFC", line.rstrip("\n"))
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 3 or not all(c.strip() for c in cols[:3]):
                continue
            src_lemma, tgt_lemma, pos = (c.strip() for c in cols[:3])
            pos = pos.split(";")[0].upper()
            key = src_lemma.casefold()
            if key in entries:
                continue  # first translation wins
            if not _pos_compatible(src_lemma, pos, src_paradigms):
                continue
            if not _pos_compatible(tgt_lemma, pos, tgt_paradigms):
                continue
            bundle = None
            if len(cols) >= 4 and cols[3].strip():
                bundle = FeatureBundle(pos, frozenset(cols[3].strip().upper().split(";")))
            elif src_paradigms is not None:
                matching = [
                    a for a in analyze(src_lemma, src_paradigms) if a.bundle.pos == pos
                ]
                if len(matching) == 1:
                    bundle = matching[0].bundle
            entries[key] = LexEntry(src_lemma, tgt_lemma, pos, bundle)
    if not entries:
        raise ConfigurationError(f"{path}: no lexicon entries survived normalization")
    lex = BilingualLexicon(src_lang, tgt_lang, src_paradigms)
    lex._entries = entries
    return lex


def candidates(
    lex: BilingualLexicon,
    bundle: FeatureBundle,
    restriction: Optional[VocabularyRestriction] = None,
    match: str = "exact",
) -> list[LexEntry]:
    """Deterministically ordered entries usable as replacements for `bundle`.

    `match="exact"` requires the source lemma to realize the full bundle
    (used by informed augmentation); `match="pos"` requires only the POS tag
    (naive augmentation, where paradigm-less entries also participate).
    """
    if match not in ("exact", "pos"):
        raise ValueError(f"unknown match policy: {match!r}")
    cache_key = (bundle, match)
    out = lex._cand_cache.get(cache_key)
    if out is None:
        out = []
        for entry in sorted(lex, key=lambda e: e.src_lemma):
            if entry.pos != bundle.pos:
                continue
            if match == "exact":
                if entry.src_bundle == bundle:
                    pass
                elif (
                    lex.src_paradigms is not None
                    and inflect(entry.src_lemma, bundle, lex.src_paradigms) is not None
                ):
                    pass
                else:
                    continue
            out.append(entry)
        lex._cand_cache[cache_key] = out
    if restriction is not None:
        out = restriction.apply(out)
    return out
