"""Context-free morphological analysis backed by paradigm tables.

Paradigm files are UniMorph-style TSV: lemma<TAB>form<TAB>features, where
features is a semicolon-joined list whose first element is the POS tag
(e.g. `N;ACC;SG`). Lookups use case-folded keys; returned lemmas and forms
keep their original case. Multi-word forms are skipped: replacement
operates on single tokens.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError

ELIGIBLE_POS = frozenset({"N", "ADJ", "V"})

_CASE_TAGS = frozenset({
    "NOM", "ACC", "DAT", "GEN", "ERG", "ABS", "INS", "LOC", "ABL",
    "VOC", "ALL", "ESS", "COM", "PRT", "TERM", "TRANS", "OBL",
})
_NUMBER_TAGS = frozenset({"SG", "PL", "DU"})
_TENSE_TAGS = frozenset({"PST", "PRS", "FUT", "NPST", "NFUT"})

# Feature subsets used by the inflection fallback when no paradigm row
# carries the exact bundle.
CORE_FEATURES = {
    "N": _CASE_TAGS | _NUMBER_TAGS,
    "ADJ": _CASE_TAGS | _NUMBER_TAGS,
    "V": _TENSE_TAGS,
}


@dataclass(frozen=True)
class FeatureBundle:
    pos: str
    features: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.pos:
            raise ValueError("FeatureBundle requires a POS tag")

    @classmethod
    def parse(cls, text: str) -> "FeatureBundle":
        parts = [p for p in text.strip().split(";") if p]
        if not parts:
            raise ValueError(f"cannot parse feature bundle from {text!r}")
        return cls(parts[0].upper(), frozenset(p.upper() for p in parts[1:]))

    def serialize(self) -> str:
        return ";".join([self.pos] + sorted(self.features))

    def core(self) -> frozenset[str]:
        return self.features & CORE_FEATURES.get(self.pos, frozenset())


@dataclass(frozen=True)
class Analysis:
    lemma: str
    bundle: FeatureBundle

    def __post_init__(self):
        if not self.lemma:
            raise ValueError("Analysis requires a non-empty lemma")


@dataclass
class ParadigmLexicon:
    language: str = ""
    skipped: int = 0
    _by_form: dict[str, frozenset[Analysis]] = field(default_factory=dict)
    _by_key: dict[tuple[str, FeatureBundle], tuple[str, ...]] = field(default_factory=dict)
    _by_lemma: dict[str, tuple[tuple[FeatureBundle, str], ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_form.values())

    def has_lemma(self, lemma: str) -> bool:
        return lemma.casefold() in self._by_lemma

    def entries(self):
        """All (lemma, form, bundle) rows, for consistency checks."""
        for key, forms in self._by_key.items():
            for form in forms:
                for analysis in self._by_form.get(form.casefold(), frozenset()):
                    if analysis.lemma.casefold() == key[0] and analysis.bundle == key[1]:
                        yield analysis.lemma, form, analysis.bundle


def load_paradigms(path, language: str = "") -> ParadigmLexicon:
    """Load a UniMorph TSV into bidirectional form/lemma mappings."""
    by_form: dict[str, set[Analysis]] = {}
    by_key: dict[tuple[str, FeatureBundle], set[str]] = {}
    by_lemma: dict[str, list[tuple[FeatureBundle, str]]] = {}
    skipped = 0
    valid = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = unicodedata.normalize("NFC", line.rstrip("\n"))
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not all(c.strip() for c in cols):
                skipped += 1
                continue
            lemma, form, feats = (c.strip() for c in cols)
            if " " in lemma or " " in form:
                skipped += 1
                continue
            try:
                bundle = FeatureBundle.parse(feats)
            except ValueError:
                skipped += 1
                continue
            valid += 1
            by_form.setdefault(form.casefold(), set()).add(Analysis(lemma, bundle))
            by_key.setdefault((lemma.casefold(), bundle), set()).add(form)
            by_lemma.setdefault(lemma.casefold(), []).append((bundle, form))
    if valid == 0:
        raise ConfigurationError(f"{path}: no valid paradigm rows")
    lex = ParadigmLexicon(language=language, skipped=skipped)
    lex._by_form = {k: frozenset(v) for k, v in by_form.items()}
    lex._by_key = {k: tuple(sorted(v)) for k, v in by_key.items()}
    lex._by_lemma = {k: tuple(v) for k, v in by_lemma.items()}
    return lex


def analyze(form: str, lex: ParadigmLexicon) -> frozenset[Analysis]:
    """All analyses of a surface form; empty if the form is unknown."""
    return lex._by_form.get(form.casefold(), frozenset())


def lemmatize(form: str, bundle: FeatureBundle, lex: ParadigmLexicon) -> str | None:
    """Lemma of the analysis matching the bundle most specifically."""
    matches = [a for a in analyze(form, lex) if a.bundle.pos == bundle.pos]
    if not matches:
        return None
    # Exact bundle match first, then largest feature overlap, then the
    # lexicographically smallest lemma for determinism.
    best = min(
        matches,
        key=lambda a: (
            a.bundle != bundle,
            -len(a.bundle.features & bundle.features),
            a.lemma,
        ),
    )
    return best.lemma


def inflect(lemma: str, bundle: FeatureBundle, lex: ParadigmLexicon) -> str | None:
    """Surface form of `lemma` under `bundle`; smallest form when ambiguous.

    Falls back to POS plus core features (case/number for nominals, tense
    for verbs) when no row carries the exact bundle.
    """
    forms = lex._by_key.get((lemma.casefold(), bundle))
    if forms:
        return forms[0]
    core = bundle.core()
    if not CORE_FEATURES.get(bundle.pos):
        return None
    fallback = sorted(
        form
        for row_bundle, form in lex._by_lemma.get(lemma.casefold(), ())
        if row_bundle.pos == bundle.pos and row_bundle.core() == core
    )
    return fallback[0] if fallback else None
