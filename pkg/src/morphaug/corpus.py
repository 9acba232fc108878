"""Parallel corpus loading, tokenization, and seed-eligibility filtering.

Sentences are tokenized by whitespace splitting followed by detaching
leading/trailing Unicode punctuation into separate tokens. Text already
split into space-separated tokens passes through unchanged. All text is
NFC-normalized on load; surface case is preserved.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from .errors import EncodingError, StructuralError


@dataclass(frozen=True)
class Token:
    surface: str
    index: int

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class AlignmentLink:
    src_index: int
    tgt_index: int


@dataclass(frozen=True)
class SentencePair:
    source: tuple[Token, ...]
    target: tuple[Token, ...]
    id: str
    links: Optional[frozenset[AlignmentLink]] = None

    def __post_init__(self):
        if not self.source or not self.target:
            raise ValueError(f"pair {self.id}: both sides must be non-empty")
        if self.links is not None:
            for link in self.links:
                if not (0 <= link.src_index < len(self.source)):
                    raise ValueError(f"pair {self.id}: link {link} out of source bounds")
                if not (0 <= link.tgt_index < len(self.target)):
                    raise ValueError(f"pair {self.id}: link {link} out of target bounds")

    @property
    def source_text(self) -> str:
        return " ".join(t.surface for t in self.source)

    @property
    def target_text(self) -> str:
        return " ".join(t.surface for t in self.target)

    def with_links(self, links: Iterable[AlignmentLink]) -> "SentencePair":
        return replace(self, links=frozenset(links))


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[SentencePair, ...]
    source_lang: str = ""
    target_lang: str = ""

    def __post_init__(self):
        ids = [p.id for p in self.pairs]
        if len(ids) != len(set(ids)):
            raise ValueError("pair ids must be unique within a corpus")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(line: str) -> tuple[Token, ...]:
    """Split on whitespace, then peel edge punctuation into its own tokens."""
    line = unicodedata.normalize("NFC", line)
    surfaces: list[str] = []
    for chunk in line.split():
        leading: list[str] = []
        trailing: list[str] = []
        while chunk and _is_punct(chunk[0]) and len(chunk) > 1:
            leading.append(chunk[0])
            chunk = chunk[1:]
        while chunk and _is_punct(chunk[-1]) and len(chunk) > 1:
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        surfaces.extend(leading)
        surfaces.append(chunk)
        surfaces.extend(reversed(trailing))
    return tuple(Token(s, i) for i, s in enumerate(surfaces))


def _read_lines(path: Path) -> list[str]:
    raw = path.read_bytes()
    if raw.endswith(b"\n"):
        raw = raw[:-1]
    if not raw:
        return []
    lines = []
    for i, chunk in enumerate(raw.split(b"\n")):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{path}: line {i + 1} is not valid UTF-8") from exc
    return lines


def load_parallel(
    source_path, target_path, source_lang: str = "", target_lang: str = ""
) -> ParallelCorpus:
    """Load two line-aligned text files into a corpus, one pair per line."""
    src_lines = _read_lines(Path(source_path))
    tgt_lines = _read_lines(Path(target_path))
    if len(src_lines) != len(tgt_lines):
        raise StructuralError(
            f"line count mismatch: {source_path} has {len(src_lines)} lines, "
            f"{target_path} has {len(tgt_lines)}"
        )
    pairs = []
    for i, (src, tgt) in enumerate(zip(src_lines, tgt_lines)):
        src_tokens = tokenize(src)
        tgt_tokens = tokenize(tgt)
        if not src_tokens or not tgt_tokens:
            raise StructuralError(f"empty sentence at line {i + 1}")
        pairs.append(SentencePair(src_tokens, tgt_tokens, id=str(i)))
    return ParallelCorpus(tuple(pairs), source_lang, target_lang)


def load_parallel_tsv(path, source_lang: str = "", target_lang: str = "") -> ParallelCorpus:
    """Load the single-file form: one `source<TAB>target` pair per line."""
    pairs = []
    for i, line in enumerate(_read_lines(Path(path))):
        cols = line.split("\t")
        if len(cols) != 2:
            raise StructuralError(f"{path}: line {i + 1} has {len(cols)} columns, expected 2")
        src_tokens = tokenize(cols[0])
        tgt_tokens = tokenize(cols[1])
        if not src_tokens or not tgt_tokens:
            raise StructuralError(f"empty sentence at line {i + 1}")
        pairs.append(SentencePair(src_tokens, tgt_tokens, id=str(i)))
    return ParallelCorpus(tuple(pairs), source_lang, target_lang)


def filter_seed_eligible(corpus: ParallelCorpus, min_len: int = 7) -> ParallelCorpus:
    """Keep pairs whose source side has at least `min_len` tokens."""
    if min_len < 1:
        raise ValueError(f"min_len must be >= 1, got {min_len}")
    kept = tuple(p for p in corpus.pairs if len(p.source) >= min_len)
    return ParallelCorpus(kept, corpus.source_lang, corpus.target_lang)
