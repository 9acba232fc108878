from __future__ import annotations

from pathlib import Path

import pytest

from morphaug.aligner import read_pharaoh
from morphaug.augment import SyntheticPair, Replacement
from morphaug.corpus import (
    ParallelCorpus,
    SentencePair,
    Token,
    load_parallel,
)
from morphaug.corpus import AlignmentLink
from morphaug.lexicon import load_lexicon
from morphaug.morphology import load_paradigms

DATA = Path(__file__).parent / "data"
FIG1 = DATA / "fig1"


@pytest.fixture(scope="session")
def fig1_paths():
    return {
        "seed_src": FIG1 / "seed.src",
        "seed_tgt": FIG1 / "seed.tgt",
        "align": FIG1 / "seed.align",
        "lexicon": FIG1 / "lexicon.tsv",
        "src_paradigms": FIG1 / "eng.paradigms.tsv",
        "tgt_paradigms": FIG1 / "kmr.paradigms.tsv",
        "config": FIG1 / "config.json",
    }


@pytest.fixture(scope="session")
def fig1_world(fig1_paths):
    """Fig-1 seed pair with gold links plus its lexicon and paradigms."""
    corpus = load_parallel(fig1_paths["seed_src"], fig1_paths["seed_tgt"])
    links = read_pharaoh(fig1_paths["align"])
    pair = corpus.pairs[0].with_links(links[0])
    src_par = load_paradigms(fig1_paths["src_paradigms"], "eng")
    tgt_par = load_paradigms(fig1_paths["tgt_paradigms"], "kmr")
    lexicon = load_lexicon(fig1_paths["lexicon"], src_par, tgt_par)
    return pair, lexicon, src_par, tgt_par


def make_pair(src_words, tgt_words, links=None, pair_id="0"):
    pair = SentencePair(
        tuple(Token(w, i) for i, w in enumerate(src_words)),
        tuple(Token(w, i) for i, w in enumerate(tgt_words)),
        id=pair_id,
    )
    if links is not None:
        pair = pair.with_links(AlignmentLink(i, j) for i, j in links)
    return pair


def make_corpus(sentences):
    return ParallelCorpus(
        tuple(
            make_pair(src, tgt, links, pair_id=str(n))
            for n, (src, tgt, links) in enumerate(
                (s if len(s) == 3 else (*s, None)) for s in sentences
            )
        )
    )


def make_synthetic(tgt_words, src_words=None, seed_id="0", strategy="naive"):
    """Minimal synthetic pair for selection/scoring tests."""
    src_words = src_words or ["src"] + list(tgt_words)
    return SyntheticPair(
        tuple(Token(w, i) for i, w in enumerate(src_words)),
        tuple(Token(w, i) for i, w in enumerate(tgt_words)),
        seed_id,
        (Replacement(0, "old", "new"),),
        strategy,
    )


def build_toy_world(tmp_path, n_seeds=5, n_lexicon=300, nouns_per_seed=4,
                    filler_len=3):
    """Synthetic single-feature world: identity paradigms, parallel nouns.

    Seed sentence i uses its own block of out-of-lexicon nouns so every
    noun position is a valid 1-to-1 replacement slot. Returns the corpus
    (with gold links), lexicon, and both paradigm tables.
    """
    n_extra = n_seeds * nouns_per_seed
    src_par_path = tmp_path / "src.paradigms.tsv"
    tgt_par_path = tmp_path / "tgt.paradigms.tsv"
    lex_path = tmp_path / "lexicon.tsv"
    with open(src_par_path, "w", encoding="utf-8") as fh:
        for k in range(n_lexicon + n_extra):
            fh.write(f"srcnoun{k}\tsrcnoun{k}\tN;NOM;SG\n")
    with open(tgt_par_path, "w", encoding="utf-8") as fh:
        for k in range(n_lexicon + n_extra):
            fh.write(f"tgtnoun{k}\ttgtnoun{k}\tN;NOM;SG\n")
    with open(lex_path, "w", encoding="utf-8") as fh:
        for k in range(n_lexicon):
            fh.write(f"srcnoun{k}\ttgtnoun{k}\tN\n")
    src_par = load_paradigms(src_par_path, "src")
    tgt_par = load_paradigms(tgt_par_path, "tgt")
    lexicon = load_lexicon(lex_path, src_par, tgt_par)

    pairs = []
    for i in range(n_seeds):
        block = [n_lexicon + i * nouns_per_seed + k for k in range(nouns_per_seed)]
        src_words, tgt_words = [], []
        for pos, k in enumerate(block):
            src_words.append(f"filler{i}x{pos}")
            tgt_words.append(f"tfiller{i}x{pos}")
            src_words.append(f"srcnoun{k}")
            tgt_words.append(f"tgtnoun{k}")
        while len(src_words) < max(7, filler_len + 2 * nouns_per_seed):
            src_words.append(f"pad{i}x{len(src_words)}")
            tgt_words.append(f"tpad{i}x{len(tgt_words)}")
        links = [(p, p) for p in range(len(src_words))]
        pairs.append((src_words, tgt_words, links))
    corpus = make_corpus(pairs)
    return corpus, lexicon, src_par, tgt_par
