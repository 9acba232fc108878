"""Acceptance suite: one test per shipping criterion.

Each test prints a single PASS/FAIL line on the real terminal so the
acceptance status is readable straight from the pytest run.
"""

import math
import random
import time
from contextlib import contextmanager
from dataclasses import replace

import pytest

from morphaug.aligner import IbmModel1Aligner, train, viterbi_align
from morphaug.assemble import GenerationDriver, TierSpec, build_tiers
from morphaug.augment import (
    AugmentationConfig,
    augment_informed,
    augment_naive,
    generate_pool,
    select_replaceable,
)
from morphaug.config import RunConfig
from morphaug.lm import NGramLanguageModel, filter_rank, score_pair, score_pool, train_lm
from morphaug.metrics import corpus_bleu
from morphaug.morphology import analyze
from morphaug.pipeline import run_build

from conftest import build_toy_world, make_corpus, make_synthetic
from oracles import brute_force_bleu, brute_force_ibm1


@pytest.fixture
def report(capsys):
    @contextmanager
    def _report(num, description):
        try:
            yield
        except BaseException:
            with capsys.disabled():
                print(f"criterion {num:2d} [FAIL] {description}")
            raise
        with capsys.disabled():
            print(f"criterion {num:2d} [PASS] {description}")

    return _report


def random_corpus(rng, max_pairs=3, max_vocab=4, max_len=4):
    src_vocab = [f"s{i}" for i in range(rng.randint(1, max_vocab))]
    tgt_vocab = [f"t{i}" for i in range(rng.randint(1, max_vocab))]
    sents = []
    for _ in range(rng.randint(1, max_pairs)):
        src = [rng.choice(src_vocab) for _ in range(rng.randint(1, max_len))]
        tgt = [rng.choice(tgt_vocab) for _ in range(rng.randint(1, max_len))]
        sents.append((src, tgt))
    return sents


def test_01_single_pair_replacement_fixture(fig1_world, report):
    with report(1, "single-pair fixture emits the exact expected strings in < 1 s"):
        pair, lexicon, src_par, tgt_par = fig1_world
        cfg = AugmentationConfig()
        start = time.perf_counter()
        slots = select_replaceable(pair, src_par, tgt_par, cfg)
        informed = augment_informed(pair, slots, lexicon, src_par, tgt_par,
                                    random.Random(0), cfg)
        naive = augment_naive(pair, slots, lexicon, random.Random(0), cfg)
        elapsed = time.perf_counter() - start
        assert informed.source_text == "He plays the flower very well"
        assert informed.target_text == "Ew gulê pir baş lê dide"
        assert naive.source_text == "He plays the flower very well"
        assert naive.target_text == "Ew gul pir baş lê dide"
        assert elapsed < 1.0


def test_02_em_matches_brute_force_oracle(report):
    with report(2, "EM equals the brute-force oracle to 1e-9 per cell; "
                   "log-likelihood never decreases"):
        rng = random.Random(20)
        for _ in range(60):
            sents = random_corpus(rng)
            use_null = rng.random() < 0.5
            corpus = make_corpus(sents)
            table = train(corpus, iterations=20, tension=0.0, use_null=use_null)
            oracle, _ = brute_force_ibm1(sents, iterations=20, use_null=use_null)
            for (s, w), expected in oracle.items():
                assert abs(table.prob(s, w) - expected) < 1e-9

        rng = random.Random(21)
        for _ in range(200):
            sents = random_corpus(rng, max_pairs=4, max_vocab=6, max_len=5)
            aligner = IbmModel1Aligner(
                iterations=6,
                tension=rng.choice([0.0, 2.0]),
                use_null=rng.random() < 0.5,
            ).fit(make_corpus(sents))
            history = aligner.loglik_history_
            assert all(b >= a - 1e-9 for a, b in zip(history, history[1:]))


def test_03_perplexity_matches_closed_form(report):
    with report(3, "perplexity matches hand-computed tables to 1e-9; "
                   "uniform model ppl equals the vocabulary size exactly"):
        # order 1, no discounting: "a b a b" gives p = 1/2 everywhere
        lm = NGramLanguageModel(order=1, discount=0.0).fit([["a", "b", "a", "b"]])
        assert lm.perplexity(["a", "b"]) == pytest.approx(2.0, rel=1e-9)

        # order 1 with discounting: "a a a b", D = 0.75, unknown floor 1/3
        lm = NGramLanguageModel(order=1, discount=0.75).fit([["a", "a", "a", "b"]])
        p_a = (3 - 0.75) / 4 + (0.75 * 2 / 4) * (1 / 3)
        p_b = (1 - 0.75) / 4 + (0.75 * 2 / 4) * (1 / 3)
        expected = math.exp(-(math.log(p_a) + math.log(p_b)) / 2)
        assert lm.perplexity(["a", "b"]) == pytest.approx(expected, rel=1e-9)

        # order 2: "a b" x 3. Every scored event has count 3 in a count-3
        # context, so ppl is the reciprocal of that one probability.
        lm = train_lm([["a", "b"]] * 3, order=2, discount=0.75)
        p1 = (3 - 0.75) / 9 + 0.75 * (3 / 9) * (1 / 4)
        p_event = (3 - 0.75) / 3 + (0.75 * 1 / 3) * p1
        assert lm.perplexity(["a", "b"]) == pytest.approx(1 / p_event, rel=1e-9)

        for size in (1, 7, 10):
            uniform = NGramLanguageModel.uniform([f"w{i}" for i in range(size)])
            assert uniform.perplexity(["w0"]) == pytest.approx(float(size), abs=0.0)


def test_04_selection_optimality_and_tier_nesting(tmp_path, report):
    with report(4, "selected ppl never exceeds rejected ppl over 100 random pools; "
                   "tiers at sizes [50, 100, 500] are exact and nested"):
        lm = train_lm([["a", "b", "c", "d"], ["b", "c", "d", "a"]], order=2)
        vocab = ["a", "b", "c", "d", "x", "y", "z"]
        for trial in range(100):
            rng = random.Random(trial)
            pool = [
                make_synthetic(
                    [rng.choice(vocab) for _ in range(rng.randint(1, 8))],
                    seed_id=str(i),
                )
                for i in range(rng.randint(2, 30))
            ]
            k = rng.randint(1, len(pool) - 1)
            chosen = filter_rank(pool, lm, k)
            chosen_ids = {id(p) for p in chosen}
            rejected = [p for p in pool if id(p) not in chosen_ids]
            assert max(score_pair(p, lm) for p in chosen) <= min(
                score_pair(p, lm) for p in rejected
            )

        corpus, lexicon, src_par, tgt_par = build_toy_world(
            tmp_path, n_seeds=5, n_lexicon=60
        )
        cfg = AugmentationConfig(rng_seed=4)
        driver = GenerationDriver(corpus, lexicon, src_par, tgt_par, cfg)
        seed_lm = train_lm(
            [[t.surface for t in p.target] for p in corpus.pairs], order=3
        )
        tiers = build_tiers(corpus, driver, seed_lm, TierSpec(sizes=(50, 100, 500)))
        assert [len(tiers[s]) for s in (50, 100, 500)] == [50, 100, 500]
        assert tiers[100][:50] == tiers[50]
        assert tiers[500][:100] == tiers[100]


def test_05_filtered_beats_random_selection(tmp_path, report):
    with report(5, "filtered selection mean ppl <= 20 equal-size random selections "
                   "from a 5,000-candidate pool"):
        corpus, lexicon, src_par, tgt_par = build_toy_world(
            tmp_path, n_seeds=5, n_lexicon=60
        )
        cfg = AugmentationConfig(per_seed=1200, rng_seed=5)
        pool = generate_pool(corpus, lexicon, src_par, tgt_par, cfg)
        assert len(pool) >= 5000
        lm = train_lm(
            [[t.surface for t in p.target] for p in corpus.pairs], order=3
        )
        k = 500
        scored = {id(p): score_pair(p, lm) for p in pool}
        filtered_mean = sum(scored[id(p)] for p in filter_rank(pool, lm, k)) / k
        for trial in range(20):
            sample = random.Random(trial).sample(pool, k)
            random_mean = sum(scored[id(p)] for p in sample) / k
            assert filtered_mean <= random_mean


def test_06_small_seed_yields_large_unique_pool(tmp_path, report):
    with report(6, "5 seeds and a 300-entry lexicon yield >= 5,000 unique pairs "
                   "and >= 150 new target-side types"):
        corpus, lexicon, src_par, tgt_par = build_toy_world(
            tmp_path, n_seeds=5, n_lexicon=300
        )
        cfg = AugmentationConfig(per_seed=1200, rng_seed=6)
        pool = generate_pool(corpus, lexicon, src_par, tgt_par, cfg)
        keys = {p.key for p in pool}
        assert len(keys) == len(pool)
        assert len(pool) >= 5000
        # independent type counter over the emitted text
        seed_types = set(" ".join(p.target_text for p in corpus.pairs).split())
        pool_types = set(" ".join(p.target_text for p in pool).split())
        assert len(pool_types - seed_types) >= 150


def test_07_build_is_deterministic(tmp_path, report):
    with report(7, "two builds with the same config and seed are byte-identical"):
        corpus, _, _, _ = build_toy_world(tmp_path, n_seeds=5, n_lexicon=40)
        (tmp_path / "seed.src").write_text(
            "\n".join(p.source_text for p in corpus.pairs) + "\n"
        )
        (tmp_path / "seed.tgt").write_text(
            "\n".join(p.target_text for p in corpus.pairs) + "\n"
        )
        base = RunConfig(
            seed_src=str(tmp_path / "seed.src"),
            seed_tgt=str(tmp_path / "seed.tgt"),
            lexicon=str(tmp_path / "lexicon.tsv"),
            src_paradigms=str(tmp_path / "src.paradigms.tsv"),
            tgt_paradigms=str(tmp_path / "tgt.paradigms.tsv"),
            tier_sizes=(10, 20),
            # seeds share no vocabulary, so only the diagonal prior can
            # break per-sentence alignment ties
            align_tension=4.0,
            rng_seed=17,
        )
        snapshots = []
        for run in ("a", "b"):
            out = tmp_path / run
            run_build(replace(base, out_dir=str(out)))
            snapshots.append(
                {p.relative_to(out): p.read_bytes()
                 for p in sorted(out.rglob("*")) if p.is_file()}
            )
        assert snapshots[0].keys() == snapshots[1].keys()
        assert snapshots[0] == snapshots[1]


def test_08_constraint_conformance_at_scale(tmp_path, report):
    with report(8, "10,000 generated pairs: 1-2 replacements each, eligible POS only, "
                   "7+ token seeds, feature bundles preserved under re-analysis"):
        corpus, lexicon, src_par, tgt_par = build_toy_world(
            tmp_path, n_seeds=5, n_lexicon=300
        )
        cfg = AugmentationConfig(per_seed=2200, rng_seed=8)
        pool = generate_pool(corpus, lexicon, src_par, tgt_par, cfg)
        assert len(pool) >= 10000
        pool = pool[:10000]
        by_id = {p.id: p for p in corpus.pairs}
        eligible = {"N", "ADJ", "V"}
        for sp in pool:
            seed = by_id[sp.seed_id]
            assert len(seed.source) >= 7
            indices = {r.src_index for r in sp.replacements}
            assert 1 <= len(indices) <= 2
            assert len(indices) == len(sp.replacements)
            for r in sp.replacements:
                old_analyses = analyze(seed.source[r.src_index].surface, src_par)
                assert all(a.bundle.pos in eligible for a in old_analyses)
                (old,) = old_analyses
                new_analyses = analyze(sp.source[r.src_index].surface, src_par)
                assert any(a.bundle == old.bundle for a in new_analyses)


def test_09_bleu_oracle(report):
    with report(9, "BLEU: identity 100.0, disjoint 0.0, hand case within 1e-6 "
                   "of the brute-force oracle"):
        sents = [["the", "cat", "sat", "down"], ["it", "rains", "a", "lot", "here"]]
        assert corpus_bleu(sents, sents).score == 100.0
        assert corpus_bleu([["aa", "bb", "cc", "dd"]],
                           [["ww", "xx", "yy", "zz"]]).score == 0.0
        hyps = [
            ["the", "cat", "sat", "on", "the", "mat"],
            ["he", "plays", "guitar", "very", "well", "today"],
        ]
        refs = [
            ["the", "cat", "was", "on", "the", "mat"],
            ["he", "plays", "the", "guitar", "very", "well"],
        ]
        assert corpus_bleu(hyps, refs).score == pytest.approx(
            brute_force_bleu(hyps, refs), abs=1e-6
        )


def test_10_throughput_soft(tmp_path, report):
    with report(10, "soft throughput: 10K-pair alignment < 30 s, "
                    "200K-candidate generate+score < 120 s"):
        rng = random.Random(10)
        vocab = [f"w{i}" for i in range(2000)]
        sents = []
        for _ in range(10000):
            src = [rng.choice(vocab) for _ in range(15)]
            tgt = [rng.choice(vocab) for _ in range(15)]
            sents.append((src, tgt))
        corpus = make_corpus(sents)
        start = time.perf_counter()
        table = train(corpus, iterations=5)
        for pair in corpus.pairs:
            viterbi_align(pair, table)
        align_time = time.perf_counter() - start
        assert align_time < 30.0

        seed, lexicon, src_par, tgt_par = build_toy_world(
            tmp_path, n_seeds=20, n_lexicon=300
        )
        cfg = AugmentationConfig(per_seed=10200, rng_seed=10)
        lm = train_lm(
            [[t.surface for t in p.target] for p in seed.pairs], order=3
        )
        start = time.perf_counter()
        pool = generate_pool(seed, lexicon, src_par, tgt_par, cfg)
        score_pool(pool, lm)
        generate_time = time.perf_counter() - start
        assert len(pool) >= 200000
        assert generate_time < 120.0
