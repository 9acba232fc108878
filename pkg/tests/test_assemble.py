import random

import pytest

from morphaug.assemble import GenerationDriver, TierSpec, build_tiers, emit_all, emit_dataset, stats
from morphaug.augment import AugmentationConfig
from morphaug.errors import CapacityError, ConfigurationError
from morphaug.lm import train_lm

from conftest import build_toy_world


def make_driver(tmp_path, rng_seed=0, strategy="informed", **world_kwargs):
    tmp_path.mkdir(parents=True, exist_ok=True)
    corpus, lexicon, src_par, tgt_par = build_toy_world(tmp_path, **world_kwargs)
    cfg = AugmentationConfig(strategy=strategy, rng_seed=rng_seed)
    driver = GenerationDriver(corpus, lexicon, src_par, tgt_par, cfg)
    lm = train_lm(
        [[t.surface for t in p.target] for p in corpus.pairs], order=2
    )
    return corpus, driver, lm


class TestTierSpec:
    def test_defaults(self):
        spec = TierSpec()
        assert spec.sizes == (5000, 10000, 50000, 100000, 200000)
        assert spec.clean_tag == "<clean>"
        assert spec.noisy_tag == "<noisy>"

    def test_sizes_must_increase(self):
        with pytest.raises(ConfigurationError):
            TierSpec(sizes=(10, 10))
        with pytest.raises(ConfigurationError):
            TierSpec(sizes=())

    def test_tags_validated(self):
        with pytest.raises(ConfigurationError):
            TierSpec(sizes=(5,), clean_tag="has space")


class TestBuildTiers:
    def test_nesting_and_exact_sizes(self, tmp_path):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=4, n_lexicon=30)
        spec = TierSpec(sizes=(5, 10))
        tiers = build_tiers(corpus, driver, lm, spec)
        assert len(tiers[5]) == 5
        assert len(tiers[10]) == 10
        assert tiers[10][:5] == tiers[5]

    def test_capacity_error_reports_achieved(self, tmp_path):
        # one seed, one slot, two candidates: only 2 unique pairs exist
        corpus, driver, lm = make_driver(
            tmp_path, n_seeds=1, n_lexicon=2, nouns_per_seed=1
        )
        with pytest.raises(CapacityError) as exc:
            build_tiers(corpus, driver, lm, TierSpec(sizes=(3,)))
        assert exc.value.requested == 3
        assert exc.value.achieved == 2

    def test_tiers_duplicate_free(self, tmp_path):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=5, n_lexicon=40)
        tiers = build_tiers(corpus, driver, lm, TierSpec(sizes=(8, 16, 30)))
        for tier in tiers.values():
            keys = [p.key for p in tier]
            assert len(keys) == len(set(keys))

    def test_nesting_over_seeded_runs(self, tmp_path):
        for seed in range(10):
            corpus, driver, lm = make_driver(
                tmp_path / str(seed), rng_seed=seed, n_seeds=3, n_lexicon=25
            )
            tiers = build_tiers(corpus, driver, lm, TierSpec(sizes=(4, 9, 15)))
            assert tiers[9][:4] == tiers[4]
            assert tiers[15][:9] == tiers[9]
            assert [len(tiers[s]) for s in (4, 9, 15)] == [4, 9, 15]

    def test_global_pool_mode_prefixes(self, tmp_path):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=4, n_lexicon=30)
        tiers = build_tiers(
            corpus, driver, lm, TierSpec(sizes=(5, 12)), global_pool=True
        )
        assert tiers[12][:5] == tiers[5]
        assert len(tiers[12]) == 12

    def test_random_mode(self, tmp_path):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=4, n_lexicon=30)
        tiers = build_tiers(
            corpus, driver, lm, TierSpec(sizes=(5, 10)),
            mode="random", rng=random.Random(1),
        )
        assert len(tiers[10]) == 10
        assert tiers[10][:5] == tiers[5]


class TestEmit:
    def _tiers(self, tmp_path, sizes=(3, 6)):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=3, n_lexicon=20)
        spec = TierSpec(sizes=sizes)
        return corpus, build_tiers(corpus, driver, lm, spec), spec

    def test_tagged_counts_and_prefixes(self, tmp_path):
        corpus, tiers, spec = self._tiers(tmp_path)
        records = emit_dataset(corpus, tiers[3], spec, tmp_path / "out", "tagged")
        src_lines = (tmp_path / "out" / "train.src").read_text().splitlines()
        assert len(src_lines) == len(corpus) + 3
        assert sum(l.startswith("<clean> ") for l in src_lines) == len(corpus)
        assert sum(l.startswith("<noisy> ") for l in src_lines) == 3
        for path, count, _ in records:
            assert count == len(corpus) + 3

    def test_untagged_is_seed_only_unprefixed(self, tmp_path):
        corpus, tiers, spec = self._tiers(tmp_path)
        emit_dataset(corpus, tiers[3], spec, tmp_path / "a", "untagged")
        emit_dataset(corpus, [], spec, tmp_path / "b", "untagged")
        assert (tmp_path / "a" / "train.src").read_bytes() == (
            tmp_path / "b" / "train.src"
        ).read_bytes()
        lines = (tmp_path / "a" / "train.tgt").read_text().splitlines()
        assert lines == [p.target_text for p in corpus.pairs]

    def test_strip_first_token_round_trip(self, tmp_path):
        corpus, tiers, spec = self._tiers(tmp_path)
        emit_dataset(corpus, tiers[6], spec, tmp_path / "out", "tagged")
        for name, texts in (
            ("train.src", [p.source_text for p in corpus.pairs]
             + [s.source_text for s in tiers[6]]),
            ("train.tgt", [p.target_text for p in corpus.pairs]
             + [s.target_text for s in tiers[6]]),
        ):
            lines = (tmp_path / "out" / name).read_text().splitlines()
            assert [l.split(" ", 1)[1] for l in lines] == texts

    def test_manifest_counts_match_recount(self, tmp_path):
        corpus, tiers, spec = self._tiers(tmp_path)
        manifest = emit_all(corpus, tiers, spec, tmp_path / "out", rng_seed=5)
        lines = manifest.read_text().splitlines()
        assert lines[0] == "# rng_seed=5"
        for line in lines[1:]:
            rel, count, digest = line.split("\t")
            data = (tmp_path / "out" / rel).read_bytes()
            assert data.count(b"\n") == int(count)
            import hashlib

            assert hashlib.sha256(data).hexdigest() == digest

    def test_manifest_stable_across_runs(self, tmp_path):
        results = []
        for run in ("r1", "r2"):
            corpus, driver, lm = make_driver(tmp_path / run, rng_seed=3,
                                             n_seeds=3, n_lexicon=20)
            spec = TierSpec(sizes=(3, 6))
            tiers = build_tiers(corpus, driver, lm, spec)
            manifest = emit_all(corpus, tiers, spec, tmp_path / run / "out")
            results.append(manifest.read_bytes())
        assert results[0] == results[1]

    def test_bad_tagging_mode(self, tmp_path):
        corpus, tiers, spec = self._tiers(tmp_path)
        with pytest.raises(ConfigurationError):
            emit_dataset(corpus, [], spec, tmp_path / "out", "plain")


class TestStats:
    def test_empty_tier_zero_counts(self, tmp_path):
        corpus, _, lm = make_driver(tmp_path, n_seeds=2)
        report = stats(corpus, [], lm)
        assert report["size"] == 0
        assert report["unique_seeds"] == 0
        assert report["new_src_types"] == 0
        assert report["mean_ppl"] == 0.0

    def test_new_types_match_hand_count(self, tmp_path):
        corpus, driver, lm = make_driver(tmp_path, n_seeds=2, n_lexicon=10)
        tiers = build_tiers(corpus, driver, lm, TierSpec(sizes=(3,)))
        tier = tiers[3]
        seed_tgt = {t.surface for p in corpus.pairs for t in p.target}
        expected_new = {
            t.surface for sp in tier for t in sp.target
        } - seed_tgt
        report = stats(corpus, tier, lm)
        assert report["new_tgt_types"] == len(expected_new)
        assert report["size"] == 3
        assert report["mean_ppl"] > 0

    def test_seed_type_counts_match_independent_counter(self, tmp_path):
        corpus, _, lm = make_driver(tmp_path, n_seeds=3)
        report = stats(corpus, [], lm)
        # independent counter: whitespace-split set over emitted text
        src_types = set(" ".join(p.source_text for p in corpus.pairs).split())
        tgt_types = set(" ".join(p.target_text for p in corpus.pairs).split())
        assert report["seed_src_types"] == len(src_types)
        assert report["seed_tgt_types"] == len(tgt_types)
