"""Run configuration: a flat JSON key-value document plus environment and
flag overrides.

Every key can be overridden by an environment variable named
`MORPHAUG_<KEY>` (upper-cased). Validation reports every problem in one
pass rather than stopping at the first.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigurationError

ENV_PREFIX = "MORPHAUG_"

_PATH_KEYS = ("seed_src", "seed_tgt", "lexicon", "src_paradigms", "tgt_paradigms")


@dataclass
class RunConfig:
    # input paths
    seed_src: str = ""
    seed_tgt: str = ""
    lexicon: str = ""
    src_paradigms: str = ""
    tgt_paradigms: str = ""
    monolingual: str = ""          # optional; default is the seed target side
    alignments: str = ""           # optional precomputed Pharaoh file
    out_dir: str = "out"
    # corpus
    min_seed_len: int = 7
    # aligner
    align_iterations: int = 5
    align_tension: float = 0.0
    align_use_null: bool = True
    symmetrization: str = "grow-diag"
    # augmentation
    strategy: str = "informed"
    per_seed: int = 1
    max_replacements: int = 2
    eligible_pos: tuple[str, ...] = ("N", "ADJ", "V")
    restriction: str = "all"
    inflect_source: bool = True
    inflect_target: bool = True
    # language model
    lm_order: int = 3
    lm_discount: float = 0.75
    score_side: str = "target"
    # selection and tiers
    selection_mode: str = "filtered"
    tier_sizes: tuple[int, ...] = (5000, 10000, 50000, 100000, 200000)
    clean_tag: str = "<clean>"
    noisy_tag: str = "<noisy>"
    global_pool: bool = False
    # run
    rng_seed: int = 0
    workers: int = 1

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path}: config must be a flat JSON object")
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(raw) - set(known))
        if unknown:
            raise ConfigurationError(f"{path}: unknown config keys: {', '.join(unknown)}")
        cfg = cls(**{k: _coerce(known[k], v) for k, v in raw.items()})
        return cfg.with_env_overrides()

    def with_env_overrides(self) -> "RunConfig":
        overrides = {}
        for f in fields(self):
            env_val = os.environ.get(ENV_PREFIX + f.name.upper())
            if env_val is not None:
                overrides[f.name] = _coerce(f, env_val)
        return replace(self, **overrides) if overrides else self

    def validate(self) -> list[str]:
        """All configuration problems, as human-readable strings."""
        errors = []
        for key in _PATH_KEYS:
            value = getattr(self, key)
            if not value:
                errors.append(f"{key}: required path is missing")
            elif not Path(value).is_file():
                errors.append(f"{key}: file not found: {value}")
        for key in ("monolingual", "alignments"):
            value = getattr(self, key)
            if value and not Path(value).is_file():
                errors.append(f"{key}: file not found: {value}")
        if self.min_seed_len < 1:
            errors.append("min_seed_len: must be >= 1")
        if self.align_iterations < 1:
            errors.append("align_iterations: must be >= 1")
        if self.align_tension < 0:
            errors.append("align_tension: must be >= 0")
        if self.symmetrization not in ("intersection", "union", "grow-diag"):
            errors.append(f"symmetrization: unknown mode {self.symmetrization!r}")
        if self.strategy not in ("informed", "naive"):
            errors.append(f"strategy: unknown strategy {self.strategy!r}")
        if self.per_seed < 1:
            errors.append("per_seed: must be >= 1")
        if self.max_replacements < 1:
            errors.append("max_replacements: must be >= 1")
        if self.restriction not in ("all", "first-half", "consume-once"):
            errors.append(f"restriction: unknown mode {self.restriction!r}")
        if self.lm_order < 1:
            errors.append("lm_order: must be >= 1")
        if not (0.0 <= self.lm_discount < 1.0):
            errors.append("lm_discount: must be in [0, 1)")
        if self.score_side not in ("source", "target", "both"):
            errors.append(f"score_side: unknown side {self.score_side!r}")
        if self.selection_mode not in ("filtered", "random"):
            errors.append(f"selection_mode: unknown mode {self.selection_mode!r}")
        if not self.tier_sizes or any(
            b <= a for a, b in zip(self.tier_sizes, self.tier_sizes[1:])
        ):
            errors.append("tier_sizes: must be a strictly increasing sequence")
        if self.workers < 1:
            errors.append("workers: must be >= 1")
        return errors

    def require_valid(self) -> "RunConfig":
        errors = self.validate()
        if errors:
            raise ConfigurationError("; ".join(errors))
        return self


def _coerce(f, value):
    """Coerce JSON/env string values to the field's declared type."""
    if f.type in ("tuple[int, ...]",):
        if isinstance(value, str):
            value = [v for v in value.split(",") if v]
        return tuple(int(v) for v in value)
    if f.type in ("tuple[str, ...]",):
        if isinstance(value, str):
            value = [v for v in value.split(",") if v]
        return tuple(str(v) for v in value)
    if f.type == "bool":
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)
    if f.type == "int":
        return int(value)
    if f.type == "float":
        return float(value)
    return str(value)
