"""Design dimensions, pipeline configurations and their integer encodings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractError
from .seeds import rng_for

SCHEMA_VERSION = 1

# Dimension order is a versioned constant: encodings, meta-predictor inputs and
# serialized spaces all depend on it.
DIMENSIONS: dict[str, tuple] = {
    "augmentation": ("origin", "oversampling", "smote", "mixup"),
    "preprocessing": ("minmax", "normalization"),
    "architecture": ("mlp", "autoencoder", "resnet", "fttransformer"),
    "hidden_layers": ((20,), (100, 20), (100, 50, 20)),
    "activation": ("tanh", "relu", "leakyrelu"),
    "dropout": (0.0, 0.1, 0.3),
    "initialization": ("default", "xavier_normal", "kaiming_normal", "pretrained"),
    "loss": ("bce", "focal", "minus", "inverse", "hinge", "deviation"),
    "optimizer": ("sgd", "adam", "rmsprop"),
    "epochs": (20, 50, 100),
    "batch_size": (16, 64, 256),
    "learning_rate": (1e-2, 1e-3),
    "weight_decay": (1e-2, 1e-4),
}

DIMENSION_ORDER = tuple(DIMENSIONS)

# high-impact dimensions sampled in "small" mode; the rest stay at defaults
SMALL_MODE_DIMENSIONS = (
    "augmentation",
    "architecture",
    "activation",
    "loss",
    "optimizer",
    "learning_rate",
)

SMALL_MODE_DEFAULTS = {
    "preprocessing": "minmax",
    "hidden_layers": (100, 20),
    "dropout": 0.1,
    "initialization": "default",
    "epochs": 50,
    "batch_size": 64,
    "weight_decay": 1e-4,
}


@dataclass(frozen=True)
class PipelineConfig:
    augmentation: str
    preprocessing: str
    architecture: str
    hidden_layers: tuple
    activation: str
    dropout: float
    initialization: str
    loss: str
    optimizer: str
    epochs: int
    batch_size: int
    learning_rate: float
    weight_decay: float

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(self.hidden_layers))
        for dim in DIMENSION_ORDER:
            if getattr(self, dim) not in DIMENSIONS[dim]:
                raise ConfigurationError(
                    f"{dim}={getattr(self, dim)!r} is not a declared choice"
                )

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["hidden_layers"] = list(d["hidden_layers"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        kwargs = dict(d)
        kwargs["hidden_layers"] = tuple(kwargs["hidden_layers"])
        return cls(**kwargs)


def encode_pipeline(cfg: PipelineConfig) -> np.ndarray:
    """Label-encode each dimension in the fixed order (first declared choice -> 0)."""
    return np.array(
        [DIMENSIONS[dim].index(getattr(cfg, dim)) for dim in DIMENSION_ORDER],
        dtype=np.int64,
    )


def decode_pipeline(codes) -> PipelineConfig:
    codes = list(codes)
    if len(codes) != len(DIMENSION_ORDER):
        raise ContractError(f"encoding must have {len(DIMENSION_ORDER)} entries")
    return PipelineConfig(
        **{dim: DIMENSIONS[dim][int(c)] for dim, c in zip(DIMENSION_ORDER, codes)}
    )


def space_cardinality(mode: str, choices: dict[str, tuple] | None = None) -> int:
    choices = choices or _mode_choices(mode)
    return math.prod(len(v) for v in choices.values())


def _mode_choices(mode: str) -> dict[str, tuple]:
    if mode == "large":
        return dict(DIMENSIONS)
    if mode == "small":
        out = {}
        for dim in DIMENSION_ORDER:
            if dim in SMALL_MODE_DIMENSIONS:
                out[dim] = DIMENSIONS[dim]
            else:
                out[dim] = (SMALL_MODE_DEFAULTS[dim],)
        return out
    raise ConfigurationError(f"unknown space mode {mode!r}")


@dataclass
class DesignSpace:
    mode: str
    configs: list[PipelineConfig]
    seed: int
    schema_version: int = SCHEMA_VERSION

    @property
    def m_pipelines(self) -> int:
        return len(self.configs)

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": self.schema_version,
                "mode": self.mode,
                "seed": self.seed,
                "m_pipelines": self.m_pipelines,
                "configs": [c.to_dict() for c in self.configs],
            },
            indent=None,
        )

    @classmethod
    def from_json(cls, text: str) -> "DesignSpace":
        d = json.loads(text)
        if d["schema_version"] != SCHEMA_VERSION:
            raise ContractError(
                f"design-space schema {d['schema_version']} != supported {SCHEMA_VERSION}"
            )
        return cls(
            mode=d["mode"],
            configs=[PipelineConfig.from_dict(c) for c in d["configs"]],
            seed=d["seed"],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "DesignSpace":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def sample_space(
    mode: str, m_pipelines: int, seed: int, choices: dict[str, tuple] | None = None
) -> DesignSpace:
    """Draw m distinct configs uniformly without replacement from the mode's product."""
    choices = choices or _mode_choices(mode)
    cardinality = space_cardinality(mode, choices)
    if m_pipelines > cardinality:
        raise ConfigurationError(
            f"requested {m_pipelines} pipelines but the {mode} space holds {cardinality}"
        )
    rng = rng_for(seed, "design_space", mode)
    sizes = [len(choices[dim]) for dim in DIMENSION_ORDER]
    code_list: list[tuple[int, ...]] = []
    if cardinality <= 100_000:
        # enumerate and permute so dense requests terminate
        all_codes = np.stack(
            np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij"), axis=-1
        ).reshape(-1, len(sizes))
        order = rng.permutation(cardinality)[:m_pipelines]
        code_list = [tuple(int(c) for c in all_codes[i]) for i in order]
    else:
        seen: set[tuple] = set()
        while len(code_list) < m_pipelines:
            codes = tuple(int(rng.integers(0, s)) for s in sizes)
            if codes in seen:
                continue
            seen.add(codes)
            code_list.append(codes)
    configs = [
        PipelineConfig(**{dim: choices[dim][c] for dim, c in zip(DIMENSION_ORDER, codes)})
        for codes in code_list
    ]
    return DesignSpace(mode=mode, configs=configs, seed=seed)
