"""Run configuration shared by every CLI subcommand."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

DEFAULT_FILTER_TERMS = (
    "crude oil", "oil price", "opec", "petroleum", "wti", "brent",
)


@dataclass
class RunConfig:
    """Paths plus every tunable the pipeline reads.

    Loaded from a JSON object whose keys mirror the field names; unknown
    keys are rejected so typos fail loudly.
    """

    prices_path: str
    news_path: str = ""
    embeddings_path: str = ""
    conllu_dir: str = ""
    manifest_path: str = ""
    lexicon_path: str = ""  # empty string selects the bundled lexicon
    out_dir: str = "runs"
    filter_terms: tuple = DEFAULT_FILTER_TERMS
    seed: int = 0

    train_frac: float = 0.8
    val_frac_of_train: float = 0.1

    arima_max_p: int = 3
    arima_max_q: int = 3
    refit_every: int = 20
    garch_max_order: int = 2

    num_slots: int = 10
    odee_epochs: int = 30
    odee_hidden: int = 32

    lstm_hidden: int = 64
    lstm_window: int = 10
    fusion_hidden: int = 8
    train_epochs: int = 200
    early_stop_patience: int = 25
    learning_rate: float = 0.005
    adam_beta1: float = 0.8
    adam_beta2: float = 0.999
    max_news_per_day: int = 5

    def __post_init__(self):
        if not self.prices_path:
            raise ValueError("prices_path is required")
        if not 0.0 < self.train_frac < 1.0:
            raise ValueError("train_frac must lie in (0, 1)")
        if not 0.0 < self.val_frac_of_train < 1.0:
            raise ValueError("val_frac_of_train must lie in (0, 1)")
        if self.lstm_window < 1:
            raise ValueError("lstm_window must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        self.filter_terms = tuple(self.filter_terms)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as handle:
            obj = json.load(handle)
        if not isinstance(obj, dict):
            raise ValueError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(obj) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**obj)

    def to_file(self, path) -> None:
        payload = dataclasses.asdict(self)
        payload["filter_terms"] = list(self.filter_terms)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
