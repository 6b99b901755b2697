"""Shared value types for the generation/run/report pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .canvas import GlyphPlacement

TOXIC = "toxic"
NON_TOXIC = "non_toxic"
LABELS = (TOXIC, NON_TOXIC)


@dataclass(frozen=True)
class PerturbationSpec:
    """One perturbation with fully resolved parameters and its RNG seed."""

    mr_id: str
    params: dict = field(default_factory=dict)
    rng_seed: int = 0

    def to_json(self) -> dict:
        return {"mr_id": self.mr_id, "params": dict(self.params), "rng_seed": self.rng_seed}

    @staticmethod
    def from_json(obj: dict) -> "PerturbationSpec":
        return PerturbationSpec(mr_id=obj["mr_id"], params=dict(obj.get("params", {})),
                                rng_seed=int(obj.get("rng_seed", 0)))


@dataclass
class TestCase:
    """A rendered artifact plus everything needed to judge the verdict."""

    case_id: str
    seed_id: str
    mr_chain: tuple[PerturbationSpec, ...]
    artifact: bytes
    artifact_format: str  # "png" | "gif"
    ground_truth: str
    language: str = "english"
    category: str = "abuse"
    aux: dict[str, Any] = field(default_factory=dict)
    ledger: tuple[GlyphPlacement, ...] = ()


@dataclass
class Verdict:
    case_id: str
    label: str  # "toxic" | "non_toxic"
    target: str = ""
    raw: Any = None
    latency_ms: float = 0.0

    def to_json(self) -> dict:
        return {"case_id": self.case_id, "label": self.label, "target": self.target,
                "raw": self.raw, "latency_ms": self.latency_ms}

    @staticmethod
    def from_json(obj: dict) -> "Verdict":
        return Verdict(case_id=obj["case_id"], label=obj["label"],
                       target=obj.get("target", ""), raw=obj.get("raw"),
                       latency_ms=float(obj.get("latency_ms", 0.0)))


@dataclass(frozen=True)
class EfrRow:
    mr_id: str
    target: str
    generated_count: int      # cases with a usable verdict
    misclassified_count: int  # non_toxic verdicts (error findings)
    transport_failures: int
    efr_percent: float        # misclassified / generated * 100, 1 decimal


@dataclass
class EfrReport:
    rows: list[EfrRow]
    metadata: dict[str, Any] = field(default_factory=dict)
