"""Suite orchestration: generate cases, run them against a moderation target,
compute Error Finding Rates, and export the retraining dataset."""

from __future__ import annotations

import json
import logging
import os
import shutil
import threading
import time
import zlib
from dataclasses import dataclass, replace
from concurrent.futures import ThreadPoolExecutor

from .corpus import SeedCorpus
from .errors import (AuthError, CaseTransportError, ConfigError, ModtestError,
                     TransportError)
from .models import NON_TOXIC, PerturbationSpec, Verdict
from .mrs.pipeline import MR_REGISTRY, apply_chain, validate_chain
from .rng import mix_seed

log = logging.getLogger(__name__)

Chain = tuple[PerturbationSpec, ...]


def chain_slug(chain: Chain) -> str:
    return "+".join(s.mr_id for s in chain)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    return value


def _normalize_chains(specs) -> list[Chain]:
    chains = []
    for item in specs:
        chain = (item,) if isinstance(item, PerturbationSpec) else tuple(item)
        validate_chain(list(chain))
        chains.append(chain)
    return chains


def generate_suite(corpus: SeedCorpus, specs, out_dir: str, *,
                   rng_seed: int = 0, font=None, benign_words=None,
                   toxic_lexicon=None) -> list[dict]:
    """Render |corpus| x |specs| test cases into `out_dir`.

    `specs` is a list of PerturbationSpec or chains thereof. Per-case errors
    do not abort the run; they become manifest entries with a
    ``skipped_reason``. Returns the manifest entries (also written to
    ``out_dir/manifest.jsonl``).
    """
    if len(corpus) == 0:
        raise ConfigError("cannot generate from an empty corpus")
    chains = _normalize_chains(specs)
    if not chains:
        raise ConfigError("no perturbations requested")
    images_dir = os.path.join(out_dir, "images")
    os.makedirs(images_dir, exist_ok=True)

    entries: list[dict] = []
    for seed in corpus:
        seed_salt = zlib.crc32(seed.seed_id.encode("utf-8"))
        for ci, chain in enumerate(chains):
            resolved = tuple(
                replace(s, rng_seed=mix_seed(rng_seed, s.rng_seed, seed_salt, ci, si))
                for si, s in enumerate(chain))
            case_id = f"{seed.seed_id}--{ci:03d}-{chain_slug(chain)}"
            entry = {
                "case_id": case_id,
                "seed_id": seed.seed_id,
                "text": seed.text,
                "lang": seed.language,
                "category": seed.category,
                "mr_chain": [s.to_json() for s in resolved],
                "rng_seed": rng_seed,
            }
            try:
                artifact, fmt, aux, _ledger = apply_chain(
                    seed, list(resolved), font=font, benign_words=benign_words,
                    toxic_lexicon=toxic_lexicon)
            except ModtestError as exc:
                entry["skipped_reason"] = f"{type(exc).__name__}: {exc}"
                entries.append(entry)
                log.warning("case %s skipped: %s", case_id, exc)
                continue
            filename = f"{case_id}.{fmt}"
            with open(os.path.join(images_dir, filename), "wb") as fh:
                fh.write(artifact)
            entry["artifact_path"] = os.path.join("images", filename)
            entry["artifact_format"] = fmt
            entry["aux"] = _jsonable(aux)
            entries.append(entry)

    with open(os.path.join(out_dir, "manifest.jsonl"), "w", encoding="utf-8") as fh:
        for entry in entries:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
    return entries


def load_manifest(path: str) -> list[dict]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                entries.append(json.loads(line))
    return entries


def manifest_mr_id(entry: dict) -> str:
    return "+".join(s["mr_id"] for s in entry["mr_chain"])


@dataclass
class RetryPolicy:
    max_attempts: int = 3
    backoff_s: float = 0.25


class _RateLimiter:
    """Token-bucket pacing: at most `qps` acquisitions per second."""

    def __init__(self, qps: float | None):
        self._interval = 1.0 / qps if qps else 0.0
        self._lock = threading.Lock()
        self._next = 0.0

    def acquire(self) -> None:
        if self._interval == 0.0:
            return
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next)
            self._next = slot + self._interval
        delay = slot - now
        if delay > 0:
            time.sleep(delay)


def run_suite(manifest: list[dict], client, *, base_dir: str = ".",
              qps: float | None = None, concurrency: int = 4,
              policy: RetryPolicy | None = None,
              ) -> tuple[list[Verdict], list[dict]]:
    """Submit every non-skipped case to a moderation client.

    Returns (verdicts sorted by case_id, transport failures). Retryable
    transport errors are retried per `policy`; exhausted retries are recorded
    as failures without aborting the run. AuthError aborts immediately.
    """
    policy = policy or RetryPolicy()
    limiter = _RateLimiter(qps)
    cases = [e for e in manifest if "skipped_reason" not in e]
    verdicts: list[Verdict] = []
    failures: list[dict] = []
    lock = threading.Lock()
    abort: list[Exception] = []

    def submit(entry: dict) -> None:
        if abort:
            return
        path = os.path.join(base_dir, entry["artifact_path"])
        with open(path, "rb") as fh:
            artifact = fh.read()
        last: Exception | None = None
        for attempt in range(policy.max_attempts):
            limiter.acquire()
            start = time.monotonic()
            try:
                label, raw = client.moderate(artifact, entry["artifact_format"],
                                             ground_truth=entry["text"])
            except AuthError as exc:
                with lock:
                    abort.append(exc)
                return
            except TransportError as exc:
                last = exc
                if not exc.retryable or attempt == policy.max_attempts - 1:
                    break
                time.sleep(policy.backoff_s * (2 ** attempt))
                continue
            latency = (time.monotonic() - start) * 1000.0
            verdict = Verdict(case_id=entry["case_id"], label=label,
                              target=getattr(client, "name", type(client).__name__),
                              raw=raw, latency_ms=round(latency, 3))
            with lock:
                verdicts.append(verdict)
            return
        err = CaseTransportError(f"case {entry['case_id']}: {last}", retryable=False)
        with lock:
            failures.append({"case_id": entry["case_id"], "error": str(err)})

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        list(pool.map(submit, cases))
    if abort:
        raise abort[0]
    verdicts.sort(key=lambda v: v.case_id)
    failures.sort(key=lambda f: f["case_id"])
    return verdicts, failures


def write_verdicts(path: str, verdicts: list[Verdict], failures: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"verdicts": [v.to_json() for v in verdicts],
                   "failures": failures}, fh, ensure_ascii=False, indent=2)


def load_verdicts(path: str) -> tuple[list[Verdict], list[dict]]:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return [Verdict.from_json(v) for v in obj["verdicts"]], obj.get("failures", [])


def export_retraining_set(manifest: list[dict], verdicts: list[Verdict],
                          out_dir: str, *, base_dir: str = ".") -> int:
    """Write every misclassified case as an (image, text, label=toxic) record."""
    by_case = {e["case_id"]: e for e in manifest}
    os.makedirs(os.path.join(out_dir, "artifacts"), exist_ok=True)
    count = 0
    with open(os.path.join(out_dir, "index.jsonl"), "w", encoding="utf-8") as fh:
        for v in sorted(verdicts, key=lambda v: v.case_id):
            if v.label != NON_TOXIC:
                continue
            entry = by_case.get(v.case_id)
            if entry is None or "artifact_path" not in entry:
                continue
            name = os.path.basename(entry["artifact_path"])
            shutil.copyfile(os.path.join(base_dir, entry["artifact_path"]),
                            os.path.join(out_dir, "artifacts", name))
            fh.write(json.dumps({
                "case_id": v.case_id,
                "image": os.path.join("artifacts", name),
                "text": entry["text"],
                "label": "toxic",
            }, ensure_ascii=False) + "\n")
            count += 1
    return count
