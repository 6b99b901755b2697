"""Error Finding Rate aggregation and report rendering (JSON, markdown,
figures)."""

from __future__ import annotations

import datetime
import json
import logging
from decimal import ROUND_HALF_UP, Decimal

from .harness import manifest_mr_id
from .models import NON_TOXIC, EfrReport, EfrRow, Verdict
from .mrs.pipeline import CHAR, MR_REGISTRY, PARAGRAPH, PICTURE

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1

_LEVEL_TITLES = {CHAR: "Character Level", PARAGRAPH: "Paragraph Level",
                 PICTURE: "Picture Level", "multi": "Multi Level"}
_LEVEL_ORDER = [CHAR, PARAGRAPH, PICTURE, "multi"]


def mr_display_level(mr_id: str) -> str:
    if "+" in mr_id:
        return "multi"
    return MR_REGISTRY[mr_id].level if mr_id in MR_REGISTRY else "multi"


def efr_percent(misclassified: int, generated: int) -> float:
    value = (Decimal(misclassified) * 100 / Decimal(generated)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP)
    return float(value)


def compute_efr(verdicts: list[Verdict], manifest: list[dict],
                failures: list[dict] | None = None,
                metadata: dict | None = None) -> EfrReport:
    """EFR per (mr_id, target): misclassified / judged * 100.

    Transport failures are excluded from both numerator and denominator and
    reported in their own column; groups with zero judged cases are omitted
    with a warning.
    """
    failures = failures or []
    mr_by_case = {e["case_id"]: manifest_mr_id(e) for e in manifest}
    judged: dict[tuple[str, str], int] = {}
    missed: dict[tuple[str, str], int] = {}
    targets: set[str] = set()
    for v in verdicts:
        if v.case_id not in mr_by_case:
            continue
        key = (mr_by_case[v.case_id], v.target)
        targets.add(v.target)
        judged[key] = judged.get(key, 0) + 1
        if v.label == NON_TOXIC:
            missed[key] = missed.get(key, 0) + 1

    failed: dict[tuple[str, str], int] = {}
    for f in failures:
        if f["case_id"] not in mr_by_case:
            continue
        mr = mr_by_case[f["case_id"]]
        for target in targets or {""}:
            failed[(mr, target)] = failed.get((mr, target), 0) + 1

    # groups that only ever failed still deserve the warning
    requested = {(mr_by_case[e["case_id"]], t)
                 for e in manifest if "skipped_reason" not in e
                 for t in (targets or {""})}
    rows = []
    for key in sorted(requested):
        n = judged.get(key, 0)
        if n == 0:
            log.warning("group %s/%s has no judged cases; omitted from EFR", *key)
            continue
        m = missed.get(key, 0)
        rows.append(EfrRow(mr_id=key[0], target=key[1], generated_count=n,
                           misclassified_count=m,
                           transport_failures=failed.get(key, 0),
                           efr_percent=efr_percent(m, n)))
    meta = {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "targets": sorted(targets)}
    meta.update(metadata or {})
    return EfrReport(rows=rows, metadata=meta)


def report_to_json(report: EfrReport) -> bytes:
    obj = {
        "schema_version": SCHEMA_VERSION,
        "metadata": report.metadata,
        "rows": [{"mr_id": r.mr_id, "target": r.target,
                  "generated_count": r.generated_count,
                  "misclassified_count": r.misclassified_count,
                  "transport_failures": r.transport_failures,
                  "efr_percent": r.efr_percent} for r in report.rows],
    }
    return (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def report_from_json(data: bytes) -> EfrReport:
    obj = json.loads(data.decode("utf-8"))
    rows = [EfrRow(**r) for r in obj["rows"]]
    return EfrReport(rows=rows, metadata=obj.get("metadata", {}))


def report_to_markdown(report: EfrReport) -> bytes:
    """MR rows x target columns, grouped by perturbation level."""
    targets = sorted({r.target for r in report.rows})
    by_key = {(r.mr_id, r.target): r for r in report.rows}
    mr_ids = sorted({r.mr_id for r in report.rows})
    lines = ["# Error Finding Rate report", ""]
    header = "| MR | " + " | ".join(t or "(target)" for t in targets) + " |"
    rule = "|" + "---|" * (len(targets) + 1)
    for level in _LEVEL_ORDER:
        group = [m for m in mr_ids if mr_display_level(m) == level]
        if not group:
            continue
        lines += [f"## {_LEVEL_TITLES[level]}", "", header, rule]
        for mr in group:
            label = MR_REGISTRY[mr].label if mr in MR_REGISTRY else mr
            cells = []
            for t in targets:
                r = by_key.get((mr, t))
                if r is None:
                    cells.append("-")
                else:
                    cell = f"{r.efr_percent:.1f}"
                    if r.transport_failures:
                        cell += f" ({r.transport_failures} failed)"
                    cells.append(cell)
            lines.append(f"| {label} | " + " | ".join(cells) + " |")
        lines.append("")
    if not report.rows:
        lines += [header, rule, ""]
    return ("\n".join(lines)).encode("utf-8")


def write_report(report: EfrReport, format: str = "json") -> bytes:
    if format == "json":
        return report_to_json(report)
    if format == "markdown":
        return report_to_markdown(report)
    raise ValueError(f"unknown report format {format!r}")


def render_report_figures(report: EfrReport, out_dir: str) -> list[str]:
    """Bar chart of EFR per MR (one group of bars per target), saved as PNG."""
    import os

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    if not report.rows:
        return []
    os.makedirs(out_dir, exist_ok=True)
    targets = sorted({r.target for r in report.rows})
    mr_ids = [m for level in _LEVEL_ORDER
              for m in sorted({r.mr_id for r in report.rows})
              if mr_display_level(m) == level]
    by_key = {(r.mr_id, r.target): r.efr_percent for r in report.rows}

    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(mr_ids) + 2), 4.5))
    x = np.arange(len(mr_ids))
    width = 0.8 / max(1, len(targets))
    for i, t in enumerate(targets):
        vals = [by_key.get((m, t), 0.0) for m in mr_ids]
        ax.bar(x + i * width, vals, width, label=t or "(target)")
    ax.set_xticks(x + 0.4 - width / 2)
    labels = [MR_REGISTRY[m].label if m in MR_REGISTRY else m for m in mr_ids]
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("EFR (%)")
    ax.set_ylim(0, 105)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(out_dir, "efr_by_mr.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
