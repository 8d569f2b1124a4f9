"""Report plumbing: NDJSON records, a summary block with provenance, text tables and figures."""

from __future__ import annotations

import hashlib
import io
import json
import platform
import sys
from pathlib import Path
from typing import Any, Iterable, TextIO

from . import __version__


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def sha256_json(obj: Any) -> str:
    """Hash of the canonical JSON form (sorted keys, no whitespace)."""
    return sha256_bytes(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode())


def versions() -> dict:
    import numpy

    out = {"cmcsp": __version__, "python": platform.python_version(), "numpy": numpy.__version__}
    mpl = sys.modules.get("matplotlib")
    if mpl is not None:
        out["matplotlib"] = mpl.__version__
    return out


class Report:
    """Records collected in order, then written as NDJSON plus one summary line, or as text."""

    def __init__(self, command: str, seed: int | None = None, inputs: dict | None = None) -> None:
        self.command = command
        self.seed = seed
        self.inputs = dict(inputs or {})
        self.records: list[dict] = []
        self.summary: dict = {}

    def add(self, record: dict) -> None:
        self.records.append(record)

    def extend(self, records: Iterable[dict]) -> None:
        self.records.extend(records)

    def summary_block(self) -> dict:
        return {
            "summary": {
                "command": self.command,
                "seed": self.seed,
                "versions": versions(),
                "inputs": self.inputs,
                "records": len(self.records),
                **self.summary,
            }
        }

    def write_ndjson(self, fh: TextIO) -> None:
        for r in self.records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
        fh.write(json.dumps(self.summary_block(), sort_keys=True) + "\n")

    def write_text(self, fh: TextIO) -> None:
        if self.records:
            fh.write(format_table(self.records))
            fh.write("\n")
        for key, value in self.summary_block()["summary"].items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            fh.write(f"{key}: {value}\n")

    def render(self, fmt: str = "json") -> str:
        buf = io.StringIO()
        (self.write_text if fmt == "text" else self.write_ndjson)(buf)
        return buf.getvalue()


def format_table(records: list[dict]) -> str:
    """A plain aligned table over the union of fields; nested values are shortened JSON."""
    cols: list[str] = []
    for r in records:
        for key, value in r.items():
            if key not in cols:
                cols.append(key)
    rows = [[_cell(r.get(c)) for c in cols] for r in records]
    widths = [max(len(c), *(len(row[i]) for row in rows)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    if isinstance(value, (dict, list)):
        text = json.dumps(value, separators=(",", ":"))
        return text if len(text) <= 48 else text[:45] + "..."
    return str(value)


def emit(report: Report, out: str | None, fmt: str) -> None:
    text = report.render(fmt)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def figure_path(out: str | None, default: str) -> Path:
    """Figures sit next to the report file, sharing its stem."""
    return Path(out).with_suffix(".png") if out else Path(default)


def plot_bench(records: list[dict], fit: dict, path: str | Path) -> Path:
    """Log-log plot of time against constraint count, one series per ``(n, k)``, with the fitted model."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    fig, ax = plt.subplots(figsize=(6, 4.2), constrained_layout=True)
    groups: dict = {}
    for r in records:
        groups.setdefault((r["n"], r["k"]), []).append(r)
    for (n, k), rs in sorted(groups.items()):
        by_s: dict = {}
        for r in rs:
            by_s.setdefault(r["s"], []).append(r["seconds_no_gauss"])
        s = np.array(sorted(by_s))
        med = np.array([float(np.median(by_s[v])) for v in s])
        ax.plot(s, med, "o-", label=f"n={n}, k={k} (median)")
        coef = fit.get("coefficients")
        if coef and len(s) > 1:
            grid = np.geomspace(s.min(), s.max(), 50)
            model = coef["linear"] * k * n * grid + coef["gauss"] * grid ** fit["omega"]
            ax.plot(grid, model, "--", lw=1, color="gray")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("constraints s")
    ax.set_ylabel("solve time without GF(2) step [s]")
    ax.grid(True, which="both", lw=0.3, alpha=0.6)
    if groups:
        ax.legend(frameon=False, fontsize=8)
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_crosscheck(records: list[dict], path: str | Path) -> Path:
    """Stacked bars of verdict counts per ``(n, k)`` with disagreements marked."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts: dict = {}
    for r in records:
        c = counts.setdefault(f"({r['n']},{r['k']})", {"ACCEPT": 0, "REJECT": 0, "disagree": 0})
        c[r["solve"]] += 1
        c["disagree"] += int(not r["agree"])
    labels = sorted(counts)
    fig, ax = plt.subplots(figsize=(5, 3.5), constrained_layout=True)
    acc = [counts[x]["ACCEPT"] for x in labels]
    rej = [counts[x]["REJECT"] for x in labels]
    ax.bar(labels, acc, label="ACCEPT")
    ax.bar(labels, rej, bottom=acc, label="REJECT")
    for i, x in enumerate(labels):
        if counts[x]["disagree"]:
            ax.annotate(f"{counts[x]['disagree']} disagree", (i, acc[i] + rej[i]), ha="center", va="bottom")
    ax.set_xlabel("(n, k)")
    ax.set_ylabel("instances")
    ax.legend(frameon=False, fontsize=8)
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


__all__ = [
    "sha256_bytes", "sha256_file", "sha256_json", "versions", "Report", "format_table", "emit",
    "figure_path", "plot_bench", "plot_crosscheck",
]
