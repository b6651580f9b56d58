"""
Output formatting utilities for run artifacts.

This module writes summary.json, CSV tables, report.txt and the optional
TOON export, and prints console summaries using the centralized logger.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .logger import logger

try:
    from toon_format import encode as _toon_encode

    TOON_AVAILABLE = True
except ImportError:
    TOON_AVAILABLE = False

SIGNIFICANT_DIGITS: int = 12


def to_serializable(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """
    Convert numpy containers/scalars to plain Python and round floats.

    Rounding to a fixed number of significant digits keeps reruns on the
    same machine byte-identical even when the last bits of a sum differ.

    Args:
        obj: Nested structure of dicts, lists, tuples, numpy arrays and scalars
        digits: Significant digits kept for floats

    Returns:
        Structure made of dict/list/str/int/float/bool/None only
    """
    if isinstance(obj, dict):
        return {str(k): to_serializable(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_serializable(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_serializable(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return None
        if value == 0.0:
            return 0.0
        return float(f"{value:.{digits}g}")
    if isinstance(obj, Path):
        return str(obj)
    return obj


def export_summary_json(summary: Dict[str, Any], filepath: Union[str, Path]) -> None:
    """
    Export a run summary to JSON with stable key order.

    Args:
        summary: Summary dictionary
        filepath: Path to output JSON file

    Raises:
        FileSystemError: If unable to write file
    """
    from .exceptions import FileSystemError

    try:
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(
                to_serializable(summary), f, indent=2, sort_keys=True, ensure_ascii=False
            )
            f.write("\n")
        logger.info(f"✅ Summary exported to: {filepath}")
    except OSError as e:
        raise FileSystemError(f"Failed to export JSON: {e}", str(filepath), "write")


def export_summary_toon(summary: Dict[str, Any], filepath: Union[str, Path]) -> None:
    """
    Export a run summary to TOON format (requires the toon extra).

    Raises:
        FileSystemError: If toon-format is missing or the file cannot be written
    """
    from .exceptions import FileSystemError

    if not TOON_AVAILABLE:
        raise FileSystemError(
            "toon-format library not installed; install with: pip install qgamma[toon]",
            str(filepath),
            "write",
        )
    try:
        toon_output = _toon_encode(to_serializable(summary))
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(toon_output)
        logger.info(f"✅ Summary exported to TOON format: {filepath}")
    except OSError as e:
        raise FileSystemError(f"Failed to export TOON: {e}", str(filepath), "write")


def export_csv(
    rows: Iterable[Sequence[Any]],
    header: Sequence[str],
    filepath: Union[str, Path],
) -> None:
    """
    Write a CSV table with a header row.

    Args:
        rows: Row sequences, in output order
        header: Column names
        filepath: Destination path

    Raises:
        FileSystemError: If unable to write file
    """
    from .exceptions import FileSystemError

    try:
        with open(filepath, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(list(header))
            for row in rows:
                writer.writerow(
                    ["" if v is None else v for v in to_serializable(list(row))]
                )
        logger.info(f"✅ Table exported to: {filepath}")
    except OSError as e:
        raise FileSystemError(f"Failed to export CSV: {e}", str(filepath), "write")


def read_csv(filepath: Union[str, Path]) -> List[Dict[str, str]]:
    """
    Read a CSV table written by export_csv.

    Raises:
        FileSystemError: If the file cannot be read
    """
    from .exceptions import FileSystemError

    try:
        with open(filepath, "r", encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise FileSystemError(f"Failed to read CSV: {e}", str(filepath), "read")


def write_report_text(lines: List[str], filepath: Union[str, Path]) -> None:
    """
    Write the human-readable report.

    Raises:
        FileSystemError: If unable to write file
    """
    from .exceptions import FileSystemError

    try:
        with open(filepath, "w", encoding="utf-8") as f:
            f.write("\n".join(lines).rstrip() + "\n")
        logger.info(f"✅ Report written to: {filepath}")
    except OSError as e:
        raise FileSystemError(f"Failed to write report: {e}", str(filepath), "write")


def format_condition_report(report: Dict[str, Any]) -> List[str]:
    """
    Render a condition report as text lines and log them.

    Args:
        report: Serialized ConditionReport

    Returns:
        The rendered lines (also reused for report.txt)
    """
    lines = [f"K = {report.get('name', 'N/A')}  (n={report.get('n')})"]
    for key in ("k1", "k2", "k3", "k4", "k5", "k6"):
        entry = report.get(key) or {}
        status = entry.get("status", "unknown")
        marker = {"pass": "✅", "fail": "❌"}.get(status, "➖")
        detail = entry.get("detail", "")
        lines.append(f"  {marker} ({key.upper()}) {status}  {detail}".rstrip())

    crit = report.get("crit_set") or []
    if crit:
        lines.append(f"  Critical points: {len(crit)}")
        for c in crit:
            xi = ", ".join(f"{v:+.6f}" for v in c["xi"])
            a_val = c.get("A")
            a_text = "N/A" if a_val is None else f"{a_val:+.6e}"
            lines.append(
                f"    • ξ=({xi})  deg_loc={c.get('deg_loc')}  β={c.get('beta')}  A={a_text}"
            )

    omega = report.get("omega")
    if omega:
        lines.append(
            f"  Ω degree: computed={omega.get('degree')} predicted={omega.get('predicted')}"
        )
    lines.append(f"  Verdict: {report.get('verdict', 'unknown')}")
    reason: Optional[str] = report.get("reason")
    if reason:
        lines.append(f"  Reason: {reason}")

    for line in lines:
        logger.info(line)
    return lines


__all__ = [
    "SIGNIFICANT_DIGITS",
    "TOON_AVAILABLE",
    "export_csv",
    "export_summary_json",
    "export_summary_toon",
    "format_condition_report",
    "read_csv",
    "to_serializable",
    "write_report_text",
]
