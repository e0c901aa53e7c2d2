"""
Converts analysis results to JSON-ready dictionaries and writes them as JSON
lines or CSV. Index sets are always emitted as ascending 1-based lists.
"""

import csv
import json
import sys
from contextlib import contextmanager
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO

import numpy as np

from .logging_utils import log_event
from .models import (
    CouplingVerdict,
    Factorization,
    FactorizationBlocks,
    FactorizationCheck,
    IndexSet,
    OracleReport,
    StableSetReport,
    Trajectory,
)


def _floats(values: Iterable[Any]) -> List[float]:
    return [float(v) for v in values]


def _matrix(m: np.ndarray) -> List[List[float]]:
    return [_floats(row) for row in m]


def _json_default(obj: Any) -> Any:
    if isinstance(obj, IndexSet):
        return obj.to_list()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, Fraction)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def ensure_output_dir(output_dir: Path) -> Path:
    """Ensure the output directory exists."""
    output_path = Path(output_dir)
    output_path.mkdir(parents=True, exist_ok=True)
    return output_path


def report_to_dict(report: StableSetReport) -> Dict[str, Any]:
    return {
        "set": report.set.to_list(),
        "verdict": report.verdict.value,
        "attractor": _floats(report.attractor),
        "margin": float(report.margin),
        "boundary_candidate": report.boundary_candidate,
        "near_degenerate": report.near_degenerate,
    }


def verdict_to_dict(verdict: CouplingVerdict) -> Dict[str, Any]:
    witness = None
    if verdict.witness is not None:
        witness = {"index": verdict.witness.index, "values": _floats(verdict.witness.values)}
    return {
        "theorem": verdict.theorem,
        "holds": verdict.holds,
        "recomputed": verdict.recomputed,
        "witness": witness,
    }


def trajectory_to_dict(traj: Trajectory) -> Dict[str, Any]:
    return {
        "termination": traj.termination.value,
        "converged_set": traj.converged_set.to_list() if traj.converged_set is not None else None,
        "boundary_fixed_point": traj.boundary_fixed_point,
        "elapsed": float(traj.elapsed),
        "switches": traj.switches,
        "final_state": _floats(traj.final_state),
        "segments": [
            {
                "part": seg.part.to_list(),
                "entry_state": _floats(seg.entry_state),
                "attractor": _floats(seg.attractor),
                "duration": float(seg.duration),
                "exit_coordinate": seg.exit_coordinate,
            }
            for seg in traj.segments
        ],
    }


def factorization_to_dict(f: Factorization, check: Optional[FactorizationCheck] = None) -> Dict[str, Any]:
    record = {
        "set": f.target_set.to_list(),
        "epsilon": float(f.epsilon),
        "x": _matrix(f.x),
        "y": _matrix(f.y),
        "x_inverse_code": _floats(f.x_inverse_code),
    }
    if check is not None:
        record["ok"] = check.ok
        record["residual"] = float(check.residual)
        record["violations"] = list(check.violations)
    return record


def blocks_to_dict(blocks: FactorizationBlocks) -> Dict[str, Any]:
    def block(part):
        return {
            "rows": part.rows.to_list(),
            "columns": part.columns.to_list(),
            "epsilon": float(part.epsilon),
            "x": _matrix(part.x),
            "y": _matrix(part.y),
        }
    return {
        "inner": block(blocks.inner),
        "outer": block(blocks.outer) if blocks.outer is not None else None,
        "outer_omitted": blocks.outer_omitted,
    }


def oracle_report_to_dict(report: OracleReport) -> Dict[str, Any]:
    record = asdict(report)
    record["passed"] = report.passed
    return record


def write_json_lines(records: Iterable[Dict[str, Any]], stream: TextIO) -> int:
    """One JSON object per line, keys in insertion order; returns the record count."""
    count = 0
    for record in records:
        stream.write(json.dumps(record, default=_json_default) + "\n")
        count += 1
    return count


def write_csv(rows: Iterable[Dict[str, Any]], fieldnames: Sequence[str], stream: TextIO) -> int:
    """CSV with a header row; floats are written with repr precision."""
    writer = csv.DictWriter(stream, fieldnames=list(fieldnames), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    count = 0
    for row in rows:
        writer.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating, Fraction)) else v)
                         for k, v in row.items()})
        count += 1
    return count


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Yields standard output for None or "-", otherwise the opened file."""
    if path in (None, "-"):
        yield sys.stdout
        return
    target = Path(path)
    ensure_output_dir(target.parent)
    with open(target, "w", newline="", encoding="utf-8") as f:
        yield f
    log_event("Export", f"Wrote results to {target}")
