"""JSON and CSV encoding of run output.

JSON is the authoritative nested form::

    {"metadata": {...}, "records": [OutputRecord, ...], "summary": [...]}

Each OutputRecord holds the parameters, spectrum summary and per-eigenvector
blocks (energy, momentum, charge, rho table, residual table, midpoint
imaginary parts, pass flags). CSV is a flat view of the same numbers with 17
significant digits; the columns depend on the mode.
"""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__
from .correlations import CorrelationTable
from .spectra import SimultaneousEigenvector, SpectrumReport
from .tolerances import Tolerances

CONVENTIONS = {
    "two_point": "rho_r(R) = <psi| Z_0^r Z_R^{dagger r} |psi>; <Z_0^r Z_R^r> equals rho_{N-r}(R)",
    "symmetry_residual": "|rho_r(R)^* - rho_r(-R mod L)|",
    "basis": "flat index = sum_j a_j N^(L-1-j); site 0 is the most significant digit",
    "translation": "T Z_j T^-1 = Z_{j+1}; momentum k labels T eigenvalue exp(2 pi i k / L)",
    "charge": "q labels the eigenvalue omega^q of Q = prod_j X_j",
    "phase": "first largest-magnitude amplitude of each eigenvector is real positive",
}

SPECTRUM_COLUMNS = ["n_states", "length", "coupling", "index", "energy", "momentum", "charge",
                    "h_residual", "t_residual"]
CORRELATION_COLUMNS = ["n_states", "length", "coupling", "index", "energy", "momentum", "charge",
                       "r", "R", "rho_re", "rho_im", "sym_residual", "midpoint_imag"]
CHECK_COLUMNS = ["n_states", "length", "coupling", "name", "value", "tolerance", "comparison", "gate", "passed"]
NEGATIVE_COLUMNS = ["n_states", "length", "coupling", "attempt", "k1", "k2", "charge", "max_residual",
                    "threshold", "control_residual"]
SUMMARY_COLUMNS = ["n_states", "length", "coupling", "ground_energy", "ground_degeneracy",
                   "max_symmetry_residual", "max_midpoint_imag", "passed"]


def make_metadata(mode: str, seed: int, tol: Tolerances, *, coupling_default: bool, timestamp: bool = True) -> dict:
    meta = {
        "mode": mode,
        "seed": seed,
        "tolerances": tol.as_dict(),
        "versions": {"chiralpotts": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "conventions": CONVENTIONS,
        "coupling_default_used": coupling_default,
    }
    if timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def params_block(params) -> dict:
    return {"n_states": params.n_states, "length": params.length, "coupling": params.coupling}


def eigenvector_block(index: int, ev: SimultaneousEigenvector) -> dict:
    return {
        "index": index,
        "energy": ev.energy,
        "momentum": ev.momentum,
        "charge": ev.charge,
        "h_residual": ev.h_residual,
        "t_residual": ev.t_residual,
    }


def correlation_block(ev: SimultaneousEigenvector, table: CorrelationTable, tol: Tolerances) -> dict:
    n, length = table.params.n_states, table.params.length
    block = eigenvector_block(table.index, ev)
    block["rho"] = [
        {"r": r, "R": R, "re": float(table.values[r - 1, R].real), "im": float(table.values[r - 1, R].imag)}
        for r in range(1, n) for R in range(length)
    ]
    block["symmetry_residual"] = [
        {"r": r, "R": R, "value": float(table.symmetry_residuals[r - 1, R])}
        for r in range(1, n) for R in range(length)
    ]
    block["midpoint_imag"] = (
        None if table.midpoint_imag is None
        else [{"r": r, "value": float(table.midpoint_imag[r - 1])} for r in range(1, n)]
    )
    block["max_symmetry_residual"] = table.max_symmetry_residual
    block["passed"] = {
        "symmetry": table.max_symmetry_residual <= tol.symmetry,
        "midpoint": None if table.midpoint_imag is None else table.max_midpoint_imag <= tol.midpoint,
    }
    return block


def spectrum_block(report: SpectrumReport) -> dict:
    return {
        "route": report.route,
        "ground_energy": report.ground_energy,
        "ground_degeneracy": report.ground_degeneracy,
        "n_eigenvectors": len(report.eigenvectors),
    }


def summary_row(record: dict) -> dict:
    return {
        **record["params"],
        "ground_energy": record["spectrum"]["ground_energy"],
        "ground_degeneracy": record["spectrum"]["ground_degeneracy"],
        "max_symmetry_residual": record.get("max_symmetry_residual"),
        "max_midpoint_imag": record.get("max_midpoint_imag"),
        "passed": record["passed"],
    }


def dumps_json(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def strip_timestamp(document: dict) -> dict:
    doc = json.loads(json.dumps(document))
    doc.get("metadata", {}).pop("timestamp", None)
    return doc


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _rows(record: dict, mode: str):
    p = record["params"]
    base = [p["n_states"], p["length"], p["coupling"]]
    if mode == "spectrum":
        for b in record["eigenvectors"]:
            yield base + [b[c] for c in SPECTRUM_COLUMNS[3:]]
    elif mode == "verify":
        for c in record["checks"]:
            yield base + [c["name"], c["value"], c["tolerance"], c["comparison"], c["gate"], c["passed"]]
    elif mode == "negative-control":
        nc = record["negative_control"]
        for a in nc["attempts"]:
            yield base + [a["attempt"], a["momenta"][0], a["momenta"][1], a["charge"], a["max_residual"],
                          nc["threshold"], nc["control_residual"]]
    else:
        length = p["length"]
        for b in record["eigenvectors"]:
            head = base + [b["index"], b["energy"], b["momentum"], b["charge"]]
            mids = {m["r"]: m["value"] for m in b["midpoint_imag"] or []}
            for rho, res in zip(b["rho"], b["symmetry_residual"]):
                mid = mids.get(rho["r"]) if length % 2 == 0 and rho["R"] == length // 2 else None
                yield head + [rho["r"], rho["R"], rho["re"], rho["im"], res["value"], mid]


def columns_for(mode: str) -> list[str]:
    return {
        "spectrum": SPECTRUM_COLUMNS,
        "verify": CHECK_COLUMNS,
        "negative-control": NEGATIVE_COLUMNS,
    }.get(mode, CORRELATION_COLUMNS)


def dumps_csv(document: dict) -> str:
    mode = document["metadata"]["mode"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns_for(mode))
    for record in document["records"]:
        for row in _rows(record, mode):
            writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def dumps_summary_csv(document: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in document["summary"]:
        writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    return buf.getvalue()
