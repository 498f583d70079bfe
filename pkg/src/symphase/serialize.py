"""Plain-text file formats for signals, measurements, results and reports.

* signal CSV: header ``index,re,im``, one row per entry.
* measurement CSV: ``#`` metadata lines (variant, n, sigma, clipped and a
  JSON config), then ``index,intensity`` rows.
* measurement JSON: ``{variant, n, sigma, intensities, config}``.
* report CSV/JSON: the version string, master seed and parameter block
  travel with every table.

Floats are written with 17 significant digits in CSV and with ``repr`` in
JSON; both round-trip doubles exactly.
"""

import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputFormatError, MetadataError
from .measurement import MeasurementVector

__all__ = [
    "VERSION_TAG",
    "fmt",
    "format_signal_csv",
    "parse_signal_csv",
    "read_signal",
    "format_measurement",
    "parse_measurement",
    "read_measurement",
    "format_result_json",
    "parse_result_json",
    "format_report",
    "write_text",
    "is_json_path",
]

VERSION_TAG = f"v{__version__}"


def fmt(v):
    """17 significant digits; integers stay integers."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _dumps(obj):
    # sort_keys keeps the output independent of construction order
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def is_json_path(path):
    return path is not None and str(path).lower().endswith(".json")


def write_text(path, text):
    """Write ``text`` with ``\\n`` line endings; ``None`` or ``-`` means stdout."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputFormatError(f"cannot read {path}: {err}") from err


def _float(token, where):
    try:
        v = float(token)
    except (TypeError, ValueError):
        raise InputFormatError(f"{where}: {token!r} is not a number") from None
    if not math.isfinite(v):
        raise InputFormatError(f"{where}: non-finite value {token!r}")
    return v


def _rows(text, header):
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or [h.strip() for h in lines[0].split(",")] != header:
        raise InputFormatError(f"expected header {','.join(header)!r}")
    rows = list(csv.reader(lines[1:]))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise InputFormatError(f"row {i + 1}: expected {len(header)} fields")
        try:
            idx = int(row[0])
        except ValueError:
            raise InputFormatError(f"row {i + 1}: bad index {row[0]!r}") from None
        if idx != i:
            raise InputFormatError(f"row {i + 1}: index {idx} out of order")
    if not rows:
        raise InputFormatError("no data rows")
    return rows


# ---------------------------------------------------------------------------
# signals


def format_signal_csv(x):
    x = np.asarray(x, dtype=np.complex128)
    out = ["index,re,im"]
    out += [f"{i},{fmt(v.real)},{fmt(v.imag)}" for i, v in enumerate(x)]
    return "\n".join(out) + "\n"


def parse_signal_csv(text):
    rows = _rows(text, ["index", "re", "im"])
    return np.array([complex(_float(r[1], f"row {i + 1}"), _float(r[2], f"row {i + 1}"))
                     for i, r in enumerate(rows)], dtype=np.complex128)


def read_signal(path):
    return parse_signal_csv(_read(path))


# ---------------------------------------------------------------------------
# measurements


def format_measurement(m, config=None, as_json=False):
    config = config or {}
    if as_json:
        return _dumps({
            "variant": m.variant,
            "n": int(m.origin_n),
            "sigma": float(m.noise_sigma),
            "clipped": int(m.clipped),
            "intensities": [float(v) for v in m.intensities],
            "config": config,
            "version": VERSION_TAG,
        })
    out = [
        f"# version={VERSION_TAG}",
        f"# variant={m.variant}",
        f"# n={int(m.origin_n)}",
        f"# sigma={fmt(float(m.noise_sigma))}",
        f"# clipped={int(m.clipped)}",
        "# config=" + json.dumps(config, sort_keys=True),
        "index,intensity",
    ]
    out += [f"{i},{fmt(v)}" for i, v in enumerate(m.intensities)]
    return "\n".join(out) + "\n"


def _build_measurement(values, variant, n, sigma, clipped):
    try:
        return MeasurementVector(np.asarray(values, dtype=np.float64), variant, int(n),
                                 noise_sigma=float(sigma), clipped=int(clipped))
    except (MetadataError, TypeError, ValueError) as err:
        raise InputFormatError(f"inconsistent measurement file: {err}") from err


def parse_measurement(text):
    """Parse either measurement format; returns ``(MeasurementVector, config)``."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
            values = [_float(v, "intensities") for v in obj["intensities"]]
            m = _build_measurement(values, obj["variant"], obj["n"], obj.get("sigma", 0.0),
                                   obj.get("clipped", 0))
        except (json.JSONDecodeError, KeyError, TypeError) as err:
            raise InputFormatError(f"bad measurement JSON: {err}") from err
        return m, obj.get("config", {})

    meta = {}
    for line in text.splitlines():
        if line.startswith("#") and "=" in line:
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
    for key in ("variant", "n"):
        if key not in meta:
            raise InputFormatError(f"missing '# {key}=' metadata line")
    rows = _rows(text, ["index", "intensity"])
    values = [_float(r[1], f"row {i + 1}") for i, r in enumerate(rows)]
    try:
        n = int(meta["n"])
        config = json.loads(meta.get("config", "{}"))
    except (ValueError, json.JSONDecodeError) as err:
        raise InputFormatError(f"bad metadata: {err}") from err
    sigma = _float(meta.get("sigma", "0"), "sigma")
    clipped = meta.get("clipped", "0")
    if not clipped.isdigit():
        raise InputFormatError(f"bad clipped count {clipped!r}")
    return _build_measurement(values, meta["variant"], n, sigma, clipped), config


def read_measurement(path):
    return parse_measurement(_read(path))


# ---------------------------------------------------------------------------
# recovery results and reports


def format_result_json(result, config=None, extra=None):
    obj = result.to_dict()
    obj["exact"] = bool(result.exact)
    obj["config"] = config or {}
    obj["version"] = VERSION_TAG
    if extra:
        obj.update(extra)
    return _dumps(obj)


def parse_result_json(text):
    """Return ``(estimate, dict)`` from a result file."""
    try:
        obj = json.loads(text)
        est = np.array(obj["estimate_re"], dtype=float) + 1j * np.array(obj["estimate_im"],
                                                                        dtype=float)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
        raise InputFormatError(f"bad result JSON: {err}") from err
    return est, obj


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(w) for w in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def format_report(rows, seed, params, as_json=False, summary=None):
    """One CSV row (or JSON list entry) per grid point, with a provenance header."""
    rows = [_plain(r) for r in rows]
    params = _plain(params)
    if as_json:
        obj = {"version": VERSION_TAG, "seed": int(seed), "params": params, "rows": rows}
        if summary is not None:
            obj["summary"] = _plain(summary)
        return _dumps(obj)
    buf = io.StringIO()
    buf.write(f"# version={VERSION_TAG}\n")
    buf.write(f"# seed={int(seed)}\n")
    buf.write("# params=" + json.dumps(params, sort_keys=True) + "\n")
    if summary is not None:
        buf.write("# summary=" + json.dumps(_plain(summary), sort_keys=True) + "\n")
    if rows:
        cols = list(rows[0])
        buf.write(",".join(cols) + "\n")
        for r in rows:
            buf.write(",".join(fmt(r[c]) for c in cols) + "\n")
    return buf.getvalue()
