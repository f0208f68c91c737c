"""Experiment configs, CSV tables and JSON verdict manifests.

Configs are ``key = value`` text with one ``[section]`` per module. Every
file is written once through a temporary sibling and ``os.replace``, so a
reader never sees a partial file. Floats are printed with ``repr`` and
therefore round-trip exactly.
"""

from __future__ import annotations

import configparser
import csv
import io as _io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .errors import ArgumentError

OUT_ENV = "ROUGHHJ_OUT"


def output_root(override=None) -> FsPath:
    """Directory for artifacts: ``override``, else ``$ROUGHHJ_OUT``, else ``./roughhj_out``."""
    root = override or os.environ.get(OUT_ENV) or "roughhj_out"
    return FsPath(root)


@dataclass
class ExperimentConfig:
    """Serializable description of one run.

    Attributes
    ----------
    subcommand : str
        Dotted command, e.g. ``"scheme.rates"``.
    params : dict
        Flat parameters; values are strings, numbers or lists of those.
    out : str or None
        Output directory override.
    """

    subcommand: str
    params: dict = field(default_factory=dict)
    out: str | None = None

    def to_text(self) -> str:
        """``key = value`` text that :func:`parse_config` reads back unchanged."""
        section = self.subcommand.split(".")[0]
        lines = ["[run]", f"subcommand = {self.subcommand}"]
        if self.out is not None:
            lines.append(f"out = {self.out}")
        lines += ["", f"[{section}]"]
        for k in sorted(self.params):
            lines.append(f"{k} = {format_value(self.params[k])}")
        return "\n".join(lines) + "\n"


def format_value(v) -> str:
    """Config/CSV spelling of a value with round-trip float precision."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, (list, tuple)):
        return ", ".join(format_value(x) for x in v)
    return str(v)


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; raises :class:`ArgumentError` when empty or malformed."""
    if not text.strip():
        raise ArgumentError("empty config")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ArgumentError(f"malformed config: {exc}") from exc
    if not cp.has_option("run", "subcommand"):
        raise ArgumentError("config needs a [run] section with 'subcommand = ...'")
    sub = cp.get("run", "subcommand").strip()
    out = cp.get("run", "out", fallback=None)
    params = {}
    for section in cp.sections():
        if section == "run":
            continue
        for k, v in cp.items(section):
            params[k] = v.strip()
    return ExperimentConfig(sub, params, out)


def read_config(fname) -> ExperimentConfig:
    with open(fname) as fh:
        return parse_config(fh.read())


def atomic_write(fname, data: str) -> FsPath:
    """Write ``data`` to ``fname`` via a temporary file in the same directory."""
    fname = FsPath(fname)
    fname.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=fname.parent, prefix=f".{fname.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, fname)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return fname


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(float(v)) if _is_real(v) else format_value(v) for v in r])
    return buf.getvalue()


def _is_real(v) -> bool:
    return isinstance(v, (float, np.floating)) and not isinstance(v, bool)


def write_csv(fname, header, rows) -> FsPath:
    """Atomic CSV with round-trip floats."""
    return atomic_write(fname, csv_text(header, rows))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf" if x < 0 else "nan"
    return x


def write_json(fname, obj) -> FsPath:
    """Atomic JSON (sorted keys, non-finite floats spelled as strings)."""
    return atomic_write(fname, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def write_manifest(fname, records, config: ExperimentConfig | None = None) -> FsPath:
    """JSON verdict manifest for a list of :class:`VerdictRecord`."""
    recs = [r.to_dict() for r in records]
    body = {"all_passed": all(r["passed"] for r in recs), "verdicts": recs}
    if config is not None:
        body["config"] = {"subcommand": config.subcommand, "params": config.params}
    return write_json(fname, body)
