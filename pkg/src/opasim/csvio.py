"""Self-describing CSV emission and parsing for scan results.

Layout: leading ``# key = value`` metadata lines (tool version, scenario,
the full resolved configuration, and derived quantities), then the header row
``detuning_over_gamma,detuning_MHz,value,value_dB`` and the data rows.  The
``value_dB`` column is filled for noise scans only.  Numbers carry a fixed
number of significant digits so an emitted file reproduces its rows exactly
when re-run from its own embedded configuration.
"""

from __future__ import annotations

import math

from .scans import NOISE, ScanResult

HEADER = "detuning_over_gamma,detuning_MHz,value,value_dB"


def format_rows(result: ScanResult, precision: int = 9) -> list[str]:
    """Data rows for one scan at the given significant-digit precision."""
    gamma = result.metadata["gamma_total"]
    is_noise = result.metadata.get("observable") == NOISE
    fmt = f"{{:.{precision}g}}"
    rows = []
    for delta, value in zip(result.detunings, result.values):
        db = fmt.format(10.0 * math.log10(value)) if is_noise else ""
        rows.append(",".join([
            fmt.format(delta / gamma),
            fmt.format(delta / (2.0 * math.pi * 1e6)),
            fmt.format(value),
            db,
        ]))
    return rows


def scan_csv_text(result: ScanResult, config_items: list[tuple[str, object]],
                  precision: int = 9) -> str:
    """Full CSV text: metadata comments, header, rows."""
    lines = []
    meta = dict(result.metadata)
    lines.append(f"# opasim_version = {meta.pop('opasim_version')}")
    lines.append(f"# scenario = {meta.pop('scenario')}")
    for key, value in config_items:
        lines.append(f"# config.{key} = {value}")
    for key in sorted(meta):
        lines.append(f"# meta.{key} = {meta[key]}")
    lines.append(HEADER)
    lines.extend(format_rows(result, precision))
    return "\n".join(lines) + "\n"


def write_scan_csv(path: str, result: ScanResult,
                   config_items: list[tuple[str, object]], precision: int = 9) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scan_csv_text(result, config_items, precision))


def read_scan_csv(path: str) -> tuple[dict[str, str], list[str], list[list[float]]]:
    """Parse an emitted file.

    Returns the metadata mapping (string-valued, as written), the raw data-row
    strings, and the rows parsed to floats (empty dB fields become NaN).
    """
    meta: dict[str, str] = {}
    raw_rows: list[str] = []
    header_seen = False
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            elif not header_seen:
                if line != HEADER:
                    raise ValueError(f"unexpected header line: {line!r}")
                header_seen = True
            else:
                raw_rows.append(line)
    if not header_seen:
        raise ValueError(f"no header row found in {path}")
    parsed = []
    for row in raw_rows:
        fields = row.split(",")
        parsed.append([float(f) if f != "" else math.nan for f in fields])
    return meta, raw_rows, parsed


def embedded_config_text(meta: dict[str, str]) -> str:
    """Reassemble configuration text from a file's ``config.*`` metadata."""
    lines = [f"{key[len('config.'):]} = {value}"
             for key, value in meta.items() if key.startswith("config.")]
    return "\n".join(lines) + "\n"
