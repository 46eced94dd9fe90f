"""Machine-readable output files: CSV and JSON, written atomically.

Numbers carry 12 significant digits in both formats so the two artifacts
of a run agree exactly; files are staged in a temp file and renamed into
place so interrupted runs never leave partial output.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

SIG_DIGITS = 12


def fmt(value: Any) -> str:
    """Render a cell for CSV: floats at 12 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, f".{SIG_DIGITS}g")
    return str(value)


def round_sig(value: Any) -> Any:
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(value, float):
        return float(format(value, f".{SIG_DIGITS}g"))
    if isinstance(value, dict):
        return {k: round_sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v) for v in value]
    return value


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_csv(
    path: Union[str, Path],
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    _atomic_write(Path(path), buf.getvalue())


def write_json(path: Union[str, Path], obj: Any) -> None:
    data = json.dumps(round_sig(obj), indent=2, allow_nan=False) + "\n"
    _atomic_write(Path(path), data)
