"""Run manifests and atomic CSV output.

Every file written by the package starts with ``#``-prefixed ``key=value``
lines describing how it was produced. Nothing time- or host-dependent goes
in, so equal manifests give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .refinement import TIE_ORDER, TRACKER_INIT


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fmt_float(x: float) -> str:
    """Shortest repr that round-trips exactly."""
    return repr(float(x))


@dataclass
class RunManifest:
    command: str
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    def add_input(self, name: str, path: str | Path) -> None:
        self.inputs[name] = f"{Path(path).name}:sha256={file_digest(path)}"

    def header_lines(self) -> list[str]:
        lines = [f"# tool=uniquerank {__version__}", f"# command={self.command}"]
        for key, value in self.params.items():
            if isinstance(value, float):
                value = fmt_float(value)
            elif isinstance(value, (list, tuple)):
                value = ",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in value)
            lines.append(f"# {key}={value}")
        lines.append(f"# refine_tracker_init={TRACKER_INIT}")
        lines.append(f"# refine_tie_order={TIE_ORDER}")
        for name, digest in self.inputs.items():
            lines.append(f"# input.{name}={digest}")
        return lines


def read_header(path: str | Path) -> dict[str, str]:
    """Parse the ``# key=value`` lines at the top of a report."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            out[key] = value
    return out


def read_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8") as fh:
        body = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(body))


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(
    path: str | Path,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    manifest: RunManifest | None = None,
) -> None:
    buf = io.StringIO()
    if manifest is not None:
        for line in manifest.header_lines():
            buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    atomic_write_text(path, buf.getvalue())
