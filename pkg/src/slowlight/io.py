"""CSV and summary writers. Every file is written atomically."""

from __future__ import annotations

import io
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the file ordinary umask-based permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def comment_block(text: str) -> str:
    """Prefix each line of ``text`` with ``# ``."""
    if not text:
        return ""
    return "".join(f"# {line}".rstrip() + "\n" for line in text.splitlines())


def write_csv(path: str | Path, columns: Sequence[str], data: Sequence[np.ndarray],
              header: str = "") -> Path:
    buf = io.StringIO()
    buf.write(comment_block(header))
    buf.write(",".join(columns) + "\n")
    np.savetxt(buf, np.column_stack([np.asarray(d, dtype=float) for d in data]),
               delimiter=",", fmt="%.17g")
    return atomic_write_text(path, buf.getvalue())


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray, list[str]]:
    """Return ``(columns, data, header_lines)``; header lines lose their ``# ``."""
    header, body = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            header.append(line[2:] if line.startswith("# ") else line[1:])
        else:
            body.append(line)
    columns = body[0].split(",")
    data = np.loadtxt(body[1:], delimiter=",", ndmin=2) if len(body) > 1 else np.empty((0, len(columns)))
    return columns, data, header


def write_summary(path: str | Path, values: Mapping[str, object], header: str = "") -> Path:
    lines = [f"{key} = {float(value)!r}" if isinstance(value, float) else f"{key} = {value}"
             for key, value in values.items()]
    return atomic_write_text(path, comment_block(header) + "\n".join(lines) + "\n")


def read_summary(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out
