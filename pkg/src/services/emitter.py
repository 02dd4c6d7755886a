"""
Artifact writer for specdisp runs: CSV tables, JSON records and plot data.

Every file is written to a temporary sibling first and moved into place with
os.replace, so readers never observe a partial artifact.
"""
import json
import os
import tempfile
from typing import Any, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..models.schema import PlotBlock
from ..utils.logger import get_logger

logger = get_logger("emitter")

FLOAT_FORMAT = "%.17g"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(handle, "w", newline="\n") as f:
            f.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def _json_default(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def emit_plotdata(blocks: Sequence[PlotBlock], path: str, header: str = "specdisp plot data") -> str:
    """Whitespace-separated columns, one block per snapshot separated by blank lines."""
    lines: List[str] = [f"# {header}"]
    for i, block in enumerate(blocks):
        rows = np.asarray(block.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(block.columns):
            raise ValueError(f"Block '{block.label}' does not match its {len(block.columns)} columns")
        if i > 0:
            lines.append("")
        lines.append(f"# {block.label}")
        lines.append("# " + " ".join(block.columns))
        for row in rows:
            lines.append(" ".join(FLOAT_FORMAT % value for value in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    logger.debug(f"Wrote {len(blocks)} plot blocks to {path}")
    return path


class OutputWriter:
    """Writes run artifacts into one output directory and remembers their names."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.artifacts: List[str] = []
        os.makedirs(out_dir, exist_ok=True)

    def _path(self, name: str) -> str:
        if name not in self.artifacts:
            self.artifacts.append(name)
        return os.path.join(self.out_dir, name)

    def write_csv(self, frame: pd.DataFrame, name: str) -> str:
        path = self._path(name)
        _atomic_write(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))
        logger.debug(f"Wrote {len(frame)} rows to {path}")
        return path

    def write_json(self, data: Any, name: str) -> str:
        path = self._path(name)
        _atomic_write(path, json.dumps(data, indent=2, default=_json_default) + "\n")
        return path

    def write_plotdata(self, blocks: Sequence[PlotBlock], name: str, header: Optional[str] = None) -> str:
        path = self._path(name)
        return emit_plotdata(blocks, path, header or name)
