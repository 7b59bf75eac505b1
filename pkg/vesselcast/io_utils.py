"""
File helpers shared by the readers and writers.
"""

import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterator, Union

from vesselcast.errors import DataIOError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@contextmanager
def atomic_output(path: PathLike, mode: str = "w") -> Iterator[IO]:
    """
    Open a temporary file next to ``path`` and move it into place on success.

    On any exception the temporary file is removed, so a failed command never
    leaves a partial output behind.
    """
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    except OSError as e:
        raise DataIOError(f"cannot write {target}: {e}") from e

    encoding = None if "b" in mode else "utf-8"
    newline = None if "b" in mode else ""
    try:
        with os.fdopen(fd, mode, encoding=encoding, newline=newline) as f:
            yield f
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise


def open_source(path: PathLike, mode: str = "r") -> IO:
    """Open an input file, translating OS errors into DataIOError."""
    try:
        if "b" in mode:
            return open(path, mode)
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as e:
        raise DataIOError(f"cannot read {path}: {e}") from e


def read_header(path: PathLike) -> str:
    """Return the first line of a text file without its line ending."""
    with open_source(path) as f:
        return f.readline().rstrip("\r\n")
