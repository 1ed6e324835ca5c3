"""Small shared helpers: atomic file writes and labeled seed derivation."""
from __future__ import annotations

import hashlib
import os
import tempfile

__all__ = ["atomic_write_text", "sub_seed"]


def atomic_write_text(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory and os.replace."""
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sub_seed(master: int, label: str) -> int:
    """Derive a reproducible 64-bit stream seed from a master seed and a text label.

    Stable across processes and platforms: master XOR the first 8 bytes of
    sha256(label), reduced mod 2**64.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()[:8]
    return (int(master) ^ int.from_bytes(digest, "big")) & 0xFFFFFFFFFFFFFFFF
