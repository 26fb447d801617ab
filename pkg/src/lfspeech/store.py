"""Crash-safe output writing.

Files land under a temporary sibling name and are renamed into place, so an
interrupted batch never leaves a half-written output behind.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Callable, TypeVar

from filelock import FileLock, Timeout
from returns.io import IOResult, IOSuccess, IOFailure
from returns.context import RequiresContextIOResult as RCIOResult
from returns.curry import curry

from .env import Env

A = TypeVar('A')

LOCK_TIMEOUT = 60.0


def atomic_write_bytes(path: Path, data: bytes) -> IOResult[Path, str]:
    path = Path(path)
    tmp_name = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp_name, path)
        return IOSuccess(path)
    except OSError as exc:
        if tmp_name is not None and os.path.exists(tmp_name):
            os.unlink(tmp_name)
        return IOFailure(f'write_error: {exc}')


def atomic_write_text(path: Path, text: str) -> IOResult[Path, str]:
    # LF line endings regardless of platform
    return atomic_write_bytes(path, text.encode("utf-8"))


def _with_lock(env: Env):
    if env.lock_path:
        return FileLock(str(env.lock_path), timeout=LOCK_TIMEOUT)
    class _Noop:
        def __enter__(self): return None
        def __exit__(self, *a): return False
    return _Noop()


def _run(op: Callable[[Env], IOResult[A, str]]) -> RCIOResult[Env, str, A]:
    def _io(env: Env) -> IOResult[A, str]:
        try:
            with _with_lock(env):
                return op(env)
        except Timeout:
            return IOFailure(f'lock_timeout: {env.lock_path}')
    return RCIOResult(_io)


@curry
def write_bytes(name: str, data: bytes, _env: Env) -> RCIOResult[Env, str, Path]:
    return _run(lambda env: atomic_write_bytes(env.out_dir / name, data))


@curry
def write_text(name: str, text: str, _env: Env) -> RCIOResult[Env, str, Path]:
    return _run(lambda env: atomic_write_text(env.out_dir / name, text))


__all__ = ["atomic_write_bytes", "atomic_write_text", "write_bytes", "write_text"]
