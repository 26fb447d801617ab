from __future__ import annotations

from pathlib import Path
from typing import Optional

from pydantic import ConfigDict
from pydantic.dataclasses import dataclass as pyd_dataclass

from returns.io import IOResult, IOSuccess, IOFailure
from returns.context import RequiresContextIOResult as RCIOResult


LOCK_NAME = ".lfspeech.lock"


@pyd_dataclass(config=ConfigDict(extra='ignore', arbitrary_types_allowed=True))
class Env:
    out_dir: Path
    lock_path: Optional[Path] = None

    @classmethod
    def locked(cls, out_dir: Path) -> "Env":
        return cls(out_dir=out_dir, lock_path=Path(out_dir) / LOCK_NAME)


def _open_out_dir(env: Env) -> IOResult[Env, str]:
    try:
        env.out_dir.mkdir(parents=True, exist_ok=True)
        return IOSuccess(env)
    except OSError as exc:
        return IOFailure(f'out_dir_error: {exc}')


def ensure_env() -> RCIOResult[Env, str, Env]:
    return RCIOResult(_open_out_dir)


__all__ = ["Env", "LOCK_NAME", "ensure_env"]
