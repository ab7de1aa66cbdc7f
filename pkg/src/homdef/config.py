"""Run-time settings read from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

DEFAULT_DEGREE_CAP = 4


@dataclass(frozen=True)
class Settings:
    degree_cap: int = DEFAULT_DEGREE_CAP

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if env is None else env
        raw = env.get("HOMDEF_DEGREE_CAP")
        if raw is None or raw == "":
            return cls()
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"HOMDEF_DEGREE_CAP must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError("HOMDEF_DEGREE_CAP must be at least 1")
        return cls(degree_cap=cap)
