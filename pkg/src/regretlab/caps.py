"""Enumeration caps shared by the exhaustive checkers."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "REGRETLAB_CAPS"


class CapExceeded(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""

    def __init__(self, name: str, size: int, limit: int):
        self.name = name
        self.size = size
        self.limit = limit
        super().__init__(f"cap '{name}' exceeded: need {size}, limit {limit} (raise via {ENV_VAR})")


@dataclass(frozen=True)
class Caps:
    sigma: int = 4096
    plans: int = 20_000
    subsets: int = 4096

    @classmethod
    def from_env(cls, environ=None) -> "Caps":
        """Read overrides such as ``plans=50000,sigma=8192`` from the environment."""
        environ = os.environ if environ is None else environ
        raw = environ.get(ENV_VAR, "").strip()
        if not raw:
            return cls()
        known = {f.name for f in fields(cls)}
        updates = {}
        for item in raw.split(","):
            if not item.strip():
                continue
            key, sep, val = item.partition("=")
            key = key.strip()
            if not sep or key not in known:
                raise ValueError(f"{ENV_VAR}: bad entry {item!r}; known caps are {sorted(known)}")
            updates[key] = int(val)
        return replace(cls(), **updates)

    def require(self, name: str, size: int) -> None:
        limit = getattr(self, name)
        if size > limit:
            raise CapExceeded(name, size, limit)
