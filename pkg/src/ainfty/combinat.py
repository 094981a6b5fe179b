"""Small combinatorial helpers shared across modules."""

from __future__ import annotations

from functools import lru_cache

__all__ = ["compositions"]


@lru_cache(maxsize=None)
def compositions(n: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """Ordered tuples of ``parts`` positive integers summing to ``n``."""
    if parts == 0:
        return ((),) if n == 0 else ()
    if parts == 1:
        return ((n,),) if n >= 1 else ()
    out = []
    for first in range(1, n - parts + 2):
        for rest in compositions(n - first, parts - 1):
            out.append((first,) + rest)
    return tuple(out)
