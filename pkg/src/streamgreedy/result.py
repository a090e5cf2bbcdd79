"""Result record shared by every algorithm instance."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Tuple

from .ground import Value


@dataclass
class RunResult:
    """Best set found by one instance, plus the per-branch sets it chose among."""

    solution: frozenset
    value: Value
    source: str
    candidates: Dict[str, Tuple[frozenset, Value]] = field(default_factory=dict)
    stats: Dict[str, object] = field(default_factory=dict)


def best_of(candidates: Dict[str, Tuple[frozenset, Value]], stats=None) -> RunResult:
    """argmax by value; ties keep the earliest entry."""
    name, (sol, val) = next(iter(candidates.items()))
    for other, (s, v) in candidates.items():
        if v > val:
            name, sol, val = other, s, v
    return RunResult(sol, val, name, dict(candidates), dict(stats or {}))
