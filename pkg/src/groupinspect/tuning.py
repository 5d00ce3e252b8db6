"""Penalty level rules."""

from __future__ import annotations

import math

from .model import Grouping


def theoretical_lambda(n: int, grouping: Grouping, sigma: float = 1.0) -> float:
    """sigma * (1 + sqrt(4 log(G n) / p_star))."""
    return sigma * (1.0 + math.sqrt(4.0 * math.log(grouping.G * n) / grouping.p_star))


def practical_lambda(n: int, grouping: Grouping, sigma: float = 1.0) -> float:
    """Half the theoretical value; the default."""
    return 0.5 * theoretical_lambda(n, grouping, sigma)


def inspect_lambda(n: int, p: int) -> float:
    """Entrywise threshold sqrt(log(p log n) / 2) for singleton groups."""
    return math.sqrt(max(0.0, 0.5 * math.log(p * math.log(n))))


LAMBDA_RULES = {"practical": practical_lambda, "theoretical": theoretical_lambda}


def resolve_lambda(mode: str, n: int, grouping: Grouping, value: float | None = None,
                   sigma: float = 1.0) -> float:
    if mode == "explicit":
        if value is None or value < 0:
            raise ValueError("explicit lambda needs a nonnegative value")
        return float(value)
    try:
        return LAMBDA_RULES[mode](n, grouping, sigma)
    except KeyError:
        raise ValueError(f"unknown lambda mode {mode!r}") from None
