"""Forcing terms with exact derivatives and Laplace transforms.

The closed set ``const:c``, ``poly:c0,c1,...`` and ``exp:a`` covers every
forcing used by the solvers, the identity checks and the Laplace oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracrules.errors import UnsupportedForcing

__all__ = ["Forcing", "parse_forcing"]

_KINDS = ("poly", "exp")


@dataclass(frozen=True)
class Forcing:
    """``sum_k c_k t^k`` (kind ``poly``) or ``scale * exp(rate * t)`` (kind ``exp``)."""

    kind: str
    coefficients: tuple[float, ...] = (0.0,)
    rate: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise UnsupportedForcing(f"unknown forcing kind {self.kind!r}")
        coefs = tuple(float(c) for c in self.coefficients) or (0.0,)
        if not all(math.isfinite(c) for c in coefs + (self.rate, self.scale)):
            raise UnsupportedForcing("forcing parameters must be finite")
        object.__setattr__(self, "coefficients", coefs)
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "scale", float(self.scale))

    @classmethod
    def constant(cls, c: float) -> Forcing:
        return cls("poly", (c,))

    @classmethod
    def polynomial(cls, *coefficients: float) -> Forcing:
        return cls("poly", tuple(coefficients))

    @classmethod
    def exponential(cls, rate: float, scale: float = 1.0) -> Forcing:
        return cls("exp", rate=rate, scale=scale)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "exp":
            return self.scale * np.exp(self.rate * t)
        return np.polynomial.polynomial.polyval(t, self.coefficients) + np.zeros_like(t)

    def derivative(self, order: int = 1) -> Forcing:
        if order < 0:
            raise ValueError(f"derivative order must be >= 0, got {order}")
        if self.kind == "exp":
            return Forcing.exponential(self.rate, self.scale * self.rate**order)
        coefs = np.polynomial.polynomial.polyder(np.array(self.coefficients), order)
        return Forcing("poly", tuple(float(c) for c in coefs))

    def laplace(self, s):
        """Transform at complex ``s`` right of every pole; works with mpmath numbers."""
        if self.kind == "exp":
            return self.scale / (s - self.rate)
        return sum(c * math.factorial(k) / s ** (k + 1) for k, c in enumerate(self.coefficients))

    @property
    def poles(self) -> tuple[complex, ...]:
        if self.kind == "exp":
            return (complex(self.rate),)
        return (0j,)

    def to_text(self) -> str:
        if self.kind == "exp":
            text = f"exp:{self.rate!r}"
            return text if self.scale == 1 else f"{self.scale!r}*{text}"
        if len(self.coefficients) == 1:
            return f"const:{self.coefficients[0]!r}"
        return "poly:" + ",".join(repr(c) for c in self.coefficients)

    def is_zero(self) -> bool:
        if self.kind == "exp":
            return self.scale == 0
        return all(c == 0 for c in self.coefficients)


def parse_forcing(text: str) -> Forcing:
    """Parse ``const:c``, ``poly:c0,c1,...`` or ``exp:a``."""
    kind, sep, body = text.strip().partition(":")
    if not sep or not body.strip():
        raise UnsupportedForcing(f"forcing must look like kind:params, got {text!r}")
    try:
        values = [float(x) for x in body.split(",")]
    except ValueError as exc:
        raise UnsupportedForcing(f"forcing parameters must be numbers, got {body!r}") from exc
    kind = kind.strip().lower()
    if kind == "const" and len(values) == 1:
        return Forcing.constant(values[0])
    if kind == "poly":
        return Forcing.polynomial(*values)
    if kind == "exp" and len(values) == 1:
        return Forcing.exponential(values[0])
    raise UnsupportedForcing(f"unsupported forcing {text!r}; use const:c, poly:c0,c1,... or exp:a")

