"""Endpoint-typed bars and barcodes shared by the sublevel and level-set code paths."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

SUBLEVEL = "sublevel"
LEVELSET = "levelset"
FLAVORS = (SUBLEVEL, LEVELSET)


class BarcodeFormatError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Endpoint:
    value: float
    closed: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {"v": self.value, "t": "closed" if self.closed else "open"}


@dataclass(frozen=True, order=True)
class Bar:
    """``death is None`` means the bar runs to +infinity."""

    dim: int
    birth: Endpoint
    death: Endpoint | None = None

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise BarcodeFormatError("bar dimension must be >= 0")
        if self.death is not None and not self.birth.value < self.death.value:
            raise BarcodeFormatError(f"bar birth {self.birth.value} must precede death {self.death.value}")

    @property
    def lo(self) -> float:
        return self.birth.value

    @property
    def hi(self) -> float:
        return math.inf if self.death is None else self.death.value

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def closed_closed(self) -> bool:
        return self.birth.closed and self.death is not None and self.death.closed

    def strictly_inside(self, other: Bar) -> bool:
        """Value containment that is proper; endpoint types are ignored."""
        return other.lo <= self.lo and self.hi <= other.hi and (other.lo, other.hi) != (self.lo, self.hi)

    def key(self, strict: bool = True) -> tuple:
        if self.death is None:
            death = (math.inf, 2 if strict else None)  # tag 2 never equals a closed/open flag
        else:
            death = (self.death.value, self.death.closed if strict else None)
        return (self.dim, self.birth.value, self.birth.closed if strict else None) + death

    def __str__(self) -> str:
        left = "[" if self.birth.closed else "("
        if self.death is None:
            return f"{left}{self.birth.value:g},inf)"
        right = "]" if self.death.closed else ")"
        return f"{left}{self.birth.value:g},{self.death.value:g}{right}"

    def to_dict(self) -> dict[str, Any]:
        return {"dim": self.dim, "birth": self.birth.to_dict(), "death": "inf" if self.death is None else self.death.to_dict()}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Bar:
        try:
            birth = _endpoint(data["birth"])
            death = None if data["death"] == "inf" else _endpoint(data["death"])
            return cls(int(data.get("dim", 0)), birth, death)
        except (KeyError, TypeError) as exc:
            raise BarcodeFormatError(f"malformed bar {data!r}: {exc}") from None


def _endpoint(data: Mapping[str, Any]) -> Endpoint:
    t = data["t"]
    if t not in ("closed", "open"):
        raise BarcodeFormatError(f"endpoint type must be 'closed' or 'open', got {t!r}")
    v = data["v"]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise BarcodeFormatError(f"endpoint value must be a number, got {v!r}")
    return Endpoint(v, t == "closed")


def closed_open(b: float, d: float | None, dim: int = 0) -> Bar:
    return Bar(dim, Endpoint(b, True), None if d is None else Endpoint(d, False))


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Bar, ...]
    flavor: str = SUBLEVEL

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise BarcodeFormatError(f"unknown flavor {self.flavor!r}")
        object.__setattr__(self, "bars", tuple(sorted(self.bars, key=lambda b: b.key())))

    @classmethod
    def of(cls, bars: Iterable[Bar], flavor: str = SUBLEVEL) -> Barcode:
        return cls(tuple(bars), flavor)

    def in_dim(self, dim: int) -> list[Bar]:
        return [b for b in self.bars if b.dim == dim]

    def intervals(self, dim: int | None = None) -> list[tuple[float, float]]:
        return [(b.lo, b.hi) for b in self.bars if dim is None or b.dim == dim]

    def __len__(self) -> int:
        return len(self.bars)

    def __str__(self) -> str:
        parts = []
        for dim in sorted({b.dim for b in self.bars}):
            parts.append(f"H{dim}: " + " ".join(str(b) for b in self.in_dim(dim)))
        return "; ".join(parts) if parts else "(empty)"

    def shifted(self, c: float) -> Barcode:
        def mv(e: Endpoint | None) -> Endpoint | None:
            return None if e is None else Endpoint(e.value + c, e.closed)

        return Barcode(tuple(Bar(b.dim, mv(b.birth), mv(b.death)) for b in self.bars), self.flavor)

    def to_dict(self) -> dict[str, Any]:
        return {"flavor": self.flavor, "bars": [b.to_dict() for b in self.bars]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Barcode:
        if not isinstance(data, Mapping) or "bars" not in data:
            raise BarcodeFormatError("barcode must be an object with 'bars'")
        if not isinstance(data["bars"], list) or not all(isinstance(b, Mapping) for b in data["bars"]):
            raise BarcodeFormatError("'bars' must be a list of bar objects")
        return cls(tuple(Bar.from_dict(b) for b in data["bars"]), data.get("flavor", SUBLEVEL))


def barcodes_equal(a: Barcode, b: Barcode, strict: bool = False) -> bool:
    """Multiset equality of bars; endpoint types are compared only when ``strict``."""
    return Counter(x.key(strict) for x in a.bars) == Counter(x.key(strict) for x in b.bars)
