"""Named coordinate systems.

A chart lists its coordinates (the variables geometry differentiates by),
their degree weights, and optional parameters.  Parameters occupy extra
exponent slots of a polynomial but are never treated as coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .scalar import as_scalar


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple
    weights: tuple = ()
    params: tuple = ()

    def __post_init__(self):
        coords = tuple(self.coords)
        params = tuple(self.params)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "params", params)
        weights = tuple(as_scalar(w) for w in self.weights) if self.weights else tuple(as_scalar(1) for _ in coords)
        if len(weights) != len(coords):
            raise ValueError("one weight per coordinate is required")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "weights", weights)
        names = coords + params
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in chart {self.name!r}")

    @cached_property
    def variables(self) -> tuple:
        return self.coords + self.params

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def nvars(self) -> int:
        return len(self.coords) + len(self.params)

    @cached_property
    def _index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    def index(self, var) -> int:
        if isinstance(var, int):
            if not 0 <= var < self.nvars:
                raise KeyError(f"variable index {var} out of range for chart {self.name!r}")
            return var
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"unknown variable {var!r} in chart {self.name!r}") from None

    def coord_index(self, var) -> int:
        i = self.index(var)
        if i >= self.dim:
            raise KeyError(f"{self.variables[i]!r} is a parameter, not a coordinate of {self.name!r}")
        return i

    def with_params(self, *params, name=None) -> "Chart":
        """Same coordinates with extra parameters appended."""
        new = self.params + tuple(p for p in params if p not in self.params)
        label = name or (self.name if not params else f"{self.name}[{','.join(new)}]")
        return Chart(label, self.coords, self.weights, new)

    def weight_of(self, var):
        i = self.index(var)
        return self.weights[i] if i < self.dim else as_scalar(0)


def chart(name, coords, weights=(), params=()) -> Chart:
    return Chart(name, tuple(coords), tuple(weights), tuple(params))
