"""Coordinate charts: names, dimension and flat-frame signature."""

from dataclasses import dataclass, field

import numpy as np

from .errors import TetradSpecError

_IDENT_OK = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789"


@dataclass(frozen=True)
class Chart:
    """An ordered set of coordinate names with a diagonal frame signature.

    Immutable; shared freely between fields and tetrads evaluated concurrently.
    """

    coord_names: tuple = ("t", "x", "y", "z")
    signature: tuple = (1, -1, -1, -1)

    def __post_init__(self):
        names = tuple(self.coord_names)
        sig = tuple(int(s) for s in self.signature)
        object.__setattr__(self, "coord_names", names)
        object.__setattr__(self, "signature", sig)
        if len(names) < 2:
            raise TetradSpecError("chart dimension must be >= 2")
        if len(set(names)) != len(names):
            raise TetradSpecError(f"coordinate names not distinct: {names}")
        for n in names:
            if not n or n[0].isdigit() or any(c not in _IDENT_OK for c in n):
                raise TetradSpecError(f"invalid coordinate identifier: {n!r}")
        if len(sig) != len(names):
            raise TetradSpecError("signature length must equal dimension")
        if any(s not in (1, -1) for s in sig):
            raise TetradSpecError(f"signature entries must be +1 or -1: {sig}")

    @property
    def dim(self):
        return len(self.coord_names)

    def index(self, name):
        try:
            return self.coord_names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a coordinate of {self.coord_names}") from None

    def eta(self):
        """Flat frame metric as a dense array, diag(signature)."""
        return np.diag(np.asarray(self.signature, dtype=float))


def lorentzian_chart(names):
    """Chart with signature (+1, -1, ..., -1), coordinate names from a list or string."""
    if isinstance(names, str):
        names = names.split()
    sig = (1,) + (-1,) * (len(names) - 1)
    return Chart(tuple(names), sig)
