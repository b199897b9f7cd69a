"""Subshells, spin orbitals and the CI model specification.

All orbital bookkeeping in the package goes through the global ordering
defined here: subshells sorted by ``(n, l)``, inside a subshell ``m`` runs
from ``+l`` down to ``-l`` and each spatial orbital is listed spin-up first.
Spin orbital ``2*k`` is spatial orbital ``k`` with spin up, ``2*k + 1`` the
same orbital with spin down.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

L_LETTERS = "spdfghik"


@dataclass(frozen=True, order=True)
class Subshell:
    """Subshell ``(n, l)``; ordering is the alphabetical ``(n, l)`` order."""

    n: int
    l: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.l < self.n:
            raise ValueError(f"invalid subshell n={self.n}, l={self.l}")

    @property
    def dim(self) -> int:
        """Number of spin orbitals, ``2(2l+1)``."""
        return 2 * (2 * self.l + 1)

    @property
    def nspatial(self) -> int:
        return 2 * self.l + 1

    @property
    def label(self) -> str:
        return f"{self.n}{L_LETTERS[self.l]}"

    def __str__(self):
        return self.label


def parse_subshell(text) -> Subshell:
    """``"3d"`` -> ``Subshell(3, 2)``; tuples and Subshells pass through."""
    if isinstance(text, Subshell):
        return text
    if isinstance(text, (tuple, list)):
        return Subshell(int(text[0]), int(text[1]))
    m = re.fullmatch(r"\s*(\d+)([spdfghik])\s*", str(text))
    if not m:
        raise ValueError(f"cannot parse subshell {text!r}")
    return Subshell(int(m.group(1)), L_LETTERS.index(m.group(2)))


@dataclass(frozen=True)
class SpinOrbital:
    n: int
    l: int
    m: int
    spin: int  # +1 up, -1 down

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.l < self.n or abs(self.m) > self.l:
            raise ValueError("quantum numbers out of range")
        if self.spin not in (1, -1):
            raise ValueError("spin must be +1 or -1")

    @property
    def ms(self) -> Fraction:
        return Fraction(self.spin, 2)

    def sort_key(self):
        return (self.n, self.l, -self.m, -self.spin)


def subshell_orbitals(sub: Subshell) -> list[SpinOrbital]:
    """Spin orbitals of one subshell in global order."""
    return [
        SpinOrbital(sub.n, sub.l, m, s)
        for m in range(sub.l, -sub.l - 1, -1)
        for s in (1, -1)
    ]


def ordered_subshells(nl_max: Subshell) -> list[Subshell]:
    """All subshells up to and including ``nl_max`` in alphabetical order."""
    return [Subshell(n, l) for n in range(1, nl_max.n + 1) for l in range(n)
            if (n, l) <= (nl_max.n, nl_max.l)]


@dataclass(frozen=True)
class OrbitalSpace:
    """Ordered list of subshells and the induced spin-orbital indexing."""

    subshells: tuple[Subshell, ...]

    def __post_init__(self):
        subs = tuple(parse_subshell(s) for s in self.subshells)
        if list(subs) != sorted(set(subs)):
            raise ValueError("subshells must be distinct and in (n, l) order")
        object.__setattr__(self, "subshells", subs)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.subshells:
            out.append(acc)
            acc += s.dim
        return tuple(out)

    @property
    def norb(self) -> int:
        return sum(s.dim for s in self.subshells)

    @property
    def nspatial(self) -> int:
        return self.norb // 2

    def spin_orbitals(self) -> list[SpinOrbital]:
        return [o for s in self.subshells for o in subshell_orbitals(s)]

    def spatial_labels(self) -> list[tuple[Subshell, int]]:
        """``(subshell, m)`` per spatial orbital."""
        return [(s, m) for s in self.subshells for m in range(s.l, -s.l - 1, -1)]

    def index(self, sub: Subshell) -> int:
        return self.subshells.index(parse_subshell(sub))


@dataclass(frozen=True)
class ModelSpec:
    """CI model: electron count, nuclear charge, cutoffs and target symmetry.

    Parameters
    ----------
    N, Z : int
        Electron count and nuclear charge.
    nl_min, nl_max : Subshell
        Subshells at or below ``nl_min`` are fully occupied, subshells above
        ``nl_max`` are empty.
    constraints : mapping Subshell -> int
        Fixed occupations of individual active subshells.
    target : (L, S, parity) or None
        ``S`` is a Fraction (half-integers allowed), parity is +1 or -1.
    """

    N: int
    Z: int
    nl_min: Subshell | None
    nl_max: Subshell
    constraints: tuple = ()
    target: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "nl_max", parse_subshell(self.nl_max))
        if self.nl_min is not None:
            object.__setattr__(self, "nl_min", parse_subshell(self.nl_min))
            if self.nl_min > self.nl_max:
                raise ValueError("cutoffs must satisfy nl_min <= nl_max")
        cons = self.constraints
        if isinstance(cons, Mapping):
            cons = cons.items()
        cons = tuple(sorted((parse_subshell(k), int(v)) for k, v in cons))
        object.__setattr__(self, "constraints", cons)
        if self.target is not None:
            L, S, p = self.target
            object.__setattr__(self, "target", (int(L), Fraction(S), int(p)))
        if not self.c_ci <= self.N <= self.t_ci:
            raise ValueError(
                f"infeasible model: need c_CI={self.c_ci} <= N={self.N} <= t_CI={self.t_ci}")

    @property
    def subshells(self) -> tuple[Subshell, ...]:
        return tuple(ordered_subshells(self.nl_max))

    @property
    def core(self) -> tuple[Subshell, ...]:
        if self.nl_min is None:
            return ()
        return tuple(s for s in self.subshells if s <= self.nl_min)

    @property
    def active(self) -> tuple[Subshell, ...]:
        return tuple(s for s in self.subshells if s not in self.core)

    @property
    def space(self) -> OrbitalSpace:
        return OrbitalSpace(self.subshells)

    @property
    def c_ci(self) -> int:
        return sum(s.dim for s in self.core)

    @property
    def t_ci(self) -> int:
        return sum(s.dim for s in self.subshells)

    def with_target(self, target) -> "ModelSpec":
        return ModelSpec(self.N, self.Z, self.nl_min, self.nl_max, self.constraints, target)

    def key(self) -> dict:
        """JSON-friendly description used for content hashing."""
        return {
            "N": self.N, "Z": self.Z,
            "nl_min": self.nl_min.label if self.nl_min else None,
            "nl_max": self.nl_max.label,
            "constraints": [[s.label, v] for s, v in self.constraints],
            "target": None if self.target is None else
            [self.target[0], str(self.target[1]), self.target[2]],
        }


def term_symbol(L: int, S, parity: int = 1) -> str:
    """Spectroscopic label, e.g. ``term_symbol(0, 3) == '7S'``."""
    mult = int(2 * Fraction(S) + 1)
    return f"{mult}{'SPDFGHIKLMNOQRTUV'[L]}" + ("o" if parity < 0 else "")


def parse_term(text: str) -> tuple[int, Fraction]:
    """``'7S'`` -> ``(0, Fraction(3))``; a trailing ``o`` marks odd parity and is ignored."""
    m = re.fullmatch(r"\s*(\d+)([SPDFGHIKLMNOQRTUV])o?\s*", text)
    if not m:
        raise ValueError(f"cannot parse term symbol {text!r}")
    return "SPDFGHIKLMNOQRTUV".index(m.group(2)), Fraction(int(m.group(1)) - 1, 2)
