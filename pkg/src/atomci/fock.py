"""Slater determinants, configurations and one-body operator lifts.

A determinant is a Python ``int`` used as a bitset: bit ``i`` set means spin
orbital ``i`` (global ordering, see :mod:`atomci.model`) is occupied.  The
orbital product is taken in ascending index order, so ``a_i^dagger`` acting
on a determinant picks up ``(-1)**(number of occupied orbitals below i)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .exact import Radical, SqrtRational
from .model import ModelSpec, OrbitalSpace, Subshell, parse_subshell

CAPACITY = 64


class CapacityError(ValueError):
    """More spin orbitals than the determinant bitset can hold."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def occupied(det: int) -> list[int]:
    """Occupied orbital indices in ascending order."""
    out = []
    i = 0
    while det:
        if det & 1:
            out.append(i)
        det >>= 1
        i += 1
    return out


def det_from_orbitals(orbs: Iterable[int]) -> int:
    det = 0
    for i in orbs:
        if det >> i & 1:
            raise ValueError(f"orbital {i} listed twice")
        det |= 1 << i
    return det


def apply_excitation(det: int, i: int, j: int):
    """``a_i^dagger a_j |det>``.

    Returns
    -------
    (int, int) or None
        New determinant and sign, or ``None`` when the result vanishes.
    """
    if not det >> j & 1:
        return None
    sign = -1 if popcount(det & ((1 << j) - 1)) & 1 else 1
    det ^= 1 << j
    if det >> i & 1:
        return None
    if popcount(det & ((1 << i) - 1)) & 1:
        sign = -sign
    return det | (1 << i), sign


def annihilate(det: int, j: int):
    """``a_j |det>`` as ``(det', sign)`` or ``None``."""
    if not det >> j & 1:
        return None
    sign = -1 if popcount(det & ((1 << j) - 1)) & 1 else 1
    return det ^ (1 << j), sign


def create(det: int, i: int):
    """``a_i^dagger |det>`` as ``(det', sign)`` or ``None``."""
    if det >> i & 1:
        return None
    sign = -1 if popcount(det & ((1 << i) - 1)) & 1 else 1
    return det | (1 << i), sign


# ---------------------------------------------------------------------------
# configurations and determinant spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    """Per-subshell occupation numbers over an ordered list of subshells."""

    subshells: tuple[Subshell, ...]
    occupations: tuple[int, ...]

    def __post_init__(self):
        subs = tuple(parse_subshell(s) for s in self.subshells)
        occ = tuple(int(d) for d in self.occupations)
        if len(subs) != len(occ):
            raise ValueError("one occupation per subshell required")
        for s, d in zip(subs, occ):
            if not 0 <= d <= s.dim:
                raise ValueError(f"occupation {d} out of range for {s}")
        object.__setattr__(self, "subshells", subs)
        object.__setattr__(self, "occupations", occ)
        OrbitalSpace(subs)  # validates ordering

    @property
    def N(self) -> int:
        return sum(self.occupations)

    @property
    def space(self) -> OrbitalSpace:
        return OrbitalSpace(self.subshells)

    @property
    def dim(self) -> int:
        return math.prod(math.comb(s.dim, d) for s, d in zip(self.subshells, self.occupations))

    def occupation(self, sub) -> int:
        sub = parse_subshell(sub)
        return self.occupations[self.subshells.index(sub)] if sub in self.subshells else 0

    def label(self, skip: Iterable[Subshell] = ()) -> str:
        skip = set(parse_subshell(s) for s in skip)
        return " ".join(f"{s.label}{d}" for s, d in zip(self.subshells, self.occupations)
                        if d and s not in skip)

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class FullSpace:
    """All ``N``-particle determinants over ``norb`` spin orbitals."""

    norb: int
    N: int

    @property
    def dim(self) -> int:
        return math.comb(self.norb, self.N)


class DeterminantIndex:
    """Ordered determinant list with its inverse map.

    Determinants are ordered lexicographically by their ascending tuples of
    occupied orbitals (the order of :func:`itertools.combinations`).  For a
    configuration this is the product order over subshells.
    """

    def __init__(self, dets: Sequence[int]):
        self.dets = list(dets)
        self.index = {d: k for k, d in enumerate(self.dets)}
        if len(self.index) != len(self.dets):
            raise ValueError("duplicate determinants")

    def __len__(self):
        return len(self.dets)

    def __getitem__(self, k):
        return self.dets[k]

    def __iter__(self):
        return iter(self.dets)

    def position(self, det: int) -> int:
        return self.index[det]


def _combos_to_dets(combos) -> list[int]:
    return [det_from_orbitals(c) for c in combos]


def index_determinants(space) -> DeterminantIndex:
    """Enumerate the determinants of a :class:`Configuration` or :class:`FullSpace`.

    Raises
    ------
    CapacityError
        If the space has more than 64 spin orbitals.
    """
    if isinstance(space, Configuration):
        norb = space.space.norb
        if norb > CAPACITY:
            raise CapacityError(f"{norb} spin orbitals exceed capacity {CAPACITY}")
        parts = []
        for off, s, d in zip(space.space.offsets, space.subshells, space.occupations):
            parts.append(list(itertools.combinations(range(off, off + s.dim), d)))
        dets = [det_from_orbitals(itertools.chain.from_iterable(p))
                for p in itertools.product(*parts)]
        return DeterminantIndex(dets)
    if isinstance(space, FullSpace):
        if space.norb > CAPACITY:
            raise CapacityError(f"{space.norb} spin orbitals exceed capacity {CAPACITY}")
        return DeterminantIndex(_combos_to_dets(itertools.combinations(range(space.norb), space.N)))
    if isinstance(space, DeterminantIndex):
        return space
    raise TypeError(f"unsupported space {type(space).__name__}")


def enumerate_configurations(spec: ModelSpec) -> list[Configuration]:
    """All occupation vectors allowed by the model cutoffs and constraints.

    Configurations are returned in lexicographic order of the occupation
    vector over the model's subshells (descending on earlier subshells).
    """
    subs = spec.subshells
    core = set(spec.core)
    fixed = dict(spec.constraints)
    ranges = []
    for s in subs:
        if s in core:
            ranges.append([s.dim])
        elif s in fixed:
            if not 0 <= fixed[s] <= s.dim:
                raise ValueError(f"constraint on {s} out of range")
            ranges.append([fixed[s]])
        else:
            ranges.append(list(range(s.dim, -1, -1)))
    out = []

    def rec(k, left, acc):
        if k == len(subs):
            if left == 0:
                out.append(Configuration(subs, tuple(acc)))
            return
        cap = sum(r[0] for r in ranges[k + 1:])
        for d in ranges[k]:
            if d <= left and left - d <= cap:
                rec(k + 1, left - d, acc + [d])

    rec(0, spec.N, [])
    return out


def exact_partition_cost(g: Sequence[int], N: int, p: int) -> Fraction:
    """``C(sum g, N)**p / sum over partitions of prod_j C(g_j, n_j)**p``."""
    if p < 1 or not 0 <= N <= sum(g):
        raise ValueError("need p >= 1 and 0 <= N <= sum(g)")
    # polynomial product over subshells, coefficient of x^N
    poly = [1]
    for gj in g:
        term = [math.comb(gj, k) ** p for k in range(gj + 1)]
        new = [0] * (len(poly) + gj)
        for a, ca in enumerate(poly):
            for b, cb in enumerate(term):
                new[a + b] += ca * cb
        poly = new
    return Fraction(math.comb(sum(g), N) ** p, poly[N])


# ---------------------------------------------------------------------------
# sparse operators with exact or float entries
# ---------------------------------------------------------------------------

def _is_zero(v) -> bool:
    return not v


class ManyBodyOperator:
    """Sparse square matrix stored as a list of row dictionaries.

    Entries may be ints, Fractions, :class:`~atomci.exact.Radical` or floats;
    arithmetic stays exact as long as the inputs are exact.
    """

    __slots__ = ("rows", "dim")

    def __init__(self, dim: int, rows=None):
        self.dim = dim
        self.rows = rows if rows is not None else [dict() for _ in range(dim)]

    @classmethod
    def identity(cls, dim: int, value=1):
        return cls(dim, [{k: value} for k in range(dim)] if value else None)

    def copy(self):
        return ManyBodyOperator(self.dim, [dict(r) for r in self.rows])

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r].get(c, 0)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def _check(self, other):
        if not isinstance(other, ManyBodyOperator):
            raise TypeError("operand must be a ManyBodyOperator")
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        self._check(other)
        rows = []
        for ra, rb in zip(self.rows, other.rows):
            r = dict(ra)
            for c, v in rb.items():
                w = r.get(c, 0) + v
                if _is_zero(w):
                    r.pop(c, None)
                else:
                    r[c] = w
            rows.append(r)
        return ManyBodyOperator(self.dim, rows)

    def __neg__(self):
        return ManyBodyOperator(self.dim, [{c: -v for c, v in r.items()} for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        rows = []
        for r in self.rows:
            rows.append({c: v * s for c, v in r.items() if not _is_zero(v * s)})
        return ManyBodyOperator(self.dim, rows)

    def __matmul__(self, other):
        self._check(other)
        rows = []
        for ra in self.rows:
            out = {}
            for k, a in ra.items():
                for c, b in other.rows[k].items():
                    out[c] = out.get(c, 0) + a * b
            rows.append({c: v for c, v in out.items() if not _is_zero(v)})
        return ManyBodyOperator(self.dim, rows)

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse vector ``{index: value}``."""
        out = {}
        for r, row in enumerate(self.rows):
            acc = 0
            hit = False
            for c, v in row.items():
                x = vec.get(c)
                if x is not None:
                    acc = acc + v * x
                    hit = True
            if hit and not _is_zero(acc):
                out[r] = acc
        return out

    def transpose(self):
        rows = [dict() for _ in range(self.dim)]
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                rows[c][r] = v
        return ManyBodyOperator(self.dim, rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, ManyBodyOperator):
            return NotImplemented
        return self.dim == other.dim and (self - other).is_zero()

    __hash__ = None

    def max_abs(self) -> float:
        return max((abs(float(v)) for r in self.rows for v in r.values()), default=0.0)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.dim, self.dim))
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                a[r, c] = float(v)
        return a

    def to_scipy(self) -> sp.csr_matrix:
        ri, ci, vals = [], [], []
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                ri.append(r)
                ci.append(c)
                vals.append(float(v))
        return sp.csr_matrix((vals, (ri, ci)), shape=(self.dim, self.dim))

    def diagonal(self) -> list:
        return [r.get(k, 0) for k, r in enumerate(self.rows)]


def lift_one_body(b, space, offset: int = 0) -> ManyBodyOperator:
    """Second-quantized lift ``sum_ij b[i][j] a_i^dagger a_j``.

    Parameters
    ----------
    b : square array-like
        Single-particle matrix; exact entries (int, Fraction, Radical) are kept
        exact.  Either a nested sequence or a numpy array.
    space : Configuration, FullSpace or DeterminantIndex
    offset : int
        Index of the first orbital ``b`` refers to; lets a subshell-sized
        ``b`` act on a larger orbital list.
    """
    idx = index_determinants(space)
    if isinstance(b, np.ndarray):
        nb = b.shape[0]
        if b.ndim != 2 or b.shape[1] != nb:
            raise ValueError("b must be square")
        entries = [(i, j, b[i, j].item() if hasattr(b[i, j], "item") else b[i, j])
                   for i in range(nb) for j in range(nb) if b[i, j]]
    else:
        nb = len(b)
        if any(len(row) != nb for row in b):
            raise ValueError("b must be square")
        entries = [(i, j, b[i][j]) for i in range(nb) for j in range(nb) if not _is_zero(b[i][j])]
    norb = _space_norb(space)
    if norb is not None and offset + nb > norb:
        raise ValueError(f"b has dimension {nb}, space has {norb} orbitals")
    op = ManyBodyOperator(len(idx))
    for col, det in enumerate(idx.dets):
        for i, j, v in entries:
            res = apply_excitation(det, i + offset, j + offset)
            if res is None:
                continue
            d2, s = res
            row = idx.index.get(d2)
            if row is None:
                raise ValueError("operator leaves the determinant space")
            r = op.rows[row]
            w = r.get(col, 0) + (v if s > 0 else -v)
            if _is_zero(w):
                r.pop(col, None)
            else:
                r[col] = w
    return op


def _space_norb(space):
    if isinstance(space, Configuration):
        return space.space.norb
    if isinstance(space, FullSpace):
        return space.norb
    return None


# ---------------------------------------------------------------------------
# states and the tensor-product embedding
# ---------------------------------------------------------------------------

def coeff_square(c):
    """Exact square of a coefficient when possible."""
    if isinstance(c, SqrtRational):
        return c.square
    return c * c


class SymmetryAdaptedState:
    """Sparse determinant expansion ``{det bitset: coefficient}`` with labels.

    ``labels`` holds ``(L, S, ML, MS, parity)`` where known; ``provenance``
    records the configuration and coupling path that produced the state.
    """

    __slots__ = ("coeffs", "labels", "provenance")

    def __init__(self, coeffs: dict, labels=None, provenance=None):
        self.coeffs = {d: c for d, c in coeffs.items() if c}
        self.labels = labels
        self.provenance = provenance

    def norm_sq(self):
        total = 0
        for c in self.coeffs.values():
            total = total + coeff_square(c)
        return total

    def dot(self, other) -> float:
        a, b = (self, other) if len(self.coeffs) <= len(other.coeffs) else (other, self)
        return float(sum(float(c) * float(b.coeffs[d]) for d, c in a.coeffs.items() if d in b.coeffs))

    def float_coeffs(self) -> dict:
        return {d: float(c) for d, c in self.coeffs.items()}

    def to_vector(self, index: DeterminantIndex) -> np.ndarray:
        v = np.zeros(len(index))
        for d, c in self.coeffs.items():
            v[index.position(d)] = float(c)
        return v

    def __repr__(self):
        return f"SymmetryAdaptedState({len(self.coeffs)} dets, labels={self.labels})"


def embed_tensor_product(states: Sequence, config: Configuration) -> SymmetryAdaptedState:
    """Map a product of per-subshell states to an ``N``-particle state.

    ``states`` holds one state per occupied subshell of ``config`` (or one per
    subshell, with ``None`` for empty ones).  Each state is a mapping (or a
    :class:`SymmetryAdaptedState`) from local bitsets over the subshell's
    ``2(2l+1)`` spin orbitals to coefficients.  Because subshells occupy
    contiguous ascending index ranges, the product of local determinants is
    the global determinant with sign +1, and coefficients multiply without
    any extra factor.
    """
    occ_idx = [k for k, d in enumerate(config.occupations) if d]
    states = list(states)
    if len(states) == len(config.subshells) and len(occ_idx) != len(states):
        states = [states[k] for k in occ_idx]
    if len(states) != len(occ_idx):
        raise ValueError("one state per occupied subshell required")
    offsets = config.space.offsets
    current = {0: 1}
    for k, st in zip(occ_idx, states):
        coeffs = st.coeffs if isinstance(st, SymmetryAdaptedState) else st
        sub, d = config.subshells[k], config.occupations[k]
        nxt = {}
        for local, c in coeffs.items():
            if popcount(local) != d or local >> sub.dim:
                raise ValueError(f"state on {sub} does not have {d} particles in {sub.dim} orbitals")
            shifted = local << offsets[k]
            for g, cg in current.items():
                nxt[g | shifted] = cg * c
        current = nxt
    return SymmetryAdaptedState(current)
