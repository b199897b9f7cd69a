"""Angular momentum, spin and parity operators on subshell spaces.

Single-particle matrices use the spherical-harmonic basis with
Condon-Shortley phases, ordered ``(Y_l up, Y_l down, Y_{l-1} up, ...)``.
Many-body operators are one-body lifts onto the antisymmetric space
``wedge^n V_l``.  Entries are exact (:class:`~atomci.exact.Radical`); the
``y`` components carry an imaginary unit and are stored as a pair of real
and imaginary parts (:class:`ComplexOperator`).

For the exact kernel computations in :mod:`atomci.lsdecomp` a rescaled
single-particle basis ``e'_m = f_m e_m`` with ``f_l = 1`` and
``f_m = f_{m+1} / sqrt(l(l+1) - m(m+1))`` is also provided.  In that basis
``L_+`` has unit entries and ``L_-`` integer entries, so every operator of
interest has rational matrix elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import Radical
from .fock import Configuration, FullSpace, ManyBodyOperator, lift_one_body


def orbital_index(l: int, m: int, up: bool) -> int:
    """Position of ``(m, spin)`` inside the subshell's spin-orbital list."""
    return 2 * (l - m) + (0 if up else 1)


def orbital_quantum_numbers(l: int, k: int) -> tuple[int, Fraction]:
    """``(m, m_s)`` of local spin orbital ``k``."""
    return l - k // 2, Fraction(1, 2) if k % 2 == 0 else Fraction(-1, 2)


class ComplexOperator:
    """Exact operator ``re + i*im`` with :class:`ManyBodyOperator` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: ManyBodyOperator, im: ManyBodyOperator | None = None):
        self.re = re
        self.im = im if im is not None else ManyBodyOperator(re.dim)

    @property
    def dim(self):
        return self.re.dim

    def __add__(self, other):
        other = _as_complex(other)
        return ComplexOperator(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = _as_complex(other)
        return ComplexOperator(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexOperator(-self.re, -self.im)

    def __matmul__(self, other):
        other = _as_complex(other)
        re = self.re @ other.re - self.im @ other.im
        im = self.re @ other.im + self.im @ other.re
        return ComplexOperator(re, im)

    def scale(self, s):
        return ComplexOperator(self.re.scale(s), self.im.scale(s))

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __eq__(self, other):
        other = _as_complex(other)
        return (self - other).is_zero()

    __hash__ = None

    def is_real(self) -> bool:
        return self.im.is_zero()

    def to_dense(self):
        return self.re.to_dense() + 1j * self.im.to_dense()


def _as_complex(x) -> ComplexOperator:
    if isinstance(x, ComplexOperator):
        return x
    if isinstance(x, ManyBodyOperator):
        return ComplexOperator(x)
    raise TypeError("expected an operator")


def commutator(a, b):
    """``ab - ba`` for :class:`ManyBodyOperator` or :class:`ComplexOperator`."""
    if isinstance(a, ManyBodyOperator) and isinstance(b, ManyBodyOperator):
        return a @ b - b @ a
    a, b = _as_complex(a), _as_complex(b)
    return a @ b - b @ a


@dataclass(frozen=True)
class OperatorSet:
    """Angular momentum and spin matrices on one space.

    ``Lx, Ly, Sx, Sy`` are :class:`ComplexOperator`; the others are real
    :class:`ManyBodyOperator` instances.
    """

    Lx: ComplexOperator
    Ly: ComplexOperator
    Lz: ManyBodyOperator
    Sx: ComplexOperator
    Sy: ComplexOperator
    Sz: ManyBodyOperator
    Lp: ManyBodyOperator
    Lm: ManyBodyOperator
    Sp: ManyBodyOperator
    Sm: ManyBodyOperator
    L2: ManyBodyOperator
    S2: ManyBodyOperator

    @property
    def dim(self) -> int:
        return self.Lz.dim


def _zeros(k):
    return [[0] * k for _ in range(k)]


def single_particle_matrices(l: int, scaled: bool = False) -> dict[str, list]:
    """Nested-list matrices ``Lp, Lm, Lz, Sp, Sm, Sz`` on ``V_l``.

    With ``scaled=True`` the matrices are expressed in the rescaled basis
    (rational entries); otherwise entries are exact radicals.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    k = 2 * (2 * l + 1)
    Lp, Lm, Lz, Sp, Sm, Sz = (_zeros(k) for _ in range(6))
    for m in range(-l, l + 1):
        for up in (True, False):
            a = orbital_index(l, m, up)
            Lz[a][a] = Fraction(m)
            Sz[a][a] = Fraction(1, 2) if up else Fraction(-1, 2)
            if m < l:
                c = l * (l + 1) - m * (m + 1)
                b = orbital_index(l, m + 1, up)
                if scaled:
                    Lp[b][a] = Fraction(1)
                    Lm[a][b] = Fraction(c)
                else:
                    Lp[b][a] = Radical.sqrt(c)
                    Lm[a][b] = Radical.sqrt(c)
        Sp[orbital_index(l, m, True)][orbital_index(l, m, False)] = Fraction(1)
        Sm[orbital_index(l, m, False)][orbital_index(l, m, True)] = Fraction(1)
    return dict(Lp=Lp, Lm=Lm, Lz=Lz, Sp=Sp, Sm=Sm, Sz=Sz)


def scale_factors_squared(l: int) -> list[Fraction]:
    """Squares ``w_k = f_m**2`` of the rescaling per local spin orbital."""
    w = {l: Fraction(1)}
    for m in range(l - 1, -l - 1, -1):
        w[m] = w[m + 1] / (l * (l + 1) - m * (m + 1))
    return [w[l - k // 2] for k in range(2 * (2 * l + 1))]


def single_particle_operators(l: int) -> OperatorSet:
    """Operator set on ``V_l`` (one particle)."""
    return many_body_operators(l, 1)


def _build(l: int, n: int, scaled: bool):
    sp = single_particle_matrices(l, scaled=scaled)
    space = FullSpace(2 * (2 * l + 1), n)
    ops = {name: lift_one_body(mat, space) for name, mat in sp.items()}
    Lz, Sz = ops["Lz"], ops["Sz"]
    L2 = ops["Lm"] @ ops["Lp"] + Lz @ Lz + Lz
    S2 = ops["Sm"] @ ops["Sp"] + Sz @ Sz + Sz
    return ops, L2, S2


@lru_cache(maxsize=None)
def many_body_operators(l: int, n: int) -> OperatorSet:
    """Exact operator set on ``wedge^n V_l`` (orthonormal determinant basis)."""
    if not 0 <= n <= 2 * (2 * l + 1):
        raise ValueError("particle number out of range")
    ops, L2, S2 = _build(l, n, scaled=False)
    half = Fraction(1, 2)
    Lp, Lm, Sp, Sm = ops["Lp"], ops["Lm"], ops["Sp"], ops["Sm"]
    Lx = ComplexOperator((Lp + Lm).scale(half))
    Ly = ComplexOperator(ManyBodyOperator(Lp.dim), (Lm - Lp).scale(half))
    Sx = ComplexOperator((Sp + Sm).scale(half))
    Sy = ComplexOperator(ManyBodyOperator(Sp.dim), (Sm - Sp).scale(half))
    return OperatorSet(Lx, Ly, ops["Lz"], Sx, Sy, ops["Sz"], Lp, Lm, Sp, Sm, L2, S2)


@lru_cache(maxsize=None)
def scaled_operators(l: int, n: int) -> dict[str, ManyBodyOperator]:
    """Rational ladder, ``z`` and Casimir operators in the rescaled basis."""
    ops, L2, S2 = _build(l, n, scaled=True)
    ops = dict(ops)
    ops["L2"] = L2
    ops["S2"] = S2
    return ops


def casimir_from_components(ops: OperatorSet):
    """``(L_x^2 + L_y^2 + L_z^2, S_x^2 + S_y^2 + S_z^2)`` as complex operators."""
    L2 = ops.Lx @ ops.Lx + ops.Ly @ ops.Ly + ComplexOperator(ops.Lz @ ops.Lz)
    S2 = ops.Sx @ ops.Sx + ops.Sy @ ops.Sy + ComplexOperator(ops.Sz @ ops.Sz)
    return L2, S2


def configuration_parity(config: Configuration) -> int:
    """``(-1)**sum_j d_j l_j``."""
    total = sum(d * s.l for s, d in zip(config.subshells, config.occupations))
    return -1 if total % 2 else 1
