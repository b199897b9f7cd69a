"""Slater-type orbitals: Laguerre radial forms, orthonormalization, real harmonics.

The orbitals are

    psi_{nlm}(x) = s_{nl} r^l Y_{lm} (sum_i b_{nl,i} c_{nl,i} r^i) exp(-Z_{nl} r / n)

where ``b`` are the coefficients of the associated Laguerre polynomial
``L^{2l+1}_{n-l-1}(2r/n)``, ``c`` are fixed by orthogonality to the lower
subshells of the same ``l`` and ``s`` normalizes.  For the Coulomb integrals
the angular part is replaced by real Cartesian harmonics ``Z_{lm}(x)``
(polynomials of degree ``l``) related to ``r^l Y_{lm}`` by fixed unitaries.

``s`` is the radial normalization only; the spherical/real harmonics carry
their own ``1/sqrt(4 pi)``-type factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import special

from .exact import Radical
from .model import Subshell, parse_subshell


class DegenerateBasisError(ValueError):
    """Orthogonalization system is numerically rank deficient."""


# --- Laguerre coefficients and Hankel matrices ---------------------------------

@lru_cache(maxsize=None)
def laguerre_coefficients(n: int, l: int) -> tuple[Fraction, ...]:
    """``b_{nl,i} = C(n+l, 2l+1+i) (-2/n)^i / i!`` for ``i = 0 .. n-l-1``."""
    return tuple(Fraction(math.comb(n + l, 2 * l + 1 + i)) * Fraction(-2, n) ** i
                 / math.factorial(i) for i in range(n - l))


def hankel_matrix(n: int, k: int, l: int, z_n: float, z_k: float) -> np.ndarray:
    """Moment matrix ``H^l_{nk}`` of shape ``(n-l, k-l)``.

    Entries are ``a_{i+j}(lam) = (i+j+2l+2)! / lam^(i+j+2l+3)`` with
    ``lam = z_n/n + z_k/k``.
    """
    lam = z_n / n + z_k / k
    e = np.add.outer(np.arange(n - l), np.arange(k - l)) + 2 * l + 2
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(special.gammaln(e + 1) - (e + 1) * math.log(lam))


# --- real solid harmonics ----------------------------------------------------------

@dataclass(frozen=True)
class RealHarmonic:
    """Real harmonic ``Z_{lm}(x) = norm * sum_p coeffs[p] x^p`` with ``|p|_1 = l``.

    ``norm`` is the irrational prefactor, ``coeffs`` are exact rationals.
    """

    l: int
    index: int
    label: str
    norm: float
    coeffs: tuple  # ((p1, p2, p3), Fraction) pairs

    def monomials(self) -> dict[tuple[int, int, int], float]:
        return {p: self.norm * float(c) for p, c in self.coeffs}

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros(x.shape[0])
        for p, c in self.coeffs:
            out += float(c) * x[:, 0] ** p[0] * x[:, 1] ** p[1] * x[:, 2] ** p[2]
        return self.norm * out


_F = Fraction


def _harmonic_table():
    c1 = 0.5 * math.sqrt(3 / math.pi)
    c2 = 0.25 * math.sqrt(15 / math.pi)
    return {
        0: [("s", 1 / math.sqrt(4 * math.pi), {(0, 0, 0): _F(1)})],
        1: [("pz", c1, {(0, 0, 1): _F(1)}),
            ("px", c1, {(1, 0, 0): _F(1)}),
            ("py", c1, {(0, 1, 0): _F(1)})],
        2: [("d0", c2 / math.sqrt(3), {(0, 0, 2): _F(2), (2, 0, 0): _F(-1), (0, 2, 0): _F(-1)}),
            ("dz", c2, {(1, 1, 0): _F(2)}),
            ("dm", c2, {(2, 0, 0): _F(1), (0, 2, 0): _F(-1)}),
            ("dx", c2, {(0, 1, 1): _F(2)}),
            ("dy", c2, {(1, 0, 1): _F(2)})],
    }


_HARMONICS = _harmonic_table()


def real_harmonics(l: int) -> list[RealHarmonic]:
    """Real Cartesian harmonics of degree ``l`` in the fixed order.

    ``l=1``: (pz, px, py); ``l=2``: (d0, dz, dm, dx, dy).
    """
    if l not in _HARMONICS:
        raise ValueError(f"real harmonics implemented for l <= 2, got {l}")
    return [RealHarmonic(l, a, name, norm, tuple(sorted(c.items())))
            for a, (name, norm, c) in enumerate(_HARMONICS[l])]


# Unitaries Z_{la} = r^l sum_m u[a, m] Y_{lm}, columns m = l, l-1, ..., -l.
# Entries are (re, im) pairs of integers or sqrt(2); global factor 1/sqrt(2).
_R2 = Radical.sqrt(2)
_U_EXACT = {
    0: ([[(1, 0)]], False),
    1: ([[(0, 0), (_R2, 0), (0, 0)],
         [(-1, 0), (0, 0), (1, 0)],
         [(0, 1), (0, 0), (0, 1)]], True),
    2: ([[(0, 0), (0, 0), (_R2, 0), (0, 0), (0, 0)],
         [(0, -1), (0, 0), (0, 0), (0, 0), (0, 1)],
         [(1, 0), (0, 0), (0, 0), (0, 0), (1, 0)],
         [(0, 0), (0, 1), (0, 0), (0, 1), (0, 0)],
         [(0, 0), (-1, 0), (0, 0), (1, 0), (0, 0)]], True),
}


def unitary_exact(l: int) -> list[list[tuple[Radical, Radical]]]:
    """Exact ``U_l`` as nested ``(re, im)`` pairs of :class:`Radical`."""
    rows, halved = _U_EXACT[l]
    f = Radical.sqrt(Fraction(1, 2)) if halved else Radical.rational(1)
    return [[(f * re, f * im) for re, im in row] for row in rows]


def unitary(l: int) -> np.ndarray:
    """``U_l`` as a complex array (rows: real harmonics, columns: m descending)."""
    return np.array([[complex(float(re), float(im)) for re, im in row]
                     for row in unitary_exact(l)])


# --- the basis ------------------------------------------------------------------------

class STOBasis:
    """Orthonormalized dilated Slater orbitals for a list of subshells.

    Parameters
    ----------
    subshells : sequence of Subshell or str
        For every ``(n, l)`` all ``(k, l)`` with ``l < k < n`` must be present.
    exponents : sequence or mapping
        Dilation parameters ``Z_{nl} > 0``, aligned with ``subshells``.

    Spatial orbitals are numbered subshell by subshell; inside a subshell the
    real harmonics follow :func:`real_harmonics` order.
    """

    def __init__(self, subshells: Sequence, exponents):
        subs = tuple(parse_subshell(s) for s in subshells)
        if list(subs) != sorted(set(subs)):
            raise ValueError("subshells must be distinct and in (n, l) order")
        if isinstance(exponents, Mapping):
            exponents = [exponents[s] if s in exponents else exponents[s.label] for s in subs]
        z = tuple(float(x) for x in exponents)
        if len(z) != len(subs):
            raise ValueError("one exponent per subshell required")
        if not all(x > 0 and math.isfinite(x) for x in z):
            raise ValueError("exponents must be positive and finite")
        self.subshells = subs
        self.exponents = z
        self.b = {s: laguerre_coefficients(s.n, s.l) for s in subs}
        self.c: dict[Subshell, np.ndarray] = {}
        self.s: dict[Subshell, float] = {}
        self._orthonormalize()
        self.d = {s: np.array([float(b) for b in self.b[s]]) * self.c[s] for s in subs}
        self.orbitals = [(s, h) for s in subs for h in real_harmonics(s.l)]

    # -- construction --
    def exponent(self, sub) -> float:
        return self.exponents[self.subshells.index(parse_subshell(sub))]

    def alpha(self, sub) -> float:
        """Radial decay constant ``Z_{nl}/n``."""
        sub = parse_subshell(sub)
        return self.exponent(sub) / sub.n

    def _orthonormalize(self):
        for l in sorted({s.l for s in self.subshells}):
            family = [s for s in self.subshells if s.l == l]
            for k, sub in enumerate(family):
                if sub.n != l + 1 + k:
                    raise ValueError(f"{sub.label} needs all lower subshells with l={l}")
                bn = np.diag([float(b) for b in self.b[sub]])
                if k == 0:
                    c = np.ones(1)
                else:
                    rows = []
                    for low in family[:k]:
                        bk = np.diag([float(b) for b in self.b[low]])
                        h = hankel_matrix(sub.n, low.n, l, self.exponent(sub), self.exponent(low))
                        rows.append(bn @ h @ bk @ self.c[low])
                    c = _orthogonal_complement(np.array(rows))
                h = hankel_matrix(sub.n, sub.n, l, self.exponent(sub), self.exponent(sub))
                norm_sq = c @ bn @ h @ bn @ c
                if not (np.isfinite(norm_sq) and norm_sq > 0):
                    raise DegenerateBasisError(f"cannot normalize {sub.label}")
                self.c[sub] = c
                self.s[sub] = 1.0 / math.sqrt(norm_sq)

    # -- accessors --
    @property
    def nspatial(self) -> int:
        return len(self.orbitals)

    def labels(self) -> list[str]:
        return [f"{s.n}{h.label}" if s.l else s.label for s, h in self.orbitals]

    def radial_polynomial(self, sub) -> np.ndarray:
        """Coefficients of ``s * r^l * sum_i d_i r^i`` in ascending powers of ``r``."""
        sub = parse_subshell(sub)
        return np.concatenate([np.zeros(sub.l), self.s[sub] * self.d[sub]])

    def radial(self, sub, r) -> np.ndarray:
        sub = parse_subshell(sub)
        r = np.asarray(r, dtype=float)
        return npoly.polyval(r, self.radial_polynomial(sub)) * np.exp(-self.alpha(sub) * r)

    def __call__(self, k: int, x) -> np.ndarray:
        """Value of real spatial orbital ``k`` at Cartesian points ``x`` (shape (P, 3))."""
        sub, h = self.orbitals[k]
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        poly = self.s[sub] * npoly.polyval(r, self.d[sub])
        return h(x) * poly * np.exp(-self.alpha(sub) * r)


def _orthogonal_complement(rows: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the given rows, leading nonzero entry positive."""
    ncols = rows.shape[1]
    if not np.all(np.isfinite(rows)):
        raise DegenerateBasisError("orthogonalization constraints overflow")
    scale = np.linalg.norm(rows, axis=1, keepdims=True)
    u, sv, vt = np.linalg.svd(rows / scale)
    if len(sv) < ncols - 1 or sv[ncols - 2] < 1e-12 * sv[0]:
        raise DegenerateBasisError("orthogonalization constraints are rank deficient")
    c = vt[-1]
    lead = np.flatnonzero(np.abs(c) > 1e-14 * np.abs(c).max())[0]
    return c if c[lead] > 0 else -c


# --- one-body integrals ----------------------------------------------------------

def _moment_integral(poly: np.ndarray, lam: float) -> float:
    """``int_0^inf p(r) exp(-lam r) dr`` for ascending coefficients ``poly``."""
    n = np.arange(len(poly))
    log_m = np.array([math.lgamma(k + 1) for k in n]) - (n + 1) * math.log(lam)
    return float(np.dot(poly, np.exp(log_m)))


def radial_one_body(basis: STOBasis, a, b, Z: float) -> float:
    """``<R_a| -1/2 Delta - Z/r |R_b>`` for two subshells with the same ``l``."""
    a, b = parse_subshell(a), parse_subshell(b)
    if a.l != b.l:
        return 0.0
    l = a.l
    qa, qb = basis.radial_polynomial(a), basis.radial_polynomial(b)
    al, be = basis.alpha(a), basis.alpha(b)
    lam = al + be
    # R' = (Q' - alpha Q) e^{-alpha r}
    da = npoly.polysub(npoly.polyder(qa), al * qa) if len(qa) > 1 else -al * qa
    db = npoly.polysub(npoly.polyder(qb), be * qb) if len(qb) > 1 else -be * qb
    r2 = np.array([0.0, 0.0, 1.0])
    kinetic = 0.5 * _moment_integral(npoly.polymul(npoly.polymul(da, db), r2), lam)
    prod = npoly.polymul(qa, qb)
    if l:
        kinetic += 0.5 * l * (l + 1) * _moment_integral(prod, lam)
    potential = -Z * _moment_integral(npoly.polymul(prod, [0.0, 1.0]), lam)
    return kinetic + potential


def radial_overlap(basis: STOBasis, a, b) -> float:
    a, b = parse_subshell(a), parse_subshell(b)
    if a.l != b.l:
        return 0.0
    prod = npoly.polymul(basis.radial_polynomial(a), basis.radial_polynomial(b))
    return _moment_integral(npoly.polymul(prod, [0.0, 0.0, 1.0]), basis.alpha(a) + basis.alpha(b))


def one_body_integral(basis: STOBasis, i: int, j: int, Z: float) -> float:
    """``<psi_i| -1/2 Delta - Z/r |psi_j>`` between real spatial orbitals."""
    (sa, ha), (sb, hb) = basis.orbitals[i], basis.orbitals[j]
    if sa.l != sb.l or ha.index != hb.index:
        return 0.0
    return radial_one_body(basis, sa, sb, Z)


def one_body_matrix(basis: STOBasis, Z: float) -> np.ndarray:
    """Full ``K x K`` matrix of :func:`one_body_integral`.

    The matrix is diagonal in the angular index, so it is the same whether
    the orbitals are read as real harmonics or as ``Y_{lm}``.
    """
    K = basis.nspatial
    out = np.zeros((K, K))
    radial = {}
    for i, (sa, ha) in enumerate(basis.orbitals):
        for j, (sb, hb) in enumerate(basis.orbitals):
            if sa.l == sb.l and ha.index == hb.index:
                key = (sa, sb)
                if key not in radial:
                    radial[key] = radial_one_body(basis, sa, sb, Z)
                out[i, j] = radial[key]
    return out


def kinetic_matrix(basis: STOBasis) -> np.ndarray:
    """Kinetic part of :func:`one_body_matrix` (nuclear charge zero)."""
    return one_body_matrix(basis, 0.0)


# --- pair products ----------------------------------------------------------------

@dataclass(frozen=True)
class PairProduct:
    """``f(x) = sum_nu r^nu (sum_q c[nu, q] x^q) exp(-lam r)``.

    Stored factorized: ``radial[nu]`` (including both ``s`` factors) times
    the angular polynomial ``angular`` (including the harmonic prefactors).
    """

    lam: float
    radial: np.ndarray
    angular: dict

    def coefficients(self) -> dict[tuple[int, tuple[int, int, int]], float]:
        return {(nu, q): float(rv) * av for nu, rv in enumerate(self.radial)
                for q, av in self.angular.items() if rv != 0 and av != 0}

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=1)
        ang = np.zeros(len(x))
        for q, c in self.angular.items():
            ang += c * x[:, 0] ** q[0] * x[:, 1] ** q[1] * x[:, 2] ** q[2]
        return ang * npoly.polyval(r, self.radial) * np.exp(-self.lam * r)


def monomial_product(a: Mapping, b: Mapping) -> dict:
    """Convolution of two monomial coefficient maps."""
    out: dict = {}
    for p, x in a.items():
        for q, y in b.items():
            key = (p[0] + q[0], p[1] + q[1], p[2] + q[2])
            out[key] = out.get(key, 0) + x * y
    return {k: v for k, v in sorted(out.items()) if v != 0}


def pair_product(basis: STOBasis, i: int, j: int) -> PairProduct:
    """Expansion of ``psi_i * conj(psi_j)`` for real orbitals ``i, j``."""
    (sa, ha), (sb, hb) = basis.orbitals[i], basis.orbitals[j]
    radial = basis.s[sa] * basis.s[sb] * npoly.polymul(basis.d[sa], basis.d[sb])
    return PairProduct(basis.alpha(sa) + basis.alpha(sb), radial,
                       monomial_product(ha.monomials(), hb.monomials()))
