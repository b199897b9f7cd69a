"""Projected Hamiltonians, ground-state energies and exponent optimization.

A :class:`Problem` holds everything that does not depend on the exponents:
the symmetry subspace, its pair matrices folded onto integrals
(:class:`~atomci.rdm.RDMStack`) and the Coulomb plan for exactly the
integrals those matrices touch.  An energy evaluation then rebuilds the STO
basis, evaluates the one-body matrix and the planned Coulomb integrals and
diagonalizes the small subspace Hamiltonian.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .coulomb import CoulombPlan, CoulombTensor
from .lsdecomp import SymmetrySubspace, reference_configuration, target_subspace
from .model import ModelSpec, Subshell, parse_subshell
from .rdm import RDMStack, build_rdm_stack
from .sto import STOBasis, kinetic_matrix, one_body_matrix

log = logging.getLogger(__name__)

IMAG_TOL = 1e-12
SYM_TOL = 1e-10


# ---------------------------------------------------------------------------
# assembly and diagonalization
# ---------------------------------------------------------------------------

def _coulomb_values(stack: RDMStack, coulomb) -> np.ndarray:
    if isinstance(coulomb, CoulombTensor):
        return np.array([coulomb[q] for q in stack.quadruples])
    v = np.asarray(coulomb, dtype=float)
    if v.ndim == 4:
        return np.array([v[q] for q in stack.quadruples])
    if v.shape != (len(stack.quadruples),):
        raise ValueError("Coulomb values are not aligned with the stack's quadruples")
    return v


def _real_symmetric(H: np.ndarray, scale: float) -> np.ndarray:
    if H.size and np.abs(H.imag).max() > IMAG_TOL * max(scale, 1.0):
        raise ValueError(f"Hamiltonian is not real (max imaginary part {np.abs(H.imag).max():.3e})")
    H = H.real
    if H.size and np.abs(H - H.T).max() > SYM_TOL * max(scale, 1.0):
        raise ValueError("Hamiltonian is not symmetric")
    return 0.5 * (H + H.T)


def assemble_hamiltonian(stack: RDMStack, h0: np.ndarray, coulomb, parts: bool = False):
    """``H[a, b] = tr(h0 gamma_ab) + sum (ij|kl) Gamma_ab[(k,l),(i,j)]``.

    Parameters
    ----------
    stack : RDMStack
        Pair matrices in the real-harmonic basis.
    h0 : (K, K) array
        One-body matrix in the same basis.
    coulomb : CoulombTensor, dense ``(K,K,K,K)`` array or values aligned with
        ``stack.quadruples``.
    parts : bool
        Also return the one- and two-body matrices separately.

    Raises
    ------
    ValueError
        If the stack is not in the real basis, or the result is not real and
        symmetric to tolerance.
    """
    if stack.basis != "real":
        raise ValueError(f"pair matrices are in the {stack.basis} basis; integrals are real-basis")
    h0 = np.asarray(h0)
    if h0.shape != (stack.nspatial, stack.nspatial):
        raise ValueError("one-body matrix does not match the orbital count")
    H1 = stack.one_body_matrix(h0)
    H2 = stack.two_body_matrix(_coulomb_values(stack, coulomb))
    scale = float(np.abs(H1).max(initial=0) + np.abs(H2).max(initial=0))
    H1, H2 = _real_symmetric(H1, scale), _real_symmetric(H2, scale)
    H = H1 + H2
    return (H, H1, H2) if parts else H


def eigensolve(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
    H = np.asarray(H, dtype=float)
    if H.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    return np.linalg.eigh(H)


# ---------------------------------------------------------------------------
# the exponent-independent problem
# ---------------------------------------------------------------------------

def _used_subshells(subspace: SymmetrySubspace, subshells) -> tuple[Subshell, ...]:
    """Subshells whose exponent can change the energy.

    A subshell matters if some configuration occupies it or a higher subshell
    of the same ``l`` that is orthogonalized against it.
    """
    occupied = set()
    for conf in subspace.configurations():
        occupied.update(s for s, d in zip(conf.subshells, conf.occupations) if d)
    return tuple(s for s in subshells
                 if any(o.l == s.l and o.n >= s.n for o in occupied))


class Problem:
    """Exponent-independent data of one model.

    Parameters
    ----------
    spec : ModelSpec
        Must carry a target symmetry.
    subspace : SymmetrySubspace, optional
        Defaults to :func:`~atomci.lsdecomp.target_subspace` of ``spec``.
    stack : RDMStack, optional
        Precomputed (e.g. cached) pair matrices for ``subspace``.
    """

    def __init__(self, spec: ModelSpec, subspace: SymmetrySubspace | None = None,
                 stack: RDMStack | None = None):
        self.spec = spec
        self.subspace = target_subspace(spec) if subspace is None else subspace
        if self.subspace.dim == 0:
            raise ValueError(f"empty symmetry subspace for {spec.key()}")
        gram = self.subspace.gram()
        if np.abs(gram - np.eye(len(gram))).max() > 1e-12:
            raise ValueError("subspace basis is not orthonormal")
        self.subshells = spec.subshells
        self.stack = build_rdm_stack(self.subspace.states, self.subshells) if stack is None else stack
        if self.stack.dim != self.subspace.dim:
            raise ValueError("pair matrices do not match the subspace")
        self.used = _used_subshells(self.subspace, self.subshells)
        self._plan = None

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def plan(self) -> CoulombPlan:
        if self._plan is None:
            probe = STOBasis(self.subshells, [float(self.spec.Z)] * len(self.subshells))
            self._plan = CoulombPlan(probe, self.stack.quadruples)
        return self._plan

    def full_exponents(self, exponents) -> dict:
        """Exponents for every subshell; unused ones default to a screening value."""
        if isinstance(exponents, dict):
            given = {parse_subshell(k): float(v) for k, v in exponents.items()}
        else:
            vals = list(exponents)
            if len(vals) == len(self.used):
                given = dict(zip(self.used, map(float, vals)))
            elif len(vals) == len(self.subshells):
                given = dict(zip(self.subshells, map(float, vals)))
            else:
                raise ValueError("exponent vector has the wrong length")
        out = {}
        default = slater_exponents(self.spec)
        for s in self.subshells:
            z = given.get(s)
            if z is None:
                if s in self.used:
                    raise ValueError(f"missing exponent for {s.label}")
                z = default[s]
            out[s] = z
        return out

    def basis(self, exponents) -> STOBasis:
        z = self.full_exponents(exponents)
        if any(not v > 0 for v in z.values()):
            raise ValueError("exponents must be positive")
        return STOBasis(self.subshells, [z[s] for s in self.subshells])

    def matrices(self, exponents) -> dict:
        """Kinetic, nuclear and electron-repulsion parts of the subspace Hamiltonian."""
        b = self.basis(exponents)
        T = kinetic_matrix(b)
        h = one_body_matrix(b, float(self.spec.Z))
        v = self.plan.evaluate(b)
        H, H1, H2 = assemble_hamiltonian(self.stack, h, v, parts=True)
        Hk = assemble_hamiltonian(self.stack, T, np.zeros(len(v)))
        return {"H": H, "kinetic": Hk, "nuclear": H1 - Hk, "repulsion": H2}

    def hamiltonian(self, exponents) -> np.ndarray:
        b = self.basis(exponents)
        h = one_body_matrix(b, float(self.spec.Z))
        return assemble_hamiltonian(self.stack, h, self.plan.evaluate(b))

    def energy(self, exponents) -> float:
        return float(eigensolve(self.hamiltonian(exponents))[0][0])


def energy_objective(spec_or_problem, exponents) -> float:
    """Lowest eigenvalue of the target subspace for the given exponents."""
    prob = spec_or_problem if isinstance(spec_or_problem, Problem) else Problem(spec_or_problem)
    return prob.energy(exponents)


# ---------------------------------------------------------------------------
# initial exponents
# ---------------------------------------------------------------------------

_NSTAR = {1: 1.0, 2: 2.0, 3: 3.0, 4: 3.7, 5: 4.0, 6: 4.2}


def _slater_group(s: Subshell) -> tuple:
    return (s.n, 0) if s.l <= 1 else (s.n, s.l)


def _group_order(g) -> tuple:
    # s,p groups of shell n come after the d group of shell n-1
    n, l = g
    return (n + l, n) if l else (n, n)


def slater_exponents(spec: ModelSpec) -> dict:
    """Screening-rule exponents ``Z_nl = n (Z - s) / n*`` from the reference configuration.

    Empty subshells are screened as if one electron were placed in them.
    """
    conf = reference_configuration(spec)
    occ = dict(zip(conf.subshells, conf.occupations))
    out = {}
    for s in spec.subshells:
        g = _slater_group(s)
        screen = 0.0
        for t, d in occ.items():
            if t == s:
                d -= 1
            if d <= 0:
                continue
            h = _slater_group(t)
            if h == g:
                screen += d * (0.30 if g == (1, 0) else 0.35)
            elif _group_order(h) < _group_order(g):
                if g[1] == 0 and h[0] == g[0] - 1:
                    screen += 0.85 * d
                else:
                    screen += 1.00 * d
        zeff = max(spec.Z - screen, 0.5)
        out[s] = s.n * zeff / _NSTAR[s.n]
    return out


def initial_exponents(spec: ModelSpec, preset: dict | None = None) -> dict:
    """Screening-rule exponents overridden by ``preset`` (label -> Z) where given."""
    out = slater_exponents(spec)
    for k, v in (preset or {}).items():
        sub = parse_subshell(k)
        if sub in out:
            out[sub] = float(v)
    return out


# ---------------------------------------------------------------------------
# optimization
# ---------------------------------------------------------------------------

@dataclass
class EnergyResult:
    """Outcome of an energy evaluation or optimization.

    Attributes
    ----------
    exponents : dict
        Subshell label -> exponent for the subshells that affect the energy.
    energy : float
        Lowest eigenvalue (hartree).
    eigenvalues : ndarray
        Ascending spectrum of the subspace Hamiltonian.
    eigenvector : ndarray
        Ground state in the subspace basis.
    kinetic, potential : float
        Ground-state expectations of the kinetic and total potential energy.
    """

    exponents: dict
    energy: float
    eigenvalues: np.ndarray
    eigenvector: np.ndarray
    kinetic: float
    potential: float
    evaluations: int = 1
    converged: bool = True
    message: str = ""
    labels: list = field(default_factory=list)
    blocks: list = field(default_factory=list)


def _state_labels(problem: Problem):
    core = set(problem.spec.core)
    labels, blocks = [], []
    seen: dict = {}
    for conf, path in problem.subspace.provenance:
        lab = conf.label(skip=core) or "(core)"
        labels.append(lab)
        seen[lab] = seen.get(lab, 0) + 1
        blocks.append(seen[lab])
    return labels, blocks


def evaluate(problem: Problem, exponents, evaluations: int = 1, converged=True, message="") -> EnergyResult:
    """Full result (spectrum, ground state, virial split) at fixed exponents."""
    full = problem.full_exponents(exponents)
    m = problem.matrices(full)
    w, V = eigensolve(m["H"])
    g = V[:, 0]
    if g[np.argmax(np.abs(g))] < 0:
        g = -g
    T = float(g @ m["kinetic"] @ g)
    U = float(g @ (m["nuclear"] + m["repulsion"]) @ g)
    labels, blocks = _state_labels(problem)
    return EnergyResult({s.label: full[s] for s in problem.used}, float(w[0]), w, g, T, U,
                        evaluations, converged, message, labels, blocks)


def optimize_exponents(problem: Problem, initial=None, freeze_core: bool = False,
                       fatol: float = 1e-7, max_evaluations: int | None = None,
                       restarts: int = 3, step: float = 0.05) -> EnergyResult:
    """Minimize the ground energy over the exponents by Nelder-Mead in ``log Z``.

    Parameters
    ----------
    problem : Problem
    initial : dict or sequence, optional
        Starting exponents; screening-rule values by default.
    freeze_core : bool
        Keep core-subshell exponents at their initial values.
    fatol : float
        Stop when the simplex energy spread falls below this (hartree).
    max_evaluations : int, optional
        Budget per simplex run; ``500 * dim`` by default.
    restarts : int
        Fresh simplices started from the best point while they still improve
        the energy by more than ``fatol``.
    step : float
        Initial simplex edge in log coordinates.
    """
    init = slater_exponents(problem.spec)
    if isinstance(initial, dict):
        init.update({parse_subshell(k): float(v) for k, v in initial.items()})
    elif initial is not None:
        init = problem.full_exponents(initial)
    start = problem.full_exponents(init)
    core = set(problem.spec.core)
    free = [s for s in problem.used if not (freeze_core and s in core)]
    fixed = {s: z for s, z in start.items() if s not in free}
    if not free:
        return evaluate(problem, start, 1, True, "no free exponents")
    dim = len(free)
    budget = max_evaluations or 500 * dim
    count = 0
    cache: dict = {}

    def f(x):
        nonlocal count
        key = tuple(np.round(x, 14))
        if key not in cache:
            count += 1
            z = dict(fixed)
            z.update({s: math.exp(v) for s, v in zip(free, x)})
            try:
                cache[key] = problem.energy(z)
            except (ValueError, ArithmeticError, FloatingPointError) as exc:
                log.debug("objective failed at %s: %s", z, exc)
                cache[key] = np.inf
        return cache[key]

    x = np.log([start[s] for s in free])
    best = f(x)
    converged, message = False, ""
    t0 = time.perf_counter()
    for run in range(restarts + 1):
        simplex = np.vstack([x] + [x + step * e for e in np.eye(dim)])
        res = optimize.minimize(f, x, method="Nelder-Mead", options=dict(
            initial_simplex=simplex, xatol=np.inf, fatol=fatol, maxfev=budget, adaptive=False))
        improved = best - res.fun
        if res.fun < best:
            x, best = res.x, res.fun
        converged = bool(res.success)
        message = str(res.message)
        log.info("simplex run %d: E=%.8f (%d evaluations, %.1fs)", run, best, count,
                 time.perf_counter() - t0)
        if improved <= fatol:
            break
    z = dict(fixed)
    z.update({s: math.exp(v) for s, v in zip(free, x)})
    return evaluate(problem, z, count, converged, message)


def virial_check(result: EnergyResult) -> float:
    """``2 <T> / |<V>|``; equals one at a dilation-stationary point."""
    return 2 * result.kinetic / abs(result.potential)


def configuration_weights(result: EnergyResult, per_block: bool = False) -> dict:
    """Squared ground-state components summed per active configuration.

    With ``per_block=True`` the value is the tuple of per-state weights of
    that configuration (repeated terms give several entries).
    """
    out: dict = {}
    for lab, c in zip(result.labels, result.eigenvector):
        out.setdefault(lab, []).append(float(c * c))
    if per_block:
        return {k: tuple(v) for k, v in out.items()}
    return {k: sum(v) for k, v in out.items()}
