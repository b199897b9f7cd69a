"""Batch driver: configs in, reports and comparison tables out.

Three subcommands::

    atomci run CONFIG        optimize one model and print/write a report
    atomci table FILE ...    run (or read) several models and tabulate them
    atomci precompute CONFIG build and cache the symbolic data of a model

Configs, config sets and reports are JSON documents tagged with a ``schema``
string.  The exponent-independent data of a model (symmetry subspace and
folded pair matrices) is cached on disk under a content hash of the model, so
repeated runs, in particular runs that change only exponents or optimizer
settings, skip the symbolic work.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from . import data
from .angular import configuration_parity
from .fock import Configuration, SymmetryAdaptedState
from .lsdecomp import SymmetrySubspace, hund_select, reference_configuration, target_subspace
from .model import ModelSpec, parse_subshell, parse_term, term_symbol
from .rdm import CACHE_VERSION, RDMStack
from .solver import (Problem, configuration_weights, evaluate, initial_exponents,
                     optimize_exponents, slater_exponents, virial_check)

log = logging.getLogger("atomci")

CONFIG_SCHEMA = "atomci.run-config/1"
SET_SCHEMA = "atomci.config-set/1"
REPORT_SCHEMA = "atomci.run-report/1"
TABLE_SCHEMA = "atomci.table/1"
SUBSPACE_SCHEMA = "atomci.subspace/1"

MODELS = {"minimal": ("3p", "4s"), "extended": ("3p", "4d")}
INIT_MODES = ("auto", "screening", "preset", "explicit")


class ConfigError(ValueError):
    """Invalid or infeasible run configuration."""


class CacheError(RuntimeError):
    """Unreadable, stale or unwritable cache entry."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """One model run.

    Either ``element`` or both ``N`` and ``Z`` must be given.  ``model``
    ('minimal' or 'extended') fills in the cutoffs 3p/4s or 3p/4d when they
    are not set explicitly.  ``target`` is ``'hund'``, a term symbol such as
    ``'7S'`` (trailing ``o`` for odd parity) or ``[L, S, parity]``.
    """

    element: str | None = None
    N: int | None = None
    Z: int | None = None
    model: str | None = None
    nl_min: str | None = None
    nl_max: str | None = None
    constraints: dict = field(default_factory=dict)
    target: object = "hund"
    m_l: int = 0
    m_s: str | None = None
    init: str = "auto"
    preset: str | None = None
    exponents: dict | None = None
    optimize: bool = True
    fatol: float = 1e-7
    max_evaluations: int | None = None
    restarts: int = 3
    step: float = 0.05
    freeze_core: bool = False
    cache_dir: str | None = None
    output: str | None = None
    timing: bool = True
    name: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        schema = d.pop("schema", CONFIG_SCHEMA)
        if schema != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {schema!r}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {"schema": CONFIG_SCHEMA, **asdict(self)}

    def validate(self) -> None:
        if self.element is not None:
            if self.element not in data.CHARGE:
                raise ConfigError(f"unknown element {self.element!r}; known: {', '.join(data.SYMBOLS)}")
            Z = data.CHARGE[self.element]
            if self.Z not in (None, Z):
                raise ConfigError(f"Z={self.Z} contradicts element {self.element}")
        elif self.N is None or self.Z is None:
            raise ConfigError("give an element or both N and Z")
        if self.model is not None and self.model not in MODELS:
            raise ConfigError(f"model must be one of {sorted(MODELS)}")
        if self.nl_max is None and self.model is None:
            raise ConfigError("give nl_max or a model")
        if self.init not in INIT_MODES:
            raise ConfigError(f"init must be one of {INIT_MODES}")
        if self.init == "preset" and self.preset is None:
            raise ConfigError("init 'preset' needs a preset name")
        if self.preset is not None and self.preset not in data.preset_names():
            raise ConfigError(f"unknown preset {self.preset!r}; known: {', '.join(data.preset_names())}")
        if self.init == "explicit" and not self.exponents:
            raise ConfigError("init 'explicit' needs an exponents mapping")
        if not isinstance(self.constraints, dict):
            raise ConfigError("constraints must map subshell labels to occupations")
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be positive")
        if self.restarts < 0 or not self.fatol > 0 or not self.step > 0:
            raise ConfigError("restarts must be >= 0, fatol and step > 0")


def _cutoffs(cfg: RunConfig) -> tuple:
    lo, hi = MODELS.get(cfg.model, (None, None))
    return (cfg.nl_min if cfg.nl_min is not None else lo,
            cfg.nl_max if cfg.nl_max is not None else hi)


def _parse_target(target, spec: ModelSpec) -> tuple:
    if target == "hund":
        L, S = hund_select(spec)
        return L, S, configuration_parity(reference_configuration(spec))
    if isinstance(target, str):
        L, S = parse_term(target)
        return L, S, -1 if target.strip().endswith("o") else 1
    try:
        L, S, p = target
        return int(L), Fraction(S), int(p)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot parse target {target!r}") from None


def resolve_spec(cfg: RunConfig) -> ModelSpec:
    """Feasible :class:`ModelSpec` with an explicit target."""
    Z = data.CHARGE[cfg.element] if cfg.element else int(cfg.Z)
    N = Z if cfg.N is None else int(cfg.N)
    lo, hi = _cutoffs(cfg)
    try:
        spec = ModelSpec(N, Z, lo, hi, dict(cfg.constraints))
        return spec.with_target(_parse_target(cfg.target, spec))
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


def _s_occupation(spec: ModelSpec) -> int:
    return reference_configuration(spec).occupation("4s")


def starting_exponents(cfg: RunConfig, spec: ModelSpec, used=None) -> tuple[dict, str]:
    """Initial exponents (label -> Z) and a description of where they came from.

    ``init='auto'`` takes the element's preset for the reference 4s
    occupation if it covers every subshell in ``used``; otherwise it falls
    back to screening rather than mixing the two.
    """
    name = None
    if cfg.init == "preset" or (cfg.init == "auto" and cfg.preset):
        name = cfg.preset
    elif cfg.init == "auto" and cfg.element:
        name = data.default_preset(cfg.element, _s_occupation(spec))
        if name is not None and used is not None and not {s.label for s in used} <= set(data.preset(name)):
            name = None
    if cfg.init == "explicit":
        init = initial_exponents(spec, cfg.exponents)
        source = "explicit"
    elif name is not None:
        init = initial_exponents(spec, data.preset(name))
        source = f"preset:{name}"
    else:
        init = slater_exponents(spec)
        source = "screening"
    if cfg.exponents and cfg.init != "explicit":
        init.update({parse_subshell(k): float(v) for k, v in cfg.exponents.items()})
        source += "+explicit"
    return {s.label: z for s, z in init.items()}, source


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def cache_key(spec: ModelSpec, m_l: int = 0, m_s=None) -> str:
    """Content hash of everything the symbolic data depends on."""
    m_s = spec.target[1] if m_s is None else Fraction(m_s)
    payload = {"spec": spec.key(), "m_l": int(m_l), "m_s": str(m_s),
               "rdm_version": CACHE_VERSION, "subspace_schema": SUBSPACE_SCHEMA}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:32]


def _encode(x):
    if isinstance(x, tuple):
        return [_encode(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    return x


def _decode(x):
    return tuple(_decode(v) for v in x) if isinstance(x, list) else x


def subspace_to_json(sub: SymmetrySubspace) -> dict:
    """Float form of a subspace; coefficients round-trip exactly through JSON."""
    L, S, ml, ms, p = sub.labels
    states = []
    for st in sub.states:
        dets = sorted(st.coeffs)
        states.append({"dets": [format(d, "x") for d in dets],
                       "coeffs": [float(st.coeffs[d]) for d in dets]})
    prov = [{"subshells": [s.label for s in c.subshells], "occupations": list(c.occupations),
             "path": _encode(path)} for c, path in sub.provenance]
    return {"schema": SUBSPACE_SCHEMA, "labels": [L, str(S), ml, str(ms), p],
            "states": states, "provenance": prov}


def subspace_from_json(d: dict) -> SymmetrySubspace:
    if d.get("schema") != SUBSPACE_SCHEMA:
        raise CacheError(f"unsupported subspace schema {d.get('schema')!r}")
    L, S, ml, ms, p = d["labels"]
    labels = (L, Fraction(S), ml, Fraction(ms), p)
    prov = [(Configuration(tuple(e["subshells"]), tuple(e["occupations"])), _decode(e["path"]))
            for e in d["provenance"]]
    states = [SymmetryAdaptedState({int(k, 16): v for k, v in zip(e["dets"], e["coeffs"])},
                                   labels=labels, provenance=pr)
              for e, pr in zip(d["states"], prov)]
    return SymmetrySubspace(labels, states, prov)


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_or_build(spec: ModelSpec, m_l: int = 0, m_s=None, cache_dir=None) -> tuple[Problem, dict]:
    """:class:`Problem` for ``spec`` plus cache metadata ``{key, hit, seconds}``.

    A cache entry is the pair ``<key>.json`` (subspace) and ``<key>.rdm``
    (pair matrices).  Entries with a foreign header or version are refused.
    """
    t0 = time.perf_counter()
    key = cache_key(spec, m_l, m_s)
    meta = {"key": key, "hit": False, "dir": None if cache_dir is None else str(cache_dir)}
    if cache_dir is not None:
        root = Path(cache_dir)
        sub_path, rdm_path = root / f"{key}.json", root / f"{key}.rdm"
        if sub_path.exists() and rdm_path.exists():
            try:
                sub = subspace_from_json(json.loads(sub_path.read_text()))
                stack = RDMStack.load(rdm_path)
            except (ValueError, KeyError, OSError) as exc:
                raise CacheError(f"refusing cache entry {key}: {exc}") from None
            meta.update(hit=True, seconds=time.perf_counter() - t0)
            log.info("cache hit %s", key)
            return Problem(spec, sub, stack), meta
    sub = target_subspace(spec, m_l=m_l, m_s=m_s)
    if sub.dim == 0:
        raise ConfigError(f"the {term_symbol(*spec.target)} subspace of this model is empty")
    problem = Problem(spec, sub)
    if cache_dir is not None:
        try:
            root.mkdir(parents=True, exist_ok=True)
            _write_atomic(sub_path, json.dumps(subspace_to_json(sub)))
            problem.stack.save(rdm_path)
        except OSError as exc:
            raise CacheError(f"cannot write cache entry in {root}: {exc}") from None
        # continue from the stored form so warm and cold runs see identical data
        problem = Problem(spec, subspace_from_json(json.loads(sub_path.read_text())),
                          RDMStack.load(rdm_path))
    meta["seconds"] = time.perf_counter() - t0
    log.info("built %s: dim %d, %d integrals (%.2fs)", key, problem.dim,
             len(problem.stack.quadruples), meta["seconds"])
    return problem, meta


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------

@dataclass
class RunReport:
    """Result of one run; ``to_dict``/``from_dict`` round-trip losslessly."""

    config: dict
    spec: dict
    term: str
    dim: int
    energy: float
    exponents: dict
    initial_exponents: dict
    init_source: str
    spectrum: list
    weights: dict
    virial: float
    evaluations: int
    converged: bool
    message: str
    cache: dict = field(default_factory=dict)
    timing: dict | None = None

    def to_dict(self) -> dict:
        return {"schema": REPORT_SCHEMA, **asdict(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        d = dict(d)
        if d.pop("schema", None) != REPORT_SCHEMA:
            raise ValueError("not a run report")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def label(self) -> str:
        return self.config.get("name") or _default_name(self.config)


def _default_name(cfg: dict) -> str:
    who = cfg.get("element") or f"N={cfg.get('N')},Z={cfg.get('Z')}"
    cons = " ".join(f"{k}{v}" for k, v in sorted((cfg.get("constraints") or {}).items()))
    return " ".join(x for x in (who, cfg.get("model"), cons) if x)


def run(cfg: RunConfig) -> RunReport:
    """Build (or load) the symbolic data, optimize the exponents, report."""
    t0 = time.perf_counter()
    spec = resolve_spec(cfg)
    problem, meta = load_or_build(spec, cfg.m_l, cfg.m_s, cfg.cache_dir)
    t1 = time.perf_counter()
    start, source = starting_exponents(cfg, spec, problem.used)
    if cfg.optimize:
        res = optimize_exponents(problem, start, freeze_core=cfg.freeze_core, fatol=cfg.fatol,
                                 max_evaluations=cfg.max_evaluations, restarts=cfg.restarts,
                                 step=cfg.step)
    else:
        res = evaluate(problem, start)
    t2 = time.perf_counter()
    weights = configuration_weights(res, per_block=True)
    timing = {"symbolic": t1 - t0, "numeric": t2 - t1, "total": t2 - t0} if cfg.timing else None
    return RunReport(
        config=cfg.to_dict(), spec=spec.key(), term=term_symbol(*spec.target), dim=problem.dim,
        energy=res.energy, exponents=dict(res.exponents),
        initial_exponents={k: v for k, v in start.items() if k in res.exponents},
        init_source=source, spectrum=[float(x) for x in res.eigenvalues],
        weights={k: list(v) for k, v in weights.items()}, virial=virial_check(res),
        evaluations=res.evaluations, converged=res.converged, message=res.message,
        cache={"key": meta["key"], "hit": meta["hit"], "dir": meta["dir"]}, timing=timing)


def precompute(cfg: RunConfig) -> dict:
    """Populate the cache for ``cfg``; returns the cache metadata."""
    if cfg.cache_dir is None:
        raise ConfigError("precompute needs a cache directory")
    spec = resolve_spec(cfg)
    problem, meta = load_or_build(spec, cfg.m_l, cfg.m_s, cfg.cache_dir)
    return {**meta, "dim": problem.dim, "integrals": len(problem.stack.quadruples)}


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def reference(cfg: dict) -> tuple[str, float] | None:
    """Published ``(term, energy)`` for element models that have one."""
    el = cfg.get("element")
    if el is None or cfg.get("N") not in (None, data.CHARGE[el]):
        return None
    lo, hi = _cutoffs(RunConfig(**{k: v for k, v in cfg.items() if k != "schema"}))
    cons = {parse_subshell(k).label: int(v) for k, v in (cfg.get("constraints") or {}).items()}
    if (lo, hi) == ("3p", "4s") and not cons:
        row = data.MINIMAL[el]
        return row.term, row.energy
    if (lo, hi) == ("3p", "4d") and set(cons) == {"4s"} and el in data.EXTENDED:
        for row in data.EXTENDED[el]:
            if row.s_occupation == cons["4s"]:
                return row.term, row.energy
    return None


def table_rows(reports) -> list[dict]:
    """Rows ``name, term, dim, energy, reference, delta, lowest``.

    ``lowest`` marks the lower energy among reports of the same element (or
    ``(N, Z)``) when there are several, as for the 4s1 / 4s2 pairs.
    """
    rows = []
    for r in reports:
        ref = reference(r.config)
        rows.append({"name": r.label, "term": r.term, "dim": r.dim, "energy": r.energy,
                     "reference_term": ref[0] if ref else None,
                     "reference": ref[1] if ref else None,
                     "delta": r.energy - ref[1] if ref else None, "lowest": False,
                     "_group": (r.spec["N"], r.spec["Z"])})
    groups: dict = {}
    for row in rows:
        groups.setdefault(row["_group"], []).append(row)
    for g in groups.values():
        if len(g) > 1:
            min(g, key=lambda x: x["energy"])["lowest"] = True
    for row in rows:
        del row["_group"]
    return rows


def format_table(rows) -> str:
    """Aligned text; ``*`` in the last column marks the lower energy of each group."""
    head = ["model", "Sym", "dim", "E_CI", "published", "diff", "lower"]
    body = []
    for r in rows:
        ref = "" if r["reference"] is None else f"{r['reference_term']} {r['reference']:.4f}"
        body.append([r["name"], r["term"], str(r["dim"]), f"{r['energy']:.6f}", ref,
                     "" if r["delta"] is None else f"{r['delta']:+.1e}", "*" if r["lowest"] else ""])
    widths = [max([len(h)] + [len(b[k]) for b in body]) for k, h in enumerate(head)]
    right = {2, 3, 5}

    def line(cells):
        return "  ".join(c.rjust(w) if k in right else c.ljust(w)
                         for k, (c, w) in enumerate(zip(cells, widths))).rstrip()

    out = [line(head), line(["-" * w for w in widths])] + [line(b) for b in body]
    return "\n".join(out) + "\n"


def builtin_set(name: str) -> list[dict]:
    """Config dicts reproducing the minimal-model and extended-model tables."""
    if name == "minimal":
        return [{"element": el, "model": "minimal"} for el in data.SYMBOLS]
    if name == "extended":
        return [{"element": el, "model": "extended", "constraints": {"4s": r.s_occupation}}
                for el, rows in data.EXTENDED.items() for r in rows]
    raise ConfigError(f"unknown built-in set {name!r}; known: minimal, extended")


def load_documents(path) -> list:
    """Configs and reports from a JSON file (a config, a set, a report or a list)."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    docs = doc if isinstance(doc, list) else [doc]
    out = []
    for d in docs:
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected JSON objects")
        schema = d.get("schema", CONFIG_SCHEMA)
        if schema == SET_SCHEMA:
            extra = set(d) - {"schema", "runs", "defaults"}
            if extra:
                raise ConfigError(f"unknown config-set fields: {', '.join(sorted(extra))}")
            base = d.get("defaults", {})
            out.extend(RunConfig.from_dict({**base, **r}) for r in d.get("runs", []))
        elif schema == REPORT_SCHEMA:
            out.append(RunReport.from_dict(d))
        else:
            out.append(RunConfig.from_dict(d))
    return out


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "symmetry", None):
        cfg.target = args.symmetry
    if getattr(args, "preset", None):
        cfg.preset, cfg.init = args.preset, "preset"
    if getattr(args, "max_evaluations", None):
        cfg.max_evaluations = args.max_evaluations
    if getattr(args, "cache_dir", None):
        cfg.cache_dir = args.cache_dir
    if getattr(args, "no_optimize", False):
        cfg.optimize = False
    if getattr(args, "no_timing", False):
        cfg.timing = False
    cfg.validate()
    return cfg


def _summary(rep: RunReport) -> str:
    lines = [f"{rep.label}: {rep.term}  dim {rep.dim}  E_CI {rep.energy:.8f}  "
             f"virial {rep.virial:.6f}  ({rep.evaluations} evaluations, init {rep.init_source})"]
    lines.append("  exponents: " + " ".join(f"{k}={v:.4f}" for k, v in rep.exponents.items()))
    weights = sorted(rep.weights.items(), key=lambda kv: -sum(kv[1]))
    lines.append("  weights:   " + ", ".join(
        f"{k} " + "/".join(f"{w:.4f}" for w in v) for k, v in weights[:6]))
    return "\n".join(lines) + "\n"


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="atomci", description="Symmetry-adapted CI for atoms.")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--symmetry", help="target term, e.g. 7S, or 'hund'")
        q.add_argument("--preset", help="exponent preset, e.g. Cr-4s1")
        q.add_argument("--max-evaluations", type=int, help="energy evaluations per simplex run")
        q.add_argument("--cache-dir", help="directory for cached symbolic data")
        q.add_argument("--no-optimize", action="store_true", help="evaluate at the initial exponents")
        q.add_argument("--no-timing", action="store_true", help="omit timings (byte-stable output)")
        q.add_argument("--format", choices=("table", "json"), default="table")
        q.add_argument("-o", "--output", help="write output here instead of stdout")

    r = sub.add_parser("run", help="optimize one model")
    r.add_argument("config")
    common(r)
    t = sub.add_parser("table", help="tabulate several models")
    t.add_argument("files", nargs="*", help="configs, config sets or reports")
    t.add_argument("--builtin", choices=("minimal", "extended"), help="add a built-in model set")
    common(t)
    c = sub.add_parser("precompute", help="build and cache the symbolic data of a model")
    c.add_argument("config")
    c.add_argument("--symmetry")
    c.add_argument("--cache-dir")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            docs = load_documents(args.config)
            if len(docs) != 1 or not isinstance(docs[0], RunConfig):
                raise ConfigError("run takes exactly one config")
            cfg = _apply_overrides(docs[0], args)
            rep = run(cfg)
            if cfg.output:
                _write_atomic(Path(cfg.output), rep.to_json())
            _emit(rep.to_json() if args.format == "json" else _summary(rep), args.output)
        elif args.command == "table":
            docs = [d for f in args.files for d in load_documents(f)]
            if args.builtin:
                docs += [RunConfig.from_dict(d) for d in builtin_set(args.builtin)]
            reports = [d if isinstance(d, RunReport) else run(_apply_overrides(d, args)) for d in docs]
            rows = table_rows(reports)
            if args.format == "json":
                text = json.dumps({"schema": TABLE_SCHEMA, "rows": rows,
                                   "reports": [r.to_dict() for r in reports]},
                                  indent=2, sort_keys=True) + "\n"
            else:
                text = format_table(rows)
            _emit(text, args.output)
        else:
            docs = load_documents(args.config)
            if len(docs) != 1 or not isinstance(docs[0], RunConfig):
                raise ConfigError("precompute takes exactly one config")
            meta = precompute(_apply_overrides(docs[0], args))
            sys.stdout.write(json.dumps(meta, sort_keys=True) + "\n")
    except (ConfigError, CacheError) as exc:
        print(f"atomci: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
