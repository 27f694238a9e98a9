"""YAML experiment configurations.

Laws and distortions are written as mappings with a ``kind`` and, as
needed, ``params``, ``support``, ``probs``, ``transition`` or ``matrix``::

    kind: simulate
    source: {kind: bernoulli, params: {p: 0.3}}
    codebook: {kind: bernoulli, params: {p: 0.5}}
    distortion: {kind: hamming}
    D: 0.2
    n: [40]
    trials: 200
    seed: 1
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .distortion import Hamming, PowerR, SquaredError, Table, extremes, load_table_csv
from .distributions import (
    DiscreteDistribution,
    DiscreteIID,
    ExponentialFamily,
    Gaussian,
    GaussianIID,
    MarkovChain,
)
from .errors import ConfigError, MismatchError

KINDS = ("rate", "simulate", "favorite-type", "entropy-gain", "asymptotics", "validate")
MAX_ENTROPY_NB = 26


def _params(spec):
    return spec.get("params", {}) or {}


def build_law(spec):
    """A single-letter law from its mapping."""
    kind = spec.get("kind")
    p = _params(spec)
    if kind == "bernoulli":
        return DiscreteDistribution.bernoulli(float(p["p"]))
    if kind == "discrete":
        return DiscreteDistribution(spec["support"], spec["probs"])
    if kind == "gaussian":
        return Gaussian(float(p["variance"]), float(p.get("mean", 0.0)))
    if kind == "exponential_family":
        return ExponentialFamily(float(p["s"]), float(p.get("power", 2.0)))
    raise ConfigError([f"unknown law kind {kind!r}"])


def build_source(spec):
    """A source from its mapping; single-letter laws become i.i.d. sources."""
    kind = spec.get("kind")
    if kind == "markov":
        return MarkovChain(spec.get("support", (0, 1)), spec["transition"])
    law = build_law(spec)
    if isinstance(law, DiscreteDistribution):
        return DiscreteIID(law)
    if isinstance(law, Gaussian) and law.mean == 0:
        return GaussianIID(law.variance)
    raise ConfigError([f"source kind {kind!r} is not supported"])


def build_distortion(spec, base_dir="."):
    kind = spec.get("kind")
    p = _params(spec)
    if kind == "hamming":
        return Hamming()
    if kind in ("squared", "squared_error"):
        return SquaredError()
    if kind == "power":
        return PowerR(float(p["r"]))
    if kind == "table":
        if "path" in spec:
            return load_table_csv(Path(base_dir) / spec["path"])
        return Table(spec["matrix"], spec.get("source_symbols"), spec.get("repro_symbols"))
    raise ConfigError([f"unknown distortion kind {kind!r}"])


def _as_list(v):
    if v is None:
        return []
    return list(v) if isinstance(v, (list, tuple)) else [v]


@dataclass
class ExperimentConfig:
    kind: str
    raw: dict = field(repr=False)
    source: object = None
    codebook: object = None
    distortion: object = None
    D: list = field(default_factory=list)
    n: list = field(default_factory=list)
    trials: int = 0
    seed: int = 0
    seeds: list = field(default_factory=list)
    b: Optional[float] = None
    tau_sq: list = field(default_factory=list)
    s_grid: list = field(default_factory=list)
    instances: int = 100
    method: str = "auto"

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the raw mapping."""
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(text.encode()).hexdigest()


def parse_config(raw: dict, kind: Optional[str] = None, base_dir=".") -> ExperimentConfig:
    """Validate a configuration mapping, collecting every problem before raising."""
    raw = dict(raw or {})
    problems = []
    kind = kind or raw.get("kind")
    if raw.get("kind") not in (None, kind):
        problems.append(f"config kind {raw.get('kind')!r} does not match subcommand {kind!r}")
    if kind not in KINDS:
        raise ConfigError([f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}"])
    cfg = ExperimentConfig(kind=kind, raw=raw)

    def build(key, fn, required):
        if key not in raw:
            if required:
                problems.append(f"missing '{key}'")
            return None
        try:
            return fn(raw[key])
        except ConfigError as exc:
            problems.extend(f"{key}: {p}" for p in exc.problems)
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{key}: {exc}")
        return None

    needs_models = kind != "validate"
    cfg.source = build("source", build_source, needs_models)
    cfg.codebook = build("codebook", build_law, needs_models and kind != "asymptotics")
    cfg.distortion = build("distortion", lambda s: build_distortion(s, base_dir), needs_models)
    cfg.D = [float(d) for d in _as_list(raw.get("D"))]
    cfg.n = [int(v) for v in _as_list(raw.get("n"))]
    cfg.trials = int(raw.get("trials", 0))
    cfg.seed = int(raw.get("seed", 0))
    cfg.seeds = [int(s) for s in _as_list(raw.get("seeds"))] or [cfg.seed]
    cfg.b = None if raw.get("b") is None else float(raw["b"])
    cfg.tau_sq = [float(t) for t in _as_list(raw.get("tau_sq"))]
    cfg.s_grid = [float(t) for t in _as_list(raw.get("s"))]
    cfg.instances = int(raw.get("instances", 100))
    cfg.method = str(raw.get("method", "auto"))

    if needs_models and not cfg.D:
        problems.append("missing 'D'")
    if kind in ("simulate", "favorite-type", "entropy-gain"):
        if not cfg.n:
            problems.append("missing 'n'")
        if cfg.trials <= 0:
            problems.append("'trials' must be a positive integer")
    if kind == "asymptotics" and not cfg.tau_sq:
        problems.append("missing 'tau_sq' grid")
    if cfg.b is not None and cfg.b <= 0:
        problems.append("'b' must be positive")

    if needs_models and cfg.source is not None and cfg.distortion is not None and kind != "asymptotics":
        if cfg.codebook is not None:
            try:
                ex = extremes(cfg.source.marginal, cfg.codebook, cfg.distortion)
                for d in cfg.D:
                    if not ex.contains(d) and kind in ("rate", "favorite-type", "entropy-gain"):
                        problems.append(f"D={d} outside ({ex.d_min:.6g}, {ex.d_av:.6g})")
                if kind == "entropy-gain" and cfg.b is None and cfg.D:
                    from .ratefn import rate_pqd

                    for d in cfg.D:
                        if ex.contains(d):
                            b = rate_pqd(cfg.source.marginal, cfg.codebook, cfg.distortion, d).rate_bits + 0.5
                            for n in cfg.n:
                                if n * b > MAX_ENTROPY_NB:
                                    problems.append(f"n*b = {n * b:.3g} exceeds {MAX_ENTROPY_NB} for n={n}")
            except MismatchError as exc:
                problems.append(f"extremes: {exc}")
        if kind == "entropy-gain" and cfg.b is not None:
            for n in cfg.n:
                if n * cfg.b > MAX_ENTROPY_NB:
                    problems.append(f"n*b = {n * cfg.b:.3g} exceeds {MAX_ENTROPY_NB} for n={n}")
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path, kind: Optional[str] = None) -> ExperimentConfig:
    path = Path(path)
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is not None and not isinstance(raw, dict):
        raise ConfigError(["configuration must be a mapping"])
    return parse_config(raw or {}, kind, base_dir=path.parent)
