"""
Run configuration: a YAML document checked against a strict schema.

    seed: 7
    output: results/pf
    model:
      example: perfect_fidelity_symmetric
      params: {p: 2, alpha: 0.5, beta: 0.3, alpha_m: 1.0, beta_m: 0.1}
    solver: {tol: 1.0e-8, starts: 5}
    simulation: {z0: [50, 50], horizon: 25, trials: 1000}
    experiment: {name: profile}
    thresholds: {profile_median_distance: 0.05}

Unknown keys are rejected at every level, including the parameter
blocks of mating functions, offspring rows and experiments.
"""

from __future__ import annotations
from dataclasses import fields
from inspect import signature
from os import environ
from pathlib import Path
import yaml
from ..experiments.core import EXPERIMENTS
from ..experiments.report import Thresholds
from ..mating.core import CATALOG_KINDS, CustomMating, build_mating
from ..model.core import ModelSpec, ValidatedModel, require_valid
from ..model.examples import CATALOG
from ..schema import BooleanF, DictF, FloatF, IntegerF, Length, ListF, NestedF, OneOf, Schema, Shape, StringF, Value
from ..simulation.laws import build_offspring
from ..simulation.streams import check_seed
from .exceptions import ConfigError

SEED_ENV = "TWOSEX_SEED"

MATING_PARAMS = {
    "identity": set(),
    "perfect_fidelity": set(),
    "polygamous": {"d"},
    "promiscuous_single": set(),
    "completely_promiscuous": {"n_m"},
    "min_of_linear": {"matrices"},
    "capped_identity": {"alpha"},
    "capped": {"alpha", "inner"},
    "custom": {"plugin"},
}

ROW_KEYS = {
    "poisson": {"rates"},
    "geometric": {"means"},
    "deterministic": {"vector"},
    "empirical": {"support", "weights"},
    "total_then_thin": {"totals", "alpha", "total_law"},
    "callback": {"plugin", "q"},
}

LAW_KINDS = ("poisson_product", "geometric_product", "deterministic")

OFFSPRING_MATRIX = Schema(
    kind=StringF().has(OneOf(*LAW_KINDS)),
    matrix=ListF().has(Shape(2)),
).strict()

MATING = Schema(
    kind=StringF().has(OneOf(*CATALOG_KINDS)),
    params=DictF().default(dict),
)

VERIFY = Schema(
    samples=IntegerF().has(Value(min=1)).default(10_000),
    magnitude_cap=IntegerF().has(Value(min=1)).default(50),
)

MODEL = Schema(
    name=StringF().default("model"),
    example=StringF().has(OneOf(*CATALOG)).optional(),
    params=DictF().default(dict),
    p=IntegerF().has(Value(min=1)).optional(),
    q=IntegerF().has(Value(min=1)).optional(),
    split=ListF().item_type(IntegerF()).has(Length(min=2, max=2)).optional(),
    mating=NestedF(MATING).optional(),
    offspring=DictF().optional(),
    estimation_budget=IntegerF().has(Value(min=1)).default(100_000),
    verify=NestedF(VERIFY).optional(),
)

SOLVER = Schema(
    tol=FloatF().has(Value(min=0, exclusive_min=True)).default(1e-8),
    r_max=FloatF().has(Value(min=1)).default(float(2**40)),
    diverge_cap=FloatF().has(Value(min=0, exclusive_min=True)).default(1e12),
    max_iter=IntegerF().has(Value(min=1)).default(10_000),
    starts=IntegerF().has(Value(min=1)).default(5),
    critical_band=FloatF().has(Value(min=0)).default(1e-6),
    n_max=IntegerF().has(Value(min=1)).default(50),
)

SIMULATION = Schema(
    z0=ListF().item_type(IntegerF()).optional(),
    horizon=IntegerF().has(Value(min=0)).default(50),
    trials=IntegerF().has(Value(min=1)).default(1_000),
    trajectories=IntegerF().has(Value(min=0)).default(1),
    couple_threshold=IntegerF().has(Value(min=1)).default(1_000_000),
    normal_approximation=BooleanF().default(False),
    escape_cap=FloatF().has(Value(min=0, exclusive_min=True)).default(1e5),
)

EXPERIMENT = Schema(
    name=StringF().has(OneOf(*EXPERIMENTS)),
    params=DictF().default(dict),
)

THRESHOLDS = Schema(
    **{threshold.name: FloatF().has(Value(min=0)).default(threshold.default) for threshold in fields(Thresholds)}
)

RUN = Schema(
    seed=IntegerF().has(Value(min=0, max=2**64 - 1)).default(0),
    output=StringF().default("results"),
    model=NestedF(MODEL).optional(),
    solver=NestedF(SOLVER).default(dict),
    simulation=NestedF(SIMULATION).default(dict),
    experiment=NestedF(EXPERIMENT).optional(),
    thresholds=NestedF(THRESHOLDS).default(dict),
).strict()


def parse_config(document: dict) -> dict:
    """Validates a config mapping and fills in every default."""
    if document is None:
        document = {}
    ok, errors, resolved = RUN.validate(document)
    if not ok:
        raise ConfigError("Invalid configuration", errors)
    return resolved


def load_config(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = yaml.safe_load(handle)
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e.strerror or e}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Config {path} is not valid YAML: {e}")
    return parse_config(document)


def resolve_seed(config: dict, flag: int | None = None) -> int:
    """--seed beats the TWOSEX_SEED environment variable, which beats the config."""
    if flag is not None:
        seed = flag
    elif environ.get(SEED_ENV, "").strip():
        try:
            seed = int(environ[SEED_ENV].strip())
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {environ[SEED_ENV]!r}")
    else:
        seed = config["seed"]
    try:
        return check_seed(seed)
    except ValueError as e:
        raise ConfigError(str(e))


def _check_keys(block: dict, allowed: set[str], where: str):
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"Unexpected keys in {where}: {', '.join(unknown)}")


def _check_offspring(block: dict):
    if "rows" in block:
        _check_keys(block, {"rows"}, "model.offspring")
        if not isinstance(block["rows"], list):
            raise ConfigError("model.offspring.rows must be a list")
        for index, row in enumerate(block["rows"]):
            if not isinstance(row, dict):
                raise ConfigError(f"model.offspring.rows.{index} must be a mapping")
            kind = row.get("kind")
            if kind not in ROW_KEYS:
                raise ConfigError(f"model.offspring.rows.{index}: unknown row kind {kind!r}")
            _check_keys(row, ROW_KEYS[kind] | {"kind"}, f"model.offspring.rows.{index}")
        return
    ok, errors, _ = OFFSPRING_MATRIX.validate(block)
    if not ok:
        raise ConfigError("Invalid model.offspring", {f"model.offspring.{key}": value for key, value in errors.items()})


def _check_mating(block: dict, where: str = "model.mating"):
    kind, params = block["kind"], block.get("params") or {}
    _check_keys(params, MATING_PARAMS[kind], f"{where}.params")
    if kind == "capped" and "inner" in params:
        inner = params["inner"]
        if not isinstance(inner, dict) or inner.get("kind") not in MATING_PARAMS:
            raise ConfigError(f"{where}.params.inner must name a catalog mating kind")
        _check_keys(inner, {"kind", "params"}, f"{where}.params.inner")
        _check_mating(inner, f"{where}.params.inner")


def model_spec(block: dict) -> ModelSpec:
    """ModelSpec from a resolved model block: a catalog example or an explicit layout."""
    explicit = [key for key in ("p", "q", "mating", "offspring", "split") if block.get(key) is not None]
    if block.get("example"):
        if explicit:
            raise ConfigError(f"model.example cannot be combined with {', '.join(explicit)}")
        builder = CATALOG[block["example"]]
        allowed = set(signature(builder).parameters)
        _check_keys(block["params"], allowed, "model.params")
        try:
            return builder(**block["params"])
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(f"Cannot build example {block['example']}: {e}")

    missing = [key for key in ("p", "q", "mating", "offspring") if block.get(key) is None]
    if missing:
        raise ConfigError(f"model needs either example or {', '.join(missing)}")
    if block["params"]:
        raise ConfigError("model.params only applies to catalog examples")
    _check_mating(block["mating"])
    _check_offspring(block["offspring"])
    try:
        mating = build_mating(block["mating"]["kind"], block["p"], block["q"], block["mating"]["params"])
        offspring = build_offspring(block["offspring"])
    except KeyError as e:
        raise ConfigError(f"Missing model parameter {e}")
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid model: {e}")
    split = tuple(block["split"]) if block.get("split") else None
    return ModelSpec(block["p"], block["q"], mating, offspring, split, block["name"])


def build_model(config: dict, seed: int) -> ValidatedModel:
    """Validated model of a resolved config.

    Custom mating functions are run through the superadditivity check
    first when the model block carries a `verify` section.

    Raises:
        ConfigError: the model block is missing or malformed.
        ModelValidationError: the model violates a standing assumption.
    """
    block = config.get("model")
    if not block:
        raise ConfigError("This command needs a model block")
    spec = model_spec(block)
    if isinstance(spec.mating, CustomMating) and block.get("verify"):
        spec.mating.verify(seed=seed, **block["verify"])
    return require_valid(spec, block["estimation_budget"], seed)


def solver_options(config: dict) -> dict:
    """Keyword arguments of solve_eigen."""
    return {key: value for key, value in config["solver"].items() if key != "critical_band"}


def simulation_options(config: dict) -> dict:
    """Keyword arguments shared by the simulator entry points."""
    block = config["simulation"]
    return {"couple_threshold": block["couple_threshold"], "normal_approximation": block["normal_approximation"]}
