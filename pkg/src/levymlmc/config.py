"""Experiment configuration: a single self-describing text file with
nested key/value sections, strict about unknown keys (a typo is an error,
never silently ignored).

Example::

    [model]
    kind = two_sided_stable
    alpha = 0.5
    theta_plus = 1.0
    theta_minus = 0.0
    b = 0.0
    p = 1.0

    [experiment]
    case = auto
    n_levels = 16 32 64 128 256 512
    m = 2
    paths = 10000
    seed = 12345
    small_jump_mode = gaussian-remainder
    limit_samples = 10000
    n_ref = 16384

    [coefficient]
    kind = smooth_bump
    center = 0.5
    width = 1.0
    height = 1.0
    x0 = 0.0

    [output]
    directory = out
    emit_paths = false
"""

import configparser
import io
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from . import coeffs
from .measure import CGMY, LevyModel, TwoSidedStable
from .paths import SMALL_JUMP_MODES
from .scheme import CASES, classify_case

MODEL_KINDS = ("two_sided_stable", "cgmy")
COEFF_KINDS = ("constant", "linear", "smooth_bump")


class ConfigError(ValueError):
    """Malformed experiment configuration."""


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    alpha: float
    b: float = 0.0
    p: float = 1.0
    theta_plus: Optional[float] = None
    theta_minus: Optional[float] = None
    c: Optional[float] = None
    g: Optional[float] = None
    m: Optional[float] = None
    y: Optional[float] = None


@dataclass(frozen=True)
class CoeffSpec:
    kind: str
    x0: float = 0.0
    value: Optional[float] = None
    center: Optional[float] = None
    width: Optional[float] = None
    height: Optional[float] = None


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec
    coefficient: CoeffSpec
    case: str = "auto"
    n_levels: Tuple[int, ...] = (16, 32, 64)
    m: int = 2
    paths: int = 1000
    seed: int = 0
    small_jump_mode: str = "gaussian-remainder"
    limit_samples: int = 1000
    n_ref: int = 16384
    output_dir: str = "out"
    emit_paths: bool = False

    def __post_init__(self):
        if self.model.kind not in MODEL_KINDS:
            raise ConfigError(f"model kind must be one of {MODEL_KINDS}")
        if self.coefficient.kind not in COEFF_KINDS:
            raise ConfigError(f"coefficient kind must be one of {COEFF_KINDS}")
        if self.case != "auto" and self.case not in CASES:
            raise ConfigError(f"case must be 'auto' or one of {CASES}")
        if self.small_jump_mode not in SMALL_JUMP_MODES:
            raise ConfigError(f"small_jump_mode must be one of {SMALL_JUMP_MODES}")
        if not self.n_levels or any(
            self.n_levels[i] >= self.n_levels[i + 1] for i in range(len(self.n_levels) - 1)
        ):
            raise ConfigError("n_levels must be nonempty and strictly increasing")
        if self.m < 2:
            raise ConfigError("m must be at least 2")
        if self.paths < 1 or self.limit_samples < 1 or self.n_ref < 2:
            raise ConfigError("paths, limit_samples and n_ref must be positive")
        if not 0 < self.model.alpha < 2:
            raise ConfigError("alpha must lie in (0, 2)")

    # -- factories ----------------------------------------------------------
    def build_model(self) -> LevyModel:
        ms = self.model
        if ms.kind == "two_sided_stable":
            if ms.theta_plus is None or ms.theta_minus is None:
                raise ConfigError("two_sided_stable needs theta_plus and theta_minus")
            return TwoSidedStable(
                ms.alpha, ms.theta_plus, ms.theta_minus, drift_b=ms.b, jump_bound_p=ms.p
            )
        if None in (ms.c, ms.g, ms.m, ms.y):
            raise ConfigError("cgmy needs c, g, m and y")
        if not math.isclose(ms.alpha, ms.y):
            raise ConfigError("cgmy activity index: alpha must equal y")
        return CGMY(ms.c, ms.g, ms.m, ms.y, drift_b=ms.b, jump_bound_p=ms.p)

    def build_coefficient(self) -> coeffs.Coefficient:
        cs = self.coefficient
        if cs.kind == "constant":
            if cs.value is None:
                raise ConfigError("constant coefficient needs a value")
            return coeffs.constant(cs.value)
        if cs.kind == "linear":
            return coeffs.linear()
        if None in (cs.center, cs.width, cs.height):
            raise ConfigError("smooth_bump needs center, width and height")
        return coeffs.smooth_bump(cs.center, cs.width, cs.height)

    def resolve_case(self, model: LevyModel) -> str:
        if self.case != "auto":
            return self.case
        return classify_case(
            model, self.model.alpha, model.symmetric, self.model.b == 0.0
        )


_SCHEMA = {
    "model": {
        "kind": str,
        "alpha": float,
        "b": float,
        "p": float,
        "theta_plus": float,
        "theta_minus": float,
        "c": float,
        "g": float,
        "m": float,
        "y": float,
    },
    "experiment": {
        "case": str,
        "n_levels": "int_list",
        "m": int,
        "paths": int,
        "seed": int,
        "small_jump_mode": str,
        "limit_samples": int,
        "n_ref": int,
    },
    "coefficient": {
        "kind": str,
        "x0": float,
        "value": float,
        "center": float,
        "width": float,
        "height": float,
    },
    "output": {
        "directory": str,
        "emit_paths": "bool",
    },
}


def _convert(section, key, raw):
    want = _SCHEMA[section][key]
    try:
        if want == "int_list":
            return tuple(int(tok) for tok in raw.replace(",", " ").split())
        if want == "bool":
            lowered = raw.strip().lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        return want(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    values = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[(section, key)] = _convert(section, key, raw)
    for required in ("model", "experiment", "coefficient"):
        if not cp.has_section(required):
            raise ConfigError(f"missing section [{required}]")

    def pick(section, key, default=None):
        return values.get((section, key), default)

    model = ModelSpec(
        kind=pick("model", "kind", ""),
        alpha=pick("model", "alpha", float("nan")),
        b=pick("model", "b", 0.0),
        p=pick("model", "p", 1.0),
        theta_plus=pick("model", "theta_plus"),
        theta_minus=pick("model", "theta_minus"),
        c=pick("model", "c"),
        g=pick("model", "g"),
        m=pick("model", "m"),
        y=pick("model", "y"),
    )
    coeff = CoeffSpec(
        kind=pick("coefficient", "kind", ""),
        x0=pick("coefficient", "x0", 0.0),
        value=pick("coefficient", "value"),
        center=pick("coefficient", "center"),
        width=pick("coefficient", "width"),
        height=pick("coefficient", "height"),
    )
    return ExperimentConfig(
        model=model,
        coefficient=coeff,
        case=pick("experiment", "case", "auto"),
        n_levels=pick("experiment", "n_levels", (16, 32, 64)),
        m=pick("experiment", "m", 2),
        paths=pick("experiment", "paths", 1000),
        seed=pick("experiment", "seed", 0),
        small_jump_mode=pick("experiment", "small_jump_mode", "gaussian-remainder"),
        limit_samples=pick("experiment", "limit_samples", 1000),
        n_ref=pick("experiment", "n_ref", 16384),
        output_dir=pick("output", "directory", "out"),
        emit_paths=pick("output", "emit_paths", False),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def emit_config(config: ExperimentConfig) -> str:
    """Canonical text form; parse(emit(c)) == c."""
    out = io.StringIO()
    sections = {
        "model": {
            "kind": config.model.kind,
            "alpha": config.model.alpha,
            "b": config.model.b,
            "p": config.model.p,
            "theta_plus": config.model.theta_plus,
            "theta_minus": config.model.theta_minus,
            "c": config.model.c,
            "g": config.model.g,
            "m": config.model.m,
            "y": config.model.y,
        },
        "experiment": {
            "case": config.case,
            "n_levels": config.n_levels,
            "m": config.m,
            "paths": config.paths,
            "seed": config.seed,
            "small_jump_mode": config.small_jump_mode,
            "limit_samples": config.limit_samples,
            "n_ref": config.n_ref,
        },
        "coefficient": {
            "kind": config.coefficient.kind,
            "x0": config.coefficient.x0,
            "value": config.coefficient.value,
            "center": config.coefficient.center,
            "width": config.coefficient.width,
            "height": config.coefficient.height,
        },
        "output": {
            "directory": config.output_dir,
            "emit_paths": config.emit_paths,
        },
    }
    for section, entries in sections.items():
        out.write(f"[{section}]\n")
        for key, value in entries.items():
            if value is None:
                continue
            out.write(f"{key} = {_fmt(value)}\n")
        out.write("\n")
    return out.getvalue()
