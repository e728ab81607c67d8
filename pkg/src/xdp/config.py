"""Experiment configuration: parsing, defaults, validation."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dpcore import DirichletPolynomial
from .exact import as_fraction
from .precision import MIN_PRECISION_BITS
from .zeros import Rectangle

DEFAULT_SCHEDULE = (1, 2, 4, 8, 16, 32, 64, 128, 256)
_FORMATS = ("csv", "json")


def parse_schedule(text: str):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty schedule")
    try:
        sched = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"schedule entries must be integers: {text!r}") from None
    _check_schedule(sched)
    return sched


def _check_schedule(sched):
    if not sched:
        raise ValueError("empty schedule")
    if sched[0] < 1 or any(a >= b for a, b in zip(sched, sched[1:])):
        raise ValueError(f"schedule must be strictly increasing positive: {sched}")


def geometric_schedule(n_max: int):
    """1, 2, 4, ... capped by (and always ending at) n_max."""
    if n_max < 1:
        raise ValueError(f"need n_max >= 1, got {n_max}")
    out = []
    k = 1
    while k < n_max:
        out.append(k)
        k *= 2
    out.append(n_max)
    return tuple(out)


def parse_rect(text: str) -> Rectangle:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"rectangle needs 4 comma-separated bounds: {text!r}")
    return Rectangle(*(as_fraction(p) for p in parts))


@dataclass(frozen=True)
class ExperimentConfig:
    poly: str
    r: Fraction = Fraction(0)
    n_schedule: tuple = DEFAULT_SCHEDULE
    precision_bits: int = 256
    rect: Optional[Rectangle] = None
    T: Optional[Fraction] = None
    output: Optional[str] = None
    format: str = "csv"
    cache_dir: Optional[str] = None
    line_tol: Fraction = Fraction(1, 10 ** 9)

    def __post_init__(self):
        if not self.poly:
            raise ValueError("empty polynomial text")
        object.__setattr__(self, "r", as_fraction(self.r))
        object.__setattr__(self, "n_schedule", tuple(self.n_schedule))
        _check_schedule(self.n_schedule)
        if self.precision_bits < MIN_PRECISION_BITS:
            raise ValueError(
                f"precision_bits must be >= {MIN_PRECISION_BITS}, got {self.precision_bits}")
        if self.format not in _FORMATS:
            raise ValueError(f"format must be one of {_FORMATS}, got {self.format!r}")
        if self.rect is not None and not isinstance(self.rect, Rectangle):
            object.__setattr__(self, "rect", parse_rect(self.rect)
                               if isinstance(self.rect, str)
                               else Rectangle(*self.rect))
        if self.T is not None:
            object.__setattr__(self, "T", as_fraction(self.T))
        object.__setattr__(self, "line_tol", as_fraction(self.line_tol))

    def polynomial(self) -> DirichletPolynomial:
        return DirichletPolynomial.parse(self.poly)


_JSON_KEYS = {"poly", "r", "schedule", "n_max", "precision_bits", "rect", "T",
              "output", "format", "cache_dir", "line_tol"}


def config_from_json(obj: dict, overrides: Optional[dict] = None) -> ExperimentConfig:
    """Config out of a JSON-shaped dict; overrides (CLI flags) win key-by-key."""
    merged = dict(obj)
    unknown = set(merged) - _JSON_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, val in (overrides or {}).items():
        if val is not None:
            merged[key] = val
    kwargs = {"poly": merged.get("poly")}
    if kwargs["poly"] is None:
        raise ValueError("config needs a polynomial ('poly')")
    if "r" in merged:
        kwargs["r"] = as_fraction(merged["r"])
    schedule = merged.get("schedule")
    if schedule is not None:
        kwargs["n_schedule"] = (parse_schedule(schedule)
                                if isinstance(schedule, str) else tuple(schedule))
    elif merged.get("n_max") is not None:
        kwargs["n_schedule"] = geometric_schedule(int(merged["n_max"]))
    if merged.get("precision_bits") is not None:
        kwargs["precision_bits"] = int(merged["precision_bits"])
    if merged.get("rect") is not None:
        kwargs["rect"] = (parse_rect(merged["rect"])
                          if isinstance(merged["rect"], str)
                          else Rectangle(*merged["rect"]))
    for key in ("T", "output", "format", "cache_dir", "line_tol"):
        if merged.get(key) is not None:
            kwargs[key] = merged[key]
    return ExperimentConfig(**kwargs)


def load_config(path: str, overrides: Optional[dict] = None) -> ExperimentConfig:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return config_from_json(obj, overrides)
