"""Solver configuration and the ``key=value`` config-file loader."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

DEFAULT_SEED = 20160519
CONFIG_ENV_VAR = "ASYMGEO_CONFIG"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets for every iterative routine in the package.

    ``abs_tol`` is the generic comparison tolerance; bisection itself always
    runs down to float resolution (or ``max_iter`` halvings).
    """

    abs_tol: float = 1e-10
    max_iter: int = 200
    bracket_growth: float = 2.0
    quad_tol: float = 1e-9
    quad_points: int = 15
    quad_max_level: int = 12
    inf_conv_tol: float = 1e-3
    alpha_max: float = 1e8
    rng_seed: int = DEFAULT_SEED
    debug: bool = False

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.bracket_growth > 1:
            raise ValueError("bracket_growth must exceed 1")
        if not (self.quad_tol > 0 and self.inf_conv_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.quad_points < 1 or self.quad_max_level < 0:
            raise ValueError("bad quadrature settings")
        if not self.alpha_max > 1:
            raise ValueError("alpha_max must exceed 1")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


def _coerce(field: dataclasses.Field, raw: str):
    if field.type in ("bool", bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if field.type in ("int", int):
        return int(raw)
    return float(raw)


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines into typed SolverConfig overrides.

    Blank lines and ``#`` comments are skipped; unknown keys raise ValueError.
    """
    fields = {f.name: f for f in dataclasses.fields(SolverConfig)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in fields:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = _coerce(fields[key], raw)
    return out


def load_config(path=None, **overrides) -> SolverConfig:
    """Build a SolverConfig from defaults, a config file, then overrides.

    ``path`` defaults to the file named by ``$ASYMGEO_CONFIG``. Overrides whose
    value is ``None`` are ignored so CLI flags can be passed through blindly.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SolverConfig(**values)
