"""Pipeline configuration: flat key = value text files with defaults.

Unknown keys are rejected so typos fail loudly.  ``canonical_text`` gives a
stable serialization whose hash goes into the report manifest.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from datetime import date
from pathlib import Path

# The query keyword list the collection was built around (Italian vaccine
# debate terms, including jargon spellings).
DEFAULT_KEYWORDS = (
    "vaccino", "vaccini", "vaccinazione", "vaccinazioni", "vaccinare",
    "vaccinarsi", "vaccinatevi", "vacciniamoci", "vaccinando", "vaccinale",
    "vaccinali", "vaccinati", "vaccinate", "vaccinata", "vaccinato",
    "va@@ino", "va..ino", "vaxino", "vaxxino", "#iomiovaccino",
)


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    """Every key has a default; see README for the full reference."""

    date_start: date = date(2019, 1, 1)      # first bucketed month
    date_end: date = date(2022, 6, 1)        # exclusive first-of-month bound
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    lang: str = "it"
    beta: float | None = None                # fixed balance target; None = tune
    beta_grid: tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 11))
    balance_eps: float = 0.05
    runs: int = 100
    extreme_fraction: float = 0.10
    core_thresholds: tuple[int, ...] | None = None  # None = (T, T-1, T-2)
    percentile: float = 95.0
    max_lag: int = 6

    def months_total(self) -> int:
        return (self.date_end.year - self.date_start.year) * 12 + (
            self.date_end.month - self.date_start.month
        )

    def thresholds(self) -> tuple[int, ...]:
        if self.core_thresholds is not None:
            return self.core_thresholds
        t = self.months_total()
        return tuple(k for k in (t, t - 1, t - 2) if k >= 1)

    def canonical_text(self) -> str:
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            lines.append(f"{f.name} = {_fmt(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ",".join(_fmt(v) for v in value)
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


_PARSERS = {
    "date_start": lambda s: date.fromisoformat(s),
    "date_end": lambda s: date.fromisoformat(s),
    "keywords": lambda s: tuple(k.strip() for k in s.split(",") if k.strip()),
    "lang": str,
    "beta": lambda s: float(s) if s else None,
    "beta_grid": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
    "balance_eps": float,
    "runs": int,
    "extreme_fraction": float,
    "core_thresholds": lambda s: tuple(int(x) for x in s.split(",") if x.strip()) or None,
    "percentile": float,
    "max_lag": int,
}


def load_config(path: str | Path | None) -> Config:
    """Parse a flat ``key = value`` file ('#' comments and blank lines
    allowed); a missing path yields the defaults."""
    cfg = Config()
    if path is None:
        return cfg
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _PARSERS[key](value))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    _validate(cfg)
    return cfg


def _validate(cfg: Config) -> None:
    if cfg.date_start >= cfg.date_end:
        raise ConfigError("date_start must precede date_end")
    if cfg.beta is not None and not 0.0 < cfg.beta <= 0.5:
        raise ConfigError("beta must lie in (0, 0.5]")
    if not cfg.beta_grid:
        raise ConfigError("beta_grid must be non-empty")
    if cfg.runs < 1:
        raise ConfigError("runs must be >= 1")
    if not 0.0 < cfg.extreme_fraction <= 1.0:
        raise ConfigError("extreme_fraction must lie in (0, 1]")
    if not 0.0 < cfg.percentile < 100.0:
        raise ConfigError("percentile must lie in (0, 100)")
