"""Suite configuration: a TOML file with [context], [characters.*], [suite].

Characters are specified by conductor and generator-image root-of-unity
orders; entries that are invalid at some prime (e.g. conductor 1 at p = 2)
are simply skipped for that prime.
"""

from __future__ import annotations

import dataclasses
from typing import Dict, List, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .characters import CharacterError, FiniteCharacter

ALL_SUITES = ("lemmas", "support", "integral", "fv", "calculf", "lemmev3",
              "phi", "eigen", "novt", "vt")

DEFAULTS = {
    "primes": [2, 3, 5],
    "precision": 26,
    "backend": "both",
    "tolerance": 1e-9,
    "seed": 20240817,
    "jobs": 1,
    "cache_dir": "",
    "use_cache": True,
    "level": 4,
    "suites": list(ALL_SUITES),
    "output": "report.json",
}


class ConfigError(ValueError):
    pass


@dataclasses.dataclass
class CharacterSpec:
    name: str
    conductor: int
    orders: Tuple[int, ...]

    def build(self, p: int) -> Optional[FiniteCharacter]:
        if self.conductor == 0:
            return FiniteCharacter.trivial(p)
        try:
            return FiniteCharacter.from_orders(p, self.conductor, self.orders)
        except CharacterError:
            return None


@dataclasses.dataclass
class SuiteConfig:
    primes: List[int]
    precision: int
    backend: str
    tolerance: float
    seed: int
    jobs: int
    cache_dir: str
    use_cache: bool
    level: int
    suites: List[str]
    output: str
    characters: List[CharacterSpec]

    def validate(self):
        if self.backend not in ("exact", "numeric", "both"):
            raise ConfigError("backend must be exact, numeric or both")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        for s in self.suites:
            if s not in ALL_SUITES:
                raise ConfigError("unknown suite %r (have %s)" % (s, ALL_SUITES))
        for p in self.primes:
            if p not in (2, 3, 5):
                raise ConfigError("desk scale covers p in {2, 3, 5}, got %d" % p)
        # working precision must dominate level + gamma budget + slack
        if self.precision < self.level + 3 + 1:
            raise ConfigError("precision %d too small for level %d"
                              % (self.precision, self.level))
        return self

    def ramified_char(self, p: int, conductor: int = 0) -> Optional[FiniteCharacter]:
        """First corpus character valid at p (optionally of given conductor)."""
        for spec in self.characters:
            if spec.conductor == 0:
                continue
            if conductor and spec.conductor != conductor:
                continue
            chi = spec.build(p)
            if chi is not None:
                return chi
        return None


def default_characters() -> List[CharacterSpec]:
    return [CharacterSpec("nu", 1, (2,)),      # odd p, quadratic
            CharacterSpec("nu4", 1, (4,)),     # p = 5
            CharacterSpec("mu2", 2, (2,)),     # p = 2 minimal ramified
            CharacterSpec("nu9", 2, (6,))]     # p = 3 conductor 2


def load_config(path: Optional[str] = None,
                overrides: Optional[Dict] = None) -> SuiteConfig:
    data = {}
    if path:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    ctx = data.get("context", {})
    suite = data.get("suite", {})
    merged = dict(DEFAULTS)
    for key in ("primes", "precision", "backend", "tolerance", "seed", "jobs",
                "cache_dir", "use_cache"):
        if key in ctx:
            merged[key] = ctx[key]
    for key, alias in (("suites", "names"), ("level", "level"),
                       ("output", "output")):
        if alias in suite:
            merged[key] = suite[alias]
    chars = default_characters()
    for name, block in data.get("characters", {}).items():
        chars.insert(0, CharacterSpec(name, int(block["conductor"]),
                                      tuple(block.get("orders", ()))))
    if overrides:
        for k, v in overrides.items():
            if v is not None:
                merged[k] = v
    cfg = SuiteConfig(characters=chars, **merged)
    return cfg.validate()
