"""Run configuration: defaults, TOML loading, validation with field paths.

A config file is flat ``key = value`` lines with dotted sections, e.g.::

    seed = 7
    suites = ["cogwheel", "fermion"]
    cogwheel.dims = [2, 3, 4]
    fermion.K = [2]
    tolerances.fermion_algebra = 1e-13
"""

import dataclasses
import sys
from dataclasses import dataclass, field
from typing import List

from ..errors import ConfigError
from ..fock import DIM_CAP, FERMION_MODE_CAP

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUITES = ("cogwheel", "scalar-real", "scalar-complex", "vector", "fermion", "counterexamples")
POLICIES = ("confirm", "ignore")


@dataclass
class CogwheelConfig:
    dims: List[int] = field(default_factory=lambda: list(range(2, 33)))
    evolution_dims: List[int] = field(default_factory=lambda: [2, 4, 8])
    omega: float = 1.0
    random_times: int = 50


@dataclass
class BosonConfig:
    # (F, M, D) triples per suite
    scalar_real: List[List[int]] = field(default_factory=lambda: [[1, 2, 3]])
    scalar_complex: List[List[int]] = field(default_factory=lambda: [[2, 1, 4]])
    vector: List[List[int]] = field(default_factory=lambda: [[3, 1, 2], [3, 2, 2], [6, 1, 2]])
    random_states: int = 100
    random_times: int = 20
    dispersion_points: int = 100
    lattice: str = "commensurate"


@dataclass
class FermionConfig:
    K: List[int] = field(default_factory=lambda: [1, 2, 3])
    # (theta, phi) per direction; only the first enters the block checks
    directions: List[List[float]] = field(default_factory=lambda: [[0.7853981633974483, 0.0]])
    dtheta: float = 0.1
    dphi: float = 0.1
    random_k: int = 200
    vacuum_shift: bool = True
    evolution_sign: int = 1


@dataclass
class CounterexampleConfig:
    coherent_dim: int = 30
    coherent_radius: float = 1.0
    coherent_phases: int = 8
    commutator_dims: List[int] = field(default_factory=lambda: [2, 4, 8])
    nilpotency_n_max: int = 4
    dirac_dim: int = 4
    dirac_K: int = 2


@dataclass
class PhysicsConfig:
    c: float = 1.0
    hbar: float = 1.0
    mu: float = 1.0
    delta_k: float = 1.0
    delta_r: float = 1.0


@dataclass
class ToleranceConfig:
    exact: float = 1e-12
    sg_residual: float = 1e-10
    evolution: float = 1e-11
    multimode: float = 1e-11
    fermion_algebra: float = 1e-13
    fermion_basis: float = 1e-12
    fermion_evolution: float = 1e-11
    clifford: float = 1e-13
    helicity: float = 1e-12
    spinor_norm: float = 1e-13
    weyl: float = 1e-12
    coherent_overlap: float = 1e-6
    nilpotency: float = 1e-15

    def override_all(self, tol: float) -> None:
        for f in dataclasses.fields(self):
            setattr(self, f.name, float(tol))


@dataclass
class OutputConfig:
    path: str = ""
    format: str = "json"


@dataclass
class RunConfig:
    suites: List[str] = field(default_factory=lambda: list(SUITES))
    seed: int = 20240717
    workers: int = 1
    expected_fail_policy: str = "confirm"
    cogwheel: CogwheelConfig = field(default_factory=CogwheelConfig)
    bosons: BosonConfig = field(default_factory=BosonConfig)
    fermion: FermionConfig = field(default_factory=FermionConfig)
    counterexamples: CounterexampleConfig = field(default_factory=CounterexampleConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def flat(self) -> dict:
        """Config snapshot as dotted keys."""
        out = {}

        def walk(prefix, value):
            if isinstance(value, dict):
                for k, v in value.items():
                    walk(f"{prefix}.{k}" if prefix else k, v)
            else:
                out[prefix] = value

        walk("", self.to_dict())
        return out

    def validate(self) -> "RunConfig":
        for name in self.suites:
            if name not in SUITES:
                raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}", "suites")
        if not self.suites:
            raise ConfigError("no suites selected", "suites")
        if self.expected_fail_policy not in POLICIES:
            raise ConfigError(f"must be one of {POLICIES}", "expected_fail_policy")
        if self.workers < 1:
            raise ConfigError("must be >= 1", "workers")
        for f in dataclasses.fields(self.tolerances):
            if not getattr(self.tolerances, f.name) > 0:
                raise ConfigError("tolerances must be > 0", f"tolerances.{f.name}")
        for i, d in enumerate(self.cogwheel.dims):
            if not 2 <= d <= 4096:
                raise ConfigError("cogwheel D must be in 2..4096", f"cogwheel.dims[{i}]")
        for i, d in enumerate(self.cogwheel.evolution_dims):
            if d < 2:
                raise ConfigError("cogwheel D must be >= 2", f"cogwheel.evolution_dims[{i}]")
        for suite, key in (("scalar-real", "scalar_real"), ("scalar-complex", "scalar_complex"),
                           ("vector", "vector")):
            if suite not in self.suites:
                continue
            for i, triple in enumerate(getattr(self.bosons, key)):
                path = f"bosons.{key}[{i}]"
                if len(triple) != 3:
                    raise ConfigError("expected [F, M, D]", path)
                F, M, D = triple
                if F not in (1, 2, 3, 6) or M < 1 or D < 2:
                    raise ConfigError("need F in {1,2,3,6}, M >= 1, D >= 2", path)
                if D ** (F * M) > 4096:
                    raise ConfigError(f"D^(F*M) = {D ** (F * M)} exceeds the Gram cap 4096", path)
        if self.bosons.lattice not in ("commensurate", "line"):
            raise ConfigError("must be 'commensurate' or 'line'", "bosons.lattice")
        for i, k in enumerate(self.fermion.K):
            if not 1 <= 2 * k <= min(FERMION_MODE_CAP, 12):
                raise ConfigError("need 1 <= K and 2K <= 12", f"fermion.K[{i}]")
        if self.fermion.evolution_sign not in (1, -1):
            raise ConfigError("must be +1 or -1", "fermion.evolution_sign")
        if not self.fermion.directions:
            raise ConfigError("need at least one direction", "fermion.directions")
        cx = self.counterexamples
        if cx.coherent_radius**2 > cx.coherent_dim / 4:
            raise ConfigError("radius^2 must be <= coherent_dim / 4", "counterexamples.coherent_radius")
        if cx.dirac_dim ** (2 * cx.dirac_K) > DIM_CAP:
            raise ConfigError("bosonic dirac demo too large", "counterexamples.dirac_dim")
        for key in ("c", "hbar", "mu", "delta_k", "delta_r"):
            if not getattr(self.physics, key) > 0:
                raise ConfigError("must be > 0", f"physics.{key}")
        if self.output.format not in ("json", "csv"):
            raise ConfigError("must be 'json' or 'csv'", "output.format")
        return self


def _coerce(value, default, path):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected a boolean, got {value!r}", path)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", path)
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", path)
        return value
    return value


def _apply(obj, data, prefix):
    if not isinstance(data, dict):
        raise ConfigError("expected a section", prefix or "<root>")
    names = {f.name: f for f in dataclasses.fields(obj)}
    for key, value in data.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in names:
            raise ConfigError("unknown field", path)
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current):
            _apply(current, value, path)
        else:
            setattr(obj, key, _coerce(value, current, path))


def config_from_dict(data: dict) -> RunConfig:
    cfg = RunConfig()
    _apply(cfg, data, "")
    return cfg.validate()


def load_config(path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}", str(path)) from exc
    return config_from_dict(data)
