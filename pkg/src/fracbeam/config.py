"""Problem configuration read from INI-style files.

Example::

    [geometry]
    L = 1.0
    h = 0.01
    b = 1.0

    [material]
    E = 3e9

    [fractional]
    alpha = 0.8
    lf = 0.1          ; horizon length as a fraction of L

    [mesh]
    n_inf = 10        ; elements per horizon length (ignored if ne is set)
    ; ne = 100

    [load]
    kind = udl        ; udl | point
    magnitude = 10
    nondimensional = true
    location = 0.5    ; point-load position as a fraction of L

    [bc]
    kind = clamped    ; clamped | pinned

    [solver]
    load_steps = 10
    tol = 1e-6
    max_iters = 50
    divergence_factor = 1e8
    ngp = 4
    nonlinear = true
    strict_floor = false  ; count horizon elements from the host element start
    ; horizon_gauss = 8   ; Gauss points on non-host horizon elements

    [sweep]
    alphas = 1.0, 0.9, 0.8, 0.7, 0.6, 0.5
    lf = 0.05, 0.1, 0.2
    n_inf = 2, 5, 10, 20

    [output]
    directory = results

Every key is optional.
"""

from __future__ import annotations

import configparser
import dataclasses
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .basis import default_mesh_size
from .errors import ConfigError, DomainError
from .kernel import FracParams
from .mesh import Mesh, QuadRule
from .system import BCKind, LoadSpec, SectionProps


@dataclass(frozen=True)
class SolverControls:
    """Load stepping and Newton-Raphson settings."""

    load_steps: int = 10
    tol: float = 1e-6
    max_iters: int = 50
    divergence_factor: float = 1e8

    def __post_init__(self):
        if self.load_steps < 1:
            raise ConfigError("load_steps must be at least 1")
        if not 0.0 < self.tol < 1.0:
            raise ConfigError("tol must lie in (0, 1)")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")
        if self.divergence_factor <= 1.0:
            raise ConfigError("divergence_factor must exceed 1")


@dataclass(frozen=True)
class BeamConfig:
    """Full problem description.  Loads may be nondimensional (``q L / h``)."""

    L: float = 1.0
    h: float = 0.01
    b: float = 1.0
    E: float = 3e9
    alpha: float = 0.8
    lf_ratio: float = 0.1
    ne: int | None = None
    n_inf: int = 10
    load_kind: str = "udl"
    magnitude: float = 10.0
    nondimensional: bool = True
    location_ratio: float = 0.5
    bc: BCKind = BCKind.CLAMPED
    controls: SolverControls = field(default_factory=SolverControls)
    ngp: int = 4
    nonlinear: bool = True
    strict_floor: bool = False
    horizon_gauss: int | None = None
    sweep_alphas: tuple = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5)
    sweep_lf_ratios: tuple = (0.05, 0.1, 0.2)
    sweep_n_inf: tuple = (2, 5, 10, 20)
    output_dir: str = "results"

    def __post_init__(self):
        object.__setattr__(self, "bc", BCKind.parse(self.bc))
        if min(self.L, self.h, self.b, self.E) <= 0.0:
            raise ConfigError("L, h, b and E must be positive")
        if self.load_kind not in ("udl", "point"):
            raise ConfigError(f"load kind must be 'udl' or 'point', got {self.load_kind!r}")
        if not 0.0 <= self.location_ratio <= 1.0:
            raise ConfigError("point-load location must lie within the beam")
        if self.ne is not None and self.ne < 2:
            raise ConfigError("ne must be at least 2")
        if self.n_inf < 1:
            raise ConfigError("n_inf must be at least 1")
        if self.ngp < 1:
            raise ConfigError("ngp must be at least 1")
        if self.L / self.h < 20.0:
            warnings.warn(f"L/h = {self.L / self.h:g} is below 20; thin-beam kinematics are questionable", stacklevel=2)
        try:
            self.frac
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def lf(self) -> float:
        return self.lf_ratio * self.L

    @property
    def frac(self) -> FracParams:
        return FracParams(self.alpha, self.lf)

    @property
    def section(self) -> SectionProps:
        return SectionProps(self.E, self.b, self.h)

    @property
    def n_elements(self) -> int:
        if self.ne is not None:
            return self.ne
        return default_mesh_size(self.L, self.lf, self.n_inf)

    @property
    def mesh(self) -> Mesh:
        return Mesh(self.L, self.n_elements)

    @property
    def quad(self) -> QuadRule:
        return QuadRule(self.ngp)

    @property
    def load_si(self) -> float:
        """Load magnitude in N/m (UDL) or N (point load)."""
        return self.magnitude * self.h / self.L if self.nondimensional else self.magnitude

    @property
    def load(self) -> LoadSpec:
        if self.load_kind == "point":
            return LoadSpec("point", self.load_si, self.location_ratio * self.L)
        return LoadSpec("udl", self.load_si)

    def replace(self, **changes) -> "BeamConfig":
        return dataclasses.replace(self, **changes)


_KEYS = {
    ("geometry", "l"): ("L", float),
    ("geometry", "h"): ("h", float),
    ("geometry", "b"): ("b", float),
    ("material", "e"): ("E", float),
    ("fractional", "alpha"): ("alpha", float),
    ("fractional", "lf"): ("lf_ratio", float),
    ("mesh", "ne"): ("ne", int),
    ("mesh", "n_inf"): ("n_inf", int),
    ("load", "kind"): ("load_kind", str),
    ("load", "magnitude"): ("magnitude", float),
    ("load", "nondimensional"): ("nondimensional", bool),
    ("load", "location"): ("location_ratio", float),
    ("bc", "kind"): ("bc", str),
    ("solver", "ngp"): ("ngp", int),
    ("solver", "nonlinear"): ("nonlinear", bool),
    ("solver", "strict_floor"): ("strict_floor", bool),
    ("solver", "horizon_gauss"): ("horizon_gauss", int),
    ("sweep", "alphas"): ("sweep_alphas", "floats"),
    ("sweep", "lf"): ("sweep_lf_ratios", "floats"),
    ("sweep", "n_inf"): ("sweep_n_inf", "ints"),
    ("output", "directory"): ("output_dir", str),
}
_CONTROL_KEYS = {
    "load_steps": int,
    "tol": float,
    "max_iters": int,
    "divergence_factor": float,
}


def _convert(parser, section, key, kind):
    raw = parser.get(section, key)
    try:
        if kind is bool:
            return parser.getboolean(section, key)
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None


def parse_config(text: str, source: str = "<string>") -> BeamConfig:
    """Build a :class:`BeamConfig` from INI text; unknown keys are rejected."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    values, controls = {}, {}
    for section in parser.sections():
        for key in parser.options(section):
            if section == "solver" and key in _CONTROL_KEYS:
                controls[key] = _convert(parser, section, key, _CONTROL_KEYS[key])
            elif (section, key) in _KEYS:
                name, kind = _KEYS[(section, key)]
                values[name] = _convert(parser, section, key, kind)
            else:
                raise ConfigError(f"{source}: unknown key [{section}] {key}")
    try:
        return BeamConfig(controls=SolverControls(**controls), **values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> BeamConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, source=str(path))
