"""
Run configuration.

A run config is plain text: `[section]` headers, `key = value` lines, `#` or
`;` comments. Comma-separated values become lists. Every key remembers its
line so validation errors can point at it.

    [grid]
    d = 1
    n = 1
    extent = 10
    points = 64

    [packet.main]
    amplitude = 1+0j
    center = 0, 0, 0
    width = 1, 1, 1
    carrier = 3, 0, 0

    [run]
    times = 0.5, 1.0, 2.0
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

import numpy as np
import pydantic
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .cone import ConeResolution
from .errors import ConfigError
from .grid import Field, GaussianPacket, GridSpec, InitialData, mode_field, sample
from .propagator import MultiplierPolicy

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)


class Section(BaseModel):
    """Raw key/value pairs of one section with their line numbers"""

    name: str
    line: int
    values: Dict[str, Union[str, List[str]]] = {}
    lines: Dict[str, int] = {}


def _as_list(value: Any) -> Any:
    if isinstance(value, (str, int, float)):
        return [value]
    return value


def parse_sections(text: str) -> List[Section]:
    sections: List[Section] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]") or len(line) < 3:
                raise ConfigError(f"malformed section header '{line}'", line=number)
            name = line[1:-1].strip()
            if any(section.name == name for section in sections):
                raise ConfigError(f"duplicate section [{name}]", line=number)
            sections.append(Section(name=name, line=number))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=number)
        if not sections:
            raise ConfigError("key outside of any section", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        section = sections[-1]
        if not key:
            raise ConfigError("empty key", line=number)
        if key in section.values:
            raise ConfigError(f"duplicate key '{key}' in [{section.name}]", line=number)
        section.values[key] = [item.strip() for item in value.split(",")] if "," in value else value
        section.lines[key] = number
    return sections


def build(model: Type[Model], section: Section, **extra: Any) -> Model:
    """Validate a section into `model`, translating errors to ConfigError"""
    try:
        return model(**section.values, **extra)
    except ValidationError as error:
        first = error.errors()[0]
        key = str(first["loc"][0]) if first["loc"] else None
        line = section.lines.get(key, section.line) if key else section.line
        where = f"[{section.name}] {key}" if key else f"[{section.name}]"
        raise ConfigError(f"{where}: {first['msg']}", line=line) from error


class ModeBlock(BaseModel):
    """A single discrete plane wave as initial data"""

    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]

    indices_as_list = field_validator("indices", mode="before")(_as_list)


class RunBlock(BaseModel):
    model_config = ConfigDict(frozen=True)

    times: Tuple[float, ...] = (0.0,)
    workers: int = pydantic.Field(default=1, ge=1)
    enforce_concentration: bool = True

    times_as_list = field_validator("times", mode="before")(_as_list)


class OutputBlock(BaseModel):
    model_config = ConfigDict(frozen=True)

    directory: str = "output"
    format: Literal["bin", "csv"] = "bin"
    diagnostics: bool = True


class VerifyBlock(BaseModel):
    """Tolerances and sizes of the verification commands"""

    model_config = ConfigDict(frozen=True)

    tolerance: float = pydantic.Field(default=1e-3, gt=0)
    conservation_tolerance: float = pydantic.Field(default=1e-10, gt=0)
    include_branches: bool = False
    branch_tolerance: float = pydantic.Field(default=1e-2, gt=0)
    resolution_scale: float = pydantic.Field(default=1.0, gt=0)
    cross_check_points: int = pydantic.Field(default=20, ge=1)
    cross_check_radius: float = pydantic.Field(default=2.5, gt=0)
    cross_check_tolerance: float = pydantic.Field(default=1e-3, gt=0)
    initial_tolerance: float = pydantic.Field(default=1e-4, gt=0)
    residual_tolerance: float = pydantic.Field(default=1e-3, gt=0)
    order_target: float = 2.0
    order_tolerance: float = pydantic.Field(default=0.2, gt=0)
    levels: int = pydantic.Field(default=3, ge=2)
    seed: int = 0
    resolution: ConeResolution = ConeResolution()


class RunConfig(BaseModel):
    """Everything one command needs; `text` is the verbatim source"""

    model_config = ConfigDict(frozen=True)

    grid: GridSpec
    packets: Tuple[GaussianPacket, ...] = ()
    mode: Optional[ModeBlock] = None
    run: RunBlock = RunBlock()
    policy: MultiplierPolicy = MultiplierPolicy()
    output: OutputBlock = OutputBlock()
    verify: VerifyBlock = VerifyBlock()
    text: str = ""

    @property
    def initial_data(self) -> InitialData:
        return InitialData(terms=self.packets, enforce_concentration=self.run.enforce_concentration)

    def initial_field(self) -> Field:
        if self.mode is not None:
            return mode_field(self.grid, self.mode.indices)
        return sample(self.initial_data, self.grid)


def _packet_values(section: Section, ndim: int) -> Section:
    values = dict(section.values)
    for key in ("center", "width", "carrier"):
        value = values.get(key)
        if isinstance(value, str):
            values[key] = [value] * ndim
    return section.model_copy(update={"values": values})


def parse_run_config(text: str) -> RunConfig:
    sections = {section.name: section for section in parse_sections(text)}
    known = {"grid", "mode", "run", "policy", "output", "verify"}
    for name, section in sections.items():
        if name not in known and name != "packet" and not name.startswith("packet."):
            raise ConfigError(f"unknown section [{name}]", line=section.line)

    if "grid" not in sections:
        raise ConfigError("missing required section [grid]")
    grid = build(GridSpec, sections["grid"])

    packet_sections = [s for name, s in sections.items() if name == "packet" or name.startswith("packet.")]
    packets = tuple(build(GaussianPacket, _packet_values(s, grid.ndim)) for s in packet_sections)
    mode = build(ModeBlock, sections["mode"]) if "mode" in sections else None
    if mode is not None and packets:
        raise ConfigError("use either [mode] or [packet] sections, not both", line=sections["mode"].line)

    blocks: Dict[str, Any] = {}
    for name, model in (("run", RunBlock), ("policy", MultiplierPolicy), ("output", OutputBlock)):
        if name in sections:
            blocks[name] = build(model, sections[name])

    if "verify" in sections:
        verify = sections["verify"]
        resolution_keys = set(ConeResolution.model_fields)
        resolution = Section(
            name=verify.name,
            line=verify.line,
            values={k: v for k, v in verify.values.items() if k in resolution_keys},
            lines=verify.lines,
        )
        rest = verify.model_copy(
            update={"values": {k: v for k, v in verify.values.items() if k not in resolution_keys}}
        )
        blocks["verify"] = build(VerifyBlock, rest, resolution=build(ConeResolution, resolution))

    try:
        config = RunConfig(grid=grid, packets=packets, mode=mode, text=text, **blocks)
        if mode is not None:
            mode_field(grid, mode.indices)
        else:
            config.initial_data
    except (ValidationError, ValueError) as error:
        anchor = packet_sections[0].line if packet_sections else sections["grid"].line
        raise ConfigError(f"initial data: {error}", line=anchor) from error
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read config {path}: {error}") from error
    config = parse_run_config(text)
    logger.info(f"✅ Loaded run config {path}")
    return config


def central_node_indices(grid: GridSpec, radius: float, count: int, seed: int) -> np.ndarray:
    """`count` distinct random node indices (flat) with every coordinate in [-radius, radius]"""
    inside = [np.flatnonzero(np.abs(axis) <= radius) for axis in grid.axes()]
    candidates = np.ravel_multi_index(np.meshgrid(*inside, indexing="ij"), grid.shape).ravel()
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(candidates, size=min(count, candidates.size), replace=False))
