"""Experiment configuration: a flat ``key = value`` text format plus
programmatic defaults.

The serialisation is deterministic and round-trips exactly
(``to_text(from_text(to_text(c))) == to_text(c)``), so configs can be
diffed and reused as experiment records.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .codec.encoder import ENGINES, CodecParams

_DEFAULT_QSTEPS = (2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass(frozen=True)
class ExperimentConfig:
    """All inputs of one experiment run.

    ``frames`` counts P-frames (the leading intra frame is read on top
    of it); the remaining defaults are the reference operating point.
    """

    input: str = ""
    output_dir: str = "results"
    engines: tuple[str, ...] = ("none", "fsa", "rba")
    qsteps: tuple[float, ...] = _DEFAULT_QSTEPS
    frames: int = 99
    block_size: int = 16
    search_range: int = 16
    mu: float = 0.5
    rho_hat: float = 0.8
    tau: float = 0.5
    fsa_iterations: int = 200
    ba_iterations: int = 20
    rba_iterations: int = 4
    max_per_iteration: int = 20
    fps: float = 30.0
    width: int = 0
    height: int = 0

    def __post_init__(self) -> None:
        for engine in self.engines:
            if engine not in ENGINES:
                raise ValueError(f"unknown engine {engine!r} (choose from {ENGINES})")
        if not self.qsteps:
            raise ValueError("qstep ladder must not be empty")
        if any(q <= 0 for q in self.qsteps):
            raise ValueError("qsteps must be positive")
        if self.frames < 1:
            raise ValueError("frames (P-frame count) must be >= 1")

    def codec_params(self) -> CodecParams:
        return CodecParams(
            block_size=self.block_size,
            search_range=self.search_range,
            mu=self.mu,
            rho_hat=self.rho_hat,
            tau=self.tau,
            fsa_iterations=self.fsa_iterations,
            ba_iterations=self.ba_iterations,
            rba_iterations=self.rba_iterations,
            max_per_iteration=self.max_per_iteration,
            fps=self.fps,
        )


def _format_value(value: object) -> str:
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_text(config: ExperimentConfig) -> str:
    """Serialise as one ``key = value`` line per field, declaration
    order."""
    lines = [
        f"{f.name} = {_format_value(getattr(config, f.name))}"
        for f in fields(config)
    ]
    return "\n".join(lines) + "\n"


def _parse_value(name: str, raw: str, kind: type) -> object:
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        # Remaining fields are tuples: engines (str) or qsteps (float).
        items = [part.strip() for part in raw.split(",") if part.strip()]
        if name == "qsteps":
            return tuple(float(part) for part in items)
        return tuple(items)
    except ValueError as exc:
        raise ValueError(f"config key {name!r}: cannot parse {raw!r}") from exc


def from_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines
    are skipped, unknown keys are errors.  Values not mentioned keep the
    ``base`` (default) values."""
    known = {f.name: f for f in fields(ExperimentConfig)}
    types = {"input": str, "output_dir": str, "engines": tuple, "qsteps": tuple,
             "mu": float, "rho_hat": float, "tau": float, "fps": float}
    overrides: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        name, raw = (part.strip() for part in stripped.split("=", 1))
        if name not in known:
            raise ValueError(f"config line {lineno}: unknown key {name!r}")
        overrides[name] = _parse_value(name, raw, types.get(name, int))
    config = base if base is not None else ExperimentConfig()
    return replace(config, **overrides)


def load(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as source:
        return from_text(source.read())


def save(path: str, config: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        sink.write(to_text(config))
