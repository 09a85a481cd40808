"""Experiment configs: a flat INI-style key-value format with sections.

The full grammar is documented in the README. Parsing is strict: unknown
sections or keys are rejected with the offending line, and a parsed config
serializes back to an equivalent text.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field

from .errors import ConfigError
from .schedules import CompetitionSchedule, make_schedule

GRAPH_KINDS = ("er", "path", "star", "complete")
WEIGHT_KINDS = ("metropolis", "lazy_metropolis", "row_stochastic")
EXPERIMENT_KEYS = {
    "n", "horizon", "seed", "out_dir", "eps_conv", "underflow", "tail_eps", "emit_alt_distance",
}
SCHEDULE_KEYS = {
    "constant": {"lam"},
    "exponential": {"rate"},
    "hyperbolic": set(),
    "zero": set(),
    "custom": {"seq"},
    "adversarial": {"tstar", "target"},
}


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    p: float = 0.1


@dataclass(frozen=True)
class ScheduleSpec:
    label: str
    kind: str
    lam: float | None = None
    rate: float | None = None
    seq: tuple[float, ...] | None = None
    tstar: int | str | None = None
    target: int | str | None = None

    @property
    def is_adversarial(self) -> bool:
        return self.kind == "adversarial"

    def build_uniform(self) -> CompetitionSchedule:
        if self.is_adversarial:
            raise ConfigError(f"schedule {self.label!r} is adversarial, not uniform")
        if self.kind == "constant":
            return make_schedule("constant", lam=self.lam)
        if self.kind == "exponential":
            return make_schedule("exponential", rate=self.rate)
        if self.kind == "custom":
            return make_schedule("custom", seq=self.seq)
        return make_schedule(self.kind)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    graph: GraphSpec
    weights: str
    schedules: tuple[ScheduleSpec, ...]
    x0_uniform: tuple[float, float] | None = None
    x0_values: tuple[float, ...] | None = None
    horizon: int = 1000
    seed: int = 0
    out_dir: str = "results"
    eps_conv: float = 1e-8
    underflow: float = 1e-14
    tail_eps: float = 1e-14
    emit_alt_distance: bool = False


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    """Best-effort line number of a section header or of a key inside it."""
    in_section = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("["):
            if in_section and key is not None:
                return None
            in_section = stripped == f"[{section}]"
            if in_section and key is None:
                return lineno
            continue
        if in_section and key is not None:
            if re.match(rf"^{re.escape(key)}\s*[=:]", stripped):
                return lineno
    return None


class _Section:
    """One parsed section with typed, tracked access to its keys."""

    def __init__(self, text: str, name: str, items: dict[str, str]):
        self.text = text
        self.name = name
        self.items = items
        self.used: set[str] = set()

    def _raw(self, key: str, required: bool, default=None):
        if key not in self.items:
            if required:
                raise ConfigError(
                    f"missing required key {key!r} in section [{self.name}]",
                    line=_line_of(self.text, self.name), field=f"{self.name}.{key}",
                )
            return default
        self.used.add(key)
        return self.items[key]

    def _error(self, key: str, message: str) -> ConfigError:
        return ConfigError(
            message, line=_line_of(self.text, self.name, key), field=f"{self.name}.{key}"
        )

    def get_int(self, key: str, required: bool = False, default: int | None = None) -> int | None:
        raw = self._raw(key, required, default)
        if raw is default:
            return default
        try:
            return int(raw)
        except (TypeError, ValueError):
            raise self._error(key, f"expected an integer for {key!r}, got {raw!r}") from None

    def get_float(self, key: str, required: bool = False, default: float | None = None) -> float | None:
        raw = self._raw(key, required, default)
        if raw is default:
            return default
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise self._error(key, f"expected a number for {key!r}, got {raw!r}") from None

    def get_str(self, key: str, required: bool = False, default: str | None = None,
                choices: tuple[str, ...] | None = None) -> str | None:
        raw = self._raw(key, required, default)
        if raw is default:
            return default
        if choices is not None and raw not in choices:
            raise self._error(key, f"{key!r} must be one of {list(choices)}, got {raw!r}")
        return raw

    def get_bool(self, key: str, default: bool = False) -> bool:
        raw = self._raw(key, False, None)
        if raw is None:
            return default
        low = raw.strip().lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise self._error(key, f"expected a boolean for {key!r}, got {raw!r}")

    def get_floats(self, key: str, required: bool = False) -> tuple[float, ...] | None:
        raw = self._raw(key, required, None)
        if raw is None:
            return None
        try:
            return tuple(float(v) for v in raw.split())
        except ValueError:
            raise self._error(key, f"expected space-separated numbers for {key!r}") from None

    def reject_unknown(self, known: set[str]) -> None:
        for key in self.items:
            if key not in known:
                raise ConfigError(
                    f"unknown key {key!r} in section [{self.name}]",
                    line=_line_of(self.text, self.name, key), field=f"{self.name}.{key}",
                )


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config text; raises ConfigError with diagnostics."""
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"config syntax error: {exc.message.splitlines()[0]}", line=line) from exc

    sections = {name: _Section(text, name, dict(parser.items(name))) for name in parser.sections()}

    for name in sections:
        if name not in ("experiment", "graph", "weights", "x0") and not name.startswith("schedule."):
            raise ConfigError(f"unknown section [{name}]", line=_line_of(text, name))
    for required in ("experiment", "graph", "weights", "x0"):
        if required not in sections:
            raise ConfigError(f"missing required section [{required}]")

    exp = sections["experiment"]
    exp.reject_unknown(EXPERIMENT_KEYS)
    n = exp.get_int("n", required=True)
    if n < 2:
        raise exp._error("n", f"need at least 2 agents, got {n}")
    horizon = exp.get_int("horizon", default=1000)
    if horizon < 1:
        raise exp._error("horizon", f"horizon must be >= 1, got {horizon}")
    seed = exp.get_int("seed", default=0)
    if not 0 <= seed < 2**64:
        raise exp._error("seed", "seed must fit in an unsigned 64-bit integer")
    out_dir = exp.get_str("out_dir", default="results")
    eps_conv = exp.get_float("eps_conv", default=1e-8)
    underflow = exp.get_float("underflow", default=1e-14)
    tail_eps = exp.get_float("tail_eps", default=1e-14)
    emit_alt = exp.get_bool("emit_alt_distance", default=False)

    gsec = sections["graph"]
    gsec.reject_unknown({"kind", "p"})
    gkind = gsec.get_str("kind", required=True, choices=GRAPH_KINDS)
    p = gsec.get_float("p", default=0.1)
    if gkind == "er" and not 0.0 <= p <= 1.0:
        raise gsec._error("p", f"edge probability must lie in [0, 1], got {p}")
    if gkind != "er" and "p" in gsec.items:
        raise gsec._error("p", f"key 'p' only applies to kind 'er', not {gkind!r}")

    wsec = sections["weights"]
    wsec.reject_unknown({"kind"})
    wkind = wsec.get_str("kind", required=True, choices=WEIGHT_KINDS)

    xsec = sections["x0"]
    xsec.reject_unknown({"uniform", "values"})
    x0_uniform = xsec.get_floats("uniform")
    x0_values = xsec.get_floats("values")
    if (x0_uniform is None) == (x0_values is None):
        raise ConfigError(
            "section [x0] needs exactly one of 'uniform' or 'values'",
            line=_line_of(text, "x0"), field="x0",
        )
    if x0_uniform is not None:
        if len(x0_uniform) != 2 or x0_uniform[0] >= x0_uniform[1]:
            raise xsec._error("uniform", "expected 'low high' with low < high")
    if x0_values is not None and len(x0_values) != n:
        raise xsec._error("values", f"expected {n} values, got {len(x0_values)}")

    schedules = []
    for name, sec in sections.items():
        if not name.startswith("schedule."):
            continue
        label = name[len("schedule."):]
        if not re.fullmatch(r"[A-Za-z0-9._-]+", label):
            raise ConfigError(
                "schedule label must be non-empty and use only [A-Za-z0-9._-]: "
                f"[schedule.{label}]", line=_line_of(text, name),
            )
        kind = sec.get_str("kind", required=True, choices=tuple(SCHEDULE_KEYS))
        sec.reject_unknown({"kind"} | SCHEDULE_KEYS[kind])
        spec = ScheduleSpec(label=label, kind=kind)
        if kind == "constant":
            spec = ScheduleSpec(label=label, kind=kind, lam=sec.get_float("lam", required=True))
        elif kind == "exponential":
            spec = ScheduleSpec(label=label, kind=kind, rate=sec.get_float("rate", required=True))
        elif kind == "custom":
            spec = ScheduleSpec(label=label, kind=kind, seq=sec.get_floats("seq", required=True))
        elif kind == "adversarial":
            raw_tstar = sec._raw("tstar", True)
            tstar: int | str
            if raw_tstar == "auto":
                tstar = "auto"
            else:
                try:
                    tstar = int(raw_tstar)
                except ValueError:
                    raise sec._error("tstar", f"expected an integer or 'auto', got {raw_tstar!r}") from None
                if tstar < 0:
                    raise sec._error("tstar", f"tstar must be >= 0, got {tstar}")
            raw_target = sec._raw("target", False, "argmax")
            target: int | str
            if raw_target == "argmax":
                target = "argmax"
            else:
                try:
                    target = int(raw_target)
                except ValueError:
                    raise sec._error("target", f"expected an integer or 'argmax', got {raw_target!r}") from None
                if not 0 <= target < n:
                    raise sec._error("target", f"target must lie in [0, {n - 1}], got {target}")
            spec = ScheduleSpec(label=label, kind=kind, tstar=tstar, target=target)
        try:
            if not spec.is_adversarial:
                spec.build_uniform()
        except Exception as exc:
            raise ConfigError(f"invalid schedule {label!r}: {exc}", line=_line_of(text, name)) from exc
        schedules.append(spec)

    if not schedules:
        raise ConfigError("at least one [schedule.<label>] section is required")
    labels = [s.label for s in schedules]
    if len(set(labels)) != len(labels):
        raise ConfigError("schedule labels must be unique")

    return ExperimentConfig(
        n=n, graph=GraphSpec(kind=gkind, p=p), weights=wkind,
        schedules=tuple(schedules), x0_uniform=x0_uniform, x0_values=x0_values,
        horizon=horizon, seed=seed, out_dir=out_dir,
        eps_conv=eps_conv, underflow=underflow, tail_eps=tail_eps,
        emit_alt_distance=emit_alt,
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    """Render a config back to its text form (canonical key order)."""
    lines = [
        "[experiment]",
        f"n = {cfg.n}",
        f"horizon = {cfg.horizon}",
        f"seed = {cfg.seed}",
        f"out_dir = {cfg.out_dir}",
        f"eps_conv = {cfg.eps_conv:g}",
        f"underflow = {cfg.underflow:g}",
        f"tail_eps = {cfg.tail_eps:g}",
        f"emit_alt_distance = {str(cfg.emit_alt_distance).lower()}",
        "",
        "[graph]",
        f"kind = {cfg.graph.kind}",
    ]
    if cfg.graph.kind == "er":
        lines.append(f"p = {cfg.graph.p:g}")
    lines += ["", "[weights]", f"kind = {cfg.weights}", "", "[x0]"]
    if cfg.x0_uniform is not None:
        lines.append("uniform = " + " ".join(f"{v:g}" for v in cfg.x0_uniform))
    else:
        lines.append("values = " + " ".join(repr(v) for v in cfg.x0_values))
    for spec in cfg.schedules:
        lines += ["", f"[schedule.{spec.label}]", f"kind = {spec.kind}"]
        if spec.kind == "constant":
            lines.append(f"lam = {spec.lam:g}")
        elif spec.kind == "exponential":
            lines.append(f"rate = {spec.rate:g}")
        elif spec.kind == "custom":
            lines.append("seq = " + " ".join(repr(v) for v in spec.seq))
        elif spec.kind == "adversarial":
            lines.append(f"tstar = {spec.tstar}")
            lines.append(f"target = {spec.target}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
