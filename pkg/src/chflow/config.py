"""Flat key=value run configuration.

One `section.key = value` pair per line, '#' starts a comment, unknown or
duplicate keys are rejected with the offending line number.  Lists are
comma-separated; point lists (theta centers) separate pairs with ';'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fields import FlowParams
from .grid import Grid, make_grid
from .scenarios import KINDS, Scenario

_REQUIRED = object()


class ConfigError(ValueError):
    pass


def _parse_int(s):
    return int(s)


def _parse_float(s):
    return float(s)


def _parse_bool(s):
    low = s.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_str(s):
    return s


def _parse_float_list(s):
    items = [x.strip() for x in s.split(",") if x.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(float(x) for x in items)


def _parse_pair(s):
    parts = [x.strip() for x in s.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers: {s!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_pair_list(s):
    items = [x.strip() for x in s.split(";") if x.strip()]
    if not items:
        raise ValueError("empty point list")
    return tuple(_parse_pair(x) for x in items)


_KEYS = {
    "grid.n": (_parse_int, 64),
    "grid.length": (_parse_float, 2.0 * math.pi),
    "target.ambient_dim": (_parse_int, 3),
    "flow.a": (_parse_float, 1.0),
    "flow.b": (_parse_float, 4.0),
    "flow.scheme": (_parse_str, "auto"),
    "flow.cfl": (_parse_float, 0.25),
    "flow.t_end": (_parse_float, _REQUIRED),
    "flow.imex_dt_cap": (_parse_float, None),
    "flow.imex_tol": (_parse_float, 1e-10),
    "flow.imex_max_iter": (_parse_int, 2000),
    "flow.stop_on_blowup": (_parse_bool, False),
    "init.kind": (_parse_str, _REQUIRED),
    "init.amplitude": (_parse_float, 0.0),
    "init.scale": (_parse_float, 0.2),
    "init.center": (_parse_pair, None),
    "init.seed": (_parse_int, 1234),
    "diag.sample_dt": (_parse_float, 0.01),
    "diag.moments": (_parse_float_list, (0.0, 2.0)),
    "diag.theta_centers": (_parse_pair_list, None),
    "diag.theta_radius": (_parse_float, 0.3),
    "diag.ball_radii": (_parse_float_list, (0.2, 0.4)),
    "thresholds.eps0": (_parse_float, 0.5),
    "thresholds.eps1": (_parse_float, 0.3),
    "thresholds.eps2": (_parse_float, 0.3),
    "output.dir": (_parse_str, "out"),
    "output.snapshot_every": (_parse_int, 0),
}


@dataclass
class RunConfig:
    raw: dict = field(repr=False)

    def __getitem__(self, key):
        return self.raw[key]

    # -- resolved object views --------------------------------------------

    def grid(self) -> Grid:
        return make_grid(self.raw["grid.n"], self.raw["grid.length"])

    def resolved_scheme(self) -> str:
        scheme = self.raw["flow.scheme"]
        if scheme == "auto":
            return "explicit" if self.raw["flow.t_end"] <= 5.0 else "imex"
        return scheme

    def params(self) -> FlowParams:
        return FlowParams(a=self.raw["flow.a"], b=self.raw["flow.b"],
                          scheme=self.resolved_scheme(),
                          cfl=self.raw["flow.cfl"],
                          imex_dt_cap=self.raw["flow.imex_dt_cap"],
                          imex_tol=self.raw["flow.imex_tol"],
                          imex_max_iter=self.raw["flow.imex_max_iter"])

    def scenario(self) -> Scenario:
        return Scenario(kind=self.raw["init.kind"],
                        amplitude=self.raw["init.amplitude"],
                        scale=self.raw["init.scale"],
                        center=self.raw["init.center"],
                        seed=self.raw["init.seed"])

    def theta_centers(self):
        centers = self.raw["diag.theta_centers"]
        if centers is None:
            half = 0.5 * self.raw["grid.length"]
            return ((half, half),)
        return centers

    def echo_lines(self):
        """Resolved config as sorted key=value lines (for meta.txt)."""
        out = []
        for key in sorted(self.raw):
            val = self.raw[key]
            if key == "flow.scheme":
                val = self.resolved_scheme()
            out.append(f"{key}={_fmt(val)}")
        return out


def _fmt(val):
    if val is None:
        return "none"
    if isinstance(val, bool):
        return "true" if val else "false"
    if isinstance(val, tuple):
        if val and isinstance(val[0], tuple):
            return ";".join(f"{a:.17g},{b:.17g}" for a, b in val)
        return ",".join(f"{x:.17g}" for x in val)
    if isinstance(val, float):
        return f"{val:.17g}"
    return str(val)


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw_line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        parser, _ = _KEYS[key]
        try:
            values[key] = parser(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from None
    for key, (_, default) in _KEYS.items():
        if key not in values:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r}")
            values[key] = default
    cfg = RunConfig(values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    raw = cfg.raw
    try:
        grid = cfg.grid()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if raw["target.ambient_dim"] < 3:
        raise ConfigError("target.ambient_dim must be at least 3")
    if raw["flow.t_end"] <= 0.0:
        raise ConfigError("flow.t_end must be positive")
    if raw["flow.scheme"] not in ("auto", "explicit", "imex"):
        raise ConfigError(f"flow.scheme must be auto/explicit/imex, "
                          f"got {raw['flow.scheme']!r}")
    if raw["init.kind"] not in KINDS:
        raise ConfigError(f"init.kind must be one of {', '.join(KINDS)}")
    if raw["diag.sample_dt"] <= 0.0:
        raise ConfigError("diag.sample_dt must be positive")
    if any(p < 0.0 for p in raw["diag.moments"]):
        raise ConfigError("diag.moments entries must be >= 0")
    if raw["diag.theta_radius"] <= 2.0 * grid.h:
        raise ConfigError(
            f"diag.theta_radius must exceed 2h = {2.0 * grid.h:g}")
    if raw["diag.theta_radius"] >= 0.5 * grid.length:
        raise ConfigError("diag.theta_radius exceeds half the domain")
    radii = raw["diag.ball_radii"]
    if any(r <= 0.0 for r in radii):
        raise ConfigError("diag.ball_radii must be positive")
    if any(r >= 0.5 * grid.length for r in radii):
        raise ConfigError("diag.ball_radii must stay below half the domain")
    if tuple(sorted(radii)) != radii:
        raise ConfigError("diag.ball_radii must be sorted ascending")
    for name in ("thresholds.eps0", "thresholds.eps1", "thresholds.eps2"):
        if raw[name] <= 0.0:
            raise ConfigError(f"{name} must be positive")
    if raw["output.snapshot_every"] < 0:
        raise ConfigError("output.snapshot_every must be >= 0")
    # constructing FlowParams validates a, b, cfl and warns on a weak b
    try:
        cfg.params()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
