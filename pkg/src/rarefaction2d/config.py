"""Flat ``section.key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Values are typed by the
schema below. Every problem is reported as :class:`ConfigError` naming the
offending key.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from . import exactwave, geometry
from .errors import ConfigError, HyperbolicityViolated


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (parser, default); default None means required when relevant
SCHEMA = {
    "curve.kind": (str, None),
    "curve.k": (float, None),
    "curve.c": (float, 0.0),
    "curve.k1": (float, None),
    "curve.c1": (float, 0.0),
    "curve.k2": (float, None),
    "curve.c2": (float, 0.0),
    "curve.eps0": (float, 1.0),
    "curve.amplitude": (float, None),
    "curve.width": (float, 1.0),
    "curve.shape": (str, "arctan"),
    "curve2.kind": (str, None),
    "curve2.k": (float, None),
    "curve2.c": (float, 0.0),
    "curve2.k1": (float, None),
    "curve2.c1": (float, 0.0),
    "curve2.k2": (float, None),
    "curve2.c2": (float, 0.0),
    "curve2.eps0": (float, 1.0),
    "curve2.amplitude": (float, None),
    "curve2.width": (float, 1.0),
    "curve2.shape": (str, "arctan"),
    "riemann.u_minus": (float, None),
    "riemann.u_plus": (float, None),
    "grid.x_lo": (float, -8.0),
    "grid.x_hi": (float, 8.0),
    "grid.y_lo": (float, -8.0),
    "grid.y_hi": (float, 8.0),
    "grid.n1": (int, 64),
    "grid.n2": (int, 64),
    "solver.coords": (str, "original"),
    "solver.scheme": (str, "explicit"),
    "solver.cfl": (float, 0.8),
    "solver.advection": (str, "llf"),
    "solver.mixed_stencil": (str, "centered"),
    "solver.boundary": (str, "exact-wave"),
    "solver.start_time": (float, 0.0),
    "solver.end_time": (float, 4.0),
    "solver.snapshots": (_floats, ()),
    "perturbation.amplitude": (float, 0.0),
    "perturbation.center_x": (float, 0.0),
    "perturbation.center_y": (float, 0.0),
    "perturbation.radius": (float, 1.0),
    "construct.times": (_floats, (1.0, 2.0, 4.0)),
    "profile.times": (_floats, (1.0, 2.0, 4.0, 8.0)),
    "profile.n_xi": (int, 33),
    "profile.n_eta": (int, 401),
    "decay.half_width": (float, 150.0),
    "decay.n": (int, 512),
    "decay.times": (_floats, (4.0, 8.0, 16.0, 32.0, 64.0)),
    "decay.doubling": (_bool, True),
    "compare.times": (_floats, (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)),
    "compare.n": (int, 256),
    "verify.tamper": (str, "none"),
    "verify.samples": (int, 1000),
    "output.format": (str, "binary"),
    "seed": (int, 0),
}

CURVE_KINDS = ("line", "polyline", "perturbed")
_CURVE_KEYS = {
    "line": ("k", "c"),
    "polyline": ("k1", "c1", "k2", "c2", "eps0"),
    "perturbed": ("k", "c", "amplitude", "width", "shape"),
}


def parse_text(text):
    """Raw ``{key: string}`` from config text."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(key, "unknown key")
        if key in raw:
            raise ConfigError(key, "given twice")
        raw[key] = value
    return raw


@dataclass
class RunConfig:
    values: dict
    explicit: frozenset

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def digest(self):
        """Hash of the resolved configuration (worker count and paths excluded)."""
        lines = [f"{k}={_canonical(self.values[k])}" for k in sorted(self.values)]
        return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]

    def curve(self, prefix="curve"):
        return build_curve(self.values, prefix)

    def riemann(self, prefix="curve"):
        try:
            return exactwave.RiemannData(self["riemann.u_minus"], self["riemann.u_plus"], self.curve(prefix))
        except HyperbolicityViolated:
            raise
        except ValueError as exc:
            raise ConfigError("riemann.u_minus", str(exc)) from None


def _canonical(v):
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def resolve(raw, require=("curve", "riemann")):
    values = {}
    for key, (parser, default) in SCHEMA.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
        else:
            values[key] = default
    cfg = RunConfig(values, frozenset(raw))
    if "riemann" in require:
        for key in ("riemann.u_minus", "riemann.u_plus"):
            if values[key] is None:
                raise ConfigError(key, "missing required field")
        if not values["riemann.u_minus"] < values["riemann.u_plus"]:
            raise ConfigError("riemann.u_minus", "must be smaller than riemann.u_plus")
    if "curve" in require:
        _check_curve(values, "curve")
    if "curve2" in require:
        _check_curve(values, "curve2")
    for key in ("grid.n1", "grid.n2"):
        if values[key] < 8:
            raise ConfigError(key, "need at least 8 nodes")
    if not values["grid.x_lo"] < values["grid.x_hi"]:
        raise ConfigError("grid.x_hi", "must exceed grid.x_lo")
    if not values["grid.y_lo"] < values["grid.y_hi"]:
        raise ConfigError("grid.y_hi", "must exceed grid.y_lo")
    if not 0.0 < values["solver.cfl"] <= 1.0:
        raise ConfigError("solver.cfl", "must lie in (0, 1]")
    if values["solver.coords"] not in ("original", "transformed"):
        raise ConfigError("solver.coords", "expected original or transformed")
    if values["output.format"] not in ("binary", "csv"):
        raise ConfigError("output.format", "expected binary or csv")
    if values["verify.tamper"] not in ("none", "A"):
        raise ConfigError("verify.tamper", "expected none or A")
    for key in ("construct.times", "compare.times", "decay.times"):
        if any(t <= 0 for t in values[key]):
            raise ConfigError(key, "times must be positive")
    return cfg


def _check_curve(values, prefix):
    kind = values[f"{prefix}.kind"]
    if kind is None:
        raise ConfigError(f"{prefix}.kind", "missing required field")
    if kind not in CURVE_KINDS:
        raise ConfigError(f"{prefix}.kind", f"expected one of {CURVE_KINDS}")
    for k in _CURVE_KEYS[kind]:
        if values[f"{prefix}.{k}"] is None:
            raise ConfigError(f"{prefix}.{k}", "missing required field")


def build_curve(values, prefix="curve"):
    _check_curve(values, prefix)
    g = lambda k: values[f"{prefix}.{k}"]  # noqa: E731
    kind = g("kind")
    try:
        if kind == "line":
            return geometry.Line(g("k"), g("c"))
        if kind == "polyline":
            return geometry.mollify_polyline(g("k1"), g("c1"), g("k2"), g("c2"), g("eps0"))
        return geometry.SmoothPerturbedLine(g("k"), g("c"), g("amplitude"), g("width"), g("shape"))
    except HyperbolicityViolated:
        raise
    except ValueError as exc:
        raise ConfigError(prefix, str(exc)) from None


def load(path, require=("curve", "riemann")):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    return resolve(parse_text(text), require)

