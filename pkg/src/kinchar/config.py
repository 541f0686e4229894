"""Flat ``section.key = value`` run configuration.

One setting per line; ``#`` starts a comment; blank lines are ignored.
Lists are whitespace or comma separated, and matrix rows (measure points)
are separated by ``;``. Unknown keys are errors.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels as kn
from .bobylev import SolverConfig
from .charfun import CharFun
from .measures import make_measure, read_measure
from .quadrature import GridSpec, QuadSpec


class ConfigError(ValueError):
    """A configuration problem; the message names the offending key."""


def _float(s):
    return float(s)


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s):
    parts = s.replace(",", " ").split()
    if not parts:
        raise ValueError("empty list")
    return tuple(float(x) for x in parts)


def _ints(s):
    return tuple(int(x) for x in _floats(s))


def _matrix(s):
    rows = [r for r in s.split(";") if r.strip()]
    return tuple(_floats(r) for r in rows)


def _oneof(*choices):
    def parse(s):
        v = s.strip()
        if v not in choices:
            raise ValueError(f"expected one of {choices}, got {v!r}")
        return v
    return parse


# key -> (parser, default)
SCHEMA = {
    "measure.source": (_oneof("inline", "file"), "inline"),
    "measure.dim": (int, 3),
    "measure.points": (_matrix, ((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0))),
    "measure.weights": (_floats, (0.5, 0.5)),
    "measure.file": (str, None),
    "initial.kind": (_oneof("measure", "isotropic_average", "gaussian"), "measure"),
    "initial.gaussian_a": (_float, 1.0),
    "kernel.form": (_oneof("constant", "grazing", "tabulated"), "constant"),
    "kernel.c": (_float, 1.0),
    "kernel.nu": (_float, 0.5),
    "kernel.K": (_float, 1.0),
    "kernel.theta_min": (_float, 0.0),
    "kernel.theta_max": (_float, 0.5 * np.pi),
    "kernel.theta": (_floats, None),
    "kernel.values": (_floats, None),
    "kernel.normalize_rate": (_float, None),
    "solver.T": (_float, 1.0),
    "solver.dt": (_float, 0.05),
    "solver.mode": (_oneof("isotropic", "grid3d"), "isotropic"),
    "solver.theta_nodes": (int, 8),
    "solver.azimuth_nodes": (int, 16),
    "solver.theta_min": (_float, 0.0),
    "solver.interp_order": (_oneof("linear", "cubic"), None),
    "solver.xi_max": (_float, None),
    "solver.N": (int, None),
    "solver.theta_ratio": (_float, 2.0),
    "solver.output_times": (int, 9),
    "solver.allow_unstable": (_bool, False),
    "solver.fd_order": (int, 2),
    "solver.dump": (_bool, False),
    "diagnostic.k": (int, 2),
    "diagnostic.alpha": (_floats, (0.0, 0.5)),
    "diagnostic.beta": (_floats, (1.0, 1.5, 2.0)),
    "diagnostic.eps": (_float, 0.5),
    "diagnostic.radii": (_floats, (0.5, 1.0, 2.0)),
    "diagnostic.tol": (_float, 0.05),
    "diagnostic.trajectory": (str, None),
    "lambda.betas": (_floats, (0.75, 1.0, 1.25, 1.5, 1.75, 2.0)),
    "charfun.radii": (_floats, (0.1, 0.5, 1.0, 2.0, 5.0)),
    "quad.radial_min": (_float, QuadSpec.radial_min),
    "quad.radial_max": (_float, QuadSpec.radial_max),
    "quad.radial_points": (int, QuadSpec.radial_points),
    "quad.grading_ratio": (_float, QuadSpec.grading_ratio),
    "quad.panel_order": (int, QuadSpec.panel_order),
    "quad.sphere_nodes_polar": (int, QuadSpec.sphere_nodes_polar),
    "quad.sphere_nodes_azimuth": (int, QuadSpec.sphere_nodes_azimuth),
    "quad.rel_tol": (_float, QuadSpec.rel_tol),
    "grid.radial_min": (_float, GridSpec.radial_min),
    "grid.radial_max": (_float, GridSpec.radial_max),
    "grid.radial_points": (int, GridSpec.radial_points),
    "output.dir": (str, "."),
}


def parse_text(text, source="<config>"):
    """Parse config text into a ``{key: raw string}`` dict."""
    raw = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'section.key = value'")
        key, value = (x.strip() for x in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r}")
        raw[key] = value
    return raw


@dataclass
class RunConfig:
    """Typed view of a configuration; :meth:`validate` builds every object."""

    values: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text, source="<config>"):
        raw = parse_text(text, source)
        vals = {k: d for k, (_, d) in SCHEMA.items()}
        for key, s in raw.items():
            parser = SCHEMA[key][0]
            try:
                vals[key] = parser(s)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"invalid value for {key!r}: {exc}") from None
        cfg = cls(vals)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read(), str(path))

    @classmethod
    def default(cls):
        return cls.from_text("")

    def __getitem__(self, key):
        return self.values[key]

    def _guard(self, keys, build):
        try:
            return build()
        except ConfigError:
            raise
        except (ValueError, TypeError, kn.KernelError) as exc:
            raise ConfigError(f"invalid setting among {', '.join(keys)}: {exc}") from None

    # builders ------------------------------------------------------------
    def measure(self):
        v = self.values
        if v["measure.source"] == "file":
            if not v["measure.file"]:
                raise ConfigError("'measure.file' is required when measure.source = file")
            return self._guard(["measure.file"], lambda: read_measure(v["measure.file"]))
        return self._guard(
            ["measure.dim", "measure.points", "measure.weights"],
            lambda: make_measure(v["measure.dim"], v["measure.points"], v["measure.weights"]))

    def kernel(self):
        v = self.values
        form = v["kernel.form"]

        def build():
            if form == "constant":
                B = kn.constant(v["kernel.c"], v["kernel.theta_max"])
                if v["kernel.theta_min"] > 0:
                    B = B.with_cutoff(v["kernel.theta_min"])
            elif form == "grazing":
                B = kn.grazing(v["kernel.nu"], v["kernel.K"], v["kernel.theta_min"],
                               v["kernel.theta_max"])
            else:
                if v["kernel.theta"] is None or v["kernel.values"] is None:
                    raise ConfigError("tabulated kernels need 'kernel.theta' and 'kernel.values'")
                B = kn.tabulated(v["kernel.theta"], v["kernel.values"], v["kernel.theta_max"])
                if v["kernel.theta_min"] > 0:
                    B = B.with_cutoff(v["kernel.theta_min"])
            if v["kernel.normalize_rate"] is not None:
                B = kn.normalized(B, v["kernel.normalize_rate"])
            return B
        return self._guard([k for k in SCHEMA if k.startswith("kernel.")], build)

    def solver(self):
        v = self.values
        names = ("T", "dt", "mode", "theta_nodes", "azimuth_nodes", "theta_min",
                 "interp_order", "xi_max", "N", "theta_ratio", "output_times",
                 "allow_unstable", "fd_order")
        return self._guard([f"solver.{n}" for n in names],
                           lambda: SolverConfig(**{n: v[f"solver.{n}"] for n in names}))

    def initial(self):
        v = self.values
        kind = v["initial.kind"]
        if kind == "gaussian":
            a = v["initial.gaussian_a"]
            if not a > 0:
                raise ConfigError("'initial.gaussian_a' must be positive")
            return CharFun.gaussian(a, 3)
        F = self.measure()
        if F.dim != 3:
            raise ConfigError("'measure.dim' must be 3 for the solver")
        if kind == "isotropic_average":
            from .bobylev import isotropic_average
            return isotropic_average(F)
        return F

    def quad(self):
        v = self.values
        names = ("radial_min", "radial_max", "radial_points", "grading_ratio", "panel_order",
                 "sphere_nodes_polar", "sphere_nodes_azimuth", "rel_tol")
        return self._guard([f"quad.{n}" for n in names],
                           lambda: QuadSpec(**{n: v[f"quad.{n}"] for n in names}))

    def grid(self):
        v = self.values
        g = GridSpec(v["grid.radial_min"], v["grid.radial_max"], v["grid.radial_points"])
        if not 0 < g.radial_min < g.radial_max or g.radial_points < 2:
            raise ConfigError("grid.radial_min/radial_max/radial_points must give a valid ladder")
        return g

    def diagnostic(self):
        v = self.values
        k = v["diagnostic.k"]
        if not 1 <= k <= 16:
            raise ConfigError("'diagnostic.k' must lie in 1..16")
        for a in v["diagnostic.alpha"]:
            if not 0 <= a < 2 or k + a <= 1:
                raise ConfigError("'diagnostic.alpha' entries need 0 <= alpha < 2, k + alpha > 1")
        for b in v["diagnostic.beta"]:
            if not 0 < b <= 2:
                raise ConfigError("'diagnostic.beta' entries must lie in (0, 2]")
        if not 0 < v["diagnostic.eps"] < 1:
            raise ConfigError("'diagnostic.eps' must lie in (0, 1)")
        if any(r <= 0 for r in v["diagnostic.radii"]):
            raise ConfigError("'diagnostic.radii' must be positive")
        if not v["diagnostic.tol"] >= 0:
            raise ConfigError("'diagnostic.tol' must be nonnegative")
        return dict(k=k, alphas=v["diagnostic.alpha"], betas=v["diagnostic.beta"],
                    eps=v["diagnostic.eps"], radii=v["diagnostic.radii"],
                    tol=v["diagnostic.tol"])

    def validate(self):
        """Build every derived object once so errors surface before any run."""
        self.measure()
        self.kernel()
        self.solver()
        self.initial()
        self.quad()
        self.grid()
        self.diagnostic()
        for b in self.values["lambda.betas"]:
            if not 0 < b <= 2:
                raise ConfigError("'lambda.betas' entries must lie in (0, 2]")
        if any(r <= 0 for r in self.values["charfun.radii"]):
            raise ConfigError("'charfun.radii' must be positive")
        return self


def documented_keys():
    """``(key, default)`` pairs for the README and ``--help``."""
    return [(k, d) for k, (_, d) in SCHEMA.items()]
