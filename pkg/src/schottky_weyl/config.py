"""JSON group configurations.

A document looks like::

    {
      "factors": [
        {"disks": [{"index": 1, "center": -6, "radius": 1}, ...],
         "generators": {"1": [[2, 13], [-1, -6]]}}
      ],
      "degree": 24, "depth": 12, "tolerance": 1e-7, "rho": 1.0
    }

``generators`` is optional and keyed by positive disk index.  Unknown keys
are rejected.  Errors carry the path of the offending field, e.g.
``factors[0].disks[2].radius``, and syntax errors their line and column.
Geometric problems (duplicate indices, overlapping disks) are reported when
the group is built, not while parsing.
"""
from dataclasses import dataclass, field
import json
import math

from .schottky import Disk, ProductGroup, build_factor

__all__ = ["ConfigError", "DiskSpec", "FactorSpec", "Config", "parse_config", "load_config"]

TOP_KEYS = {"factors", "degree", "depth", "tolerance", "rho"}
FACTOR_KEYS = {"disks", "generators"}
DISK_KEYS = {"index", "center", "radius"}


class ConfigError(ValueError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path:
            where = f"{path}: "
        elif line is not None:
            where = f"line {line}, column {column}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class DiskSpec:
    index: int
    center: float
    radius: float


@dataclass(frozen=True)
class FactorSpec:
    disks: tuple
    generators: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Config:
    factors: tuple
    degree: int = 24
    depth: int = 12
    tolerance: float = 1e-7
    rho: float = 1.0

    @property
    def rank(self):
        return len(self.factors)

    def build(self):
        """The ``ProductGroup`` described by the document (may raise ``SchottkyError``)."""
        factors = []
        for spec in self.factors:
            disks = [Disk(d.center, d.radius, d.index) for d in spec.disks]
            factors.append(build_factor(disks, spec.generators or None))
        return ProductGroup(tuple(factors))

    def to_dict(self):
        factors = []
        for spec in self.factors:
            entry = {"disks": [{"index": d.index, "center": d.center, "radius": d.radius} for d in spec.disks]}
            if spec.generators:
                entry["generators"] = {str(k): [list(r) for r in m] for k, m in sorted(spec.generators.items())}
            factors.append(entry)
        return {"factors": factors, "degree": self.degree, "depth": self.depth,
                "tolerance": self.tolerance, "rho": self.rho}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _check_keys(obj, allowed, path):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", path or "<root>")
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r}", f"{path}.{k}" if path else k)


def _number(v, path, positive=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", path)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError("number must be finite", path)
    if positive and not v > 0:
        raise ConfigError(f"must be positive, got {v!r}", path)
    return v


def _integer(v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"expected an integer, got {v!r}", path)
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", path)
    return v


def _matrix(v, path):
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(r, list) and len(r) == 2 for r in v)):
        raise ConfigError("expected a 2x2 matrix [[a, b], [c, d]]", path)
    return tuple(tuple(_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(v))


def _parse_factor(obj, path):
    _check_keys(obj, FACTOR_KEYS, path)
    if "disks" not in obj:
        raise ConfigError("missing key 'disks'", path)
    if not isinstance(obj["disks"], list) or not obj["disks"]:
        raise ConfigError("expected a non-empty list", f"{path}.disks")
    disks = []
    for i, d in enumerate(obj["disks"]):
        dp = f"{path}.disks[{i}]"
        _check_keys(d, DISK_KEYS, dp)
        for k in sorted(DISK_KEYS):
            if k not in d:
                raise ConfigError(f"missing key {k!r}", dp)
        index = _integer(d["index"], f"{dp}.index")
        if index == 0:
            raise ConfigError("disk index must be nonzero", f"{dp}.index")
        disks.append(DiskSpec(index, _number(d["center"], f"{dp}.center"),
                              _number(d["radius"], f"{dp}.radius", positive=True)))
    gens = {}
    raw = obj.get("generators", {})
    if not isinstance(raw, dict):
        raise ConfigError("expected an object keyed by positive index", f"{path}.generators")
    for key, m in raw.items():
        gp = f"{path}.generators.{key}"
        try:
            k = int(key)
        except ValueError:
            raise ConfigError("generator key must be a positive integer", gp) from None
        if k <= 0:
            raise ConfigError("generator key must be a positive integer", gp)
        gens[k] = _matrix(m, gp)
    return FactorSpec(tuple(disks), gens)


def parse_config(text):
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno, column=exc.colno) from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _check_keys(obj, TOP_KEYS, "")
    if "factors" not in obj:
        raise ConfigError("missing key 'factors'", "<root>")
    if not isinstance(obj["factors"], list) or not obj["factors"]:
        raise ConfigError("expected a non-empty list", "factors")
    factors = tuple(_parse_factor(f, f"factors[{i}]") for i, f in enumerate(obj["factors"]))
    opts = {}
    if "degree" in obj:
        opts["degree"] = _integer(obj["degree"], "degree", 0)
    if "depth" in obj:
        opts["depth"] = _integer(obj["depth"], "depth", 1)
    if "tolerance" in obj:
        opts["tolerance"] = _number(obj["tolerance"], "tolerance", positive=True)
    if "rho" in obj:
        rho = _number(obj["rho"], "rho", positive=True)
        if rho > 1:
            raise ConfigError(f"must lie in (0, 1], got {rho}", "rho")
        opts["rho"] = rho
    return Config(factors, **opts)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
