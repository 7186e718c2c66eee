"""Run configuration: parsing, validation and serialisation.

A configuration is one JSON object::

    {
      "kernel": {"family": "stable", "alpha": 0.5},
      "coefficient": {"family": "random", "nu": 0.5, "Lambda": 2.0, "seed": 1},
      "grid": {"d": 1, "n": 512, "box": 64.0},
      "solve": {"lambdas": [1.0], "ps": [2.0], "variant": "L",
                "f": {"profile": "cos", "frequency": 1.0}},
      "verify": {"suites": ["resolvent-bound"], "options": {},
                 "use_config_grid": false},
      "kernel_check": {"hypotheses": ["LEVY", "SIGMA", "H1", "H2", "CANCEL"]},
      "mc": {"paths": 100000, "points": [[0.0]]},
      "output": "out",
      "seed": 0
    }

Validation errors name the offending field path, e.g. ``grid.n``.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .kernel import VARIANTS, _ALIASES

KERNEL_FAMILIES = ("stable", "subordinate", "exp_tail")
COEFFICIENT_FAMILIES = ("constant", "random")
PROFILES = ("cos", "gauss", "bumps", "file")
HYPOTHESES = ("LEVY", "SIGMA", "H1", "H2", "CANCEL", "H3", "H3ii", "H3iii", "H3iv",
              "TWO-SIDED", "SYMBOL-KERNEL", "SYMBOL-GROWTH")
DEFAULT_HYPOTHESES = ["LEVY", "SIGMA", "H1", "H2", "CANCEL"]


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _get(obj, key, path, kind, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
        return copy.deepcopy(default)
    v = obj[key]
    p = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(p, f"expected a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(p, f"expected an integer, got {v!r}")
        return v
    if kind is bool:
        if not isinstance(v, bool):
            raise ConfigError(p, f"expected true/false, got {v!r}")
        return v
    if kind is str:
        if not isinstance(v, str):
            raise ConfigError(p, f"expected a string, got {v!r}")
        return v
    if kind is list:
        if not isinstance(v, list):
            raise ConfigError(p, f"expected a list, got {v!r}")
        return list(v)
    if kind is dict:
        if not isinstance(v, dict):
            raise ConfigError(p, f"expected an object, got {v!r}")
        return dict(v)
    return v


def _numbers(values, path, positive=False):
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{path}[{i}]", f"expected a number, got {v!r}")
        if positive and not v > 0:
            raise ConfigError(f"{path}[{i}]", f"must be > 0, got {v}")
        out.append(float(v))
    return out


@dataclass
class RunConfig:
    """Validated configuration of one CLI run."""

    kernel: dict
    coefficient: dict = field(default_factory=lambda: {"family": "constant", "value": 1.0})
    grid: dict = field(default_factory=lambda: {"d": 1, "n": 512, "box": 64.0})
    solve: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    kernel_check: dict = field(default_factory=dict)
    mc: dict = field(default_factory=dict)
    output: str = "out"
    seed: int = 0

    # -- parsing ---------------------------------------------------------
    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        known = {"kernel", "coefficient", "grid", "solve", "verify", "kernel_check", "mc",
                 "output", "seed"}
        for k in raw:
            if k not in known:
                raise ConfigError(k, "unknown field")
        kernel = _parse_kernel(_get(raw, "kernel", "", dict, required=True))
        grid = _parse_grid(_get(raw, "grid", "", dict, {"d": 1, "n": 512, "box": 64.0}))
        coef = _parse_coefficient(_get(raw, "coefficient", "", dict,
                                       {"family": "constant", "value": 1.0}))
        seed = _get(raw, "seed", "", int, 0)
        if seed < 0 or seed >= 2 ** 64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        return cls(kernel=kernel, coefficient=coef, grid=grid,
                   solve=_parse_solve(_get(raw, "solve", "", dict, {})),
                   verify=_parse_verify(_get(raw, "verify", "", dict, {})),
                   kernel_check=_parse_check(_get(raw, "kernel_check", "", dict, {})),
                   mc=_parse_mc(_get(raw, "mc", "", dict, {}), grid["d"]),
                   output=_get(raw, "output", "", str, "out"), seed=seed)

    @classmethod
    def from_json(cls, text):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("<root>", f"invalid JSON: {exc}") from None
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())

    def to_dict(self):
        return {"kernel": copy.deepcopy(self.kernel), "coefficient": copy.deepcopy(self.coefficient),
                "grid": dict(self.grid), "solve": copy.deepcopy(self.solve),
                "verify": copy.deepcopy(self.verify),
                "kernel_check": copy.deepcopy(self.kernel_check), "mc": copy.deepcopy(self.mc),
                "output": self.output, "seed": self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def with_overrides(self, seed=None, grid_n=None, grid_box=None, output=None, suites=None):
        raw = self.to_dict()
        if seed is not None:
            raw["seed"] = seed
        if grid_n is not None:
            raw["grid"]["n"] = grid_n
        if grid_box is not None:
            raw["grid"]["box"] = grid_box
        if grid_n is not None or grid_box is not None:
            raw["verify"]["use_config_grid"] = True
        if output is not None:
            raw["output"] = output
        if suites is not None:
            raw["verify"]["suites"] = suites
        return RunConfig.from_dict(raw)


def _parse_kernel(k):
    fam = _get(k, "family", "kernel", str, required=True)
    if fam not in KERNEL_FAMILIES:
        raise ConfigError("kernel.family", f"unknown family '{fam}' (one of {KERNEL_FAMILIES})")
    out = {"family": fam}
    if fam == "stable":
        a = _get(k, "alpha", "kernel", float, required=True)
        if not 0 < a < 2:
            raise ConfigError("kernel.alpha", f"must lie in (0, 2), got {a}")
        out["alpha"] = a
    elif fam == "subordinate":
        out["phi"] = _get(k, "phi", "kernel", str, required=True)
        for key, v in k.items():
            if key not in ("family", "phi"):
                out[key] = _get(k, key, "kernel", float) if not isinstance(v, list) else \
                    _numbers(v, f"kernel.{key}")
        from .bernstein import from_config
        try:
            from_config(out["phi"], {k: v for k, v in out.items() if k not in ("family", "phi")})
        except (ValueError, TypeError) as exc:
            raise ConfigError("kernel.phi", str(exc)) from None
    else:
        out["exponent"] = _get(k, "exponent", "kernel", float, 1.0)
    return out


def _parse_grid(g):
    d = _get(g, "d", "grid", int, 1)
    n = _get(g, "n", "grid", int, 512)
    box = _get(g, "box", "grid", float, 64.0)
    if d not in (1, 2, 3):
        raise ConfigError("grid.d", f"must be 1, 2 or 3, got {d}")
    if n < 8 or n & (n - 1):
        raise ConfigError("grid.n", f"must be a power of two >= 8, got {n}")
    if not box > 0:
        raise ConfigError("grid.box", f"must be > 0, got {box}")
    return {"d": d, "n": n, "box": box}


def _parse_coefficient(c):
    fam = _get(c, "family", "coefficient", str, "constant")
    if fam not in COEFFICIENT_FAMILIES:
        raise ConfigError("coefficient.family", f"unknown family '{fam}'")
    if fam == "constant":
        v = _get(c, "value", "coefficient", float, 1.0)
        if not v > 0:
            raise ConfigError("coefficient.value", "must be > 0")
        return {"family": fam, "value": v}
    nu = _get(c, "nu", "coefficient", float, required=True)
    Lam = _get(c, "Lambda", "coefficient", float, required=True)
    if not 0 < nu <= Lam:
        raise ConfigError("coefficient.Lambda", f"need 0 < nu <= Lambda, got nu={nu}, Lambda={Lam}")
    out = {"family": fam, "nu": nu, "Lambda": Lam, "seed": _get(c, "seed", "coefficient", int, 0),
           "even_inside": _get(c, "even_inside", "coefficient", bool, False),
           "even_outside": _get(c, "even_outside", "coefficient", bool, False)}
    if "n_sectors" in c:
        out["n_sectors"] = _get(c, "n_sectors", "coefficient", int)
    return out


def _parse_variant(v, path):
    v = _ALIASES.get(v, v)
    if v not in VARIANTS:
        raise ConfigError(path, f"unknown variant '{v}' (one of {VARIANTS})")
    return v


def _parse_f(f):
    prof = _get(f, "profile", "solve.f", str, "bumps")
    if prof not in PROFILES:
        raise ConfigError("solve.f.profile", f"unknown profile '{prof}' (one of {PROFILES})")
    out = {"profile": prof}
    if prof == "cos":
        out["frequency"] = _get(f, "frequency", "solve.f", float, 1.0)
        out["amplitude"] = _get(f, "amplitude", "solve.f", float, 1.0)
    elif prof == "gauss":
        out["width"] = _get(f, "width", "solve.f", float, 1.0)
        out["amplitude"] = _get(f, "amplitude", "solve.f", float, 1.0)
        if not out["width"] > 0:
            raise ConfigError("solve.f.width", "must be > 0")
    elif prof == "bumps":
        out["seed"] = _get(f, "seed", "solve.f", int, 0)
    else:
        out["path"] = _get(f, "path", "solve.f", str, required=True)
    return out


def _parse_solve(s):
    lams = _numbers(_get(s, "lambdas", "solve", list, [1.0]), "solve.lambdas", positive=True)
    ps = _numbers(_get(s, "ps", "solve", list, [2.0]), "solve.ps", positive=True)
    methods = _get(s, "methods", "solve", list, ["spectral"])
    for i, m in enumerate(methods):
        if m not in ("spectral", "semigroup"):
            raise ConfigError(f"solve.methods[{i}]", f"unknown method '{m}'")
    return {"lambdas": lams, "ps": ps,
            "variant": _parse_variant(_get(s, "variant", "solve", str, "L"), "solve.variant"),
            "methods": methods, "f": _parse_f(_get(s, "f", "solve", dict, {}))}


def _parse_verify(v):
    from .verify import SUITES
    suites = _get(v, "suites", "verify", list, ["resolvent-bound"])
    for i, s in enumerate(suites):
        if s not in SUITES:
            raise ConfigError(f"verify.suites[{i}]", f"unknown suite '{s}' (one of {list(SUITES)})")
    opts = _get(v, "options", "verify", dict, {})
    for k, o in opts.items():
        if k not in SUITES:
            raise ConfigError(f"verify.options.{k}", "unknown suite")
        if not isinstance(o, dict):
            raise ConfigError(f"verify.options.{k}", "expected an object")
    return {"suites": suites, "options": opts,
            "use_config_grid": _get(v, "use_config_grid", "verify", bool, False)}


def _parse_check(c):
    hyps = _get(c, "hypotheses", "kernel_check", list, DEFAULT_HYPOTHESES)
    for i, h in enumerate(hyps):
        if h not in HYPOTHESES:
            raise ConfigError(f"kernel_check.hypotheses[{i}]", f"unknown hypothesis '{h}'")
    return {"hypotheses": hyps}


def _parse_mc(m, d):
    paths = _get(m, "paths", "mc", int, 100_000)
    pts = _get(m, "points", "mc", list, [[0.0] * d])
    for i, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != d:
            raise ConfigError(f"mc.points[{i}]", f"expected a list of {d} numbers")
        _numbers(p, f"mc.points[{i}]")
    lam = _get(m, "lambda", "mc", float, 1.0)
    if not lam > 0:
        raise ConfigError("mc.lambda", "must be > 0")
    return {"paths": paths, "points": [[float(x) for x in p] for p in pts], "lambda": lam}
