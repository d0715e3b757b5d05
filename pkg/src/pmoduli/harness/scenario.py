"""Scenario model and the line-based scenario file format.

Files are `key = value` lines under `[section]` headers.  Unknown sections
or keys are hard errors so a typo cannot silently reconfigure a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dilatations import pointwise_dilatation_batch
from ..errors import InvalidInputError, ParameterError
from ..mappings import (AxisStretchMap, Box, LinearMap, Mapping,
                        RadialPowerMap, ScalingMap, identity_map)
from ..moduli import RingSpec
from ..weights import RadialWeight

THEOREMS = ("sandwich", "quasiinvariance", "ring_criterion", "lower_criterion",
            "transfer", "pointwise_bounds", "mean_dilatation")

# Bundled tolerance defaults: analytic paths, then discrete paths by dimension.
DEFAULT_TOL_ANALYTIC = 1e-8
DEFAULT_TOL_DISCRETE_2D = 0.05
DEFAULT_TOL_DISCRETE_3D = 0.10

# Grid boxes pad the outer radius so the cell size stays commensurate with
# the angular density of the sampled families.
GRID_PAD_FACTOR = 1.3


@dataclass
class ScenarioParams:
    n: int = 2
    p: float = 2.0
    alpha: float | None = None
    k: int = 1
    grid_cells: int = 256
    curve_count: int = 512
    surface_count: int = 128
    sample_points: int = 10000
    seed: int = 20240
    tol_analytic: float = DEFAULT_TOL_ANALYTIC
    tol_discrete: float | None = None
    beta: float | None = None
    gamma: float | None = None
    delta: float | None = None
    expect: str = "satisfied"
    expected_value: float | None = None
    family: str | None = None  # joining | separating; defaults by k

    def discrete_tolerance(self) -> float:
        if self.tol_discrete is not None:
            return self.tol_discrete
        return DEFAULT_TOL_DISCRETE_2D if self.n == 2 else DEFAULT_TOL_DISCRETE_3D


@dataclass
class Scenario:
    name: str
    theorem: str
    mapping: Mapping
    weight: RadialWeight
    ring: RingSpec
    params: ScenarioParams
    weight_kind: str = "constant"
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ParameterError(f"unknown theorem {self.theorem!r}")
        p, n = self.params.p, self.params.n
        if self.theorem == "lower_criterion" and not p > n - 1:
            raise ParameterError("lower criterion requires p > n - 1")
        if self.theorem == "transfer" and not p > n - 1:
            raise ParameterError("transfer requires p > n - 1")
        if self.theorem == "ring_criterion" and not 1 < p <= n:
            raise ParameterError("ring criterion requires 1 < p <= n")


_SECTION_KEYS = {
    "scenario": {"name", "theorem", "note"},
    "mapping": {"kind", "dim", "lam", "beta_exp", "c", "center", "matrix",
                "domain_lo", "domain_hi"},
    "weight": {"kind", "value", "coeff", "exponent", "alpha", "axis"},
    "ring": {"center", "r1", "r2"},
    "params": {"n", "p", "alpha", "k", "grid_cells", "curve_count",
               "surface_count", "sample_points", "seed", "beta", "gamma",
               "delta", "expect", "expected_value", "family"},
    "tolerances": {"analytic", "discrete"},
}

_INT_KEYS = {"dim", "n", "k", "grid_cells", "curve_count", "surface_count",
             "sample_points", "seed"}
_STR_KEYS = {"name", "theorem", "kind", "expect", "note", "axis", "family"}


def _parse_number(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse number {text!r}") from exc


def _parse_vector(text: str):
    return tuple(_parse_number(v) for v in text.split(","))


def parse_scenario_text(text: str, name_hint: str = "scenario") -> Scenario:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SECTION_KEYS:
                raise InvalidInputError(
                    f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise InvalidInputError(f"line {lineno}: expected key = value")
        if current is None:
            raise InvalidInputError(f"line {lineno}: key outside any section")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SECTION_KEYS[current]:
            raise InvalidInputError(
                f"line {lineno}: unknown key {key!r} in section [{current}]")
        if key in sections[current]:
            raise InvalidInputError(f"line {lineno}: duplicate key {key!r}")
        sections[current][key] = value
    return _build_scenario(sections, name_hint)


def parse_scenario_file(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    import os
    hint = os.path.splitext(os.path.basename(str(path)))[0]
    return parse_scenario_text(text, name_hint=hint)


def _typed(section: dict, key: str, default=None):
    if key not in section:
        return default
    raw = section[key]
    if key in _STR_KEYS:
        return raw
    if key in _INT_KEYS:
        return int(raw)
    return _parse_number(raw)


def _build_scenario(sections: dict, name_hint: str) -> Scenario:
    scn = sections.get("scenario", {})
    name = scn.get("name", name_hint)
    theorem = scn.get("theorem")
    if theorem is None:
        raise InvalidInputError("scenario section must declare a theorem")

    par = sections.get("params", {})
    n_val = _typed(par, "n", 2)
    # 3D families need denser direction sampling to stay commensurate with
    # the grid resolution.
    params = ScenarioParams(
        n=n_val, p=_typed(par, "p", 2.0),
        alpha=_typed(par, "alpha"), k=_typed(par, "k", 1),
        grid_cells=_typed(par, "grid_cells", 256 if n_val == 2 else 48),
        curve_count=_typed(par, "curve_count", 512 if n_val == 2 else 4096),
        surface_count=_typed(par, "surface_count", 128 if n_val == 2 else 48),
        sample_points=_typed(par, "sample_points", 10000),
        seed=_typed(par, "seed", 20240),
        beta=_typed(par, "beta"), gamma=_typed(par, "gamma"),
        delta=_typed(par, "delta"),
        expect=_typed(par, "expect", "satisfied"),
        expected_value=_typed(par, "expected_value"),
        family=_typed(par, "family"),
    )
    tol = sections.get("tolerances", {})
    if "analytic" in tol:
        params.tol_analytic = _parse_number(tol["analytic"])
    if "discrete" in tol:
        params.tol_discrete = _parse_number(tol["discrete"])

    rng = sections.get("ring", {})
    center = _parse_vector(rng["center"]) if "center" in rng \
        else (0.0,) * params.n
    ring = RingSpec(dim=params.n, center=center,
                    r1=_typed(rng, "r1", 1.0), r2=_typed(rng, "r2", 2.0))

    mapping = _build_mapping(sections.get("mapping", {}), params, ring)
    weight, weight_kind = _build_weight(sections.get("weight", {}), mapping,
                                        params)
    notes = [scn["note"]] if "note" in scn else []
    return Scenario(name=name, theorem=theorem, mapping=mapping, weight=weight,
                    ring=ring, params=params, weight_kind=weight_kind,
                    notes=notes)


def default_domain(ring: RingSpec) -> Box:
    return Box.around(ring.center, ring.r2 * GRID_PAD_FACTOR * 1.01)


def _build_mapping(sec: dict, params: ScenarioParams, ring: RingSpec) -> Mapping:
    kind = sec.get("kind", "identity")
    dim = _typed(sec, "dim", params.n)
    if "domain_lo" in sec and "domain_hi" in sec:
        domain = Box(lo=_parse_vector(sec["domain_lo"]),
                     hi=_parse_vector(sec["domain_hi"]))
    else:
        domain = default_domain(ring)
    if kind == "identity":
        return identity_map(dim, domain)
    if kind == "scaling":
        return ScalingMap(_typed(sec, "lam", 2.0), domain)
    if kind == "radial_power":
        center = _parse_vector(sec["center"]) if "center" in sec \
            else ring.center
        return RadialPowerMap(_typed(sec, "beta_exp", 2.0), center, domain)
    if kind == "axis_stretch":
        return AxisStretchMap(_typed(sec, "c", 0.4), dim)
    if kind == "linear":
        entries = _parse_vector(sec["matrix"])
        mat = np.asarray(entries, dtype=float).reshape(dim, dim)
        return LinearMap(mat, domain)
    raise InvalidInputError(f"unknown mapping kind {kind!r}")


def _build_weight(sec: dict, mapping: Mapping, params: ScenarioParams):
    kind = sec.get("kind", "constant")
    if kind == "constant":
        return RadialWeight.constant(_typed(sec, "value", 1.0)), kind
    if kind == "radial_power":
        return RadialWeight.radial_power(_typed(sec, "coeff", 1.0),
                                         _typed(sec, "exponent", 0.0)), kind
    if kind == "axis_power":
        exponent = _typed(sec, "exponent", -0.4)
        coeff = _typed(sec, "coeff", 1.0)
        axis = int(_typed(sec, "axis", params.n - 1))

        def field_fn(x, _e=exponent, _c=coeff, _a=axis):
            return _c * float(np.asarray(x, dtype=float)[_a]) ** _e

        return RadialWeight.pointwise(field_fn, f"Q={coeff}*x_{axis}^{exponent}"), kind
    if kind == "mapping_hia":
        alpha = _typed(sec, "alpha", params.alpha or params.p)

        def field_fn(x, _m=mapping, _a=alpha):
            return float(pointwise_dilatation_batch(
                _m, np.asarray(x, dtype=float)[None, :], "inner", _a)[0])

        return RadialWeight.pointwise(field_fn, f"Q=H_inner(x; {alpha})"), kind
    raise InvalidInputError(f"unknown weight kind {kind!r}")
