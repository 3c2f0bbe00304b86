"""Run configuration: TOML files, presets and ``--set`` overrides.

Values are stored in the units a user writes (km, nm, dB) so that the
resolved configuration echoed to metadata re-parses to an identical object.
The schema is documented in ``docs/config.md``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channels import REGIMES, FsoLink, ShadowedRicianLink
from .monte_carlo import MCConfig
from .secrecy import SecrecySystem
from .turbulence import GeometryConfig, turbulence_params

PRESETS = ("fig2", "fig3", "fig4", "fig5")
METHODS = ("closed", "quadrature", "mc")
MAX_SWEEP_POINTS = 10_000


class ConfigError(ValueError):
    pass


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class GeometrySettings:
    wavelength_nm: float = 1550.0
    zenith_deg: float = 75.0
    wind_rms_mps: float = 65.0
    sat_altitude_km: float = 500.0
    platform_altitude_km: float = 14.0
    cn2_ground: float = 1.7e-14
    site_elevation_km: float = 0.8
    apply_site_elevation: bool = False

    def to_geometry(self) -> GeometryConfig:
        return GeometryConfig(
            wavelength_m=self.wavelength_nm * 1e-9,
            zenith_deg=self.zenith_deg,
            wind_rms_mps=self.wind_rms_mps,
            sat_altitude_m=self.sat_altitude_km * 1e3,
            platform_altitude_m=self.platform_altitude_km * 1e3,
            cn2_ground=self.cn2_ground,
            site_elevation_m=self.site_elevation_km * 1e3,
            apply_site_elevation=self.apply_site_elevation,
        )


@dataclass(frozen=True)
class LinkSettings:
    """A shadowing regime by name, or explicit ``(m, b, omega)`` with name "custom"."""

    name: str
    m: int
    b: float
    omega: float

    def link(self, gamma_bar: float) -> ShadowedRicianLink:
        return ShadowedRicianLink(self.m, self.b, self.omega, gamma_bar)


@dataclass(frozen=True)
class FsoSettings:
    alpha: float | None = 8.9033  # None: derive from geometry
    beta: float | None = 7.3955
    xi: tuple[float, ...] = (6.7,)
    r: int = 1
    mu_db: float | None = None  # None: follows the swept per-hop SNR


@dataclass(frozen=True)
class MCSettings:
    samples: int = 1_000_000
    seed: int = 20240601
    batch_size: int = 1_000_000
    definition: str = "approximate"

    def to_mc(self) -> MCConfig:
        return MCConfig(self.samples, self.seed, self.batch_size, self.definition)


@dataclass(frozen=True)
class RunConfig:
    name: str = "custom"
    rs: float = 0.01
    geometry: GeometrySettings = field(default_factory=GeometrySettings)
    fso: FsoSettings = field(default_factory=FsoSettings)
    main: tuple[LinkSettings, ...] = ()
    eve: tuple[LinkSettings, ...] = ()
    eve_gamma_bar_db: tuple[float, ...] = (12.0,)
    gamma_bar_db: tuple[float, ...] = (10.0,)
    methods: tuple[str, ...] = ("closed",)
    mc: MCSettings = field(default_factory=MCSettings)
    output_path: str | None = None
    output_format: str = "csv"

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        d = asdict(self)
        d["main"] = [asdict(x) for x in self.main]
        d["eve"] = [asdict(x) for x in self.eve]
        for key in ("eve_gamma_bar_db", "gamma_bar_db", "methods"):
            d[key] = list(d[key])
        d["fso"]["xi"] = list(self.fso.xi)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        """Inverse of ``to_dict``."""
        return cls(
            name=d["name"],
            rs=d["rs"],
            geometry=GeometrySettings(**d["geometry"]),
            fso=FsoSettings(**{**d["fso"], "xi": tuple(d["fso"]["xi"])}),
            main=tuple(LinkSettings(**x) for x in d["main"]),
            eve=tuple(LinkSettings(**x) for x in d["eve"]),
            eve_gamma_bar_db=tuple(d["eve_gamma_bar_db"]),
            gamma_bar_db=tuple(d["gamma_bar_db"]),
            methods=tuple(d["methods"]),
            mc=MCSettings(**d["mc"]),
            output_path=d["output_path"],
            output_format=d["output_format"],
        )

    # -- model construction ------------------------------------------------
    def turbulence(self) -> tuple[float, float]:
        if self.fso.alpha is not None and self.fso.beta is not None:
            return self.fso.alpha, self.fso.beta
        tp = turbulence_params(self.geometry.to_geometry())
        return (
            self.fso.alpha if self.fso.alpha is not None else tp.alpha,
            self.fso.beta if self.fso.beta is not None else tp.beta,
        )

    def curves(self) -> list["Curve"]:
        out = []
        for xi, main, eve, edb in itertools.product(
            self.fso.xi, self.main, self.eve, self.eve_gamma_bar_db
        ):
            out.append(Curve(xi, main, eve, edb))
        return out


@dataclass(frozen=True)
class Curve:
    xi: float
    main: LinkSettings
    eve: LinkSettings
    eve_gamma_bar_db: float

    @property
    def label(self) -> str:
        return f"xi{self.xi:g}_main{self.main.name}_eve{self.eve.name}_gE{self.eve_gamma_bar_db:g}dB"

    def system(self, cfg: RunConfig, gamma_bar_db: float, alpha: float, beta: float) -> SecrecySystem:
        g = db_to_linear(gamma_bar_db)
        mu = g if cfg.fso.mu_db is None else db_to_linear(cfg.fso.mu_db)
        return SecrecySystem(
            fso=FsoLink(alpha, beta, self.xi, cfg.fso.r, mu),
            main_rf=self.main.link(g),
            eve_rf=self.eve.link(db_to_linear(self.eve_gamma_bar_db)),
            rs=cfg.rs,
        )


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _number(where: str, value, *, integer: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if integer:
        if float(value) != int(value):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return float(value)


def _range(where: str, spec) -> tuple[float, ...]:
    if isinstance(spec, dict):
        unknown = set(spec) - {"start", "stop", "step"}
        if unknown:
            raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
        try:
            start, stop, step = (_number(f"{where}.{k}", spec[k]) for k in ("start", "stop", "step"))
        except KeyError as exc:
            raise ConfigError(f"{where}: missing {exc.args[0]!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"{where}: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count > MAX_SWEEP_POINTS:
            raise ConfigError(f"{where}: {count} points exceeds {MAX_SWEEP_POINTS}")
        values = tuple(round(start + i * step, 12) for i in range(count))
    else:
        values = tuple(_number(where, v) for v in _as_list(spec))
    if not values:
        raise ConfigError(f"{where}: empty sweep")
    if len(values) > MAX_SWEEP_POINTS:
        raise ConfigError(f"{where}: more than {MAX_SWEEP_POINTS} points")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{where}: sweep values must be strictly ascending")
    return values


def _links(where: str, section: dict) -> tuple[LinkSettings, ...]:
    if "regime" in section:
        out = []
        for name in _as_list(section["regime"]):
            key = str(name).upper()
            if key not in REGIMES:
                raise ConfigError(f"{where}.regime: unknown regime {name!r}; use one of {sorted(REGIMES)}")
            m, b, omega = REGIMES[key]
            out.append(LinkSettings(key, m, b, omega))
        return tuple(out)
    try:
        m = _number(f"{where}.m", section["m"], integer=True)
        b = _number(f"{where}.b", section["b"])
        omega = _number(f"{where}.omega", section["omega"])
    except KeyError as exc:
        raise ConfigError(f"{where}: give 'regime' or all of m, b, omega (missing {exc.args[0]!r})") from None
    link = LinkSettings(str(section.get("name", "custom")), m, b, omega)
    try:
        link.link(1.0)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    return (link,)


_SECTIONS = {"name", "rs", "geometry", "fso", "main", "eve", "sweep", "mc", "output"}


def parse_config(raw: dict) -> RunConfig:
    """Validate a TOML-shaped mapping into a ``RunConfig``."""
    unknown = set(raw) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    geo_raw = dict(raw.get("geometry", {}))
    geo_fields = set(GeometrySettings.__dataclass_fields__)
    if set(geo_raw) - geo_fields:
        raise ConfigError(f"geometry: unknown keys {sorted(set(geo_raw) - geo_fields)}")
    geo = {}
    for key, value in geo_raw.items():
        if key == "apply_site_elevation":
            if not isinstance(value, bool):
                raise ConfigError("geometry.apply_site_elevation: expected true/false")
            geo[key] = value
        else:
            geo[key] = _number(f"geometry.{key}", value)
    geometry = GeometrySettings(**geo)
    try:
        geometry.to_geometry()
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from None

    fso_raw = dict(raw.get("fso", {}))
    allowed = {"alpha", "beta", "xi", "r", "mu_db"}
    if set(fso_raw) - allowed:
        raise ConfigError(f"fso: unknown keys {sorted(set(fso_raw) - allowed)}")
    severity = {}
    for key in ("alpha", "beta"):
        value = fso_raw.get(key, getattr(FsoSettings, key))
        if value == "from-geometry":
            severity[key] = None
        else:
            severity[key] = _number(f"fso.{key}", value)
            if severity[key] <= 0:
                raise ConfigError(f"fso.{key}: must be positive")
    xi = tuple(_number("fso.xi", v) for v in _as_list(fso_raw.get("xi", 6.7)))
    if any(v <= 0 for v in xi):
        raise ConfigError("fso.xi: must be positive")
    r = _number("fso.r", fso_raw.get("r", 1), integer=True)
    if r not in (1, 2):
        raise ConfigError("fso.r: must be 1 (heterodyne) or 2 (IM/DD)")
    mu_raw = fso_raw.get("mu_db", "per-hop")
    mu_db = None if mu_raw == "per-hop" else _number("fso.mu_db", mu_raw)
    fso = FsoSettings(severity["alpha"], severity["beta"], xi, r, mu_db)

    main = _links("main", dict(raw.get("main", {"regime": "FHS"})))
    eve_raw = dict(raw.get("eve", {"regime": "FHS"}))
    eve_db = _range("eve.gamma_bar_db", eve_raw.pop("gamma_bar_db", 12.0))
    eve = _links("eve", eve_raw)

    sweep = dict(raw.get("sweep", {}))
    if set(sweep) - {"gamma_bar_db", "methods"}:
        raise ConfigError(f"sweep: unknown keys {sorted(set(sweep) - {'gamma_bar_db', 'methods'})}")
    grid = _range("sweep.gamma_bar_db", sweep.get("gamma_bar_db", 10.0))
    methods = tuple(_as_list(sweep.get("methods", ["closed"])))
    bad = [mth for mth in methods if mth not in METHODS]
    if bad or not methods:
        raise ConfigError(f"sweep.methods: unknown {bad}; choose from {list(METHODS)}")

    mc_raw = dict(raw.get("mc", {}))
    if set(mc_raw) - set(MCSettings.__dataclass_fields__):
        raise ConfigError(f"mc: unknown keys {sorted(set(mc_raw) - set(MCSettings.__dataclass_fields__))}")
    mc_kwargs = {
        k: (_number(f"mc.{k}", v, integer=True) if k != "definition" else v) for k, v in mc_raw.items()
    }
    mc = MCSettings(**mc_kwargs)
    try:
        mc.to_mc()
    except ValueError as exc:
        raise ConfigError(f"mc: {exc}") from None

    out_raw = dict(raw.get("output", {}))
    fmt = out_raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format: must be 'csv' or 'json'")

    rs = _number("rs", raw.get("rs", 0.01))
    if rs < 0:
        raise ConfigError("rs: must be non-negative")
    return RunConfig(
        name=str(raw.get("name", "custom")),
        rs=rs,
        geometry=geometry,
        fso=fso,
        main=main,
        eve=eve,
        eve_gamma_bar_db=eve_db,
        gamma_bar_db=grid,
        methods=methods,
        mc=mc,
        output_path=out_raw.get("path"),
        output_format=fmt,
    )


def load_toml(path: str | Path) -> dict:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def preset_raw(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {list(PRESETS)}")
    text = resources.files("haps_secrecy.presets").joinpath(f"{name}.toml").read_text()
    return tomllib.loads(text)


def apply_override(raw: dict, assignment: str) -> None:
    """Apply ``section.key=value`` in place; the value is parsed as TOML."""
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, text = assignment.split("=", 1)
    try:
        value = tomllib.loads(f"v = {text.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = text.strip()
    parts = key.strip().split(".")
    node: dict[str, Any] = raw
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {key}: {part!r} is not a section")
    node[parts[-1]] = value


def dumps_resolved(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
