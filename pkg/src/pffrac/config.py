"""Run configuration: INI-style file format, presets, and builders.

Grammar (one `key = value` per line, `#`/`;` comments, sections in
brackets; unknown sections or keys are rejected with file and line):

    [time]        T, steps
    [viscosity]   delta | delta_list (descending), tau_over_delta?
    [material]    mu, kappa, eta
    [degradation] h_name (quadratic), f_name (quadratic_well)
    [mesh]        nx, ny, width, height  |  path
    [bc]          preset (tension|shear|custom), rate, rate_x?, rate_y?
    [init]        x0, y0, x1, y1, band, value     (optional notch seed)
    [tol]         stag_tol, tol_u, tol_z, max_inner
    [output]      dir, vtk_every

Presets pin the boundary drive g(t, x) = rate * t * profile(x) with a
piecewise-affine profile: `tension` fixes the bottom edge and pulls the top
edge by (0, rate*t); `shear` drives the top by (rate*t, 0); `custom` drives
it by (rate_x*t, rate_y*t).  Both horizontal edges are Dirichlet, the
vertical sides are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .evolution import EvolutionConfig, LinearDrive
from .fem_core import TriMesh, build_structured_mesh, read_mesh
from .tensor_mech import MaterialModel, default_material

_SCHEMA = {
    "time": {"t", "steps"},
    "viscosity": {"delta", "delta_list", "tau_over_delta"},
    "material": {"mu", "kappa", "eta"},
    "degradation": {"h_name", "f_name"},
    "mesh": {"nx", "ny", "width", "height", "path"},
    "bc": {"preset", "rate", "rate_x", "rate_y"},
    "init": {"x0", "y0", "x1", "y1", "band", "value"},
    "tol": {"stag_tol", "tol_u", "tol_z", "max_inner"},
    "output": {"dir", "vtk_every"},
}

PRESETS = ("tension", "shear", "custom")


def parse_ini(text: str, origin: str = "<config>") -> dict:
    """Parse the INI text into {section: {key: (value, line)}}, validated."""
    out: dict[str, dict[str, tuple[str, int]]] = {}
    section = None
    for ln_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SCHEMA:
                raise ConfigError(f"{origin}:{ln_no}: unknown section [{section}]")
            out.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{ln_no}: expected 'key = value', got {raw.strip()!r}")
        if section is None:
            raise ConfigError(f"{origin}:{ln_no}: key outside any section")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if key not in _SCHEMA[section]:
            raise ConfigError(f"{origin}:{ln_no}: unknown key '{key}' in section [{section}]")
        if key in out[section]:
            raise ConfigError(f"{origin}:{ln_no}: duplicate key '{key}' in section [{section}]")
        out[section][key] = (value, ln_no)
    return out


@dataclass
class RunConfig:
    """Validated configuration plus builders for the solver objects."""

    origin: str
    raw_text: str
    T: float
    steps: int
    delta: float | None
    delta_list: list | None
    tau_over_delta: float | None
    mu: float
    kappa: float
    eta: float
    h_name: str
    f_name: str
    mesh_path: str | None
    nx: int
    ny: int
    width: float
    height: float
    preset: str
    rate: float
    rate_x: float
    rate_y: float
    notch: tuple | None
    stag_tol: float
    tol_u: float
    tol_z: float
    max_inner: int
    output_dir: str | None
    vtk_every: int
    _mesh: TriMesh | None = field(default=None, repr=False)

    def material(self) -> MaterialModel:
        if self.h_name != "quadratic":
            raise ConfigError(f"{self.origin}: unknown h_name {self.h_name!r}")
        if self.f_name != "quadratic_well":
            raise ConfigError(f"{self.origin}: unknown f_name {self.f_name!r}")
        return default_material(mu=self.mu, kappa=self.kappa, eta=self.eta)

    def mesh(self) -> TriMesh:
        if self._mesh is None:
            if self.mesh_path is not None:
                self._mesh = read_mesh(self.mesh_path)
                if not self._mesh.edge_dirichlet.any():
                    raise ConfigError(f"{self.origin}: mesh file has no Dirichlet edges")
            else:
                h = self.height

                def on_rails(x, y):
                    return y < 1e-12 * h or y > h * (1.0 - 1e-12)

                self._mesh = build_structured_mesh(self.nx, self.ny, self.width, h, dirichlet=on_rails)
        return self._mesh

    def drive(self) -> LinearDrive:
        mesh = self.mesh()
        y = mesh.nodes[:, 1]
        span = float(y.max() - y.min())
        if span <= 0.0:
            raise ConfigError(f"{self.origin}: degenerate mesh height")
        ramp = (y - y.min()) / span
        profile = np.zeros(2 * mesh.n_nodes)
        if self.preset == "tension":
            profile[1::2] = ramp
            rate = self.rate
        elif self.preset == "shear":
            profile[0::2] = ramp
            rate = self.rate
        else:
            profile[0::2] = ramp * self.rate_x
            profile[1::2] = ramp * self.rate_y
            rate = 1.0
        return LinearDrive(profile, rate=rate)

    def z_seed(self) -> np.ndarray:
        mesh = self.mesh()
        z = np.ones(mesh.n_nodes)
        if self.notch is not None:
            x0, y0, x1, y1, band, value = self.notch
            p = mesh.nodes
            dx, dy = x1 - x0, y1 - y0
            den = dx * dx + dy * dy
            if den == 0.0:
                tproj = np.zeros(mesh.n_nodes)
            else:
                tproj = np.clip(((p[:, 0] - x0) * dx + (p[:, 1] - y0) * dy) / den, 0.0, 1.0)
            cx = x0 + tproj * dx
            cy = y0 + tproj * dy
            dist = np.hypot(p[:, 0] - cx, p[:, 1] - cy)
            z[dist <= band] = value
        return z

    def evolution(self, delta: float | None = None) -> EvolutionConfig:
        d = self.delta if delta is None else delta
        if d is None:
            raise ConfigError(f"{self.origin}: [viscosity] delta is required for a single run")
        return EvolutionConfig(
            mesh=self.mesh(), material=self.material(), boundary=self.drive(),
            T=self.T, steps=self.steps, delta=d,
            stag_tol=self.stag_tol, tol_u=self.tol_u, tol_z=self.tol_z,
            max_inner=self.max_inner,
        )


def _get(tbl, section, key, conv, default=None, required=False, origin="<config>"):
    sec = tbl.get(section, {})
    if key not in sec:
        if required:
            raise ConfigError(f"{origin}: missing required key '{key}' in section [{section}]")
        return default
    value, ln_no = sec[key]
    try:
        return conv(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{origin}:{ln_no}: bad value for {key}: {value!r} ({exc})") from exc


def _positive(conv, name):
    def inner(v):
        x = conv(v)
        if x <= 0:
            raise ValueError(f"{name} must be positive")
        return x
    return inner


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, origin=path)


def parse_config(text: str, origin: str = "<config>") -> RunConfig:
    tbl = parse_ini(text, origin=origin)
    if "time" not in tbl:
        raise ConfigError(f"{origin}: missing required section [time]")
    if "mesh" not in tbl:
        raise ConfigError(f"{origin}: missing required section [mesh]")

    T = _get(tbl, "time", "t", _positive(float, "T"), required=True, origin=origin)
    steps = _get(tbl, "time", "steps", _positive(int, "steps"), required=True, origin=origin)

    delta = _get(tbl, "viscosity", "delta", _positive(float, "delta"), origin=origin)
    dl_raw = _get(tbl, "viscosity", "delta_list", str, origin=origin)
    delta_list = None
    if dl_raw is not None:
        try:
            delta_list = [float(p) for p in dl_raw.split()]
        except ValueError as exc:
            raise ConfigError(f"{origin}: bad delta_list {dl_raw!r}") from exc
        if not delta_list or any(d <= 0 for d in delta_list):
            raise ConfigError(f"{origin}: delta_list entries must be positive")
        if any(b >= a for a, b in zip(delta_list, delta_list[1:])):
            raise ConfigError(f"{origin}: delta_list must be strictly descending")
    tau_over_delta = _get(tbl, "viscosity", "tau_over_delta", float, origin=origin)
    if tau_over_delta is not None and not 0.0 < tau_over_delta <= 1.0:
        raise ConfigError(f"{origin}: tau_over_delta must lie in (0, 1]")

    mesh_path = _get(tbl, "mesh", "path", str, origin=origin)
    if mesh_path is None:
        nx = _get(tbl, "mesh", "nx", _positive(int, "nx"), required=True, origin=origin)
        ny = _get(tbl, "mesh", "ny", _positive(int, "ny"), required=True, origin=origin)
        width = _get(tbl, "mesh", "width", _positive(float, "width"), default=1.0, origin=origin)
        height = _get(tbl, "mesh", "height", _positive(float, "height"), default=1.0, origin=origin)
    else:
        nx = ny = 0
        width = height = 0.0

    preset = _get(tbl, "bc", "preset", str, default="tension", origin=origin).lower()
    if preset not in PRESETS:
        raise ConfigError(f"{origin}: preset must be one of {PRESETS}, got {preset!r}")
    rate = _get(tbl, "bc", "rate", float, default=1.0, origin=origin)
    rate_x = _get(tbl, "bc", "rate_x", float, default=0.0, origin=origin)
    rate_y = _get(tbl, "bc", "rate_y", float, default=0.0, origin=origin)
    if preset == "custom" and rate_x == 0.0 and rate_y == 0.0:
        raise ConfigError(f"{origin}: custom preset needs rate_x and/or rate_y")

    notch = None
    if "init" in tbl and tbl["init"]:
        vals = {}
        for key in ("x0", "y0", "x1", "y1", "band", "value"):
            vals[key] = _get(tbl, "init", key, float, required=True, origin=origin)
        if not 0.0 <= vals["value"] <= 1.0:
            raise ConfigError(f"{origin}: notch value must lie in [0, 1]")
        if vals["band"] < 0.0:
            raise ConfigError(f"{origin}: notch band must be nonnegative")
        notch = (vals["x0"], vals["y0"], vals["x1"], vals["y1"], vals["band"], vals["value"])

    cfg = RunConfig(
        origin=origin,
        raw_text=text,
        T=T,
        steps=steps,
        delta=delta,
        delta_list=delta_list,
        tau_over_delta=tau_over_delta,
        mu=_get(tbl, "material", "mu", _positive(float, "mu"), default=1.0, origin=origin),
        kappa=_get(tbl, "material", "kappa", _positive(float, "kappa"), default=1.0, origin=origin),
        eta=_get(tbl, "material", "eta", _positive(float, "eta"), default=1e-2, origin=origin),
        h_name=_get(tbl, "degradation", "h_name", str, default="quadratic", origin=origin),
        f_name=_get(tbl, "degradation", "f_name", str, default="quadratic_well", origin=origin),
        mesh_path=mesh_path,
        nx=nx, ny=ny, width=width, height=height,
        preset=preset, rate=rate, rate_x=rate_x, rate_y=rate_y,
        notch=notch,
        stag_tol=_get(tbl, "tol", "stag_tol", _positive(float, "stag_tol"), default=1e-8, origin=origin),
        tol_u=_get(tbl, "tol", "tol_u", _positive(float, "tol_u"), default=1e-9, origin=origin),
        tol_z=_get(tbl, "tol", "tol_z", _positive(float, "tol_z"), default=1e-9, origin=origin),
        max_inner=_get(tbl, "tol", "max_inner", _positive(int, "max_inner"), default=200, origin=origin),
        output_dir=_get(tbl, "output", "dir", str, origin=origin),
        vtk_every=_get(tbl, "output", "vtk_every", int, default=0, origin=origin),
    )
    for v in (cfg.T, cfg.rate, cfg.rate_x, cfg.rate_y):
        if not math.isfinite(v):
            raise ConfigError(f"{origin}: non-finite numeric value in configuration")
    return cfg
