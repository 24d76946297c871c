"""TOML run configuration for the command-line front end.

Shape:

    [system]            # kind = "sdof" (default) or "mdof"
    c = 0.2
    k = 1.0
    t_bar = 8.0

    [excitation]        # kind = "constant" | "polynomial-segments" | "sine-sampled"
    kind = "constant"
    value = 1.0

    [ic]
    x0 = 0.0
    v0 = 0.0

    [basis]
    family = "bernstein"
    degree = 16

    [output]
    grid_points = 513

MDOF configs give M, C, K as nested row lists under [system], vector x0/v0
under [ic], and may pin the excitation to one DOF with `dof = <index>`.
Errors carry the offending key path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:
    import tomli as _toml

from .errors import ValidationError
from .model import Excitation, InitialConditions, SdofSystem
from .mdof import MdofSystem

_EXCITATION_KINDS = ("constant", "polynomial-segments", "sine-sampled")


def _need(table: dict, key: str, where: str):
    if key not in table:
        raise ValidationError(f"[{where}] missing required key {key!r}")
    return table[key]


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"[{where}] expected a number, got {value!r}")
    return float(value)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"[{where}] expected an integer, got {value!r}")
    return int(value)


def _as_matrix(value, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"[{where}] expected a matrix of numbers") from exc
    if arr.ndim != 2:
        raise ValidationError(f"[{where}] expected a nested list of rows")
    return arr


def _as_vector(value, where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"[{where}] expected a list of numbers") from exc
    if arr.ndim != 1:
        raise ValidationError(f"[{where}] expected a flat list of numbers")
    return arr


@dataclass
class RunConfig:
    kind: str                      # "sdof" or "mdof"
    t_bar: float
    system: object                 # SdofSystem or MdofSystem
    excitation: object             # Excitation (sdof) or list of them (mdof)
    ic: object                     # InitialConditions or (x0_vec, v0_vec)
    basis_family: str = "bernstein"
    degree: int = 16
    orthonormalize: bool = False
    grid_points: int = 513
    paths: dict = field(default_factory=dict)

    def path(self, key: str, default: str) -> str:
        return str(self.paths.get(key, default))


def _build_excitation(table: dict, t_bar: float, where: str = "excitation") -> Excitation:
    kind = table.get("kind", "constant")
    if kind not in _EXCITATION_KINDS:
        raise ValidationError(
            f"[{where}] kind must be one of {_EXCITATION_KINDS}, got {kind!r}"
        )
    try:
        if kind == "constant":
            value = _as_float(table.get("value", 0.0), f"{where}.value")
            return Excitation.constant(value, t_bar)
        if kind == "polynomial-segments":
            if "mesh" in table or "segments" in table:
                mesh = _as_vector(_need(table, "mesh", where), f"{where}.mesh")
                raw = _need(table, "segments", where)
                if not isinstance(raw, list) or not all(isinstance(s, list) for s in raw):
                    raise ValidationError(f"[{where}.segments] expected a list of coefficient lists")
                segs = [np.array(s, dtype=float) for s in raw]
                return Excitation.from_segments(mesh, segs)
            coeffs = _as_vector(_need(table, "coefficients", where), f"{where}.coefficients")
            return Excitation.from_polynomial(coeffs, t_bar)
        # sine-sampled
        amp = _as_float(table.get("amplitude", 1.0), f"{where}.amplitude")
        freq = _as_float(_need(table, "frequency", where), f"{where}.frequency")
        phase = _as_float(table.get("phase", 0.0), f"{where}.phase")
        nseg = _as_int(table.get("n_segments", 64), f"{where}.n_segments")
        if nseg < 1:
            raise ValidationError(f"[{where}.n_segments] must be positive")
        return Excitation.sample_hermite(
            lambda t: amp * np.sin(freq * t + phase),
            lambda t: amp * freq * np.cos(freq * t + phase),
            t_bar, nseg,
        )
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"[{where}] {exc}") from exc


def load_config(path: str) -> RunConfig:
    with open(path, "rb") as fh:
        try:
            data = _toml.load(fh)
        except _toml.TOMLDecodeError as exc:
            raise ValidationError(f"config parse error in {path}: {exc}") from exc

    sys_tab = data.get("system")
    if not isinstance(sys_tab, dict):
        raise ValidationError("[system] block is required")
    kind = sys_tab.get("kind", "sdof")
    t_bar = _as_float(_need(sys_tab, "t_bar", "system"), "system.t_bar")

    exc_tab = data.get("excitation", {"kind": "constant", "value": 0.0})
    if not isinstance(exc_tab, dict):
        raise ValidationError("[excitation] must be a table")
    ic_tab = data.get("ic", {})
    if not isinstance(ic_tab, dict):
        raise ValidationError("[ic] must be a table")
    basis_tab = data.get("basis", {})
    out_tab = data.get("output", {})

    family = basis_tab.get("family", "bernstein")
    if family not in ("bernstein", "damped-wave"):
        raise ValidationError(f"[basis.family] unknown family {family!r}")
    degree = _as_int(basis_tab.get("degree", 16), "basis.degree")
    ortho = bool(basis_tab.get("orthonormalize", False))
    grid_points = _as_int(out_tab.get("grid_points", 513), "output.grid_points")
    if grid_points < 2:
        raise ValidationError("[output.grid_points] must be at least 2")
    paths = out_tab.get("paths", {})
    if not isinstance(paths, dict):
        raise ValidationError("[output.paths] must be a table of names")

    if kind == "sdof":
        try:
            system = SdofSystem(
                c=_as_float(_need(sys_tab, "c", "system"), "system.c"),
                k=_as_float(_need(sys_tab, "k", "system"), "system.k"),
                t_bar=t_bar,
            )
        except ValidationError as exc:
            raise ValidationError(f"[system] {exc}") from exc
        excitation = _build_excitation(exc_tab, t_bar)
        ic = InitialConditions(
            _as_float(ic_tab.get("x0", 0.0), "ic.x0"),
            _as_float(ic_tab.get("v0", 0.0), "ic.v0"),
        )
    elif kind == "mdof":
        M = _as_matrix(_need(sys_tab, "M", "system"), "system.M")
        C = _as_matrix(_need(sys_tab, "C", "system"), "system.C")
        K = _as_matrix(_need(sys_tab, "K", "system"), "system.K")
        try:
            system = MdofSystem(M, C, K)
        except ValidationError as exc:
            raise ValidationError(f"[system] {exc}") from exc
        n = system.n_dof
        loaded = _build_excitation(exc_tab, t_bar)
        dof = _as_int(exc_tab.get("dof", 0), "excitation.dof")
        if not 0 <= dof < n:
            raise ValidationError(f"[excitation.dof] must be in [0, {n - 1}]")
        excitation = [loaded if j == dof else None for j in range(n)]
        x0 = _as_vector(ic_tab.get("x0", [0.0] * n), "ic.x0")
        v0 = _as_vector(ic_tab.get("v0", [0.0] * n), "ic.v0")
        if x0.size != n or v0.size != n:
            raise ValidationError(f"[ic] x0 and v0 must have {n} entries")
        ic = (x0, v0)
    else:
        raise ValidationError(f"[system.kind] must be 'sdof' or 'mdof', got {kind!r}")

    if not math.isfinite(t_bar) or t_bar <= 0:
        raise ValidationError("[system.t_bar] must be a positive finite number")

    return RunConfig(
        kind=kind, t_bar=t_bar, system=system, excitation=excitation, ic=ic,
        basis_family=family, degree=degree, orthonormalize=ortho,
        grid_points=grid_points, paths=dict(paths),
    )
