"""Built-in manifold instances and a JSON manifest loader."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import expr as ex
from .geometry import ManifoldInstance, PointGeometry, SingularMetric

PROBE_POINTS = 8
PROBE_SEED = 0
PROBE_TOL = 1e-9


class CatalogError(ValueError):
    pass


class UnknownEntry(CatalogError):
    pass


class UnsupportedDimension(CatalogError):
    pass


class SchemaError(CatalogError):
    pass


class AsymmetricMetric(CatalogError):
    pass


class InvalidCount(CatalogError):
    pass


@dataclass(frozen=True)
class EntryFlags:
    is_grw: bool = False
    is_einstein: bool = False
    is_perfect_fluid: bool = False
    omega_value: float | None = None
    supports_general_suite: bool = False
    supports_weyl_suite: bool = False
    einstein_constant: float | None = None


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    instance: ManifoldInstance
    flags: EntryFlags

    @property
    def dim(self) -> int:
        return self.instance.dim


# -- builtins ---------------------------------------------------------------


def _diag(entries: list[str]) -> list[list[str]]:
    n = len(entries)
    return [[entries[i] if i == j else "0" for j in range(n)] for i in range(n)]


def _round_sphere(angles: list[str]) -> list[str]:
    """Diagonal of the unit round metric in nested polar angles."""
    out = []
    for k in range(len(angles)):
        factors = [f"sin({a})^2" for a in angles[:k]]
        out.append("*".join(factors) if factors else "1")
    return out


_ANGLE_BOX = (0.4, 2.7)


def _minkowski(n: int, timelike_pi: bool = False) -> CatalogEntry:
    names = ["t"] + [f"x{k}" for k in range(1, n)]
    pi = ["-1" if timelike_pi else "0"] + ["0"] * (n - 1)
    inst = ManifoldInstance.from_strings(
        names, _diag(["-1"] + ["1"] * (n - 1)), pi, "1" if timelike_pi else "0", [(-1.0, 1.0)] * n
    )
    flags = EntryFlags(
        is_einstein=True,
        einstein_constant=0.0,
        omega_value=1.0 if timelike_pi else 0.0,
        supports_general_suite=not timelike_pi,
        supports_weyl_suite=n >= 4,
    )
    return CatalogEntry("minkowski", inst, flags)


def _de_sitter_grw(n: int) -> CatalogEntry:
    names = ["t"] + [f"x{k}" for k in range(1, n)]
    inst = ManifoldInstance.from_strings(
        names,
        _diag(["-1"] + ["exp(2*t)"] * (n - 1)),
        ["-1"] + ["0"] * (n - 1),
        "1",
        [(-0.5, 0.5)] + [(-1.0, 1.0)] * (n - 1),
    )
    flags = EntryFlags(
        is_grw=True,
        is_einstein=True,
        einstein_constant=float(n - 1),
        is_perfect_fluid=True,
        omega_value=1.0,
        supports_general_suite=True,
        supports_weyl_suite=n >= 4,
    )
    return CatalogEntry("de_sitter_grw", inst, flags)


def _closed_grw(n: int) -> CatalogEntry:
    angles = [f"a{k}" for k in range(1, n)]
    fiber = [f"exp(2*t)*{s}" if s != "1" else "exp(2*t)" for s in _round_sphere(angles)]
    inst = ManifoldInstance.from_strings(
        ["t"] + angles,
        _diag(["-1"] + fiber),
        ["-1"] + ["0"] * (n - 1),
        "1",
        [(-0.5, 0.5)] + [_ANGLE_BOX] * (n - 1),
    )
    flags = EntryFlags(
        is_grw=True,
        is_perfect_fluid=True,
        omega_value=1.0,
        supports_general_suite=True,
    )
    return CatalogEntry("closed_grw", inst, flags)


def _sphere_concircular(n: int) -> CatalogEntry:
    angles = [f"a{k}" for k in range(1, n)]
    diag = ["1"] + ["sin(r)^2" + ("" if s == "1" else "*" + s) for s in _round_sphere(angles)]
    inst = ManifoldInstance.from_strings(
        ["r"] + angles,
        _diag(diag),
        ["tan(r)"] + ["0"] * (n - 1),
        "1",
        [(0.3, 1.2)] + [_ANGLE_BOX] * (n - 1),
    )
    flags = EntryFlags(
        is_einstein=True,
        einstein_constant=float(n - 1),
        omega_value=1.0,
        supports_general_suite=True,
        supports_weyl_suite=n >= 4,
    )
    return CatalogEntry("sphere_concircular", inst, flags)


def _cylinder_concircular(n: int) -> CatalogEntry:
    inst = ManifoldInstance.from_strings(
        ["x", "th", "ph"],
        _diag(["1", "1", "sin(th)^2"]),
        ["-1/(x + 3)", "0", "0"],
        "0",
        [(-1.0, 1.0), _ANGLE_BOX, _ANGLE_BOX],
    )
    flags = EntryFlags(omega_value=0.0, supports_general_suite=True)
    return CatalogEntry("cylinder_concircular", inst, flags)


def _flat_affine(n: int) -> CatalogEntry:
    names = [f"x{k}" for k in range(1, n + 1)]
    inst = ManifoldInstance.from_strings(
        names,
        _diag(["1"] * n),
        ["-1/(x1 + 3)"] + ["0"] * (n - 1),
        "0",
        [(-1.0, 1.0)] * n,
    )
    flags = EntryFlags(
        is_einstein=True,
        einstein_constant=0.0,
        omega_value=0.0,
        supports_general_suite=True,
        supports_weyl_suite=n >= 4,
    )
    return CatalogEntry("flat_affine", inst, flags)


KOTTLER_MASS = 1.0
KOTTLER_LAMBDA = 0.03


def _kottler(n: int) -> CatalogEntry:
    h = f"(1 - {2 * KOTTLER_MASS!r}/r - {KOTTLER_LAMBDA / 3!r}*r^2)"
    inst = ManifoldInstance.from_strings(
        ["t", "r", "th", "ph"],
        _diag([f"-{h}", f"1/{h}", "r^2", "r^2*sin(th)^2"]),
        ["0"] * 4,
        "0",
        [(-1.0, 1.0), (3.5, 6.0), (0.6, 2.5), (0.0, 6.0)],
    )
    flags = EntryFlags(
        is_einstein=True,
        einstein_constant=KOTTLER_LAMBDA,
        omega_value=0.0,
        supports_weyl_suite=True,
    )
    return CatalogEntry("kottler", inst, flags)


@dataclass(frozen=True)
class _Builtin:
    build: Callable[..., CatalogEntry]
    dims: tuple[int, ...]
    default_dim: int


BUILTINS: dict[str, _Builtin] = {
    "minkowski": _Builtin(_minkowski, (3, 4, 5, 6), 4),
    "de_sitter_grw": _Builtin(_de_sitter_grw, (3, 4, 5, 6), 4),
    "closed_grw": _Builtin(_closed_grw, (3, 4, 5, 6), 4),
    "sphere_concircular": _Builtin(_sphere_concircular, (3, 4, 5, 6), 3),
    "cylinder_concircular": _Builtin(_cylinder_concircular, (3,), 3),
    "flat_affine": _Builtin(_flat_affine, (3, 4, 5, 6), 3),
    "kottler": _Builtin(_kottler, (4,), 4),
}


def builtin(name: str, n: int | None = None, **options: Any) -> CatalogEntry:
    """Look up a built-in entry; ``options`` is only ``timelike_pi`` for minkowski."""
    if name not in BUILTINS:
        raise UnknownEntry(f"unknown manifold {name!r}")
    info = BUILTINS[name]
    n = info.default_dim if n is None else n
    if n not in info.dims:
        raise UnsupportedDimension(f"{name} supports dimensions {list(info.dims)}, not {n}")
    return info.build(n, **options)


def suites_for(entry: CatalogEntry) -> list[str]:
    f = entry.flags
    out = []
    if f.supports_general_suite:
        out.append("general")
    if f.is_grw:
        out += ["grw", "symmetry", "fluid"]
        if entry.dim == 4:
            out += ["efe", "stress"]
    elif f.supports_weyl_suite:
        out.append("symmetry")
    return out


# -- sampling ---------------------------------------------------------------


def sample_points(entry: CatalogEntry | ManifoldInstance, count: int, seed: int) -> np.ndarray:
    inst = entry.instance if isinstance(entry, CatalogEntry) else entry
    if count < 1:
        raise InvalidCount(f"count must be at least 1, got {count}")
    box = np.array(inst.sampling_box, dtype=float)
    rng = np.random.default_rng(seed)
    return rng.uniform(box[:, 0], box[:, 1], size=(count, inst.dim))


# -- manifests --------------------------------------------------------------

_REQUIRED = ("name", "dimension", "coordinates", "metric", "pi", "omega", "sampling_box")
_FLAG_NAMES = tuple(f.name for f in fields(EntryFlags))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _validate(doc: Any) -> None:
    _require(isinstance(doc, dict), "manifest must be a JSON object")
    unknown = set(doc) - set(_REQUIRED) - {"flags"}
    _require(not unknown, f"unknown keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in doc]
    _require(not missing, f"missing keys: {missing}")
    _require(isinstance(doc["name"], str), "name must be a string")
    n = doc["dimension"]
    _require(isinstance(n, int) and not isinstance(n, bool), "dimension must be an integer")
    _require(n >= 3, f"dimension must be at least 3, got {n}")

    def strings(value, what):
        _require(
            isinstance(value, list) and len(value) == n and all(isinstance(s, str) for s in value),
            f"{what} must be a list of {n} strings",
        )

    strings(doc["coordinates"], "coordinates")
    _require(isinstance(doc["metric"], list) and len(doc["metric"]) == n, f"metric must have {n} rows")
    for row in doc["metric"]:
        strings(row, "each metric row")
    strings(doc["pi"], "pi")
    _require(isinstance(doc["omega"], str), "omega must be a string")
    box = doc["sampling_box"]
    _require(isinstance(box, list) and len(box) == n, f"sampling_box must have {n} intervals")
    for iv in box:
        _require(
            isinstance(iv, list)
            and len(iv) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in iv)
            and iv[0] < iv[1],
            f"bad sampling interval {iv!r}",
        )
    flags = doc.get("flags", {})
    _require(isinstance(flags, dict), "flags must be an object")
    bad = set(flags) - set(_FLAG_NAMES)
    _require(not bad, f"unknown flags: {sorted(bad)}")


def _check_metric(inst: ManifoldInstance, probes: np.ndarray) -> None:
    n = inst.dim
    for x in probes:
        for i in range(n):
            for j in range(i + 1, n):
                a, b = inst.metric[i][j], inst.metric[j][i]
                if a == b:
                    continue
                va, vb = ex.evaluate_float(a, x), ex.evaluate_float(b, x)
                if abs(va - vb) > 1e-15 * max(1.0, abs(va)):
                    raise AsymmetricMetric(
                        f"metric[{i}][{j}] = {va!r} but metric[{j}][{i}] = {vb!r} at {x.tolist()}"
                    )
        PointGeometry(inst, x).mj  # raises SingularMetric


def probe_flags(inst: ManifoldInstance, probes: np.ndarray) -> EntryFlags:
    """Infer entry flags from pointwise residuals at the probe points."""
    from .verify import quasi_einstein_fit

    n = inst.dim
    concircular = grw = einstein = fluid = True
    lambdas = []
    for x in probes:
        pg = PointGeometry(inst, x)
        g_scale = 1.0 + np.linalg.norm(pg.g)
        concircular &= np.linalg.norm(pg.concircular_residual()) < PROBE_TOL * g_scale
        lorentzian = int(np.sum(np.linalg.eigvalsh(pg.g) < 0)) == 1
        grw &= (
            lorentzian
            and abs(pg.piP + 1.0) < PROBE_TOL
            and np.linalg.norm(pg.concircular_residual(omega=1.0)) < PROBE_TOL * g_scale
        )
        lam = pg.scalar["g"] / n
        lambdas.append(lam)
        ric = pg.Ric["g"]
        einstein &= np.linalg.norm(ric - lam * pg.g) < PROBE_TOL * (1.0 + np.linalg.norm(ric))
        if grw:
            _, _, res = quasi_einstein_fit(ric, pg.g, pg.pi)
            fluid &= res < PROBE_TOL * (1.0 + np.linalg.norm(ric))
    einstein &= max(lambdas) - min(lambdas) < PROBE_TOL * (1.0 + max(abs(v) for v in lambdas))
    omega_value = None if ex.has_coordinates(inst.omega) else ex.evaluate_float(inst.omega, ())
    return EntryFlags(
        is_grw=bool(grw),
        is_einstein=bool(einstein),
        is_perfect_fluid=bool(grw and fluid),
        omega_value=omega_value,
        supports_general_suite=bool(concircular),
        supports_weyl_suite=bool(einstein and n >= 4),
        einstein_constant=float(np.mean(lambdas)) if einstein else None,
    )


def load_manifest(source: str | Path | dict) -> CatalogEntry:
    """Load a manifest from a path, a JSON string or an already-parsed dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc
    _validate(doc)
    try:
        inst = ManifoldInstance.from_strings(
            doc["coordinates"], doc["metric"], doc["pi"], doc["omega"], doc["sampling_box"]
        )
    except ex.ParseError:
        raise
    except ValueError as exc:
        # bad coordinate names or shape problems
        raise SchemaError(str(exc)) from exc
    probes = sample_points(inst, PROBE_POINTS, PROBE_SEED)
    _check_metric(inst, probes)
    flags = probe_flags(inst, probes)
    given = doc.get("flags", {})
    if given:
        flags = replace(flags, **given)
    return CatalogEntry(doc["name"], inst, flags)


def describe(name: str) -> dict:
    info = BUILTINS[name]
    entry = builtin(name)
    omega = entry.flags.omega_value
    return {
        "name": name,
        "dims": list(info.dims),
        "suites": suites_for(entry),
        "omega": None if omega is None or math.isnan(omega) else omega,
    }


__all__ = [
    "AsymmetricMetric",
    "BUILTINS",
    "CatalogEntry",
    "EntryFlags",
    "InvalidCount",
    "SchemaError",
    "SingularMetric",
    "UnknownEntry",
    "UnsupportedDimension",
    "builtin",
    "describe",
    "load_manifest",
    "probe_flags",
    "sample_points",
    "suites_for",
]
