"""Connections and curvature of a concircularly semi-symmetric metric connection.

Given a chart with metric ``g``, a covector ``pi`` and a scalar ``omega``, the
semi-symmetric metric connection is

    nabla1_X Y = nablag_X Y + pi(Y) X - g(X, Y) P,    P = g^{-1} pi,

with mutual connection ``nabla2_X Y = nablag_X Y + pi(X) Y - g(X, Y) P`` and
symmetric connection ``nabla0 = (nabla1 + nabla2) / 2``. Curvatures are
computed two ways: directly from connection coefficients and their partials,
and from closed-form relations to the Levi-Civita curvature that hold when
``nablag pi - pi (x) pi = omega g``. Comparing the two is the core check.

Curvature keys are the strings ``"g", "0", ..., "5"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import expr as ex
from .jet import coordinate_jets
from .tensor import kulkarni_nomizu, lower_curvature, ricci

SINGULAR_DET = 1e-10
KINDS = ("g", "0", "1", "2", "3", "4", "5")


class GeometryError(ValueError):
    pass


class SingularMetric(GeometryError):
    pass


class DimensionTooSmall(GeometryError):
    pass


@dataclass(frozen=True)
class ManifoldInstance:
    dim: int
    coordinate_names: tuple[str, ...]
    metric: tuple[tuple[ex.Expr, ...], ...]
    pi: tuple[ex.Expr, ...]
    omega: ex.Expr
    sampling_box: tuple[tuple[float, float], ...]

    @classmethod
    def from_strings(
        cls,
        coordinate_names: Sequence[str],
        metric: Sequence[Sequence[str]],
        pi: Sequence[str],
        omega: str,
        sampling_box: Sequence[Sequence[float]],
    ) -> "ManifoldInstance":
        names = tuple(coordinate_names)
        n = len(names)
        if len(metric) != n or any(len(row) != n for row in metric):
            raise GeometryError(f"metric must be {n}x{n}")
        if len(pi) != n or len(sampling_box) != n:
            raise GeometryError(f"pi and sampling_box need {n} entries")
        return cls(
            dim=n,
            coordinate_names=names,
            metric=tuple(tuple(ex.parse(s, names) for s in row) for row in metric),
            pi=tuple(ex.parse(s, names) for s in pi),
            omega=ex.parse(omega, names),
            sampling_box=tuple((float(lo), float(hi)) for lo, hi in sampling_box),
        )


@dataclass(frozen=True, eq=False)
class MetricJet:
    point: np.ndarray
    g: np.ndarray
    dg: np.ndarray  # dg[k, i, j] = d_k g_ij
    d2g: np.ndarray  # d2g[k, m, i, j] = d_k d_m g_ij
    g_inv: np.ndarray
    dg_inv: np.ndarray  # dg_inv[k, i, j] = d_k g^ij


@dataclass(frozen=True, eq=False)
class ConnectionJet:
    kind: str
    gamma: np.ndarray  # gamma[k, i, j]: nabla_{d_i} d_j = gamma[k, i, j] d_k
    dgamma: np.ndarray  # dgamma[m, k, i, j] = d_m gamma[k, i, j]


@dataclass(frozen=True, eq=False)
class CovectorJet:
    pi: np.ndarray
    dpi: np.ndarray  # dpi[k, i] = d_k pi_i
    omega: float


def metric_jet(m: ManifoldInstance, point: Sequence[float]) -> MetricJet:
    x = np.asarray(point, dtype=float)
    n = m.dim
    if x.shape != (n,):
        raise GeometryError(f"point of shape {x.shape} on a {n}-chart")
    coords = coordinate_jets(x)
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i, n):
            jet = ex.evaluate(m.metric[i][j], coords)
            g[i, j] = g[j, i] = jet.value
            dg[:, i, j] = dg[:, j, i] = jet.grad
            d2g[:, :, i, j] = d2g[:, :, j, i] = jet.hess
    det = np.linalg.det(g)
    if not abs(det) > SINGULAR_DET:
        raise SingularMetric(f"|det g| = {abs(det):.3g} at {x.tolist()}")
    g_inv = np.linalg.inv(g)
    dg_inv = -np.einsum("ia,kab,bj->kij", g_inv, dg, g_inv)
    return MetricJet(x, g, dg, d2g, g_inv, dg_inv)


def covector_jet(m: ManifoldInstance, point: Sequence[float]) -> CovectorJet:
    coords = coordinate_jets(np.asarray(point, dtype=float))
    jets = [ex.evaluate(e, coords) for e in m.pi]
    pi = np.array([j.value for j in jets])
    dpi = np.array([j.grad for j in jets]).T
    omega = ex.evaluate(m.omega, coords).value
    return CovectorJet(pi, dpi, omega)


def levi_civita(mj: MetricJet) -> ConnectionJet:
    dg, d2g = mj.dg, mj.d2g
    # first-kind symbols: lower[l, i, j] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    lower = 0.5 * (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )
    dlower = 0.5 * (
        np.einsum("mijl->mlij", d2g) + np.einsum("mjil->mlij", d2g) - d2g
    )
    gamma = np.einsum("kl,lij->kij", mj.g_inv, lower)
    dgamma = np.einsum("mkl,lij->mkij", mj.dg_inv, lower) + np.einsum(
        "kl,mlij->mkij", mj.g_inv, dlower
    )
    return ConnectionJet("g", gamma, dgamma)


def associated_vector(mj: MetricJet, cj: CovectorJet) -> tuple[np.ndarray, np.ndarray]:
    """``P = g^{-1} pi`` and ``dP[m, k] = d_m P^k``."""
    P = mj.g_inv @ cj.pi
    dP = np.einsum("mkl,l->mk", mj.dg_inv, cj.pi) + np.einsum("kl,ml->mk", mj.g_inv, cj.dpi)
    return P, dP


def family_connection(kind: str, lc: ConnectionJet, mj: MetricJet, cj: CovectorJet) -> ConnectionJet:
    if kind == "0":
        c1 = family_connection("1", lc, mj, cj)
        c2 = family_connection("2", lc, mj, cj)
        return ConnectionJet("0", 0.5 * (c1.gamma + c2.gamma), 0.5 * (c1.dgamma + c2.dgamma))
    n = mj.g.shape[0]
    eye = np.eye(n)
    P, dP = associated_vector(mj, cj)
    metric_part = -np.einsum("ij,k->kij", mj.g, P)
    dmetric_part = -np.einsum("mij,k->mkij", mj.dg, P) - np.einsum("ij,mk->mkij", mj.g, dP)
    if kind == "1":
        # delta^k_i pi_j
        torsion_part = np.einsum("ki,j->kij", eye, cj.pi)
        dtorsion_part = np.einsum("ki,mj->mkij", eye, cj.dpi)
    elif kind == "2":
        # delta^k_j pi_i
        torsion_part = np.einsum("kj,i->kij", eye, cj.pi)
        dtorsion_part = np.einsum("kj,mi->mkij", eye, cj.dpi)
    else:
        raise ValueError(f"unknown connection kind {kind!r}")
    return ConnectionJet(
        kind, lc.gamma + torsion_part + metric_part, lc.dgamma + dtorsion_part + dmetric_part
    )


def torsion_tensor(pi: np.ndarray) -> np.ndarray:
    """``T[k, i, j]`` components of ``T(X, Y) = pi(Y) X - pi(X) Y``."""
    eye = np.eye(pi.shape[0])
    return np.einsum("ki,j->kij", eye, pi) - np.einsum("kj,i->kij", eye, pi)


def torsion_of(cj: ConnectionJet) -> np.ndarray:
    return cj.gamma - np.einsum("kij->kji", cj.gamma)


def covariant_derivative_covector(gamma: np.ndarray, pi: np.ndarray, dpi: np.ndarray) -> np.ndarray:
    """``D[i, j] = (nabla_{d_i} pi)(d_j)``."""
    return dpi - np.einsum("kij,k->ij", gamma, pi)


def covariant_derivative_vector(gamma: np.ndarray, P: np.ndarray, dP: np.ndarray) -> np.ndarray:
    """``D[k, i] = (nabla_{d_i} P)^k``."""
    return dP.T + np.einsum("kij,j->ki", gamma, P)


def concircular_residual(
    mj: MetricJet, lc: ConnectionJet, cj: CovectorJet, omega: float | None = None
) -> np.ndarray:
    w = cj.omega if omega is None else omega
    return covariant_derivative_covector(lc.gamma, cj.pi, cj.dpi) - np.outer(cj.pi, cj.pi) - w * mj.g


def torse_forming_residual(mj: MetricJet, lc: ConnectionJet, cj: CovectorJet) -> np.ndarray:
    P, dP = associated_vector(mj, cj)
    n = P.shape[0]
    return covariant_derivative_vector(lc.gamma, P, dP) - np.eye(n) - np.outer(P, cj.pi)


def nabla1_P(mj: MetricJet, c1: ConnectionJet, cj: CovectorJet) -> np.ndarray:
    P, dP = associated_vector(mj, cj)
    return covariant_derivative_vector(c1.gamma, P, dP)


def nabla1_P_residual(mj: MetricJet, c1: ConnectionJet, cj: CovectorJet) -> np.ndarray:
    P, _ = associated_vector(mj, cj)
    n = P.shape[0]
    return nabla1_P(mj, c1, cj) - (cj.omega + cj.pi @ P) * np.eye(n)


def torsion_recurrence_residual(c1: ConnectionJet, cj: CovectorJet) -> np.ndarray:
    """``(nabla1_{d_m} T)^k_{ij}`` laid out ``[k, i, j, m]``."""
    n = cj.pi.shape[0]
    eye = np.eye(n)
    T = torsion_tensor(cj.pi)
    dT = np.einsum("ki,mj->mkij", eye, cj.dpi) - np.einsum("kj,mi->mkij", eye, cj.dpi)
    G = c1.gamma
    return (
        np.einsum("mkij->kijm", dT)
        + np.einsum("kma,aij->kijm", G, T)
        - np.einsum("ami,kaj->kijm", G, T)
        - np.einsum("amj,kia->kijm", G, T)
    )


def curvature_single(cj: ConnectionJet) -> np.ndarray:
    G, dG = cj.gamma, cj.dgamma
    return (
        np.einsum("ikjl->klij", dG)
        - np.einsum("jkil->klij", dG)
        + np.einsum("kim,mjl->klij", G, G)
        - np.einsum("kjm,mil->klij", G, G)
    )


def _second(outer: ConnectionJet, inner: ConnectionJet) -> np.ndarray:
    """``D[k, l, i, j] = (nabla^outer_{d_i} nabla^inner_{d_j} d_l)^k``."""
    return np.einsum("ikjl->klij", inner.dgamma) + np.einsum("kim,mjl->klij", outer.gamma, inner.gamma)


def _along(direction: np.ndarray, conn: ConnectionJet, swap: bool) -> np.ndarray:
    """``(nabla^conn_V d_l)^k`` with ``V = direction[m, i, j] d_m`` (indices swapped if asked)."""
    V = np.einsum("mij->mji", direction) if swap else direction
    return np.einsum("mij,kml->klij", V, conn.gamma)


def curvature_mixed(kind: str, c1: ConnectionJet, c2: ConnectionJet) -> np.ndarray:
    """Mixed curvatures built from both ``nabla1`` and ``nabla2``, on coordinate fields."""
    swap_ij = "klij->klji"
    d21 = _second(c2, c1)
    d12_swapped = np.einsum(swap_ij, _second(c1, c2))
    if kind == "3":
        # + nabla2_{nabla1_Y X} Z - nabla1_{nabla2_X Y} Z
        return d21 - d12_swapped + _along(c1.gamma, c2, swap=True) - _along(c2.gamma, c1, swap=False)
    if kind == "4":
        # + nabla2_{nabla2_Y X} Z - nabla1_{nabla1_X Y} Z
        return d21 - d12_swapped + _along(c2.gamma, c2, swap=True) - _along(c1.gamma, c1, swap=False)
    if kind == "5":
        d11 = _second(c1, c1)
        d22 = _second(c2, c2)
        return 0.5 * (d11 - np.einsum(swap_ij, d21) + d22 - d12_swapped)
    raise ValueError(f"unknown mixed curvature kind {kind!r}")


def _basis_terms(g: np.ndarray, pi: np.ndarray) -> dict[str, np.ndarray]:
    n = g.shape[0]
    d = np.eye(n)
    return {
        # g(X,Z)Y - g(Y,Z)X
        "gxz_y": np.einsum("il,kj->klij", g, d) - np.einsum("jl,ki->klij", g, d),
        # pi(Z)(pi(Y)X - pi(X)Y)
        "pz_py_x": np.einsum("l,j,ki->klij", pi, pi, d) - np.einsum("l,i,kj->klij", pi, pi, d),
        # g(X,Z)Y alone, g(X,Y)Z
        "g_xz_y": np.einsum("il,kj->klij", g, d),
        "g_xy_z": np.einsum("ij,kl->klij", g, d),
        "g_yz_x": np.einsum("jl,ki->klij", g, d),
        # pi(Y)(pi(Z)X - pi(X)Z)
        "py_pz_x": np.einsum("j,l,ki->klij", pi, pi, d) - np.einsum("j,i,kl->klij", pi, pi, d),
    }


def curvature_closed_form(
    kind: str, Rg: np.ndarray, g: np.ndarray, pi: np.ndarray, P: np.ndarray, omega: float
) -> np.ndarray:
    """Curvature of connection ``kind`` expressed through ``Rg`` when pi is concircular."""
    b = _basis_terms(g, pi)
    w, pP = omega, float(pi @ P)
    mixed = w * (2 * b["g_xz_y"] - b["g_xy_z"] - b["g_yz_x"]) + pP * (b["g_xz_y"] - b["g_xy_z"])
    if kind == "g":
        return Rg.copy()
    if kind == "0":
        return Rg + 0.5 * (3 * w + pP) * b["gxz_y"] - 0.25 * b["pz_py_x"]
    if kind == "1":
        return Rg + (2 * w + pP) * b["gxz_y"]
    if kind == "2":
        return Rg + w * b["gxz_y"]
    if kind == "3":
        return Rg + mixed
    if kind == "4":
        return Rg + mixed - b["pz_py_x"]
    if kind == "5":
        return Rg + 0.5 * (3 * w + pP) * b["gxz_y"] - 0.5 * b["py_pz_x"]
    raise ValueError(f"unknown curvature kind {kind!r}")


def curvature_closed_form_grw(kind: str, Rg: np.ndarray, g: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Specialisation to a unit timelike generator (``omega = 1``, ``pi(P) = -1``)."""
    b = _basis_terms(g, pi)
    base = Rg + b["gxz_y"]
    if kind == "g":
        return Rg.copy()
    if kind == "0":
        return base - 0.25 * b["pz_py_x"]
    if kind in ("1", "2", "3"):
        return base
    if kind == "4":
        return base - b["pz_py_x"]
    if kind == "5":
        return base - 0.5 * b["py_pz_x"]
    raise ValueError(f"unknown curvature kind {kind!r}")


def ricci_closed_form(
    kind: str, Ric_g: np.ndarray, g: np.ndarray, pi: np.ndarray, P: np.ndarray, omega: float
) -> np.ndarray:
    n = g.shape[0]
    w, pP = omega, float(pi @ P)
    Pi = np.outer(pi, pi)
    if kind == "g":
        return Ric_g.copy()
    if kind == "0":
        return Ric_g - (n - 1) / 2 * (3 * w + pP) * g - (n - 1) / 4 * Pi
    if kind == "1":
        return Ric_g - (n - 1) * (2 * w + pP) * g
    if kind in ("2", "3"):
        return Ric_g - (n - 1) * w * g
    if kind == "4":
        return Ric_g - (n - 1) * w * g - (n - 1) * Pi
    if kind == "5":
        return Ric_g - (n - 1) / 2 * (3 * w + pP) * g - (n - 1) / 2 * Pi
    raise ValueError(f"unknown curvature kind {kind!r}")


def ricci_closed_form_grw(kind: str, Ric_g: np.ndarray, g: np.ndarray, pi: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    Pi = np.outer(pi, pi)
    if kind == "g":
        return Ric_g.copy()
    if kind == "0":
        return Ric_g - (n - 1) / 4 * (4 * g + Pi)
    if kind in ("1", "2", "3"):
        return Ric_g - (n - 1) * g
    if kind == "4":
        return Ric_g - (n - 1) * (g + Pi)
    if kind == "5":
        return Ric_g - (n - 1) / 2 * (2 * g + Pi)
    raise ValueError(f"unknown curvature kind {kind!r}")


def scalar_closed_form(kind: str, r_g: float, n: int, piP: float, omega: float) -> float:
    w = omega
    if kind == "g":
        return r_g
    if kind == "0":
        return r_g - 3 * n * (n - 1) / 2 * w - (n - 1) * (2 * n + 1) / 4 * piP
    if kind == "1":
        return r_g - 2 * n * (n - 1) * (w + 0.5 * piP)
    if kind in ("2", "3"):
        return r_g - n * (n - 1) * w
    if kind == "4":
        return r_g - n * (n - 1) * w - (n - 1) * piP
    if kind == "5":
        return r_g - 3 * n * (n - 1) / 2 * w - (n * n - 1) / 2 * piP
    raise ValueError(f"unknown curvature kind {kind!r}")


def ricci_and_scalar(R: np.ndarray, g_inv: np.ndarray) -> tuple[np.ndarray, float]:
    Ric = ricci(R)
    return Ric, float(np.einsum("ij,ij->", g_inv, Ric))


def weyl_tensor(Rc: np.ndarray, Ric: np.ndarray, r: float, g: np.ndarray) -> np.ndarray:
    """Conformal curvature in the (0,4) layout ``C[i, j, l, w]``."""
    n = g.shape[0]
    if n < 4:
        raise DimensionTooSmall(f"Weyl tensor needs n >= 4, got {n}")
    return (
        Rc
        - kulkarni_nomizu(Ric, g) / (n - 2)
        + r / (2 * (n - 1) * (n - 2)) * kulkarni_nomizu(g, g)
    )


def ricci_convention_selftest(n: int = 4) -> float:
    """Trace of ``g(X,Z)Y - g(Y,Z)X`` over X must be ``(1 - n) g``; returns the deviation."""
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    g = a @ a.T + n * np.eye(n)
    term = _basis_terms(g, np.zeros(n))["gxz_y"]
    return float(np.max(np.abs(ricci(term) - (1 - n) * g)))


class PointGeometry:
    """Everything about one chart point, computed lazily and cached."""

    def __init__(self, instance: ManifoldInstance, point: Sequence[float]):
        self.instance = instance
        self.point = np.asarray(point, dtype=float)
        self.n = instance.dim

    @cached_property
    def mj(self) -> MetricJet:
        return metric_jet(self.instance, self.point)

    @cached_property
    def cj(self) -> CovectorJet:
        return covector_jet(self.instance, self.point)

    @property
    def g(self) -> np.ndarray:
        return self.mj.g

    @property
    def g_inv(self) -> np.ndarray:
        return self.mj.g_inv

    @property
    def pi(self) -> np.ndarray:
        return self.cj.pi

    @property
    def omega(self) -> float:
        return self.cj.omega

    @cached_property
    def P(self) -> np.ndarray:
        return associated_vector(self.mj, self.cj)[0]

    @cached_property
    def piP(self) -> float:
        return float(self.pi @ self.P)

    @cached_property
    def Pi(self) -> np.ndarray:
        return np.outer(self.pi, self.pi)

    @cached_property
    def connections(self) -> dict[str, ConnectionJet]:
        lc = levi_civita(self.mj)
        c1 = family_connection("1", lc, self.mj, self.cj)
        c2 = family_connection("2", lc, self.mj, self.cj)
        c0 = ConnectionJet("0", 0.5 * (c1.gamma + c2.gamma), 0.5 * (c1.dgamma + c2.dgamma))
        return {"g": lc, "0": c0, "1": c1, "2": c2}

    @cached_property
    def torsion(self) -> np.ndarray:
        return torsion_tensor(self.pi)

    @cached_property
    def R(self) -> dict[str, np.ndarray]:
        c = self.connections
        out = {k: curvature_single(c[k]) for k in ("g", "0", "1", "2")}
        for k in ("3", "4", "5"):
            out[k] = curvature_mixed(k, c["1"], c["2"])
        return out

    @cached_property
    def R_closed(self) -> dict[str, np.ndarray]:
        Rg = self.R["g"]
        return {k: curvature_closed_form(k, Rg, self.g, self.pi, self.P, self.omega) for k in KINDS}

    @cached_property
    def R_grw(self) -> dict[str, np.ndarray]:
        Rg = self.R["g"]
        return {k: curvature_closed_form_grw(k, Rg, self.g, self.pi) for k in KINDS}

    @cached_property
    def R04(self) -> dict[str, np.ndarray]:
        return {k: lower_curvature(v, self.g) for k, v in self.R.items()}

    @cached_property
    def Ric(self) -> dict[str, np.ndarray]:
        return {k: ricci(v) for k, v in self.R.items()}

    @cached_property
    def scalar(self) -> dict[str, float]:
        return {k: float(np.einsum("ij,ij->", self.g_inv, v)) for k, v in self.Ric.items()}

    @cached_property
    def Ric_closed(self) -> dict[str, np.ndarray]:
        return {
            k: ricci_closed_form(k, self.Ric["g"], self.g, self.pi, self.P, self.omega) for k in KINDS
        }

    @cached_property
    def Ric_grw(self) -> dict[str, np.ndarray]:
        return {k: ricci_closed_form_grw(k, self.Ric["g"], self.g, self.pi) for k in KINDS}

    @cached_property
    def scalar_closed(self) -> dict[str, float]:
        return {
            k: scalar_closed_form(k, self.scalar["g"], self.n, self.piP, self.omega) for k in KINDS
        }

    @cached_property
    def weyl(self) -> np.ndarray:
        return weyl_tensor(self.R04["g"], self.Ric["g"], self.scalar["g"], self.g)

    @cached_property
    def nabla_g_P(self) -> np.ndarray:
        P, dP = associated_vector(self.mj, self.cj)
        return covariant_derivative_vector(self.connections["g"].gamma, P, dP)

    def concircular_residual(self, omega: float | None = None) -> np.ndarray:
        return concircular_residual(self.mj, self.connections["g"], self.cj, omega)

    def torse_forming_residual(self) -> np.ndarray:
        return torse_forming_residual(self.mj, self.connections["g"], self.cj)

    def nabla1_P(self) -> np.ndarray:
        return nabla1_P(self.mj, self.connections["1"], self.cj)

    def nabla1_P_residual(self) -> np.ndarray:
        return nabla1_P_residual(self.mj, self.connections["1"], self.cj)

    def torsion_recurrence_residual(self) -> np.ndarray:
        return torsion_recurrence_residual(self.connections["1"], self.cj)
