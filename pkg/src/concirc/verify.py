"""Named residual checks grouped into suites.

Every check compares two independently computed quantities at one sample
point. ``expect_zero`` checks pass when the residual is below the tolerance,
``expect_nonzero`` checks when it is above. Equivalence statements ("A holds
iff B holds") are checked as verdict agreement: the premise residual decides
which mode the conclusion is held to.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .catalog import CatalogEntry
from .geometry import PointGeometry
from .tensor import apply_curvature, curvature_action, norm, raise_curvature, tachibana

EXPECT_ZERO = "expect_zero"
EXPECT_NONZERO = "expect_nonzero"
NONZERO_NORM = 0.1
VECTOR_TRIPLES = 8
SUITES = ("general", "grw", "symmetry", "fluid", "efe", "stress")


class VerifyError(ValueError):
    pass


class NotGrw(VerifyError):
    pass


class NotFourDimensional(VerifyError):
    pass


class NonPositiveK(VerifyError):
    pass


class DegeneratePi(VerifyError):
    pass


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-9
    nonzero: float = 1e-3

    def __post_init__(self):
        if not 0 < self.zero < self.nonzero:
            raise ValueError(f"need 0 < tol_zero < tol_nonzero, got {self.zero}, {self.nonzero}")


@dataclass(frozen=True)
class CheckResult:
    id: str
    paper_ref: str
    point: tuple[float, ...]
    residual: float
    tolerance: float
    mode: str
    passed: bool
    value: float | None = None

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "paper_ref": self.paper_ref,
            "point": list(self.point),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "mode": self.mode,
            "pass": self.passed,
        }
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass
class SuiteReport:
    name: str
    status: str = "run"
    checks: list[CheckResult] = field(default_factory=list)
    reason: str | None = None

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.failed

    def by_id(self, check_id: str) -> list[CheckResult]:
        return [c for c in self.checks if c.id == check_id]

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status, "checks": [c.to_dict() for c in self.checks]}
        if self.reason is not None:
            out["reason"] = self.reason
        return out


@dataclass(frozen=True)
class FluidState:
    point: tuple[float, ...]
    a: float
    b: float
    sigma: float
    p: float
    k: float
    eos_ratio: float | None
    fit_residual: float
    sec_violated: bool
    wec: bool
    phantom_barrier: bool
    classification: str

    def to_dict(self) -> dict:
        return asdict(self)


class _Recorder:
    """Appends checks for one sample point to a report."""

    def __init__(self, report: SuiteReport, point: np.ndarray, tol: Tolerances):
        self.report = report
        self.point = tuple(float(v) for v in point)
        self.tol = tol

    def _add(self, cid, ref, residual, tolerance, mode, value=None):
        residual = float(residual)
        if not np.isfinite(residual):
            residual = float("inf") if mode == EXPECT_ZERO else 0.0
        passed = residual < tolerance if mode == EXPECT_ZERO else residual > tolerance
        self.report.checks.append(
            CheckResult(cid, ref, self.point, residual, float(tolerance), mode, bool(passed),
                        None if value is None else float(value))
        )

    def zero(self, cid: str, ref: str, residual: float, tolerance: float | None = None, value=None):
        self._add(cid, ref, residual, self.tol.zero if tolerance is None else tolerance, EXPECT_ZERO, value)

    def nonzero(self, cid: str, ref: str, residual: float, threshold: float | None = None, value=None):
        t = self.tol.nonzero if threshold is None else threshold
        self._add(cid, ref, residual, t, EXPECT_NONZERO, value)

    def equivalent(self, cid: str, ref: str, premise: float, conclusion: float):
        """The conclusion must vanish exactly when the premise does."""
        if premise < self.tol.zero:
            self._add(cid, ref, conclusion, self.tol.zero, EXPECT_ZERO, premise)
        elif premise > self.tol.nonzero:
            self._add(cid, ref, conclusion, self.tol.nonzero, EXPECT_NONZERO, premise)
        else:
            # premise in the ambiguous band: no verdict, reported as a failure
            self._add(cid, ref, premise, self.tol.zero, EXPECT_ZERO, premise)


def rel(lhs, rhs) -> float:
    """``|lhs - rhs| / (1 + |rhs|)`` in the Frobenius norm."""
    return norm(np.asarray(lhs) - np.asarray(rhs)) / (1.0 + norm(rhs))


def _vector_triples(seed: int, index: int, n: int) -> np.ndarray:
    rng = np.random.default_rng([seed, index])
    return rng.standard_normal((VECTOR_TRIPLES, 3, n))


def quasi_einstein_fit(Ric: np.ndarray, g: np.ndarray, pi: np.ndarray) -> tuple[float, float, float]:
    """Solve ``Ric = a g + b pi(x)pi`` from the projection on P and the trace.

    Returns ``(a, b, residual)`` where the residual is the norm of what the
    two-term form leaves unexplained.
    """
    pi = np.asarray(pi, dtype=float)
    if norm(pi) < 1e-10:
        raise DegeneratePi("pi vanishes")
    g_inv = np.linalg.inv(g)
    P = g_inv @ pi
    pP = float(pi @ P)
    if abs(pP) < 1e-10:
        raise DegeneratePi("pi is null")
    n = g.shape[0]
    ric_PP = float(P @ Ric @ P)
    r = float(np.einsum("ij,ij->", g_inv, Ric))
    # ric_PP = a pP + b pP^2,  r = n a + b pP
    a, b = np.linalg.solve(np.array([[pP, pP * pP], [n, pP]]), np.array([ric_PP, r]))
    return float(a), float(b), norm(Ric - a * g - b * np.outer(pi, pi))


def _require_grw(entry: CatalogEntry) -> None:
    if not entry.flags.is_grw:
        raise NotGrw(f"{entry.name} is not a GRW entry with a unit timelike generator")


def _require_four(entry: CatalogEntry) -> None:
    if entry.dim != 4:
        raise NotFourDimensional(f"{entry.name} has dimension {entry.dim}, need 4")


# -- general ----------------------------------------------------------------

_CURVATURE_NAMES = {
    "g": "Levi-Civita",
    "0": "symmetric associated connection",
    "1": "semi-symmetric metric connection",
    "2": "mutual connection",
    "3": "third mixed curvature",
    "4": "fourth mixed curvature",
    "5": "fifth mixed curvature",
}


def suite_general(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
                  tol: Tolerances = Tolerances()) -> SuiteReport:
    report = SuiteReport("general")
    for x in points:
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        rec.zero("general.concircular", "concircularity of pi with the given omega",
                 norm(pg.concircular_residual()))
        c = pg.connections
        rec.zero("conn.torsion", "torsion of the semi-symmetric connection is pi(Y)X - pi(X)Y",
                 rel(c["1"].gamma - np.einsum("kij->kji", c["1"].gamma), pg.torsion))
        rec.zero("conn.symmetric.0", "associated connection is torsion-free",
                 norm(c["0"].gamma - np.einsum("kij->kji", c["0"].gamma)))
        for k in "012345":
            rec.zero(f"curv.R{k}.closed_vs_direct", f"closed form of the {_CURVATURE_NAMES[k]} curvature",
                     rel(pg.R_closed[k], pg.R[k]))
        for k in "012345":
            rec.zero(f"ric.Ric{k}.closed_vs_direct", f"closed form of the {_CURVATURE_NAMES[k]} Ricci tensor",
                     rel(pg.Ric_closed[k], pg.Ric[k]))
        for k in "012345":
            s, s_closed = pg.scalar[k], pg.scalar_closed[k]
            rec.zero(f"scal.r{k}.closed_vs_direct", f"closed form of the {_CURVATURE_NAMES[k]} scalar curvature",
                     abs(s_closed - s) / (1.0 + abs(s)), value=s)
        for k in "g012345":
            ric = pg.Ric[k]
            rec.zero(f"ric.Ric{k}.symmetric", "Ricci tensors of the family are symmetric",
                     norm(ric - ric.T) / (1.0 + norm(ric)))
        rec.equivalent("thm.invariance.nabla1", "R^g invariant under the semi-symmetric connection iff 2 omega = -g(P,P)",
                       abs(2 * pg.omega + pg.piP), norm(pg.R["1"] - pg.R["g"]))
        rec.equivalent("thm.invariance.nabla2", "R^g invariant under the mutual connection iff omega = 0",
                       abs(pg.omega), norm(pg.R["2"] - pg.R["g"]))
    return report


# -- grw --------------------------------------------------------------------


def suite_grw(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
              tol: Tolerances = Tolerances()) -> SuiteReport:
    _require_grw(entry)
    report = SuiteReport("grw")
    n = entry.dim
    for idx, x in enumerate(points):
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        g, pi, P = pg.g, pg.pi, pg.P
        R = pg.R
        rec.zero("grw.unit", "generator is unit timelike", abs(pg.piP + 1.0), value=pg.piP)
        rec.zero("grw.concircular", "concircularity with omega = 1", norm(pg.concircular_residual(omega=1.0)))
        rec.zero("grw.torse_forming", "nabla^g P = X + pi(X) P", norm(pg.torse_forming_residual()))
        rec.zero("grw.nabla1_P", "generator parallel for the semi-symmetric connection", norm(pg.nabla1_P()))
        rec.zero("grw.torsion_recurrent", "torsion parallel for the semi-symmetric connection",
                 norm(pg.torsion_recurrence_residual()))
        for k in "012345":
            rec.zero(f"grw.R{k}.closed_vs_direct", f"GRW closed form of the {_CURVATURE_NAMES[k]} curvature",
                     rel(pg.R_grw[k], R[k]))
        for k in "012345":
            rec.zero(f"grw.Ric{k}.closed_vs_direct", f"GRW closed form of the {_CURVATURE_NAMES[k]} Ricci tensor",
                     rel(pg.Ric_grw[k], pg.Ric[k]))
        rec.zero("grw.R1_eq_R2", "curvatures of the semi-symmetric and mutual connections coincide",
                 rel(R["2"], R["1"]))
        rec.zero("grw.R1_eq_R3", "curvatures of the semi-symmetric and third mixed connection coincide",
                 rel(R["3"], R["1"]))

        ids = _grw_vector_identities(pg, _vector_triples(seed, idx, n))
        for cid, (ref, residual) in ids.items():
            rec.zero(cid, ref, residual)

        ric_P = {k: P @ pg.Ric[k] for k in ("0", "4", "5")}
        rec.zero("grw.eigen.Ric0", "Ric^0(P, .) = (n-1)/4 pi", rel(ric_P["0"], (n - 1) / 4 * pi))
        rec.zero("grw.eigen.Ric4", "Ric^4(P, .) = (n-1) pi", rel(ric_P["4"], (n - 1) * pi))
        rec.zero("grw.eigen.Ric5", "Ric^5(P, .) = (n-1)/2 pi", rel(ric_P["5"], (n - 1) / 2 * pi))
        threshold = max(NONZERO_NORM, tol.nonzero)
        for k in ("0", "4", "5"):
            rec.nonzero(f"grw.nonzero.R{k}", f"{_CURVATURE_NAMES[k]} curvature does not vanish",
                        norm(R[k]), threshold)
            rec.nonzero(f"grw.nonzero.Ric{k}", f"{_CURVATURE_NAMES[k]} Ricci tensor does not vanish",
                        norm(pg.Ric[k]), threshold)
    return report


def _grw_vector_identities(pg: PointGeometry, triples: np.ndarray) -> dict[str, tuple[str, float]]:
    """Pointwise curvature identities on a GRW space-time, worst case over the triples."""
    g, pi, P, R = pg.g, pg.pi, pg.P, pg.R
    n = pg.n
    worst: dict[str, tuple[str, float]] = {}

    def record(cid, ref, lhs, rhs):
        r = rel(lhs, rhs)
        if cid not in worst or r > worst[cid][1]:
            worst[cid] = (ref, r)

    def T(X, Y):
        return (pi @ Y) * X - (pi @ X) * Y

    for X, Y, Z in triples:
        record("grw.R1_XY_P", "R^1(X,Y)P = 0", apply_curvature(R["1"], X, Y, P), np.zeros(n))
        record("grw.R1_PY_Z", "R^1(P,Y)Z = 0", apply_curvature(R["1"], P, Y, Z), np.zeros(n))
        record("grw.Ric1_P", "Ric^1(P,X) = 0", P @ pg.Ric["1"] @ X, 0.0)
        record("grw.Rg_XY_P", "R^g(X,Y)P = T(X,Y)", apply_curvature(R["g"], X, Y, P), T(X, Y))
        record("grw.Rg_PY_Z", "R^g(P,Y)Z = g(Y,Z)P - pi(Z)Y",
               apply_curvature(R["g"], P, Y, Z), (Y @ g @ Z) * P - (pi @ Z) * Y)
        record("grw.pi_Rg", "pi(R^g(X,Y)Z) = pi(X)g(Y,Z) - pi(Y)g(X,Z)",
               pi @ apply_curvature(R["g"], X, Y, Z), (pi @ X) * (Y @ g @ Z) - (pi @ Y) * (X @ g @ Z))
        record("grw.Ricg_P", "Ric^g(P,X) = (n-1) pi(X)", P @ pg.Ric["g"] @ X, (n - 1) * (pi @ X))
        t = T(X, Y)
        chain = max(
            rel(4 * apply_curvature(R["0"], X, Y, P), t),
            rel(apply_curvature(R["4"], X, Y, P), t),
            rel(2 * apply_curvature(R["5"], X, P, Y), t),
        )
        record("grw.chain_XY_P", "4R^0(X,Y)P = R^4(X,Y)P = 2R^5(X,P)Y = T(X,Y)", chain, 0.0)
        nabla_Y_P = pg.nabla_g_P @ Y
        target = -(pi @ Z) * nabla_Y_P
        chain = max(
            rel(4 * apply_curvature(R["0"], P, Y, Z), target),
            rel(apply_curvature(R["4"], P, Y, Z), target),
            rel(2 * apply_curvature(R["5"], P, Z, Y), target),
        )
        record("grw.chain_PY_Z", "4R^0(P,Y)Z = R^4(P,Y)Z = 2R^5(P,Z)Y = -pi(Z) nabla_Y P", chain, 0.0)
        chain = max(
            norm(apply_curvature(R["0"], P, P, X)),
            norm(apply_curvature(R["4"], P, P, X)),
            norm(apply_curvature(R["5"], P, X, P)),
        )
        record("grw.chain_PP", "R^0(P,P)X = R^4(P,P)X = R^5(P,X)P = 0", chain, 0.0)
        for k in ("0", "1", "4", "5"):
            record(f"grw.pi_R{k}", f"pi(R^{k}(X,Y)Z) = 0", pi @ apply_curvature(R[k], X, Y, Z), 0.0)
    return worst


# -- symmetry ---------------------------------------------------------------


def suite_symmetry(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
                   tol: Tolerances = Tolerances()) -> SuiteReport:
    f = entry.flags
    if not (f.is_grw or f.supports_weyl_suite):
        raise NotGrw(f"{entry.name} is neither GRW nor flagged for the Weyl checks")
    report = SuiteReport("symmetry")
    n = entry.dim
    for x in points:
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        g = pg.g
        if f.is_grw:
            Pi = pg.Pi
            ric = pg.Ric["g"]
            R_ric = curvature_action(pg.R["g"], ric)
            Q_g_ric = tachibana(g, ric)
            Q_g_Pi = tachibana(g, Pi)
            Q_ric_Pi = tachibana(ric, Pi)
            lhs = {k: curvature_action(pg.R[k], pg.Ric[k]) for k in ("0", "1", "4", "5")}
            rec.zero("sym.r0ric0_identity", "R^0.Ric^0 expressed through Levi-Civita quantities",
                     rel(lhs["0"], R_ric - Q_g_ric - (n - 1) / 4 * Q_g_Pi + 0.25 * Q_ric_Pi))
            rec.zero("sym.r1ric1_identity", "R^1.Ric^1 = R^g.Ric^g - Q(g,Ric^g)",
                     rel(lhs["1"], R_ric - Q_g_ric))
            rec.zero("sym.r4ric4_identity", "R^4.Ric^4 expressed through Levi-Civita quantities",
                     rel(lhs["4"], R_ric - Q_g_ric - (n - 1) * Q_g_Pi + Q_ric_Pi))
            e = norm(ric - (n - 1) * g)
            rec.equivalent("thm.einstein.r0ric0", "Einstein iff R^0.Ric^0 = 0", e, norm(lhs["0"]))
            rec.equivalent("thm.einstein.r4ric4", "Einstein iff R^4.Ric^4 = 0", e, norm(lhs["4"]))
            rec.equivalent("thm.einstein.r5ric5", "Einstein iff R^5.Ric^5 = R^g.Ric^g", e, norm(lhs["5"] - R_ric))
            rec.equivalent("thm.ricci_semisymmetric", "GRW is Ricci semi-symmetric iff Einstein", e, norm(R_ric))
        if f.is_einstein and f.supports_weyl_suite and n >= 4:
            C = pg.weyl
            Rc = pg.R04["g"]
            RC = curvature_action(pg.R["g"], C)
            CR = curvature_action(raise_curvature(C, pg.g_inv), Rc)
            rhs = tachibana(pg.Ric["g"], Rc) / (n - 1)
            rec.zero("sym.weyl_commutator", "R.C - C.R = Q(Ric,R)/(n-1) on Einstein manifolds",
                     norm(RC - CR - rhs) / (1.0 + norm(RC)), value=norm(C))
            trace = np.einsum("xw,xyzw->yz", pg.g_inv, C)
            rec.zero("sym.weyl_tracefree", "conformal curvature is totally trace-free",
                     norm(trace) / (1.0 + norm(C)))
    return report


def weyl_commutator_parts(pg: PointGeometry) -> dict[str, np.ndarray]:
    """Both sides of the Einstein-manifold commutator relation, for direct inspection."""
    n = pg.n
    C = pg.weyl
    Rc = pg.R04["g"]
    RC = curvature_action(pg.R["g"], C)
    CR = curvature_action(raise_curvature(C, pg.g_inv), Rc)
    return {"C": C, "RC": RC, "CR": CR, "rhs": tachibana(pg.Ric["g"], Rc) / (n - 1)}


# -- fluid ------------------------------------------------------------------


def theta_kind_form(kind: str, r: float, g: np.ndarray, Pi: np.ndarray) -> np.ndarray:
    """Ricci tensor of a perfect fluid of the given kind, rebuilt from its scalar curvature."""
    n = g.shape[0]
    s = r / (n - 1)
    if kind == "0":
        return (s - 0.25) * g + (s - n / 4) * Pi
    if kind == "1":
        return s * (g + Pi)
    if kind == "4":
        return (s - 1) * g + (s - n) * Pi
    if kind == "5":
        return (s - 0.5) * g + (s - n / 2) * Pi
    raise ValueError(f"no fluid form of kind {kind!r}")


def suite_fluid(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
                tol: Tolerances = Tolerances()) -> SuiteReport:
    _require_grw(entry)
    report = SuiteReport("fluid")
    n = entry.dim
    for x in points:
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        g, Pi = pg.g, pg.Pi
        ric, r = pg.Ric["g"], pg.scalar["g"]
        a, b, fit = quasi_einstein_fit(ric, g, pg.pi)
        rec.zero("fluid.fit", "Ricci tensor has the perfect fluid form a g + b pi(x)pi",
                 fit / (1.0 + norm(ric)), value=b)
        if not report.checks[-1].passed:
            continue
        rec.zero("fluid.a_minus_b", "a - b = n - 1", abs(a - b - (n - 1)), value=a - b)
        rec.zero("fluid.reconstruct", "Ricci tensor rebuilt from the scalar curvature",
                 rel(ric, (r / (n - 1) - 1) * g + (r / (n - 1) - n) * Pi))
        R_ric = curvature_action(pg.R["g"], ric)
        rec.zero("fluid.constant_type", "R.Ric = Q(g,Ric)", rel(R_ric, tachibana(g, ric)))
        rec.zero("fluid.rric_qgpi", "R.Ric = (r/(n-1) - n) Q(g,Pi)",
                 rel(R_ric, (r / (n - 1) - n) * tachibana(g, Pi)))
        rec.zero("fluid.r1ric1", "R^1.Ric^1 = 0", norm(curvature_action(pg.R["1"], pg.Ric["1"])))
        for k in ("0", "1", "4", "5"):
            rec.zero(f"fluid.kind{k}", f"perfect fluid form for the {_CURVATURE_NAMES[k]} Ricci tensor",
                     rel(theta_kind_form(k, pg.scalar[k], g, Pi), pg.Ric[k]))
        r0 = pg.scalar["0"]
        rec.zero("fluid.scalar0", "4 r^0 = 4 r^g - (n-1)(4n-1)",
                 abs(4 * r0 - 4 * r + (n - 1) * (4 * n - 1)) / (1.0 + abs(4 * r)))
    return report


# -- relativity -------------------------------------------------------------


def fluid_state(Ric: np.ndarray, g: np.ndarray, pi: np.ndarray, k: float,
                point=(), tol: Tolerances = Tolerances()) -> FluidState:
    """Energy density and pressure of the perfect fluid sourcing ``Ric`` via the field equations."""
    if not k > 0:
        raise NonPositiveK(f"gravitational constant must be positive, got {k}")
    a, b, fit = quasi_einstein_fit(Ric, g, pi)
    # Ric = k(sigma - p)/2 g + k(sigma + p) Pi
    sigma = (a + b / 2) / k
    p = (b / 2 - a) / k
    eos = p / sigma if sigma != 0 else None
    barrier = abs(sigma + p) < tol.zero
    if barrier:
        kind = "phantom barrier"
    elif abs(sigma - p) < tol.zero:
        kind = "stiff matter"
    elif eos is not None and eos < -1:
        kind = "phantom"
    elif eos is not None and eos < -1 / 3:
        kind = "dark energy"
    else:
        kind = "ordinary"
    return FluidState(
        point=tuple(float(v) for v in point),
        a=a, b=b, sigma=sigma, p=p, k=k, eos_ratio=eos, fit_residual=fit,
        sec_violated=bool(sigma + 3 * p < 0 or sigma + p < 0),
        wec=bool(sigma > 0),
        phantom_barrier=bool(barrier),
        classification=kind,
    )


def efe_analysis(entry: CatalogEntry, k: float, points: np.ndarray, seed: int = 0,
                 tol: Tolerances = Tolerances()) -> tuple[list[FluidState], SuiteReport]:
    _require_four(entry)
    _require_grw(entry)
    if not k > 0:
        raise NonPositiveK(f"gravitational constant must be positive, got {k}")
    report = SuiteReport("efe")
    states = []
    n = entry.dim
    for x in points:
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        ric, r = pg.Ric["g"], pg.scalar["g"]
        st = fluid_state(ric, pg.g, pg.pi, k, x, tol)
        states.append(st)
        rec.zero("efe.fit", "Ricci tensor has the perfect fluid form",
                 st.fit_residual / (1.0 + norm(ric)))
        s3p = k * (st.sigma + 3 * st.p)
        rec.zero("efe.sigma_plus_3p", "k(sigma + 3p) = -6", abs(s3p + 6.0), value=s3p)
        rec.nonzero("efe.sec_violated", "strong energy condition is violated",
                    max(0.0, -s3p), value=st.sigma + 3 * st.p)
        rec.zero("efe.scalar", "r = k(sigma - 3p)",
                 abs(r - k * (st.sigma - 3 * st.p)) / (1.0 + abs(r)), value=r)
        rec.equivalent("efe.phantom_barrier", "Einstein case is a phantom barrier sigma + p = 0",
                       norm(ric - (n - 1) * pg.g), abs(st.sigma + st.p))
    return states, report


def suite_efe(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
              tol: Tolerances = Tolerances(), k: float = 1.0) -> SuiteReport:
    return efe_analysis(entry, k, points, seed, tol)[1]


def stress_energy_check(entry: CatalogEntry, k: float, points: np.ndarray, seed: int = 0,
                        tol: Tolerances = Tolerances()) -> SuiteReport:
    """Verdict agreement between pseudo-symmetry of the stress tensor and of Ricci."""
    _require_four(entry)
    _require_grw(entry)
    if not k > 0:
        raise NonPositiveK(f"gravitational constant must be positive, got {k}")
    report = SuiteReport("stress")
    for x in points:
        pg = PointGeometry(entry.instance, x)
        rec = _Recorder(report, x, tol)
        g, ric, r = pg.g, pg.Ric["g"], pg.scalar["g"]
        tau = (ric - r / 2 * g) / k
        Q_tau, Q_ric = tachibana(g, tau), tachibana(g, ric)
        for theta in ("0", "1", "4"):
            R = pg.R[theta]
            for f in (0, 1):
                res_ric = norm(curvature_action(R, ric) - f * Q_ric)
                res_tau = norm(curvature_action(R, tau) - f * Q_tau)
                rec.equivalent(f"stress.R{theta}.f{f}",
                               "R^theta.tau = f Q(g,tau) iff R^theta.Ric = f Q(g,Ric)",
                               res_ric, res_tau)
    return report


def suite_stress(entry: CatalogEntry, points: np.ndarray, seed: int = 0,
                 tol: Tolerances = Tolerances(), k: float = 1.0) -> SuiteReport:
    return stress_energy_check(entry, k, points, seed, tol)


# -- dispatch ---------------------------------------------------------------


def applicable(entry: CatalogEntry, suite: str) -> str | None:
    """``None`` if the suite runs on ``entry``, otherwise the reason it is skipped."""
    f = entry.flags
    if suite == "general":
        return None if f.supports_general_suite else "pi is not concircular on this entry"
    if suite in ("grw", "fluid"):
        return None if f.is_grw else "not a GRW entry"
    if suite == "symmetry":
        return None if (f.is_grw or f.supports_weyl_suite) else "neither GRW nor an Einstein Weyl entry"
    if suite in ("efe", "stress"):
        if not f.is_grw:
            return "not a GRW entry"
        return None if entry.dim == 4 else "field equations need dimension 4"
    raise ValueError(f"unknown suite {suite!r}")


def run_suites(entry: CatalogEntry, suites: Sequence[str], points: np.ndarray, seed: int,
               tol: Tolerances = Tolerances(), k: float = 1.0) -> list[SuiteReport]:
    if not k > 0:
        raise NonPositiveK(f"gravitational constant must be positive, got {k}")
    runners = {
        "general": suite_general,
        "grw": suite_grw,
        "symmetry": suite_symmetry,
        "fluid": suite_fluid,
    }
    out = []
    for name in suites:
        reason = applicable(entry, name)
        if reason is not None:
            out.append(SuiteReport(name, "skipped", [], reason))
        elif name == "efe":
            out.append(suite_efe(entry, points, seed, tol, k))
        elif name == "stress":
            out.append(suite_stress(entry, points, seed, tol, k))
        else:
            out.append(runners[name](entry, points, seed, tol))
    return out
