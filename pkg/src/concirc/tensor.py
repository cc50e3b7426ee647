"""Pointwise multilinear algebra on dense component arrays.

Layout conventions used across the package:

* a (1,3) curvature array ``R[k, l, i, j]`` is the k-th component of
  ``R(d_i, d_j) d_l``;
* the matching (0,4) array is ``Rc[i, j, l, w] = g(R(d_i, d_j) d_l, d_w)``;
* Ricci is the trace over the first argument, ``Ric[j, l] = R[k, l, k, j]``;
* the action of an endomorphism-valued 2-form on a (0,k) tensor appends the
  two form slots after the k original ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SlotTypeMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Tensor:
    """Components plus the variance of each slot (``"u"`` up, ``"d"`` down)."""

    components: np.ndarray
    slots: str

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", comp)
        if set(self.slots) - {"u", "d"}:
            raise ValueError(f"slot codes must be 'u' or 'd', got {self.slots!r}")
        if comp.ndim != len(self.slots):
            raise ShapeMismatch(f"{comp.ndim} axes for {len(self.slots)} slots")
        if comp.ndim and len(set(comp.shape)) != 1:
            raise ShapeMismatch(f"non-square component array {comp.shape}")
        if not np.all(np.isfinite(comp)):
            raise ValueError("tensor components must be finite")

    @property
    def dim(self) -> int:
        return self.components.shape[0] if self.components.ndim else 0

    @property
    def valence(self) -> tuple[int, int]:
        return self.slots.count("u"), self.slots.count("d")


@dataclass(frozen=True, eq=False)
class MetricAtPoint:
    g: np.ndarray
    g_inv: np.ndarray
    signature: tuple[int, ...]

    @classmethod
    def from_matrix(cls, g) -> "MetricAtPoint":
        g = np.asarray(g, dtype=float)
        if np.max(np.abs(g - g.T)) > 1e-15 * max(1.0, np.max(np.abs(g))):
            raise ValueError("metric is not symmetric")
        g_inv = np.linalg.inv(g)
        eig = np.linalg.eigvalsh(0.5 * (g + g.T))
        return cls(g, g_inv, tuple(int(s) for s in np.sign(eig)))


def contract(t: Tensor, upper_slot: int, lower_slot: int) -> Tensor:
    if t.slots[upper_slot] != "u" or t.slots[lower_slot] != "d":
        raise SlotTypeMismatch(
            f"slot {upper_slot} is {t.slots[upper_slot]!r}, slot {lower_slot} is {t.slots[lower_slot]!r}"
        )
    comp = np.trace(t.components, axis1=upper_slot, axis2=lower_slot)
    keep = [s for k, s in enumerate(t.slots) if k not in (upper_slot, lower_slot)]
    return Tensor(comp, "".join(keep))


def raise_lower(t: Tensor, slot: int, m: MetricAtPoint, direction: str) -> Tensor:
    if direction == "raise":
        need, mat, new = "d", m.g_inv, "u"
    elif direction == "lower":
        need, mat, new = "u", m.g, "d"
    else:
        raise ValueError(f"direction must be 'raise' or 'lower', got {direction!r}")
    if t.slots[slot] != need:
        raise SlotTypeMismatch(f"cannot {direction} slot {slot} of variance {t.slots[slot]!r}")
    comp = np.moveaxis(np.tensordot(mat, t.components, axes=([1], [slot])), 0, slot)
    return Tensor(comp, t.slots[:slot] + new + t.slots[slot + 1 :])


def wedge_endomorphism(A: np.ndarray, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """The endomorphism ``Z -> A(Y, Z) X - A(X, Z) Y`` as a (1,1) array ``E[m, z]``."""
    A, X, Y = (np.asarray(v, dtype=float) for v in (A, X, Y))
    n = A.shape[0]
    if A.shape != (n, n) or X.shape != (n,) or Y.shape != (n,):
        raise ShapeMismatch(f"shapes {A.shape}, {X.shape}, {Y.shape}")
    return np.outer(X, Y @ A) - np.outer(Y, X @ A)


def wedge_operator(A: np.ndarray) -> np.ndarray:
    """All coordinate wedges at once: ``W[m, z, a, b] = ((d_a ^_A d_b) d_z)^m``."""
    n = A.shape[0]
    eye = np.eye(n)
    return np.einsum("ma,bz->mzab", eye, A) - np.einsum("mb,az->mzab", eye, A)


def _act(op: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``-(sum over slots) B(.., op(X, Y) X_s, ..)`` with op laid out [m, s, a, b]."""
    B = np.asarray(B, dtype=float)
    k = B.ndim
    if k < 1:
        raise ShapeMismatch("B must have at least one slot")
    n = op.shape[0]
    if op.shape != (n, n, n, n) or any(d != n for d in B.shape):
        raise ShapeMismatch(f"operator {op.shape} incompatible with B {B.shape}")
    out = np.zeros(B.shape + (n, n))
    for s in range(k):
        # contract slot s of B with the output index m of the operator
        term = np.tensordot(B, op, axes=([s], [0]))  # B-slots-without-s, s', a, b
        term = np.moveaxis(term, k - 1, s)
        out -= term
    return out


def curvature_action(R: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``(R . B)(X_1..X_k; X, Y) = -sum_s B(.., R(X, Y) X_s, ..)``.

    ``R`` is a (1,3) array in the package layout; the result is (0, k+2).
    """
    return _act(np.asarray(R, dtype=float), B)


def tachibana(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``Q(A, B)(X_1..X_k; X, Y) = -sum_s B(.., (X ^_A Y) X_s, ..)``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"A must be square, got {A.shape}")
    return _act(wedge_operator(A), B)


def lower_curvature(R: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(1,3) -> (0,4): ``Rc[i, j, l, w] = g_wk R[k, l, i, j]``."""
    return np.einsum("wk,klij->ijlw", g, R)


def raise_curvature(Rc: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Inverse of :func:`lower_curvature`."""
    return np.einsum("kw,ijlw->klij", g_inv, Rc)


def ricci(R: np.ndarray) -> np.ndarray:
    return np.einsum("klkj->jl", R)


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """``(h o k)(x,y,z,w) = h(x,w)k(y,z) + h(y,z)k(x,w) - h(x,z)k(y,w) - h(y,w)k(x,z)``.

    With this sign, a space of constant curvature K has ``Rc = (K/2) g o g``.
    """
    return (
        np.einsum("xw,yz->xyzw", h, k)
        + np.einsum("yz,xw->xyzw", h, k)
        - np.einsum("xz,yw->xyzw", h, k)
        - np.einsum("yw,xz->xyzw", h, k)
    )


def apply_curvature(R: np.ndarray, X, Y, Z) -> np.ndarray:
    """The vector ``R(X, Y) Z``."""
    return np.einsum("klij,i,j,l->k", R, X, Y, Z)


def norm(t) -> float:
    return float(np.sqrt(np.sum(np.square(t))))
