"""Exact derivatives of a Lagrangian via nested dual-number jets.

``derive_all`` produces every first and second derivative of
L(q, q̇, t) that the equations of motion and the variational system
consume.  Total time derivatives of the second-derivative blocks
(needed for the damping and stiffness matrices) come from a third,
directional level: the same jet evaluated over an inner ring seeded
with (q̇, q̈, 1), so d/dt = ∂_t + q̇·∂_q + q̈·∂_q̇ falls out of one pass.
No finite differences anywhere; those live in the test oracles.

Quantities carrying inner tangents are stored as arrays with a trailing
axis of length K = k + 1: index 0 is the value, index 1 + c the c-th
directional derivative.  ``d1_mul`` / ``d1_matvec`` / ``d1_solve``
implement the first-order ring algebra on that layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateLagrangianError, NonFiniteError
from .state import PhaseState

__all__ = [
    "LagrangianDerivs",
    "derive_all",
    "derive_all_with_rates",
    "time_derivative_of_blocks",
    "lagrangian_jet",
    "JetBlocks",
    "grad_of",
    "jac_of",
    "d1_mul",
    "d1_matvec",
    "d1_solve",
    "mass_matrix_guard",
]


@dataclass(frozen=True)
class LagrangianDerivs:
    """All partial derivatives of L at one phase-space point.

    ``d2L_qdq[a, b]`` is ∂²L/∂q̇_a∂q_b (row on velocity, column on
    coordinate); ``d2L_qdt`` is ∂²L/∂q̇_a∂t, zero for autonomous systems.
    """

    L: float
    dLdq: np.ndarray
    dLdqd: np.ndarray
    dLdt: float
    d2L_qdqd: np.ndarray
    d2L_qdq: np.ndarray
    d2L_qq: np.ndarray
    d2L_qdt: np.ndarray


@dataclass(frozen=True)
class JetBlocks:
    """Derivative blocks with a trailing inner-ring axis of length K."""

    n: int
    k: int
    L: np.ndarray          # (K,)
    dq: np.ndarray         # (N, K)
    dqd: np.ndarray        # (N, K)
    dt: np.ndarray         # (K,)
    qq: np.ndarray         # (N, N, K)
    qdq: np.ndarray        # (N, N, K), row on velocity, column on coordinate
    qdqd: np.ndarray       # (N, N, K)
    qdt: np.ndarray        # (N, K)


def lagrangian_jet(model, q, qd, t, inner_q=None, inner_qd=None, inner_t=None) -> JetBlocks:
    """Evaluate L in a jet with outer seeds on (q, q̇, t) and optional inner
    tangent rows, and split the result into named derivative blocks."""
    n = model.n
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    if inner_q is not None:
        inner_q = np.asarray(inner_q, dtype=float)
        k = inner_q.shape[1]
    else:
        k = 0
    if inner_qd is not None:
        inner_qd = np.asarray(inner_qd, dtype=float)
    if inner_t is not None:
        inner_t = np.asarray(inner_t, dtype=float)

    m = 2 * n + 1
    be = _kernels.backend()
    qs = [
        be.seeded(q[a], m, k, outer=a, inner=None if inner_q is None else inner_q[a])
        for a in range(n)
    ]
    qds = [
        be.seeded(qd[a], m, k, outer=n + a, inner=None if inner_qd is None else inner_qd[a])
        for a in range(n)
    ]
    ts = be.seeded(t, m, k, outer=2 * n, inner=inner_t)

    L = model.lagrangian(qs, qds, ts)
    if not _kernels.is_dual(L):
        L = be.constant(float(L), m, k)
    val, g, h = L.coeffs()

    blocks = JetBlocks(
        n=n,
        k=k,
        L=val,
        dq=g[:n],
        dqd=g[n : 2 * n],
        dt=g[2 * n],
        qq=h[:n, :n],
        qdq=h[n : 2 * n, :n],
        qdqd=h[n : 2 * n, n : 2 * n],
        qdt=h[n : 2 * n, 2 * n],
    )
    for arr in (blocks.L, blocks.dq, blocks.dqd, blocks.dt, blocks.qq, blocks.qdq, blocks.qdqd):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(
                f"non-finite Lagrangian derivative at q={q}, qd={qd}, t={t}"
            )
    return blocks


def _derivs_from_blocks(b: JetBlocks) -> LagrangianDerivs:
    return LagrangianDerivs(
        L=float(b.L[0]),
        dLdq=b.dq[:, 0].copy(),
        dLdqd=b.dqd[:, 0].copy(),
        dLdt=float(b.dt[0]),
        d2L_qdqd=b.qdqd[:, :, 0].copy(),
        d2L_qdq=b.qdq[:, :, 0].copy(),
        d2L_qq=b.qq[:, :, 0].copy(),
        d2L_qdt=b.qdt[:, 0].copy(),
    )


def derive_all(model, s: PhaseState) -> LagrangianDerivs:
    """First and second derivatives of L at ``s``, exact to rounding."""
    return _derivs_from_blocks(lagrangian_jet(model, s.q, s.qd, s.t))


def derive_all_with_rates(model, s: PhaseState, qdd):
    """Derivatives plus the total time derivatives (along the trajectory
    through ``s`` with acceleration ``qdd``) of the velocity-Hessian block M
    and of the mixed block A = ∂²L/∂q̇∂q.  One nested jet evaluation."""
    n = model.n
    qdd = np.asarray(qdd, dtype=float)
    b = lagrangian_jet(
        model,
        s.q,
        s.qd,
        s.t,
        inner_q=s.qd.reshape(n, 1),
        inner_qd=qdd.reshape(n, 1),
        inner_t=np.ones(1),
    )
    derivs = _derivs_from_blocks(b)
    dM_dt = b.qdqd[:, :, 1].copy()
    dA_dt = b.qdq[:, :, 1].copy()
    return derivs, dM_dt, dA_dt


def time_derivative_of_blocks(model, s: PhaseState, qdd):
    """(dM/dt, dA/dt) along the trajectory through ``s``."""
    _, dM_dt, dA_dt = derive_all_with_rates(model, s, qdd)
    return dM_dt, dA_dt


# -- first-order ring algebra (value + k tangents on a trailing axis) -------


def d1_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = a[..., :1] * b
    if out.shape[-1] > 1:
        out[..., 1:] += b[..., :1] * a[..., 1:]
    return out


def d1_matvec(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """(N, N, K) @ (N, K) -> (N, K) with the ring product entrywise."""
    return d1_mul(mat, vec[np.newaxis, :, :]).sum(axis=1)


def d1_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve mat @ x = rhs over the ring: the value part is a plain solve,
    the tangent parts follow from first-order perturbation of the inverse."""
    m0 = mat[..., 0]
    x0 = np.linalg.solve(m0, rhs[..., 0])
    out = np.empty_like(rhs)
    out[..., 0] = x0
    if rhs.shape[-1] > 1:
        forced = rhs[..., 1:] - np.einsum("abk,b->ak", mat[..., 1:], x0)
        out[..., 1:] = np.linalg.solve(m0, forced)
    return out


def mass_matrix_guard(m0: np.ndarray, where: str = "") -> None:
    """Raise DegenerateLagrangianError when the velocity Hessian is singular
    (|det M| below 1e-12 · max|M_ab|^N)."""
    scale = float(np.max(np.abs(m0)))
    n = m0.shape[0]
    if scale == 0.0:
        raise DegenerateLagrangianError(
            f"velocity Hessian of L is identically zero{where}"
        )
    det = float(np.linalg.det(m0))
    if abs(det) < 1e-12 * scale**n:
        raise DegenerateLagrangianError(
            f"velocity Hessian of L is singular (|det|={abs(det):.3e}){where}"
        )


# -- generic first-order differentiation of scalar/vector callables ---------


def grad_of(fn, x):
    """(value, gradient) of a generic-scalar function of a float vector."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    be = _kernels.backend()
    eye = np.eye(n)
    xs = [be.seeded(x[i], 0, n, inner=eye[i]) for i in range(n)]
    r = fn(xs)
    if not _kernels.is_dual(r):
        return float(r), np.zeros(n)
    return r.value, r.coeffs()[0][1:].copy()


def jac_of(fn, x):
    """(values, Jacobian) of a generic vector function of a float vector."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    be = _kernels.backend()
    eye = np.eye(n)
    xs = [be.seeded(x[i], 0, n, inner=eye[i]) for i in range(n)]
    rs = fn(xs)
    vals = np.empty(len(rs))
    jac = np.zeros((len(rs), n))
    for i, r in enumerate(rs):
        if _kernels.is_dual(r):
            coeff = r.coeffs()[0]
            vals[i] = coeff[0]
            jac[i] = coeff[1:]
        else:
            vals[i] = float(r)
    return vals, jac
