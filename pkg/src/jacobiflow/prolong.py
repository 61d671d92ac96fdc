"""The prolonged Lagrangian and everything derived from it.

Given L(q, q̇, t), the prolonged Lagrangian on the displaced configuration
space is

    γ(q, ε, q̇, ε̇, t) = (∂L/∂q̇_a) ε̇_a + (∂L/∂q_a) ε_a ,

linear in the virtual displacement ε and its velocity.  Its Euler-Lagrange
equations reproduce the equations of motion of L together with the linear
variational (Jacobi) system

    M ε̈ + C ε̇ + K ε = 0,
    M_ab = ∂²L/∂q̇_a∂q̇_b,
    C_ab = dM_ab/dt + ∂²L/∂q̇_a∂q_b − ∂²L/∂q̇_b∂q_a,
    K_ab = d(∂²L/∂q̇_a∂q_b)/dt − ∂²L/∂q_a∂q_b.

This module provides two independent linearization routes and treats their
agreement as a first-class, checkable claim rather than a test shim:

* ``assemble_mck`` / ``variational_rhs`` build the M/C/K system from second
  derivatives of L (with total time derivatives from directional third-order
  jets);
* ``tangent_rhs`` differentiates the first-order flow ẋ = f(x) itself with
  dual numbers, never touching M/C/K.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from . import _kernels, exprdsl
from .autodiff import (
    d1_matvec,
    d1_solve,
    derive_all,
    derive_all_with_rates,
    jac_of,
    lagrangian_jet,
    mass_matrix_guard,
)
from .errors import NonFiniteError, NonSymmetricJacobianError
from .state import DAlembertState, PhaseState

__all__ = [
    "LinearizationMatrices",
    "AdjointState",
    "gamma_eval",
    "gamma_value",
    "gamma_partials",
    "gamma_partials_dual",
    "assemble_mck",
    "variational_rhs",
    "tangent_rhs",
    "adjoint_rhs",
    "flow_with_jacobian",
    "first_prolongation_check",
    "ProlongationCheckReport",
]


@dataclass(frozen=True)
class LinearizationMatrices:
    """The variational-system triplet evaluated at one phase-space point."""

    M: np.ndarray
    C: np.ndarray
    K: np.ndarray
    evaluated_at: PhaseState


@dataclass(frozen=True)
class AdjointState:
    """First-order state x = (q, q̇) paired with a covector p."""

    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        if self.x.shape != self.p.shape or self.x.ndim != 1 or self.x.shape[0] % 2:
            raise ValueError("x and p must be 1-d vectors of equal even length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.p))):
            raise ValueError("non-finite adjoint state")


def gamma_value(model, q, eps, qd, epsd, t=0.0):
    """γ at (q, ε, q̇, ε̇, t).  q and q̇ are float vectors; ε and ε̇ may hold
    generic scalars (e.g. jet seeds), so the displacement dependence of γ can
    be differentiated directly.  Models may override via ``gamma_fn`` (used
    by the verification suite's corrupted-model fixtures)."""
    gamma_fn = getattr(model, "gamma_fn", None)
    if gamma_fn is not None:
        return gamma_fn(q, eps, qd, epsd, t)
    d = derive_all(model, PhaseState(q, qd, t))
    total = d.dLdqd[0] * epsd[0] + d.dLdq[0] * eps[0]
    for a in range(1, model.n):
        total = total + d.dLdqd[a] * epsd[a] + d.dLdq[a] * eps[a]
    return total


def gamma_eval(model, d: DAlembertState) -> float:
    """γ evaluated at a displaced state."""
    return float(gamma_value(model, d.q, d.eps, d.qd, d.epsd, d.t))


def gamma_partials(model, d: DAlembertState):
    """(∂γ/∂ε, ∂γ/∂ε̇, ∂γ/∂q, ∂γ/∂q̇).

    The displacement gradients reduce to the coordinate gradients of L;
    the base-point gradients contract second derivatives of L with (ε, ε̇).
    """
    dv = derive_all(model, d.phase())
    dgde = dv.dLdq.copy()
    dgded = dv.dLdqd.copy()
    dgdq = dv.d2L_qdq.T @ d.epsd + dv.d2L_qq @ d.eps
    dgdqd = dv.d2L_qdqd @ d.epsd + dv.d2L_qdq @ d.eps
    return dgde, dgded, dgdq, dgdqd


def gamma_partials_dual(model, d: DAlembertState):
    """(γ, ∂γ/∂ε, ∂γ/∂ε̇) by seeding dual directions on the displacement
    arguments of ``gamma_value`` — an independent route from
    ``gamma_partials``, used to cross-check the reduction identity."""
    n = d.n
    be = _kernels.backend()
    eye = np.eye(2 * n)
    eps_s = [be.seeded(d.eps[a], 0, 2 * n, inner=eye[a]) for a in range(n)]
    epsd_s = [be.seeded(d.epsd[a], 0, 2 * n, inner=eye[n + a]) for a in range(n)]
    g = gamma_value(model, d.q, eps_s, d.qd, epsd_s, d.t)
    if not _kernels.is_dual(g):
        return float(g), np.zeros(n), np.zeros(n)
    coeff = g.coeffs()[0]
    return float(coeff[0]), coeff[1 : 1 + n].copy(), coeff[1 + n :].copy()


def assemble_mck(model, s: PhaseState, qdd) -> LinearizationMatrices:
    """Build M, C, K at ``s``; ``qdd`` must be the acceleration of the
    underlying motion there (it enters the total time derivatives)."""
    derivs, dM_dt, dA_dt = derive_all_with_rates(model, s, qdd)
    m = derivs.d2L_qdqd
    c = dM_dt + derivs.d2L_qdq - derivs.d2L_qdq.T
    k = dA_dt - derivs.d2L_qq
    for name, arr in (("M", m), ("C", c), ("K", k)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError(f"non-finite entries in {name} at t={s.t}")
    return LinearizationMatrices(M=m, C=c, K=k, evaluated_at=s)


def variational_rhs(model, d: DAlembertState, mats: LinearizationMatrices):
    """ε̈ = −M⁻¹(C ε̇ + K ε)."""
    mass_matrix_guard(mats.M)
    return -np.linalg.solve(mats.M, mats.C @ d.epsd + mats.K @ d.eps)


def flow_with_jacobian(model, x, t: float = 0.0):
    """f(x) and Df(x) for the first-order flow ẋ = (q̇, q̈(q, q̇, t)).

    Df is obtained by evaluating the whole acceleration pipeline over an
    inner dual ring seeded on (q, q̇) — independent of the M/C/K route.
    """
    x = np.asarray(x, dtype=float)
    n = model.n
    q, qd = x[:n], x[n:]
    k = 2 * n
    eye = np.eye(k)
    b = lagrangian_jet(
        model, q, qd, t, inner_q=eye[:n], inner_qd=eye[n:], inner_t=np.zeros(k)
    )
    mass_matrix_guard(b.qdqd[:, :, 0])
    qd_d1 = np.zeros((n, k + 1))
    qd_d1[:, 0] = qd
    for a in range(n):
        qd_d1[a, 1 + n + a] = 1.0
    forced = b.dq - d1_matvec(b.qdq, qd_d1) - b.qdt
    qdd_d1 = d1_solve(b.qdqd, forced)
    f = np.concatenate([qd_d1, qdd_d1], axis=0)
    if not np.all(np.isfinite(f)):
        raise NonFiniteError(f"non-finite flow Jacobian at x={x}, t={t}")
    return f[:, 0].copy(), f[:, 1:].copy()


def tangent_rhs(model, x, xi, t: float = 0.0):
    """Variational vector field: ẋ = f(x), ξ̇ = Df(x) ξ."""
    xi = np.asarray(xi, dtype=float)
    f, df = flow_with_jacobian(model, x, t)
    return f, df @ xi


def adjoint_rhs(model, a: AdjointState, t: float = 0.0):
    """Adjoint variational vector field: ẋ = f(x), ṗ = −p Df(x); this is
    Hamilton's equations for H(x, p) = p·f(x)."""
    f, df = flow_with_jacobian(model, a.x, t)
    return f, -(a.p @ df)


# -- first prolongation of a first-order system ------------------------------


@dataclass(frozen=True)
class ProlongationCheckReport:
    """Per-sample Euler-Lagrange residuals of the prolongation Lagrangian
    ½|v|² + ½|f(x)|² against the target acceleration Df(x)·f(x)."""

    residuals: np.ndarray
    max_residual: float
    tolerance: float
    passed: bool
    max_asymmetry: float


def first_prolongation_check(
    field_exprs,
    domain_samples,
    params=None,
    tolerance: float = 1e-10,
    sym_tol: float = 1e-8,
) -> ProlongationCheckReport:
    """Check that ẍ = Df(x)·f(x) is the Euler-Lagrange flow of
    L(x, v) = ½|v|² + ½|f(x)|².

    ``field_exprs`` define f component-wise over symbols q1..qn (expression
    strings or parsed trees).  Df must be symmetric at every sample; a
    violation raises NonSymmetricJacobianError with the worst offender.

    The two sides are computed by different routes: the target through
    first-order duals of f, the Euler-Lagrange side through second-order
    jets of the composite Lagrangian.
    """
    params = dict(params or {})
    n = len(field_exprs)
    asts = [
        exprdsl.parse(e, n, params) if isinstance(e, str) else e for e in field_exprs
    ]
    allowed = {f"q{i}" for i in range(1, n + 1)} | set(params)
    for i, ast in enumerate(asts):
        extra = exprdsl.free_symbols(ast) - allowed
        if extra:
            raise ValueError(
                f"field component {i + 1} uses symbols {sorted(extra)}; only "
                f"coordinates q1..q{n} and declared parameters are allowed"
            )

    def field_at(xs):
        zeros = [0.0] * n
        bind = exprdsl.Bindings(q=xs, qd=zeros, t=0.0, params=params)
        return [exprdsl.evaluate(ast, bind) for ast in asts]

    def lagrangian(qs, qds, ts):
        total = 0.5 * (qds[0] * qds[0])
        for a in range(1, n):
            total = total + 0.5 * (qds[a] * qds[a])
        for fa in field_at(qs):
            total = total + 0.5 * (fa * fa)
        return total

    model = SimpleNamespace(n=n, lagrangian=lagrangian)

    residuals = np.empty(len(domain_samples))
    worst_asym = 0.0
    for idx, x in enumerate(domain_samples):
        x = np.asarray(x, dtype=float)
        fvals, jac = jac_of(field_at, x)
        asym = np.abs(jac - jac.T)
        a_max = float(asym.max()) if n > 1 else 0.0
        worst_asym = max(worst_asym, a_max)
        if a_max > sym_tol * (1.0 + float(np.abs(jac).max())):
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise NonSymmetricJacobianError(
                f"field Jacobian is not symmetric at sample {idx} "
                f"(entry ({i + 1},{j + 1}), asymmetry {a_max:.3e})",
                max_asymmetry=a_max,
                location=(idx, (int(i) + 1, int(j) + 1)),
            )
        target = jac @ fvals

        dv = derive_all(model, PhaseState(x, fvals))
        mass_matrix_guard(dv.d2L_qdqd)
        accel = np.linalg.solve(
            dv.d2L_qdqd, dv.dLdq - dv.d2L_qdq @ fvals - dv.d2L_qdt
        )
        residuals[idx] = float(np.max(np.abs(accel - target)))

    max_res = float(residuals.max()) if len(residuals) else 0.0
    return ProlongationCheckReport(
        residuals=residuals,
        max_residual=max_res,
        tolerance=tolerance,
        passed=max_res <= tolerance,
        max_asymmetry=worst_asym,
    )
