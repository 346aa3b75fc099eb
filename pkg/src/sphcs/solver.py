"""l1 recovery: basis pursuit and quadratically constrained basis pursuit.

Solves::

    minimise ||z||_1  subject to  ||y - A z||_2 <= r

over complex z, where ||z||_1 sums complex moduli. Two primal-dual splittings
are provided. When A has orthonormal rows (a row subset of a unitary matrix)
the constraint set has a closed-form projection and ADMM on the split
``z = x, x in C`` is used. Otherwise a Chambolle-Pock iteration handles the
constraint through its dual, and a final least-squares polish moves the
iterate onto the constraint set.

Both solvers normalise the data by ``||A* y||_inf`` before iterating and undo
the scaling at the end, so solving with (c y, c r) returns c times the
solution for any c > 0.
"""
from dataclasses import dataclass, field
import csv
import time

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsqr

__all__ = ["SolverConfig", "SolverResult", "soft_threshold", "project_ball", "solve_qcbp", "MatrixOperator"]

CONVERGED = "converged"
MAX_ITERATIONS = "max-iterations"
INFEASIBLE = "infeasible-radius"


@dataclass
class SolverConfig:
    radius: float = 0.0
    max_iters: int = 5000
    tol_primal: float = 1e-9
    tol_dual: float = 1e-9
    tol_objective: float = 0.0
    admm_rho: float = 1000.0
    pd_ratio: float = 1.0
    method: str = "auto"   # "auto" or "pdhg"
    feasibility_slack: float = 1e-6
    trace: object = None   # path, file-like or callable(iter, objective, residual)
    trace_every: int = 1

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")

    @classmethod
    def from_mapping(cls, cfg):
        """Build from config keys ``radius, max_iters, tol_primal, tol_dual``."""
        known = {k: cfg[k] for k in cls.__dataclass_fields__ if k in cfg}
        if "max_iters" in known:
            known["max_iters"] = int(known["max_iters"])
        return cls(**known)

    @classmethod
    def noiseless(cls, **kw):
        return cls(radius=0.0, tol_primal=1e-9, tol_dual=1e-9, **kw)

    @classmethod
    def noisy(cls, radius, **kw):
        return cls(radius=radius, tol_primal=1e-6, tol_dual=1e-6, **kw)


@dataclass
class SolverResult:
    x: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    status: str
    objective: float
    residual_norm: float
    runtime: float = 0.0
    history: list = field(default_factory=list)

    @property
    def converged(self):
        return self.status == CONVERGED


class MatrixOperator:
    """Adapter giving a dense matrix the forward/adjoint interface."""

    def __init__(self, matrix):
        self.A = np.asarray(matrix)
        self.shape = self.A.shape
        self.tight = False

    def forward(self, x):
        return self.A @ x

    def adjoint(self, y):
        return self.A.conj().T @ y

    def norm_estimate(self, iters=20, seed=0):
        return float(np.linalg.norm(self.A, 2))


def soft_threshold(v, t):
    """Complex soft thresholding: shrink moduli by t, keep phases."""
    mag = np.abs(v)
    scale = np.maximum(mag - t, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(mag > t, v * (scale / np.where(mag > 0, mag, 1.0)), 0.0)


def project_ball(v, center, r):
    d = v - center
    nd = np.linalg.norm(d)
    if nd <= r:
        return v
    return center + d * (r / nd)


class _Tracer:
    def __init__(self, target, every):
        self.every = max(1, int(every))
        self._fh = self._close = self._writer = self._fn = None
        if target is None:
            return
        if callable(target) and not hasattr(target, "write"):
            self._fn = target
            return
        if hasattr(target, "write"):
            self._fh = target
        else:
            self._fh = self._close = open(target, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(["iter", "objective", "residual"])

    @property
    def active(self):
        return self._fn is not None or self._writer is not None

    def __call__(self, it, obj, res):
        if it % self.every:
            return
        if self._fn is not None:
            self._fn(it, obj, res)
        elif self._writer is not None:
            self._writer.writerow([it, repr(float(obj)), repr(float(res))])

    def close(self):
        if self._close is not None:
            self._close.close()


def _admm(op, y, r, cfg, tracer, support=None):
    # x carries the constraint, z the l1 term (restricted to ``support``),
    # u the scaled dual
    def proj(v):
        res = op.forward(v) - y
        nr = np.linalg.norm(res)
        if nr <= r:
            return v
        return v - op.adjoint(res) * (1.0 - r / nr)

    def prox(v, t):
        out = soft_threshold(v, t)
        if support is not None:
            out[~support] = 0
        return out

    rho = cfg.admm_rho
    x = proj(op.adjoint(y))
    z = x.copy()
    u = np.zeros_like(x)
    history = []
    status, it, rp, rd = MAX_ITERATIONS, 0, np.inf, np.inf
    for it in range(1, cfg.max_iters + 1):
        z_old = z
        z = prox(x - u, 1.0 / rho)
        x = proj(z + u)
        u = u + z - x
        scale = max(np.linalg.norm(x), np.linalg.norm(z), 1e-300)
        rp = np.linalg.norm(z - x) / scale
        rd = np.linalg.norm(z - z_old) / scale
        obj = np.abs(x).sum()
        history.append(obj)
        if tracer.active:
            tracer(it, obj, np.linalg.norm(op.forward(x) - y))
        if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
            status = CONVERGED
            break
        # residual balancing keeps the penalty matched to the problem scale
        if it % 10 == 0:
            if rp > 10 * rd:
                rho *= 2.0
                u *= 0.5
            elif rd > 10 * rp:
                rho *= 0.5
                u *= 2.0
    return x, it, rp, rd, status, history


def _pdhg(op, y, r, cfg, tracer):
    L = op.norm_estimate(iters=20) if not getattr(op, "tight", False) else 1.0
    L = max(L, 1e-12) * 1.01
    tau = cfg.pd_ratio / L
    sigma = 1.0 / (cfg.pd_ratio * L)
    x = op.adjoint(y)
    xbar = x.copy()
    u = np.zeros_like(y)
    history = []
    status, it, rp, rd = MAX_ITERATIONS, 0, np.inf, np.inf
    for it in range(1, cfg.max_iters + 1):
        v = u + sigma * op.forward(xbar)
        u_new = v - sigma * project_ball(v / sigma, y, r)
        x_new = soft_threshold(x - tau * op.adjoint(u_new), tau)
        dx, du = x_new - x, u_new - u
        # primal / dual residuals of the saddle-point optimality system
        p = np.linalg.norm(dx / tau - op.adjoint(du))
        d = np.linalg.norm(du / sigma - op.forward(dx))
        xbar = 2 * x_new - x
        x, u = x_new, u_new
        scale_p = max(np.linalg.norm(op.adjoint(u)), 1.0)
        scale_d = max(np.linalg.norm(y), 1.0)
        rp, rd = p / scale_p, d / scale_d
        obj = np.abs(x).sum()
        history.append(obj)
        if tracer.active:
            tracer(it, obj, np.linalg.norm(op.forward(x) - y))
        if rp <= cfg.tol_primal and rd <= cfg.tol_dual:
            status = CONVERGED
            break
    return x, it, rp, rd, status, history


def _polish(op, x, y, r):
    """Move x the shortest least-squares step needed to reach the constraint set."""
    res = op.forward(x) - y
    nr = np.linalg.norm(res)
    if nr <= r:
        return x
    m, n = op.shape
    lin = LinearOperator((m, n), matvec=op.forward, rmatvec=op.adjoint, dtype=complex)
    delta = lsqr(lin, -res, atol=1e-14, btol=1e-14, iter_lim=500)[0]
    # ||res + t A delta||^2 = r^2, smallest t in [0, 1]
    ad = op.forward(delta)
    qa = np.vdot(ad, ad).real
    qb = 2 * np.vdot(res, ad).real
    qc = nr**2 - r**2
    if qa <= 0:
        return x
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return x + delta
    t = (-qb - np.sqrt(disc)) / (2 * qa)
    return x + min(max(t, 0.0), 1.0) * delta


def solve_qcbp(op, y, config=None):
    """Minimise ||z||_1 subject to ||y - op(z)||_2 <= config.radius.

    ``op`` needs ``forward``, ``adjoint`` and ``shape``; an ``op.tight`` flag
    selects the closed-form-projection ADMM path. ``radius = 0`` gives basis
    pursuit.
    """
    cfg = config or SolverConfig()
    t0 = time.perf_counter()
    y = np.asarray(y, dtype=complex)
    n = op.shape[1]
    tracer = _Tracer(cfg.trace, cfg.trace_every)
    try:
        scale = float(np.max(np.abs(op.adjoint(y)))) if y.size else 0.0
        if scale == 0.0 or np.linalg.norm(y) <= cfg.radius:
            x = np.zeros(n, dtype=complex)
            res = float(np.linalg.norm(y))
            return SolverResult(x, 0, 0.0, 0.0, CONVERGED, 0.0, res, time.perf_counter() - t0)
        ys, rs = y / scale, cfg.radius / scale
        if getattr(op, "tight", False):
            x, it, rp, rd, status, hist = _admm(op, ys, rs, cfg, tracer)
        elif hasattr(op, "lift") and cfg.method != "pdhg":
            big, support, embed, restrict = op.lift()
            xb, it, rp, rd, status, hist = _admm(big, ys, rs, cfg, tracer, support)
            # the returned iterate is the feasible one; fold the off-support
            # remainder (zero at convergence) back through the lsq polish
            x = _polish(op, restrict(xb), ys, rs)
        else:
            x, it, rp, rd, status, hist = _pdhg(op, ys, rs, cfg, tracer)
            x = _polish(op, x, ys, rs)
        res = float(np.linalg.norm(op.forward(x) - ys))
        if res > rs * (1 + cfg.feasibility_slack) + 1e-9 * np.linalg.norm(ys):
            status = INFEASIBLE
        x = x * scale
        return SolverResult(x, it, float(rp), float(rd), status, float(np.abs(x).sum()), res * scale,
                            time.perf_counter() - t0, [h * scale for h in hist])
    finally:
        tracer.close()
