"""
Entropically regularized transport by log-domain Sinkhorn iterations.

The solver alternates exact updates of the dual potentials (f, g) of

    min <P, C> - reg * H(P)   subject to   P 1 = a,  P^T 1 = b

with uniform a and b. Every update is a log-sum-exp over -C/reg shifted by the
other potential, so nothing is exponentiated outside [-inf, 0] and small
regularizations do not underflow the way exp(-C/reg) does.
"""

import logging
from typing import List, Tuple

import numpy as np
from scipy.special import logsumexp

from wassdim.domain.errors import InvalidInputError
from wassdim.domain.model import CostMatrix, TransportMethod, TransportResult
from wassdim.ports.outbound.transport_solver_port import TransportSolverPort

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_CHECKPOINT_EVERY = 1000


def _plan(log_kernel: np.ndarray, f: np.ndarray, g: np.ndarray, reg: float):
    return np.exp(log_kernel + f[:, None] / reg + g[None, :] / reg)


def sinkhorn_w1(
    cost: CostMatrix,
    reg: float,
    max_iters: int = 10000,
    tol: float = DEFAULT_TOL,
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
) -> TransportResult:
    """Approximate W1 by the transport cost of the entropic optimal plan.

    The returned value is <P, C> for the regularized plan P; the entropy term
    is not included.

    Args:
        cost: Cost matrix, any shape; both marginals are uniform
        reg: Entropic regularization, > 0, in cost units
        max_iters: Iteration cap, >= 1
        tol: Stop once neither potential moves by more than tol (sup norm)
        checkpoint_every: Record <P, C> every this many iterations (0 disables)

    Returns:
        TransportResult; a run that hits max_iters has converged=False
    """
    if not reg > 0:
        raise InvalidInputError(f"reg must be positive, got {reg}")
    if max_iters < 1:
        raise InvalidInputError(f"max_iters must be >= 1, got {max_iters}")

    values = cost.values
    n, m = values.shape
    log_a = -np.log(n)
    log_b = -np.log(m)
    log_kernel = -values / reg

    f = np.zeros(n)
    g = np.zeros(m)
    trace: List[Tuple[int, float]] = []
    converged = False
    iteration = 0

    for iteration in range(1, max_iters + 1):
        f_next = reg * (log_a - logsumexp(log_kernel + g[None, :] / reg, axis=1))
        g_next = reg * (log_b - logsumexp(log_kernel + f_next[:, None] / reg, axis=0))
        change = max(np.max(np.abs(f_next - f)), np.max(np.abs(g_next - g)))
        f, g = f_next, g_next

        if checkpoint_every and iteration % checkpoint_every == 0:
            checkpoint = float(np.sum(_plan(log_kernel, f, g, reg) * values))
            trace.append((iteration, checkpoint))
            logger.debug(
                f"Sinkhorn iteration {iteration}: cost={checkpoint:.8g}, "
                f"dual change={change:.3g}"
            )

        if change < tol:
            converged = True
            break

    plan = _plan(log_kernel, f, g, reg)
    w1 = float(np.sum(plan * values))
    marginal_error = float(
        max(
            np.max(np.abs(plan.sum(axis=1) - 1.0 / n)),
            np.max(np.abs(plan.sum(axis=0) - 1.0 / m)),
        )
    )
    if not converged:
        logger.warning(
            f"Sinkhorn (reg={reg}) stopped after {iteration} iterations without "
            f"converging; marginal error {marginal_error:.3g}"
        )

    return TransportResult(
        w1=w1,
        method=TransportMethod.SINKHORN,
        reg=reg,
        iterations_run=iteration,
        converged=converged,
        marginal_error=marginal_error,
        trace=tuple(trace),
    )


class LogDomainSinkhornSolverAdapter(TransportSolverPort):
    """TransportSolverPort backed by sinkhorn_w1 with fixed settings."""

    def __init__(
        self,
        reg: float = 0.1,
        max_iters: int = 10000,
        tol: float = DEFAULT_TOL,
        checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY,
    ):
        if not reg > 0:
            raise InvalidInputError(f"reg must be positive, got {reg}")
        self.reg = reg
        self.max_iters = max_iters
        self.tol = tol
        self.checkpoint_every = checkpoint_every

    def solve(self, cost: CostMatrix) -> TransportResult:
        return sinkhorn_w1(
            cost,
            reg=self.reg,
            max_iters=self.max_iters,
            tol=self.tol,
            checkpoint_every=self.checkpoint_every,
        )

    def describe(self) -> dict:
        return {
            "method": TransportMethod.SINKHORN.value,
            "reg": self.reg,
            "max_iters": self.max_iters,
            "tol": self.tol,
        }
