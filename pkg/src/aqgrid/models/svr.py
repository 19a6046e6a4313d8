"""Epsilon-insensitive support vector regression with an RBF kernel.

The dual is solved by SMO-style pairwise coordinate descent on the
stacked variable vector beta = [alpha; alpha*] (length 2n, signs
z = [+1...; -1...]), minimizing

    1/2 beta' Qt beta + p' beta,   Qt = zz'*K2,  p = [eps - y; eps + y]

subject to z'beta = 0 and 0 <= beta <= C, where K2 tiles the train
kernel matrix 2x2. Each step picks the maximal violating pair under the
usual first-order selection and solves the two-variable subproblem in
closed form; iteration stops when the KKT gap m(beta) - M(beta) drops
to 1e-4 or after 1e5 steps, whichever is first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aqgrid.errors import TrainingError

KKT_TOL = 1e-4
MAX_ITER = 100_000
_TAU = 1e-12


def rbf_kernel(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * ||a - b||^2) for every row pair."""
    aa = np.sum(A * A, axis=1)[:, None]
    bb = np.sum(B * B, axis=1)[None, :]
    sq = np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)
    return np.exp(-gamma * sq)


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray = field(repr=False)  # standardized rows
    dual_coef: np.ndarray = field(repr=False)        # alpha - alpha* at the SVs
    bias: float = 0.0
    gamma: float = 1.0
    C: float = 1.0
    epsilon: float = 0.1
    iterations: int = 0
    kkt_gap: float = 0.0
    # full beta over the training set, kept for feasibility diagnostics
    alpha: np.ndarray = field(default=None, repr=False)
    alpha_star: np.ndarray = field(default=None, repr=False)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if len(self.dual_coef) == 0:
            return np.full(X.shape[0], self.bias)
        k = rbf_kernel(X, self.support_vectors, self.gamma)
        return k @ self.dual_coef + self.bias

    def to_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "gamma": self.gamma,
            "C": self.C,
            "epsilon": self.epsilon,
            "iterations": self.iterations,
            "kkt_gap": self.kkt_gap,
            "alpha": None if self.alpha is None else self.alpha.tolist(),
            "alpha_star": None if self.alpha_star is None else self.alpha_star.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvrModel":
        sv = np.array(d["support_vectors"], dtype=np.float64)
        if sv.size == 0:
            sv = np.zeros((0, 0))
        return cls(
            support_vectors=sv,
            dual_coef=np.array(d["dual_coef"], dtype=np.float64),
            bias=float(d["bias"]),
            gamma=float(d["gamma"]),
            C=float(d["C"]),
            epsilon=float(d["epsilon"]),
            iterations=int(d.get("iterations", 0)),
            kkt_gap=float(d.get("kkt_gap", 0.0)),
            alpha=None if d.get("alpha") is None else np.array(d["alpha"], dtype=np.float64),
            alpha_star=None if d.get("alpha_star") is None else np.array(d["alpha_star"], dtype=np.float64),
        )


def fit_svr(X, y, C: float = 10.0, epsilon: float = 0.5,
            gamma: float = None) -> SvrModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if n < 2:
        raise TrainingError(f"SVR needs >= 2 rows, got {n}")
    if C <= 0 or epsilon < 0:
        raise TrainingError(f"need C > 0 and epsilon >= 0, got C={C}, epsilon={epsilon}")
    if gamma is None:
        gamma = 1.0 / p
    if gamma <= 0:
        raise TrainingError(f"rbf_gamma must be positive, got {gamma}")

    K = rbf_kernel(X, X, gamma)
    K2 = np.tile(K, (2, 2))
    z = np.concatenate([np.ones(n), -np.ones(n)])
    p_vec = np.concatenate([epsilon - y, epsilon + y])

    beta = np.zeros(2 * n)
    grad = p_vec.copy()  # Qt @ beta + p at beta = 0

    it = 0
    gap = np.inf
    while it < MAX_ITER:
        score = -z * grad
        up = np.where(z > 0, beta < C, beta > 0)
        low = np.where(z > 0, beta > 0, beta < C)
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        gap = score[i] - score[j]
        if gap <= KKT_TOL:
            break

        # direction d: d_i = z_i, d_j = -z_j keeps z'beta fixed; the z
        # factors cancel in d'Qt d, leaving plain kernel entries
        curv = K2[i % n, i % n] + K2[j % n, j % n] - 2.0 * K2[i % n, j % n]
        if curv <= _TAU:
            curv = _TAU
        t = gap / curv

        # box limits along the direction
        if z[i] > 0:
            t_hi_i, t_lo_i = C - beta[i], -beta[i]
        else:
            t_hi_i, t_lo_i = beta[i], beta[i] - C
        if z[j] > 0:
            t_hi_j, t_lo_j = beta[j], beta[j] - C
        else:
            t_hi_j, t_lo_j = C - beta[j], -beta[j]
        t = min(t, t_hi_i, t_hi_j)
        t = max(t, t_lo_i, t_lo_j, 0.0)
        if t <= 0.0:
            raise TrainingError(
                "SVR solver stalled: selected pair cannot move "
                f"(iteration {it}, KKT gap {gap:.3e})"
            )

        beta[i] += z[i] * t
        beta[j] -= z[j] * t
        beta[i] = min(max(beta[i], 0.0), C)
        beta[j] = min(max(beta[j], 0.0), C)
        grad += t * z * (K2[:, i] - K2[:, j])
        it += 1
    else:
        raise TrainingError(
            f"SVR solver did not converge within {MAX_ITER} iterations "
            f"(KKT gap {gap:.3e} > {KKT_TOL})"
        )

    alpha = beta[:n]
    alpha_star = beta[n:]
    coef = alpha - alpha_star

    score = -z * grad
    up = np.where(z > 0, beta < C, beta > 0)
    low = np.where(z > 0, beta > 0, beta < C)
    if up.any() and low.any():
        bias = 0.5 * (float(score[up].max()) + float(score[low].min()))
    else:
        bias = float(np.median(y - K @ coef))

    sv = np.abs(coef) > 0.0
    return SvrModel(
        support_vectors=X[sv].copy(),
        dual_coef=coef[sv],
        bias=bias,
        gamma=gamma,
        C=C,
        epsilon=epsilon,
        iterations=it,
        kkt_gap=float(max(gap, 0.0)),
        alpha=alpha,
        alpha_star=alpha_star,
    )


def svr_dual_check(model: SvrModel) -> dict:
    """Feasibility diagnostics of the stored dual solution.

    Reports the worst violation of the box 0 <= alpha, alpha* <= C and
    the residual of the equality constraint sum(alpha - alpha*) = 0.
    """
    if model.alpha is None or model.alpha_star is None:
        raise TrainingError("model carries no dual variables to check")
    a, s, C = model.alpha, model.alpha_star, model.C
    box = max(
        float(np.max(-a, initial=0.0)),
        float(np.max(a - C, initial=0.0)),
        float(np.max(-s, initial=0.0)),
        float(np.max(s - C, initial=0.0)),
        0.0,
    )
    equality = abs(float(np.sum(a - s)))
    return {"box_violation": box, "equality_violation": equality}
