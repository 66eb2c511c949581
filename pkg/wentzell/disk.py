"""
Fourier-mode model of the Laplacian on the unit disk with the boundary condition
Delta f = beta d/dn f + gamma f + q Delta_Gamma f on the circle.

The Dirichlet lifting of the boundary mode e^{ik theta} is the harmonic polynomial
r^{|k|} e^{ik theta}, so every boundary operator is diagonal over k.
"""

import math
from dataclasses import dataclass

import numpy as np

from .common import BadParameters, BoundFails


@dataclass(frozen=True)
class DiskModel:
    """Per-mode symbols on the index set -K..K."""

    K: int
    beta: float = -1.0
    gamma: float = 0.0
    q: float = 0.0

    @property
    def modes(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def W(self):
        """Symbol of (-Delta_Gamma)^{1/2}."""
        return np.abs(self.modes).astype(float)

    @property
    def beltrami(self):
        return -(self.modes.astype(float) ** 2)

    @property
    def dtn_B0(self):
        """Normal derivative of the harmonic lifting, scaled by beta."""
        return self.beta * self.W

    @property
    def C(self):
        return self.q * self.beltrami + self.gamma

    @property
    def N_B(self):
        return self.dtn_B0 + self.C


def build_disk_model(K=256, beta=-1.0, gamma=0.0, q=0.0):
    """Builds the disk model.

    Args:
        K (int, optional): Largest mode. Defaults to 256.
        beta (float, optional): Coefficient of the normal derivative, negative. Defaults to -1.
        gamma (float, optional): Coefficient of the trace. Defaults to 0.
        q (float, optional): Coefficient of the Laplace-Beltrami term, nonnegative. Defaults to 0.

    Raises:
        BadParameters: If K < 1, beta >= 0, q < 0 or a parameter is not finite.

    Returns:
        DiskModel: The model.
    """
    if int(K) != K or K < 1:
        raise BadParameters(f"K must be a positive integer, got {K}")
    for name, value in (("beta", beta), ("gamma", gamma), ("q", q)):
        if not math.isfinite(value):
            raise BadParameters(f"{name} must be finite, got {value}")
    if beta >= 0:
        raise BadParameters(f"beta must be negative, got {beta}")
    if q < 0:
        raise BadParameters(f"q must be nonnegative, got {q}")
    return DiskModel(K=int(K), beta=float(beta), gamma=float(gamma), q=float(q))


def disk_wq_identity_check(model):
    """Compares the DtN symbol of the derivative feedback with beta W.

    On the disk the correction Q vanishes, so the residual is exactly 0; for beta = -1 this
    is N^{B0} = -W.

    Returns:
        dict: residual, beta, whether the literal -W form applies, and the symmetry check.
    """
    residual = float(np.abs(model.dtn_B0 - model.beta * model.W).max())
    return {
        "residual": residual,
        "Q_max": 0.0,
        "beta": model.beta,
        "literal_minus_W": model.beta == -1.0,
        "even_in_k": _is_even(model),
        "additivity_residual": float(np.abs(model.N_B - (model.dtn_B0 + model.C)).max()),
        "verdict": "PASS" if residual == 0.0 else "FAIL",
    }


def _is_even(model):
    return all(
        np.array_equal(values, values[::-1])
        for values in (model.dtn_B0, model.C, model.N_B, model.W, model.beltrami)
    )


def disk_relative_bound(model, epsilons=(1.0, 0.1, 0.01)):
    """Smallest M_eps with |N^{B0} x| <= eps |C x| + M_eps |x| mode by mode.

    Args:
        model (DiskModel): The model, q > 0.
        epsilons (list, optional): Positive eps values. Defaults to (1, 0.1, 0.01).

    Raises:
        BoundFails: If q = 0, where |beta| |k| cannot be dominated by the bounded C.
        BadParameters: If some eps is not positive.

    Returns:
        dict: "table" with columns epsilon, M_eps, k_star, at_truncation, k_star_bound, and the
            verdict (INCONCLUSIVE when a maximum is attained at the truncation K).
    """
    if model.q == 0:
        raise BoundFails(
            f"q = 0: C = gamma = {model.gamma} is bounded while |beta| |k| grows without "
            "bound, so no finite M_eps exists for small eps"
        )
    k = np.arange(0, model.K + 1)
    dominated = abs(model.beta) * k
    dominating = np.abs(-model.q * k.astype(float) ** 2 + model.gamma)

    table = {"epsilon": [], "M_eps": [], "k_star": [], "at_truncation": [], "k_star_bound": []}
    for eps in epsilons:
        if eps <= 0:
            raise BadParameters(f"eps must be positive, got {eps}")
        values = dominated - eps * dominating
        j = int(np.argmax(values))
        table["epsilon"].append(float(eps))
        table["M_eps"].append(float(max(values[j], 0.0)))
        table["k_star"].append(int(k[j]))
        table["at_truncation"].append(bool(k[j] == model.K))
        table["k_star_bound"].append(abs(model.beta) / (eps * model.q) + 1)
    verdict = "INCONCLUSIVE" if any(table["at_truncation"]) else "PASS"
    return {"table": table, "verdict": verdict}


def disk_generation_report(model, ts=(0.0, 0.5, 1.0)):
    """Semigroup exp(t N_B) on mode space.

    Factors are kept as logarithms t N_B(k) so that high modes do not underflow.

    Args:
        model (DiskModel): The model.
        ts (list, optional): Nonnegative times. Defaults to (0, 0.5, 1).

    Returns:
        dict: angle (pi/2, the symbol is real), spectral abscissa, the mode table for k >= 0
            with one log-factor column per t, and the decay of the highest mode.
    """
    k = np.arange(0, model.K + 1)
    symbol = model.N_B[model.K :]
    table = {"k": k, "N_B": symbol, "dtn_B0": model.dtn_B0[model.K :], "C": model.C[model.K :]}
    decay = {}
    positive = True
    for t in ts:
        if t < 0:
            raise BadParameters(f"t must be nonnegative, got {t}")
        log_factor = t * symbol
        table[f"log_factor_t={t:g}"] = log_factor
        positive = positive and bool(np.all(log_factor <= t * model.gamma + 1e-12))
        decay[f"{t:g}"] = float(log_factor[-1])
    return {
        "angle": math.pi / 2,
        "spectral_abscissa": float(model.N_B.max()),
        "gamma": model.gamma,
        "interpretation": "beta d/dn + gamma + q Delta_Gamma" if model.q > 0 else "beta d/dn + gamma",
        "highest_mode_log_factor": decay,
        "factors_bounded_by_exp_t_gamma": positive,
        "even_in_k": _is_even(model),
        "table": table,
    }
