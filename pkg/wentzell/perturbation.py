"""
Perturbation experiments: the Dirichlet-map identity under a relatively bounded
perturbation P, the formula for the difference of the DtN matrices, and splittings of the
feedback as B = B0 + C L.
"""

import math
from dataclasses import dataclass

import numpy as np

from .common import LinOp, ResolventPole, SingularMatrix, Space, operator_norm, solve_linear
from .decomposition import dirichlet_map, dtn_operator
from .disk import DiskModel
from .interval import DiscreteModel, with_feedback
from .probes import sector_angle_estimate, theorem31_experiment

SCENARIOS = ("C_bounded", "C_dominant")


@dataclass(frozen=True, eq=False)
class SplitFeedback:
    """A feedback B0 on the full grid plus a coupling C of the boundary values."""

    B0: LinOp
    C: np.ndarray
    L: LinOp

    @property
    def B(self):
        return self.B0 + LinOp(self.C, Space.BOUNDARY, Space.BOUNDARY) @ self.L

    def apply(self, f):
        f = np.asarray(f, dtype=complex)
        return self.B0 @ f + self.C @ (self.L @ f)


def split_feedback(model, B0=None, C=None):
    """The splitting of a model's feedback, optionally with B0 or C replaced."""
    return SplitFeedback(
        B0=model.B0 if B0 is None else B0,
        C=model.C if C is None else np.asarray(C, dtype=complex),
        L=model.L,
    )


def _interior_resolvent(model, op, lam, rhs):
    grid = model.grid
    A = model.A_m.matrix if op == "A_m" else model.D.matrix
    system = lam * np.eye(len(grid.interior)) - A[np.ix_(grid.interior, grid.interior)]
    try:
        return solve_linear(system, rhs)
    except SingularMatrix as e:
        raise ResolventPole(lam, f"lambda={lam} is a Dirichlet eigenvalue of {op}: {e}") from e


def _dirichlet_identity(model, lam, base, perturbed, sign, source):
    """Residual of L^{perturbed} - L^{base} - sign * R(lam, A0 of `source`) P L^{...}.

    `source` picks which lifting the perturbation acts on and whose Dirichlet realization is
    inverted: "perturbed" for R(lam, A0 + P) P L^{base}, "base" for R(lam, A0) P L^{perturbed}.
    """
    grid = model.grid
    L_base = dirichlet_map(model, lam, base).matrix.matrix
    L_pert = dirichlet_map(model, lam, perturbed).matrix.matrix
    P = model.P.matrix
    if source == "perturbed":
        correction = _interior_resolvent(model, perturbed, lam, (P @ L_base)[grid.interior])
    else:
        correction = _interior_resolvent(model, base, lam, (P @ L_pert)[grid.interior])
    difference = L_pert - L_base
    difference[grid.interior] -= sign * correction
    scale = max(operator_norm(L_base), operator_norm(L_pert), 1.0)
    return operator_norm(difference) / scale


def dirichlet_identity_check(model, lam=5.0, swap=False):
    """Checks both forms of the identity L^{A_m+P} - L^{A_m} = R(lam, A0+P) P L^{A_m}
    = R(lam, A0) P L^{A_m+P}.

    Args:
        model (DiscreteModel): The model carrying P.
        lam (complex, optional): Spectral parameter. Defaults to 5.
        swap (bool, optional): Exchange the roles of A_m and A_m + P (the perturbation becomes
            -P). Defaults to False.

    Raises:
        ResolventPole: If lam is a Dirichlet eigenvalue of A_m or A_m + P.

    Returns:
        dict: residual_1, residual_2 (relative, sup norm) and the verdict.
    """
    if swap:
        base, perturbed, sign = "A_m+P", "A_m", -1.0
    else:
        base, perturbed, sign = "A_m", "A_m+P", 1.0
    residual_1 = _dirichlet_identity(model, lam, base, perturbed, sign, "perturbed")
    residual_2 = _dirichlet_identity(model, lam, base, perturbed, sign, "base")
    return {
        "lam": lam,
        "swapped": swap,
        "residual_1": residual_1,
        "residual_2": residual_2,
        "verdict": "PASS" if max(residual_1, residual_2) <= 1e-10 else "FAIL",
    }


def dtn_difference_check(model, lam=5.0):
    """Checks N_lam - N_lam^P = -B R(lam, A0) P L_lam^{A_m+P}.

    Args:
        model (DiscreteModel): The model carrying P.
        lam (complex, optional): Spectral parameter. Defaults to 5.

    Returns:
        dict: Relative residual, ||N - N^P|| and the verdict.
    """
    grid = model.grid
    N = dtn_operator(model, lam, "A_m").matrix
    N_P = dtn_operator(model, lam, "A_m+P").matrix
    L_pert = dirichlet_map(model, lam, "A_m+P").matrix.matrix
    correction = _interior_resolvent(model, "A_m", lam, (model.P.matrix @ L_pert)[grid.interior])
    formula = -model.B.matrix[:, grid.interior] @ correction
    scale = max(operator_norm(N), operator_norm(N_P), 1.0)
    residual = operator_norm((N - N_P) - formula) / scale
    return {
        "lam": lam,
        "residual": residual,
        "difference_norm": operator_norm(N - N_P),
        "dtn_shapes": [list(N.shape), list(N_P.shape)],
        "verdict": "PASS" if residual <= 1e-9 else "FAIL",
    }


def additivity_residual(model, F1, F2, lam=5.0, op="A_m"):
    """Relative residual of dtn(F1 + F2) - dtn(F1) - dtn(F2)."""
    cache = {}
    total = dtn_operator(model, lam, op, np.asarray(F1) + np.asarray(F2), cache=cache).matrix
    parts = (
        dtn_operator(model, lam, op, F1, cache=cache).matrix
        + dtn_operator(model, lam, op, F2, cache=cache).matrix
    )
    return operator_norm(total - parts) / max(operator_norm(total), 1.0)


def _split_interval(model, split, scenario, quiet=True, **kwargs):
    composed = with_feedback(model, B0=split.B0, C=split.C)
    cache = {}
    N_B = dtn_operator(composed, 0.0, "A_m+P", "B", cache=cache).matrix
    N_B0 = dtn_operator(composed, 0.0, "A_m+P", "B0", cache=cache).matrix
    residual = operator_norm(N_B - (N_B0 + split.C)) / max(operator_norm(N_B), 1.0)

    if scenario == "C_bounded":
        comparator = with_feedback(model, B0=split.B0, C=np.zeros_like(split.C))
    else:
        comparator = with_feedback(
            model, B0=np.zeros_like(split.B0.matrix), C=split.C
        )
    record_B = theorem31_experiment(composed, quiet=quiet, **kwargs)
    record_cmp = theorem31_experiment(comparator, quiet=quiet, **kwargs)
    return {
        "model": "interval",
        "additivity_residual": residual,
        "angle_B": record_B.angles["generator"],
        "angle_comparator": record_cmp.angles["generator"],
        "verdict_B": record_B.verdict,
        "verdict_comparator": record_cmp.verdict,
        "composed_defined_everywhere": True,
    }


def _split_disk(disk, scenario):
    residual = float(np.abs(disk.N_B - (disk.dtn_B0 + disk.C)).max())
    comparator = disk.dtn_B0 if scenario == "C_bounded" else disk.C
    report_B = sector_angle_estimate(np.diag(disk.N_B))
    report_cmp = sector_angle_estimate(np.diag(comparator))
    return {
        "model": "disk",
        "additivity_residual": residual,
        "angle_B": report_B.angle_estimate,
        "angle_comparator": report_cmp.angle_estimate,
        "composed_defined_everywhere": True,
    }


def feedback_split_experiment(model, split=None, scenario="C_bounded", tolerance=0.1, quiet=True, **kwargs):
    """Compares the generator for B = B0 + C L with one of its parts.

    In the C_bounded scenario the comparator keeps B0 only, in the C_dominant scenario it keeps
    C L only. The DtN additivity N^B = N^{B0} + C is checked first.

    Args:
        model (DiscreteModel | DiskModel): The model.
        split (SplitFeedback, optional): Interval splitting. Defaults to the model's own.
        scenario (str, optional): "C_bounded" or "C_dominant". Defaults to "C_bounded".
        tolerance (float, optional): Allowed angle difference. Defaults to 0.1.
        quiet (bool, optional): Hide progress output. Defaults to True.
        **kwargs: Forwarded to theorem31_experiment for interval models.

    Raises:
        AssumptionFailed: From theorem31_experiment.

    Returns:
        dict: Additivity residual, both angles and the verdict.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"Unknown scenario {scenario!r}, expected one of {SCENARIOS}")
    if isinstance(model, DiskModel):
        result = _split_disk(model, scenario)
    elif isinstance(model, DiscreteModel):
        split = split_feedback(model) if split is None else split
        result = _split_interval(model, split, scenario, quiet=quiet, **kwargs)
    else:
        raise TypeError(f"Expected a DiscreteModel or DiskModel, got {type(model).__name__}")

    agree = abs(result["angle_B"] - result["angle_comparator"]) <= tolerance
    result["scenario"] = scenario
    result["angle_difference"] = abs(result["angle_B"] - result["angle_comparator"])
    result["verdict"] = "PASS" if agree and result["additivity_residual"] <= 1e-10 else "FAIL"
    if not math.isfinite(result["angle_difference"]):
        result["verdict"] = "INCONCLUSIVE"
    return result
