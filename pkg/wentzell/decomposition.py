"""
Dirichlet maps, Dirichlet-to-Neumann matrices, the similarity pair (T, T^-1) onto
interior x boundary coordinates, the operator matrices acting there, and the residual
checks tying them together.

All constructions use the maximal operator A_m + P, which equals A_m when P = 0.
"""

from dataclasses import dataclass

import numpy as np

from .common import (
    LinOp,
    ResolventPole,
    SingularMatrix,
    Space,
    SpectrumHit,
    operator_norm,
    solve_linear,
)
from .interval import wentzell_domain_basis

OPERATORS = ("A_m", "A_m+P", "G_m")
MAXIMAL = "A_m+P"
MEMBERSHIP_TOL = 1e-8
# pivot tolerance for lam - N; N inherits rounding from the lifting solve
BOUNDARY_PIVOT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DirichletMap:
    """Lifting of boundary data to the kernel of (lam - op) on the interior."""

    lam: complex
    op: str
    matrix: LinOp


@dataclass(frozen=True, eq=False)
class DtNMatrix:
    """A feedback applied to the columns of a Dirichlet map."""

    lam: complex
    op: str
    feedback: str
    matrix: np.ndarray


@dataclass(frozen=True, eq=False)
class SimilarityPair:
    """T f = ((f - L0 L f) on the interior, L f) and its inverse T^-1 (f, x) = E f + L0 x."""

    T: LinOp
    T_inv: LinOp
    lifting: np.ndarray


@dataclass(frozen=True, eq=False)
class GOperators:
    """G_m on the full grid and the interior matrix of G_0 = A_0 - L0 B."""

    G_m: LinOp
    G0: LinOp
    shift: float = 0.0

    def resolvent(self, lam, g):
        """R(lam, G_0) applied to interior data g (vector or matrix of columns)."""
        G0 = self.G0.matrix
        try:
            return solve_linear(lam * np.eye(G0.shape[0]) - G0, g)
        except SingularMatrix as e:
            raise ResolventPole(lam, f"lambda={lam} is an eigenvalue of G_0: {e}") from e

    def resolvent_00(self, lam, g, grid):
        """R(lam, G_00): the restriction of R(lam, G_0) to zero-trace full-grid inputs."""
        g = np.asarray(g, dtype=complex)
        trace = g[grid.boundary]
        if np.abs(trace).max() > 1e-12 * max(np.abs(g).max(), 1.0):
            raise ValueError("R(lam, G_00) is only defined on zero-trace inputs")
        return self.resolvent(lam, g[grid.interior])


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Operator matrices on interior x boundary coordinates.

    The full matrix has blocks [[G0, U], [B E, N]] and the triangular one [[G0, U], [0, N]],
    where U = -L0 (N - shift) restricted to the interior and E is the zero extension.
    """

    G0: np.ndarray
    U: np.ndarray
    BE: np.ndarray
    N: np.ndarray
    lifting: np.ndarray
    shift: float = 0.0

    @property
    def interior_size(self):
        return self.G0.shape[0]

    @property
    def full(self):
        return np.block([[self.G0, self.U], [self.BE, self.N]])

    @property
    def triangular(self):
        return np.block([[self.G0, self.U], [np.zeros_like(self.BE), self.N]])

    def apply(self, f, x):
        """Applies the full operator matrix to (f, x)."""
        return self.G0 @ f + self.U @ x, self.BE @ f + self.N @ x

    def apply_triangular(self, f, x):
        return self.G0 @ f + self.U @ x, self.N @ x


def _maximal_matrix(model, op, cache=None):
    if op == "A_m":
        return model.A_m.matrix
    elif op == "A_m+P":
        return model.D.matrix
    elif op == "G_m":
        return build_G(model, cache=cache).G_m.matrix
    raise ValueError(f"Unknown operator {op!r}, expected one of {OPERATORS}")


def dirichlet_map(model, lam=0.0, op="A_m", cache=None):
    """Solves the Dirichlet problem (lam - op) f = 0 in the interior, L f = x.

    Args:
        model (DiscreteModel): The model.
        lam (complex, optional): Spectral parameter. Defaults to 0.
        op (str, optional): One of "A_m", "A_m+P", "G_m". Defaults to "A_m".
        cache (dict, optional): Caller-owned memo keyed by (lam, op). Defaults to None.

    Raises:
        ResolventPole: If lam is an eigenvalue of the Dirichlet realization of op.

    Returns:
        DirichletMap: The lifting, column j being the extension of the j-th boundary unit vector.
    """
    key = (complex(lam), op)
    if cache is not None and key in cache:
        return cache[key]

    A = _maximal_matrix(model, op, cache=cache)
    grid = model.grid
    interior, boundary = grid.interior, grid.boundary
    system = lam * np.eye(len(interior)) - A[np.ix_(interior, interior)]
    try:
        inner = solve_linear(system, A[np.ix_(interior, boundary)])
    except SingularMatrix as e:
        raise ResolventPole(
            lam, f"lambda={lam} is a Dirichlet eigenvalue of {op}: {e}"
        ) from e
    F = np.zeros((grid.size, len(boundary)), dtype=complex)
    F[boundary, np.arange(len(boundary))] = 1.0
    F[interior] = inner

    result = DirichletMap(lam=lam, op=op, matrix=LinOp(F, Space.BOUNDARY, Space.FULL_GRID))
    if cache is not None:
        cache[key] = result
    return result


def dtn_operator(model, lam=0.0, op="A_m", feedback="B", cache=None):
    """Dirichlet-to-Neumann matrix F L_lam for a feedback F.

    Args:
        model (DiscreteModel): The model.
        lam (complex, optional): Spectral parameter. Defaults to 0.
        op (str, optional): Operator the lifting is harmonic for. Defaults to "A_m".
        feedback (str | array-like | LinOp, optional): "B", "B0", or a custom FullGrid -> Boundary
            matrix. Defaults to "B".
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Returns:
        DtNMatrix: The 2n x 2n matrix.
    """
    if isinstance(feedback, str):
        if feedback == "B":
            F = model.B.matrix
        elif feedback == "B0":
            F = model.B0.matrix
        else:
            raise ValueError(f"Unknown feedback {feedback!r}, expected 'B', 'B0' or a matrix")
        tag = feedback
    else:
        F = feedback.matrix if isinstance(feedback, LinOp) else np.asarray(feedback, dtype=complex)
        tag = "custom"
    lifting = dirichlet_map(model, lam, op, cache=cache).matrix.matrix
    return DtNMatrix(lam=lam, op=op, feedback=tag, matrix=F @ lifting)


def _zero_extension(grid):
    E = np.zeros((grid.size, len(grid.interior)))
    E[grid.interior, np.arange(len(grid.interior))] = 1.0
    return E


def similarity_pair(model, shift=0.0, cache=None):
    """Builds T f = ((f - L0 L f)|interior, L f) and T^-1 (f, x) = E f + L0 x.

    Args:
        model (DiscreteModel): The model.
        shift (float, optional): L0 is the Dirichlet map at lam=shift. Defaults to 0.
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Returns:
        SimilarityPair: T and T^-1.
    """
    grid = model.grid
    L0 = dirichlet_map(model, shift, MAXIMAL, cache=cache).matrix.matrix
    L = model.L.matrix
    projection = np.eye(grid.size) - L0 @ L
    T = np.vstack([projection[grid.interior], L])
    T_inv = np.hstack([_zero_extension(grid), L0])
    return SimilarityPair(
        T=LinOp(T, Space.FULL_GRID, Space.PRODUCT),
        T_inv=LinOp(T_inv, Space.PRODUCT, Space.FULL_GRID),
        lifting=L0,
    )


def build_G(model, shift=0.0, cache=None):
    """Builds G_m = D - L0 B (I - L0 L) and the interior matrix of G_0 = A_0 - L0 B.

    Args:
        model (DiscreteModel): The model, with D = A_m + P.
        shift (float, optional): L0 is the Dirichlet map at lam=shift. Defaults to 0.
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Returns:
        GOperators: G_m and G_0.
    """
    grid = model.grid
    D = model.D.matrix
    B = model.B.matrix
    L0 = dirichlet_map(model, shift, MAXIMAL, cache=cache).matrix.matrix
    G_m = D - L0 @ B @ (np.eye(grid.size) - L0 @ model.L.matrix)
    interior = grid.interior
    G0 = D[np.ix_(interior, interior)] - L0[interior] @ B[:, interior]
    return GOperators(
        G_m=LinOp(G_m, Space.FULL_GRID, Space.FULL_GRID),
        G0=LinOp(G0, Space.INTERIOR_GRID, Space.INTERIOR_GRID),
        shift=shift,
    )


def operator_matrix(model, shift=0.0, cache=None):
    """Assembles the operator matrices on interior x boundary coordinates.

    Args:
        model (DiscreteModel): The model.
        shift (float, optional): Spectral shift of the lifting. Defaults to 0.
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Returns:
        OperatorMatrix: The blocks G0, U, B E and N.
    """
    grid = model.grid
    G = build_G(model, shift, cache=cache)
    N = dtn_operator(model, shift, MAXIMAL, "B", cache=cache).matrix
    L0 = dirichlet_map(model, shift, MAXIMAL, cache=cache).matrix.matrix
    U = -L0[grid.interior] @ (N - shift * np.eye(N.shape[0]))
    BE = model.B.matrix[:, grid.interior]
    return OperatorMatrix(G0=G.G0.matrix, U=U, BE=BE, N=N, lifting=L0, shift=shift)


def membership_residual(model, opmat, f, x):
    """Trace of G_0 f - L0 N x computed on the full grid: L D E f - B E f - N x.

    Zero in the continuum exactly when (f, x) lies in the domain of the operator matrix.
    """
    grid = model.grid
    full = np.zeros(grid.size, dtype=complex)
    full[grid.interior] = f
    D = model.D.matrix
    return (D @ full)[grid.boundary] - model.B.matrix @ full - opmat.N @ x


def similarity_check(model, samples=8, seed=0, shift=0.0, cache=None):
    """Checks T D f = A T f on random elements of the discrete Wentzell domain.

    Residuals are r = ||T D f - A T f|| / (||f|| ||A_m||) in the sup norm. The lifting defect
    ||L D L0|| / ||D|| (zero in the continuum) and the domain membership residual of T f are
    reported alongside, as is the residual of (A - A_0)(f, x) = (0, B f) on the samples.

    Args:
        model (DiscreteModel): The model.
        samples (int, optional): Number of sampled domain elements. Defaults to 8.
        seed (int, optional): Seed of the generator drawing the samples. Defaults to 0.
        shift (float, optional): Spectral shift of the lifting. Defaults to 0.
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Returns:
        dict: max_residual, residuals, membership, lifting_defect, tier and verdict.
    """
    grid = model.grid
    basis = wentzell_domain_basis(model, as_matrix=True)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((basis.shape[1], samples)) + 1j * rng.standard_normal(
        (basis.shape[1], samples)
    )
    F = basis @ coeffs

    pair = similarity_pair(model, shift, cache=cache)
    opmat = operator_matrix(model, shift, cache=cache)
    D = model.D.matrix
    scale_A = operator_norm(model.A_m)
    scale_D = operator_norm(D)
    m = len(grid.interior)

    lhs = pair.T @ (D @ F)
    TF = pair.T @ F
    top, bottom = opmat.apply(TF[:m], TF[m:])
    rhs = np.vstack([top, bottom])
    f_norms = np.abs(F).max(axis=0)
    residuals = np.abs(lhs - rhs).max(axis=0) / (f_norms * scale_A)

    # A - A_0 only feeds B f back into the boundary row
    top0, bottom0 = opmat.apply_triangular(TF[:m], TF[m:])
    coupling = opmat.BE @ TF[:m]
    perturbation = max(
        np.abs(top - top0).max(), np.abs(bottom - bottom0 - coupling).max()
    ) / (max(np.abs(TF).max(), 1.0) * scale_A)

    membership = []
    for k in range(samples):
        r = membership_residual(model, opmat, TF[:m, k], TF[m:, k])
        membership.append(np.abs(r).max() / (f_norms[k] * scale_D))
    lifting_defect = operator_norm((D @ pair.lifting)[grid.boundary]) / scale_D

    max_residual = float(residuals.max())
    return {
        "tier": "EXACT" if model.exact_tier else "GENERAL",
        "N": grid.N,
        "samples": samples,
        "seed": seed,
        "residuals": residuals,
        "max_residual": max_residual,
        "membership": np.asarray(membership),
        "max_membership": float(np.max(membership)),
        "membership_tol": MEMBERSHIP_TOL,
        "lifting_defect": lifting_defect,
        "perturbation_residual": float(perturbation),
        "verdict": "PASS" if max_residual <= 1e-9 and perturbation <= 1e-12 else "FAIL",
    }


def resolvent_block_check(model, lams=(1.0, 10.0, 100.0), shift=0.0, cache=None):
    """Verifies the block resolvent of the triangular operator matrix.

    For every unit pair (g, y) forms x = R(lam, N) y and
    f = R(lam, G_00) g + R(lam, G_0) U x, then checks (lam - G_0) f - U x = g and
    (lam - N) x = y.

    Args:
        model (DiscreteModel): The model.
        lams (list, optional): Spectral parameters. Defaults to (1, 10, 100).
        shift (float, optional): Spectral shift of the lifting. Defaults to 0.
        cache (dict, optional): Caller-owned memo for Dirichlet maps. Defaults to None.

    Raises:
        SpectrumHit: If some lam is an eigenvalue of N.
        ResolventPole: If some lam is an eigenvalue of G_0.

    Returns:
        dict: Per-lam residuals, the lower-left block norm and the verdict.
    """
    opmat = operator_matrix(model, shift, cache=cache)
    G = build_G(model, shift, cache=cache)
    zero_trace = _zero_extension(model.grid)
    m = opmat.interior_size
    k = opmat.N.shape[0]
    rows = []
    for lam in lams:
        try:
            R_N = solve_linear(lam * np.eye(k) - opmat.N, np.eye(k), BOUNDARY_PIVOT_TOL)
        except SingularMatrix as e:
            raise SpectrumHit(lam, f"lambda={lam} is an eigenvalue of N: {e}") from e

        R_G = G.resolvent_00(lam, zero_trace, model.grid)
        upper_right = G.resolvent(lam, opmat.U @ R_N)
        block = np.block([[R_G, upper_right], [np.zeros((k, m)), R_N]])
        inputs = np.eye(m + k)
        F = block[:m]
        X = block[m:]
        g, y = inputs[:m], inputs[m:]

        lhs_top = (lam * F - opmat.G0 @ F) - opmat.U @ X
        scale_top = (
            operator_norm(lam * np.eye(m) - opmat.G0) * np.abs(F).max()
            + operator_norm(opmat.U) * np.abs(X).max()
            + 1.0
        )
        lhs_bottom = lam * X - opmat.N @ X
        scale_bottom = operator_norm(lam * np.eye(k) - opmat.N) * np.abs(X).max() + 1.0
        rows.append(
            {
                "lam": lam,
                "system_residual": float(np.abs(lhs_top - g).max() / scale_top),
                "boundary_residual": float(np.abs(lhs_bottom - y).max() / scale_bottom),
                "lower_left": float(np.abs(block[m:, :m]).max()),
            }
        )

    ok = all(
        r["system_residual"] <= 1e-9 and r["boundary_residual"] <= 1e-12 and r["lower_left"] == 0.0
        for r in rows
    )
    return {"shift": shift, "checks": rows, "verdict": "PASS" if ok else "FAIL"}


def projection_defect(model, cache=None):
    """||(L0 L)^2 - L0 L|| relative to ||L0 L||."""
    L0 = dirichlet_map(model, 0.0, MAXIMAL, cache=cache).matrix.matrix
    Pi = L0 @ model.L.matrix
    return operator_norm(Pi @ Pi - Pi) / max(operator_norm(Pi), 1.0)
