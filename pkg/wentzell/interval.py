"""
Finite-difference model of second-order operators A_m f = a f'' + b f' + c f on [0, 1]
with values in C^n, together with the trace L, the boundary feedback B, the Dirichlet
realization A_0 and a relatively bounded perturbation P f = p1 f' + p0 f.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import Polynomial

from .common import (
    BadDimensions,
    DegenerateConstraint,
    LinOp,
    PositivityViolation,
    Space,
)


@dataclass
class WentzellProblem:
    """Coefficients, boundary matrices and perturbation of an interval problem.

    Coefficients may be numbers, complex strings such as "1+2j", callables of s,
    {"poly": [c0, c1, ...]} dictionaries, or (nested) lists of these. For b, c, p1 and p0 a
    scalar means a multiple of the identity and a length-n list a diagonal matrix.
    """

    n: int = 1
    a: object = 1.0
    b: object = 0.0
    c: object = 0.0
    M0: object = None
    M1: object = None
    N0: object = None
    N1: object = None
    beta: object = None
    gamma: object = None
    p1: object = 0.0
    p0: object = 0.0
    kernel: object = None
    a_min: float = 1e-8


@dataclass(frozen=True)
class Grid:
    """Uniform grid with N nodes on [0, 1] carrying n components per node."""

    N: int
    n: int = 1

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 5:
            raise BadDimensions(f"grid needs at least 5 nodes, got N={self.N}")
        if int(self.n) != self.n or self.n < 1:
            raise BadDimensions(f"component count must be a positive integer, got n={self.n}")

    @property
    def h(self):
        return 1.0 / (self.N - 1)

    @property
    def nodes(self):
        return np.linspace(0.0, 1.0, self.N)

    @property
    def size(self):
        return self.N * self.n

    @property
    def interior(self):
        """Flat indices of the N-2 interior nodes."""
        return np.arange(self.n, (self.N - 1) * self.n)

    @property
    def boundary(self):
        """Flat indices of the boundary nodes, components at s=0 first, then at s=1."""
        n = self.n
        return np.r_[0:n, (self.N - 1) * n : self.N * n]

    def weights(self, space=Space.FULL_GRID):
        """Diagonal weights turning the Euclidean norm into the discrete L2 + boundary norm.

        Interior nodes carry sqrt(h), boundary coordinates carry 1.
        """
        root = np.sqrt(self.h)
        if space == Space.FULL_GRID:
            w = np.full(self.size, root)
            w[self.boundary] = 1.0
            return w
        elif space == Space.INTERIOR_GRID:
            return np.full(self.size - 2 * self.n, root)
        elif space == Space.BOUNDARY:
            return np.ones(2 * self.n)
        elif space == Space.PRODUCT:
            return np.r_[np.full(self.size - 2 * self.n, root), np.ones(2 * self.n)]
        raise ValueError(f"No grid weights for {space}")


@dataclass
class GridFunction:
    """Nodal values (N x n) of a C^n-valued function on the grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim == 1:
            values = values.reshape(self.grid.N, -1) if values.size == self.grid.size else values
        if values.shape != (self.grid.N, self.grid.n):
            raise BadDimensions(
                f"grid function needs shape {(self.grid.N, self.grid.n)}, got {values.shape}"
            )
        self.values = values

    @classmethod
    def from_flat(cls, vector, grid):
        return cls(np.asarray(vector, dtype=complex).reshape(grid.N, grid.n), grid)

    @property
    def flat(self):
        return self.values.reshape(-1)

    def trace(self):
        return BoundaryVector(np.r_[self.values[0], self.values[-1]], self.grid.n)


@dataclass
class BoundaryVector:
    """Boundary values ordered as (components at s=0, components at s=1)."""

    values: np.ndarray
    n: int = 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if self.values.size != 2 * self.n:
            raise BadDimensions(f"boundary vector needs {2 * self.n} entries, got {self.values.size}")


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    """Grid plus assembled operators of an interval problem.

    B = B0 + C @ L, where B0 collects the derivative feedback and the integral feedback, and
    C = [N0 | N1] acts on the boundary values.
    """

    grid: Grid
    problem: WentzellProblem
    A_m: LinOp
    L: LinOp
    B: LinOp
    A0: LinOp
    P: LinOp
    B0: LinOp
    C: np.ndarray
    exact_tier: bool = False
    conservative: bool = False
    info: dict = field(default_factory=dict)

    @property
    def D(self):
        """The maximal operator A_m + P on the full grid."""
        return self.A_m + self.P

    @property
    def n(self):
        return self.grid.n


def _sample(spec, s):
    """Samples a coefficient specification on the nodes s.

    Returns an array of shape (len(s),) + value shape.
    """
    if callable(spec):
        return np.array([np.asarray(spec(x), dtype=complex) for x in s])
    if isinstance(spec, dict):
        if "poly" not in spec:
            raise BadDimensions(f"coefficient dictionaries need a 'poly' key, got {sorted(spec)}")
        return np.asarray(Polynomial(spec["poly"])(s), dtype=complex)
    if isinstance(spec, str):
        return np.full(len(s), complex(spec.replace(" ", "")))
    if isinstance(spec, (list, tuple, np.ndarray)):
        parts = [_sample(entry, s) for entry in spec]
        if not parts:
            raise BadDimensions("empty coefficient list")
        return np.stack(parts, axis=1)
    return np.full(len(s), complex(spec))


def _as_diagonal(values, n, name):
    """Shapes sampled values into (N, n) diagonal entries."""
    if values.ndim == 1:
        return np.repeat(values[:, None], n, axis=1)
    if values.ndim == 2 and values.shape[1] == n:
        return values
    if values.ndim == 3 and values.shape[1:] == (n, n):
        diag = np.einsum("kii->ki", values)
        if not np.allclose(values - np.einsum("ki,ij->kij", diag, np.eye(n)), 0):
            raise BadDimensions(f"coefficient {name} must be diagonal")
        return diag
    raise BadDimensions(f"coefficient {name} has shape {values.shape[1:]}, expected ({n},) or ({n}, {n})")


def _as_blocks(values, n, name):
    """Shapes sampled values into (N, n, n) matrix blocks."""
    eye = np.eye(n)
    if values.ndim == 1:
        return values[:, None, None] * eye
    if values.ndim == 2 and values.shape[1] == n:
        return values[:, :, None] * eye
    if values.ndim == 3 and values.shape[1:] == (n, n):
        return values
    raise BadDimensions(f"coefficient {name} has shape {values.shape[1:]}, expected ({n}, {n})")


def _as_kernel(values, n):
    """Shapes a sampled integral kernel into (N, 2n, n) blocks."""
    stacked = np.vstack([np.eye(n), np.eye(n)])
    if values.ndim == 1:
        return values[:, None, None] * stacked
    if values.ndim == 2 and n == 1 and values.shape[1] == 2:
        return values[:, :, None]
    if values.ndim == 3 and values.shape[1:] == (2 * n, n):
        return values
    raise BadDimensions(f"kernel has shape {values.shape[1:]}, expected ({2 * n}, {n})")


def _boundary_matrix(spec, n, name):
    """Constant 2n x n boundary matrix, zero when spec is None."""
    if spec is None:
        return np.zeros((2 * n, n), dtype=complex)
    value = _sample(spec, np.zeros(1))[0]
    if value.size != 2 * n * n:
        raise BadDimensions(f"{name} must be a {2 * n}x{n} matrix, got {value.size} entries")
    return value.reshape(2 * n, n)


def difference_matrices(N):
    """First and second difference matrices on a scalar grid of N nodes.

    Interior rows use central differences, the two boundary rows one-sided
    3-point stencils; all are exact on quadratics.

    Args:
        N (int): Node count.

    Returns:
        tuple: (D1, D2), both N x N real arrays.
    """
    h = 1.0 / (N - 1)
    D1 = np.zeros((N, N))
    D2 = np.zeros((N, N))
    j = np.arange(1, N - 1)
    D1[j, j - 1] = -0.5 / h
    D1[j, j + 1] = 0.5 / h
    D2[j, j - 1] = 1.0 / h**2
    D2[j, j] = -2.0 / h**2
    D2[j, j + 1] = 1.0 / h**2
    D1[0, :3] = np.array([-3.0, 4.0, -1.0]) / (2 * h)
    D1[-1, -3:] = np.array([1.0, -4.0, 3.0]) / (2 * h)
    D2[0, :3] = np.array([1.0, -2.0, 1.0]) / h**2
    D2[-1, -3:] = np.array([1.0, -2.0, 1.0]) / h**2
    return D1, D2


def _block_operator(stencil, blocks):
    """Assembles sum_k blocks[j] * stencil[j, k] into a flat (N n) x (N n) matrix."""
    N, n, _ = blocks.shape
    return np.einsum("jk,jpq->jpkq", stencil, blocks).reshape(N * n, N * n)


def _is_zero(blocks):
    return bool(np.all(blocks == 0))


def _annihilates_constants(B):
    ones = np.ones(B.shape[1])
    scale = max(np.abs(B).sum(axis=1).max(), 1.0)
    return bool(np.abs(B @ ones).max() <= 1e-12 * scale)


def build_model(problem, N):
    """Assembles the finite-difference model of a Wentzell problem.

    Args:
        problem (WentzellProblem): The problem.
        N (int): Node count, at least 5.

    Raises:
        BadDimensions: If sizes are inconsistent.
        PositivityViolation: If some a_i drops below a_min or is not real.

    Returns:
        DiscreteModel: The assembled model.
    """
    n = int(problem.n)
    grid = Grid(int(N), n)
    s = grid.nodes

    a = _as_diagonal(_sample(problem.a, s), n, "a")
    if np.any(np.abs(a.imag) > 0):
        raise PositivityViolation("coefficient a must be real")
    a = a.real
    if problem.a_min <= 0:
        raise PositivityViolation(f"a_min must be positive, got {problem.a_min}")
    if a.min() < problem.a_min:
        j, i = np.unravel_index(np.argmin(a), a.shape)
        raise PositivityViolation(
            f"a_{i} = {a[j, i]:.6g} < a_min = {problem.a_min:g} at s = {s[j]:.6g}"
        )
    a_blocks = a[:, :, None] * np.eye(n)
    b = _as_blocks(_sample(problem.b, s), n, "b")
    c = _as_blocks(_sample(problem.c, s), n, "c")
    p1 = _as_blocks(_sample(problem.p1, s), n, "p1")
    p0 = _as_blocks(_sample(problem.p0, s), n, "p0")

    D1, D2 = difference_matrices(grid.N)
    ident = np.eye(grid.N)
    A_m = _block_operator(D2, a_blocks) + _block_operator(D1, b) + _block_operator(ident, c)
    P = _block_operator(D1, p1) + _block_operator(ident, p0)

    L = np.zeros((2 * n, grid.size))
    L[np.arange(2 * n), grid.boundary] = 1.0

    M0 = _boundary_matrix(problem.M0, n, "M0")
    M1 = _boundary_matrix(problem.M1, n, "M1")
    N0 = _boundary_matrix(problem.N0, n, "N0")
    N1 = _boundary_matrix(problem.N1, n, "N1")
    if problem.beta is not None or problem.gamma is not None:
        if n != 1:
            raise BadDimensions("the beta/gamma shorthand is only defined for n = 1")
        beta = complex(problem.beta or 0.0)
        gamma = complex(problem.gamma or 0.0)
        # outer normal at s=0 is -d/ds, at s=1 it is +d/ds
        M0 = M0 + beta * np.array([[-1.0], [0.0]])
        M1 = M1 + beta * np.array([[0.0], [1.0]])
        N0 = N0 + gamma * np.array([[1.0], [0.0]])
        N1 = N1 + gamma * np.array([[0.0], [1.0]])

    eye_n = np.eye(n)
    B0 = M0 @ np.kron(D1[0][None, :], eye_n) + M1 @ np.kron(D1[-1][None, :], eye_n)
    if problem.kernel is not None:
        kernel = _as_kernel(_sample(problem.kernel, s), n)
        weights = np.full(grid.N, grid.h)
        weights[[0, -1]] = grid.h / 2
        Phi = (weights[:, None, None] * kernel).transpose(1, 0, 2).reshape(2 * n, grid.size)
        B0 = B0 + Phi
    C = np.hstack([N0, N1])
    B = B0 + C @ L

    interior = grid.interior
    A0 = A_m[np.ix_(interior, interior)]

    constant_a = bool(np.all(a == a[0]))
    perturbation_free = _is_zero(p1) and _is_zero(p0)
    exact_tier = constant_a and _is_zero(b) and _is_zero(c) and perturbation_free
    interior_conservative = _is_zero(c) and perturbation_free
    conservative = interior_conservative and _annihilates_constants(B)

    full, bdy = Space.FULL_GRID, Space.BOUNDARY
    return DiscreteModel(
        grid=grid,
        problem=problem,
        A_m=LinOp(A_m, full, full),
        L=LinOp(L, full, bdy),
        B=LinOp(B, full, bdy),
        A0=LinOp(A0, Space.INTERIOR_GRID, Space.INTERIOR_GRID),
        P=LinOp(P, full, full),
        B0=LinOp(B0, full, bdy),
        C=C,
        exact_tier=exact_tier,
        conservative=conservative,
        info={"M0": M0, "M1": M1, "N0": N0, "N1": N1, "interior_conservative": interior_conservative, "a": a},
    )


def with_feedback(model, B0=None, C=None):
    """Returns a copy of the model whose feedback is B0 + C @ L.

    Args:
        model (DiscreteModel): The model.
        B0 (array-like | LinOp, optional): New B0, FullGrid -> Boundary. Defaults to the model's.
        C (array-like, optional): New 2n x 2n boundary coupling. Defaults to the model's.

    Returns:
        DiscreteModel: The new model.
    """
    B0 = model.B0 if B0 is None else B0
    if not isinstance(B0, LinOp):
        B0 = LinOp(B0, Space.FULL_GRID, Space.BOUNDARY)
    C = model.C if C is None else np.asarray(C, dtype=complex)
    if C.shape != (2 * model.n, 2 * model.n):
        raise BadDimensions(f"C must be {2 * model.n}x{2 * model.n}, got {C.shape}")
    B = B0 + LinOp(C, Space.BOUNDARY, Space.BOUNDARY) @ model.L
    conservative = model.info["interior_conservative"] and _annihilates_constants(B.matrix)
    return replace(model, B=B, B0=B0, C=C, conservative=conservative)


def wentzell_generator(model):
    """The full-grid generator with the Wentzell condition as a dynamic boundary condition.

    Interior rows are those of A_m + P, boundary rows those of B.

    Args:
        model (DiscreteModel): The model.

    Returns:
        LinOp: FullGrid -> FullGrid generator.
    """
    G = model.D.matrix.copy()
    G[model.grid.boundary, :] = model.B.matrix
    return LinOp(G, Space.FULL_GRID, Space.FULL_GRID)


def constraint_matrix(model):
    """Rows of (A_m + P) at the boundary nodes minus B; their kernel is the Wentzell domain."""
    return model.D.matrix[model.grid.boundary, :] - model.B.matrix


def wentzell_domain_basis(model, as_matrix=False):
    """Orthonormal basis of the discrete Wentzell domain {f : L (A_m + P) f = B f}.

    A DegenerateConstraint warning is issued when the 2n constraint rows are rank deficient;
    the null-space basis is returned anyway.

    Args:
        model (DiscreteModel): The model.
        as_matrix (bool, optional): Return the basis as columns of one matrix. Defaults to False.

    Returns:
        list | np.ndarray: GridFunctions, or the (N n) x dim basis matrix.
    """
    K = constraint_matrix(model)
    rank = np.linalg.matrix_rank(K)
    if rank < K.shape[0]:
        warnings.warn(
            f"Wentzell constraint has rank {rank} < {K.shape[0]}", DegenerateConstraint
        )
    basis = sla.null_space(K)
    if as_matrix:
        return basis
    return [GridFunction.from_flat(basis[:, k], model.grid) for k in range(basis.shape[1])]
