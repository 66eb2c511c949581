"""
Shared helpers for wentzell-lab: error types, the dense complex linear-algebra kernel,
tagged linear operators, convergence tables and report serialization.
"""

import enum
import json
import math
import os
import warnings
from dataclasses import dataclass, field, fields, is_dataclass

import numpy as np
import pandas as pd
import scipy.linalg as sla


class WentzellError(Exception):
    """Base class of every error raised by wentzell-lab."""


class DimensionMismatch(WentzellError, ValueError):
    """Operand shapes do not fit together."""


class BadDimensions(WentzellError, ValueError):
    """A problem or grid has inconsistent sizes."""


class PositivityViolation(WentzellError, ValueError):
    """The leading coefficient drops below the ellipticity floor."""


class BadParameters(WentzellError, ValueError):
    """Model parameters are outside their admissible range."""


class BoundFails(WentzellError, ValueError):
    """A relative bound of order zero does not exist."""


class ConfigError(WentzellError, ValueError):
    """A configuration field is missing or ill-typed."""


class TagMismatch(WentzellError, TypeError):
    """Two tagged operators were composed across different spaces."""


class SingularMatrix(WentzellError, np.linalg.LinAlgError):
    """A linear solve hit a (numerically) singular matrix."""


class ResolventPole(SingularMatrix):
    """The spectral parameter lies in the spectrum of the operator being inverted."""

    def __init__(self, lam, message=None):
        self.lam = lam
        if message is None:
            message = f"lambda={lam} is a pole of the resolvent"
        super().__init__(message)


class SpectrumHit(ResolventPole):
    """A sampled spectral parameter is an eigenvalue of the probed operator."""


class Overflow(WentzellError, OverflowError):
    """A matrix exponential left the representable range."""


class AssumptionFailed(WentzellError, RuntimeError):
    """A standing assumption of the generation experiment is violated."""

    def __init__(self, assumption, message):
        self.assumption = assumption
        super().__init__(f"{assumption}: {message}")


class IoError(WentzellError, OSError):
    """A report could not be written."""


class NoConvergence(UserWarning):
    """An eigenvalue or singular value iteration did not converge."""


class DegenerateConstraint(UserWarning):
    """The discrete Wentzell constraint rows are rank deficient."""


class Space(enum.Enum):
    """Spaces a LinOp can map between."""

    FULL_GRID = "FullGrid"
    INTERIOR_GRID = "InteriorGrid"
    BOUNDARY = "Boundary"
    MODE_SPACE = "ModeSpace"
    PRODUCT = "Product(InteriorGrid,Boundary)"


def as_matrix(A, name="matrix"):
    """Converts the input to a finite two-dimensional complex array.

    Args:
        A (array-like | LinOp): The input. Scalars become 1x1 matrices.
        name (str, optional): Name used in error messages. Defaults to "matrix".

    Raises:
        DimensionMismatch: If the input has more than two dimensions.
        ValueError: If the input contains NaN or Inf.

    Returns:
        np.ndarray: The complex matrix.
    """
    if isinstance(A, LinOp):
        A = A.matrix
    A = np.asarray(A, dtype=complex)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def solve_linear(A, rhs, pivot_tol=1e-14):
    """Solves A X = rhs with an LU factorization.

    Args:
        A (array-like): Square system matrix.
        rhs (array-like): Right-hand side, a vector or a matrix with A's row count.
        pivot_tol (float, optional): Pivots below pivot_tol * ||A||_inf count as zero. Defaults to 1e-14.

    Raises:
        DimensionMismatch: If A is not square or rhs does not match.
        SingularMatrix: If a pivot is below the tolerance.

    Returns:
        np.ndarray: The solution, with the same shape as rhs.
    """
    A = as_matrix(A)
    rhs = np.asarray(rhs, dtype=complex)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"solve_linear needs a square matrix, got {A.shape}")
    if rhs.shape[0] != A.shape[0]:
        raise DimensionMismatch(
            f"right-hand side has {rhs.shape[0]} rows, matrix order is {A.shape[0]}"
        )
    if A.shape[0] == 0:
        return rhs.copy()

    scale = np.abs(A).sum(axis=1).max()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    smallest = np.abs(np.diag(lu)).min()
    if scale == 0 or smallest <= pivot_tol * scale:
        raise SingularMatrix(
            f"pivot {smallest:.3e} below {pivot_tol:g} * ||A|| = {pivot_tol * scale:.3e}"
        )
    return sla.lu_solve((lu, piv), rhs, check_finite=False)


def inverse(A):
    """Returns the inverse of a square matrix through solve_linear."""
    A = as_matrix(A)
    return solve_linear(A, np.eye(A.shape[0], dtype=complex))


def operator_norm(A, norm="sup"):
    """Computes an induced matrix norm.

    Args:
        A (array-like): The matrix.
        norm (str, optional): "sup" for the maximum absolute row sum (induced l-infinity norm)
            or "spectral" for the largest singular value. Defaults to "sup".

    Returns:
        float: The norm, 0 for empty matrices.
    """
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    if norm == "sup":
        return float(np.abs(A).sum(axis=1).max())
    elif norm == "spectral":
        return float(sla.svdvals(A, check_finite=False)[0])
    else:
        raise ValueError(f"Unknown norm {norm!r}, expected 'sup' or 'spectral'")


def matrix_exponential(A, t=1.0):
    """Computes exp(tA) by scaling and squaring with Pade approximation.

    Args:
        A (array-like): Square matrix.
        t (float, optional): Nonnegative time. Defaults to 1.0.

    Raises:
        ValueError: If t is negative.
        Overflow: If the result is not finite.

    Returns:
        np.ndarray: The matrix exponential.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"matrix_exponential needs a square matrix, got {A.shape}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    with np.errstate(over="ignore", invalid="ignore"):
        tA = t * A
        if not np.all(np.isfinite(tA)):
            raise Overflow(f"t * A overflows for t={t}")
        E = sla.expm(tA)
    if not np.all(np.isfinite(E)):
        raise Overflow(f"exp(tA) is not representable for t={t}, ||A||={operator_norm(A):.3e}")
    return E


@dataclass
class SpectralQuantities:
    """Eigenvalues (square input only) and descending singular values."""

    eigenvalues: np.ndarray
    singular_values: np.ndarray
    converged: bool = True


def spectral_quantities(A, eigenvalues=True):
    """Computes eigenvalues and singular values of a matrix.

    Args:
        A (array-like): The matrix.
        eigenvalues (bool, optional): Whether to compute eigenvalues. Ignored for non-square input.
            Defaults to True.

    Returns:
        SpectralQuantities: The spectra. When a LAPACK iteration fails, a NoConvergence warning
            is issued and the missing part is returned empty with converged=False.
    """
    A = as_matrix(A)
    converged = True
    eig = None
    if eigenvalues and A.shape[0] == A.shape[1]:
        try:
            eig = sla.eigvals(A, check_finite=False)
        except np.linalg.LinAlgError as e:
            warnings.warn(f"eigenvalue iteration failed: {e}", NoConvergence)
            eig = np.array([], dtype=complex)
            converged = False
    try:
        sv = sla.svdvals(A, check_finite=False)
    except np.linalg.LinAlgError as e:
        warnings.warn(f"singular value iteration failed: {e}", NoConvergence)
        sv = np.array([], dtype=float)
        converged = False
    return SpectralQuantities(eigenvalues=eig, singular_values=np.sort(sv)[::-1], converged=converged)


@dataclass(frozen=True, eq=False)
class LinOp:
    """A dense complex matrix tagged with the spaces it maps between."""

    matrix: np.ndarray
    domain: Space
    codomain: Space

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, name="LinOp matrix"))

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            if self.domain != other.codomain:
                raise TagMismatch(
                    f"cannot compose {self.domain.value}->{self.codomain.value} "
                    f"after {other.domain.value}->{other.codomain.value}"
                )
            return LinOp(self.matrix @ other.matrix, other.domain, self.codomain)
        return self.matrix @ np.asarray(other, dtype=complex)

    def _check_same(self, other):
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise TagMismatch(
                f"cannot combine {self.domain.value}->{self.codomain.value} "
                f"with {other.domain.value}->{other.codomain.value}"
            )

    def __add__(self, other):
        self._check_same(other)
        return LinOp(self.matrix + other.matrix, self.domain, self.codomain)

    def __sub__(self, other):
        self._check_same(other)
        return LinOp(self.matrix - other.matrix, self.domain, self.codomain)

    def scaled(self, alpha):
        return LinOp(alpha * self.matrix, self.domain, self.codomain)


def fit_loglog_slope(x, y):
    """Least-squares slope of log(y) against log(x).

    Args:
        x (array-like): Positive abscissae.
        y (array-like): Ordinates.

    Returns:
        float | None: The slope, or None when fewer than two points are positive and finite.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2 or keep.sum() != len(y):
        return None
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


@dataclass
class ConvergenceTable:
    """Grid sizes, error norms and the fitted order of convergence in h."""

    N: list
    h: list
    error: list
    quantity: str = "error"
    extra: dict = field(default_factory=dict)

    @property
    def order(self):
        slope = fit_loglog_slope(self.h, self.error)
        return slope

    def to_frame(self):
        frame = pd.DataFrame({"N": self.N, "h": self.h, "error": self.error})
        for key, values in self.extra.items():
            frame[key] = values
        return frame

    def to_dict(self):
        return {
            "quantity": self.quantity,
            "N": list(self.N),
            "h": list(self.h),
            "error": list(self.error),
            "fitted_order": self.order,
            **{key: list(values) for key, values in self.extra.items()},
        }


def to_jsonable(obj):
    """Converts results into plain JSON types.

    Complex numbers and complex arrays become {"real": ..., "imag": ...}; non-finite floats
    become the strings "nan", "inf" and "-inf"; dataclasses, enums, numpy scalars and pandas
    frames are unpacked recursively.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, LinOp):
        return {
            "domain": obj.domain.value,
            "codomain": obj.codomain.value,
            "matrix": to_jsonable(obj.matrix),
        }
    if hasattr(obj, "to_dict") and not isinstance(obj, (pd.DataFrame, pd.Series)):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, pd.DataFrame):
        return {str(col): to_jsonable(obj[col].to_numpy()) for col in obj.columns}
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return {"real": to_jsonable(obj.real), "imag": to_jsonable(obj.imag)}
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"real": to_jsonable(float(obj.real)), "imag": to_jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    raise TypeError(f"Cannot serialize object of type {type(obj).__name__}")


def dumps_report(obj):
    """Serializes a report deterministically (sorted keys, round-trip floats)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def check_file_path(file_path, make_dirs=True):
    """Gets the absolute file path.

    Args:
        file_path (str): The path to the file.
        make_dirs (bool, optional): Whether to create the directory if it does not exist. Defaults to True.

    Raises:
        TypeError: If the input path is not a string.

    Returns:
        str: The absolute path to the file.
    """
    if isinstance(file_path, str):
        file_path = os.path.abspath(os.path.expanduser(file_path))
        file_dir = os.path.dirname(file_path)
        if not os.path.exists(file_dir) and make_dirs:
            os.makedirs(file_dir)
        return file_path
    else:
        raise TypeError("The provided file path must be a string.")


def split_complex_columns(frame):
    """Replaces complex columns of a DataFrame by <name>_real and <name>_imag columns."""
    out = pd.DataFrame(index=frame.index)
    for col in frame.columns:
        values = frame[col].to_numpy()
        if np.iscomplexobj(values):
            out[f"{col}_real"] = values.real
            out[f"{col}_imag"] = values.imag
        else:
            out[col] = values
    return out
