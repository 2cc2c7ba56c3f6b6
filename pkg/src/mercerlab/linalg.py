"""Dense Hermitian matrix algebra.

Eigendecomposition, scalar functional calculus and Loewner-order comparison
for finite-dimensional self-adjoint matrices.  Every operator expression in
the package is built on the three primitives in this module:
``spectral_decompose``, ``apply_scalar_function`` and ``loewner_compare``.

All values are immutable after construction and all operations are pure, so
everything here is safe to share between threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    FunctionDomainError,
    InvalidInterval,
    NonHermitianInput,
    SpectrumOutOfDomain,
)

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class SpectralBounds:
    """Interval [m, M] that houses the spectra of every operator of an instance."""

    m: float
    M: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.M)):
            raise InvalidInterval("interval endpoints must be finite")
        if not self.m < self.M:
            raise InvalidInterval(f"need m < M, got m={self.m}, M={self.M}")

    @property
    def width(self) -> float:
        return self.M - self.m

    @property
    def clamp_tol(self) -> float:
        """Band around [m, M] inside which eigenvalues are clamped, not rejected.

        Sums of positive-map images computed in floating point drift slightly
        outside the interval; the band absorbs that drift.
        """
        return 1e-9 * (1.0 + abs(self.m) + abs(self.M))

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return self.m - slack <= t <= self.M + slack


def _as_complex_matrix(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class HermitianOperator:
    """A dense complex self-adjoint matrix.

    Construct through :meth:`from_matrix` (validating) or the convenience
    constructors; the raw dataclass constructor performs no checks.
    """

    entries: np.ndarray

    @classmethod
    def from_matrix(cls, entries) -> "HermitianOperator":
        mat = _as_complex_matrix(entries)
        scale = 1.0 + float(np.max(np.abs(mat))) if mat.size else 1.0
        defect = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if defect > HERMITICITY_TOL * scale:
            raise NonHermitianInput(
                f"matrix differs from its adjoint by {defect:.3e} (allowed {HERMITICITY_TOL * scale:.3e})"
            )
        return cls(0.5 * (mat + mat.conj().T))

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def diagonal(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    @classmethod
    def zero(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def norm2(self) -> float:
        """Spectral norm."""
        return float(np.max(np.abs(np.linalg.eigvalsh(self.entries)))) if self.dim else 0.0

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def scalar(self) -> float:
        """The single entry of a 1x1 operator."""
        if self.dim != 1:
            raise DimensionMismatch(f"scalar() needs dim 1, got {self.dim}")
        return float(self.entries[0, 0].real)

    # Operator expressions combine by linear arithmetic; products stay in
    # ndarray-land because they are not Hermitian in general.
    def __add__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        self._check_same_dim(other)
        return HermitianOperator(self.entries + other.entries)

    def __sub__(self, other):
        if not isinstance(other, HermitianOperator):
            return NotImplemented
        self._check_same_dim(other)
        return HermitianOperator(self.entries - other.entries)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return HermitianOperator(float(scalar) * self.entries)

    __rmul__ = __mul__

    def __neg__(self):
        return HermitianOperator(-self.entries)

    def _check_same_dim(self, other: "HermitianOperator") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim} differ")

    def to_json(self) -> dict:
        """Matrix exchange object: {"dim": n, "re": [[...]], "im": [[...]]}, row-major."""
        return {
            "dim": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianOperator":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        if re.shape != im.shape:
            raise DimensionMismatch("re and im parts have different shapes")
        mat = re + 1j * im
        if "dim" in obj and mat.shape != (obj["dim"], obj["dim"]):
            raise DimensionMismatch(f"declared dim {obj['dim']} does not match shape {mat.shape}")
        return cls.from_matrix(mat)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


class Relation(enum.Enum):
    EQUAL = "Equal"
    LESS_EQUAL = "LessEqual"
    GREATER_EQUAL = "GreaterEqual"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class OrderVerdict:
    """Outcome of a Loewner-order comparison of two operators.

    ``gap_min_eigenvalue`` is the minimum eigenvalue of the difference in the
    direction the relation refers to (B - A for LessEqual and for the failed
    A <= B of Incomparable); ``witness_vector`` is a unit vector attaining it.
    """

    relation: Relation
    gap_min_eigenvalue: float
    witness_vector: np.ndarray

    @property
    def is_ordered_below(self) -> bool:
        """True when the first operand is <= the second (Equal counts)."""
        return self.relation in (Relation.LESS_EQUAL, Relation.EQUAL)

    def to_json(self) -> dict:
        return {
            "relation": self.relation.value,
            "gap_min_eigenvalue": self.gap_min_eigenvalue,
        }


def default_order_tolerance(*operators: HermitianOperator) -> float:
    """Absolute PSD tolerance 1e-9 * (1 + max spectral norm).

    Eigensolver backward error scales with the norm of the input, so the
    tolerance must as well.
    """
    top = max((op.norm2() for op in operators), default=0.0)
    return 1e-9 * (1.0 + top)


def spectral_decompose(a: HermitianOperator) -> SpectralDecomposition:
    """Eigendecomposition A = U diag(lambda) U* with ascending eigenvalues."""
    mat = a.entries
    scale = 1.0 + float(np.max(np.abs(mat))) if mat.size else 1.0
    defect = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if defect > HERMITICITY_TOL * scale:
        raise NonHermitianInput(f"self-adjointness defect {defect:.3e} exceeds tolerance")
    eigenvalues, eigenvectors = np.linalg.eigh(mat)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def spectrum_range(a: HermitianOperator) -> Tuple[float, float]:
    """(min, max) eigenvalue of a Hermitian operator."""
    dec = spectral_decompose(a)
    return float(dec.eigenvalues[0]), float(dec.eigenvalues[-1])


def _evaluate_scalar(f: Callable[[np.ndarray], np.ndarray], values: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        out = np.asarray(f(values), dtype=float)
    if not np.all(np.isfinite(out)):
        bad = values[~np.isfinite(out)]
        raise FunctionDomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    return out


def apply_scalar_function(
    f: Callable[[np.ndarray], np.ndarray],
    a: HermitianOperator,
    bounds: SpectralBounds,
) -> HermitianOperator:
    """Functional calculus f(A) = U diag(f(lambda)) U* on spectrum inside [m, M].

    Eigenvalues inside the clamp band around [m, M] are clamped onto the
    interval before evaluating f; eigenvalues farther out raise
    ``SpectrumOutOfDomain``.  ``f`` may be any vectorized callable; values at
    which it is undefined raise ``FunctionDomainError``.
    """
    dec = spectral_decompose(a)
    lam = dec.eigenvalues
    tol = bounds.clamp_tol
    if lam[0] < bounds.m - tol or lam[-1] > bounds.M + tol:
        raise SpectrumOutOfDomain(
            f"spectrum [{lam[0]:.12g}, {lam[-1]:.12g}] leaves [{bounds.m:.12g}, {bounds.M:.12g}] "
            f"by more than {tol:.3e}"
        )
    clamped = np.clip(lam, bounds.m, bounds.M)
    values = _evaluate_scalar(f, clamped)
    u = dec.eigenvectors
    mat = (u * values) @ u.conj().T
    return HermitianOperator(0.5 * (mat + mat.conj().T))


def apply_to_spectrum(f: Callable[[np.ndarray], np.ndarray], a: HermitianOperator) -> HermitianOperator:
    """Unclamped functional calculus: evaluate f on the spectrum as it is.

    Used where no ambient [m, M] contract exists (e.g. applying the inverse
    generator of a quasi-arithmetic mean to an already-assembled operator).
    """
    dec = spectral_decompose(a)
    values = _evaluate_scalar(f, dec.eigenvalues)
    u = dec.eigenvectors
    mat = (u * values) @ u.conj().T
    return HermitianOperator(0.5 * (mat + mat.conj().T))


def loewner_compare(
    a: HermitianOperator,
    b: HermitianOperator,
    tol_abs: float | None = None,
) -> OrderVerdict:
    """Compare A and B in the Loewner order (A <= B iff B - A is PSD).

    The verdict is Equal when B - A vanishes to tolerance, LessEqual /
    GreaterEqual when the corresponding difference is PSD up to ``tol_abs``,
    and Incomparable when the difference is indefinite beyond tolerance.
    """
    a._check_same_dim(b)
    if tol_abs is None:
        tol_abs = default_order_tolerance(a, b)
    diff = b.entries - a.entries
    lam, vecs = np.linalg.eigh(0.5 * (diff + diff.conj().T))
    min_ba = float(lam[0])            # min eig of B - A
    min_ab = float(-lam[-1])          # min eig of A - B
    norm_diff = max(abs(lam[0]), abs(lam[-1]))
    if min_ba >= -tol_abs and min_ab >= -tol_abs and norm_diff <= tol_abs * a.dim:
        return OrderVerdict(Relation.EQUAL, min_ba, vecs[:, 0])
    if min_ba >= -tol_abs:
        return OrderVerdict(Relation.LESS_EQUAL, min_ba, vecs[:, 0])
    if min_ab >= -tol_abs:
        return OrderVerdict(Relation.GREATER_EQUAL, min_ab, vecs[:, -1])
    return OrderVerdict(Relation.INCOMPARABLE, min_ba, vecs[:, 0])
