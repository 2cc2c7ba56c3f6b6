"""Positive linear maps between matrix algebras and unital families of them.

Maps are realized structurally, never as abstract superoperator matrices:
compressions V* A V, weighted traces w tr(A) I, pinching to diagonal blocks,
and nonnegative combinations of these.  Positivity then holds by
construction.  A family Phi_1..Phi_n is unital when sum_i Phi_i(I) = I on the
codomain; ``normalize_family`` enforces that by a congruence with the inverse
square root of sum_i Phi_i(I).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import ArityMismatch, DimensionMismatch, InvalidInterval, SingularNormalizer
from .linalg import HermitianOperator


@dataclass(frozen=True)
class Compression:
    """A |-> V* A V with V of shape (dim_in, dim_out)."""

    v: np.ndarray

    @property
    def dim_in(self) -> int:
        return self.v.shape[0]

    @property
    def dim_out(self) -> int:
        return self.v.shape[1]

    def apply(self, mat: np.ndarray) -> np.ndarray:
        return self.v.conj().T @ mat @ self.v


@dataclass(frozen=True)
class WeightedTrace:
    """A |-> w tr(A) I on the codomain; w >= 0.

    No 1/dim normalization is built in: the weight is chosen so that
    unitality holds at the family level.
    """

    weight: float
    dim_in: int
    dim_out: int

    def __post_init__(self):
        if self.weight < 0:
            raise InvalidInterval(f"trace weight must be nonnegative, got {self.weight}")

    def apply(self, mat: np.ndarray) -> np.ndarray:
        return self.weight * np.trace(mat) * np.eye(self.dim_out, dtype=np.complex128)


@dataclass(frozen=True)
class Pinching:
    """A |-> sum_j P_j A P_j for projections P_j onto an index partition."""

    blocks: Tuple[Tuple[int, ...], ...]
    dim: int

    def __post_init__(self):
        seen = sorted(i for block in self.blocks for i in block)
        if seen != list(range(self.dim)):
            raise InvalidInterval(f"blocks {self.blocks} do not partition range({self.dim})")

    @property
    def dim_in(self) -> int:
        return self.dim

    @property
    def dim_out(self) -> int:
        return self.dim

    def apply(self, mat: np.ndarray) -> np.ndarray:
        out = np.zeros_like(mat)
        for block in self.blocks:
            idx = np.ix_(block, block)
            out[idx] = mat[idx]
        return out


@dataclass(frozen=True)
class ScaledSum:
    """Nonnegative combination sum_j c_j Phi_j of maps with common dims."""

    children: Tuple["PositiveLinearMap", ...]
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        if len(self.children) != len(self.coefficients) or not self.children:
            raise ArityMismatch("children and coefficients must be non-empty and equal length")
        if any(c < 0 for c in self.coefficients):
            raise InvalidInterval("coefficients must be nonnegative")
        dims = {(child.dim_in, child.dim_out) for child in self.children}
        if len(dims) != 1:
            raise DimensionMismatch(f"children have mixed dimensions {dims}")

    @property
    def dim_in(self) -> int:
        return self.children[0].dim_in

    @property
    def dim_out(self) -> int:
        return self.children[0].dim_out

    def apply(self, mat: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim_out, self.dim_out), dtype=np.complex128)
        for coeff, child in zip(self.coefficients, self.children):
            out += coeff * child.apply(mat)
        return out


PositiveLinearMap = Union[Compression, WeightedTrace, Pinching, ScaledSum]


def apply_map(phi: PositiveLinearMap, a: HermitianOperator) -> HermitianOperator:
    """Image Phi(A); Hermitian-preserving and positive by construction."""
    if a.dim != phi.dim_in:
        raise DimensionMismatch(f"operator dim {a.dim} does not match map dim_in {phi.dim_in}")
    mat = phi.apply(a.entries)
    return HermitianOperator(0.5 * (mat + mat.conj().T))


@dataclass(frozen=True)
class MapFamily:
    """Ordered positive maps Phi_1..Phi_n with common dimensions."""

    maps: Tuple[PositiveLinearMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise ArityMismatch("a family needs at least one map")
        dims = {(phi.dim_in, phi.dim_out) for phi in self.maps}
        if len(dims) != 1:
            raise DimensionMismatch(f"maps have mixed dimensions {dims}")

    @property
    def size(self) -> int:
        return len(self.maps)

    @property
    def dim_in(self) -> int:
        return self.maps[0].dim_in

    @property
    def dim_out(self) -> int:
        return self.maps[0].dim_out

    def image_of_identity(self) -> HermitianOperator:
        return family_sum(self, [HermitianOperator.identity(self.dim_in)] * self.size)


def family_sum(family: MapFamily, operators: Sequence[HermitianOperator]) -> HermitianOperator:
    """sum_i Phi_i(A_i) for one operator per map."""
    if len(operators) != family.size:
        raise ArityMismatch(f"{family.size} maps but {len(operators)} operators")
    total = np.zeros((family.dim_out, family.dim_out), dtype=np.complex128)
    for phi, a in zip(family.maps, operators):
        total += apply_map(phi, a).entries
    return HermitianOperator(0.5 * (total + total.conj().T))


def unitality_defect(family: MapFamily) -> float:
    """Spectral-norm distance of sum_i Phi_i(I) from the identity."""
    image = family.image_of_identity()
    return (image - HermitianOperator.identity(family.dim_out)).norm2()


def kraus_terms(phi: PositiveLinearMap) -> List[Tuple[float, np.ndarray]]:
    """Decompose a map as sum_j c_j V_j* A V_j with c_j >= 0."""
    if isinstance(phi, Compression):
        return [(1.0, phi.v)]
    if isinstance(phi, WeightedTrace):
        terms = []
        for k in range(phi.dim_in):
            for l in range(phi.dim_out):
                v = np.zeros((phi.dim_in, phi.dim_out), dtype=np.complex128)
                v[k, l] = 1.0
                terms.append((phi.weight, v))
        return terms
    if isinstance(phi, Pinching):
        terms = []
        for block in phi.blocks:
            proj = np.zeros((phi.dim, phi.dim), dtype=np.complex128)
            proj[block, block] = 1.0
            terms.append((1.0, proj))
        return terms
    if isinstance(phi, ScaledSum):
        terms = []
        for coeff, child in zip(phi.coefficients, phi.children):
            terms.extend((coeff * c, v) for c, v in kraus_terms(child))
        return terms
    raise TypeError(f"unknown map kind {type(phi)!r}")


def _conjugated(phi: PositiveLinearMap, t: np.ndarray) -> PositiveLinearMap:
    """The map A |-> T Phi(A) T for Hermitian T, expressed structurally."""
    if isinstance(phi, Compression):
        return Compression(phi.v @ t)
    terms = kraus_terms(phi)
    children = tuple(Compression(v @ t) for _, v in terms)
    coefficients = tuple(c for c, _ in terms)
    if len(children) == 1 and coefficients[0] == 1.0:
        return children[0]
    return ScaledSum(children=children, coefficients=coefficients)


def normalize_family(family: MapFamily, floor: float = 1e-12) -> MapFamily:
    """Rescale a positive family so that sum_i Phi_i(I) = I.

    Applies the congruence X |-> S^{-1/2} X S^{-1/2} with S = sum_i Phi_i(I),
    which preserves positivity and the structural kinds.  Raises
    ``SingularNormalizer`` when S has an eigenvalue <= ``floor``.
    """
    s = family.image_of_identity().entries
    lam, u = np.linalg.eigh(s)
    if float(lam[0]) <= floor:
        raise SingularNormalizer(f"sum of identity images has min eigenvalue {lam[0]:.3e}")
    inv_sqrt = (u / np.sqrt(lam)) @ u.conj().T
    return MapFamily(maps=tuple(_conjugated(phi, inv_sqrt) for phi in family.maps))


# --------------------------------------------------------------------------
# Map spec JSON
# --------------------------------------------------------------------------

def _complex_to_json(mat: np.ndarray) -> dict:
    return {"re": mat.real.tolist(), "im": mat.imag.tolist()}


def _complex_from_json(obj: dict) -> np.ndarray:
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)


def map_to_json(phi: PositiveLinearMap) -> dict:
    if isinstance(phi, Compression):
        return {"kind": "compression", "V": _complex_to_json(phi.v)}
    if isinstance(phi, WeightedTrace):
        return {"kind": "trace", "w": phi.weight}
    if isinstance(phi, Pinching):
        return {"kind": "pinching", "blocks": [list(b) for b in phi.blocks]}
    if isinstance(phi, ScaledSum):
        return {
            "kind": "scaled-sum",
            "coefficients": list(phi.coefficients),
            "children": [map_to_json(child) for child in phi.children],
        }
    raise TypeError(f"unknown map kind {type(phi)!r}")


def map_from_json(obj: dict, dim_in: int | None = None, dim_out: int | None = None) -> PositiveLinearMap:
    """Build a map from its JSON spec.

    Trace maps carry no dimensions in their spec, so ``dim_in``/``dim_out``
    must be supplied for them (the family context normally provides both).
    """
    kind = obj.get("kind")
    if kind == "compression":
        return Compression(v=_complex_from_json(obj["V"]))
    if kind == "trace":
        if dim_in is None or dim_out is None:
            raise DimensionMismatch("trace map spec needs explicit dim_in and dim_out")
        return WeightedTrace(weight=float(obj["w"]), dim_in=dim_in, dim_out=dim_out)
    if kind == "pinching":
        blocks = tuple(tuple(int(i) for i in block) for block in obj["blocks"])
        dim = sum(len(b) for b in blocks)
        return Pinching(blocks=blocks, dim=dim)
    if kind == "scaled-sum":
        children = tuple(map_from_json(c, dim_in, dim_out) for c in obj["children"])
        return ScaledSum(children=children, coefficients=tuple(float(c) for c in obj["coefficients"]))
    raise ValueError(f"unknown map kind {kind!r}")


def family_to_json(family: MapFamily) -> list:
    return [map_to_json(phi) for phi in family.maps]


def family_from_json(objs: Sequence[dict], dim_in: int | None = None, dim_out: int | None = None) -> MapFamily:
    return MapFamily(maps=tuple(map_from_json(obj, dim_in, dim_out) for obj in objs))
