"""Exact Gaussian moments of Hermite products, raw monomials and complex Wick products.

Two independent matching engines live here:

* the diagram sum for E[prod_a H_{p_a}(G_{v_a})], where legs of the same node
  are never paired ("flat" edges are forbidden);
* the Isserlis pairing sum for raw monomials, where every pairing is allowed.

Both enumerate matchings by pairing the first unmatched leg with each legal
partner and memoize on the vector of remaining per-node degrees.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Dict, Iterable, List, Sequence, Tuple, TypeVar

import numpy as np

from .exceptions import InputError, ResourceError
from .utils import Scalar, format_scalar

if TYPE_CHECKING:
    from .chaos import ChaosElement

MAX_LEGS = 28
MAX_PERMANENT = 14
SERIES_MAX_LEGS = 120
PSD_FLOAT_TOL = 1e-12

N = TypeVar("N", Fraction, float)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric PSD matrix with unit diagonal (exact or float entries)."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.entries)
        if d == 0:
            raise InputError("Correlation matrix must have positive dimension")
        for row in self.entries:
            if len(row) != d:
                raise InputError("Correlation matrix must be square")
        for i in range(d):
            if self.entries[i][i] != 1:
                raise InputError(f"Correlation matrix diagonal entry {i + 1} is not 1")
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise InputError(f"Correlation matrix is not symmetric at ({i + 1},{j + 1})")
        if not _is_psd(self.entries, exact=self.exact):
            raise InputError("Correlation matrix is not positive semi-definite")

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(isinstance(value, (Fraction, int)) for row in self.entries for value in row)

    def __getitem__(self, key: Tuple[int, int]) -> Scalar:
        i, j = key
        return self.entries[i][j]

    def canonical(self) -> str:
        return ";".join(",".join(format_scalar(_as_scalar(v)) for v in row) for row in self.entries)

    def as_float(self) -> "CorrelationMatrix":
        return CorrelationMatrix(
            tuple(
                tuple(1.0 if i == j else float(v) for j, v in enumerate(row))
                for i, row in enumerate(self.entries)
            )
        )

    def permuted(self, order: Sequence[int]) -> "CorrelationMatrix":
        return CorrelationMatrix(tuple(tuple(self.entries[i][j] for j in order) for i in order))

    @classmethod
    def identity(cls, d: int) -> "CorrelationMatrix":
        return cls(
            tuple(tuple(Fraction(1 if i == j else 0) for j in range(d)) for i in range(d))
        )

    @classmethod
    def bivariate(cls, rho: Scalar) -> "CorrelationMatrix":
        one: Scalar = Fraction(1) if isinstance(rho, Fraction) else 1.0
        return cls(((one, rho), (rho, one)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]]) -> "CorrelationMatrix":
        return cls(tuple(tuple(_as_scalar(v) for v in row) for row in rows))

    @classmethod
    def from_gram(cls, vectors: Sequence[Sequence[Scalar]]) -> "CorrelationMatrix":
        """Gram matrix of unit vectors; exact when the vectors are rational."""
        rows = []
        for u in vectors:
            rows.append(tuple(sum((a * b for a, b in zip(u, v)), start=_zero_like(u)) for v in vectors))
        if all(isinstance(value, Fraction) for row in rows for value in row):
            return cls(tuple(rows))
        # Float Gram matrices: pin the diagonal at exactly 1.0.
        fixed = tuple(
            tuple(1.0 if i == j else float(value) for j, value in enumerate(row))
            for i, row in enumerate(rows)
        )
        return cls(fixed)


def _zero_like(vector: Sequence[Scalar]) -> Scalar:
    return Fraction(0) if all(isinstance(v, Fraction) for v in vector) else 0.0


def _as_scalar(value: object) -> Scalar:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return float(value)  # type: ignore[arg-type]


def _is_psd(entries: tuple[tuple[Scalar, ...], ...], *, exact: bool) -> bool:
    if not exact:
        matrix = np.array([[float(v) for v in row] for row in entries])
        return bool(np.linalg.eigvalsh(matrix).min() >= -PSD_FLOAT_TOL)
    work = [[Fraction(v) for v in row] for row in entries]
    d = len(work)
    for k in range(d):
        pivot = work[k][k]
        if pivot < 0:
            return False
        if pivot == 0:
            if any(work[k][j] != 0 for j in range(k + 1, d)):
                return False
            continue
        for i in range(k + 1, d):
            factor = work[i][k] / pivot
            if factor == 0:
                continue
            for j in range(k + 1, d):
                work[i][j] -= factor * work[k][j]
    return True


@dataclass(frozen=True)
class MomentQuery:
    """Product of Hermite polynomials as (variable_id, degree) nodes, ids 1-based."""

    nodes: tuple[tuple[int, int], ...]
    correlation: CorrelationMatrix

    def __post_init__(self) -> None:
        d = self.correlation.dimension
        for variable, degree in self.nodes:
            if not 1 <= variable <= d:
                raise InputError(f"Variable id {variable} outside [1..{d}]")
            if degree < 0:
                raise InputError(f"Hermite degree must be non-negative, got {degree}")

    @property
    def total_degree(self) -> int:
        return sum(degree for _, degree in self.nodes)


@dataclass(frozen=True)
class ComplexRational:
    """Exact complex number re + i*im."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, other: "ComplexRational") -> "ComplexRational":
        return ComplexRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexRational") -> "ComplexRational":
        return ComplexRational(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "ComplexRational | int | Fraction") -> "ComplexRational":
        if isinstance(other, ComplexRational):
            return ComplexRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return ComplexRational(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "ComplexRational":
        result = ComplexRational(Fraction(1))
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


CZERO = ComplexRational(Fraction(0))


@dataclass(frozen=True)
class ComplexVectorSet:
    """Vectors a_1..a_d with G_k = <a_k, Z>, Z = X + iY, X, Y independent N(0, I)."""

    vectors: tuple[tuple[ComplexRational, ...], ...]

    def __post_init__(self) -> None:
        if not self.vectors:
            raise InputError("ComplexVectorSet needs at least one vector")
        width = len(self.vectors[0])
        for index, vector in enumerate(self.vectors, start=1):
            if len(vector) != width:
                raise InputError("Complex vectors must share the ambient dimension")
            if all(entry.is_zero for entry in vector):
                raise InputError(f"Complex vector {index} is zero")

    @property
    def d(self) -> int:
        return len(self.vectors)

    def subset(self, indices: Sequence[int]) -> "ComplexVectorSet":
        return ComplexVectorSet(tuple(self.vectors[i] for i in indices))

    def canonical(self) -> str:
        return ";".join(
            ",".join(f"{format_scalar(z.re)}+{format_scalar(z.im)}i" for z in vector)
            for vector in self.vectors
        )


def _matching_sum(
    degrees: Sequence[int],
    weight: Callable[[int, int], N],
    *,
    allow_loops: bool,
    one: N,
) -> N:
    """Sum over perfect matchings of node legs, weighted by products of edge weights."""
    zero = one * 0
    if sum(degrees) % 2:
        return zero
    memo: Dict[Tuple[int, ...], N] = {}

    def walk(state: Tuple[int, ...]) -> N:
        cached = memo.get(state)
        if cached is not None:
            return cached
        first = next((idx for idx, deg in enumerate(state) if deg), None)
        if first is None:
            return one
        rest = list(state)
        rest[first] -= 1
        total = zero
        for partner, remaining in enumerate(rest):
            if remaining == 0:
                continue
            if partner == first and not allow_loops:
                continue
            w = weight(first, partner)
            if w == 0:
                continue
            rest[partner] -= 1
            total = total + remaining * w * walk(tuple(rest))
            rest[partner] += 1
        memo[state] = total
        return total

    return walk(tuple(degrees))


def _check_cap(legs: int, cap: int, what: str) -> None:
    if cap > MAX_LEGS:
        raise ResourceError(f"Requested cap {cap} exceeds the hard cap of {MAX_LEGS} legs")
    if legs > cap:
        raise ResourceError(f"{what} has {legs} legs, above the cap of {cap}")


def _one(correlation: CorrelationMatrix) -> Scalar:
    return Fraction(1) if correlation.exact else 1.0


def hermite_product_moment(query: MomentQuery, *, cap: int = MAX_LEGS) -> Scalar:
    """E[prod_a H_{p_a}(G_{v_a})] by the flat-edge-free matching sum."""
    _check_cap(query.total_degree, cap, "Hermite product")
    corr = query.correlation
    variables = [variable - 1 for variable, _ in query.nodes]
    degrees = [degree for _, degree in query.nodes]

    def weight(i: int, j: int) -> Scalar:
        return corr[variables[i], variables[j]]

    return _matching_sum(degrees, weight, allow_loops=False, one=_one(corr))


def squared_hermite_moment(
    p: Sequence[int], correlation: CorrelationMatrix, *, cap: int = MAX_LEGS
) -> Scalar:
    """E[H_{p_1}(G_1)^2 ... H_{p_d}(G_d)^2] with each node duplicated."""
    if len(p) != correlation.dimension:
        raise InputError(
            f"Got {len(p)} degrees for a correlation matrix of dimension {correlation.dimension}"
        )
    nodes = tuple((i + 1, degree) for i, degree in enumerate(p) for _ in range(2))
    return hermite_product_moment(MomentQuery(nodes, correlation), cap=cap)


def isserlis_moment(
    exponents: Sequence[int], correlation: CorrelationMatrix, *, cap: int = MAX_LEGS
) -> Scalar:
    """E[prod_i G_i^{m_i}] summed over all pairings, self-pairings included."""
    if len(exponents) != correlation.dimension:
        raise InputError("Exponent vector length must match the correlation dimension")
    if any(m < 0 for m in exponents):
        raise InputError("Exponents must be non-negative")
    _check_cap(sum(exponents), cap, "Monomial")

    def weight(i: int, j: int) -> Scalar:
        return correlation[i, j]

    return _matching_sum(exponents, weight, allow_loops=True, one=_one(correlation))


class SeriesMomentEvaluator:
    """Float matching sums E[prod_i H_{r_i}(X_i)] with one memo shared across calls.

    Used by long series (refined Hadamard) whose terms revisit the same degree
    vectors; the memo lives as long as the evaluator.
    """

    def __init__(self, correlation: np.ndarray, *, cap: int = SERIES_MAX_LEGS) -> None:
        self._corr = np.asarray(correlation, dtype=float)
        self._cap = cap
        self._memo: Dict[Tuple[int, ...], float] = {}

    def moment(self, degrees: Sequence[int]) -> float:
        if sum(degrees) > self._cap:
            raise ResourceError(f"Series term has {sum(degrees)} legs, above the cap of {self._cap}")
        if sum(degrees) % 2:
            return 0.0
        return self._walk(tuple(degrees))

    def _walk(self, state: Tuple[int, ...]) -> float:
        cached = self._memo.get(state)
        if cached is not None:
            return cached
        first = next((idx for idx, deg in enumerate(state) if deg), None)
        if first is None:
            return 1.0
        rest = list(state)
        rest[first] -= 1
        total = 0.0
        for partner, remaining in enumerate(rest):
            if remaining == 0 or partner == first:
                continue
            w = self._corr[first, partner]
            if w == 0.0:
                continue
            rest[partner] -= 1
            total += remaining * w * self._walk(tuple(rest))
            rest[partner] += 1
        self._memo[state] = total
        return total


def complex_covariance(a: ComplexVectorSet) -> List[List[ComplexRational]]:
    """E[G_i conj(G_j)] = 2 sum_l a_il conj(a_jl)."""
    matrix: List[List[ComplexRational]] = []
    for u in a.vectors:
        row = []
        for v in a.vectors:
            acc = CZERO
            for x, y in zip(u, v):
                acc = acc + x * y.conjugate()
            row.append(acc * 2)
        matrix.append(row)
    return matrix


def permanent(matrix: Sequence[Sequence[ComplexRational]]) -> ComplexRational:
    """Ryser inclusion-exclusion over column subsets."""
    m = len(matrix)
    if m > MAX_PERMANENT:
        raise ResourceError(f"Permanent of size {m} exceeds the cap of {MAX_PERMANENT}")
    if m == 0:
        return ComplexRational(Fraction(1))
    total = CZERO
    for size in range(1, m + 1):
        sign = -1 if (m - size) % 2 else 1
        for columns in itertools.combinations(range(m), size):
            product = ComplexRational(Fraction(1))
            for row in matrix:
                acc = CZERO
                for column in columns:
                    acc = acc + row[column]
                product = product * acc
                if product.is_zero:
                    break
            total = total + product * sign
    return total


def grouped_permanent(
    block: Sequence[Sequence[ComplexRational]], multiplicities: Sequence[int]
) -> ComplexRational:
    """Permanent of the matrix repeating row/column block i `multiplicities[i]` times.

    Ryser's column subsets are grouped by block: choosing s_j of the p_j copies of
    column block j contributes C(p_j, s_j) identical terms.
    """
    m = sum(multiplicities)
    if m > MAX_PERMANENT:
        raise ResourceError(f"Permanent of size {m} exceeds the cap of {MAX_PERMANENT}")
    total = CZERO
    for counts in itertools.product(*(range(p + 1) for p in multiplicities)):
        chosen = sum(counts)
        if chosen == 0:
            continue
        sign = -1 if (m - chosen) % 2 else 1
        weight = math.prod(math.comb(p, s) for p, s in zip(multiplicities, counts))
        product = ComplexRational(Fraction(weight * sign))
        for i, p_i in enumerate(multiplicities):
            acc = CZERO
            for j, s_j in enumerate(counts):
                if s_j:
                    acc = acc + block[i][j] * s_j
            product = product * acc**p_i
            if product.is_zero:
                break
        total = total + product
    return total


def complex_moment(p: Sequence[int], a: ComplexVectorSet) -> Fraction:
    """E[|G_1^{p_1} ... G_d^{p_d}|^2] as a permanent of sesquilinear covariances."""
    if len(p) != a.d:
        raise InputError("One exponent per complex vector is required")
    if any(value < 1 for value in p):
        raise InputError("Exponents must be positive integers")
    if sum(p) > MAX_PERMANENT:
        raise ResourceError(f"Total exponent {sum(p)} exceeds the cap of {MAX_PERMANENT}")
    value = grouped_permanent(complex_covariance(a), p)
    if value.im != 0:
        raise InputError("Complex moment came out non-real; inputs are inconsistent")
    return value.re


def cov_of_squares(f: "ChaosElement", g: "ChaosElement") -> Fraction:
    """E[F^2 G^2] - E[F^2] E[G^2] through the chaos product calculus."""
    from .chaos import product_expectation

    if f.n != g.n:
        raise InputError("Chaos elements must share the ambient dimension")
    joint = product_expectation([f, f, g, g])
    return joint - product_expectation([f, f]) * product_expectation([g, g])

