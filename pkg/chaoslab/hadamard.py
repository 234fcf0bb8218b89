"""Refined Hadamard identity: det(S)^{-1/2} as a series of squared Hermite moments.

For an admissible S (Z = diag S < I, Z + S < 2I) put
Sigma = I - (1/2)(I - Z)^{-1/2} (S - Z) (I - Z)^{-1/2}; then

    det(S)^{-1/2} = sum_k E[prod_i H_{k_i}(X_i)^2] / prod_i k_i!
                    * prod_i sqrt(S_ii) (1 - S_ii)^{k_i},

with X centered Gaussian of correlation Sigma. Every term is non-negative, so
partial sums increase and each one yields an upper bound on det S.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import AdmissibilityError, InputError, InternalError
from .hermite import linearize_int, normalized_hermite_eval
from .moments import (
    MAX_LEGS,
    SERIES_MAX_LEGS,
    CorrelationMatrix,
    SeriesMomentEvaluator,
    squared_hermite_moment,
)
from .reports import InequalityId, VerificationReport, make_report
from .utils import Scalar, format_scalar

RESCALE_FACTOR = 0.9
DEFAULT_ORDER = 40
CLOSED_FORM_RTOL = 1e-12
# Cramer's bound: |H_k(x)| <= CRAMER * sqrt(k!) * exp(x^2 / 4).
CRAMER = 1.086435


def _exact_pivots(rows: Sequence[Sequence[Fraction]]) -> List[Fraction]:
    work = [list(row) for row in rows]
    d = len(work)
    pivots = []
    for k in range(d):
        pivot = work[k][k]
        pivots.append(pivot)
        if pivot == 0:
            break
        for i in range(k + 1, d):
            factor = work[i][k] / pivot
            if factor:
                for j in range(k, d):
                    work[i][j] -= factor * work[k][j]
    return pivots


@dataclass(frozen=True)
class SPDMatrix:
    """Symmetric positive definite matrix, exact or float."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.entries)
        if d == 0 or any(len(row) != d for row in self.entries):
            raise InputError("Matrix must be square and non-empty")
        for i in range(d):
            for j in range(i):
                if self.entries[i][j] != self.entries[j][i]:
                    raise InputError(f"Matrix is not symmetric at ({i + 1},{j + 1})")
        if not self._positive_definite():
            raise InputError("Matrix is not positive definite")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Scalar]]) -> "SPDMatrix":
        parsed = []
        for row in rows:
            parsed.append(
                tuple(
                    Fraction(v) if isinstance(v, (Fraction, int)) else float(v) for v in row
                )
            )
        return cls(tuple(parsed))

    @property
    def dimension(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.entries for v in row)

    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def diagonal(self) -> tuple[Scalar, ...]:
        return tuple(self.entries[i][i] for i in range(self.dimension))

    def det(self) -> Scalar:
        if self.exact:
            return math.prod(_exact_pivots(self.entries), start=Fraction(1))  # type: ignore[arg-type]
        return float(np.linalg.det(self.array()))

    def scaled(self, c: float) -> "SPDMatrix":
        return SPDMatrix(tuple(tuple(float(v) * c for v in row) for row in self.entries))

    def canonical(self) -> str:
        return ";".join(",".join(format_scalar(v) for v in row) for row in self.entries)

    def _positive_definite(self) -> bool:
        if self.exact:
            return all(p > 0 for p in _exact_pivots(self.entries))  # type: ignore[arg-type]
        return bool(np.linalg.eigvalsh(self.array()).min() > 0)


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    diagnostics: tuple[str, ...]


def _shifted(s: SPDMatrix) -> np.ndarray:
    """Z + S."""
    matrix = s.array()
    return matrix + np.diag(np.diag(matrix))


def admissible(s: SPDMatrix) -> Admissibility:
    """S > 0, every S_ii < 1 and lambda_max(Z + S) < 2."""
    diagnostics = []
    for i, value in enumerate(s.diagonal(), start=1):
        if not value < 1:
            diagnostics.append(f"S_{i}{i} = {format_scalar(value)} is not < 1")
    if s.exact:
        margin = [
            [(2 if i == j else 0) - s.entries[i][j] * (2 if i == j else 1) for j in range(s.dimension)]
            for i in range(s.dimension)
        ]
        inside = all(p > 0 for p in _exact_pivots(margin))  # type: ignore[arg-type]
    else:
        inside = bool(np.linalg.eigvalsh(_shifted(s)).max() < 2)
    if not inside:
        top = float(np.linalg.eigvalsh(_shifted(s)).max())
        diagnostics.append(f"largest eigenvalue of Z + S is {top:.6g}, not < 2")
    return Admissibility(not diagnostics, tuple(diagnostics))


def _require_admissible(s: SPDMatrix) -> None:
    check = admissible(s)
    if not check.ok:
        raise AdmissibilityError(check.diagnostics)


def rescale(s: SPDMatrix, factor: float = RESCALE_FACTOR) -> Tuple[float, SPDMatrix]:
    """c = factor * min(1 / max S_ii, 2 / lambda_max(Z + S)); det S = det(cS) / c^d."""
    if not 0 < factor < 1:
        raise InputError("Rescale factor must lie in (0, 1)")
    top_diag = max(float(v) for v in s.diagonal())
    top_eig = float(np.linalg.eigvalsh(_shifted(s)).max())
    c = factor * min(1.0 / top_diag, 2.0 / top_eig)
    return c, s.scaled(c)


@dataclass(frozen=True)
class HadamardDecomposition:
    z: tuple[Scalar, ...]
    sigma: CorrelationMatrix
    d: tuple[Scalar, ...]

    @property
    def exact(self) -> bool:
        return self.sigma.exact


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def _exact_sigma(s: SPDMatrix) -> Optional[tuple[tuple[Fraction, ...], ...]]:
    """Sigma in rationals when every needed (1 - S_ii)(1 - S_jj) is a rational square."""
    if not s.exact:
        return None
    d = s.dimension
    rows: List[List[Fraction]] = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(i):
            entry = Fraction(s.entries[i][j])
            if entry == 0:
                continue
            root = _rational_sqrt((1 - Fraction(s.entries[i][i])) * (1 - Fraction(s.entries[j][j])))
            if root is None:
                return None
            rows[i][j] = rows[j][i] = -entry / (2 * root)
    return tuple(tuple(row) for row in rows)


def decompose(s: SPDMatrix) -> HadamardDecomposition:
    _require_admissible(s)
    z = s.diagonal()
    exact_rows = _exact_sigma(s)
    if exact_rows is not None:
        sigma = CorrelationMatrix(exact_rows)
        weights: tuple[Scalar, ...] = tuple((1 - Fraction(v)) / (2 - Fraction(v)) for v in z)
    else:
        matrix = s.array()
        diag = np.diag(matrix)
        scale = 1.0 / np.sqrt(1.0 - diag)
        raw = np.eye(s.dimension) - 0.5 * np.outer(scale, scale) * (matrix - np.diag(diag))
        sigma = CorrelationMatrix(
            tuple(
                tuple(1.0 if i == j else float(raw[i, j]) for j in range(s.dimension))
                for i in range(s.dimension)
            )
        )
        weights = tuple(float((1 - v) / (2 - v)) for v in diag)
    if float(np.linalg.eigvalsh(_sigma_array(sigma)).min()) <= 0:
        raise InternalError("Sigma is not positive definite for an admissible matrix")
    return HadamardDecomposition(z=z, sigma=sigma, d=weights)


def _sigma_array(sigma: CorrelationMatrix) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in sigma.entries])


def _orders(d: int, total: int) -> Iterator[tuple[int, ...]]:
    """Multi-orders with sum `total`, in lexicographic order."""
    if d == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _orders(d - 1, total - head):
            yield (head, *tail)


class _SquaredMoments:
    """E[prod_i H_{k_i}(X_i)^2] in floats: each square is linearized, then one memoized matching sum."""

    def __init__(self, sigma: CorrelationMatrix) -> None:
        self._evaluator = SeriesMomentEvaluator(_sigma_array(sigma), cap=SERIES_MAX_LEGS)

    def __call__(self, k: Sequence[int]) -> float:
        expansions = [linearize_int(k_i, k_i) for k_i in k]
        total = 0.0
        for choice in itertools.product(*expansions):
            weight = math.prod(c for _, c in choice)
            total += weight * self._evaluator.moment([r for r, _ in choice])
        return total


@dataclass(frozen=True)
class SeriesResult:
    """Partial sums by total order; ``partial_sums[N]`` includes every |k| <= N."""

    order_sums: tuple[float, ...]
    partial_sums: tuple[float, ...]
    exact: bool

    @property
    def value(self) -> float:
        return self.partial_sums[-1]

    @property
    def tail_ratio(self) -> Optional[float]:
        """Ratio of the last two order subtotals; a decay heuristic, not a bound."""
        if len(self.order_sums) < 2 or self.order_sums[-2] == 0:
            return None
        return self.order_sums[-1] / self.order_sums[-2]


def hadamard_series(
    s: SPDMatrix, order: int = DEFAULT_ORDER, *, exact: Optional[bool] = None
) -> SeriesResult:
    """Simplex-truncated series, summed in lexicographic order within each total order.

    The exact route needs a rational Sigma and 2 * order within the matching
    cap; ``exact=None`` takes it whenever it is available.
    """
    if order < 0:
        raise InputError("Truncation order must be non-negative")
    if 2 * order > SERIES_MAX_LEGS:
        raise InputError(f"Truncation order is capped at {SERIES_MAX_LEGS // 2}")
    decomposition = decompose(s)
    available = decomposition.exact and 2 * order <= MAX_LEGS
    if exact and not available:
        raise InputError("Exact series needs a rational Sigma and 2 * order <= the matching cap")
    use_exact = available if exact is None else exact
    diagonal = s.diagonal()
    prefactor = math.prod(math.sqrt(float(v)) for v in diagonal)
    d = s.dimension
    order_sums: List[float] = []
    if use_exact:
        ratios_exact = [1 - Fraction(v) for v in diagonal]
        for total in range(order + 1):
            subtotal = Fraction(0)
            for k in _orders(d, total):
                moment = squared_hermite_moment(k, decomposition.sigma, cap=MAX_LEGS)
                weight = math.prod((r**k_i for r, k_i in zip(ratios_exact, k)), start=Fraction(1))
                subtotal += Fraction(moment) * weight / math.prod(math.factorial(k_i) for k_i in k)
            order_sums.append(prefactor * float(subtotal))
    else:
        ratios = [1.0 - float(v) for v in diagonal]
        moments = _SquaredMoments(decomposition.sigma)
        for total in range(order + 1):
            subtotal = 0.0
            for k in _orders(d, total):
                weight = math.prod(r**k_i / math.factorial(k_i) for r, k_i in zip(ratios, k))
                subtotal += moments(k) * weight
            order_sums.append(prefactor * subtotal)
    return SeriesResult(
        order_sums=tuple(order_sums),
        partial_sums=tuple(itertools.accumulate(order_sums)),
        exact=use_exact,
    )


def reduced_determinant(decomposition: HadamardDecomposition) -> float:
    """det(I - 2 D Sigma)."""
    sigma = _sigma_array(decomposition.sigma)
    weights = np.diag([float(v) for v in decomposition.d])
    return float(np.linalg.det(np.eye(sigma.shape[0]) - 2 * weights @ sigma))


def closed_form(s: SPDMatrix) -> float:
    """det(I - 2 D Sigma)^{-1/2} prod (S_ii (2 - S_ii))^{-1/2} prod sqrt(S_ii), checked against det(S)^{-1/2}."""
    decomposition = decompose(s)
    diagonal = [float(v) for v in s.diagonal()]
    value = reduced_determinant(decomposition) ** -0.5
    for v in diagonal:
        value *= math.sqrt(v) / math.sqrt(v * (2 - v))
    direct = float(s.det()) ** -0.5
    if not math.isclose(value, direct, rel_tol=CLOSED_FORM_RTOL):
        raise InternalError(f"Closed form {value!r} disagrees with det(S)^(-1/2) = {direct!r}")
    return value


def determinant_upper_bounds(s: SPDMatrix, order: int = DEFAULT_ORDER) -> List[float]:
    """(partial sum)^{-2} for each truncation order; each one is >= det S."""
    return [value**-2 for value in hadamard_series(s, order).partial_sums]


@dataclass(frozen=True)
class MehlerCheck:
    partial: float
    closed: float
    tail_bound: float

    @property
    def within(self) -> bool:
        gap = self.closed - self.partial
        slack = 1e-12 * self.closed
        return -slack <= gap <= self.tail_bound + slack


def mehler_1d_check(z: float, x: float, order: int) -> MehlerCheck:
    """sum_{k <= N} H_k(x)^2 z^k / k! against (1 - z^2)^{-1/2} exp(z x^2 / (1 + z))."""
    if not 0 < z < 1:
        raise InputError("z must lie in (0, 1)")
    if order < 0:
        raise InputError("Truncation order must be non-negative")
    partial = math.fsum(normalized_hermite_eval(k, x) ** 2 * z**k for k in range(order + 1))
    closed = (1 - z * z) ** -0.5 * math.exp(z * x * x / (1 + z))
    tail = CRAMER**2 * math.exp(x * x / 2) * z ** (order + 1) / (1 - z)
    return MehlerCheck(partial=partial, closed=closed, tail_bound=tail)


def classical_margin(s: SPDMatrix, *, seed: Optional[int] = None) -> VerificationReport:
    """prod S_ii >= det S."""
    diagonal = s.diagonal()
    if s.exact:
        lhs: Scalar = math.prod(diagonal, start=Fraction(1))  # type: ignore[arg-type]
    else:
        lhs = math.prod(float(v) for v in diagonal)
    return make_report(InequalityId.CLASSICAL_HADAMARD, lhs, s.det(), s.canonical(), seed=seed)


def series_trace(result: SeriesResult) -> Dict[str, List[float]]:
    return {
        "order": list(range(len(result.partial_sums))),
        "order_sum": list(result.order_sums),
        "partial_sum": list(result.partial_sums),
    }
