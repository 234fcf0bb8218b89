"""Polarization bounds, multilinear forms and the sphere optimizer.

Bounds are carried in the log domain. The optimizer is a multi-start projected
gradient ascent on sum_i log|F_i| over the unit sphere; its value is the value
at a feasible point and therefore only ever a lower bound on the supremum.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .chaos import ChaosElement, product_expectation
from .exceptions import InputError, InternalError, OptimizerStall
from .hermite import chi2_moment
from .moments import MAX_LEGS
from .reports import InequalityId, VerificationReport, make_report
from .utils import Scalar, format_scalar, instance_rng, parse_scalar

FRENKEL_CONSTANT = 1.91
COMPARE_TOL = 1e-9
SUP_BOUND_SLACK = 1e-9
POLARIZATION_SLACK = 1e-7
# Unit linear forms in at most this many factors have a known sharp constant.
PROVEN_POLARIZATION_DIM = 5
ARMIJO = 1e-4
MAX_PERTURBATIONS = 20

Index = Tuple[int, ...]


def _log_fraction(value: Fraction) -> float:
    return math.log(value.numerator) - math.log(value.denominator)


def _exact_sqrt(value: Fraction) -> Optional[Fraction]:
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class MultilinearForm:
    """sum over strictly increasing 1-based index tuples of coeff * x_{i_1} ... x_{i_k}."""

    n: int
    k: int
    terms: tuple[tuple[Index, Scalar], ...]

    def __post_init__(self) -> None:
        if self.n < 1 or self.k < 1:
            raise InputError("Forms need n >= 1 and k >= 1")
        if not self.terms:
            raise InputError("A multilinear form needs at least one non-zero coefficient")
        for index, coeff in self.terms:
            if len(index) != self.k:
                raise InputError(f"Index {index} does not have {self.k} entries")
            if any(b <= a for a, b in zip(index, index[1:])):
                raise InputError(f"Index {index} is not strictly increasing")
            if not 1 <= index[0] or index[-1] > self.n:
                raise InputError(f"Index {index} outside [1..{self.n}]")
            if coeff == 0:
                raise InputError("Zero coefficients are not stored")

    @classmethod
    def from_dict(cls, n: int, k: int, coeffs: Mapping[Index, Scalar]) -> "MultilinearForm":
        return cls(n, k, tuple(sorted((tuple(idx), c) for idx, c in coeffs.items() if c != 0)))

    @classmethod
    def linear(cls, vector: Sequence[Scalar]) -> "MultilinearForm":
        return cls.from_dict(len(vector), 1, {(j + 1,): value for j, value in enumerate(vector)})

    @property
    def exact(self) -> bool:
        return all(isinstance(coeff, Fraction) for _, coeff in self.terms)

    def gamma_norm(self) -> Scalar:
        """Squared Gaussian norm: sum of squared coefficients."""
        if self.exact:
            return sum((coeff * coeff for _, coeff in self.terms), start=Fraction(0))
        return float(sum(float(coeff) ** 2 for _, coeff in self.terms))

    def scale(self, factor: Scalar) -> "MultilinearForm":
        return MultilinearForm(self.n, self.k, tuple((idx, c * factor) for idx, c in self.terms))

    def normalized(self) -> "MultilinearForm":
        """Unit Gaussian norm; stays exact when the squared norm is a rational square."""
        norm2 = self.gamma_norm()
        if isinstance(norm2, Fraction):
            root = _exact_sqrt(norm2)
            if root is not None:
                return self.scale(1 / root)
        inverse = 1.0 / math.sqrt(float(norm2))
        return MultilinearForm(
            self.n, self.k, tuple((idx, float(c) * inverse) for idx, c in self.terms)
        )

    def to_chaos(self) -> ChaosElement:
        if not self.exact:
            raise InputError("Only exact forms map to chaos elements")
        return ChaosElement.from_dict(
            self.n,
            {tuple((i - 1, 1) for i in idx): coeff for idx, coeff in self.terms},  # type: ignore[misc]
        )

    @cached_property
    def _indices(self) -> np.ndarray:
        return np.array([idx for idx, _ in self.terms], dtype=int) - 1

    @cached_property
    def _coeffs(self) -> np.ndarray:
        return np.array([float(c) for _, c in self.terms])

    def evaluate(self, x: np.ndarray) -> float:
        return float(np.dot(self._coeffs, np.prod(x[self._indices], axis=1)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        grad = np.zeros(self.n)
        values = x[self._indices]
        for position in range(self.k):
            others = np.prod(np.delete(values, position, axis=1), axis=1)
            np.add.at(grad, self._indices[:, position], self._coeffs * others)
        return grad

    def to_text(self) -> str:
        items = [
            ",".join(map(str, idx)) + " = " + format_scalar(coeff) for idx, coeff in self.terms
        ]
        return "; ".join([f"{self.n} {self.k}", *items])

    @classmethod
    def from_text(cls, text: str) -> "MultilinearForm":
        parts = [part.strip() for part in text.strip().split(";")]
        header = parts[0].split()
        if len(header) != 2:
            raise InputError(f"Form must start with `n k`: {text!r}")
        try:
            n, k = int(header[0]), int(header[1])
        except ValueError as exc:
            raise InputError(f"Malformed form header {parts[0]!r}") from exc
        coeffs: Dict[Index, Fraction] = {}
        for item in parts[1:]:
            if not item:
                continue
            if "=" not in item:
                raise InputError(f"Malformed form term {item!r}")
            index_text, value_text = item.split("=", 1)
            try:
                index = tuple(int(token) for token in index_text.split(","))
            except ValueError as exc:
                raise InputError(f"Malformed index {index_text!r}") from exc
            if index in coeffs:
                raise InputError(f"Index {index} appears twice")
            coeffs[index] = parse_scalar(value_text)
        return cls.from_dict(n, k, coeffs)


def parse_forms(text: str) -> List[MultilinearForm]:
    """One form per line; blank lines and `#` comments are skipped."""
    forms = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            forms.append(MultilinearForm.from_text(line))
    if not forms:
        raise InputError("No forms found")
    return forms


def format_forms(forms: Sequence[MultilinearForm]) -> str:
    return "".join(form.to_text() + "\n" for form in forms)


class Winner(str, Enum):
    NEW_BETTER = "new"
    PINASCO_BETTER = "pinasco"
    EQUAL = "equal"


@dataclass(frozen=True)
class BoundValue:
    log_value: float
    formula_id: str

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _check_degrees(ks: Sequence[int]) -> int:
    if not ks or any(k < 1 for k in ks):
        raise InputError("Degrees must be a non-empty list of positive integers")
    return sum(ks)


def new_bound(n: int, ks: Sequence[int]) -> BoundValue:
    """sqrt(2^K Gamma(K + n/2) / (Gamma(n/2) prod k_i!)) = sqrt(E[R^{2K}] / prod k_i!)."""
    K = _check_degrees(ks)
    squared = chi2_moment(n, K) / math.prod(math.factorial(k) for k in ks)
    return BoundValue(0.5 * _log_fraction(squared), "new")


def pinasco_bound(ks: Sequence[int]) -> BoundValue:
    """sqrt(2^{K-2} K^K / prod k_i^{k_i})."""
    K = _check_degrees(ks)
    log_sq = (K - 2) * math.log(2) + K * math.log(K) - sum(k * math.log(k) for k in ks)
    return BoundValue(0.5 * log_sq, "pinasco")


def compare_bounds(n: int, ks: Sequence[int], *, tol: float = COMPARE_TOL) -> Winner:
    """The smaller constant gives the stronger inequality."""
    diff = 2 * (new_bound(n, ks).log_value - pinasco_bound(ks).log_value)
    if abs(diff) <= tol:
        return Winner.EQUAL
    return Winner.NEW_BETTER if diff < 0 else Winner.PINASCO_BETTER


def frenkel_lower(d: int) -> BoundValue:
    """(1.91 d)^{-d/2}."""
    if d < 2:
        raise InputError("frenkel_lower needs d >= 2")
    return BoundValue(-0.5 * d * math.log(FRENKEL_CONSTANT * d), "frenkel")


def cd_bracket(d: int) -> Tuple[float, float]:
    """(d^{d/2}, sqrt(d (d+2) ... (3d-2))) around the linear polarization constant."""
    if d < 2:
        raise InputError("cd_bracket needs d >= 2")
    return d ** (d / 2), math.exp(new_bound(d, [1] * d).log_value)


def sphere_mean_square(form: MultilinearForm) -> Fraction:
    """E[F(theta)^2] for theta uniform on the sphere, by the radial split g = R theta."""
    norm2 = form.gamma_norm()
    if not isinstance(norm2, Fraction):
        raise InputError("sphere_mean_square needs exact coefficients")
    return norm2 / chi2_moment(form.n, form.k)


def sphere_lower_bound(n: int, ks: Sequence[int]) -> BoundValue:
    """sqrt(Gamma(n/2) / (2^K Gamma(K + n/2))), a lower bound on S for normalized forms."""
    K = _check_degrees(ks)
    return BoundValue(-0.5 * _log_fraction(chi2_moment(n, K)), "sphere")


def moment_lower_bound(
    forms: Sequence[MultilinearForm], q: int, *, cap: int = MAX_LEGS
) -> float:
    """(E[prod F_i(g)^{2q}] / E[R^{2Kq}])^{1/2q} <= S, from exact Gaussian moments."""
    if q < 1:
        raise InputError("q must be positive")
    n = _common_dimension(forms)
    K = sum(form.k for form in forms)
    chaos = [form.to_chaos() for form in forms]
    moment = product_expectation([c for c in chaos for _ in range(2 * q)], cap=cap)
    ratio = moment / chi2_moment(n, K * q)
    if ratio <= 0:
        return 0.0
    return math.exp(_log_fraction(ratio) / (2 * q))


def _common_dimension(forms: Sequence[MultilinearForm]) -> int:
    if not forms:
        raise InputError("At least one form is required")
    n = forms[0].n
    if any(form.n != n for form in forms):
        raise InputError("Forms must share the ambient dimension")
    return n


@dataclass(frozen=True)
class OptimizerSettings:
    restarts: int = 64
    max_iter: int = 500
    tol: float = 1e-10
    perturbation: float = 1e-6

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.max_iter < 1:
            raise InputError("Optimizer needs at least one restart and one iteration")
        if not self.tol > 0 or not self.perturbation > 0:
            raise InputError("Optimizer tolerances must be positive")


@dataclass(frozen=True)
class TracePoint:
    restart: int
    iteration: int
    objective: float
    step: float


@dataclass(frozen=True)
class OptimizerResult:
    """Best feasible point found: ``value`` is a lower bound on the supremum."""

    value: float
    point: tuple[float, ...]
    restart: int
    trace: tuple[TracePoint, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class _Ascent:
    value: float
    point: np.ndarray
    trace: List[TracePoint]
    stalled: bool


def _objective(forms: Sequence[MultilinearForm], v: np.ndarray) -> Tuple[float, np.ndarray]:
    values = np.array([form.evaluate(v) for form in forms])
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(np.abs(values)))), values


def _tangent_noise(rng: np.random.Generator, v: np.ndarray, size: float) -> np.ndarray:
    noise = rng.standard_normal(v.size)
    noise -= np.dot(noise, v) * v
    return size * noise / max(np.linalg.norm(noise), 1e-300)


def _ascend(
    forms: Sequence[MultilinearForm],
    restart: int,
    rng: np.random.Generator,
    *,
    max_iter: int,
    tol: float,
    perturbation: float,
) -> _Ascent:
    n = forms[0].n
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    trace: List[TracePoint] = []
    step = 1.0
    for _ in range(MAX_PERTURBATIONS):
        objective, values = _objective(forms, v)
        if np.all(values != 0):
            break
        v = v + _tangent_noise(rng, v, perturbation)
        v /= np.linalg.norm(v)
    else:
        return _Ascent(0.0, v, trace, stalled=True)

    for iteration in range(max_iter):
        grad = sum(form.gradient(v) / value for form, value in zip(forms, values))
        tangent = grad - np.dot(grad, v) * v
        slope = float(np.dot(tangent, tangent))
        if math.sqrt(slope) < tol:
            break
        step = min(1.0, 2 * step)
        accepted = False
        while step > tol:
            candidate = v + step * tangent
            candidate /= np.linalg.norm(candidate)
            cand_objective, cand_values = _objective(forms, candidate)
            if np.all(cand_values != 0) and cand_objective >= objective + ARMIJO * step * slope:
                accepted = True
                break
            step /= 2
        if not accepted:
            break
        moved = float(np.linalg.norm(candidate - v))
        v, objective, values = candidate, cand_objective, cand_values
        trace.append(TracePoint(restart, iteration, objective, step))
        if moved < tol:
            break
    value = float(np.prod(np.abs([form.evaluate(v) for form in forms])))
    return _Ascent(value, v, trace, stalled=False)


def sup_product_on_sphere(
    forms: Sequence[MultilinearForm],
    settings: Optional[OptimizerSettings] = None,
    *,
    seed: int = 0,
) -> OptimizerResult:
    """Lower bound on sup_{|v| = 1} prod_i |F_i(v)|.

    Restart r starts from a point drawn with ``instance_rng(seed, r)``; the best
    value wins and ties go to the lowest restart index.
    """
    _common_dimension(forms)
    settings = settings or OptimizerSettings()
    best: Optional[Tuple[int, _Ascent]] = None
    trace: List[TracePoint] = []
    for restart in range(settings.restarts):
        run = _ascend(
            forms,
            restart,
            instance_rng(seed, restart),
            max_iter=settings.max_iter,
            tol=settings.tol,
            perturbation=settings.perturbation,
        )
        trace.extend(run.trace)
        if run.stalled:
            continue
        if best is None or run.value > best[1].value:
            best = (restart, run)
    if best is None:
        raise OptimizerStall("Every restart is stuck on a zero set of the forms", best_value=0.0)
    restart, run = best
    return OptimizerResult(
        value=run.value,
        point=tuple(float(x) for x in run.point),
        restart=restart,
        trace=tuple(trace),
    )


def _require_normalized(forms: Sequence[MultilinearForm]) -> None:
    for index, form in enumerate(forms, start=1):
        if not math.isclose(float(form.gamma_norm()), 1.0, rel_tol=1e-12):
            raise InputError(f"Form {index} is not normalized; call normalized() first")


def _forms_text(forms: Sequence[MultilinearForm]) -> str:
    return " | ".join(form.to_text() for form in forms)


def sup_cap(form: MultilinearForm) -> float:
    """sqrt(E[F^2] / k!), the proven ceiling on sup_sphere |F|."""
    return math.sqrt(float(form.gamma_norm()) / math.factorial(form.k))


def verify_sup_bound(
    form: MultilinearForm,
    settings: Optional[OptimizerSettings] = None,
    *,
    seed: int = 0,
) -> VerificationReport:
    """sqrt(E[F^2]/k!) >= optimizer sup of |F|; a violation exposes an optimizer or norm bug."""
    result = sup_product_on_sphere([form], settings, seed=seed)
    return make_report(
        InequalityId.SUP_BOUND,
        sup_cap(form),
        result.value,
        form.to_text(),
        seed=seed,
        tol=SUP_BOUND_SLACK,
    )


def verify_killpinasco(
    forms: Sequence[MultilinearForm],
    settings: Optional[OptimizerSettings] = None,
    *,
    seed: int = 0,
) -> VerificationReport:
    """Probe S * new_bound >= prod S_i with optimizer values for S and every S_i.

    Each single-form value is first held against its proven ceiling; exceeding
    it means the optimizer itself is broken.
    """
    _require_normalized(forms)
    n = _common_dimension(forms)
    joint = sup_product_on_sphere(forms, settings, seed=seed)
    singles = []
    for index, form in enumerate(forms, start=1):
        single = sup_product_on_sphere([form], settings, seed=seed).value
        if single > sup_cap(form) + SUP_BOUND_SLACK:
            raise InternalError(
                f"Optimizer value {single} for form {index} exceeds the ceiling {sup_cap(form)}"
            )
        singles.append(single)
    bound = new_bound(n, [form.k for form in forms])
    return make_report(
        InequalityId.KILLPINASCO,
        joint.value * bound.value,
        math.prod(singles),
        _forms_text(forms),
        seed=seed,
    )


def polarization_conjecture_probe(
    vectors: Sequence[Sequence[Scalar]],
    settings: Optional[OptimizerSettings] = None,
    *,
    seed: int = 0,
) -> Tuple[VerificationReport, OptimizerResult]:
    """Optimizer value for unit linear forms against d^{-d/2}.

    For d <= PROVEN_POLARIZATION_DIM a shortfall is a defect; above it the
    bound is open and a shortfall is reported as a finding.
    """
    if not vectors:
        raise InputError("At least one vector is required")
    forms = [MultilinearForm.linear(vector).normalized() for vector in vectors]
    d = len(forms)
    result = sup_product_on_sphere(forms, settings, seed=seed)
    inequality = (
        InequalityId.POLARIZATION
        if d <= PROVEN_POLARIZATION_DIM
        else InequalityId.POLARIZATION_CONJECTURE
    )
    report = make_report(
        inequality,
        result.value,
        d ** (-d / 2),
        _forms_text(forms),
        seed=seed,
        tol=POLARIZATION_SLACK,
    )
    return report, result


def write_trace_csv(path: Path, result: OptimizerResult) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("restart", "iter", "objective", "step"))
        for point in result.trace:
            writer.writerow((point.restart, point.iteration, repr(point.objective), repr(point.step)))
