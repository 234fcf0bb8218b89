"""Exact verifiers for the chaos moment inequalities and the conjecture probes.

Every verifier returns a VerificationReport phrased as ``lhs >= rhs``. Proven
inequalities count a negative margin as a violation; conjecture probes turn it
into a finding.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import List, Sequence, Tuple

from .chaos import (
    ChaosElement,
    gradient_square,
    inner,
    linear_form,
    product_expectation,
)
from .exceptions import InputError, ResourceError
from .hermite import double_factorial
from .moments import (
    MAX_LEGS,
    ComplexVectorSet,
    CorrelationMatrix,
    complex_moment,
    isserlis_moment,
    squared_hermite_moment,
)
from .reports import InequalityId, VerificationReport, make_report
from .semigroup import FactorLike, as_factor, negatif_functional, phi_curve, phi_limit
from .utils import Scalar, format_scalar

MAX_AVERAGED_DIM = 4


def _family_text(fs: Sequence[ChaosElement]) -> str:
    return " | ".join(f.to_text() for f in fs)


def _require_pure(fs: Sequence[ChaosElement]) -> None:
    if not fs:
        raise InputError("At least one chaos element is required")
    for index, f in enumerate(fs, start=1):
        if f.is_zero or not f.is_pure(f.degree):
            raise InputError(f"Element {index} is not a pure chaos element")
        if f.n != fs[0].n:
            raise InputError("Chaos elements must share the ambient dimension")


def _squares_expectation(fs: Sequence[ChaosElement], cap: int) -> Fraction:
    return product_expectation([g for f in fs for g in (f, f)], cap=cap)


def _norms(fs: Sequence[ChaosElement]) -> List[Fraction]:
    return [inner(f, f) for f in fs]


def verify_main(
    fs: Sequence[ChaosElement], *, cap: int = MAX_LEGS, seed: int | None = None
) -> VerificationReport:
    """E[prod F_i^2] >= prod E[F_i^2] for pure chaos elements."""
    _require_pure(fs)
    lhs = _squares_expectation(fs, cap)
    rhs = math.prod(_norms(fs), start=Fraction(1))
    return make_report(InequalityId.MAIN, lhs, rhs, _family_text(fs), seed=seed)


def verify_hgp(
    p: Sequence[int],
    correlation: CorrelationMatrix,
    *,
    cap: int = MAX_LEGS,
    seed: int | None = None,
) -> VerificationReport:
    """E[prod H_{p_i}(G_i)^2] >= prod p_i!."""
    if any(degree < 1 for degree in p):
        raise InputError("Hermite degrees must be positive")
    lhs = squared_hermite_moment(p, correlation, cap=cap)
    rhs: Scalar = Fraction(math.prod(math.factorial(degree) for degree in p))
    if not correlation.exact:
        rhs = float(rhs)
    canonical = ",".join(map(str, p)) + "|" + correlation.canonical()
    return make_report(InequalityId.HGP, lhs, rhs, canonical, seed=seed)


def verify_frenkel_improved(
    vectors: Sequence[Sequence[Fraction]], *, cap: int = MAX_LEGS, seed: int | None = None
) -> Tuple[VerificationReport, VerificationReport]:
    """Averaged first-chaos inequality, and the plain product inequality it implies.

    lhs is E[prod F_i^2] with F_i = <v_i, x>; the improved right side is
    (1/d) sum_i E[F_i^2] E[prod_{j != i} F_j^2].
    """
    if not vectors:
        raise InputError("At least one vector is required")
    fs = [linear_form(v) for v in vectors]
    for f in fs:
        if f.n != fs[0].n:
            raise InputError("Vectors must share the ambient dimension")
        if f.is_zero:
            raise InputError("Vectors must be non-zero")
    lhs = _squares_expectation(fs, cap)
    norms = _norms(fs)
    d = len(fs)
    improved = Fraction(0)
    for i in range(d):
        improved += norms[i] * _squares_expectation(fs[:i] + fs[i + 1 :], cap)
    improved /= d
    canonical = ";".join(",".join(format_scalar(Fraction(x)) for x in v) for v in vectors)
    return (
        make_report(InequalityId.FRENKEL_IMPROVED, lhs, improved, canonical, seed=seed),
        make_report(
            InequalityId.FRENKEL,
            lhs,
            math.prod(norms, start=Fraction(1)),
            canonical,
            seed=seed,
        ),
    )


def verify_averaged_fourth(
    correlation: CorrelationMatrix,
    *,
    include_singletons: bool = True,
    cap: int = MAX_LEGS,
    seed: int | None = None,
) -> VerificationReport:
    """sum_S E[prod_{i in S} G_i^4] >= sum_S 3^|S| over nonempty subsets S.

    Singleton terms are 3 on both sides; ``include_singletons=False`` drops
    them, which gives the right side 54 for d = 3.
    """
    d = correlation.dimension
    if d > MAX_AVERAGED_DIM:
        raise ResourceError(f"Averaged fourth-moment check is capped at dimension {MAX_AVERAGED_DIM}")
    smallest = 1 if include_singletons else 2
    lhs: Scalar = Fraction(0) if correlation.exact else 0.0
    rhs = Fraction(0)
    for size in range(smallest, d + 1):
        for subset in itertools.combinations(range(d), size):
            exponents = [4 if i in subset else 0 for i in range(d)]
            lhs = lhs + isserlis_moment(exponents, correlation, cap=cap)
            rhs += 3**size
    canonical = f"{int(include_singletons)}|{correlation.canonical()}"
    return make_report(
        InequalityId.AVERAGED_FOURTH,
        lhs,
        rhs if correlation.exact else float(rhs),
        canonical,
        seed=seed,
    )


def probe_gpc(
    correlation: CorrelationMatrix,
    m: int,
    *,
    cap: int = MAX_LEGS,
    seed: int | None = None,
) -> VerificationReport:
    """E[prod G_i^{2m}] >= ((2m - 1)!!)^d; m = 1 is the proven product inequality."""
    if m < 1:
        raise InputError("Moment order m must be positive")
    d = correlation.dimension
    lhs = isserlis_moment([2 * m] * d, correlation, cap=cap)
    rhs: Scalar = Fraction(double_factorial(2 * m - 1) ** d)
    if not correlation.exact:
        rhs = float(rhs)
    inequality = InequalityId.FRENKEL if m == 1 else InequalityId.GPC
    return make_report(inequality, lhs, rhs, f"{m}|{correlation.canonical()}", seed=seed)


def probe_complex(
    p: Sequence[int], a: ComplexVectorSet, *, seed: int | None = None
) -> VerificationReport:
    """E[|prod G_i^{p_i}|^2] >= prod E[|G_i|^{2 p_i}] for complex Gaussians."""
    lhs = complex_moment(p, a)
    rhs = Fraction(1)
    for i, p_i in enumerate(p):
        rhs *= complex_moment([p_i], a.subset([i]))
    canonical = ",".join(map(str, p)) + "|" + a.canonical()
    return make_report(InequalityId.COMPLEX, lhs, rhs, canonical, seed=seed)


def verify_phi_monotone(
    fs: Sequence[ChaosElement],
    grid: Sequence[FactorLike],
    *,
    cap: int = MAX_LEGS,
    seed: int | None = None,
) -> VerificationReport:
    """phi is non-increasing in t: reports the tightest consecutive pair.

    The grid is visited from s = 1 downwards and closed with the s -> 0 limit.
    """
    _require_pure(fs)
    factors = sorted({as_factor(s).s for s in grid}, reverse=True)
    if not factors:
        raise InputError("The grid needs at least one contraction factor")
    values = phi_curve(fs, factors, cap=cap) + [phi_limit(fs)]
    pairs = list(zip(values, values[1:]))
    lhs, rhs = min(pairs, key=lambda pair: pair[0] - pair[1])
    canonical = ",".join(format_scalar(s) for s in factors) + "|" + _family_text(fs)
    return make_report(InequalityId.PHI_MONOTONE, lhs, rhs, canonical, seed=seed)


def verify_negatif(
    fs: Sequence[ChaosElement],
    s: FactorLike,
    *,
    cap: int = MAX_LEGS,
    seed: int | None = None,
) -> VerificationReport:
    """0 >= sum_i E[L P_t(F_i^2) prod_{j != i} P_t(F_j^2)]."""
    factor = as_factor(s)
    value = negatif_functional(fs, factor, cap=cap)
    canonical = format_scalar(factor.s) + "|" + _family_text(fs)
    return make_report(InequalityId.NEGATIF, Fraction(0), value, canonical, seed=seed)


def verify_gradient_split(
    fs: Sequence[ChaosElement], *, cap: int = MAX_LEGS, seed: int | None = None
) -> VerificationReport:
    """sum_i k_i E[prod F_j^2] >= sum_i E[||grad F_i||^2 prod_{j != i} F_j^2]."""
    _require_pure(fs)
    joint = _squares_expectation(fs, cap)
    lhs = sum(f.degree for f in fs) * joint
    rhs = Fraction(0)
    for i, f in enumerate(fs):
        others = [g for other in fs[:i] + fs[i + 1 :] for g in (other, other)]
        rhs += product_expectation([gradient_square(f), *others], cap=cap)
    return make_report(InequalityId.GRADIENT_SPLIT, lhs, rhs, _family_text(fs), seed=seed)
