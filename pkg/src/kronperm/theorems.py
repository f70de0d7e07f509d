"""Mechanical verifiers for the cycle-structure results and conjecture scans.

The structure claims are checked on concrete permutations, never inferred:
each verifier builds the permutation, classifies its cycle data, and lists
every element that violates the predicted shape.  Conjecture scans report
data instead of asserting.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .cfkit import CFStream, Convergent, PHI_FRAC, convergents, is_palindrome_prefix
from .errors import (
    NotPalindromic,
    OddIndex,
    RationalInput,
    SizeLimit,
    StructureViolation,
    WrongBranch,
)
from .permutations import (
    CycleSignature,
    HARD_SIZE_LIMIT,
    Permutation,
    build_pi_modular,
    cycle_decompose,
)
from .surd import QuadraticSurd

__all__ = [
    "CASE_INVOLUTION",
    "CASE_QUARTIC_ONE_FIXED",
    "CASE_QUARTIC_TWO_FIXED",
    "CASE_QUARTIC_ONE_TWO_CYCLE",
    "CASE_OTHER",
    "StructureVerdict",
    "FixedPointFamily",
    "QuadraticPrefixResult",
    "CompletenessRow",
    "classify_structure",
    "verify_palindrome_proposition",
    "verify_quadratic_theorem",
    "verify_fibonacci_theorem",
    "expected_fibonacci_case",
    "fibonacci",
    "predicted_fixed_points",
    "fixed_point_completeness_scan",
    "cassini_check",
    "two_candidate_check",
    "two_candidate_set",
]

CASE_INVOLUTION = "Involution"
CASE_QUARTIC_ONE_FIXED = "QuarticOneFixed"
CASE_QUARTIC_TWO_FIXED = "QuarticTwoFixed"
CASE_QUARTIC_ONE_TWO_CYCLE = "QuarticOneTwoCycle"
CASE_OTHER = "Other"


@dataclass(frozen=True)
class StructureVerdict:
    """Classification of one permutation against the two-branch prediction;
    witnesses is empty exactly when the label is not Other."""

    case_label: str
    signature: CycleSignature
    witnesses: tuple[int, ...]


def two_candidate_set(p: int, q: int) -> tuple[int, ...]:
    """All k in 1..q with 2k = p + 1 (mod q); has gcd(2, q) elements."""
    if q % 2 == 1:
        inv2 = pow(2, -1, q)
        k = (p + 1) * inv2 % q or q
        return (k,)
    # q even forces p odd (coprimality), so p + 1 is even.
    half = q // 2
    k = ((p + 1) // 2) % half or half
    return tuple(sorted(((k, k + half))))


def classify_structure(perm: Permutation, conv: Convergent) -> StructureVerdict:
    """Classify against the branch selected by the convergent's det sign.

    det +1: expect an involution (fixed points and 2-cycles only).
    det -1: expect 4-cycles with the short cycles confined to the
    two-candidate set.
    """
    sig = cycle_decompose(perm)
    witnesses: list[int] = []
    if conv.det_sign == 1:
        for cycle in sig.cycles:
            if len(cycle) > 2:
                witnesses.extend(cycle)
        label = CASE_INVOLUTION if not witnesses else CASE_OTHER
        return StructureVerdict(label, sig, tuple(sorted(witnesses)))

    candidates = set(two_candidate_set(conv.p % conv.q, conv.q))
    short: list[tuple[int, ...]] = []
    for cycle in sig.cycles:
        if len(cycle) == 4:
            continue
        if len(cycle) in (1, 2) and all(k in candidates for k in cycle):
            short.append(cycle)
        else:
            witnesses.extend(cycle)
    if witnesses:
        return StructureVerdict(CASE_OTHER, sig, tuple(sorted(witnesses)))
    fixed = sum(1 for c in short if len(c) == 1)
    twos = sum(1 for c in short if len(c) == 2)
    if twos == 1 and fixed == 0:
        label = CASE_QUARTIC_ONE_TWO_CYCLE
    elif fixed == 2 and twos == 0:
        label = CASE_QUARTIC_TWO_FIXED
    elif fixed == 1 and twos == 0:
        label = CASE_QUARTIC_ONE_FIXED
    else:
        return StructureVerdict(CASE_OTHER, sig,
                                tuple(sorted(k for c in short for k in c)))
    return StructureVerdict(label, sig, ())


def verify_palindrome_proposition(stream: CFStream, n: int) -> StructureVerdict:
    """Check the two-branch structure at a palindromic prefix of length n.

    The stream must be fractional (a_0 == 0) and (a_1..a_n) a palindrome;
    the permutation is built at the convergent denominator q_n.
    """
    if not is_palindrome_prefix(stream, n):
        raise NotPalindromic(f"(a_1..a_{n}) of {stream.label} is not a palindrome")
    conv = convergents(stream, n)[-1]
    perm = build_pi_modular(conv)
    return classify_structure(perm, conv)


@dataclass(frozen=True)
class QuadraticPrefixResult:
    """One prefix of the quadratic sweep; verdict is None when skipped."""

    prefix_length: int
    convergent: Convergent | None
    palindromic: bool | None
    verdict: StructureVerdict | None
    note: str | None = None

    @property
    def conformant(self) -> bool:
        return self.verdict is None or self.verdict.case_label != CASE_OTHER


def verify_quadratic_theorem(surd: QuadraticSurd, period_count: int,
                             max_q: int = 100_000) -> list[QuadraticPrefixResult]:
    """Structure verdicts at prefix lengths j = k-1, 2k-1, ... of {surd}.

    k is the minimal CF period of the fractional part.  Non-palindromic
    prefixes produce a skip note rather than a failure; prefixes whose
    denominator exceeds max_q are skipped with a size note.
    """
    if surd.is_rational:
        raise RationalInput("quadratic verifier needs an irrational surd")
    frac_stream = CFStream.from_surd(surd.frac(), label=f"frac[{surd}]")
    expansion = surd.frac().cf_expansion()
    k = len(expansion.period)
    results: list[QuadraticPrefixResult] = []
    for t in range(period_count):
        j = k - 1 + t * k
        if j < 1:
            continue
        conv = convergents(frac_stream, j)[-1]
        if conv.q > max_q:
            results.append(QuadraticPrefixResult(j, conv, None, None, "size"))
            continue
        if not is_palindrome_prefix(frac_stream, j):
            results.append(QuadraticPrefixResult(j, conv, False, None, "PalindromeMissing"))
            continue
        verdict = verify_palindrome_proposition(frac_stream, j)
        results.append(QuadraticPrefixResult(j, conv, True, verdict))
    return results


def fibonacci(n: int) -> int:
    """F_n with F_1 = F_2 = 1."""
    if n < 1:
        raise ValueError("Fibonacci index must be >= 1")
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def expected_fibonacci_case(n: int) -> str:
    if n % 2 == 0:
        return CASE_INVOLUTION
    if n % 6 == 3:
        return CASE_QUARTIC_ONE_TWO_CYCLE
    return CASE_QUARTIC_ONE_FIXED


def verify_fibonacci_theorem(fib_index: int,
                             size_limit: int = HARD_SIZE_LIMIT) -> StructureVerdict:
    """Build the permutation for ({phi}, F_n) and enforce the trichotomy:
    n even -> involution; n = 1,5 mod 6 -> 4-cycles plus one fixed point;
    n = 3 mod 6 -> 4-cycles plus a single 2-cycle.  Raises on any mismatch."""
    f_n = fibonacci(fib_index)
    if f_n >= size_limit:
        raise SizeLimit(f"F_{fib_index} = {f_n} exceeds the size limit")
    if (f_n % 2 == 0) != (fib_index % 3 == 0):
        raise StructureViolation("F_n parity rule failed: even iff 3 | n")
    stream = CFStream.from_surd(PHI_FRAC, label="named:phi")
    conv = convergents(stream, fib_index - 1)[-1]
    if conv.q != f_n:
        raise StructureViolation(f"q_{fib_index - 1} = {conv.q} != F_{fib_index}")
    perm = build_pi_modular(conv)
    verdict = classify_structure(perm, conv)
    expected = expected_fibonacci_case(fib_index)
    if verdict.case_label != expected:
        raise StructureViolation(
            f"F_{fib_index}: got {verdict.case_label}, theorem predicts {expected}"
        )
    return verdict


def _constant_stream(r: int) -> CFStream:
    """[0; r, r, r, ...] as an exact surd stream: (sqrt(r^2 + 4) - r) / 2."""
    return CFStream.from_surd(
        QuadraticSurd(-r, 1, 2, r * r + 4), label=f"[0;({r})...]"
    )


@dataclass(frozen=True)
class FixedPointFamily:
    """Predicted fixed points g, 2g, ... up to Q_m for the stream [0; r...].

    Q is indexed Q_1 = 1, Q_2 = r, Q_j = r*Q_{j-1} + Q_{j-2}; membership of
    every predicted point is checked against the fixed-point congruence at
    construction time.
    """

    r: int
    m: int
    point_count: int
    generator: int
    predicted: tuple[int, ...]


def _q_sequence(r: int, m: int) -> list[int]:
    qs = [0, 1, r]  # 1-based: Q_1 = 1, Q_2 = r
    while len(qs) <= m:
        qs.append(r * qs[-1] + qs[-2])
    return qs


def predicted_fixed_points(r: int, m: int,
                           size_limit: int = HARD_SIZE_LIMIT) -> FixedPointFamily:
    """The fixed-point family of the involution branch at Q_m points.

    m even; generator is Q_{m/2} when m/2 is odd, else (r/2) Q_{m/2} + Q_{m/2-1}
    for even r and Q_{m/2+1} + Q_{m/2-1} for odd r.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if m % 2 or m < 2:
        raise OddIndex(f"need an even index m >= 2, got {m}")
    qs = _q_sequence(r, m + 1)
    q_m = qs[m]
    if q_m >= size_limit:
        raise SizeLimit(f"Q_{m} = {q_m} exceeds the size limit")
    h = m // 2
    if h % 2 == 1:
        g = qs[h]
    elif r % 2 == 0:
        g = (r // 2) * qs[h] + qs[h - 1]
    else:
        g = qs[h + 1] + qs[h - 1]
    # p at Q_m points is Q_{m-1} (palindromic prefix); every multiple of g
    # must satisfy the fixed-point congruence (p - 1) k = 0 mod q.
    p = qs[m - 1] % q_m
    if (p - 1) * g % q_m:
        raise StructureViolation(
            f"predicted generator {g} is not fixed for r={r}, m={m}"
        )
    predicted = tuple(range(g, q_m + 1, g))
    return FixedPointFamily(r=r, m=m, point_count=q_m, generator=g, predicted=predicted)


@dataclass(frozen=True)
class CompletenessRow:
    """One even index of the fixed-point completeness scan (reported data)."""

    r: int
    m: int
    q: int
    generator: int
    predicted_count: int
    actual_count: int
    equal: bool


def fixed_point_completeness_scan(r: int, max_m: int,
                                  size_limit: int = 100_000) -> list[CompletenessRow]:
    """Compare predicted against actual fixed points for even m <= max_m.

    Inclusion (predicted subset of actual) is asserted; equality is the
    open conjecture and is only reported.
    """
    stream = _constant_stream(r)
    rows: list[CompletenessRow] = []
    for m in range(2, max_m + 1, 2):
        if _q_sequence(r, m)[m] > size_limit:
            break
        family = predicted_fixed_points(r, m)
        conv = convergents(stream, m - 1)[-1]
        if conv.q != family.point_count:
            raise StructureViolation(
                f"Q_{m} = {family.point_count} != q_{m - 1} = {conv.q} for r={r}"
            )
        perm = build_pi_modular(conv)
        actual = tuple(k for k in range(1, conv.q + 1) if perm.images[k - 1] == k)
        missing = set(family.predicted) - set(actual)
        if missing:
            raise StructureViolation(
                f"predicted fixed points {sorted(missing)} are not fixed (r={r}, m={m})"
            )
        rows.append(CompletenessRow(
            r=r, m=m, q=conv.q, generator=family.generator,
            predicted_count=len(family.predicted), actual_count=len(actual),
            equal=len(actual) == len(family.predicted),
        ))
    return rows


def cassini_check(n: int) -> bool:
    """Exact check of F_{n-2} F_n - F_{n-1}^2 == (-1)^(n-1)."""
    if n < 3:
        raise ValueError("need n >= 3")
    return fibonacci(n - 2) * fibonacci(n) - fibonacci(n - 1) ** 2 == (-1) ** (n - 1)


def two_candidate_check(conv: Convergent) -> tuple[int, ...]:
    """Solutions of 2k = p + 1 mod q, verified against the built permutation:
    every element outside a 4-cycle must lie in the returned set."""
    if conv.det_sign != -1:
        raise WrongBranch("two-candidate argument applies to the det = -1 branch")
    candidates = two_candidate_set(conv.p % conv.q, conv.q)
    if len(candidates) != gcd(2, conv.q):
        raise StructureViolation("candidate count != gcd(2, q)")
    perm = build_pi_modular(conv)
    sig = cycle_decompose(perm)
    outside = [k for cycle in sig.cycles if len(cycle) != 4 for k in cycle]
    stray = set(outside) - set(candidates)
    if stray:
        raise StructureViolation(
            f"elements {sorted(stray)} sit outside 4-cycles but are not candidates"
        )
    return candidates
