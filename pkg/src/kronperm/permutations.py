"""Kronecker permutations: exact builders, cycle structure, exchange checks.

pi maps a point index k to the size rank of {k*alpha} (rank 1 = smallest);
sigma = pi^-1 lists indices in increasing order of their point.  Both carry
an explicit direction tag.  The modular builder realizes the closed form
pi(k) = p*k + c mod q at convergent denominators, with the branch constant
picked by the exact side of alpha versus p/q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterator

from .cfkit import (
    ABOVE,
    CertifiedAlpha,
    CFStream,
    Convergent,
    DEFAULT_PRECISION_BUDGET,
    convergents,
)
from .errors import (
    NotCoprime,
    RationalAlpha,
    SizeLimit,
    StreamExhausted,
    StructureViolation,
)
from .surd import QuadraticSurd

__all__ = [
    "HARD_SIZE_LIMIT",
    "Permutation",
    "CycleSignature",
    "ExchangeCertificate",
    "build_pi_exact",
    "build_pi_modular",
    "build_pi_auto",
    "exchange_check",
    "invert",
    "cycle_decompose",
    "signature_of",
    "signature_report",
    "iter_convergents",
]

HARD_SIZE_LIMIT = 1 << 62

PI = "pi"
SIGMA = "sigma"


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1..n} with a direction tag ("pi" or "sigma")."""

    direction: str
    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        seen = [False] * (n + 1)
        for v in self.images:
            if not 1 <= v <= n or seen[v]:
                raise ValueError("images do not form a bijection on 1..n")
            seen[v] = True

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for k, v in enumerate(self.images, start=1):
            inv[v - 1] = k
        direction = SIGMA if self.direction == PI else PI
        return Permutation(direction, tuple(inv))


def invert(perm: Permutation) -> Permutation:
    return perm.inverse()


@dataclass(frozen=True)
class CycleSignature:
    """Cycle data in canonical form: each cycle starts at its smallest
    element and cycles are sorted by starting element."""

    cycles: tuple[tuple[int, ...], ...]
    length_multiset: tuple[tuple[int, int], ...]  # (length, count), sorted
    fixed_points: tuple[int, ...]

    @property
    def n(self) -> int:
        return sum(length * count for length, count in self.length_multiset)

    @property
    def lengths(self) -> dict[int, int]:
        return dict(self.length_multiset)

    @property
    def distinct_cycle_lengths(self) -> bool:
        """True when no two cycles share a length."""
        return all(count == 1 for _, count in self.length_multiset)

    @property
    def is_involution(self) -> bool:
        return all(length <= 2 for length, _ in self.length_multiset)

    @property
    def longest(self) -> int:
        return max(length for length, _ in self.length_multiset)


def cycle_decompose(perm: Permutation) -> CycleSignature:
    """Standard traversal; ascending start order gives the canonical form."""
    n = perm.n
    seen = [False] * (n + 1)
    cycles: list[tuple[int, ...]] = []
    counts: dict[int, int] = {}
    fixed: list[int] = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        k = perm.images[start - 1]
        while k != start:
            cycle.append(k)
            seen[k] = True
            k = perm.images[k - 1]
        cycles.append(tuple(cycle))
        counts[len(cycle)] = counts.get(len(cycle), 0) + 1
        if len(cycle) == 1:
            fixed.append(start)
    return CycleSignature(
        cycles=tuple(cycles),
        length_multiset=tuple(sorted(counts.items())),
        fixed_points=tuple(fixed),
    )


def _check_size(n: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n >= HARD_SIZE_LIMIT:
        raise SizeLimit(f"n = {n} exceeds the builder limit 2^62")


def _rank_permutation(order: list[int]) -> Permutation:
    images = [0] * len(order)
    for rank, k in enumerate(order, start=1):
        images[k - 1] = rank
    return Permutation(PI, tuple(images))


def _certified_sort(indices: list[int], hints: list[float], compare) -> list[int]:
    """Sort by float hints, then certify every adjacency exactly.

    A failed certification falls back to a full sort with the exact
    comparator, so a bad hint can cost time but never correctness.
    A zero comparison means two points coincide: alpha was rational.
    """
    order = sorted(indices, key=lambda k: hints[k - 1])
    clean = True
    for u, v in zip(order, order[1:]):
        c = compare(u, v)
        if c == 0:
            raise RationalAlpha("tied points: alpha is rational")
        if c > 0:
            clean = False
            break
    if not clean:
        order = sorted(indices, key=cmp_to_key(compare))
        for u, v in zip(order, order[1:]):
            if compare(u, v) == 0:
                raise RationalAlpha("tied points: alpha is rational")
    return order


def _build_pi_surd(alpha: QuadraticSurd, n: int) -> Permutation:
    if alpha.is_rational:
        raise RationalAlpha("exact builder needs an irrational alpha")
    values = [alpha.scale(k).frac() for k in range(1, n + 1)]
    hints = [v.floor_scaled(17) / 10 ** 17 for v in values]

    def compare(i: int, j: int) -> int:
        return values[i - 1].compare(values[j - 1])

    order = _certified_sort(list(range(1, n + 1)), hints, compare)
    return _rank_permutation(order)


def _build_pi_certified(stream: CFStream, n: int, precision_budget: int) -> Permutation:
    if stream.is_exact_rational:
        raise RationalAlpha("exact builder needs an irrational alpha")
    ctx = CertifiedAlpha(stream, precision_budget)
    # Pre-refine so the bracket is far tighter than any point gap at scale n.
    ctx.ensure_denominator(16 * n * n)
    hints = []
    for k in range(1, n + 1):
        ctx.floor_multiple(k)
        hints.append(ctx.point_hint(k))
    order = _certified_sort(list(range(1, n + 1)), hints, ctx.compare_points)
    return _rank_permutation(order)


def build_pi_exact(alpha: CFStream | QuadraticSurd, n: int,
                   precision_budget: int = DEFAULT_PRECISION_BUDGET) -> Permutation:
    """pi for (k*alpha mod 1), k = 1..n, with zero chance of misordering.

    Surd alphas sort by sign-exact comparison; stream alphas by certified
    rational brackets refined on demand.
    """
    _check_size(n)
    if isinstance(alpha, QuadraticSurd):
        return _build_pi_surd(alpha, n)
    if alpha.surd is not None:
        return _build_pi_surd(alpha.surd, n)
    return _build_pi_certified(alpha, n, precision_budget)


def build_pi_modular(conv: Convergent) -> Permutation:
    """pi over n = q points from the closed form rep(p*k + c mod q).

    rep sends residue 0 to q; c = 1 exactly when alpha > p/q (side Above).
    The single formula covers both of the special last-point rules.
    """
    p, q = conv.p, conv.q
    _check_size(q)
    if gcd(p, q) != 1:
        raise NotCoprime(f"gcd({p}, {q}) != 1")
    if conv.side is None:
        raise RationalAlpha("side undefined: convergent equals its stream exactly")
    c = 1 if conv.side == ABOVE else 0
    images = tuple((p * k + c) % q or q for k in range(1, q + 1))
    return Permutation(PI, images)


def iter_convergents(stream: CFStream) -> Iterator[Convergent]:
    """Yield convergents until the stream ends (silently stops there)."""
    n = 0
    while True:
        try:
            yield convergents(stream, n)[-1]
        except StreamExhausted:
            return
        n += 1


@dataclass(frozen=True)
class ExchangeCertificate:
    """Outcome of comparing the exact and modular builders at one convergent.

    shift_bound is a rational upper bound on q*|alpha - p/q| (the maximal
    vertical displacement when alpha is replaced by p/q); min_gap = 1/q is
    the lattice spacing that the displacement must stay under.
    """

    convergent: Convergent
    shift_bound: Fraction
    min_gap: Fraction
    verdict: bool


def exchange_check(alpha: CFStream, conv: Convergent,
                   precision_budget: int = DEFAULT_PRECISION_BUDGET) -> ExchangeCertificate:
    """Verify that exact and modular builders agree elementwise at q points."""
    pi_exact = build_pi_exact(alpha, conv.q, precision_budget)
    pi_modular = build_pi_modular(conv)
    verdict = pi_exact.images == pi_modular.images
    # epsilon = q*|alpha - p/q| < q * 1/(q*q_next) = 1/q_next
    nxt = convergents(alpha, conv.index + 1)[-1]
    shift_bound = Fraction(1, nxt.q)
    return ExchangeCertificate(
        convergent=conv,
        shift_bound=shift_bound,
        min_gap=Fraction(1, conv.q),
        verdict=verdict,
    )


def build_pi_auto(alpha: CFStream, n: int,
                  precision_budget: int = DEFAULT_PRECISION_BUDGET
                  ) -> tuple[Permutation, str]:
    """Build pi picking the fast modular path when n is a convergent
    denominator of alpha; returns (permutation, builder_name)."""
    _check_size(n)
    match = None
    for conv in iter_convergents(alpha):
        if conv.q == n and conv.side is not None and gcd(conv.p, conv.q) == 1:
            match = conv
            break
        if conv.q > n:
            break
    if match is not None:
        return build_pi_modular(match), "modular"
    return build_pi_exact(alpha, n, precision_budget), "exact"


def signature_report(alpha: CFStream, n: int,
                     precision_budget: int = DEFAULT_PRECISION_BUDGET
                     ) -> tuple[CycleSignature, str]:
    """(sigma cycle signature, builder name) for (alpha, n); sigma and pi
    must agree on cycle lengths (they are inverses), which is asserted
    rather than assumed."""
    perm, builder = build_pi_auto(alpha, n, precision_budget)
    sigma = perm.inverse()
    sig = cycle_decompose(sigma)
    sig_pi = cycle_decompose(perm)
    if sig.length_multiset != sig_pi.length_multiset:
        raise StructureViolation("sigma and pi disagree on cycle lengths")
    return sig, builder


def signature_of(alpha: CFStream, n: int,
                 precision_budget: int = DEFAULT_PRECISION_BUDGET) -> CycleSignature:
    """Cycle signature of sigma for (alpha, n)."""
    return signature_report(alpha, n, precision_budget)[0]
