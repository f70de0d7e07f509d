"""Continued-fraction streams, convergents, and the classical identities.

Streams are immutable value objects; the same source always replays the
same coefficients.  Non-surd values (e, pi, seeded random reals) are only
ever touched through exact rational brackets built from consecutive
convergents, never through floating point.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    IdentityViolation,
    ParseError,
    PrecisionBudgetExceeded,
    RationalInput,
    StreamExhausted,
)
from .surd import QuadraticSurd, parse_surd_literal

__all__ = [
    "BELOW",
    "ABOVE",
    "PI_CF_TABLE",
    "PHI_FRAC",
    "SQRT2",
    "CFStream",
    "Convergent",
    "EnsembleConfig",
    "CertifiedAlpha",
    "HurwitzReport",
    "convergents",
    "check_determinant_identity",
    "is_palindrome_prefix",
    "check_palindrome_pq_biconditional",
    "hurwitz_scan",
    "gauss_kuzmin_mass",
    "gauss_kuzmin_stream",
    "parse_alpha_spec",
]

BELOW = "Below"
ABOVE = "Above"

# The 16 coefficients of pi carried by this package; deeper requests are a
# stream-exhaustion error rather than a silent approximation.
PI_CF_TABLE = (3, 7, 15, 1, 292, 1, 1, 1, 2, 1, 3, 1, 14, 2, 1, 1)

PHI_FRAC = QuadraticSurd(-1, 1, 2, 5)
SQRT2 = QuadraticSurd.sqrt(2)

DEFAULT_PRECISION_BUDGET = 10_000
DEFAULT_GK_DEPTH = 128


def _e_coefficient(k: int) -> int:
    # e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]: blocks (1, 2m, 1) for m = 1, 2, ...
    if k == 0:
        return 2
    block, pos = divmod(k - 1, 3)
    return 2 * (block + 1) if pos == 1 else 1


def _gauss_kuzmin_draw(rng: random.Random) -> int:
    # Inverse CDF of P(a = j) = log2(1 + 1/(j*(j+2))): the CDF telescopes to
    # log2(2*(j+1)/(j+2)), so a = floor(2*(t-1)/(2-t)) + 1 with t = 2**u.
    while True:
        t = 2.0 ** rng.random()
        if t < 2.0:
            return int(2.0 * (t - 1.0) / (2.0 - t)) + 1


def gauss_kuzmin_mass(j: int) -> float:
    """P(a = j) under the Gauss-Kuzmin law."""
    import math

    return math.log2(1.0 + 1.0 / (j * (j + 2)))


class CFStream:
    """A finite or lazily generated sequence of CF coefficients.

    kind is one of "surd", "explicit", "e", "pi", "gauss_kuzmin".  A stream
    may carry an exact surd (then permutation code takes the exact path);
    otherwise comparisons go through CertifiedAlpha brackets.
    """

    def __init__(self, kind: str, *, surd: QuadraticSurd | None = None,
                 coeffs: tuple[int, ...] | None = None, seed: int | None = None,
                 depth: int | None = None, label: str | None = None,
                 zero_head: bool = False):
        self.kind = kind
        self._surd = surd
        self._coeffs = coeffs
        self._seed = seed
        self._depth = depth
        self._zero_head = zero_head
        self.label = label if label is not None else kind
        self._expansion = None
        self._gk_cache: list[int] | None = None
        self._gk_rng: random.Random | None = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_surd(cls, surd: QuadraticSurd, label: str | None = None) -> "CFStream":
        if surd.is_rational:
            raise RationalInput("surd streams need an irrational value")
        return cls("surd", surd=surd, label=label or f"surd:{surd}")

    @classmethod
    def explicit(cls, coeffs, label: str | None = None) -> "CFStream":
        coeffs = tuple(int(a) for a in coeffs)
        if not coeffs or coeffs[0] < 0 or any(a < 1 for a in coeffs[1:]):
            raise ParseError("explicit CF needs a_0 >= 0 and a_k >= 1", str(coeffs))
        return cls("explicit", coeffs=coeffs, label=label or f"cf:{list(coeffs)}")

    @classmethod
    def e_constant(cls) -> "CFStream":
        return cls("e", label="named:e")

    @classmethod
    def pi_constant(cls) -> "CFStream":
        return cls("pi", label="named:pi")

    @classmethod
    def gauss_kuzmin(cls, seed: int, depth: int = DEFAULT_GK_DEPTH,
                     label: str | None = None) -> "CFStream":
        return cls("gauss_kuzmin", seed=seed, depth=depth,
                   label=label or f"gk[seed={seed}]")

    # -- coefficient access ---------------------------------------------------

    @property
    def length(self) -> int | None:
        """Number of coefficients, or None for unbounded streams."""
        if self.kind == "explicit":
            return len(self._coeffs)
        if self.kind == "pi":
            return len(PI_CF_TABLE)
        if self.kind == "gauss_kuzmin":
            return self._depth
        return None

    @property
    def surd(self) -> QuadraticSurd | None:
        return self._surd

    @property
    def is_exact_rational(self) -> bool:
        """True when the stream pins down a rational (finite explicit CF)."""
        return self.kind == "explicit"

    def coefficient(self, k: int) -> int:
        if k < 0:
            raise IndexError(k)
        if k == 0 and self._zero_head:
            return 0
        if self.kind == "surd":
            if self._expansion is None:
                self._expansion = self._surd.cf_expansion()
            return self._expansion.coefficient(k)
        if self.kind == "explicit":
            if k >= len(self._coeffs):
                raise StreamExhausted(f"{self.label}: no coefficient {k}")
            return self._coeffs[k]
        if self.kind == "e":
            return _e_coefficient(k)
        if self.kind == "pi":
            if k >= len(PI_CF_TABLE):
                raise StreamExhausted(
                    f"pi coefficients are tabulated up to index {len(PI_CF_TABLE) - 1}"
                )
            return PI_CF_TABLE[k]
        if self.kind == "gauss_kuzmin":
            if k >= self._depth:
                raise StreamExhausted(f"{self.label}: depth {self._depth} reached")
            if self._gk_cache is None:
                self._gk_cache = [0]
                self._gk_rng = random.Random(self._seed)
            while len(self._gk_cache) <= k:
                self._gk_cache.append(_gauss_kuzmin_draw(self._gk_rng))
            return self._gk_cache[k]
        raise ValueError(f"unknown stream kind {self.kind!r}")

    def coefficients(self, upto: int) -> list[int]:
        return [self.coefficient(k) for k in range(upto + 1)]

    def fractional(self) -> "CFStream":
        """Same tail with the integer part dropped (a_0 -> 0)."""
        if self.kind == "surd":
            return CFStream.from_surd(self._surd.frac(), label=self.label)
        return CFStream(self.kind, surd=None, coeffs=self._coeffs, seed=self._seed,
                        depth=self._depth, label=self.label, zero_head=True)

    def __repr__(self) -> str:
        return f"CFStream({self.label})"


@dataclass(frozen=True)
class Convergent:
    """One partial quotient p/q with its index, side, and determinant sign.

    side records where alpha sits relative to p/q (Above means alpha > p/q);
    it is None only for the final convergent of a finite stream, where the
    value equals p/q exactly.
    """

    index: int
    p: int
    q: int
    side: str | None
    det_sign: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents(stream: CFStream, upto: int) -> list[Convergent]:
    """Convergents 0..upto from the standard recurrence.

    Seeds p_{-1} = 1, q_{-1} = 0, p_0 = a_0, q_0 = 1.  For surd streams the
    side is decided by exact comparison; for the rest it comes from the
    determinant sign, which pins the side of every convergent that has a
    continuing tail (alpha lies strictly between consecutive convergents).
    """
    length = stream.length
    surd = stream.surd
    out: list[Convergent] = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = None, None
    for n in range(upto + 1):
        a = stream.coefficient(n)
        if n == 0:
            p_new, q_new = a, 1
        else:
            p_new = a * p_cur + p_prev
            q_new = a * q_cur + q_prev
            p_prev, q_prev = p_cur, q_cur
        det = p_new * q_prev - p_prev * q_new
        if det not in (1, -1):
            raise IdentityViolation(
                f"det {det} at index {n} of {stream.label}; expected +-1"
            )
        if surd is not None:
            cmp = surd.compare(Fraction(p_new, q_new))
            side = ABOVE if cmp > 0 else BELOW
        elif length is not None and n == length - 1 and stream.is_exact_rational:
            side = None
        else:
            side = ABOVE if det == -1 else BELOW
        out.append(Convergent(index=n, p=p_new, q=q_new, side=side, det_sign=det))
        p_cur, q_cur = p_new, q_new
    return out


def check_determinant_identity(prev: Convergent, cur: Convergent) -> int:
    """Exact p_n q_{n-1} - p_{n-1} q_n for a consecutive pair; must be +-1."""
    if cur.index != prev.index + 1:
        raise ValueError("convergents must be consecutive")
    value = cur.p * prev.q - prev.p * cur.q
    if value not in (1, -1):
        raise IdentityViolation(f"determinant {value} at index {cur.index}")
    return value


def is_palindrome_prefix(stream: CFStream, n: int) -> bool:
    """True iff (a_1, ..., a_n) equals its own reversal; needs a_0 == 0."""
    if stream.coefficient(0) != 0:
        raise ValueError("palindrome checks operate on fractional streams (a_0 == 0)")
    block = [stream.coefficient(k) for k in range(1, n + 1)]
    return block == block[::-1]


def check_palindrome_pq_biconditional(stream: CFStream, n: int) -> bool:
    """Whether palindromic(a_1..a_n) <=> p_n == q_{n-1} holds at index n."""
    if n < 1:
        raise ValueError("need n >= 1")
    pal = is_palindrome_prefix(stream, n)
    convs = convergents(stream, n)
    return pal == (convs[n].p == convs[n - 1].q)


class CertifiedAlpha:
    """Exact rational bracket around a stream's value, refined on demand.

    The bracket endpoints are consecutive convergents, so every comparison
    answered while the interval separates the comparands is exact.  A hard
    term budget guards non-termination.
    """

    def __init__(self, stream: CFStream, precision_budget: int = DEFAULT_PRECISION_BUDGET):
        self.stream = stream
        self.budget = precision_budget
        self._ps: list[int] = []
        self._qs: list[int] = []
        self._exhausted = False
        self._floors: dict[int, int] = {}
        self._extend(8)
        if len(self._ps) < 2 and not self._exhausted:
            raise PrecisionBudgetExceeded("budget below two convergents")

    def _extend(self, target_terms: int) -> bool:
        """Grow the convergent list to target_terms coefficients; True if grew."""
        target_terms = min(target_terms, self.budget)
        grew = False
        while len(self._ps) < target_terms and not self._exhausted:
            n = len(self._ps)
            try:
                a = self.stream.coefficient(n)
            except StreamExhausted:
                self._exhausted = True
                break
            if n == 0:
                p_new, q_new = a, 1
            elif n == 1:
                p_new = a * self._ps[0] + 1
                q_new = a * self._qs[0]
            else:
                p_new = a * self._ps[-1] + self._ps[-2]
                q_new = a * self._qs[-1] + self._qs[-2]
            self._ps.append(p_new)
            self._qs.append(q_new)
            grew = True
        return grew

    def refine(self) -> bool:
        """Double the number of terms in use; False when no growth is possible."""
        if self._exhausted or len(self._ps) >= self.budget:
            return False
        return self._extend(max(2 * len(self._ps), len(self._ps) + 8))

    def ensure_denominator(self, target: int) -> None:
        """Refine until the deepest denominator reaches target, stream/budget
        permitting (callers that need more precision still refine on demand)."""
        while self._qs[-1] < target and self.refine():
            pass

    def point_hint(self, k: int) -> float:
        """Float approximation of {k*alpha}; for sort pre-ordering only."""
        pl, ql, _, _ = self._bracket_ints()
        return (k * pl % ql) / ql

    @property
    def degenerate(self) -> bool:
        """True when the stream ended: the value is exactly the last convergent."""
        return self._exhausted and self.stream.is_exact_rational

    def bracket(self) -> tuple[Fraction, Fraction]:
        """Current exact bracket (lo, hi) with lo <= alpha <= hi."""
        if len(self._ps) == 1 or self.degenerate:
            v = Fraction(self._ps[-1], self._qs[-1])
            return v, v
        x = Fraction(self._ps[-2], self._qs[-2])
        y = Fraction(self._ps[-1], self._qs[-1])
        return (x, y) if x < y else (y, x)

    def _bracket_ints(self) -> tuple[int, int, int, int]:
        # (pl, ql, ph, qh) with pl/ql <= alpha <= ph/qh
        if len(self._ps) == 1 or self.degenerate:
            p, q = self._ps[-1], self._qs[-1]
            return p, q, p, q
        p1, q1 = self._ps[-2], self._qs[-2]
        p2, q2 = self._ps[-1], self._qs[-1]
        if p1 * q2 <= p2 * q1:
            return p1, q1, p2, q2
        return p2, q2, p1, q1

    def floor_multiple(self, k: int) -> int:
        """Exact floor(k * alpha), refining until the bracket decides it."""
        m = self._floors.get(k)
        if m is not None:
            return m
        while True:
            pl, ql, ph, qh = self._bracket_ints()
            lo = (k * pl) // ql
            hi = (k * ph) // qh
            if lo == hi:
                self._floors[k] = lo
                return lo
            if not self.refine():
                raise PrecisionBudgetExceeded(
                    f"cannot determine floor({k}*alpha) for {self.stream.label}"
                )

    def compare_points(self, i: int, j: int) -> int:
        """Exact comparison of {i*alpha} and {j*alpha}; 0 only for rationals."""
        while True:
            pl, ql, ph, qh = self._bracket_ints()
            mi, mj = self.floor_multiple(i), self.floor_multiple(j)
            hi_i = i * ph - mi * qh
            lo_j = j * pl - mj * ql
            if hi_i * ql < lo_j * qh:
                return -1
            hi_j = j * ph - mj * qh
            lo_i = i * pl - mi * ql
            if hi_j * ql < lo_i * qh:
                return 1
            if pl == ph and ql == qh:
                return 0  # exact rational tie
            if not self.refine():
                raise PrecisionBudgetExceeded(
                    f"cannot separate points {i}, {j} for {self.stream.label}"
                )

    def compare_fraction(self, r: Fraction) -> int:
        """Exact sign of alpha - r."""
        while True:
            pl, ql, ph, qh = self._bracket_ints()
            if ph * r.denominator < r.numerator * qh:
                return -1
            if pl * r.denominator > r.numerator * ql:
                return 1
            if pl == ph and ql == qh:
                return (pl * r.denominator > r.numerator * ql) - (
                    pl * r.denominator < r.numerator * ql
                )
            if not self.refine():
                raise PrecisionBudgetExceeded(
                    f"cannot compare alpha with {r} for {self.stream.label}"
                )


@dataclass(frozen=True)
class HurwitzReport:
    """Per-convergent verdict for |alpha - p/q| <= 1/(sqrt(5) q^2)."""

    index: int
    q: int
    satisfies: bool
    margin_low: Fraction
    margin_high: Fraction


def _hurwitz_margin_surd(alpha: QuadraticSurd, conv: Convergent,
                         digits: int = 40) -> tuple[bool, Fraction, Fraction]:
    # M = 1 - 5 q^2 (q*alpha - p)^2; satisfies iff M >= 0.
    t = alpha.scale(conv.q) - conv.p
    m = (t.square().scale(-5 * conv.q * conv.q))._add_fraction(Fraction(1))
    satisfies = m.compare(0) >= 0
    unit = Fraction(1, 10 ** digits)
    lo = Fraction(m.floor_scaled(digits), 10 ** digits)
    return satisfies, lo, lo + unit


def hurwitz_scan(stream: CFStream, upto: int,
                 precision_budget: int = DEFAULT_PRECISION_BUDGET) -> list[HurwitzReport]:
    """Decide the Hurwitz bound exactly at each convergent up to `upto`.

    Violations are reported, not raised: the classical theorem only promises
    the bound for infinitely many convergents.  PrecisionBudgetExceeded
    escapes when a finite stream cannot separate the comparison.
    """
    convs = convergents(stream, upto)
    surd = stream.surd
    reports: list[HurwitzReport] = []
    ctx = None if surd is not None else CertifiedAlpha(stream, precision_budget)
    for conv in convs:
        if surd is not None:
            sat, lo, hi = _hurwitz_margin_surd(surd, conv)
        else:
            sat, lo, hi = _hurwitz_margin_stream(ctx, conv)
        reports.append(HurwitzReport(conv.index, conv.q, sat, lo, hi))
    return reports


def _hurwitz_margin_stream(ctx: CertifiedAlpha, conv: Convergent
                           ) -> tuple[bool, Fraction, Fraction]:
    q, p = conv.q, conv.p
    while True:
        lo, hi = ctx.bracket()
        t_lo, t_hi = q * lo - p, q * hi - p
        if t_lo <= 0 <= t_hi:
            sq_lo, sq_hi = Fraction(0), max(t_lo * t_lo, t_hi * t_hi)
        else:
            a, b = sorted((t_lo * t_lo, t_hi * t_hi))
            sq_lo, sq_hi = a, b
        m_lo = 1 - 5 * q * q * sq_hi
        m_hi = 1 - 5 * q * q * sq_lo
        if m_lo > 0:
            return True, m_lo, m_hi
        if m_hi < 0:
            return False, m_lo, m_hi
        if m_lo == m_hi:
            return m_lo >= 0, m_lo, m_hi
        if not ctx.refine():
            raise PrecisionBudgetExceeded(
                f"Hurwitz margin undecidable at index {conv.index} of {ctx.stream.label}"
            )


@dataclass(frozen=True)
class EnsembleConfig:
    """Reproducible Gauss-Kuzmin ensemble parameters."""

    seed: int
    sample_count: int
    cf_depth: int = DEFAULT_GK_DEPTH
    max_points_per_sample: int = 10_000

    def __post_init__(self):
        if self.sample_count < 1 or self.cf_depth < 1 or self.max_points_per_sample < 1:
            raise ValueError("all ensemble counts must be >= 1")


def _sample_seed(seed: int, sample_index: int) -> int:
    return seed * 1_000_003 + sample_index


def gauss_kuzmin_stream(config: EnsembleConfig, sample_index: int) -> CFStream:
    """Stream of i.i.d. Gauss-Kuzmin coefficients (a_0 = 0), reproducible."""
    if not 0 <= sample_index < config.sample_count:
        raise ValueError(f"sample_index {sample_index} outside 0..{config.sample_count - 1}")
    return CFStream.gauss_kuzmin(
        _sample_seed(config.seed, sample_index),
        depth=config.cf_depth,
        label=f"gk:{config.seed}/{sample_index}",
    )


_GK_RE = re.compile(r"^gk:(-?\d+)/(\d+)$")
_CF_RE = re.compile(r"^cf:\[(-?\d+)(?:;([\d,]+))?\]$")

_NAMED = {
    "phi": lambda: CFStream.from_surd(PHI_FRAC, label="named:phi"),
    "sqrt2": lambda: CFStream.from_surd(SQRT2, label="named:sqrt2"),
    "e": CFStream.e_constant,
    "pi": CFStream.pi_constant,
}


def parse_alpha_spec(text: str) -> CFStream:
    """Parse `surd:...`, `named:phi|sqrt2|e|pi`, `cf:[a0;a1,...]`, `gk:<seed>/<sample>`."""
    compact = re.sub(r"\s+", "", text)
    if compact.startswith("surd:"):
        surd = parse_surd_literal(compact[len("surd:"):])
        if surd.is_rational:
            raise ParseError("surd alpha must be irrational", text, len("surd:"))
        if surd.sign() <= 0:
            raise ParseError("alpha must be positive", text, len("surd:"))
        return CFStream.from_surd(surd, label=compact)
    if compact.startswith("named:"):
        name = compact[len("named:"):]
        if name not in _NAMED:
            raise ParseError("unknown named constant", text, len("named:"))
        return _NAMED[name]()
    m = _CF_RE.match(compact)
    if m:
        head = int(m.group(1))
        rest = [int(x) for x in m.group(2).split(",")] if m.group(2) else []
        stream = CFStream.explicit([head] + rest, label=compact)
        return stream
    m = _GK_RE.match(compact)
    if m:
        seed, sample = int(m.group(1)), int(m.group(2))
        config = EnsembleConfig(seed=seed, sample_count=sample + 1)
        return gauss_kuzmin_stream(config, sample)
    raise ParseError("unrecognized alpha specification", text)
