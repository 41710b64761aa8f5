"""Arbitrary-precision values carrying certified absolute error bounds.

Values are raw mpmath floats (``(sign, mantissa, exponent, bitcount)``
tuples) manipulated through ``mpmath.libmp`` at an explicit precision that
is always passed as an argument -- there is no global precision state.
Every operation propagates an absolute error bound alongside the value;
bound arithmetic is done at coarse precision with *upward* rounding, so
for each :class:`Bounded` the true real number lies in
``[value - err, value + err]``.

Transcendental primitives (log, sqrt, pi, ln 2) are evaluated with 10
guard bits and claimed accurate to ``2^(1-p) * max(1, |result|)``; the
backend is accurate to a couple of ulp, so the claim has orders of
magnitude of slack.  Independent series oracles in the test suite check
this on samples.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from mpmath import mp
from mpmath.libmp import (
    fone,
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    mpf_abs,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_log,
    mpf_ln2,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_shift,
    mpf_sqrt,
    mpf_sub,
    to_str,
)

from . import cache
from . import exact

__all__ = [
    "Bounded",
    "PrecisionPolicy",
    "PrecisionInsufficient",
    "PrecisionExhausted",
    "b_add",
    "b_sub",
    "b_neg",
    "b_abs",
    "b_mul",
    "b_mul_int",
    "b_scale",
    "b_div",
    "b_ln",
    "b_sqrt",
    "b_sum",
    "ln_int",
    "ln2_const",
    "pi_const",
    "euler_gamma",
    "euler_gamma_pair",
    "log_factorial",
    "digamma_int",
    "frac_part_certified",
    "agrees",
    "raw_to_fraction",
]

# precision for bound arithmetic; bounds are always rounded upward
_EPREC = 48


class PrecisionInsufficient(Exception):
    """The requested certification cannot be made at the current precision.

    ``extra_bits`` estimates how many additional bits would be needed
    (None when no finite amount can help, e.g. an exactly-integer value
    with a nonzero bound).
    """

    def __init__(self, message: str, extra_bits: Optional[int] = None):
        super().__init__(message)
        self.extra_bits = extra_bits


class PrecisionExhausted(Exception):
    """Auto-escalation hit the policy's precision ceiling."""


def _is_special(x) -> bool:
    return x[1] == 0 and x != fzero


def _up_add(a, b):
    return mpf_add(a, b, _EPREC, "u")


def _up_mul(a, b):
    return mpf_mul(a, b, _EPREC, "u")


def _up_div(a, b):
    return mpf_div(a, b, _EPREC, "u")


def _down_sub(a, b):
    return mpf_sub(a, b, _EPREC, "d")


def _rnd_bound(val, p: int):
    # round-to-nearest at p bits errs by at most 2^-p * |result|
    return mpf_shift(mpf_abs(val), -p)


def _fn_err(val, p: int):
    # claimed bound for transcendental primitives: 2^(1-p) * max(1, |val|)
    a = mpf_abs(val)
    if mpf_cmp(a, fone) < 0:
        a = fone
    return mpf_shift(a, 1 - p)


def raw_to_fraction(x) -> Fraction:
    """Exact rational value of a raw mpf (they are all dyadic)."""
    if _is_special(x):
        raise ValueError("non-finite value cannot be converted exactly")
    sign, man, exp, _ = x
    n = int(man)
    if sign:
        n = -n
    if exp >= 0:
        return Fraction(n << exp)
    return Fraction(n, 1 << -exp)


def _fraction_to_raw_up(q: Fraction):
    # upper bound on a nonnegative rational, for bound bookkeeping
    if q < 0:
        raise ValueError("bounds must be nonnegative")
    return from_rational(q.numerator, q.denominator, _EPREC, "u")


@dataclass(frozen=True)
class Bounded:
    """An arbitrary-precision value with a certified absolute error bound."""

    val: tuple
    err: tuple

    @classmethod
    def exact_int(cls, n: int) -> "Bounded":
        return cls(from_int(n), fzero)

    @classmethod
    def from_fraction(cls, q: Fraction, p: int) -> "Bounded":
        q = Fraction(q)
        v = from_rational(q.numerator, q.denominator, p, "n")
        if raw_to_fraction(v) == q:
            return cls(v, fzero)
        return cls(v, _rnd_bound(v, p))

    @property
    def mpf(self):
        return mp.make_mpf(self.val)

    @property
    def err_mpf(self):
        return mp.make_mpf(self.err)

    def __float__(self) -> float:
        return float(self.mpf)

    def __repr__(self) -> str:
        return f"Bounded({to_str(self.val, 20)} ± {to_str(self.err, 3)})"

    def decimal(self, dps: int) -> str:
        return to_str(self.val, dps)

    def err_decimal(self, dps: int = 3) -> str:
        return to_str(self.err, dps)

    def value_fraction(self) -> Fraction:
        return raw_to_fraction(self.val)

    def err_fraction(self) -> Fraction:
        return raw_to_fraction(self.err)

    def contains(self, q: Fraction) -> bool:
        """True iff the exact rational q lies inside [val - err, val + err]."""
        return abs(self.value_fraction() - Fraction(q)) <= self.err_fraction()

    def is_exact(self) -> bool:
        return self.err == fzero

    def magnitude_log2(self) -> Optional[int]:
        """floor-ish log2 |val|, or None for zero."""
        if self.val == fzero:
            return None
        return self.val[2] + self.val[3] - 1


def agrees(x: Bounded, y: Bounded) -> bool:
    """Certified-overlap check: |x - y| <= err_x + err_y, exactly."""
    diff = abs(x.value_fraction() - y.value_fraction())
    return diff <= x.err_fraction() + y.err_fraction()


def b_add(x: Bounded, y: Bounded, p: int) -> Bounded:
    v = mpf_add(x.val, y.val, p, "n")
    e = _up_add(_up_add(x.err, y.err), _rnd_bound(v, p))
    return Bounded(v, e)


def b_neg(x: Bounded) -> Bounded:
    return Bounded(mpf_neg(x.val), x.err)


def b_abs(x: Bounded) -> Bounded:
    return Bounded(mpf_abs(x.val), x.err)


def b_sub(x: Bounded, y: Bounded, p: int) -> Bounded:
    v = mpf_sub(x.val, y.val, p, "n")
    e = _up_add(_up_add(x.err, y.err), _rnd_bound(v, p))
    return Bounded(v, e)


def b_mul(x: Bounded, y: Bounded, p: int) -> Bounded:
    v = mpf_mul(x.val, y.val, p, "n")
    e = _up_add(_up_mul(mpf_abs(x.val), y.err), _up_mul(mpf_abs(y.val), x.err))
    e = _up_add(e, _up_mul(x.err, y.err))
    e = _up_add(e, _rnd_bound(v, p))
    return Bounded(v, e)


def b_mul_int(x: Bounded, c: int, p: int) -> Bounded:
    v = mpf_mul(x.val, from_int(c), p, "n")
    e = _up_add(_up_mul(from_int(abs(c)), x.err), _rnd_bound(v, p))
    return Bounded(v, e)


def b_scale(x: Bounded, q: Fraction, p: int) -> Bounded:
    """Multiply by an exact rational."""
    q = Fraction(q)
    if q.denominator == 1:
        return b_mul_int(x, q.numerator, p)
    return b_mul(x, Bounded.from_fraction(q, p + 8), p)


def b_div(x: Bounded, y: Bounded, p: int) -> Bounded:
    y_lo = _down_sub(mpf_abs(y.val), y.err)
    if mpf_cmp(y_lo, fzero) <= 0:
        raise PrecisionInsufficient("divisor is not certified away from zero")
    v = mpf_div(x.val, y.val, p, "n")
    num = _up_add(x.err, _up_mul(_up_add(mpf_abs(v), _rnd_bound(v, p)), y.err))
    e = _up_add(_up_div(num, y_lo), _rnd_bound(v, p))
    return Bounded(v, e)


def b_ln(x: Bounded, p: int) -> Bounded:
    """Natural log of a value certified positive."""
    x_lo = _down_sub(x.val, x.err)
    if mpf_cmp(x_lo, fzero) <= 0:
        if mpf_cmp(x.val, fzero) <= 0:
            raise ValueError("log of a non-positive value")
        raise PrecisionInsufficient("log argument not certified positive")
    if x.err == fzero and x.val == fone:
        return Bounded(fzero, fzero)
    v = mpf_log(x.val, p + 10, "n")
    e = _fn_err(v, p)
    if x.err != fzero:
        e = _up_add(e, _up_div(x.err, x_lo))
    return Bounded(v, e)


def b_sqrt(x: Bounded, p: int) -> Bounded:
    x_lo = _down_sub(x.val, x.err)
    if mpf_cmp(x_lo, fzero) < 0:
        raise PrecisionInsufficient("sqrt argument not certified nonnegative")
    v = mpf_sqrt(x.val, p + 10, "n")
    e = mpf_shift(mpf_abs(v), 1 - p)
    if x.err != fzero:
        if mpf_cmp(x_lo, fzero) == 0:
            raise PrecisionInsufficient("sqrt argument not certified positive")
        root_lo = mpf_sqrt(x_lo, _EPREC, "d")
        e = _up_add(e, _up_div(x.err, mpf_shift(root_lo, 1)))
    return Bounded(v, e)


def b_sum(items, p: int) -> Bounded:
    acc = Bounded(fzero, fzero)
    for it in items:
        acc = b_add(acc, it, p)
    return acc


@lru_cache(maxsize=1 << 16)
def ln_int(k: int, p: int) -> Bounded:
    """ln k for an exact integer k >= 1 (memoised)."""
    if k < 1:
        raise ValueError("ln_int needs k >= 1")
    if k == 1:
        return Bounded(fzero, fzero)
    v = mpf_log(from_int(k), p + 10, "n")
    return Bounded(v, _fn_err(v, p))


def _const_cached(name: str, p: int, compute):
    hit = cache.get("constant", [name, p])
    if hit is not None:
        return Bounded(cache.decode_raw(hit["val"]), cache.decode_raw(hit["err"]))
    b = compute()
    cache.put("constant", [name, p],
              {"val": cache.encode_raw(b.val), "err": cache.encode_raw(b.err)})
    return b


@lru_cache(maxsize=256)
def ln2_const(p: int) -> Bounded:
    def compute():
        v = mpf_ln2(p + 10)
        return Bounded(v, _fn_err(v, p))
    return _const_cached("ln2", p, compute)


@lru_cache(maxsize=256)
def pi_const(p: int) -> Bounded:
    def compute():
        v = mpf_pi(p + 10)
        return Bounded(v, _fn_err(v, p))
    return _const_cached("pi", p, compute)


# --- Euler's constant via Euler-Maclaurin -------------------------------
#
#   gamma = H_N - ln N - 1/(2N) + sum_{k=1..K} B_{2k} / (2k N^{2k}) + R,
#   |R| <= first omitted term.
#
# H_N and the correction sum are exact rationals; with N a power of two,
# ln N = m * ln 2 costs a single cached constant.  The error bound is the
# remainder plus conversion/rounding dust.


def _em_gamma_params(p: int) -> Tuple[int, int]:
    """Pick (m, K) with N = 2^m so the remainder is below 2^-(p+8).

    The scan sizes |B_{2K+2}| from Stirling's formula (2 bits of slack
    covers the zeta factor); only the chosen K ever computes an exact
    Bernoulli number.
    """
    target = p + 8
    best = None
    log2_2pi = math.log2(2 * math.pi)
    for K in range(6, 201, 2):
        log2_b = 1 + math.lgamma(2 * K + 3) / math.log(2) \
            - (2 * K + 2) * log2_2pi + 2
        need = target + max(int(log2_b) + 1, 0)
        m = max(3, -(-need // (2 * K + 2)))
        cost = (1 << m) + 48 * K
        if best is None or cost < best[0]:
            best = (cost, m, K)
    return best[1], best[2]


def _euler_gamma_at(p: int, m: int, K: int) -> Bounded:
    wp = p + 24
    N = 1 << m
    R = exact.harmonic(N) - Fraction(1, 2 * N)
    npow = 1
    n2 = N * N
    for k in range(1, K + 1):
        npow *= n2
        R += exact.bernoulli(2 * k) / (2 * k * npow)
    remainder = abs(exact.bernoulli(2 * K + 2)) / ((2 * K + 2) * (npow * n2))
    ln_n = b_mul_int(ln2_const(wp), m, wp)
    g = b_sub(Bounded.from_fraction(R, wp), ln_n, wp)
    return Bounded(g.val, _up_add(g.err, _fraction_to_raw_up(remainder)))


_gamma_memo: Dict[int, Bounded] = {}
_gamma_lock = threading.Lock()


def euler_gamma(p: int) -> Bounded:
    """Euler's constant with a certified bound below 2^-(p+4)."""
    hit = _gamma_memo.get(p)
    if hit is not None:
        return hit
    def compute():
        m, K = _em_gamma_params(p)
        return _euler_gamma_at(p, m, K)
    g = _const_cached("gamma", p, compute)
    with _gamma_lock:
        _gamma_memo.setdefault(p, g)
    return _gamma_memo[p]


def euler_gamma_pair(p: int) -> Tuple[Bounded, Bounded, int]:
    """Cross-check evaluation with (N, K) and (4N, K+2).

    Returns both values and the number of agreeing bits of the difference
    (absolute: agreement to ``b`` bits means |g1 - g2| <= 2^-b).
    """
    m, K = _em_gamma_params(p)
    g1 = _euler_gamma_at(p, m, K)
    g2 = _euler_gamma_at(p, m + 2, K + 2)
    diff = abs(g1.value_fraction() - g2.value_fraction())
    if diff == 0:
        bits = p + 64
    else:
        bits = -(diff.numerator.bit_length() - diff.denominator.bit_length())
    return g1, g2, bits


# --- cumulative log-factorial table -------------------------------------

_lf_tables: Dict[int, Tuple[List[tuple], List[tuple]]] = {}
_lf_lock = threading.Lock()


def log_factorial(m: int, p: int) -> Bounded:
    """ln(m!) by cumulative summation, cached per requested precision.

    The certified bound stays below the documented m * 2^(2-p) envelope
    because the table is built with 24 extra working bits.
    """
    if m < 0:
        raise ValueError("log_factorial needs m >= 0")
    wp = p + 24
    with _lf_lock:
        tab = _lf_tables.get(p)
        if tab is None:
            tab = ([fzero, fzero], [fzero, fzero])  # ln 0! = ln 1! = 0
            _lf_tables[p] = tab
        vals, errs = tab
        while len(vals) <= m:
            k = len(vals)
            lnk = mpf_log(from_int(k), wp + 10, "n")
            v = mpf_add(vals[-1], lnk, wp, "n")
            e = _up_add(_up_add(errs[-1], _fn_err(lnk, wp)), _rnd_bound(v, wp))
            vals.append(v)
            errs.append(e)
        return Bounded(vals[m], errs[m])


def digamma_int(k: int, p: int) -> Bounded:
    """psi(k+1) = H_k - gamma, from the exact harmonic number."""
    if k < 0:
        raise ValueError("digamma_int needs k >= 0")
    wp = p + 8
    return b_sub(Bounded.from_fraction(exact.harmonic(k), wp), euler_gamma(wp), p)


def frac_part_certified(x: Bounded) -> Tuple[int, Bounded]:
    """Split x into (floor(x), {x}) with the bound proven not to straddle.

    The fractional part uses the floor convention, so {x} is in [0, 1)
    also for negative x.  Raises :class:`PrecisionInsufficient` (with an
    estimate of the missing bits) when [x-err, x+err] contains an integer
    boundary.
    """
    q = raw_to_fraction(x.val)
    e = raw_to_fraction(x.err)
    fl = math.floor(q)
    if e > 0 and (math.floor(q - e) != fl or math.floor(q + e) != fl):
        frac = q - fl
        dist = min(frac, 1 - frac)
        if dist == 0:
            extra = None
        else:
            ratio = e / dist
            extra = max(1, (ratio.numerator.bit_length()
                            - ratio.denominator.bit_length()) + 1) + 8
        raise PrecisionInsufficient(
            f"certified interval straddles an integer near {fl}", extra)
    frac = q - fl
    if frac == 0:
        v = fzero
    else:
        shift = frac.denominator.bit_length() - 1  # exact power of two
        v = from_man_exp(frac.numerator, -shift)
    return fl, Bounded(v, x.err)


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working-precision knobs shared by the per-n computations.

    ``base_bits`` is the floor for every derived working precision;
    ``frac_bits`` is the certified resolution of fractional parts;
    escalation doubles the working precision until the target bound is
    met or ``max_bits`` is hit.
    """

    base_bits: int = 192
    frac_bits: int = 64
    guard_bits: int = 64
    max_bits: int = 1 << 16
    auto_escalate: bool = True
    tail_eps: Optional[Fraction] = None  # override for the series cutoff

    def __post_init__(self):
        if self.guard_bits < 32:
            raise ValueError("guard_bits must be at least 32")
        if self.base_bits < 64:
            raise ValueError("base_bits must be at least 64")
