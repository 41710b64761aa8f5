"""Per-n quantities of the Sondow decomposition, with certified bounds.

For each n the decomposition I_n = C(2n,n)*gamma + L_n - A_n is evaluated
along two independent routes wherever one exists:

* L_n from the explicit log-factorial sum vs. log(S_n)/d_{2n} from the
  integer-exponent power product;
* I_n from the closed form vs. the integral series
  I_n = sum_{v>n} integral_v^infty (n!/(x(x+1)...(x+n)))^2 dx.

The series route is the ground truth: each summand has the exact closed
form f(v) = sum_k Cs_k/(v+k) - sum_k As_k ln(v+k) (partial fractions,
with Cs_k = C(n,k)^2 and As_k = 2 C(n,k)^2 (H_k - H_{n-k})), and the tail
past a small cutoff is summed by Euler-Maclaurin.  Because f is completely
monotone on (0, inf) (an integral of a product of completely monotone
factors), the Euler-Maclaurin remainder is bounded by the first omitted
term, which we evaluate exactly in rational arithmetic.  That certified
tail is what makes a 30+ digit series evaluation feasible at n = 1, where
naive summation to the same accuracy would need ~1e16 terms.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from mpmath.libmp import fzero

from . import cache, exact
from .mpnum import (
    Bounded,
    PrecisionExhausted,
    PrecisionInsufficient,
    PrecisionPolicy,
    agrees,
    b_abs,
    b_add,
    b_div,
    b_mul,
    b_mul_int,
    b_scale,
    b_sub,
    b_sum,
    euler_gamma,
    frac_part_certified,
    ln_int,
    log_factorial,
    pi_const,
    ln2_const,
    _fraction_to_raw_up,
    _up_add,
)

__all__ = [
    "TailBound",
    "SeqRecord",
    "CriterionPoint",
    "sondow_threshold",
    "L_from_factorial_logs",
    "log_S_exponents",
    "log_S",
    "L_from_power_product",
    "L_consistency",
    "I_closed_form",
    "I_series",
    "series_term",
    "gamma_roundtrip",
    "criterion_point",
    "tail_probe",
    "A_approx",
    "build_record",
    "closed_form_floor",
    "default_series_eps",
]


def sondow_threshold(p: int) -> Bounded:
    """pi / (6 ln 2), the reference limit of the irrationality criterion."""
    return b_div(pi_const(p), b_mul_int(ln2_const(p), 6, p), p)


def _d2n(n: int) -> int:
    hit = cache.get("d_n", 2 * n)
    if hit is not None:
        return int(hit)
    d = exact.lcm_upto(2 * n)
    cache.put("d_n", 2 * n, str(d))
    return d


def L_from_factorial_logs(n: int, p: int) -> Bounded:
    """L_n = sum_j 2 C(n,j)^2 (H_j - H_{n-j}) ln((n+j)!).

    The weights are exactly the scaled simple-pole residues of the
    partial-fraction decomposition.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    weights = exact.scaled_residue_weights(n)
    terms = []
    for j, w in enumerate(weights):
        if w == 0:
            continue
        terms.append(b_scale(log_factorial(n + j, p), w, p))
    return b_sum(terms, p)


def log_S_exponents(n: int) -> List[int]:
    """Integer exponents E_k with log S_n = sum_{k=1..n} E_k ln(n+k).

    E_k collapses the triple product over (k, i, j) with per-factor
    exponent (2 d_{2n}/j) C(n,i)^2; each 2 d_{2n}/j is checked to be an
    exact integer (j <= 2n divides d_{2n}, so a failure means a bug).
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    d2 = 2 * _d2n(n)
    quot = [0] * (n + 1)
    for j in range(1, n + 1):
        q, r = divmod(d2, j)
        if r:
            raise exact.IdentityViolation(f"2*d_2n not divisible by j={j} at n={n}")
        quot[j] = q
    # prefix[j] = sum_{q<=j} 2*d2n/q ; the quotient depends on j alone, so
    # checking j = 1..n above covers every (k, i, j) triple.
    prefix = [0] * (n + 1)
    for j in range(1, n + 1):
        prefix[j] = prefix[j - 1] + quot[j]
    # weight of ln(n+k) for a given i: sum_{j=i+1..n-i} quot[j]
    half = [0] * (n // 2 + 1)
    acc = 0
    for i in range(n // 2 + 1):
        if i + 1 <= n - i:
            acc += exact.binomial(n, i) ** 2 * (prefix[n - i] - prefix[i])
        half[i] = acc
    return [half[min(k - 1, n - k, n // 2)] for k in range(1, n + 1)]


def log_S(n: int, p: int) -> Bounded:
    """log S_n as a certified float (S_n itself is astronomically large)."""
    expo = log_S_exponents(n)
    terms = [b_mul_int(ln_int(n + k, p), expo[k - 1], p) for k in range(1, n + 1)]
    return b_sum(terms, p)


def L_from_power_product(n: int, p: int) -> Bounded:
    """L_n = log(S_n) / d_{2n}; independent of the log-factorial route."""
    return b_div(log_S(n, p), Bounded.exact_int(_d2n(n)), p)


def L_consistency(n: int, p: int) -> Tuple[Bounded, bool]:
    """Relative difference of the two L_n routes and the certified verdict."""
    l1 = L_from_factorial_logs(n, p)
    l2 = L_from_power_product(n, p)
    rel = b_div(b_abs(b_sub(l1, l2, p)), b_abs(l2), p)
    return rel, agrees(l1, l2)


def closed_form_floor(n: int) -> int:
    """Minimum working precision for the closed form of I_n.

    The sum cancels from terms of size ~4^n down to I_n ~ 16^-n / n, so
    roughly 6n bits vanish; 64 guard bits on top.
    """
    return 6 * n + 64


def I_closed_form(n: int, p: int) -> Bounded:
    """I_n = C(2n,n) gamma + L_n - A_n (closed form; the cross-check route)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if p < closed_form_floor(n):
        raise PrecisionInsufficient(
            f"closed form at n={n} needs >= {closed_form_floor(n)} bits",
            closed_form_floor(n) - p,
        )
    g = b_mul_int(euler_gamma(p), math.comb(2 * n, n), p)
    l = L_from_factorial_logs(n, p)
    a = Bounded.from_fraction(exact.A_exact(n), p)
    return b_sub(b_add(g, l, p), a, p)


# --- series route --------------------------------------------------------


@dataclass(frozen=True)
class TailBound:
    """Certificate for the series tail summed past cutoff v = V.

    ``remainder`` bounds everything not explicitly computed (the
    Euler-Maclaurin remainder with ``em_terms`` correction terms); it is
    valid because the summand is completely monotone.
    """

    cutoff: int
    em_terms: int
    remainder: Fraction


def series_term(n: int, v: int, p: int) -> Bounded:
    """f(v) = integral_v^infty (n!/(x...(x+n)))^2 dx, in closed form."""
    cs = exact.scaled_square_weights(n)
    asw = exact.scaled_residue_weights(n)
    rat = sum((Fraction(c, v + k) for k, c in enumerate(cs)), Fraction(0))
    out = Bounded.from_fraction(rat, p)
    for k, w in enumerate(asw):
        if w == 0:
            continue
        out = b_sub(out, b_scale(ln_int(v + k, p), w, p), p)
    return out


def _g_derivative(n: int, m: int, a: int, asw, cs) -> Fraction:
    """m-th derivative at integer a of the scaled squared-product kernel.

    g(x) = sum_k As_k/(x+k) + Cs_k/(x+k)^2, so the derivative is an exact
    rational once a is an integer.
    """
    s = Fraction(0)
    for k in range(n + 1):
        base = a + k
        pw = base ** (m + 1)
        s += asw[k] / pw + Fraction((m + 1) * cs[k], pw * base)
    if m % 2:
        s = -s
    return exact.factorial(m) * s


def _em_remainder(n: int, a: int, K: int, asw, cs) -> Fraction:
    b = abs(exact.bernoulli(2 * K + 2))
    return b / exact.factorial(2 * K + 2) * abs(_g_derivative(n, 2 * K, a, asw, cs))


def _log2_fraction(q: Fraction) -> int:
    # upper estimate of log2 of a positive rational (within 1)
    return q.numerator.bit_length() - q.denominator.bit_length() + 1


_EM_PADS = (32, 48, 64, 96, 128, 192, 256, 384, 512)
_EM_TERMS = (6, 8, 10, 12, 16, 20, 24, 32)


def _choose_cutoff(n: int, eps: Fraction, asw, cs) -> Tuple[int, int, Fraction]:
    target = eps / 4
    for pad in _EM_PADS:
        v_cut = n + pad
        for K in _EM_TERMS:
            rem = _em_remainder(n, v_cut + 1, K, asw, cs)
            if rem <= target:
                return v_cut, K, rem
    raise PrecisionExhausted(
        f"no Euler-Maclaurin configuration reaches eps={float(eps):.3e} at n={n}")


def default_series_eps(n: int, policy: PrecisionPolicy) -> Fraction:
    """Absolute target: ~ (4n + frac_bits + 52) bits below 1/n.

    I_n itself is ~16^-n/n, so this leaves frac_bits + ~52 significant
    bits in the result.
    """
    return Fraction(1, n << (4 * n + policy.frac_bits + 52))


def I_series(
    n: int,
    eps: Optional[Fraction] = None,
    policy: PrecisionPolicy = PrecisionPolicy(),
) -> Tuple[Bounded, TailBound]:
    """Certified series evaluation of I_n with total error below eps.

    Terms v = n+1 .. V are summed in closed form (their rational parts
    folded into a single exact harmonic-number sum, the log parts into
    log-factorial differences); the tail past V is summed by
    Euler-Maclaurin with exact rational correction terms and a certified
    remainder.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    if eps is None:
        eps = policy.tail_eps or default_series_eps(n, policy)
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")

    asw = exact.scaled_residue_weights(n)
    cs = exact.scaled_square_weights(n)
    if sum(asw, Fraction(0)) != 0:
        raise exact.IdentityViolation(f"residue weights do not cancel at n={n}")
    # weights of ln(a+k) in integral_a^infty x*g(x) dx; their sum must
    # vanish for the integral to converge (g decays like x^-(2n+2))
    wlog = [Fraction(cs[k]) - k * asw[k] for k in range(n + 1)]
    if sum(wlog, Fraction(0)) != 0:
        raise exact.IdentityViolation(f"integral log weights do not cancel at n={n}")

    v_cut, em_terms, remainder = _choose_cutoff(n, eps, asw, cs)
    a = v_cut + 1

    # exact pieces, independent of working precision
    main_rat = sum(
        (cs[k] * (exact.harmonic(v_cut + k) - exact.harmonic(n + k))
         for k in range(n + 1)),
        Fraction(0),
    )
    int_rat = -sum((Fraction(k * cs[k], a + k) for k in range(n + 1)), Fraction(0))
    em_corr = sum(
        (exact.bernoulli(2 * j) / exact.factorial(2 * j)
         * _g_derivative(n, 2 * j - 2, a, asw, cs)
         for j in range(1, em_terms + 1)),
        Fraction(0),
    )

    p = max(policy.base_bits, 2 * n - _log2_fraction(eps) + 64)
    if p > policy.max_bits:
        raise PrecisionExhausted(
            f"series at n={n} needs {p} working bits, ceiling is {policy.max_bits}")
    while True:
        asb = [Bounded.from_fraction(w, p + 8) for w in asw]
        # sum_{v=n+1..V} f(v), log parts folded through log-factorials
        main = Bounded.from_fraction(main_rat, p)
        for k in range(n + 1):
            if asw[k] == 0:
                continue
            dlf = b_sub(log_factorial(v_cut + k, p), log_factorial(n + k, p), p)
            main = b_sub(main, b_mul(asb[k], dlf, p), p)

        # f(a); reused by the boundary and integral pieces
        f_a = series_term(n, a, p)
        # integral_a^infty f = -a f(a) - sum_k wlog_k ln(a+k) + int_rat
        integral = b_add(b_mul_int(f_a, -a, p),
                         Bounded.from_fraction(int_rat, p), p)
        for k in range(n + 1):
            if wlog[k] == 0:
                continue
            integral = b_sub(integral, b_scale(ln_int(a + k, p), wlog[k], p), p)

        tail = b_add(integral, b_scale(f_a, Fraction(1, 2), p), p)
        tail = b_add(tail, Bounded.from_fraction(em_corr, p), p)
        total = b_add(main, tail, p)
        total = Bounded(total.val, _up_add(total.err, _fraction_to_raw_up(remainder)))

        if total.err_fraction() <= eps:
            return total, TailBound(cutoff=v_cut, em_terms=em_terms,
                                    remainder=remainder)
        if not policy.auto_escalate or 2 * p > policy.max_bits:
            raise PrecisionExhausted(
                f"series at n={n} cannot reach eps={float(eps):.3e} "
                f"within {policy.max_bits} bits")
        p *= 2


def gamma_roundtrip(n: int, p: int,
                    policy: PrecisionPolicy = PrecisionPolicy()) -> Bounded:
    """Recover gamma as (I_n + A_n - L_n) / C(2n,n) from the series route.

    Targets roughly half the working precision, which is far below the
    certified budget of each ingredient.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    c = math.comb(2 * n, n)
    eps = Fraction(c, 1 << (p // 2 + 8))
    i_val, _ = I_series(n, eps, policy)
    a = Bounded.from_fraction(exact.A_exact(n), p)
    l = L_from_factorial_logs(n, p)
    return b_div(b_sub(b_add(i_val, a, p), l, p), Bounded.exact_int(c), p)


# --- irrationality-criterion probe ---------------------------------------


@dataclass(frozen=True)
class CriterionPoint:
    """One row of the criterion table: Q_n = (16^n n / d_{2n}) {log S_n}."""

    n: int
    precision_bits: int
    log_s: Bounded
    log_s_floor: int
    frac: Bounded
    q: Bounded
    dist_zero: Bounded
    dist_threshold: Bounded


def _criterion_precision(n: int, d2n: int, frac_bits: int) -> int:
    # integer part of log S_n is ~ bits(d_2n) + 2n wide; fractional parts
    # need working precision beyond that width
    return d2n.bit_length() + 2 * n + frac_bits + 64


def criterion_point(n: int, frac_bits: Optional[int] = None,
                    policy: PrecisionPolicy = PrecisionPolicy()) -> CriterionPoint:
    """Certified {log S_n} and Q_n, with distances to 0 and pi/(6 ln 2).

    The probe reports both distances and asserts neither limit.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    if frac_bits is None:
        frac_bits = policy.frac_bits
    d2n = _d2n(n)
    p = max(policy.base_bits, _criterion_precision(n, d2n, frac_bits))
    if p > policy.max_bits:
        raise PrecisionExhausted(
            f"criterion at n={n} needs {p} working bits, ceiling is "
            f"{policy.max_bits}")
    frac_target = Fraction(1, 1 << frac_bits)
    while True:
        ls = log_S(n, p)
        try:
            floor_part, frac = frac_part_certified(ls)
            if frac.err_fraction() <= frac_target:
                break
            needed = frac_bits
        except PrecisionInsufficient as e:
            needed = e.extra_bits or p
        if not policy.auto_escalate:
            raise PrecisionExhausted(f"criterion at n={n} needs escalation")
        nxt = max(2 * p, p + needed)
        if nxt > policy.max_bits:
            raise PrecisionExhausted(
                f"criterion at n={n} exhausted at {policy.max_bits} bits")
        p = nxt
    q = b_scale(frac, Fraction((16 ** n) * n, d2n), p)
    thr = sondow_threshold(max(frac_bits + 96, 192))
    return CriterionPoint(
        n=n,
        precision_bits=p,
        log_s=ls,
        log_s_floor=floor_part,
        frac=frac,
        q=q,
        dist_zero=b_abs(q),
        dist_threshold=b_abs(b_sub(q, thr, p)),
    )


def tail_probe(n: int, r: int, p: int) -> Bounded:
    """The vanishing tail sum S_n(r) behind the closed form of I_n.

    S_n(r) = sum_j C(n,j)^2 (2(H_{n-j}-H_j) ln((n+j+r)!) + ln(n+j+r)).
    Evaluated without materialising huge log-factorials: the weights sum
    to zero, so only logs of n+r+1 .. 2n+r enter.  S_n(r) -> 0 as r grows;
    this is the quantity whose log-r coefficient is
    exact.tail_log_coefficient(n).
    """
    if n < 1 or r < 1:
        raise ValueError("n >= 1 and r >= 1 required")
    wp = p + 2 * n + r.bit_length() + 32
    neg_as = [-w for w in exact.scaled_residue_weights(n)]  # 2C^2(H_{n-j}-H_j)
    suffix = list(neg_as)
    for j in range(n - 1, -1, -1):
        suffix[j] += suffix[j + 1]
    if suffix[0] != 0:
        raise exact.IdentityViolation("probe weights do not cancel")
    out = Bounded(fzero, fzero)
    for i in range(1, n + 1):
        if suffix[i] == 0:
            continue
        out = b_add(out, b_scale(ln_int(n + r + i, wp), suffix[i], wp), wp)
    for j, c in enumerate(exact.scaled_square_weights(n)):
        out = b_add(out, b_mul_int(ln_int(n + j + r, wp), c, wp), wp)
    return out


def A_approx(n: int, p: int) -> Bounded:
    """A_n evaluated in floating arithmetic (cumulative harmonic sums).

    Must agree with the exact rational value wherever both are computed;
    exists so the asymptotic scans can leave the exact range.
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    wp = p + 16
    h = Bounded(fzero, fzero)
    hs = [h]
    for k in range(1, 2 * n + 1):
        h = b_add(h, Bounded.from_fraction(Fraction(1, k), wp), wp)
        hs.append(h)
    terms = [
        b_mul_int(hs[n + j], exact.binomial(n, j) ** 2, wp)
        for j in range(n + 1)
    ]
    return b_sum(terms, p)


# --- full per-n record ----------------------------------------------------


@dataclass
class SeqRecord:
    """Everything the workbench knows about one n."""

    n: int
    a_exact: Fraction
    d2n: int
    precision_bits: int
    L_logfact: Bounded
    L_product: Bounded
    log_s: Bounded
    l_agree: bool
    I_closed: Bounded
    I_series: Bounded
    i_agree: bool
    i_positive: bool
    tail: TailBound
    log_s_floor: int
    frac_log_s: Bounded
    q: Bounded
    q_dist_zero: Bounded
    q_dist_threshold: Bounded
    q_precision_bits: int
    timings: Dict[str, float] = field(default_factory=dict)


def build_record(n: int, policy: PrecisionPolicy = PrecisionPolicy()) -> SeqRecord:
    """Populate every per-n quantity; deterministic for fixed (n, policy)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    timings: Dict[str, float] = {}
    p = max(policy.base_bits, 6 * n + policy.frac_bits + 96)

    t0 = time.perf_counter()
    a_ex = exact.A_exact(n)
    d2n = _d2n(n)
    timings["exact"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    l_log = L_from_factorial_logs(n, p)
    ls = log_S(n, p)
    l_prod = b_div(ls, Bounded.exact_int(d2n), p)
    l_agree = agrees(l_log, l_prod)
    timings["L"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    i_closed = I_closed_form(n, p)
    i_ser, tail = I_series(n, policy=policy)
    i_agree = agrees(i_closed, i_ser)
    i_positive = i_ser.value_fraction() - i_ser.err_fraction() > 0
    timings["I"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cp = criterion_point(n, policy.frac_bits, policy)
    timings["criterion"] = time.perf_counter() - t0

    return SeqRecord(
        n=n,
        a_exact=a_ex,
        d2n=d2n,
        precision_bits=p,
        L_logfact=l_log,
        L_product=l_prod,
        log_s=ls,
        l_agree=l_agree,
        I_closed=i_closed,
        I_series=i_ser,
        i_agree=i_agree,
        i_positive=i_positive,
        tail=tail,
        log_s_floor=cp.log_s_floor,
        frac_log_s=cp.frac,
        q=cp.q,
        q_dist_zero=cp.dist_zero,
        q_dist_threshold=cp.dist_threshold,
        q_precision_bits=cp.precision_bits,
        timings=timings,
    )
