"""Exact sparse q-expansions with fractional exponents.

A :class:`FracSeries` is a Laurent series in ``q`` whose exponents lie in
``(1/N)*Z`` for a per-series denominator ``N`` and whose coefficients are
exact rationals.  Every series carries an explicit precision ``prec``: terms
at exponents ``>= prec`` are *unknown*, not zero.  ``prec=None`` means the
series is known exactly everywhere (used for constants and polynomials).

Nothing in this module ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Iterator, Optional, Union

Rational = Union[int, Fraction]

__all__ = [
    "FracSeries",
    "PrecisionError",
    "series_add",
    "series_mul",
    "eta_quotient",
    "eisenstein2",
    "unary_theta",
    "q_derivative",
    "serre_derivative",
    "constant_term",
    "dumps_series",
    "loads_series",
]


class PrecisionError(ValueError):
    """Raised when a request needs coefficients beyond a series' precision."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _min_prec(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_prec(p: Optional[Fraction], e: Optional[Fraction]) -> Optional[Fraction]:
    # p + e with None acting as +infinity on either side
    if p is None or e is None:
        return None
    return p + e


class FracSeries:
    """Sparse exact Laurent series ``sum c_e q^e`` with truncation tracking.

    Parameters
    ----------
    terms:
        Iterable of ``(exponent, coefficient)`` pairs; rationals or ints.
        Terms at exponents ``>= prec`` carry no information and are dropped.
    prec:
        Exclusive upper bound on known exponents, or ``None`` for an exact
        series.
    denom:
        Optional lower bound for the exponent lattice denominator ``N``;
        it is always enlarged so that all exponents and ``prec`` lie in
        ``(1/N)*Z``.
    """

    __slots__ = ("denom", "_terms", "prec")

    def __init__(
        self,
        terms: Iterable[tuple[Rational, Rational]] = (),
        prec: Optional[Rational] = None,
        denom: int = 1,
    ):
        items = [(Fraction(e), Fraction(c)) for e, c in terms]
        p = None if prec is None else Fraction(prec)
        n = denom
        for e, _ in items:
            n = _lcm(n, e.denominator)
        if p is not None:
            n = _lcm(n, p.denominator)
        scaled: dict[int, Fraction] = {}
        for e, c in items:
            if c == 0:
                continue
            if p is not None and e >= p:
                continue
            k = int(e * n)
            c0 = scaled.get(k)
            if c0 is None:
                scaled[k] = c
            else:
                c = c0 + c
                if c:
                    scaled[k] = c
                else:
                    del scaled[k]
        self.denom = n
        self._terms = scaled
        self.prec = p

    @classmethod
    def _make(cls, denom: int, scaled: dict[int, Fraction], sprec: Optional[int]) -> "FracSeries":
        # internal fast path; `scaled` maps e*denom -> nonzero coefficient,
        # already truncated below sprec (= prec*denom)
        obj = object.__new__(cls)
        obj.denom = denom
        obj._terms = scaled
        obj.prec = None if sprec is None else Fraction(sprec, denom)
        return obj

    @classmethod
    def zero(cls, prec: Optional[Rational] = None) -> "FracSeries":
        return cls((), prec)

    @classmethod
    def constant(cls, c: Rational, prec: Optional[Rational] = None) -> "FracSeries":
        return cls([(0, c)], prec)

    @classmethod
    def monomial(cls, e: Rational, c: Rational = 1, prec: Optional[Rational] = None) -> "FracSeries":
        return cls([(e, c)], prec)

    # -- views ------------------------------------------------------------

    def items(self) -> Iterator[tuple[Fraction, Fraction]]:
        """Yield (exponent, coefficient) pairs in increasing exponent order."""
        n = self.denom
        for k in sorted(self._terms):
            yield Fraction(k, n), self._terms[k]

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def min_exponent(self) -> Optional[Fraction]:
        """Lowest exponent with a nonzero known coefficient, or None."""
        if not self._terms:
            return None
        return Fraction(min(self._terms), self.denom)

    def _effective_lo(self) -> Optional[Fraction]:
        # lower bound for the true valuation: min term if any, else prec
        if self._terms:
            return Fraction(min(self._terms), self.denom)
        return self.prec

    def coeff(self, e: Rational) -> Fraction:
        """Coefficient at exponent ``e``; zero if absent and below prec."""
        e = Fraction(e)
        if self.prec is not None and e >= self.prec:
            raise PrecisionError(f"coefficient at q^{e} is beyond precision {self.prec}")
        scaled = e * self.denom
        if scaled.denominator != 1:
            return Fraction(0)
        return self._terms.get(int(scaled), Fraction(0))

    def constant_term(self) -> Fraction:
        if self.prec is not None and self.prec <= 0:
            raise PrecisionError("constant term is not determined at this precision")
        return self._terms.get(0, Fraction(0))

    # -- algebra ----------------------------------------------------------

    def _rescaled(self, n: int) -> dict[int, Fraction]:
        if n == self.denom:
            return self._terms
        f = n // self.denom
        return {k * f: c for k, c in self._terms.items()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FracSeries):
            return NotImplemented
        if self.prec != other.prec:
            return False
        n = _lcm(self.denom, other.denom)
        return self._rescaled(n) == other._rescaled(n)

    __hash__ = None  # mutable-dict backed; compare by value, never hash

    def agrees_with(self, other: "FracSeries") -> bool:
        """True if the two series agree at every jointly determined exponent."""
        p = _min_prec(self.prec, other.prec)
        a, b = self.truncated(p), other.truncated(p)
        n = _lcm(a.denom, b.denom)
        return a._rescaled(n) == b._rescaled(n)

    def __neg__(self) -> "FracSeries":
        return FracSeries._make(
            self.denom,
            {k: -c for k, c in self._terms.items()},
            None if self.prec is None else int(self.prec * self.denom),
        )

    def __add__(self, other: Union["FracSeries", Rational]) -> "FracSeries":
        if isinstance(other, (int, Fraction)):
            other = FracSeries.constant(other)
        if not isinstance(other, FracSeries):
            return NotImplemented
        n = _lcm(self.denom, other.denom)
        p = _min_prec(self.prec, other.prec)
        sp = None if p is None else int(p * n)
        out = dict(self._rescaled(n))
        for k, c in other._rescaled(n).items():
            c0 = out.get(k)
            if c0 is None:
                out[k] = c
            else:
                c = c0 + c
                if c:
                    out[k] = c
                else:
                    del out[k]
        if sp is not None:
            out = {k: c for k, c in out.items() if k < sp}
        return FracSeries._make(n, out, sp)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, FracSeries) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other: Union["FracSeries", Rational]) -> "FracSeries":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                # exact zero; knowledge of the other factor is irrelevant
                return FracSeries.zero(self.prec)
            other = Fraction(other)
            return FracSeries._make(
                self.denom,
                {k: c * other for k, c in self._terms.items()},
                None if self.prec is None else int(self.prec * self.denom),
            )
        if not isinstance(other, FracSeries):
            return NotImplemented
        # precision of an exact convolution: a term of the result at exponent e
        # is fully determined iff no unknown-by-known (or unknown-by-unknown)
        # pair can land on e, which holds for e < min(a.prec+lo(b), b.prec+lo(a))
        # with lo read as the precision bound when a factor has no known terms.
        p = _min_prec(
            _add_prec(self.prec, other._effective_lo()),
            _add_prec(other.prec, self._effective_lo()),
        )
        if not self._terms or not other._terms:
            return FracSeries.zero(p)
        n = _lcm(self.denom, other.denom)
        sp = None if p is None else int(p * n)
        a = self._rescaled(n)
        b = other._rescaled(n)
        if len(a) > len(b):
            a, b = b, a
        out: dict[int, Fraction] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                if sp is not None and k >= sp:
                    continue
                c = out.get(k)
                if c is None:
                    out[k] = ca * cb
                else:
                    c = c + ca * cb
                    if c:
                        out[k] = c
                    else:
                        del out[k]
        return FracSeries._make(n, out, sp)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "FracSeries":
        if not isinstance(k, int):
            raise TypeError("series powers must be integers")
        if k < 0:
            return self.inverse() ** (-k)
        result = FracSeries.constant(1, None)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def shifted(self, e: Rational) -> "FracSeries":
        """Multiply by the monomial q^e."""
        e = Fraction(e)
        n = _lcm(self.denom, e.denominator)
        ke = int(e * n)
        sp = None if self.prec is None else int(self.prec * n) + ke
        return FracSeries._make(n, {k + ke: c for k, c in self._rescaled(n).items()}, sp)

    def truncated(self, prec: Optional[Rational]) -> "FracSeries":
        """Forget all coefficients at exponents >= prec."""
        p = _min_prec(self.prec, None if prec is None else Fraction(prec))
        if p == self.prec:
            return self
        n = _lcm(self.denom, p.denominator)
        sp = int(p * n)
        return FracSeries._make(n, {k: c for k, c in self._rescaled(n).items() if k < sp}, sp)

    def inverse(self, prec: Optional[Rational] = None) -> "FracSeries":
        """Exact multiplicative inverse.

        The reciprocal of a series known below ``p`` with valuation ``L`` is
        determined below ``p - 2L``; pass ``prec`` to request less (or, for an
        exact input, to make the computation finite).
        """
        if not self._terms:
            raise ZeroDivisionError("cannot invert a series with no known terms")
        natural = (
            None
            if self.prec is None
            else self.prec - 2 * Fraction(min(self._terms), self.denom)
        )
        target = _min_prec(natural, None if prec is None else Fraction(prec))
        if target is None:
            raise PrecisionError("inverting an exact series requires an explicit precision")
        n = _lcm(self.denom, target.denominator)
        terms = self._rescaled(n)
        lo = min(terms)
        c0 = terms[lo]
        sp = int(target * n)
        # self = c0 q^(lo/n) (1 + u); b = (1 + u)^{-1} satisfies the recursion
        # b_k = -sum_{0<j<=k} u_j b_{k-j}
        unit = {k - lo: c / c0 for k, c in terms.items() if k != lo}
        b: dict[int, Fraction] = {0: Fraction(1)}
        for k in range(1, sp + lo):
            acc = Fraction(0)
            for j, uj in unit.items():
                if j <= k:
                    bj = b.get(k - j)
                    if bj:
                        acc += uj * bj
            if acc:
                b[k] = -acc
        out = {k - lo: c / c0 for k, c in b.items() if k - lo < sp}
        return FracSeries._make(n, out, sp)

    # -- calculus ---------------------------------------------------------

    def q_derivative(self) -> "FracSeries":
        """Apply q d/dq: each term c q^e becomes (c e) q^e."""
        n = self.denom
        out = {}
        for k, c in self._terms.items():
            if k:
                out[k] = c * Fraction(k, n)
        sp = None if self.prec is None else int(self.prec * n)
        return FracSeries._make(n, out, sp)

    def __repr__(self) -> str:
        bits = []
        for e, c in self.items():
            if e == 0:
                bits.append(str(c))
            else:
                bits.append(f"{c}*q^({e})" if c != 1 else f"q^({e})")
        if self.prec is not None:
            bits.append(f"O(q^({self.prec}))")
        return " + ".join(bits) if bits else "0"


def series_add(a: FracSeries, b: FracSeries) -> FracSeries:
    """Exact sum; the result is known below min(a.prec, b.prec)."""
    return a + b


def series_mul(a: FracSeries, b: FracSeries) -> FracSeries:
    """Exact product with conservative precision propagation."""
    return a * b


def q_derivative(f: FracSeries) -> FracSeries:
    return f.q_derivative()


def constant_term(f: FracSeries) -> Fraction:
    return f.constant_term()


def _sigma1(n: int) -> int:
    s = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            s += i
            if i * i != n:
                s += n // i
        i += 1
    return s


def eisenstein2(prec: Rational) -> FracSeries:
    """The quasimodular Eisenstein series 1 - 24 sum sigma_1(n) q^n."""
    p = Fraction(prec)
    if p < 1:
        raise ValueError("eisenstein2 needs precision >= 1")
    terms: list[tuple[Rational, Rational]] = [(0, 1)]
    n = 1
    while n < p:
        terms.append((n, -24 * _sigma1(n)))
        n += 1
    return FracSeries(terms, p)


def _pentagonal_unit(m: int, rel_prec: Fraction) -> FracSeries:
    """prod_{n>=1} (1 - q^(m n)) expanded by the pentagonal number theorem."""
    terms: list[tuple[Rational, Rational]] = [(0, 1)]
    k = 1
    while True:
        e1 = m * k * (3 * k - 1) // 2
        e2 = m * k * (3 * k + 1) // 2
        s = -1 if k % 2 else 1
        hit = False
        if e1 < rel_prec:
            terms.append((e1, s))
            hit = True
        if e2 < rel_prec:
            terms.append((e2, s))
            hit = True
        if not hit:
            break
        k += 1
    return FracSeries(terms, rel_prec)


def eta_quotient(factors: Iterable[tuple[int, int]], prec: Rational) -> FracSeries:
    """Expand ``prod eta(m*tau)^r`` for the given (m, r) factors.

    The leading exponent is ``sum m*r/24``; negative powers go through exact
    power-series inversion of the unit part.  Raises if ``prec`` does not
    reach past the leading exponent.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("eta_quotient needs at least one factor")
    for m, r in factors:
        if m < 1 or not isinstance(m, int) or not isinstance(r, int):
            raise ValueError(f"bad eta factor ({m}, {r}): need integer m >= 1 and integer power")
    lead = Fraction(sum(m * r for m, r in factors), 24)
    p = Fraction(prec)
    if p <= lead:
        raise ValueError(f"precision {p} does not reach past the leading exponent {lead}")
    rel = p - lead
    unit = FracSeries.constant(1, rel)
    for m, r in factors:
        if r == 0:
            continue
        base = _pentagonal_unit(m, rel)
        if r < 0:
            base = base.inverse(rel)
            r = -r
        unit = unit * base ** r
    return unit.shifted(lead)


def unary_theta(m: Rational, a: Rational, prec: Rational) -> FracSeries:
    """``sum_{n in Z} q^(m (n+a)^2)`` truncated below prec; m must be positive."""
    m = Fraction(m)
    a = Fraction(a)
    p = Fraction(prec)
    if m <= 0:
        raise ValueError("unary_theta needs m > 0")
    terms: list[tuple[Fraction, int]] = []
    n0 = floor(-a)
    n = n0
    while m * (n + a) ** 2 < p:
        terms.append((m * (n + a) ** 2, 1))
        n -= 1
    n = n0 + 1
    while m * (n + a) ** 2 < p:
        terms.append((m * (n + a) ** 2, 1))
        n += 1
    return FracSeries(terms, p)


def serre_derivative(f: FracSeries, weight: Rational) -> FracSeries:
    """q d/dq f - (weight/12) E_2 f, the weight-raising derivative."""
    w = Fraction(weight)
    df = f.q_derivative()
    if w == 0 or not f:
        return df
    if f.prec is None:
        raise PrecisionError("serre derivative of an exact series needs a finite precision; truncate first")
    rel = f.prec - f.min_exponent
    e2 = eisenstein2(max(rel, Fraction(1)))
    return df - (w / 12) * (e2 * f).truncated(f.prec)


# -- text format ---------------------------------------------------------
#
# One header line "prec p/q" (or "prec exact"), then one line "exponent
# coefficient" per term, rationals printed the way Fraction does ("p/q", or
# "p" when integral).  Lines starting with "#" are comments.


def dumps_series(f: FracSeries) -> str:
    lines = ["prec exact" if f.prec is None else f"prec {f.prec}"]
    for e, c in f.items():
        lines.append(f"{e} {c}")
    return "\n".join(lines) + "\n"


def loads_series(text: str) -> FracSeries:
    prec: Optional[Fraction] = None
    seen_prec = False
    terms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("prec"):
            _, val = line.split(None, 1)
            prec = None if val.strip() == "exact" else Fraction(val.strip())
            seen_prec = True
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad series line: {raw!r}")
        terms.append((Fraction(parts[0]), Fraction(parts[1])))
    if not seen_prec:
        raise ValueError("series text is missing the 'prec' header line")
    return FracSeries(terms, prec)
