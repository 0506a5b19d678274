"""Exact arithmetic in the enveloping algebra U_n of a zero-multiplication algebra.

U_n is the unital associative algebra over the rationals on generators
l_1..l_n, r_1..r_n subject to

    l_i * l_j = l_j * l_i                 (the l's commute)
    r_i * l_j = l_j * r_i + r_i * r_j     (straightening rule)

It contains the polynomial algebra L_n = Q[l_1..l_n], the free associative
algebra R_n = Q<r_1..r_n>, and the ideal I_n generated by the r's, with
U_n = L_n (+) I_n as vector spaces.  Every element has a unique normal form
as a rational combination of basis words

    l_1^{s_1} ... l_n^{s_n} r_{j_1} ... r_{j_s}

and all operations in this module return that normal form.  Coefficients are
`fractions.Fraction`; nothing here ever touches floating point.
"""

from __future__ import annotations

from contextvars import ContextVar
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple

# Lexicographic tie-break used when comparing L-monomials of equal total
# degree: True means index 1 is the most significant position, False means
# index n is.  The whole theory is convention-independent; keeping this a
# module constant lets the test suite rerun under the reverse convention.
PDEG_INDEX1_MOST_SIGNIFICANT = True

# Optional cap on the number of stored terms of any constructed element.
# None means unlimited.  The CLI sets this from --max-terms / LSEA_MAX_TERMS;
# library code only ever reads it.
TERM_BUDGET: ContextVar[int | None] = ContextVar("lsea_term_budget", default=None)


class AmbientMismatch(ValueError):
    """Operands live in U_n for different n."""


class DomainError(ValueError):
    """Argument lies outside the required subalgebra or index range."""


class TermBudgetExceeded(RuntimeError):
    """An intermediate result grew past the configured --max-terms guard."""


class _NegInf:
    """Degree of the zero element; compares strictly below every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return not isinstance(other, _NegInf)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _NegInf)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __repr__(self):
        return "-inf"


NEG_INF = _NegInf()


class BasisWord(NamedTuple):
    """One basis word l^lexp * r_{j_1}..r_{j_s} (lexp exponents, rword letters)."""

    lexp: tuple[int, ...]
    rword: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.lexp) + len(self.rword)

    def wdegree(self, weights) -> int:
        return sum(e * w for e, w in zip(self.lexp, weights)) + sum(
            weights[j - 1] for j in self.rword
        )


def pdeg_key(lexp: tuple[int, ...]):
    """Sort key realizing the degree-then-lex order on L-monomials."""
    body = lexp if PDEG_INDEX1_MOST_SIGNIFICANT else tuple(reversed(lexp))
    return (sum(lexp), body)


def rword_key(rword: tuple[int, ...]):
    """Sort key for the deg-lex order on r-words with r_1 > r_2 > ... > r_n."""
    return (len(rword), tuple(-j for j in rword))


def word_key(word: BasisWord):
    return (pdeg_key(word.lexp), rword_key(word.rword))


def pdeg_compare(u: tuple[int, ...], v: tuple[int, ...]) -> int:
    """-1, 0, or 1 as the L-monomial with exponents u sorts below, equal, above v."""
    if len(u) != len(v):
        raise DomainError("exponent vectors of different length")
    ku, kv = pdeg_key(u), pdeg_key(v)
    return -1 if ku < kv else (0 if ku == kv else 1)


def rword_compare(v1: tuple[int, ...], v2: tuple[int, ...]) -> int:
    """-1, 0, or 1 in the deg-lex order (shorter smaller, letter 1 largest)."""
    k1, k2 = rword_key(tuple(v1)), rword_key(tuple(v2))
    return -1 if k1 < k2 else (0 if k1 == k2 else 1)


def _coeff(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


def _charge(count: int) -> None:
    limit = TERM_BUDGET.get()
    if limit is not None and count > limit:
        raise TermBudgetExceeded(
            f"intermediate result has {count} terms, over the --max-terms bound {limit}"
        )


class Element:
    """A canonical finite rational combination of basis words of U_n.

    The term map never stores zero coefficients, so equal elements have
    identical term maps.  Instances are immutable; every operation returns a
    new element.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms=(), _trusted: bool = False):
        if n < 1:
            raise DomainError("ambient n must be >= 1")
        self.n = n
        if _trusted:
            self._terms = terms
        else:
            clean: dict[BasisWord, Fraction] = {}
            items = terms.items() if isinstance(terms, dict) else terms
            for word, c in items:
                word = BasisWord(tuple(word[0]), tuple(word[1]))
                if len(word.lexp) != n:
                    raise AmbientMismatch(f"exponent vector {word.lexp} not of length {n}")
                if any(e < 0 for e in word.lexp):
                    raise DomainError(f"negative exponent in {word.lexp}")
                if any(not 1 <= j <= n for j in word.rword):
                    raise DomainError(f"r-letter out of range 1..{n} in {word.rword}")
                c = _coeff(c)
                acc = clean.get(word, _ZERO) + c
                if acc:
                    clean[word] = acc
                elif word in clean:
                    del clean[word]
            self._terms = clean
        _charge(len(self._terms))

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Element":
        return cls(n, {}, _trusted=True)

    @classmethod
    def one(cls, n: int) -> "Element":
        return cls.from_word(n, (0,) * n, ())

    @classmethod
    def from_word(cls, n, lexp, rword, coeff=1) -> "Element":
        c = _coeff(coeff)
        if not c:
            return cls.zero(n)
        return cls(n, [(BasisWord(tuple(lexp), tuple(rword)), c)])

    # -- inspection --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def terms(self) -> Iterator[tuple[BasisWord, Fraction]]:
        return iter(self._terms.items())

    def canonical_terms(self) -> list[tuple[BasisWord, Fraction]]:
        """Terms sorted descending: L-monomial first, then r-word."""
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]), reverse=True)

    def coefficient(self, lexp, rword) -> Fraction:
        return self._terms.get(BasisWord(tuple(lexp), tuple(rword)), _ZERO)

    def degree(self):
        """Total degree, NEG_INF for the zero element."""
        if not self._terms:
            return NEG_INF
        return max(w.degree for w in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    __hash__ = None

    def __repr__(self):
        from .parser import format_element

        return f"<U_{self.n}: {format_element(self)}>"

    # -- linear structure ----------------------------------------------------

    def _require_same_ambient(self, other: "Element") -> None:
        if self.n != other.n:
            raise AmbientMismatch(f"ambient mismatch: U_{self.n} vs U_{other.n}")

    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        self._require_same_ambient(other)
        out = dict(self._terms)
        for word, c in other._terms.items():
            acc = out.get(word, _ZERO) + c
            if acc:
                out[word] = acc
            elif word in out:
                del out[word]
        return Element(self.n, out, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Element(self.n, {w: -c for w, c in self._terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, Element):
            return mul(self, other)
        c = _coeff(other)
        if not c:
            return Element.zero(self.n)
        return Element(self.n, {w: c * k for w, k in self._terms.items()}, _trusted=True)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        c = _coeff(other)
        if not c:
            raise ZeroDivisionError("division of an element by zero")
        return self * (Fraction(1) / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise DomainError("exponent must be a non-negative integer")
        out = Element.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k = base_needed
        return out


_ZERO = Fraction(0)


# -- generators and straightening -------------------------------------------


def generator(n: int, kind: str, index: int) -> Element:
    """The canonical one-term element l_index or r_index of U_n."""
    if not 1 <= index <= n:
        raise DomainError(f"generator index {index} out of range 1..{n}")
    kind = kind.lower()
    if kind == "l":
        lexp = tuple(1 if i == index - 1 else 0 for i in range(n))
        return Element.from_word(n, lexp, ())
    if kind == "r":
        return Element.from_word(n, (0,) * n, (index,))
    raise DomainError(f"unknown generator kind {kind!r}")


def gen_l(n: int, i: int) -> Element:
    return generator(n, "l", i)


def gen_r(n: int, i: int) -> Element:
    return generator(n, "r", i)


def add(a: Element, b: Element) -> Element:
    return a + b


def scale(c, a: Element) -> Element:
    return a * _coeff(c)


@lru_cache(maxsize=None)
def _r_past_monomial(i: int, lexp: tuple[int, ...]):
    """Normal form of r_i * l^lexp as ((lexp', rword', int_coeff), ...).

    Uses the straightening rule for a polynomial f:
        r_i f = f r_i + r_i sum_j (df/dl_j) r_j
    recursively; the recursion terminates because the polynomial factor
    strictly drops total degree.  Structure constants are integers.
    """
    if not any(lexp):
        return ((lexp, (i,), 1),)
    acc: dict[tuple, int] = {(lexp, (i,)): 1}
    for j, e in enumerate(lexp):
        if e:
            smaller = lexp[:j] + (e - 1,) + lexp[j + 1 :]
            for s2, v2, c in _r_past_monomial(i, smaller):
                key = (s2, v2 + (j + 1,))
                acc[key] = acc.get(key, 0) + e * c
    return tuple((s, v, c) for (s, v), c in acc.items())


@lru_cache(maxsize=None)
def _rword_past_monomial(rword: tuple[int, ...], lexp: tuple[int, ...]):
    """Normal form of (r-word) * l^lexp as ((lexp', rword', int_coeff), ...)."""
    if not rword:
        return ((lexp, (), 1),)
    acc: dict[tuple, int] = {}
    head = rword[0]
    for s1, v1, c1 in _rword_past_monomial(rword[1:], lexp):
        for s2, v2, c2 in _r_past_monomial(head, s1):
            key = (s2, v2 + v1)
            acc[key] = acc.get(key, 0) + c1 * c2
    return tuple((s, v, c) for (s, v), c in acc.items())


def mul(a: Element, b: Element) -> Element:
    """Canonical normal form of the product a * b."""
    a._require_same_ambient(b)
    acc: dict[BasisWord, Fraction] = {}
    for w1, c1 in a._terms.items():
        for w2, c2 in b._terms.items():
            c = c1 * c2
            for s, v, k in _rword_past_monomial(w1.rword, w2.lexp):
                word = BasisWord(
                    tuple(x + y for x, y in zip(w1.lexp, s)), v + w2.rword
                )
                acc2 = acc.get(word, _ZERO) + c * k
                if acc2:
                    acc[word] = acc2
                elif word in acc:
                    del acc[word]
        _charge(len(acc))
    return Element(a.n, acc, _trusted=True)


def commutator(a: Element, b: Element) -> Element:
    """a*b - b*a."""
    return mul(a, b) - mul(b, a)


def normal_form_oracle(n: int, word: Iterable[tuple[str, int]]) -> Element:
    """Normal form of a product of generators by one-step leftmost rewriting.

    Each letter is ('l', i) or ('r', i).  Repeatedly rewrites the leftmost
    adjacency r_i l_j into l_j r_i + r_i r_j, then sorts the l-prefix.  Kept
    deliberately independent of `mul` so the two can cross-check each other.
    """
    letters = []
    for kind, i in word:
        kind = kind.lower()
        if kind not in ("l", "r"):
            raise DomainError(f"unknown generator kind {kind!r}")
        if not 1 <= i <= n:
            raise DomainError(f"generator index {i} out of range 1..{n}")
        letters.append((kind, i))

    def leftmost_rl(w):
        for k in range(len(w) - 1):
            if w[k][0] == "r" and w[k + 1][0] == "l":
                return k
        return None

    terms: dict[tuple, Fraction] = {tuple(letters): Fraction(1)}
    while True:
        found = None
        for w in terms:
            k = leftmost_rl(w)
            if k is not None:
                found = (w, k)
                break
        if found is None:
            break
        w, k = found
        c = terms.pop(w)
        (_, i), (_, j) = w[k], w[k + 1]
        for ww in (
            w[:k] + (("l", j), ("r", i)) + w[k + 2 :],
            w[:k] + (("r", i), ("r", j)) + w[k + 2 :],
        ):
            acc = terms.get(ww, _ZERO) + c
            if acc:
                terms[ww] = acc
            elif ww in terms:
                del terms[ww]

    out: dict[BasisWord, Fraction] = {}
    for w, c in terms.items():
        lpart = sorted(i for kind, i in w if kind == "l")
        rpart = tuple(i for kind, i in w if kind == "r")
        lexp = [0] * n
        for i in lpart:
            lexp[i - 1] += 1
        key = BasisWord(tuple(lexp), rpart)
        acc = out.get(key, _ZERO) + c
        if acc:
            out[key] = acc
        elif key in out:
            del out[key]
    return Element(n, out, _trusted=True)


# -- leading data, gradings ---------------------------------------------------


def lm_lc(g: Element) -> tuple[tuple[int, ...] | None, Element]:
    """Greatest L-monomial of g and its coefficient in R_n.

    Writing g as a sum of distinct L-monomials times R_n coefficients, returns
    (exponent vector of the greatest monomial, that coefficient).  For g = 0
    returns (None, 0); both leading data of zero are zero by convention.
    """
    if g.is_zero:
        return None, Element.zero(g.n)
    top = max((w.lexp for w in g._terms), key=pdeg_key)
    zero_exp = (0,) * g.n
    coeff = {
        BasisWord(zero_exp, w.rword): c for w, c in g._terms.items() if w.lexp == top
    }
    return top, Element(g.n, coeff, _trusted=True)


def wdeg(g: Element, weights):
    """Maximal weighted degree of the terms of g; NEG_INF for g = 0."""
    weights = tuple(weights)
    if len(weights) != g.n:
        raise DomainError("weight vector length must equal the ambient n")
    if g.is_zero:
        return NEG_INF
    return max(w.wdegree(weights) for w in g._terms)


def homogeneous_components(g: Element, weights) -> dict[int, Element]:
    """Partition of the terms of g by weighted degree; empty for g = 0."""
    weights = tuple(weights)
    if len(weights) != g.n:
        raise DomainError("weight vector length must equal the ambient n")
    buckets: dict[int, dict[BasisWord, Fraction]] = {}
    for w, c in g._terms.items():
        buckets.setdefault(w.wdegree(weights), {})[w] = c
    return {
        d: Element(g.n, t, _trusted=True) for d, t in sorted(buckets.items())
    }


def highest_part(g: Element, weights=None) -> Element:
    """Homogeneous component of maximal weighted degree (zero for g = 0)."""
    if weights is None:
        weights = (1,) * g.n
    parts = homogeneous_components(g, weights)
    if not parts:
        return Element.zero(g.n)
    return parts[max(parts)]


def is_homogeneous(g: Element, weights=None) -> bool:
    if weights is None:
        weights = (1,) * g.n
    return len(homogeneous_components(g, weights)) <= 1


# -- the polynomial subalgebra ------------------------------------------------


def in_L(g: Element) -> bool:
    return all(not w.rword for w in g._terms)


def in_R(g: Element) -> bool:
    return all(not any(w.lexp) for w in g._terms)


def in_I(g: Element) -> bool:
    return all(w.rword for w in g._terms)


class Membership(NamedTuple):
    in_L: bool
    in_R: bool
    in_I: bool


def membership(g: Element) -> Membership:
    return Membership(in_L(g), in_R(g), in_I(g))


def project_to_L(g: Element) -> tuple[Element, Element]:
    """Split g = (part in L_n) + (part in I_n); the splitting is unique."""
    lpart = {w: c for w, c in g._terms.items() if not w.rword}
    ipart = {w: c for w, c in g._terms.items() if w.rword}
    return (
        Element(g.n, lpart, _trusted=True),
        Element(g.n, ipart, _trusted=True),
    )


def pderiv_l(j: int, f: Element) -> Element:
    """Partial derivative of a polynomial f in L_n with respect to l_j."""
    if not 1 <= j <= f.n:
        raise DomainError(f"variable index {j} out of range 1..{f.n}")
    if not in_L(f):
        raise DomainError("partial derivative only defined on L_n")
    out: dict[BasisWord, Fraction] = {}
    for w, c in f._terms.items():
        e = w.lexp[j - 1]
        if e:
            lowered = w.lexp[: j - 1] + (e - 1,) + w.lexp[j:]
            key = BasisWord(lowered, ())
            out[key] = out.get(key, _ZERO) + e * c
    return Element(f.n, out, _trusted=True)


def shift_lr(f: Element) -> Element:
    """f(l_1 - r_1, ..., l_n - r_n) for f in L_n, via the closed formula

        f(l - r) = f(l) - sum_j (df/dl_j) r_j.

    The substituted generators l_i - r_i commute, and the expansion is exact
    at first order, with no higher correction terms.
    """
    if not in_L(f):
        raise DomainError("shift_lr only defined on L_n")
    out = f
    for j in range(1, f.n + 1):
        df = pderiv_l(j, f)
        if not df.is_zero:
            out = out - mul(df, gen_r(f.n, j))
    return out


# -- serialization ------------------------------------------------------------


def element_to_json(g: Element) -> dict:
    """JSON form {n, terms: [{l, r, c}]} with terms in canonical order."""
    return {
        "n": g.n,
        "terms": [
            {"l": list(w.lexp), "r": list(w.rword), "c": str(c)}
            for w, c in g.canonical_terms()
        ],
    }


def element_from_json(data: dict) -> Element:
    n = int(data["n"])
    terms = [
        (BasisWord(tuple(t["l"]), tuple(t["r"])), Fraction(t["c"]))
        for t in data["terms"]
    ]
    return Element(n, terms)
