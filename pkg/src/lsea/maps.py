"""Derivations and endomorphisms of U_n as first-class data.

A derivation or endomorphism is stored by its images on the 2n generators.
Such data only extends consistently to all of U_n when it annihilates (for
derivations) or preserves (for endomorphisms) the two defining relation
families; `check_derivation` / `check_endomorphism` test exactly that and set
the `verified` flag.  Applying an unverified map is an error rather than a
silent best effort, because the Leibniz/substitution extension is ill-defined
off the relation variety.

Also here: inner derivations ad_a, the Lie bracket on derivations, leading
data of derivations with respect to the L-monomial ladder, graded pieces,
bounded nilpotency probes, the lift of polynomial endomorphisms of L_n to
U_n, and constructors for elementary / affine / triangular polynomial
automorphisms with closed-form inverses.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from . import linalg
from .algebra import (
    AmbientMismatch,
    BasisWord,
    DomainError,
    Element,
    commutator,
    gen_l,
    gen_r,
    homogeneous_components,
    in_L,
    in_R,
    mul,
    pdeg_key,
    pderiv_l,
)


class UnverifiedMapError(RuntimeError):
    """A map was applied before its defining relations were checked."""


def _as_images(n: int, images) -> tuple[Element, ...]:
    images = tuple(images)
    if len(images) != n:
        raise DomainError(f"expected {n} generator images, got {len(images)}")
    for g in images:
        if g.n != n:
            raise AmbientMismatch("image ambient differs from map ambient")
    return images


@dataclass(frozen=True)
class Derivation:
    """Images D(l_i), D(r_i); `verified` means the relation checks vanish."""

    n: int
    l_images: tuple[Element, ...]
    r_images: tuple[Element, ...]
    verified: bool = False

    def __call__(self, g: Element) -> Element:
        return apply_derivation(self, g)

    def is_zero(self) -> bool:
        return all(h.is_zero for h in self.l_images + self.r_images)


@dataclass(frozen=True)
class PureFormalExpression:
    """Generator-image data with every image inside R_n.

    Need not be a derivation; these are the coefficients of the L-monomial
    decomposition of a derivation.
    """

    n: int
    l_images: tuple[Element, ...]
    r_images: tuple[Element, ...]

    def __post_init__(self):
        for g in self.l_images + self.r_images:
            if not in_R(g):
                raise DomainError("purely associative data requires images in R_n")

    def is_zero(self) -> bool:
        return all(h.is_zero for h in self.l_images + self.r_images)


@dataclass(frozen=True)
class Endomorphism:
    """Images phi(l_i), phi(r_i); `verified` means the relations are preserved."""

    n: int
    l_images: tuple[Element, ...]
    r_images: tuple[Element, ...]
    verified: bool = False

    def __call__(self, g: Element) -> Element:
        return apply_endo(self, g)


def derivation(n: int, l_images, r_images) -> Derivation:
    return Derivation(n, _as_images(n, l_images), _as_images(n, r_images))


def endomorphism(n: int, l_images, r_images) -> Endomorphism:
    return Endomorphism(n, _as_images(n, l_images), _as_images(n, r_images))


def zero_derivation(n: int) -> Derivation:
    z = tuple(Element.zero(n) for _ in range(n))
    return Derivation(n, z, z, verified=True)


def identity_endo(n: int) -> Endomorphism:
    return Endomorphism(
        n,
        tuple(gen_l(n, i) for i in range(1, n + 1)),
        tuple(gen_r(n, i) for i in range(1, n + 1)),
        verified=True,
    )


# -- relation residuals -------------------------------------------------------
#
# The same residual formulas serve three purposes: checking a candidate
# derivation, checking a candidate endomorphism, and (being linear in the
# images) assembling the constraint matrices of homogeneous derivation
# spaces in the solver.


def derivation_residual_commute(data, i: int, j: int) -> Element:
    """D applied to l_i l_j - l_j l_i, for i < j."""
    li, lj = gen_l(data.n, i), gen_l(data.n, j)
    di, dj = data.l_images[i - 1], data.l_images[j - 1]
    return mul(di, lj) + mul(li, dj) - mul(dj, li) - mul(lj, di)


def derivation_residual_straighten(data, i: int, j: int) -> Element:
    """D applied to r_i l_j - l_j r_i - r_i r_j."""
    li, ri = gen_l(data.n, j), gen_r(data.n, i)
    rj = gen_r(data.n, j)
    dli = data.l_images[j - 1]
    dri, drj = data.r_images[i - 1], data.r_images[j - 1]
    return (
        mul(dri, li)
        + mul(ri, dli)
        - mul(dli, ri)
        - mul(li, dri)
        - mul(dri, rj)
        - mul(ri, drj)
    )


def check_derivation(d: Derivation) -> tuple[Derivation, list]:
    """Re-check the relation families; returns (flagged copy, violations).

    A violation is ("s1"| "s2", i, j, residual) with a nonzero residual.
    """
    violations = []
    for i in range(1, d.n + 1):
        for j in range(i + 1, d.n + 1):
            res = derivation_residual_commute(d, i, j)
            if not res.is_zero:
                violations.append(("s1", i, j, res))
    for i in range(1, d.n + 1):
        for j in range(1, d.n + 1):
            res = derivation_residual_straighten(d, i, j)
            if not res.is_zero:
                violations.append(("s2", i, j, res))
    return replace(d, verified=not violations), violations


def endo_residual_commute(e, i: int, j: int) -> Element:
    gi, gj = e.l_images[i - 1], e.l_images[j - 1]
    return mul(gi, gj) - mul(gj, gi)


def endo_residual_straighten(e, i: int, j: int) -> Element:
    hi = e.r_images[i - 1]
    gj = e.l_images[j - 1]
    hj = e.r_images[j - 1]
    return mul(hi, gj) - mul(gj, hi) - mul(hi, hj)


def check_endomorphism(e: Endomorphism) -> tuple[Endomorphism, list]:
    violations = []
    for i in range(1, e.n + 1):
        for j in range(i + 1, e.n + 1):
            res = endo_residual_commute(e, i, j)
            if not res.is_zero:
                violations.append(("s1", i, j, res))
    for i in range(1, e.n + 1):
        for j in range(1, e.n + 1):
            res = endo_residual_straighten(e, i, j)
            if not res.is_zero:
                violations.append(("s2", i, j, res))
    return replace(e, verified=not violations), violations


# -- applying maps --------------------------------------------------------------


def _word_factor_splits(word: BasisWord, n: int):
    """Leibniz splits (prefix word, generator slot, suffix word) of a basis word.

    The factorization runs through the l-letters in nondecreasing index order
    and then the r-letters, so every prefix and suffix is itself a basis word.
    """
    lexp, rword = word
    for i in range(n):
        if not lexp[i]:
            continue
        before = lexp[:i]
        after = lexp[i + 1 :]
        for a in range(lexp[i]):
            prefix = BasisWord(before + (a,) + (0,) * (n - i - 1), ())
            suffix = BasisWord((0,) * i + (lexp[i] - 1 - a,) + after, rword)
            yield prefix, ("l", i + 1), suffix
    zero = (0,) * n
    for k, j in enumerate(rword):
        yield BasisWord(lexp, rword[:k]), ("r", j), BasisWord(zero, rword[k + 1 :])


def apply_derivation(d: Derivation, g: Element) -> Element:
    """Extend D linearly and by the Leibniz law to all of U_n."""
    if not d.verified:
        raise UnverifiedMapError("refusing to apply an unverified derivation")
    if d.n != g.n:
        raise AmbientMismatch("derivation and element ambients differ")
    out = Element.zero(g.n)
    for word, c in g.terms():
        acc = Element.zero(g.n)
        for prefix, (kind, idx), suffix in _word_factor_splits(word, g.n):
            img = d.l_images[idx - 1] if kind == "l" else d.r_images[idx - 1]
            if img.is_zero:
                continue
            piece = mul(Element(g.n, {prefix: Fraction(1)}, _trusted=True), img)
            acc = acc + mul(piece, Element(g.n, {suffix: Fraction(1)}, _trusted=True))
        out = out + c * acc
    return out


def apply_endo(e: Endomorphism, g: Element) -> Element:
    """Substitute generator images along each basis word, multiplying in U_n."""
    if not e.verified:
        raise UnverifiedMapError("refusing to apply an unverified endomorphism")
    if e.n != g.n:
        raise AmbientMismatch("endomorphism and element ambients differ")
    out = Element.zero(g.n)
    for word, c in g.terms():
        acc = Element.one(g.n)
        for i, s in enumerate(word.lexp):
            if s:
                acc = mul(acc, e.l_images[i] ** s)
        for j in word.rword:
            acc = mul(acc, e.r_images[j - 1])
        out = out + c * acc
    return out


# -- inner derivations and the Lie structure -----------------------------------


def ad(a: Element) -> Derivation:
    """Inner derivation x -> a*x - x*a; always satisfies the relations."""
    n = a.n
    return Derivation(
        n,
        tuple(commutator(a, gen_l(n, i)) for i in range(1, n + 1)),
        tuple(commutator(a, gen_r(n, i)) for i in range(1, n + 1)),
        verified=True,
    )


def der_bracket(d: Derivation, e: Derivation) -> Derivation:
    """The commutator D∘E - E∘D, itself a derivation."""
    if not (d.verified and e.verified):
        raise UnverifiedMapError("bracket requires verified derivations")
    if d.n != e.n:
        raise AmbientMismatch("derivation ambients differ")
    n = d.n
    return Derivation(
        n,
        tuple(d(e.l_images[i]) - e(d.l_images[i]) for i in range(n)),
        tuple(d(e.r_images[i]) - e(d.r_images[i]) for i in range(n)),
        verified=True,
    )


# -- leading data of derivations -------------------------------------------------


def der_lm_lc(d) -> tuple[tuple[int, ...] | None, PureFormalExpression]:
    """Leading monomial and coefficient of a derivation.

    Writes every image as a sum of L-monomials with R_n coefficients; the
    ladder of monomials is shared across all 2n slots, and the leading
    coefficient collects each slot's R_n coefficient at the greatest monomial.
    """
    n = d.n
    ladders = []
    tops = []
    for img in d.l_images + d.r_images:
        slot: dict[tuple[int, ...], dict] = {}
        for w, c in img.terms():
            slot.setdefault(w.lexp, {})[BasisWord((0,) * n, w.rword)] = c
        ladders.append(slot)
        tops.extend(slot.keys())
    if not tops:
        z = tuple(Element.zero(n) for _ in range(n))
        return None, PureFormalExpression(n, z, z)
    gmax = max(tops, key=pdeg_key)
    coeffs = [
        Element(n, slot.get(gmax, {}), _trusted=True) for slot in ladders
    ]
    return gmax, PureFormalExpression(n, tuple(coeffs[:n]), tuple(coeffs[n:]))


@dataclass(frozen=True)
class RDerivation:
    """A derivation of the free algebra R_n given by images of the r_i.

    Always well defined (R_n is free), so no verified flag.
    """

    n: int
    images: tuple[Element, ...]

    def __call__(self, g: Element) -> Element:
        if g.n != self.n:
            raise AmbientMismatch("ambient mismatch")
        if not in_R(g):
            raise DomainError("R_n derivation applied outside R_n")
        zero = (0,) * self.n
        out = Element.zero(self.n)
        for word, c in g.terms():
            acc = Element.zero(self.n)
            for k, j in enumerate(word.rword):
                img = self.images[j - 1]
                if img.is_zero:
                    continue
                piece = mul(
                    Element.from_word(self.n, zero, word.rword[:k]), img
                )
                acc = acc + mul(piece, Element.from_word(self.n, zero, word.rword[k + 1 :]))
            out = out + c * acc
        return out


def restrict_r(p: PureFormalExpression) -> RDerivation:
    """Forget the l-slots; the r-slots define a derivation of R_n."""
    return RDerivation(p.n, p.r_images)


# -- grading ----------------------------------------------------------------------


def graded_parts(d: Derivation, weights) -> dict[int, Derivation]:
    """Split a verified derivation into its weighted-homogeneous pieces.

    A piece of degree m sends each weight-w_i generator into degree m + w_i;
    since the defining relations are weight-homogeneous each piece is again a
    derivation, which is re-checked here.
    """
    if not d.verified:
        raise UnverifiedMapError("graded_parts requires a verified derivation")
    weights = tuple(weights)
    if len(weights) != d.n:
        raise DomainError("weight vector length must equal the ambient n")
    degrees: set[int] = set()
    split_l = []
    split_r = []
    for i in range(d.n):
        parts = homogeneous_components(d.l_images[i], weights)
        split_l.append({deg - weights[i]: g for deg, g in parts.items()})
        degrees.update(split_l[-1])
        parts = homogeneous_components(d.r_images[i], weights)
        split_r.append({deg - weights[i]: g for deg, g in parts.items()})
        degrees.update(split_r[-1])
    out: dict[int, Derivation] = {}
    for m in sorted(degrees):
        part = Derivation(
            d.n,
            tuple(split_l[i].get(m, Element.zero(d.n)) for i in range(d.n)),
            tuple(split_r[i].get(m, Element.zero(d.n)) for i in range(d.n)),
        )
        part, violations = check_derivation(part)
        assert not violations, "homogeneous piece of a derivation must be one"
        out[m] = part
    return out


# -- nilpotency probes -------------------------------------------------------------


@dataclass(frozen=True)
class ZeroAt:
    """D^k(x) = 0 with k minimal."""

    k: int


@dataclass(frozen=True)
class NonzeroThrough:
    """All iterates D(x), ..., D^bound(x) nonzero; their total degrees.

    Evidence only: monotone degree growth suggests, but never proves, that D
    is not locally nilpotent at x.
    """

    bound: int
    degrees: tuple[int, ...]


def probe_nilpotent(d: Derivation, x: Element, bound: int):
    """Iterate D on x up to `bound` times, reporting the first zero if any."""
    if not d.verified:
        raise UnverifiedMapError("probe requires a verified derivation")
    if bound < 1:
        raise DomainError("bound must be >= 1")
    if x.is_zero:
        return ZeroAt(0)
    cur = x
    degrees = []
    for k in range(1, bound + 1):
        cur = d(cur)
        if cur.is_zero:
            return ZeroAt(k)
        degrees.append(cur.degree())
    return NonzeroThrough(bound, tuple(degrees))


# -- the univariate-coefficient locally nilpotent extension -------------------------


def extend_lnd_prop55(n: int, g: Element) -> Derivation:
    """The derivation l_1 -> g(l_n), r_1 -> g'(l_n) r_n, all else -> 0.

    Extends the L_n derivation g(l_n) d/dl_1 to U_n; it kills l_1 and r_1 in
    two steps, hence is locally nilpotent.
    """
    if n < 2:
        raise DomainError("requires ambient n >= 2")
    if g.n != n:
        raise AmbientMismatch("ambient mismatch")
    if not in_L(g):
        raise DomainError("coefficient must be a polynomial")
    if any(any(w.lexp[: n - 1]) for w, _ in g.terms()):
        raise DomainError("coefficient must be univariate in the last variable")
    zero = Element.zero(n)
    l_images = [zero] * n
    r_images = [zero] * n
    l_images[0] = g
    r_images[0] = mul(pderiv_l(n, g), gen_r(n, n))
    d, violations = check_derivation(Derivation(n, tuple(l_images), tuple(r_images)))
    assert not violations, "the univariate extension always satisfies the relations"
    return d


# -- lifting polynomial endomorphisms of L_n -----------------------------------------


def lift_phi(n: int, fs: Sequence[Element]) -> Endomorphism:
    """Lift a polynomial tuple (f_1..f_n) of L_n to an endomorphism of U_n.

    l_i goes to f_i and r_i to sum_s (df_i/dl_s) r_s.  Preserving the
    straightening relation reduces to the substitution rule for moving an r
    past a polynomial, so the lift of any polynomial tuple is an
    endomorphism; it is marked verified on construction and the suite
    re-checks it.
    """
    fs = _as_images(n, fs)
    for f in fs:
        if not in_L(f):
            raise DomainError("lift requires polynomial images")
    r_images = []
    for f in fs:
        img = Element.zero(n)
        for s in range(1, n + 1):
            df = pderiv_l(s, f)
            if not df.is_zero:
                img = img + mul(df, gen_r(n, s))
        r_images.append(img)
    return Endomorphism(n, fs, tuple(r_images), verified=True)


def compose(phi: Endomorphism, psi: Endomorphism) -> Endomorphism:
    """(phi ∘ psi)(x) = phi(psi(x)); composition of verified maps is verified."""
    if not (phi.verified and psi.verified):
        raise UnverifiedMapError("compose requires verified endomorphisms")
    if phi.n != psi.n:
        raise AmbientMismatch("ambient mismatch")
    return Endomorphism(
        phi.n,
        tuple(apply_endo(phi, g) for g in psi.l_images),
        tuple(apply_endo(phi, g) for g in psi.r_images),
        verified=True,
    )


def is_identity(e: Endomorphism) -> bool:
    return all(
        e.l_images[i - 1] == gen_l(e.n, i) and e.r_images[i - 1] == gen_r(e.n, i)
        for i in range(1, e.n + 1)
    )


def check_inverse_pair(phi: Endomorphism, psi: Endomorphism) -> bool:
    """True iff the two maps compose to the identity both ways."""
    return is_identity(compose(phi, psi)) and is_identity(compose(psi, phi))


def is_affine_U(e: Endomorphism) -> bool:
    """True iff every generator image has total degree exactly 1."""
    if not e.verified:
        raise UnverifiedMapError("affinity test requires a verified endomorphism")
    return all(g.degree() == 1 for g in e.l_images + e.r_images)


# -- the rank-one case ------------------------------------------------------------


def _subst_r1(h: Element, factor: Fraction) -> Element:
    """h(factor * r_1) for h a polynomial in r_1 (ambient n = 1)."""
    out = {}
    for w, c in h.terms():
        out[w] = c * factor ** len(w.rword)
    return Element(h.n, out)


def u1_closed_form(alpha, h: Element) -> tuple[Endomorphism, Endomorphism]:
    """The U_1 automorphism l1 -> a*l1 + h(r1), r1 -> a*r1, and its inverse.

    The inverse sends l1 to a^{-1} l1 - a^{-1} h(a^{-1} r1) and r1 to
    a^{-1} r1; both directions are checked and composed to the identity.
    """
    alpha = Fraction(alpha)
    if not alpha:
        raise DomainError("scale factor must be nonzero")
    if h.n != 1:
        raise AmbientMismatch("closed form lives in U_1")
    if not in_R(h):
        raise DomainError("shift term must be a polynomial in r_1")
    inv = Fraction(1) / alpha
    phi = Endomorphism(
        1,
        (alpha * gen_l(1, 1) + h,),
        (alpha * gen_r(1, 1),),
    )
    psi = Endomorphism(
        1,
        (inv * gen_l(1, 1) - inv * _subst_r1(h, inv),),
        (inv * gen_r(1, 1),),
    )
    phi, bad_phi = check_endomorphism(phi)
    psi, bad_psi = check_endomorphism(psi)
    assert not bad_phi and not bad_psi
    assert check_inverse_pair(phi, psi)
    return phi, psi


# -- polynomial tuples on the L_n side -----------------------------------------------
#
# Aut(L_n) elements are handled as plain n-tuples of polynomials.  Inverses
# of general polynomial automorphisms are deliberately not computed; instead
# the elementary / affine / triangular constructors below return closed-form
# inverse tuples.


def poly_subst(f: Element, images: Sequence[Element]) -> Element:
    """Substitute images[i-1] for l_i in a polynomial f."""
    if not in_L(f):
        raise DomainError("substitution source must be a polynomial")
    images = _as_images(f.n, images)
    out = Element.zero(f.n)
    for w, c in f.terms():
        acc = Element.one(f.n)
        for i, e in enumerate(w.lexp):
            if e:
                acc = mul(acc, images[i] ** e)
        out = out + c * acc
    return out


def compose_tuples(
    outer: Sequence[Element], inner: Sequence[Element]
) -> tuple[Element, ...]:
    """Tuple of the composition x -> outer(inner(x)) on generators.

    With outer the tuple of phi and inner the tuple of psi this is the tuple
    of phi ∘ psi, i.e. each inner polynomial evaluated on the outer images.
    """
    return tuple(poly_subst(g, outer) for g in inner)


def identity_tuple(n: int) -> tuple[Element, ...]:
    return tuple(gen_l(n, i) for i in range(1, n + 1))


def elementary_tuple(n: int, i: int, alpha, f: Element):
    """l_i -> alpha*l_i + f with f free of l_i; returns (tuple, inverse tuple)."""
    alpha = Fraction(alpha)
    if not alpha:
        raise DomainError("elementary scale must be nonzero")
    if not 1 <= i <= n:
        raise DomainError("variable index out of range")
    if not in_L(f) or f.n != n:
        raise DomainError("added term must be a polynomial of the same ambient")
    if any(w.lexp[i - 1] for w, _ in f.terms()):
        raise DomainError("added term must not involve the moved variable")
    fwd = list(identity_tuple(n))
    inv = list(identity_tuple(n))
    fwd[i - 1] = alpha * gen_l(n, i) + f
    inv[i - 1] = (gen_l(n, i) - f) / alpha
    return tuple(fwd), tuple(inv)


def affine_tuple(n: int, matrix, shift=None):
    """l_i -> sum_j A[i][j] l_j + c_i for invertible A; returns both tuples."""
    a = [[Fraction(x) for x in row] for row in matrix]
    c = [Fraction(x) for x in (shift or [0] * n)]
    if len(a) != n or any(len(row) != n for row in a) or len(c) != n:
        raise DomainError("affine data has wrong shape")
    a_inv = linalg.invert_dense(a)  # raises ValueError when singular
    fwd = []
    inv = []
    for i in range(n):
        img = Element.from_word(n, (0,) * n, (), c[i])
        for j in range(n):
            if a[i][j]:
                img = img + a[i][j] * gen_l(n, j + 1)
        fwd.append(img)
        img = Element.zero(n)
        for j in range(n):
            if a_inv[i][j]:
                img = img + a_inv[i][j] * (gen_l(n, j + 1) - Element.from_word(n, (0,) * n, (), c[j]))
        inv.append(img)
    return tuple(fwd), tuple(inv)


def triangular_tuple(n: int, alphas, fs: Sequence[Element]):
    """l_i -> alpha_i l_i + f_i(l_{i+1}..l_n); returns (tuple, inverse tuple)."""
    alphas = [Fraction(x) for x in alphas]
    fs = list(fs)
    if len(alphas) != n or len(fs) != n or any(not a for a in alphas):
        raise DomainError("triangular data has wrong shape")
    for i, f in enumerate(fs):
        if not in_L(f) or f.n != n:
            raise DomainError("triangular terms must be polynomials")
        if any(any(w.lexp[: i + 1]) for w, _ in f.terms()):
            raise DomainError("triangular term depends on a non-later variable")
    fwd = tuple(alphas[i] * gen_l(n, i + 1) + fs[i] for i in range(n))
    inv = list(identity_tuple(n))
    for i in range(n - 1, -1, -1):
        inv[i] = (gen_l(n, i + 1) - poly_subst(fs[i], inv)) / alphas[i]
    return fwd, tuple(inv)


# -- serialization ---------------------------------------------------------------


def map_to_json(m) -> dict:
    from .algebra import element_to_json

    kind = "derivation" if isinstance(m, Derivation) else "endomorphism"
    return {
        "n": m.n,
        "kind": kind,
        "l_images": [element_to_json(g) for g in m.l_images],
        "r_images": [element_to_json(g) for g in m.r_images],
        "verified": m.verified,
    }


def map_from_json(data: dict):
    from .algebra import element_from_json

    n = int(data["n"])
    l_images = tuple(element_from_json(d) for d in data["l_images"])
    r_images = tuple(element_from_json(d) for d in data["r_images"])
    cls = {"derivation": Derivation, "endomorphism": Endomorphism}[data["kind"]]
    return cls(n, _as_images(n, l_images), _as_images(n, r_images), bool(data["verified"]))
