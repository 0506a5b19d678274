"""Seeded randomized verification suites.

Each suite replays one of the proved identities of U_n on randomly sampled
inputs and reports exact pass/fail counts.  Reports are deterministic
functions of (suite, seed, parameters); counterexamples are serialized JSON
fragments.  The suites ship with the CLI (`lsea verify <suite>`) so the
identities can be re-run by end users with one command.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    Element,
    element_to_json,
    gen_l,
    gen_r,
    homogeneous_components,
    in_I,
    lm_lc,
    mul,
    pderiv_l,
    shift_lr,
    wdeg,
)
from .maps import (
    Derivation,
    NonzeroThrough,
    ZeroAt,
    ad,
    affine_tuple,
    apply_derivation,
    apply_endo,
    check_derivation,
    check_endomorphism,
    check_inverse_pair,
    compose,
    compose_tuples,
    der_bracket,
    elementary_tuple,
    extend_lnd_prop55,
    graded_parts,
    identity_tuple,
    is_affine_U,
    is_identity,
    lift_phi,
    probe_nilpotent,
    u1_closed_form,
)
from .solver import AnomalyError, ad_preimage, lemma27_solutions, rfactor_decompose


@dataclass
class RunReport:
    """Outcome of one suite run; deterministic given (suite, seed, cases)."""

    suite: str
    seed: int
    cases: int
    failures: list[dict] = field(default_factory=list)
    anomalies: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.anomalies

    def line(self) -> str:
        return (
            f"suite {self.suite}: seed={self.seed} cases={self.cases} "
            f"failures={len(self.failures)} anomalies={len(self.anomalies)}"
        )


# -- random sampling helpers ----------------------------------------------------


def rand_coeff(rng: random.Random) -> Fraction:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    den = rng.choice([1, 1, 1, 2, 3])
    return Fraction(num, den)


def rand_word(rng: random.Random, n: int, length: int):
    return [
        (rng.choice("lr"), rng.randint(1, n)) for _ in range(length)
    ]


def rand_element(rng: random.Random, n: int, max_deg: int, terms: int = 4) -> Element:
    out = Element.zero(n)
    for _ in range(terms):
        deg = rng.randint(0, max_deg)
        a = rng.randint(0, deg)
        lexp = [0] * n
        for _ in range(a):
            lexp[rng.randrange(n)] += 1
        rword = tuple(rng.randint(1, n) for _ in range(deg - a))
        out = out + Element.from_word(n, tuple(lexp), rword, rand_coeff(rng))
    return out


def rand_nonzero(rng: random.Random, n: int, max_deg: int, terms: int = 4) -> Element:
    while True:
        g = rand_element(rng, n, max_deg, terms)
        if not g.is_zero:
            return g


def rand_lpoly(rng: random.Random, n: int, max_deg: int, terms: int = 4) -> Element:
    out = Element.zero(n)
    for _ in range(terms):
        deg = rng.randint(0, max_deg)
        lexp = [0] * n
        for _ in range(deg):
            lexp[rng.randrange(n)] += 1
        out = out + Element.from_word(n, tuple(lexp), (), rand_coeff(rng))
    return out


def rand_rpoly(rng: random.Random, n: int, max_deg: int, terms: int = 3) -> Element:
    out = Element.zero(n)
    for _ in range(terms):
        deg = rng.randint(0, max_deg)
        rword = tuple(rng.randint(1, n) for _ in range(deg))
        out = out + Element.from_word(n, (0,) * n, rword, rand_coeff(rng))
    return out


def rand_homogeneous_I(rng: random.Random, n: int, deg: int, terms: int = 3) -> Element:
    """Nonzero homogeneous element of I_n of the exact degree."""
    while True:
        out = Element.zero(n)
        for _ in range(terms):
            b = rng.randint(1, deg)
            a = deg - b
            lexp = [0] * n
            for _ in range(a):
                lexp[rng.randrange(n)] += 1
            rword = tuple(rng.randint(1, n) for _ in range(b))
            out = out + Element.from_word(n, tuple(lexp), rword, rand_coeff(rng))
        if not out.is_zero:
            return out


def rand_homogeneous(rng: random.Random, n: int, deg: int, terms: int = 3) -> Element:
    while True:
        out = Element.zero(n)
        for _ in range(terms):
            a = rng.randint(0, deg)
            lexp = [0] * n
            for _ in range(a):
                lexp[rng.randrange(n)] += 1
            rword = tuple(rng.randint(1, n) for _ in range(deg - a))
            out = out + Element.from_word(n, tuple(lexp), rword, rand_coeff(rng))
        if not out.is_zero:
            return out


def rand_univariate_last(rng: random.Random, n: int, max_deg: int) -> Element:
    """Random nonzero polynomial in the last variable l_n."""
    while True:
        out = Element.zero(n)
        for k in range(max_deg + 1):
            if rng.random() < 0.5:
                lexp = [0] * n
                lexp[n - 1] = k
                out = out + Element.from_word(n, tuple(lexp), (), rand_coeff(rng))
        if not out.is_zero:
            return out


def rand_weights(rng: random.Random, n: int, lo: int = -2, hi: int = 3):
    return tuple(rng.randint(lo, hi) for _ in range(n))


def rand_tame_tuple(rng: random.Random, n: int, factors: int, deg_cap: int):
    """Random tame automorphism tuple of L_n with its closed-form inverse.

    Composes up to `factors` elementary/affine building blocks, resampling
    whenever an intermediate composition exceeds deg_cap so all downstream
    products stay desk-scale.
    """
    fwd = identity_tuple(n)
    inv = identity_tuple(n)
    made = 0
    attempts = 0
    while made < factors and attempts < 60:
        attempts += 1
        if rng.random() < 0.5:
            step_f, step_i = _rand_affine(rng, n)
        else:
            step_f, step_i = _rand_elementary(rng, n)
        cand_f = compose_tuples(fwd, step_f)
        cand_i = compose_tuples(step_i, inv)
        if max(g.degree() for g in cand_f) > deg_cap:
            continue
        fwd, inv = cand_f, cand_i
        made += 1
    return fwd, inv


def _rand_affine(rng: random.Random, n: int):
    while True:
        a = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        c = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
        try:
            return affine_tuple(n, a, c)
        except ValueError:
            continue


def _rand_elementary(rng: random.Random, n: int):
    i = rng.randint(1, n)
    alpha = Fraction(rng.choice([-2, -1, 1, 2]))
    f = Element.zero(n)
    for _ in range(rng.randint(1, 2)):
        deg = rng.randint(0, 2)
        lexp = [0] * n
        for _ in range(deg):
            j = rng.randrange(n)
            while j == i - 1:
                j = rng.randrange(n)
            lexp[j] += 1
        f = f + Element.from_word(n, tuple(lexp), (), rand_coeff(rng))
    if n == 1:
        f = Element.zero(n)
    return elementary_tuple(n, i, alpha, f)


def rand_verified_derivation(rng: random.Random, n: int) -> Derivation:
    """Random verified derivation: a bracket/sum mix of inner and univariate ones."""
    d = ad(rand_element(rng, n, 2, terms=3))
    if n >= 2 and rng.random() < 0.6:
        e = extend_lnd_prop55(n, rand_univariate_last(rng, n, 2))
        d = Derivation(
            n,
            tuple(a + b for a, b in zip(d.l_images, e.l_images)),
            tuple(a + b for a, b in zip(d.r_images, e.r_images)),
            verified=True,
        )
    if rng.random() < 0.3:
        d = der_bracket(d, ad(rand_element(rng, n, 1, terms=2)))
    return d


def _example41() -> Derivation:
    r1r1 = Element.from_word(2, (0, 0), (1, 1))
    r1r2 = Element.from_word(2, (0, 0), (1, 2))
    r2r1 = Element.from_word(2, (0, 0), (2, 1))
    zero = Element.zero(2)
    return Derivation(2, (r1r1, r1r2), (zero, r1r2 - r2r1))


def example41_derivation() -> Derivation:
    """The standard nonzero derivation of U_2 that kills both l-projections."""
    d, violations = check_derivation(_example41())
    assert not violations
    return d


# -- suite implementations --------------------------------------------------------


def _counterexample(**kv) -> dict:
    out = {}
    for k, v in kv.items():
        if isinstance(v, Element):
            out[k] = element_to_json(v)
        else:
            out[k] = v
    return out


def _suite_lemma22(seed: int, cases: int) -> RunReport:
    """f(l)r_i = r_i f(l-r); the closed shift formula; shifted generators commute."""
    rng = random.Random(seed)
    rep = RunReport("lemma22", seed, cases)
    for _ in range(cases):
        n = rng.randint(1, 3)
        f = rand_lpoly(rng, n, 5)
        i = rng.randint(1, n)
        shifted = shift_lr(f)
        # direct substitution of l_k - r_k, multiplied out
        direct = Element.zero(n)
        for w, c in f.terms():
            acc = Element.one(n)
            for k, e in enumerate(w.lexp):
                if e:
                    acc = mul(acc, (gen_l(n, k + 1) - gen_r(n, k + 1)) ** e)
            direct = direct + c * acc
        a, b = gen_l(n, 1) - gen_r(n, 1), gen_l(n, n) - gen_r(n, n)
        ok = (
            mul(f, gen_r(n, i)) == mul(gen_r(n, i), shifted)
            and shifted == direct
            and mul(a, b) == mul(b, a)
        )
        if not ok:
            rep.failures.append(_counterexample(n=n, f=f, i=i))
    return rep


def _suite_cor23(seed: int, cases: int) -> RunReport:
    """r_i f = f r_i + r_i sum_j (df/dl_j) r_j."""
    rng = random.Random(seed)
    rep = RunReport("cor23", seed, cases)
    for _ in range(cases):
        n = rng.randint(1, 3)
        f = rand_lpoly(rng, n, 5)
        i = rng.randint(1, n)
        ri = gen_r(n, i)
        tail = Element.zero(n)
        for j in range(1, n + 1):
            tail = tail + mul(pderiv_l(j, f), gen_r(n, j))
        if mul(ri, f) != mul(f, ri) + mul(ri, tail):
            rep.failures.append(_counterexample(n=n, f=f, i=i))
    return rep


def _suite_cor25(seed: int, cases: int) -> RunReport:
    """Leading-monomial multiplicativity, degree additivity, no zero divisors."""
    rng = random.Random(seed)
    rep = RunReport("cor25", seed, cases)
    for _ in range(cases):
        n = rng.randint(1, 3)
        g = rand_nonzero(rng, n, 3)
        h = rand_nonzero(rng, n, 3)
        p = mul(g, h)
        lm_g, lm_h, lm_p = lm_lc(g)[0], lm_lc(h)[0], lm_lc(p)[0]
        ok = not p.is_zero and lm_p == tuple(
            x + y for x, y in zip(lm_g, lm_h)
        )
        dg = rng.randint(0, 3)
        dh = rng.randint(0, 3)
        hg = rand_homogeneous(rng, n, dg)
        hh = rand_homogeneous(rng, n, dh)
        w = (1,) * n
        ok = ok and wdeg(mul(hg, hh), w) == wdeg(hg, w) + wdeg(hh, w)
        if not ok:
            rep.failures.append(_counterexample(n=n, g=g, h=h))
    return rep


def _suite_lemma26(seed: int, cases: int) -> RunReport:
    """Forward-apply the stacked inner derivations, then recover a preimage."""
    rng = random.Random(seed)
    rep = RunReport("lemma26", seed, cases)
    for _ in range(cases):
        n = rng.choice([2, 2, 3])
        deg = rng.randint(1, 4)
        g = rand_homogeneous_I(rng, n, deg)
        us = [apply_derivation(ad(gen_l(n, i)), g) for i in range(1, n + 1)]
        try:
            g2, _kdim = ad_preimage(us)
        except AnomalyError as exc:
            rep.anomalies.append({"input": element_to_json(g), "payload": exc.payload})
            continue
        ok = all(
            apply_derivation(ad(gen_l(n, i)), g2) == us[i - 1] for i in range(1, n + 1)
        )
        if not ok:
            rep.failures.append(_counterexample(n=n, g=g, recovered=g2))
    return rep


def _suite_lemma27(seed: int, cases: int) -> RunReport:
    """Solutions of -ad_{l_i}(g) = r_i g + g r_i have the predicted leading span."""
    rep = RunReport("lemma27", seed, 0)
    for i in (1, 2):
        for d in (2, 3):
            try:
                sols = lemma27_solutions(2, i, d)
            except AnomalyError as exc:
                rep.anomalies.append({"i": i, "degree": d, "payload": exc.payload})
                continue
            for g in sols:
                rep.cases += 1
                di = ad(gen_l(2, i))
                ri = gen_r(2, i)
                if -apply_derivation(di, g) != mul(ri, g) + mul(g, ri):
                    rep.failures.append(_counterexample(i=i, degree=d, g=g))
    return rep


def _suite_lemma28(seed: int, cases: int) -> RunReport:
    """r_i^k r_j h = ad_{l_i}(r_i u) + r_i r_j v, recursion output re-multiplied."""
    rng = random.Random(seed)
    rep = RunReport("lemma28", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        i = rng.randint(1, n)
        j = rng.randint(1, n)
        while j == i:
            j = rng.randint(1, n)
        k = rng.randint(1, 4)
        h = rand_rpoly(rng, n, 3)
        try:
            u, v = rfactor_decompose(k, i, j, h)
        except AnomalyError as exc:
            rep.anomalies.append({"k": k, "i": i, "j": j, "payload": exc.payload})
            continue
        lhs = mul(mul(gen_r(n, i) ** k, gen_r(n, j)), h)
        rhs = apply_derivation(ad(gen_l(n, i)), mul(gen_r(n, i), u)) + mul(
            mul(gen_r(n, i), gen_r(n, j)), v
        )
        if lhs != rhs:
            rep.failures.append(_counterexample(n=n, k=k, i=i, j=j, h=h))
    return rep


def _suite_lemma31(seed: int, cases: int) -> RunReport:
    """Endomorphisms keep the ideal generated by the r's inside itself."""
    rng = random.Random(seed)
    rep = RunReport("lemma31", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        fwd, _ = rand_tame_tuple(rng, n, rng.randint(1, 3), 4 if n == 2 else 3)
        phi = lift_phi(n, fwd)
        g = rand_homogeneous_I(rng, n, rng.randint(1, 3))
        if not in_I(apply_endo(phi, g)):
            rep.failures.append(_counterexample(n=n, g=g))
    return rep


def _suite_prop32(seed: int, cases: int) -> RunReport:
    """Lifting is a group embedding: lifts verify, compose, and separate points."""
    rng = random.Random(seed)
    rep = RunReport("prop32", seed, cases)
    if not is_identity(lift_phi(2, identity_tuple(2))):
        rep.failures.append({"case": "identity lift"})
    for _ in range(cases):
        n = rng.randint(2, 3)
        cap = 5 if n == 2 else 3
        f_fwd, _ = rand_tame_tuple(rng, n, 2, cap)
        g_fwd, _ = rand_tame_tuple(rng, n, 2, cap)
        while max(h.degree() for h in compose_tuples(f_fwd, g_fwd)) > cap:
            g_fwd, _ = rand_tame_tuple(rng, n, 2, cap)
        phi = lift_phi(n, f_fwd)
        psi = lift_phi(n, g_fwd)
        _, bad = check_endomorphism(phi)
        ok = not bad
        lifted = lift_phi(n, compose_tuples(f_fwd, g_fwd))
        composed = compose(phi, psi)
        ok = ok and lifted.l_images == composed.l_images
        ok = ok and lifted.r_images == composed.r_images
        # injectivity on this sample: equal lifts force equal tuples
        if phi.l_images == psi.l_images and f_fwd != g_fwd:
            ok = False
        if not ok:
            rep.failures.append({"n": n, "f": [element_to_json(x) for x in f_fwd]})
    return rep


def _suite_lemma33(seed: int, cases: int) -> RunReport:
    """Affine tuples lift to degree-one automorphisms of U_n."""
    rng = random.Random(seed)
    rep = RunReport("lemma33", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        fwd, inv = _rand_affine(rng, n)
        phi = lift_phi(n, fwd)
        psi = lift_phi(n, inv)
        ok = is_affine_U(phi) and check_inverse_pair(phi, psi)
        if not ok:
            rep.failures.append({"n": n, "f": [element_to_json(x) for x in fwd]})
    return rep


def _suite_lemma41(seed: int, cases: int) -> RunReport:
    """Verified derivations keep the ideal generated by the r's inside itself."""
    rng = random.Random(seed)
    rep = RunReport("lemma41", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        d = rand_verified_derivation(rng, n)
        g = rand_homogeneous_I(rng, n, rng.randint(1, 3))
        if not in_I(apply_derivation(d, g)):
            rep.failures.append(_counterexample(n=n, g=g))
    return rep


def _suite_example41(seed: int, cases: int) -> RunReport:
    """The five relation instances of the standard U_2 example all vanish."""
    rep = RunReport("example41", seed, 5)
    _, violations = check_derivation(_example41())
    for v in violations:
        rep.failures.append({"relation": v[0], "i": v[1], "j": v[2]})
    d = example41_derivation()
    probe = probe_nilpotent(d, gen_r(2, 2), 5)
    if not isinstance(probe, NonzeroThrough):
        rep.failures.append({"case": "iterates vanished unexpectedly"})
    return rep


def _suite_lemma44(seed: int, cases: int) -> RunReport:
    """Graded pieces of degree m send degree-k elements into degree m+k."""
    rng = random.Random(seed)
    rep = RunReport("lemma44", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        d = rand_verified_derivation(rng, n)
        w = rand_weights(rng, n)
        parts = graded_parts(d, w)
        pool = homogeneous_components(rand_nonzero(rng, n, 3), w)
        k, g = rng.choice(sorted(pool.items()))
        ok = True
        for m, dm in parts.items():
            img = apply_derivation(dm, g)
            if img.is_zero:
                continue
            comps = homogeneous_components(img, w)
            if list(comps) != [m + k]:
                ok = False
        if not ok:
            rep.failures.append(_counterexample(n=n, g=g, w=list(w)))
    return rep


def _suite_prop55(seed: int, cases: int) -> RunReport:
    """The univariate extension verifies and kills l_1, r_1 in two steps."""
    rng = random.Random(seed)
    rep = RunReport("prop55", seed, cases)
    for _ in range(cases):
        n = rng.randint(2, 3)
        g = rand_univariate_last(rng, n, 5)
        d = extend_lnd_prop55(n, g)
        ok = d.verified
        for x in (gen_l(n, 1), gen_r(n, 1)):
            probe = probe_nilpotent(d, x, 3)
            ok = ok and isinstance(probe, ZeroAt) and probe.k <= 2
        if not ok:
            rep.failures.append(_counterexample(n=n, g=g))
    return rep


def _suite_equ5(seed: int, cases: int) -> RunReport:
    """r_1 w = w r_1 + r_1 d(w)/dl_1 r_1 in U_1."""
    rng = random.Random(seed)
    rep = RunReport("equ5", seed, cases)
    zero = Element.zero(1)
    d1, violations = check_derivation(
        Derivation(1, (Element.one(1),), (zero,))
    )
    assert not violations
    r1 = gen_r(1, 1)
    for _ in range(cases):
        w = rand_element(rng, 1, 5)
        lhs = mul(r1, w)
        rhs = mul(w, r1) + mul(mul(r1, apply_derivation(d1, w)), r1)
        if lhs != rhs:
            rep.failures.append(_counterexample(w=w))
    return rep


def _suite_thm72pair(seed: int, cases: int) -> RunReport:
    """Closed-form U_1 automorphism pairs verify and invert exactly."""
    rng = random.Random(seed)
    rep = RunReport("thm72pair", seed, cases)
    for _ in range(cases):
        alpha = rand_coeff(rng)
        h = rand_rpoly(rng, 1, 5)
        phi, psi = u1_closed_form(alpha, h)
        ok = phi.verified and psi.verified and check_inverse_pair(phi, psi)
        if not ok:
            rep.failures.append(_counterexample(alpha=str(alpha), h=h))
    return rep


SUITES = {
    "lemma22": _suite_lemma22,
    "cor23": _suite_cor23,
    "cor25": _suite_cor25,
    "lemma26": _suite_lemma26,
    "lemma27": _suite_lemma27,
    "lemma28": _suite_lemma28,
    "lemma31": _suite_lemma31,
    "prop32": _suite_prop32,
    "lemma33": _suite_lemma33,
    "lemma41": _suite_lemma41,
    "example41": _suite_example41,
    "lemma44": _suite_lemma44,
    "prop55": _suite_prop55,
    "equ5": _suite_equ5,
    "thm72pair": _suite_thm72pair,
}


def run_suite(name: str, seed: int = 0, cases: int = 100) -> RunReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    if cases < 1:
        raise ValueError("cases must be >= 1")
    return SUITES[name](seed, cases)
