"""Derivations, endomorphisms, lifting, gradings of maps, nilpotency probes."""

import random
from fractions import Fraction

import pytest

from lsea import (
    Derivation,
    DomainError,
    Element,
    Endomorphism,
    NonzeroThrough,
    UnverifiedMapError,
    ZeroAt,
    ad,
    affine_tuple,
    apply_derivation,
    apply_endo,
    check_derivation,
    check_endomorphism,
    check_inverse_pair,
    commutator,
    compose,
    compose_tuples,
    der_bracket,
    der_lm_lc,
    elementary_tuple,
    extend_lnd_prop55,
    gen_l,
    gen_r,
    graded_parts,
    highest_part,
    identity_endo,
    in_I,
    is_affine_U,
    lift_phi,
    map_from_json,
    map_to_json,
    mul,
    probe_nilpotent,
    restrict_r,
    triangular_tuple,
    u1_closed_form,
)
from lsea.maps import PureFormalExpression, identity_tuple, is_identity, poly_subst
from lsea.verify import (
    example41_derivation,
    rand_element,
    rand_homogeneous_I,
    rand_tame_tuple,
    rand_verified_derivation,
)


def word(n, lexp, rword, c=1):
    return Element.from_word(n, lexp, rword, c)


class TestCheckDerivation:
    def test_example41_passes_all_five(self):
        d = example41_derivation()
        assert d.verified
        _, violations = check_derivation(d)
        assert violations == []

    def test_zero_derivation(self):
        z = Element.zero(2)
        d, violations = check_derivation(Derivation(2, (z, z), (z, z)))
        assert d.verified and not violations

    def test_single_r_image_fails(self):
        z = Element.zero(2)
        d, violations = check_derivation(Derivation(2, (gen_r(2, 1), z), (z, z)))
        assert not d.verified
        # expanding by hand: the commuting relation (1,2) and the
        # straightening relation (2,1) pick up nonzero residuals
        kinds = {(k, i, j) for k, i, j, _ in violations}
        assert ("s1", 1, 2) in kinds
        assert ("s2", 2, 1) in kinds


class TestApply:
    def test_apply_requires_verified(self):
        z = Element.zero(2)
        d = Derivation(2, (gen_r(2, 1), z), (z, z))
        with pytest.raises(UnverifiedMapError):
            apply_derivation(d, gen_l(2, 1))

    def test_example41_on_l1l2(self):
        d = example41_derivation()
        got = apply_derivation(d, mul(gen_l(2, 1), gen_l(2, 2)))
        # normalize r1*r1*l2 + l1*r1*r2 by hand
        expect = (
            word(2, (0, 1), (1, 1))
            + word(2, (1, 0), (1, 2))
            + word(2, (0, 0), (1, 2, 1))
            + word(2, (0, 0), (1, 1, 2))
        )
        assert got == expect
        # the antisymmetrized relation value is zero
        assert apply_derivation(d, commutator(gen_l(2, 1), gen_l(2, 2))).is_zero

    def test_kills_unit(self):
        d = example41_derivation()
        assert apply_derivation(d, Element.one(2)).is_zero

    def test_ad_l1_on_r2(self):
        assert apply_derivation(ad(gen_l(2, 1)), gen_r(2, 2)) == word(2, (0, 0), (2, 1), -1)

    def test_leibniz_random(self):
        rng = random.Random(61)
        for _ in range(40):
            n = rng.randint(1, 3)
            d = rand_verified_derivation(rng, n)
            a, b = rand_element(rng, n, 2), rand_element(rng, n, 2)
            assert apply_derivation(d, mul(a, b)) == mul(
                apply_derivation(d, a), b
            ) + mul(a, apply_derivation(d, b))


class TestInnerDerivations:
    def test_ad_r1_on_r1(self):
        assert apply_derivation(ad(gen_l(1, 1)), gen_r(1, 1)) == word(1, (0,), (1, 1), -1)

    def test_ad_of_unit_is_zero(self):
        d = ad(Element.one(2))
        assert all(g.is_zero for g in d.l_images + d.r_images)

    def test_ad_free_commutator(self):
        got = apply_derivation(ad(gen_r(2, 1)), gen_r(2, 2))
        assert got == word(2, (0, 0), (1, 2)) - word(2, (0, 0), (2, 1))

    def test_ad_always_checks(self):
        rng = random.Random(67)
        for _ in range(20):
            a = rand_element(rng, rng.randint(1, 3), 2)
            _, violations = check_derivation(ad(a))
            assert not violations

    def test_bracket_of_inner_is_inner_of_commutator(self):
        rng = random.Random(71)
        for _ in range(15):
            n = rng.randint(1, 3)
            a, b = rand_element(rng, n, 2), rand_element(rng, n, 2)
            lhs = der_bracket(ad(a), ad(b))
            rhs = ad(commutator(a, b))
            assert lhs.l_images == rhs.l_images
            assert lhs.r_images == rhs.r_images

    def test_bracket_self_zero(self):
        d = example41_derivation()
        b = der_bracket(d, d)
        assert all(g.is_zero for g in b.l_images + b.r_images)

    def test_bracket_with_example41_is_derivation(self):
        b = der_bracket(example41_derivation(), ad(gen_r(2, 1)))
        _, violations = check_derivation(b)
        assert not violations


class TestDerivationLeadingData:
    def test_grouping(self):
        z = Element.zero(2)
        img = mul(gen_l(2, 1), word(2, (0, 0), (1, 1))) + gen_r(2, 1)
        d = Derivation(2, (img, z), (z, z))
        top, lc = der_lm_lc(d)
        assert top == (1, 0)
        assert lc.l_images[0] == word(2, (0, 0), (1, 1))
        assert lc.l_images[1].is_zero

    def test_zero(self):
        z = Element.zero(2)
        top, lc = der_lm_lc(Derivation(2, (z, z), (z, z)))
        assert top is None and lc.is_zero()

    def test_example41_already_pure(self):
        d = example41_derivation()
        top, lc = der_lm_lc(d)
        assert top == (0, 0)
        assert lc.l_images == d.l_images
        assert lc.r_images == d.r_images


class TestRestrictedRDerivation:
    def test_example41_restriction(self):
        _, lc = der_lm_lc(example41_derivation())
        dr = restrict_r(lc)
        got = dr(gen_r(2, 2))
        assert got == word(2, (0, 0), (1, 2)) - word(2, (0, 0), (2, 1))

    def test_zero(self):
        z = Element.zero(2)
        dr = restrict_r(PureFormalExpression(2, (z, z), (z, z)))
        assert dr(gen_r(2, 1)).is_zero

    def test_slot_substitution(self):
        n = 2
        c = gen_r(n, 1) + gen_r(n, 2)
        p = PureFormalExpression(
            n,
            (Element.zero(n),) * n,
            tuple(mul(gen_r(n, i), c) for i in (1, 2)),
        )
        got = restrict_r(p)(gen_r(n, 1))
        assert got == word(n, (0, 0), (1, 1)) + word(n, (0, 0), (1, 2))

    def test_domain(self):
        _, lc = der_lm_lc(example41_derivation())
        with pytest.raises(DomainError):
            restrict_r(lc)(gen_l(2, 1))


class TestGradedParts:
    def test_example41_single_part(self):
        parts = graded_parts(example41_derivation(), (1, 1))
        assert list(parts) == [1]
        assert parts[1].l_images == example41_derivation().l_images

    def test_constant_images_have_degree_minus_one(self):
        z = Element.zero(2)
        d, _ = check_derivation(Derivation(2, (Element.one(2), z), (z, z)))
        assert d.verified
        parts = graded_parts(d, (1, 1))
        assert list(parts) == [-1]

    def test_zero_derivation_empty(self):
        z = Element.zero(2)
        d, _ = check_derivation(Derivation(2, (z, z), (z, z)))
        assert graded_parts(d, (1, 1)) == {}

    def test_parts_sum_to_whole(self):
        rng = random.Random(73)
        for _ in range(15):
            n = rng.randint(2, 3)
            d = rand_verified_derivation(rng, n)
            parts = graded_parts(d, (1,) * n)
            for slot in range(n):
                assert (
                    sum((p.l_images[slot] for p in parts.values()), Element.zero(n))
                    == d.l_images[slot]
                )
                assert (
                    sum((p.r_images[slot] for p in parts.values()), Element.zero(n))
                    == d.r_images[slot]
                )

    def test_highest_parts_compose(self):
        rng = random.Random(79)
        checked = 0
        while checked < 25:
            n = rng.randint(2, 3)
            d = rand_verified_derivation(rng, n)
            parts = graded_parts(d, (1,) * n)
            if not parts:
                continue
            dtop = parts[max(parts)]
            g = rand_element(rng, n, 3)
            if g.is_zero:
                continue
            rhs = apply_derivation(dtop, highest_part(g))
            if rhs.is_zero:
                continue
            assert highest_part(apply_derivation(d, g)) == rhs
            checked += 1


class TestProbe:
    def test_prop55_statement(self):
        d = extend_lnd_prop55(2, gen_l(2, 2) ** 2)
        assert d.l_images[0] == gen_l(2, 2) ** 2
        assert d.r_images[0] == 2 * mul(gen_l(2, 2), gen_r(2, 2))
        assert d.l_images[1].is_zero and d.r_images[1].is_zero
        assert probe_nilpotent(d, gen_l(2, 1), 5) == ZeroAt(2)
        assert probe_nilpotent(d, gen_r(2, 1), 5) == ZeroAt(2)

    def test_prop55_constant(self):
        d = extend_lnd_prop55(2, Element.one(2))
        assert d.l_images[0] == Element.one(2)
        assert d.r_images[0].is_zero

    def test_prop55_cubic_derivative(self):
        d = extend_lnd_prop55(2, gen_l(2, 2) ** 3)
        assert d.r_images[0] == 3 * mul(gen_l(2, 2) ** 2, gen_r(2, 2))

    def test_prop55_domain(self):
        with pytest.raises(DomainError):
            extend_lnd_prop55(2, gen_l(2, 1))
        with pytest.raises(DomainError):
            extend_lnd_prop55(1, gen_l(1, 1))

    def test_example41_not_nilpotent_on_r2(self):
        res = probe_nilpotent(example41_derivation(), gen_r(2, 2), 5)
        assert isinstance(res, NonzeroThrough)
        assert res.degrees == (2, 3, 4, 5, 6)

    def test_unit_dies_immediately(self):
        assert probe_nilpotent(example41_derivation(), Element.one(2), 5) == ZeroAt(1)


class TestEndomorphisms:
    def test_identity_checks(self):
        e, violations = check_endomorphism(identity_endo(2))
        assert e.verified and not violations

    def test_lift_verifies(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        _, violations = check_endomorphism(phi)
        assert not violations
        assert phi.r_images[0] == gen_r(2, 1) + 2 * mul(gen_l(2, 2), gen_r(2, 2))
        assert phi.r_images[1] == gen_r(2, 2)

    def test_bad_endo(self):
        e, violations = check_endomorphism(
            Endomorphism(1, (gen_l(1, 1),), (gen_l(1, 1),))
        )
        assert not e.verified and violations

    def test_apply_identity(self):
        rng = random.Random(83)
        g = rand_element(rng, 2, 3)
        assert apply_endo(identity_endo(2), g) == g

    def test_apply_lift_on_generator(self):
        f = (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2))
        phi = lift_phi(2, f)
        assert apply_endo(phi, gen_l(2, 1)) == f[0]

    def test_homomorphism_property(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        x = mul(gen_r(2, 1), gen_l(2, 1))
        assert apply_endo(phi, x) == mul(
            apply_endo(phi, gen_r(2, 1)), apply_endo(phi, gen_l(2, 1))
        )

    def test_compose_with_identity(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        assert compose(phi, identity_endo(2)).l_images == phi.l_images
        assert compose(identity_endo(2), phi).r_images == phi.r_images

    def test_lift_is_functorial(self):
        rng = random.Random(89)
        for _ in range(15):
            n = rng.randint(2, 3)
            cap = 5 if n == 2 else 3
            f, _ = rand_tame_tuple(rng, n, 2, cap)
            g, _ = rand_tame_tuple(rng, n, 2, cap)
            if max(x.degree() for x in compose_tuples(f, g)) > cap:
                continue
            lhs = lift_phi(n, compose_tuples(f, g))
            rhs = compose(lift_phi(n, f), lift_phi(n, g))
            assert lhs.l_images == rhs.l_images
            assert lhs.r_images == rhs.r_images

    def test_lift_identity(self):
        assert is_identity(lift_phi(3, identity_tuple(3)))

    def test_lift_linear_case(self):
        phi = lift_phi(2, (2 * gen_l(2, 1), gen_l(2, 2)))
        assert phi.r_images == (2 * gen_r(2, 1), gen_r(2, 2))

    def test_inverse_pair_negative(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        assert not check_inverse_pair(phi, phi)

    def test_ideal_stability(self):
        rng = random.Random(97)
        for _ in range(30):
            n = rng.randint(2, 3)
            f, _ = rand_tame_tuple(rng, n, 2, 4 if n == 2 else 3)
            phi = lift_phi(n, f)
            g = rand_homogeneous_I(rng, n, rng.randint(1, 3))
            assert in_I(apply_endo(phi, g))


class TestAffine:
    def test_affine_lift_is_affine(self):
        fwd, inv = affine_tuple(2, [[1, 1], [0, 1]], [2, 0])
        phi = lift_phi(2, fwd)
        assert is_affine_U(phi)
        assert check_inverse_pair(phi, lift_phi(2, inv))

    def test_nonaffine_lift(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        assert not is_affine_U(phi)

    def test_identity_affine(self):
        assert is_affine_U(identity_endo(3))

    def test_singular_matrix_rejected(self):
        with pytest.raises(ValueError):
            affine_tuple(2, [[1, 1], [1, 1]])


class TestTupleConstructors:
    def test_elementary_inverse(self):
        fwd, inv = elementary_tuple(2, 1, 2, gen_l(2, 2) ** 3)
        assert compose_tuples(fwd, inv) == identity_tuple(2)
        assert compose_tuples(inv, fwd) == identity_tuple(2)

    def test_elementary_rejects_self_reference(self):
        with pytest.raises(DomainError):
            elementary_tuple(2, 1, 1, gen_l(2, 1))

    def test_triangular_inverse(self):
        fs = (gen_l(3, 2) * gen_l(3, 3), gen_l(3, 3) ** 2, Element.zero(3))
        fwd, inv = triangular_tuple(3, (1, 2, 1), fs)
        assert compose_tuples(fwd, inv) == identity_tuple(3)
        assert compose_tuples(inv, fwd) == identity_tuple(3)

    def test_poly_subst_is_evaluation(self):
        f = gen_l(2, 1) ** 2 + gen_l(2, 2)
        images = (gen_l(2, 2), gen_l(2, 1))
        assert poly_subst(f, images) == gen_l(2, 2) ** 2 + gen_l(2, 1)


class TestU1ClosedForm:
    def test_documented_inverse(self):
        phi, psi = u1_closed_form(2, gen_r(1, 1) ** 3)
        assert psi.l_images[0] == Fraction(1, 2) * gen_l(1, 1) - Fraction(
            1, 16
        ) * gen_r(1, 1) ** 3
        assert psi.r_images[0] == Fraction(1, 2) * gen_r(1, 1)

    def test_trivial_pair(self):
        phi, psi = u1_closed_form(1, Element.zero(1))
        assert is_identity(phi) and is_identity(psi)

    def test_linear_shift(self):
        phi, psi = u1_closed_form(1, gen_r(1, 1))
        assert psi.l_images[0] == gen_l(1, 1) - gen_r(1, 1)

    def test_alpha_zero_rejected(self):
        with pytest.raises(DomainError):
            u1_closed_form(0, Element.zero(1))

    def test_random_pairs(self):
        rng = random.Random(101)
        for _ in range(20):
            alpha = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2]))
            h = Element.zero(1)
            for k in range(rng.randint(0, 5) + 1):
                if rng.random() < 0.6:
                    h = h + Element.from_word(1, (0,), (1,) * k, rng.randint(-2, 2))
            phi, psi = u1_closed_form(alpha, h)
            assert check_inverse_pair(phi, psi)


class TestIdealStabilityDerivations:
    def test_random_derivations_preserve_ideal(self):
        rng = random.Random(103)
        for _ in range(40):
            n = rng.randint(2, 3)
            d = rand_verified_derivation(rng, n)
            g = rand_homogeneous_I(rng, n, rng.randint(1, 3))
            assert in_I(apply_derivation(d, g))


class TestEqu5:
    def test_identity_on_u1(self):
        z = Element.zero(1)
        d1, violations = check_derivation(Derivation(1, (Element.one(1),), (z,)))
        assert not violations
        rng = random.Random(107)
        r1 = gen_r(1, 1)
        for _ in range(40):
            w = rand_element(rng, 1, 5)
            assert mul(r1, w) == mul(w, r1) + mul(
                mul(r1, apply_derivation(d1, w)), r1
            )


class TestMapSerialization:
    def test_round_trip(self):
        d = example41_derivation()
        data = map_to_json(d)
        assert data["kind"] == "derivation"
        d2 = map_from_json(data)
        assert d2.l_images == d.l_images
        assert d2.r_images == d.r_images
        assert d2.verified

    def test_endo_round_trip(self):
        phi = lift_phi(2, (gen_l(2, 1) + gen_l(2, 2) ** 2, gen_l(2, 2)))
        e2 = map_from_json(map_to_json(phi))
        assert isinstance(e2, Endomorphism)
        assert e2.l_images == phi.l_images
