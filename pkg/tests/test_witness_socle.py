import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sb_abelian.classify import NotApplicableError
from sb_abelian.groupspec import PrimeSet, parse_spec
from sb_abelian.witness_socle import (
    AutomorphismPair,
    BasePointError,
    NonCanonicalError,
    NotSuperstableError,
    PrimeWindow,
    ProductElement,
    ScalarSearchFailed,
    build_socle_witness,
    choose_scalars,
    product_membership,
    proper_inclusion_check,
    pseudo_divide,
    random_socle_member,
    reduce_unbounded_torsion,
    window_from_socle,
)

ODD_PRIMES = PrimeSet(True, frozenset({2}))
ALL_PRIMES = PrimeSet(True, frozenset())

# One witness shared by most element-level tests.  Small bounds keep the
# exhaustive scan at 80 candidate polynomials, so this is essentially free.
WIT = build_socle_witness(
    PrimeWindow.over(ODD_PRIMES, 10),
    seed=0,
    max_exponent=1,
    height_bound=1,
    threshold=2,
)


# ---------------------------------------------------------------------------
# prime windows
# ---------------------------------------------------------------------------


def test_window_over_takes_first_primes():
    w = PrimeWindow.over(ODD_PRIMES, 4)
    assert w.primes == (3, 5, 7, 11)
    assert w.width == 4
    assert w.rank(3) == 1 and w.rank(101) == 1


def test_window_rank_overrides():
    w = PrimeWindow.over(ODD_PRIMES, 3, generic_rank=2, overrides=[(5, 7)])
    assert w.rank(5) == 7
    assert w.rank(3) == 2


def test_window_validation():
    with pytest.raises(ValueError):
        PrimeWindow.over(PrimeSet(False, frozenset({3, 5})), 2)  # finite support
    with pytest.raises(ValueError):
        PrimeWindow.over(ODD_PRIMES, 0)
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (5, 3), 1, ())  # out of order
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (2, 3), 1, ())  # 2 not in the support
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (3, 5), 0, ())
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (3, 5), 1, ((5, 0),))
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (3, 5), 1, ((2, 1),))
    with pytest.raises(ValueError):
        PrimeWindow(ODD_PRIMES, (3, 5), 1, ((7, 2), (7, 3)))


def test_window_from_socle_single_family():
    w = window_from_socle(parse_spec("sumP(all\\{2}; Z/p^1)"), width=6)
    assert w.source == ODD_PRIMES
    assert w.primes == (3, 5, 7, 11, 13, 17)
    assert w.generic_rank == 1
    assert w.overrides == ()


def test_window_from_socle_overrides_and_union():
    # rank 2 generically, but p=5 picks up an extra cyclic summand and p=3
    # only sits in one of the two families
    spec = parse_spec("sumP(all\\{2}; Z/p^1) + sumP(all\\{2,3}; Z/p^1) + Z/5")
    w = window_from_socle(spec, width=5)
    assert w.source == ODD_PRIMES
    assert w.generic_rank == 2
    assert dict(w.overrides) == {3: 1, 5: 3}


def test_window_from_socle_rejects_non_socle_input():
    with pytest.raises(ValueError, match="socle"):
        window_from_socle(parse_spec("sumP(all; Z/p^2)"))
    with pytest.raises(ValueError, match="socle"):
        window_from_socle(parse_spec("Prufer(3) + sumP(all; Z/p^1)"))
    with pytest.raises(ValueError, match="infinite multiplicity"):
        window_from_socle(parse_spec("sumP(all; Z/p^1)^w"))
    with pytest.raises(ValueError, match="finitely many"):
        window_from_socle(parse_spec("Z/3 + Z/5"))


# ---------------------------------------------------------------------------
# scalar search
# ---------------------------------------------------------------------------


def test_choose_scalars_small_example():
    # five-prime window including 2, tight bounds: still findable
    w = PrimeWindow.over(ALL_PRIMES, 5)
    assert w.primes == (2, 3, 5, 7, 11)
    pair, cert = choose_scalars(
        w, max_exponent=1, height_bound=1, threshold=2, seed=1
    )
    assert cert.passed
    assert cert.min_count >= 2
    assert cert.candidates == 3**4 - 1
    # histogram covers every nonzero polynomial exactly once
    assert sum(n for _, n in cert.histogram) == cert.candidates
    assert all(count >= cert.min_count for count, _ in cert.histogram)


def test_choose_scalars_deterministic():
    w = PrimeWindow.over(ODD_PRIMES, 8)
    a = choose_scalars(w, max_exponent=1, height_bound=1, threshold=2, seed=3)
    b = choose_scalars(w, max_exponent=1, height_bound=1, threshold=2, seed=3)
    assert a == b


def test_choose_scalars_diagonal_always_fails():
    # with sigma = tau everywhere, q = x - y vanishes at every window prime
    w = PrimeWindow.over(ODD_PRIMES, 8)
    with pytest.raises(ScalarSearchFailed) as info:
        choose_scalars(
            w,
            max_exponent=1,
            height_bound=1,
            threshold=2,
            seed=0,
            retries=3,
            diagonal_only=True,
        )
    assert info.value.attempts == 3
    assert info.value.best is not None
    assert info.value.best.min_count == 0


def test_choose_scalars_constant_polynomials_trivially_pass():
    w = PrimeWindow.over(ODD_PRIMES, 5)
    _, cert = choose_scalars(w, max_exponent=0, height_bound=1, threshold=2, seed=0)
    # +-1 never vanishes at any odd prime
    assert cert.min_count == w.width


def test_choose_scalars_threshold_beyond_width():
    w = PrimeWindow.over(ODD_PRIMES, 3)
    with pytest.raises(ScalarSearchFailed, match="exceeds the window width"):
        choose_scalars(w, threshold=4, max_exponent=1, height_bound=1)


def test_choose_scalars_validation():
    w = PrimeWindow.over(ODD_PRIMES, 3)
    with pytest.raises(ValueError):
        choose_scalars(w, max_exponent=-1)
    with pytest.raises(ValueError):
        choose_scalars(w, height_bound=0)
    with pytest.raises(ValueError):
        choose_scalars(w, threshold=0)
    with pytest.raises(ValueError):
        choose_scalars(w, retries=0, threshold=2)


def test_certificate_json():
    data = WIT.certificate.to_json()
    assert data["passed"] is True
    assert data["width"] == 10
    assert data["threshold"] == 2
    assert isinstance(data["histogram"], dict)
    assert all(len(term) == 3 for term in data["worst"])


def test_automorphism_pair_units_and_tail_rule():
    pair = WIT.scalars
    for p, s, t in zip(pair.window.primes, pair.first, pair.second):
        assert 0 < s < p and 0 < t < p
        assert pair.at(p) == (s, t)
    # beyond the window: deterministic seeded units
    s1, t1 = pair.at(541)
    assert (s1, t1) == pair.at(541)
    assert 0 < s1 < 541 and 0 < t1 < 541
    with pytest.raises(ValueError, match="outside the support"):
        pair.at(2)


def test_automorphism_pair_validation():
    w = PrimeWindow.over(ODD_PRIMES, 2)
    with pytest.raises(ValueError):
        AutomorphismPair(w, 0, 0, False, (1,), (1, 1))
    with pytest.raises(ValueError):
        AutomorphismPair(w, 0, 0, False, (0, 1), (1, 1))


# ---------------------------------------------------------------------------
# pseudo-division
# ---------------------------------------------------------------------------


def test_pseudo_divide_zeroes_own_prime_and_divides_rest():
    g = WIT.from_coordinates({3: (1,), 5: (2,)})
    h = pseudo_divide(g, 3)
    assert h.evaluate(3) == (0,)
    assert h.evaluate(5) == (4,)  # 3^-1 = 2 mod 5, 2*2 = 4


def test_pseudo_divide_by_unit_modulus():
    # 2 is outside the support: plain exact division everywhere
    g = WIT.from_coordinates({3: (1,), 5: (2,)})
    h = g.pseudo_divide(2)
    assert h.evaluate(3) == (2,)  # 2^-1 = 2 mod 3
    assert h.evaluate(5) == (1,)  # 2^-1 = 3 mod 5, 3*2 = 6 = 1


def test_pseudo_divide_identity():
    g = random_socle_member(WIT, random.Random(11))
    assert g.pseudo_divide(1) == g


def test_pseudo_divide_rejects_bad_modulus():
    g = WIT.base_point()
    with pytest.raises(ValueError):
        g.pseudo_divide(0)
    with pytest.raises(ValueError):
        g.pseudo_divide(-3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 10**9))
def test_pseudo_divide_composition_law(a, b, seed):
    x = random_socle_member(WIT, random.Random(seed))
    assert x.pseudo_divide(a).pseudo_divide(b) == x.pseudo_divide(a * b)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**9))
def test_scale_undoes_pseudo_divide_off_the_modulus(n, seed):
    x = random_socle_member(WIT, random.Random(seed))
    back = x.pseudo_divide(n).scale(n)
    for p in WIT.window.primes[:5]:
        if n % p == 0:
            assert back.evaluate(p) == (0,) * WIT.window.rank(p)
        else:
            assert back.evaluate(p) == x.evaluate(p)


# ---------------------------------------------------------------------------
# element arithmetic and evaluation
# ---------------------------------------------------------------------------


def test_grid_point_evaluation_matches_scalars():
    x = WIT.grid_point(2, 1)
    for p in (3, 5, 7):
        s, t = WIT.scalars.at(p)
        assert x.evaluate(p) == (s * s * t % p,)


def test_addition_is_exact_on_evaluations():
    rng = random.Random(23)
    for _ in range(20):
        x = random_socle_member(WIT, rng)
        y = random_socle_member(WIT, rng)
        z = x + y
        for p in (3, 5, 11):
            want = tuple(
                (a + b) % p for a, b in zip(x.evaluate(p), y.evaluate(p))
            )
            assert z.evaluate(p) == want


def test_subtraction_round_trip():
    rng = random.Random(29)
    x = random_socle_member(WIT, rng)
    y = random_socle_member(WIT, rng)
    assert (x + y) - y == x
    assert x - x == WIT.zero()


def test_fraction_reduction_keeps_evaluations_exact():
    # 3 * (a / 3) has a cancelling tail coefficient; the zeroed component at
    # p=3 must survive the cancellation as an exception entry
    a = WIT.base_point()
    x = a.pseudo_divide(3).scale(3)
    assert x.coefficient(0, 0) == 1
    assert x.evaluate(3) == (0,)
    assert x.evaluate(5) == a.evaluate(5)
    assert x != a  # they differ at p=3, and the forms record it


def test_apply_scalar_shifts_and_multiplies():
    rng = random.Random(31)
    x = random_socle_member(WIT, rng)
    y = x.apply_scalar(1)
    z = x.apply_scalar(2)
    assert y.support() == tuple((i + 1, j) for i, j in x.support())
    for p in (3, 7, 13):
        s, t = WIT.scalars.at(p)
        assert y.evaluate(p) == tuple(s * v % p for v in x.evaluate(p))
        assert z.evaluate(p) == tuple(t * v % p for v in x.evaluate(p))
    with pytest.raises(ValueError):
        x.apply_scalar(3)


def test_apply_scalar_then_unit_inverse_is_identity_on_evaluations():
    rng = random.Random(37)
    x = random_socle_member(WIT, rng)
    y = x.apply_scalar(1)
    for p in WIT.window.primes:
        inv = pow(WIT.scalar_at(p, 1), -1, p)
        assert tuple(inv * v % p for v in y.evaluate(p)) == x.evaluate(p)


def test_from_coordinates_validation():
    with pytest.raises(ValueError, match="outside the support"):
        WIT.from_coordinates({2: (1,)})
    with pytest.raises(ValueError, match="length"):
        WIT.from_coordinates({3: (1, 1)})
    assert WIT.from_coordinates({3: (0,)}) == WIT.zero()


def test_cross_witness_arithmetic_rejected():
    other = build_socle_witness(
        PrimeWindow.over(ODD_PRIMES, 10),
        seed=5,
        max_exponent=1,
        height_bound=1,
        threshold=2,
    )
    with pytest.raises(ValueError, match="different witness"):
        WIT.base_point() + other.base_point()
    with pytest.raises(ValueError, match="different witness"):
        other.evaluate(WIT.base_point(), 3)


def test_evaluate_outside_support_rejected():
    with pytest.raises(ValueError, match="outside the support"):
        WIT.base_point().evaluate(2)


def test_element_json_round_trip():
    rng = random.Random(41)
    x = random_socle_member(WIT, rng)
    data = x.to_json()
    assert WIT.element_from_json(data) == x


def test_element_from_json_rejects_non_canonical():
    with pytest.raises(NonCanonicalError):
        WIT.element_from_json({"tail": [[0, 0, 0, 1]], "exceptions": []})
    with pytest.raises(NonCanonicalError):
        WIT.element_from_json({"tail": [[1, 0, 1, 1], [0, 0, 1, 1]], "exceptions": []})
    with pytest.raises(NonCanonicalError):
        WIT.element_from_json({"tail": [], "exceptions": [[3, [0]]]})


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def test_base_point_in_both_subgroups():
    a = WIT.base_point()
    assert WIT.membership(a, "H1")
    assert WIT.membership(a, "H2")


def test_finite_support_elements_lie_in_h2():
    g = WIT.from_coordinates({3: (2,), 11: (7,)})
    assert product_membership(g, "H2", WIT)
    assert product_membership(g, "H1", WIT)


def test_second_scalar_moves_base_point_out_of_h2():
    x = WIT.base_point().apply_scalar(2)
    assert WIT.membership(x, "H1")
    assert not WIT.membership(x, "H2")


def test_first_scalar_embeds_h1_into_h2():
    rng = random.Random(43)
    for _ in range(100):
        x = random_socle_member(WIT, rng, "H1")
        assert WIT.membership(x.apply_scalar(1), "H2")


def test_h2_contained_in_h1():
    rng = random.Random(47)
    for _ in range(100):
        x = random_socle_member(WIT, rng, "H2")
        assert WIT.membership(x, "H2")
        assert WIT.membership(x, "H1")


def test_pseudo_divide_preserves_membership():
    # dividing by window-prime products keeps the tail support unchanged
    rng = random.Random(53)
    for _ in range(20):
        x = random_socle_member(WIT, rng, "H2")
        assert WIT.membership(x.pseudo_divide(15), "H2")
        assert WIT.membership(x.pseudo_divide(21), "H1")


def test_membership_rejects_non_canonical_elements():
    bad = ProductElement(WIT, (((0, 0), Fraction(0)),), ())
    with pytest.raises(NonCanonicalError):
        product_membership(bad, "H1")
    with pytest.raises(ValueError, match="one of"):
        product_membership(WIT.base_point(), "H3")


def test_grid_contains_shapes():
    assert WIT.grid_contains("H1", 0, 5)
    assert not WIT.grid_contains("H2", 0, 5)
    assert WIT.grid_contains("H2", 0, 0)
    assert WIT.grid_contains("H2", 4, 2)


# ---------------------------------------------------------------------------
# witness assembly
# ---------------------------------------------------------------------------


def test_base_overrides_change_the_base_point():
    wit = build_socle_witness(
        PrimeWindow.over(ODD_PRIMES, 6),
        seed=0,
        max_exponent=1,
        height_bound=1,
        threshold=2,
        base_overrides={3: (2,)},
    )
    assert wit.base_vector(3) == (2,)
    assert wit.base_point().evaluate(3) == (2,)
    assert wit.base_vector(5) == (1,)


def test_base_override_zero_projection_rejected():
    window = PrimeWindow.over(ODD_PRIMES, 6)
    with pytest.raises(BasePointError, match="zero projection"):
        build_socle_witness(
            window,
            max_exponent=1,
            height_bound=1,
            threshold=2,
            base_overrides={3: (0,)},
        )
    with pytest.raises(BasePointError, match="length"):
        build_socle_witness(
            window,
            max_exponent=1,
            height_bound=1,
            threshold=2,
            base_overrides={3: (1, 1)},
        )
    with pytest.raises(BasePointError, match="outside the support"):
        build_socle_witness(
            window,
            max_exponent=1,
            height_bound=1,
            threshold=2,
            base_overrides={2: (1,)},
        )


def test_witness_json_shape():
    data = WIT.to_json()
    assert data["kind"] == "socle-witness-pair"
    assert data["certificate"]["passed"] is True
    assert data["grids"]["H2"] == "i >= 1, plus (0, 0)"
    assert data["window"]["primes"] == list(WIT.window.primes)


def test_proper_inclusion_check_passes_at_test_scale():
    check = proper_inclusion_check(WIT, max_shift=3)
    assert check.passed
    assert [m for m, _, _ in check.rows] == [0, 1, 2, 3]
    assert all(c >= WIT.certificate.threshold for _, c, _ in check.rows)
    data = check.to_json()
    assert data["passed"] is True
    assert len(data["rows"]) == 4


# ---------------------------------------------------------------------------
# the reduction pipeline
# ---------------------------------------------------------------------------


def _reduce(text, **kw):
    kw.setdefault("width", 10)
    kw.setdefault("max_exponent", 1)
    kw.setdefault("height_bound", 1)
    kw.setdefault("threshold", 2)
    return reduce_unbounded_torsion(parse_spec(text), **kw)


def test_reduce_plain_family_is_already_a_socle():
    out = _reduce("sumP(all\\{2}; Z/p^1)")
    assert out.modulus == 1
    assert str(out.socle_part) == "sumP(all\\{2}; Z/p^1)"
    assert str(out.carried_bounded) == "0"
    assert str(out.carried_divisible) == "0"
    steps = [t["step"] for t in out.transcript]
    assert steps == [
        "stability-gate",
        "bounded-split",
        "socle",
        "window",
        "witness",
        "lift",
    ]
    split = next(t for t in out.transcript if t["step"] == "bounded-split")
    assert split["trivial"] is True
    assert out.witness.certificate.passed


def test_reduce_splits_off_infinite_multiplicity_bounded_types():
    out = _reduce("sumP(all; Z/p^2) + Z/4^w")
    assert out.modulus == 4
    assert str(out.carried_bounded) == "Z/4^w"
    assert str(out.socle_part) == "sumP(all\\{2}; Z/p^1)"
    split = next(t for t in out.transcript if t["step"] == "bounded-split")
    assert split["trivial"] is False
    assert split["modulus"] == 4


def test_reduce_carries_divisible_summands_with_a_flagged_reading():
    out = _reduce("sumP(all\\{2}; Z/p^1) + Q + Prufer(3)^w")
    assert str(out.carried_divisible) == "Prufer(3)^w + Q"
    step = next(t for t in out.transcript if t["step"] == "carried-divisible")
    assert "recorded, not asserted" in step["note"]


def test_reduce_rejects_unbounded_exponent_at_a_fixed_prime():
    with pytest.raises(NotSuperstableError):
        _reduce("sumK(3; all)")


def test_reduce_rejects_infinite_multiplicity_over_infinitely_many_primes():
    with pytest.raises(NotSuperstableError):
        _reduce("sumP(all; Z/p^1)^w")


def test_reduce_rejects_bounded_torsion():
    with pytest.raises(NotApplicableError, match="bounded"):
        _reduce("Z/4^w + Z/9")


def test_reduce_rejects_completion_summands():
    with pytest.raises(NotApplicableError, match="completion"):
        _reduce("Zhat(3) + sumP(all\\{3}; Z/p^1)")


def test_reduce_outcome_json():
    out = _reduce("sumP(all\\{2}; Z/p^1)")
    data = out.to_json()
    assert data["kind"] == "unbounded-torsion-reduction"
    assert data["modulus"] == 1
    assert data["witness"]["kind"] == "socle-witness-pair"
    assert [t["step"] for t in data["transcript"]][0] == "stability-gate"
