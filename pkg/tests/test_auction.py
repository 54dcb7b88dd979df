from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vcbundle import (
    BudgetExceededError,
    BundleFamily,
    GoodsUniverse,
    Profile,
    TieBreak,
    Valuation,
    clarke_payment,
    field_of_partition,
    max_surplus,
    optimal_allocation,
    partition_from_sizes,
    profile_of,
    project_profile,
    run_vc,
    sigma_optimal_surplus,
    unanimity_profile,
    unanimity_valuation,
)
from conftest import brute_force_optima, brute_force_sigma_surplus, small_profiles


def w(universe, text, weight=1):
    return unanimity_valuation(universe, universe.parse_bundle(text), weight)


class TestOptimalAllocation:
    def test_two_singleton_buyers(self, u2):
        prof = profile_of(u2, w(u2, "a"), w(u2, "b"))
        alloc, s_max = optimal_allocation(prof)
        assert s_max == 2
        assert alloc.buyer_bundles == (1, 2)

    def test_single_buyer_gets_optimal_value(self, u4):
        v = w(u4, "ab", 3)
        alloc, s_max = optimal_allocation(profile_of(u4, v))
        assert s_max == v.value(u4.full_mask) == 3
        # canonical keeps surplus-irrelevant goods with the seller
        assert alloc.buyer_bundles == (u4.parse_bundle("ab"),)
        assert alloc.seller_bundle == u4.parse_bundle("cd")

    def test_three_buyers_brute_force_value(self, u4):
        prof = unanimity_profile(
            u4, [u4.parse_bundle("bc"), u4.parse_bundle("a"), u4.parse_bundle("d")]
        )
        best, _ = brute_force_optima(prof)
        assert best == 3
        assert max_surplus(prof) == 3
        alloc, s_max = optimal_allocation(prof)
        assert s_max == 3 and alloc.surplus(prof) == 3

    @given(profile=small_profiles())
    @settings(max_examples=50, deadline=None)
    def test_matches_brute_force_and_canonical_is_lex_min(self, profile):
        best, optima = brute_force_optima(profile)
        alloc, s_max = optimal_allocation(profile)
        assert s_max == best
        assert alloc.buyer_bundles == min(optima)

    @given(profile=small_profiles(sparse_only=True))
    @settings(max_examples=40, deadline=None)
    def test_sparse_and_dense_routes_agree(self, profile):
        dense = Profile(profile.universe, tuple(v.to_dense() for v in profile.valuations))
        for tie in (TieBreak.canonical(), TieBreak.seller_favoring()):
            a1, s1 = optimal_allocation(profile, tie)
            a2, s2 = optimal_allocation(dense, tie)
            assert s1 == s2
            assert a1.buyer_bundles == a2.buyer_bundles

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_adversarial_routes_agree_with_independent_reference(self, data):
        profile = data.draw(small_profiles(max_m=3, sparse_only=True))
        universe = profile.universe
        from conftest import sparse_valuations

        reference = Profile(
            universe,
            tuple(data.draw(sparse_valuations(universe)) for _ in range(profile.n)),
        )
        dense = Profile(universe, tuple(v.to_dense() for v in profile.valuations))
        tie = TieBreak.adversarial_to(0)
        a1, s1 = optimal_allocation(profile, tie, reference=reference)
        a2, s2 = optimal_allocation(dense, tie, reference=reference)
        assert s1 == s2
        assert a1.buyer_bundles == a2.buyer_bundles
        # brute force: minimal reference surplus among optima, then lex order
        best, optima = brute_force_optima(profile)
        assert s1 == best

        def key(masks):
            ref = sum(
                (v.value(b) for v, b in zip(reference.valuations, masks)), Fraction(0)
            )
            return (ref, masks)

        assert a1.buyer_bundles == min(optima, key=key)

    @given(profile=small_profiles(), buyer=st.integers(0, 2))
    @settings(max_examples=40, deadline=None)
    def test_tie_rules_pick_from_the_optimal_set(self, profile, buyer):
        buyer %= profile.n
        best, optima = brute_force_optima(profile)
        canonical = min(optima)
        alloc, _ = optimal_allocation(profile, TieBreak.canonical())
        assert alloc.buyer_bundles == canonical

        def seller_key(masks):
            used = 0
            for b in masks:
                used |= b
            return (bin(used).count("1"), masks)

        alloc, _ = optimal_allocation(profile, TieBreak.seller_favoring())
        assert alloc.buyer_bundles == min(optima, key=seller_key)

        def adversarial_key(masks):
            ref = sum(
                (v.value(b) for v, b in zip(profile.valuations, masks)), Fraction(0)
            )
            return (ref, masks)

        alloc, _ = optimal_allocation(
            profile, TieBreak.adversarial_to(buyer), reference=profile
        )
        assert alloc.buyer_bundles == min(optima, key=adversarial_key)

    def test_dense_budget(self):
        universe = GoodsUniverse.of_size(15)
        with pytest.raises(BudgetExceededError):
            Valuation.dense(universe, [0] * (1 << 15))

    def test_atom_budget(self):
        universe = GoodsUniverse.of_size(10)
        atoms = [(1 << (i % 10), 1) for i in range(70)]
        prof = profile_of(universe, Valuation.from_atoms(universe, atoms))
        with pytest.raises(BudgetExceededError):
            max_surplus(prof)


class TestSigmaOptimalSurplus:
    def test_trivial_family_serves_one_buyer(self, u2):
        prof = profile_of(u2, w(u2, "a"), w(u2, "b"))
        fam = BundleFamily.of(u2, [u2.full_mask])
        alloc, s = sigma_optimal_surplus(prof, fam)
        assert s == 1
        assert all(b in fam.bundles for b in alloc.buyer_bundles)

    def test_power_set_recovers_s_max(self, u4):
        prof = unanimity_profile(u4, [u4.parse_bundle("bc"), u4.parse_bundle("a")])
        fam = BundleFamily.full(u4)
        _, s = sigma_optimal_surplus(prof, fam)
        assert s == max_surplus(prof)

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_cross_check_identity_and_direct_recursion(self, data):
        profile = data.draw(small_profiles(max_m=3))
        universe = profile.universe
        extras = data.draw(
            st.lists(st.integers(0, universe.full_mask), min_size=0, max_size=4)
        )
        fam = BundleFamily.of(universe, extras)
        alloc, s = sigma_optimal_surplus(profile, fam)
        assert all(b in fam.bundles for b in alloc.buyer_bundles)
        assert alloc.surplus(profile) == s
        # independent recursion over family bundles
        assert s == brute_force_sigma_surplus(profile, fam.bundles)
        # identity: restricted optimum equals the optimum of the projections
        projected = project_profile(profile, fam)
        assert s == max_surplus(projected)

    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_remark_upper_bound_by_buyer_count(self, data):
        profile = data.draw(small_profiles(max_m=3, max_n=4))
        universe = profile.universe
        extras = data.draw(
            st.lists(st.integers(0, universe.full_mask), min_size=0, max_size=3)
        )
        fam = BundleFamily.of(universe, extras + [universe.full_mask])
        _, s_sigma = sigma_optimal_surplus(profile, fam)
        assert max_surplus(profile) <= profile.n * s_sigma

    def test_partition_route_matches_generic(self, u4):
        part = partition_from_sizes([2, 2], u4)
        fam = field_of_partition(part)
        prof = profile_of(u4, w(u4, "ab"), w(u4, "c"), w(u4, "ad", 2))
        _, s = sigma_optimal_surplus(prof, fam)
        assert s == brute_force_sigma_surplus(prof, fam.bundles)


class TestPayments:
    def test_disjoint_buyers_pay_nothing(self, u2):
        prof = profile_of(u2, w(u2, "a"), w(u2, "b"))
        assert clarke_payment(prof, 0) == 0
        assert clarke_payment(prof, 1) == 0

    def test_both_want_everything(self, u2):
        prof = profile_of(u2, w(u2, "ab"), w(u2, "ab"))
        out = run_vc(prof)
        winner = next(i for i, b in enumerate(out.allocation.buyer_bundles) if b)
        loser = 1 - winner
        assert out.payments[winner] == 1
        assert out.payments[loser] == 0

    def test_single_buyer_pays_nothing(self, u4):
        assert clarke_payment(profile_of(u4, w(u4, "abcd", 9)), 0) == 0


class TestRunVC:
    def test_truthful_outcome(self, u2):
        out = run_vc(profile_of(u2, w(u2, "a"), w(u2, "b")))
        assert (out.surplus, out.revenue) == (2, 0)

    def test_projection_reporting_onto_trivial_partition(self, u2):
        prof = profile_of(u2, w(u2, "a"), w(u2, "b"))
        fam = field_of_partition(partition_from_sizes([2], u2))
        out = run_vc(project_profile(prof, fam), true_profile=prof)
        assert (out.surplus, out.revenue) == (1, 1)

    def test_four_buyer_variant(self, u2):
        prof = profile_of(u2, w(u2, "a"), w(u2, "b"), w(u2, "a"), w(u2, "b"))
        out = run_vc(prof)
        assert (out.surplus, out.revenue) == (2, 2)
        fam = field_of_partition(partition_from_sizes([2], u2))
        out_pi = run_vc(project_profile(prof, fam), true_profile=prof)
        assert (out_pi.surplus, out_pi.revenue) == (1, 1)

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_truth_dominates_and_is_individually_rational(self, data):
        profile = data.draw(small_profiles(max_m=3))
        buyer = data.draw(st.integers(0, profile.n - 1))
        from conftest import dense_valuations, sparse_valuations

        if data.draw(st.booleans()):
            alt = data.draw(dense_valuations(profile.universe))
        else:
            alt = data.draw(sparse_valuations(profile.universe))
        ties = [TieBreak.canonical(), TieBreak.seller_favoring(), TieBreak.adversarial_to(buyer)]
        truthful_utilities = []
        for tie in ties:
            out_truth = run_vc(profile, tie, true_profile=profile)
            assert out_truth.utilities[buyer] >= 0  # participation constraint
            out_alt = run_vc(profile.replace(buyer, alt), tie, true_profile=profile)
            assert out_truth.utilities[buyer] >= out_alt.utilities[buyer]
            truthful_utilities.append(out_truth.utilities)
        # truthful utility does not depend on the tie-break rule
        assert truthful_utilities[0] == truthful_utilities[1] == truthful_utilities[2]

    @given(profile=small_profiles(max_m=3))
    @settings(max_examples=30, deadline=None)
    def test_truthful_accounting_identities(self, profile):
        out = run_vc(profile)
        assert out.revenue == sum(out.payments, Fraction(0))
        assert out.revenue <= out.surplus
        assert out.surplus == max_surplus(profile)
        assert all(p >= 0 for p in out.payments)

    def test_truth_dominates_on_six_goods(self):
        import random

        from vcbundle.equilibrium import random_monotone_profiles, random_monotone_valuation

        universe = GoodsUniverse.of_size(6)
        rng = random.Random(99)
        for profile in random_monotone_profiles(universe, n=3, count=8, seed=7):
            for buyer in range(profile.n):
                truth = run_vc(profile, true_profile=profile)
                assert truth.utilities[buyer] >= 0
                alt = random_monotone_valuation(universe, rng)
                lied = run_vc(profile.replace(buyer, alt), true_profile=profile)
                assert truth.utilities[buyer] >= lied.utilities[buyer]
