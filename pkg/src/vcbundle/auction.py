"""Pivot-payment auction engine.

Winner determination is exact and deterministic: a dense dynamic program over
(buyer prefix, remaining-goods subset) for table-backed profiles, and a
branch-and-bound packing search over atoms when every valuation is sparse.
Tie-breaking among surplus-optimal allocations is an explicit, deterministic
rule because the equilibrium analysis needs "there exists a mechanism that
picks this optimum" as an operation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Allocation,
    Bundle,
    BundleFamily,
    BudgetExceededError,
    GoodsUniverse,
    InternalInvariantError,
    InvalidInputError,
    Partition,
    Profile,
    Valuation,
    Value,
    popcount,
    DENSE_GOODS_CAP,
)
from .sigma import partition_of_family

SPARSE_ATOMS_CAP = 64

_ZERO = 0


@dataclass(frozen=True)
class TieBreak:
    """Deterministic selection among surplus-optimal allocations.

    * canonical: lexicographically smallest (buyer_1, ..., buyer_n) bundle
      tuple; surplus-irrelevant goods stay with the seller.
    * seller: first maximize the goods the seller retains, then canonical.
    * adversarial(i): first minimize the surplus of a reference profile
      (the analysis passes buyer i's true-valuation profile), then canonical.
    """

    kind: str = "canonical"
    buyer: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("canonical", "seller", "adversarial"):
            raise InvalidInputError(f"unknown tie-break kind {self.kind!r}")
        if (self.kind == "adversarial") != (self.buyer is not None):
            raise InvalidInputError("adversarial tie-break needs a buyer index")

    @staticmethod
    def canonical() -> "TieBreak":
        return TieBreak("canonical")

    @staticmethod
    def seller_favoring() -> "TieBreak":
        return TieBreak("seller")

    @staticmethod
    def adversarial_to(buyer: int) -> "TieBreak":
        return TieBreak("adversarial", buyer)


def _secondary_fns(profile: Profile, tie: TieBreak, reference: Profile | None):
    """Per-buyer secondary objective on bundles, maximized after surplus.

    None when the tie rule needs no secondary pass (canonical).
    """
    if tie.kind == "canonical":
        return None
    if tie.kind == "seller":
        return [lambda mask: -popcount(mask)] * profile.n
    if reference is None:
        raise InvalidInputError("adversarial tie-break needs a reference profile")
    if reference.n != profile.n or reference.universe != profile.universe:
        raise InvalidInputError("reference profile shape mismatch")
    return [(lambda v: (lambda mask: -v.value(mask)))(v) for v in reference.valuations]


def _dense_solve(profile: Profile, tie: TieBreak, reference: Profile | None):
    universe = profile.universe
    if universe.m > DENSE_GOODS_CAP:
        raise BudgetExceededError(f"dense winner determination capped at m <= {DENSE_GOODS_CAP}")
    full = universe.full_mask
    size = full + 1
    tables = [v.to_dense().table for v in profile.valuations]
    secondary = _secondary_fns(profile, tie, reference)
    n = profile.n

    # suffix[i][S]: best (surplus, secondary) achievable by buyers i.. on S.
    suffix: list[list[tuple[Value, object]]] = [[(_ZERO, 0)] * size]
    for i in range(n - 1, -1, -1):
        nxt = suffix[0]
        vals = tables[i]
        sec = None if secondary is None else secondary[i]
        sec_cache = None if sec is None else [sec(t) for t in range(size)]
        cur = []
        for s in range(size):
            if sec_cache is None:
                rest = nxt[s]
                best = (vals[0] + rest[0], 0)
                t = s
                while t:
                    rest = nxt[s ^ t]
                    cand = (vals[t] + rest[0], 0)
                    if cand > best:
                        best = cand
                    t = (t - 1) & s
            else:
                rest = nxt[s]
                best = (vals[0] + rest[0], sec_cache[0] + rest[1])
                t = s
                while t:
                    rest = nxt[s ^ t]
                    cand = (vals[t] + rest[0], sec_cache[t] + rest[1])
                    if cand > best:
                        best = cand
                    t = (t - 1) & s
            cur.append(best)
        suffix.insert(0, cur)

    # Reconstruct: per buyer in order, the smallest bundle preserving the optimum.
    masks = []
    s = full
    for i in range(n):
        target = suffix[i][s]
        vals = tables[i]
        sec = None if secondary is None else secondary[i]
        nxt = suffix[i + 1]
        chosen = None
        t = 0
        while True:  # submasks of s in ascending order
            rest = nxt[s ^ t]
            cand = (vals[t] + rest[0], 0 if sec is None else sec(t) + rest[1])
            if cand == target:
                chosen = t
                break
            if t == s:
                break
            t = (t - s) & s
        if chosen is None:
            raise InternalInvariantError("dense reconstruction lost the optimum")
        masks.append(chosen)
        s ^= chosen
    allocation = Allocation(universe, tuple(masks))
    return allocation, suffix[0][full][0]


def _atom_list(profile: Profile):
    atoms = []
    for i, v in enumerate(profile.valuations):
        for mask, weight in v.atoms:
            if mask and weight > 0:
                atoms.append((i, mask, weight))
    atoms.sort(key=lambda t: (t[0], t[1]))
    if len(atoms) > SPARSE_ATOMS_CAP:
        raise BudgetExceededError(f"sparse solver capped at {SPARSE_ATOMS_CAP} atoms")
    return atoms


def _sparse_solve(profile: Profile, tie: TieBreak, reference: Profile | None):
    atoms = _atom_list(profile)
    n = profile.n
    if tie.kind == "adversarial":
        if reference is None:
            raise InvalidInputError("adversarial tie-break needs a reference profile")
        if reference.n != n or reference.universe != profile.universe:
            raise InvalidInputError("reference profile shape mismatch")

    suffix = [_ZERO] * (len(atoms) + 1)
    for j in range(len(atoms) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + atoms[j][2]

    def key_of(masks: list[int]):
        if tie.kind == "canonical":
            return tuple(masks)
        if tie.kind == "seller":
            used = 0
            for b in masks:
                used |= b
            return (popcount(used), tuple(masks))
        ref_surplus = _ZERO
        for v, b in zip(reference.valuations, masks):
            ref_surplus += v.value(b)
        return (ref_surplus, tuple(masks))

    masks = [0] * n
    best_weight = _ZERO
    best_key = key_of(masks)
    best_masks = tuple(masks)

    def dfs(j: int, used: int, weight: Value) -> None:
        nonlocal best_weight, best_key, best_masks
        if weight + suffix[j] < best_weight:
            return
        if j == len(atoms):
            key = key_of(masks)
            if weight > best_weight or (weight == best_weight and key < best_key):
                best_weight = weight
                best_key = key
                best_masks = tuple(masks)
            return
        buyer, mask, w = atoms[j]
        if mask & used == 0:
            masks[buyer] |= mask
            dfs(j + 1, used | mask, weight + w)
            masks[buyer] ^= mask
        dfs(j + 1, used, weight)

    dfs(0, 0, _ZERO)
    return Allocation(profile.universe, best_masks), best_weight


def _sparse_value(profile: Profile) -> Value:
    atoms = _atom_list(profile)
    suffix = [_ZERO] * (len(atoms) + 1)
    for j in range(len(atoms) - 1, -1, -1):
        suffix[j] = suffix[j + 1] + atoms[j][2]
    best = _ZERO

    def dfs(j: int, used: int, weight: Value) -> None:
        nonlocal best
        if weight + suffix[j] <= best:
            return
        if j == len(atoms):
            best = weight
            return
        _, mask, w = atoms[j]
        if mask & used == 0:
            dfs(j + 1, used | mask, weight + w)
        dfs(j + 1, used, weight)

    dfs(0, 0, _ZERO)
    return best


def _dense_value(profile: Profile) -> Value:
    universe = profile.universe
    if universe.m > DENSE_GOODS_CAP:
        raise BudgetExceededError(f"dense winner determination capped at m <= {DENSE_GOODS_CAP}")
    size = universe.full_mask + 1
    cur = [_ZERO] * size
    for v in profile.valuations:
        vals = v.to_dense().table
        nxt = []
        for s in range(size):
            best = vals[0] + cur[s]  # buyer takes nothing
            t = s
            while t:
                cand = vals[t] + cur[s ^ t]
                if cand > best:
                    best = cand
                t = (t - 1) & s
            nxt.append(best)
        cur = nxt
    return cur[size - 1]


def max_surplus(profile: Profile) -> Value:
    """Optimal surplus over all allocations (value only, tie-break free)."""
    if profile.all_sparse:
        return _sparse_value(profile)
    return _dense_value(profile)


def optimal_allocation(
    profile: Profile,
    tie: TieBreak | None = None,
    reference: Profile | None = None,
) -> tuple[Allocation, Value]:
    """A surplus-maximizing allocation chosen by the tie rule, plus S_max."""
    tie = tie or TieBreak.canonical()
    if profile.all_sparse:
        return _sparse_solve(profile, tie, reference)
    return _dense_solve(profile, tie, reference)


def _expand_parts(meta_mask: int, parts: tuple[Bundle, ...]) -> Bundle:
    union = 0
    rest = meta_mask
    while rest:
        low = rest & -rest
        union |= parts[low.bit_length() - 1]
        rest ^= low
    return union


def _meta_valuation(v: Valuation, parts: tuple[Bundle, ...], meta_universe: GoodsUniverse) -> Valuation:
    table = tuple(v.value(_expand_parts(meta, parts)) for meta in range(1 << len(parts)))
    return Valuation(meta_universe, table=table)


def _partition_surplus(profile: Profile, partition: Partition) -> tuple[Allocation, Value]:
    parts = partition.parts
    if partition.k > DENSE_GOODS_CAP:
        raise BudgetExceededError(f"meta-good reduction capped at k <= {DENSE_GOODS_CAP} parts")
    meta_universe = GoodsUniverse.of_size(partition.k)
    meta_profile = Profile(
        meta_universe,
        tuple(_meta_valuation(v, parts, meta_universe) for v in profile.valuations),
    )
    meta_alloc, value = _dense_solve(meta_profile, TieBreak.canonical(), None)
    masks = tuple(_expand_parts(meta, parts) for meta in meta_alloc.buyer_bundles)
    return Allocation(profile.universe, masks), value


def sigma_optimal_surplus(profile: Profile, family: BundleFamily) -> tuple[Allocation, Value]:
    """Best surplus over allocations whose buyer bundles all lie in the family.

    The seller's remainder is unconstrained (padding with the empty bundle
    and free disposal make it surplus-irrelevant).  Partition-generated
    families reduce to a k-meta-good winner determination; other families run
    an exact assignment search over family bundles.
    """
    if family.universe != profile.universe:
        raise InvalidInputError("profile and family universes differ")
    partition = partition_of_family(family)
    if partition is not None:
        return _partition_surplus(profile, partition)

    bundles = [b for b in family.sorted_bundles if b]
    valuations = profile.valuations
    n = profile.n

    def candidates_for(v: Valuation) -> list[Bundle]:
        # A single-atom buyer never needs more than the inclusion-minimal
        # family supersets of the atom: any available superset contains an
        # available minimal one of no larger mask, so the optimum and the
        # canonical reconstruction are both unchanged.
        if v.atoms is None:
            return bundles
        live = [(a, w) for a, w in v.atoms if a and w]
        if not live:
            return []
        if len(live) > 1:
            return bundles
        atom = live[0][0]
        sups = [c for c in bundles if c & atom == atom]
        return [c for c in sups if not any(o is not c and o & c == o for o in sups)]

    per_buyer = [candidates_for(v) for v in valuations]
    value_cache: dict[tuple[int, Bundle], Value] = {}

    def val(i: int, mask: Bundle) -> Value:
        key = (i, mask)
        got = value_cache.get(key)
        if got is None:
            got = valuations[i].value(mask)
            value_cache[key] = got
        return got

    best_cache: dict[tuple[int, int], Value] = {}

    def solve(i: int, free: int) -> Value:
        if i == n:
            return _ZERO
        key = (i, free)
        got = best_cache.get(key)
        if got is not None:
            return got
        best = solve(i + 1, free)  # the empty bundle is always in the family
        for c in per_buyer[i]:
            if c & free == c:
                cand = val(i, c) + solve(i + 1, free ^ c)
                if cand > best:
                    best = cand
        best_cache[key] = best
        return best

    full = profile.universe.full_mask
    total = solve(0, full)
    masks = []
    free = full
    for i in range(n):
        target = solve(i, free)
        chosen = None
        if solve(i + 1, free) == target:
            chosen = 0  # canonical: the empty bundle comes first
        else:
            for c in per_buyer[i]:  # ascending mask order
                if c & free == c and val(i, c) + solve(i + 1, free ^ c) == target:
                    chosen = c
                    break
        if chosen is None:
            raise InternalInvariantError("family assignment reconstruction lost the optimum")
        masks.append(chosen)
        free ^= chosen
    return Allocation(profile.universe, tuple(masks)), total


@dataclass(frozen=True)
class AuctionOutcome:
    allocation: Allocation
    payments: tuple[Value, ...]
    surplus: Value
    revenue: Value
    utilities: tuple[Value, ...]

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.payments):
            raise InternalInvariantError("pivot payments must be nonnegative")
        if self.revenue != sum(self.payments, _ZERO):
            raise InternalInvariantError("revenue must equal total payments")


def _others_value(profile: Profile, i: int) -> Value:
    """g_i: the best surplus the other buyers could achieve among themselves."""
    rest = profile.drop(i)
    if rest is None:
        return _ZERO
    return max_surplus(rest)


def _payment_at(profile: Profile, i: int, allocation: Allocation) -> Value:
    others_at = _ZERO
    for j, (v, mask) in enumerate(zip(profile.valuations, allocation.buyer_bundles)):
        if j != i:
            others_at += v.value(mask)
    payment = _others_value(profile, i) - others_at
    if payment < 0:
        raise InternalInvariantError("pivot payment came out negative")
    return payment


def clarke_payment(
    profile: Profile,
    i: int,
    tie: TieBreak | None = None,
    reference: Profile | None = None,
) -> Value:
    """Externality payment of buyer i at the tie-chosen optimal allocation."""
    allocation, _ = optimal_allocation(profile, tie, reference)
    return _payment_at(profile, i, allocation)


def run_vc(
    reported: Profile,
    tie: TieBreak | None = None,
    true_profile: Profile | None = None,
) -> AuctionOutcome:
    """Full outcome of the mechanism on the reported profile.

    Utilities (and the surplus field) are measured against ``true_profile``
    when supplied, else against the reports themselves.
    """
    tie = tie or TieBreak.canonical()
    reference = None
    if tie.kind == "adversarial":
        reference = true_profile if true_profile is not None else reported
    allocation, reported_surplus = optimal_allocation(reported, tie, reference)
    payments = tuple(_payment_at(reported, i, allocation) for i in range(reported.n))
    measure = true_profile if true_profile is not None else reported
    if measure.n != reported.n or measure.universe != reported.universe:
        raise InvalidInputError("true profile shape mismatch")
    values = tuple(
        v.value(mask) for v, mask in zip(measure.valuations, allocation.buyer_bundles)
    )
    surplus = sum(values, _ZERO)
    revenue = sum(payments, _ZERO)
    utilities = tuple(val - pay for val, pay in zip(values, payments))
    if true_profile is None:
        if surplus != reported_surplus:
            raise InternalInvariantError("chosen allocation is not surplus-optimal")
        if revenue > surplus:
            raise InternalInvariantError("truthful revenue exceeded surplus")
    return AuctionOutcome(allocation, payments, surplus, revenue, utilities)
