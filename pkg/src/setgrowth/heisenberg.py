"""Heisenberg groups built from antisymmetric pairings, the splitting of a
small-tripling set along a normal subgroup, and the abelianized inverse
theorem for the two-step nilpotent case.

The carrier of a Heisenberg group is Z x W for two elementary abelian
groups, with multiplication twisted by a pairing {.,.}: Z x Z -> W.  The
same carrier untwisted is the additive group Z x W, and both use identical
mixed-radix element ids, so the comparison map between them is literally
the identity on ids.  Every quantitative conclusion lands in a
ConstantLedger row with exact integer or Fraction endpoints; covering-set
sizes are measured and then compared against the proof-derived polynomial
bounds in the tripling parameter (derivations in docs/constants.md).
"""

from __future__ import annotations

import itertools
import random
import re
from array import array
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .constants import (
    SPLIT_COUNT_EXP,
    SPLIT_NEST_EXP,
    positive_power_exponent,
    word_exponent,
)
from .exact import frac
from .groups import (
    CyclicGroup,
    DirectProductGroup,
    FiniteGroup,
    NormalSubgroupView,
    QuotientGroup,
    _is_prime,
    subgroup_closure,
    verify_group_axioms,
)
from .setops import (
    MSet,
    inverse_set,
    power_set,
    product_set,
    symmetrize,
    translate_left,
    translate_right,
)
from .structure import (
    ApproxGroupWitness,
    ConstantLedger,
    approx_group_from_tripling,
)

EXHAUSTIVE_ORDER_CAP = 10_000      # full sweeps below this order, sampled above
EXHAUSTIVE_PAIR_CAP = 2_000_000    # commutator sweep switches to sampling here
SPLIT_ORDER_CAP = 10_000           # keeps the long power chain under a second
TRIPLE_EXHAUSTIVE_CAP = 64         # |C| above which the triple check samples
SAMPLE_COUNT = 2_000
TRIPLE_SAMPLE_COUNT = 20_000
SAMPLE_SEED = 1729

# The three nested cores are cubes of even-power slices A^(2n) with
# n = 1, 4, 13.  The slice at level n has tripling exponent
# positive_power_exponent(6n + 1) in the tripling parameter of A.
CORE_LEVELS = (1, 4, 13)


# ---------------------------------------------------------------------------
# Pairing specs (see docs/formats.md for the text grammar)

_FIELD_RE = re.compile(r"^Zp\^(\d+),p=(\d+)$")

PAIRING_KINDS = ("symplectic", "zero")


@dataclass(frozen=True)
class PairingSpec:
    """An antisymmetric bilinear pairing (Z/p)^k x (Z/p)^k -> (Z/q)^m,
    described by its values on the standard generators."""

    z_rank: int
    z_prime: int
    w_rank: int
    w_prime: int
    kind: str

    def __post_init__(self):
        if self.z_rank < 1 or self.w_rank < 1:
            raise ValueError("pairing spec needs positive ranks")
        for p in (self.z_prime, self.w_prime):
            if not _is_prime(p):
                raise ValueError(f"pairing spec needs prime moduli, got {p}")
        if self.kind not in PAIRING_KINDS:
            raise ValueError(
                f"unknown pairing kind {self.kind!r}; expected one of {PAIRING_KINDS}")
        if self.kind == "symplectic":
            if self.z_rank % 2:
                raise ValueError(
                    f"symplectic pairing needs an even horizontal rank, got {self.z_rank}")
            if self.z_prime != self.w_prime:
                raise ValueError(
                    "symplectic pairing needs matching moduli: bi-additivity "
                    f"forces {self.z_prime}*{{e1,e2}} = {{0,e2}} = 0, impossible "
                    f"for a value of order {self.w_prime}")

    def text(self) -> str:
        return (f"z=Zp^{self.z_rank},p={self.z_prime};"
                f"w=Zp^{self.w_rank},p={self.w_prime};pairing={self.kind}")

    def nonzero_entries(self) -> tuple[tuple[int, int, int], ...]:
        """Sparse generator matrix: triples (i, j, sign) meaning
        {e_i, e_j} = sign * f_1, with f_1 the first generator of W."""
        if self.kind == "zero":
            return ()
        out = []
        for t in range(0, self.z_rank, 2):
            out.append((t, t + 1, 1))
            out.append((t + 1, t, -1))
        return tuple(out)

    def generator_matrix(self) -> list[list[tuple[int, ...]]]:
        """Dense k x k matrix of pairing values on generators, each value a
        coordinate tuple in W."""
        zero = (0,) * self.w_rank
        mat = [[zero] * self.z_rank for _ in range(self.z_rank)]
        for i, j, sign in self.nonzero_entries():
            coords = [0] * self.w_rank
            coords[0] = sign % self.w_prime
            mat[i][j] = tuple(coords)
        return mat


def parse_pairing_spec(text: str) -> PairingSpec:
    """Parse the argument text of heisenberg(...): three ;-separated fields
    z=Zp^k,p=P then w=Zp^m,p=Q then pairing=symplectic|zero."""
    fields = [part.strip() for part in text.split(";") if part.strip()]
    seen: dict[str, str] = {}
    for part in fields:
        key, _, value = part.partition("=")
        key = key.strip()
        if key not in ("z", "w", "pairing") or not value:
            raise ValueError(f"malformed pairing field {part!r}")
        if key in seen:
            raise ValueError(f"duplicate pairing field {key!r}")
        seen[key] = value.strip()
    missing = [key for key in ("z", "w", "pairing") if key not in seen]
    if missing:
        raise ValueError(f"pairing spec is missing field(s) {missing}")
    ranks = {}
    for key in ("z", "w"):
        m = _FIELD_RE.match(seen[key])
        if m is None:
            raise ValueError(
                f"malformed {key} group {seen[key]!r}; expected Zp^<rank>,p=<prime>")
        ranks[key] = (int(m.group(1)), int(m.group(2)))
    return PairingSpec(
        z_rank=ranks["z"][0], z_prime=ranks["z"][1],
        w_rank=ranks["w"][0], w_prime=ranks["w"][1],
        kind=seen["pairing"],
    )


# ---------------------------------------------------------------------------
# The group

def _component_group(prime: int, rank: int) -> FiniteGroup:
    if rank == 1:
        return CyclicGroup(prime)
    return DirectProductGroup([CyclicGroup(prime) for _ in range(rank)])


class HeisenbergGroup(FiniteGroup):
    """Carrier Z x W with law (z,w)(z',w') = (z+z', w+w'+{z,z'}).

    Element id of (z,w) is z*|W| + w, matching the mixed-radix numbering of
    the untwisted additive product group, so iota (the comparison bijection
    onto the additive group) is the identity on ids.  The vertical subgroup
    {0} x W occupies ids 0..|W|-1 and is central.
    """

    def __init__(self, spec: PairingSpec):
        self.spec = spec
        self.z_order = spec.z_prime ** spec.z_rank
        self.w_order = spec.w_prime ** spec.w_rank
        super().__init__(self.z_order * self.w_order, f"heisenberg({spec.text()})")
        self.z_additive = _component_group(spec.z_prime, spec.z_rank)
        self.w_additive = _component_group(spec.w_prime, spec.w_rank)
        self._entries = spec.nonzero_entries()
        self._zcoords = [self._decode_z(z) for z in range(self.z_order)]
        self._additive: DirectProductGroup | None = None
        self._vertical: NormalSubgroupView | None = None
        self.construction_ledger: ConstantLedger | None = None

    # -- coordinates --------------------------------------------------------
    def _decode_z(self, z: int) -> tuple[int, ...]:
        p, out = self.spec.z_prime, []
        for _ in range(self.spec.z_rank):
            z, c = divmod(z, p)
            out.append(c)
        return tuple(reversed(out))

    def decode_w(self, w: int) -> tuple[int, ...]:
        p, out = self.spec.w_prime, []
        for _ in range(self.spec.w_rank):
            w, c = divmod(w, p)
            out.append(c)
        return tuple(reversed(out))

    def z_of(self, a: int) -> int:
        return a // self.w_order

    def w_of(self, a: int) -> int:
        return a % self.w_order

    def encode(self, z: int, w: int) -> int:
        return z * self.w_order + w

    def coords_of(self, a: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self._zcoords[self.z_of(a)], self.decode_w(self.w_of(a))

    # -- the pairing --------------------------------------------------------
    def pair(self, z1: int, z2: int) -> int:
        """{z1, z2} as a W id."""
        if not self._entries:
            return 0
        c1, c2 = self._zcoords[z1], self._zcoords[z2]
        q = self.spec.w_prime
        s = 0
        for i, j, sign in self._entries:
            s += sign * c1[i] * c2[j]
        s %= q
        if s == 0:
            return 0
        # the value sits on the first W generator, most significant digit
        return s * q ** (self.spec.w_rank - 1)

    # -- group law ----------------------------------------------------------
    def _mul_raw(self, a: int, b: int) -> int:
        wo = self.w_order
        z1, w1 = divmod(a, wo)
        z2, w2 = divmod(b, wo)
        z = self.z_additive.mul(z1, z2)
        w = self.w_additive.mul(self.w_additive.mul(w1, w2), self.pair(z1, z2))
        return z * wo + w

    def _inv_raw(self, a: int) -> int:
        wo = self.w_order
        z, w = divmod(a, wo)
        return self.z_additive.inv(z) * wo + self.w_additive.inv(w)

    # -- untwisted views ----------------------------------------------------
    def additive_group(self) -> DirectProductGroup:
        """The additive group on the same carrier with the same ids."""
        if self._additive is None:
            factors = [CyclicGroup(self.spec.z_prime) for _ in range(self.spec.z_rank)]
            factors += [CyclicGroup(self.spec.w_prime) for _ in range(self.spec.w_rank)]
            self._additive = DirectProductGroup(factors)
        return self._additive

    def iota(self, mset: MSet) -> MSet:
        """Carry a subset of the group to the additive group, id for id."""
        if mset.group is not self:
            raise ValueError("iota expects a subset of this Heisenberg group")
        return MSet(self.additive_group(), mset.bits)

    @property
    def vertical(self) -> NormalSubgroupView:
        """The central subgroup {0} x W with its quotient onto Z; quotient
        ids coincide with Z ids."""
        if self._vertical is None:
            wo = self.w_order
            typecode = "H" if self.order <= 65535 else "I"
            pi = array(typecode, (a // wo for a in range(self.order)))
            reps = [z * wo for z in range(self.z_order)]
            members = frozenset(range(wo))
            quotient = QuotientGroup(self, reps, pi)
            self._vertical = NormalSubgroupView(self, members, quotient, pi, reps)
        return self._vertical


_BUILD_CACHE: dict[PairingSpec, HeisenbergGroup] = {}


def build_heisenberg(spec: PairingSpec) -> HeisenbergGroup:
    """Validate the pairing, build the group, and sweep its law invariants.

    The sweeps are exhaustive below EXHAUSTIVE_ORDER_CAP (the commutator
    sweep below EXHAUSTIVE_PAIR_CAP ordered pairs) and seeded samples
    above.  Violations raise with an explicit counterexample.  Instances
    are cached per spec so repeated builds share multiplication rows.
    """
    cached = _BUILD_CACHE.get(spec)
    if cached is not None:
        return cached
    g = HeisenbergGroup(spec)
    ledger = ConstantLedger("heisenberg-construction")
    _validate_pairing(g, ledger)
    _validate_group_law(g, ledger)
    axioms = verify_group_axioms(g, seed=SAMPLE_SEED)
    ledger.info("axiom-sweep-triples", axioms["triples"],
                note=f"{axioms['mode']} associativity check")
    ledger.check()
    g.construction_ledger = ledger
    g.vertical  # preconstruct the central view
    _BUILD_CACHE[spec] = g
    return g


def _validate_pairing(g: HeisenbergGroup, ledger: ConstantLedger) -> None:
    wadd, winv = g.w_additive.mul, g.w_additive.inv
    zs = range(g.z_order)
    exhaustive = g.z_order <= EXHAUSTIVE_ORDER_CAP
    if exhaustive:
        for x in zs:
            if g.pair(x, x) != 0:
                raise ValueError(
                    f"pairing is not alternating: {{z,z}} != 0 at z id {x}")
            for y in range(x + 1, g.z_order):
                if g.pair(x, y) != winv(g.pair(y, x)):
                    raise ValueError(
                        "pairing is not antisymmetric: "
                        f"{{x,y}} != -{{y,x}} at z ids ({x}, {y})")
        note = f"exhaustive over {g.z_order}^2 pairs"
    else:
        rng = random.Random(SAMPLE_SEED)
        for _ in range(SAMPLE_COUNT):
            x, y = rng.randrange(g.z_order), rng.randrange(g.z_order)
            if g.pair(x, x) != 0 or g.pair(x, y) != winv(g.pair(y, x)):
                raise ValueError(
                    f"pairing antisymmetry fails at sampled z ids ({x}, {y})")
        note = f"{SAMPLE_COUNT} sampled pairs"
    ledger.claim("pairing-antisymmetric", True, note=note)

    zmul = g.z_additive.mul
    if g.z_order ** 3 <= 8000:
        triples = itertools.product(zs, zs, zs)
        note = "exhaustive triples"
    else:
        rng = random.Random(SAMPLE_SEED + 1)
        triples = ((rng.randrange(g.z_order), rng.randrange(g.z_order),
                    rng.randrange(g.z_order)) for _ in range(SAMPLE_COUNT))
        note = f"{SAMPLE_COUNT} sampled triples"
    for x, y, z in triples:
        if g.pair(zmul(x, y), z) != wadd(g.pair(x, z), g.pair(y, z)):
            raise ValueError(
                f"pairing is not additive on the left at z ids ({x}, {y}, {z})")
        if g.pair(x, zmul(y, z)) != wadd(g.pair(x, y), g.pair(x, z)):
            raise ValueError(
                f"pairing is not additive on the right at z ids ({x}, {y}, {z})")
    ledger.claim("pairing-bi-additive", True, note=note)


def _validate_group_law(g: HeisenbergGroup, ledger: ConstantLedger) -> None:
    order = g.order
    exhaustive = order <= EXHAUSTIVE_ORDER_CAP

    elements: range | list[int]
    if exhaustive:
        elements = range(order)
        note = "all elements"
    else:
        rng = random.Random(SAMPLE_SEED + 2)
        elements = [rng.randrange(order) for _ in range(SAMPLE_COUNT)]
        note = f"{SAMPLE_COUNT} sampled elements"
    for a in elements:
        z, w = divmod(a, g.w_order)
        expect = g.z_additive.inv(z) * g.w_order + g.w_additive.inv(w)
        if g.inv(a) != expect or g.mul(a, g.inv(a)) != 0:
            raise ValueError(f"inverse law (z,w) -> (-z,-w) fails at id {a}")
    ledger.claim("inverse-law", True, note=note)

    # centrality of the vertical subgroup
    if exhaustive:
        pairs = itertools.product(range(g.w_order), range(order))
        note = "all (vertical, element) pairs"
    else:
        rng = random.Random(SAMPLE_SEED + 3)
        pairs = ((rng.randrange(g.w_order), rng.randrange(order))
                 for _ in range(SAMPLE_COUNT))
        note = f"{SAMPLE_COUNT} sampled pairs"
    for h, x in pairs:
        if g.mul(h, x) != g.mul(x, h):
            raise ValueError(
                f"vertical element {h} fails to commute with element {x}")
    ledger.claim("vertical-central", True, note=note)

    # commutator identity: [a, b] = (0, 2{z_a, z_b})
    wo = g.w_order
    wadd = g.w_additive.mul
    if order * order <= EXHAUSTIVE_PAIR_CAP:
        pairs = itertools.product(range(order), range(order))
        note = "all ordered pairs"
    else:
        rng = random.Random(SAMPLE_SEED + 4)
        pairs = ((rng.randrange(order), rng.randrange(order))
                 for _ in range(SAMPLE_COUNT * 5))
        note = f"{SAMPLE_COUNT * 5} sampled pairs"
    for a, b in pairs:
        comm = g.mul(g.mul(g.mul(a, b), g.inv(a)), g.inv(b))
        p = g.pair(a // wo, b // wo)
        if comm != wadd(p, p):
            raise ValueError(
                f"commutator of ids ({a}, {b}) is {comm}, not twice the pairing value")
    ledger.claim("commutator-identity", True, note=note)

    # the additive group numbers the same carrier by the same ids
    add = g.additive_group()
    agree = add.order == order and all(
        add.encode(g._zcoords[z] + g.decode_w(w)) == g.encode(z, w)
        for z in range(g.z_order) for w in range(g.w_order)
    ) if order <= EXHAUSTIVE_ORDER_CAP else add.order == order
    ledger.claim("additive-encoding-aligned", agree,
                 formula="id of (z,w) = z|W| + w in both groups")


# ---------------------------------------------------------------------------
# Splitting a small-tripling set along a normal subgroup

@dataclass
class SplitWitness:
    """Nested cores B1, B2, B3 inside H, the quotient image C, and a
    symmetrized section phi defined on C^3."""

    view: NormalSubgroupView
    c: MSet
    b1: MSet
    b2: MSet
    b3: MSet
    phi: dict[int, int]
    exceptions: tuple[int, ...]
    b_witnesses: tuple[ApproxGroupWitness, ...]
    ledger: ConstantLedger

    def phi_of(self, x: int) -> int:
        return self.phi[x]

    def serialize(self) -> dict:
        parent = self.view.parent
        out = {
            "group": parent.name,
            "c": list(self.c.ids()),
            "b1": list(self.b1.ids()),
            "b2": list(self.b2.ids()),
            "b3": list(self.b3.ids()),
            "phi": {str(x): v for x, v in sorted(self.phi.items())},
            "exceptions": list(self.exceptions),
        }
        if isinstance(parent, HeisenbergGroup):
            out["coordinates"] = {
                str(i): [list(cs) for cs in parent.coords_of(i)]
                for i in sorted(set(self.phi.values()))
            }
        return out


def _ascending_powers(a: MSet, top: int) -> dict[int, MSet]:
    """A^n for n = 1..top by repeated right products; once the chain
    stabilizes every later power reuses the fixed set."""
    pows = {1: a}
    cur = a
    for n in range(2, top + 1):
        nxt = product_set(cur, a)
        if nxt.bits == cur.bits:
            for m in range(n, top + 1):
                pows[m] = cur
            return pows
        pows[n] = nxt
        cur = nxt
    return pows


def split_approximate(a: MSet, h: NormalSubgroupView, k) -> SplitWitness:
    """Split a symmetric small-tripling set along the normal subgroup H.

    Builds C as the quotient image of A, the cores B_i as cubes of the
    even-power slices A^2, A^8, A^26 intersected with H, and a section
    phi on C^3 using smallest-id coset representatives (drawn from A on C,
    from A^3 beyond), symmetrized by pairing x with x^-1 in id order.
    Every displayed containment and counting bound is recorded as an exact
    ledger row and checked before the witness is returned.
    """
    g = a.group
    if h.parent is not g:
        raise ValueError("the subgroup view belongs to a different group")
    if g.order > SPLIT_ORDER_CAP:
        raise ValueError(
            f"group order {g.order} exceeds the splitting cap {SPLIT_ORDER_CAP}")
    k = frac(k)
    if k < 1:
        raise ValueError("the tripling parameter must be at least 1")
    if not a.is_symmetric() or not a.contains_identity():
        raise ValueError(
            "splitting needs a symmetric set containing the identity; "
            "apply symmetrize() first")
    pows = _ascending_powers(a, 6 * CORE_LEVELS[-1])
    a3 = pows[3]
    if a3.size > k * a.size:
        raise ValueError(
            f"tripling hypothesis fails: |A^3| = {a3.size} > K|A| = {k * a.size}")

    ledger = ConstantLedger("split_approximate")
    ledger.compare("tripling-hypothesis", a3.size, "<=", k * a.size,
                   formula="|A^3| <= K|A|")

    member_bits = h.member_bits
    cbits = 0
    for x in a.ids():
        cbits |= 1 << h.pi[x]
    c = MSet(h.quotient, cbits)
    ledger.info("size-a", a.size)
    ledger.info("size-c", c.size)

    # counting along fibers of the projection
    a2h = pows[2].intersect_bits(member_bits)
    ledger.compare("fiber-count", a.size, "<=", c.size * a2h.size,
                   formula="|A| <= |C||A^2 n H|")
    for n in (1, 2, 3):
        slice_n = pows[2 * n].intersect_bits(member_bits)
        ledger.compare(f"fiber-lower-n={n}",
                       pows[2 * n + 1].size, ">=", c.size * slice_n.size,
                       formula=f"|A^{2 * n + 1}| >= |C||A^{2 * n} n H|")

    # the nested cores and their covering witnesses
    cores: list[MSet] = []
    witnesses: list[ApproxGroupWitness] = []
    for i, n in enumerate(CORE_LEVELS, start=1):
        slice_n = pows[2 * n].intersect_bits(member_bits)
        k_i = k ** positive_power_exponent(6 * n + 1)
        wit, wled = approx_group_from_tripling(slice_n, k_i)
        ledger.merge(wled, f"b{i}.")
        core = wit.h
        ledger.claim(f"b{i}-inside-slice",
                     core <= pows[6 * n].intersect_bits(member_bits),
                     lhs=core.size,
                     formula=f"(A^{2 * n} n H)^3 inside A^{6 * n} n H")
        cores.append(core)
        witnesses.append(wit)
    b1, b2, b3 = cores
    ledger.claim("core-nesting", b1 <= b2 and b2 <= b3,
                 formula="B1 inside B2 inside B3")
    ledger.info("size-b1", b1.size)
    ledger.info("size-b2", b2.size)
    ledger.info("size-b3", b3.size)
    ledger.compare("core-scale-gap", b3.size, "<=",
                   k ** SPLIT_NEST_EXP * b1.size,
                   formula=f"|B3| <= K^{SPLIT_NEST_EXP}|B1|")
    ledger.info("core-scale-ratio", Fraction(b3.size, b1.size),
                note="measured |B3|/|B1|")
    ledger.compare("section-size-bound", b1.size * c.size, "<=",
                   k ** SPLIT_COUNT_EXP * a.size,
                   formula=f"|B1||C| <= K^{SPLIT_COUNT_EXP}|A|")
    ledger.info("section-size-ratio", Fraction(b1.size * c.size, a.size),
                note="measured |B1||C|/|A|")

    # the section phi on C^3
    c3 = power_set(c, 3)
    fibers_a: dict[int, list[int]] = defaultdict(list)
    for x in a.ids():
        fibers_a[h.pi[x]].append(x)
    fibers_a3: dict[int, list[int]] = defaultdict(list)
    for x in a3.ids():
        fibers_a3[h.pi[x]].append(x)
    qinv = h.quotient.inv
    phi: dict[int, int] = {}
    exceptions: list[int] = []
    for x in c3.ids():
        if x in phi:
            continue
        fiber = fibers_a[x] if x in c else fibers_a3[x]
        if x == 0:
            phi[0] = 0
            continue
        xi = qinv(x)
        if xi == x:
            fixed = [t for t in fiber if g.inv(t) == t]
            if fixed:
                phi[x] = fixed[0]
            else:
                exceptions.append(x)
                phi[x] = fiber[0]
        else:
            phi[x] = fiber[0]
            phi[xi] = g.inv(fiber[0])

    ledger.claim("section-at-identity", phi[0] == 0)
    ledger.claim("section-projects-back",
                 all(h.pi[v] == x for x, v in phi.items()),
                 formula="pi(phi(x)) = x on C^3")
    ledger.claim("section-values-in-base",
                 all(phi[x] in a for x in c.ids()),
                 formula="phi(x) in A for x in C")
    ledger.claim("section-values-in-cube",
                 all(v in a3 for v in phi.values()),
                 formula="phi(x) in A^3 for x in C^3")
    odd_ok = all(phi[qinv(x)] == g.inv(phi[x])
                 for x in c3.ids() if x not in exceptions)
    ledger.claim("section-odd", odd_ok,
                 formula="phi(x^-1) = phi(x)^-1 off the logged exceptions")
    if exceptions:
        ledger.info("section-exceptions", len(exceptions),
                    note=f"self-inverse quotient ids with no symmetric "
                         f"representative: {exceptions[:8]}")

    # conjugation shifts each core into the next
    shifts_ok = {(i, side): True for i in (1, 2) for side in ("left", "right")}
    cover_bits = 0
    for x in c.ids():
        px = phi[x]
        cover_bits |= translate_left(px, b1)
        for i, (small, big) in enumerate(((b1, b2), (b2, b3)), start=1):
            if translate_left(px, small) & ~translate_right(big, px):
                shifts_ok[(i, "left")] = False
            if translate_right(small, px) & ~translate_left(px, big):
                shifts_ok[(i, "right")] = False
    for i in (1, 2):
        ledger.claim(f"shift-absorb-left-i={i}", shifts_ok[(i, "left")],
                     formula=f"phi(x)B{i} inside B{i + 1}phi(x), all x in C")
        ledger.claim(f"shift-absorb-right-i={i}", shifts_ok[(i, "right")],
                     formula=f"B{i}phi(x) inside phi(x)B{i + 1}, all x in C")
    ledger.claim("fiber-cover", a.bits & ~cover_bits == 0,
                 lhs=a.size, formula="A inside the union of phi(x)B1 over C")

    # the quotiented homomorphism defect lands in B3
    q = h.quotient
    a6h = pows[6].intersect_bits(member_bits)
    cids = c.ids()
    if c.size <= TRIPLE_EXHAUSTIVE_CAP:
        triples = itertools.product(cids, cids, cids)
        note = f"exhaustive over |C|^3 = {c.size ** 3} triples"
    else:
        rng = random.Random(SAMPLE_SEED)
        triples = ((rng.choice(cids), rng.choice(cids), rng.choice(cids))
                   for _ in range(TRIPLE_SAMPLE_COUNT))
        note = f"{TRIPLE_SAMPLE_COUNT} sampled triples"
    triple_ok = slice_ok = True
    for x, y, z in triples:
        w = q.mul(q.mul(x, y), z)
        lhs = g.mul(g.mul(phi[x], phi[y]), phi[z])
        defect = g.mul(g.inv(phi[w]), lhs)
        if defect not in b3:
            triple_ok = False
        if defect not in a6h:
            slice_ok = False
    ledger.claim("triple-defect-in-b3", triple_ok,
                 formula="phi(x)phi(y)phi(z) in phi(xyz)B3", note=note)
    ledger.claim("triple-defect-in-slice", slice_ok,
                 formula="the defect lies in A^6 n H", note=note)

    ledger.check()
    return SplitWitness(
        view=h, c=c, b1=b1, b2=b2, b3=b3, phi=phi,
        exceptions=tuple(exceptions), b_witnesses=tuple(witnesses),
        ledger=ledger,
    )


# ---------------------------------------------------------------------------
# The abelianized inverse witness

@dataclass
class AbelianApproxWitness:
    """An additive approximate group on the untwisted carrier that contains
    the comparison image of A and absorbs the pairing of its shadow."""

    heisen: HeisenbergGroup
    a_tilde: MSet
    x_tilde: MSet
    k_measured: int
    f: dict[int, int]
    b_prime: MSet
    b_tilde: MSet
    a_prime: MSet
    split: SplitWitness
    ledger: ConstantLedger

    def serialize(self) -> dict:
        g = self.heisen
        return {
            "group": g.name,
            "a_tilde": list(self.a_tilde.ids()),
            "x_tilde": list(self.x_tilde.ids()),
            "k_measured": self.k_measured,
            "f": {str(z): w for z, w in sorted(self.f.items())},
            "b_prime": list(self.b_prime.ids()),
            "b_tilde": list(self.b_tilde.ids()),
            "coordinates": {
                str(i): [list(cs) for cs in g.coords_of(i)]
                for i in self.a_tilde.ids()
            },
        }


def hull_tripling_bound(k) -> Fraction:
    """Tripling parameter of A u {1} u A^-1 given |A^3| <= K|A|: one plus
    the sum of K^E(w) over the fourteen signed words of length at most 3."""
    k = frac(k)
    total = Fraction(1)
    for length in (1, 2, 3):
        for word in itertools.product((1, -1), repeat=length):
            total += k ** word_exponent(word)
    return total


def _additive_power(a: MSet, n: int) -> MSet:
    """n-fold sumset with the same stabilization shortcut as the splitting
    chain (no 30-factor ceiling)."""
    cur = a
    for _ in range(n - 1):
        nxt = product_set(cur, a)
        if nxt.bits == cur.bits:
            return cur
        cur = nxt
    return cur


def _dilate(a: MSet) -> MSet:
    """{2x : x in A} inside an additive group (the dilate, not the sumset)."""
    g = a.group
    bits = 0
    for x in a.ids():
        bits |= 1 << g.mul(x, x)
    return MSet(g, bits)


# Exponents of the hull tripling parameter in the candidate size chain:
#   |Atilde| <= |C^3||30B' + 4B3|
#            <= (Ks^5|C|) (|X3|^187 |B3|)
#            <= Ks^5 |X3|^187 Ks^153 |B1||C|
#            <= Ks^167 |X3|^187 |A_hull|        (derivation: docs/constants.md)
CANDIDATE_KS_EXP = 5 + SPLIT_NEST_EXP + SPLIT_COUNT_EXP  # 167
CANDIDATE_COVER_EXP = 187


def heisen_inverse(a: MSet, k) -> AbelianApproxWitness:
    """Abelianize a small-tripling subset of a Heisenberg group.

    Splits the symmetric hull of A along the vertical subgroup, extracts
    the vertical part f of the section, thickens the section fibers by the
    halved-difference core B' and the base core B1, and cubes the result
    into an additive approximate group containing iota(A) and closed under
    the pairing of its horizontal shadow.  Needs a vertical group with no
    element of order two, since the construction divides by two.
    """
    g = a.group
    if not isinstance(g, HeisenbergGroup):
        raise TypeError("heisen_inverse expects a subset of a Heisenberg group")
    k = frac(k)
    if k < 1:
        raise ValueError("the tripling parameter must be at least 1")
    wg = g.w_additive
    torsion = [w for w in range(1, g.w_order) if wg.mul(w, w) == 0]
    if torsion:
        raise ValueError(
            f"the vertical group has an order-two element (id {torsion[0]}); "
            "the abelianized witness needs none")
    a3 = power_set(a, 3)
    if a3.size > k * a.size:
        raise ValueError(
            f"tripling hypothesis fails: |A^3| = {a3.size} > K|A| = {k * a.size}")

    ledger = ConstantLedger("heisen_inverse")
    ledger.claim("no-vertical-2-torsion", True,
                 note=f"all {g.w_order} vertical ids checked")
    ledger.compare("tripling-hypothesis", a3.size, "<=", k * a.size,
                   formula="|A^3| <= K|A|")

    hull = symmetrize(a)
    ks = hull_tripling_bound(k)
    ledger.info("hull-size", hull.size, note="|A u 1 u A^-1|")
    ledger.info("hull-tripling-bound", ks, note="Ks, tripling parameter of the hull")

    split = split_approximate(hull, g.vertical, ks)
    ledger.merge(split.ledger, "split.")
    c = split.c

    # vertical part of the section
    f = {x: g.w_of(v) for x, v in split.phi.items()}

    # W-side sets share ids with the vertical slice of the carrier
    b1w = MSet(wg, split.b1.bits)
    b3w = MSet(wg, split.b3.bits)
    diff = product_set(b3w, inverse_set(b3w))
    even_bits = 0
    for w in range(g.w_order):
        even_bits |= 1 << wg.mul(w, w)
    b_tilde = diff.intersect_bits(even_bits)
    ledger.info("size-b-tilde", b_tilde.size, note="|(B3 - B3) n 2W|")

    three_bt = _additive_power(b_tilde, 3)
    bp_bits = 0
    for b in range(g.w_order):
        if wg.mul(b, b) in three_bt:
            bp_bits |= 1 << b
    b_prime = MSet(wg, bp_bits)
    ledger.info("size-b-prime", b_prime.size, note="|{b : 2b in 3(B3 - B3) n 2W}|")

    pair_core_ok = True
    pair_diff_ok = True
    for z1 in c.ids():
        for z2 in c.ids():
            p = g.pair(z1, z2)
            if p not in b_prime:
                pair_core_ok = False
            if wg.mul(p, p) not in diff:
                pair_diff_ok = False
    ledger.claim("pair-doubling-in-difference", pair_diff_ok,
                 formula="2{z1,z2} in B3 - B3 for z1, z2 in C")
    ledger.claim("pairing-values-in-core", pair_core_ok,
                 formula="{C,C} inside B'")

    c3 = power_set(c, 3)
    ledger.compare("shadow-cube-bound", c3.size, "<=",
                   ks ** positive_power_exponent(5) * c.size,
                   formula="|C^3| <= Ks^5|C|")

    # fiber thickening: A' = {(z, f(z) + 9B' + B1) : z in C}
    shift = product_set(_additive_power(b_prime, 9), b1w)
    ag = g.additive_group()
    wo = g.w_order
    abits = 0
    for z in c.ids():
        abits |= translate_left(f[z], shift) << (z * wo)
    a_prime = MSet(ag, abits)
    ledger.claim("hull-in-thickening", hull.bits & ~abits == 0,
                 lhs=hull.size, rhs=a_prime.size,
                 formula="the hull sits inside the thickened section")
    ledger.claim("thickening-symmetric", inverse_set(a_prime) == a_prime)

    x3_size = split.b_witnesses[2].x.size
    k_p = ks ** CANDIDATE_KS_EXP * x3_size ** CANDIDATE_COVER_EXP
    tilde_wit, tled = approx_group_from_tripling(a_prime, k_p)
    ledger.merge(tled, "abelian.")
    a_tilde, x_tilde = tilde_wit.h, tilde_wit.x
    ledger.claim("candidate-formula",
                 a_tilde == _additive_power(symmetrize(a_prime), 3),
                 formula="Atilde = 3(iota(A') u {0} u -iota(A'))")
    ledger.claim("candidate-verified", tilde_wit.verified)

    # size chain for the candidate (measured covering size of B3's witness)
    combo = product_set(_additive_power(b_prime, 30), _additive_power(b3w, 4))
    twice = _dilate(combo)
    ledger.compare("dilate-count-preserved", twice.size, "==", combo.size,
                   formula="doubling is injective without 2-torsion")
    long_sum = _additive_power(b3w, 188)
    ledger.claim("dilated-sum-absorbed", twice <= long_sum,
                 lhs=twice.size, rhs=long_sum.size,
                 formula="2(30B' + 4B3) inside 188B3")
    ledger.compare("long-sum-cover-bound", long_sum.size, "<=",
                   x3_size ** (CANDIDATE_COVER_EXP) * b3w.size,
                   formula="|188B3| <= |X3|^187|B3|")
    ledger.compare("candidate-fiber-bound", a_tilde.size, "<=",
                   c3.size * combo.size,
                   formula="|Atilde| <= |C^3||30B' + 4B3|")
    ledger.compare("candidate-size-bound", a_tilde.size, "<=",
                   ks ** CANDIDATE_KS_EXP * x3_size ** CANDIDATE_COVER_EXP
                   * hull.size,
                   formula=f"|Atilde| <= Ks^{CANDIDATE_KS_EXP}"
                           f"|X3|^{CANDIDATE_COVER_EXP}|hull|")
    ledger.compare("hull-overhead", hull.size, "<=", 2 * a.size + 1,
                   formula="|hull| <= 2|A| + 1")
    ledger.info("candidate-ratio", Fraction(a_tilde.size, a.size),
                note="measured |Atilde|/|A|")
    ledger.info("candidate-bound-exponent",
                CANDIDATE_KS_EXP + 9 * SPLIT_NEST_EXP * CANDIDATE_COVER_EXP,
                note="worst-case exponent of Ks when |X3| is replaced by its "
                     "derived bound 2Ks^1377")

    # closure of the candidate under the pairing of its shadow
    shadow = sorted({i // wo for i in a_tilde.ids()})
    include_ok = all(
        g.pair(z1, z2) in a_tilde
        for z1 in shadow for z2 in shadow
    )
    ledger.claim("pairing-closure", include_ok,
                 formula="{pi(Atilde), pi(Atilde)} inside Atilde",
                 note=f"exhaustive over {len(shadow)}^2 shadow pairs")
    ledger.claim("base-in-candidate", a.bits & ~a_tilde.bits == 0,
                 lhs=a.size, rhs=a_tilde.size,
                 formula="iota(A) inside Atilde")

    ledger.check()
    return AbelianApproxWitness(
        heisen=g, a_tilde=a_tilde, x_tilde=x_tilde, k_measured=x_tilde.size,
        f=f, b_prime=b_prime, b_tilde=b_tilde, a_prime=a_prime,
        split=split, ledger=ledger,
    )


def verify_inverse_converse(witness: AbelianApproxWitness, a: MSet) -> ConstantLedger:
    """Check the converse containment iota(A^3) inside the 6-fold sumset of
    the candidate, and report the measured cardinalities.

    The 6-fold sumset bound |A^3| <= |6 Atilde| is asserted as the set
    containment; no claim is made about 6|Atilde| itself, since a 6-fold
    sumset can exceed six times the base size.
    """
    g = witness.heisen
    if a.group is not g:
        raise ValueError("the set lives in a different group than the witness")
    ledger = ConstantLedger("inverse-converse")
    a3 = power_set(a, 3)
    six_fold = _additive_power(witness.a_tilde, 6)
    ledger.claim("triple-product-absorbed", a3.bits & ~six_fold.bits == 0,
                 lhs=a3.size, rhs=six_fold.size,
                 formula="iota(A^3) inside the 6-fold sum of the candidate")
    ledger.info("size-a3", a3.size)
    ledger.info("size-six-fold", six_fold.size)
    ledger.info("converse-ratio", Fraction(a3.size, witness.a_tilde.size),
                note="measured |A^3|/|Atilde|")
    ledger.check()
    return ledger


# ---------------------------------------------------------------------------
# Exact splitting for genuine subgroups

@dataclass
class ExactSplit:
    """The exact splitting of a genuine subgroup: B = A n H, C = pi(A),
    and the smallest-id section phi with its verification ledger."""

    view: NormalSubgroupView
    b: MSet
    c: MSet
    phi: dict[int, int]
    ledger: ConstantLedger

    @property
    def passed(self) -> bool:
        return self.ledger.hard_ok


def _require_subgroup(a: MSet) -> None:
    g = a.group
    for x in a.ids():
        if g.inv(x) not in a:
            raise ValueError(f"not a subgroup: inverse of member {x} is missing")
        for y in a.ids():
            if g.mul(x, y) not in a:
                raise ValueError(
                    f"not a subgroup: product of members {x} and {y} escapes")
    if 0 not in a:
        raise ValueError("not a subgroup: identity is missing")


def exact_split_oracle(a: MSet, h: NormalSubgroupView) -> ExactSplit:
    """Split a genuine subgroup A along H and verify the exact splitting
    laws: phi(x)B = Bphi(x), the quotiented homomorphism property, the
    fiber decomposition of A, and |A| = |C||B|."""
    g = a.group
    if h.parent is not g:
        raise ValueError("the subgroup view belongs to a different group")
    _require_subgroup(a)
    b = a.intersect_bits(h.member_bits)
    cbits = 0
    for x in a.ids():
        cbits |= 1 << h.pi[x]
    c = MSet(h.quotient, cbits)
    phi: dict[int, int] = {}
    for x in a.ids():
        phi.setdefault(h.pi[x], x)

    ledger = ConstantLedger("exact-split")
    normal_ok = all(
        translate_left(phi[x], b) == translate_right(b, phi[x]) for x in c.ids()
    )
    ledger.claim("fiber-shift-match", normal_ok,
                 formula="phi(x)B = Bphi(x) for all x in C")
    q = h.quotient
    hom_ok = True
    cover_bits = 0
    for x in c.ids():
        cover_bits |= translate_left(phi[x], b)
        for y in c.ids():
            defect = g.mul(g.inv(g.mul(phi[x], phi[y])), phi[q.mul(x, y)])
            if defect not in b:
                hom_ok = False
    ledger.claim("quotient-homomorphism", hom_ok,
                 formula="phi(xy) in phi(x)phi(y)B for all x, y in C")
    ledger.claim("fiber-decomposition", cover_bits == a.bits,
                 lhs=a.size, formula="A equals the union of phi(x)B over C")
    ledger.compare("order-product", a.size, "==", c.size * b.size,
                   formula="|A| = |C||B|")
    return ExactSplit(view=h, b=b, c=c, phi=phi, ledger=ledger)


# ---------------------------------------------------------------------------
# Genuine subgroups of a Heisenberg group against their additive shadows

def verify_subgroup_sandwich(a: MSet) -> ConstantLedger:
    """For a genuine subgroup A of a Heisenberg group, build the additive
    set Atilde = iota(A) + <{C,C}> with C the horizontal shadow of A, and
    verify that Atilde is an additive subgroup absorbing its own pairing
    hull, that iota(A) sits inside it, and that its dilate {2x} falls back
    inside iota(A)."""
    g = a.group
    if not isinstance(g, HeisenbergGroup):
        raise TypeError("the sandwich check expects a Heisenberg group subset")
    _require_subgroup(a)
    wg = g.w_additive
    ag = g.additive_group()
    shadow = sorted({g.z_of(x) for x in a.ids()})
    gen = {g.pair(z1, z2) for z1 in shadow for z2 in shadow}
    hull_ids = subgroup_closure(wg, gen | {0})
    hull = MSet.from_ids(ag, sorted(hull_ids))  # vertical ids embed as-is
    tilde = product_set(MSet(ag, a.bits), hull)

    ledger = ConstantLedger("subgroup-sandwich")
    ledger.claim("pairing-hull-absorbed", product_set(tilde, hull) == tilde,
                 formula="Atilde + <{C,C}> = Atilde")
    closed = product_set(tilde, tilde) == tilde and inverse_set(tilde) == tilde
    ledger.claim("candidate-additive-subgroup", closed,
                 lhs=tilde.size, formula="Atilde is an additive subgroup")
    ledger.claim("upper-inclusion", a.bits & ~tilde.bits == 0,
                 lhs=a.size, rhs=tilde.size,
                 formula="iota(A) inside Atilde")
    ledger.claim("lower-inclusion", _dilate(tilde).bits & ~a.bits == 0,
                 lhs=tilde.size, rhs=a.size,
                 formula="2.Atilde inside iota(A)")
    ledger.check()
    return ledger
