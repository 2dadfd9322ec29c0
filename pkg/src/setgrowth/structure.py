"""Covering lemma, approximate-group witnesses, and the small-doubling
classification pipeline.

Every quantitative conclusion is recorded as a ledger row holding the exact
integers (or rationals) on both sides of the inequality, so a suite run can
re-check each bound with no floating-point slack.  Hard rows are theorem
conclusions: a failing hard row means the implementation is wrong, and
``ConstantLedger.check`` raises.  Soft rows record hypothesis measurements,
and info rows carry sizes and ratios for the report.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .constants import (
    CLASSIFY_A_COVER_CONST,
    CLASSIFY_A_COVER_EXP,
    CLASSIFY_B_COVER_CONST,
    CLASSIFY_B_COVER_EXP,
    CLASSIFY_H_CONST,
    CLASSIFY_H_EXP,
    CLASSIFY_S_TRIPLING_CONST,
    CLASSIFY_S_TRIPLING_EXP,
    LOCAL_TRIPLING_CONST,
    LOCAL_TRIPLING_EXP,
    chain_exponent,
    cover_poly_value,
    positive_power_exponent,
    word_exponent,
)
from .exact import fmt_number, frac
from .setops import (
    MSet,
    inverse_set,
    power_set,
    product_set,
    symmetrize,
    translate_left,
    translate_right,
)

_RELS = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
    "==": lambda a, b: a == b,
}


@dataclass(frozen=True)
class LedgerRow:
    name: str
    kind: str  # "hard" | "soft" | "info"
    lhs: object
    rel: str
    rhs: object
    holds: bool | None
    formula: str = ""
    note: str = ""

    def line(self) -> str:
        if self.holds is None:
            return f"[info] {self.name}: {fmt_number(self.lhs)} {self.note}".rstrip()
        verdict = "ok" if self.holds else "FAIL"
        if self.rel == "holds":
            text = f"[{self.kind}] {self.name}: {verdict}"
            if self.lhs is not None:
                text += f" [{fmt_number(self.lhs)} vs {fmt_number(self.rhs)}]"
        else:
            text = (
                f"[{self.kind}] {self.name}: {fmt_number(self.lhs)} {self.rel} "
                f"{fmt_number(self.rhs)} {verdict}"
            )
        if self.formula:
            text += f" ({self.formula})"
        return text


class LedgerError(RuntimeError):
    """A hard ledger row failed; carries the failing rows."""

    def __init__(self, title: str, failures: list[LedgerRow]):
        self.failures = failures
        detail = "; ".join(row.line() for row in failures[:4])
        super().__init__(f"{title}: {len(failures)} hard row(s) failed: {detail}")


class ConstantLedger:
    """Ordered list of exact inequality rows for one operation run."""

    def __init__(self, title: str):
        self.title = title
        self.rows: list[LedgerRow] = []

    def compare(self, name, lhs, rel, rhs, kind="hard", formula="", note="") -> bool:
        holds = _RELS[rel](lhs, rhs)
        self.rows.append(LedgerRow(name, kind, lhs, rel, rhs, holds, formula, note))
        return holds

    def claim(self, name, holds, kind="hard", lhs=None, rhs=None, formula="", note="") -> bool:
        self.rows.append(
            LedgerRow(name, kind, lhs, "holds", rhs, bool(holds), formula, note))
        return bool(holds)

    def info(self, name, value, note="") -> None:
        self.rows.append(LedgerRow(name, "info", value, "note", None, None, "", note))

    def merge(self, other: "ConstantLedger", prefix: str) -> None:
        for row in other.rows:
            self.rows.append(
                LedgerRow(prefix + row.name, row.kind, row.lhs, row.rel, row.rhs,
                          row.holds, row.formula, row.note)
            )

    def failures(self) -> list[LedgerRow]:
        return [r for r in self.rows if r.kind == "hard" and r.holds is False]

    @property
    def hard_ok(self) -> bool:
        return not self.failures()

    def check(self) -> "ConstantLedger":
        bad = self.failures()
        if bad:
            raise LedgerError(self.title, bad)
        return self

    def lines(self) -> list[str]:
        return [f"# {self.title}"] + [row.line() for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["inequality", "kind", "lhs", "rel", "rhs", "holds",
                         "bound_formula", "measured_ratio"])
        for row in self.rows:
            ratio = ""
            if (row.holds is not None and isinstance(row.lhs, (int, Fraction))
                    and isinstance(row.rhs, (int, Fraction)) and row.rhs):
                ratio = fmt_number(float(Fraction(row.lhs) / Fraction(row.rhs)))
            writer.writerow([
                row.name,
                row.kind,
                fmt_number(row.lhs) if row.lhs is not None else "",
                row.rel,
                fmt_number(row.rhs) if row.rhs is not None else "",
                "" if row.holds is None else str(row.holds).lower(),
                row.formula,
                ratio,
            ])
        return buf.getvalue()


def ruzsa_cover(a: MSet, b: MSet, side: str = "left") -> MSet:
    """Greedy maximal family of disjoint translates of `a` rooted in `b`.

    side="left": translates a·x for x in b, scanned in ascending id order.
    The returned X ⊆ b satisfies b ⊆ a⁻¹·a·X and |X|·|a| ≤ |a·b|.
    side="right" mirrors: translates x·a, b ⊆ X·a·a⁻¹, |X|·|a| ≤ |b·a|.
    """
    if a.group is not b.group:
        raise ValueError("cover arguments live in different groups")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    g = a.group
    chosen: list[int] = []
    used = 0
    for x in b.ids():
        t = translate_right(a, x) if side == "left" else translate_left(x, a)
        if used & t == 0:
            chosen.append(x)
            used |= t
    return MSet.from_ids(g, chosen)


@dataclass(frozen=True)
class ApproxGroupWitness:
    """A pair (H, X) with the covering constant K and per-clause results."""

    h: MSet
    x: MSet
    k: Fraction
    checks: tuple[tuple[str, bool], ...]
    violations: tuple[str, ...]

    @property
    def group(self):
        return self.h.group

    @property
    def verified(self) -> bool:
        return all(ok for _, ok in self.checks)

    def serialize_ids(self) -> dict:
        return {"h": list(self.h.ids()), "x": list(self.x.ids()),
                "k": str(self.k), "verified": self.verified}


def verify_approx_group(h: MSet, x: MSet, k) -> ApproxGroupWitness:
    """Exact check of the covering-pair clauses; violations are results."""
    k = frac(k)
    if h.group is not x.group:
        raise ValueError("witness sets live in different groups")
    checks: list[tuple[str, bool]] = []
    violations: list[str] = []

    def clause(name: str, ok: bool, detail: str) -> None:
        checks.append((name, ok))
        if not ok:
            violations.append(f"{name}: {detail}")

    clause("h-symmetric", h.is_symmetric(), "H != H^-1")
    clause("h-contains-identity", h.contains_identity(), "identity not in H")
    clause("x-symmetric", x.is_symmetric(), "X != X^-1")
    h2 = product_set(h, h)
    missing = [i for i in x.ids() if i not in h2]
    clause("x-inside-h2", not missing,
           f"element {missing[0] if missing else '?'} of X outside H·H")
    clause("x-small", x.size <= k, f"|X| = {x.size} > K = {k}")
    xh = product_set(x, h)
    missing = [i for i in h2.ids() if i not in xh]
    clause("h2-in-xh", not missing,
           f"product element {missing[0] if missing else '?'} outside X·H")
    hx = product_set(h, x)
    missing = [i for i in h2.ids() if i not in hx]
    clause("h2-in-hx", not missing,
           f"product element {missing[0] if missing else '?'} outside H·X")
    return ApproxGroupWitness(h, x, k, tuple(checks), tuple(violations))


def _witness_power_rows(wit: ApproxGroupWitness, ledger: ConstantLedger) -> None:
    """H^n ⊆ X^(n-1)·H for n = 3, 4, asserted by direct computation."""
    h, x = wit.h, wit.x
    hn = product_set(h, h)
    xpow = x
    for n in (3, 4):
        hn = product_set(hn, h)
        xpow = product_set(xpow, x)
        cover = product_set(xpow, h)
        ledger.claim(f"power-n={n}", hn <= cover,
                     lhs=hn.size, rhs=cover.size,
                     formula=f"H^{n} subset X^{n - 1}·H")


def approx_group_from_tripling(a: MSet, k) -> tuple[ApproxGroupWitness, ConstantLedger]:
    """Build the covering pair (H, X) with H = (A ∪ {1} ∪ A⁻¹)³ from the
    tripling hypothesis |A³| ≤ K|A|."""
    k = frac(k)
    ledger = ConstantLedger("approx_group_from_tripling")
    a3 = power_set(a, 3)
    ok = ledger.compare("tripling-hypothesis", a3.size, "<=", k * a.size,
                        formula="|A^3| <= K|A|")
    if not ok:
        raise ValueError(
            f"tripling hypothesis fails: |A^3|/|A| = {a3.size}/{a.size} > K = {k}")
    h0 = symmetrize(a)
    h = power_set(h0, 3)
    h2 = power_set(h0, 6)
    h7 = product_set(h2, h0)
    ledger.info("size-a", a.size)
    ledger.info("size-h0", h0.size)
    ledger.info("size-h", h.size)
    ledger.info("size-h2", h2.size)

    symmetric_input = h0 == a
    if symmetric_input:
        h7_bound = k ** positive_power_exponent(7) * a.size
        h7_formula = "K^9|A|, symmetric input"
    else:
        h7_bound = cover_poly_value(k) * a.size
        h7_formula = "P7(K)|A|"
    ledger.compare("h0-seventh-power", h7.size, "<=", h7_bound, formula=h7_formula)

    y = ruzsa_cover(h0, h2, side="left")
    ledger.compare("cover-count", y.size * h0.size, "<=", h7.size,
                   formula="|Y||H0| <= |H0·H0^6|")
    y_bound = h7_bound / h0.size
    ledger.compare("cover-size", y.size, "<=", y_bound,
                   formula="|Y| <= bound(|H0^7|)/|H0|")
    x = y.union(inverse_set(y))
    ledger.compare("x-size", x.size, "<=", 2 * y_bound, formula="|X| <= 2|Y|-bound")
    ledger.info("size-x", x.size)

    wit = verify_approx_group(h, x, Fraction(x.size))
    for name, ok in wit.checks:
        ledger.claim(f"witness-{name}", ok)
    ledger.claim("a-in-h", a <= h, lhs=a.size, rhs=h.size, formula="A subset H")
    _witness_power_rows(wit, ledger)
    ledger.compare("tripling-from-witness", a3.size, "<=", x.size ** 2 * h.size,
                   formula="|A^3| <= |X|^2|H|")
    ledger.check()
    return wit, ledger


_SIGN_CHAR = {1: "+", -1: "-"}


def tripling_chain(a: MSet, k, n: int = 6) -> ConstantLedger:
    """Verify |A^(ε1)···A^(εm)| ≤ K^E(w)|A| for every sign pattern of
    length m ≤ n, plus the per-length and overall chain exponents."""
    k = frac(k)
    if not 1 <= n <= 6:
        raise ValueError("chain length must be between 1 and 6")
    ledger = ConstantLedger("tripling_chain")
    a3 = power_set(a, 3)
    ok = ledger.compare("tripling-hypothesis", a3.size, "<=", k * a.size,
                        formula="|A^3| <= K|A|")
    if not ok:
        raise ValueError(
            f"tripling hypothesis fails: |A^3|/|A| = {a3.size}/{a.size} > K = {k}")
    a_inv = inverse_set(a)
    level: dict[tuple, MSet] = {(1,): a, (-1,): a_inv}
    overall_max = 0
    for length in range(1, n + 1):
        length_max = 0
        for word in sorted(level, key=lambda w: [0 if s == 1 else 1 for s in w]):
            current = level[word]
            text = "".join(_SIGN_CHAR[s] for s in word)
            ledger.compare(f"pattern:{text}", current.size, "<=",
                           k ** word_exponent(word) * a.size,
                           formula=f"K^{word_exponent(word)}|A|")
            length_max = max(length_max, current.size)
        ledger.compare(f"length-{length}-max", length_max, "<=",
                       k ** chain_exponent(length) * a.size,
                       formula=f"K^c({length})|A|, c({length})={chain_exponent(length)}")
        overall_max = max(overall_max, length_max)
        if length < n:
            level = {
                word + (sign,): product_set(current, a if sign == 1 else a_inv)
                for word, current in level.items()
                for sign in (1, -1)
            }
    ledger.compare("chain-max", overall_max, "<=",
                   k ** chain_exponent(n) * a.size,
                   formula=f"K^c({n})|A|, c({n})={chain_exponent(n)}")
    return ledger.check()


@dataclass(frozen=True)
class SymmetricCore:
    """High-overlap translate set S of a small-doubling set A."""

    s: MSet
    source: MSet
    k: Fraction
    threshold: Fraction  # membership needs |A ∩ A·x| strictly above this

    @property
    def group(self):
        return self.s.group


def symmetric_core(a: MSet, k, n_max: int = 3) -> tuple[SymmetricCore, ConstantLedger]:
    """S := {x : 2K|A ∩ A·x| > |A|} under the hypothesis |A·A⁻¹| ≤ K|A|."""
    k = frac(k)
    ledger = ConstantLedger("symmetric_core")
    a_inv = inverse_set(a)
    aa_inv = product_set(a, a_inv)
    ok = ledger.compare("doubling-hypothesis", aa_inv.size, "<=", k * a.size,
                        formula="|A·A^-1| <= K|A|")
    if not ok:
        raise ValueError(
            f"doubling hypothesis fails: |A·A^-1| = {aa_inv.size} > K|A| = {k * a.size}")
    p, q = k.numerator, k.denominator
    candidates = product_set(a_inv, a)
    members = [
        x for x in candidates.ids()
        if 2 * p * (a.bits & translate_right(a, x)).bit_count() > q * a.size
    ]
    s = MSet.from_ids(a.group, members)
    core = SymmetricCore(s, a, k, Fraction(a.size) / (2 * k))

    ledger.claim("core-identity", s.contains_identity(), formula="1 in S")
    ledger.claim("core-symmetric", s.is_symmetric(), formula="S = S^-1")
    ledger.claim("core-support", s <= candidates, formula="S subset A^-1·A")
    ledger.compare("core-size", 2 * p * s.size, ">=", q * a.size,
                   formula="2K|S| >= |A|, cleared")
    left = a
    for n in range(1, n_max + 1):
        left = product_set(left, s)
        grown = product_set(left, a_inv)
        ledger.compare(f"growth-n={n}", grown.size, "<=",
                       2**n * k ** (2 * n + 1) * a.size,
                       formula=f"2^{n} K^{2 * n + 1}|A|")
    return core, ledger.check()


def classify_small_doubling(a: MSet, b: MSet, k) -> tuple[ApproxGroupWitness, MSet, ConstantLedger]:
    """From |A·B|² ≤ K²|A||B|, produce (H, X) with A ⊆ X·H and B ⊆ H·X.

    The pipeline follows the constructive proof: symmetric core S of A at
    parameter K², the covering pair on H := S³, then one cover of A and one
    of B⁻¹ by translates of H, glued through the witness covering set.
    """
    if a.group is not b.group:
        raise ValueError("sets live in different groups")
    k = frac(k)
    ledger = ConstantLedger("classify_small_doubling")
    ab = product_set(a, b)
    ok = ledger.compare("doubling-hypothesis", ab.size**2, "<=",
                        k**2 * a.size * b.size, formula="|A·B|^2 <= K^2|A||B|")
    if not ok:
        raise ValueError(
            f"doubling hypothesis fails: |A·B|^2 = {ab.size**2} > "
            f"K^2|A||B| = {k**2 * a.size * b.size}")
    ledger.compare("k-at-least-one", Fraction(1), "<=", k, formula="K >= 1")

    a_inv = inverse_set(a)
    aa_inv = product_set(a, a_inv)
    ledger.compare("a-self-doubling", aa_inv.size, "<=", k**2 * a.size,
                   formula="|A·A^-1| <= K^2|A|")

    core, core_ledger = symmetric_core(a, k**2, n_max=3)
    ledger.merge(core_ledger, "core.")
    s = core.s
    h = power_set(s, 3)
    ledger.compare("h-size", h.size, "<=",
                   CLASSIFY_H_CONST * k**CLASSIFY_H_EXP * a.size,
                   formula=f"{CLASSIFY_H_CONST} K^{CLASSIFY_H_EXP}|A|")
    ledger.compare("s-tripling", h.size, "<=",
                   CLASSIFY_S_TRIPLING_CONST * k**CLASSIFY_S_TRIPLING_EXP * s.size,
                   formula=f"{CLASSIFY_S_TRIPLING_CONST} K^{CLASSIFY_S_TRIPLING_EXP}|S|")

    wit, wit_ledger = approx_group_from_tripling(
        s, CLASSIFY_S_TRIPLING_CONST * k**CLASSIFY_S_TRIPLING_EXP)
    ledger.merge(wit_ledger, "witness.")
    ledger.claim("witness-h-match", wit.h == h, lhs=wit.h.size, rhs=h.size,
                 formula="(S u {1} u S^-1)^3 = S^3")

    ah = product_set(a, h)
    ledger.compare("a-h-product", ah.size, "<=",
                   CLASSIFY_H_CONST * k**CLASSIFY_H_EXP * a.size,
                   formula=f"{CLASSIFY_H_CONST} K^{CLASSIFY_H_EXP}|A|")
    z0 = ruzsa_cover(h, a, side="right")
    ledger.compare("a-cover-count", z0.size * h.size, "<=", ah.size,
                   formula="|Z0||H| <= |A·H|")
    ledger.compare("a-cover-size", z0.size, "<=",
                   CLASSIFY_A_COVER_CONST * k**CLASSIFY_A_COVER_EXP,
                   formula=f"{CLASSIFY_A_COVER_CONST} K^{CLASSIFY_A_COVER_EXP}")

    b_inv = inverse_set(b)
    b_inv_h = product_set(b_inv, h)
    w0 = ruzsa_cover(h, b_inv, side="right")
    ledger.compare("b-cover-count", w0.size * h.size, "<=", b_inv_h.size,
                   formula="|W0||H| <= |B^-1·H|")
    ledger.compare("b-cover-size", w0.size, "<=",
                   CLASSIFY_B_COVER_CONST * k**CLASSIFY_B_COVER_EXP,
                   formula=f"{CLASSIFY_B_COVER_CONST} K^{CLASSIFY_B_COVER_EXP}")

    z = product_set(z0, wit.x)
    w = product_set(w0, wit.x)
    x_final = z.union(inverse_set(w))
    xh = product_set(x_final, h)
    hx = product_set(h, x_final)
    ledger.claim("a-contained", a <= xh, lhs=a.size, rhs=xh.size,
                 formula="A subset X·H")
    ledger.claim("b-contained", b <= hx, lhs=b.size, rhs=hx.size,
                 formula="B subset H·X")
    ledger.compare("x-final-size", x_final.size, "<=",
                   2 * CLASSIFY_B_COVER_CONST * k**CLASSIFY_B_COVER_EXP * wit.x.size,
                   formula=f"32 K^{CLASSIFY_B_COVER_EXP}|X_wit|")
    ledger.info("x-final-measured", x_final.size)
    ledger.check()
    return wit, x_final, ledger


def local_tripling_check(a: MSet, k) -> ConstantLedger:
    """From sup over a of |A·a·A| ≤ K|A| and |A²| ≤ K|A|, certify the
    explicit tripling bound |A³| ≤ C·K^c·|A|."""
    k = frac(k)
    g = a.group
    ledger = ConstantLedger("local_tripling_check")
    sup_size = 0
    for mid in a.ids():
        mid_a = MSet(g, translate_right(a, mid))
        sup_size = max(sup_size, product_set(a, mid_a).size)
    ok = ledger.compare("local-product-hypothesis", sup_size, "<=", k * a.size,
                        kind="soft", formula="sup_a |A·a·A| <= K|A|")
    if not ok:
        raise ValueError(
            f"local product hypothesis fails: sup |A·a·A|/|A| = {sup_size}/{a.size} "
            f"> K = {k}")
    a2 = product_set(a, a)
    ok = ledger.compare("square-hypothesis", a2.size, "<=", k * a.size,
                        kind="soft", formula="|A^2| <= K|A|")
    if not ok:
        raise ValueError(
            f"square hypothesis fails: |A^2|/|A| = {a2.size}/{a.size} > K = {k}")

    _, _, classify_ledger = classify_small_doubling(a, a, k)
    ledger.merge(classify_ledger, "classify.")

    a3 = power_set(a, 3)
    ledger.compare("local-tripling", a3.size, "<=",
                   LOCAL_TRIPLING_CONST * k**LOCAL_TRIPLING_EXP * a.size,
                   formula=f"{LOCAL_TRIPLING_CONST} K^{LOCAL_TRIPLING_EXP}|A|")
    ledger.info("tripling-ratio", Fraction(a3.size, a.size))
    return ledger.check()
