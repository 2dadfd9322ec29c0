"""Suite runner and report emission: the reproducibility surface.

A SuiteConfig names jobs; run_suite executes them and collects typed rows;
emit_report writes byte-stable CSV and JSON.  Hard rows are exact paper
inequalities and fail the exit code; soft rows are hypothesis checks that
gate a pipeline; info rows are measured constants and never fail anything.
Every randomized choice draws from a Random seeded by (job seed, group,
purpose) strings, so identical configs give identical reports.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import heisenberg as hb
from .bsg import bsg_extract, energy_equivalences, weak_bsg
from .entropy import (
    MetricCloud,
    QuaternionGroup,
    RegionSpec,
    TorusGroup,
    WordMetricGroup,
    approx_energy,
    entropy_tripling_check,
    metric_profile_check,
    separated_set,
)
from .exact import ceil_isqrt, frac
from .families import (
    SetFamilySpec,
    generate_set,
    measured_difference_ratio,
    measured_tripling,
)
from .groups import (
    FiniteGroup,
    NotNormalError,
    construct_group,
    quotient_map,
    subgroup_closure,
)
from .setops import (
    MSet,
    energy,
    energy_quadruple_count,
    inverse_set,
    power_set,
    product_set,
    ruzsa_distance,
    ruzsa_triangle_holds,
    symmetrize,
    translate_left,
)
from .structure import (
    ConstantLedger,
    LedgerError,
    approx_group_from_tripling,
    local_tripling_check,
    ruzsa_cover,
    symmetric_core,
    tripling_chain,
)

SUITE_NAMES = (
    "ruzsa-axioms",
    "tripling",
    "covering",
    "musprop",
    "energy-identities",
    "weak-bsg",
    "bsg",
    "energy-equivalence",
    "entropy",
    "heisenberg",
    "splitting",
)

DEFAULT_SEED = 1729


# ---------------------------------------------------------------------------
# Report model

def render_value(v) -> str:
    """Deterministic cell rendering: integers and Fractions verbatim,
    floats at 12 significant digits, booleans lowercase, None empty."""
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, Fraction)):
        return str(v)
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


@dataclass(frozen=True)
class ReportRow:
    module: str
    operation: str
    seq: int
    name: str
    kind: str       # hard | soft | info
    lhs: str
    rel: str
    rhs: str
    passed: bool
    note: str

    @property
    def status(self) -> str:
        if self.kind == "info":
            return "info"
        return "pass" if self.passed else "fail"

    def sort_key(self):
        return (self.module, self.operation, self.seq, self.name)


CSV_HEADER = ("module", "operation", "seq", "name", "kind",
              "lhs", "rel", "rhs", "status", "note")


@dataclass
class Report:
    """Typed check rows; a hard failure anywhere fails the process."""

    title: str
    rows: list[ReportRow] = field(default_factory=list)
    _seq: dict = field(default_factory=dict)

    def add(self, module: str, operation: str, name: str, kind: str = "hard",
            lhs=None, rel="", rhs=None, passed=True, note="") -> ReportRow:
        key = (module, operation)
        seq = self._seq.get(key, 0)
        self._seq[key] = seq + 1
        row = ReportRow(module, operation, seq, name, kind,
                        render_value(lhs), rel, render_value(rhs),
                        bool(passed), note)
        self.rows.append(row)
        return row

    def merge_ledger(self, module: str, operation: str,
                     ledger: ConstantLedger) -> None:
        for row in ledger.rows:
            note = row.formula
            if row.note:
                note = f"{note}; {row.note}" if note else row.note
            passed = True if row.holds is None else row.holds
            rel = "" if row.rel in ("note", "holds") else (row.rel or "")
            self.add(module, operation, row.name, row.kind,
                     row.lhs, rel, row.rhs, passed, note)

    def merge_failure(self, module: str, operation: str,
                      exc: LedgerError) -> None:
        """Record a raised hard failure as failing rows (honest red)."""
        for row in exc.failures:
            self.add(module, operation, row.name, "hard",
                     row.lhs, row.rel or "", row.rhs, False,
                     row.formula or row.note)

    def sorted_rows(self) -> list[ReportRow]:
        return sorted(self.rows, key=ReportRow.sort_key)

    def hard_failures(self) -> list[ReportRow]:
        return [r for r in self.rows if r.kind == "hard" and not r.passed]

    @property
    def passed(self) -> bool:
        return not self.hard_failures()

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> dict:
        counts = {"total": len(self.rows), "hard": 0, "soft": 0, "info": 0,
                  "hard_failures": 0, "soft_failures": 0}
        for r in self.rows:
            counts[r.kind] += 1
            if not r.passed and r.kind in ("hard", "soft"):
                counts[f"{r.kind}_failures"] += 1
        return counts


def emit_report(report: Report, format: str = "csv",
                out: str | None = None) -> list[str]:
    """Write the report in the named format ("csv", "json", or "both").

    Output is byte-stable for identical reports: rows sorted by
    (module, operation, seq, name), values rendered by render_value.
    Returns the list of written paths.
    """
    formats = ("csv", "json") if format == "both" else (format,)
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown report format {fmt!r}")
    out_dir = out or "."
    os.makedirs(out_dir, exist_ok=True)
    slug = "".join(c if c.isalnum() or c == "-" else "-"
                   for c in report.title.lower()) or "report"
    rows = report.sorted_rows()
    paths = []
    for fmt in formats:
        path = os.path.join(out_dir, f"{slug}.{fmt}")
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow((r.module, r.operation, r.seq, r.name, r.kind,
                                 r.lhs, r.rel, r.rhs, r.status, r.note))
            payload = buf.getvalue()
        else:
            obj = {
                "title": report.title,
                "summary": report.summary(),
                "rows": [
                    {"module": r.module, "operation": r.operation,
                     "seq": r.seq, "name": r.name, "kind": r.kind,
                     "lhs": r.lhs, "rel": r.rel, "rhs": r.rhs,
                     "status": r.status, "note": r.note}
                    for r in rows
                ],
            }
            payload = json.dumps(obj, indent=2, sort_keys=True) + "\n"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Config

@dataclass(frozen=True)
class SuiteJob:
    name: str
    groups: tuple[str, ...] = ()
    families: tuple[str, ...] = ()
    k: Fraction | None = None
    epsilon: Fraction | None = None
    n: int = 6
    seed: int = DEFAULT_SEED
    count: int = 0


@dataclass(frozen=True)
class SuiteConfig:
    jobs: tuple[SuiteJob, ...]
    out: str | None = None


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail:
        parts.append(tail)
    return [p for p in parts if p]


def parse_suite_config(text: str) -> SuiteConfig:
    """Flat key-value grammar: optional top-level `out = dir`, then repeated
    `[suite]` sections with name/groups/families/k/epsilon/n/seed/count."""
    out = None
    jobs: list[SuiteJob] = []
    current: dict | None = None

    def flush():
        nonlocal current
        if current is None:
            return
        if "name" not in current:
            raise ValueError("a [suite] section is missing its name")
        jobs.append(SuiteJob(**current))
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "[suite]":
            flush()
            current = {}
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = key.strip(), value.strip()
        if current is None:
            if key != "out":
                raise ValueError(
                    f"line {lineno}: only `out` may appear before [suite]")
            out = value
            continue
        if key == "name":
            if value not in SUITE_NAMES:
                raise ValueError(
                    f"line {lineno}: unknown suite {value!r}; "
                    f"expected one of {SUITE_NAMES}")
            current["name"] = value
        elif key == "groups":
            current["groups"] = tuple(_split_top(value, ","))
        elif key == "families":
            current["families"] = tuple(_split_top(value, ";"))
        elif key in ("k", "epsilon"):
            current[key] = frac(value)
        elif key in ("n", "seed", "count"):
            current[key] = int(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    flush()
    return SuiteConfig(jobs=tuple(jobs), out=out)


def config_text(config: SuiteConfig) -> str:
    """Render a config back to its text form (round-trips through the
    parser)."""
    lines = []
    if config.out:
        lines.append(f"out = {config.out}")
    for job in config.jobs:
        lines.append("[suite]")
        lines.append(f"name = {job.name}")
        if job.groups:
            lines.append("groups = " + ", ".join(job.groups))
        if job.families:
            lines.append("families = " + "; ".join(job.families))
        if job.k is not None:
            lines.append(f"k = {job.k}")
        if job.epsilon is not None:
            lines.append(f"epsilon = {job.epsilon}")
        lines.append(f"n = {job.n}")
        lines.append(f"seed = {job.seed}")
        if job.count:
            lines.append(f"count = {job.count}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Default instance material

CORE_GROUPS = (
    "cyclic(60)",
    "cyclic(97)",
    "dihedral(15)",
    "symmetric(4)",
    "sl2(5)",
    "direct_product(cyclic(4),cyclic(9))",
    "heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)",
)

SMALL_GROUPS = (
    "cyclic(48)",
    "dihedral(12)",
    "symmetric(4)",
    "sl2(3)",
    "direct_product(cyclic(6),cyclic(5))",
    "cyclic(37)",
)

CORE_FAMILIES = (
    "ball_in_word_metric(2;1,3)",
    "random_dense(density=1/5;seed=23)",
    "geometric_progression(3,5)",
    "subgroup(2)",
    "coset(2;1)",
    "union_of_cosets(3;2)",
)

SMALL_FAMILIES = (
    "ball_in_word_metric(1;1,3)",
    "random_dense(density=1/8;seed=31)",
    "geometric_progression(3,4)",
    "subgroup(4)",
    "coset(4;1)",
    "geometric_progression(5,3)",
)


def default_job(name: str) -> SuiteJob:
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITE_NAMES}")
    if name == "ruzsa-axioms":
        return SuiteJob(name, CORE_GROUPS, CORE_FAMILIES, count=90)
    if name == "energy-identities":
        return SuiteJob(name, CORE_GROUPS, CORE_FAMILIES, count=90)
    if name == "covering":
        return SuiteJob(name, CORE_GROUPS, CORE_FAMILIES, count=36)
    if name == "musprop":
        return SuiteJob(name, CORE_GROUPS, CORE_FAMILIES, count=18)
    if name == "weak-bsg":
        return SuiteJob(name, CORE_GROUPS, CORE_FAMILIES, count=18)
    if name == "bsg":
        return SuiteJob(name, SMALL_GROUPS, SMALL_FAMILIES, count=7)
    if name == "energy-equivalence":
        return SuiteJob(name, SMALL_GROUPS, SMALL_FAMILIES, count=5)
    if name == "tripling":
        return SuiteJob(name, SMALL_GROUPS, SMALL_FAMILIES, count=18)
    if name == "entropy":
        return SuiteJob(name)
    if name == "heisenberg":
        return SuiteJob(name)
    return SuiteJob(name)  # splitting


def default_config(names=SUITE_NAMES, out: str | None = None) -> SuiteConfig:
    return SuiteConfig(tuple(default_job(n) for n in names), out=out)


def _rng(job: SuiteJob, *tags) -> random.Random:
    return random.Random(":".join([str(job.seed), job.name, *map(str, tags)]))


def _pool(job: SuiteJob, report: Report, module: str,
          group_spec: str, g: FiniteGroup, *, max_size: int | None = None,
          extra_random: int = 0) -> list[tuple[str, MSet]]:
    """Realize the job's families in one group, skipping impossible ones
    with an info row; optionally extend with seeded random sets."""
    pool: list[tuple[str, MSet]] = []
    for ftext in job.families:
        spec = SetFamilySpec.parse(group_spec, ftext)
        try:
            a = generate_set(spec, group=g)
        except ValueError as exc:
            report.add(module, f"generate[{group_spec}]", ftext, "info",
                       lhs=0, note=f"family skipped: {exc}")
            continue
        if max_size is not None and a.size > max_size:
            a = MSet.from_ids(g, list(a.ids())[:max_size])
        pool.append((ftext, a))
    rng = _rng(job, group_spec, "pool")
    for i in range(extra_random):
        density = Fraction(rng.randrange(8, 25), 100)
        bits = 0
        for x in g.elements():
            if rng.random() < float(density):
                bits |= 1 << x
        if max_size is not None:
            ids = [x for x in range(g.order) if bits >> x & 1][:max_size]
            bits = sum(1 << x for x in ids)
        if not bits:
            bits = 1
        pool.append((f"random#{i}", MSet(g, bits)))
    return pool


# ---------------------------------------------------------------------------
# Suites

def _run_ruzsa_axioms(job: SuiteJob, report: Report) -> None:
    module = "setcalc"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=24,
                     extra_random=3)
        if len(pool) < 2:
            continue
        rng = _rng(job, gspec, "triples")
        op = f"ruzsa_distance[{gspec}]"
        triangle = symmetry = nonneg = invariance = True
        witness = ""
        count = max(job.count, 1)
        for _ in range(count):
            (la, a), (lb, b), (lc, c) = (rng.choice(pool) for _ in range(3))
            if not ruzsa_triangle_holds(a, b, c):
                triangle = False
                witness = witness or f"triangle fails at ({la},{lb},{lc})"
            ab = product_set(a, inverse_set(b)).size
            ba = product_set(b, inverse_set(a)).size
            if ab != ba:
                symmetry = False
                witness = witness or f"symmetry fails at ({la},{lb})"
            if not ruzsa_distance(a, b).is_nonnegative():
                nonneg = False
                witness = witness or f"nonnegativity fails at ({la},{lb})"
            x = rng.randrange(g.order)
            y = rng.randrange(g.order)
            xa = MSet(g, translate_left(x, a))
            yb = MSet(g, translate_left(y, b))
            if product_set(xa, inverse_set(yb)).size != ab:
                invariance = False
                witness = witness or f"invariance fails at ({la},{lb},x={x},y={y})"
        report.add(module, op, "triangle-cleared", "hard", passed=triangle,
                   note="|A C^-1||B| <= |A B^-1||B C^-1| over sampled triples")
        report.add(module, op, "symmetry", "hard", passed=symmetry,
                   note="|A B^-1| = |B A^-1|")
        report.add(module, op, "nonnegativity", "hard", passed=nonneg,
                   note="|A B^-1|^2 >= |A||B|")
        report.add(module, op, "left-invariance", "hard", passed=invariance,
                   note="|xA (yB)^-1| = |A B^-1|")
        report.add(module, op, "triple-count", "info", lhs=count,
                   note=witness or f"pool of {len(pool)} sets")


def _asymmetric_coset_union(g: FiniteGroup) -> MSet | None:
    """First H u xH with |A A^-1| != |A^-1 A|, scanning small subgroups."""
    for gen in range(1, min(g.order, 16)):
        sub = subgroup_closure(g, [gen])
        if not 1 < len(sub) <= g.order // 3:
            continue
        h = MSet.from_ids(g, sorted(sub))
        for x in range(1, min(g.order, 48)):
            if x in sub:
                continue
            bits = h.bits
            for m in sub:
                bits |= 1 << g.mul(x, m)
            a = MSet(g, bits)
            left = product_set(a, inverse_set(a)).size
            right = product_set(inverse_set(a), a).size
            if left != right:
                return a
    return None


def _run_energy_identities(job: SuiteJob, report: Report) -> None:
    module = "setcalc"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=32,
                     extra_random=3)
        if not pool:
            continue
        rng = _rng(job, gspec, "energy")
        op = f"energy[{gspec}]"
        flip_equal = upper = lower = brute = True
        witness = ""
        count = max(job.count, 1)
        brute_runs = 0
        for i in range(count):
            la, a = rng.choice(pool)
            lb, b = rng.choice(pool)
            e_ab = energy(a, b)
            if not e_ab.upper_bound_holds():
                upper = False
                witness = witness or f"upper bound fails at ({la},{lb})"
            if not e_ab.lower_bound_holds():
                lower = False
                witness = witness or f"lower bound fails at ({la},{lb})"
            if energy(a, inverse_set(a)).value != energy(inverse_set(a), a).value:
                flip_equal = False
                witness = witness or f"E(A,A^-1) != E(A^-1,A) at {la}"
            if a.size <= 64 and b.size <= 64 and brute_runs < 12:
                brute_runs += 1
                if e_ab.value != energy_quadruple_count(a, b):
                    brute = False
                    witness = witness or f"brute-force mismatch at ({la},{lb})"
        asym = _asymmetric_coset_union(g)
        if asym is not None:
            left = product_set(asym, inverse_set(asym)).size
            right = product_set(inverse_set(asym), asym).size
            report.add(module, op, "coset-union-asymmetry", "info",
                       lhs=left, rel="!=", rhs=right,
                       note=f"|A A^-1| vs |A^-1 A| for the union, |A| = {asym.size}")
            if energy(asym, inverse_set(asym)).value != \
                    energy(inverse_set(asym), asym).value:
                flip_equal = False
                witness = witness or "E symmetry fails on the coset union"
        report.add(module, op, "left-right-energy-equal", "hard", passed=flip_equal,
                   note="E(A,A^-1) = E(A^-1,A)")
        report.add(module, op, "energy-upper", "hard", passed=upper,
                   note="E(A,B)^2 <= (|A||B|)^3, cleared")
        report.add(module, op, "energy-lower", "hard", passed=lower,
                   note="E(A,B)|A B| >= (|A||B|)^2, cleared")
        report.add(module, op, "quadruple-brute-agreement", "hard", passed=brute,
                   note=f"{brute_runs} brute-force comparisons")
        report.add(module, op, "pair-count", "info", lhs=count, note=witness)


def _run_covering(job: SuiteJob, report: Report) -> None:
    module = "structure"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=30,
                     extra_random=2)
        if not pool:
            continue
        rng = _rng(job, gspec, "cover")
        op = f"ruzsa_cover[{gspec}]"
        ok_count = True
        ok_contain = True
        witness = ""
        count = max(job.count, 1)
        for _ in range(count):
            la, a = rng.choice(pool)
            lb, b = rng.choice(pool)
            for side in ("left", "right"):
                x = ruzsa_cover(a, b, side=side)
                if side == "left":
                    prod = product_set(a, b)
                    hull = product_set(product_set(inverse_set(a), a), x)
                else:
                    prod = product_set(b, a)
                    hull = product_set(x, product_set(a, inverse_set(a)))
                if x.size * a.size > prod.size:
                    ok_count = False
                    witness = witness or f"count fails at ({la},{lb},{side})"
                if not b <= hull:
                    ok_contain = False
                    witness = witness or f"containment fails at ({la},{lb},{side})"
        report.add(module, op, "cover-count", "hard", passed=ok_count,
                   note="|X||A| <= |A B| (resp. |B A|)")
        report.add(module, op, "cover-containment", "hard", passed=ok_contain,
                   note="B inside A^-1 A X (resp. X A A^-1)")
        report.add(module, op, "instance-count", "info", lhs=2 * count,
                   note=witness)


def _small_random_sets(g: FiniteGroup, rng: random.Random, count: int,
                       lo: int = 3, hi: int = 9) -> list[tuple[str, MSet]]:
    out = []
    for i in range(count):
        size = rng.randrange(lo, hi)
        ids = rng.sample(range(g.order), min(size, g.order))
        out.append((f"sample#{i}", MSet.from_ids(g, ids)))
    return out


def _run_musprop(job: SuiteJob, report: Report) -> None:
    module = "structure"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=30,
                     extra_random=2)
        rng = _rng(job, gspec, "musprop")
        chosen = list(pool)
        chosen.extend(_small_random_sets(g, rng, max(job.count - len(pool), 0),
                                         lo=4, hi=12))
        for i, (label, a) in enumerate(chosen):
            k = measured_difference_ratio(a)
            _, ledger = symmetric_core(a, k)
            report.merge_ledger(module, f"symmetric_core[{gspec}|{label}#{i}]",
                                ledger)


def _run_weak_bsg(job: SuiteJob, report: Report) -> None:
    module = "bsg"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, extra_random=2)
        if not pool:
            continue
        rng = _rng(job, gspec, "weak")
        count = max(job.count, 1)
        for i in range(count):
            la, a = rng.choice(pool)
            lb, b = rng.choice(pool)
            c = product_set(a, b)
            kp_sq = Fraction(c.size ** 2, a.size * b.size)
            eps = job.epsilon if job.epsilon is not None else Fraction(1, 2)
            result = weak_bsg(a, b, c, Fraction(1), eps=eps, kprime_sq=kp_sq)
            report.merge_ledger(
                module, f"weak_bsg[{gspec}|{la}*{lb}#{i}]", result.ledger)


def _energy_k(a: MSet, b: MSet) -> Fraction:
    """Smallest rational K with E(A,B)^2 K^2 >= (|A||B|)^3 at this witness
    precision: K = ceil_sqrt((|A||B|)^3)/E."""
    e_val = energy(a, b).value
    nm = a.size * b.size
    return Fraction(ceil_isqrt(nm ** 3), e_val)


def _run_bsg(job: SuiteJob, report: Report) -> None:
    module = "bsg"
    # Fixed worked instance: the 4-term progression in cyclic(16).
    g16 = construct_group("cyclic(16)")
    a16 = MSet.from_ids(g16, [0, 1, 2, 3])
    op16 = "bsg_extract[cyclic(16)|progression-4]"
    report.add(module, op16, "energy-measured", "info",
               lhs=energy(a16, a16).value, note="E(A,A) for A = {0,1,2,3}")
    extract = bsg_extract(a16, a16, _energy_k(a16, a16))
    report.merge_ledger(module, op16, extract.ledger)
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=40, extra_random=1)
        if not pool:
            continue
        rng = _rng(job, gspec, "bsg")
        count = max(job.count, 1)
        for i in range(count):
            la, a = rng.choice(pool)
            lb, b = rng.choice(pool)
            k = _energy_k(a, b)
            extract = bsg_extract(a, b, k)
            report.merge_ledger(
                module, f"bsg_extract[{gspec}|{la}*{lb}#{i}]", extract.ledger)


def _run_energy_equivalence(job: SuiteJob, report: Report) -> None:
    module = "bsg"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=32, extra_random=1)
        if not pool:
            continue
        rng = _rng(job, gspec, "equiv")
        count = max(job.count, 1)
        for i in range(count):
            la, a = rng.choice(pool)
            lb, b = rng.choice(pool)
            k = _energy_k(a, b)
            wit = energy_equivalences("i", a, b, k)
            report.merge_ledger(
                module, f"energy_equivalences[{gspec}|{la}*{lb}#{i}]",
                wit.ledger)


def _local_product_sup(a: MSet) -> int:
    g = a.group
    return max(
        product_set(a, MSet(g, translate_left(mid, a))).size
        for mid in a.ids())


def _run_tripling(job: SuiteJob, report: Report) -> None:
    module = "structure"
    for gspec in job.groups:
        g = construct_group(gspec)
        pool = _pool(job, report, module, gspec, g, max_size=16, extra_random=2)
        rng = _rng(job, gspec, "tripling")
        chosen = list(pool)
        chosen.extend(_small_random_sets(g, rng, max(job.count - len(pool), 0),
                                         lo=3, hi=12))
        for i, (label, a) in enumerate(chosen):
            k = measured_tripling(a)
            op = f"tripling[{gspec}|{label}#{i}]"
            wit, wled = approx_group_from_tripling(a, k)
            report.merge_ledger(module, op, wled)
            report.add(module, op, "witness-verified", "hard",
                       passed=wit.verified, note="all approximate-group clauses")
            chain = tripling_chain(a, k, n=min(job.n, 6))
            report.merge_ledger(module, f"tripling_chain[{gspec}|{label}#{i}]",
                                chain)
        # Local-product corollary at the inferred constant.
        local = [(lbl, a) for lbl, a in pool if a.size <= 14][:3]
        local.extend(_small_random_sets(g, _rng(job, gspec, "local"),
                                        max(9 - len(local), 0), lo=3, hi=8))
        for i, (label, a) in enumerate(local):
            sup_size = _local_product_sup(a)
            a2 = product_set(a, a)
            k_local = Fraction(max(sup_size, a2.size), a.size)
            ledger = local_tripling_check(a, k_local)
            report.merge_ledger(
                module, f"local_tripling[{gspec}|{label}#{i}]", ledger)
        _plus_point_demo(report, module, gspec, g)


def _plus_point_demo(report: Report, module: str, gspec: str,
                     g: FiniteGroup) -> None:
    """Show the local-product hypothesis genuinely failing on H u {x}.

    Scans subgroup generators in ascending order; the first instance
    where sup_a |A a A| exceeds |A^2| exhibits the gap.  Everything is
    reported, nothing asserted: in abelian groups the family itself is
    impossible and that is recorded instead.
    """
    op = f"local_tripling[{gspec}|subgroup_plus_point]"
    first_err = None
    for gen in range(1, min(g.order, 24)):
        spec = SetFamilySpec.parse(gspec, f"subgroup_plus_point({gen})")
        try:
            a = generate_set(spec, group=g)
        except ValueError as exc:
            first_err = first_err or str(exc)
            continue
        if a.size > 40:
            continue
        sup_size = _local_product_sup(a)
        a2_size = product_set(a, a).size
        if sup_size > a2_size:
            report.add(module, op, "square-ratio", "info",
                       lhs=Fraction(a2_size, a.size),
                       note=f"|A^2|/|A| for H u {{x}}, |A| = {a.size}")
            report.add(module, op, "local-product-ratio", "info",
                       lhs=Fraction(sup_size, a.size),
                       note="sup over a in A of |A a A|/|A|")
            report.add(module, op, "hypothesis-gap-shown", "info",
                       lhs=sup_size, rel=">", rhs=a2_size,
                       note="local-product hypothesis fails at K = |A^2|/|A|; "
                            "conjugation moves the subgroup")
            return
    report.add(module, op, "hypothesis-gap-shown", "info", lhs=0,
               note=first_err or "no gap instance among scanned generators")


def _subgroup_by_order(g: FiniteGroup, order: int) -> list[int]:
    """Members of the first subgroup with the given order, scanning
    single generators and then generator pairs in ascending id order."""
    if order == g.order:
        return list(range(g.order))
    for h in range(1, g.order):
        mem = subgroup_closure(g, [h])
        if len(mem) == order:
            return sorted(mem)
    for h1 in range(1, g.order):
        for h2 in range(h1 + 1, g.order):
            mem = subgroup_closure(g, [h1, h2])
            if len(mem) == order:
                return sorted(mem)
    raise ValueError(f"no subgroup of order {order} in {g.name}")


def _normal_view(g: FiniteGroup, order: int):
    """Quotient view of the first normal subgroup with the given order,
    found by the same ascending generator scan."""
    for h in range(1, g.order):
        if len(subgroup_closure(g, [h])) == order:
            try:
                return quotient_map(g, [h])
            except NotNormalError:
                continue
    for h1 in range(1, g.order):
        for h2 in range(h1 + 1, g.order):
            if len(subgroup_closure(g, [h1, h2])) == order:
                try:
                    return quotient_map(g, [h1, h2])
                except NotNormalError:
                    continue
    raise ValueError(f"no normal subgroup of order {order} in {g.name}")


def _full_set(g: FiniteGroup, view) -> MSet:
    return MSet(g, (1 << g.order) - 1)


def _members_set(g: FiniteGroup, view) -> MSet:
    return MSet.from_ids(g, sorted(view.members))


def _split_instances():
    """(group spec, normal-subgroup order, set builders) per instance."""
    return (
        ("cyclic(12)", 3, (
            ("evens", lambda g, v: MSet.from_ids(g, range(0, 12, 2))),
            ("subgroup-h", _members_set),
            ("full", _full_set),
        )),
        ("dihedral(15)", 5, (
            ("rotations", lambda g, v: MSet.from_ids(
                g, _subgroup_by_order(g, 15))),
            ("ball", lambda g, v: power_set(
                symmetrize(MSet.from_ids(g, [1, 15])), 2)),
            ("full", _full_set),
        )),
        ("symmetric(4)", 4, (
            ("alternating", lambda g, v: MSet.from_ids(
                g, _subgroup_by_order(g, 12))),
            ("klein-four", _members_set),
            ("full", _full_set),
        )),
        ("direct_product(cyclic(4),cyclic(9))", 9, (
            ("vertical", _members_set),
            ("ball", lambda g, v: power_set(
                symmetrize(MSet.from_ids(g, [9])), 2)),
        )),
        ("heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)", 3, (
            ("vertical", _members_set),
            ("z-section", lambda g, v: MSet.from_ids(g, range(0, 27, 3))),
            ("full", _full_set),
        )),
    )


def _is_subgroup(a: MSet) -> bool:
    return (0 in a and inverse_set(a) == a
            and product_set(a, a) == a)


def _run_splitting(job: SuiteJob, report: Report) -> None:
    module = "heisenberg"
    for gspec, view_order, builders in _split_instances():
        g = construct_group(gspec)
        if isinstance(g, hb.HeisenbergGroup):
            view = g.vertical
        else:
            view = _normal_view(g, view_order)
        for label, build in builders:
            a = build(g, view)
            op = f"split[{gspec}|{label}]"
            sym = symmetrize(a)
            k = measured_tripling(sym)
            try:
                witness = hb.split_approximate(sym, view, k)
            except LedgerError as exc:
                report.merge_failure(module, op, exc)
                continue
            report.merge_ledger(module, op, witness.ledger)
            if _is_subgroup(a):
                exact = hb.exact_split_oracle(a, view)
                report.merge_ledger(module, f"exact_split[{gspec}|{label}]",
                                    exact.ledger)
                b_cap = a.intersect_bits(view.member_bits)
                agree = (witness.b1 == b_cap and witness.b2 == b_cap
                         and witness.b3 == b_cap and exact.b == b_cap
                         and exact.passed)
                report.add(module, op, "exact-approx-agreement", "hard",
                           passed=agree, lhs=b_cap.size,
                           note="B1 = B2 = B3 = A n H = exact B on subgroups")


def _heisenberg_group_specs():
    return {
        3: "heisenberg(z=Zp^2,p=3;w=Zp^1,p=3;pairing=symplectic)",
        5: "heisenberg(z=Zp^2,p=5;w=Zp^1,p=5;pairing=symplectic)",
        7: "heisenberg(z=Zp^2,p=7;w=Zp^1,p=7;pairing=symplectic)",
    }


def _heisenberg_families(g: hb.HeisenbergGroup, seed: int):
    """Twelve deterministic set families inside one Heisenberg group."""
    wo = g.w_order
    e1 = g.spec.z_prime ** (g.spec.z_rank - 1)  # z coords (1,0,...)
    e2 = 1                                       # z coords (...,0,1)
    full = MSet(g, (1 << g.order) - 1)
    vertical = MSet.from_ids(g, range(wo))
    line = MSet.from_ids(g, sorted(subgroup_closure(g, [g.encode(e1, 0)])))
    wall = MSet.from_ids(
        g, sorted(subgroup_closure(g, [g.encode(e1, 0), 1])))
    zsec = MSet.from_ids(g, [g.encode(z, 0) for z in range(g.z_order)])
    mixed = MSet.from_ids(
        g, sorted({0} | set(vertical.ids()) | {g.encode(e1, 0)}))
    ball1 = symmetrize(MSet.from_ids(
        g, [g.encode(e1, 0), g.encode(e2, 0)]))
    ball2 = power_set(ball1, 2)
    twofiber = MSet.from_ids(
        g, sorted(set(range(wo)) | {g.encode(e1, w) for w in range(wo)}))
    prog = []
    cur = 0
    step = g.encode(e1, 1)
    for _ in range(3):
        prog.append(cur)
        cur = g.mul(cur, step)
    rng = random.Random(f"{seed}:heis:{g.order}")
    rnd_bits = 0
    for x in g.elements():
        if rng.random() < 0.22:
            rnd_bits |= 1 << x
    rnd_bits |= 1
    return (
        ("identity", MSet.from_ids(g, [0])),
        ("vertical", vertical),
        ("full", full),
        ("z-section", zsec),
        ("line", line),
        ("line-times-w", wall),
        ("vertical-plus-point", mixed),
        ("pair-ball-1", ball1),
        ("pair-ball-2", ball2),
        ("two-fibers", twofiber),
        ("mixed-progression", MSet.from_ids(g, sorted(set(prog)))),
        ("random-dense", MSet(g, rnd_bits)),
    )


def _run_heisenberg(job: SuiteJob, report: Report) -> None:
    module = "heisenberg"
    for p, gspec in sorted(_heisenberg_group_specs().items()):
        g = construct_group(gspec)
        assert isinstance(g, hb.HeisenbergGroup)
        report.merge_ledger(module, f"build[p={p}]", g.construction_ledger)
        for label, a in _heisenberg_families(g, job.seed):
            op = f"heisen_inverse[p={p}|{label}]"
            k = measured_tripling(a)
            try:
                witness = hb.heisen_inverse(a, k)
                converse = hb.verify_inverse_converse(witness, a)
            except LedgerError as exc:
                report.merge_failure(module, op, exc)
                continue
            report.merge_ledger(module, op, witness.ledger)
            report.merge_ledger(module, f"converse[p={p}|{label}]", converse)
            if _is_subgroup(a):
                exact = hb.exact_split_oracle(a, g.vertical)
                split = hb.split_approximate(a, g.vertical, Fraction(1))
                b_cap = a.intersect_bits(g.vertical.member_bits)
                agree = (split.b1 == b_cap and split.b2 == b_cap
                         and split.b3 == b_cap and exact.b == b_cap
                         and exact.passed)
                report.add(module, op, "exact-approx-agreement", "hard",
                           passed=agree, lhs=b_cap.size,
                           note="genuine subgroup: B_i = A n H both routes")


def _run_entropy(job: SuiteJob, report: Report) -> None:
    module = "entropy"
    for group in (TorusGroup(1), TorusGroup(2), QuaternionGroup()):
        profile = metric_profile_check(group, seed=job.seed)
        report.merge_ledger(module, f"profile[{group.name}]", profile.ledger)
    word = WordMetricGroup(construct_group("cyclic(60)"), [1, 7])
    profile = metric_profile_check(word, seed=job.seed)
    report.merge_ledger(module, f"profile[{word.name}]", profile.ledger)

    # tripling growth on a short torus arc
    t1 = TorusGroup(1)
    arc = MetricCloud(
        t1, [(Fraction(i, 100),) for i in range(10)], RegionSpec("arc"))
    tri = entropy_tripling_check(arc, Fraction(1, 100))
    report.merge_ledger(module, "entropy_tripling[torus(1)-arc]", tri.ledger)

    # cross-module oracle: a progression in cyclic(5) embedded at i/5
    c5 = construct_group("cyclic(5)")
    a5 = MSet.from_ids(c5, [0, 1, 2])
    discrete = energy(a5, a5).value
    cloud5 = MetricCloud(t1, [(Fraction(i, 5),) for i in range(3)],
                         RegionSpec("embedded-progression"))
    approx = approx_energy(cloud5, cloud5, Fraction(1, 20))
    report.add(module, "approx_energy[embedded-cyclic(5)]",
               "matches-discrete-energy", "hard",
               lhs=approx, rel="==", rhs=discrete, passed=approx == discrete,
               note="product gap 1/5 above eps 1/20; exact quadruple count")
    sep = separated_set(cloud5, Fraction(1, 20))
    report.add(module, "approx_energy[embedded-cyclic(5)]",
               "cloud-separated", "hard",
               lhs=len(sep), rel="==", rhs=3, passed=len(sep) == 3,
               note="no two points merge at this scale")


_SUITES = {
    "ruzsa-axioms": _run_ruzsa_axioms,
    "energy-identities": _run_energy_identities,
    "covering": _run_covering,
    "musprop": _run_musprop,
    "weak-bsg": _run_weak_bsg,
    "bsg": _run_bsg,
    "energy-equivalence": _run_energy_equivalence,
    "tripling": _run_tripling,
    "entropy": _run_entropy,
    "heisenberg": _run_heisenberg,
    "splitting": _run_splitting,
}


def run_suite(config: SuiteConfig) -> Report:
    """Execute every job in the config and merge the rows."""
    names = [job.name for job in config.jobs]
    if not names:
        title = "suite-empty"
    elif tuple(dict.fromkeys(names)) == SUITE_NAMES:
        title = "suite-all"
    elif len(names) <= 3:
        title = "suite-" + "-".join(names)
    else:
        title = f"suite-{names[0]}-plus-{len(names) - 1}"
    report = Report(title=title)
    for job in config.jobs:
        runner = _SUITES.get(job.name)
        if runner is None:
            raise ValueError(
                f"unknown suite {job.name!r}; expected one of {SUITE_NAMES}")
        job_eff = job
        if not job.groups and job.name not in ("entropy", "heisenberg",
                                               "splitting"):
            job_eff = replace(job, groups=default_job(job.name).groups,
                              families=default_job(job.name).families,
                              count=job.count or default_job(job.name).count)
        runner(job_eff, report)
    return report


def run_named_suite(name: str, seed: int = DEFAULT_SEED) -> Report:
    """Run one suite with its default job (the `verify <name>` entry)."""
    job = replace(default_job(name), seed=seed)
    report = Report(title=f"suite-{name}")
    _SUITES[name](job, report)
    return report
