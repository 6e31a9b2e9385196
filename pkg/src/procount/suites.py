"""Verification suites shared by the CLI and the acceptance tests.

Each ``criterion_*`` function runs one acceptance check and returns a
:class:`CheckResult`; :func:`run_suite` groups them under the suite names
accepted by ``procount verify``.  All randomness comes from the given seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .mekler import (LabeledUniverse, Morphism, PlainUniverse, collection_oracle, commutator,
                     commuting_dichotomy_check, enumerate_group, functor_F, word_product)
from .perm import all_subgroups, check_borel_conditions, partial_compose, partial_inverse
from .pro_omega import (InverseSystem, PreMorphism, equivalent, identity_premorphism,
                        is_interval_premorphism)
from .reduction import verify_main_theorem_instance
from .trees import ExplicitTree, SequenceSpec, capacity_inequality, expand
from .unifmaps import bi_lipschitz, build_psi, empirical_lipschitz, phi_kl_family, reduce_linfty_to_naturals

SUITES = ("algebra", "dichotomy", "functorF", "psi", "roundtrip", "borel", "all")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        # wall-clock times are left out so that reports are reproducible
        return {"name": self.name, "status": "pass" if self.passed else "fail", "detail": self.detail}

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}"


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), time.perf_counter() - t0, detail)


# ---------------------------------------------------------------------------
# 1. oracle equivalence of the normal form


def random_universe(rng: random.Random, p: int = 3):
    kind = rng.choice(("free", "matching", "labelled"))
    if kind == "free":
        return PlainUniverse(p), list(range(4))
    if kind == "matching":
        return PlainUniverse.matching(p), list(range(8))
    U = LabeledUniverse.over(range(rng.randint(1, 4)), p)
    return U, U.generators()


def random_word(rng: random.Random, gens: list, p: int, max_len: int = 12) -> list:
    return [(rng.choice(gens), rng.randrange(1, p)) for _ in range(rng.randint(0, max_len))]


def criterion_1(seed: int = 0, words: int = 10_000, p: int = 3) -> CheckResult:
    def run():
        rng = random.Random(seed)
        mismatches = []
        for i in range(words):
            U, gens = random_universe(rng, p)
            w = random_word(rng, gens, p)
            if word_product(U, w) != collection_oracle(U, w):
                mismatches.append(i)
        return not mismatches, {"words": words, "p": p, "mismatches": len(mismatches)}
    r = _timed("1 Mekler normal form equals the collection oracle", run)
    return _runtime_cap(r, 60)


def _runtime_cap(r: CheckResult, limit: float) -> CheckResult:
    detail = dict(r.detail, runtime_limit_seconds=limit)
    return CheckResult(r.name, r.passed and r.seconds < limit, r.seconds, detail)


# ---------------------------------------------------------------------------
# 2. the commutation dichotomy, exhaustively


def dichotomy_scan(p: int = 3, labels: int = 2) -> dict:
    """Classify every commuting pair of ``L(X)``, ``|X| = labels``.

    Commutation and the classification only see base parts, but every pair of
    elements is still passed to the classifier.
    """
    U = LabeledUniverse.over(range(labels), p)
    elements = list(enumerate_group(U))
    by_base: dict = {}
    for d in elements:
        by_base.setdefault(d.base, []).append(d)
    tally = {"pair": 0, "rank<=1": 0, "violation": 0}
    for c in elements:
        for base, ds in by_base.items():
            if not commutator(c, ds[0]).is_identity():
                continue
            for d in ds:
                tally[commuting_dichotomy_check(c, d).kind] += 1
    return {"p": p, "labels": labels, "elements": len(elements),
            "commuting_pairs": sum(tally.values()), **tally}


def criterion_2(p: int = 3) -> CheckResult:
    def run():
        scan = dichotomy_scan(p, 2)
        return scan["violation"] == 0 and scan["elements"] == p ** 8, scan
    return _runtime_cap(_timed("2 commuting pairs of L(X) obey the dichotomy", run), 600)


# ---------------------------------------------------------------------------
# 3. F recovers surjections


def random_surjection(rng: random.Random, max_x: int = 6, max_y: int = 4) -> tuple[list, list, dict]:
    ny = rng.randint(1, max_y)
    nx = rng.randint(ny, max_x)
    X, Y = list(range(nx)), [("y", j) for j in range(ny)]
    values = Y + [rng.choice(Y) for _ in range(nx - ny)]
    rng.shuffle(values)
    return X, Y, dict(zip(X, values))


def criterion_3(seed: int = 0, trials: int = 500, p: int = 3) -> CheckResult:
    def run():
        rng = random.Random(seed)
        bad = 0
        for _ in range(trials):
            X, Y, q = random_surjection(rng)
            f = Morphism.induced(q, LabeledUniverse.over(X, p), LabeledUniverse.over(Y, p))
            bad += functor_F(f) != q
        return bad == 0, {"trials": trials, "mismatches": bad}
    return _timed("3 functor F inverts induced epimorphisms", run)


# ---------------------------------------------------------------------------
# 4. the map from real sequences to N^N


def random_rational(rng: random.Random, scale: int = 50) -> Fraction:
    return Fraction(rng.randint(-scale * 12, scale * 12), rng.randint(1, 12))


def criterion_4(seed: int = 0, trials: int = 1000, length: int = 32) -> CheckResult:
    def run():
        rng = random.Random(seed)
        contraction_fail = 0
        converse_fail = 0
        example = None
        for _ in range(trials):
            x = [random_rational(rng) for _ in range(length)]
            y = [random_rational(rng) for _ in range(length)]
            fx, fy = reduce_linfty_to_naturals(x), reduce_linfty_to_naturals(y)
            for n in range(length):
                for m in (2 * n, 2 * n + 1):
                    if abs(fx[m] - fy[m]) > abs(x[n] - y[n]):
                        contraction_fail += 1
                        if example is None:
                            example = {"x": str(x[n]), "y": str(y[n]), "coordinate": m,
                                       "f_diff": abs(fx[m] - fy[m])}
            M = max(abs(a - b) for a, b in zip(fx, fy)) + 1
            if any(abs(a - b) >= 2 * M for a, b in zip(x, y)):
                converse_fail += 1
        detail = {"trials": trials, "length": length, "contraction_violations": contraction_fail,
                  "converse_violations": converse_fail, "first_contraction_violation": example}
        return contraction_fail == 0 and converse_fail == 0, detail
    return _timed("4 floor encoding bounds on random rational sequences", run)


# ---------------------------------------------------------------------------
# 5. Lipschitz constants


PSI_PAIRS = [
    (SequenceSpec.constant(0), SequenceSpec.constant(0), 1),
    (SequenceSpec.constant(1), SequenceSpec.constant(0), 2),
    (SequenceSpec.constant(0), SequenceSpec.constant(1), 2),
    (SequenceSpec.constant(2), SequenceSpec.constant(0), 3),
    (SequenceSpec.constant(0), SequenceSpec.constant(2), 3),
    (SequenceSpec.affine(1, 1), SequenceSpec.affine(1, 0), 2),
    (SequenceSpec.affine(1, 0), SequenceSpec.affine(1, 1), 2),
    (SequenceSpec.affine(1, 2), SequenceSpec.affine(1, 0), 3),
    (SequenceSpec.affine(1, 0), SequenceSpec.affine(1, 2), 3),
    (SequenceSpec.constant(3), SequenceSpec.constant(1), 3),
    (SequenceSpec.constant(1), SequenceSpec.constant(3), 3),
    (SequenceSpec((0, 1, 0, 1), (0, 1)), SequenceSpec.constant(1), 2),
    (SequenceSpec((2, 0, 1), (0, 1)), SequenceSpec.constant(1), 2),
    (SequenceSpec((1, 2, 3), (1, 0)), SequenceSpec.affine(1, 0), 2),
    (SequenceSpec.affine(2, 1), SequenceSpec.affine(2, 0), 2),
    (SequenceSpec.affine(2, 0), SequenceSpec.affine(2, 2), 3),
    (SequenceSpec((3, 3), (0, 2)), SequenceSpec.constant(2), 2),
    (SequenceSpec.constant(1), SequenceSpec.constant(1), 1),
    (SequenceSpec((0, 2, 0), (1, 1)), SequenceSpec.affine(1, 0), 3),
    (SequenceSpec.affine(1, 3), SequenceSpec.affine(1, 1), 3),
]


def criterion_5(depth: int = 10, psi_depth: int = 6, psi_width: int = 4) -> CheckResult:
    def run():
        phi_rows = []
        for k, l in itertools.product(range(1, 5), repeat=2):
            est = empirical_lipschitz(phi_kl_family(k, l, depth))
            want = Fraction(2) ** (l - k)
            phi_rows.append({"k": k, "l": l, "measured": str(est.value), "claimed": str(want),
                             "exhaustive": est.exhaustive, "ok": est.value == want and est.exhaustive})
        psi_rows = []
        for x, y, M in PSI_PAIRS:
            psi, inv = build_psi(x, y, M, psi_depth, psi_width)
            est = bi_lipschitz(psi, inv)
            psi_rows.append({"x": x.to_json(), "y": y.to_json(), "M": M, "measured": str(est.value),
                             "bound": 2 ** M, "ok": est.value <= 2 ** M})
        ok = all(r["ok"] for r in phi_rows) and all(r["ok"] for r in psi_rows)
        return ok, {"phi_kl": phi_rows, "psi": psi_rows,
                    "phi_kl_mismatches": [(r["k"], r["l"]) for r in phi_rows if not r["ok"]]}
    return _timed("5 Lipschitz constants of Phi_kl and Psi", run)


# ---------------------------------------------------------------------------
# 6. the counting argument


def criterion_6(seed: int = 0, trials: int = 1000, depth: int = 6, width: int = 8) -> CheckResult:
    def run():
        rng = random.Random(seed)
        bad = 0
        for _ in range(trials):
            yk = rng.randint(0, 40)
            m = rng.randint(0, 40)
            M = rng.randint(m, 60)
            lhs, rhs, _ = capacity_inequality(yk, m, M)
            bad += lhs > rhs
        report = verify_main_theorem_instance(SequenceSpec.affine(2, 0), SequenceSpec.constant(0),
                                              None, depth, width)
        stage = report["stages"][0]
        ok = bad == 0 and report["status"] == "pass" and not report["related"]
        return ok, {"triples": trials, "inequality_failures": bad, "certificate_status": report["status"],
                    "moduli_pairs_certified": len(stage["certificates"]),
                    "failures": stage["failures"]}
    return _timed("6 capacity inequality and the non-related certificate", run)


# ---------------------------------------------------------------------------
# 7. forward and backward round trip


ROUNDTRIP_PAIRS = [
    (SequenceSpec.constant(0), SequenceSpec.constant(0), 1),
    (SequenceSpec.affine(1, 1), SequenceSpec.affine(1, 0), 2),
    (SequenceSpec.affine(1, 0), SequenceSpec.affine(1, 1), 2),
    (SequenceSpec.constant(1), SequenceSpec.constant(0), 2),
    (SequenceSpec.constant(0), SequenceSpec.constant(2), 3),
    (SequenceSpec.affine(2, 1), SequenceSpec.affine(2, 0), 2),
    (SequenceSpec((3, 0, 2), (1, 0)), SequenceSpec.affine(1, 0), 4),
    (SequenceSpec.constant(3), SequenceSpec.constant(1), 3),
    (SequenceSpec((0, 1, 0, 1), (0, 1)), SequenceSpec.constant(1), 2),
    (SequenceSpec.affine(2, 0), SequenceSpec.affine(2, 2), 3),
]


def criterion_7(depth: int = 6, width: int = 8, p: int = 3) -> CheckResult:
    def run():
        rows = []
        for x, y, M in ROUNDTRIP_PAIRS:
            t0 = time.perf_counter()
            rep = verify_main_theorem_instance(x, y, M, depth, width, p)
            secs = time.perf_counter() - t0
            rows.append({"x": x.to_json(), "y": y.to_json(), "M": M,
                         "status": rep["status"] if secs < 300 else "timeout",
                         "stages": {s["stage"]: s["status"] for s in rep["stages"]},
                         "failures": [f for s in rep["stages"] for f in s["failures"]][:5]})
        ok = all(r["status"] == "pass" for r in rows)
        return ok, {"depth": depth, "width": width, "pairs": rows}
    return _timed("7 forward/backward round trip on related specs", run)


# ---------------------------------------------------------------------------
# 8. equivalence with the identity


def random_tree(rng: random.Random, depth: int = 4, max_children: int = 3):
    """A tree whose nodes at level ``n`` all have the children ``0 .. b_n - 1``."""
    nodes = [()]
    frontier = [()]
    for _ in range(depth):
        b = rng.randint(1, max_children)
        frontier = [s + (c,) for s in frontier for c in range(b)]
        nodes += frontier
    return expand(ExplicitTree(nodes), depth)


def random_automorphism(rng: random.Random, T) -> dict:
    """Permute the children of every node independently."""
    image = {(): ()}
    for n in range(T.depth):
        for s in T.level(n):
            kids = [t[-1] for t in T.children(s)]
            shuffled = kids[:]
            rng.shuffle(shuffled)
            for a, b in zip(kids, shuffled):
                image[s + (a,)] = image[s] + (b,)
    return image


def construct_premorphisms(seed: int = 0, count: int = 100, p: int = 3):
    """Pre-morphisms from a system to itself: interval maps, interval maps
    twisted by tree automorphisms, and interval maps with one corrupted image."""
    rng = random.Random(seed)
    out = []
    systems: list = []
    while len(systems) < 8:
        T = random_tree(rng)
        if len(T.level(T.depth)) > 1:
            systems.append(InverseSystem.from_tree(T, p))
    for i in range(count):
        A = systems[i % len(systems)]
        T = A.tree
        top = A.depth - rng.randint(0, 1)
        phi = sorted(rng.randint(n, A.depth) for n in range(top + 1))
        phi = [max(v, n) for n, v in enumerate(phi)]
        comps = [A.interval_map(m, n) for n, m in enumerate(phi)]
        kind = ("interval", "twisted", "corrupted")[i % 3]
        if kind == "twisted":
            sigma = random_automorphism(rng, T)
            comps = [Morphism.induced({v: sigma[v] for v in T.level(n)}, A.level(n), A.level(n)).compose(f)
                     for n, f in enumerate(comps)]
        elif kind == "corrupted":
            n = rng.randrange(len(comps))
            f = comps[n]
            key = rng.choice(A.level(phi[n]).generators())
            tgt = A.level(n)
            other = rng.choice(tgt.generators())
            images = dict(f.images)
            images[key] = tgt.gen(other, p - 1) if images[key] == tgt.gen(other) else tgt.gen(other)
            comps[n] = Morphism(f.source, f.target, images)
        out.append((kind, PreMorphism(A, A, phi, comps)))
    return out


def criterion_8(seed: int = 0, count: int = 100, p: int = 3) -> CheckResult:
    def run():
        rows = {"interval": [0, 0], "twisted": [0, 0], "corrupted": [0, 0]}
        bad = 0
        for kind, F in construct_premorphisms(seed, count, p):
            ident = identity_premorphism(F.source, F.depth)
            lhs = equivalent(F, ident)
            rhs = is_interval_premorphism(F)
            bad += lhs != rhs
            rows[kind][0 if lhs else 1] += 1
        return bad == 0, {"premorphisms": count, "disagreements": bad,
                          "equivalent_vs_not_by_kind": rows}
    return _timed("8 equivalence with the identity iff interval components", run)


# ---------------------------------------------------------------------------
# 9-10. permutation groups


def criterion_9(max_degree: int = 5, max_k: int = 5) -> CheckResult:
    def run():
        cases = disagreements = cond1_false = 0
        per_degree = {}
        for deg in range(1, max_degree + 1):
            subs = all_subgroups(deg)
            per_degree[deg] = len(subs)
            for G in subs:
                for k in range(max_k + 1):
                    for n in range(k + 1):
                        c1, c2 = check_borel_conditions(G, n, k)
                        cases += 1
                        disagreements += c1 != c2
                        cond1_false += not c1
        return disagreements == 0, {"subgroups_per_degree": per_degree, "cases": cases,
                                    "disagreements": disagreements, "cond1_false": cond1_false}
    return _runtime_cap(_timed("9 finite shadow of the Borel conditions", run), 300)


def criterion_10() -> CheckResult:
    def run():
        a = partial_compose((7, 4, 3, 1, 0), (3, 4, 6))
        b = partial_inverse((1, 2, 0, 5))
        return a == (1, 0) and b == (2, 0, 1), {"compose": list(a), "inverse": list(b)}
    return _timed("10 worked examples of partial permutations", run)


# ---------------------------------------------------------------------------


def borel_table(degree: int, max_k: int | None = None) -> list[dict]:
    top = degree if max_k is None else max_k
    rows = []
    for i, G in enumerate(all_subgroups(degree)):
        for k in range(top + 1):
            for n in range(k + 1):
                c1, c2 = check_borel_conditions(G, n, k)
                rows.append({"group": i, "order": len(G), "n": n, "k": k, "cond1": c1, "cond2": c2})
    return rows


def run_suite(name: str, seed: int = 0, p: int = 3, depth: int = 6, width: int = 8,
              degree: int = 5) -> list[CheckResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    plan = {
        "algebra": lambda: [criterion_1(seed, p=p)],
        "dichotomy": lambda: [criterion_2(p)],
        "functorF": lambda: [criterion_3(seed, p=p)],
        "psi": lambda: [criterion_4(seed), criterion_5()],
        "roundtrip": lambda: [criterion_6(seed, depth=depth, width=width), criterion_7(depth, width, p),
                              criterion_8(seed, p=p)],
        "borel": lambda: [criterion_9(degree), criterion_10()],
    }
    if name == "all":
        return [r for key in SUITES[:-1] for r in plan[key]()]
    return plan[name]()
