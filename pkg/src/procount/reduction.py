"""Uniform homeomorphisms of tree path spaces versus isomorphisms of the
inverse systems ``(L(T_n), p_n^)``.

:func:`forward` turns a pair of mutually inverse prefix-map families into
pre-morphisms of group systems; :func:`backward` recovers the node maps from
pre-morphisms with the functor F.  :func:`verify_main_theorem_instance` runs
the whole chain for two sequence specs and returns a JSON-ready report.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .fp_linalg import DEFAULT_P, rank2
from .mekler import FunctorError, Morphism, central_image, functor_F
from .pro_omega import (InverseSystem, PreMorphism, check_premorphism, compose, equivalent,
                        identity_premorphism, is_interval_premorphism, premorphism_failures)
from .trees import (FiniteTree, SequenceSpec, TreeSpec, Tx, capacity_inequality, expand,
                    linf_distance, t_node)
from .unifmaps import FamilyError, PrefixMapFamily, bi_lipschitz, build_psi, moduli


class ReductionError(ValueError):
    def __init__(self, stage: str, level: int | None, detail: str):
        where = "" if level is None else f" at level {level}"
        super().__init__(f"{stage}{where}: {detail}")
        self.stage = stage
        self.level = level
        self.detail = detail


def is_L_morphism(f: Morphism) -> bool:
    """Every pair ``f(a_v), f(b_v)`` has rank 2 in the central quotient."""
    return all(rank2(central_image(ga), central_image(gb)) == 2
               for ga, gb in f.generator_pairs().values())


def build_group_system(T: TreeSpec | FiniteTree, depth: int | None = None, width: int = 8,
                       p: int = DEFAULT_P) -> InverseSystem:
    """The system ``L(T_0) <- L(T_1) <- ... <- L(T_depth)``."""
    if not isinstance(T, FiniteTree):
        if depth is None:
            raise ReductionError("tree", None, "a depth is needed to expand a lazy tree")
        T = expand(T, depth, width)
    elif depth is not None and depth != T.depth:
        T = FiniteTree(T.levels[:depth + 1])
    problems = T.check_tree()
    if problems:
        raise ReductionError("tree", None, problems[0])
    sys = InverseSystem.from_tree(T, p)
    onto = sys.onto_problems()
    if onto:
        raise ReductionError("bindings", None, onto[0])
    for n, b in enumerate(sys.bindings):
        if not is_L_morphism(b):
            raise ReductionError("bindings", n, "binding map is not an L-morphism")
    return sys


def inverse_failures(F: PrefixMapFamily, G: PrefixMapFamily) -> list[tuple[int, str]]:
    """Levels where ``s_n(r_{psi(n)}(t)) != t | n`` (and symmetrically)."""
    out = []
    for A, B, name in ((F, G, "G o F"), (G, F, "F o G")):
        for n in range(B.depth + 1):
            k = B.phi[n]
            if k > A.depth:
                break
            rk, sn = A.maps[k], B.maps[n]
            for t, u in rk.items():
                if sn[u] != t[:n]:
                    out.append((n, f"{name} moves {t!r}"))
                    break
    return out


def node_square_failures(F: PrefixMapFamily) -> list[tuple[int, str]]:
    """``r_n(t | phi(n)) = r_k(t) | n`` for all ``n < k`` and level-``phi(k)`` nodes."""
    out = []
    for k in range(1, F.depth + 1):
        for n in range(k):
            m = F.phi[n]
            rn, rk = F.maps[n], F.maps[k]
            for t, u in rk.items():
                if rn[t[:m]] != u[:n]:
                    out.append((n, f"square ({n},{k}) fails at {t!r}"))
                    break
    return out


def star_failures(F: PreMorphism, G: PreMorphism) -> list[tuple[int, str]]:
    """Levels where ``g_n o f_{psi(n)}`` is not the interval binding map."""
    out = []
    for first, second, name in ((F, G, "g o f"), (G, F, "f o g")):
        both = compose(first, second)
        for n, (m, h) in enumerate(zip(both.phi, both.components)):
            if h.images != first.source.interval_map(m, n).images:
                out.append((n, f"{name} differs from p_({m},{n})"))
    return out


def forward(F: PrefixMapFamily, G: PrefixMapFamily, A: InverseSystem | None = None,
            B: InverseSystem | None = None, p: int = DEFAULT_P) -> tuple[PreMorphism, PreMorphism]:
    """Pre-morphisms ``f_n = r_n^`` and ``g_n = s_n^`` for inverse families."""
    bad = inverse_failures(F, G)
    if bad:
        raise ReductionError("forward", bad[0][0], bad[0][1])
    A = A or build_group_system(F.source, p=p)
    B = B or build_group_system(F.target, p=p)
    f = PreMorphism.induced(F, A, B)
    g = PreMorphism.induced(G, B, A)
    for name, h in (("f", f), ("g", g)):
        fails = premorphism_failures(h)
        if fails:
            n, k = fails[0]
            raise ReductionError("forward", n, f"{name}: square ({n},{k}) does not commute")
    star = star_failures(f, g)
    if star:
        raise ReductionError("star", star[0][0], star[0][1])
    return f, g


def _recover(h: PreMorphism, name: str) -> list[dict]:
    maps = []
    for n, comp in enumerate(h.components):
        if not is_L_morphism(comp):
            raise ReductionError("backward", n, f"{name}_{n} is not an L-morphism")
        try:
            maps.append(functor_F(comp))
        except FunctorError as exc:
            raise ReductionError("backward", n, f"{name}_{n}: {exc}") from None
    return maps


def backward(f: PreMorphism, g: PreMorphism) -> tuple[PrefixMapFamily, PrefixMapFamily]:
    """Node maps ``r_n = F(f_n)``, ``s_n = F(g_n)``, checked to form mutually
    inverse consistent families."""
    star = star_failures(f, g)
    if star:
        raise ReductionError("backward", star[0][0], "(star) fails: " + star[0][1])
    A, B = f.source, f.target
    if A.tree is None or B.tree is None:
        raise ReductionError("backward", None, "systems must come from trees")
    fams = []
    for h, src, tgt, name in ((f, A, B, "f"), (g, B, A, "g")):
        maps = _recover(h, name)
        fam = PrefixMapFamily(src.tree, tgt.tree, h.phi, maps, check=False)
        problems = fam.problems() + [d for _, d in node_square_failures(fam)]
        if problems:
            raise ReductionError("backward", _first_level(problems), f"{name}: {problems[0]}")
        fams.append(fam)
    F, G = fams
    bad = inverse_failures(F, G)
    if bad:
        raise ReductionError("backward", bad[0][0], bad[0][1])
    return F, G


def _first_level(problems: Sequence[str]) -> int | None:
    text = problems[0]
    if text.startswith("level "):
        try:
            return int(text.split()[1].rstrip(":"))
        except ValueError:
            return None
    if text.startswith("square ("):
        return int(text[len("square ("):].split(",")[0])
    return None


# ---------------------------------------------------------------------------
# end-to-end instances


def _stage(name: str, depth: int, width: int, failures: list, **extra) -> dict:
    out = {"stage": name, "status": "fail" if failures else "pass", "depth": depth, "width": width,
           "failures": [{"level": lvl, "detail": d} for lvl, d in failures]}
    out.update(extra)
    return out


def find_witness(x: SequenceSpec, y: SequenceSpec, bound: int, limit: int = 10 ** 6) -> int | None:
    """Least ``k`` with ``x(k) - y(k) > bound``, if one exists below ``limit``."""
    K = max(len(x.prefix), len(y.prefix))
    for k in range(min(K, limit)):
        if x(k) - y(k) > bound:
            return k
    a = x.tail[0] - y.tail[0]
    b = x.tail[1] - y.tail[1]
    if a <= 0:
        return K if K < limit and a * K + b > bound else None
    k = max(K, (bound - b) // a + 1)
    while a * k + b <= bound:
        k += 1
    return k if k < limit else None


def capacity_certificate(x: SequenceSpec, y: SequenceSpec, depth: int, width: int) -> dict:
    """For each pair of moduli ``1 <= m <= M <= depth`` a ``k`` with
    ``|x(k) - y(k)| > M - m + 1``, so no homeomorphism has those moduli."""
    rows, failures = [], []
    tx = Tx(x)
    for m in range(1, depth + 1):
        for M in range(m, depth + 1):
            row = {"m": m, "M": M}
            for name, (u, v) in (("x-y", (x, y)), ("y-x", (y, x))):
                k = find_witness(u, v, M - m + 1)
                if k is None:
                    continue
                lhs, rhs, bound = capacity_inequality(v(k), m, M)
                row.update({"direction": name, "k": k, "lhs": lhs, "rhs": rhs, "bound": bound,
                            "copy_size": 2 ** u(k), "inequality": lhs <= rhs,
                            "exceeds": 2 ** u(k) > rhs})
                if 2 * k < width and 2 * m + 3 <= depth and name == "x-y":
                    T = expand(tx, 2 * m + 3, width)
                    t = t_node(k, 2 * m + 1)
                    row["counted"] = T.count_level(len(t) + 1, tx.in_R_copy(k, m))
                    if row["counted"] != 2 ** u(k):
                        failures.append((m, f"copy R_(x({k}),{m}) has {row['counted']} first-level nodes"))
                break
            else:
                failures.append((m, f"no k with |x(k)-y(k)| > {M - m + 1} (M={M})"))
            if "k" in row and not (row["inequality"] and row["exceeds"]):
                failures.append((m, f"capacity check fails for M={M}"))
            rows.append(row)
    return _stage("converse", depth, width, failures, certificates=rows)


def verify_main_theorem_instance(x: SequenceSpec, y: SequenceSpec, M: int | None, depth: int,
                                 width: int = 8, p: int = DEFAULT_P) -> dict:
    """Run every check of the correspondence for ``T_x`` and ``T_y``.

    If ``x`` and ``y`` are l_infinity-related with bound ``M`` the forward and
    backward constructions are run and compared; otherwise the counting
    argument is certified on the tested moduli.
    """
    dist = linf_distance(x, y)
    report = {"x": x.to_json(), "y": y.to_json(), "M": M, "depth": depth, "width": width, "p": p,
              "linf_distance": dist, "stages": []}
    stages = report["stages"]
    if dist is None or M is None or dist >= M:
        if dist is not None and M is not None:
            raise ReductionError("spec", None, f"|x(k) - y(k)| reaches {dist}, not below M={M}")
        stages.append(capacity_certificate(x, y, depth, width))
        report["status"] = "pass" if stages[-1]["status"] == "pass" else "fail"
        report["related"] = False
        return report
    report["related"] = True

    def done():
        report["status"] = "pass" if all(s["status"] == "pass" for s in stages) else "fail"
        return report

    try:
        psi, inv = build_psi(x, y, M, depth, width)
    except FamilyError as exc:
        stages.append(_stage("psi", depth, width, [(None, str(exc))]))
        return done()
    lip = bi_lipschitz(psi, inv)
    bound = Fraction(2) ** M
    fails = [] if lip.value <= bound else [(None, f"bi-Lipschitz constant {lip.value} exceeds {bound}")]
    stages.append(_stage("psi", depth, width, fails, phi=list(psi.phi), psi=list(inv.phi),
                         moduli=moduli(psi), lipschitz=str(lip.value), exhaustive=lip.exhaustive))
    try:
        A = build_group_system(psi.source, p=p)
        B = build_group_system(psi.target, p=p)
    except ReductionError as exc:
        stages.append(_stage("systems", depth, width, [(exc.level, exc.detail)]))
        return done()
    stages.append(_stage("systems", depth, width, [], levels=[len(U.labels) for U in A.universes]))
    f = PreMorphism.induced(psi, A, B)
    g = PreMorphism.induced(inv, B, A)
    fails = [(n, f"{name}: square ({n},{k})") for name, h in (("f", f), ("g", g))
             for n, k in premorphism_failures(h)]
    fails += [(n, "component is not an L-morphism") for h in (f, g)
              for n, c in enumerate(h.components) if not is_L_morphism(c)]
    stages.append(_stage("forward", depth, width, fails))
    stages.append(_stage("star", depth, width, star_failures(f, g)))
    gf, fg = compose(f, g), compose(g, f)
    fails = []
    for name, h, sys in (("g o f", gf, A), ("f o g", fg, B)):
        ident = identity_premorphism(sys, h.depth)
        if equivalent(h, ident) != is_interval_premorphism(h):
            fails.append((None, f"{name}: equivalence and interval test disagree"))
        if not equivalent(h, ident):
            fails.append((None, f"{name} is not equivalent to the identity"))
    stages.append(_stage("identity", depth, width, fails))
    try:
        F2, G2 = backward(f, g)
    except ReductionError as exc:
        stages.append(_stage("backward", depth, width, [(exc.level, exc.detail)]))
        return done()
    fails = [(n, "recovered r_n differs") for n in range(psi.depth + 1)
             if F2.maps[n] != psi.maps[n] or F2.phi[n] != psi.phi[n]]
    fails += [(n, "recovered s_n differs") for n in range(inv.depth + 1)
              if G2.maps[n] != inv.maps[n] or G2.phi[n] != inv.phi[n]]
    stages.append(_stage("backward", depth, width, fails))
    return done()
