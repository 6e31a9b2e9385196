"""Pruned trees on N, their path-space ultrametric and the coding trees T_x.

Lazy trees (:class:`TreeSpec` subclasses) answer membership and child queries
on demand; :func:`expand` turns one into a :class:`FiniteTree` holding every
node up to a depth.  Infinitely branching nodes (those of ``S_*``) are cut to
the labels below ``width``; finitely branching parts (copies of ``S_k`` and
``R_k``) are always kept whole so that truncations of ``T_x`` and ``T_y``
still correspond under the maps of :mod:`procount.unifmaps`.

Appended copies are embedded by relabelling their first-level label ``j`` as
``2j + 1``; deeper labels are kept.  Odd labels never occur in ``S_*`` so the
copies stay disjoint from it.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Node = tuple


class NotInTree(ValueError):
    pass


class UndeterminedDistance(ValueError):
    pass


# ---------------------------------------------------------------------------
# sequences with affine tails


@dataclass(frozen=True)
class SequenceSpec:
    """``x(k) = prefix[k]`` for ``k < len(prefix)``, else ``a*k + b``."""

    prefix: tuple = ()
    tail: tuple = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        object.__setattr__(self, "tail", tuple(int(v) for v in self.tail))
        if len(self.tail) != 2 or min(self.tail) < 0 or min(self.prefix, default=0) < 0:
            raise ValueError("sequence entries and tail coefficients must be natural numbers")

    @classmethod
    def constant(cls, c: int) -> SequenceSpec:
        return cls((), (0, c))

    @classmethod
    def affine(cls, a: int, b: int) -> SequenceSpec:
        return cls((), (a, b))

    def __call__(self, k: int) -> int:
        if k < len(self.prefix):
            return self.prefix[k]
        a, b = self.tail
        return a * k + b

    def values(self, n: int) -> list[int]:
        return [self(k) for k in range(n)]

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "tail": list(self.tail)}

    @classmethod
    def from_json(cls, data: Mapping) -> SequenceSpec:
        return cls(tuple(data.get("prefix", ())), tuple(data.get("tail", (0, 0))))


def linf_distance(x: SequenceSpec, y: SequenceSpec) -> int | None:
    """``sup_k |x(k) - y(k)|``, or ``None`` when unbounded."""
    if x.tail[0] != y.tail[0]:
        return None
    K = max(len(x.prefix), len(y.prefix))
    head = max((abs(x(k) - y(k)) for k in range(K)), default=0)
    return max(head, abs(x.tail[1] - y.tail[1]))


# ---------------------------------------------------------------------------
# lazy trees


class TreeSpec:
    """A tree on N described by membership and ascending child labels."""

    kind = "abstract"

    def contains(self, s: Node) -> bool:
        raise NotImplementedError

    def iter_child_labels(self, s: Node) -> Iterator[int]:
        """All child labels of ``s`` in ascending order (possibly infinite)."""
        raise NotImplementedError

    def truncated_child_labels(self, s: Node, width: int) -> list[int]:
        """Child labels kept by a width-``width`` truncation."""
        return list(self.iter_child_labels(s))

    def longest_prefix(self, s: Node) -> int:
        """Largest ``j`` with ``s[:j]`` in the tree."""
        j = 0
        while j < len(s) and self.contains(s[:j + 1]):
            j += 1
        return j

    def children(self, s: Node, width: int) -> list[Node]:
        s = tuple(s)
        if not self.contains(s):
            raise NotInTree(f"{s!r} is not a node of {self!r}")
        return [s + (c,) for c in itertools.islice(self.iter_child_labels(s), width)]

    def to_json(self) -> dict:
        raise NotImplementedError


class SStar(TreeSpec):
    """All finite sequences of even numbers; a copy of the full tree."""

    kind = "S_star"

    def contains(self, s):
        return all(v >= 0 and v % 2 == 0 for v in s)

    def longest_prefix(self, s):
        for i, v in enumerate(s):
            if v < 0 or v % 2:
                return i
        return len(s)

    def iter_child_labels(self, s):
        return itertools.count(0, 2)

    def truncated_child_labels(self, s, width):
        return list(range(0, width, 2))

    def __eq__(self, other):
        return type(other) is SStar

    def __hash__(self):
        return hash("S_star")

    def __repr__(self):
        return "SStar()"

    def to_json(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class SK(TreeSpec):
    """S_1 is the zero branch; S_{k+1} = {0^m} u {0^m 1 s : s in S_k}.

    Concretely: 0/1 sequences with at most ``k - 1`` ones.
    """

    k: int
    kind = "S_k"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("S_k is defined for k >= 1")

    def contains(self, s):
        return all(v in (0, 1) for v in s) and sum(s) <= self.k - 1

    def iter_child_labels(self, s):
        return iter((0, 1) if sum(s) < self.k - 1 else (0,))

    def to_json(self):
        return {"kind": self.kind, "k": self.k}


@dataclass(frozen=True)
class RK(TreeSpec):
    """``2^k`` children at the root, then the full binary tree below each."""

    k: int
    kind = "R_k"

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("R_k is defined for k >= 0")

    def contains(self, s):
        if not s:
            return True
        return 0 <= s[0] < 2 ** self.k and all(v in (0, 1) for v in s[1:])

    def iter_child_labels(self, s):
        return iter(range(2 ** self.k) if not s else (0, 1))

    def to_json(self):
        return {"kind": self.kind, "k": self.k}


class ExplicitTree(TreeSpec):
    """A tree given by its (finite) node set."""

    kind = "explicit"

    def __init__(self, nodes: Iterable[Sequence[int]]):
        self.nodes = frozenset(tuple(s) for s in nodes)
        if () not in self.nodes:
            raise ValueError("a tree must contain the root")
        for s in self.nodes:
            if s and s[:-1] not in self.nodes:
                raise ValueError(f"{s!r} has no parent: not closed under initial segments")
        kids: dict = {}
        for s in self.nodes:
            if s:
                kids.setdefault(s[:-1], []).append(s[-1])
        self._kids = {s: sorted(v) for s, v in kids.items()}

    def contains(self, s):
        return tuple(s) in self.nodes

    def iter_child_labels(self, s):
        return iter(self._kids.get(tuple(s), ()))

    def __eq__(self, other):
        return isinstance(other, ExplicitTree) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __repr__(self):
        return f"ExplicitTree({len(self.nodes)} nodes)"

    def to_json(self):
        return {"kind": self.kind, "nodes": [list(s) for s in sorted(self.nodes)]}


class Appended(TreeSpec):
    """``base`` with a copy of ``attach(t)`` grafted at each node ``t``.

    The copy's first-level label ``j`` becomes ``2j + 1`` under ``t``; the
    base must not itself use the odd labels below an attachment node.
    """

    kind = "appended"

    def __init__(self, base: TreeSpec, attachments: Mapping[Node, TreeSpec] | None = None):
        self.base = base
        self.attachments = {tuple(t): T for t, T in (attachments or {}).items()}

    def attach(self, t: Node) -> TreeSpec | None:
        return self.attachments.get(t)

    def locate(self, s: Node):
        """``(t, copy, inner)`` if ``s`` lies strictly inside a copy, ``None`` if
        ``s`` is a base node; raises :class:`NotInTree` otherwise."""
        s = tuple(s)
        j = self.base.longest_prefix(s)
        if j == len(s):
            return None
        t = s[:j]
        copy = self.attach(t)
        label = s[j]
        if copy is None or label % 2 == 0 or label < 0:
            raise NotInTree(f"{s!r} leaves the base at {t!r} without an attachment")
        inner = ((label - 1) // 2,) + s[j + 1:]
        if not copy.contains(inner):
            raise NotInTree(f"{s!r} is not in the copy attached at {t!r}")
        return t, copy, inner

    def contains(self, s):
        try:
            self.locate(s)
        except NotInTree:
            return False
        return True

    def longest_prefix(self, s):
        s = tuple(s)
        j = self.base.longest_prefix(s)
        if j == len(s):
            return j
        copy = self.attach(s[:j])
        if copy is None or s[j] % 2 == 0 or s[j] < 0:
            return j
        inner = ((s[j] - 1) // 2,) + s[j + 1:]
        return j + copy.longest_prefix(inner)

    def _split(self, s, width=None):
        loc = self.locate(s)
        if loc is None:
            base = (self.base.iter_child_labels(s) if width is None
                    else self.base.truncated_child_labels(s, width))
            copy = self.attach(tuple(s))
            extra = [] if copy is None else [2 * j + 1 for j in copy.iter_child_labels(())]
            return base, extra
        t, copy, inner = loc
        labels = copy.iter_child_labels(inner) if width is None else copy.truncated_child_labels(inner, width)
        return labels, []

    def iter_child_labels(self, s):
        base, extra = self._split(s)
        return heapq.merge(base, extra) if extra else iter(base)

    def truncated_child_labels(self, s, width):
        base, extra = self._split(s, width)
        return sorted(itertools.chain(base, extra))

    def to_json(self):
        return {"kind": self.kind, "base": self.base.to_json(),
                "attachments": [{"node": list(t), "tree": T.to_json()}
                                for t, T in sorted(self.attachments.items())]}


def t_node(k: int, m: int) -> Node:
    """``t_{k,m} = z_k | (m+1)``: ``(2k, 0, ..., 0)`` of length ``m + 1``."""
    return (2 * k,) + (0,) * m


def z_prefix(k: int, n: int) -> Node:
    """The first ``n`` entries of the branch ``z_k``."""
    return t_node(k, n - 1) if n > 0 else ()


def _on_z(t: Node) -> tuple[int, int] | None:
    """``(k, m)`` if ``t = t_{k,m}``."""
    if len(t) >= 1 and t[0] % 2 == 0 and t[0] >= 0 and all(v == 0 for v in t[1:]):
        return t[0] // 2, len(t) - 1
    return None


class SOmega(Appended):
    """``S_*`` with a copy of ``S_k`` at every ``t_{k,2m}`` (``k >= 1``).

    ``S_0`` would be empty, so nothing is grafted along ``z_0`` here.
    """

    kind = "S_omega"

    def __init__(self):
        super().__init__(SStar())

    def attach(self, t):
        km = _on_z(t)
        if km is None:
            return None
        k, m = km
        if m % 2 == 0 and k >= 1:
            return SK(k)
        return None

    def __eq__(self, other):
        return type(other) is SOmega

    def __hash__(self):
        return hash("S_omega")

    def __repr__(self):
        return "SOmega()"

    def to_json(self):
        return {"kind": self.kind}


class Tx(SOmega):
    """``S_omega`` with a copy ``R_{x(k), m}`` of ``R_{x(k)}`` at each ``t_{k,2m+1}``."""

    kind = "T_x"

    def __init__(self, x: SequenceSpec):
        super().__init__()
        self.x = x

    def attach(self, t):
        km = _on_z(t)
        if km is None:
            return None
        k, m = km
        if m % 2 == 1:
            return RK(self.x(k))
        return super().attach(t)

    def copy_of(self, s: Node):
        """Classify ``s``: ``("star",)``, ``("S", k, m, t, inner)`` for a node
        strictly inside the ``S_k`` copy at ``t_{k,2m}``, or
        ``("R", k, m, t, inner)`` inside ``R_{x(k),m}``."""
        loc = self.locate(s)
        if loc is None:
            return ("star",)
        t, copy, inner = loc
        k, mm = _on_z(t)
        if mm % 2 == 1:
            return ("R", k, (mm - 1) // 2, t, inner)
        return ("S", k, mm // 2, t, inner)

    def in_R_copy(self, k: int, m: int) -> Callable[[Node], bool]:
        """Window predicate: node lies strictly inside ``R_{x(k),m}``."""
        t = t_node(k, 2 * m + 1)
        L = len(t)

        def window(s):
            return len(s) > L and s[:L] == t and s[L] % 2 == 1
        return window

    def __eq__(self, other):
        return type(other) is Tx and self.x == other.x

    def __hash__(self):
        return hash(("T_x", self.x))

    def __repr__(self):
        return f"Tx({self.x!r})"

    def to_json(self):
        return {"kind": self.kind, "x": self.x.to_json()}


def build_Tx(x: SequenceSpec, depth: int, width: int = 8) -> FiniteTree:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    return expand(Tx(x), depth, width)


# ---------------------------------------------------------------------------
# finite trees


class FiniteTree:
    """Every node of a tree up to ``depth``, stored level by level (sorted)."""

    def __init__(self, levels: Sequence[Sequence[Node]], spec: TreeSpec | None = None, width: int | None = None):
        self.levels = tuple(tuple(sorted(tuple(s) for s in lvl)) for lvl in levels)
        if not self.levels or self.levels[0] != ((),):
            raise ValueError("level 0 must be exactly the root")
        for n, lvl in enumerate(self.levels):
            for s in lvl:
                if len(s) != n:
                    raise ValueError(f"node {s!r} filed at level {n}")
        self.spec = spec
        self.width = width
        self._nodes = None
        self._kids = None

    @classmethod
    def from_nodes(cls, nodes: Iterable[Sequence[int]]) -> FiniteTree:
        nodes = {tuple(s) for s in nodes}
        depth = max((len(s) for s in nodes), default=0)
        levels = [[] for _ in range(depth + 1)]
        for s in nodes:
            levels[len(s)].append(s)
        return cls(levels)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level(self, n: int) -> tuple[Node, ...]:
        if not 0 <= n <= self.depth:
            raise IndexError(f"level {n} outside 0..{self.depth}")
        return self.levels[n]

    @property
    def nodes(self) -> frozenset:
        if self._nodes is None:
            self._nodes = frozenset(itertools.chain.from_iterable(self.levels))
        return self._nodes

    def contains(self, s: Node) -> bool:
        return tuple(s) in self.nodes

    def __contains__(self, s) -> bool:
        return self.contains(s)

    def children(self, s: Node) -> list[Node]:
        if self._kids is None:
            kids: dict = {}
            for lvl in self.levels[1:]:
                for t in lvl:
                    kids.setdefault(t[:-1], []).append(t)
            self._kids = kids
        return self._kids.get(tuple(s), [])

    def count_level(self, n: int, window: Callable[[Node], bool] | None = None) -> int:
        lvl = self.level(n)
        return len(lvl) if window is None else sum(1 for s in lvl if window(s))

    def check_tree(self) -> list[str]:
        """Problems with initial-segment closure or prunedness up to depth."""
        problems = []
        nodes = self.nodes
        for n in range(1, self.depth + 1):
            for s in self.levels[n]:
                if s[:-1] not in nodes:
                    problems.append(f"{s!r}: parent missing")
        for n in range(self.depth):
            for s in self.levels[n]:
                if not self.children(s):
                    problems.append(f"{s!r}: dead end below depth {self.depth}")
        return problems

    def __eq__(self, other):
        return isinstance(other, FiniteTree) and self.levels == other.levels

    def __hash__(self):
        return hash(self.levels)

    def __repr__(self):
        sizes = ",".join(str(len(lvl)) for lvl in self.levels)
        return f"FiniteTree(depth={self.depth}, level sizes={sizes})"

    def to_json(self) -> list:
        return [list(s) for s in sorted(self.nodes)]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> FiniteTree:
        return cls.from_nodes(data)


def expand(T: TreeSpec, depth: int, width: int = 8) -> FiniteTree:
    """All nodes of ``T`` of length ``<= depth`` under the width truncation."""
    if width < 1:
        raise ValueError("width must be >= 1")
    levels = [[()]]
    for _ in range(depth):
        nxt = [s + (c,) for s in levels[-1] for c in T.truncated_child_labels(s, width)]
        levels.append(nxt)
    return FiniteTree(levels, spec=T, width=width)


def children(T: TreeSpec, s: Node, width: int) -> list[Node]:
    return T.children(s, width)


def count_level(T: TreeSpec | FiniteTree, n: int, window: Callable[[Node], bool] | None = None,
                width: int = 8) -> int:
    if not isinstance(T, FiniteTree):
        T = expand(T, n, width)
    return T.count_level(n, window)


def distance(x: Sequence[int], y: Sequence[int], identical: bool = False) -> Fraction:
    """``2^-n`` for the least ``n`` with ``x(n) != y(n)``.

    ``x`` and ``y`` are branch prefixes.  If they agree on their common length
    the distance is only known when the caller flags the branches identical.
    """
    for n, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return Fraction(1, 2 ** n)
    if identical:
        return Fraction(0)
    raise UndeterminedDistance("prefixes agree; distance undetermined at this depth")


def capacity_inequality(yk: int, m: int, M: int) -> tuple[int, int, int]:
    """Level capacity of the copies ``R_{y(k),p}``, ``m < p <= M``, its power of
    two bound, and the implied bound ``M - m + 1`` on ``x(k) - y(k)``."""
    if m > M:
        raise ValueError("need m <= M")
    j = M - m + 1
    return 2 ** yk * (2 ** j - 1), 2 ** (yk + j), j


def derivative_structure_check(k: int, depth: int) -> bool:
    """Check that dropping the isolated branches of ``S_{k+1}`` leaves ``S_k``.

    A level-``depth`` node is isolated when some prefix of it (length at most
    ``depth``) has a single extension at level ``depth + 1``.
    """
    if k < 1:
        raise ValueError("k >= 1")
    big = expand(SK(k + 1), depth + 1)
    top = big.level(depth + 1)
    ext_count: dict = {}
    for t in top:
        for m in range(depth + 1):
            ext_count[t[:m]] = ext_count.get(t[:m], 0) + 1
    survivors = {s for s in big.level(depth)
                 if all(ext_count[s[:m]] > 1 for m in range(depth + 1))}
    return survivors == set(expand(SK(k), depth).level(depth))


# ---------------------------------------------------------------------------
# JSON


def tree_spec_from_json(data: Mapping) -> TreeSpec:
    kind = data.get("kind")
    if kind == "S_star":
        return SStar()
    if kind == "S_k":
        return SK(int(data["k"]))
    if kind == "S_omega":
        return SOmega()
    if kind in ("R_k", "R"):
        return RK(int(data["k"]))
    if kind == "T_x":
        return Tx(SequenceSpec.from_json(data["x"]))
    if kind == "explicit":
        return ExplicitTree(data["nodes"])
    if kind == "appended":
        return Appended(tree_spec_from_json(data["base"]),
                        {tuple(a["node"]): tree_spec_from_json(a["tree"]) for a in data.get("attachments", ())})
    raise ValueError(f"unknown tree kind {kind!r}")


def tree_request_to_json(T: TreeSpec, depth: int, width: int | None = None) -> dict:
    out = dict(T.to_json())
    out["depth"] = depth
    if width is not None:
        out["width"] = width
    return out
