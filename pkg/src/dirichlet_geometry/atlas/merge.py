"""Merge trees of the sublevel sets |f| < r inside one strip."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import DescentFailure, HigherOrderBranch, NotABranchPoint, NumericFailure
from ..lifting import COMPLETED, LiftOptions, branch_fan
from ..paths import PlanePath
from ..targets import AnalyticTarget
from ..zeros import Rect

MATCH_TOL = 1e-6


@dataclass(frozen=True)
class MergeNode:
    id: int
    r: float
    zero: complex | None = None  # leaves
    v: complex | None = None  # internal nodes
    children: tuple[int, ...] = ()
    descended_to: tuple[complex, ...] = ()  # zeros reached from v

    @property
    def is_leaf(self) -> bool:
        return self.v is None

    def to_json(self) -> dict:
        out = {"id": self.id, "r": self.r, "children": list(self.children)}
        if self.zero is not None:
            out["zero"] = [self.zero.real, self.zero.imag]
        if self.v is not None:
            out["v"] = [self.v.real, self.v.imag]
            out["descended_to"] = [[z.real, z.imag] for z in self.descended_to]
        return out


@dataclass
class MergeTree:
    nodes: list[MergeNode] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def leaves(self) -> list[MergeNode]:
        return [n for n in self.nodes if n.is_leaf]

    @property
    def internal(self) -> list[MergeNode]:
        return [n for n in self.nodes if not n.is_leaf]

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    @property
    def root(self) -> int | None:
        used = {c for n in self.nodes for c in n.children}
        roots = [n.id for n in self.nodes if n.id not in used]
        return roots[0] if len(roots) == 1 else None

    def r_increasing(self) -> bool:
        """r strictly grows from every internal node to its internal parent."""
        by_id = {n.id: n for n in self.nodes}
        for n in self.internal:
            for c in n.children:
                child = by_id[c]
                if not child.is_leaf and not child.r < n.r:
                    return False
        return True

    def merge_pairs(self) -> list[tuple[complex, complex, complex]]:
        """(zero_a, zero_b, v): the zeros reached by the two descents from v."""
        return [(n.descended_to[0], n.descended_to[1], n.v) for n in self.internal]

    def to_json(self) -> dict:
        return {
            "nodes": [n.to_json() for n in self.nodes],
            "root": self.root,
            "partial": self.partial,
            "failures": self.failures,
        }


def merge_tree(
    target: AnalyticTarget,
    zeros: list[complex],
    derivative_zeros: list[complex],
    window: Rect,
    opts: LiftOptions | None = None,
) -> MergeTree:
    """Binary tree with the zeros as leaves and the derivative zeros as internal nodes.

    Derivative zeros are handled in increasing r = |f(v)| (ties by t).  From
    each v the segment f(v) -> 0 is lifted through the branch point; the two
    arcs descend |f| into the two touching components and end at one zero each.
    """
    opts = replace(opts or LiftOptions(), window=window)
    tree = MergeTree()
    zeros = [complex(z) for z in zeros]
    for i, z in enumerate(zeros):
        tree.nodes.append(MergeNode(i, 0.0, zero=z))
    parent = list(range(len(zeros)))
    top = list(range(len(zeros)))  # tree node currently representing each component root

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = sorted(((abs(target.eval(v)), complex(v).imag, complex(v)) for v in derivative_zeros), key=lambda x: (round(x[0], 10), x[1]))
    for r, _, v in order:
        try:
            ends = _descend(target, v, zeros, opts)
        except (DescentFailure, NotABranchPoint, HigherOrderBranch, NumericFailure) as exc:
            tree.failures.append(f"v = {v:.10g}: {exc}")
            continue
        a, b = (find(i) for i in ends)
        if a == b:
            tree.failures.append(f"v = {v:.10g}: both descents reach one component")
            continue
        nid = len(tree.nodes)
        tree.nodes.append(MergeNode(nid, r, v=v, children=(top[a], top[b]), descended_to=(zeros[ends[0]], zeros[ends[1]])))
        parent[b] = a
        top[a] = nid
    return tree


def _descend(target, v, zeros, opts) -> tuple[int, int]:
    fv = target.eval(v)
    arcs = branch_fan(target, v, PlanePath.segment(fv, 0.0), opts)
    if len(arcs) != 2:
        raise DescentFailure(f"expected two descents, got {len(arcs)}")
    ends = []
    for arc in arcs:
        if arc.termination.cause != COMPLETED:
            raise DescentFailure(f"descent stopped: {arc.termination.cause}")
        end = arc.end
        dist = [abs(end - z) for z in zeros]
        if not dist or min(dist) > MATCH_TOL * (1 + abs(end)):
            raise DescentFailure(f"descent ended at {end:.10g}, not at a catalogued zero")
        ends.append(dist.index(min(dist)))
    return ends[0], ends[1]
