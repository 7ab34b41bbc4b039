"""Covering checks for block algebras, fundamental groups of 2-complexes and graph coverings.

The algebraic side works with a finite group of automorphisms of the total
algebra; the topological side works with networkx graphs and explicit
2-complexes.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional, Sequence

import networkx as nx
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from gelfkit import linalg
from gelfkit.abelian import AbHom, CyclicSum, FgAbGroup, identity_matrix, quotient_lattice, zero_matrix
from gelfkit.cech import CochainComplex
from gelfkit.error import DomainError, ResourceError, StructuralError
from gelfkit.gelfand_space import MorphismData, UltrafilterPoint
from gelfkit.linalg import ONE, Subspace
from gelfkit.matrix_algebra import (
    AlgebraElement,
    Automorphism,
    BlockAlgebra,
    HereditaryCorner,
    ideal_of_hereditary,
    is_connected,
)
from gelfkit.utils import setup_logging

logger = setup_logging(__name__)

MAX_GROUP_ORDER = 4096


def _vec(a: AlgebraElement) -> list:
    return [v for b in a.blocks for row in linalg.entries(b) for v in row]


def generate_group(algebra: BlockAlgebra, generators: Sequence[Automorphism], limit: int = MAX_GROUP_ORDER) -> tuple[Automorphism, ...]:
    """Closure of the generators under composition, identity first."""
    elements = [Automorphism.identity(algebra)]
    queue = deque(elements)
    while queue:
        current = queue.popleft()
        for g in generators:
            if g.algebra != algebra:
                raise StructuralError("automorphism of a different algebra")
            candidate = current.compose(g)
            if any(candidate.same_action(h) for h in elements):
                continue
            if len(elements) >= limit:
                raise ResourceError(f"group has more than {limit} elements", partial=tuple(elements))
            elements.append(candidate)
            queue.append(candidate)
    return tuple(elements)


@dataclass(frozen=True)
class CoveringQuadruple:
    base: BlockAlgebra
    total: BlockAlgebra
    group: tuple[Automorphism, ...]
    lift: MorphismData
    family: tuple[Automorphism, ...] = ()

    def __post_init__(self) -> None:
        if self.lift.source != self.base or self.lift.target != self.total:
            raise StructuralError("lift must map the base algebra into the total algebra")
        if not self.group:
            raise StructuralError("the group needs at least the identity")
        for g in self.group + self.family:
            if g.algebra != self.total:
                raise StructuralError("the group must act on the total algebra")
        for i, g in enumerate(self.group):
            for h in self.group[i + 1 :]:
                if g.same_action(h):
                    raise StructuralError("two group elements act identically")

    @classmethod
    def make(
        cls,
        lift: MorphismData,
        generators: Sequence[Automorphism],
        family: Sequence[Automorphism] = (),
    ) -> "CoveringQuadruple":
        group = generate_group(lift.target, generators)
        return cls(lift.source, lift.target, group, lift, tuple(family))

    def lifted(self, a: AlgebraElement) -> AlgebraElement:
        return self.lift.apply(a)

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "total": self.total.to_json(),
            "group_order": len(self.group),
        }


@dataclass
class PrecoveringReport:
    unital: bool = True
    stabilizer: bool = True
    fixed_points: bool = True
    discrete: bool = True
    base_connected: bool = True
    total_connected: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.unital and self.stabilizer and self.fixed_points

    def to_json(self) -> dict:
        return {
            "precovering": self.ok,
            "unital": self.unital,
            "stabilizer": self.stabilizer,
            "fixed_points": self.fixed_points,
            "discrete": self.discrete,
            "base_connected": self.base_connected,
            "total_connected": self.total_connected,
            "failures": list(self.failures),
        }


def _fixes_lift(q: CoveringQuadruple, g: Automorphism) -> bool:
    return all(g.apply(q.lifted(u)) == q.lifted(u) for u in q.base.matrix_units())


def fixed_point_space(q: CoveringQuadruple) -> Subspace:
    """Solutions of g a = a for every group element, as a subspace of the total algebra."""
    units = q.total.matrix_units()
    d = len(units)
    rows = []
    for g in q.group:
        images = [_vec(g.apply(u) - u) for u in units]
        for i in range(d):
            rows.append([images[k][i] for k in range(d)])
    return linalg.kernel(DomainMatrix(rows, (len(rows), d), QQ_I))


def check_precovering(q: CoveringQuadruple) -> PrecoveringReport:
    report = PrecoveringReport(
        base_connected=is_connected(q.base),
        total_connected=is_connected(q.total),
    )
    if not q.lift.is_unital():
        report.unital = False
        report.failures.append("lift(1) is not the unit of the total algebra")

    for i, g in enumerate(q.group):
        if not _fixes_lift(q, g):
            report.stabilizer = False
            report.failures.append(f"group element {i} moves the lifted algebra")
    for i, f in enumerate(q.family):
        if _fixes_lift(q, f) and not any(f.same_action(g) for g in q.group):
            report.stabilizer = False
            report.failures.append(f"family automorphism {i} fixes the lifted algebra but is not in the group")

    fixed = fixed_point_space(q)
    lifted = Subspace.span(q.total.dimension, [_vec(q.lifted(u)) for u in q.base.matrix_units()])
    if not (fixed.leq(lifted) and lifted.leq(fixed)):
        report.fixed_points = False
        report.failures.append(
            f"fixed-point algebra has dimension {fixed.rank}, lifted algebra {lifted.rank}"
        )
    logger.info("pre-covering check with group of order %s: %s", len(q.group), report.ok)
    return report


@dataclass(frozen=True)
class EvenWitness:
    """A corner of the total algebra whose group translates sum to lift(b)."""

    corner: HereditaryCorner
    copy: int

    def to_json(self) -> dict:
        return {
            "copy": self.copy,
            "corner": [[[linalg.format_gauss(v) for v in row] for row in space.rows] for space in self.corner.spaces],
        }


@dataclass
class EvenlyCoveredReport:
    witnesses: list[EvenWitness] = field(default_factory=list)
    candidates: int = 0
    rejected: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.rejected is None and bool(self.witnesses)

    def to_json(self) -> dict:
        out = {
            "evenly_covered": self.ok,
            "candidates": self.candidates,
            "witnesses": [w.to_json() for w in self.witnesses],
        }
        if self.rejected is not None:
            out["rejected"] = self.rejected
        return out


def _outer(u: Sequence, v: Sequence) -> DomainMatrix:
    return linalg.matrix([[a * linalg.conj(b) for b in v] for a in u])


def _corner_units(b: HereditaryCorner) -> tuple[int, list]:
    """Block of a connected corner and an orthogonal basis of its range."""
    (x,) = [i for i, v in enumerate(b.spaces) if not v.is_zero]
    return x, b.spaces[x].orthogonal_basis()


def _copy_maps(q: CoveringQuadruple, lifted: list, basis: list) -> list[list[list[AlgebraElement]]]:
    """psi_k(F_pq) for every copy k of the corner inside lift(b)."""
    r = len(basis)
    inv_norm = ONE / linalg.inner(basis[0], basis[0])
    first = lifted[0][0].scale(inv_norm)
    copies = []
    for y in range(q.total.num_blocks):
        for w in linalg.column_space(first.blocks[y]).orthogonal_basis():
            cut = q.total.embed(y, linalg.rank_one_projector(w))
            copies.append([[(lifted[p][0] * cut * lifted[0][s]).scale(inv_norm) for s in range(r)] for p in range(r)])
    return copies


def evenly_covered_witnesses(q: CoveringQuadruple, b: HereditaryCorner) -> EvenlyCoveredReport:
    """Search the copies of b inside lift(b) for one whose translates decompose lift(b)."""
    x, basis = _corner_units(b)
    r = len(basis)
    alg = q.base
    f = [[alg.embed(x, _outer(basis[p], basis[s])) for s in range(r)] for p in range(r)]
    lifted = [[q.lifted(e) for e in row] for row in f]
    report = EvenlyCoveredReport()
    for k, psi in enumerate(_copy_maps(q, lifted, basis)):
        report.candidates += 1
        proj = q.total.zero()
        for p in range(r):
            proj = proj + psi[p][p].scale(ONE / linalg.inner(basis[p], basis[p]))
        translates = [g.apply(proj) for g in q.group]
        orthogonal = all(
            (translates[i] * translates[j]).is_zero()
            for i in range(len(translates))
            for j in range(len(translates))
            if i != j
        )
        if not orthogonal:
            logger.debug("copy %s: translates overlap", k)
            continue
        sums_match = True
        for p in range(r):
            for s in range(r):
                total = q.total.zero()
                for g in q.group:
                    total = total + g.apply(psi[p][s])
                if total != lifted[p][s]:
                    sums_match = False
        if not sums_match:
            logger.debug("copy %s: translates do not sum to the lift", k)
            continue
        corner = HereditaryCorner(q.total, tuple(linalg.column_space(blk) for blk in proj.blocks))
        report.witnesses.append(EvenWitness(corner, k))
    return report


def check_evenly_covered(q: CoveringQuadruple, b: HereditaryCorner) -> EvenlyCoveredReport:
    if b.algebra != q.base:
        raise StructuralError("corner of a different algebra")
    support = [i for i, v in enumerate(b.spaces) if not v.is_zero]
    if len(support) != 1:
        return EvenlyCoveredReport(rejected="corner is not connected")
    if all(v.is_full for v in b.spaces):
        return EvenlyCoveredReport(rejected="corner is the whole algebra")
    report = evenly_covered_witnesses(q, b)
    logger.info("evenly covered check: %s witnesses out of %s copies", len(report.witnesses), report.candidates)
    return report


@dataclass
class UnitalCoveringReport:
    precovering: PrecoveringReport
    checked: int = 0
    unsatisfied: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.precovering.ok and not self.unsatisfied

    def to_json(self) -> dict:
        return {
            "unital_covering": self.ok,
            "precovering": self.precovering.to_json(),
            "checked": self.checked,
            "unsatisfied": list(self.unsatisfied),
        }


def point_corner(xi: UltrafilterPoint) -> HereditaryCorner:
    """The rank-one corner at the line of a point, which belongs to the point."""
    return HereditaryCorner(
        xi.algebra,
        tuple(Subspace.line(xi.line) if x == xi.block else Subspace.zero(n) for x, n in enumerate(xi.algebra.block_dims)),
    )


def check_unital_covering(q: CoveringQuadruple, sample: Sequence[UltrafilterPoint]) -> UnitalCoveringReport:
    report = UnitalCoveringReport(check_precovering(q))
    if not report.precovering.ok:
        logger.warning("unital covering check skipped: not a pre-covering")
        return report
    for i, xi in enumerate(sample):
        report.checked += 1
        b = point_corner(xi)
        if not xi.contains(ideal_of_hereditary(b)) or not evenly_covered_witnesses(q, b).ok:
            report.unsatisfied.append(i)
    logger.info("unital covering on %s sampled points: %s", report.checked, report.ok)
    return report


@dataclass(frozen=True)
class NonunitalCoveringData:
    """Ideals A of B and Ã of B̃, given by blocks, with their own lift."""

    ambient: CoveringQuadruple
    base_blocks: tuple[int, ...]
    total_blocks: tuple[int, ...]
    lift: MorphismData

    def __post_init__(self) -> None:
        for blocks, alg in ((self.base_blocks, self.ambient.base), (self.total_blocks, self.ambient.total)):
            if not blocks or sorted(set(blocks)) != list(blocks):
                raise StructuralError("ideal blocks must be a nonempty increasing list")
            for x in blocks:
                alg.check_block(x)
        if self.lift.source != sub_algebra(self.ambient.base, self.base_blocks):
            raise StructuralError("lift source does not match the base ideal")
        if self.lift.target != sub_algebra(self.ambient.total, self.total_blocks):
            raise StructuralError("lift target does not match the total ideal")


def sub_algebra(alg: BlockAlgebra, blocks: Sequence[int]) -> BlockAlgebra:
    return BlockAlgebra(tuple(alg.block_dims[x] for x in blocks))


def include(alg: BlockAlgebra, blocks: Sequence[int], a: AlgebraElement) -> AlgebraElement:
    """Ideal element placed in the ambient algebra."""
    out = [linalg.zeros(n) for n in alg.block_dims]
    for i, x in enumerate(blocks):
        out[x] = a.blocks[i]
    return alg.element(out)


def annihilator_dimension(alg: BlockAlgebra, blocks: Sequence[int]) -> int:
    """dim {c : c a = 0 for a in the ideal}, by an exact solve."""
    units = alg.matrix_units()
    ideal_units = [u for u in units if set(u.nonzero_blocks()) <= set(blocks)]
    d = len(units)
    rows = []
    for e in ideal_units:
        images = [_vec(u * e) for u in units]
        for i in range(d):
            rows.append([images[k][i] for k in range(d)])
    return linalg.kernel(DomainMatrix(rows, (len(rows), d), QQ_I)).rank


@dataclass
class NonunitalCoveringReport:
    essential_base: bool = True
    essential_total: bool = True
    restriction: bool = True
    action_restricts: bool = True
    unique_extension: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.essential_base
            and self.essential_total
            and self.restriction
            and self.action_restricts
            and self.unique_extension
        )

    def to_json(self) -> dict:
        return {
            "covering": self.ok,
            "essential_base": self.essential_base,
            "essential_total": self.essential_total,
            "restriction": self.restriction,
            "action_restricts": self.action_restricts,
            "unique_extension": self.unique_extension,
            "failures": list(self.failures),
        }


def check_covering_nonunital(data: NonunitalCoveringData) -> NonunitalCoveringReport:
    q = data.ambient
    report = NonunitalCoveringReport()
    if annihilator_dimension(q.base, data.base_blocks):
        report.essential_base = False
        report.failures.append("base ideal has a nonzero annihilator")
    if annihilator_dimension(q.total, data.total_blocks):
        report.essential_total = False
        report.failures.append("total ideal has a nonzero annihilator")

    for u in data.lift.source.matrix_units():
        ambient = q.lifted(include(q.base, data.base_blocks, u))
        own = include(q.total, data.total_blocks, data.lift.apply(u))
        if ambient != own:
            report.restriction = False
            report.failures.append("lift is not the restriction of the ambient lift")
            break

    total_units = [include(q.total, data.total_blocks, u) for u in data.lift.target.matrix_units()]
    for i, g in enumerate(q.group):
        if any(not set(g.apply(u).nonzero_blocks()) <= set(data.total_blocks) for u in total_units):
            report.action_restricts = False
            report.failures.append(f"group element {i} does not preserve the total ideal")
    for i, g in enumerate(q.group):
        for j in range(i + 1, len(q.group)):
            h = q.group[j]
            if all(g.apply(u) == h.apply(u) for u in total_units):
                report.unique_extension = False
                report.failures.append(f"group elements {i} and {j} agree on the total ideal")
    logger.info("non-unital covering check: %s", report.ok)
    return report


Letter = tuple[int, int]


def _parse_letter(token: str, edge_count: int) -> Letter:
    inverse = token.endswith("~")
    name = token[:-1] if inverse else token
    if not name.startswith("e") or not name[1:].isdigit():
        raise StructuralError(f"cannot read edge {token!r}")
    index = int(name[1:]) - 1
    if index < 0 or index >= edge_count:
        raise StructuralError(f"edge {token!r} out of range")
    return index, -1 if inverse else 1


def _format_letter(letter: Letter, names: Sequence[str]) -> str:
    index, sign = letter
    return names[index] + ("~" if sign < 0 else "")


def free_reduce(word: Sequence[Letter]) -> list[Letter]:
    out: list[Letter] = []
    for letter in word:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return out


def cyclic_reduce(word: Sequence[Letter]) -> list[Letter]:
    out = free_reduce(word)
    while len(out) >= 2 and out[0][0] == out[-1][0] and out[0][1] == -out[-1][1]:
        out = out[1:-1]
    return out


@dataclass(frozen=True)
class TwoComplex:
    vertices: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    cells: tuple[tuple[Letter, ...], ...] = ()

    def __post_init__(self) -> None:
        n = len(self.vertices)
        if n == 0:
            raise StructuralError("a complex needs at least one vertex")
        if len(set(self.vertices)) != n:
            raise StructuralError("vertex names must be distinct")
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise StructuralError(f"edge ({u}, {v}) has an endpoint out of range")
        for c, word in enumerate(self.cells):
            if not word:
                raise StructuralError(f"cell {c} has an empty boundary")
            ends = [self._ends(letter) for letter in word]
            for (_, head), (tail, _) in zip(ends, ends[1:] + ends[:1]):
                if head != tail:
                    raise StructuralError(f"boundary of cell {c} is not a closed path")

    @classmethod
    def make(cls, vertices: Sequence[str], edges: Sequence[Sequence[str]], cells: Sequence[Sequence[str]] = ()) -> "TwoComplex":
        index = {v: i for i, v in enumerate(vertices)}
        pairs = []
        for edge in edges:
            if len(edge) != 2 or edge[0] not in index or edge[1] not in index:
                raise StructuralError(f"edge {list(edge)} does not join two known vertices")
            pairs.append((index[edge[0]], index[edge[1]]))
        words = tuple(tuple(_parse_letter(t, len(pairs)) for t in cell) for cell in cells)
        return cls(tuple(vertices), tuple(pairs), words)

    def _ends(self, letter: Letter) -> tuple[int, int]:
        u, v = self.edges[letter[0]]
        return (u, v) if letter[1] > 0 else (v, u)

    def edge_names(self) -> list[str]:
        return [f"e{i + 1}" for i in range(len(self.edges))]

    def graph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for i, (u, v) in enumerate(self.edges):
            g.add_edge(u, v, key=i)
        return g

    def is_connected(self) -> bool:
        return nx.is_connected(self.graph())

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.cells)

    def cellular_cochain_complex(self) -> CochainComplex:
        nv, ne, nf = len(self.vertices), len(self.edges), len(self.cells)
        c0, c1, c2 = CyclicSum((0,) * nv), CyclicSum((0,) * ne), CyclicSum((0,) * nf)
        d0 = zero_matrix(ne, nv)
        for i, (u, v) in enumerate(self.edges):
            d0[i][v] += 1
            d0[i][u] -= 1
        d1 = zero_matrix(nf, ne)
        for c, word in enumerate(self.cells):
            for index, sign in word:
                d1[c][index] += sign
        return CochainComplex((c0, c1, c2), (AbHom.make(c0, c1, d0), AbHom.make(c1, c2, d1)))

    def to_json(self) -> dict:
        names = self.edge_names()
        return {
            "vertices": list(self.vertices),
            "edges": [[self.vertices[u], self.vertices[v]] for u, v in self.edges],
            "cells": [[_format_letter(letter, names) for letter in word] for word in self.cells],
        }


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[tuple[Letter, ...], ...]

    def __post_init__(self) -> None:
        for word in self.relators:
            for index, sign in word:
                if not 0 <= index < len(self.generators) or sign not in (1, -1):
                    raise StructuralError("relator letter outside the generator alphabet")

    @property
    def is_free(self) -> bool:
        return not self.relators

    def relation_matrix(self) -> list[list[int]]:
        """Exponent sums, one row per relator."""
        rows = []
        for word in self.relators:
            row = [0] * len(self.generators)
            for index, sign in word:
                row[index] += sign
            rows.append(row)
        return rows

    def abelianization(self) -> FgAbGroup:
        g = len(self.generators)
        if g == 0:
            return FgAbGroup.trivial()
        return quotient_lattice(identity_matrix(g), self.relation_matrix(), g).group

    def relator_strings(self) -> list[str]:
        return [" ".join(_format_letter(letter, self.generators) for letter in word) for word in self.relators]

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relators": self.relator_strings(),
            "abelianization": self.abelianization().to_json(),
        }


def spanning_tree_edges(x: TwoComplex, base: int = 0) -> set[int]:
    """Edge indices of a breadth-first spanning tree rooted at ``base``."""
    simple = nx.Graph()
    simple.add_nodes_from(range(len(x.vertices)))
    for i, (u, v) in enumerate(x.edges):
        if u != v and not simple.has_edge(u, v):
            simple.add_edge(u, v, index=i)
    return {simple.edges[u, v]["index"] for u, v in nx.bfs_edges(simple, base)}


def pi1_presentation(x: TwoComplex, base: int = 0) -> GroupPresentation:
    """Generators are the edges off a spanning tree, relators the cell boundaries."""
    if not 0 <= base < len(x.vertices):
        raise StructuralError(f"base vertex {base} out of range")
    if not x.is_connected():
        raise DomainError("fundamental group presentation needs a connected complex")
    tree = spanning_tree_edges(x, base)
    names = x.edge_names()
    kept = [i for i in range(len(x.edges)) if i not in tree]
    position = {edge: k for k, edge in enumerate(kept)}
    relators = []
    for word in x.cells:
        rewritten = [(position[index], sign) for index, sign in word if index not in tree]
        reduced = cyclic_reduce(rewritten)
        if reduced:
            relators.append(tuple(reduced))
    presentation = GroupPresentation(tuple(names[i] for i in kept), tuple(relators))
    logger.info(
        "pi1 presentation: %s generators, %s relators, abelianization %s",
        len(kept), len(relators), presentation.abelianization(),
    )
    return presentation


@dataclass(frozen=True)
class GraphMap:
    """A vertex map between simple graphs that sends edges to edges."""

    total: nx.Graph
    base: nx.Graph
    mapping: Mapping[Hashable, Hashable]

    def __post_init__(self) -> None:
        if set(self.mapping) != set(self.total.nodes):
            raise StructuralError("graph map must be defined on every vertex")
        for v, image in self.mapping.items():
            if image not in self.base:
                raise StructuralError(f"vertex {v!r} maps outside the base graph")
        for u, v in self.total.edges:
            if not self.base.has_edge(self.mapping[u], self.mapping[v]):
                raise StructuralError(f"edge {u!r}-{v!r} is not sent to an edge")

    @classmethod
    def make(cls, total_edges, base_edges, mapping: Mapping, total_vertices=(), base_vertices=()) -> "GraphMap":
        total = nx.Graph()
        total.add_nodes_from(total_vertices)
        total.add_edges_from(tuple(e) for e in total_edges)
        base = nx.Graph()
        base.add_nodes_from(base_vertices)
        base.add_edges_from(tuple(e) for e in base_edges)
        return cls(total, base, dict(mapping))

    def fiber(self, b: Hashable) -> list[Hashable]:
        return sorted((v for v, image in self.mapping.items() if image == b), key=str)

    def labelled_total(self) -> nx.Graph:
        g = self.total.copy()
        nx.set_node_attributes(g, {v: str(self.mapping[v]) for v in g}, "base")
        return g


@dataclass
class GraphCoveringReport:
    is_covering: bool
    witness: Optional[Hashable] = None
    reason: str = ""
    fiber_size: int = 0
    deck_group: list[dict] = field(default_factory=list)

    @property
    def deck_order(self) -> int:
        return len(self.deck_group)

    @property
    def is_regular(self) -> bool:
        return self.is_covering and self.deck_order == self.fiber_size

    def to_json(self) -> dict:
        out: dict = {"covering": self.is_covering}
        if self.is_covering:
            out.update(
                {
                    "fiber_size": self.fiber_size,
                    "deck_order": self.deck_order,
                    "regular": self.is_regular,
                    "deck_group": [
                        {str(k): str(v) for k, v in sorted(perm.items(), key=lambda kv: str(kv[0]))}
                        for perm in self.deck_group
                    ],
                }
            )
        else:
            out.update({"witness": str(self.witness), "reason": self.reason})
        return out


def _star_witness(p: GraphMap) -> Optional[tuple[Hashable, str]]:
    for b in sorted(p.base.nodes, key=str):
        if not p.fiber(b):
            return b, "base vertex has an empty fiber"
    for v in sorted(p.total.nodes, key=str):
        images = [p.mapping[w] for w in p.total.neighbors(v)]
        if len(set(images)) != len(images):
            return v, "star is folded"
        if set(images) != set(p.base.neighbors(p.mapping[v])):
            return v, "star does not cover the star of its image"
    return None


def deck_group(p: GraphMap) -> list[dict]:
    """Automorphisms of the total graph commuting with the projection."""
    g = p.labelled_total()
    group = list(nx.vf2pp_all_isomorphisms(g, g, node_label="base"))
    return sorted(group, key=lambda perm: sorted((str(k), str(v)) for k, v in perm.items()))


def graph_covering_check(p: GraphMap) -> GraphCoveringReport:
    found = _star_witness(p)
    if found is not None:
        witness, reason = found
        logger.info("graph map is not a covering at %s: %s", witness, reason)
        return GraphCoveringReport(False, witness, reason)
    first = sorted(p.base.nodes, key=str)[0]
    report = GraphCoveringReport(True, fiber_size=len(p.fiber(first)), deck_group=deck_group(p))
    if nx.is_connected(p.total) and report.fiber_size % report.deck_order:
        logger.warning("deck group order %s does not divide fiber size %s", report.deck_order, report.fiber_size)
    logger.info("graph covering of degree %s, deck group of order %s", report.fiber_size, report.deck_order)
    return report


def covering_factorization(p1: GraphMap, p2: GraphMap) -> Optional[dict]:
    """A graph map f with p2 f = p1, found by lifting along a breadth-first search."""
    for p in (p1, p2):
        if not graph_covering_check(p).is_covering:
            raise DomainError("factorization needs two coverings")
    if not nx.utils.graphs_equal(p1.base, p2.base):
        raise DomainError("coverings have different bases")
    if not nx.is_connected(p1.total):
        raise DomainError("the factored covering must be connected")
    root = sorted(p1.total.nodes, key=str)[0]
    for start in p2.fiber(p1.mapping[root]):
        f = {root: start}
        queue = deque([root])
        consistent = True
        while queue and consistent:
            v = queue.popleft()
            for w in p1.total.neighbors(v):
                candidates = [c for c in p2.total.neighbors(f[v]) if p2.mapping[c] == p1.mapping[w]]
                if len(candidates) != 1:
                    consistent = False
                    break
                if w in f:
                    if f[w] != candidates[0]:
                        consistent = False
                        break
                    continue
                f[w] = candidates[0]
                queue.append(w)
        if consistent:
            logger.info("covering factors through the second covering")
            return f
    logger.info("no factor map between the coverings")
    return None
