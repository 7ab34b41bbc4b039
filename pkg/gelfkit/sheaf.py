"""Presheaves and sheaves of finitely generated abelian groups on finite spaces.

Open sets are point masks of the base ``FiniteSpace``. A finite space is
Alexandrov, so the stalk at ``x`` is the group over the minimal open ``U_x``
and sheafification is the group of compatible germ families.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional, Sequence

import networkx as nx

from gelfkit.abelian import (
    AbelianGroup,
    AbHom,
    CyclicSum,
    FgAbGroup,
    Subquotient,
    Vector,
    zero_matrix,
)
from gelfkit.error import ResourceError, StructuralError
from gelfkit.finite_space import ContinuousMap, FiniteSpace, initial_topology, topology_generated_by
from gelfkit.utils import bits, setup_logging

logger = setup_logging(__name__)

MAX_COVER_OPENS = 16


@dataclass(frozen=True, eq=False)
class FinitePresheaf:
    base: FiniteSpace
    sections: Mapping[int, AbelianGroup]
    restrictions: Mapping[tuple[int, int], AbHom] = field(repr=False)

    def __post_init__(self) -> None:
        for u in self.base.opens:
            if u not in self.sections:
                raise StructuralError(f"no sections given over {self.base.open_name(u)}")
        for (u, v), hom in self.restrictions.items():
            if v & ~u:
                raise StructuralError(f"restriction from {self.base.open_name(u)} to a non subset")
            if hom.source.orders != self.sections[u].orders or hom.target.orders != self.sections[v].orders:
                raise StructuralError(
                    f"restriction {self.base.open_name(u)} > {self.base.open_name(v)} has the wrong groups"
                )
        for u, v in self.nested_pairs():
            if (u, v) not in self.restrictions:
                raise StructuralError(f"restriction {self.base.open_name(u)} > {self.base.open_name(v)} missing")

    @classmethod
    def make(
        cls,
        base: FiniteSpace,
        sections: Mapping[int, AbelianGroup],
        restrictions: Mapping[tuple[int, int], AbHom],
    ) -> "FinitePresheaf":
        """Fill identities, composites of given maps and maps touching trivial groups."""
        maps = dict(restrictions)
        for u in base.opens:
            maps.setdefault((u, u), AbHom.identity(sections[u]))
        changed = True
        while changed:
            changed = False
            for (u, v), first in list(maps.items()):
                for (v2, w), second in list(maps.items()):
                    if v2 == v and (u, w) not in maps:
                        maps[(u, w)] = first.compose(second)
                        changed = True
        for u in base.opens:
            for v in base.opens:
                if v & ~u == 0 and (u, v) not in maps:
                    if sections[u].dim == 0 or sections[v].dim == 0 or sections[v].is_trivial:
                        maps[(u, v)] = AbHom.zero(sections[u], sections[v])
        return cls(base, dict(sections), maps)

    def nested_pairs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.base.opens for v in self.base.opens if v & ~u == 0]

    def rho(self, u: int, v: int) -> AbHom:
        try:
            return self.restrictions[(u, v)]
        except KeyError as err:
            raise StructuralError(f"no restriction {self.base.open_name(u)} > {self.base.open_name(v)}") from err

    def group(self, u: int) -> AbelianGroup:
        try:
            return self.sections[u]
        except KeyError as err:
            raise StructuralError(f"{self.base.open_name(u)} is not open") from err

    def to_json(self) -> dict:
        return {
            "space": self.base.to_json(),
            "sections": {str(self.base.open_index(u)): _group_json(g) for u, g in self.sections.items()},
        }


def _group_json(g: AbelianGroup) -> dict:
    if isinstance(g, FgAbGroup):
        return g.to_json()
    return CyclicSum(g.orders).invariants().to_json()


@dataclass
class Verdict:
    ok: bool = True
    witnesses: list[str] = field(default_factory=list)

    def fail(self, witness: str) -> None:
        self.ok = False
        self.witnesses.append(witness)

    def to_json(self) -> dict:
        return {"ok": self.ok, "witnesses": list(self.witnesses)}


def check_presheaf(p: FinitePresheaf) -> Verdict:
    verdict = Verdict()
    x = p.base
    if not p.group(0).is_trivial:
        verdict.fail("sections over the empty set are not zero")
    for u in x.opens:
        if not p.rho(u, u).same_map(AbHom.identity(p.group(u))):
            verdict.fail(f"restriction {x.open_name(u)} > {x.open_name(u)} is not the identity")
    for u, v in p.nested_pairs():
        for w in x.opens:
            if w & ~v == 0:
                direct = p.rho(u, w)
                composite = p.rho(u, v).compose(p.rho(v, w))
                if not direct.same_map(composite):
                    verdict.fail(f"restrictions {x.open_name(u)} > {x.open_name(v)} > {x.open_name(w)} do not compose")
    return verdict


def covers_of(x: FiniteSpace, u: int) -> list[tuple[int, ...]]:
    """Covers of ``u`` by nonempty proper open subsets."""
    inside = [v for v in x.opens if v and v != u and v & ~u == 0]
    if len(inside) > MAX_COVER_OPENS:
        raise ResourceError(f"{x.open_name(u)} has {len(inside)} open subsets, cover enumeration is capped")
    out = []
    for k in range(1, len(inside) + 1):
        for family in combinations(inside, k):
            union = 0
            for v in family:
                union |= v
            if union == u:
                out.append(family)
    return out


def _restriction_to_family(p: FinitePresheaf, u: int, family: Sequence[int]) -> AbHom:
    target = CyclicSum.direct_sum(p.group(v) for v in family)
    rows: list[list[int]] = []
    for v in family:
        rows.extend(p.rho(u, v).rows())
    return AbHom.make(p.group(u), target, rows if rows else zero_matrix(0, p.group(u).dim))


def _compatibility(p: FinitePresheaf, family: Sequence[int]) -> AbHom:
    """(s_i) -> (s_i|U_ij - s_j|U_ij) over pairs i < j."""
    source = CyclicSum.direct_sum(p.group(v) for v in family)
    offsets = []
    total = 0
    for v in family:
        offsets.append(total)
        total += p.group(v).dim
    pairs = list(combinations(range(len(family)), 2))
    target = CyclicSum.direct_sum(p.group(family[i] & family[j]) for i, j in pairs)
    rows: list[list[int]] = []
    for i, j in pairs:
        w = family[i] & family[j]
        ri = p.rho(family[i], w).rows()
        rj = p.rho(family[j], w).rows()
        for r in range(p.group(w).dim):
            row = [0] * total
            for c, value in enumerate(ri[r]):
                row[offsets[i] + c] += value
            for c, value in enumerate(rj[r]):
                row[offsets[j] + c] -= value
            rows.append(row)
    return AbHom.make(source, target, rows if rows else zero_matrix(0, total))


@dataclass
class SheafVerdict:
    presheaf: Verdict
    separation: Verdict
    gluing: Verdict

    @property
    def ok(self) -> bool:
        return self.presheaf.ok and self.separation.ok and self.gluing.ok

    def to_json(self) -> dict:
        return {
            "sheaf": self.ok,
            "presheaf": self.presheaf.to_json(),
            "separation": self.separation.to_json(),
            "gluing": self.gluing.to_json(),
        }


def check_sheaf(p: FinitePresheaf) -> SheafVerdict:
    """Presheaf axioms plus separation and gluing for every cover of every open."""
    result = SheafVerdict(check_presheaf(p), Verdict(), Verdict())
    x = p.base
    checked = 0
    for u in x.opens:
        for family in covers_of(x, u):
            checked += 1
            names = ", ".join(x.open_name(v) for v in family)
            restrict = _restriction_to_family(p, u, family)
            kernel = restrict.kernel()
            if not kernel.group.is_trivial:
                result.separation.fail(f"over {x.open_name(u)} covered by {names}: nonzero section {list(kernel.lifts[0])} restricts to zero")
            compat = _compatibility(p, family)
            for lift in compat.kernel().lifts:
                if restrict.preimage(lift) is None:
                    result.gluing.fail(f"over {x.open_name(u)} covered by {names}: family {list(lift)} does not glue")
                    break
    logger.info("sheaf check over %s covers: %s", checked, result.ok)
    return result


@dataclass(frozen=True)
class Stalk:
    point: int
    open_set: int
    group: AbelianGroup
    maps: Mapping[int, AbHom] = field(repr=False)


def stalk(p: FinitePresheaf, x: int) -> Stalk:
    ux = p.base.minimal_open(x)
    maps = {u: p.rho(u, ux) for u in p.base.opens if u >> x & 1}
    return Stalk(x, ux, p.group(ux), maps)


def germ(p: FinitePresheaf, u: int, s: Sequence[int], x: int) -> Vector:
    if not u >> x & 1:
        raise StructuralError(f"point {p.base.points[x]} is not in {p.base.open_name(u)}")
    return p.rho(u, p.base.minimal_open(x))(s)


@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    source: FinitePresheaf
    target: FinitePresheaf
    components: Mapping[int, AbHom] = field(repr=False)

    @classmethod
    def identity(cls, p: FinitePresheaf) -> "PresheafMorphism":
        return cls(p, p, {u: AbHom.identity(p.group(u)) for u in p.base.opens})

    def compose(self, after: "PresheafMorphism") -> "PresheafMorphism":
        return PresheafMorphism(
            self.source, after.target, {u: self.components[u].compose(after.components[u]) for u in self.source.base.opens}
        )


def check_morphism(m: PresheafMorphism) -> Verdict:
    """Naturality squares for every nested pair of opens."""
    verdict = Verdict()
    if m.source.base != m.target.base:
        verdict.fail("morphism between presheaves on different spaces")
        return verdict
    x = m.source.base
    for u, v in m.source.nested_pairs():
        left = m.components[u].compose(m.target.rho(u, v))
        right = m.source.rho(u, v).compose(m.components[v])
        if not left.same_map(right):
            verdict.fail(f"square {x.open_name(u)} > {x.open_name(v)} does not commute")
    return verdict


@dataclass(frozen=True, eq=False)
class Sheafification:
    sheaf: FinitePresheaf
    theta: PresheafMorphism
    families: Mapping[int, Subquotient] = field(repr=False)
    points: Mapping[int, tuple[int, ...]] = field(repr=False)


def _germ_ambient(p: FinitePresheaf, u: int) -> tuple[tuple[int, ...], CyclicSum, list[int]]:
    pts = tuple(bits(u))
    groups = [p.group(p.base.minimal_open(x)) for x in pts]
    offsets = []
    total = 0
    for g in groups:
        offsets.append(total)
        total += g.dim
    return pts, CyclicSum.direct_sum(groups), offsets


def _family_constraints(p: FinitePresheaf, u: int) -> AbHom:
    """(s_x) -> (rho(s_x) - s_y) for y != x in U_x."""
    pts, ambient, offsets = _germ_ambient(p, u)
    x = p.base
    pairs = [(i, j) for i, a in enumerate(pts) for j, b in enumerate(pts) if i != j and x.minimal_open(a) >> b & 1]
    target = CyclicSum.direct_sum(p.group(x.minimal_open(pts[j])) for _, j in pairs)
    rows: list[list[int]] = []
    for i, j in pairs:
        ua, ub = x.minimal_open(pts[i]), x.minimal_open(pts[j])
        rho = p.rho(ua, ub).rows()
        for r in range(p.group(ub).dim):
            row = [0] * ambient.dim
            for c, value in enumerate(rho[r]):
                row[offsets[i] + c] += value
            row[offsets[j] + r] -= 1
            rows.append(row)
    return AbHom.make(ambient, target, rows if rows else zero_matrix(0, ambient.dim))


def sheafify(p: FinitePresheaf) -> Sheafification:
    """F+(U) = compatible families of germs over the points of U."""
    x = p.base
    families: dict[int, Subquotient] = {}
    ambients: dict[int, tuple[tuple[int, ...], CyclicSum, list[int]]] = {}
    for u in x.opens:
        ambients[u] = _germ_ambient(p, u)
        families[u] = _family_constraints(p, u).kernel()
    sections = {u: families[u].group for u in x.opens}
    restrictions: dict[tuple[int, int], AbHom] = {}
    for u, v in p.nested_pairs():
        pts_u, _, offsets_u = ambients[u]
        pts_v, ambient_v, _ = ambients[v]
        images = []
        for lift in families[u].lifts:
            vec: list[int] = []
            for y in pts_v:
                i = pts_u.index(y)
                width = p.group(x.minimal_open(y)).dim
                vec.extend(lift[offsets_u[i] : offsets_u[i] + width])
            images.append(list(families[v].coords(ambient_v.reduce(vec))))
        restrictions[(u, v)] = AbHom.from_images(sections[u], sections[v], images)
    sheaf = FinitePresheaf(x, sections, restrictions)
    theta_components = {}
    for u in x.opens:
        pts, ambient, _ = ambients[u]
        images = []
        for k in range(p.group(u).dim):
            gen = p.group(u).generator(k)
            vec = []
            for y in pts:
                vec.extend(p.rho(u, x.minimal_open(y))(gen))
            images.append(list(families[u].coords(ambient.reduce(vec))))
        theta_components[u] = AbHom.from_images(p.group(u), sections[u], images)
    theta = PresheafMorphism(p, sheaf, theta_components)
    logger.debug("sheafified presheaf over %s opens", len(x.opens))
    return Sheafification(sheaf, theta, families, {u: ambients[u][0] for u in x.opens})


@dataclass(frozen=True, eq=False)
class UniversalReport:
    exists: bool
    unique: bool
    factor: Optional[PresheafMorphism]
    witnesses: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"exists": self.exists, "unique": self.unique, "witnesses": list(self.witnesses)}


def verify_universal_property(sh: Sheafification, phi: PresheafMorphism) -> UniversalReport:
    """Factor ``phi: F -> G`` (G a sheaf) through theta and decide uniqueness."""
    g = phi.target
    x = g.base
    witnesses: list[str] = []
    if not check_sheaf(g).ok:
        return UniversalReport(False, False, None, ("target is not a sheaf",))
    components = {}
    for u in x.opens:
        pts = sh.points[u]
        minimal = [x.minimal_open(y) for y in pts]
        restrict = _restriction_to_family(g, u, minimal) if pts else None
        images = []
        for lift in sh.families[u].lifts:
            target_vec: list[int] = []
            offset = 0
            for y, uy in zip(pts, minimal):
                width = sh.theta.source.group(uy).dim
                target_vec.extend(phi.components[uy](lift[offset : offset + width]))
                offset += width
            value = restrict.preimage(target_vec) if restrict is not None else ()
            if value is None:
                witnesses.append(f"germs over {x.open_name(u)} do not glue in the target")
                return UniversalReport(False, False, None, tuple(witnesses))
            images.append(list(value))
        components[u] = AbHom.from_images(sh.sheaf.group(u), g.group(u), images)
    psi = PresheafMorphism(sh.sheaf, g, components)
    natural = check_morphism(psi)
    factors = sh.theta.compose(psi)
    agrees = all(factors.components[u].same_map(phi.components[u]) for u in x.opens)
    if not natural.ok:
        witnesses.extend(natural.witnesses)
    if not agrees:
        witnesses.append("psi composed with theta differs from phi")
    # psi is pinned down on every minimal open because theta is an isomorphism there,
    # and G(U) embeds into the product over the minimal opens of its points
    unique = all(sh.theta.components[x.minimal_open(y)].is_isomorphism() for y in range(x.size))
    for u in x.opens:
        pts = sh.points[u]
        if pts and not _restriction_to_family(g, u, [x.minimal_open(y) for y in pts]).is_injective():
            unique = False
    exists = natural.ok and agrees
    return UniversalReport(exists, unique, psi if exists else None, tuple(witnesses))


def direct_image(f: ContinuousMap, p: FinitePresheaf) -> FinitePresheaf:
    """(f_* F)(V) = F(f^-1 V)."""
    if f.source != p.base:
        raise StructuralError("presheaf lives on a different space")
    sections = {v: p.group(f.preimage(v)) for v in f.target.opens}
    restrictions = {
        (v, w): p.rho(f.preimage(v), f.preimage(w))
        for v in f.target.opens
        for w in f.target.opens
        if w & ~v == 0
    }
    return FinitePresheaf(f.target, sections, restrictions)


def _smallest_open_containing(x: FiniteSpace, mask: int) -> int:
    result = 0
    for y in bits(mask):
        result |= x.minimal_open(y)
    return result


def inverse_image_presheaf(f: ContinuousMap, g: FinitePresheaf) -> FinitePresheaf:
    """U -> G(smallest open containing f(U)), the finite colimit."""
    if f.target != g.base:
        raise StructuralError("presheaf lives on a different space")
    src = f.source
    hull = {u: _smallest_open_containing(f.target, f.image(u)) for u in src.opens}
    sections = {u: g.group(hull[u]) for u in src.opens}
    restrictions = {(u, v): g.rho(hull[u], hull[v]) for u in src.opens for v in src.opens if v & ~u == 0}
    return FinitePresheaf(src, sections, restrictions)


def inverse_image(f: ContinuousMap, g: FinitePresheaf) -> FinitePresheaf:
    return sheafify(inverse_image_presheaf(f, g)).sheaf


def section_support(p: FinitePresheaf, s: Sequence[int]) -> int:
    """Points where the germ of a global section is nonzero; closed."""
    x = p.base
    top = x.full
    group = p.group(top)
    s = group.reduce(s)
    mask = 0
    for y in range(x.size):
        if not p.group(x.minimal_open(y)).is_zero_element(germ(p, top, s, y)):
            mask |= 1 << y
    if not x.is_closed(mask):
        raise StructuralError(f"support {x.open_name(mask)} is not closed")
    return mask


def is_flasque(p: FinitePresheaf) -> bool:
    return all(p.rho(u, v).is_surjective() for u, v in p.nested_pairs())


def zero_presheaf(base: FiniteSpace) -> FinitePresheaf:
    trivial = FgAbGroup.trivial()
    return FinitePresheaf.make(base, {u: trivial for u in base.opens}, {})


def constant_presheaf(base: FiniteSpace, group: AbelianGroup) -> FinitePresheaf:
    """Same group over every nonempty open, identity restrictions."""
    trivial = FgAbGroup.trivial()
    sections = {u: (group if u else trivial) for u in base.opens}
    restrictions = {}
    for u in base.opens:
        for v in base.opens:
            if v & ~u == 0:
                if v:
                    restrictions[(u, v)] = AbHom.identity(group)
                else:
                    restrictions[(u, v)] = AbHom.zero(sections[u], trivial)
    return FinitePresheaf(base, sections, restrictions)


def skyscraper(base: FiniteSpace, point: int, group: AbelianGroup) -> FinitePresheaf:
    trivial = FgAbGroup.trivial()
    sections = {u: (group if u >> point & 1 else trivial) for u in base.opens}
    restrictions = {}
    for u in base.opens:
        for v in base.opens:
            if v & ~u == 0:
                if v >> point & 1:
                    restrictions[(u, v)] = AbHom.identity(group)
                else:
                    restrictions[(u, v)] = AbHom.zero(sections[u], trivial)
    return FinitePresheaf(base, sections, restrictions)


def components_of(base: FiniteSpace, mask: int) -> list[int]:
    """Connected components of the subspace ``mask``, as masks in point order."""
    graph = nx.Graph()
    pts = bits(mask)
    graph.add_nodes_from(pts)
    for a in pts:
        for b in pts:
            if a != b and base.minimal_open(a) >> b & 1:
                graph.add_edge(a, b)
    comps = [sum(1 << y for y in comp) for comp in nx.connected_components(graph)]
    return sorted(comps, key=lambda c: bits(c)[0])


def locally_constant_sheaf(base: FiniteSpace, group: AbelianGroup) -> FinitePresheaf:
    """One copy of ``group`` per connected component of each open."""
    comps = {u: components_of(base, u) for u in base.opens}
    sections = {u: CyclicSum(group.orders * len(comps[u])) for u in base.opens}
    d = group.dim
    restrictions = {}
    for u in base.opens:
        for v in base.opens:
            if v & ~u:
                continue
            rows = zero_matrix(d * len(comps[v]), d * len(comps[u]))
            for j, cv in enumerate(comps[v]):
                (i,) = [i for i, cu in enumerate(comps[u]) if cv & ~cu == 0]
                for r in range(d):
                    rows[j * d + r][i * d + r] = 1
            restrictions[(u, v)] = AbHom.make(sections[u], sections[v], rows)
    return FinitePresheaf(base, sections, restrictions)


@dataclass(frozen=True, eq=False)
class EtaleSpace:
    space: FiniteSpace
    projection: ContinuousMap
    germs: tuple[tuple[int, Vector], ...]

    def to_json(self) -> dict:
        return {
            "points": list(self.space.points),
            "opens": len(self.space.opens),
            "projection": list(self.projection.mapping),
        }


def etale_space(p: FinitePresheaf, window: Optional[int] = None, topology: str = "sections") -> EtaleSpace:
    """Disjoint union of the stalks with the sections or the initial topology."""
    x = p.base
    germs: list[tuple[int, Vector]] = []
    for y in range(x.size):
        group = p.group(x.minimal_open(y))
        if not group.is_finite and window is None:
            raise ResourceError(f"stalk at {x.points[y]} is infinite, pass a window")
        for element in group.elements(window or 0):
            germs.append((y, element))
    names = [f"{x.points[y]}:{','.join(map(str, e))}" for y, e in germs]
    index = {g: i for i, g in enumerate(germs)}
    mapping = tuple(y for y, _ in germs)
    if topology == "initial":
        space = initial_topology(names, [(mapping, x)])
    elif topology == "sections":
        subbasis = []
        for u in x.opens:
            group = p.group(u)
            if not group.is_finite and window is None:
                raise ResourceError(f"sections over {x.open_name(u)} are infinite, pass a window")
            for s in group.elements(window or 0):
                mask = 0
                for y in bits(u):
                    key = (y, p.group(x.minimal_open(y)).reduce(germ(p, u, s, y)))
                    if key in index:
                        mask |= 1 << index[key]
                subbasis.append(mask)
        space = topology_generated_by(names, subbasis)
    else:
        raise StructuralError(f"unknown etale topology {topology!r}")
    projection = ContinuousMap(space, x, mapping)
    logger.info("etale space with %s germs over %s points", len(germs), x.size)
    return EtaleSpace(space, projection, tuple(germs))


__all__ = [
    "EtaleSpace",
    "FinitePresheaf",
    "PresheafMorphism",
    "Sheafification",
    "Stalk",
    "Verdict",
    "check_morphism",
    "check_presheaf",
    "check_sheaf",
    "components_of",
    "constant_presheaf",
    "covers_of",
    "direct_image",
    "etale_space",
    "germ",
    "inverse_image",
    "is_flasque",
    "locally_constant_sheaf",
    "section_support",
    "sheafify",
    "skyscraper",
    "stalk",
    "verify_universal_property",
    "zero_presheaf",
]
