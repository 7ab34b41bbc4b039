"""Input documents to domain objects, and reports back to text.

Every loader validates against ``gelfkit.schema`` first; structural checks
that jsonschema cannot express surface as StructuralError from the domain
constructors.
"""
import json
from typing import Any, Optional

from gelfkit import linalg, schema
from gelfkit.abelian import AbHom, FgAbGroup, parse_group
from gelfkit.blowup import BlowingUp
from gelfkit.cech import AbstractCover, Cover, FiniteCover, ProductCover, projective_cover
from gelfkit.covering import CoveringQuadruple, GraphMap, TwoComplex
from gelfkit.error import SchemaError, StructuralError
from gelfkit.finite_space import FiniteSpace, open_lattice, vertex_star_cover
from gelfkit.gelfand_space import MorphismData, UltrafilterPoint
from gelfkit.linalg import Subspace
from gelfkit.matrix_algebra import AlgebraElement, Automorphism, BlockAlgebra, HereditaryCorner
from gelfkit.order import FilterRep, SemiLattice
from gelfkit.sheaf import FinitePresheaf
from gelfkit.utils import mask_of


def parse_text(text: str, kind: str, source: str = "<argument>") -> dict:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"{source} is not JSON: {err.msg} at line {err.lineno}") from err
    schema.validate(document, kind)
    return document


def load_document(path: str, kind: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err.strerror}") from err
    return parse_text(text, kind, path)


def dumps(report: Any) -> str:
    """Byte-stable JSON: sorted keys, fixed indentation."""
    return json.dumps(report, sort_keys=True, indent=2, separators=(",", ": "), ensure_ascii=False)


def render_text(report: Any, indent: int = 0) -> str:
    """The same report as indented key/value lines."""
    pad = "  " * indent
    lines = []
    if isinstance(report, dict):
        for key in sorted(report):
            value = report[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar_text(value)}")
    elif isinstance(report, list):
        for item in report:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar_text(item)}")
    else:
        lines.append(f"{pad}{_scalar_text(report)}")
    return "\n".join(lines)


def _scalar_text(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (dict, list)):
        return "{}" if isinstance(value, dict) else "[]"
    return str(value)


def algebra_from(doc: dict) -> BlockAlgebra:
    return BlockAlgebra(tuple(doc["blocks"]))


def point_from(doc: dict, alg: BlockAlgebra) -> UltrafilterPoint:
    alg.check_block(doc["block"])
    return UltrafilterPoint.of(alg, doc["block"], [linalg.parse_gauss(v) for v in doc["line"]])


def space_from(doc: dict) -> FiniteSpace:
    return FiniteSpace.from_sets(doc["points"], doc["opens"])


def _check_points(indices, size: int) -> None:
    for i in indices:
        if i >= size:
            raise StructuralError(f"point index {i} out of range")


def cover_from(doc: dict) -> Cover:
    if "members" in doc:
        space = space_from(doc["space"])
        for member in doc["members"]:
            _check_points(member, space.size)
        return FiniteCover(space, tuple(mask_of(m) for m in doc["members"]))
    if "faces" in doc:
        return AbstractCover.make(doc["size"], doc["faces"], doc.get("labels"))
    if "star_cover" in doc:
        faces = doc["star_cover"]
        space, members = vertex_star_cover(faces["simplices"], faces.get("vertices"))
        return FiniteCover(space, tuple(members))
    if "projective" in doc:
        spec = doc["projective"]
        n = spec["n"]
        subspaces = None
        if "subspaces" in spec:
            subspaces = [
                Subspace.span(n + 1, [[linalg.parse_gauss(v) for v in vec] for vec in vectors])
                for vectors in spec["subspaces"]
            ]
        return projective_cover(n, subspaces)
    product = doc["product"]
    return ProductCover(cover_from(product["base"]), cover_from(product["fiber"]))


def complex_from(doc: dict) -> tuple[TwoComplex, int]:
    x = TwoComplex.make(doc["vertices"], doc["edges"], doc.get("cells", []))
    base = doc.get("base", doc["vertices"][0])
    if base not in doc["vertices"]:
        raise StructuralError(f"base vertex {base!r} is not a vertex")
    return x, doc["vertices"].index(base)


def automorphism_from(doc: dict, alg: BlockAlgebra) -> Automorphism:
    if "conjugators" in doc:
        conjugators = tuple(linalg.matrix(m) for m in doc["conjugators"])
    else:
        conjugators = tuple(linalg.identity(n) for n in alg.block_dims)
    return Automorphism(alg, tuple(doc["permutation"]), conjugators)


def corner_from(doc: dict, alg: BlockAlgebra) -> HereditaryCorner:
    x = doc["block"]
    alg.check_block(x)
    n = alg.block_dims[x]
    span = Subspace.span(n, [[linalg.parse_gauss(v) for v in vec] for vec in doc["basis"]])
    return HereditaryCorner(alg, tuple(span if i == x else Subspace.zero(m) for i, m in enumerate(alg.block_dims)))


def quadruple_from(doc: dict) -> tuple[CoveringQuadruple, Optional[HereditaryCorner]]:
    base, total = algebra_from(doc["base"]), algebra_from(doc["total"])
    lift = MorphismData.from_multiplicities(base, total, doc["lift"]["multiplicities"])
    generators = [automorphism_from(g, total) for g in doc["generators"]]
    family = [automorphism_from(g, total) for g in doc.get("family", [])]
    q = CoveringQuadruple.make(lift, generators, family)
    corner = corner_from(doc["corner"], base) if "corner" in doc else None
    return q, corner


def graph_map_from(doc: dict) -> tuple[GraphMap, Optional[GraphMap]]:
    p = GraphMap.make(
        doc["total"]["edges"],
        doc["base"]["edges"],
        doc["map"],
        doc["total"].get("vertices", ()),
        doc["base"].get("vertices", ()),
    )
    through = graph_map_from(doc["through"])[0] if "through" in doc else None
    return p, through


def presheaf_from(doc: dict) -> FinitePresheaf:
    space = space_from(doc["space"])
    sections = {0: FgAbGroup.trivial()}
    for entry in doc["sections"]:
        _check_points(entry["open"], space.size)
        sections[mask_of(entry["open"])] = parse_group(entry["group"])
    for u in space.opens:
        if u not in sections:
            raise StructuralError(f"no sections given over {space.open_name(u)}")
    restrictions = {}
    for entry in doc.get("restrictions", []):
        u, v = mask_of(entry["from"]), mask_of(entry["to"])
        if u not in sections or v not in sections:
            raise StructuralError("restriction between sets that are not open")
        restrictions[(u, v)] = AbHom.make(sections[u], sections[v], entry["matrix"])
    return FinitePresheaf.make(space, sections, restrictions)


def element_from(doc: dict, alg: BlockAlgebra) -> AlgebraElement:
    return alg.element([linalg.matrix(m) for m in doc["blocks"]])


def blowup_from(doc: dict) -> tuple[BlowingUp, Optional[AlgebraElement], Any]:
    alg = algebra_from(doc["algebra"])
    space = FiniteSpace.discrete(doc["points"])
    b = BlowingUp(alg, space, tuple(doc["over"]))
    element = element_from(doc["element"], alg) if "element" in doc else None
    eps = linalg.rational(doc.get("eps", "1/10"))
    return b, element, eps


def lattice_from(doc: dict) -> tuple[SemiLattice, Optional[FilterRep], Optional[FiniteSpace]]:
    if "space" in doc:
        space = space_from(doc["space"])
        lat = open_lattice(space)
    else:
        space = None
        lat = SemiLattice.from_order(doc["elements"], [tuple(p) for p in doc["leq"]], doc["zero"])
    f = None
    if "filter" in doc:
        for i in doc["filter"]:
            if i >= lat.size:
                raise StructuralError(f"element index {i} out of range")
        f = FilterRep.of(doc["filter"])
    return lat, f, space
