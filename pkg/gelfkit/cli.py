import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Optional

from gelfkit import __version__, codec
from gelfkit.abelian import parse_group
from gelfkit.blowup import approx_compact, blowup_factorization, gelfand_etale_bijection, u_subalgebra
from gelfkit.cech import cech_cohomology, cellular_cohomology, nerve, projective_comparison
from gelfkit.covering import (
    check_evenly_covered,
    check_unital_covering,
    covering_factorization,
    graph_covering_check,
    pi1_presentation,
)
from gelfkit.error import DomainError, InputError, ModeError, ResourceError, SchemaError
from gelfkit.finite_space import ultrafilter_limits
from gelfkit.gelfand_space import (
    belongs_to,
    bicommutant_is_injective,
    gelfand_bicommutant,
    gelfand_points,
    sample_points,
)
from gelfkit.linalg import format_rational, rational
from gelfkit.matrix_algebra import DEFAULT_TOLERANCE, center
from gelfkit.order import enumerate_ultrafilters, extend_to_ultrafilter, is_filter, is_principal, is_ultrafilter
from gelfkit.sheaf import check_sheaf, sheafify
from gelfkit.utils import bits, setup_logging

logger = setup_logging(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERDICT = 2

Report = tuple[dict, int]


@dataclass
# pylint: disable=too-many-instance-attributes
class Args:
    command: str
    algebra: Optional[str]
    point: Optional[str]
    space: Optional[str]
    coeff: str
    compare_projective: Optional[int]
    complex: Optional[str]
    quadruple: Optional[str]
    graph_map: Optional[str]
    presheaf: Optional[str]
    blowup: Optional[str]
    lattice: Optional[str]
    tol: str
    cap_dim: Optional[int]
    sample: int
    seed: int
    output_format: str
    debug: bool


def gelfand(args: Args) -> Report:
    alg = codec.algebra_from(codec.load_document(args.algebra, "algebra"))
    descr = gelfand_points(alg)
    report = {
        "algebra": alg.to_json(),
        "gelfand": descr.to_json(),
        "center": center(alg).to_json(),
        "bicommutant_injective": bicommutant_is_injective(sample_points(alg, args.sample, args.seed)),
    }
    if args.point:
        xi = codec.point_from(codec.parse_text(args.point, "point"), alg)
        report["point"] = {
            **xi.to_json(),
            "belongs_to": belongs_to(xi),
            "bicommutant": gelfand_bicommutant(alg).of(xi).to_json(),
            "in_gelfand_space": descr.contains(xi),
        }
    return report, EXIT_OK


def cech(args: Args) -> Report:
    if args.compare_projective is not None:
        comparison = projective_comparison(args.compare_projective, args.cap_dim)
        return comparison.to_json(), EXIT_OK if comparison.agree else EXIT_VERDICT
    cover = codec.cover_from(codec.load_document(args.space, "cover"))
    groups = cech_cohomology(cover, parse_group(args.coeff), args.cap_dim)
    return {
        "H": [g.to_json() for g in groups],
        "coefficients": args.coeff,
        "nerve": nerve(cover, args.cap_dim).to_json(),
    }, EXIT_OK


def pi1(args: Args) -> Report:
    x, base = codec.complex_from(codec.load_document(args.complex, "complex"))
    presentation = pi1_presentation(x, base)
    h = cellular_cohomology(x)
    matches = h[1].rank == presentation.abelianization().rank
    report = {
        "presentation": presentation.to_json(),
        "generators": len(presentation.generators),
        "euler_characteristic": x.euler_characteristic(),
        "cellular_cohomology": [g.to_json() for g in h],
        "h1_matches": matches,
    }
    return report, EXIT_OK if matches else EXIT_VERDICT


def check_cover(args: Args) -> Report:
    if args.graph_map:
        p, through = codec.graph_map_from(codec.load_document(args.graph_map, "graph_map"))
        verdict = graph_covering_check(p)
        report: dict = {"graph_covering": verdict.to_json()}
        ok = verdict.is_covering
        if through is not None and ok:
            f = covering_factorization(p, through)
            report["factorization"] = {
                "exists": f is not None,
                "map": {str(k): str(v) for k, v in sorted((f or {}).items(), key=lambda kv: str(kv[0]))},
            }
        return report, EXIT_OK if ok else EXIT_VERDICT

    q, corner = codec.quadruple_from(codec.load_document(args.quadruple, "quadruple"))
    unital = check_unital_covering(q, sample_points(q.base, args.sample, args.seed))
    report = {"quadruple": q.to_json(), "unital_covering": unital.to_json()}
    ok = unital.ok
    if corner is not None:
        evenly = check_evenly_covered(q, corner)
        report["evenly_covered"] = evenly.to_json()
        ok = ok and evenly.ok
    return report, EXIT_OK if ok else EXIT_VERDICT


def sheafify_command(args: Args) -> Report:
    p = codec.presheaf_from(codec.load_document(args.presheaf, "presheaf"))
    verdict = check_sheaf(p)
    sh = sheafify(p)
    return {
        "input": verdict.to_json(),
        "sheafification": sh.sheaf.to_json(),
        "global_sections": sh.sheaf.group(p.base.full).to_json(),
    }, EXIT_OK


def blowup(args: Args) -> Report:
    b, element, eps = codec.blowup_from(codec.load_document(args.blowup, "blowup"))
    opens = []
    for u in b.space.opens:
        sub = u_subalgebra(b, u)
        opens.append({"open": bits(u), "blocks": sorted(sub.blocks), "dimension": sub.corner.dimension})
    sample = sample_points(b.algebra, args.sample, args.seed)
    factorization = blowup_factorization(b, sample)
    etale = gelfand_etale_bijection(b, sample)
    report = {
        "u_subalgebras": opens,
        "factorization": factorization.to_json(),
        "etale": etale.to_json(),
        "central": b.is_central(),
    }
    ok = factorization.commutes and etale.bijective
    if element is not None:
        approx = approx_compact(b, element, eps, rational(args.tol))
        report["element"] = approx.to_json()
        report["eps"] = format_rational(eps)
        ok = ok and approx.holds
    return report, EXIT_OK if ok else EXIT_VERDICT


def ultra(args: Args) -> Report:
    lat, f, space = codec.lattice_from(codec.load_document(args.lattice, "lattice"))
    ultrafilters = []
    for u in enumerate_ultrafilters(lat):
        generator = is_principal(lat, u)
        entry = {
            "members": [lat.names[i] for i in u.sorted_members()],
            "principal": lat.names[generator] if generator is not None else None,
        }
        if space is not None:
            entry["limits"] = [space.points[i] for i in bits(ultrafilter_limits(space, u))]
        ultrafilters.append(entry)
    report: dict = {"size": lat.size, "ultrafilters": ultrafilters}
    if f is not None:
        query: dict = {"members": [lat.names[i] for i in f.sorted_members()], "is_filter": is_filter(lat, f)}
        if query["is_filter"]:
            query["is_ultrafilter"] = is_ultrafilter(lat, f)
            query["extension"] = [lat.names[i] for i in extend_to_ultrafilter(lat, f).sorted_members()]
        report["filter"] = query
    return report, EXIT_OK


COMMANDS: dict[str, Callable[[Args], Report]] = {
    "gelfand": gelfand,
    "cech": cech,
    "pi1": pi1,
    "check-cover": check_cover,
    "sheafify": sheafify_command,
    "blowup": blowup,
    "ultra": ultra,
}


def run(args: Args) -> Report:
    """Report document and exit code; input problems become an error report."""
    try:
        return COMMANDS[args.command](args)
    except SchemaError as err:
        return {"error": err.message, "path": err.path}, EXIT_INPUT
    except (InputError, DomainError, ModeError) as err:
        return {"error": err.message}, EXIT_INPUT
    except ResourceError as err:
        partial = err.partial.to_json() if hasattr(err.partial, "to_json") else None
        return {"error": err.message, "truncated": err.truncated, "partial": partial}, EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        dest="output_format",
        action="store",
        choices=["json", "text"],
        default="json",
        help="report format",
    )
    common.add_argument(
        "--tol",
        dest="tol",
        action="store",
        default=format_rational(DEFAULT_TOLERANCE),
        help="enclosure tolerance, a rational such as 1/1000000000",
    )
    common.add_argument(
        "--cap-dim",
        dest="cap_dim",
        type=int,
        action="store",
        default=None,
        help="nerve dimension cap, overrides GELFKIT_CAP_DIM",
    )
    common.add_argument(
        "--sample", dest="sample", type=int, action="store", default=10, help="number of sampled points"
    )
    common.add_argument("--seed", dest="seed", type=int, action="store", default=0, help="seed for point sampling")
    common.add_argument(
        "--debug", dest="debug", action="store_true", default=False, help="enable debug"
    )

    parser = argparse.ArgumentParser(description=f"gelfkit: {__version__}")
    parser.set_defaults(
        algebra=None,
        point=None,
        space=None,
        coeff="Z",
        compare_projective=None,
        complex=None,
        quadruple=None,
        graph_map=None,
        presheaf=None,
        blowup=None,
        lattice=None,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("gelfand", parents=[common], help="Gelfand space and bicommutant of a block algebra")
    cmd.add_argument("--algebra", dest="algebra", action="store", required=True, help="algebra document")
    cmd.add_argument("--point", dest="point", action="store", help='point as JSON, {"block":0,"line":["1","0"]}')

    cmd = sub.add_parser("cech", parents=[common], help="Čech cohomology of a cover")
    cmd.add_argument("--space", dest="space", action="store", help="cover document")
    cmd.add_argument("--coeff", dest="coeff", action="store", default="Z", help="coefficient group, e.g. Z or Z/2")
    cmd.add_argument(
        "--compare-projective",
        dest="compare_projective",
        type=int,
        action="store",
        help="compare the hyperplane cover of CP^N with the cohomology of CP^N",
    )

    cmd = sub.add_parser("pi1", parents=[common], help="fundamental group presentation of a 2-complex")
    cmd.add_argument("--complex", dest="complex", action="store", required=True, help="complex document")

    cmd = sub.add_parser("check-cover", parents=[common], help="covering checks for algebras or graphs")
    cmd.add_argument("--quadruple", dest="quadruple", action="store", help="covering quadruple document")
    cmd.add_argument("--graph-map", dest="graph_map", action="store", help="graph map document")

    cmd = sub.add_parser("sheafify", parents=[common], help="sheaf check and sheafification")
    cmd.add_argument("--presheaf", dest="presheaf", action="store", required=True, help="presheaf document")

    cmd = sub.add_parser("blowup", parents=[common], help="Hausdorff blowing-up over a finite discrete space")
    cmd.add_argument("--blowup", dest="blowup", action="store", required=True, help="blowing-up document")

    cmd = sub.add_parser("ultra", parents=[common], help="ultrafilters of a finite semilattice")
    cmd.add_argument("--lattice", dest="lattice", action="store", required=True, help="lattice document")
    return parser


def main() -> None:
    logger.info("gelfkit: %s", __version__)

    parser = build_parser()
    args = Args(**vars(parser.parse_args()))

    if args.command == "cech" and not args.space and args.compare_projective is None:
        parser.error("please use --space or --compare-projective")
    elif args.command == "check-cover" and bool(args.quadruple) == bool(args.graph_map):
        parser.error("please use exactly one of --quadruple or --graph-map")
    elif args.sample < 0:
        parser.error("--sample must be non negative")
    elif args.cap_dim is not None and args.cap_dim < 0:
        parser.error("--cap-dim must be non negative")
    try:
        rational(args.tol)
    except InputError:
        parser.error(f"--tol must be a rational, got {args.tol}")

    if args.debug:
        setup_logging(name=__name__, level=logging.DEBUG)
        for name in list(logging.root.manager.loggerDict):
            if name.startswith("gelfkit."):
                setup_logging(name=name, level=logging.DEBUG)

    report, code = run(args)
    if code == EXIT_INPUT:
        logger.error("%s", report["error"])
    print(codec.render_text(report) if args.output_format == "text" else codec.dumps(report))
    sys.exit(code)


if __name__ == "__main__":
    main()
