from logger import get_logger
from schemas.achieve_schema import ConstructionReport, GeneralConstructionReport
from services import constructor_service as cs
from services import file_service as fs
from services.errors import AchieveError

logger = get_logger(__name__)


def construction_to_schema(result: cs.Construction) -> ConstructionReport:
    return ConstructionReport(
        k=result.k,
        target=result.target.to_lists(),
        achieved_set=result.achieved.to_lists(),
        witness=fs.witness_to_schema(result.witness),
    )


def construct(args) -> int:
    try:
        spec = fs.load_spec(args.spec)
        signs = tuple(tuple(row) for row in spec.signs)
        if spec.u is not None or spec.v is not None:
            if spec.u is None or spec.v is None:
                logger.error("Both u and v are needed for the general construction")
                return 1
            result = cs.build_general(spec.u, spec.v, spec.a_list, spec.b_list, signs)
            report = GeneralConstructionReport(
                matrix=[list(row) for row in result.matrix],
                achieved_set_of_target=result.achieved_set_of_target.to_lists(),
                witness_for_pullback=fs.witness_to_schema(result.pullback.witness),
                pullback=construction_to_schema(result.pullback),
                reasoning=result.reasoning,
                seed=args.seed,
            )
        else:
            result = cs.build_from_generators(
                cs.GeneratorSpec(
                    tuple(tuple(a) for a in spec.a_list),
                    tuple(tuple(b) for b in spec.b_list),
                    signs,
                )
            )
            report = construction_to_schema(result)
            report.seed = args.seed
        fs.write_report(report, args.out)
        logger.info(f"Construction from {args.spec} written")
        return 0
    except AchieveError as e:
        logger.error(f"Error constructing from {args.spec}: {e.detail}")
        return e.exit_code


def register(subparsers, common):
    p = subparsers.add_parser("construct", parents=[common], help="witness from generator lists")
    p.add_argument("--spec", required=True)
    p.set_defaults(handler=construct)
