from logger import get_logger
from schemas.achieve_schema import AchievedReport, IdealReport, RenderOptions, SearchMode
from services import file_service as fs
from services import nset_service as ns
from services.errors import AchieveError
from services.render_service import render_svg
from services.search_service import verify_witness

logger = get_logger(__name__)


def achieved(args) -> int:
    try:
        K = fs.load_witness(args.witness)
        result = ns.achieved_set(K)
        report = AchievedReport(n=K.n, k=K.k, achieved_set=result.to_lists(), seed=args.seed)
        if args.set:
            A = fs.load_set(args.set, args.strict)
            report.target = A.to_lists()
            report.mode = SearchMode(args.mode)
            report.achieves_target = verify_witness(A, K, report.mode)
            logger.info(f"Witness {'achieves' if report.achieves_target else 'does not achieve'} {args.set} ({args.mode})")
        fs.write_report(report, args.out)
        return 0
    except AchieveError as e:
        logger.error(f"Error computing the achieved set of {args.witness}: {e.detail}")
        return e.exit_code


def ideal(args) -> int:
    try:
        K = fs.load_witness(args.witness)
        result = ns.achieved_ideal(K)
        report = IdealReport(
            n=result.n,
            k=K.k,
            classes=[[list(p) for p in c] for c in result.classes],
            ranks=list(result.ranks),
            order=[list(pair) for pair in result.order],
            observed=list(result.observed),
            maximal=list(result.maximal()),
            rank_counts={str(r): c for r, c in result.rank_counts().items()},
            seed=args.seed,
        )
        fs.write_report(report, args.out)
        return 0
    except AchieveError as e:
        logger.error(f"Error computing the achieved ideal of {args.witness}: {e.detail}")
        return e.exit_code


def render(args) -> int:
    try:
        K = fs.load_witness(args.witness)
        opts = RenderOptions(cell_size=args.cell_size, show_grid=not args.no_grid, show_labels=args.labels)
        fs.write_text(render_svg(K, opts), args.out)
        return 0
    except AchieveError as e:
        logger.error(f"Error rendering {args.witness}: {e.detail}")
        return e.exit_code


def register(subparsers, common):
    p = subparsers.add_parser("achieved", parents=[common], help="achieved set of a witness")
    p.add_argument("--witness", required=True)
    p.add_argument("--set", default=None, help="also check the witness against this set")
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default=SearchMode.exact.value)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(handler=achieved)

    p = subparsers.add_parser("ideal", parents=[common], help="achieved ideal of a witness")
    p.add_argument("--witness", required=True)
    p.set_defaults(handler=ideal)

    p = subparsers.add_parser("render", parents=[common], help="SVG drawing of a planar witness")
    p.add_argument("--witness", required=True)
    p.add_argument("--cell-size", dest="cell_size", type=float, default=40.0)
    p.add_argument("--no-grid", dest="no_grid", action="store_true")
    p.add_argument("--labels", action="store_true")
    p.set_defaults(handler=render)
