import argparse

from config import DEFAULT_NODE_LIMIT, DEFAULT_THREADS
from logger import get_logger
from schemas.achieve_schema import (
    AnalysisReport,
    CatalogRecord,
    CatalogReport,
    CycleEntry,
    CycleReport,
    FrontierEntry,
    NecessaryCondition,
    NecessaryReport,
    SearchConfig,
    SearchMode,
    SearchReport,
    Verdict,
)
from services import assignment_service as asg
from services import file_service as fs
from services import search_service as ss
from services import structure_service as st
from services.errors import AchieveError, BudgetExceeded, NodeLimit
from services.lattice_service import hermite_basis, smith_invariants
from services.torus_service import TorusGraph

logger = get_logger(__name__)


def necessary_to_schema(report: st.NecessaryReport) -> NecessaryReport:
    return NecessaryReport(
        verdict=report.verdict,
        conditions=[NecessaryCondition(name=c.name, passed=c.passed, detail=c.detail) for c in report.conditions],
    )


def search_config(args, k: int = 3) -> SearchConfig:
    return SearchConfig(
        k=k,
        bound=args.bound,
        mode=SearchMode(args.mode),
        node_limit=args.node_limit,
        threads=args.threads,
    )


def _optional_search(search, A, label: str):
    try:
        return search(A)
    except BudgetExceeded as e:
        logger.warning(f"{label} skipped: {e.detail}")
        return None


def analyze(args) -> int:
    try:
        A = fs.load_set(args.set, args.strict)
        graph = st.characteristic_graph(A)
        necessary = st.necessary_report(A)
        lattice = hermite_basis(A.members, A.n)

        certificate = conjectural = None
        if args.certificate:
            given = fs.load_certificate(args.certificate)
            checked = st.validate_decomposition(A, [piece.S for piece in given.pieces], given.mode)
            if checked.conjectural:
                conjectural = checked
            else:
                certificate = checked
            logger.info(f"Certificate {args.certificate} holds for {args.set}")
        elif necessary.verdict == st.INCONCLUSIVE:
            if A.n == 2:
                certificate = _optional_search(st.obstruction_search, A, "Obstruction search")
            if certificate is None:
                conjectural = _optional_search(st.conjecture54_search, A, "Non-cyclic quotient search")

        report = AnalysisReport(
            n=A.n,
            set=A.to_lists(),
            pairs=[list(v) for v in graph.vertices],
            graph_edges=[list(e) for e in graph.edges],
            components=[B.to_lists() for B in st.components(graph)],
            hnf_basis=[list(h) for h in lattice.hnf_basis],
            quotient=smith_invariants(lattice).describe(),
            necessary=necessary_to_schema(necessary),
            certificate=fs.certificate_to_schema(certificate),
            conjectural_certificate=fs.certificate_to_schema(conjectural),
            seed=args.seed,
        )
        fs.write_report(report, args.out)
        definite = necessary.verdict != st.INCONCLUSIVE or certificate is not None
        logger.info(f"Analysis of {len(A)} elements: {necessary.verdict}, certificate={'yes' if certificate else 'no'}")
        return 0 if definite else 2
    except AchieveError as e:
        logger.error(f"Error analyzing set {args.set}: {e.detail}")
        return e.exit_code


def decide(args) -> int:
    try:
        A = fs.load_set(args.set, args.strict)
        decision = ss.decide(A, args.kmax, search_config(args))
        verdict = Verdict(
            verdict=decision.kind,
            mode=decision.mode,
            k=decision.k,
            witness=fs.witness_to_schema(decision.witness) if decision.witness else None,
            reason=decision.reason,
            certificate=fs.certificate_to_schema(decision.certificate),
            conjectural_certificate=fs.certificate_to_schema(decision.conjectural),
            frontier=[FrontierEntry(k=s.k, bound=s.bound, outcome=s.outcome, nodes=s.nodes) for s in decision.frontier],
            necessary=necessary_to_schema(decision.necessary),
            seed=args.seed,
        )
        fs.write_report(verdict, args.out)
        logger.info(f"Decision for {args.set}: {decision.kind}")
        return 2 if decision.kind == ss.UNKNOWN else 0
    except AchieveError as e:
        logger.error(f"Error deciding set {args.set}: {e.detail}")
        return e.exit_code


def search(args) -> int:
    try:
        A = fs.load_set(args.set, args.strict)
        cfg = search_config(args, args.k)
        limited = False
        try:
            witness = ss.find_witness(A, cfg)
        except NodeLimit as e:
            logger.warning(f"Search stopped at the node limit after {e.nodes} nodes")
            witness, limited = None, True
        report = SearchReport(
            found=witness is not None,
            k=cfg.k,
            bound=cfg.bound,
            mode=cfg.mode,
            witness=fs.witness_to_schema(witness) if witness else None,
            node_limit_reached=limited,
            seed=args.seed,
        )
        fs.write_report(report, args.out)
        return 0 if witness is not None else 2
    except AchieveError as e:
        logger.error(f"Error searching for a witness of {args.set}: {e.detail}")
        return e.exit_code


def catalog(args) -> int:
    try:
        result = ss.catalog(args.n, args.k, args.bound, args.node_limit)
        report = CatalogReport(
            n=result.n,
            k=result.k,
            bound=result.bound,
            partial=result.partial,
            nodes=result.nodes,
            admitted=result.admitted,
            records=[CatalogRecord(set=A.to_lists(), witness=fs.witness_to_schema(K)) for A, K in result.records],
            seed=args.seed,
        )
        fs.write_report(report, args.out)
        return 3 if result.partial else 0
    except AchieveError as e:
        logger.error(f"Error building catalog n={args.n}, k={args.k}: {e.detail}")
        return e.exit_code


def cycles(args) -> int:
    try:
        records = asg.simple_cycles(TorusGraph(2, args.k), args.max_len, embedded_only=args.embedded_only)
        report = CycleReport(
            k=args.k,
            max_len=args.max_len,
            count=len(records),
            cycles=[
                CycleEntry(vertices=[list(v) for v in r.vertices], winding=list(r.winding), embedded=r.embedded)
                for r in records
            ],
            seed=args.seed,
        )
        fs.write_report(report, args.out)
        return 0
    except AchieveError as e:
        logger.error(f"Error enumerating cycles on G_2,{args.k}: {e.detail}")
        return e.exit_code


def _search_flags(parser: argparse.ArgumentParser, mode: str):
    parser.add_argument("--bound", type=int, default=2, help="max sup-norm of any cell shift")
    parser.add_argument("--mode", choices=[m.value for m in SearchMode], default=mode)
    parser.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    parser.add_argument("--node-limit", dest="node_limit", type=int, default=DEFAULT_NODE_LIMIT)


def register(subparsers, common: argparse.ArgumentParser):
    p = subparsers.add_parser("analyze", parents=[common], help="necessary conditions, G(A) and obstructions")
    p.add_argument("--set", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--certificate", help="validate this decomposition instead of searching")
    p.set_defaults(handler=analyze)

    p = subparsers.add_parser("decide", parents=[common], help="refute, construct or report Unknown")
    p.add_argument("--set", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--kmax", type=int, default=4)
    _search_flags(p, SearchMode.exact.value)
    p.set_defaults(handler=decide)

    p = subparsers.add_parser("search", parents=[common], help="witness search at one resolution")
    p.add_argument("--set", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--k", type=int, default=3)
    _search_flags(p, SearchMode.exact.value)
    p.set_defaults(handler=search)

    p = subparsers.add_parser("catalog", parents=[common], help="all achieved sets at small resolution")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--bound", type=int, default=1)
    p.add_argument("--node-limit", dest="node_limit", type=int, default=DEFAULT_NODE_LIMIT)
    p.set_defaults(handler=catalog)

    p = subparsers.add_parser("cycles", parents=[common], help="vertex-simple cycles of G_2,k with winding vectors")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--max-len", dest="max_len", type=int, default=6)
    p.add_argument("--embedded-only", dest="embedded_only", action="store_true")
    p.set_defaults(handler=cycles)
