import argparse
import sys

from pydantic import ValidationError

from routes import analysis_route, construct_route, nset_route
from services.errors import AchieveError
from services.file_service import describe_validation_error

from logger import get_logger
logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (stdout when omitted)")
    common.add_argument("--seed", type=int, default=None, help="echoed in reports")

    parser = argparse.ArgumentParser(
        prog="achieve",
        description="Decide, construct and refute achievability of finite symmetric subsets of Z^n",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    analysis_route.register(subparsers, common)
    nset_route.register(subparsers, common)
    construct_route.register(subparsers, common)
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid arguments for {args.command}: {describe_validation_error(e)}")
        return 1
    except AchieveError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
