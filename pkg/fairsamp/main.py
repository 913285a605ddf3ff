import argparse
import logging
import sys
from typing import List, Optional

from fairsamp.core.config import get_settings
from fairsamp.core.errors import ConfigurationError
from fairsamp.utils.output_formatter import OutputFormatter
from fairsamp.workbench import discover_handlers


def build_parser(handlers) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='fairsamp', description='Grover-mixer QAOA fair-sampling workbench')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='overrides FAIRSAMP_LOG_LEVEL')
    sub = parser.add_subparsers(dest='command', required=True, metavar='command')
    for name, handler in handlers.items():
        handler.add_arguments(sub.add_parser(name, help=handler.description, description=handler.description))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    handlers = discover_handlers()
    args = build_parser(handlers).parse_args(argv)
    try:
        settings = get_settings()
    except ConfigurationError as e:
        print(OutputFormatter.format_error(str(e)), file=sys.stderr)
        return 1
    logging.basicConfig(level=args.log_level or settings.log_level,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    result = handlers[args.command].run(args, settings)
    if result.success:
        print(result.content)
        return 0
    print(result.content, file=sys.stderr)
    return 1


if __name__ == '__main__':
    sys.exit(main())
