"""
Shared plumbing for the cprt management commands.

Exit codes: 0 ok, 1 input error, 2 property or validation failure,
3 internal error.
"""
import argparse
import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ..config import boundary_source, get_registry
from ..exceptions import InputError, ValidationFailure

logger = logging.getLogger(__name__)

INPUT_ERROR = 1
VALIDATION_FAILURE = 2
INTERNAL_ERROR = 3


class CPRTCommand(BaseCommand):
    uses_registry = True

    def add_arguments(self, parser):
        if self.uses_registry:
            parser.add_argument(
                '--taxonomy',
                help='Taxonomy file (default: CPRT_TAXONOMY_PATH, else the shipped canonical taxonomy)',
            )
            parser.add_argument(
                '--boundaries',
                help='Derived boundary file overriding the taxonomy boundaries (default: CPRT_BOUNDARY_PATH)',
            )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except CommandError:
            raise
        except InputError as e:
            raise CommandError(str(e), returncode=INPUT_ERROR)
        except ValidationFailure as e:
            raise CommandError(str(e), returncode=VALIDATION_FAILURE)
        except (OSError, KeyError, ValueError) as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=INPUT_ERROR)
        except Exception as e:
            logger.exception(f"Internal error in {self.__module__}: {str(e)}")
            raise CommandError(f"Internal error: {e}", returncode=INTERNAL_ERROR)

    def registry(self, options):
        return get_registry(options.get('taxonomy'), options.get('boundaries'), cached=False)

    def boundary_source(self, options):
        return boundary_source(options.get('boundaries'))

    def require_file(self, path, flag):
        if not path or not Path(path).is_file():
            raise CommandError(f"{flag}: no such file: {path}", returncode=INPUT_ERROR)
        return path

    def format_json(self, data):
        return json.dumps(data, indent=2, sort_keys=True)

    def emit_json(self, data):
        self.stdout.write(self.format_json(data))


def positive_int(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def csv_list(value):
    return [item.strip() for item in value.split(',') if item.strip()]
