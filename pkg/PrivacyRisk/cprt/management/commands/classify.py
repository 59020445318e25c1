from django.core.management.base import CommandError

from ...taxonomy import classify_attribute
from ..base import INPUT_ERROR, CPRTCommand, csv_list

TRUE_VALUES = {'y', 'yes', 'true', '1'}
FALSE_VALUES = {'n', 'no', 'false', '0'}


def parse_answer(value):
    value = value.lower()
    if value in TRUE_VALUES:
        return True
    if value in FALSE_VALUES:
        return False
    raise CommandError(f"Answer must be yes/no, got {value!r}", returncode=INPUT_ERROR)


class Command(CPRTCommand):
    help = 'Level of an attribute from its answers to the four ordered decision questions (Q1..Q4).'
    uses_registry = False

    def add_command_arguments(self, parser):
        parser.add_argument('--answers', required=True, help='Four yes/no answers, e.g. no,yes,no,no')
        parser.add_argument('--json', action='store_true', help='Print level and label as JSON')

    def run(self, **options):
        level = classify_attribute([parse_answer(a) for a in csv_list(options['answers'])])
        if options['json']:
            self.emit_json({'level': int(level), 'label': level.label, 'name': level.name})
        else:
            self.stdout.write(level.label)
