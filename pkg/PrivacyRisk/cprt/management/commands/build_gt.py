from ...dataset_io import DUAL, MAJORITY, build_ground_truth, load_annotations, write_ground_truth
from ..base import CPRTCommand


class Command(CPRTCommand):
    help = 'Merge per-annotator labels into binary attribute vectors and write ground-truth scores.'

    def add_command_arguments(self, parser):
        parser.add_argument('--annotations', required=True, help='Annotation JSONL, one line per (image, annotator)')
        parser.add_argument('--output', required=True, help='Ground-truth JSONL to write')
        parser.add_argument(
            '--mode', choices=[DUAL, MAJORITY], default=DUAL,
            help='dual: exactly two annotators, 1 only when both say 1; majority: strict majority, ties to 0',
        )
        parser.add_argument('--split', default='', help='source_split tag stored on every record')

    def run(self, **options):
        registry = self.registry(options)
        annotations = load_annotations(self.require_file(options['annotations'], '--annotations'), registry)
        records = build_ground_truth(annotations, registry, mode=options['mode'], source_split=options['split'])
        write_ground_truth(records, options['output'], registry)
        self.stdout.write(f"Wrote {len(records)} ground-truth records to {options['output']}")
