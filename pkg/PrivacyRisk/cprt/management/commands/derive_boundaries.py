from django.conf import settings
from django.core.management.base import CommandError

from ...dataset_io import DUAL, MAJORITY, build_ground_truth, load_annotations, load_ground_truth
from ...derivation import save_checkpoint, write_boundary_file, write_projection_csv
from ...pipelines import run_boundary_derivation
from ..base import INPUT_ERROR, CPRTCommand

HYPERPARAM_FLAGS = ('dim', 'epochs', 'learning_rate', 'batch_size', 'base_margin', 'ordinal_scale')


class Command(CPRTCommand):
    help = (
        'Re-derive level boundaries: train attribute embeddings with an ordinal triplet loss, '
        'score each sample by leave-one-out IDW, and take a per-level percentile threshold.'
    )

    def add_command_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument('--ground-truth', help='Ground-truth JSONL providing merged attribute vectors')
        source.add_argument('--annotations', help='Annotation JSONL, merged with --mode first')
        parser.add_argument('--mode', choices=[DUAL, MAJORITY], default=DUAL, help='Merge rule for --annotations')
        parser.add_argument('--output', required=True, help='Boundary file to write')
        parser.add_argument('--checkpoint', help='Also write the trained embedding matrix here')
        parser.add_argument('--projection-csv', help='Also write a 2-component PCA projection of the samples')
        parser.add_argument('--seed', type=int, default=settings.CPRT_SEED, help='Seed for initialisation and triplet sampling')
        parser.add_argument(
            '--percentile', type=float, default=settings.CPRT_BOUNDARY_PERCENTILE,
            help="Percentile of each level's leave-one-out scores taken as its lower edge",
        )
        parser.add_argument('--dim', type=int, help='Embedding dimension (default: CPRT_EMBEDDING)')
        parser.add_argument('--epochs', type=int, help='Training epochs')
        parser.add_argument('--learning-rate', type=float, help='AdamW learning rate')
        parser.add_argument('--batch-size', type=int, help='Triplets per optimiser step')
        parser.add_argument('--base-margin', type=float, help='Constant part of the triplet margin')
        parser.add_argument('--ordinal-scale', type=float, help='Margin added per level between anchor and negative')

    def run(self, **options):
        registry = self.registry(options)
        if options['ground_truth']:
            records = load_ground_truth(self.require_file(options['ground_truth'], '--ground-truth'), registry)
        else:
            annotations = load_annotations(self.require_file(options['annotations'], '--annotations'), registry)
            records = build_ground_truth(annotations, registry, mode=options['mode'])
        if not records:
            raise CommandError("No samples to derive boundaries from", returncode=INPUT_ERROR)

        hyperparams = {key: options[key] for key in HYPERPARAM_FLAGS if options.get(key) is not None}
        derivation = run_boundary_derivation(
            [r.merged_attributes for r in records],
            registry,
            hyperparams=hyperparams,
            seed=options['seed'],
            percentile=options['percentile'],
        )

        write_boundary_file(derivation.boundaries, options['output'], derivation.metadata)
        if options['checkpoint']:
            save_checkpoint(derivation.model, options['checkpoint'])
        if options['projection_csv']:
            write_projection_csv(derivation.refs, options['projection_csv'])

        self.stdout.write(f"seed={options['seed']}")
        for level, (low, high) in enumerate(derivation.boundaries.to_intervals(), start=1):
            self.stdout.write(f"L{level}: [{low:.3f}, {high:.3f}{']' if level == 1 else ')'}")
