from django.test import TestCase, override_settings
from django.utils import timezone
from unittest.mock import patch
import datetime
import uuid

from cprt.models import Job
from cprt.tasks import process_job, cleanup_old_jobs
from .factories import canonical_registry, noisy_predictions, random_ground_truth


def ground_truth_rows(records, registry):
    return [
        {
            'image_id': r.image_id,
            'attributes': r.attribute_ids(registry),
            'gt_score': r.gt_score,
            'gt_level': r.gt_level,
        }
        for r in records
    ]


class EvaluationJobTests(TestCase):
    def setUp(self):
        self.registry = canonical_registry()
        records = random_ground_truth(self.registry, 40, seed=3)
        scores = noisy_predictions(records, seed=3)
        self.job = Job.objects.create(
            kind='EVALUATION',
            params={
                'ground_truth': ground_truth_rows(records, self.registry),
                'predictions': [{'image_id': k, 'score': v} for k, v in scores.items()],
                'seed': 7,
            },
        )

    def test_process_evaluation_job(self):
        """Test running an evaluation job to completion"""
        process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'COMPLETED')
        self.assertIsNotNone(self.job.completed_at)
        self.assertEqual(self.job.result['n'], 40)
        self.assertEqual(self.job.result['metadata']['seed'], 7)
        self.assertEqual(self.job.result['metadata']['boundary_source'], 'canonical')

    def test_invalid_rows_fail_the_job(self):
        """Test that a tampered ground-truth row marks the job failed"""
        self.job.params['ground_truth'][0]['gt_score'] = 0.999
        self.job.save()

        process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'FAILED')
        self.assertTrue(self.job.error_detail.startswith('ParseError: Line 1'))
        self.assertIsNone(self.job.result)

    @patch('cprt.tasks.run_evaluation', side_effect=RuntimeError("boom"))
    def test_unexpected_error(self, mock_run):
        """Test that unexpected errors are recorded on the job"""
        process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'FAILED')
        self.assertEqual(self.job.error_detail, 'RuntimeError: boom')
        mock_run.assert_called_once()

    @patch('cprt.tasks.run_evaluation')
    def test_finished_job_is_not_rerun(self, mock_run):
        """Test that a redelivered task leaves a finished job untouched"""
        self.job.status = 'COMPLETED'
        self.job.result = {'n': 40}
        self.job.save()

        with self.assertLogs('cprt.tasks', level='WARNING'):
            process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'COMPLETED')
        self.assertEqual(self.job.result, {'n': 40})
        mock_run.assert_not_called()

    def test_missing_job(self):
        """Test processing a job id that does not exist"""
        with self.assertLogs('cprt.tasks', level='ERROR'):
            process_job(str(uuid.uuid4()))
        self.assertEqual(Job.objects.get(id=self.job.id).status, 'PENDING')


@override_settings(CPRT_EMBEDDING={'dim': 8, 'epochs': 3, 'learning_rate': 0.01, 'batch_size': 32})
class BoundaryDerivationJobTests(TestCase):
    def setUp(self):
        registry = canonical_registry()
        samples = []
        for level in (1, 2, 3, 4):
            ids = list(registry.ids_at_level(level))
            samples.extend({'attributes': ids[i % 3:i % 3 + 2]} for i in range(12))
        self.job = Job.objects.create(
            kind='BOUNDARY_DERIVATION',
            params={'samples': samples, 'seed': 5},
        )

    def test_process_derivation_job(self):
        """Test running a boundary derivation job to completion"""
        process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'COMPLETED')
        boundaries = self.job.result['boundaries']
        self.assertEqual(len(boundaries), 4)
        self.assertEqual(boundaries[0][1], 1.0)
        self.assertEqual(boundaries[3][0], 0.0)
        self.assertEqual(self.job.result['metadata']['seed'], 5)
        self.assertEqual(self.job.result['metadata']['hyperparams']['dim'], 8)

    def test_unknown_attribute(self):
        """Test that unknown attribute ids fail the job"""
        self.job.params['samples'][0]['attributes'] = ['shoe_size']
        self.job.save()

        process_job(str(self.job.id))

        self.job.refresh_from_db()
        self.assertEqual(self.job.status, 'FAILED')
        self.assertIn('shoe_size', self.job.error_detail)


class CleanupTaskTests(TestCase):
    def test_cleanup_old_jobs(self):
        """Test cleanup_old_jobs task"""
        now = timezone.now()
        old_time = now - datetime.timedelta(hours=100)  # Older than retention period

        finished = Job.objects.create(kind='EVALUATION', status='COMPLETED')
        failed = Job.objects.create(kind='EVALUATION', status='FAILED')
        pending = Job.objects.create(kind='EVALUATION', status='PENDING')
        recent = Job.objects.create(kind='EVALUATION', status='COMPLETED')

        # Set the timestamp manually since it's auto_now_add
        Job.objects.filter(id__in=[finished.id, failed.id, pending.id]).update(created_at=old_time)

        deleted = cleanup_old_jobs()

        self.assertEqual(deleted, 2)
        self.assertEqual(
            set(Job.objects.values_list('id', flat=True)),
            {pending.id, recent.id}
        )
