import logging
from datetime import timedelta
from celery import shared_task
from django.utils import timezone
from django.conf import settings

from .config import boundary_source, get_registry
from .dataset_io import ground_truth_from_rows, predictions_from_rows
from .models import Job
from .pipelines import run_boundary_derivation, run_evaluation

logger = logging.getLogger(__name__)

@shared_task
def process_job(job_id):
    """
    Run the evaluation or boundary derivation stored on a job.
    This task is triggered when a job is submitted through the API.
    """
    try:
        logger.info(f"Processing job: {job_id}")

        job = Job.objects.get(id=job_id)
        if job.is_finished:
            logger.warning(f"Job {job_id} already {job.status.lower()}, skipping")
            return

        # Update status to in progress
        job.status = 'IN_PROGRESS'
        job.save(update_fields=['status'])

        registry = get_registry()
        if job.kind == 'EVALUATION':
            job.result = _run_evaluation_job(job.params, registry)
        else:
            job.result = _run_derivation_job(job.params, registry)

        job.status = 'COMPLETED'
        job.completed_at = timezone.now()
        job.save(update_fields=['status', 'result', 'completed_at'])
        logger.info(f"Job {job.id} completed")

    except Job.DoesNotExist:
        logger.error(f"Job {job_id} not found")
    except Exception as e:
        logger.exception(f"Error processing job {job_id}: {str(e)}")
        # Record the failure on the job itself
        try:
            Job.objects.filter(id=job_id).update(
                status='FAILED',
                error_detail=f"{type(e).__name__}: {e}"[:1000],
                completed_at=timezone.now()
            )
        except Exception as update_error:
            logger.exception(f"Error updating job status: {str(update_error)}")

def _run_evaluation_job(params, registry):
    ground_truth = ground_truth_from_rows(enumerate(params['ground_truth'], start=1), registry)
    predictions = predictions_from_rows(enumerate(params['predictions'], start=1))
    report = run_evaluation(
        ground_truth,
        predictions,
        registry,
        seed=params.get('seed'),
        max_pairs=params.get('max_pairs'),
        boundary_source=boundary_source(),
    )
    return report.to_dict()

def _run_derivation_job(params, registry):
    unknown = {a for sample in params['samples'] for a in sample['attributes']} - set(registry.ids)
    if unknown:
        raise KeyError(f"Unknown attribute ids: {sorted(unknown)}")
    vectors = [
        [1 if aid in sample['attributes'] else 0 for aid in registry.ids]
        for sample in params['samples']
    ]
    derivation = run_boundary_derivation(
        vectors,
        registry,
        hyperparams=params.get('hyperparams'),
        seed=params.get('seed'),
        percentile=params.get('percentile'),
    )
    return derivation.to_dict()

@shared_task
def cleanup_old_jobs():
    """
    Periodic task to clean up finished jobs
    This maintains the data retention policy (default 72 hours)
    """
    retention_hours = settings.CPRT_JOB_RETENTION_HOURS
    retention_threshold = timezone.now() - timedelta(hours=retention_hours)

    # Delete finished jobs older than retention period
    old_jobs = Job.objects.filter(
        status__in=Job.FINISHED_STATUSES,
        created_at__lt=retention_threshold
    )
    count = old_jobs.count()
    if count > 0:
        old_jobs.delete()
        logger.info(f"Cleaned up {count} jobs older than {retention_hours} hours")
    return count
