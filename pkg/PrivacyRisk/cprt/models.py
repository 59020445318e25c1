from django.db import models
import uuid

class Job(models.Model):
    KIND_CHOICES = [
        ('EVALUATION', 'Evaluation'),
        ('BOUNDARY_DERIVATION', 'Boundary Derivation'),
    ]
    STATUS_CHOICES = [
        ('PENDING', 'Pending'),
        ('IN_PROGRESS', 'In Progress'),
        ('COMPLETED', 'Completed'),
        ('FAILED', 'Failed')
    ]
    FINISHED_STATUSES = ('COMPLETED', 'FAILED')

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    kind = models.CharField(max_length=32, choices=KIND_CHOICES)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='PENDING')
    params = models.JSONField(default=dict, blank=True)
    result = models.JSONField(null=True, blank=True)
    error_detail = models.TextField(blank=True)
    created_at = models.DateTimeField(auto_now_add=True)
    completed_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        indexes = [
            models.Index(fields=['status', 'created_at'], name='cprt_job_status_created_idx'),
            models.Index(fields=['-created_at'], name='cprt_job_created_idx'),  # For retention cleanup
        ]

    def __str__(self):
        return f"{self.get_kind_display()} job {self.id}"

    @property
    def is_finished(self):
        return self.status in self.FINISHED_STATUSES
