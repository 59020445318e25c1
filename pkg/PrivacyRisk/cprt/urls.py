from django.urls import path
from .views import (
    BoundaryDerivationSubmission,
    ClassifyView,
    EvaluationSubmission,
    JobStatus,
    ScoreView,
    TaxonomyDetail,
)

urlpatterns = [
    path('taxonomy/', TaxonomyDetail.as_view(), name='taxonomy-detail'),
    path('score/', ScoreView.as_view(), name='score'),
    path('classify/', ClassifyView.as_view(), name='classify'),
    path('evaluations/', EvaluationSubmission.as_view(), name='evaluation-submit'),
    path('boundary-derivations/', BoundaryDerivationSubmission.as_view(), name='boundary-derivation-submit'),
    path('jobs/<uuid:job_id>/', JobStatus.as_view(), name='job-status'),
]
