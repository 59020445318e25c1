from django.contrib import admin
from .models import Job

@admin.register(Job)
class JobAdmin(admin.ModelAdmin):
    list_display = ('id', 'kind', 'status', 'created_at', 'completed_at')
    search_fields = ('id',)
    list_filter = ('kind', 'status', 'created_at')
    readonly_fields = ('params', 'result', 'error_detail')
    date_hierarchy = 'created_at'
