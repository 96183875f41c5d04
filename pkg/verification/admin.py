# verification/admin.py
from django.contrib import admin
from .models import CheckResult, VerificationRun


# ========================
#  RUN ADMIN
# ========================
class CheckResultInline(admin.TabularInline):
    model = CheckResult
    extra = 0
    fields = ['suite', 'name', 'passed', 'anchor', 'detail']
    readonly_fields = ['suite', 'name', 'passed', 'anchor', 'detail']
    can_delete = False


@admin.register(VerificationRun)
class VerificationRunAdmin(admin.ModelAdmin):
    list_display = ['suite', 'seed', 'depth', 'length', 'n_max', 'status', 'passed_count', 'failed_count', 'started_at']
    list_filter = ['status', 'suite', 'started_at']
    search_fields = ['suite', 'report_path', 'message']
    inlines = [CheckResultInline]
    readonly_fields = ['started_at', 'finished_at', 'duration', 'report_path']
    date_hierarchy = 'started_at'


# ========================
#  CHECK ADMIN
# ========================
@admin.register(CheckResult)
class CheckResultAdmin(admin.ModelAdmin):
    list_display = ['name', 'suite', 'passed', 'run']
    list_filter = ['passed', 'suite']
    search_fields = ['name', 'anchor', 'detail']
