# verification/models.py
from django.contrib.auth.models import User
from django.db import models
from django.utils import timezone


# ========================
#  VERIFICATION RUNS
# ========================
class VerificationRun(models.Model):
    STATUS_CHOICES = [
        ('RUNNING', 'Running'),
        ('PASSED', 'Passed'),
        ('FAILED', 'Failed'),
        ('ERROR', 'Input error'),
    ]

    suite = models.CharField(max_length=30, help_text="Suite name, or 'all'")
    seed = models.PositiveIntegerField(default=0)
    depth = models.PositiveIntegerField(default=0)
    length = models.PositiveIntegerField(default=0)
    n_max = models.PositiveIntegerField(default=0)
    workers = models.PositiveIntegerField(default=1)
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default='RUNNING')
    started_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(null=True, blank=True)
    report_path = models.CharField(max_length=500, blank=True)
    message = models.TextField(blank=True)
    created_by = models.ForeignKey(User, on_delete=models.SET_NULL, null=True, blank=True)

    class Meta:
        ordering = ['-started_at']
        verbose_name_plural = "Verification Runs"

    def __str__(self):
        return f"{self.suite} (seed {self.seed}) - {self.get_status_display()}"

    def passed_count(self):
        return self.checks.filter(passed=True).count()
    passed_count.short_description = "Passed"

    def failed_count(self):
        return self.checks.filter(passed=False).count()
    failed_count.short_description = "Failed"

    def duration(self):
        if not self.finished_at:
            return None
        return self.finished_at - self.started_at
    duration.short_description = "Duration"

    def finish(self, status, report_path='', message=''):
        self.status = status
        self.finished_at = timezone.now()
        self.report_path = str(report_path)
        self.message = message
        self.save()


class CheckResult(models.Model):
    run = models.ForeignKey(VerificationRun, on_delete=models.CASCADE, related_name='checks')
    suite = models.CharField(max_length=30)
    name = models.CharField(max_length=200)
    anchor = models.TextField(blank=True, help_text="Quoted statement the check reproduces")
    passed = models.BooleanField(default=False)
    detail = models.TextField(blank=True)

    class Meta:
        ordering = ['run', 'id']
        verbose_name_plural = "Check Results"

    def __str__(self):
        return f"{self.suite}/{self.name}: {'PASS' if self.passed else 'FAIL'}"
