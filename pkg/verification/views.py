# verification/views.py
import json

import pandas as pd
from django.contrib import messages
from django.contrib.auth import authenticate, login, logout
from django.contrib.auth.decorators import login_required
from django.db.models import Count, Q
from django.http import HttpResponse, JsonResponse
from django.shortcuts import get_object_or_404, redirect, render
from django.utils import timezone

from .config import SUITES
from .models import CheckResult, VerificationRun


# ========================
# AUTHENTICATION VIEWS
# ========================

def adminLoginView(request):
    if request.user.is_authenticated:
        return redirect('dashboard')
    if request.method == 'POST':
        user = authenticate(
            request,
            username=request.POST.get('username'),
            password=request.POST.get('password')
        )
        if user and user.is_superuser:
            login(request, user)
            messages.success(request, f"Welcome, Admin {user.username}!")
            return redirect('dashboard')
        messages.error(request, "Invalid credentials or not an admin.")
        return redirect('login')
    return render(request, 'registration/login.html')


def adminLogoutView(request):
    logout(request)
    messages.success(request, "Logged out successfully.")
    return redirect('login')


# ========================
# DASHBOARD
# ========================

def _latest_by_suite():
    latest = {}
    for suite in SUITES + ('all',):
        run = VerificationRun.objects.filter(suite=suite).exclude(status='RUNNING').first()
        if run:
            latest[suite] = run
    return latest


@login_required
def dashboard(request):
    runs = VerificationRun.objects.annotate(
        n_checks=Count('checks'),
        n_failed=Count('checks', filter=Q(checks__passed=False)),
    )
    latest = _latest_by_suite()

    # pass rate of every suite over its recorded checks
    rates = CheckResult.objects.values('suite') \
        .annotate(total=Count('id'), passed=Count('id', filter=Q(passed=True))) \
        .order_by('suite')
    suite_labels = [r['suite'] for r in rates]
    suite_rates = [round(100 * r['passed'] / r['total'], 1) if r['total'] else 0 for r in rates]

    context = {
        'total_runs': VerificationRun.objects.count(),
        'passed_runs': VerificationRun.objects.filter(status='PASSED').count(),
        'failed_runs': VerificationRun.objects.filter(status='FAILED').count(),
        'error_runs': VerificationRun.objects.filter(status='ERROR').count(),
        'recent_runs': runs[:20],
        'latest': latest,
        'suite_labels': json.dumps(suite_labels),
        'suite_rates': json.dumps(suite_rates),
    }
    return render(request, 'verification/dashboard.html', context)


@login_required
def dashboard_data(request):
    last = VerificationRun.objects.first()
    return JsonResponse({
        'total_runs': VerificationRun.objects.count(),
        'failed_runs': VerificationRun.objects.filter(status='FAILED').count(),
        'last_run': {
            'id': last.pk,
            'suite': last.suite,
            'seed': last.seed,
            'status': last.status,
            'passed': last.passed_count(),
            'failed': last.failed_count(),
        } if last else None,
        'latest': {suite: run.status for suite, run in _latest_by_suite().items()},
        'timestamp': timezone.now().isoformat(),
    })


# ========================
# RUNS
# ========================

@login_required
def run_detail(request, pk):
    run = get_object_or_404(VerificationRun, pk=pk)
    checks = run.checks.all()
    status = request.GET.get('status')
    if status == 'PASS':
        checks = checks.filter(passed=True)
    elif status == 'FAIL':
        checks = checks.filter(passed=False)
    search = request.GET.get('search', '')
    if search:
        checks = checks.filter(Q(name__icontains=search) | Q(detail__icontains=search) | Q(suite__icontains=search))

    if request.GET.get('export') == 'csv':
        df = pd.DataFrame(list(checks.values('suite', 'name', 'passed', 'anchor', 'detail')),
                          columns=['suite', 'name', 'passed', 'anchor', 'detail'])
        df['status'] = df['passed'].map({True: 'PASS', False: 'FAIL'})
        response = HttpResponse(content_type='text/csv')
        response['Content-Disposition'] = f'attachment; filename="run_{run.pk}_{run.suite}_checks.csv"'
        df[['suite', 'name', 'status', 'anchor', 'detail']].to_csv(response, index=False)
        return response

    context = {
        'run': run,
        'checks': checks,
        'status_filter': status,
        'search_query': search,
        'passed_count': run.passed_count(),
        'failed_count': run.failed_count(),
    }
    return render(request, 'verification/run_detail.html', context)
