# verification/suites.py
"""
The verification suites behind ``manage.py verify``.

Every suite takes a ``Workspace`` and returns a list of ``Check`` records.
Heavy per-item work runs through ``run_tasks``: the items and their seeds are
fixed before any worker starts and results come back in item order, so a
report never depends on the worker count.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from laminations.cones import (
    ConeError, brute_force_rays, extreme_rays, is_recurrent, verify_cone_identity,
)
from laminations.splitting import (
    Side, SplitError, SplitMove, central_pieces, generate_partition_sequence, nesting_diameters, split,
    verify_partition_properties,
)
from laminations.standard import FamilyError, load_standard_family, standard_partition
from laminations.tracks import (
    TrackClass, TrackError, canonical_digest, canonical_key, enumerate_subtracks, is_filling, large_branches,
    region_census, subtrack,
)
from noebeling.construction import approximation_family, local_finiteness_report
from noebeling.geometry import (
    PathError, Point3, certify_path, dumps_paths, random_certified_path, random_point, random_segment,
    sample_refute,
)
from noebeling.grid import (
    CoverError, boundary_grid_connected, dumps_cover, grid_of_cover, random_cover, square_loop_violations,
    uniform_cover,
)

logger = logging.getLogger(__name__)

KEY_LEMMA_MAX_DEPTH = 2
NESTING_MEASURES = 50
NESTING_DECAY = Fraction(1, 100)
ORACLE_TRACKS = 100
ORACLE_SEGMENTS = 100
ORACLE_SAMPLES = 10_000
NOEBELING_PATHS = 20
NOEBELING_SAMPLES = 10
NOEBELING_LEVEL = 1
CLAIM_COVERS = 1000
DETAIL_ITEMS = 5

ANCHORS = {
    'complete-census': 'five once-punctured monogons and one triangle',
    'nearly-complete-census': 'four once-punctured monogons and one once-punctured bigon',
    'key-lemma-i': r'no proper subtrack of $\sigma$ is filling',
    'key-lemma-ii': 'removing at least two branches',
    'cone-identity': r'P(\eta_L) \cap P(\eta_R) = P(\sigma)',
    'generation': r'a sequence $\S = ((\Tau_k, \Sigma_k))_{k=0}^\infty$ of train track partitions',
    'subdivision': r"V(\eta) \subset V(\eta')",
    'adjacency': r'removing the $1$--skeleta of $P(\eta)$',
    'full-splits': r'belongs to $\Tau_{k+1} \cup \Sigma_{k+1}$',
    'disjointness': r'all $V(\tau)$ are pairwise disjoint',
    'nesting': r'full $\lambda$--splitting sequence',
    'rays': 'has the structure of an affine polyhedron',
    'paths': 'removing all points with at least two rational coordinates',
    'approximation': r'the image of the path $g_n$ is contained in $N_\frac{1}{n}(\Gamma)$',
    'local-finiteness': r'$g_n(I^m)\cap U=\emptyset$ for sufficiently large $n$',
    'square-loops': (r'the square loop which is the boundary of the common face of $V_1$ and $V_2$ '
                     r'is contained in $\Gamma$'),
    'boundary-grid': r'$\partial V\cap \Gamma$ is connected (and non-empty)',
}

# one random stream per suite, whatever else runs
STREAMS = {'nesting': 1, 'oracles': 2, 'noebeling': 3, 'claims': 4}

INPUT_ERRORS = (FamilyError, TrackError, CoverError, PathError)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    anchor: str = ''
    detail: str = ''
    data: dict = field(default_factory=dict)

    @property
    def status(self):
        return 'PASS' if self.passed else 'FAIL'


def _summary(items):
    items = list(items)
    shown = '; '.join(str(i) for i in items[:DETAIL_ITEMS])
    return shown + (f" (+{len(items) - DETAIL_ITEMS} more)" if len(items) > DETAIL_ITEMS else '')


def run_tasks(fn, items, workers=1):
    """``[fn(item) for item in items]``, spread over a process pool when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def task_seeds(seed, suite, count):
    stream = np.random.SeedSequence([seed, STREAMS[suite]])
    return [int(s) for s in stream.generate_state(count)]


# ========================
#  WORKSPACE
# ========================
class Workspace:
    """Inputs shared by the suites of one run, loaded on first use."""

    def __init__(self, config):
        self.config = config
        self.artifacts = {}

    @cached_property
    def family(self):
        return load_standard_family(self.config.family)

    @cached_property
    def sequence(self):
        p0 = standard_partition(self.family)
        return generate_partition_sequence(p0, self.config.depth, self.config.max_tracks)

    def tracks(self, depth, kind):
        """Distinct tracks of ``kind`` in the partitions up to ``depth``, family first."""
        seen, found = set(), []
        candidates = [r.track for r in self.family.records() if r.declared is kind]
        for partition in self.sequence.partitions[:depth + 1]:
            members = partition.complete if kind is TrackClass.COMPLETE else partition.nearly_complete
            candidates += [m.track for m in members]
        for track in candidates:
            key = canonical_key(track)
            if key not in seen:
                seen.add(key)
                found.append(track)
        return found

    def artifact(self, name, text):
        path = self.config.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.artifacts[name] = path
        return path


# ========================
#  CENSUS
# ========================
def census_checks(ws):
    checks = []
    for record in ws.family.records():
        census = region_census(record.track)
        expected = 'complete' if record.declared is TrackClass.COMPLETE else 'nearly-complete'
        ok = census.holds and (census.is_complete if expected == 'complete' else census.is_nearly_complete)
        checks.append(Check('census', f"family/{record.name}", ok, ANCHORS[f"{expected}-census"],
                            f"{census}; euler {census.euler_sum}"))
    for partition in ws.sequence.partitions[1:]:
        for kind, members in (('complete', partition.complete), ('nearly-complete', partition.nearly_complete)):
            wrong = []
            for member in members:
                census = region_census(member.track)
                if not (census.holds and (census.is_complete if kind == 'complete' else census.is_nearly_complete)):
                    wrong.append(f"{member.name}: {census}")
            detail = f"{len(members)} tracks" + (f"; wrong: {_summary(wrong)}" if wrong else '')
            checks.append(Check('census', f"depth-{partition.depth}/{kind}", not wrong,
                                ANCHORS[f"{kind}-census"], detail))
    return checks


# ========================
#  KEY LEMMA
# ========================
def filling_proper_subtracks(track):
    return [sorted(p.branches) for p in enumerate_subtracks(track, proper=True) if is_filling(p)[0]]


def filling_deep_subtracks(track):
    """Subtracks missing at least two branches that fill, skipping connected non-recurrent ones."""
    found = []
    for piece in enumerate_subtracks(track, proper=True):
        if piece.deletions < 2:
            continue
        if piece.connected and not is_recurrent(piece.track):
            continue
        if is_filling(piece)[0]:
            found.append(sorted(piece.branches))
    return found


def key_lemma_checks(ws):
    depth = min(ws.config.depth, KEY_LEMMA_MAX_DEPTH)
    checks = []
    for name, kind, task, anchor in (
        ('nearly-complete', TrackClass.NEARLY_COMPLETE, filling_proper_subtracks, 'key-lemma-i'),
        ('complete', TrackClass.COMPLETE, filling_deep_subtracks, 'key-lemma-ii'),
    ):
        tracks = ws.tracks(depth, kind)
        logger.info('key lemma: %d %s tracks through depth %d', len(tracks), name, depth)
        results = run_tasks(task, tracks, ws.config.workers)
        for track, filling in zip(tracks, results):
            if filling:
                logger.warning('%s has filling subtracks %s', track, filling[:DETAIL_ITEMS])
        bad = [f"{t.name}: {_summary(f)}" for t, f in zip(tracks, results) if f]
        detail = f"{len(tracks)} tracks through depth {depth}" + (f"; filling: {_summary(bad)}" if bad else '')
        checks.append(Check('key-lemma', f"{name}/depth-{depth}", not bad, ANCHORS[anchor], detail))
    return checks


# ========================
#  CONE IDENTITY
# ========================
def split_identities(track):
    """Both splits at every large branch against the central split; returns the failures."""
    larges = large_branches(track)
    failures = []
    for b in larges:
        try:
            children = [split(track, SplitMove(b, side)) for side in Side]
            report = verify_cone_identity(track, children, central_pieces(track, b))
        except (SplitError, ConeError) as exc:
            failures.append(f"branch {b}: {exc}")
            continue
        if not report.holds:
            failures.append(f"branch {b}: {report.witnesses[:2]} {report.notes}")
    return len(larges), failures


def cone_identity_checks(ws):
    # members of the last partition are never split
    depth = max(ws.sequence.depth - 1, 0)
    tracks = ws.tracks(depth, TrackClass.COMPLETE)
    results = run_tasks(split_identities, tracks, ws.config.workers)
    checks = []
    for track, (count, failures) in zip(tracks, results):
        detail = f"{count} large branches" + (f"; {_summary(failures)}" if failures else '')
        checks.append(Check('cone-identity', track.name or canonical_digest(track), not failures,
                            ANCHORS['cone-identity'], detail))
    return checks


# ========================
#  PARTITIONS
# ========================
def partition_checks(ws):
    sequence = ws.sequence
    sizes = ', '.join(f"{len(p.complete)}+{len(p.nearly_complete)}" for p in sequence.partitions)
    checks = [Check('partition', 'generation', not sequence.truncated, ANCHORS['generation'],
                    f"depth {sequence.depth} of {ws.config.depth}; sizes {sizes}"
                    + ('; truncated at the track cap' if sequence.truncated else ''))]
    report = verify_partition_properties(sequence)
    for name in ('subdivision', 'adjacency', 'full-splits', 'disjointness'):
        violations = [v for v in report.violations if v.property == name]
        detail = f"{report.checked.get(name, 0)} checked"
        if violations:
            detail += f"; {_summary(violations)}"
        if name == 'adjacency' and report.assumptions:
            detail += f"; assumes {_summary(report.assumptions)}"
        checks.append(Check('partition', name, not violations, ANCHORS[name], detail))
    return checks


# ========================
#  NESTING
# ========================
def nesting_run(item):
    track, weights, length = item
    try:
        run = nesting_diameters(track, weights, length)
    except SplitError as exc:
        return None, str(exc)
    return run, None


def random_measure(rng, track):
    rays = extreme_rays(track)
    coefficients = [int(c) for c in rng.integers(1, 1000, size=len(rays))]
    return tuple(sum(c * r[i] for c, r in zip(coefficients, rays)) for i in range(track.num_branches))


def nesting_checks(ws):
    tracks = [r.track for r in ws.family.complete]
    items = []
    for index, seed in enumerate(task_seeds(ws.config.seed, 'nesting', NESTING_MEASURES)):
        track = tracks[index % len(tracks)]
        items.append((track, random_measure(np.random.default_rng(seed), track), ws.config.length))
    results = run_tasks(nesting_run, items, ws.config.workers)

    checks = []
    for index, ((track, weights, length), (run, error)) in enumerate(zip(items, results)):
        name = f"measure-{index:02d}"
        if error:
            checks.append(Check('nesting', name, False, ANCHORS['nesting'], f"{track.name}: {error}"))
            continue
        data = {'track': track.name, 'weights': [str(w) for w in weights],
                'diameters': [str(d) for d in run.diameters], 'degenerate_at': run.degenerate_at}
        detail = f"{track.name}: {len(run.diameters)} diameters, final ratio {float(run.ratio or 0):.3e}"
        ok = run.nonincreasing
        if not ok:
            detail += '; diameter grew'
        if run.degenerate_at is not None:
            detail += f"; DEGENERATE after {run.degenerate_at} steps, decay not required"
        elif len(run.diameters) == length and not (run.ratio is not None and run.ratio < NESTING_DECAY):
            ok = False
            detail += f"; ratio not below {NESTING_DECAY}"
        checks.append(Check('nesting', name, ok, ANCHORS['nesting'], detail, data))
    return checks


# ========================
#  ORACLES
# ========================
def random_recurrent_track(rng, pool):
    """A recurrent track with at most twelve branches: a few random splits, sometimes one branch fewer."""
    track = pool[int(rng.integers(len(pool)))]
    for _ in range(int(rng.integers(0, 4))):
        larges = large_branches(track)
        if not larges:
            break
        move = SplitMove(larges[int(rng.integers(len(larges)))], Side.LEFT if rng.random() < 0.5 else Side.RIGHT)
        try:
            child, _ = split(track, move)
        except SplitError:
            continue
        if is_recurrent(child):
            track = child
    if rng.random() < 0.5:
        for b in rng.permutation(track.num_branches):
            try:
                piece = subtrack(track, [int(b)])
            except TrackError:
                continue
            if piece.connected and is_recurrent(piece.track):
                return piece.track
    return track


def ray_oracle(track):
    fast = extreme_rays(track)
    return track.num_branches, len(fast), fast == brute_force_rays(track)


def path_oracle(seed):
    rng = np.random.default_rng(seed)
    path = random_segment(rng)
    certified = bool(certify_path(path))
    witness = sample_refute(path, ORACLE_SAMPLES, rng)
    return certified, str(witness) if witness else None


def oracle_checks(ws):
    seeds = task_seeds(ws.config.seed, 'oracles', ORACLE_TRACKS + ORACLE_SEGMENTS)
    pool = [r.track for r in ws.family.records()]
    tracks = [random_recurrent_track(np.random.default_rng(s), pool) for s in seeds[:ORACLE_TRACKS]]
    rays = run_tasks(ray_oracle, tracks, ws.config.workers)
    mismatched = [f"track {i} ({e} branches)" for i, (e, _, same) in enumerate(rays) if not same]
    checks = [Check('oracles', 'extreme-rays', not mismatched, ANCHORS['rays'],
                    f"{len(tracks)} tracks, {sum(n for _, n, _ in rays)} rays"
                    + (f"; brute force differs on {_summary(mismatched)}" if mismatched else ''))]

    paths = run_tasks(path_oracle, seeds[ORACLE_TRACKS:], ws.config.workers)
    missed = [f"segment {i}: {w}" for i, (certified, w) in enumerate(paths) if certified and w]
    rejected = sum(1 for certified, _ in paths if not certified)
    found = sum(1 for _, w in paths if w)
    checks.append(Check('oracles', 'path-certification', not missed, ANCHORS['paths'],
                        f"{len(paths)} segments, {rejected} rejected, {found} refuted by sampling"
                        + (f"; certified despite {_summary(missed)}" if missed else '')))
    return checks


# ========================
#  NOEBELING
# ========================
def noebeling_run(item):
    seed, n_max = item
    rng = np.random.default_rng(seed)
    cover = uniform_cover(NOEBELING_LEVEL)
    grid = grid_of_cover(cover)
    path = random_certified_path(rng)
    family = approximation_family(path, cover, range(1, n_max + 1), grid)
    problems = []
    for n, result in family.items():
        report = result.report
        if not report.certification:
            problems.append(f"n={n}: not certified ({report.certification.witness})")
        if report.far_segments:
            problems.append(f"n={n}: segments {report.far_segments} farther than 1/{n}")
        if report.escapes:
            problems.append(f"n={n}: {report.escapes[0]}")
    centre = Point3(Fraction(1, 4), Fraction(1, 4), Fraction(1, 4))
    samples = [centre] + [random_point(rng) for _ in range(NOEBELING_SAMPLES - 1)]
    finite = local_finiteness_report({n: r.path for n, r in family.items()}, samples, cover, grid)
    avoided = [(s.threshold, len(s.checked), s.holds) for s in finite.samples]
    named = [('f', path)] + [(f"g{n}", r.path) for n, r in family.items()]
    return problems, avoided, named


def noebeling_checks(ws):
    n_max = ws.config.n_max
    seeds = task_seeds(ws.config.seed, 'noebeling', NOEBELING_PATHS)
    results = run_tasks(noebeling_run, [(s, n_max) for s in seeds], ws.config.workers)
    checks, named = [], []
    for index, (problems, avoided, paths) in enumerate(results):
        name = f"path-{index:02d}"
        named += [(f"{name}-{label}", path) for label, path in paths]
        checks.append(Check('noebeling', f"{name}/approximation", not problems, ANCHORS['approximation'],
                            f"n=1..{n_max}" + (f"; {_summary(problems)}" if problems else '')))
        failed = sum(1 for _, _, ok in avoided if not ok)
        checked = sum(c for _, c, _ in avoided)
        thresholds = ' '.join(str(t) for t, _, _ in avoided)
        checks.append(Check('noebeling', f"{name}/local-finiteness", not failed, ANCHORS['local-finiteness'],
                            f"thresholds {thresholds}; {checked} path checks, {failed} samples hit"))
    ws.artifact('noebeling.cover', dumps_cover(uniform_cover(NOEBELING_LEVEL)))
    ws.artifact('noebeling.paths', dumps_paths(named))
    return checks


# ========================
#  CLAIMS
# ========================
def claim_run(item):
    kind, value = item
    cover = uniform_cover(value) if kind == 'uniform' else random_cover(np.random.default_rng(value))
    grid = grid_of_cover(cover)
    loops = [str(v) for v in square_loop_violations(grid)]
    cubes = [c for c in cover.maximal_cubes if cover.box.contains_cube(c)]
    split_up = [str(c) for c in cubes if not boundary_grid_connected(c, cover, grid)]
    return len(cover.pairs), loops, len(cubes), split_up


def claim_checks(ws):
    items = [('uniform', 1), ('uniform', 2)]
    items += [('random', s) for s in task_seeds(ws.config.seed, 'claims', CLAIM_COVERS)]
    results = run_tasks(claim_run, items, ws.config.workers)
    loops = [v for _, found, _, _ in results for v in found]
    disconnected = [c for _, _, _, found in results for c in found]
    pairs = sum(p for p, _, _, _ in results)
    cubes = sum(c for _, _, c, _ in results)
    return [
        Check('claims', 'square-loops', not loops, ANCHORS['square-loops'],
              f"{len(items)} covers, {pairs} pairs" + (f"; {_summary(loops)}" if loops else '')),
        Check('claims', 'boundary-grid', not disconnected, ANCHORS['boundary-grid'],
              f"{len(items)} covers, {cubes} maximal cubes" + (f"; disconnected: {_summary(disconnected)}"
                                                             if disconnected else '')),
    ]


SUITE_RUNNERS = {
    'census': census_checks,
    'key-lemma': key_lemma_checks,
    'cone-identity': cone_identity_checks,
    'partition': partition_checks,
    'nesting': nesting_checks,
    'oracles': oracle_checks,
    'noebeling': noebeling_checks,
    'claims': claim_checks,
}


def run_suite(ws, suite):
    logger.info('running suite %s (seed %d)', suite, ws.config.seed)
    checks = SUITE_RUNNERS[suite](ws)
    failed = [c for c in checks if not c.passed]
    if failed:
        logger.warning('suite %s: %d of %d checks failed', suite, len(failed), len(checks))
    else:
        logger.info('suite %s: all %d checks passed', suite, len(checks))
    return checks
