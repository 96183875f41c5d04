# laminations/tests/test_cones.py
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from laminations.cones import (
    ConeError, MeasureCone, brute_force_rays, cone_contains, cone_dim, dumps_certificate, extreme_rays,
    facet_description, is_recurrent, is_transversely_recurrent, loads_certificate, projective_diameter,
    relative_interior_contains, switch_matrix, verify_cone_identity,
)
from laminations.exact import dot
from laminations.splitting import Side, SplitError, SplitMove, central_pieces, central_split, full_splits, split
from laminations.tracks import (
    LARGE, SMALL_LEFT, SMALL_RIGHT, TrackClass, TrainTrack, classify_track, large_branches,
)

from .fixtures import S03, complete_tracks, dumbbell_track, nearly_complete_tracks, theta_track


def lopsided_track():
    """Switch conditions force the weight of branch 2 to zero."""
    branches = [
        ((0, LARGE), (1, SMALL_LEFT)),
        ((0, SMALL_LEFT), (1, LARGE)),
        ((0, SMALL_RIGHT), (1, SMALL_RIGHT)),
    ]
    return TrainTrack.build(S03, 2, branches)


class RecurrenceTests(SimpleTestCase):
    def test_theta_is_recurrent(self):
        result = is_recurrent(theta_track())
        self.assertTrue(result)
        self.assertTrue(all(w > 0 for w in result.weights))
        self.assertTrue(result.certificate.verify())

    def test_forced_zero_weight(self):
        result = is_recurrent(lopsided_track())
        self.assertFalse(result)
        self.assertFalse(result.certificate.feasible)
        self.assertTrue(result.certificate.verify())
        with self.assertRaises(ConeError):
            cone_dim(lopsided_track())

    def test_standard_tracks(self):
        for track in complete_tracks():
            self.assertTrue(is_recurrent(track))
            self.assertTrue(is_transversely_recurrent(track))
            self.assertEqual(cone_dim(track), 4)
        for track in nearly_complete_tracks():
            self.assertEqual(cone_dim(track), 3)

    def test_certificate_text(self):
        cert = is_recurrent(complete_tracks()[0]).certificate
        again = loads_certificate(dumps_certificate(cert))
        self.assertEqual(again, cert)
        self.assertTrue(again.verify())
        with self.assertRaises(ConeError):
            loads_certificate('certificate 2\nkind x\n')


class RayTests(SimpleTestCase):
    def test_theta_rays(self):
        self.assertEqual(extreme_rays(theta_track()), [(1, 0, 1), (1, 1, 0)])
        self.assertEqual(brute_force_rays(theta_track()), extreme_rays(theta_track()))
        self.assertEqual(cone_dim(theta_track()), 2)

    def test_switch_matrix(self):
        self.assertEqual(switch_matrix(theta_track()), [[1, -1, -1], [1, -1, -1]])

    def test_membership(self):
        rays = extreme_rays(theta_track())
        self.assertTrue(cone_contains(rays, (2, 1, 1)))
        self.assertFalse(cone_contains(rays, (1, 2, 0)))
        self.assertTrue(relative_interior_contains(rays, (2, 1, 1)))
        self.assertFalse(relative_interior_contains(rays, (1, 1, 0)))

    def test_face_lattice(self):
        cone = MeasureCone(theta_track())
        self.assertEqual(cone.dim, 2)
        self.assertTrue(cone.recurrent)
        self.assertEqual(set(cone.faces), {frozenset(), frozenset({0, 1}), frozenset({0, 2}),
                                           frozenset({0, 1, 2})})
        self.assertEqual(cone.face_dim({0, 1}), 1)
        self.assertEqual(cone.boundary_faces()[-1], frozenset())
        self.assertTrue(cone.interior_contains((Fraction(3), Fraction(1), Fraction(2))))
        self.assertFalse(cone.contains((1, 1, 1)))

    def test_diameter(self):
        self.assertEqual(projective_diameter(extreme_rays(theta_track())), 1)
        with self.assertRaises(ConeError):
            projective_diameter([])

    def test_standard_rays_match_brute_force(self):
        for track in nearly_complete_tracks():
            self.assertEqual(extreme_rays(track), brute_force_rays(track))

    @settings(max_examples=6, deadline=None)
    @given(st.integers(min_value=0, max_value=2), st.lists(st.tuples(st.integers(0, 11), st.booleans()),
                                                           min_size=1, max_size=4))
    def test_rays_of_split_tracks_match_brute_force(self, index, moves):
        track = complete_tracks()[index]
        for branch, left in moves:
            try:
                track, _ = split(track, SplitMove(branch, Side.LEFT if left else Side.RIGHT))
            except SplitError:
                continue
        self.assertEqual(extreme_rays(track), brute_force_rays(track))


class ConeIdentityTests(SimpleTestCase):
    def test_split_cone_identity(self):
        for track in complete_tracks():
            for branch in large_branches(track):
                left = split(track, SplitMove(branch, Side.LEFT))
                right = split(track, SplitMove(branch, Side.RIGHT))
                report = verify_cone_identity(track, [left, right], central_pieces(track, branch))
                self.assertTrue(report.holds, (track.name, branch, report.witnesses, report.notes))
                self.assertTrue(report.intersection)

    def test_identity_below_the_root(self):
        parent = complete_tracks()[1]
        track = next(
            child for child, _ in (split(parent, SplitMove(large_branches(parent)[0], side)) for side in Side)
            if classify_track(child).kind is TrackClass.COMPLETE
        )
        for branch in large_branches(track):
            children = [split(track, SplitMove(branch, side)) for side in Side]
            report = verify_cone_identity(track, children, central_pieces(track, branch))
            self.assertTrue(report.holds, (branch, report.witnesses, report.notes))

    def test_one_side_leaves_the_other_half_uncovered(self):
        track = complete_tracks()[0]
        left = split(track, SplitMove(large_branches(track)[0], Side.LEFT))
        report = verify_cone_identity(track, [left])
        self.assertFalse(report.covers)
        self.assertIsNone(report.intersection)
        self.assertEqual(report.witnesses[0][0], 'uncovered')

    def test_full_splits_cover_the_cone(self):
        track = complete_tracks()[2]
        children = [(fs.track, fs.matrix) for fs in full_splits(track)]
        self.assertEqual(len(children), 2 ** len(large_branches(track)))
        report = verify_cone_identity(track, children)
        self.assertTrue(report.covers, report.witnesses)
        self.assertIsNone(report.intersection)

    def test_disconnected_common_subtrack(self):
        track = dumbbell_track()
        pieces = central_pieces(track, 10)
        self.assertEqual(len(pieces), 2)
        with self.assertRaises(SplitError):
            central_split(track, 10)
        children = [split(track, SplitMove(10, side)) for side in Side]
        self.assertTrue(verify_cone_identity(track, children, pieces).holds)
        partial = verify_cone_identity(track, children, pieces[:1])
        self.assertTrue(partial.covers)
        self.assertFalse(partial.intersection)
        self.assertEqual(partial.witnesses[0][0], 'outside-common')

    def test_common_too_large(self):
        track = complete_tracks()[0]
        children = [split(track, SplitMove(large_branches(track)[0], side)) for side in Side]
        identity = [[int(i == j) for j in range(12)] for i in range(12)]
        report = verify_cone_identity(track, children, (track, identity))
        self.assertTrue(report.covers)
        self.assertFalse(report.intersection)
        self.assertIn('common-not-shared', {kind for kind, _ in report.witnesses})

    def test_wrong_carrying_matrix(self):
        track = complete_tracks()[0]
        child, matrix = split(track, SplitMove(large_branches(track)[0], Side.LEFT))
        broken = [row[:] for row in matrix]
        broken[0][0] += 1
        with self.assertRaises(ConeError):
            verify_cone_identity(track, [(child, broken)])
        with self.assertRaises(ConeError):
            verify_cone_identity(track, [])

    def test_one_child_covers_a_track_of_itself(self):
        track = complete_tracks()[0]
        identity = [[int(i == j) for j in range(12)] for i in range(12)]
        self.assertTrue(verify_cone_identity(track, [(track, identity)]).holds)


class FacetTests(SimpleTestCase):
    def test_facets_of_the_orthant_corner(self):
        equalities, normals = facet_description([(1, 0, 0), (0, 1, 0)], 3)
        self.assertEqual(equalities, [[0, 0, 1]])
        self.assertEqual(sorted(normals), [(0, 1, 0), (1, 0, 0)])

    def test_facets_describe_the_cone(self):
        rays = extreme_rays(complete_tracks()[0])
        equalities, normals = facet_description(rays, 12)
        self.assertTrue(equalities)
        for r in rays:
            self.assertTrue(all(dot(e, r) == 0 for e in equalities))
            self.assertTrue(all(dot(h, r) >= 0 for h in normals))
        for h in normals:
            self.assertGreaterEqual(len([r for r in rays if dot(h, r) == 0]), 2)
