# laminations/tests/fixtures.py
from functools import lru_cache

from laminations.standard import load_standard_family
from laminations.tracks import LARGE, S05, SMALL_LEFT, SMALL_RIGHT, Surface, TrainTrack

S03 = Surface(0, 3)


def theta_track(name='theta'):
    """Two switches joined by three branches; branch 0 is large at both ends."""
    branches = [
        ((0, LARGE), (1, LARGE)),
        ((0, SMALL_LEFT), (1, SMALL_RIGHT)),
        ((0, SMALL_RIGHT), (1, SMALL_LEFT)),
    ]
    punctures = {(0, LARGE): 1, (0, SMALL_LEFT): 1, (0, SMALL_RIGHT): 1}
    return TrainTrack.build(S03, 2, branches, punctures, name)


@lru_cache(maxsize=None)
def standard_family():
    return load_standard_family()


def complete_tracks():
    return [record.track for record in standard_family().complete]


def nearly_complete_tracks():
    return [record.track for record in standard_family().nearly_complete]


def dumbbell_track(name='dumbbell'):
    """
    A complete track with lollipops on the small slots of two forks joined
    through a connector; its one large branch 10 runs from a fork to the
    connector and its central split has two components.
    """
    branches = [((i, SMALL_LEFT), (i, SMALL_RIGHT)) for i in range(5)]
    branches += [
        ((0, LARGE), (5, SMALL_LEFT)), ((1, LARGE), (5, SMALL_RIGHT)), ((2, LARGE), (6, SMALL_LEFT)),
        ((3, LARGE), (7, SMALL_LEFT)), ((4, LARGE), (7, SMALL_RIGHT)),
        ((5, LARGE), (6, LARGE)), ((6, SMALL_RIGHT), (7, LARGE)),
    ]
    punctures = {(i, SMALL_RIGHT): 1 for i in range(5)}
    return TrainTrack.build(S05, 8, branches, punctures, name)
