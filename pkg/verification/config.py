# verification/config.py
from dataclasses import asdict, dataclass
from pathlib import Path

from django.conf import settings

SUITES = ('census', 'key-lemma', 'cone-identity', 'partition', 'nesting', 'oracles', 'noebeling', 'claims')
ALL = 'all'

DEFAULT_DEPTH = 3
DEFAULT_LENGTH = 15
DEFAULT_N_MAX = 10


class ConfigError(ValueError):
    """Bad command-line input; commands turn it into exit status 2."""


def limits():
    return settings.TRACKLAB


@dataclass(frozen=True)
class RunConfig:
    command: str
    suite: str = ALL
    depth: int = DEFAULT_DEPTH
    length: int = DEFAULT_LENGTH
    n_max: int = DEFAULT_N_MAX
    seed: int = 0
    workers: int = 1
    out: Path = None
    family: Path = None
    record: bool = True

    @classmethod
    def from_options(cls, command, options):
        caps = limits()
        values = {
            'command': command,
            'suite': options.get('suite') or ALL,
            'depth': options.get('depth', DEFAULT_DEPTH),
            'length': options.get('length', DEFAULT_LENGTH),
            'n_max': options.get('n_max', DEFAULT_N_MAX),
            'seed': options.get('seed', 0),
            'workers': options.get('workers', 1),
            'out': Path(options.get('out') or caps['REPORT_DIR']),
            'family': Path(options.get('family') or caps['STANDARD_FAMILY']),
            'record': not options.get('no_record', False),
        }
        config = cls(**{k: v for k, v in values.items() if v is not None})
        config.check(caps)
        return config

    def check(self, caps):
        if self.suite not in SUITES + (ALL,):
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + (ALL,))}")
        bounds = (
            ('depth', self.depth, 0, caps['MAX_DEPTH']),
            ('length', self.length, 1, caps['MAX_LENGTH']),
            ('n-max', self.n_max, 1, caps['MAX_N']),
            ('workers', self.workers, 1, caps['MAX_WORKERS']),
        )
        for name, value, lo, hi in bounds:
            if not lo <= value <= hi:
                raise ConfigError(f"--{name} must lie in [{lo}, {hi}], got {value}")
        if self.seed < 0:
            raise ConfigError(f"--seed must be nonnegative, got {self.seed}")

    @property
    def max_tracks(self):
        return limits()['MAX_TRACKS']

    @property
    def suites(self):
        return SUITES if self.suite == ALL else (self.suite,)

    def header(self):
        # worker count and directories never reach a report
        return {
            'suite': self.suite, 'seed': self.seed, 'depth': self.depth, 'length': self.length,
            'n_max': self.n_max, 'family': self.family.name,
        }

    def as_dict(self):
        data = asdict(self)
        data['out'] = str(self.out)
        data['family'] = str(self.family)
        return data
