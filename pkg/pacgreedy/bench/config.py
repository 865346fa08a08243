"""
Experiment configuration files.

A config is a flat YAML mapping validated against :data:`SCHEMA`. Unknown
keys, wrong types and out-of-range values are reported with the line they
appear on; the import aborts once the whole file has been checked.
"""
import copy
import itertools
import math
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.maximizers import PacParams
from ..environment import BenchEnvironment
from ..importer import FileImporter
from ..messages import ConfigError
from ..sensors.selection import MAXIMIZERS, SensorSelector

#: Scenarios understood by the runner
SCENARIOS = ('coverage', 'sensor-toy', 'tracking')

#: Environment variables that override the config file
ENV_SEED = 'PACGREEDY_SEED'
ENV_OUT = 'PACGREEDY_OUT'

Number = Union[int, float]

#===============================================================================
class Field:
    """
    Schema entry of a single config key

    Parameters
    ----------
    kind: type
        ``int``, ``float``, ``bool`` or ``str``. Floats also accept ints.
    default:
        Value used when the key is absent
    low, high: number
        Inclusive range, unless ``open_low``/``open_high`` is set
    choices: tuple
        Allowed values
    many: bool
        Also accept a list of values
    doc: str
        One-line description
    """
    def __init__(self, kind: type, default: Any, low: Optional[Number]=None, high: Optional[Number]=None,
                 choices: Optional[Sequence[Any]]=None, many: bool=False,
                 open_low: bool=False, open_high: bool=False, doc: str=""):
        self.kind = kind
        self.default = default
        self.low = low
        self.high = high
        self.choices = tuple(choices) if choices is not None else None
        self.many = many
        self.open_low = open_low
        self.open_high = open_high
        self.doc = doc

    def _check_one(self, value: Any) -> Optional[str]:
        if self.kind is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
        elif self.kind is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, self.kind)
        if not ok:
            return "expected %s, got %r" % (self.kind.__name__, value)

        if self.choices is not None and value not in self.choices:
            return "must be one of %s, got %r" % (", ".join(str(c) for c in self.choices), value)
        if self.low is not None:
            if value < self.low or (self.open_low and value == self.low):
                return "must be %s %s, got %r" % (">" if self.open_low else ">=", self.low, value)
        if self.high is not None:
            if value > self.high or (self.open_high and value == self.high):
                return "must be %s %s, got %r" % ("<" if self.open_high else "<=", self.high, value)
        return None

    def check(self, value: Any) -> Optional[str]:
        """
        Returns a description of the problem, or None if ``value`` is valid
        """
        if self.many and isinstance(value, list):
            if not value:
                return "list must not be empty"
            if len(set(map(repr, value))) != len(value):
                return "list has duplicate values"
            for v in value:
                problem = self._check_one(v)
                if problem:
                    return problem
            return None
        return self._check_one(value)


#: Every key a config file may contain
SCHEMA = {
    'scenario': Field(str, None, choices=SCENARIOS, doc="Experiment to run"),
    'maximizer': Field(str, None, choices=MAXIMIZERS, doc="Single maximizer"),
    'maximizers': Field(str, None, choices=MAXIMIZERS, many=True, doc="Maximizers, compared in this order"),
    'k': Field(int, 2, low=0, many=True, doc="Subset size (or list of sizes)"),
    'n': Field(int, 20, low=1, doc="Ground set size: elements or sensors"),
    'R': Field(int, None, low=1, many=True, doc="Lazier greedy sample size (default n // 2)"),
    'epsilon1': Field(float, 0.0, low=0, many=True, doc="pac-max slack"),
    't': Field(float, 1e-3, low=0, open_low=True, doc="pac-max improvement threshold"),
    'max_tighten_rounds': Field(int, 64, low=1, doc="pac-max tightening pass cap"),
    'delta_u': Field(float, 0.05, low=0, high=1, open_low=True, open_high=True,
                     doc="Upper bound failure probability per subset"),
    'delta_l': Field(float, 0.05, low=0, high=1, open_low=True, open_high=True,
                     doc="Lower bound failure probability per subset"),
    'sigma0': Field(float, 1.0, low=0, open_low=True, doc="Initial noise of synthetic coverage bounds"),
    'm_fine': Field(int, 2**16, low=2, many=True, doc="Prior samples behind the upper bound"),
    'm_coarse': Field(int, 2**18, low=2, doc="Prior samples behind the lower bound"),
    'd0': Field(int, 2, low=1, doc="Initial number of observation clusters"),
    'n_draws0': Field(int, 256, low=1, doc="Initial posterior draws of the upper bound"),
    'coarse_draws': Field(int, 2048, low=1, doc="Posterior draws of the lower bound"),
    'max_draws': Field(int, 4096, low=1, doc="Cap on upper bound posterior draws"),
    'estimate_m': Field(int, 4096, low=1, many=True, doc="Prior samples of greedy-on-estimates"),
    'estimate_draws': Field(int, 8192, low=1, doc="Posterior draws of greedy-on-estimates"),
    'objective': Field(str, 'estimate', choices=('estimate', 'exact'), doc="Objective of non-PAC maximizers"),
    'num_states': Field(int, 8, low=2, doc="States of sensor-toy worlds"),
    'alphabet': Field(int, 3, low=2, doc="Observation alphabet of sensor-toy sensors"),
    'universe': Field(int, 30, low=1, doc="Items of coverage instances"),
    'trials': Field(int, 10, low=1, doc="Instances per coverage / sensor-toy run"),
    'T': Field(int, 100, low=1, doc="Timesteps per trajectory"),
    'trajectories': Field(int, 50, low=1, doc="Trajectories per tracking run"),
    'particles': Field(int, 1024, low=1, doc="Particle filter size"),
    'width': Field(int, 16, low=1, doc="Grid width"),
    'height': Field(int, 16, low=1, doc="Grid height"),
    'torus': Field(bool, True, doc="Wrap the grid around"),
    'radius': Field(float, 3.0, low=0, doc="Coverage radius of tracking sensors"),
    'flip': Field(float, 0.1, low=0, high=1, doc="Report flip probability of tracking sensors"),
    'stay': Field(float, 0.4, low=0, high=1, doc="Stay probability of the motion model"),
    'seed': Field(int, 0, low=0, doc="Base seed"),
    'out': Field(str, None, doc="Output CSV path (default stdout)"),
    'timing': Field(bool, False, doc="Emit wall-ms rows"),
    'sensor_model': Field(str, None, doc="Sensor model file replacing the generated sensors"),
    'trajectory_file': Field(str, None, doc="Trajectory CSV replacing generated trajectories"),
} # type: Dict[str, Field]

#: Keys that may list several values, and the maximizers each one applies to.
#: Every combination of the listed values becomes a separate variant.
SWEEP_KEYS = {
    'R': ('lazier',),
    'epsilon1': ('pac',),
    'm_fine': ('pac',),
    'estimate_m': ('greedy', 'lazy', 'lazier', 'brute'),
} # type: Dict[str, Tuple[str, ...]]

#===============================================================================
class ExperimentConfig:
    """
    Validated experiment configuration. Every :data:`SCHEMA` key is an
    attribute; ``maximizers`` and ``ks`` are always lists.
    """
    def __init__(self, values: Optional[Mapping[str, Any]]=None):
        values = dict(values or {})
        for key, field in SCHEMA.items():
            value = values.get(key)
            setattr(self, key, field.default if value is None else value)

        maximizers = values.get('maximizers')
        if maximizers is None:
            maximizers = [values['maximizer']] if values.get('maximizer') else []
        elif not isinstance(maximizers, list):
            maximizers = [maximizers]
        #: Maximizers in the order they were listed
        self.maximizers = list(maximizers) # type: List[str]

        k = self.k
        #: Subset sizes
        self.ks = list(k) if isinstance(k, list) else [k] # type: List[int]

        #: Listed values of the :data:`SWEEP_KEYS` given as lists. The
        #: attribute of a swept key holds its first value.
        self.sweeps = {} # type: Dict[str, List[Any]]
        for key in SWEEP_KEYS:
            value = getattr(self, key)
            if isinstance(value, list):
                self.sweeps[key] = list(value)
                setattr(self, key, value[0])

        # Directory that relative file paths resolve against
        self.base_dir = ""

    def __getattr__(self, name: str) -> Any:
        # Attributes are set dynamically from SCHEMA
        raise AttributeError(name)

    def values_of(self, key: str) -> List[Any]:
        """
        Every value a key takes across the variants
        """
        return self.sweeps.get(key, [getattr(self, key)])

    def variants(self) -> List['Variant']:
        """
        Every maximizer crossed with the swept values that apply to it, in
        the order the maximizers and the values were listed
        """
        result = [] # type: List[Variant]
        for maximizer in self.maximizers:
            axes = [key for key in self.sweeps if maximizer in SWEEP_KEYS[key]]
            for point in itertools.product(*(self.sweeps[key] for key in axes)):
                scalar = copy.copy(self)
                scalar.sweeps = {}
                for key, value in zip(axes, point):
                    setattr(scalar, key, value)
                result.append(Variant(maximizer, scalar, list(zip(axes, point))))
        return result

    def path(self, key: str) -> Optional[str]:
        value = getattr(self, key)
        if value is None:
            return None
        return os.path.join(self.base_dir, value)

    def pac_params(self) -> PacParams:
        return PacParams(self.epsilon1, self.t, self.max_tighten_rounds)

    def bound_config(self) -> Dict[str, Any]:
        return {
            'm_fine': self.m_fine,
            'm_coarse': self.m_coarse,
            'd0': self.d0,
            'n_draws0': self.n_draws0,
            'coarse_draws': self.coarse_draws,
            'max_draws': self.max_draws,
            'delta_u': self.delta_u,
            'delta_l': self.delta_l,
        }

    def selector(self, maximizer: str, k: int) -> SensorSelector:
        return SensorSelector(
            maximizer, k, R=self.R, pac_params=self.pac_params(), bound_config=self.bound_config(),
            objective=self.objective, estimate_m=self.estimate_m, estimate_draws=self.estimate_draws
        )

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in SCHEMA}


class Variant:
    """
    A maximizer run with one combination of swept values

    Parameters
    ----------
    maximizer: str
    config: :class:`ExperimentConfig`
        Config with the swept keys set to this variant's values
    point: list
        ``(key, value)`` for each swept key that applies to the maximizer
    """
    def __init__(self, maximizer: str, config: ExperimentConfig, point: Sequence[Tuple[str, Any]]=()):
        self.maximizer = maximizer
        self.config = config
        self.point = list(point)

    @property
    def label(self) -> str:
        """
        Name written to the maximizer column, such as ``lazier[R=4]``
        """
        if not self.point:
            return self.maximizer
        return "%s[%s]" % (self.maximizer, ",".join("%s=%s" % (key, _format_point(v)) for key, v in self.point))

    def selector(self, k: int) -> SensorSelector:
        return self.config.selector(self.maximizer, k)

    def __repr__(self) -> str:
        return "<Variant %s>" % self.label


def _format_point(value: Any) -> str:
    if isinstance(value, float):
        return "%g" % value
    return str(value)


class ConfigImporter(FileImporter):
    """
    Reads and validates an experiment config file
    """
    def import_file(self, path: str) -> ExperimentConfig:
        super().import_file(path)
        data = self.load_yaml(path)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            self.fatal("Config must be a mapping of keys to values")

        for key, value in data.items():
            field = SCHEMA.get(key)
            if field is None:
                self.error("Unknown config key '%s'" % key, self.line_of(key))
                continue
            if value is None:
                continue
            problem = field.check(value)
            if problem:
                self.error("Invalid value for '%s': %s" % (key, problem), self.line_of(key))
                data[key] = field.default

        self._check_consistency(data)
        self.finish("Config")

        config = ExperimentConfig(data)
        config.base_dir = os.path.dirname(path)
        return config

    def _check_consistency(self, data: Dict[str, Any]) -> None:
        if data.get('scenario') is None:
            self.error("Missing required key 'scenario'")

        if data.get('maximizer') is not None and data.get('maximizers') is not None:
            self.error("Give either 'maximizer' or 'maximizers', not both", self.line_of('maximizers'))
        elif data.get('maximizer') is None and data.get('maximizers') is None:
            self.error("Missing required key 'maximizer' (or 'maximizers')")

        n = data.get('n') or SCHEMA['n'].default
        k = data.get('k', SCHEMA['k'].default)
        ks = k if isinstance(k, list) else [k]
        if data.get('sensor_model') is None and any(isinstance(v, int) and v > n for v in ks):
            self.error("'k' must not exceed n=%d, got %r" % (n, k), self.line_of('k'))

        R = data.get('R')
        Rs = R if isinstance(R, list) else [R]
        if data.get('sensor_model') is None and any(isinstance(v, int) and v > n for v in Rs):
            self.error("'R' must not exceed n=%d, got %r" % (n, R), self.line_of('R'))

        maximizers = data.get('maximizers') or data.get('maximizer') or []
        if not isinstance(maximizers, list):
            maximizers = [maximizers]
        for key, applies_to in SWEEP_KEYS.items():
            if isinstance(data.get(key), list) and not any(m in applies_to for m in maximizers):
                self.error(
                    "'%s' lists several values but only applies to %s" % (key, ", ".join(applies_to)),
                    self.line_of(key)
                )

        n_draws0 = data.get('n_draws0') or SCHEMA['n_draws0'].default
        max_draws = data.get('max_draws') or SCHEMA['max_draws'].default
        if max_draws < n_draws0:
            self.error("'max_draws' must be >= n_draws0=%d" % n_draws0, self.line_of('max_draws'))

        if data.get('trajectory_file') is not None and data.get('scenario') != 'tracking':
            self.error("'trajectory_file' only applies to the tracking scenario", self.line_of('trajectory_file'))
        if data.get('sensor_model') is not None and data.get('scenario') == 'coverage':
            self.error("'sensor_model' does not apply to the coverage scenario", self.line_of('sensor_model'))


def load_config(path: str, env: Optional[BenchEnvironment]=None) -> ExperimentConfig:
    return ConfigImporter(env).import_file(path)


def apply_overrides(config: ExperimentConfig, env: BenchEnvironment, environ: Optional[Mapping[str, str]]=None,
                    seed: Optional[int]=None, out: Optional[str]=None) -> ExperimentConfig:
    """
    Apply ``PACGREEDY_SEED``/``PACGREEDY_OUT`` and then the command line
    ``seed``/``out``, so that the command line wins
    """
    environ = os.environ if environ is None else environ

    env_seed = environ.get(ENV_SEED)
    if env_seed:
        try:
            config.seed = int(env_seed)
        except ValueError:
            env.msg.fatal("%s must be an integer, got %r" % (ENV_SEED, env_seed), exc_type=ConfigError)
        if config.seed < 0:
            env.msg.fatal("%s must be >= 0, got %d" % (ENV_SEED, config.seed), exc_type=ConfigError)
    if environ.get(ENV_OUT):
        config.out = environ[ENV_OUT]

    if seed is not None:
        if seed < 0:
            env.msg.fatal("--seed must be >= 0, got %d" % seed, exc_type=ConfigError)
        config.seed = seed
    if out is not None:
        config.out = out
    return config

