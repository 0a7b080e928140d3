"""YAML run configurations.

A run config is parsed twice: ``yaml.safe_load`` gives the data validated by
``RunConfigSerializer`` and ``yaml.compose`` gives the node tree whose marks
anchor validation errors to a line. Example::

    version: 1
    model: {name: vg, params: {theta: -0.1436, nu: 0.3, sigma: 0.12136}}
    market: {spot: 100, rate: 0.1, dividend: 0}
    maturity: 1.0
    cos: {L: 10, M: 128, formula: classic, backend: nufft, tolerance: 1.0e-9}
    strikes: {min: 60, max: 140, count: 100, spacing: linear}
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml
from rest_framework.exceptions import ErrorDetail

from bench.cases import strike_grid
from common.exceptions import ConfigError

from .serializers import CONFIG_VERSION, RunConfigSerializer

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RunConfig:
    model: object
    market: object
    L: float
    M: int
    formula: str
    backend: str
    tolerance: float
    strikes: object = None
    points: object = None

    @property
    def maturity(self):
        return self.market.maturity

    def strike_values(self):
        return resolve_values(self.strikes)

    def point_values(self):
        return resolve_values(self.points)

    def with_overrides(self, **overrides):
        """Copy with CLI overrides applied; ``None`` values are ignored."""
        values = {key: value for key, value in overrides.items() if value is not None}
        return RunConfig(**{**self.__dict__, **values})


def resolve_values(values):
    """An explicit list or a ``{min, max, count, spacing}`` grid as a float array."""
    if values is None:
        return np.empty(0)
    if isinstance(values, dict):
        return strike_grid(values['min'], values['max'], values['count'], values.get('spacing', 'linear'))
    return np.asarray(values, dtype=np.float64)


def _first_error(detail, path=()):
    """Depth-first first ``(path, message)`` pair in a DRF error structure."""
    if isinstance(detail, dict):
        for key, value in detail.items():
            found = _first_error(value, path + (key,))
            if found:
                return found
        return None
    if isinstance(detail, list):
        if detail and all(isinstance(item, (str, ErrorDetail)) for item in detail):
            return path, str(detail[0])
        for index, value in enumerate(detail):
            found = _first_error(value, path + (index,))
            if found:
                return found
        return None
    return path, str(detail)


def _node_at(root, path):
    """Deepest YAML node along ``path`` and its 1-based line."""
    node = root
    for key in path:
        child = None
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(key):
                    child = value_node
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            child = node.value[key]
        if child is None:
            break
        node = child
    return node.start_mark.line + 1 if node is not None else None


def parse_run_config(text, source='<config>', serializer_class=RunConfigSerializer):
    """Validate YAML ``text`` into a ``RunConfig``; failures raise ``ConfigError`` with a line."""
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, 'problem', None) or str(exc)
        raise ConfigError(f"{source}: invalid YAML: {problem}", line=line) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a mapping at the top level", line=1)

    serializer = serializer_class(data=data)
    if not serializer.is_valid():
        path, message = _first_error(serializer.errors)
        parts = [part for part in path if part != 'non_field_errors']
        field = '.'.join(str(part) for part in parts)
        line = _node_at(root, parts)
        logger.debug(f"Rejected {source}: {serializer.errors}")
        raise ConfigError(
            f"{source}: {field or 'config'}: {message}", line=line, field=parts[-1] if parts else None,
        )
    return from_validated(serializer.validated_data)


def from_validated(data):
    cos = data['cos']
    return RunConfig(
        model=data['model']['model'],
        market=data['market_inputs'],
        L=float(cos['L']),
        M=int(cos['M']),
        formula=cos['formula'],
        backend=cos['backend'],
        tolerance=float(cos['tolerance']),
        strikes=data.get('strikes'),
        points=data.get('points'),
    )


def load_run_config(path, serializer_class=RunConfigSerializer):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_run_config(text, source=str(path), serializer_class=serializer_class)


def effective_config(run):
    """Fully resolved config as plain data; reloading it reproduces ``run``."""
    config = {
        'version': CONFIG_VERSION,
        'model': {'name': run.model.name, 'params': run.model.as_dict()},
        'market': {'forward': run.market.forward, 'discount': run.market.discount},
        'maturity': run.market.maturity,
        'cos': {
            'L': run.L,
            'M': run.M,
            'formula': run.formula,
            'backend': run.backend,
            'tolerance': run.tolerance,
        },
    }
    for key in ('strikes', 'points'):
        value = getattr(run, key)
        if value is not None:
            config[key] = dict(value) if isinstance(value, dict) else [float(v) for v in value]
    return config


def dump_run_config(run, path=None):
    """Write (or return) the effective config as YAML."""
    text = yaml.safe_dump(effective_config(run), sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text
