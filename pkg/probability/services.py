"""
Services layer for the probability app.

Builds distributions from parsed model specs and implements the logic
behind the management commands: sampling to NDJSON, scoring NDJSON
records, KL divergence and kernel density estimates.
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .bijectors import (
    Affine, Chain, Invert, LinearAutoregressiveFn, MaskedAutoregressive,
)
from .conf import get_setting
from .distributions import (
    FAMILIES, Autoregressive, Bernoulli, Categorical, Distribution, Independent, Mixture,
    MixtureSameFamily, Normal, TransformedDistribution, kde,
)
from .exceptions import ModelSpecError, ShapeError
from .functionals import kl_divergence, monte_carlo_kl
from .numcore import PRECISIONS
from .rng import RngState
from .serializers import BIJECTORS, POINTS_MARKER, parse_model_spec

logger = logging.getLogger('probability')

def resolve_precision(precision: Optional[str]):
    precision = precision or get_setting('DISTKIT_DEFAULT_PRECISION')
    try:
        return PRECISIONS[precision]
    except KeyError:
        raise ModelSpecError(f'precision: expected one of f32, f64; got {precision!r}', field='precision')


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelSpecError(f'{path}: cannot read file ({exc.strerror})', field=str(path)) from exc
    try:
        return json.loads(text)
    except ValueError as exc:
        raise ModelSpecError(f'{path}: invalid JSON ({exc})', field=str(path)) from exc


def load_model(path, precision: Optional[str] = None) -> Distribution:
    """Parse the spec at ``path`` and build it; relative files resolve against its directory."""
    spec = parse_model_spec(read_json(path), field=Path(path).name)
    return build_model(spec, resolve_precision(precision), base_dir=Path(path).resolve().parent)


# Building.

def build_model(spec: Dict, dtype=np.float64, base_dir: Optional[Path] = None) -> Distribution:
    """Build a Distribution from a canonical spec (see ``parse_model_spec``)."""
    if 'family' in spec:
        return _build_leaf(spec, dtype)
    (kind, body), = spec.items()
    builder = {
        'transformed': _build_transformed,
        'independent': _build_independent,
        'mixture': _build_mixture,
        'autoregressive': _build_autoregressive,
        'kde': _build_kde,
    }[kind]
    return builder(body, dtype, base_dir)


def _build_leaf(spec, dtype):
    cls = FAMILIES[spec['family']]
    kwargs = dict(spec.get('params', {}))
    kwargs['validate_args'] = spec.get('validate_args', bool(get_setting('DISTKIT_VALIDATE_ARGS')))
    if 'allow_nan_stats' in spec:
        kwargs['allow_nan_stats'] = spec['allow_nan_stats']
    return cls(dtype=dtype, **kwargs)


def build_bijector(spec: Dict, dtype=np.float64):
    name = spec['bijector']
    params = spec.get('params', {})
    validate_args = spec.get('validate_args', False)
    if name == 'Chain':
        # specs list bijectors in application order; Chain composes right to left
        parts = [build_bijector(b, dtype) for b in params['bijectors']]
        return Chain(list(reversed(parts)), validate_args=validate_args)
    if name == 'Invert':
        return Invert(build_bijector(params['bijector'], dtype), validate_args=validate_args)
    if name == 'Affine':
        return Affine(validate_args=validate_args, dtype=dtype, **params)
    if name == 'MaskedAutoregressive':
        fn = LinearAutoregressiveFn(dtype=dtype, **params)
        return MaskedAutoregressive(fn, validate_args=validate_args)
    if name in ('Permute', 'Reshape'):
        return BIJECTORS[name](**params, validate_args=validate_args)
    return BIJECTORS[name](validate_args=validate_args)


def _build_transformed(body, dtype, base_dir):
    base = build_model(body['base'], dtype, base_dir)
    parts = [build_bijector(b, dtype) for b in body['bijectors']]
    bijector = parts[0] if len(parts) == 1 else Chain(list(reversed(parts)))
    return TransformedDistribution(
        base, bijector,
        batch_shape=body.get('batch_shape'),
        event_shape=body.get('event_shape'),
    )


def _build_independent(body, dtype, base_dir):
    base = build_model(body['base'], dtype, base_dir)
    rank = body.get('rank', 1)
    return Independent(base, reinterpreted_batch_ndims=rank)


def _build_mixture(body, dtype, base_dir):
    cat = Categorical(probs=body['probs'], dtype=dtype)
    validate_args = body.get('validate_args', False)
    components = body['components']
    if isinstance(components, list):
        return Mixture(cat, [build_model(c, dtype, base_dir) for c in components],
                       validate_args=validate_args)
    return MixtureSameFamily(cat, build_model(components, dtype, base_dir), validate_args=validate_args)


def _build_autoregressive(body, dtype, base_dir):
    weights = np.array(body['weights'], dtype=dtype)
    bias = np.array(body['bias'], dtype=dtype)
    d = bias.shape[0]
    family = body['family']
    scale = body.get('scale', 1.0)

    def make_dist(x):
        x = np.asarray(x, dtype=dtype) * np.ones(d, dtype=dtype)
        z = np.einsum('ij,...j->...i', weights, x) + bias
        if family == 'Bernoulli':
            return Independent(Bernoulli(logits=z, dtype=dtype), reinterpreted_batch_ndims=1)
        return Independent(Normal(z, scale, dtype=dtype), reinterpreted_batch_ndims=1)

    return Autoregressive(make_dist, num_steps=body.get('steps'), event_shape=(d,))


def _substitute_points(template, points):
    if isinstance(template, dict):
        return {key: _substitute_points(value, points) for key, value in template.items()}
    if isinstance(template, list):
        return [_substitute_points(value, points) for value in template]
    if template == POINTS_MARKER:
        return points
    return template


def _build_kde(body, dtype, base_dir):
    path = Path(body['points_file'])
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    points = load_points(path, dtype)
    template = body.get('kernel')
    if template is None:
        return kde(points, bandwidth=body.get('bandwidth', 1.0), dtype=dtype)

    def kernel_builder(locs):
        kernel = build_model(_substitute_points(template, locs), dtype, base_dir)
        # scalar families over vector points: fold the coordinates into the event
        if len(kernel.batch_shape) > 1:
            kernel = Independent(kernel, reinterpreted_batch_ndims=len(kernel.batch_shape) - 1)
        return kernel

    return kde(points, kernel_builder=kernel_builder, dtype=dtype)


# NDJSON.

def _plain_values(array: np.ndarray) -> List:
    flat = np.ravel(array)
    if flat.dtype.kind != 'f' or flat.dtype == np.float64:
        return flat.tolist()
    # shortest text that round-trips at single precision
    return [float(np.format_float_positional(v, unique=True, trim='-')) if np.isfinite(v) else float(v)
            for v in flat]


def dump_record(record: Dict) -> str:
    return json.dumps(record, separators=(',', ':'))


def read_records(path) -> List[np.ndarray]:
    """Read NDJSON records carrying ``value`` (flat) and ``shape``."""
    arrays = []
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ModelSpecError(f'{path}: cannot read file ({exc.strerror})', field=str(path)) from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        field = f'{path.name}:{lineno}'
        try:
            record = json.loads(line)
        except ValueError as exc:
            raise ModelSpecError(f'{field}: invalid JSON ({exc})', field=field) from exc
        if not isinstance(record, dict) or 'value' not in record or 'shape' not in record:
            raise ModelSpecError(f'{field}: records need "value" and "shape"', field=field)
        value = np.asarray(record['value'])
        shape = tuple(record['shape'])
        if value.ndim != 1 or value.size != int(np.prod(shape, dtype=np.int64)):
            raise ShapeError(f'{field}.value: {value.size} values do not fill shape {list(shape)}')
        arrays.append(value.reshape(shape))
    return arrays


def load_points(path, dtype=np.float64) -> np.ndarray:
    records = read_records(path)
    shapes = {r.shape for r in records}
    if len(shapes) > 1:
        raise ShapeError(f'{Path(path).name}: points have differing shapes {sorted(map(list, shapes))}')
    if not records:
        return np.zeros((0,), dtype=dtype)
    return np.stack(records).astype(dtype)


def write_samples(dist: Distribution, n: int, seed: int, out) -> int:
    """Draw ``n`` outcomes with ``seed`` and write one record per draw; returns the count."""
    if n < 1:
        raise ModelSpecError(f'n: expected n >= 1, got {n}', field='n')
    x = dist.sample((n,), RngState.from_seed(seed))
    outcome_shape = list(x.shape)
    shape = list(x.shape[1:])
    with open(out, 'w') as fh:
        for i in range(n):
            fh.write(dump_record({
                'index': i,
                'outcome_shape': outcome_shape,
                'shape': shape,
                'value': _plain_values(x[i]),
            }))
            fh.write('\n')
    logger.info(f'Wrote {n} samples of {dist.name} (seed {seed}) to {out}')
    return n


def score_records(dist: Distribution, records: List[np.ndarray], out=None) -> List[Dict]:
    """log_prob for each record; written as NDJSON when ``out`` is given."""
    results = []
    for i, value in enumerate(records):
        lp = np.asarray(dist.log_prob(value))
        results.append({'index': i, 'shape': list(lp.shape), 'log_prob': _plain_values(lp)})
    if out is not None:
        with open(out, 'w') as fh:
            for record in results:
                fh.write(dump_record(record))
                fh.write('\n')
    logger.info(f'Scored {len(results)} records under {dist.name}')
    return results


def compute_kl(p: Distribution, q: Distribution, mc: Optional[int] = None, seed: int = 0) -> Dict:
    """Closed-form KL(p || q), with a Monte Carlo estimate beside it when ``mc`` is set."""
    result = {'kl': kl_divergence(p, q)}
    if mc:
        estimate, stderr = monte_carlo_kl(p, q, mc, RngState.from_seed(seed))
        result['mc'] = estimate
        result['stderr'] = stderr
    logger.info(f'KL({p.name} || {q.name}) computed' + (f' with {mc} Monte Carlo draws' if mc else ''))
    return result


def kde_spec(points_file, kernel: Optional[Dict] = None, bandwidth: Optional[float] = None) -> Dict:
    """A ``kde`` spec document over ``points_file``; validated like any other spec."""
    body = {'points_file': str(points_file)}
    if kernel is not None:
        body['kernel'] = kernel
    if bandwidth is not None:
        body['bandwidth'] = bandwidth
    return parse_model_spec({'kde': body})


def format_array(array) -> str:
    values = _plain_values(np.asarray(array))
    return dump_record(values if np.ndim(array) else values[0])
