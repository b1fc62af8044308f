"""
Serializers for model spec documents.

A model spec is a JSON object describing one distribution. Leaves name a
family; combinators (``transformed``, ``independent``, ``mixture``,
``autoregressive``, ``kde``) nest other specs. ``parse_model_spec`` turns
a document into its canonical form or raises ``ModelSpecError`` naming
the offending field; ``print_model_spec`` is its inverse.
"""
import inspect
import json

from rest_framework import serializers

from .bijectors import (
    AbsValue, Affine, Chain, Exp, Identity, Invert, LinearAutoregressiveFn, MaskedAutoregressive,
    Permute, Reshape, Sigmoid, SoftmaxCentered, Softplus, Square,
)
from .distributions import FAMILIES
from .exceptions import ModelSpecError

COMBINATORS = ('transformed', 'independent', 'mixture', 'autoregressive', 'kde')

BIJECTORS = {
    cls.__name__: cls for cls in (
        Identity, Exp, Sigmoid, Softplus, AbsValue, Square, Affine, Permute, Reshape,
        SoftmaxCentered, MaskedAutoregressive, Chain, Invert,
    )
}

# constructor keywords a spec never sets through ``params``
_RESERVED = {'self', 'validate_args', 'allow_nan_stats', 'dtype', 'name'}

# MaskedAutoregressive is specified by the weights of its linear shift/log-scale function
_MAF_PARAMS = {'shift_weights', 'log_scale_weights', 'shift_bias', 'log_scale_bias', 'clamp'}

POINTS_MARKER = '@points'


def constructor_params(cls):
    """Keyword names a family or bijector accepts through ``params``."""
    if cls is MaskedAutoregressive:
        return _MAF_PARAMS
    signature = inspect.signature(cls.__init__)
    return {name for name in signature.parameters if name not in _RESERVED}


def required_params(cls):
    """Keyword names a family or bijector cannot be built without."""
    if cls is MaskedAutoregressive:
        cls = LinearAutoregressiveFn
    signature = inspect.signature(cls.__init__)
    return {
        name for name, param in signature.parameters.items()
        if name not in _RESERVED and param.default is inspect.Parameter.empty
        and param.kind not in (param.VAR_POSITIONAL, param.VAR_KEYWORD)
    }


def _missing_params(name, cls, params):
    missing = sorted(required_params(cls) - set(params))
    if missing:
        raise serializers.ValidationError(
            {'params': {key: [f'{name} requires parameter {key!r}.'] for key in missing}})


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare."""

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            raise serializers.ValidationError(
                {'non_field_errors': [f'Expected an object, got {type(data).__name__}']})
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: ['Unknown field.'] for key in unknown})
        return super().to_internal_value(data)


class ParamsField(serializers.DictField):
    """
    A ``params`` object: keys are strings, values are numbers or rectangular
    nested lists. ``"@points"`` is accepted only under an ``allow_points``
    context, which a kde kernel template sets.
    """

    def to_internal_value(self, data):
        data = super().to_internal_value(data)
        allow_points = self.context.get('allow_points', False)
        for key, value in data.items():
            if value == POINTS_MARKER:
                if not allow_points:
                    raise serializers.ValidationError(
                        {key: [f'{POINTS_MARKER!r} is only allowed inside a kde kernel.']})
            elif not _is_numeric_tree(value):
                raise serializers.ValidationError({key: ['Expected a number or a nested list of numbers.']})
            elif _tree_shape(value) is None:
                raise serializers.ValidationError({key: ['Nested lists must be rectangular.']})
        return data


def _is_numeric_tree(value):
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, float)):
        return True
    if isinstance(value, list):
        return all(_is_numeric_tree(v) for v in value)
    return False


def _tree_shape(value):
    """Shape of a nested list of numbers, or None when it is ragged."""
    if not isinstance(value, list):
        return ()
    shapes = [_tree_shape(v) for v in value]
    if None in shapes or len(set(shapes)) > 1:
        return None
    return (len(value),) + (shapes[0] if shapes else ())


class ModelSpecField(serializers.Field):
    """A nested model spec, validated recursively. ``allow_points`` marks a kde kernel template."""

    def __init__(self, allow_points=False, **kwargs):
        self.allow_points = allow_points
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        context = dict(self.context)
        if self.allow_points:
            context['allow_points'] = True
        return _validate_spec(data, context)

    def to_representation(self, value):
        return value


class ModelSpecListField(serializers.Field):
    """Either one model spec or a list of them (mixture components)."""

    def to_internal_value(self, data):
        if isinstance(data, list):
            if not data:
                raise serializers.ValidationError('Expected at least one component.')
            errors = {}
            specs = []
            for i, item in enumerate(data):
                try:
                    specs.append(_validate_spec(item, self.context))
                except serializers.ValidationError as exc:
                    errors[str(i)] = exc.detail
            if errors:
                raise serializers.ValidationError(errors)
            return specs
        return _validate_spec(data, self.context)

    def to_representation(self, value):
        return value


class BijectorSpecField(serializers.Field):
    """A nested bijector spec."""

    def to_internal_value(self, data):
        return _validate_with(BijectorSpecSerializer, data, self.context)

    def to_representation(self, value):
        return value


class LeafSpecSerializer(StrictSerializer):
    """A named family with its constructor parameters."""
    family = serializers.ChoiceField(choices=sorted(FAMILIES))
    params = ParamsField(required=False)
    validate_args = serializers.BooleanField(required=False)
    allow_nan_stats = serializers.BooleanField(required=False)

    def validate(self, attrs):
        family = attrs['family']
        params = attrs.get('params', {})
        unknown = sorted(set(params) - constructor_params(FAMILIES[family]))
        if unknown:
            raise serializers.ValidationError(
                {'params': {key: [f'{family} has no parameter {key!r}.'] for key in unknown}})
        _missing_params(family, FAMILIES[family], params)
        return attrs


class BijectorSpecSerializer(StrictSerializer):
    """
    One bijector. ``Chain`` takes ``params.bijectors`` (a list applied in
    order, first entry first) and ``Invert`` takes ``params.bijector``.
    """
    bijector = serializers.ChoiceField(choices=sorted(BIJECTORS))
    params = serializers.DictField(required=False)
    validate_args = serializers.BooleanField(required=False)

    def validate(self, attrs):
        name = attrs['bijector']
        params = dict(attrs.get('params', {}))
        if name == 'Chain':
            inner = params.pop('bijectors', None)
            if not isinstance(inner, list):
                raise serializers.ValidationError({'params': {'bijectors': ['Chain needs a list of bijectors.']}})
            nested = {}
            validated = []
            for i, item in enumerate(inner):
                try:
                    validated.append(_validate_with(BijectorSpecSerializer, item, self.context))
                except serializers.ValidationError as exc:
                    nested[str(i)] = exc.detail
            if nested:
                raise serializers.ValidationError({'params': {'bijectors': nested}})
            rest = {'bijectors': validated}
        elif name == 'Invert':
            inner = params.pop('bijector', None)
            if inner is None:
                raise serializers.ValidationError({'params': {'bijector': ['Invert needs a bijector.']}})
            try:
                rest = {'bijector': _validate_with(BijectorSpecSerializer, inner, self.context)}
            except serializers.ValidationError as exc:
                raise serializers.ValidationError({'params': {'bijector': exc.detail}})
        else:
            allowed = constructor_params(BIJECTORS[name])
            field = ParamsField()
            field.bind('params', self)
            try:
                rest = field.run_validation(params)
            except serializers.ValidationError as exc:
                raise serializers.ValidationError({'params': exc.detail})
            unknown = sorted(set(params) - allowed)
            if unknown:
                raise serializers.ValidationError(
                    {'params': {key: [f'{name} has no parameter {key!r}.'] for key in unknown}})
            _missing_params(name, BIJECTORS[name], params)
            params = {}
        if params:
            raise serializers.ValidationError(
                {'params': {key: [f'{name} has no parameter {key!r}.'] for key in sorted(params)}})
        if rest or 'params' in attrs:
            attrs['params'] = rest
        return attrs


class TransformedSpecSerializer(StrictSerializer):
    base = ModelSpecField()
    bijectors = serializers.ListField(child=BijectorSpecField(), allow_empty=False)
    batch_shape = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    event_shape = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)


class IndependentSpecSerializer(StrictSerializer):
    base = ModelSpecField()
    rank = serializers.IntegerField(min_value=0, required=False)


class MixtureSpecSerializer(StrictSerializer):
    """A list of components gives a Mixture; a single spec gives a MixtureSameFamily."""
    probs = serializers.ListField(child=serializers.FloatField(min_value=0.0), allow_empty=False)
    components = ModelSpecListField()
    validate_args = serializers.BooleanField(required=False)

    def validate(self, attrs):
        components = attrs['components']
        if isinstance(components, list) and len(components) != len(attrs['probs']):
            raise serializers.ValidationError(
                {'components': [f'Expected {len(attrs["probs"])} components, got {len(components)}.']})
        return attrs


class AutoregressiveSpecSerializer(StrictSerializer):
    """x_i drawn from family(weights[i] . x + bias[i]); weights must be strictly lower-triangular."""
    family = serializers.ChoiceField(choices=['Bernoulli', 'Normal'])
    weights = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()))
    bias = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    scale = serializers.FloatField(required=False)
    steps = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        d = len(attrs['bias'])
        weights = attrs['weights']
        if len(weights) != d or any(len(row) != d for row in weights):
            raise serializers.ValidationError({'weights': [f'Expected a {d}x{d} matrix.']})
        if any(weights[i][j] != 0 for i in range(d) for j in range(i, d)):
            raise serializers.ValidationError({'weights': ['Weights must be strictly lower-triangular.']})
        if 'scale' in attrs and attrs['family'] != 'Normal':
            raise serializers.ValidationError({'scale': ['Only the Normal family takes a scale.']})
        return attrs


class KdeSpecSerializer(StrictSerializer):
    """
    A kernel density estimate over the points in ``points_file``. The
    optional ``kernel`` template marks the parameter receiving the points
    with ``"@points"``.
    """
    points_file = serializers.CharField()
    kernel = ModelSpecField(required=False, allow_points=True)
    bandwidth = serializers.FloatField(required=False)

    def validate(self, attrs):
        kernel = attrs.get('kernel')
        if kernel is not None and POINTS_MARKER not in json.dumps(kernel):
            raise serializers.ValidationError({'kernel': [f'The kernel template must use {POINTS_MARKER!r}.']})
        if kernel is not None and 'bandwidth' in attrs:
            raise serializers.ValidationError({'bandwidth': ['bandwidth only applies to the default kernel.']})
        return attrs


_COMBINATOR_SERIALIZERS = {
    'transformed': TransformedSpecSerializer,
    'independent': IndependentSpecSerializer,
    'mixture': MixtureSpecSerializer,
    'autoregressive': AutoregressiveSpecSerializer,
    'kde': KdeSpecSerializer,
}


def _validate_with(serializer_class, data, context=None):
    serializer = serializer_class(data=data, context=context or {})
    serializer.is_valid(raise_exception=True)
    return _plain(serializer.validated_data)


def _plain(value):
    # validated_data nests OrderedDicts; canonical specs are plain dicts and lists
    if isinstance(value, dict):
        return {key: _plain(v) for key, v in value.items()}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def _validate_spec(data, context=None):
    if not isinstance(data, dict):
        raise serializers.ValidationError(f'Expected a model spec object, got {type(data).__name__}.')
    if 'family' in data:
        return _validate_with(LeafSpecSerializer, data, context)
    keys = [key for key in data if key in COMBINATORS]
    if len(data) != 1 or len(keys) != 1:
        names = ', '.join(sorted(data)) or 'nothing'
        raise serializers.ValidationError(
            f'Expected "family" or exactly one of {", ".join(COMBINATORS)}; got {names}.')
    key = keys[0]
    try:
        return {key: _validate_with(_COMBINATOR_SERIALIZERS[key], data[key], context)}
    except serializers.ValidationError as exc:
        raise serializers.ValidationError({key: exc.detail})


def _flatten_errors(detail, prefix):
    if isinstance(detail, dict):
        for key, value in detail.items():
            path = prefix if key == 'non_field_errors' else f'{prefix}.{key}'
            yield from _flatten_errors(value, path)
    elif isinstance(detail, list) and detail and all(isinstance(d, str) for d in detail):
        yield prefix, ' '.join(str(d) for d in detail)
    elif isinstance(detail, list):
        for i, value in enumerate(detail):
            yield from _flatten_errors(value, f'{prefix}.{i}' if len(detail) > 1 else prefix)
    else:
        yield prefix, str(detail)


def parse_model_spec(data, field='model', allow_points=False):
    """
    Validate a spec document; returns its canonical dict form. With
    ``allow_points`` the document is a kde kernel template and may use
    ``"@points"``.
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except ValueError as exc:
            raise ModelSpecError(f'{field}: invalid JSON ({exc})', field=field) from exc
    try:
        return _validate_spec(data, {'allow_points': allow_points})
    except serializers.ValidationError as exc:
        path, message = next(_flatten_errors(exc.detail, field))
        raise ModelSpecError(f'{path}: {message}', field=path) from exc


def print_model_spec(spec) -> str:
    """Canonical text of a parsed spec; ``parse_model_spec`` reads it back unchanged."""
    return json.dumps(spec, sort_keys=True, separators=(',', ':'))
