from dataclasses import fields

from django.conf import settings
from rest_framework import serializers

from charfn.params import MODEL_TYPES, MarketInputs, build_model
from common.exceptions import MarketError, ParameterError

CONFIG_VERSION = 1


class ModelSectionSerializer(serializers.Serializer):
    """Model name and its parameters; the model's own invariants are enforced here."""

    name = serializers.ChoiceField(choices=sorted(MODEL_TYPES))
    params = serializers.DictField(child=serializers.FloatField())

    def validate(self, data):
        expected = {field.name for field in fields(MODEL_TYPES[data['name']])}
        given = set(data['params'])
        errors = {}
        for missing in sorted(expected - given):
            errors[missing] = ["This parameter is required."]
        for extra in sorted(given - expected):
            errors[extra] = [f"Unknown parameter for model '{data['name']}'."]
        if errors:
            raise serializers.ValidationError({'params': errors})
        try:
            data['model'] = build_model(data['name'], data['params'])
        except ParameterError as exc:
            raise serializers.ValidationError({'params': {exc.field: [str(exc)]}})
        return data


class MarketSectionSerializer(serializers.Serializer):
    """Either ``{forward, discount}`` or ``{spot, rate, dividend}``."""

    forward = serializers.FloatField(required=False)
    discount = serializers.FloatField(required=False)
    spot = serializers.FloatField(required=False)
    rate = serializers.FloatField(required=False)
    dividend = serializers.FloatField(required=False)

    def validate(self, data):
        direct = {'forward', 'discount'} & set(data)
        from_spot = {'spot', 'rate', 'dividend'} & set(data)
        if direct and from_spot:
            raise serializers.ValidationError(
                "Give exactly one market parameterization: {forward, discount} or {spot, rate, dividend}."
            )
        if direct and direct != {'forward', 'discount'}:
            missing = ({'forward', 'discount'} - direct).pop()
            raise serializers.ValidationError({missing: ["This field is required."]})
        if not direct and 'spot' not in data:
            raise serializers.ValidationError(
                "Give exactly one market parameterization: {forward, discount} or {spot, rate, dividend}."
            )
        return data


class CosSectionSerializer(serializers.Serializer):
    L = serializers.FloatField(default=lambda: settings.COS_DEFAULT_L)
    M = serializers.IntegerField(min_value=2, default=lambda: settings.COS_DEFAULT_M)
    formula = serializers.ChoiceField(choices=['classic', 'alt'], default='classic')
    backend = serializers.ChoiceField(choices=['direct', 'nufft'], default='nufft')
    tolerance = serializers.FloatField(
        min_value=1e-16, max_value=1e-4, default=lambda: settings.NUFFT_DEFAULT_TOLERANCE,
    )

    def validate_L(self, value):
        if not value > 0:
            raise serializers.ValidationError("Must be > 0.")
        return value


class GridSerializer(serializers.Serializer):
    """Evenly spaced values ``{min, max, count, spacing}``."""

    min = serializers.FloatField()
    max = serializers.FloatField()
    count = serializers.IntegerField(min_value=0)
    spacing = serializers.ChoiceField(choices=['linear', 'log'], default='linear')

    def validate(self, data):
        if data['count'] > 1 and not data['min'] < data['max']:
            raise serializers.ValidationError({'max': ["Must be greater than min."]})
        return data


class ValuesOrGridField(serializers.Field):
    """An explicit list of numbers or a grid mapping."""

    default_error_messages = {
        'invalid': "Expected a list of numbers or a mapping with min, max and count.",
    }

    def __init__(self, positive=False, **kwargs):
        self.positive = positive
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, dict):
            grid = GridSerializer(data=data)
            grid.is_valid(raise_exception=True)
            values = dict(grid.validated_data)
            if self.positive and values['count'] and values['min'] <= 0:
                raise serializers.ValidationError({'min': ["Must be > 0."]})
            if values['spacing'] == 'log' and values['count'] and values['min'] <= 0:
                raise serializers.ValidationError({'min': ["Log spacing needs min > 0."]})
            return values
        if isinstance(data, (list, tuple)):
            values = serializers.ListField(child=serializers.FloatField()).run_validation(list(data))
            if self.positive:
                bad = [index for index, value in enumerate(values) if not value > 0]
                if bad:
                    raise serializers.ValidationError({bad[0]: ["Must be > 0."]})
            return values
        self.fail('invalid')

    def to_representation(self, value):
        return value


class RunConfigSerializer(serializers.Serializer):
    """A versioned run configuration as read from YAML or posted as JSON."""

    version = serializers.IntegerField(default=CONFIG_VERSION)
    model = ModelSectionSerializer()
    market = MarketSectionSerializer()
    maturity = serializers.FloatField()
    cos = CosSectionSerializer(required=False)
    strikes = ValuesOrGridField(positive=True, required=False)
    points = ValuesOrGridField(required=False)

    def validate_version(self, value):
        if value != CONFIG_VERSION:
            raise serializers.ValidationError(f"Unsupported config version {value}; expected {CONFIG_VERSION}.")
        return value

    def validate_maturity(self, value):
        if not value > 0:
            raise serializers.ValidationError("Must be > 0.")
        return value

    def validate(self, data):
        if 'cos' not in data:
            cos = CosSectionSerializer(data={})
            cos.is_valid(raise_exception=True)
            data['cos'] = dict(cos.validated_data)
        market = data['market']
        try:
            if 'forward' in market:
                data['market_inputs'] = MarketInputs(
                    forward=market['forward'], discount=market['discount'], maturity=data['maturity'],
                )
            else:
                data['market_inputs'] = MarketInputs.from_spot(
                    market['spot'], market.get('rate', 0.0), market.get('dividend', 0.0), data['maturity'],
                )
        except MarketError as exc:
            if exc.field == 'maturity':
                raise serializers.ValidationError({'maturity': [str(exc)]})
            raise serializers.ValidationError({'market': {exc.field: [str(exc)]}})
        return data


class PriceRequestSerializer(RunConfigSerializer):
    """Run config that must carry strikes."""

    strikes = ValuesOrGridField(positive=True)


class DensityRequestSerializer(RunConfigSerializer):
    """Run config that must carry density points."""

    points = ValuesOrGridField()
