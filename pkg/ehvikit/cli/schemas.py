import math

from marshmallow import Schema, ValidationError, fields, validates_schema


class InfFloat(fields.Float):
    """Float that writes ±∞ as the strings 'inf' / '-inf' and reads them back."""

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value

    def _deserialize(self, value, attr, data, **kwargs):
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "-inf"):
            return float(value.strip())
        return super()._deserialize(value, attr, data, **kwargs)


class HyperboxSchema(Schema):
    lower = fields.List(
        InfFloat(), required=True, metadata={"description": "Lower corner l"}
    )
    upper = fields.List(
        InfFloat(),
        required=True,
        metadata={"description": "Upper corner u; 'inf' for unbounded sides"},
    )

    @validates_schema
    def validate_bounds(self, data, **kwargs):
        if len(data["lower"]) != len(data["upper"]):
            raise ValidationError("'lower' and 'upper' must have the same length.")
        if not all(lo < hi for lo, hi in zip(data["lower"], data["upper"])):
            raise ValidationError("Every lower bound must be below its upper bound.")


class DecompositionSchema(Schema):
    n = fields.Integer(required=True, metadata={"description": "Front size"})
    d = fields.Integer(required=True, metadata={"description": "Objective count"})
    method = fields.String(required=True)
    local_lower_bounds = fields.Integer(
        required=True, metadata={"description": "Number of local lower bound points"}
    )
    boxes = fields.List(fields.Nested(HyperboxSchema), required=True)


class ValueSchema(Schema):
    quantity = fields.String(required=True, metadata={"example": "ehvi"})
    value = InfFloat(required=True)


class McReportSchema(Schema):
    criterion = fields.String(required=True)
    exact = InfFloat(required=True)
    estimate = InfFloat(required=True)
    std_error = InfFloat(required=True)
    samples = fields.Integer(required=True)
    z_score = InfFloat(required=True)
    seed = fields.Integer(required=True)
    workers = fields.Integer(required=True)


class SpeedRowSchema(Schema):
    d = fields.Integer(required=True)
    n = fields.Integer(required=True)
    kind = fields.String(required=True)
    algorithm = fields.String(required=True)
    mean_seconds = fields.Float(required=True)
    repetitions = fields.Integer(required=True)
    mean_boxes = fields.Float(required=True)
    mean_lower_bounds = fields.Float(required=True)


class SpeedMetadataSchema(Schema):
    machine = fields.String(required=True)
    timestamp = fields.String(required=True)
    slopes = fields.Dict(keys=fields.String(), values=fields.Float(), required=True)


class HistoryRowSchema(Schema):
    g = fields.Integer(required=True, metadata={"description": "Evaluation count"})
    hv = fields.Float(required=True, metadata={"description": "HV of the front after g"})


class KrigingModelSchema(Schema):
    theta = fields.List(fields.Float(), required=True)
    mu_hat = fields.Float(required=True)
    sigma2_hat = fields.Float(required=True)
    nugget = fields.Float(required=True)
    log_likelihood = fields.Float(required=True)
    bounds = fields.List(fields.List(fields.Float()), required=True)
    train_x = fields.List(fields.List(fields.Float()), required=True)
    train_y = fields.List(fields.Float(), required=True)
