"""Checkpoint serialization for fusion parameters.

A checkpoint is a JSON document holding the configuration record and every
named parameter tensor with its shape and row-major values.  Values are
written with 17 significant digits, so write -> parse reproduces every
float64 bit-for-bit.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError, ValidationError
from ..ingest import _as_record, _field, _load_json
from .config import FusionConfig, param_shapes

_CONFIG_KEYS = ("d", "heads", "classes", "ffn_multiplier", "seed")


def _format_value(value: float) -> str:
    return f"{value:.17g}"


def _tensor_row(name: str, tensor: np.ndarray) -> str:
    shape = ", ".join(str(n) for n in tensor.shape)
    if tensor.ndim == 1:
        values = "[" + ", ".join(_format_value(v) for v in tensor) + "]"
    else:
        values = (
            "["
            + ", ".join(
                "[" + ", ".join(_format_value(v) for v in row) + "]" for row in tensor
            )
            + "]"
        )
    return f'    {json.dumps(name)}: {{"shape": [{shape}], "values": {values}}}'


def write_checkpoint(params: dict[str, np.ndarray], config: FusionConfig) -> str:
    """Serialize a parameter set and its configuration.

    Raises:
        ValidationError: params do not match the configuration's expected
            tensor names and shapes, or contain non-finite values.
    """
    expected = param_shapes(config)
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        raise ValidationError(
            f"parameter set does not match configuration (missing {missing}, extra {extra})"
        )
    rows = []
    for name, shape in expected.items():
        tensor = np.asarray(params[name], dtype=np.float64)
        if tensor.shape != shape:
            raise ValidationError(
                f"tensor {name!r} has shape {tensor.shape}, expected {shape}"
            )
        if not np.all(np.isfinite(tensor)):
            raise ValidationError(f"tensor {name!r} contains NaN or infinite values")
        rows.append(_tensor_row(name, tensor))
    config_row = ", ".join(f'"{key}": {getattr(config, key)}' for key in _CONFIG_KEYS)
    return (
        "{\n"
        f'  "config": {{{config_row}}},\n'
        '  "tensors": {\n' + ",\n".join(rows) + "\n  }\n"
        "}\n"
    )


def parse_checkpoint(source) -> tuple[dict[str, np.ndarray], FusionConfig]:
    """Parse a checkpoint back into (params, config).

    Raises:
        ParseError: malformed JSON or mistyped fields.
        ValidationError: config/tensor disagreement or non-finite values.
    """
    doc = _as_record(_load_json(source, "checkpoint"), "checkpoint")
    config_rec = _as_record(_field(doc, "config", "checkpoint"), "checkpoint config")
    kwargs = {}
    for key in _CONFIG_KEYS:
        value = _field(config_rec, key, "checkpoint config")
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"checkpoint config: field {key!r} must be an integer")
        kwargs[key] = value
    config = FusionConfig(**kwargs)

    tensors_rec = _as_record(_field(doc, "tensors", "checkpoint"), "checkpoint tensors")
    expected = param_shapes(config)
    if set(tensors_rec) != set(expected):
        missing = sorted(set(expected) - set(tensors_rec))
        extra = sorted(set(tensors_rec) - set(expected))
        raise ValidationError(
            f"checkpoint tensors do not match configuration (missing {missing}, extra {extra})"
        )
    params: dict[str, np.ndarray] = {}
    for name, shape in expected.items():
        where = f"checkpoint tensor {name!r}"
        rec = _as_record(tensors_rec[name], where)
        declared = _field(rec, "shape", where)
        if not isinstance(declared, list) or any(
            isinstance(v, bool) or not isinstance(v, int) for v in declared
        ):
            raise ParseError(f"{where}: 'shape' must be a list of integers")
        if tuple(declared) != shape:
            raise ValidationError(
                f"{where}: shape {declared} does not match expected {list(shape)}"
            )
        values = _field(rec, "values", where)
        try:
            tensor = np.asarray(values, dtype=np.float64)
        except (TypeError, ValueError):
            raise ParseError(f"{where}: values are not a numeric array") from None
        if tensor.shape != shape:
            raise ValidationError(
                f"{where}: values have shape {tensor.shape}, expected {shape}"
            )
        if not np.all(np.isfinite(tensor)):
            raise ValidationError(f"{where}: values contain NaN or infinity")
        params[name] = tensor
    return params, config
