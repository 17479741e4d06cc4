from .core import Schema
from .fields import (
    StringF,
    FloatF,
    DictF,
    ListF,
    BooleanF,
    IntegerF,
    NestedF,
    SchemaField,
)
from .validators import Validator, Length, Value, OneOf, Shape

__all__ = [
    "Schema",
    # Fields
    "SchemaField",  # base class
    "StringF",
    "IntegerF",
    "FloatF",
    "BooleanF",
    "ListF",
    "DictF",
    "NestedF",
    # Validators
    "Validator",  # base class
    "Length",
    "Value",
    "OneOf",
    "Shape",
]
