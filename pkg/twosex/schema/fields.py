from __future__ import annotations
from .core import SchemaField, Schema


class StringF(SchemaField[str]):
    def coerce(self, value: any) -> str:
        return str(value)


class IntegerF(SchemaField[int]):
    def coerce(self, value: any) -> int:
        if isinstance(value, bool):
            raise ValueError("Expected an integer, got a boolean.")
        if isinstance(value, int):
            return value
        if isinstance(value, str):
            value = value.strip().replace("_", "")
            if value.lstrip("-").isdigit():
                return int(value)
        number = float(value)
        if not number.is_integer():
            raise ValueError(f"Expected an integer, got {value!r}.")
        return int(number)


class FloatF(SchemaField[float]):
    def coerce(self, value: any) -> float:
        if isinstance(value, bool):
            raise ValueError("Expected a number, got a boolean.")
        return float(value)


class BooleanF(SchemaField[bool]):
    def coerce(self, value: any) -> bool:
        if isinstance(value, str):
            return value.lower() in ("true", "1", "yes", "on")
        return bool(value)


class ListF(SchemaField[list]):
    def __init__(self):
        super().__init__()
        self._item_type: SchemaField | None = None

    def item_type(self, item_type: SchemaField) -> ListF:
        self._item_type = item_type
        return self

    def coerce(self, value: any) -> list:
        if isinstance(value, tuple):
            value = list(value)
        if not isinstance(value, list):
            raise ValueError(f"Expected a list, got {type(value).__name__}.")
        if self._item_type:
            return [self._item_type.coerce(item) for item in value]
        return value


class DictF(SchemaField[dict]):
    def coerce(self, value: any) -> dict:
        if not isinstance(value, dict):
            raise ValueError("Expected a mapping.")
        return dict(value)


class NestedF(SchemaField[dict]):
    """A sub-document validated by its own Schema; strictness is inherited."""

    def __init__(self, schema: Schema):
        super().__init__()
        self.schema = schema

    def coerce(self, value: any) -> dict:
        if not isinstance(value, dict):
            raise ValueError("Expected a mapping.")
        return value

    def resolve(self, value: any, strict: bool) -> tuple[any, dict[str, list[str]]]:
        value = self.coerce(value)
        self.schema.strict(strict or self.schema._strict)
        _, errors, data = self.schema.validate(value)
        for validator in self.validators:
            try:
                validator(data)
            except ValueError as e:
                errors.setdefault("", []).append(str(e))
        return data, errors
