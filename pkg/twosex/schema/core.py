from __future__ import annotations
from typing import Callable, Generic, TypeVar

T = TypeVar("T")


class Validator:
    def __init__(self, err: str | None = None):
        self.err = f"{err}{'' if err.endswith('.') else '.'}" if err else None

    def __call__(self, value: any) -> any:
        self.validate(value=value)

    def validate(self, value: any):
        try:
            self._validate(value)
        except ValueError as e:
            if self.err:
                raise ValueError(self.err)
            raise e

    def _validate(self, value: any):
        raise NotImplementedError()


class SchemaField(Generic[T]):
    def __init__(self):
        self._default: T | Callable[[], T] | None = None
        self.validators: list[Validator] = []
        self.is_required: bool = True

    def has(self, validator: Validator) -> SchemaField[T]:
        self.validators.append(validator)
        return self

    def default(self, value: T | Callable[[], T]) -> SchemaField[T]:
        self._default = value
        self.is_required = False
        return self

    def optional(self) -> SchemaField[T]:
        self.is_required = False
        return self

    def coerce(self, value: any) -> T:
        return value

    def resolve(self, value: any, strict: bool) -> tuple[any, dict[str, list[str]]]:
        """Coerces and validates one value; returns (value, errors keyed by sub-path)."""
        value = self.coerce(value)
        messages = []
        for validator in self.validators:
            try:
                validator(value)
            except ValueError as e:
                messages.append(str(e))
        return value, ({"": messages} if messages else {})


class Schema:
    def __init__(self, **fields: SchemaField):
        self.fields = fields
        self._strict = False

    def strict(self, value: bool = True) -> Schema:
        """Rejects keys that no field declares."""
        self._strict = value
        return self

    def validate(self, data: dict) -> tuple[bool, dict[str, list[str]], dict]:
        errors: dict[str, list[str]] = {}
        coerced_data = {}

        if not isinstance(data, dict):
            return False, {"": ["Expected a mapping."]}, {}

        for field_name, field in self.fields.items():
            if not field.__class__.__name__.endswith("F"):
                raise SyntaxError(
                    f'Field {field.__class__.__name__} name must end with "F".'
                )
            if field_name not in data or data[field_name] is None:
                if field._default is not None:
                    default = field._default() if callable(field._default) else field._default
                    value, _ = field.resolve(default, self._strict)
                    coerced_data[field_name] = value
                elif field.is_required:
                    errors[field_name] = ["This field is required."]
                continue
            try:
                value, field_errors = field.resolve(data[field_name], self._strict)
            except (ValueError, TypeError, KeyError) as e:
                errors[field_name] = [str(e) or e.__class__.__name__]
                continue
            for sub_path, messages in field_errors.items():
                key = f"{field_name}.{sub_path}" if sub_path else field_name
                errors.setdefault(key, []).extend(messages)
            if not field_errors:
                coerced_data[field_name] = value

        if self._strict:
            extra_fields = sorted(set(data.keys()) - set(self.fields.keys()))
            if extra_fields:
                errors["__extra__"] = [f"Unexpected fields: {', '.join(map(str, extra_fields))}"]

        return not errors, errors, coerced_data
