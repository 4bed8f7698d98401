from __future__ import annotations

from typing import Any, Callable, Union

__all__ = [
    'FuncExceptT',

    'ThermoError',
    'CustomValueError', 'CustomRuntimeError',

    'GeometryError', 'DomainError', 'MeshError', 'QuadratureError',
    'SpecViolationError', 'ConeIntegrityError', 'ConditionViolationError',

    'ExprSyntaxError', 'ExprNameError', 'ExprArityError', 'ExprEvaluationError',

    'ConfigError',

    'ConvergenceWarning', 'FunctionalSignWarning'
]


FuncExceptT = Union[str, Callable[..., Any], type, None]


def _func_name(func: FuncExceptT) -> str | None:
    if func is None:
        return None

    if isinstance(func, str):
        return func

    return getattr(func, '__qualname__', None) or getattr(func, '__name__', None) or repr(func)


class ThermoError(Exception):
    """Base of every error raised by thermobvp; remembers who raised it."""

    def __init__(self, message: str, func: FuncExceptT = None) -> None:
        self.message = message
        self.func = func

        super().__init__(self.message)

    def __str__(self) -> str:
        if (name := _func_name(self.func)) is None:
            return self.message

        return f'({name}) {self.message}'


class CustomValueError(ThermoError, ValueError):
    ...


class CustomRuntimeError(ThermoError, RuntimeError):
    ...


class GeometryError(CustomValueError):
    """Parameters violate β > 0, 0 < η < 1, β+η < 1 or 0 < a < b < β+η."""


class DomainError(CustomValueError):
    """Argument outside the interval a function is defined on."""


class MeshError(CustomValueError):
    ...


class QuadratureError(CustomValueError):
    ...


class SpecViolationError(CustomValueError):
    """A problem ingredient broke one of its standing hypotheses while being evaluated."""

    def __init__(self, message: str, func: FuncExceptT = None, condition: str = '') -> None:
        self.condition = condition

        super().__init__(f'{condition}: {message}' if condition else message, func)


class ConeIntegrityError(CustomRuntimeError):
    """The operator image left the cone by more than the tolerance."""


class ConditionViolationError(CustomRuntimeError):
    ...


class ExprSyntaxError(CustomValueError):
    def __init__(self, message: str, position: int, source: str = '', func: FuncExceptT = None) -> None:
        self.position = position
        self.source = source

        super().__init__(f'{message} at position {position}', func)


class ExprNameError(CustomValueError):
    def __init__(self, name: str, func: FuncExceptT = None) -> None:
        self.name = name

        super().__init__(f'unknown identifier "{name}"', func)


class ExprArityError(CustomValueError):
    ...


class ExprEvaluationError(CustomValueError):
    def __init__(self, message: str, expression: str = '', func: FuncExceptT = None) -> None:
        self.expression = expression

        super().__init__(f'{message} in "{expression}"' if expression else message, func)


class ConfigError(CustomValueError):
    ...


class ConvergenceWarning(UserWarning):
    ...


class FunctionalSignWarning(UserWarning):
    ...
