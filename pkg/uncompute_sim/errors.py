"""Исключения симулятора и алгоритмов."""
from typing import Optional, Tuple


class QuantumSimError(Exception):
    """Базовое исключение пакета."""


# Симулятор

class CapacityExceeded(QuantumSimError, ValueError):
    pass


class OutOfQubits(QuantumSimError):
    pass


class InvalidArity(QuantumSimError, ValueError):
    pass


class DeadQubit(QuantumSimError):
    pass


class NonFiniteAngle(QuantumSimError, ValueError):
    pass


class OverlappingRegisters(QuantumSimError, ValueError):
    pass


class InvariantViolation(QuantumSimError):
    pass


# Развычисление

class InvalidExpectedValue(QuantumSimError, ValueError):
    pass


class ForgetMismatch(QuantumSimError):
    """Регистр не равен ожидаемому значению хотя бы в одной ветви суперпозиции."""

    def __init__(self, message: str, witness: Optional[int] = None, value: Optional[int] = None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class ForgetUndetermined(QuantumSimError):
    """Значение регистра не определяется остальным состоянием."""

    def __init__(self, message: str, witnesses: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.witnesses = witnesses


class NotQfree(QuantumSimError):
    pass


# Амплитудное усиление и алгоритмы

class ArityMismatch(QuantumSimError, ValueError):
    pass


class InvalidMarks(QuantumSimError, ValueError):
    pass


class DuplicateEntries(QuantumSimError, ValueError):
    pass


class BoundTooLarge(QuantumSimError, ValueError):
    pass


class InvalidCardinality(QuantumSimError, ValueError):
    pass


class NoCollisionFound(QuantumSimError):
    pass


class InvalidM(QuantumSimError, ValueError):
    pass


# Командная строка

class UsageError(QuantumSimError):
    pass


class ConfigurationError(QuantumSimError):
    pass
