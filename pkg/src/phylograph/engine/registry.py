"""Algorithm plugin registry.

An algorithm is a class with four phases — init, read, compute, write —
where read and write each get their own transaction and compute must not
touch storage at all. The registry maps dotted names to descriptors plus
factories, validates submitted parameters against the descriptor, and is
the seam for wiring in additional algorithms at startup.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from phylograph.graphstore import Transaction

KIND_INFERENCE = "inference"
KIND_VISUALIZATION = "visualization"


class EngineError(Exception):
    pass


class DuplicateAlgorithmError(EngineError):
    pass


class UnknownAlgorithmError(EngineError):
    pass


class ParameterValidationError(EngineError):
    pass


class InvalidContextError(EngineError):
    pass


class UnknownJobError(EngineError):
    pass


class ResultBusyError(EngineError):
    """Another queued or running job already targets this result id."""


@dataclass(frozen=True, slots=True)
class Parameter:
    name: str
    type: type
    required: bool = True
    default: Any = None


@dataclass(frozen=True, slots=True)
class AlgorithmDescriptor:
    name: str
    kind: str
    parameters: tuple[Parameter, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (KIND_INFERENCE, KIND_VISUALIZATION):
            raise ValueError(f"unknown algorithm kind {self.kind!r}")


@dataclass(frozen=True, slots=True)
class JobContext:
    """Where a job reads from and writes to.

    ``result_id`` is the id the output is persisted under — an inference
    id for inference algorithms, a visualization id for visualization
    algorithms (which also carry the source ``inference`` id).
    """

    project: str
    dataset: str
    result_id: str
    inference: str | None = None


class Algorithm(ABC):
    """One job's worth of algorithm execution.

    A fresh instance is created per job; ``init`` receives the context and
    validated parameters, ``read`` collects input inside a read
    transaction, ``compute`` runs with no storage access, and ``write``
    persists the output inside a separate write transaction.
    """

    @abstractmethod
    def init(self, context: JobContext, parameters: Mapping[str, Any]) -> None: ...

    @abstractmethod
    def read(self, tx: Transaction) -> Any: ...

    @abstractmethod
    def compute(self, data: Any) -> Any: ...

    @abstractmethod
    def write(self, tx: Transaction, result: Any) -> None: ...


AlgorithmFactory = Callable[[], Algorithm]


class AlgorithmRegistry:
    def __init__(self) -> None:
        self._entries: dict[str, tuple[AlgorithmDescriptor, AlgorithmFactory]] = {}

    def register(self, descriptor: AlgorithmDescriptor,
                 factory: AlgorithmFactory) -> None:
        if descriptor.name in self._entries:
            raise DuplicateAlgorithmError(
                f"algorithm {descriptor.name!r} is already registered")
        self._entries[descriptor.name] = (descriptor, factory)

    def names(self) -> list[str]:
        return sorted(self._entries)

    def resolve(self, name: str) -> str:
        """Full dotted name for *name*, accepting an unambiguous last
        segment ("goeburst" for "algorithms.inference.goeburst")."""
        if name in self._entries:
            return name
        suffix_hits = [n for n in self._entries if n.rsplit(".", 1)[-1] == name]
        if len(suffix_hits) == 1:
            return suffix_hits[0]
        raise UnknownAlgorithmError(f"unknown algorithm {name!r}")

    def get(self, name: str) -> tuple[AlgorithmDescriptor, AlgorithmFactory]:
        return self._entries[self.resolve(name)]

    def validate_parameters(self, descriptor: AlgorithmDescriptor,
                            parameters: Mapping[str, Any] | None
                            ) -> dict[str, Any]:
        """Defaults applied, unknown names and wrong types refused."""
        given = dict(parameters or {})
        known = {p.name for p in descriptor.parameters}
        for name in given:
            if name not in known:
                raise ParameterValidationError(
                    f"{descriptor.name} takes no parameter {name!r}")
        out: dict[str, Any] = {}
        for spec in descriptor.parameters:
            if spec.name not in given:
                if spec.required:
                    raise ParameterValidationError(
                        f"{descriptor.name} requires parameter {spec.name!r}")
                out[spec.name] = spec.default
                continue
            value = given[spec.name]
            if not isinstance(value, spec.type) or \
                    (spec.type is int and isinstance(value, bool)):
                raise ParameterValidationError(
                    f"parameter {spec.name!r} must be {spec.type.__name__}, "
                    f"got {type(value).__name__}")
            out[spec.name] = value
        return out
