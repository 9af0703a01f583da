"""Shared exception types.

Two broad families matter to callers: ``DataError`` (bad input files, bad
datasets, bad labels -> CLI exit code 2) and ``EngineError`` (training or
runtime failures -> CLI exit code 3).
"""


class ConvobotError(Exception):
    """Base class for every error raised by this package."""


class DataError(ConvobotError):
    """Invalid user-supplied data: files, datasets, labels, configs."""


class EngineError(ConvobotError):
    """Failure inside training or inference machinery."""


# knowledge base
class MalformedJson(DataError):
    pass


class SchemaViolation(DataError):
    pass


class ValidationFailure(DataError):
    pass


# feature building
class EmptyCorpus(DataError):
    pass


class UnknownLabel(DataError):
    pass


class CodeOutOfRange(DataError):
    pass


# neural net
class InvalidConfig(DataError):
    pass


class DimensionMismatch(EngineError):
    pass


class EmptyDataset(DataError):
    pass


class DivergenceDetected(EngineError):
    pass


class CorruptModel(DataError):
    pass


class VersionMismatch(DataError):
    pass


# datasets / splits
class InsufficientExamples(DataError):
    pass


class EmptyEntityInventory(DataError):
    pass


# CoNLL parsing
class MalformedLine(DataError):
    pass


class UnknownTag(DataError):
    pass


# dialogue
class NoTemplates(DataError):
    pass
