"""Exception hierarchy shared across the package."""


class PerfCityError(Exception):
    """Base class for all perfcity errors."""


# --- model validation ---

class ModelError(PerfCityError):
    """A candidate system model violates a structural invariant."""


class DuplicateClassIdError(ModelError):
    pass


class OrphanClassError(ModelError):
    """Class present in the map but not the tree, or vice versa."""


class NegativeMetricError(ModelError):
    pass


class EmptyModelError(ModelError):
    pass


# --- wire protocol ---

class ProtocolError(PerfCityError):
    """A wire record could not be decoded."""


class MalformedRecordError(ProtocolError):
    pass


class UnknownKindError(ProtocolError):
    pass


class SchemaViolationError(ProtocolError):
    """Record kind is known but a payload field is missing or ill-typed."""


# --- history buffer ---

class HistoryError(PerfCityError):
    pass


class OutOfOrderFrameError(HistoryError):
    pass


class SeekOutOfRangeError(HistoryError):
    pass


# --- scene documents ---

class MalformedSceneError(PerfCityError):
    pass


# --- service ---

class ServiceError(PerfCityError):
    pass


class UnknownClassError(ServiceError):
    """Selection or hover target does not exist in the current model."""


class BindFailureError(ServiceError):
    pass


# --- harness ---

class HarnessError(PerfCityError):
    pass


class InvalidSpecError(HarnessError):
    pass


class MalformedTraceError(HarnessError):
    pass
