"""perfcity: live call-count observability as a metric-encoded 3D city.

The package splits into a model/protocol core (model, protocol), the
streaming pipeline (aggregate, history), the geometry (layout), the
long-running server (service), a workload harness (harness), and offline
report rendering (report). The ``perfcity`` and ``perfcity-harness`` CLIs
front the server, the report path, and the trace generator/replayer.
"""

from .errors import PerfCityError
from .model import ClassInfo, PackageNode, SystemModel, apply_model_update, class_order, validate_model
from .protocol import CallEvent, ControlAction, MetricFrame, decode_record, encode_record

__version__ = "0.1.0"

__all__ = [
    "PerfCityError",
    "ClassInfo",
    "PackageNode",
    "SystemModel",
    "validate_model",
    "apply_model_update",
    "class_order",
    "CallEvent",
    "MetricFrame",
    "ControlAction",
    "decode_record",
    "encode_record",
    "__version__",
]
