from .evaluate import evaluate
from .server import Behavior, FaultScript, RequestLogEntry, SimulatorHandle, serve
from .store import FixtureStore, dump_fixture, load_fixture

__all__ = [
    "Behavior", "FaultScript", "FixtureStore", "RequestLogEntry", "SimulatorHandle",
    "dump_fixture", "evaluate", "load_fixture", "serve",
]
