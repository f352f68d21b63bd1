"""Exception types shared across the package."""


class TrackforgeError(Exception):
    """Base class for all errors raised by trackforge."""


# scheduling
class ConfigError(TrackforgeError, ValueError):
    pass


class AllocationExceeded(ConfigError):
    pass


class ZeroWorkers(ConfigError):
    pass


class MissingTimeKey(TrackforgeError, ValueError):
    pass


class ProtocolError(TrackforgeError):
    pass


class UnknownWorker(ProtocolError):
    pass


class DuplicateCompletion(ProtocolError):
    pass


class WorkerPanic(TrackforgeError):
    """A task callback raised inside a worker."""

    def __init__(self, task_id, worker_id, cause):
        super().__init__(f"worker {worker_id} failed on task {task_id}: {cause!r}")
        self.task_id = task_id
        self.worker_id = worker_id
        self.cause = cause


class Timeout(TrackforgeError):
    pass


class InvalidParams(TrackforgeError, ValueError):
    pass


# ingest
class UnreadableFile(TrackforgeError, OSError):
    pass


class SchemaMismatch(TrackforgeError, ValueError):
    pass


class PartialArchive(TrackforgeError):
    def __init__(self, report):
        super().__init__(f"{len(report.failed)} leaf archive(s) failed")
        self.report = report


# tracks / geometry
class DegenerateSegment(TrackforgeError, ValueError):
    pass


class OutOfCoverage(TrackforgeError, ValueError):
    pass


class CorruptArchive(TrackforgeError):
    pass


class PolarDegeneracy(TrackforgeError, ValueError):
    pass


class DegeneratePolygon(TrackforgeError, ValueError):
    pass
