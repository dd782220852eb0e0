"""Exception types shared across the package."""


class QRouteError(Exception):
    pass


class ConfigError(QRouteError):
    """Invalid parameters, files or network descriptions (CLI exit code 2)."""


class InvalidLevelError(QRouteError, ValueError):
    pass


class NodeNotFound(QRouteError, KeyError):
    pass


class EdgeNotFound(QRouteError, KeyError):
    pass


class GeometryError(QRouteError, ValueError):
    pass


class EmbeddingError(QRouteError):
    pass


class CapacityError(EmbeddingError):
    pass


class SingularityError(QRouteError, ArithmeticError):
    pass


class DomainError(QRouteError, ValueError):
    pass


class RoutingFailure(QRouteError):
    """Greedy routing got stuck; ``node`` is where no closer neighbour existed."""

    def __init__(self, node, message=None):
        self.node = node
        super().__init__(message or f"greedy routing dead end at node {node}")


class TTLExceeded(RoutingFailure):
    def __init__(self, node, ttl):
        self.ttl = ttl
        super().__init__(node, f"route exceeded TTL of {ttl} steps at node {node}")


class MeasurementError(QRouteError):
    def __init__(self, failure_fraction):
        self.failure_fraction = failure_fraction
        super().__init__(f"all trials failed (failure fraction {failure_fraction:.3f})")


class NoMainPathError(QRouteError):
    pass


class SwitchoverFailed(QRouteError):
    def __init__(self, message, diagnostics=None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class NoPathError(RoutingFailure):
    def __init__(self, source, target):
        self.target = target
        super().__init__(source, f"target {target} unreachable from {source}")
