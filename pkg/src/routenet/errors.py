"""Exception hierarchy shared across the package."""


class RoutenetError(Exception):
    """Base class for all routenet errors."""


class DomainMismatch(RoutenetError):
    """Label sets of two multirelations do not line up for composition."""


class UnknownLabel(RoutenetError):
    """A label is not present in the expected label set."""


class CycleRisk(RoutenetError):
    """Tracing an input against an output it is already connected to."""


class ParseError(RoutenetError):
    """Malformed textual or JSON input."""

    def __init__(self, reason: str, offset: int = 0):
        super().__init__(f"parse error at offset {offset}: {reason}")
        self.reason = reason
        self.offset = offset


class StaleRedex(RoutenetError):
    """A redex no longer matches the net it was found on."""


class BudgetExhausted(RoutenetError):
    """Reduction ran out of steps; carries the partial result."""

    def __init__(self, partial):
        super().__init__("reduction budget exhausted")
        self.partial = partial


class HasBoxes(RoutenetError):
    """Path machinery only applies to nets without exponential boxes."""


class CyclicNet(RoutenetError):
    """Path counting requires an acyclic net."""


class NotNormal(RoutenetError):
    """Operation requires a net in normal form."""


class NotAreaShaped(RoutenetError):
    """A normal routing net failed to decompose as a routing area."""


class NotStratified(RoutenetError):
    """Region context admits no stratification order."""


class TypingError(RoutenetError):
    """Type-and-effect checking failed; names the violated rule."""

    def __init__(self, rule: str, detail: str = ""):
        msg = f"typing rule ({rule}) failed" + (f": {detail}" if detail else "")
        super().__init__(msg)
        self.rule = rule


class DerivationMismatch(RoutenetError):
    """A typing derivation does not match the term being translated."""


class InterfaceMismatch(RoutenetError):
    """Net interface does not expose the expected labelled wires."""
