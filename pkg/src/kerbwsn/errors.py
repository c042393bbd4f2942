"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class KerbWsnError(Exception):
    """Root of all package errors."""


class InvalidInput(KerbWsnError, ValueError):
    pass


class IntegrityFailure(KerbWsnError):
    """A sealed blob did not verify: wrong key or tampered bytes."""


# -- encoding -----------------------------------------------------------------

class DecodeError(KerbWsnError):
    pass


class WrongType(DecodeError):
    pass


class MalformedEncoding(DecodeError):
    pass


# -- protocol verification (KDC and base station) ----------------------------

class ProtocolError(KerbWsnError):
    """A request was refused by a KDC or base station."""


class AlreadyRegistered(ProtocolError):
    pass


class UnknownPrincipal(ProtocolError):
    pass


class UnknownService(ProtocolError):
    pass


class UnknownRealm(ProtocolError):
    pass


class ExpiredTicket(ProtocolError):
    pass


class ReplayDetected(ProtocolError):
    pass


class AddressMismatch(ProtocolError):
    pass


class StaleAuthenticator(ProtocolError):
    pass


class Unauthenticated(ProtocolError):
    """A raw query reached a base station that requires tickets."""


class AccessDenied(ProtocolError):
    """Base-station rejection; ``reason`` names the underlying check."""

    def __init__(self, reason: str, detail: str = "") -> None:
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


# -- client side ---------------------------------------------------------------

class ClientError(KerbWsnError):
    pass


class WrongPassword(ClientError):
    pass


class NoTgt(ClientError):
    pass


class ExpiredTgt(ClientError):
    pass


# -- simulation ------------------------------------------------------------------

class EmptyNetwork(KerbWsnError):
    pass


class UnknownNode(KerbWsnError, KeyError):
    pass


class EnergyExhausted(KerbWsnError):
    """The base station could not pay for an operation in full."""


class ScenarioError(KerbWsnError):
    pass


class ParseError(ScenarioError):
    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(ScenarioError):
    pass


def kind(exc: BaseException) -> str:
    """Short error-kind label used in outcomes and reports."""
    if isinstance(exc, AccessDenied):
        return exc.reason
    return type(exc).__name__
