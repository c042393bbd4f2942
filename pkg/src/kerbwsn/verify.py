"""Ticket + authenticator verification common to the TGS and base stations."""

from __future__ import annotations

from .crypto import SealedBlob, SecretKey, open_blob
from .errors import (AddressMismatch, DecodeError, ExpiredTicket, IntegrityFailure,
                     StaleAuthenticator)
from .messages import (TAG_AUTHENTICATOR, TAG_TICKET, Authenticator, Principal, Ticket,
                       decode)


def open_ticket(blob: SealedBlob, key: SecretKey) -> Ticket:
    plaintext = open_blob(blob, key)
    try:
        return decode(plaintext, TAG_TICKET)
    except DecodeError as exc:
        raise IntegrityFailure("sealed payload is not a ticket") from exc


def open_authenticator(blob: SealedBlob, session_key: SecretKey) -> Authenticator:
    plaintext = open_blob(blob, session_key)
    try:
        return decode(plaintext, TAG_AUTHENTICATOR)
    except DecodeError as exc:
        raise IntegrityFailure("sealed payload is not an authenticator") from exc


def verify_credentials(ticket_blob: SealedBlob, authenticator_blob: SealedBlob,
                       key: SecretKey, claimed_user: Principal, source_addr: int,
                       now: int, max_skew: int) -> tuple[Ticket, Authenticator]:
    """Run every stateless check; the caller still owns the replay check.

    Checks run in a fixed order, so a request failing several of them always
    reports the same error.
    """
    ticket = open_ticket(ticket_blob, key)
    if not ticket.valid_at(now):
        raise ExpiredTicket(f"ticket valid [{ticket.issued_at}, {ticket.expires_at}], now {now}")
    auth = open_authenticator(authenticator_blob, ticket.session_key)
    if auth.client != ticket.client or claimed_user != ticket.client:
        raise IntegrityFailure("authenticator, ticket and request name different clients")
    if not (source_addr == ticket.client_addr == auth.client_addr):
        raise AddressMismatch(
            f"source {source_addr}, ticket {ticket.client_addr}, authenticator {auth.client_addr}")
    if abs(auth.timestamp - now) > max_skew:
        raise StaleAuthenticator(f"timestamp {auth.timestamp} outside ±{max_skew} of {now}")
    return ticket, auth
