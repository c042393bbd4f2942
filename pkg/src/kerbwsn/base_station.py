"""The WSN gateway, optionally guarded by ticket verification."""

from __future__ import annotations

import logging
from typing import Union

from .crypto import SecretKey
from .energy import EnergyParams, EnergyState, tx_cost
from .errors import (AccessDenied, DecodeError, IntegrityFailure, ProtocolError,
                     Unauthenticated, kind)
from .messages import (TAG_AP_REQUEST, TAG_RAW_QUERY, ApRequest, Principal, RawQuery,
                       SensorQuery, SensorResponse, decode, encode, peek_tag)
from .replay import ReplayCache
from .sensor_net import Topology, collect
from .verify import verify_credentials

logger = logging.getLogger(__name__)


class BaseStation:
    """Serves sensor data; with ``auth_enabled`` only to verified ticket holders.

    Every verification attempt is charged ``verify_cost``. Only served
    queries pay for a response transmission, which is where authentication
    saves energy.
    """

    def __init__(self, service: Principal, service_key: SecretKey, topology: Topology,
                 energy: EnergyParams | None = None, auth_enabled: bool = True,
                 max_clock_skew: int = 5) -> None:
        self.service = service
        self.service_key = service_key
        self.topology = topology
        self.params = energy or EnergyParams()
        self.energy = EnergyState(self.params.initial_energy)
        self.auth_enabled = auth_enabled
        self.max_clock_skew = max_clock_skew
        self.replay_cache = ReplayCache(max_clock_skew)
        self.served = 0
        self.rejected = 0

    def serve_query(self, query: SensorQuery, now: int) -> SensorResponse:
        """Collect readings from the network and pay for sending them back."""
        gathered, _ = collect(self.topology)
        response = SensorResponse(query.query_id, gathered.readings)
        self.energy.charge(tx_cost(self.params, self.response_bytes(response)), "tx", now)
        self.served += 1
        return response

    def response_bytes(self, response: SensorResponse) -> int:
        return self.topology.reading_packet_size * len(response.readings)

    def _verify(self, req: ApRequest, source_addr: int, now: int) -> None:
        ticket, auth = verify_credentials(req.service_ticket, req.authenticator,
                                          self.service_key, req.user, source_addr, now,
                                          self.max_clock_skew)
        if ticket.service != self.service:
            raise IntegrityFailure(f"ticket names {ticket.service}, not {self.service}")
        self.replay_cache.check_and_insert(auth.client, auth.client_addr, auth.timestamp, now)

    def handle_request(self, req: Union[ApRequest, RawQuery], source_addr: int,
                       now: int) -> SensorResponse:
        if not self.auth_enabled:
            return self.serve_query(req.query, now)
        self.energy.charge(self.params.verify_cost, "verify", now)
        try:
            if isinstance(req, RawQuery):
                raise Unauthenticated(f"raw query from {req.user}")
            self._verify(req, source_addr, now)
        except (ProtocolError, IntegrityFailure) as exc:
            self.rejected += 1
            logger.debug("%s denied %s from %d: %s", self.service, req.user, source_addr, exc)
            raise AccessDenied(kind(exc), str(exc)) from exc
        return self.serve_query(req.query, now)

    def handle(self, payload: bytes, source_addr: int, now: int) -> bytes:
        """Network endpoint. Undecodable input is treated like a failed verification."""
        try:
            tag = peek_tag(payload)
            if tag == TAG_AP_REQUEST:
                req = decode(payload, TAG_AP_REQUEST)
            else:
                req = decode(payload, TAG_RAW_QUERY)
        except DecodeError as exc:
            if self.auth_enabled:
                self.energy.charge(self.params.verify_cost, "verify", now)
            self.rejected += 1
            raise AccessDenied(kind(exc), str(exc)) from exc
        return encode(self.handle_request(req, source_addr, now))
