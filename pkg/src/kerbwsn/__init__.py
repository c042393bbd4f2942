"""Kerberos-style ticket authentication for wireless sensor network base stations."""

from .base_station import BaseStation
from .client import ClientSession, login
from .crypto import SealedBlob, SecretKey, derive_key, open_blob, random_session_key, seal
from .energy import EnergyParams, EnergyState, EnergyTrace, tx_cost
from .kdc import Kdc, KdcConfig, PrincipalDb
from .messages import Principal, SensorQuery, Ticket, decode, encode
from .scenario import Scenario, parse_scenario, render_scenario
from .world import World, build_world

__version__ = "0.1.0"

__all__ = [
    "BaseStation", "ClientSession", "login", "SealedBlob", "SecretKey", "derive_key",
    "open_blob", "random_session_key", "seal", "EnergyParams", "EnergyState", "EnergyTrace",
    "tx_cost", "Kdc", "KdcConfig", "PrincipalDb", "Principal", "SensorQuery", "Ticket",
    "decode", "encode", "Scenario", "parse_scenario", "render_scenario", "World",
    "build_world",
]
