"""Scenario configuration: a line-oriented ``section.key = value`` text format.

Example::

    # comment lines start with '#'
    scenario.seed = 42
    topology.n_nodes = 20
    topology.area = 100.0
    topology.range = 35.0
    energy.initial_energy = 1000000
    kdc.max_clock_skew = 5
    run.user_counts = 0, 1, 2, 4, 8, 16
    realm.WSN.services = bs1
    realm.WSN.trusts = FIELD
    realm.WSN.user.alice.password = correct horse
    realm.WSN.user.alice.address = 1
    realm.WSN.user.alice.authorized = true

Every key is optional. Missing keys take the defaults below; if the file
names no realm at all, the default realms are used. Unknown keys are an
error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .energy import EnergyParams
from .errors import InvalidInput, ParseError, ValidationError
from .kdc import KdcConfig
from .messages import TGS_NAME

_NAME = re.compile(r"^[A-Za-z0-9_\-]+$")
U64_MAX = 0xFFFF_FFFF_FFFF_FFFF


@dataclass(frozen=True)
class UserSpec:
    name: str
    password: str
    address: int
    authorized: bool = True


@dataclass(frozen=True)
class RealmSpec:
    name: str
    users: tuple[UserSpec, ...] = ()
    services: tuple[str, ...] = ()
    trusts: tuple[str, ...] = ()


@dataclass(frozen=True)
class TopologyParams:
    n_nodes: int = 20
    area: float = 100.0
    range: float = 35.0
    reading_packet_size: int = 32
    query_packet_size: int = 16


@dataclass(frozen=True)
class RunParams:
    max_ticks: int = 5000
    user_counts: tuple[int, ...] = (0, 1, 2, 4, 8, 16)
    energies: tuple[int, ...] = (250_000, 500_000, 1_000_000)


DEFAULT_REALMS = (
    RealmSpec("WSN",
              users=(UserSpec("alice", "alice-wsn-secret", 1),
                     UserSpec("bob", "bob-wsn-secret", 2),
                     UserSpec("mallory", "mallory-guess", 66, authorized=False)),
              services=("bs1", "bs2"),
              trusts=("FIELD",)),
    RealmSpec("FIELD",
              users=(UserSpec("carol", "carol-field-secret", 10),),
              services=("bs3",),
              trusts=("WSN",)),
)


@dataclass(frozen=True)
class Scenario:
    seed: int = 0
    realms: tuple[RealmSpec, ...] = DEFAULT_REALMS
    topology: TopologyParams = field(default_factory=TopologyParams)
    energy: EnergyParams = field(default_factory=EnergyParams)
    kdc: KdcConfig = field(default_factory=KdcConfig)
    run: RunParams = field(default_factory=RunParams)

    def realm(self, name: str) -> RealmSpec:
        for r in self.realms:
            if r.name == name:
                return r
        raise KeyError(name)

    def with_energy(self, **changes: int) -> Scenario:
        return replace(self, energy=replace(self.energy, **changes))


# -- validation ---------------------------------------------------------------------

def validate(s: Scenario) -> Scenario:
    if not 0 <= s.seed <= U64_MAX:
        raise ValidationError("seed must fit in an unsigned 64-bit integer")
    if s.topology.n_nodes < 0 or s.topology.area <= 0 or s.topology.range < 0:
        raise ValidationError("topology needs n_nodes >= 0, area > 0, range >= 0")
    if s.topology.reading_packet_size < 0 or s.topology.query_packet_size < 0:
        raise ValidationError("packet sizes must be non-negative")
    if s.run.max_ticks <= 0:
        raise ValidationError("run.max_ticks must be positive")
    if any(u < 0 for u in s.run.user_counts) or any(e < 0 for e in s.run.energies):
        raise ValidationError("run.user_counts and run.energies must be non-negative")
    if list(s.run.energies) != sorted(s.run.energies):
        raise ValidationError("run.energies must be sorted")
    names = [r.name for r in s.realms]
    if len(set(names)) != len(names):
        raise ValidationError("duplicate realm name")
    for r in s.realms:
        for n in [r.name, *r.services, *(u.name for u in r.users)]:
            if not _NAME.match(n) or n == TGS_NAME:
                raise ValidationError(f"invalid name {n!r} in realm {r.name}")
        principals = list(r.services) + [u.name for u in r.users]
        if len(set(principals)) != len(principals):
            raise ValidationError(f"duplicate principal in realm {r.name}")
        addrs = [u.address for u in r.users]
        if len(set(addrs)) != len(addrs):
            raise ValidationError(f"duplicate address in realm {r.name}")
        for u in r.users:
            if not 0 <= u.address <= 0xFFFF_FFFF:
                raise ValidationError(f"address of {u.name} out of u32 range")
            if not u.password or u.password != u.password.strip() or "\n" in u.password:
                raise ValidationError(f"password of {u.name} must be non-empty, no edge spaces")
        for t in r.trusts:
            if t == r.name or t not in names:
                raise ValidationError(f"realm {r.name} trusts undefined realm {t!r}")
    return s


# -- parsing ----------------------------------------------------------------------------

def _int(v: str) -> int:
    return int(v.replace("_", ""))


def _bool(v: str) -> bool:
    low = v.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _list(v: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in v.split(",") if p.strip())


def _int_list(v: str) -> tuple[int, ...]:
    return tuple(_int(p) for p in _list(v))


_SECTIONS = {
    "topology": (TopologyParams, {"n_nodes": _int, "area": float, "range": float,
                                  "reading_packet_size": _int, "query_packet_size": _int}),
    "energy": (EnergyParams, {"initial_energy": _int, "cost_fixed_tx": _int,
                              "cost_per_byte": _int, "verify_cost": _int}),
    "kdc": (KdcConfig, {"tgt_lifetime": _int, "service_ticket_lifetime": _int,
                        "max_clock_skew": _int}),
    "run": (RunParams, {"max_ticks": _int, "user_counts": _int_list, "energies": _int_list}),
}

_USER_FIELDS = {"password": str, "address": _int, "authorized": _bool}


def parse_scenario_text(text: str) -> Scenario:
    seed = 0
    sections: dict[str, dict] = {k: {} for k in _SECTIONS}
    realms: dict[str, dict] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(lineno, f"expected 'key = value', got {raw!r}")
        key, value = key.strip(), value.strip()
        parts = key.split(".")
        try:
            if key == "scenario.seed":
                seed = _int(value)
            elif parts[0] in _SECTIONS and len(parts) == 2:
                converters = _SECTIONS[parts[0]][1]
                if parts[1] not in converters:
                    raise ParseError(lineno, f"unknown key {key!r}")
                sections[parts[0]][parts[1]] = converters[parts[1]](value)
            elif parts[0] == "realm" and len(parts) == 3 and parts[2] in ("services", "trusts"):
                realms.setdefault(parts[1], {"users": {}})[parts[2]] = _list(value)
            elif parts[0] == "realm" and len(parts) == 5 and parts[2] == "user":
                if parts[4] not in _USER_FIELDS:
                    raise ParseError(lineno, f"unknown key {key!r}")
                users = realms.setdefault(parts[1], {"users": {}})["users"]
                users.setdefault(parts[3], {})[parts[4]] = _USER_FIELDS[parts[4]](value)
            else:
                raise ParseError(lineno, f"unknown key {key!r}")
        except ValueError as exc:
            raise ParseError(lineno, f"bad value for {key!r}: {exc}") from None

    built: dict[str, object] = {}
    for name, (cls, _) in _SECTIONS.items():
        try:
            built[name] = cls(**sections[name])
        except InvalidInput as exc:
            raise ValidationError(str(exc)) from None
    if realms:
        realm_specs = []
        for rname, r in realms.items():
            users = []
            for i, (uname, u) in enumerate(r["users"].items(), 1):
                users.append(UserSpec(uname, u.get("password", f"{uname}-password"),
                                      u.get("address", i), u.get("authorized", True)))
            realm_specs.append(RealmSpec(rname, tuple(users), r.get("services", ()),
                                         r.get("trusts", ())))
        built["realms"] = tuple(realm_specs)
    return validate(Scenario(seed=seed, **built))


def parse_scenario(path: str | Path) -> Scenario:
    return parse_scenario_text(Path(path).read_text(encoding="utf-8"))


def render_scenario(s: Scenario) -> str:
    """Canonical text form; ``parse_scenario_text(render_scenario(s)) == s``."""
    out = [f"scenario.seed = {s.seed}"]
    for name in _SECTIONS:
        obj = getattr(s, name)
        for f in fields(obj):
            v = getattr(obj, f.name)
            if isinstance(v, tuple):
                v = ", ".join(str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            out.append(f"{name}.{f.name} = {v}")
    for r in s.realms:
        out.append(f"realm.{r.name}.services = {', '.join(r.services)}")
        out.append(f"realm.{r.name}.trusts = {', '.join(r.trusts)}")
        for u in r.users:
            prefix = f"realm.{r.name}.user.{u.name}"
            out.append(f"{prefix}.password = {u.password}")
            out.append(f"{prefix}.address = {u.address}")
            out.append(f"{prefix}.authorized = {'true' if u.authorized else 'false'}")
    return "\n".join(out) + "\n"
