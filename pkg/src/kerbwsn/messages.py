"""Protocol records and their canonical byte encoding.

Every field is written in declaration order. Integers are fixed-width
big-endian (u32 = 4 bytes, u64/i64 = 8 bytes); text and byte strings carry
a 4-byte big-endian length prefix. Top-level records start with a one-byte
type tag. Nested records (Principal, SecretKey, SealedBlob, SensorQuery)
carry no tag.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Any, ClassVar

from .crypto import KEY_LEN, NONCE_LEN, TAG_LEN, SealedBlob, SecretKey
from .errors import InvalidInput, MalformedEncoding, WrongType

U32_MAX = 0xFFFF_FFFF
U64_MAX = 0xFFFF_FFFF_FFFF_FFFF

TAG_TICKET = 0x01
TAG_AUTHENTICATOR = 0x02
TAG_REPLY_PART = 0x03
TAG_AS_REQUEST = 0x10
TAG_AS_REPLY = 0x11
TAG_TGS_REQUEST = 0x12
TAG_TGS_REPLY = 0x13
TAG_AP_REQUEST = 0x14
TAG_RAW_QUERY = 0x15
TAG_SENSOR_RESPONSE = 0x16

TGS_NAME = "krbtgt"


class _Writer:
    def __init__(self) -> None:
        self.parts: list[bytes] = []

    def u8(self, v: int) -> None:
        self.parts.append(struct.pack(">B", v))

    def u32(self, v: int) -> None:
        self.parts.append(struct.pack(">I", v))

    def u64(self, v: int) -> None:
        self.parts.append(struct.pack(">Q", v))

    def i64(self, v: int) -> None:
        self.parts.append(struct.pack(">q", v))

    def raw(self, b: bytes) -> None:
        self.u32(len(b))
        self.parts.append(bytes(b))

    def text(self, s: str) -> None:
        self.raw(s.encode("utf-8"))

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = bytes(data)
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedEncoding("truncated input")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return self._take(1)[0]

    def u32(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack(">Q", self._take(8))[0]

    def i64(self) -> int:
        return struct.unpack(">q", self._take(8))[0]

    def raw(self) -> bytes:
        return self._take(self.u32())

    def text(self) -> str:
        try:
            return self.raw().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedEncoding("invalid utf-8") from exc

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise MalformedEncoding(f"{len(self.data) - self.pos} trailing bytes")


def _check_u32(v: int, what: str) -> None:
    if not 0 <= v <= U32_MAX:
        raise InvalidInput(f"{what} out of u32 range: {v}")


def _check_u64(v: int, what: str) -> None:
    if not 0 <= v <= U64_MAX:
        raise InvalidInput(f"{what} out of u64 range: {v}")


# -- nested records -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Principal:
    name: str
    realm: str

    def __post_init__(self) -> None:
        for part in (self.name, self.realm):
            if not part or "/" in part:
                raise InvalidInput(f"bad principal component {part!r}")

    @classmethod
    def tgs(cls, realm: str) -> Principal:
        return cls(TGS_NAME, realm)

    @property
    def is_tgs(self) -> bool:
        return self.name == TGS_NAME

    def __str__(self) -> str:
        return f"{self.name}@{self.realm}"

    def _write(self, w: _Writer) -> None:
        w.text(self.name)
        w.text(self.realm)

    @classmethod
    def _read(cls, r: _Reader) -> Principal:
        return cls(r.text(), r.text())


@dataclass(frozen=True)
class SensorQuery:
    query_id: int
    kind: str = "readings"

    def __post_init__(self) -> None:
        _check_u32(self.query_id, "query_id")

    def _write(self, w: _Writer) -> None:
        w.u32(self.query_id)
        w.text(self.kind)

    @classmethod
    def _read(cls, r: _Reader) -> SensorQuery:
        return cls(r.u32(), r.text())


def _write_key(w: _Writer, key: SecretKey) -> None:
    w.u32(key.key_id)
    w.raw(key.bytes)


def _read_key(r: _Reader) -> SecretKey:
    key_id = r.u32()
    key_bytes = r.raw()
    if len(key_bytes) != KEY_LEN:
        raise MalformedEncoding("bad key length")
    return SecretKey(key_id, key_bytes)


def _write_blob(w: _Writer, blob: SealedBlob) -> None:
    w.u32(blob.key_id)
    w.raw(blob.nonce)
    w.raw(blob.ciphertext)
    w.raw(blob.tag)


def _read_blob(r: _Reader) -> SealedBlob:
    key_id = r.u32()
    nonce, ciphertext, tag = r.raw(), r.raw(), r.raw()
    if len(nonce) != NONCE_LEN or len(tag) != TAG_LEN:
        raise MalformedEncoding("bad nonce or tag length")
    return SealedBlob(key_id, nonce, ciphertext, tag)


# -- tagged records ---------------------------------------------------------------

class _Record:
    TAG: ClassVar[int]

    def _write(self, w: _Writer) -> None:
        raise NotImplementedError

    @classmethod
    def _read(cls, r: _Reader) -> Any:
        raise NotImplementedError


@dataclass(frozen=True)
class Ticket(_Record):
    TAG: ClassVar[int] = TAG_TICKET

    client: Principal
    client_addr: int
    service: Principal
    session_key: SecretKey
    issued_at: int
    lifetime: int

    def __post_init__(self) -> None:
        _check_u32(self.client_addr, "client_addr")
        _check_u64(self.issued_at, "issued_at")
        _check_u64(self.lifetime, "lifetime")
        if self.lifetime == 0:
            raise InvalidInput("ticket lifetime must be positive")

    @property
    def expires_at(self) -> int:
        return self.issued_at + self.lifetime

    def valid_at(self, now: int) -> bool:
        # inclusive at both ends
        return self.issued_at <= now <= self.expires_at

    def _write(self, w: _Writer) -> None:
        self.client._write(w)
        w.u32(self.client_addr)
        self.service._write(w)
        _write_key(w, self.session_key)
        w.u64(self.issued_at)
        w.u64(self.lifetime)

    @classmethod
    def _read(cls, r: _Reader) -> Ticket:
        return cls(Principal._read(r), r.u32(), Principal._read(r), _read_key(r),
                   r.u64(), r.u64())


@dataclass(frozen=True)
class Authenticator(_Record):
    TAG: ClassVar[int] = TAG_AUTHENTICATOR

    client: Principal
    client_addr: int
    timestamp: int

    def __post_init__(self) -> None:
        _check_u32(self.client_addr, "client_addr")
        _check_u64(self.timestamp, "timestamp")

    def _write(self, w: _Writer) -> None:
        self.client._write(w)
        w.u32(self.client_addr)
        w.u64(self.timestamp)

    @classmethod
    def _read(cls, r: _Reader) -> Authenticator:
        return cls(Principal._read(r), r.u32(), r.u64())


@dataclass(frozen=True)
class ReplyPart(_Record):
    """Sealed body of an AS or TGS reply: what the client caches."""

    TAG: ClassVar[int] = TAG_REPLY_PART

    session_key: SecretKey
    ticket: SealedBlob
    service: Principal
    issued_at: int
    lifetime: int

    def __post_init__(self) -> None:
        _check_u64(self.issued_at, "issued_at")
        _check_u64(self.lifetime, "lifetime")

    def _write(self, w: _Writer) -> None:
        _write_key(w, self.session_key)
        _write_blob(w, self.ticket)
        self.service._write(w)
        w.u64(self.issued_at)
        w.u64(self.lifetime)

    @classmethod
    def _read(cls, r: _Reader) -> ReplyPart:
        return cls(_read_key(r), _read_blob(r), Principal._read(r), r.u64(), r.u64())


@dataclass(frozen=True)
class AsRequest(_Record):
    TAG: ClassVar[int] = TAG_AS_REQUEST

    user: Principal
    tgs: Principal
    requested_at: int

    def __post_init__(self) -> None:
        _check_u64(self.requested_at, "requested_at")

    def _write(self, w: _Writer) -> None:
        self.user._write(w)
        self.tgs._write(w)
        w.u64(self.requested_at)

    @classmethod
    def _read(cls, r: _Reader) -> AsRequest:
        return cls(Principal._read(r), Principal._read(r), r.u64())


@dataclass(frozen=True)
class AsReply(_Record):
    TAG: ClassVar[int] = TAG_AS_REPLY

    sealed_for_client: SealedBlob

    def _write(self, w: _Writer) -> None:
        _write_blob(w, self.sealed_for_client)

    @classmethod
    def _read(cls, r: _Reader) -> AsReply:
        return cls(_read_blob(r))


@dataclass(frozen=True)
class TgsRequest(_Record):
    TAG: ClassVar[int] = TAG_TGS_REQUEST

    user: Principal
    service: Principal
    tgt: SealedBlob
    authenticator: SealedBlob

    def _write(self, w: _Writer) -> None:
        self.user._write(w)
        self.service._write(w)
        _write_blob(w, self.tgt)
        _write_blob(w, self.authenticator)

    @classmethod
    def _read(cls, r: _Reader) -> TgsRequest:
        return cls(Principal._read(r), Principal._read(r), _read_blob(r), _read_blob(r))


@dataclass(frozen=True)
class TgsReply(_Record):
    TAG: ClassVar[int] = TAG_TGS_REPLY

    sealed_for_client: SealedBlob

    def _write(self, w: _Writer) -> None:
        _write_blob(w, self.sealed_for_client)

    @classmethod
    def _read(cls, r: _Reader) -> TgsReply:
        return cls(_read_blob(r))


@dataclass(frozen=True)
class ApRequest(_Record):
    TAG: ClassVar[int] = TAG_AP_REQUEST

    user: Principal
    service_ticket: SealedBlob
    authenticator: SealedBlob
    query: SensorQuery

    def _write(self, w: _Writer) -> None:
        self.user._write(w)
        _write_blob(w, self.service_ticket)
        _write_blob(w, self.authenticator)
        self.query._write(w)

    @classmethod
    def _read(cls, r: _Reader) -> ApRequest:
        return cls(Principal._read(r), _read_blob(r), _read_blob(r), SensorQuery._read(r))


@dataclass(frozen=True)
class RawQuery(_Record):
    """Unauthenticated query; only a base station with auth disabled serves it."""

    TAG: ClassVar[int] = TAG_RAW_QUERY

    user: Principal
    query: SensorQuery

    def _write(self, w: _Writer) -> None:
        self.user._write(w)
        self.query._write(w)

    @classmethod
    def _read(cls, r: _Reader) -> RawQuery:
        return cls(Principal._read(r), SensorQuery._read(r))


@dataclass(frozen=True)
class SensorResponse(_Record):
    TAG: ClassVar[int] = TAG_SENSOR_RESPONSE

    query_id: int
    readings: tuple[tuple[int, int], ...]  # (node_id, reading)

    def __post_init__(self) -> None:
        _check_u32(self.query_id, "query_id")

    def _write(self, w: _Writer) -> None:
        w.u32(self.query_id)
        w.u32(len(self.readings))
        for node_id, value in self.readings:
            w.u32(node_id)
            w.i64(value)

    @classmethod
    def _read(cls, r: _Reader) -> SensorResponse:
        query_id = r.u32()
        count = r.u32()
        if count * 12 > len(r.data) - r.pos:
            raise MalformedEncoding("reading count exceeds payload")
        return cls(query_id, tuple((r.u32(), r.i64()) for _ in range(count)))


RECORDS: dict[int, type[_Record]] = {
    cls.TAG: cls for cls in (Ticket, Authenticator, ReplyPart, AsRequest, AsReply,
                             TgsRequest, TgsReply, ApRequest, RawQuery, SensorResponse)
}


def encode(value: Any) -> bytes:
    """Canonical bytes for ``value``; tagged records get their type byte first."""
    w = _Writer()
    if isinstance(value, _Record):
        w.u8(value.TAG)
        value._write(w)
    elif isinstance(value, (Principal, SensorQuery)):
        value._write(w)
    elif isinstance(value, SecretKey):
        _write_key(w, value)
    elif isinstance(value, SealedBlob):
        _write_blob(w, value)
    else:
        raise TypeError(f"cannot encode {type(value).__name__}")
    return w.getvalue()


def peek_tag(data: bytes) -> int:
    if not data:
        raise MalformedEncoding("empty input")
    return data[0]


def decode(data: bytes, expected_tag: int) -> Any:
    r = _Reader(data)
    tag = r.u8() if data else None
    if tag is None:
        raise MalformedEncoding("empty input")
    if tag != expected_tag:
        raise WrongType(f"expected tag 0x{expected_tag:02x}, got 0x{tag:02x}")
    cls = RECORDS.get(tag)
    if cls is None:
        raise WrongType(f"unknown tag 0x{tag:02x}")
    try:
        value = cls._read(r)
    except InvalidInput as exc:
        raise MalformedEncoding(str(exc)) from exc
    r.finish()
    return value


def decode_blob(data: bytes) -> SealedBlob:
    r = _Reader(data)
    try:
        blob = _read_blob(r)
    except InvalidInput as exc:
        raise MalformedEncoding(str(exc)) from exc
    r.finish()
    return blob
