import pytest

from kerbwsn.client import ClientSession
from kerbwsn.crypto import derive_key
from kerbwsn.errors import (AccessDenied, ExpiredTgt, NoTgt, StaleAuthenticator,
                            UnknownPrincipal, WrongPassword)
from kerbwsn.messages import TAG_AP_REQUEST, Principal, SensorQuery
from kerbwsn.network import bs_endpoint, kdc_endpoint
from kerbwsn.scenario import RealmSpec, Scenario, UserSpec
from kerbwsn.world import build_world

ALICE = Principal("alice", "WSN")
BS1 = Principal("bs1", "WSN")
BS2 = Principal("bs2", "WSN")
REMOTE = Principal("bs3", "FIELD")


def test_login_correct_password(world):
    s = world.login(ALICE, 5)
    assert s.tgt.valid_at(5) and s.as_exchanges == 1


def test_login_wrong_password_fails_at_decryption(world):
    with pytest.raises(WrongPassword):
        world.login(ALICE, 5, password="nope")
    # the AS itself accepted the request: failure happened client-side
    assert world.net.transcript[-1].error is None
    assert world.kdcs["WSN"].tgs_count == 0


def test_login_unknown_user(world):
    with pytest.raises(UnknownPrincipal):
        world.login(Principal("mallory", "WSN"), 5)


def test_logins_are_deterministic(scenario):
    blobs = [build_world(scenario).login(ALICE, 3).tgt.ticket for _ in range(2)]
    assert blobs[0] == blobs[1]


def test_cached_service_ticket_reused(world):
    s = world.login(ALICE, 0)
    first = s.obtain_service_ticket(BS1, 0)
    before = world.kdcs["WSN"].tgs_count
    assert s.obtain_service_ticket(BS1, 50) is first
    assert world.kdcs["WSN"].tgs_count == before


def test_expired_service_ticket_refetched(world):
    s = world.login(ALICE, 0)
    first = s.obtain_service_ticket(BS1, 0)
    assert s.obtain_service_ticket(BS1, 100) is first
    second = s.obtain_service_ticket(BS1, 101)
    assert second is not first and second.issued_at == 101
    assert world.kdcs["WSN"].tgs_count == 2


def test_remote_service_takes_two_tgs_exchanges(world):
    s = world.login(ALICE, 0)
    s.obtain_service_ticket(REMOTE, 0)
    assert [m.dst for m in world.net.transcript[1:]] == [kdc_endpoint("WSN"), kdc_endpoint("FIELD")]
    assert world.kdcs["WSN"].tgs_count == 1 and world.kdcs["FIELD"].tgs_count == 1
    assert s.tgs_exchanges == 2


def test_access_base_station(world):
    s = world.login(ALICE, 0)
    resp = s.access_base_station(BS1, SensorQuery(3), 0)
    assert resp.query_id == 3 and len(resp.readings) > 0
    remote = s.access_base_station(REMOTE, SensorQuery(4), 1)
    assert len(remote.readings) > 0


def test_replayed_ap_request_denied(world):
    s = world.login(ALICE, 0)
    s.access_base_station(BS1, SensorQuery(3), 0)
    captured = world.net.captured(dst=bs_endpoint(BS1), tag=TAG_AP_REQUEST)[-1]
    with pytest.raises(AccessDenied) as err:
        world.net.send(captured.src_addr, captured.dst, captured.payload, 0)
    assert err.value.reason == "ReplayDetected"


def test_access_after_ticket_expiry_refetches(world):
    s = world.login(ALICE, 0)
    s.access_base_station(BS1, SensorQuery(1), 0)
    resp = s.access_base_station(BS1, SensorQuery(2), 150)
    assert resp.query_id == 2
    assert s.as_exchanges == 1 and s.tgs_exchanges == 2


def test_reuse_one_as_one_tgs(world):
    s = world.login(ALICE, 0)
    for t in range(60):
        s.access_base_station(BS1, SensorQuery(t), t)
    assert world.kdcs["WSN"].as_count == 1
    assert world.kdcs["WSN"].tgs_count == 1


def test_secrets_never_on_the_wire(world, scenario):
    s = world.login(ALICE, 0)
    s.access_base_station(BS1, SensorQuery(1), 0)
    s.access_base_station(REMOTE, SensorQuery(2), 1)
    password = scenario.realm("WSN").users[0].password.encode()
    key = derive_key(password.decode(), "alice", "WSN").bytes
    for m in world.net.transcript:
        for blob in (m.payload, m.reply or b""):
            assert password not in blob
            assert key not in blob


def test_no_tgt_and_expired_tgt(world):
    bare = ClientSession(ALICE, 1, derive_key("x", "alice", "WSN"), world.net, None)
    with pytest.raises(NoTgt):
        bare.obtain_service_ticket(BS1, 0)
    s = world.login(ALICE, 0)
    with pytest.raises(ExpiredTgt):
        s.obtain_service_ticket(BS1, 481)


def test_skewed_client_clock_is_stale(world):
    s = world.login(ALICE, 0)
    s.clock_offset = 6
    with pytest.raises(StaleAuthenticator):
        s.obtain_service_ticket(BS1, 1)


def test_same_service_name_in_two_realms_does_not_collide():
    realms = (RealmSpec("A", (UserSpec("u", "pw-a", 1),), ("bs",), ("B",)),
              RealmSpec("B", (), ("bs",), ("A",)))
    world = build_world(Scenario(seed=1, realms=realms))
    s = world.login(Principal("u", "A"), 0)
    local = s.obtain_service_ticket(Principal("bs", "A"), 0)
    remote = s.obtain_service_ticket(Principal("bs", "B"), 0)
    assert local is not remote
    assert set(s.service_tickets) == {Principal("bs", "A"), Principal("bs", "B"),
                                      Principal.tgs("B")}
