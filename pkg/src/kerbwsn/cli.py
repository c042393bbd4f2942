"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 scenario error, 3 an attack-report
expectation failed.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .errors import ScenarioError
from .experiments import (figure_csv, lifetime_vs_energy, run_lifetime_experiment,
                          target_service, traffic_vs_users)
from .messages import Principal, SensorQuery
from .network import Message
from .scenario import Scenario, parse_scenario
from .threats import ATTACKS, threat_world
from .world import build_world

EXIT_OK, EXIT_USAGE, EXIT_SCENARIO, EXIT_ASSERT = 0, 1, 2, 3
SCENARIO_DIR_ENV = "KERBWSN_SCENARIO_DIR"
START_TICK = 10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def resolve_scenario(path: Optional[str]) -> Scenario:
    if path is None:
        return Scenario()
    candidate = Path(path)
    if not candidate.exists() and os.environ.get(SCENARIO_DIR_ENV):
        candidate = Path(os.environ[SCENARIO_DIR_ENV]) / path
    if not candidate.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    return parse_scenario(candidate)


def _digest(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()[:12]


def _wire(m: Message) -> str:
    return f"{len(m.payload)} bytes, sha256 {_digest(m.payload)}"


def _first_authorized(scenario: Scenario, realm_index: int = 0) -> Principal:
    realm = scenario.realms[realm_index]
    for u in realm.users:
        if u.authorized:
            return Principal(u.name, realm.name)
    raise ScenarioError(f"realm {realm.name} has no authorized user")


def cmd_handshake(scenario: Scenario) -> str:
    world = build_world(scenario)
    user = _first_authorized(scenario)
    service = target_service(scenario)
    now = START_TICK
    session = world.login(user, now)
    session.obtain_service_ticket(service, now)
    response = session.access_base_station(service, SensorQuery(1), now)
    as_msg, tgs_msg, ap_msg = world.net.transcript[:3]
    tgt = session.tgt
    st = session.service_tickets[service]
    lines = [
        f"Kerberos exchange for {user} -> {service} at tick {now}",
        f"1. Client -> AS: request a ticket-granting ticket for {user} "
        f"(AsRequest, {_wire(as_msg)})",
        f"2. AS -> Client: reply sealed under the password-derived key of {user} "
        f"({len(as_msg.reply)} bytes); client derived the key from the password and "
        f"opened it; TGT valid ticks [{tgt.issued_at}, {tgt.issued_at + tgt.lifetime}]",
        f"3. Client -> TGS: user ID {user}, service ID {service}, TGT and authenticator "
        f"(TgsRequest, {_wire(tgs_msg)})",
        f"4. TGS verified the TGT (time limit not expired at tick {now}) and issued a "
        f"service ticket for {service} valid ticks [{st.issued_at}, "
        f"{st.issued_at + st.lifetime}] ({len(tgs_msg.reply)} bytes)",
        f"5. Client -> base station {service}: user ID {user}, service ticket and "
        f"authenticator (ApRequest, {_wire(ap_msg)}); base station verified the ticket "
        f"and returned {len(response.readings)} readings ({len(ap_msg.reply)} bytes)",
    ]
    return "\n".join(lines) + "\n"


def cmd_cross_realm(scenario: Scenario) -> str:
    home = next((r for r in scenario.realms if r.trusts), None)
    if home is None:
        raise ScenarioError("cross-realm needs a realm that trusts another realm")
    remote = next(r for r in scenario.realms if r.name == home.trusts[0])
    if not remote.services:
        raise ScenarioError(f"realm {remote.name} has no base station")
    user = _first_authorized(scenario, scenario.realms.index(home))
    service = Principal(remote.services[0], remote.name)
    world = build_world(scenario)
    now = START_TICK
    session = world.login(user, now)
    response = session.access_base_station(service, SensorQuery(1), now)
    as_msg, home_tgs, remote_tgs, ap_msg = world.net.transcript[:4]
    lines = [
        f"Cross-realm access for {user} -> {service} at tick {now}",
        f"1. Client -> AS {home.name}: AsRequest ({_wire(as_msg)}); TGT for "
        f"{Principal.tgs(home.name)} opened with the password-derived key",
        f"2. Client -> TGS {home.name}: TgsRequest for {service} ({_wire(home_tgs)}); "
        f"TGS {home.name} issued a cross-realm TGT for {Principal.tgs(remote.name)} "
        f"sealed under the {home.name}<->{remote.name} inter-realm key",
        f"3. Client -> TGS {remote.name}: TgsRequest with the cross-realm TGT "
        f"({_wire(remote_tgs)}); TGS {remote.name} opened it with the inter-realm key "
        f"and issued a service ticket for {service}",
        f"4. Client -> base station {service}: ApRequest ({_wire(ap_msg)}); "
        f"{len(response.readings)} readings returned",
        f"TGS exchanges: {home.name}={world.kdcs[home.name].tgs_count} "
        f"{remote.name}={world.kdcs[remote.name].tgs_count}",
    ]
    return "\n".join(lines) + "\n"


def cmd_attack_report(scenario: Optional[Scenario], seeds: int) -> tuple[str, bool]:
    rows = []
    ok = True
    for name, fn in ATTACKS.items():
        for auth in (True, False):
            served_count = 0
            kinds: set[str] = set()
            for seed in range(seeds):
                sc = None if scenario is None else replace(scenario, seed=seed)
                outcome = fn(threat_world(seed, auth, sc))
                served_count += outcome.served
                kinds.update(outcome.rejections())
            if auth and served_count:
                ok = False
            if not auth and name == "unauthenticated-access" and served_count != seeds:
                ok = False
            verdict = f"served {served_count}/{seeds}" if served_count else f"blocked {seeds}/{seeds}"
            rows.append((name, "on" if auth else "off", verdict, ",".join(sorted(kinds)) or "-"))
    widths = [max(len(r[i]) for r in rows + [("attack", "auth", "outcome", "rejections")])
              for i in range(4)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format("attack", "auth", "outcome", "rejections").rstrip()]
    lines += [fmt.format(*r).rstrip() for r in rows]
    lines.append("PASS: all attacks blocked with auth on" if ok else
                 "FAIL: an attack succeeded with auth on or the baseline was not reproduced")
    return "\n".join(lines) + "\n", ok


def cmd_run(scenario: Scenario, out_dir: Optional[Path]) -> str:
    no_auth = run_lifetime_experiment(scenario, auth_enabled=False)
    auth = run_lifetime_experiment(scenario, auth_enabled=True)
    lines = [f"scenario seed {scenario.seed}: "
             f"{sum(len(r.users) for r in scenario.realms)} users in "
             f"{len(scenario.realms)} realm(s), target {target_service(scenario)}",
             f"lifetime without authentication: {no_auth.lifetime} ticks "
             f"(served {no_auth.served}, rejected {no_auth.rejected})",
             f"lifetime with authentication:    {auth.lifetime} ticks "
             f"(served {auth.served}, rejected {auth.rejected})",
             "traffic vs users: " + ", ".join(
                 f"{u}:{b}" for u, b in traffic_vs_users(scenario, scenario.run.user_counts)),
             "lifetime vs energy: " + ", ".join(
                 f"{e}:{t}" for e, t in lifetime_vs_energy(scenario, scenario.run.energies))]
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for which in (10, 11, 12, 13):
            (out_dir / f"figure{which}.csv").write_text(figure_csv(scenario, which))
        lines.append(f"wrote figure10..13 CSV files to {out_dir}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kerbwsn",
                     description="Kerberos-style authentication for WSN base stations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("handshake", help="print the five-step ticket exchange")
    p.add_argument("--scenario")
    p = sub.add_parser("cross-realm", help="print a cross-realm access transcript")
    p.add_argument("--scenario")
    p = sub.add_parser("figure", help="write one figure's data as CSV")
    p.add_argument("--which", type=int, choices=(10, 11, 12, 13), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario")
    p = sub.add_parser("attack-report", help="run the threat harness")
    p.add_argument("--scenario")
    p.add_argument("--seeds", type=int, default=20)
    p = sub.add_parser("run", help="run every experiment on a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        if args.command == "handshake":
            sys.stdout.write(cmd_handshake(resolve_scenario(args.scenario)))
        elif args.command == "cross-realm":
            sys.stdout.write(cmd_cross_realm(resolve_scenario(args.scenario)))
        elif args.command == "figure":
            text = figure_csv(resolve_scenario(args.scenario), args.which)
            Path(args.out).write_text(text)
            sys.stdout.write(f"wrote figure {args.which} ({text.count(chr(10)) - 1} rows) "
                             f"to {args.out}\n")
        elif args.command == "attack-report":
            if args.seeds <= 0:
                parser.error("--seeds must be positive")
            scenario = resolve_scenario(args.scenario) if args.scenario else None
            report, ok = cmd_attack_report(scenario, args.seeds)
            sys.stdout.write(report)
            if not ok:
                return EXIT_ASSERT
        elif args.command == "run":
            out_dir = Path(args.out_dir) if args.out_dir else None
            sys.stdout.write(cmd_run(resolve_scenario(args.scenario), out_dir))
    except UsageError:
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"kerbwsn: scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    return EXIT_OK


run = main

if __name__ == "__main__":
    sys.exit(main())
