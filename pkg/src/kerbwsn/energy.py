"""Base-station energy accounting in integer milliunits."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EnergyExhausted, InvalidInput


@dataclass(frozen=True)
class EnergyParams:
    initial_energy: int = 1_000_000
    cost_fixed_tx: int = 100
    cost_per_byte: int = 1
    verify_cost: int = 10

    def __post_init__(self) -> None:
        for name in ("initial_energy", "cost_fixed_tx", "cost_per_byte", "verify_cost"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise InvalidInput(f"{name} must be a non-negative integer, got {value!r}")

    def verification_is_cheap(self, min_response_bytes: int = 0) -> bool:
        """True when rejecting a request costs less than answering the smallest one."""
        return self.verify_cost < tx_cost(self, min_response_bytes)


def tx_cost(params: EnergyParams, packet_bytes: int) -> int:
    return params.cost_fixed_tx + params.cost_per_byte * packet_bytes


@dataclass
class EnergyState:
    """Remaining energy plus an audit log of every charge actually taken."""

    remaining: int
    initial: int = field(init=False)
    log: list[tuple[int, str, int]] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if self.remaining < 0:
            raise InvalidInput("energy cannot be negative")
        self.initial = self.remaining

    @property
    def depleted(self) -> bool:
        return self.remaining == 0

    def charge(self, amount: int, label: str, tick: int) -> None:
        """Take ``amount``; on shortfall drain to zero and raise EnergyExhausted."""
        if amount < 0:
            raise InvalidInput("charges are non-negative")
        if amount > self.remaining:
            taken = self.remaining
            self.remaining = 0
            self.log.append((tick, label, taken))
            raise EnergyExhausted(f"{label} needs {amount}, only {taken} left")
        self.remaining -= amount
        self.log.append((tick, label, amount))

    def audited_total(self) -> int:
        return sum(amount for _, _, amount in self.log)


@dataclass(frozen=True)
class EnergyTrace:
    """Remaining energy after each tick; ``series[0]`` is the initial energy.

    ``lifetime`` counts the ticks whose every charge was paid in full. Under
    a constant per-tick drain ``d`` that is ``initial // d``.
    """

    series: tuple[int, ...]
    lifetime: int
    served: int = 0
    rejected: int = 0
    initial: int = 0
    audited: int = 0  # sum of every logged charge; equals initial - final

    def rows(self) -> list[tuple[int, int]]:
        return list(enumerate(self.series))
