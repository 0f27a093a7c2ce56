"""Recursive-incentive payouts along referral chains.

All money is integer minor units (cents); decay factors are exact
fractions, so ledgers never accumulate float error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Optional, Union

from .graph import STAFF_ROOT_ID, ReferralGraph


class PayoutError(Exception):
    pass


class StaffWinnerError(PayoutError):
    pass


class UnknownWinnerError(PayoutError):
    pass


Money = int  # minor units


def to_cents(amount: Union[int, float, str, Decimal]) -> Money:
    """Parse a major-unit amount ("1000", 1000, 2.5) into cents, half-up."""
    try:
        d = Decimal(str(amount))
    except InvalidOperation as exc:
        raise PayoutError(f"bad money amount {amount!r}") from exc
    cents = (d * 100).quantize(Decimal("1"), rounding="ROUND_HALF_UP")
    return int(cents)


def format_cents(cents: Money) -> str:
    sign = "-" if cents < 0 else ""
    cents = abs(cents)
    return f"{sign}{cents // 100}.{cents % 100:02d}"


@dataclass(frozen=True)
class PayoutSchedule:
    """Winner award plus a geometric series down the referral chain.

    chain_base is the reward one degree from the winner; each further
    degree multiplies by decay. Amounts rounding below min_unit are
    dropped, which makes the series finite.
    """

    winner_award: Money = 1_000_000  # $10,000 grand prize
    chain_base: Money = 100_000  # $1,000 at distance 1
    decay: Fraction = Fraction(1, 2)
    min_unit: Money = 1
    max_depth: Optional[int] = None
    currency: str = "USD"

    def __post_init__(self):
        if self.winner_award < 0 or self.chain_base < 0:
            raise PayoutError("awards must be nonnegative")
        if not (0 < self.decay < 1):
            raise PayoutError("decay must be strictly between 0 and 1")
        if self.min_unit <= 0:
            raise PayoutError("min_unit must be positive")

    @classmethod
    def from_major_units(
        cls,
        winner_award="10000",
        chain_base="1000",
        decay="0.5",
        min_unit="0.01",
        max_depth: Optional[int] = None,
        currency: str = "USD",
    ) -> "PayoutSchedule":
        # Fraction(str(x)) keeps decimal inputs exact (0.1 -> 1/10).
        return cls(
            winner_award=to_cents(winner_award),
            chain_base=to_cents(chain_base),
            decay=Fraction(str(decay)),
            min_unit=to_cents(min_unit),
            max_depth=max_depth,
            currency=currency,
        )


def _round_half_up(value: Fraction, unit: int) -> int:
    """Round to the nearest multiple of unit, halves away from zero."""
    units = value / unit
    whole = (units.numerator * 2 + units.denominator) // (units.denominator * 2)
    return whole * unit


def chain_reward(d: int, schedule: PayoutSchedule) -> Money:
    """Reward at chain distance d >= 1; zero once rounded below min_unit."""
    if d < 1:
        raise PayoutError(f"chain distance must be >= 1, got {d}")
    if schedule.max_depth is not None and d > schedule.max_depth:
        return 0
    amount = _round_half_up(Fraction(schedule.chain_base) * schedule.decay ** (d - 1),
                            schedule.min_unit)
    return amount if amount >= schedule.min_unit else 0


@dataclass
class PayoutLedger:
    entries: dict[str, Money] = field(default_factory=dict)
    currency: str = "USD"

    @property
    def total(self) -> Money:
        return sum(self.entries.values())

    def credit(self, participant: str, amount: Money) -> None:
        if amount <= 0:
            return
        self.entries[participant] = self.entries.get(participant, 0) + amount


def compute_payouts(
    winners: Iterable[str], graph: ReferralGraph, schedule: PayoutSchedule
) -> PayoutLedger:
    """Winner award plus chain rewards for every non-staff ancestor.

    Staff ancestors occupy their chain position but receive nothing; a
    participant on several winner chains is credited the sum.
    """
    ledger = PayoutLedger(currency=schedule.currency)
    for winner in winners:
        p = graph.participants.get(winner)
        if p is None:
            raise UnknownWinnerError(f"unknown winner {winner!r}")
        if p.is_staff or winner == STAFF_ROOT_ID:
            raise StaffWinnerError(f"staff participant {winner!r} cannot win")
        ledger.credit(winner, schedule.winner_award)
        for d, ancestor in enumerate(graph.chain_of(winner), start=1):
            amount = chain_reward(d, schedule)
            if amount == 0:
                break  # geometric series stays below min_unit from here on
            anc = graph.participants.get(ancestor)
            if anc is not None and (anc.is_staff or ancestor == STAFF_ROOT_ID):
                continue
            ledger.credit(ancestor, amount)
    return ledger


def ledger_bound_check(
    ledger: PayoutLedger, winners: Iterable[str], schedule: PayoutSchedule
) -> bool:
    """Total must stay within |winners| * (award + chain_base / (1 - decay))."""
    n = len(set(winners))
    bound = n * (Fraction(schedule.winner_award) + Fraction(schedule.chain_base) / (1 - schedule.decay))
    return Fraction(ledger.total) <= bound


def ledger_to_csv(ledger: PayoutLedger) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["participant_id", "amount_minor_units", "currency"])
    for pid in sorted(ledger.entries, key=lambda k: (-ledger.entries[k], k)):
        writer.writerow([pid, ledger.entries[pid], ledger.currency])
    return buf.getvalue()


def ledger_to_dict(ledger: PayoutLedger) -> dict:
    return {
        "currency": ledger.currency,
        "total_minor_units": ledger.total,
        "total": format_cents(ledger.total),
        "entries": [
            {
                "participant_id": pid,
                "amount_minor_units": ledger.entries[pid],
                "amount": format_cents(ledger.entries[pid]),
            }
            for pid in sorted(ledger.entries, key=lambda k: (-ledger.entries[k], k))
        ],
    }
