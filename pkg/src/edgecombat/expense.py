"""Attacker expense accounting and alliance amplification.

Money is handled as Decimal so quoted dollar amounts reproduce to the
cent. The per-active-bot expense scales rental linearly with how many times
a mitigated bot must be re-rented within one lease (lease / MRT). The
amplification factor is the joint alliance defense power for a vulnerability
divided by one defender's own units for it, and equals the factor by which
the attacker's required bots and expense grow.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal

Money = Decimal

_MASK64 = (1 << 64) - 1


def as_money(value) -> Money:
    """Coerce to Decimal via str() so float literals keep their written value."""
    if isinstance(value, Decimal):
        return value
    return Decimal(str(value))


class SplitMix64:
    """Seedable 64-bit generator (SplitMix64) for reproducible random matrices.

    The algorithm is fixed and published, so identical seeds give identical
    tables across implementations and platforms.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4B05B5) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float, high: float) -> float:
        # 53-bit mantissa draw in [0, 1)
        u = (self.next_u64() >> 11) * 2.0**-53
        return low + u * (high - low)


@dataclass(frozen=True)
class BotnetPricing:
    """Botnet market terms: one-off setup per bot plus rental per lease."""

    setup_per_bot: Money
    rental_per_bot_per_lease: Money
    lease_duration: Decimal  # hours
    min_bots: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "setup_per_bot", as_money(self.setup_per_bot))
        object.__setattr__(
            self, "rental_per_bot_per_lease", as_money(self.rental_per_bot_per_lease)
        )
        object.__setattr__(self, "lease_duration", as_money(self.lease_duration))
        if self.setup_per_bot < 0 or self.rental_per_bot_per_lease < 0:
            raise ValueError("monetary fields must be nonnegative")
        if self.lease_duration <= 0:
            raise ValueError("lease_duration must be positive")
        if self.min_bots < 1:
            raise ValueError("min_bots must be at least 1")


@dataclass(frozen=True)
class MitigationProfile:
    """Mitigation response time (same unit as the lease duration)."""

    mrt: Decimal

    def __post_init__(self) -> None:
        object.__setattr__(self, "mrt", as_money(self.mrt))
        if self.mrt <= 0:
            raise ValueError("mrt must be positive")


@dataclass(frozen=True)
class DefenseMatrix:
    """d[i][j]: defense units of defender i guarding vulnerability j."""

    d: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not self.d or not self.d[0]:
            raise ValueError("matrix must be non-empty")
        width = len(self.d[0])
        for row in self.d:
            if len(row) != width:
                raise ValueError("ragged matrix")
            for v in row:
                if not v > 0:
                    raise ValueError("all defense units must be strictly positive")

    @property
    def m(self) -> int:
        return len(self.d)

    @property
    def n(self) -> int:
        return len(self.d[0])


@dataclass(frozen=True)
class CapabilityVector:
    """Binary helper flags, one per defender (1 = can assist the victim)."""

    c: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(v not in (0, 1) for v in self.c):
            raise ValueError("capability entries must be 0 or 1")


@dataclass
class ExpenseReport:
    """Amplification table plus the headline individual-vs-joint comparison.

    The summary row reports the cell with the largest amplification; by
    construction joint_expense == lambda * individual_expense for that cell.
    """

    lambdas: list[list[float]]
    pabe: Money
    individual_expense: Money
    joint_expense: Money
    max_lambda: float = field(init=False)
    max_cell: tuple[int, int] = field(init=False)

    def __post_init__(self) -> None:
        best = (0, 0)
        for i, row in enumerate(self.lambdas):
            for j, v in enumerate(row):
                if v > self.lambdas[best[0]][best[1]]:
                    best = (i, j)
        self.max_cell = best
        self.max_lambda = self.lambdas[best[0]][best[1]]

    def to_csv(self, header_comment: str | None = None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write(f"# {header_comment}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["defender", "vulnerability", "lambda"])
        for i, row in enumerate(self.lambdas):
            for j, v in enumerate(row):
                writer.writerow([i + 1, j + 1, repr(v)])
        writer.writerow([])
        writer.writerow(["summary", "", ""])
        writer.writerow(["pabe", str(self.pabe), ""])
        writer.writerow(["individual_expense", str(self.individual_expense), ""])
        writer.writerow(["joint_expense", str(self.joint_expense), ""])
        return buf.getvalue()


def per_active_bot_expense(
    pricing: BotnetPricing, mitigation: MitigationProfile
) -> Money:
    """Cost to keep one bot active for a lease, given the defenders' MRT.

    A bot neutralized after MRT must be re-rented, so rental scales by
    lease/MRT; mitigation slower than the lease leaves the base rental.
    """
    factor = pricing.lease_duration / mitigation.mrt
    if factor < 1:
        factor = Decimal(1)
    return pricing.rental_per_bot_per_lease * factor


def botnet_expense(
    n_bots: int, pricing: BotnetPricing, mitigation: MitigationProfile
) -> Money:
    """Total campaign-wave cost: per-bot setup plus per-active-bot rental."""
    if n_bots < pricing.min_bots:
        raise ValueError(
            f"market minimum is {pricing.min_bots} bots, requested {n_bots}"
        )
    n = Decimal(n_bots)
    return n * pricing.setup_per_bot + n * per_active_bot_expense(pricing, mitigation)


def joint_defense_power(d: DefenseMatrix, c: CapabilityVector, j: int) -> float:
    """Alliance defense power for vulnerability j: sum of capable defenders' units."""
    if len(c.c) != d.m:
        raise ValueError("capability vector length must match defender count")
    if not 0 <= j < d.n:
        raise IndexError(f"vulnerability index {j} out of range")
    return sum(c.c[i] * d.d[i][j] for i in range(d.m))


def amplification(d: DefenseMatrix, c: CapabilityVector, i: int, j: int) -> float:
    """How many times defender i's own units the alliance fields for j.

    Requires actual collaboration (more than one capable defender); with a
    single helper the ratio is not meaningful.
    """
    if not 0 <= i < d.m:
        raise IndexError(f"defender index {i} out of range")
    if sum(c.c) <= 1:
        raise ValueError("amplification requires more than one capable defender")
    return joint_defense_power(d, c, j) / d.d[i][j]


def profit_margin(reward: Money, expense: Money) -> float:
    """Reward over expense; the attacker quits once this drops below 1."""
    expense = as_money(expense)
    if expense <= 0:
        raise ValueError("expense must be strictly positive")
    return float(as_money(reward) / expense)


_DEFAULT_PRICING = BotnetPricing(
    setup_per_bot="0",
    rental_per_bot_per_lease="0.06",
    lease_duration="336",
    min_bots=1000,
)
_DEFAULT_MITIGATION = MitigationProfile(mrt="1")


def expense_table(
    m: int,
    n: int,
    value_low: float,
    value_high: float,
    seed: int,
    pricing: BotnetPricing = _DEFAULT_PRICING,
    mitigation: MitigationProfile = _DEFAULT_MITIGATION,
) -> ExpenseReport:
    """Random defense matrix, all defenders capable, amplification per cell.

    Entries are drawn uniformly from [value_low, value_high] with a SplitMix64
    stream, so a fixed seed reproduces the table bit for bit.
    """
    if m < 2:
        raise ValueError("need at least two defenders")
    if n < 1:
        raise ValueError("need at least one vulnerability")
    if not 0 < value_low < value_high:
        raise ValueError("bounds must satisfy 0 < low < high")
    rng = SplitMix64(seed)
    rows = tuple(
        tuple(rng.uniform(value_low, value_high) for _ in range(n)) for _ in range(m)
    )
    d = DefenseMatrix(rows)
    c = CapabilityVector((1,) * m)
    lambdas = [[amplification(d, c, i, j) for j in range(n)] for i in range(m)]
    pabe = per_active_bot_expense(pricing, mitigation)
    individual = botnet_expense(pricing.min_bots, pricing, mitigation)
    report = ExpenseReport(
        lambdas=lambdas,
        pabe=pabe,
        individual_expense=individual,
        joint_expense=individual,  # overwritten below with the headline cell
    )
    report.joint_expense = individual * as_money(report.max_lambda)
    return report
