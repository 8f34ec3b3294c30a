from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from txnet.config import AMOUNT_SCALE

MAX_STORED_WARNINGS = 100

Leg = Tuple[str, int]


def to_units(amount: Union[int, float, str, Decimal]) -> int:
    """Convert a currency amount (e.g. BTC) into integer smallest units."""
    if isinstance(amount, bool):
        raise ValueError("amount must be numeric")
    try:
        value = Decimal(str(amount))
    except InvalidOperation:
        raise ValueError(f"amount is not a number: {amount!r}")
    if not value.is_finite():
        raise ValueError("amount must be finite")
    if value < 0:
        raise ValueError("amount must be non-negative")
    return int((value * AMOUNT_SCALE).to_integral_value(rounding=ROUND_HALF_EVEN))


class TransactionRecord(BaseModel):
    """One transaction: input and output legs with amounts in smallest units."""

    model_config = ConfigDict(frozen=True)

    tx_id: str
    inputs: Tuple[Leg, ...]
    outputs: Tuple[Leg, ...]

    @field_validator("inputs", "outputs")
    @classmethod
    def _check_legs(cls, legs: Tuple[Leg, ...]) -> Tuple[Leg, ...]:
        for address, amount in legs:
            if not address:
                raise ValueError("address must be non-empty")
            if amount < 0:
                raise ValueError("amount must be non-negative")
        return legs

    @property
    def input_sum(self) -> int:
        return sum(amount for _, amount in self.inputs)

    @property
    def output_sum(self) -> int:
        return sum(amount for _, amount in self.outputs)

    @property
    def fee(self) -> int:
        return self.input_sum - self.output_sum

    @classmethod
    def from_amounts(cls, tx_id: str, inputs, outputs) -> "TransactionRecord":
        """Build from (address, currency amount) pairs as they appear in files."""
        return cls(
            tx_id=str(tx_id),
            inputs=tuple((str(a), to_units(v)) for a, v in inputs),
            outputs=tuple((str(a), to_units(v)) for a, v in outputs),
        )


class IngestStats(BaseModel):
    transactions_read: int = 0
    transactions_rejected: int = 0
    edges_emitted: int = 0
    distinct_addresses: int = 0
    warnings: List[str] = Field(default_factory=list)
    warnings_dropped: int = 0

    def warn(self, message: str) -> None:
        if len(self.warnings) < MAX_STORED_WARNINGS:
            self.warnings.append(message)
        else:
            self.warnings_dropped += 1
