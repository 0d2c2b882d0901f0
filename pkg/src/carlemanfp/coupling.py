"""Coupling constant and its rescaled companion.

Everything in this package is parametrised by a single coupling
``lambda <= 0``.  The stability theory holds on ``[-1/6, 0]``; the
rescaled value ``lambda_r = |lambda| / (1 - 2|lambda|)`` governs the
upper edge of the fixed-point domain and most bound constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

THEOREM_LAMBDA_MIN = -1.0 / 6.0

# Hard limit: lambda_r blows up at |lambda| = 1/2, and the fixed-point
# domain itself is only defined for |lambda| < 1/3.
EXPLORATORY_LAMBDA_MIN = -0.499


@dataclass(frozen=True)
class Coupling:
    """Coupling ``lam`` in ``[-1/6, 0]`` with cached ``lambda_r``.

    ``exploratory=True`` relaxes the range check (used only by the
    diagnostic coupling scan; no bound is asserted outside the theorem
    range).
    """

    lam: float
    exploratory: bool = False
    lambda_r: float = field(init=False)

    def __post_init__(self) -> None:
        lam = float(self.lam)
        if not lam <= 0.0:
            raise ValueError(f"coupling must be <= 0, got {lam}")
        if self.exploratory:
            if lam < EXPLORATORY_LAMBDA_MIN:
                raise ValueError(
                    f"exploratory coupling must be > {EXPLORATORY_LAMBDA_MIN}, got {lam}"
                )
        elif lam < THEOREM_LAMBDA_MIN - 1e-15:
            raise ValueError(
                f"coupling {lam} outside [{THEOREM_LAMBDA_MIN}, 0]; "
                "construct with exploratory=True to bypass the range guard"
            )
        object.__setattr__(self, "lam", lam)
        object.__setattr__(
            self, "lambda_r", abs(lam) / (1.0 - 2.0 * abs(lam))
        )

    @property
    def abs_lambda(self) -> float:
        return abs(self.lam)

    @property
    def in_theorem_range(self) -> bool:
        return THEOREM_LAMBDA_MIN - 1e-15 <= self.lam <= 0.0

    def lower_envelope_exponent(self) -> float:
        """Exponent ``-(1 - |lambda|)`` of the steep envelope edge."""
        return -(1.0 - self.abs_lambda)

    def upper_envelope_exponent(self) -> float:
        """Exponent ``-(1 - lambda_r)`` of the shallow envelope edge."""
        return -(1.0 - self.lambda_r)
