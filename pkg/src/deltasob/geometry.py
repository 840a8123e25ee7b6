"""Ball geometry and dimensional constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


def sphere_area(k: int) -> float:
    """Surface measure of the unit k-sphere in R^(k+1).

    ``sphere_area(n - 1)`` is the omega_{n-1} that appears in every kernel
    formula; ``sphere_area(0) == 2`` (two points).
    """
    if k < 0:
        raise DomainError(f"sphere dimension must be >= 0, got {k}")
    m = (k + 1) / 2.0
    return 2.0 * math.pi**m / math.gamma(m)


@dataclass(frozen=True)
class BallGeometry:
    """A ball B_R in R^n centred at the origin.

    Only ``n`` and ``R`` are stored; everything else is derived.
    """

    n: int
    R: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"radius must be positive and finite, got {self.R}")

    @classmethod
    def from_volume(cls, n: int, V: float) -> "BallGeometry":
        if not V > 0:
            raise DomainError(f"volume must be positive, got {V}")
        return cls(n, (n * V / sphere_area(n - 1)) ** (1.0 / n))

    @property
    def omega(self) -> float:
        return sphere_area(self.n - 1)

    @property
    def V(self) -> float:
        return self.omega * self.R**self.n / self.n

    @property
    def p(self) -> float:
        """Weak-type exponent (n-2)/n."""
        return (self.n - 2) / self.n

    @property
    def c_n(self) -> float:
        if self.n < 3:
            raise DomainError("c_n is defined only for n >= 3")
        return 1.0 / ((self.n - 2) * self.omega)

    @property
    def alpha_n(self) -> float:
        # omega_{n-1}, not omega_n: fixed by N*_V(lambda_V(s)) = s.
        if self.n < 3:
            raise DomainError("alpha_n is defined only for n >= 3")
        n = self.n
        return (n - 2) * n ** ((n - 2) / n) * self.omega ** (2.0 / n)

    @property
    def kernel_constant(self) -> float:
        """Coefficient of the power law in N*: c_n (omega_{n-1}/n)^{(n-2)/n}.

        For n = 2 this is the coefficient 1/(4 pi) of log(V/t).
        """
        if self.n == 2:
            return 1.0 / (4.0 * math.pi)
        return self.c_n * (self.omega / self.n) ** self.p

    def volume_of_radius(self, r):
        """|B_r| in this dimension (vectorised)."""
        return self.omega * r**self.n / self.n

    def radius_of_volume(self, t):
        return (self.n * t / self.omega) ** (1.0 / self.n)

    def with_radius(self, R: float) -> "BallGeometry":
        return BallGeometry(self.n, R)
