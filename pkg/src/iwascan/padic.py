"""Arithmetic in Z/p^N viewed as p-adic integers at absolute precision N.

Every value carries the pair (p, N) and a canonical residue r in
[0, p^N).  There is no relative-precision tracking: a residue of zero
means "valuation at least N", never "exactly zero".  Division by p is
the only operation that changes N, and it does so explicitly.
"""

from __future__ import annotations

from typing import Union

from .errors import DomainError, PrecisionExhausted, StructuralError

# Primes this small are checked by trial division; the design ceiling
# (p <= 97) keeps that exact.
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def is_odd_prime(p: int) -> bool:
    if p in _SMALL_PRIMES:
        return p != 2
    if p < 2 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_parameters(p: int, N: int) -> None:
    """Reject (p, N) pairs outside the supported range."""
    if not isinstance(p, int) or not is_odd_prime(p):
        raise DomainError(f"p must be an odd prime, got {p!r}")
    if not isinstance(N, int) or N < 1:
        raise DomainError(f"precision N must be a positive integer, got {N!r}")


class AtLeastPrecision:
    """Sentinel valuation: the element vanishes to the carried precision.

    Compares strictly greater than every finite valuation, so expressions
    like ``min(v, N)`` and ``v >= bound`` work uniformly.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AtLeastPrecision"

    def __eq__(self, other):
        return isinstance(other, AtLeastPrecision)

    def __hash__(self):
        return hash("AtLeastPrecision")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return isinstance(other, AtLeastPrecision)

    def __gt__(self, other):
        return not isinstance(other, AtLeastPrecision)

    def __ge__(self, other):
        return True


AT_LEAST_PRECISION = AtLeastPrecision()

Valuation = Union[int, AtLeastPrecision]


class PadicInt:
    """An element of Z/p^N with p-adic semantics.

    Immutable.  Arithmetic requires both operands to share (p, N);
    plain integers are coerced.  `invert` and negative powers demand a
    unit, `divide_by_p` returns a value at precision N - 1.
    """

    __slots__ = ("p", "N", "r")

    def __init__(self, p: int, N: int, r: int):
        check_parameters(p, N)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "r", r % p**N)

    def __setattr__(self, name, value):
        raise AttributeError("PadicInt is immutable")

    # -- helpers -------------------------------------------------------

    @property
    def modulus(self) -> int:
        return self.p**self.N

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if (other.p, other.N) != (self.p, self.N):
                raise StructuralError(
                    f"mismatched rings: ({self.p},{self.N}) vs ({other.p},{other.N})")
            return other
        if isinstance(other, int):
            return PadicInt(self.p, self.N, other)
        return NotImplemented

    # -- ring operations -----------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.r + o.r)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.r - o.r)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, o.r - self.r)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.p, self.N, self.r * o.r)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.p, self.N, -self.r)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        return PadicInt(self.p, self.N, pow(self.r, k, self.modulus))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.r == other % self.modulus
        return (isinstance(other, PadicInt)
                and (self.p, self.N, self.r) == (other.p, other.N, other.r))

    def __hash__(self):
        return hash((self.p, self.N, self.r))

    def __repr__(self):
        return f"PadicInt(p={self.p}, N={self.N}, r={self.r})"

    # -- p-adic structure ----------------------------------------------

    @property
    def is_unit(self) -> bool:
        return self.r % self.p != 0

    @property
    def is_zero_within_precision(self) -> bool:
        return self.r == 0

    def valuation(self) -> Valuation:
        """Largest v with p^v dividing the residue, or AtLeastPrecision."""
        if self.r == 0:
            return AT_LEAST_PRECISION
        v = 0
        r = self.r
        while r % self.p == 0:
            r //= self.p
            v += 1
        return v

    def invert(self) -> "PadicInt":
        if not self.is_unit:
            raise DomainError(f"cannot invert non-unit residue {self.r} (p={self.p})")
        return PadicInt(self.p, self.N, pow(self.r, -1, self.modulus))

    def divide_by_p(self) -> "PadicInt":
        """Exact division by p; the result carries precision N - 1."""
        if self.N == 1:
            raise PrecisionExhausted("division by p would leave no digits")
        if self.r % self.p != 0:
            raise DomainError(f"residue {self.r} is not divisible by p={self.p}")
        return PadicInt(self.p, self.N - 1, self.r // self.p)

    def reduce_precision(self, N_new: int) -> "PadicInt":
        if N_new > self.N:
            raise PrecisionExhausted(
                f"cannot raise precision from {self.N} to {N_new}")
        return PadicInt(self.p, N_new, self.r)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "r": str(self.r)}

    @classmethod
    def from_json(cls, obj: dict) -> "PadicInt":
        try:
            return cls(int(obj["p"]), int(obj["N"]), int(obj["r"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"malformed PadicInt payload: {obj!r}") from exc


def add(x: PadicInt, y: PadicInt) -> PadicInt:
    return x + y


def sub(x: PadicInt, y: PadicInt) -> PadicInt:
    return x - y


def mul(x: PadicInt, y: PadicInt) -> PadicInt:
    return x * y


def invert(x: PadicInt) -> PadicInt:
    return x.invert()


def valuation(x: PadicInt) -> Valuation:
    return x.valuation()


def padic_pow(x: PadicInt, k: int) -> PadicInt:
    return x**k


def divide_by_p(x: PadicInt) -> PadicInt:
    return x.divide_by_p()


def teichmuller(a: int, p: int, N: int) -> PadicInt:
    """The Teichmuller lift of a mod p: the unique (p-1)-st root of
    unity in Z/p^N congruent to a mod p.

    Computed by iterating x -> x^p, which converges in at most N steps.
    """
    check_parameters(p, N)
    if a % p == 0:
        raise DomainError("Teichmuller lift requires a unit residue")
    q = p**N
    x = a % q
    for _ in range(N + 1):
        x_next = pow(x, p, q)
        if x_next == x:
            break
        x = x_next
    return PadicInt(p, N, x)
