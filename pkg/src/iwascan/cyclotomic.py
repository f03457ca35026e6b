"""Cyclotomic extensions Z_p[zeta] mod p^N for p-power roots of unity.

Level n models O_n = Z_p[zeta_{p^n}] / p^N as coefficient vectors of
length phi(p^n) = (p-1)p^(n-1) against the power basis of zeta, reduced
modulo the cyclotomic polynomial Phi_{p^n}(X) = sum_{i<p} X^(i*p^(n-1)).
Level 0 is Z/p^N itself and stores a bare residue.

The ring object owns the arithmetic kernels and works on raw data
(an int at level 0, a tuple of ints otherwise); CycloElt is the
user-facing immutable wrapper.  Valuations are normalized so that
v(p) = 1, hence v(zeta - 1) = 1/phi(p^n).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .errors import (DomainError, InconsistencyError, PrecisionExhausted,
                     StructuralError)
from .padic import (AT_LEAST_PRECISION, AtLeastPrecision, PadicInt,
                    check_parameters)

RawCyclo = Union[int, tuple]


@lru_cache(maxsize=None)
def cyclo_ring(p: int, N: int, level: int) -> "CycloRing":
    return CycloRing(p, N, level)


class CycloRing:
    """Arithmetic kernels for one (p, N, level) triple.

    Instances are interned via `cyclo_ring`; identity comparison is safe.
    """

    def __init__(self, p: int, N: int, level: int):
        check_parameters(p, N)
        if not isinstance(level, int) or level < 0:
            raise DomainError(f"level must be a non-negative integer, got {level!r}")
        self.p = p
        self.N = N
        self.level = level
        self.q = p**N
        self.pn = p**level
        self.phi = 1 if level == 0 else (p - 1) * p ** (level - 1)
        self.is_scalar = level == 0
        self._eps_inv_raw: Optional[tuple] = None
        self._p_over_pi_raw: Optional[tuple] = None

    def __repr__(self):
        return f"CycloRing(p={self.p}, N={self.N}, level={self.level})"

    # -- constructors ----------------------------------------------------

    @property
    def zero_raw(self) -> RawCyclo:
        return 0 if self.is_scalar else (0,) * self.phi

    @property
    def one_raw(self) -> RawCyclo:
        if self.is_scalar:
            return 1
        return (1,) + (0,) * (self.phi - 1)

    def from_int(self, c: int) -> RawCyclo:
        c %= self.q
        if self.is_scalar:
            return c
        return (c,) + (0,) * (self.phi - 1)

    @property
    def pi_raw(self) -> RawCyclo:
        """The uniformizer: p at level 0, zeta - 1 above."""
        if self.is_scalar:
            return self.p % self.q
        vec = [self.q - 1] + [0] * (self.phi - 1)
        vec[1] = 1
        return tuple(vec)

    def zeta_raw(self, e: int = 1) -> RawCyclo:
        if self.is_scalar:
            return 1
        e %= self.pn
        if e < self.phi:
            vec = [0] * self.phi
            vec[e] = 1
            return tuple(vec)
        red = [0] * self.pn
        red[e] = 1
        return self._reduce(red)

    # -- reduction -------------------------------------------------------

    def _reduce(self, vec: list) -> tuple:
        """Reduce a coefficient list of degree < 2*phi modulo Phi_{p^n}.

        Rewrites X^t for t >= phi via X^phi = -sum_{i<p-1} X^(i*p^(n-1)),
        descending so every rewrite lands on smaller exponents.
        """
        phi = self.phi
        step = self.pn // self.p
        for t in range(len(vec) - 1, phi - 1, -1):
            a = vec[t]
            if a:
                vec[t] = 0
                base = t - phi
                for i in range(self.p - 1):
                    vec[base + i * step] -= a
        q = self.q
        return tuple(v % q for v in vec[:phi])

    # -- basic arithmetic --------------------------------------------------

    def add_raw(self, a: RawCyclo, b: RawCyclo) -> RawCyclo:
        q = self.q
        if self.is_scalar:
            return (a + b) % q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub_raw(self, a: RawCyclo, b: RawCyclo) -> RawCyclo:
        q = self.q
        if self.is_scalar:
            return (a - b) % q
        return tuple((x - y) % q for x, y in zip(a, b))

    def neg_raw(self, a: RawCyclo) -> RawCyclo:
        q = self.q
        if self.is_scalar:
            return -a % q
        return tuple(-x % q for x in a)

    def mul_raw(self, a: RawCyclo, b: RawCyclo) -> RawCyclo:
        q = self.q
        if self.is_scalar:
            return (a * b) % q
        phi = self.phi
        prod = [0] * (2 * phi - 1)
        for i in range(phi):
            ai = a[i]
            if ai:
                for j in range(phi):
                    bj = b[j]
                    if bj:
                        prod[i + j] += ai * bj
        return self._reduce(prod)

    def mul_int_raw(self, c: int, a: RawCyclo) -> RawCyclo:
        q = self.q
        if self.is_scalar:
            return (c * a) % q
        return tuple((c * x) % q for x in a)

    def mul_zeta_pow_raw(self, a: RawCyclo, e: int) -> RawCyclo:
        """Multiply by zeta^e via rotation in the redundant basis."""
        if self.is_scalar:
            return a
        e %= self.pn
        if e == 0:
            return a
        red = [0] * self.pn
        for i, c in enumerate(a):
            red[(i + e) % self.pn] = c
        return self._reduce(red)

    def pow_raw(self, a: RawCyclo, k: int) -> RawCyclo:
        if self.is_scalar:
            if k < 0:
                return pow(pow(a, -1, self.q), -k, self.q)
            return pow(a, k, self.q)
        if k < 0:
            a = self.invert_raw(a)
            k = -k
        result = self.one_raw
        base = a
        while k:
            if k & 1:
                result = self.mul_raw(result, base)
            base = self.mul_raw(base, base)
            k >>= 1
        return result

    def galois_apply_raw(self, a: RawCyclo, t: int) -> RawCyclo:
        """Apply zeta -> zeta^t (t must be prime to p)."""
        if self.is_scalar:
            return a
        if t % self.p == 0:
            raise DomainError("Galois exponent must be prime to p")
        red = [0] * self.pn
        for i, c in enumerate(a):
            if c:
                red[(i * t) % self.pn] += c
        return self._reduce(red)

    # -- inversion ---------------------------------------------------------

    def is_unit_raw(self, a: RawCyclo) -> bool:
        if self.is_scalar:
            return a % self.p != 0
        return sum(a) % self.p != 0

    def invert_raw(self, a: RawCyclo) -> RawCyclo:
        """Invert a unit: extended Euclid mod p, then Hensel lifting."""
        if self.is_scalar:
            if a % self.p == 0:
                raise DomainError("cannot invert: element lies in the maximal ideal")
            return pow(a, -1, self.q)
        if not self.is_unit_raw(a):
            raise DomainError("cannot invert: element lies in the maximal ideal")
        x = self._invert_mod_p(a)
        # x*a == 1 mod p; each Newton step doubles the number of p-digits.
        bits = 1
        two = self.from_int(2)
        while bits < self.N:
            ax = self.mul_raw(a, x)
            x = self.mul_raw(x, self.sub_raw(two, ax))
            bits *= 2
        return x

    def _invert_mod_p(self, a: RawCyclo) -> tuple:
        p, phi = self.p, self.phi
        step = self.pn // self.p
        modpoly = [0] * (phi + 1)
        for i in range(p):
            modpoly[i * step] = 1

        def polydivmod(num, den):
            num = num[:]
            dd = len(den) - 1
            while den[dd] == 0:
                dd -= 1
            inv_lead = pow(den[dd], -1, p)
            quot = [0] * max(len(num) - dd, 1)
            for k in range(len(num) - 1 - dd, -1, -1):
                c = (num[k + dd] * inv_lead) % p
                if c:
                    quot[k] = c
                    for i in range(dd + 1):
                        num[k + i] = (num[k + i] - c * den[i]) % p
            while len(num) > 1 and num[-1] == 0:
                num.pop()
            return quot, num

        r0, r1 = modpoly[:], [c % p for c in a]
        while len(r1) > 1 and r1[-1] == 0:
            r1.pop()
        s0, s1 = [0], [1]
        while any(r1):
            quot, rem = polydivmod(r0, r1)
            s_new = s0[:]
            if len(s_new) < len(quot) + len(s1):
                s_new += [0] * (len(quot) + len(s1) - len(s_new))
            for i, qc in enumerate(quot):
                if qc:
                    for j, sc in enumerate(s1):
                        s_new[i + j] = (s_new[i + j] - qc * sc) % p
            r0, r1 = r1, rem
            s0, s1 = s1, s_new
            if len(r1) == 1 and r1[0]:
                lead_inv = pow(r1[0], -1, p)
                inv = [(c * lead_inv) % p for c in s1]
                inv += [0] * (phi - len(inv))
                return tuple(inv[:phi])
        raise DomainError("cannot invert: element lies in the maximal ideal")

    # -- precision and uniformizer handling ---------------------------------

    def reduce_precision_raw(self, a: RawCyclo, N_new: int):
        if N_new > self.N:
            raise PrecisionExhausted(f"cannot raise precision {self.N} -> {N_new}")
        ring = cyclo_ring(self.p, N_new, self.level)
        if self.is_scalar:
            return ring, a % ring.q
        return ring, tuple(c % ring.q for c in a)

    def divide_by_p_raw(self, a: RawCyclo):
        """Exact division by p; precision drops by one digit."""
        if self.N == 1:
            raise PrecisionExhausted("division by p would leave no digits")
        ring = cyclo_ring(self.p, self.N - 1, self.level)
        if self.is_scalar:
            if a % self.p:
                raise DomainError("element is not divisible by p")
            return ring, (a // self.p) % ring.q
        if any(c % self.p for c in a):
            raise DomainError("element is not divisible by p")
        return ring, tuple((c // self.p) % ring.q for c in a)

    def _eps_inv(self) -> tuple:
        """Inverse of the unit eps = (zeta-1)^phi / p, at this precision."""
        if self._eps_inv_raw is None:
            lift = cyclo_ring(self.p, self.N + 1, self.level)
            pik = lift.pow_raw(lift.pi_raw, self.phi)
            eps = tuple((c // self.p) % self.q for c in pik)
            self._eps_inv_raw = self.invert_raw(eps)
        return self._eps_inv_raw

    def _p_over_pi(self) -> tuple:
        """The ring element p / (zeta - 1) = (zeta-1)^(phi-1) * eps^(-1)."""
        if self._p_over_pi_raw is None:
            pik = self.pow_raw(self.pi_raw, self.phi - 1)
            self._p_over_pi_raw = self.mul_raw(pik, self._eps_inv())
        return self._p_over_pi_raw

    def divide_by_pi_power_raw(self, a: RawCyclo, w: int):
        """Exact division by (zeta-1)^w; returns (ring, raw) at the
        reduced precision N - ceil(w / phi).

        Divisibility is exactly the p-divisibility of a * pi^(t*phi - w)
        with t = ceil(w/phi), so no separate valuation check is needed.
        """
        if w == 0:
            return self, a
        phi = self.phi
        t = -(-w // phi)
        if t >= self.N:
            raise PrecisionExhausted(
                f"removing pi^{w} would consume all {self.N} digits")
        if self.is_scalar:
            if a % self.p ** w:
                raise DomainError("element is not divisible by the requested p power")
            ring = cyclo_ring(self.p, self.N - w, 0)
            return ring, (a // self.p ** w) % ring.q
        s = t * phi - w
        y = self.mul_raw(a, self.pow_raw(self.pi_raw, s)) if s else a
        pt = self.p ** t
        if any(c % pt for c in y):
            raise DomainError("element is not divisible by the requested pi power")
        ring = cyclo_ring(self.p, self.N - t, self.level)
        z = tuple((c // pt) % ring.q for c in y)
        if t:
            z = ring.mul_raw(z, ring.pow_raw(ring._eps_inv(), t))
        return ring, z

    # -- valuation -----------------------------------------------------------

    def pi_valuation(self, a: RawCyclo) -> Optional[int]:
        """Valuation in uniformizer units, or None when zero to precision."""
        if self.is_scalar:
            if a == 0:
                return None
            v = 0
            while a % self.p == 0:
                a //= self.p
                v += 1
            return v
        if not any(a):
            return None
        p, phi = self.p, self.phi
        s = min(_int_val(c, p) for c in a if c)
        if s:
            ring = cyclo_ring(p, self.N - s, self.level)
            vec = [(c // p**s) % ring.q for c in a]
        else:
            ring = self
            vec = list(a)
        return s * phi + ring._pi_val_unit_content(vec)

    def _pi_val_unit_content(self, vec: list) -> int:
        """pi-adic valuation of an element with a unit coefficient (< phi)."""
        p, q, phi = self.p, self.q, self.phi
        dvec = self._p_over_pi()
        t = 0
        while t < phi:
            rem = sum(vec) % q
            if rem % p:
                return t
            # vec = (vec - rem)/pi + rem/pi, with rem/pi = (rem/p)*(p/pi)
            quot = [0] * phi
            acc = 0
            for i in range(phi - 1, 0, -1):
                acc = (acc + vec[i]) % q
                quot[i - 1] = acc
            w = rem // p
            vec = [(qc + w * dc) % q for qc, dc in zip(quot, dvec)]
            t += 1
        # An element with a unit coefficient has pi-valuation below phi.
        raise InconsistencyError("pi-valuation chain failed to terminate")

    # -- level conversion ------------------------------------------------

    def lift_from(self, other: "CycloRing", a: RawCyclo) -> RawCyclo:
        """Re-express an element of a lower level in this ring."""
        if (other.p, other.N) != (self.p, self.N):
            raise StructuralError(
                f"cannot lift between rings {other!r} and {self!r}")
        if other.level == self.level:
            return a
        if other.level > self.level:
            raise StructuralError("lift target level is lower than the source")
        if other.is_scalar:
            return self.from_int(a)
        stretch = self.pn // other.pn
        red = [0] * self.pn
        for i, c in enumerate(a):
            red[i * stretch] = c
        return self._reduce(red)


def _int_val(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def dft_all_roots(ring: CycloRing, elems: list) -> list:
    """Given raw elements C_0..C_{M-1} with M = p^level, return the list
    X_s = sum_j C_j * zeta^(j*s) for s = 0..M-1.

    Radix-p Cooley-Tukey over the redundant basis, where multiplying by
    a power of zeta is a rotation.  Used for bulk orthogonality and
    finite-Fourier reconstruction checks; O(M log M) vector operations.
    """
    if ring.is_scalar:
        raise StructuralError("dft_all_roots requires a positive level")
    M, q, p = ring.pn, ring.q, ring.p
    if len(elems) != M:
        raise StructuralError(f"expected {M} elements, got {len(elems)}")
    vecs = []
    for a in elems:
        red = list(a) + [0] * (M - ring.phi)
        vecs.append(red)

    def rec(parts: list, root_exp: int, size: int) -> list:
        if size == 1:
            return parts
        sub = size // p
        branches = [rec(parts[r::p], root_exp * p, sub) for r in range(p)]
        out = []
        for s in range(size):
            acc = branches[0][s % sub][:]
            for r in range(1, p):
                vec = branches[r][s % sub]
                rot = (root_exp * r * s) % M
                if rot:
                    vec = vec[M - rot:] + vec[:M - rot]
                acc = [x + y for x, y in zip(acc, vec)]
            out.append([v % q for v in acc])
        return out

    table = rec(vecs, 1, M)
    return [ring._reduce(v) for v in table]


class CycloElt:
    """Immutable element of a cyclotomic extension at fixed precision.

    Mixed-level arithmetic lifts to the higher level automatically;
    mixed (p, N) raises StructuralError.
    """

    __slots__ = ("ring", "raw")

    def __init__(self, ring: CycloRing, raw: RawCyclo):
        if ring.is_scalar:
            if not isinstance(raw, int):
                raise StructuralError("level-0 element needs an int residue")
            raw %= ring.q
        else:
            raw = tuple(c % ring.q for c in raw)
            if len(raw) != ring.phi:
                raise StructuralError(
                    f"expected {ring.phi} coefficients, got {len(raw)}")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "raw", raw)

    def __setattr__(self, name, value):
        raise AttributeError("CycloElt is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_int(cls, ring: CycloRing, c: int) -> "CycloElt":
        return cls(ring, ring.from_int(c))

    @classmethod
    def from_padic(cls, x: PadicInt, level: int = 0) -> "CycloElt":
        return cls(cyclo_ring(x.p, x.N, level), cyclo_ring(x.p, x.N, level).from_int(x.r))

    # -- coercion -----------------------------------------------------------

    def _pair(self, other):
        if isinstance(other, int):
            return self, CycloElt.from_int(self.ring, other)
        if isinstance(other, PadicInt):
            other = CycloElt.from_padic(other)
        if not isinstance(other, CycloElt):
            return None, None
        a, b = self, other
        if (a.ring.p, a.ring.N) != (b.ring.p, b.ring.N):
            raise StructuralError(
                f"mismatched rings: {a.ring!r} vs {b.ring!r}")
        if a.ring.level < b.ring.level:
            a = a.lift_level(b.ring.level)
        elif b.ring.level < a.ring.level:
            b = b.lift_level(a.ring.level)
        return a, b

    # -- operators -----------------------------------------------------------

    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloElt(a.ring, a.ring.add_raw(a.raw, b.raw))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloElt(a.ring, a.ring.sub_raw(a.raw, b.raw))

    def __rsub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloElt(a.ring, a.ring.sub_raw(b.raw, a.raw))

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return CycloElt(a.ring, a.ring.mul_raw(a.raw, b.raw))

    __rmul__ = __mul__

    def __neg__(self):
        return CycloElt(self.ring, self.ring.neg_raw(self.raw))

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return CycloElt(self.ring, self.ring.pow_raw(self.raw, k))

    def __eq__(self, other):
        if isinstance(other, (int, PadicInt, CycloElt)):
            try:
                a, b = self._pair(other)
            except StructuralError:
                return False
            return a.raw == b.raw
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.p, self.ring.N, self.ring.level, self.raw))

    def __repr__(self):
        return f"CycloElt({self.ring!r}, {self.raw!r})"

    # -- structure -------------------------------------------------------------

    @property
    def is_unit(self) -> bool:
        return self.ring.is_unit_raw(self.raw)

    @property
    def is_zero_within_precision(self) -> bool:
        if self.ring.is_scalar:
            return self.raw == 0
        return not any(self.raw)

    def invert(self) -> "CycloElt":
        return CycloElt(self.ring, self.ring.invert_raw(self.raw))

    def lift_level(self, level: int) -> "CycloElt":
        target = cyclo_ring(self.ring.p, self.ring.N, level)
        return CycloElt(target, target.lift_from(self.ring, self.raw))

    def reduce_precision(self, N_new: int) -> "CycloElt":
        ring, raw = self.ring.reduce_precision_raw(self.raw, N_new)
        return CycloElt(ring, raw)

    def divide_by_p(self) -> "CycloElt":
        ring, raw = self.ring.divide_by_p_raw(self.raw)
        return CycloElt(ring, raw)

    def galois_apply(self, t: int) -> "CycloElt":
        return CycloElt(self.ring, self.ring.galois_apply_raw(self.raw, t))

    def rational_valuation(self) -> Union[Fraction, AtLeastPrecision]:
        v = self.ring.pi_valuation(self.raw)
        if v is None:
            return AT_LEAST_PRECISION
        return Fraction(v, self.ring.phi)

    def coefficients(self) -> list:
        """Coefficients against the power basis, as PadicInt values."""
        p, N = self.ring.p, self.ring.N
        if self.ring.is_scalar:
            return [PadicInt(p, N, self.raw)]
        return [PadicInt(p, N, c) for c in self.raw]

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"level": self.ring.level,
                "coeffs": [c.to_json() for c in self.coefficients()]}

    @classmethod
    def from_json(cls, obj: dict) -> "CycloElt":
        try:
            level = int(obj["level"])
            coeffs = [PadicInt.from_json(c) for c in obj["coeffs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"malformed CycloElt payload: {obj!r}") from exc
        if not coeffs:
            raise StructuralError("CycloElt payload has no coefficients")
        p, N = coeffs[0].p, coeffs[0].N
        if any((c.p, c.N) != (p, N) for c in coeffs):
            raise StructuralError("CycloElt coefficients disagree on (p, N)")
        ring = cyclo_ring(p, N, level)
        if level == 0:
            if len(coeffs) != 1:
                raise StructuralError("level-0 CycloElt needs exactly one coefficient")
            return cls(ring, coeffs[0].r)
        return cls(ring, tuple(c.r for c in coeffs))


# -- module-level operations matching the public surface ---------------------


def zeta(p: int, N: int, n: int) -> CycloElt:
    """The canonical primitive p^n-th root of unity (1 when n = 0)."""
    ring = cyclo_ring(p, N, n)
    return CycloElt(ring, ring.zeta_raw(1) if n else 1)


def embed(x: PadicInt, level: int) -> CycloElt:
    """Embed a base element into the level-n extension."""
    return CycloElt.from_padic(x, level)


def lift_level(x: CycloElt, level: int) -> CycloElt:
    return x.lift_level(level)


def rational_valuation(x) -> Union[Fraction, AtLeastPrecision]:
    """Exact valuation with v(p) = 1, as a Fraction, or AtLeastPrecision."""
    if isinstance(x, PadicInt):
        v = x.valuation()
        return v if isinstance(v, AtLeastPrecision) else Fraction(v)
    return x.rational_valuation()


def root_of_unity_sum(p: int, N: int, n: int, a: int) -> CycloElt:
    """sum_{j mod p^n} zeta^(j*a): equals p^n when p^n | a and 0 otherwise."""
    ring = cyclo_ring(p, N, n)
    acc = ring.zero_raw
    z = ring.one_raw
    for _ in range(p**n):
        acc = ring.add_raw(acc, z)
        z = ring.mul_zeta_pow_raw(z, a)
    return CycloElt(ring, acc)
