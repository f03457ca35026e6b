"""Truncated power series over cyclotomic coefficient rings.

One-variable series model the completed group algebra of a Z_p factor
via T = gamma - 1; two-variable series use T_plus and T_minus for the
two factors.  A series carries its coefficients up to a truncation
degree D; coefficients beyond D are unknown, so binary operations
truncate to the smaller D unless a series is explicitly `extend`ed
(valid only when it is an exact polynomial).

Evaluation points must lie in the open unit disc (positive valuation).
Every evaluation has a computable truncation-error floor: the smallest
possible valuation of a discarded monomial, capped at N.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .cyclotomic import CycloElt, CycloRing, cyclo_ring, dft_all_roots
from .errors import (DomainError, InconsistencyError, PrecisionExhausted,
                     StructuralError)
from .padic import AT_LEAST_PRECISION, AtLeastPrecision, PadicInt

DEFAULT_TRUNCATION = 32


def _as_raw(ring: CycloRing, c) -> object:
    if isinstance(c, CycloElt):
        if c.ring is ring:
            return c.raw
        lifted = c.lift_level(ring.level) if c.ring.level < ring.level else c
        if lifted.ring is not ring:
            raise StructuralError(f"coefficient ring {c.ring!r} does not fit {ring!r}")
        return lifted.raw
    if isinstance(c, PadicInt):
        if (c.p, c.N) != (ring.p, ring.N):
            raise StructuralError("coefficient (p, N) does not match the series ring")
        return ring.from_int(c.r)
    if isinstance(c, int):
        return ring.from_int(c)
    raise StructuralError(f"cannot use {c!r} as a series coefficient")


class PowerSeries1:
    """One-variable truncated series sum_i c_i T^i, 0 <= i <= D."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CycloRing, coeffs: Iterable):
        raws = tuple(_as_raw(ring, c) for c in coeffs)
        if not raws:
            raise StructuralError("a series needs at least the constant coefficient")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coeffs", raws)

    def __setattr__(self, name, value):
        raise AttributeError("PowerSeries1 is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring: CycloRing, D: int = 0) -> "PowerSeries1":
        return cls(ring, [0] * (D + 1))

    @classmethod
    def one(cls, ring: CycloRing, D: int = 0) -> "PowerSeries1":
        return cls(ring, [1] + [0] * D)

    @classmethod
    def monomial(cls, ring: CycloRing, k: int, D: int = None) -> "PowerSeries1":
        """T^k, zero-padded to degree D (exact polynomial)."""
        if D is None:
            D = k
        if k > D:
            raise StructuralError("monomial degree exceeds truncation degree")
        return cls(ring, [0] * k + [1] + [0] * (D - k))

    # -- basic structure -----------------------------------------------------

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> CycloElt:
        return CycloElt(self.ring, self.coeffs[i])

    @property
    def is_zero_within_precision(self) -> bool:
        if self.ring.is_scalar:
            return not any(self.coeffs)
        return not any(any(c) for c in self.coeffs)

    def truncate(self, D: int) -> "PowerSeries1":
        if D >= self.D:
            return self
        return PowerSeries1(self.ring, self.coeffs[:D + 1])

    def extend(self, D: int) -> "PowerSeries1":
        """Zero-pad to degree D.  Only valid for exact polynomials: the
        caller asserts the tail really is zero, not merely unknown."""
        if D <= self.D:
            return self
        pad = (self.ring.zero_raw,) * (D - self.D)
        return PowerSeries1(self.ring, self.coeffs + pad)

    def lift_level(self, level: int) -> "PowerSeries1":
        if level == self.ring.level:
            return self
        target = cyclo_ring(self.ring.p, self.ring.N, level)
        return PowerSeries1(target,
                            [target.lift_from(self.ring, c) for c in self.coeffs])

    def reduce_precision(self, N_new: int) -> "PowerSeries1":
        if N_new == self.ring.N:
            return self
        target = cyclo_ring(self.ring.p, N_new, self.ring.level)
        out = []
        for c in self.coeffs:
            _, raw = self.ring.reduce_precision_raw(c, N_new)
            out.append(raw)
        return PowerSeries1(target, out)

    def min_pi_valuation(self):
        """Minimum uniformizer valuation over all coefficients, or None
        when every coefficient vanishes to precision."""
        best = None
        for c in self.coeffs:
            v = self.ring.pi_valuation(c)
            if v is not None and (best is None or v < best):
                best = v
                if best == 0:
                    break
        return best

    # -- ring operations -------------------------------------------------------

    def _pair(self, other: "PowerSeries1"):
        if not isinstance(other, PowerSeries1):
            raise StructuralError(f"expected a one-variable series, got {other!r}")
        a, b = self, other
        if (a.ring.p, a.ring.N) != (b.ring.p, b.ring.N):
            raise StructuralError(f"mismatched rings: {a.ring!r} vs {b.ring!r}")
        if a.ring.level < b.ring.level:
            a = a.lift_level(b.ring.level)
        elif b.ring.level < a.ring.level:
            b = b.lift_level(a.ring.level)
        return a, b

    def __add__(self, other):
        a, b = self._pair(other)
        D = min(a.D, b.D)
        ring = a.ring
        return PowerSeries1(ring, [ring.add_raw(x, y)
                                   for x, y in zip(a.coeffs[:D + 1], b.coeffs[:D + 1])])

    def __sub__(self, other):
        a, b = self._pair(other)
        D = min(a.D, b.D)
        ring = a.ring
        return PowerSeries1(ring, [ring.sub_raw(x, y)
                                   for x, y in zip(a.coeffs[:D + 1], b.coeffs[:D + 1])])

    def __neg__(self):
        ring = self.ring
        return PowerSeries1(ring, [ring.neg_raw(c) for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt, CycloElt)):
            raw = _as_raw(self.ring, other)
            ring = self.ring
            if ring.is_scalar:
                q = ring.q
                return PowerSeries1(ring, [(raw * c) % q for c in self.coeffs])
            return PowerSeries1(ring, [ring.mul_raw(raw, c) for c in self.coeffs])
        a, b = self._pair(other)
        D = min(a.D, b.D)
        return PowerSeries1(a.ring, _mul_coeff_lists(a.ring, a.coeffs, b.coeffs, D))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PowerSeries1):
            return NotImplemented
        try:
            a, b = self._pair(other)
        except StructuralError:
            return False
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.ring.p, self.ring.N, self.ring.level, self.coeffs))

    def __repr__(self):
        return f"PowerSeries1({self.ring!r}, D={self.D})"

    # -- evaluation -------------------------------------------------------------

    def eval(self, t: CycloElt) -> CycloElt:
        return eval1(self, t)


def _mul_coeff_lists(ring: CycloRing, a: tuple, b: tuple, D: int) -> list:
    """Cauchy product of raw coefficient tuples, truncated at degree D."""
    if ring.is_scalar:
        q = ring.q
        out = []
        for k in range(D + 1):
            acc = 0
            lo = max(0, k - len(b) + 1)
            hi = min(k, len(a) - 1)
            for i in range(lo, hi + 1):
                acc += a[i] * b[k - i]
            out.append(acc % q)
        return out
    out = []
    for k in range(D + 1):
        acc = ring.zero_raw
        lo = max(0, k - len(b) + 1)
        hi = min(k, len(a) - 1)
        for i in range(lo, hi + 1):
            acc = ring.add_raw(acc, ring.mul_raw(a[i], b[k - i]))
        out.append(acc)
    return out


def _check_open_disc(point: CycloElt) -> None:
    v = point.rational_valuation()
    if not isinstance(v, AtLeastPrecision) and v == 0:
        raise DomainError("substitution point lies outside the open unit polydisc")


def _common_point_ring(f_ring: CycloRing, *points: CycloElt) -> CycloRing:
    p, N = f_ring.p, f_ring.N
    level = f_ring.level
    for t in points:
        if (t.ring.p, t.ring.N) != (p, N):
            raise StructuralError("evaluation point (p, N) does not match the series")
        level = max(level, t.ring.level)
    return cyclo_ring(p, N, level)


def eval1(f: PowerSeries1, t: CycloElt) -> CycloElt:
    """Evaluate at a point of positive valuation (Horner)."""
    _check_open_disc(t)
    ring = _common_point_ring(f.ring, t)
    g = f.lift_level(ring.level)
    traw = t.lift_level(ring.level).raw if t.ring.level < ring.level else t.raw
    coeffs = g.coeffs
    if ring.is_scalar:
        q = ring.q
        acc = coeffs[-1]
        for i in range(len(coeffs) - 2, -1, -1):
            acc = (acc * traw + coeffs[i]) % q
        return CycloElt(ring, acc)
    acc = coeffs[-1]
    for i in range(len(coeffs) - 2, -1, -1):
        acc = ring.add_raw(ring.mul_raw(acc, traw), coeffs[i])
    return CycloElt(ring, acc)


def truncation_floor1(f: PowerSeries1, t: CycloElt) -> Fraction:
    """Valuation floor of the discarded tail: (D+1) * v(t), capped at N."""
    N = Fraction(f.ring.N)
    v = t.rational_valuation()
    if isinstance(v, AtLeastPrecision):
        return N
    return min(N, (f.D + 1) * v)


class PowerSeries2:
    """Two-variable truncated series sum c_ij T_plus^i T_minus^j.

    Stored as rows indexed by the T_plus exponent; row i is the raw
    coefficient tuple of a one-variable series in T_minus.
    """

    __slots__ = ("ring", "rows")

    def __init__(self, ring: CycloRing, rows: Iterable):
        packed = []
        width = None
        for row in rows:
            raws = tuple(_as_raw(ring, c) for c in row)
            if width is None:
                width = len(raws)
            elif len(raws) != width:
                raise StructuralError("ragged coefficient matrix")
            packed.append(raws)
        if not packed or width == 0:
            raise StructuralError("a series needs at least the constant coefficient")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "rows", tuple(packed))

    def __setattr__(self, name, value):
        raise AttributeError("PowerSeries2 is immutable")

    @classmethod
    def zero(cls, ring: CycloRing, Dplus: int = 0, Dminus: int = 0) -> "PowerSeries2":
        return cls(ring, [[0] * (Dminus + 1) for _ in range(Dplus + 1)])

    @classmethod
    def from_series1(cls, f: PowerSeries1, variable: str = "minus") -> "PowerSeries2":
        """Embed a one-variable series as a two-variable one."""
        if variable == "minus":
            return cls(f.ring, [f.coeffs])
        if variable == "plus":
            return cls(f.ring, [(c,) for c in f.coeffs])
        raise StructuralError(f"unknown variable {variable!r}")

    @property
    def Dplus(self) -> int:
        return len(self.rows) - 1

    @property
    def Dminus(self) -> int:
        return len(self.rows[0]) - 1

    def coeff(self, i: int, j: int) -> CycloElt:
        return CycloElt(self.ring, self.rows[i][j])

    @property
    def is_zero_within_precision(self) -> bool:
        if self.ring.is_scalar:
            return not any(any(row) for row in self.rows)
        return not any(any(any(c) for c in row) for row in self.rows)

    def transpose(self) -> "PowerSeries2":
        rows = self.rows
        flipped = [tuple(rows[i][j] for i in range(len(rows)))
                   for j in range(len(rows[0]))]
        return PowerSeries2(self.ring, flipped)

    def truncate(self, Dplus: int, Dminus: int) -> "PowerSeries2":
        rows = [row[:Dminus + 1] for row in self.rows[:Dplus + 1]]
        return PowerSeries2(self.ring, rows)

    def extend(self, Dplus: int, Dminus: int) -> "PowerSeries2":
        """Zero-pad an exact polynomial to the given box."""
        z = self.ring.zero_raw
        rows = [row + (z,) * (Dminus - len(row) + 1) for row in self.rows]
        for _ in range(Dplus - len(rows) + 1):
            rows.append((z,) * (Dminus + 1))
        return PowerSeries2(self.ring, rows)

    def lift_level(self, level: int) -> "PowerSeries2":
        if level == self.ring.level:
            return self
        target = cyclo_ring(self.ring.p, self.ring.N, level)
        return PowerSeries2(target,
                            [[target.lift_from(self.ring, c) for c in row]
                             for row in self.rows])

    def reduce_precision(self, N_new: int) -> "PowerSeries2":
        if N_new == self.ring.N:
            return self
        target = cyclo_ring(self.ring.p, N_new, self.ring.level)
        rows = []
        for row in self.rows:
            rows.append([self.ring.reduce_precision_raw(c, N_new)[1] for c in row])
        return PowerSeries2(target, rows)

    def row_series(self, i: int) -> PowerSeries1:
        return PowerSeries1(self.ring, self.rows[i])

    def _pair(self, other: "PowerSeries2"):
        if not isinstance(other, PowerSeries2):
            raise StructuralError(f"expected a two-variable series, got {other!r}")
        a, b = self, other
        if (a.ring.p, a.ring.N) != (b.ring.p, b.ring.N):
            raise StructuralError(f"mismatched rings: {a.ring!r} vs {b.ring!r}")
        if a.ring.level < b.ring.level:
            a = a.lift_level(b.ring.level)
        elif b.ring.level < a.ring.level:
            b = b.lift_level(a.ring.level)
        return a, b

    def __add__(self, other):
        a, b = self._pair(other)
        Dp = min(a.Dplus, b.Dplus)
        Dm = min(a.Dminus, b.Dminus)
        ring = a.ring
        rows = [[ring.add_raw(a.rows[i][j], b.rows[i][j]) for j in range(Dm + 1)]
                for i in range(Dp + 1)]
        return PowerSeries2(ring, rows)

    def __sub__(self, other):
        a, b = self._pair(other)
        Dp = min(a.Dplus, b.Dplus)
        Dm = min(a.Dminus, b.Dminus)
        ring = a.ring
        rows = [[ring.sub_raw(a.rows[i][j], b.rows[i][j]) for j in range(Dm + 1)]
                for i in range(Dp + 1)]
        return PowerSeries2(ring, rows)

    def __mul__(self, other):
        if isinstance(other, (int, PadicInt, CycloElt)):
            raw = _as_raw(self.ring, other)
            ring = self.ring
            rows = [[ring.mul_raw(raw, c) for c in row] for row in self.rows]
            return PowerSeries2(ring, rows)
        a, b = self._pair(other)
        Dp = min(a.Dplus, b.Dplus)
        Dm = min(a.Dminus, b.Dminus)
        ring = a.ring
        rows = []
        for i in range(Dp + 1):
            row = []
            for j in range(Dm + 1):
                acc = ring.zero_raw
                for s in range(min(i, a.Dplus) + 1):
                    if i - s > b.Dplus:
                        continue
                    for u in range(min(j, a.Dminus) + 1):
                        if j - u > b.Dminus:
                            continue
                        acc = ring.add_raw(
                            acc, ring.mul_raw(a.rows[s][u], b.rows[i - s][j - u]))
                row.append(acc)
            rows.append(row)
        return PowerSeries2(ring, rows)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PowerSeries2):
            return NotImplemented
        try:
            a, b = self._pair(other)
        except StructuralError:
            return False
        return a.rows == b.rows

    def __hash__(self):
        return hash((self.ring.p, self.ring.N, self.ring.level, self.rows))

    def __repr__(self):
        return (f"PowerSeries2({self.ring!r}, Dplus={self.Dplus}, "
                f"Dminus={self.Dminus})")


def eval2(f: PowerSeries2, t_plus: CycloElt, t_minus: CycloElt) -> CycloElt:
    """Evaluate over the truncation box at a point of the open polydisc."""
    _check_open_disc(t_plus)
    _check_open_disc(t_minus)
    ring = _common_point_ring(f.ring, t_plus, t_minus)
    g = f.lift_level(ring.level)
    tp = t_plus.lift_level(ring.level).raw
    tm = t_minus.lift_level(ring.level).raw
    if ring.is_scalar:
        q = ring.q
        acc = 0
        for row in reversed(g.rows):
            inner = row[-1]
            for j in range(len(row) - 2, -1, -1):
                inner = (inner * tm + row[j]) % q
            acc = (acc * tp + inner) % q
        return CycloElt(ring, acc)
    acc = ring.zero_raw
    for row in reversed(g.rows):
        inner = row[-1]
        for j in range(len(row) - 2, -1, -1):
            inner = ring.add_raw(ring.mul_raw(inner, tm), row[j])
        acc = ring.add_raw(ring.mul_raw(acc, tp), inner)
    return CycloElt(ring, acc)


def truncation_floor2(f: PowerSeries2, t_plus: CycloElt, t_minus: CycloElt) -> Fraction:
    """Smallest possible valuation of a discarded monomial, capped at N.

    Monomials outside the box have T_plus exponent > Dplus or T_minus
    exponent > Dminus; with integral coefficients the floor is the
    smaller of (Dplus+1) v(t_plus) and (Dminus+1) v(t_minus).
    """
    N = Fraction(f.ring.N)
    vp = t_plus.rational_valuation()
    vm = t_minus.rational_valuation()
    floor_p = N if isinstance(vp, AtLeastPrecision) else (f.Dplus + 1) * vp
    floor_m = N if isinstance(vm, AtLeastPrecision) else (f.Dminus + 1) * vm
    return min(N, floor_p, floor_m)


def specialize_psi(f: PowerSeries2, psi_plus: CycloElt,
                   psi_minus: CycloElt) -> PowerSeries1:
    """Freeze the T_plus variable at a character and twist the T_minus one:

        g(T_minus) = f(psi_plus - 1,  psi_minus * (1 + T_minus) - 1).

    Both character values must be principal units (value - 1 of positive
    valuation).  The substitution is affine in T_minus, so the result is
    exact at the same truncation degree: no tail is discarded.
    """
    for name, val in (("psi_plus", psi_plus), ("psi_minus", psi_minus)):
        v = (val - 1).rational_valuation()
        if not isinstance(v, AtLeastPrecision) and v == 0:
            raise DomainError(
                f"{name} is not congruent to 1 modulo the maximal ideal")
    ring = _common_point_ring(f.ring, psi_plus, psi_minus)
    g = f.lift_level(ring.level)
    a_plus = (psi_plus.lift_level(ring.level) - 1).raw
    c = psi_minus.lift_level(ring.level).raw
    b = (psi_minus.lift_level(ring.level) - 1).raw

    # Collapse the T_plus direction first: R_j = sum_i c_ij a_plus^i.
    rows = g.rows
    if ring.is_scalar:
        q = ring.q
        collapsed = list(rows[-1])
        for i in range(len(rows) - 2, -1, -1):
            row = rows[i]
            collapsed = [(x * a_plus + row[j]) % q
                         for j, x in enumerate(collapsed)]
    else:
        collapsed = list(rows[-1])
        for i in range(len(rows) - 2, -1, -1):
            row = rows[i]
            collapsed = [ring.add_raw(ring.mul_raw(x, a_plus), row[j])
                         for j, x in enumerate(collapsed)]

    # Compose with the affine substitution X -> b + c*X (Horner).
    if ring.is_scalar:
        q = ring.q
        acc = [collapsed[-1]]
        for j in range(len(collapsed) - 2, -1, -1):
            nxt = [0] * (len(acc) + 1)
            nxt[0] = (acc[0] * b + collapsed[j]) % q
            for k in range(1, len(acc)):
                nxt[k] = (acc[k] * b + acc[k - 1] * c) % q
            nxt[len(acc)] = (acc[-1] * c) % q
            acc = nxt
    else:
        acc = [collapsed[-1]]
        for j in range(len(collapsed) - 2, -1, -1):
            nxt = [ring.zero_raw] * (len(acc) + 1)
            nxt[0] = ring.add_raw(ring.mul_raw(acc[0], b), collapsed[j])
            for k in range(1, len(acc)):
                nxt[k] = ring.add_raw(ring.mul_raw(acc[k], b),
                                      ring.mul_raw(acc[k - 1], c))
            nxt[len(acc)] = ring.mul_raw(acc[-1], c)
            acc = nxt
    acc += [ring.zero_raw] * (len(collapsed) - len(acc))
    return PowerSeries1(ring, acc)


def specialize_transposed(f: PowerSeries2, psi_minus: CycloElt,
                          psi_plus: CycloElt) -> PowerSeries1:
    """Same as specialize_psi with the roles of the variables swapped:
    returns g(T_plus) = f(psi_plus * (1 + T_plus) - 1, psi_minus - 1)."""
    return specialize_psi(f.transpose(), psi_minus, psi_plus)


def measure_of_coset(f: PowerSeries1, a: int, n: int) -> CycloElt:
    """Value of the associated measure on the coset a + p^n Z_p:

        p^(-n) * sum over p^n-th roots of unity of zeta^(-a) f(zeta - 1).

    The sum is exactly divisible by p^n; the quotient carries precision
    N - n in the level-n ring.
    """
    ring, total = _measure_numerator(f, n, a)
    return _measure_divide(ring, total, n)


def measure_table(f: PowerSeries1, n: int) -> list:
    """All coset measures at level n, indexed by a = 0..p^n - 1."""
    p, N = f.ring.p, f.ring.N
    if n == 0:
        return [f.coeff(0)]
    if n >= N:
        raise PrecisionExhausted(f"coset level {n} exceeds the precision budget {N}")
    ring = cyclo_ring(p, N, n)
    g = f.lift_level(n) if f.ring.level < n else f
    if g.ring.level != n:
        raise StructuralError("series level exceeds the requested coset level")
    evals = []
    one = CycloElt(ring, ring.one_raw)
    for t in range(p**n):
        point = CycloElt(ring, ring.zeta_raw(t)) - one
        evals.append(eval1(g, point).raw)
    # a-th measure = DFT value at -a.
    table = dft_all_roots(ring, evals)
    out = []
    for a in range(p**n):
        total = table[(-a) % p**n]
        out.append(_measure_divide(ring, total, n))
    return out


def _measure_numerator(f: PowerSeries1, n: int, a: int):
    p, N = f.ring.p, f.ring.N
    if n == 0:
        return f.ring, f.coeffs[0]
    if n >= N:
        raise PrecisionExhausted(f"coset level {n} exceeds the precision budget {N}")
    ring = cyclo_ring(p, N, n)
    g = f.lift_level(n) if f.ring.level < n else f
    if g.ring.level != n:
        raise StructuralError("series level exceeds the requested coset level")
    total = ring.zero_raw
    one = CycloElt(ring, ring.one_raw)
    for t in range(p**n):
        point = CycloElt(ring, ring.zeta_raw(t)) - one
        term = ring.mul_zeta_pow_raw(eval1(g, point).raw, (-a * t) % p**n)
        total = ring.add_raw(total, term)
    return ring, total

def _measure_divide(ring: CycloRing, total, n: int) -> CycloElt:
    if n == 0:
        return CycloElt(ring, total)
    raw = total
    out_ring = ring
    for _ in range(n):
        try:
            out_ring, raw = out_ring.divide_by_p_raw(raw)
        except DomainError as exc:
            # Orthogonality makes the sum exactly divisible by p^n; a
            # failure here means the evaluation route is broken.
            raise InconsistencyError(
                "coset sum is not divisible by the expected p power") from exc
    return CycloElt(out_ring, raw)
