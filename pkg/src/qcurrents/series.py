"""Exact truncated series arithmetic.

Two layers:

* ``HSeries`` -- elements of Q[[h]]/h^K with exact rational coefficients,
  where ``h`` is the deformation variable.  All identities in this package
  are asserted coefficient-by-coefficient in this ring; there is no floating
  point anywhere.

* ``KernelFn`` -- windowed multivariate Laurent objects over ``HSeries``:
  finitely many exponent tuples inside a per-variable window, each carrying
  an ``HSeries`` coefficient.  A ``Region`` (a total order on the variables,
  largest first) records the direction in which rational kernels such as
  ``1/(z-w)`` were expanded.  Terms pushed outside the window by an
  operation are discarded and the result is marked ``lossy``; verification
  suites build on widened windows and assert on an interior box so that
  every asserted coefficient is exact.

``HLaurent`` extends ``HSeries`` with an integer h-valuation offset; it is
the field-of-fractions element used by the Gram-inversion code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

Q = Fraction
Q0 = Fraction(0)
Q1 = Fraction(1)


def _as_q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


class HSeries:
    """Truncated power series sum_k c_k h^k, c_k exact rationals, k < K."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, K=None):
        cs = tuple(_as_q(c) for c in coeffs)
        if K is not None:
            if K <= 0:
                raise ValueError("truncation order must be positive")
            cs = cs[:K] + (Q0,) * max(0, K - len(cs))
        if not cs:
            raise ValueError("empty coefficient list")
        self.coeffs = cs

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(c, K: int) -> "HSeries":
        return HSeries((_as_q(c),), K)

    @staticmethod
    def zero(K: int) -> "HSeries":
        return HSeries((Q0,), K)

    @staticmethod
    def one(K: int) -> "HSeries":
        return HSeries((Q1,), K)

    @staticmethod
    def hbar(K: int, power: int = 1, coeff=Q1) -> "HSeries":
        if power >= K:
            return HSeries.zero(K)
        cs = [Q0] * K
        cs[power] = _as_q(coeff)
        return HSeries(cs)

    # -- basics -------------------------------------------------------

    @property
    def K(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self):
        """Smallest k with c_k != 0, or None for the zero series."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def truncate(self, K: int) -> "HSeries":
        return HSeries(self.coeffs, K)

    def __eq__(self, other):
        if not isinstance(other, HSeries):
            return NotImplemented
        K = min(self.K, other.K)
        return self.coeffs[:K] == other.coeffs[:K]

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "HSeries(%s)" % (list(map(str, self.coeffs)),)

    # -- ring operations (results truncated to the min of the inputs) --

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HSeries.const(other, self.K)
        K = min(self.K, other.K)
        return HSeries([self.coeffs[k] + other.coeffs[k] for k in range(K)])

    __radd__ = __add__

    def __neg__(self):
        return HSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HSeries.const(other, self.K)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_q(other)
            return HSeries([c * a for a in self.coeffs])
        K = min(self.K, other.K)
        out = [Q0] * K
        for i, a in enumerate(self.coeffs[:K]):
            if not a:
                continue
            for j in range(K - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return HSeries(out)

    __rmul__ = __mul__

    def inv(self) -> "HSeries":
        a0 = self.coeffs[0]
        if not a0:
            raise ValueError("leading coefficient is zero, not invertible")
        K = self.K
        out = [Q0] * K
        out[0] = 1 / a0
        for n in range(1, K):
            s = Q0
            for k in range(1, n + 1):
                s += self.coeffs[k] * out[n - k]
            out[n] = -s / a0
        return HSeries(out)

    def exp(self) -> "HSeries":
        """exp of a series with zero constant term (n e_n = sum k a_k e_{n-k})."""
        if self.coeffs[0]:
            raise ValueError("exp requires zero constant term")
        K = self.K
        out = [Q0] * K
        out[0] = Q1
        for n in range(1, K):
            s = Q0
            for k in range(1, n + 1):
                if self.coeffs[k]:
                    s += k * self.coeffs[k] * out[n - k]
            out[n] = s / n
        return HSeries(out)

    def log(self) -> "HSeries":
        """log of a series with constant term 1."""
        if self.coeffs[0] != Q1:
            raise ValueError("log requires constant term 1")
        K = self.K
        out = [Q0] * K
        for n in range(1, K):
            s = self.coeffs[n]
            for m in range(1, n):
                s -= Fraction(n - m, n) * self.coeffs[m] * out[n - m]
            out[n] = s
        return HSeries(out)

    def shift(self, k: int) -> "HSeries":
        """Multiply by h^k (k may be negative; dropping nonzero terms raises)."""
        K = self.K
        if k >= 0:
            return HSeries((Q0,) * k + self.coeffs, K)
        if any(self.coeffs[:-k]):
            raise ValueError("negative shift would drop nonzero coefficients")
        return HSeries(self.coeffs[-k:] + (Q0,) * (-k), K)

    def subst_scale(self, c) -> "HSeries":
        """h -> c*h for an exact rational c."""
        c = _as_q(c)
        return HSeries([self.coeffs[k] * c**k for k in range(self.K)])

    def to_json(self):
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @staticmethod
    def from_json(data) -> "HSeries":
        return HSeries([Fraction(s) for s in data])


def hs_arith(a: HSeries, b, op: str) -> HSeries:
    """Dispatch HSeries arithmetic by operation name."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    if op == "exp":
        return a.exp()
    if op == "log":
        return a.log()
    raise ValueError(f"unknown op {op!r}")


class HLaurent:
    """h^offset * HSeries: exact truncated Laurent series in h.

    Used where Gram inversion produces negative h-valuations.  ``known``
    orders are offset .. offset+K-1.
    """

    __slots__ = ("offset", "hs")

    def __init__(self, offset: int, hs: HSeries):
        # normalize: fold exact leading zeros into the offset, keeping the
        # number of known orders fixed is not possible, so keep K as given.
        self.offset = offset
        self.hs = hs

    @staticmethod
    def from_hseries(hs: HSeries) -> "HLaurent":
        return HLaurent(0, hs)

    @property
    def K(self):
        return self.hs.K

    def is_zero(self):
        return self.hs.is_zero()

    def valuation(self):
        v = self.hs.valuation()
        return None if v is None else self.offset + v

    def normalized(self) -> "HLaurent":
        v = self.hs.valuation()
        if v is None or v == 0:
            return self
        return HLaurent(self.offset + v, self.hs.shift(-v))

    def _aligned(self, other):
        off = min(self.offset, other.offset)
        # absolute precision = min of the two known upper bounds
        top = min(self.offset + self.K, other.offset + other.K)
        K = top - off
        if K <= 0:
            raise ValueError("no overlapping known orders")
        a = HSeries((Q0,) * (self.offset - off) + self.hs.coeffs, K)
        b = HSeries((Q0,) * (other.offset - off) + other.hs.coeffs, K)
        return off, a, b

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HLaurent(0, HSeries.const(other, self.K))
        off, a, b = self._aligned(other)
        return HLaurent(off, a + b)

    def __neg__(self):
        return HLaurent(self.offset, -self.hs)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = HLaurent(0, HSeries.const(other, self.K))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return HLaurent(self.offset, self.hs * other)
        return HLaurent(self.offset + other.offset, self.hs * other.hs)

    __rmul__ = __mul__

    def inv(self) -> "HLaurent":
        n = self.normalized()
        return HLaurent(-n.offset, n.hs.inv())

    def __truediv__(self, other):
        return self * other.inv()

    def __eq__(self, other):
        if not isinstance(other, HLaurent):
            return NotImplemented
        d = self - other
        return d.is_zero()

    def __repr__(self):
        return f"HLaurent(h^{self.offset} * {self.hs!r})"


# ---------------------------------------------------------------------------
# windowed multivariate Laurent objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Window:
    """Per-variable exponent bounds (lo, hi), aligned with the variable list."""

    bounds: tuple

    def __post_init__(self):
        for lo, hi in self.bounds:
            if lo > hi:
                raise ValueError("window must have lo <= hi")

    @staticmethod
    def cube(lo: int, hi: int, nvars: int) -> "Window":
        return Window(tuple((lo, hi) for _ in range(nvars)))

    def contains(self, exps) -> bool:
        return all(lo <= e <= hi for e, (lo, hi) in zip(exps, self.bounds))

    def intersect(self, other: "Window") -> "Window":
        return Window(
            tuple(
                (max(a, c), min(b, d))
                for (a, b), (c, d) in zip(self.bounds, other.bounds)
            )
        )

    def drop(self, index: int) -> "Window":
        return Window(self.bounds[:index] + self.bounds[index + 1 :])


@dataclass(frozen=True)
class Region:
    """Total order on variables, largest first: order[0] >> order[1] >> ...

    Rational kernels like 1/(x-y) are expanded in ascending powers of the
    smaller variable.
    """

    order: tuple

    def index(self, name: str) -> int:
        return self.order.index(name)

    def reversed(self) -> "Region":
        return Region(tuple(reversed(self.order)))

    def drop(self, name: str) -> "Region":
        return Region(tuple(v for v in self.order if v != name))


class KernelFn:
    """Windowed Laurent object: {exponent tuple -> HSeries} over a region.

    Treated as an immutable value: every operation returns a new object,
    so instances are safe to share across parallel checks.
    """

    __slots__ = ("region", "terms", "window", "K", "lossy")

    def __init__(self, region: Region, terms: dict, window: Window, K: int,
                 lossy: bool = False):
        if len(window.bounds) != len(region.order):
            raise ValueError("window/variable arity mismatch")
        self.region = region
        self.window = window
        self.K = K
        self.lossy = lossy
        clean = {}
        for e, hs in terms.items():
            if not window.contains(e):
                raise ValueError(f"term {e} outside window")
            if not hs.is_zero():
                clean[e] = hs.truncate(K)
        self.terms = clean

    # -- constructors --------------------------------------------------

    @property
    def variables(self):
        return self.region.order

    @staticmethod
    def zero(region: Region, window: Window, K: int) -> "KernelFn":
        return KernelFn(region, {}, window, K)

    @staticmethod
    def const(c, region: Region, window: Window, K: int) -> "KernelFn":
        z = (0,) * len(region.order)
        return KernelFn(region, {z: HSeries.const(c, K)}, window, K)

    @staticmethod
    def monomial(exps, coeff, region: Region, window: Window, K: int) -> "KernelFn":
        hs = coeff if isinstance(coeff, HSeries) else HSeries.const(coeff, K)
        return KernelFn(region, {tuple(exps): hs}, window, K)

    def copy_with(self, terms=None, lossy=None, region=None, window=None):
        return KernelFn(
            region if region is not None else self.region,
            terms if terms is not None else self.terms,
            window if window is not None else self.window,
            self.K,
            self.lossy if lossy is None else lossy,
        )

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, KernelFn):
            return NotImplemented
        if self.region != other.region:
            return False
        return (self - other).is_zero()

    def __repr__(self):
        n = len(self.terms)
        return f"KernelFn({'/'.join(self.variables)}, {n} terms, K={self.K})"

    def hbar_valuation(self):
        vals = [hs.valuation() for hs in self.terms.values()]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None

    def coefficient(self, exps) -> HSeries:
        return self.terms.get(tuple(exps), HSeries.zero(self.K))

    # -- arithmetic -------------------------------------------------------

    def _check_compatible(self, other: "KernelFn"):
        if self.variables != other.variables:
            raise ValueError("variable-set mismatch")
        if self.region != other.region:
            raise ValueError("region mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = KernelFn.const(other, self.region, self.window, self.K)
        self._check_compatible(other)
        window = self.window.intersect(other.window)
        K = min(self.K, other.K)
        out = {}
        lossy = self.lossy or other.lossy
        for src in (self.terms, other.terms):
            for e, hs in src.items():
                if not window.contains(e):
                    lossy = True
                    continue
                cur = out.get(e)
                out[e] = hs.truncate(K) if cur is None else cur + hs
        return KernelFn(self.region, out, window, K, lossy)

    def __neg__(self):
        return self.copy_with(terms={e: -hs for e, hs in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = KernelFn.const(other, self.region, self.window, self.K)
        return self + (-other)

    def scalar_mul(self, c) -> "KernelFn":
        if isinstance(c, HSeries):
            return self.copy_with(terms={e: hs * c for e, hs in self.terms.items()})
        c = _as_q(c)
        return self.copy_with(terms={e: hs * c for e, hs in self.terms.items()})

    def mul(self, other: "KernelFn", window: Window | None = None) -> "KernelFn":
        """Product, filtered to the target window; escapes set the lossy flag."""
        self._check_compatible(other)
        if window is None:
            window = self.window.intersect(other.window)
        K = min(self.K, other.K)
        flat_b = []
        for e, hs in other.terms.items():
            for k, c in enumerate(hs.coeffs[:K]):
                if c:
                    flat_b.append((e, k, c))
        acc: dict = {}
        lossy = self.lossy or other.lossy
        bounds = window.bounds
        for ea, hsa in self.terms.items():
            for ka, ca in enumerate(hsa.coeffs[:K]):
                if not ca:
                    continue
                kmax = K - ka
                for eb, kb, cb in flat_b:
                    if kb >= kmax:
                        continue
                    e = tuple(x + y for x, y in zip(ea, eb))
                    ok = True
                    for x, (lo, hi) in zip(e, bounds):
                        if x < lo or x > hi:
                            ok = False
                            break
                    if not ok:
                        lossy = True
                        continue
                    row = acc.get(e)
                    if row is None:
                        row = [Q0] * K
                        acc[e] = row
                    row[ka + kb] += ca * cb
        terms = {e: HSeries(row) for e, row in acc.items()}
        return KernelFn(self.region, terms, window, K, lossy)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, HSeries)):
            return self.scalar_mul(other)
        return self.mul(other)

    __rmul__ = __mul__

    def pow(self, n: int, window: Window | None = None) -> "KernelFn":
        if n < 0:
            raise ValueError("negative power")
        out = KernelFn.const(1, self.region, window or self.window, self.K)
        for _ in range(n):
            out = out.mul(self, window or self.window)
        return out

    def exp(self, window: Window | None = None) -> "KernelFn":
        """exp of a kernel with h-valuation >= 1 (finite sum at truncation)."""
        v = self.hbar_valuation()
        if self.terms and (v is None or v < 1):
            raise ValueError("exp requires h-valuation >= 1")
        window = window or self.window
        out = KernelFn.const(1, self.region, window, self.K)
        power = KernelFn.const(1, self.region, window, self.K)
        for j in range(1, self.K):
            power = power.mul(self, window)
            if power.is_zero():
                break
            out = out + power.scalar_mul(Fraction(1, factorial(j)))
        return out

    def log1p(self, window: Window | None = None) -> "KernelFn":
        """log(1 + self) for a kernel with h-valuation >= 1."""
        v = self.hbar_valuation()
        if self.terms and (v is None or v < 1):
            raise ValueError("log1p requires h-valuation >= 1")
        window = window or self.window
        out = KernelFn.zero(self.region, window, self.K)
        power = KernelFn.const(1, self.region, window, self.K)
        sign = 1
        for j in range(1, self.K):
            power = power.mul(self, window)
            if power.is_zero():
                break
            out = out + power.scalar_mul(Fraction(sign, j))
            sign = -sign
        return out

    def inv(self, window: Window | None = None) -> "KernelFn":
        """Inverse of u*1 + N with u a unit HSeries and N of h-valuation >= 1."""
        window = window or self.window
        zero_exp = (0,) * len(self.variables)
        u = self.terms.get(zero_exp)
        if u is None or u.valuation() != 0:
            raise ValueError("constant term not a unit")
        n = self - KernelFn.monomial(zero_exp, u, self.region, self.window, self.K)
        nv = n.hbar_valuation()
        if n.terms and (nv is None or nv < 1):
            raise ValueError("non-constant part must have h-valuation >= 1")
        uinv = u.inv()
        out = KernelFn.const(1, self.region, window, self.K)
        power = KernelFn.const(1, self.region, window, self.K)
        m = n.scalar_mul(uinv)
        sign = -1
        for _ in range(1, self.K):
            power = power.mul(m, window)
            if power.is_zero():
                break
            out = out + power.scalar_mul(Fraction(sign))
            sign = -sign
        return out.scalar_mul(uinv)

    def hbar_scale(self, c) -> "KernelFn":
        """h -> c*h on every coefficient."""
        return self.copy_with(
            terms={e: hs.subst_scale(c) for e, hs in self.terms.items()}
        )

    def divide_hbar(self, k: int) -> "KernelFn":
        return self.copy_with(terms={e: hs.shift(-k) for e, hs in self.terms.items()})

    # -- calculus ----------------------------------------------------------

    def diff(self, var: str) -> "KernelFn":
        i = self.region.index(var)
        out = {}
        lossy = self.lossy
        lo, hi = self.window.bounds[i]
        for e, hs in self.terms.items():
            n = e[i]
            if n == 0:
                continue
            e2 = e[:i] + (n - 1,) + e[i + 1 :]
            if not (lo <= n - 1 <= hi):
                lossy = True
                continue
            cur = out.get(e2)
            add = hs * n
            out[e2] = add if cur is None else cur + add
        return self.copy_with(terms=out, lossy=lossy)

    def diff_op(self, var: str, series) -> "KernelFn":
        """Apply sum_k series[k] * d^k/d(var)^k; series[k] are HSeries."""
        out = KernelFn.zero(self.region, self.window, self.K)
        cur = self
        for k, s in enumerate(series):
            if k > 0:
                cur = cur.diff(var)
                if not cur.terms:
                    break
            if s is None or s.is_zero():
                continue
            out = out + cur.scalar_mul(s)
        return out

    def shift_subst(self, var: str, c) -> "KernelFn":
        """var -> var + c*h via the finite Taylor sum (c exact rational)."""
        c = _as_q(c)
        if c == 0:
            return self
        out = self
        cur = self
        for k in range(1, self.K):
            cur = cur.diff(var)
            if not cur.terms:
                break
            out = out + cur.scalar_mul(HSeries.hbar(self.K, k, c**k / factorial(k)))
        return out

    def rename(self, mapping: dict, region: Region | None = None,
               window: Window | None = None) -> "KernelFn":
        """Injective variable renaming; the region order must be supplied when
        the name order changes meaning."""
        newvars = tuple(mapping.get(v, v) for v in self.variables)
        if len(set(newvars)) != len(newvars):
            raise ValueError("rename must stay injective; use substitute_var to merge")
        region = region or Region(newvars)
        if set(region.order) != set(newvars):
            raise ValueError("region does not cover renamed variables")
        perm = [newvars.index(v) for v in region.order]
        window = window or Window(tuple(self.window.bounds[p] for p in perm))
        terms = {tuple(e[p] for p in perm): hs for e, hs in self.terms.items()}
        return KernelFn(region, terms, window, self.K, self.lossy)

    def substitute_var(self, var_from: str, var_to: str, shift=0,
                       region: Region | None = None) -> "KernelFn":
        """Set var_from = var_to + shift*h, merging exponents onto var_to."""
        f = self.shift_subst(var_from, shift) if shift else self
        i = f.region.index(var_from)
        if var_to not in f.variables:
            return f.rename({var_from: var_to}, region=region)
        j = f.region.index(var_to)
        region2 = region or f.region.drop(var_from)
        window2 = f.window.drop(i)
        jj = region2.index(var_to)
        lo, hi = window2.bounds[jj]
        out = {}
        lossy = f.lossy
        for e, hs in f.terms.items():
            merged = e[j] + e[i]
            rest = list(e)
            rest[j] = merged
            del rest[i]
            e2 = tuple(rest)
            if not (lo <= merged <= hi):
                lossy = True
                continue
            cur = out.get(e2)
            out[e2] = hs if cur is None else cur + hs
        return KernelFn(region2, out, window2, f.K, lossy)

    def swap21(self) -> "KernelFn":
        """Exchange the two arguments: f(z,w) -> f(w,z).

        The expansion region reverses with the arguments (the returned
        region order is flipped), which is the flag for caller-side
        prolongation; for a pure Laurent polynomial use
        ``transpose_in_region`` instead, no re-expansion is needed there.
        """
        if len(self.variables) != 2:
            raise ValueError("swap21 needs exactly two variables")
        a, b = self.variables
        # storage follows the region order, so keeping the tuples while
        # reversing the order realizes the argument swap
        return KernelFn(Region((b, a)), dict(self.terms), self.window, self.K,
                        self.lossy)

    def transpose_in_region(self) -> "KernelFn":
        """Argument swap for a two-variable Laurent polynomial, same region."""
        if len(self.variables) != 2:
            raise ValueError("transpose needs exactly two variables")
        terms = {(e[1], e[0]): hs for e, hs in self.terms.items()}
        w = Window((self.window.bounds[1], self.window.bounds[0]))
        return KernelFn(self.region, terms, w, self.K, self.lossy)

    def restrict(self, window: Window, clear_loss: bool = False) -> "KernelFn":
        terms = {e: hs for e, hs in self.terms.items() if window.contains(e)}
        lossy = False if clear_loss else self.lossy or (len(terms) != len(self.terms))
        return KernelFn(self.region, terms, window, self.K, lossy)

    def embed(self, region: Region, window: Window) -> "KernelFn":
        """View in a larger variable set (new variables get exponent 0)."""
        pos = {v: i for i, v in enumerate(region.order)}
        n = len(region.order)
        terms = {}
        for e, hs in self.terms.items():
            e2 = [0] * n
            for v, x in zip(self.variables, e):
                e2[pos[v]] = x
            terms[tuple(e2)] = hs
        return KernelFn(region, terms, window, self.K, self.lossy)

    # -- serialization -------------------------------------------------

    def to_json(self):
        items = sorted(self.terms.items())
        return {
            "variables": list(self.variables),
            "window": [list(b) for b in self.window.bounds],
            "K": self.K,
            "lossy": self.lossy,
            "terms": [
                {"exponents": list(e), "hbar_coeffs": hs.to_json()}
                for e, hs in items
            ],
        }

    @staticmethod
    def from_json(data) -> "KernelFn":
        region = Region(tuple(data["variables"]))
        window = Window(tuple(tuple(b) for b in data["window"]))
        terms = {
            tuple(t["exponents"]): HSeries.from_json(t["hbar_coeffs"])
            for t in data["terms"]
        }
        return KernelFn(region, terms, window, int(data["K"]), bool(data["lossy"]))


def kf_arith(a: KernelFn, b, op: str, window: Window | None = None) -> KernelFn:
    """Dispatch KernelFn arithmetic by operation name."""
    if op == "add":
        return a + b
    if op == "mul":
        return a.mul(b, window)
    if op == "scalar_mul":
        return a.scalar_mul(b)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# expansion helpers
# ---------------------------------------------------------------------------


def expand_pole(region: Region, large: str, small: str, window: Window,
                K: int) -> KernelFn:
    """Geometric expansion of 1/(x_large - x_small), ascending in the small
    variable: sum_{i>=0} large^{-1-i} small^i, clipped to the window."""
    il = region.index(large)
    is_ = region.index(small)
    if il > is_:
        raise ValueError(f"{large} is not larger than {small} in this region")
    lo_l, _ = window.bounds[il]
    _, hi_s = window.bounds[is_]
    terms = {}
    n = len(region.order)
    one = HSeries.one(K)
    for i in range(0, hi_s + 1):
        if -1 - i < lo_l:
            break
        e = [0] * n
        e[il] = -1 - i
        e[is_] = i
        terms[tuple(e)] = one
    return KernelFn(region, terms, window, K)


def expand_shifted_pole_inv(region: Region, large: str, small: str, a,
                            window: Window, K: int) -> KernelFn:
    """Expansion of 1/(x_large - x_small - a*h) in the region small << large:
    E * sum_m (a h E)^m with E = expand_pole."""
    a = _as_q(a)
    E = expand_pole(region, large, small, window, K)
    if a == 0:
        return E
    out = E
    power = E
    ah = HSeries.hbar(K, 1, a)
    for _ in range(1, K):
        power = power.mul(E, window).scalar_mul(ah)
        if power.is_zero():
            break
        out = out + power
    return out


def expand_linear_ratio(region: Region, large: str, small: str, a, b,
                        window: Window, K: int) -> KernelFn:
    """Expansion of (x - y + a*h)/(x - y + b*h) for x = large >> y = small."""
    a = _as_q(a)
    b = _as_q(b)
    inv = expand_shifted_pole_inv(region, large, small, -b, window, K)
    one = KernelFn.const(1, region, window, K)
    return one + inv.scalar_mul(HSeries.hbar(K, 1, a - b))


def linear_factor(region: Region, x: str, y: str, c, window: Window,
                  K: int) -> KernelFn:
    """The Laurent polynomial x - y + c*h."""
    n = len(region.order)
    ix, iy = region.index(x), region.index(y)
    ex = [0] * n
    ex[ix] = 1
    ey = [0] * n
    ey[iy] = 1
    terms = {tuple(ex): HSeries.one(K), tuple(ey): HSeries.const(-1, K)}
    c = _as_q(c)
    if c:
        terms[(0,) * n] = HSeries.hbar(K, 1, c)
    return KernelFn(region, terms, window, K)


def divide_linear(f: KernelFn, x: str, y: str) -> KernelFn:
    """Exact division by (x - y); raises if a nonzero remainder appears.

    Works down the x-exponents: f = (x-y) g forces
    g[p-1, q] = f[p, q] + g[p, q-1]; the induced g at one step below the
    lowest x-exponent must vanish identically (that is the remainder).
    """
    ix = f.region.index(x)
    iy = f.region.index(y)
    if not f.terms:
        return f
    pmax = max(e[ix] for e in f.terms)
    pmin = min(e[ix] for e in f.terms)
    # bucket by x-exponent
    by_p: dict = {}
    for e, hs in f.terms.items():
        rest = e[:ix] + e[ix + 1 :]  # note: y-exponent lives inside rest
        by_p.setdefault(e[ix], {})[rest] = hs
    iy_rest = iy if iy < ix else iy - 1
    g_rows: dict = {}
    prev: dict = {}
    for p in range(pmax, pmin - 2, -1):
        row: dict = {}
        for rest, hs in by_p.get(p, {}).items():
            row[rest] = row.get(rest, HSeries.zero(f.K)) + hs
        for rest, hs in prev.items():
            rest2 = list(rest)
            rest2[iy_rest] += 1
            rest2 = tuple(rest2)
            row[rest2] = row.get(rest2, HSeries.zero(f.K)) + hs
        row = {r: h for r, h in row.items() if not h.is_zero()}
        if p == pmin - 1:
            if row:
                raise ValueError("not divisible: nonzero remainder")
            break
        g_rows[p - 1] = row
        prev = row
    terms = {}
    for p, row in g_rows.items():
        for rest, hs in row.items():
            e = rest[:ix] + (p,) + rest[ix:]
            terms[e] = hs
    # quotient exponents along x sit one below f's; widen that bound by one
    bnds = list(f.window.bounds)
    lo, hi = bnds[ix]
    bnds[ix] = (lo - 1, hi)
    return KernelFn(f.region, terms, Window(tuple(bnds)), f.K, f.lossy)


def dump_json(obj) -> str:
    """Deterministic JSON for reports."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
