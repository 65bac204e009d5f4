"""Sparse truncated polynomials in paired variables ``(z, zbar)`` or ``(z, w)``.

A :class:`ConjPolynomial` in ``n`` variables is a finite sum of
``c * z**mu * zbar**nu`` with Gaussian-rational ``c``.  The same container
holds complexified polynomials (``kind="w"``, the second block read as
independent variables ``w``) and blow-up chart polynomials.

Monomials are packed into a single integer key: ``2n`` exponent fields of
``FIELD_BITS`` bits, ``z1`` most significant and ``w_n`` least, with the
total degree in the field above them.  Integer order on keys is therefore
graded lexicographic order with the z-block before the w-block, and adding
two keys multiplies the monomials.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .. import kernels
from .numbers import Q, GaussianRational, rational_str, to_rational

FIELD_BITS = 8
MAX_DEGREE = (1 << FIELD_BITS) - 1
KINDS = ("zbar", "w")


class Multidegree(NamedTuple):
    """Exponents of ``z**mu * zbar**nu`` (or ``z**mu * w**nu``)."""

    mu: tuple
    nu: tuple

    @property
    def total(self) -> int:
        return sum(self.mu) + sum(self.nu)

    @property
    def bidegree(self) -> tuple:
        return (sum(self.mu), sum(self.nu))

    def swapped(self) -> Multidegree:
        return Multidegree(self.nu, self.mu)


class Codec:
    """Packing of ``nslots`` exponents into one integer key."""

    __slots__ = ("nslots", "shifts", "deg_shift", "mask", "units")

    def __init__(self, nslots: int):
        self.nslots = nslots
        self.shifts = tuple(FIELD_BITS * (nslots - 1 - k) for k in range(nslots))
        self.deg_shift = FIELD_BITS * nslots
        self.mask = (1 << FIELD_BITS) - 1
        self.units = tuple((1 << self.deg_shift) | (1 << s) for s in self.shifts)

    def encode(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nslots:
            raise ValueError(f"expected {self.nslots} exponents, got {len(exps)}")
        total = 0
        key = 0
        for e, s in zip(exps, self.shifts):
            if e < 0:
                raise ValueError("exponents must be non-negative")
            total += e
            key |= e << s
        if total > MAX_DEGREE:
            raise OverflowError(f"total degree {total} exceeds {MAX_DEGREE}")
        return key | (total << self.deg_shift)

    def decode(self, key: int) -> tuple:
        m = self.mask
        return tuple((key >> s) & m for s in self.shifts)

    def degree(self, key: int) -> int:
        return key >> self.deg_shift

    def limit(self, degree: int | None):
        """Smallest key of total degree ``degree + 1`` (None: no truncation)."""
        return None if degree is None else (degree + 1) << self.deg_shift

    def divides(self, small: int, big: int) -> bool:
        m = self.mask
        return all((small >> s) & m <= (big >> s) & m for s in self.shifts)


@lru_cache(maxsize=None)
def codec(nslots: int) -> Codec:
    return Codec(nslots)


def _min_degree(*degrees):
    known = [d for d in degrees if d is not None]
    return min(known) if known else None


def _scalar_pair(value) -> tuple | None:
    if isinstance(value, GaussianRational):
        return value.pair
    if isinstance(value, (int, Fraction)) or isinstance(value, Q):
        return (to_rational(value), Q(0))
    return None


class ConjPolynomial:
    """Immutable sparse polynomial in ``z_1..z_n`` and ``zbar_1..zbar_n`` (or ``w``).

    ``degree`` is the truncation degree N: terms above it are discarded by
    every operation, so results are exact modulo degree ``N + 1``.  ``None``
    means an exact (untruncated) polynomial.
    """

    __slots__ = ("nvars", "degree", "kind", "_terms", "_items")

    def __init__(
        self,
        nvars: int,
        terms: Mapping | None = None,
        degree: int | None = None,
        kind: str = "zbar",
    ):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if degree is not None and not 0 <= degree <= MAX_DEGREE:
            raise ValueError(f"truncation degree must lie in [0, {MAX_DEGREE}]")
        c = codec(2 * nvars)
        packed = {}
        for md, value in (terms or {}).items():
            mu, nu = md
            if len(mu) != nvars or len(nu) != nvars:
                raise ValueError("multidegree length does not match nvars")
            key = c.encode(tuple(mu) + tuple(nu))
            if degree is not None and c.degree(key) > degree:
                continue
            g = GaussianRational.coerce(value)
            if key in packed:
                re, im = packed[key]
                g = g + GaussianRational(re, im)
            if g:
                packed[key] = g.pair
            else:
                packed.pop(key, None)
        self._set(nvars, packed, degree, kind)

    def _set(self, nvars, packed, degree, kind):
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "_terms", packed)
        object.__setattr__(self, "_items", None)

    def __setattr__(self, name, value):
        raise AttributeError("ConjPolynomial is immutable")

    @classmethod
    def _raw(cls, nvars, packed, degree=None, kind="zbar") -> ConjPolynomial:
        """Wrap an already canonical ``{key: (re, im)}`` map (no zeros, truncated)."""
        obj = cls.__new__(cls)
        obj._set(nvars, packed, degree, kind)
        return obj

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int, degree=None, kind="zbar") -> ConjPolynomial:
        return cls._raw(nvars, {}, degree, kind)

    @classmethod
    def constant(cls, nvars: int, value, degree=None, kind="zbar") -> ConjPolynomial:
        return cls(nvars, {((0,) * nvars, (0,) * nvars): value}, degree, kind)

    @classmethod
    def one(cls, nvars: int, degree=None, kind="zbar") -> ConjPolynomial:
        return cls.constant(nvars, 1, degree, kind)

    @classmethod
    def slot(cls, nvars: int, index: int, degree=None, kind="zbar") -> ConjPolynomial:
        """The variable in slot ``index`` (0..n-1 holomorphic, n..2n-1 conjugate/w)."""
        exps = [0] * (2 * nvars)
        exps[index] = 1
        return cls(nvars, {(tuple(exps[:nvars]), tuple(exps[nvars:])): 1}, degree, kind)

    @classmethod
    def z(cls, nvars: int, i: int, degree=None, kind="zbar") -> ConjPolynomial:
        """``z_i`` with 1-based ``i``."""
        return cls.slot(nvars, i - 1, degree, kind)

    @classmethod
    def zbar(cls, nvars: int, i: int, degree=None, kind="zbar") -> ConjPolynomial:
        """``conj(z_i)`` (or ``w_i`` for kind ``"w"``) with 1-based ``i``."""
        return cls.slot(nvars, nvars + i - 1, degree, kind)

    w = zbar

    def _like(self, packed, degree="same", kind=None) -> ConjPolynomial:
        return ConjPolynomial._raw(
            self.nvars, packed, self.degree if degree == "same" else degree, kind or self.kind
        )

    # -- inspection -----------------------------------------------------------

    @property
    def codec(self) -> Codec:
        return codec(2 * self.nvars)

    def term_list(self) -> list:
        """Sorted ``(key, re, im)`` triples, the kernel representation."""
        if self._items is None:
            object.__setattr__(
                self, "_items", [(k, v[0], v[1]) for k, v in sorted(self._terms.items())]
            )
        return self._items

    def items(self) -> Iterator[tuple]:
        """``(Multidegree, GaussianRational)`` pairs in ascending grlex order."""
        c = self.codec
        n = self.nvars
        for key, re, im in self.term_list():
            exps = c.decode(key)
            yield Multidegree(exps[:n], exps[n:]), GaussianRational(re, im)

    def coefficient(self, mu: Sequence[int], nu: Sequence[int] | None = None) -> GaussianRational:
        nu = (0,) * self.nvars if nu is None else nu
        key = self.codec.encode(tuple(mu) + tuple(nu))
        pair = self._terms.get(key)
        return GaussianRational(*pair) if pair else GaussianRational(0)

    def constant_term(self) -> GaussianRational:
        return self.coefficient((0,) * self.nvars, (0,) * self.nvars)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def max_degree(self) -> int:
        """Highest total degree present (-1 for the zero polynomial)."""
        return self.codec.degree(max(self._terms)) if self._terms else -1

    def order(self) -> int | None:
        """Lowest total degree present (None for zero)."""
        return self.codec.degree(min(self._terms)) if self._terms else None

    def is_holomorphic(self) -> bool:
        n = self.nvars
        return all(not any(e[n:]) for e in map(self.codec.decode, self._terms))

    def is_real(self) -> bool:
        return self.conj() == self

    def variables_used(self) -> set:
        """Slot indices (0..2n-1) that occur with positive exponent."""
        used = set()
        for key in self._terms:
            used.update(i for i, e in enumerate(self.codec.decode(key)) if e)
        return used

    def __eq__(self, other) -> bool:
        if isinstance(other, ConjPolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        pair = _scalar_pair(other)
        if pair is None:
            return NotImplemented
        return self == ConjPolynomial.constant(self.nvars, GaussianRational(*pair))

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> ConjPolynomial | None:
        if isinstance(other, ConjPolynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        pair = _scalar_pair(other)
        if pair is None:
            return None
        return ConjPolynomial.constant(self.nvars, GaussianRational(*pair), self.degree, self.kind)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        degree = _min_degree(self.degree, other.degree)
        limit = self.codec.limit(degree)
        out = {}
        for src in (self._terms, other._terms):
            for k, (re, im) in src.items():
                if limit is not None and k >= limit:
                    continue
                old = out.get(k)
                if old is not None:
                    re, im = old[0] + re, old[1] + im
                    if not re and not im:
                        del out[k]
                        continue
                out[k] = (re, im)
        return self._like(out, degree)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: (-re, -im) for k, (re, im) in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, value) -> ConjPolynomial:
        g = GaussianRational.coerce(value)
        if not g:
            return self._like({})
        a, b = g.re, g.im
        out = {}
        for k, (re, im) in self._terms.items():
            out[k] = (re * a - im * b, re * b + im * a)
        return self._like(out)

    def __mul__(self, other):
        if isinstance(other, ConjPolynomial):
            return self.mul(other)
        if _scalar_pair(other) is None:
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def mul(self, other: ConjPolynomial, degree: int | None = None) -> ConjPolynomial:
        """Product truncated at ``min(self.degree, other.degree, degree)``."""
        other = self._coerce(other)
        degree = _min_degree(self.degree, other.degree, degree)
        if not self._terms or not other._terms:
            return self._like({}, degree)
        if degree is None and self.max_degree() + other.max_degree() > MAX_DEGREE:
            raise OverflowError("product degree exceeds the packed exponent range")
        a, b = self.term_list(), other.term_list()
        if len(a) > len(b):
            a, b = b, a
        packed = kernels.mul_terms(a, b, self.codec.limit(degree))
        return self._like(packed, degree)

    def __truediv__(self, other):
        g = _scalar_pair(other)
        if g is None:
            return NotImplemented
        return self.scale(GaussianRational(*g).inverse())

    def __pow__(self, exponent: int) -> ConjPolynomial:
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = ConjPolynomial.one(self.nvars, self.degree, self.kind)
        base = self
        while exponent:
            if exponent & 1:
                result = result.mul(base)
            exponent >>= 1
            if exponent:
                base = base.mul(base)
        return result

    # -- structural operations ------------------------------------------------

    def truncate(self, degree: int | None) -> ConjPolynomial:
        degree = _min_degree(self.degree, degree)
        limit = self.codec.limit(degree)
        if limit is None:
            return self
        return self._like({k: v for k, v in self._terms.items() if k < limit}, degree)

    def with_degree(self, degree: int | None) -> ConjPolynomial:
        """Same terms (truncated if needed) tagged with truncation ``degree``."""
        limit = self.codec.limit(degree)
        packed = self._terms if limit is None else {k: v for k, v in self._terms.items() if k < limit}
        return self._like(dict(packed), degree)

    def as_kind(self, kind: str) -> ConjPolynomial:
        return self._like(self._terms, kind=kind)

    def homogeneous(self, d: int) -> ConjPolynomial:
        c = self.codec
        return self._like({k: v for k, v in self._terms.items() if c.degree(k) == d})

    def bihomogeneous(self, p: int, q: int) -> ConjPolynomial:
        """Part of bidegree ``(p, q)`` in (z, zbar)."""
        out = {}
        n = self.nvars
        for k, v in self._terms.items():
            e = self.codec.decode(k)
            if sum(e[:n]) == p and sum(e[n:]) == q:
                out[k] = v
        return self._like(out)

    def filter_terms(self, predicate) -> ConjPolynomial:
        """Keep terms whose Multidegree satisfies ``predicate``."""
        n = self.nvars
        out = {}
        for k, v in self._terms.items():
            e = self.codec.decode(k)
            if predicate(Multidegree(e[:n], e[n:])):
                out[k] = v
        return self._like(out)

    def conj(self) -> ConjPolynomial:
        """Conjugate coefficients and swap the two variable blocks."""
        n = self.nvars
        c = self.codec
        out = {}
        for k, (re, im) in self._terms.items():
            e = c.decode(k)
            out[c.encode(e[n:] + e[:n])] = (re, -im)
        return self._like(out)

    def real_part(self) -> ConjPolynomial:
        return (self + self.conj()).scale(Q(1, 2))

    def imag_part(self) -> ConjPolynomial:
        return (self - self.conj()).scale(GaussianRational(0, Q(-1, 2)))

    def diff(self, slot: int) -> ConjPolynomial:
        """Partial derivative with respect to slot ``slot`` (0-based, 0..2n-1)."""
        c = self.codec
        shift = c.shifts[slot]
        unit = c.units[slot]
        out = {}
        for k, (re, im) in self._terms.items():
            e = (k >> shift) & c.mask
            if e:
                out[k - unit] = (re * e, im * e)
        return self._like(out)

    def dz(self, i: int) -> ConjPolynomial:
        """``d/dz_i`` with 1-based ``i``."""
        return self.diff(i - 1)

    def dw(self, i: int) -> ConjPolynomial:
        """``d/dzbar_i`` (or ``d/dw_i``) with 1-based ``i``."""
        return self.diff(self.nvars + i - 1)

    def substitute(
        self,
        images: Sequence[ConjPolynomial],
        degree: int | None = None,
    ) -> ConjPolynomial:
        """Replace slot ``k`` by ``images[k]`` for all 2n slots.

        The result lives in the images' variable space and is truncated at
        the smallest of ``degree``, ``self.degree`` and the images' degrees.
        """
        if len(images) != 2 * self.nvars:
            raise ValueError(f"need {2 * self.nvars} images, got {len(images)}")
        target = images[0]
        for img in images:
            if img.nvars != target.nvars:
                raise ValueError("images must share one variable space")
        degree = _min_degree(degree, self.degree, *(img.degree for img in images))
        tc = target.codec
        limit = tc.limit(degree)
        orders = [img.order() for img in images]
        one = [(tc.encode((0,) * tc.nslots), Q(1), Q(0))]
        memo = {(0,) * (2 * self.nvars): one}

        def power_product(exps):
            hit = memo.get(exps)
            if hit is not None:
                return hit
            j = max(i for i, e in enumerate(exps) if e)
            lower = exps[:j] + (exps[j] - 1,) + exps[j + 1 :]
            prev = power_product(lower)
            img = images[j].term_list()
            if not prev or not img:
                value = []
            else:
                value = sorted((k, re, im) for k, (re, im) in kernels.mul_terms(prev, img, limit).items())
            memo[exps] = value
            return value

        acc = {}
        c = self.codec
        for key, cre, cim in self.term_list():
            exps = c.decode(key)
            low = 0
            skip = False
            for e, o in zip(exps, orders):
                if e:
                    if o is None:
                        skip = True
                        break
                    low += e * o
            if skip or (degree is not None and low > degree):
                continue
            for k, re, im in power_product(exps):
                nre = cre * re - cim * im
                nim = cre * im + cim * re
                old = acc.get(k)
                if old is not None:
                    nre += old[0]
                    nim += old[1]
                acc[k] = (nre, nim)
        packed = {k: v for k, v in acc.items() if v[0] or v[1]}
        return ConjPolynomial._raw(target.nvars, packed, degree, target.kind)

    # -- evaluation -----------------------------------------------------------

    def evaluate_slots(self, values: Sequence) -> GaussianRational:
        """Evaluate with explicit values for all 2n slots."""
        if len(values) != 2 * self.nvars:
            raise ValueError(f"need {2 * self.nvars} slot values, got {len(values)}")
        vals = [GaussianRational.coerce(v) for v in values]
        powers: dict = {}
        total = GaussianRational(0)
        for md, coef in self.items():
            term = coef
            for i, e in enumerate(md.mu + md.nu):
                if e:
                    p = powers.get((i, e))
                    if p is None:
                        p = powers[(i, e)] = vals[i] ** e
                    term = term * p
            total = total + term
        return total

    def evaluate(self, point: Sequence) -> GaussianRational:
        """Value at ``z = point`` with ``zbar := conj(point)``."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, expected {self.nvars}")
        zs = [GaussianRational.coerce(p) for p in point]
        return self.evaluate_slots(zs + [z.conj() for z in zs])

    def evaluate_pair(self, z: Sequence, w: Sequence) -> GaussianRational:
        """Value of the complexified polynomial at independent ``(z, w)``."""
        if len(z) != self.nvars or len(w) != self.nvars:
            raise ValueError("dimension mismatch")
        return self.evaluate_slots(list(z) + list(w))

    # -- serialization / display ----------------------------------------------

    def to_record(self) -> dict:
        terms = []
        for md, coef in self.items():
            terms.append(
                {
                    "mu": list(md.mu),
                    "nu": list(md.nu),
                    "re": rational_str(coef.re),
                    "im": rational_str(coef.im),
                }
            )
        return {"vars": self.nvars, "degree": self.degree, "kind": self.kind, "terms": terms}

    @classmethod
    def from_record(cls, record: Mapping) -> ConjPolynomial:
        n = int(record["vars"])
        terms = {}
        for t in record.get("terms", []):
            md = (tuple(int(e) for e in t["mu"]), tuple(int(e) for e in t["nu"]))
            if md in terms:
                raise ValueError(f"duplicate multidegree {md}")
            terms[md] = GaussianRational(to_rational(t["re"]), to_rational(t.get("im", "0")))
        return cls(n, terms, record.get("degree"), record.get("kind", "zbar"))

    def default_names(self) -> list:
        n = self.nvars
        holo = [f"z{i}" for i in range(1, n + 1)]
        if self.kind == "w":
            return holo + [f"w{i}" for i in range(1, n + 1)]
        return holo + [f"conj(z{i})" for i in range(1, n + 1)]

    def format(self, names: Sequence[str] | None = None) -> str:
        """Human-readable sum in descending grlex order.

        With the default names of kind ``"zbar"`` the output is valid input
        for :func:`leviflat.cli.expr.parse_expression`.
        """
        names = list(names) if names is not None else self.default_names()
        if not self._terms:
            return "0"
        pieces = []
        for md, coef in reversed(list(self.items())):
            factors = []
            for name, e in zip(names, md.mu + md.nu):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mono = "*".join(factors)
            pieces.append(_format_term(coef, mono))
        text = pieces[0]
        for p in pieces[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        trunc = "" if self.degree is None else f", N={self.degree}"
        return f"ConjPolynomial({self.format()}{trunc})"


def _format_term(coef: GaussianRational, mono: str) -> str:
    def frac(q):
        s = rational_str(q)
        return f"({s})" if "/" in s else s

    if coef.im and coef.re:
        re_s, im_s = frac(coef.re), frac(abs(coef.im))
        sign = "-" if coef.im < 0 else "+"
        scalar = f"({re_s} {sign} {im_s}*i)"
        return f"{scalar}*{mono}" if mono else scalar
    if coef.im:
        q = coef.im
        neg = q < 0
        mag = abs(q)
        body = "i" if mag == 1 else f"{frac(mag)}*i"
    else:
        q = coef.re
        neg = q < 0
        mag = abs(q)
        body = "" if mag == 1 and mono else frac(mag)
    if mono:
        body = f"{body}*{mono}" if body else mono
    return f"-{body}" if neg else body


def poly_from_terms(nvars: int, terms: Iterable[tuple], degree=None, kind="zbar") -> ConjPolynomial:
    """Build from ``(mu, nu, coefficient)`` triples; repeated monomials add up."""
    acc: dict = {}
    for mu, nu, coef in terms:
        md = (tuple(mu), tuple(nu))
        acc[md] = GaussianRational.coerce(acc.get(md, 0)) + GaussianRational.coerce(coef)
    return ConjPolynomial(nvars, acc, degree, kind)


def divide_exact(P: ConjPolynomial, D: ConjPolynomial) -> ConjPolynomial | None:
    """Exact quotient ``P / D`` in the polynomial ring, or None if ``D`` does not divide ``P``.

    Multivariate division by a single polynomial under the grlex order: the
    quotient exists iff the leading term of every intermediate remainder is
    divisible by the leading term of ``D``.  Stored terms are treated as an
    exact polynomial regardless of the truncation tags.
    """
    if P.nvars != D.nvars:
        raise ValueError("variable count mismatch")
    if not D:
        raise ZeroDivisionError("division by the zero polynomial")
    c = P.codec
    d_items = D.term_list()
    kd, dre, dim = d_items[-1]
    lead_inv = GaussianRational(dre, dim).inverse()
    lre, lim = lead_inv.re, lead_inv.im
    rem = dict(P._terms)
    quot = {}
    while rem:
        kr = max(rem)
        if not c.divides(kd, kr):
            return None
        rre, rim = rem[kr]
        qre = rre * lre - rim * lim
        qim = rre * lim + rim * lre
        shift = kr - kd
        quot[shift] = (qre, qim)
        for k, are, aim in d_items:
            kk = k + shift
            pre = qre * are - qim * aim
            pim = qre * aim + qim * are
            old = rem.get(kk)
            if old is None:
                rem[kk] = (-pre, -pim)
            else:
                nre, nim = old[0] - pre, old[1] - pim
                if nre or nim:
                    rem[kk] = (nre, nim)
                else:
                    del rem[kk]
    return ConjPolynomial._raw(P.nvars, quot, None, P.kind)


def evaluate(P: ConjPolynomial, point: Sequence) -> GaussianRational:
    """``sum F_{mu nu} z^mu conj(z)^nu`` at ``point``, exactly."""
    return P.evaluate(point)
