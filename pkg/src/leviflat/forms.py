"""Differential forms with polynomial coefficients on the complexified space.

Covectors are indexed by slot: ``0..n-1`` are ``dz_1..dz_n`` and ``n..2n-1``
are ``dw_1..dw_n`` (read ``dzbar`` for polynomials of kind ``"zbar"``).
Index sets are stored sorted; the sign of the sorting permutation is folded
into the coefficient when a form is built.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .algebra.poly import ConjPolynomial


def _sort_sign(indices: Sequence[int]) -> tuple[int, tuple]:
    """Sign of the permutation sorting ``indices``; 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class PolyForm:
    """Homogeneous k-form ``sum c_I dx_I`` with ConjPolynomial coefficients."""

    __slots__ = ("nvars", "form_degree", "kind", "terms")

    def __init__(
        self,
        nvars: int,
        form_degree: int,
        terms: Mapping | Iterable = (),
        kind: str = "zbar",
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for indices, coef in items:
            if len(indices) != form_degree:
                raise ValueError(f"index set {tuple(indices)} does not have {form_degree} elements")
            if any(not 0 <= i < 2 * nvars for i in indices):
                raise ValueError(f"covector index out of range in {tuple(indices)}")
            if coef.nvars != nvars:
                raise ValueError("coefficient lives in a different variable space")
            sign, key = _sort_sign(indices)
            if not sign or not coef:
                continue
            coef = coef if sign > 0 else -coef
            acc[key] = acc[key] + coef if key in acc else coef
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "form_degree", form_degree)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "terms", {k: v for k, v in sorted(acc.items()) if v})

    def __setattr__(self, name, value):
        raise AttributeError("PolyForm is immutable")

    @classmethod
    def zero(cls, nvars: int, form_degree: int, kind: str = "zbar") -> PolyForm:
        return cls(nvars, form_degree, {}, kind)

    @classmethod
    def function(cls, f: ConjPolynomial) -> PolyForm:
        """A polynomial viewed as a 0-form."""
        return cls(f.nvars, 0, {(): f}, f.kind)

    @classmethod
    def basis(cls, nvars: int, *indices: int, kind: str = "zbar", degree=None) -> PolyForm:
        """``dx_{i1} ^ ... ^ dx_{ik}`` with 0-based slot indices."""
        return cls(nvars, len(indices), {tuple(indices): ConjPolynomial.one(nvars, degree, kind)}, kind)

    def _check(self, other: PolyForm):
        if not isinstance(other, PolyForm):
            raise TypeError("expected a PolyForm")
        if other.nvars != self.nvars:
            raise ValueError("forms live on different variable spaces")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        if not self.terms and not other.terms:
            return True
        return self.form_degree == other.form_degree and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.form_degree, tuple(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: PolyForm) -> PolyForm:
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.form_degree != self.form_degree:
            raise ValueError("cannot add forms of different degrees")
        return PolyForm(self.nvars, self.form_degree, list(self.terms.items()) + list(other.terms.items()), self.kind)

    def __neg__(self) -> PolyForm:
        return PolyForm(self.nvars, self.form_degree, {k: -v for k, v in self.terms.items()}, self.kind)

    def __sub__(self, other: PolyForm) -> PolyForm:
        return self + (-other)

    def scale(self, value) -> PolyForm:
        if isinstance(value, ConjPolynomial):
            return PolyForm(self.nvars, self.form_degree, {k: v * value for k, v in self.terms.items()}, self.kind)
        return PolyForm(self.nvars, self.form_degree, {k: v.scale(value) for k, v in self.terms.items()}, self.kind)

    def __mul__(self, value) -> PolyForm:
        return self.scale(value)

    __rmul__ = __mul__

    def __xor__(self, other: PolyForm) -> PolyForm:
        return wedge(self, other)

    def coefficient(self, indices: Sequence[int]) -> ConjPolynomial:
        """Coefficient of ``dx_{i1} ^ ... ^ dx_{ik}`` in the given (unsorted) order."""
        sign, key = _sort_sign(indices)
        zero = ConjPolynomial.zero(self.nvars, kind=self.kind)
        if not sign:
            return zero
        c = self.terms.get(key, zero)
        return c if sign > 0 else -c

    def map_coefficients(self, fn) -> PolyForm:
        return PolyForm(self.nvars, self.form_degree, {k: fn(v) for k, v in self.terms.items()}, self.kind)

    def truncate(self, degree: int | None) -> PolyForm:
        return self.map_coefficients(lambda c: c.truncate(degree))

    def covector_name(self, index: int, names: Sequence[str] | None = None) -> str:
        if names is not None:
            return "d" + names[index]
        n = self.nvars
        if index < n:
            return f"dz{index + 1}"
        return f"dw{index - n + 1}" if self.kind == "w" else f"dzbar{index - n + 1}"

    def format(self, names: Sequence[str] | None = None, covector_names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for key, coef in self.terms.items():
            basis = "^".join(
                covector_names[i] if covector_names else self.covector_name(i, names) for i in key
            )
            c = coef.format(names)
            if not basis:
                pieces.append(c)
            elif c == "1":
                pieces.append(basis)
            elif c == "-1":
                pieces.append("-" + basis)
            else:
                pieces.append(f"({c})*{basis}")
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"PolyForm[{self.form_degree}]({self.format()})"

    def to_record(self, names: Sequence[str] | None = None) -> dict:
        terms = []
        for key, coef in self.terms.items():
            for t in coef.to_record()["terms"]:
                terms.append({"covectors": list(key), **t})
        return {"vars": self.nvars, "form_degree": self.form_degree, "kind": self.kind, "terms": terms}

    @classmethod
    def from_record(cls, record: Mapping) -> PolyForm:
        n = int(record["vars"])
        kind = record.get("kind", "zbar")
        grouped: dict = {}
        for t in record.get("terms", []):
            grouped.setdefault(tuple(t["covectors"]), []).append(t)
        terms = {
            key: ConjPolynomial.from_record({"vars": n, "kind": kind, "terms": ts})
            for key, ts in grouped.items()
        }
        return cls(n, int(record["form_degree"]), terms, kind)


def wedge(a: PolyForm, b: PolyForm) -> PolyForm:
    """Exterior product with exact sign bookkeeping."""
    a._check(b)
    out = []
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            if set(ka) & set(kb):
                continue
            out.append((ka + kb, ca * cb))
    return PolyForm(a.nvars, a.form_degree + b.form_degree, out, a.kind)


def _d_restricted(form: PolyForm, slots: Iterable[int]) -> PolyForm:
    slots = list(slots)
    out = []
    for key, coef in form.terms.items():
        for s in slots:
            if s in key:
                continue
            dc = coef.diff(s)
            if dc:
                out.append(((s,) + key, dc))
    return PolyForm(form.nvars, form.form_degree + 1, out, form.kind)


def exterior_d(form: PolyForm) -> PolyForm:
    """``d = sum_k dx_k ^ d/dx_k`` over all 2n slots."""
    return _d_restricted(form, range(2 * form.nvars))


def partial_z(form: PolyForm) -> PolyForm:
    """The holomorphic part ``del`` of ``d`` (derivatives in z only)."""
    return _d_restricted(form, range(form.nvars))


def partial_w(form: PolyForm) -> PolyForm:
    """The antiholomorphic part (``delbar``, or ``del_w`` on complexifications)."""
    return _d_restricted(form, range(form.nvars, 2 * form.nvars))


def differential(F: ConjPolynomial) -> PolyForm:
    """``dF`` of a 0-form."""
    return exterior_d(PolyForm.function(F))


def partial_split(F: ConjPolynomial) -> tuple[PolyForm, PolyForm]:
    """``(alpha, beta)`` with ``alpha = sum dF/dz_j dz_j`` and ``beta = sum dF/dw_j dw_j``."""
    n = F.nvars
    alpha = PolyForm(n, 1, [((j,), F.diff(j)) for j in range(n)], F.kind)
    beta = PolyForm(n, 1, [((n + j,), F.diff(n + j)) for j in range(n)], F.kind)
    return alpha, beta


def mixed_hessian_form(F: ConjPolynomial) -> PolyForm:
    """``sum_{i,j} d^2F/dz_i dw_j  dz_i ^ dw_j``, i.e. ``del delbar F``."""
    n = F.nvars
    terms = []
    for i in range(n):
        Fi = F.diff(i)
        if not Fi:
            continue
        for j in range(n):
            terms.append(((i, n + j), Fi.diff(n + j)))
    return PolyForm(n, 2, terms, F.kind)


def pullback(form: PolyForm, images: Sequence[ConjPolynomial], degree: int | None = None) -> PolyForm:
    """Pull ``form`` back along the polynomial map sending slot ``k`` to ``images[k]``."""
    if len(images) != 2 * form.nvars:
        raise ValueError("need one image per slot")
    target = images[0]
    m, kind = target.nvars, target.kind
    dimg = [differential(img) for img in images]
    out = PolyForm.zero(m, form.form_degree, kind)
    for key, coef in form.terms.items():
        piece = PolyForm.function(coef.substitute(images, degree))
        for s in key:
            piece = wedge(piece, dimg[s])
        if degree is not None:
            piece = piece.truncate(degree)
        out = out + piece
    return out

