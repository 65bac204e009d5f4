"""Blow-up of the complexified hypersurface along ``C = {z_1..z_k = w_1..w_k = 0}``.

Chart ``j`` (1 <= j <= 2k) makes the j-th centre coordinate the exceptional
coordinate ``u`` and multiplies the other centre coordinates by ``u``.  For
``j = 1`` this is

    (u, t_2, .., t_n, s_1, .., s_n) -> (u, u t_2, .., u t_k, t_{k+1}, .., t_n,
                                        u s_1, .., u s_k, s_{k+1}, .., s_n).

Chart polynomials are ConjPolynomials of kind ``"w"`` in n variables: slot
``i`` (a z-slot) carries ``t_{i+1}`` (or ``u``) and slot ``n + i`` carries
``s_{i+1}`` (or ``u``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra.jet import matrix_inverse
from .algebra.numbers import GaussianRational
from .algebra.poly import ConjPolynomial, divide_exact
from .forms import PolyForm, partial_split, pullback
from .levi import standard_quadric


class BlowupError(ValueError):
    pass


@dataclass(frozen=True)
class BlowupChart:
    index: int
    n: int
    k: int = 2

    def __post_init__(self):
        if self.k < 1 or self.k > self.n:
            raise BlowupError(f"centre size k={self.k} is out of range for n={self.n}")
        if not 1 <= self.index <= 2 * self.k:
            raise BlowupError(f"chart index must lie in 1..{2 * self.k}, got {self.index}")

    @property
    def center_slots(self) -> tuple:
        return tuple(range(self.k)) + tuple(self.n + i for i in range(self.k))

    @property
    def u_slot(self) -> int:
        j = self.index - 1
        return j if j < self.k else self.n + (j - self.k)

    def names(self) -> list:
        n = self.n
        out = [f"t{i + 1}" for i in range(n)] + [f"s{i + 1}" for i in range(n)]
        out[self.u_slot] = "u"
        return out

    def u(self) -> ConjPolynomial:
        return ConjPolynomial.slot(self.n, self.u_slot, kind="w")

    def images(self) -> list:
        """Image of each (z, w) slot as a chart polynomial."""
        n, us = self.n, self.u_slot
        u = self.u()
        out = []
        for s in range(2 * n):
            x = ConjPolynomial.slot(n, s, kind="w")
            out.append(x if s == us or s not in self.center_slots else u * x)
        return out

    def formula(self) -> list:
        names = self.names()
        base = [f"z{i + 1}" for i in range(self.n)] + [f"w{i + 1}" for i in range(self.n)]
        return [f"{b} = {img.format(names)}" for b, img in zip(base, self.images())]

    def center_equations(self) -> list:
        base = [f"z{i + 1}" for i in range(self.n)] + [f"w{i + 1}" for i in range(self.n)]
        return [f"{base[s]} = 0" for s in self.center_slots]

    def to_fragment(self) -> dict:
        return {"index": self.index, "center": self.center_equations(), "map": self.formula()}


def _as_chart_kind(P: ConjPolynomial) -> ConjPolynomial:
    return P if P.kind == "w" else P.as_kind("w")


def chart_pullback(P: ConjPolynomial, chart: BlowupChart) -> ConjPolynomial:
    """``P o pi`` in chart coordinates (exact up to the truncation of P)."""
    if P.nvars != chart.n:
        raise BlowupError(f"polynomial has {P.nvars} variables, chart expects {chart.n}")
    return _as_chart_kind(P).substitute(chart.images())


def _u_power(P: ConjPolynomial, slot: int) -> int:
    return min(P.codec.decode(key)[slot] for key, _, _ in P.term_list())


def _divide_u(P: ConjPolynomial, chart: BlowupChart, m: int) -> ConjPolynomial | None:
    if m == 0 or not P:
        return P
    q = divide_exact(P, chart.u() ** m)
    if q is None:
        return None
    return q.with_degree(None if P.degree is None else P.degree - m)


@dataclass(frozen=True)
class StrictTransform:
    chart: BlowupChart
    multiplicity: int
    raw: ConjPolynomial
    transform: ConjPolynomial
    scale: GaussianRational
    H1: ConjPolynomial | None

    def to_fragment(self) -> dict:
        names = self.chart.names()
        return {
            "multiplicity": self.multiplicity,
            "raw_quotient": self.raw.format(names),
            "normalization": str(self.scale),
            "transform": self.transform.format(names),
            "H1": None if self.H1 is None else self.H1.format(names),
        }


def _transform_model(chart: BlowupChart) -> ConjPolynomial:
    """``1 + sum of squares of the non-u centre coordinates``."""
    n = chart.n
    acc = ConjPolynomial.one(n, kind="w")
    for s in chart.center_slots:
        if s != chart.u_slot:
            acc = acc + ConjPolynomial.slot(n, s, kind="w") ** 2
    return acc


def strict_transform(FC: ConjPolynomial, chart: BlowupChart) -> StrictTransform:
    """Divide the pullback by the largest power ``u^m`` and normalize the constant term to 1.

    ``H1`` is ``(transform - model) / u`` when that division is exact, where the
    model is ``1 + (squares of the other centre coordinates)``.
    """
    P = chart_pullback(FC, chart)
    if not P:
        raise BlowupError("pullback vanishes identically")
    m = _u_power(P, chart.u_slot)
    raw = _divide_u(P, chart, m)
    c0 = raw.constant_term()
    scale = c0.inverse() if c0 else GaussianRational(1)
    transform = raw.scale(scale) if c0 else raw
    H1 = _divide_u(transform - _transform_model(chart), chart, 1)
    return StrictTransform(chart, m, raw, transform, scale, H1)


def beta_tilde(FC: ConjPolynomial, chart: BlowupChart) -> PolyForm:
    """``pi^* (sum dF_C/dw_j dw_j)`` divided by ``u^(m-1)``, m the multiplicity of F_C."""
    _, beta = partial_split(_as_chart_kind(FC))
    pulled = pullback(beta, chart.images())
    m = strict_transform(FC, chart).multiplicity
    if m < 1:
        raise BlowupError("F_C does not vanish along the centre of the blow-up")
    out = {}
    for key, coef in pulled.terms.items():
        q = _divide_u(coef, chart, m - 1)
        if q is None:
            raise BlowupError(
                f"coefficient of d{chart.names()[key[0]]} is not divisible by u^{m - 1}: multiplicity mismatch"
            )
        out[key] = q
    return PolyForm(chart.n, 1, out, "w")


@dataclass(frozen=True)
class BetaDecomposition:
    beta: PolyForm
    beta0: PolyForm
    theta: PolyForm

    def to_fragment(self, chart: BlowupChart) -> dict:
        names = chart.names()
        return {
            "beta_tilde": self.beta.format(names),
            "quadric_part": self.beta0.format(names),
            "theta_tilde": self.theta.format(names),
        }


def beta_decomposition(FC: ConjPolynomial, chart: BlowupChart) -> BetaDecomposition:
    """``beta~ = beta~_0 + u theta~`` with ``beta~_0`` coming from the quadratic part alone."""
    n = chart.n
    F2 = standard_quadric(n, chart.k, kind="w")
    if FC.as_kind("w").homogeneous(2) != F2:
        raise BlowupError("quadratic part is not the standard quadric of the centre")
    beta = beta_tilde(FC, chart)
    beta0 = beta_tilde(F2, chart)
    out = {}
    for key, coef in (beta - beta0).terms.items():
        q = _divide_u(coef, chart, 1)
        if q is None:
            raise BlowupError("beta~ - beta~_0 is not divisible by u")
        out[key] = q
    return BetaDecomposition(beta, beta0, PolyForm(n, 1, out, "w"))


# -- singular components and holonomy -----------------------------------------------


def _restrict(P: ConjPolynomial, slot: int) -> ConjPolynomial:
    """Set the variable in ``slot`` to zero."""
    return P.filter_terms(lambda md: (md.mu + md.nu)[slot] == 0)


def _set_slot(P: ConjPolynomial, slot: int, value) -> ConjPolynomial:
    imgs = [ConjPolynomial.slot(P.nvars, s, kind=P.kind) for s in range(2 * P.nvars)]
    imgs[slot] = ConjPolynomial.constant(P.nvars, value, kind=P.kind)
    return P.substitute(imgs)


def _quadratic_roots(a2, a1, a0) -> list:
    """Roots of ``a2 x^2 + a1 x + a0`` in Q(i), ordered by decreasing imaginary part."""
    a2, a1, a0 = (GaussianRational.coerce(x) for x in (a2, a1, a0))
    if not a2:
        raise BlowupError("degenerate quadratic")
    disc = a1 * a1 - a2 * a0 * 4
    root = disc.sqrt()
    if root is None:
        raise BlowupError(f"discriminant {disc} has no square root in Q(i)")
    inv = (a2 * 2).inverse()
    roots = {(-a1 + root) * inv, (-a1 - root) * inv}
    return sorted(roots, key=lambda r: (-r.im, -r.re))


@dataclass(frozen=True)
class SingularComponent:
    chart: BlowupChart
    t_slot: int
    root: GaussianRational
    branch: str
    factor: ConjPolynomial
    cofactor: ConjPolynomial

    @property
    def equations(self) -> list:
        names = self.chart.names()
        t = ConjPolynomial.slot(self.chart.n, self.t_slot, kind="w")
        return [
            "u = 0",
            f"{self.factor.format(names)} = 0",
            f"{(t - ConjPolynomial.constant(self.chart.n, self.root, kind='w')).format(names)} = 0",
        ]

    def to_fragment(self) -> dict:
        return {"equations": self.equations, "root": str(self.root), "branch": self.branch}


def exceptional_singularities(chart: BlowupChart, FC: ConjPolynomial) -> list:
    """Components of ``Sing(F~) cap E`` in a chart whose exceptional coordinate is a z-slot.

    On ``E = {u = 0}`` the form restricts to ``a(s) du`` with ``a`` a binary
    quadratic form in the two centre s-coordinates; each linear factor of ``a``
    together with a root of the strict transform on ``{factor = 0}`` gives one
    component.  Ordered by root (``i`` before ``-i``), then by branch.
    """
    n = chart.n
    if chart.k != 2:
        raise BlowupError("singular components are computed for a centre of two z-directions (n - c = 2)")
    if chart.u_slot >= n:
        raise BlowupError("use a chart whose exceptional coordinate is z1 or z2 (indices 1, 2)")
    t_slot = 1 - chart.u_slot
    s1, s2 = n, n + 1
    us = chart.u_slot
    st = strict_transform(FC, chart)
    if st.multiplicity != 2:
        raise BlowupError(f"expected multiplicity 2, got {st.multiplicity}")
    beta = beta_tilde(FC, chart)
    a = _restrict(beta.coefficient((us,)), us)
    A = a.coefficient([0] * n, _exps(n, {0: 2}))
    B = a.coefficient([0] * n, _exps(n, {0: 1, 1: 1}))
    C = a.coefficient([0] * n, _exps(n, {1: 2}))
    model = ConjPolynomial(n, {((0,) * n, _exps(n, {0: 2})): A, ((0,) * n, _exps(n, {0: 1, 1: 1})): B,
                               ((0,) * n, _exps(n, {1: 2})): C}, kind="w")
    if a != model or not A:
        raise BlowupError(f"du-coefficient on E is {a.format(chart.names())}, not a quadratic form in s1, s2")
    S1 = ConjPolynomial.slot(n, s1, kind="w")
    S2 = ConjPolynomial.slot(n, s2, kind="w")
    # a = A (s1 - r1 s2)(s1 - r2 s2); "+" is the factor whose s2 coefficient has larger imaginary part
    rs = _quadratic_roots(A, B, C)
    factors = sorted(((S1 - S2.scale(r), r) for r in rs), key=lambda fr: (-(-fr[1]).im, -(-fr[1]).re))
    T0 = _restrict(st.transform, us)
    comps = []
    per_branch = []
    for (L, r), (Lc, _), label in ((factors[0], factors[1], "+"), (factors[1], factors[0], "-")):
        imgs = [ConjPolynomial.slot(n, s, kind="w") for s in range(2 * n)]
        imgs[s1] = S2.scale(r)
        on_branch = T0.substitute(imgs)
        if on_branch.variables_used() - {t_slot}:
            raise BlowupError("strict transform on the branch depends on more than one centre coordinate")
        t = [0] * n
        coeffs = []
        for p in (2, 1, 0):
            t[t_slot] = p
            coeffs.append(on_branch.coefficient(tuple(t)))
        if on_branch.max_degree() > 2:
            raise BlowupError("strict transform on the branch is not quadratic in t")
        per_branch.append((L, Lc, label, _quadratic_roots(*coeffs)))
    roots = sorted({rho for *_, rr in per_branch for rho in rr}, key=lambda r: (-r.im, -r.re))
    for rho in roots:
        for L, Lc, label, rr in per_branch:
            if rho in rr:
                comps.append(SingularComponent(chart, t_slot, rho, label, L, Lc))
    return comps


def _exps(n: int, entries: dict) -> tuple:
    e = [0] * n
    for i, p in entries.items():
        e[i] = p
    return tuple(e)


def linear_residue(form: PolyForm, u_slot: int, v_slot: int, fixed: dict | None = None):
    """Residue of ``c1 v du + c2 u dv + ...`` at ``u = v = 0``: returns ``(-c2/c1, c1, c2)``.

    ``fixed`` maps slots to values substituted before the ratio is taken.  The
    leaves of ``c1 v du + c2 u dv = 0`` satisfy ``u v^(c2/c1) = const``, so a loop
    around ``v = 0`` multiplies ``u`` by ``exp(2 pi i (-c2/c1))``.
    """
    a = form.coefficient((u_slot,))
    b = form.coefficient((v_slot,))
    c1 = _restrict(_restrict(a.diff(v_slot), u_slot), v_slot)
    c2 = _restrict(_restrict(b.diff(u_slot), u_slot), v_slot)
    for slot, value in (fixed or {}).items():
        c1 = _set_slot(c1, slot, value)
        c2 = _set_slot(c2, slot, value)
    if not c1:
        raise BlowupError("degenerate linearization: the v du coefficient vanishes")
    ratio = divide_exact(c2, c1)
    if ratio is None or ratio.max_degree() > 0:
        raise BlowupError("linearization ratio c2/c1 is not constant along the component")
    return -ratio.constant_term(), c1, c2


@dataclass(frozen=True)
class HolonomyLinearPart:
    component: SingularComponent
    residue: GaussianRational
    c1: ConjPolynomial
    c2: ConjPolynomial

    REFERENCE_MULTIPLIER = "exp(-2*pi*i)"

    @property
    def order(self) -> int | None:
        """Order of ``exp(2 pi i lambda)`` as a root of unity (None for non-real lambda)."""
        if self.residue.im:
            return None
        return Fraction(int(self.residue.re.numerator), int(self.residue.re.denominator)).denominator

    @property
    def multiplier_value(self) -> GaussianRational | None:
        """Exact multiplier when it lies in Q(i)."""
        order = self.order
        if order not in (1, 2, 4):
            return None
        r = Fraction(int(self.residue.re.numerator), int(self.residue.re.denominator))
        quarter = int((r * 4) % 4)
        return [GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1), GaussianRational(0, -1)][quarter]

    @property
    def multiplier(self) -> str:
        return f"exp(2*pi*i*({self.residue}))"

    @property
    def reference_mismatch(self) -> bool:
        return self.multiplier_value != 1

    def to_fragment(self) -> dict:
        value = self.multiplier_value
        return {
            "equations": self.component.equations,
            "residue": str(self.residue),
            "multiplier": self.multiplier,
            "multiplier_value": None if value is None else str(value),
            "root_of_unity_order": self.order,
            "nontrivial_root_of_unity": self.order is not None and self.order > 1,
            "reference_multiplier": self.REFERENCE_MULTIPLIER,
            "reference_value": "1",
            "reference_mismatch": self.reference_mismatch,
        }


def holonomy_linear_part(component: SingularComponent, beta: PolyForm) -> HolonomyLinearPart:
    """Linear holonomy of ``E`` around ``component`` on the transversal ``u``.

    Coordinates ``v = factor`` and ``v' = cofactor`` replace ``s1, s2``; the
    residue is read off the linear part of ``beta`` after fixing ``t = root``.
    """
    chart = component.chart
    n = chart.n
    s1, s2 = n, n + 1
    L, Lc = component.factor, component.cofactor
    M = [[L.coefficient([0] * n, _exps(n, {0: 1})), L.coefficient([0] * n, _exps(n, {1: 1}))],
         [Lc.coefficient([0] * n, _exps(n, {0: 1})), Lc.coefficient([0] * n, _exps(n, {1: 1}))]]
    Minv = matrix_inverse(M)
    V = ConjPolynomial.slot(n, s1, kind="w")
    Vc = ConjPolynomial.slot(n, s2, kind="w")
    imgs = [ConjPolynomial.slot(n, s, kind="w") for s in range(2 * n)]
    imgs[s1] = V.scale(Minv[0][0]) + Vc.scale(Minv[0][1])
    imgs[s2] = V.scale(Minv[1][0]) + Vc.scale(Minv[1][1])
    moved = pullback(beta, imgs)
    lam, c1, c2 = linear_residue(moved, chart.u_slot, s1, {component.t_slot: component.root})
    return HolonomyLinearPart(component, lam, c1, c2)


@dataclass(frozen=True)
class BlowupResult:
    chart: BlowupChart
    strict: StrictTransform
    beta: BetaDecomposition | None
    holonomy: list

    def to_fragment(self) -> dict:
        frag = {
            "chart": self.chart.index,
            "chart_map": self.chart.formula(),
            "multiplicity": self.strict.multiplicity,
            "strict_transform": self.strict.to_fragment(),
            "components": [h.to_fragment() for h in self.holonomy],
        }
        if self.beta is not None:
            frag.update(self.beta.to_fragment(self.chart))
        return frag


def blowup_analysis(FC: ConjPolynomial, chart_index: int = 1, k: int = 2) -> BlowupResult:
    """Strict transform, beta~ and the linear holonomy of every exceptional component."""
    chart = BlowupChart(chart_index, FC.nvars, k)
    st = strict_transform(FC, chart)
    beta = beta_decomposition(FC, chart)
    comps = exceptional_singularities(chart, FC)
    hol = [holonomy_linear_part(c, beta.beta) for c in comps]
    return BlowupResult(chart, st, beta, hol)


__all__ = [
    "BetaDecomposition",
    "BlowupChart",
    "BlowupError",
    "BlowupResult",
    "HolonomyLinearPart",
    "SingularComponent",
    "StrictTransform",
    "beta_decomposition",
    "beta_tilde",
    "blowup_analysis",
    "chart_pullback",
    "exceptional_singularities",
    "holonomy_linear_part",
    "linear_residue",
    "strict_transform",
]
