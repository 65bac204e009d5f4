"""Reality, complexification, Levi forms, flatness verdicts and singular loci."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .algebra.jet import kernel_basis
from .algebra.numbers import GaussianRational, Q
from .algebra.poly import ConjPolynomial, divide_exact
from .forms import PolyForm, mixed_hessian_form, partial_split, wedge

METHOD = "divisibility-by-F_C"
I = GaussianRational(0, 1)


class NotRealError(ValueError):
    """The defining function is not real-valued."""


class ShapeViolation(ValueError):
    """The input does not have the required normal-form shape."""


def check_reality(P: ConjPolynomial) -> bool:
    """True iff ``conj(F_{mu nu}) == F_{nu mu}`` for every coefficient."""
    return P.conj() == P


def complexify(F: ConjPolynomial) -> ConjPolynomial:
    """Replace ``zbar`` by an independent ``w``; coefficients are unchanged."""
    return F.as_kind("w")


def realize(FC: ConjPolynomial) -> ConjPolynomial:
    """Restrict a complexified polynomial to ``w = zbar``."""
    return FC.as_kind("zbar")


@dataclass(frozen=True)
class HypersurfaceGerm:
    """Germ ``{F = 0}`` of a real hypersurface, analysed modulo degree ``truncation + 1``."""

    defining: ConjPolynomial
    truncation: int = 8

    def __post_init__(self):
        F = self.defining
        if F.kind != "zbar":
            raise ValueError("the defining function must be given in (z, zbar)")
        if not F:
            raise ValueError("zero defining polynomial")
        if not check_reality(F):
            raise NotRealError("defining function is not real-valued")
        if F.constant_term():
            raise ValueError("defining function does not vanish at the origin")

    @property
    def num_vars(self) -> int:
        return self.defining.nvars

    @property
    def complexified(self) -> ConjPolynomial:
        return complexify(self.defining)


@dataclass(frozen=True)
class IntegrabilityVerdict:
    flat: bool
    witness: PolyForm
    method: str = METHOD
    warnings: tuple = ()
    checked_coefficients: int = 0

    def to_fragment(self, names=None) -> dict:
        frag = {"op": "check", "verdict": "flat" if self.flat else "not-flat", "flat": self.flat, "method": self.method}
        if not self.flat:
            frag["witness"] = {"form": self.witness.format(names), "record": self.witness.to_record()}
        if self.warnings:
            frag["warnings"] = list(self.warnings)
        return frag


def levi_form(F: ConjPolynomial) -> PolyForm:
    """``eta = i (del F - delbar F)`` of a real function in (z, zbar)."""
    if F.kind != "zbar":
        raise ValueError("levi_form expects a polynomial in (z, zbar); use levi_form_complexified")
    if not check_reality(F):
        raise NotRealError("Levi form requested for a non-real function")
    alpha, beta = partial_split(F)
    return (alpha - beta).scale(I)


def levi_form_complexified(FC: ConjPolynomial) -> PolyForm:
    """``eta_C = i (del_z F_C - del_w F_C) = i (alpha - beta)``."""
    alpha, beta = partial_split(FC)
    return (alpha - beta).scale(I)


def squarefree_warnings(FC: ConjPolynomial) -> list:
    """Cheap hints that divisibility by F_C may be stricter than vanishing on M_C."""
    warnings = []
    exps = [FC.codec.decode(k) for k in FC._terms]
    content = [min(col) for col in zip(*exps)] if exps else []
    if any(e >= 2 for e in content):
        warnings.append("F_C has a repeated monomial factor; it is not squarefree")
    for slot in range(2 * FC.nvars):
        d = FC.diff(slot)
        if d and d.max_degree() > 0 and divide_exact(FC, d) is not None:
            warnings.append(f"F_C is divisible by its partial derivative in slot {slot}; it may not be squarefree")
            break
    return warnings


def integrability_form(FC: ConjPolynomial) -> PolyForm:
    """``alpha ^ beta ^ del delbar F_C``, whose vanishing on M_C is Levi-flatness."""
    alpha, beta = partial_split(FC)
    return wedge(wedge(alpha, beta), mixed_hessian_form(FC))


def integrability_test(M: HypersurfaceGerm) -> IntegrabilityVerdict:
    """Levi-flatness verdict by exact divisibility of every coefficient of W by F_C."""
    FC = M.complexified
    W = integrability_form(FC)
    for n_checked, (key, coef) in enumerate(W.terms.items(), start=1):
        if divide_exact(coef, FC) is None:
            witness = PolyForm(FC.nvars, W.form_degree, {key: realize(coef)})
            return IntegrabilityVerdict(False, witness, warnings=tuple(squarefree_warnings(FC)),
                                        checked_coefficients=n_checked)
    return IntegrabilityVerdict(True, PolyForm.zero(FC.nvars, W.form_degree), warnings=tuple(squarefree_warnings(FC)),
                                checked_coefficients=len(W.terms))


# -- quadric-plus-H shape ------------------------------------------------------


@dataclass(frozen=True)
class QuadricShape:
    """``F = Re(z_1^2 + ... + z_k^2) + H`` with ``k = n - c`` and H free of the last c variables."""

    k: int
    c: int
    H: ConjPolynomial

    @property
    def branch(self) -> str:
        return "a" if self.k >= 3 else "b"


def standard_quadric(n: int, k: int, kind: str = "zbar") -> ConjPolynomial:
    """``Re(z_1^2 + ... + z_k^2)`` in n variables."""
    terms = {}
    for i in range(k):
        e = tuple(2 * (j == i) for j in range(n))
        zero = (0,) * n
        terms[(e, zero)] = Q(1, 2)
        terms[(zero, e)] = Q(1, 2)
    return ConjPolynomial(n, terms, kind=kind)


def quadric_shape(F: ConjPolynomial) -> QuadricShape:
    """Split F as Re(z_1^2 + ... + z_k^2) + H(z_1..z_k), or raise ShapeViolation."""
    n = F.nvars
    if not check_reality(F):
        raise NotRealError("defining function is not real-valued")
    if F.constant_term():
        raise ShapeViolation("F does not vanish at the origin")
    if F.homogeneous(1):
        raise ShapeViolation("F has a non-zero linear part")
    F2 = F.homogeneous(2)
    k = 0
    while k < n and F2.coefficient(tuple(2 * (j == k) for j in range(n)), (0,) * n):
        k += 1
    if k == 0 or F2 != standard_quadric(n, k):
        raise ShapeViolation(
            f"quadratic part {F2.format()} is not Re(z1^2+...+zk^2); general quadratic parts are not reduced"
        )
    if k < 2:
        raise ShapeViolation(f"only {k} square(s) in the quadratic part; need n - c >= 2")
    H = F - F2
    bad = sorted(s for s in H.variables_used() if (s % n) >= k)
    if bad:
        names = F.default_names()
        raise ShapeViolation(
            "H depends on " + ", ".join(names[s] for s in bad) + f"; it must be independent of z_j, conj(z_j) for j > {k}"
        )
    return QuadricShape(k, n - k, H)


# -- singular loci ----------------------------------------------------------------


@dataclass(frozen=True)
class SingularLocusData:
    generators: list
    candidate_subspace: list = field(default_factory=list)
    match: bool | None = None
    dimension: int | None = None
    vanishing: bool | None = None
    off_subspace_regular: bool | None = None
    sample_points: int = 0

    def to_fragment(self) -> dict:
        return {
            "op": "singular-locus",
            "verdict": None if self.match is None else ("match" if self.match else "mismatch"),
            "candidate": [e.format() for e in self.candidate_subspace],
            "dimension": self.dimension,
            "vanishing_on_candidate": self.vanishing,
            "regular_off_candidate": self.off_subspace_regular,
            "sample_points": self.sample_points,
        }


def coordinate_subspace(n: int, k: int) -> list:
    """Equations ``z_1 = ... = z_k = w_1 = ... = w_k = 0``."""
    eqs = [ConjPolynomial.z(n, j, kind="w") for j in range(1, k + 1)]
    eqs += [ConjPolynomial.w(n, j, kind="w") for j in range(1, k + 1)]
    return eqs


def _linear_rows(equations: list, n: int) -> list:
    rows = []
    for eq in equations:
        if eq.nvars != n:
            raise ValueError("candidate equation lives in another variable space")
        if eq.constant_term() or eq.max_degree() != 1 or eq.homogeneous(1) != eq:
            raise ValueError(f"candidate equation {eq.format()} is not linear")
        rows.append([eq.coefficient(*_unit(n, s)) for s in range(2 * n)])
    return rows


def _unit(n, s):
    e = [0] * (2 * n)
    e[s] = 1
    return tuple(e[:n]), tuple(e[n:])


def singular_locus(
    FC: ConjPolynomial,
    candidate: list | None = None,
    samples: int = 96,
    seed: int = 0,
) -> SingularLocusData:
    """Jacobian system of M_C and, for a linear candidate, a two-way containment check.

    Containment is checked by (a) substituting a parametrization of the
    candidate into every generator and (b) evaluating the generators at a
    deterministic sample of small rational points off the candidate, where
    at least one must be non-zero.
    """
    FC = FC if FC.kind == "w" else complexify(FC)
    n = FC.nvars
    gens = [FC] + [FC.diff(s) for s in range(2 * n)]
    if candidate is None:
        try:
            shape = quadric_shape(realize(FC))
        except (ShapeViolation, NotRealError):
            return SingularLocusData(gens)
        candidate = coordinate_subspace(n, shape.k)
    rows = _linear_rows(candidate, n)
    basis = kernel_basis(rows) if rows else [
        [GaussianRational(int(i == j)) for i in range(2 * n)] for j in range(2 * n)
    ]
    r = len(basis)
    pn = max(r, 1)
    params = [ConjPolynomial.z(pn, j + 1, kind="w") for j in range(r)]
    images = []
    for s in range(2 * n):
        img = ConjPolynomial.zero(pn, kind="w")
        for j in range(r):
            if basis[j][s]:
                img = img + params[j].scale(basis[j][s])
        images.append(img)
    vanishing = all(not g.substitute(images) for g in gens)

    rng = random.Random(seed)
    grid = [Q(-1, 16), Q(0), Q(1, 16)]
    all_points = 3 ** (2 * n)
    if all_points <= samples:
        points = list(itertools.product(grid, repeat=2 * n))
    else:
        points = [tuple(rng.choice(grid) for _ in range(2 * n)) for _ in range(samples)]
    regular = True
    checked = 0
    for pt in points:
        if all(not eq.evaluate_slots(pt) for eq in candidate):
            continue
        checked += 1
        if all(not g.evaluate_slots(pt) for g in gens):
            regular = False
            break
    return SingularLocusData(gens, list(candidate), vanishing and regular, r, vanishing, regular, checked)


@dataclass(frozen=True)
class EtaDecomposition:
    """Equations of ``X1`` and ``X2`` and the codimension used to pick the existence branch."""

    A: list
    B: list
    X1: list
    X2: list
    M1_open: list
    M2_open: list
    codimension: int
    branch: str

    def to_fragment(self) -> dict:
        return {
            "op": "eta-singularities",
            "X1": [p.format() for p in self.X1],
            "X2": [p.format() for p in self.X2],
            "M1": "M_C minus {" + ", ".join(f"{p.format()} = 0" for p in self.M1_open) + "}",
            "M2": "M_C minus {" + ", ".join(f"{p.format()} = 0" for p in self.M2_open) + "}",
            "codimension": self.codimension,
            "branch": self.branch,
        }


def eta_singularity_decomposition(F: ConjPolynomial) -> EtaDecomposition:
    """``Sing(eta_C | M*_C) = X1 u X2`` for F = Re(z_1^2 + ... + z_k^2) + H(z_1..z_k)."""
    F = realize(F) if F.kind == "w" else F
    shape = quadric_shape(F)
    FC = complexify(F)
    HC = complexify(shape.H)
    n, k = F.nvars, shape.k
    A = [HC.dz(j) for j in range(1, k + 1)]
    B = [HC.dw(j) for j in range(1, k + 1)]
    X1 = [ConjPolynomial.z(n, j, kind="w") + A[j - 1] for j in range(1, k + 1)]
    X2 = [ConjPolynomial.w(n, j, kind="w") + B[j - 1] for j in range(1, k + 1)]
    M1 = [p for p in (FC.dw(j) for j in range(1, n + 1)) if p]
    M2 = [p for p in (FC.dz(j) for j in range(1, n + 1)) if p]
    return EtaDecomposition(A, B, X1, X2, M1, M2, k, shape.branch)
