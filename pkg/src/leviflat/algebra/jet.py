"""Jets of holomorphic maps ``(C^n, 0) -> (C^n, 0)`` and substitution into series."""
from __future__ import annotations

from typing import Sequence

from .numbers import GaussianRational
from .poly import ConjPolynomial


class JetMap:
    """An n-tuple of holomorphic series without constant terms, truncated at ``degree``.

    Component ``k`` is the image of ``z_{k+1}``; all components live in the
    same ``nvars``-variable space.  The linear part must be invertible.
    """

    __slots__ = ("components", "degree")

    def __init__(self, components: Sequence[ConjPolynomial], degree: int | None = None, check: bool = True):
        comps = tuple(components)
        if not comps:
            raise ValueError("a jet map needs at least one component")
        m = comps[0].nvars
        for c in comps:
            if c.nvars != m:
                raise ValueError("components must share one variable space")
            if not c.is_holomorphic():
                raise ValueError("jet map components must be holomorphic")
            if c.constant_term():
                raise ValueError("jet map component has a non-vanishing constant term")
        if degree is None:
            degrees = [c.degree for c in comps if c.degree is not None]
            degree = min(degrees) if degrees else None
        comps = tuple(c.with_degree(degree) for c in comps)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "degree", degree)
        if check and len(comps) == m and not determinant(self.linear_part()):
            raise ValueError("jet map linear part is not invertible")

    def __setattr__(self, name, value):
        raise AttributeError("JetMap is immutable")

    @classmethod
    def identity(cls, n: int, degree: int | None = None) -> JetMap:
        return cls([ConjPolynomial.z(n, i, degree) for i in range(1, n + 1)], degree)

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, k: int) -> ConjPolynomial:
        return self.components[k]

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def linear_part(self) -> list:
        """Matrix ``D(0)`` with entry ``[k][j] = d(component k)/dx_j (0)``."""
        n = self.nvars
        rows = []
        for comp in self.components:
            row = []
            for j in range(n):
                mu = [0] * n
                mu[j] = 1
                row.append(comp.coefficient(mu))
            rows.append(row)
        return rows

    def has_block_shape(self, k: int) -> bool:
        """Linear part is ``[[id_k, *], [0, id_{n-k}]]``."""
        L = self.linear_part()
        n = len(L)
        for r in range(n):
            for s in range(n):
                if r == s:
                    if L[r][s] != 1:
                        return False
                elif r >= k and s < k:
                    if L[r][s]:
                        return False
                elif (r < k) == (s < k) and L[r][s]:
                    return False
        return True

    def images(self) -> list:
        """Slot images for substituting this map into a ConjPolynomial in (z, zbar)."""
        return list(self.components) + [c.conj() for c in self.components]

    def compose(self, inner: JetMap) -> JetMap:
        """``self o inner``, truncated at the smaller degree."""
        if len(inner) != self.nvars:
            raise ValueError("inner map has the wrong number of components")
        return JetMap([compose(c, inner) for c in self.components], check=False)

    def __matmul__(self, inner: JetMap) -> JetMap:
        return self.compose(inner)

    def inverse(self, degree: int | None = None) -> JetMap:
        """Compositional inverse by fixed-point iteration on ``x = L^{-1}(y - R(x))``."""
        degree = self.degree if degree is None else degree
        if degree is None:
            raise ValueError("inverse of an untruncated jet needs an explicit degree")
        n = self.nvars
        if len(self) != n:
            raise ValueError("only square jet maps are invertible")
        Linv = matrix_inverse(self.linear_part())
        lin = [c.filter_terms(lambda md: md.total == 1) for c in self.components]
        nonlin = [(c - l).with_degree(degree) for c, l in zip(self.components, lin)]
        ys = [ConjPolynomial.z(n, i, degree) for i in range(1, n + 1)]
        guess = JetMap([_lin_comb(Linv[k], ys, n, degree) for k in range(n)], degree, check=False)
        for _ in range(degree):
            r = [compose(c, guess) for c in nonlin]
            rhs = [y - ri for y, ri in zip(ys, r)]
            guess = JetMap([_lin_comb(Linv[k], rhs, n, degree) for k in range(n)], degree, check=False)
        return guess

    def to_record(self) -> dict:
        return {
            "degree": self.degree,
            "components": [c.to_record() for c in self.components],
            "linear_part": [[str(x) for x in row] for row in self.linear_part()],
        }

    def format(self, names: Sequence[str] | None = None) -> list:
        return [c.format(names) for c in self.components]

    def __repr__(self) -> str:
        return f"JetMap({self.format()}, N={self.degree})"


def _lin_comb(coeffs, polys, n, degree):
    acc = ConjPolynomial.zero(n, degree)
    for a, p in zip(coeffs, polys):
        if a:
            acc = acc + p.scale(a)
    return acc


def compose(f: ConjPolynomial, phi: JetMap, degree: int | None = None) -> ConjPolynomial:
    """``f o phi``: z-slots get ``phi``, zbar-slots the conjugated components."""
    if f.nvars != len(phi):
        raise ValueError(f"series has {f.nvars} variables but the map has {len(phi)} components")
    return f.substitute(phi.images(), degree)


def _gauss(matrix: list, augment: list | None = None):
    """Row reduction over Q(i); returns (reduced rows, pivot columns, sign)."""
    rows = [list(r) + (list(augment[i]) if augment else []) for i, r in enumerate(matrix)]
    ncols = len(matrix[0]) if matrix else 0
    pivots = []
    sign = 1
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
            sign = -sign
        inv = rows[r][col].inverse()
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return rows, pivots, sign


def determinant(matrix: list) -> GaussianRational:
    """Exact determinant of a square Gaussian-rational matrix."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows = [[GaussianRational.coerce(x) for x in row] for row in matrix]
    det = GaussianRational(1)
    for col in range(n):
        pr = next((i for i in range(col, n) if rows[i][col]), None)
        if pr is None:
            return GaussianRational(0)
        if pr != col:
            rows[col], rows[pr] = rows[pr], rows[col]
            det = -det
        det = det * rows[col][col]
        inv = rows[col][col].inverse()
        for i in range(col + 1, n):
            if rows[i][col]:
                f = rows[i][col] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    return det


def matrix_inverse(matrix: list) -> list:
    n = len(matrix)
    eye = [[GaussianRational(int(i == j)) for j in range(n)] for i in range(n)]
    rows, pivots, _ = _gauss([[GaussianRational.coerce(x) for x in r] for r in matrix], eye)
    if len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    out = []
    for i in range(n):
        inv = rows[i][i].inverse()
        out.append([x * inv for x in rows[i][n:]])
    return out


def matrix_rank(matrix: list) -> int:
    if not matrix:
        return 0
    _, pivots, _ = _gauss([[GaussianRational.coerce(x) for x in r] for r in matrix])
    return len(pivots)


def kernel_basis(matrix: list) -> list:
    """Basis of the right null space over Q(i), one vector per free column."""
    if not matrix:
        return []
    ncols = len(matrix[0])
    rows, pivots, _ = _gauss([[GaussianRational.coerce(x) for x in r] for r in matrix])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [GaussianRational(0)] * ncols
        v[fcol] = GaussianRational(1)
        for r, pcol in enumerate(pivots):
            v[pcol] = -rows[r][fcol] / rows[r][pcol]
        basis.append(v)
    return basis
