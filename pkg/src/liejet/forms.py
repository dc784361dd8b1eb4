"""Numerical exterior calculus on a coordinate chart.

A k-form on a chart of dimension d is stored as a coefficient function
returning an array of length C(d, k). Entry ``I`` multiplies
``dx^{i1} ^ ... ^ dx^{ik}`` for the I-th strictly increasing multi-index in
lexicographic order. Evaluation on vectors uses the determinant convention,
so ``(dx^1 ^ dx^2)(e1, e2) = 1``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import numdiff


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> tuple:
    return tuple(combinations(range(dim), degree))


@lru_cache(maxsize=None)
def _rank(dim: int, degree: int) -> dict:
    return {I: n for n, I in enumerate(multi_indices(dim, degree))}


@lru_cache(maxsize=None)
def _index_array(dim: int, degree: int) -> np.ndarray:
    idx = np.array(multi_indices(dim, degree), dtype=int)
    return idx.reshape(len(multi_indices(dim, degree)), degree)


def _sort_sign(seq):
    """Sign of the permutation sorting ``seq`` (which has distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _wedge_table(dim, p, q):
    rank = _rank(dim, p + q)
    ia, ib, ik, sg = [], [], [], []
    for a, I in enumerate(multi_indices(dim, p)):
        for b, J in enumerate(multi_indices(dim, q)):
            if set(I) & set(J):
                continue
            ia.append(a)
            ib.append(b)
            ik.append(rank[tuple(sorted(I + J))])
            sg.append(_sort_sign(I + J))
    return (np.array(ia, int), np.array(ib, int), np.array(ik, int), np.array(sg, float))


@lru_cache(maxsize=None)
def _interior_table(dim, k):
    rank = _rank(dim, k - 1)
    src, comp, dst, sg = [], [], [], []
    for a, I in enumerate(multi_indices(dim, k)):
        for pos, i in enumerate(I):
            src.append(a)
            comp.append(i)
            dst.append(rank[I[:pos] + I[pos + 1 :]])
            sg.append((-1.0) ** pos)
    return (np.array(src, int), np.array(comp, int), np.array(dst, int), np.array(sg, float))


@lru_cache(maxsize=None)
def _deriv_table(dim, k):
    rank = _rank(dim, k)
    src, comp, dst, sg = [], [], [], []
    for c, K in enumerate(multi_indices(dim, k + 1)):
        for pos, i in enumerate(K):
            src.append(rank[K[:pos] + K[pos + 1 :]])
            comp.append(i)
            dst.append(c)
            sg.append((-1.0) ** pos)
    return (np.array(src, int), np.array(comp, int), np.array(dst, int), np.array(sg, float))


def evaluate_coefficients(coeffs, vectors, dim, degree):
    """Evaluate a form with the given coefficient array on ``degree`` vectors."""
    coeffs = np.asarray(coeffs, dtype=float)
    if degree == 0:
        return float(coeffs[0])
    V = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
    if V.shape != (dim, degree):
        raise ValueError(f"expected {degree} vectors of length {dim}")
    idx = _index_array(dim, degree)
    minors = V[idx]
    return float(coeffs @ np.linalg.det(minors))


class FormField:
    """A differential form of fixed degree on a chart of dimension ``dim``."""

    __slots__ = ("degree", "dim", "_coeffs")

    def __init__(self, degree: int, dim: int, coeffs: Callable[[np.ndarray], np.ndarray]):
        if not 0 <= degree <= dim:
            raise ValueError(f"degree {degree} outside [0, {dim}]")
        self.degree = int(degree)
        self.dim = int(dim)
        self._coeffs = coeffs

    @property
    def size(self) -> int:
        return comb(self.dim, self.degree)

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self._coeffs(np.asarray(z, dtype=float)), dtype=float).reshape(self.size)

    def evaluate(self, z, vectors: Sequence = ()) -> float:
        return evaluate_coefficients(self(z), vectors, self.dim, self.degree)

    def frozen(self, z) -> "FormField":
        """Constant form equal to this one at ``z``."""
        return constant_form(self.degree, self.dim, self(z))

    def _check(self, other):
        if not isinstance(other, FormField):
            return NotImplemented
        if (other.degree, other.dim) != (self.degree, self.dim):
            raise ValueError("forms of different degree or chart")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f, g = self._coeffs, other._coeffs
        return FormField(self.degree, self.dim, lambda z: np.asarray(f(z)) + np.asarray(g(z)))

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        f = self._coeffs
        return FormField(self.degree, self.dim, lambda z: c * np.asarray(f(z)))

    __rmul__ = __mul__

    def __repr__(self):
        return f"FormField(degree={self.degree}, dim={self.dim})"


def constant_form(degree, dim, coeffs) -> FormField:
    c = np.array(coeffs, dtype=float).reshape(comb(dim, degree))
    return FormField(degree, dim, lambda z: c)


def zero_form(degree, dim) -> FormField:
    return constant_form(degree, dim, np.zeros(comb(dim, degree)))


def scalar_field(f: Callable, dim: int) -> FormField:
    """Wrap a scalar function as a 0-form."""
    return FormField(0, dim, lambda z: np.array([f(z)], dtype=float))


def coordinate_form(i: int, dim: int) -> FormField:
    c = np.zeros(dim)
    c[i] = 1.0
    return constant_form(1, dim, c)


def multiply(f: Callable, a: FormField) -> FormField:
    """Pointwise product of a scalar function and a form."""
    g = a._coeffs
    return FormField(a.degree, a.dim, lambda z: f(z) * np.asarray(g(z), dtype=float))


def as_vector_field(X) -> Callable:
    if callable(X):
        return X
    c = np.asarray(X, dtype=float)
    return lambda z: c


def wedge_coefficients(ca, p, cb, q, dim) -> np.ndarray:
    """Coefficients of ``a ^ b`` from those of a p-form and a q-form."""
    if p + q > dim:
        raise ValueError("degree overflow")
    ia, ib, ik, sg = _wedge_table(dim, p, q)
    ca = np.asarray(ca, dtype=float)
    cb = np.asarray(cb, dtype=float)
    return np.bincount(ik, weights=sg * ca[ia] * cb[ib], minlength=comb(dim, p + q))


def wedge(a: FormField, b: FormField) -> FormField:
    if a.dim != b.dim:
        raise ValueError("forms live on different charts")
    deg = a.degree + b.degree
    if deg > a.dim:
        raise ValueError(f"wedge degree {deg} exceeds chart dimension {a.dim}")
    ia, ib, ik, sg = _wedge_table(a.dim, a.degree, b.degree)
    size = comb(a.dim, deg)
    fa, fb = a._coeffs, b._coeffs

    def coeffs(z):
        ca = np.asarray(fa(z), dtype=float)
        cb = np.asarray(fb(z), dtype=float)
        return np.bincount(ik, weights=sg * ca[ia] * cb[ib], minlength=size)

    return FormField(deg, a.dim, coeffs)


def wedge_all(*forms: FormField) -> FormField:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior(X, a: FormField) -> FormField:
    """Contraction ``X _| a`` putting ``X`` in the first slot."""
    if a.degree == 0:
        raise ValueError("cannot contract a vector field with a 0-form")
    X = as_vector_field(X)
    src, comp, dst, sg = _interior_table(a.dim, a.degree)
    size = comb(a.dim, a.degree - 1)
    fa = a._coeffs

    def coeffs(z):
        ca = np.asarray(fa(z), dtype=float)
        x = np.asarray(X(z), dtype=float)
        return np.bincount(dst, weights=sg * x[comp] * ca[src], minlength=size)

    return FormField(a.degree - 1, a.dim, coeffs)


def ext_deriv(a: FormField, h=numdiff.DEFAULT_STEP) -> FormField:
    """Exterior derivative with central-difference partials (O(h^2))."""
    if a.degree >= a.dim:
        raise ValueError("exterior derivative of a top-degree form leaves the chart")
    src, comp, dst, sg = _deriv_table(a.dim, a.degree)
    size = comb(a.dim, a.degree + 1)
    fa = a._coeffs

    def coeffs(z):
        G = numdiff.jacobian(lambda w: np.asarray(fa(w), dtype=float), z, h)
        G = G.reshape(-1, a.dim)
        return np.bincount(dst, weights=sg * G[src, comp], minlength=size)

    return FormField(a.degree + 1, a.dim, coeffs)


def pullback(phi: Callable, a: FormField, dim: int, h=numdiff.DEFAULT_STEP) -> FormField:
    """Pull ``a`` back along ``phi`` from a chart of dimension ``dim``."""
    k = a.degree
    if k > dim:
        raise ValueError("pullback degree exceeds source dimension")
    idx_target = _index_array(a.dim, k)
    idx_source = _index_array(dim, k)
    fa = a._coeffs

    def coeffs(x):
        ca = np.asarray(fa(np.asarray(phi(x), dtype=float)), dtype=float)
        if k == 0:
            return ca
        D = numdiff.jacobian(phi, x, h).reshape(a.dim, dim)
        minors = D[idx_target[:, None, :, None], idx_source[None, :, None, :]]
        return ca @ np.linalg.det(minors)

    return FormField(k, dim, coeffs)


def lie_derivative(Z, a: FormField, h=numdiff.DEFAULT_STEP) -> FormField:
    """Lie derivative by Cartan's formula ``Z _| da + d(Z _| a)``."""
    if a.degree == a.dim:  # da = 0 for top forms
        return ext_deriv(interior(Z, a), h)
    out = interior(Z, ext_deriv(a, h))
    if a.degree > 0:
        out = out + ext_deriv(interior(Z, a), h)
    return out


def lie_bracket(X, Y, z, h=numdiff.DEFAULT_STEP) -> np.ndarray:
    """Bracket ``[X, Y] = DY X - DX Y`` of two vector fields at ``z``."""
    X = as_vector_field(X)
    Y = as_vector_field(Y)
    z = np.asarray(z, dtype=float)
    DX = numdiff.jacobian(X, z, h)
    DY = numdiff.jacobian(Y, z, h)
    return DY @ np.asarray(X(z), float) - DX @ np.asarray(Y(z), float)


# Volume form and its contractions on an embedded set of base axes.


def volume_form(dim: int, axes: Sequence[int] | None = None) -> FormField:
    """``dx^{a0} ^ ... ^ dx^{an}`` over ``axes`` (default: all coordinates)."""
    axes = tuple(range(dim)) if axes is None else tuple(axes)
    c = np.zeros(comb(dim, len(axes)))
    c[_rank(dim, len(axes))[tuple(sorted(axes))]] = _sort_sign(axes)
    return constant_form(len(axes), dim, c)


def unit_vector(i: int, dim: int) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


def dnx(mu: int, dim: int, axes: Sequence[int] | None = None) -> FormField:
    """``d^n x_mu``: the volume form contracted with the mu-th base direction."""
    axes = tuple(range(dim)) if axes is None else tuple(axes)
    return interior(unit_vector(axes[mu], dim), volume_form(dim, axes)).frozen(np.zeros(dim))


def dn1x(mu: int, nu: int, dim: int, axes: Sequence[int] | None = None) -> FormField:
    """``d^{n-1} x_{mu nu} = d_nu _| d^n x_mu``."""
    axes = tuple(range(dim)) if axes is None else tuple(axes)
    return interior(unit_vector(axes[nu], dim), dnx(mu, dim, axes)).frozen(np.zeros(dim))


# Lie-algebra-valued forms.


def structure_constants(bracket: Callable, n: int) -> np.ndarray:
    """``c[k, i, j]`` with ``[e_i, e_j] = c[k, i, j] e_k``."""
    E = np.eye(n)
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            c[:, i, j] = bracket(E[i], E[j])
    return c


class AlgebraForm:
    """A form with values in an n-dimensional Lie algebra.

    ``coeffs(z)`` returns an ``(n, C(dim, degree))`` array, one row per
    algebra basis element.
    """

    def __init__(self, degree, dim, rank, coeffs, bracket):
        self.degree = int(degree)
        self.dim = int(dim)
        self.rank = int(rank)
        self._coeffs = coeffs
        self.bracket = bracket
        self._c = None

    @classmethod
    def from_forms(cls, forms: Sequence[FormField], bracket) -> "AlgebraForm":
        forms = list(forms)
        deg, dim = forms[0].degree, forms[0].dim
        return cls(deg, dim, len(forms), lambda z: np.stack([f(z) for f in forms]), bracket)

    @property
    def bracket_constants(self):
        if self._c is None:
            self._c = structure_constants(self.bracket, self.rank)
        return self._c

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self._coeffs(np.asarray(z, dtype=float)), dtype=float)

    def component(self, i: int) -> FormField:
        return FormField(self.degree, self.dim, lambda z: self(z)[i])

    def evaluate(self, z, vectors=()) -> np.ndarray:
        c = self(z)
        return np.array([evaluate_coefficients(row, vectors, self.dim, self.degree) for row in c])

    def __add__(self, other: "AlgebraForm"):
        f, g = self._coeffs, other._coeffs
        return AlgebraForm(
            self.degree, self.dim, self.rank, lambda z: np.asarray(f(z)) + np.asarray(g(z)), self.bracket
        )

    def __mul__(self, c):
        f = self._coeffs
        return AlgebraForm(self.degree, self.dim, self.rank, lambda z: c * np.asarray(f(z)), self.bracket)

    __rmul__ = __mul__


def algebra_ext_deriv(a: AlgebraForm, h=numdiff.DEFAULT_STEP) -> AlgebraForm:
    comps = [ext_deriv(a.component(i), h) for i in range(a.rank)]
    return AlgebraForm.from_forms(comps, a.bracket)


def bracket_pair(alpha: AlgebraForm, beta: AlgebraForm) -> Callable:
    """``[alpha, beta](X, Y) = [alpha(X), beta(Y)]`` for algebra-valued 1-forms.

    The result is a bilinear map, alternating only when ``alpha is beta``.
    """
    if alpha.degree != 1 or beta.degree != 1:
        raise ValueError("bracket_pair is defined for 1-forms")

    def value(z, X, Y):
        return np.asarray(alpha.bracket(alpha.evaluate(z, [X]), beta.evaluate(z, [Y])), dtype=float)

    return value


def bracket_wedge(alpha: AlgebraForm, beta: AlgebraForm) -> AlgebraForm:
    """``[alpha ^ beta] = alpha^i ^ beta^j (x) [e_i, e_j]``.

    For 1-forms this equals ``[alpha, beta] + [beta, alpha]`` in the
    notation of :func:`bracket_pair`.
    """
    deg = alpha.degree + beta.degree
    if deg > alpha.dim:
        raise ValueError("degree overflow")
    ia, ib, ik, sg = _wedge_table(alpha.dim, alpha.degree, beta.degree)
    size = comb(alpha.dim, deg)
    c = alpha.bracket_constants
    fa, fb = alpha._coeffs, beta._coeffs

    def coeffs(z):
        A = np.asarray(fa(z), dtype=float)[:, ia] * sg
        B = np.asarray(fb(z), dtype=float)[:, ib]
        terms = np.einsum("kij,it,jt->kt", c, A, B)
        return np.stack([np.bincount(ik, weights=t, minlength=size) for t in terms])

    return AlgebraForm(deg, alpha.dim, alpha.rank, coeffs, alpha.bracket)


def self_bracket(alpha: AlgebraForm) -> AlgebraForm:
    """``[alpha, alpha]`` as a 2-form, i.e. half of ``[alpha ^ alpha]``."""
    return 0.5 * bracket_wedge(alpha, alpha)
