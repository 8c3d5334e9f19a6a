"""Element-level calculus: absolute values, norms, positivity,
orthogonality and the classification predicates.

Every "=" in a defining equation is evaluated as an operator-norm
distance at a predicate tolerance; element equality uses the same
semantics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernel
from .algebra import Element, dilate, order_unit, zero
from .errors import LevelMismatch, ShapeMismatch, ZeroOperand

TOL_PRED = 1e-9
TOL_BISECT = 1e-9


def _uniform_stack(v: Element):
    """All components as one batch when they share a shape (circle model,
    or single-block fd); None otherwise."""
    if len({a.shape for a in v.data}) == 1:
        return v.stack()
    return None


def abs_value(v: Element) -> Element:
    """|v| = (v* v)^{1/2}, computed blockwise / pointwise."""
    st = _uniform_stack(v)
    if st is not None:
        g = st.conj().transpose(0, 2, 1) @ st
        g = (g + g.conj().transpose(0, 2, 1)) / 2.0
        roots = kernel.sqrtm_psd_stack(g)
        mats = [roots[i] for i in range(roots.shape[0])]
    else:
        mats = []
        for a in v.data:
            g = a.conj().T @ a
            g = (g + g.conj().T) / 2.0
            mats.append(kernel.sqrtm_psd_stack(g[None])[0])
    return Element(v.algebra, v.col_level, v.col_level, tuple(mats))


def op_norm(v: Element) -> float:
    """Largest singular value over all blocks / grid samples.

    In both models this equals the order-unit norm; the public
    ``order_unit_norm`` additionally realizes the PSD-bisection
    characterization.
    """
    st = _uniform_stack(v)
    if st is not None:
        return kernel.spectral_norm_stack(st)
    return max(kernel.spectral_norm_stack(a[None]) for a in v.data)


def distance(u: Element, v: Element) -> float:
    if not u.same_shape(v):
        raise ShapeMismatch("distance needs identical shapes")
    return op_norm(u - v)


def elements_equal(u: Element, v: Element, tol: float = TOL_PRED) -> bool:
    return distance(u, v) <= tol


def order_unit_norm(v: Element, tol_bisect: float = TOL_BISECT) -> float:
    """Order-unit norm by bisection over PSD feasibility.

    ||v|| = inf { k : [[k e^n, v], [v*, k e^n]] >= 0 }; rectangular
    elements are handled through the self-adjoint dilation, which has
    the same norm.
    """
    if not v.is_square_level:
        v = dilate(v)

    groups = []
    st = _uniform_stack(v)
    if st is not None:
        groups.append(st)
    else:
        groups.extend(a[None] for a in v.data)

    def feasible(k: float) -> bool:
        for g in groups:
            b, n, _ = g.shape
            big = np.zeros((b, 2 * n, 2 * n), dtype=complex)
            idx = np.arange(2 * n)
            big[:, idx, idx] = k
            big[:, :n, n:] = g
            big[:, n:, :n] = g.conj().transpose(0, 2, 1)
            if not kernel.cholesky_feasible_stack(big):
                return False
        return True

    hi = 1.0 + max((float(np.sqrt(np.sum(np.abs(a) ** 2))) if a.size else 0.0)
                   for a in v.data)
    lo = 0.0
    while hi - lo > tol_bisect:
        mid = (hi + lo) / 2.0
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return (hi + lo) / 2.0


def is_selfadjoint(v: Element, tol: float = TOL_PRED) -> bool:
    if not v.is_square_level:
        return False
    return all((float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0) <= tol
               for a in v.data)


def is_positive(v: Element, tol: float = TOL_PRED) -> bool:
    """Self-adjoint with every block / grid sample PSD within tol."""
    if not v.is_square_level:
        raise LevelMismatch("positivity needs a square-level element")
    if not is_selfadjoint(v, tol):
        return False
    st = _uniform_stack(v)
    if st is not None:
        if st.shape[1] == 0:
            return True
        h = (st + st.conj().transpose(0, 2, 1)) / 2.0
        return float(np.min(kernel.min_eig_stack(h))) >= -tol
    for a in v.data:
        h = (a + a.conj().T) / 2.0
        if a.size and float(np.min(kernel.min_eig_stack(h[None]))) < -tol:
            return False
    return True


@dataclass(frozen=True)
class ElementClass:
    is_selfadjoint: bool
    is_positive: bool
    is_order_projection: bool
    is_partial_isometry: bool
    is_unitary: bool
    is_partial_unitary: bool


def is_order_projection(v: Element, tol: float = TOL_PRED) -> bool:
    """v* = v and |2v - e^n| = e^n."""
    if not v.is_square_level:
        return False
    if not is_selfadjoint(v, tol):
        return False
    e = order_unit(v.algebra, v.row_level)
    return distance(abs_value(v.scale(2.0) - e), e) <= tol


def is_partial_isometry(v: Element, tol: float = TOL_PRED) -> bool:
    """|v| and |v*| are both order projections."""
    return (is_order_projection(abs_value(v), tol)
            and is_order_projection(abs_value(v.adjoint()), tol))


def is_unitary(v: Element, tol: float = TOL_PRED) -> bool:
    """|v| = e^n = |v*|."""
    if not v.is_square_level:
        raise LevelMismatch("unitarity is defined at square levels only")
    e = order_unit(v.algebra, v.row_level)
    return (distance(abs_value(v), e) <= tol
            and distance(abs_value(v.adjoint()), e) <= tol)


def is_partial_unitary(v: Element, tol: float = TOL_PRED) -> bool:
    """|v| = |v*| is an order projection."""
    if not v.is_square_level:
        raise LevelMismatch("partial unitarity is defined at square levels only")
    av = abs_value(v)
    avs = abs_value(v.adjoint())
    return distance(av, avs) <= tol and is_order_projection(av, tol)


def classify(v: Element, tol: float = TOL_PRED) -> ElementClass:
    """Evaluate every defining predicate at the given tolerance.

    The square-only flags (unitary, partial unitary, order projection)
    are False for rectangular input.
    """
    sa = is_selfadjoint(v, tol)
    pos = v.is_square_level and is_positive(v, tol)
    if v.is_square_level:
        av = abs_value(v)
        avs = abs_value(v.adjoint())
        e = order_unit(v.algebra, v.row_level)
        proj_av = is_order_projection(av, tol)
        proj_avs = is_order_projection(avs, tol)
        op = sa and distance(abs_value(v.scale(2.0) - e), e) <= tol
        pi = proj_av and proj_avs
        uni = distance(av, e) <= tol and distance(avs, e) <= tol
        pu = distance(av, avs) <= tol and proj_av
    else:
        pi = is_partial_isometry(v, tol)
        op = uni = pu = False
    return ElementClass(is_selfadjoint=sa, is_positive=pos,
                        is_order_projection=op, is_partial_isometry=pi,
                        is_unitary=uni, is_partial_unitary=pu)


def orthogonal_positive(u: Element, v: Element, tol: float = TOL_PRED) -> bool:
    """|u - v| = u + v, the defining equation for positive pairs."""
    return distance(abs_value(u - v), u + v) <= tol


def orthogonal(u: Element, v: Element, tol: float = TOL_PRED) -> bool:
    """Absolute-value orthogonality u _|_ v.

    For positive pairs this is the defining equation; in general it
    reduces to |u| _|_ |v| and |u*| _|_ |v*| on positives.
    """
    if not u.same_shape(v):
        raise ShapeMismatch("orthogonality needs identical shapes")
    if u.is_square_level and is_positive(u, tol) and is_positive(v, tol):
        return orthogonal_positive(u, v, tol)
    return (orthogonal_positive(abs_value(u), abs_value(v), tol)
            and orthogonal_positive(abs_value(u.adjoint()),
                                    abs_value(v.adjoint()), tol))


def orthogonal_infty(u: Element, v: Element, tol: float = TOL_PRED) -> bool:
    """Norm orthogonality of nonzero positives:
    || u/||u|| + v/||v|| || = 1."""
    if not u.same_shape(v):
        raise ShapeMismatch("orthogonality needs identical shapes")
    nu = op_norm(u)
    nv = op_norm(v)
    if nu <= tol or nv <= tol:
        raise ZeroOperand("norm orthogonality needs nonzero operands")
    return abs(op_norm(u.scale(1.0 / nu) + v.scale(1.0 / nv)) - 1.0) <= tol


def orthogonal_infty_a(u: Element, v: Element, tol: float = TOL_PRED) -> bool:
    """Algebraic orthogonality of positives: the product uv vanishes."""
    if not u.same_shape(v):
        raise ShapeMismatch("orthogonality needs identical shapes")
    return u.matmul(v).max_abs() <= tol


def support_decomposition(p: Element, tol: float = TOL_PRED):
    """Range / kernel orthonormal bases of an order projection.

    Returns, per component, a pair (R, K): columns of R span the range
    (eigenvalues near 1), columns of K the kernel.  Raises nothing by
    itself; rank validation lives in the equivalence engine.
    """
    out = []
    for a in p.data:
        h = (a + a.conj().T) / 2.0
        w, V = kernel.jacobi_eig_stack(h[None])
        w, V = w[0], V[0]
        keep = w > 0.5
        out.append((V[:, keep], V[:, ~keep]))
    return out
