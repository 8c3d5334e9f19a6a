"""Named property suites over a model algebra.

Each property draws its inputs from a per-trial RNG stream derived from
(seed, trial index), measures a residual, and records any trial whose
residual exceeds the property tolerance.  The same suites back the
command-line ``check-axioms`` run and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import equivalence as eqv
from . import model, rand
from .algebra import (CIRCLE, FD, AlgebraSpec, Element, dilate, direct_sum,
                      order_unit, scalar_conjugate, zero)
from .errors import AmokError

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = 200
    tol_pred: float = model.TOL_PRED
    tol_path: float = eqv.TOL_PATH
    tol_bisect: float = model.TOL_BISECT


@dataclass
class PropertyResult:
    name: str
    trials: int
    worst_residual: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"name": self.name, "trials": self.trials,
                "worst_residual": self.worst_residual,
                "failures": self.failures, "passed": self.passed}


def _run(name: str, cfg: RunConfig, trials: int, fn,
         tol: float = RESIDUAL_TOL) -> PropertyResult:
    worst = 0.0
    failures = []
    for t in range(trials):
        rng = rand.stream(cfg.seed, t)
        try:
            res = float(fn(rng, t))
        except AmokError as exc:
            failures.append({"trial": t, "seed": cfg.seed,
                             "error": f"{type(exc).__name__}: {exc}"})
            continue
        worst = max(worst, res)
        if res > tol:
            failures.append({"trial": t, "seed": cfg.seed, "residual": res})
    return PropertyResult(name, trials, worst, failures)


def _bool(ok) -> float:
    return 0.0 if ok else 1.0


def _neg_part(v: Element) -> float:
    """How far a self-adjoint element is from being positive."""
    from . import kernel
    st = model._uniform_stack(v)
    if st is not None:
        if st.shape[1] == 0:
            return 0.0
        h = (st + st.conj().transpose(0, 2, 1)) / 2.0
        return max(-float(np.min(kernel.min_eig_stack(h))), 0.0)
    worst = 0.0
    for a in v.data:
        h = (a + a.conj().T) / 2.0
        if h.size:
            worst = max(worst, -float(np.min(kernel.min_eig_stack(h[None]))))
    return max(worst, 0.0)


def _levels(rng):
    return int(rng.integers(1, 4)), int(rng.integers(1, 4))


# -- element-calculus properties -------------------------------------------

def model_suite(algebra: AlgebraSpec, cfg: RunConfig) -> list:
    results = []
    t_all = cfg.trials
    t_slow = max(10, cfg.trials // 4)

    def abs_scalar_contraction(rng, t):
        m, n = _levels(rng)
        r, s = _levels(rng)
        v = rand.element(rng, algebra, m, n)
        alpha = (rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m)))
        beta = (rng.standard_normal((n, s)) + 1j * rng.standard_normal((n, s)))
        lhs = model.abs_value(scalar_conjugate(alpha, v, beta))
        vb = scalar_conjugate(np.eye(n), model.abs_value(v), beta)
        rhs = model.abs_value(vb).scale(float(np.linalg.norm(alpha, 2)))
        return _neg_part(rhs - lhs)

    results.append(_run("abs-scalar-contraction", cfg, t_all,
                        abs_scalar_contraction))

    def abs_direct_sum(rng, t):
        m, n = _levels(rng)
        u = rand.element(rng, algebra, m, n)
        w = rand.element(rng, algebra, n, m)
        lhs = model.abs_value(direct_sum(u, w))
        rhs = direct_sum(model.abs_value(u), model.abs_value(w))
        return model.distance(lhs, rhs)

    results.append(_run("abs-direct-sum", cfg, t_all, abs_direct_sum))

    def abs_dilation(rng, t):
        m, n = _levels(rng)
        v = rand.element(rng, algebra, m, n)
        lhs = model.abs_value(dilate(v))
        rhs = direct_sum(model.abs_value(v.adjoint()), model.abs_value(v))
        return model.distance(lhs, rhs)

    results.append(_run("abs-dilation", cfg, t_all, abs_dilation))

    def abs_corner_positive(rng, t):
        m, n = _levels(rng)
        v = rand.element(rng, algebra, m, n)
        top = model.abs_value(v.adjoint())
        bot = model.abs_value(v)
        mats = []
        for a, x, b in zip(top.data, v.data, bot.data):
            big = np.block([[a, x], [x.conj().T, b]])
            mats.append(big)
        corner = Element(algebra, m + n, m + n, tuple(mats))
        return _neg_part(corner)

    results.append(_run("abs-corner-positive", cfg, t_all, abs_corner_positive))

    def abs_idempotent(rng, t):
        m, n = _levels(rng)
        a = model.abs_value(rand.element(rng, algebra, m, n))
        return model.distance(model.abs_value(a), a)

    results.append(_run("abs-idempotent-on-positives", cfg, t_all,
                        abs_idempotent))

    def orth_sum_iff(rng, t):
        n = int(rng.integers(1, 4))
        u, v = rand.orthogonal_pair(rng, algebra, n)
        res = 0.0
        for a, b in ((u, v), (u.adjoint(), v.adjoint())):
            for sign in (1.0, -1.0):
                lhs = model.abs_value(a + b.scale(sign))
                rhs = model.abs_value(a) + model.abs_value(b)
                res = max(res, model.distance(lhs, rhs))
        # converse: a generic dense pair is not orthogonal and breaks
        # at least one of the sum identities
        x = rand.element(rng, algebra, n, n)
        y = rand.element(rng, algebra, n, n)
        if not model.orthogonal(x, y):
            gap = model.distance(model.abs_value(x + y),
                                 model.abs_value(x) + model.abs_value(y))
            if gap <= cfg.tol_pred:
                gap = model.distance(model.abs_value(x - y),
                                     model.abs_value(x) + model.abs_value(y))
                if gap <= cfg.tol_pred:
                    res = max(res, 1.0)
        return res

    results.append(_run("orthogonality-sum-iff", cfg, t_all, orth_sum_iff))

    def orth_scalar_invariance(rng, t):
        n = int(rng.integers(1, 4))
        u, v = rand.orthogonal_pair(rng, algebra, n)
        alpha, beta = rand._cnormal(rng, (2,))
        return _bool(model.orthogonal(u.scale(alpha), v.scale(beta)))

    results.append(_run("orthogonality-scalar-invariance", cfg, t_all,
                        orth_scalar_invariance))

    def orth_equals_algebraic(rng, t):
        n = int(rng.integers(1, 4))
        u, v = rand.positive_orthogonal_pair(rng, algebra, n)
        ok = model.orthogonal(u, v) and model.orthogonal_infty_a(u, v)
        # the normalized-sum characterization only covers nonzero operands
        if min(model.op_norm(u), model.op_norm(v)) > cfg.tol_pred:
            ok = ok and model.orthogonal_infty(u, v)
        x = rand.positive(rng, algebra, n)
        y = rand.positive(rng, algebra, n)
        ok = ok and (model.orthogonal(x, y) == model.orthogonal_infty_a(x, y))
        return _bool(ok)

    results.append(_run("orthogonal-equals-algebraic", cfg, t_all,
                        orth_equals_algebraic))

    def norm_bisect_agreement(rng, t):
        m, n = _levels(rng)
        v = rand.element(rng, algebra, m, n)
        return abs(model.order_unit_norm(v, cfg.tol_bisect) - model.op_norm(v))

    results.append(_run("norm-bisection-agreement", cfg, t_slow,
                        norm_bisect_agreement, tol=10 * cfg.tol_bisect))

    def norm_direct_sum_max(rng, t):
        m, n = _levels(rng)
        u = rand.element(rng, algebra, m, m)
        w = rand.element(rng, algebra, n, n)
        lhs = model.order_unit_norm(direct_sum(u, w), cfg.tol_bisect)
        return abs(lhs - max(model.op_norm(u), model.op_norm(w)))

    results.append(_run("norm-direct-sum-max", cfg, t_slow,
                        norm_direct_sum_max, tol=10 * cfg.tol_bisect))

    def isometry_abs(rng, t):
        m, n = _levels(rng)
        r = m + int(rng.integers(0, 3))
        v = rand.element(rng, algebra, m, n)
        g = rand._cnormal(rng, (r, m))
        q, _ = np.linalg.qr(g)
        alpha = q[:, :m]
        lhs = model.abs_value(scalar_conjugate(alpha, v, np.eye(n)))
        return model.distance(lhs, model.abs_value(v))

    results.append(_run("isometry-preserves-abs", cfg, t_all, isometry_abs))

    def unitary_conj_abs(rng, t):
        n = int(rng.integers(1, 4))
        v = rand.element(rng, algebra, n, n)
        g = rand._cnormal(rng, (n, n))
        q, _ = np.linalg.qr(g)
        lhs = model.abs_value(scalar_conjugate(q.conj().T, v, q))
        rhs = scalar_conjugate(q.conj().T, model.abs_value(v), q)
        return model.distance(lhs, rhs)

    results.append(_run("unitary-scalar-conjugation-abs", cfg, t_all,
                        unitary_conj_abs))

    def classify_lattice(rng, t):
        n = int(rng.integers(1, 3))
        ok = True
        for maker in (rand.projection, rand.partial_unitary):
            c = model.classify(maker(rng, algebra, n))
            if c.is_order_projection and not (
                    c.is_selfadjoint and c.is_positive and c.is_partial_unitary):
                ok = False
            if c.is_unitary and not (c.is_partial_isometry and c.is_partial_unitary):
                ok = False
        u = rand.unitary(rng, algebra, n)
        cu = model.classify(u)
        ok = ok and cu.is_unitary and cu.is_partial_isometry and cu.is_partial_unitary
        p = model.classify(rand.projection(rng, algebra, n))
        ok = ok and p.is_order_projection
        return _bool(ok)

    results.append(_run("classify-implication-lattice", cfg, t_slow,
                        classify_lattice))

    def abs_continuity(rng, t):
        n = int(rng.integers(1, 4))
        v = rand.element(rng, algebra, n, n)
        res = 0.0
        for delta in (1e-2, 1e-4, 1e-6):
            d = rand.element(rng, algebra, n, n, scale=delta)
            gap = model.distance(model.abs_value(v + d), model.abs_value(v))
            # square-root Hoelder bound with a generous stable constant
            if gap > 40.0 * np.sqrt(delta):
                res = max(res, gap)
        return res

    results.append(_run("abs-continuity", cfg, t_slow, abs_continuity))

    return results


# -- equivalence properties ------------------------------------------------

def equivalence_suite(algebra: AlgebraSpec, cfg: RunConfig) -> list:
    results = []
    t_fast = max(10, cfg.trials // 4)
    t_path = max(5, cfg.trials // 20)

    def _rand_proj_pair_same_rank(rng, level):
        if algebra.variant == FD:
            ranks = [int(rng.integers(0, level * d + 1))
                     for d in algebra.block_dims]
        else:
            ranks = int(rng.integers(0, level * algebra.dim + 1))
        return (rand.projection(rng, algebra, level, ranks),
                rand.projection(rng, algebra, level, ranks))

    def proj_pad(rng, t):
        p = rand.projection(rng, algebra, 1)
        left = direct_sum(zero(algebra, 1), p)
        right = direct_sum(p, zero(algebra, 1))
        ok1, c1 = eqv.stabilized_projection_equiv(p, left)
        ok2, c2 = eqv.stabilized_projection_equiv(p, right)
        return _bool(ok1 and ok2 and c1.validate() and c2.validate())

    results.append(_run("projection-zero-padding", cfg, t_fast, proj_pad))

    def proj_sum_compat(rng, t):
        p, p2 = _rand_proj_pair_same_rank(rng, 1)
        q, q2 = _rand_proj_pair_same_rank(rng, 1)
        ok, cert = eqv.mvn_equivalent(direct_sum(p, q), direct_sum(p2, q2))
        return _bool(ok and cert.validate())

    results.append(_run("projection-sum-compatible", cfg, t_fast,
                        proj_sum_compat))

    def proj_swap(rng, t):
        p = rand.projection(rng, algebra, 1)
        q = rand.projection(rng, algebra, 1)
        ok, cert = eqv.mvn_equivalent(direct_sum(p, q), direct_sum(q, p))
        return _bool(ok and cert.validate())

    results.append(_run("projection-swap", cfg, t_fast, proj_swap))

    def proj_orth_add(rng, t):
        u, v = rand.positive_orthogonal_pair(rng, algebra, 1)
        # snap the disjoint-support positives to projections
        p = _support_projection(u)
        q = _support_projection(v)
        if not model.orthogonal(p, q, cfg.tol_pred):
            return 1.0
        ok, cert = eqv.mvn_equivalent(p + q, direct_sum(p, q))
        return _bool(ok and cert.validate())

    results.append(_run("orthogonal-sum-matches-direct-sum", cfg, t_fast,
                        proj_orth_add))

    def condition_t(rng, t):
        p = rand.projection(rng, algebra, 2)
        u = rand.unitary(rng, algebra, 2).matmul(p)
        v = rand.unitary(rng, algebra, 2).matmul(p)
        cu = eqv.PartialIsometryCertificate(
            u, model.abs_value(u), model.abs_value(u.adjoint()))
        cv = eqv.PartialIsometryCertificate(
            v, model.abs_value(v), model.abs_value(v.adjoint()))
        w = eqv.condition_T_transport(cu, cv)
        return _bool(w.validate())

    results.append(_run("condition-T-transport", cfg, t_fast, condition_t))

    def unitary_homotopy(rng, t):
        w = int(rng.integers(-2, 3)) if algebra.variant == CIRCLE else 0
        u = rand.unitary(rng, algebra, 2, winding=w)
        v = rand.unitary(rng, algebra, 2, winding=w)
        ok, path = eqv.homotopic_unitaries(u, v)
        return _bool(ok and path.validate(cfg.tol_path))

    results.append(_run("unitary-homotopy-paths", cfg, t_path,
                        unitary_homotopy))

    def sim1_laws(rng, t):
        ws = [int(rng.integers(-1, 2)) if algebra.variant == CIRCLE else 0
              for _ in range(2)]
        u = rand.unitary(rng, algebra, 1, winding=ws[0])
        v = rand.unitary(rng, algebra, 1, winding=ws[0])
        w = rand.unitary(rng, algebra, 2, winding=ws[1])
        ok = eqv.sim1_equivalent(u, u)[0]                      # reflexive
        uv = eqv.sim1_equivalent(u, v)[0]
        ok = ok and uv == eqv.sim1_equivalent(v, u)[0]         # symmetric
        if uv and eqv.sim1_equivalent(v, w)[0]:                # transitive
            ok = ok and eqv.sim1_equivalent(u, w)[0]
        return _bool(ok)

    results.append(_run("sim1-equivalence-laws", cfg, t_path, sim1_laws))

    def simK_laws(rng, t):
        if algebra.variant == FD:
            ranks = [int(rng.integers(0, d + 1)) for d in algebra.block_dims]
            u = rand.partial_unitary(rng, algebra, 1, ranks)
            v = rand.partial_unitary(rng, algebra, 1, ranks)
        else:
            w0 = int(rng.integers(-1, 2))
            u = rand.partial_unitary(rng, algebra, 1, algebra.dim, winding=w0)
            v = rand.partial_unitary(rng, algebra, 1, algebra.dim, winding=w0)
        ok = eqv.simK_equivalent(u, u)[0]
        uv = eqv.simK_equivalent(u, v)[0]
        ok = ok and uv == eqv.simK_equivalent(v, u)[0]
        return _bool(ok)

    results.append(_run("simK-equivalence-laws", cfg, t_path, simK_laws))

    def approx_consistency(rng, t):
        w0 = int(rng.integers(-1, 2)) if algebra.variant == CIRCLE else 0
        w1 = int(rng.integers(-1, 2)) if algebra.variant == CIRCLE else 0
        u = rand.unitary(rng, algebra, 1, winding=w0)
        v = rand.unitary(rng, algebra, 1, winding=w1)
        w = rand.unitary(rng, algebra, 1, winding=0)
        lhs = eqv.sim1_equivalent(direct_sum(u, w), direct_sum(v, w))[0]
        rhs = eqv.approx1_equivalent(u, v)[0]
        return _bool(lhs == rhs)

    results.append(_run("stabilization-consistency", cfg, t_path,
                        approx_consistency))

    def cancellation(rng, t):
        if algebra.variant == FD:
            r1 = [int(rng.integers(0, d + 1)) for d in algebra.block_dims]
            r2 = [int(rng.integers(0, d + 1)) for d in algebra.block_dims]
            rw = [int(rng.integers(0, d + 1)) for d in algebra.block_dims]
            u = rand.partial_unitary(rng, algebra, 1, r1)
            v = rand.partial_unitary(rng, algebra, 1, r2)
            w = rand.partial_unitary(rng, algebra, 1, rw)
        else:
            n = algebra.dim
            u = rand.partial_unitary(rng, algebra, 1, n, winding=int(rng.integers(-1, 2)))
            v = rand.partial_unitary(rng, algebra, 1, n, winding=int(rng.integers(-1, 2)))
            w = rand.partial_unitary(rng, algebra, 1, n, winding=0)
        try:
            lhs = eqv.simK_equivalent(direct_sum(u, w), direct_sum(v, w))[0]
            rhs = eqv.simK_equivalent(u, v)[0]
        except AmokError:
            return 0.0   # outside the decidable circle fragment
        return _bool(lhs == rhs)

    results.append(_run("simK-cancellation", cfg, t_path, cancellation))

    return results


def _support_projection(u: Element) -> Element:
    """Spectral support projection of a positive element."""
    from . import kernel
    st = model._uniform_stack(u)
    if st is not None:
        h = (st + st.conj().transpose(0, 2, 1)) / 2.0
        w, V = kernel.jacobi_eig_stack(h)
        keep = (w > 0.1).astype(float)
        m = (V * keep[:, None, :]) @ V.conj().transpose(0, 2, 1)
        m = (m + m.conj().transpose(0, 2, 1)) / 2.0
        return Element(u.algebra, u.row_level, u.col_level,
                       tuple(m[i] for i in range(m.shape[0])))
    mats = []
    for a in u.data:
        h = (a + a.conj().T) / 2.0
        w, V = kernel.jacobi_eig_stack(h[None])
        keep = (w[0] > 0.1).astype(float)
        m = (V[0] * keep[None, :]) @ V[0].conj().T
        mats.append((m + m.conj().T) / 2.0)
    return Element(u.algebra, u.row_level, u.col_level, tuple(mats))


def check_axioms(algebra: AlgebraSpec, cfg: RunConfig) -> list:
    return model_suite(algebra, cfg) + equivalence_suite(algebra, cfg)
