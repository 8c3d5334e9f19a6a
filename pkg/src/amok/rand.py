"""Seeded random generators for elements, unitaries, projections.

Streams are Philox counter-based: trial t of a run with seed s draws
from ``stream(s, t)``, so any failure reproduces from (seed, trial)
alone.  Recipes (documented in the README and fixed as contract):

* element: i.i.d. complex standard normal entries; circle-model
  elements are trigonometric polynomials of degree <= grid/4 with
  normal coefficients, evaluated on the grid.
* unitary: exp(i H) for a random Hermitian H; circle unitaries carry an
  optional winding w through a diag(z^w, 1, ..., 1) factor.
* projection: unitary conjugate of a 0/1 diagonal.
* partial isometry: truncated unitary u p.
* partial unitary: unitary conjugate of (corner unitary) + (zero block).
"""

from __future__ import annotations

import numpy as np

from . import kernel
from .algebra import CIRCLE, FD, AlgebraSpec, Element


def stream(seed: int, trial: int = 0) -> np.random.Generator:
    """Independent generator for one trial of a seeded run."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence([int(seed), int(trial)])))


def _cnormal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _expi(H: np.ndarray) -> np.ndarray:
    """exp(i H) for Hermitian H through the eigenbasis."""
    H = (H + H.conj().T) / 2.0
    w, V = kernel.jacobi_eig_stack(H[None])
    return (V[0] * np.exp(1j * w[0])[None, :]) @ V[0].conj().T


def _trig_coeffs(rng, algebra, shape, deg=None):
    """Matrix coefficients of a trig polynomial of degree <= grid/4."""
    if deg is None:
        deg = max(1, algebra.grid_points // 4)
    ks = np.arange(-deg, deg + 1)
    coeffs = _cnormal(rng, (len(ks),) + shape) / np.sqrt(len(ks))
    return ks, coeffs


def _trig_eval(algebra, ks, coeffs):
    zs = algebra.sample_points()
    vals = []
    for z in zs:
        vals.append(np.tensordot(z ** ks, coeffs, axes=(0, 0)))
    return vals


def element(rng, algebra: AlgebraSpec, row_level: int, col_level: int,
            scale: float = 1.0) -> Element:
    """Random dense element; circle data is band-limited by design."""
    if algebra.variant == FD:
        mats = [scale * _cnormal(rng, (row_level * d, col_level * d))
                for d in algebra.block_dims]
    else:
        shape = (row_level * algebra.dim, col_level * algebra.dim)
        ks, coeffs = _trig_coeffs(rng, algebra, shape)
        mats = [scale * m for m in _trig_eval(algebra, ks, coeffs)]
    return Element(algebra, row_level, col_level, tuple(mats))


def hermitian(rng, algebra: AlgebraSpec, level: int,
              scale: float = 1.0) -> Element:
    v = element(rng, algebra, level, level, scale)
    return (v + v.adjoint()).scale(0.5)


def positive(rng, algebra: AlgebraSpec, level: int,
             scale: float = 1.0) -> Element:
    v = element(rng, algebra, level, level, scale)
    return v.adjoint().matmul(v)


def _hermitian_fields(rng, algebra, level, size=None):
    """Per-component Hermitian matrices; circle ones vary slowly.

    Circle fields are kept at degree <= grid/16 with unit scale so that
    phase increments of derived unitaries between neighbouring grid
    points stay well below pi (needed by the winding estimator).
    """
    if algebra.variant == FD:
        out = []
        for d in algebra.block_dims:
            h = _cnormal(rng, (level * d, level * d))
            out.append((h + h.conj().T) / 2.0)
        return out
    n = level * algebra.dim if size is None else size
    ks, coeffs = _trig_coeffs(rng, algebra, (n, n),
                              deg=max(1, algebra.grid_points // 16))
    # enforce pointwise Hermitianity: c_{-k} = c_k^*
    deg = (len(ks) - 1) // 2
    for i, k in enumerate(ks):
        if k > 0:
            coeffs[i] = coeffs[deg - k].conj().transpose(1, 0)
        elif k == 0:
            coeffs[i] = (coeffs[i] + coeffs[i].conj().T) / 2.0
    return _trig_eval(algebra, ks, coeffs)


def unitary(rng, algebra: AlgebraSpec, level: int, winding: int = 0) -> Element:
    """exp(i H) per component; circle model twists by diag(z^w, 1, ...)."""
    mats = [_expi(h) for h in _hermitian_fields(rng, algebra, level)]
    if algebra.variant == CIRCLE and winding != 0:
        zs = algebra.sample_points()
        for j, z in enumerate(zs):
            tw = np.eye(level * algebra.dim, dtype=complex)
            tw[0, 0] = z ** winding
            mats[j] = mats[j] @ tw
    return Element(algebra, level, level, tuple(mats))


def projection(rng, algebra: AlgebraSpec, level: int, ranks=None) -> Element:
    """Unitary conjugate of a 0/1 diagonal with the given rank(s).

    ranks: per-block list for the fd model, single int for circle;
    None draws ranks uniformly.
    """
    w = unitary(rng, algebra, level)
    if algebra.variant == FD:
        sizes = [level * d for d in algebra.block_dims]
        if ranks is None:
            ranks = [int(rng.integers(0, s + 1)) for s in sizes]
        diags = [np.diag([1.0] * r + [0.0] * (s - r)).astype(complex)
                 for r, s in zip(ranks, sizes)]
    else:
        s = level * algebra.dim
        if ranks is None:
            ranks = int(rng.integers(0, s + 1))
        d = np.diag([1.0] * ranks + [0.0] * (s - ranks)).astype(complex)
        diags = [d] * algebra.grid_points
    mats = [u @ d0 @ u.conj().T for u, d0 in zip(w.data, diags)]
    mats = [(m + m.conj().T) / 2.0 for m in mats]
    return Element(algebra, level, level, tuple(mats))


def partial_isometry(rng, algebra: AlgebraSpec, level: int, ranks=None) -> Element:
    """Truncated unitary u p: |v| = p, |v*| = u p u*."""
    u = unitary(rng, algebra, level)
    p = projection(rng, algebra, level, ranks)
    return u.matmul(p)


def positive_orthogonal_pair(rng, algebra: AlgebraSpec, level: int):
    """Two nonzero positives with pointwise-disjoint supports.

    fd blocks split a common eigenbasis; one-dimensional circle fibers
    are split along the circle itself instead.
    """
    w = unitary(rng, algebra, level)
    split_grid = algebra.variant == CIRCLE and level * algebra.dim == 1
    half = algebra.components // 2
    mats_u, mats_v = [], []
    for i, w0 in enumerate(w.data):
        s = w0.shape[0]
        if split_grid:
            val = complex(rng.uniform(0.2, 2.0))
            mats_u.append(np.array([[val if i < half else 0.0]], dtype=complex))
            mats_v.append(np.array([[0.0 if i < half else val]], dtype=complex))
            continue
        if s == 1:
            # a one-dimensional block cannot split; alternate whole blocks
            val = complex(rng.uniform(0.2, 2.0))
            mats_u.append(np.array([[val if i % 2 == 0 else 0.0]], dtype=complex))
            mats_v.append(np.array([[0.0 if i % 2 == 0 else val]], dtype=complex))
            continue
        cut = int(rng.integers(1, s))
        a = np.concatenate([rng.uniform(0.2, 2.0, size=cut), np.zeros(s - cut)])
        b = np.concatenate([np.zeros(cut), rng.uniform(0.2, 2.0, size=s - cut)])
        mats_u.append(w0 @ np.diag(a).astype(complex) @ w0.conj().T)
        mats_v.append(w0 @ np.diag(b).astype(complex) @ w0.conj().T)
    herm = lambda ms: [(m + m.conj().T) / 2.0 for m in ms]
    return (Element(algebra, level, level, tuple(herm(mats_u))),
            Element(algebra, level, level, tuple(herm(mats_v))))


def orthogonal_pair(rng, algebra: AlgebraSpec, level: int):
    """General orthogonal pair: disjoint row and column supports, dressed
    by common unitaries on both sides."""
    x = unitary(rng, algebra, level)
    y = unitary(rng, algebra, level)
    split_grid = algebra.variant == CIRCLE and level * algebra.dim == 1
    half = algebra.components // 2
    mats_u, mats_v = [], []
    for i, (x0, y0) in enumerate(zip(x.data, y.data)):
        s = x0.shape[0]
        if split_grid:
            val = _cnormal(rng, (1, 1))
            mats_u.append(val if i < half else np.zeros((1, 1), dtype=complex))
            mats_v.append(np.zeros((1, 1), dtype=complex) if i < half else val)
            continue
        if s == 1:
            val = _cnormal(rng, (1, 1))
            mats_u.append(val if i % 2 == 0 else np.zeros((1, 1), dtype=complex))
            mats_v.append(np.zeros((1, 1), dtype=complex) if i % 2 == 0 else val)
            continue
        r = int(rng.integers(1, s))
        c = int(rng.integers(1, s))
        u0 = np.zeros((s, s), dtype=complex)
        v0 = np.zeros((s, s), dtype=complex)
        u0[:r, :c] = _cnormal(rng, (r, c))
        v0[r:, c:] = _cnormal(rng, (s - r, s - c))
        mats_u.append(x0 @ u0 @ y0.conj().T)
        mats_v.append(x0 @ v0 @ y0.conj().T)
    return (Element(algebra, level, level, tuple(mats_u)),
            Element(algebra, level, level, tuple(mats_v)))


def partial_unitary(rng, algebra: AlgebraSpec, level: int, ranks=None,
                    winding: int = 0) -> Element:
    """w (corner unitary + zero block) w* built in a shared eigenbasis."""
    w = unitary(rng, algebra, level)
    if algebra.variant == FD:
        sizes = [level * d for d in algebra.block_dims]
        if ranks is None:
            ranks = [int(rng.integers(0, s + 1)) for s in sizes]
        mats = []
        for u0, r, s in zip(w.data, ranks, sizes):
            phases = np.exp(1j * rng.uniform(-np.pi, np.pi, size=r))
            core = np.diag(np.concatenate([phases, np.zeros(s - r)])).astype(complex)
            mats.append(u0 @ core @ u0.conj().T)
    else:
        s = level * algebra.dim
        if ranks is None:
            ranks = int(rng.integers(0, s + 1))
        if ranks == 0:
            cores = [np.zeros((s, s), dtype=complex)] * algebra.grid_points
        else:
            corner = [_expi(h) for h in
                      _hermitian_fields(rng, algebra, level, size=ranks)]
            zs = algebra.sample_points()
            cores = []
            for j, c in enumerate(corner):
                if winding != 0:
                    c = c.copy()
                    c[:, 0] = c[:, 0] * zs[j] ** winding
                full = np.zeros((s, s), dtype=complex)
                full[:ranks, :ranks] = c
                cores.append(full)
        mats = [u0 @ c0 @ u0.conj().T for u0, c0 in zip(w.data, cores)]
    return Element(algebra, level, level, tuple(mats))
