"""Hilbert-Schmidt geometric discord of two-qubit states.

For paired von Neumann measurements along unit axes ``k`` (qubit A) and
``l`` (qubit B), the squared HS distance between a state and its
measurement-induced classical-classical (MICC) state is

    D^2 = (||x||^2 + ||y||^2 + ||T||_F^2 - f(k, l)) / 4,
    f(k, l) = (k.x)^2 + (l.y)^2 + (k^T T l)^2,

so the geometric measure is fixed by ``lambda_max = max f``.  For fixed l the
best k is the top eigenvector of x x^T + (T l)(T l)^T and vice versa, which
is what ``maximize_alternating`` iterates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matkit
from .errors import WrongCase
from .matkit import PAULI, SIGMA0, kron
from .states import BlochForm, CsParams, DensityMatrix, bloch_decompose, cs_to_matrix

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 500
DEFAULT_RESOLUTION = 64
RANDOM_RESTARTS = 8
RESTART_SEED = 20130221
EIGENSPACE_TOL = 1e-9
MONOTONE_SLACK = 1e-13


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("axis must be nonzero")
    return v / n


@dataclass(frozen=True)
class MeasurementAxes:
    k: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        for name in ("k", "l"):
            v = np.array(getattr(self, name), dtype=float).reshape(3)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"axis {name} is not a unit vector (norm {np.linalg.norm(v)!r})")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @classmethod
    def normalized(cls, k, l):
        return cls(_unit(k), _unit(l))

    @property
    def l1(self):
        return self.l[0]

    @property
    def l2(self):
        return self.l[1]

    @property
    def l3(self):
        return self.l[2]


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    random_restarts: int = RANDOM_RESTARTS
    seed: int = RESTART_SEED


@dataclass
class OptResult:
    lambda_max: float
    axes: MeasurementAxes
    iterations: int
    converged: bool
    restarts_used: int
    monotone: bool = True
    trace: list = field(default_factory=list, repr=False)


@dataclass
class GResult:
    g: float
    g_raw: float
    opt: OptResult
    total: float
    bloch: BlochForm = field(repr=False, default=None)


def projectors(axis):
    """The two von Neumann projectors (I ± axis.sigma)/2."""
    n_sigma = sum(a * s for a, s in zip(axis, PAULI[1:]))
    return (0.5 * (SIGMA0 + n_sigma), 0.5 * (SIGMA0 - n_sigma))


def micc(rho, axes: MeasurementAxes) -> DensityMatrix:
    """Measurement-induced classical-classical state by explicit projector sandwiching."""
    m = np.asarray(rho)
    out = np.zeros((4, 4), dtype=np.complex128)
    for pa in projectors(axes.k):
        for pb in projectors(axes.l):
            proj = kron(pa, pb)
            out += proj @ m @ proj
    return DensityMatrix(0.5 * (out + matkit.dagger(out)))


def hs_distance_sq(rho, tau) -> float:
    d = np.asarray(rho) - np.asarray(tau)
    return float(np.real(np.trace(d @ d)))


def objective(b: BlochForm, axes: MeasurementAxes) -> float:
    k, l = axes.k, axes.l
    return float((k @ b.x) ** 2 + (l @ b.y) ** 2 + (k @ b.t @ l) ** 2)


def eq5_distance(b: BlochForm, axes: MeasurementAxes) -> float:
    return 0.25 * (b.total - objective(b, axes))


def _half_value(a, w):
    """max over unit u of (u.a)^2 + (u.w)^2, vectorized over trailing rows of w."""
    aa = a @ a
    ww = np.sum(w * w, axis=-1)
    aw = w @ a
    half = 0.5 * (aa - ww)
    return 0.5 * (aa + ww) + np.sqrt(half * half + aw * aw)


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _matvec(t, v):
    return (t[0][0] * v[0] + t[0][1] * v[1] + t[0][2] * v[2],
            t[1][0] * v[0] + t[1][1] * v[1] + t[1][2] * v[2],
            t[2][0] * v[0] + t[2][1] * v[1] + t[2][2] * v[2])


def _scaled(v, s):
    return (v[0] * s, v[1] * s, v[2] * s)


def _combine(a, ca, w, cw):
    return (a[0] * ca + w[0] * cw, a[1] * ca + w[1] * cw, a[2] * ca + w[2] * cw)


def _top_axis(a, w, previous):
    # plain-float kernel of top_axis; vectors are 3-tuples
    aa = _dot(a, a)
    ww = _dot(w, w)
    aw = _dot(a, w)
    half = 0.5 * (aa - ww)
    rad = math.sqrt(half * half + aw * aw)
    top = 0.5 * (aa + ww) + rad
    if top <= 1e-300:
        return previous, 0.0
    if 2.0 * rad <= EIGENSPACE_TOL * max(top, 1.0):
        # degenerate top eigenspace = span{a, w}; stay put if already inside it
        first = a if aa >= ww else w
        e1 = _scaled(first, 1.0 / math.sqrt(_dot(first, first)))
        other = w if aa >= ww else a
        rest = _combine(other, 1.0, e1, -_dot(other, e1))
        nrest = math.sqrt(_dot(rest, rest))
        e2 = _scaled(rest, 1.0 / nrest) if nrest > 1e-150 else (0.0, 0.0, 0.0)
        inside = _combine(e1, _dot(previous, e1), e2, _dot(previous, e2))
        norm = math.sqrt(_dot(inside, inside))
        if norm >= 1.0 - EIGENSPACE_TOL:
            return _scaled(inside, 1.0 / norm), top
        cand = e1
    else:
        if aa >= ww:
            cand = _combine(a, top - ww, w, aw)
        else:
            cand = _combine(a, aw, w, top - aa)
        cand = _scaled(cand, 1.0 / math.sqrt(_dot(cand, cand)))
    if _dot(cand, previous) < 0:
        cand = _scaled(cand, -1.0)
    return cand, top


def top_axis(a, w, previous):
    """Top eigenvector of a a^T + w w^T, reusing ``previous`` when it already spans it.

    The matrix has rank <= 2, so its top eigenvector lies in span{a, w} and
    follows from the 2x2 Gram matrix of (a, w) in closed form.  When the top
    eigenvalue is degenerate, ``previous`` projected into the eigenspace is
    kept if it already lies there.  Returns (axis, eigenvalue).
    """
    axis, top = _top_axis(tuple(map(float, a)), tuple(map(float, w)), tuple(map(float, previous)))
    return np.array(axis), top


def _value(x, y, t, k, l):
    return _dot(k, x) ** 2 + _dot(l, y) ** 2 + _dot(k, _matvec(t, l)) ** 2


def _ascend(b: BlochForm, k, l, cfg: OptimizerConfig):
    x = tuple(b.x.tolist())
    y = tuple(b.y.tolist())
    t = tuple(tuple(row) for row in b.t.tolist())
    tt = tuple(zip(*t))
    k = tuple(k.tolist())
    l = tuple(l.tolist())
    value = _value(x, y, t, k, l)
    history = [value]
    monotone = True
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        k, _ = _top_axis(x, _matvec(t, l), k)
        mid = _value(x, y, t, k, l)
        l, _ = _top_axis(y, _matvec(tt, k), l)
        new = _value(x, y, t, k, l)
        slack = MONOTONE_SLACK * max(1.0, value)
        if mid < value - slack or new < mid - slack:
            monotone = False
        history.append(new)
        gain = new - value
        value = max(new, value)
        if gain < cfg.tol:
            converged = True
            break
    return np.array(k), np.array(l), value, iters, converged, monotone, history


def restart_pairs(b: BlochForm, cfg: OptimizerConfig):
    """Deterministic multistart seeds: singular pairs of T, the normalized Bloch
    vectors, the coordinate axes and a few fixed pseudo-random pairs."""
    pairs = []
    u, _, vt = np.linalg.svd(b.t)
    for i in range(3):
        pairs.append((u[:, i], vt[i]))
    nx, ny = np.linalg.norm(b.x), np.linalg.norm(b.y)
    if nx > 0 and ny > 0:
        pairs.append((b.x / nx, b.y / ny))
    for e in np.eye(3):
        pairs.append((e, e))
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.random_restarts):
        k = rng.standard_normal(3)
        l = rng.standard_normal(3)
        pairs.append((k / np.linalg.norm(k), l / np.linalg.norm(l)))
    return pairs


def maximize_alternating(b: BlochForm, cfg: OptimizerConfig | None = None, starts=None) -> OptResult:
    """Multistart alternating maximization of the measurement objective.

    Never raises on non-convergence; ``converged`` is False only when no
    restart met the gain tolerance within ``cfg.max_iters`` sweeps.
    """
    cfg = cfg or OptimizerConfig()
    starts = restart_pairs(b, cfg) if starts is None else starts
    best = None
    any_converged = False
    monotone = True
    for k0, l0 in starts:
        k, l, _, iters, conv, mono, hist = _ascend(b, _unit(k0), _unit(l0), cfg)
        any_converged |= conv
        monotone &= mono
        axes = MeasurementAxes.normalized(k, l)
        value = objective(b, axes)
        if best is None or value > best[1]:
            best = (axes, value, iters, hist)
    axes, value, iters, hist = best
    return OptResult(value, axes, iters, any_converged, len(starts), monotone, hist)


def sphere_grid(resolution):
    """Unit vectors on a resolution x (2 * resolution) latitude/longitude grid."""
    theta = np.pi * (np.arange(resolution) + 0.5) / resolution
    phi = 2 * np.pi * np.arange(2 * resolution) / (2 * resolution)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    return np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)


def maximize_grid(b: BlochForm, resolution=DEFAULT_RESOLUTION, cfg: OptimizerConfig | None = None) -> OptResult:
    """Grid oracle: exhaustive over l, exact in k, then one alternating refinement."""
    if resolution < 8:
        raise ValueError("grid resolution must be at least 8")
    cfg = cfg or OptimizerConfig()
    ls = sphere_grid(resolution)
    values = _half_value(b.x, ls @ b.t.T) + (ls @ b.y) ** 2
    idx = int(np.argmax(values))
    l0 = ls[idx]
    k0, _ = top_axis(b.x, b.t @ l0, np.array([0.0, 0.0, 1.0]))
    res = maximize_alternating(b, cfg, starts=[(k0, l0)])
    return res


def geometric_measure(rho, method="alternating", cfg: OptimizerConfig | None = None,
                      resolution=DEFAULT_RESOLUTION) -> GResult:
    b = bloch_decompose(rho)
    if method == "alternating":
        opt = maximize_alternating(b, cfg)
    elif method == "grid":
        opt = maximize_grid(b, resolution, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    total = b.total
    raw = 0.25 * (total - opt.lambda_max)
    return GResult(max(raw, 0.0), raw, opt, total, b)


@dataclass(frozen=True)
class CandidateReport:
    case: int
    candidate: float
    numerical: float
    difference: float
    agree: bool
    coefficients: tuple


def _candidate_report(case, coeffs, p, resolution, agree_tol):
    candidate = max(coeffs)
    numerical = maximize_grid(bloch_decompose(cs_to_matrix(p)), resolution).lambda_max
    diff = candidate - numerical
    return CandidateReport(case, candidate, numerical, diff, abs(diff) <= agree_tol, tuple(coeffs))


def closed_form_case1(p: CsParams, tol=1e-12, resolution=DEFAULT_RESOLUTION, agree_tol=1e-9) -> CandidateReport:
    """Case |p3| = |p5| = 0: l'^2 = 4 p6^2 - ((2 p6)^2 - (4 p1 - 1)^2) l3^2.

    Linear in l3^2 on [0, 1], so its maximum is max(4 p6^2, (4 p1 - 1)^2).
    The candidate is reported next to the numerical maximum, never used in its place.
    """
    if abs(p.p3) > tol or abs(p.p5) > tol:
        raise WrongCase("case 1 needs p3 = p5 = 0")
    coeffs = (4 * p.p6 ** 2, (4 * p.p1 - 1) ** 2)
    return _candidate_report(1, coeffs, p, resolution, agree_tol)


def closed_form_case2(p: CsParams, tol=1e-12, resolution=DEFAULT_RESOLUTION, agree_tol=1e-9) -> CandidateReport:
    """Case p3, p5 both nonzero: the weighted sum of l1^2, l2^2, l3^2 is
    maximized on the unit sphere by its largest coefficient."""
    if abs(p.p3) <= tol or abs(p.p5) <= tol:
        raise WrongCase("case 2 needs p3 and p5 both nonzero")
    coeffs = (
        4 * (p.p6 + p.p7) ** 2,
        4 * ((p.p6 - p.p7) - 2 * p.p3) ** 2,
        (4 * p.p1 - 4 * p.p5 - 1) ** 2,
    )
    return _candidate_report(2, coeffs, p, resolution, agree_tol)


def random_axes(rng) -> MeasurementAxes:
    return MeasurementAxes.normalized(rng.standard_normal(3), rng.standard_normal(3))


def random_local_unitary(rng):
    """Haar-ish 2x2 unitary from the QR of a complex Gaussian matrix."""
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def locally_rotated(rho, u, v) -> DensityMatrix:
    w = kron(u, v)
    out = w @ np.asarray(rho) @ matkit.dagger(w)
    return DensityMatrix(0.5 * (out + matkit.dagger(out)))

