"""Two-qubit states: the centrosymmetric (CS) and X families, Pauli decomposition,
and the Hadamard map between the two families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import matkit
from .errors import InvalidState, WrongShape
from .matkit import PAULI, dagger, kron

STATE_TOL = 1e-10
SHAPE_TOL = 1e-9

# H⊗H has entries exactly ±1/2; building it from halves avoids 1/sqrt(2) roundoff
HH = 0.5 * np.array([[1, 1, 1, 1],
                     [1, -1, 1, -1],
                     [1, 1, -1, -1],
                     [1, -1, -1, 1]], dtype=np.complex128)
HH.setflags(write=False)

# sigma_mu ⊗ sigma_nu for mu, nu = 0..3
PAULI_PRODUCTS = np.array([[kron(a, b) for b in PAULI] for a in PAULI])
PAULI_PRODUCTS.setflags(write=False)

# H sigma_mu H = sum_nu HADAMARD_FRAME[mu, nu] sigma_nu  (x <-> z, y -> -y)
HADAMARD_FRAME = np.array([[1, 0, 0, 0],
                           [0, 0, 0, 1],
                           [0, 0, -1, 0],
                           [0, 1, 0, 0]], dtype=float)

# X-state zero pattern (0-based indices)
X_ZERO_ENTRIES = ((0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2))


def validate_density(m, tol=STATE_TOL):
    """Return ``m`` as a complex 4x4 array or raise InvalidState naming the failed invariant."""
    try:
        m = matkit.as_matrix(m, 4, 4)
    except ValueError as exc:
        raise InvalidState(str(exc), invariant="finite") from exc
    herm = matkit.hermiticity_residual(m)
    if herm > tol:
        raise InvalidState(f"not Hermitian (residual {herm:.3e})", "hermitian", {"residual": herm})
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise InvalidState(f"trace is {tr!r}, expected 1", "trace", {"trace": tr})
    lo = matkit.hermitian_eigen(m).eigenvalues[0]
    if lo < -tol:
        raise InvalidState(f"not positive semidefinite (min eigenvalue {lo:.3e})", "psd",
                           {"min_eigenvalue": lo})
    return m


class DensityMatrix:
    """Validated, immutable 4x4 two-qubit density matrix."""

    __slots__ = ("m",)

    def __init__(self, m, tol=STATE_TOL):
        m = np.array(validate_density(m, tol), dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def __array__(self, dtype=None, copy=None):
        return self.m if dtype is None else self.m.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.m, precision=6)})"

    def __eq__(self, other):
        return isinstance(other, DensityMatrix) and np.array_equal(self.m, other.m)

    def __hash__(self):
        return hash(self.m.tobytes())

    def allclose(self, other, atol=1e-12):
        return bool(np.allclose(self.m, np.asarray(other), rtol=0, atol=atol))


@dataclass(frozen=True)
class CsParams:
    """Seven real parameters of a centrosymmetric state; validated on construction."""

    p1: float
    p2: float = 0.0
    p3: float = 0.0
    p4: float = 0.0
    p5: float = 0.0
    p6: float = 0.0
    p7: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        validate_density(cs_matrix(self))

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class XParams:
    """Seven real parameters of an X state; the fourth diagonal entry is 1 - q1 - q2 - q3."""

    q1: float
    q2: float = 0.0
    q3: float = 0.0
    q4: float = 0.0
    q5: float = 0.0
    q6: float = 0.0
    q7: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        validate_density(x_matrix(self))

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``x`` (qubit A), ``y`` (qubit B) and correlation matrix ``t``."""

    x: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        for name, shape in (("x", (3,)), ("y", (3,)), ("t", (3, 3))):
            a = np.array(getattr(self, name), dtype=float).reshape(shape)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def zero(cls):
        return cls(np.zeros(3), np.zeros(3), np.zeros((3, 3)))

    @property
    def total(self) -> float:
        """The measurement-independent part ||x||^2 + ||y||^2 + ||T||_F^2."""
        return float(self.x @ self.x + self.y @ self.y + np.sum(self.t * self.t))

    def r_matrix(self) -> np.ndarray:
        """The 4x4 Pauli correlation matrix R = [[1, y], [x^T, T]]."""
        r = np.empty((4, 4))
        r[0, 0] = 1.0
        r[0, 1:] = self.y
        r[1:, 0] = self.x
        r[1:, 1:] = self.t
        return r


def cs_matrix(p) -> np.ndarray:
    """Assemble the CS layout without validation."""
    p1, p2, p3, p4, p5, p6, p7 = p.as_tuple() if hasattr(p, "as_tuple") else p
    a = complex(p2, p3)
    b = complex(p4, p5)
    d = 0.5 - p1
    return np.array([
        [p1, a, b, p6],
        [a.conjugate(), d, p7, b.conjugate()],
        [b.conjugate(), p7, d, a.conjugate()],
        [p6, b, a, p1],
    ], dtype=np.complex128)


def x_matrix(q) -> np.ndarray:
    """Assemble the X layout without validation."""
    q1, q2, q3, q4, q5, q6, q7 = q.as_tuple() if hasattr(q, "as_tuple") else q
    outer = complex(q4, q5)
    inner = complex(q6, q7)
    return np.array([
        [q1, 0, 0, outer],
        [0, q2, inner, 0],
        [0, inner.conjugate(), q3, 0],
        [outer.conjugate(), 0, 0, 1.0 - q1 - q2 - q3],
    ], dtype=np.complex128)


def cs_to_matrix(p: CsParams) -> DensityMatrix:
    return DensityMatrix(cs_matrix(p))


def x_to_matrix(q: XParams) -> DensityMatrix:
    return DensityMatrix(x_matrix(q))


def centrosymmetry_residual(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m[::-1, ::-1])))


def cs_residual(m) -> float:
    """Largest violation of the CS layout: centrosymmetry plus the diagonal,
    real-corner and real-inner constraints."""
    m = np.asarray(m)
    return max(
        centrosymmetry_residual(m),
        abs(m[1, 1] - (0.5 - m[0, 0])),
        abs(m[0, 3].imag),
        abs(m[1, 2].imag),
        abs(m[0, 0].imag),
    )


def x_residual(m) -> float:
    m = np.asarray(m)
    return float(max(abs(m[i, j]) for i, j in X_ZERO_ENTRIES))


def classify(rho, tol=SHAPE_TOL) -> str:
    """Shape tag of a state: ``"CS"``, ``"X"``, ``"Both"`` or ``"Neither"``."""
    m = np.asarray(rho)
    is_cs = cs_residual(m) <= tol
    is_x = x_residual(m) <= tol
    if is_cs and is_x:
        return "Both"
    if is_cs:
        return "CS"
    if is_x:
        return "X"
    return "Neither"


def admits(tag, family):
    return tag == "Both" or tag == family


def extract_cs_params(rho, tol=SHAPE_TOL) -> CsParams:
    m = np.asarray(rho)
    tag = classify(m, tol)
    if not admits(tag, "CS"):
        raise WrongShape(f"state is not centrosymmetric (shape {tag})")
    return CsParams(m[0, 0].real, m[0, 1].real, m[0, 1].imag, m[0, 2].real, m[0, 2].imag,
                    m[0, 3].real, m[1, 2].real)


def extract_x_params(rho, tol=SHAPE_TOL) -> XParams:
    m = np.asarray(rho)
    tag = classify(m, tol)
    if not admits(tag, "X"):
        raise WrongShape(f"state is not an X state (shape {tag})")
    return XParams(m[0, 0].real, m[1, 1].real, m[2, 2].real, m[0, 3].real, m[0, 3].imag,
                   m[1, 2].real, m[1, 2].imag)


def hadamard_conjugate(rho) -> DensityMatrix:
    """(H⊗H) rho (H⊗H).  H⊗H is real, symmetric and its own inverse."""
    m = np.asarray(rho)
    out = HH @ m @ HH
    return DensityMatrix(0.5 * (out + dagger(out)))


def derive_x_from_cs(p: CsParams) -> XParams:
    return extract_x_params(hadamard_conjugate(cs_to_matrix(p)))


def derive_cs_from_x(q: XParams) -> CsParams:
    return extract_cs_params(hadamard_conjugate(x_to_matrix(q)))


def r_matrix(rho) -> np.ndarray:
    """R[mu, nu] = tr[rho (sigma_mu ⊗ sigma_nu)] as a real 4x4 array."""
    m = np.asarray(rho)
    # tr(rho P) = sum_ij rho_ij P_ji
    r = np.einsum("ij,abji->ab", m, PAULI_PRODUCTS)
    return r.real


def bloch_decompose(rho) -> BlochForm:
    r = r_matrix(rho)
    return BlochForm(r[1:, 0], r[0, 1:], r[1:, 1:])


def bloch_compose(b: BlochForm) -> np.ndarray:
    """Rebuild (1/4) sum_{mu,nu} R[mu,nu] sigma_mu ⊗ sigma_nu.  Not validated."""
    return np.einsum("ab,abij->ij", b.r_matrix(), PAULI_PRODUCTS) / 4.0


def random_density_matrix(seed) -> DensityMatrix:
    """G G† / tr(G G†) for a 4x4 complex Gaussian G drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ dagger(g)
    m = m / np.trace(m).real
    return DensityMatrix(0.5 * (m + dagger(m)))


# Orthonormal basis (|i> +- |5-i>)/sqrt(2) in which every centrosymmetric
# matrix splits into two 2x2 blocks; X matrices are already split on {0,3}, {1,2}.
_CS_SPLIT = np.array([[1, 0, 0, 1], [0, 1, 1, 0], [1, 0, 0, -1], [0, 1, -1, 0]]) / np.sqrt(2)
_X_ORDER = [0, 3, 1, 2]


def _blocks_psd(m, tol=STATE_TOL):
    """Positivity of a matrix made of the 2x2 blocks on index pairs (0, 1) and (2, 3)."""
    for i in (0, 2):
        a, d, b = m[i, i].real, m[i + 1, i + 1].real, m[i, i + 1]
        if a < -tol or d < -tol or a * d - abs(b) ** 2 < -tol:
            return False
    return True


def _screen(matrix, split):
    """Cheap exact screen used by the rejection samplers before full validation."""
    return abs(np.trace(matrix).real - 1.0) <= STATE_TOL and _blocks_psd(split(matrix))


def random_cs_params(rng) -> CsParams:
    """Rejection-sample a valid CsParams: p1 in [0, 1/2], the rest in [-1/4, 1/4]."""
    while True:
        cand = (rng.uniform(0, 0.5),) + tuple(rng.uniform(-0.25, 0.25, size=6))
        if _screen(cs_matrix(cand), lambda m: _CS_SPLIT @ m @ _CS_SPLIT.T):
            return CsParams(*cand)


def random_x_params(rng) -> XParams:
    """Rejection-sample a valid XParams: q1..q3 in [0, 1], q4..q7 in [-1/2, 1/2].

    The diagonal is drawn uniformly on the simplex, which is the uniform cube
    conditioned on a nonnegative fourth population, without the rejections.
    """
    while True:
        cand = tuple(rng.dirichlet(np.ones(4))[:3]) + tuple(rng.uniform(-0.5, 0.5, size=4))
        if _screen(x_matrix(cand), lambda m: m[_X_ORDER][:, _X_ORDER]):
            return XParams(*cand)


CLAUSE_NAMES = ("p2", "p4", "p7=q4", "p6=q6", "q2+q3")


@dataclass(frozen=True)
class Condition6Report:
    """Outcome of the CS/X equivalence conditions for a (CsParams, XParams) pair.

    ``verbatim_satisfied`` holds one flag per printed clause, in
    ``CLAUSE_NAMES`` order.  ``r_matrices_equal`` is the generic predicate:
    the Pauli correlation matrix of the X state equals that of the CS state
    carried into the Hadamard frame (x <-> z, y -> -y on both qubits).
    """

    verbatim_satisfied: tuple
    r_matrices_equal: bool
    max_r_deviation: float
    tol: float
    raw_r_deviation: float = 0.0
    sqrt_clause_alternate: bool | None = None
    domain_error: str | None = None
    clause_residuals: tuple = field(default=())

    @property
    def all_verbatim(self):
        return all(self.verbatim_satisfied)

    def lines(self):
        out = []
        for name, ok, res in zip(CLAUSE_NAMES, self.verbatim_satisfied, self.clause_residuals):
            out.append(f"clause {name}: {'pass' if ok else 'FAIL'} (residual {res:.6g})")
        if self.sqrt_clause_alternate is not None:
            out.append("clause q2+q3 alternate branch (plus sign): "
                       + ("pass" if self.sqrt_clause_alternate else "FAIL"))
        if self.domain_error:
            out.append(f"domain error: {self.domain_error}")
        out.append(f"R matrices equal (Hadamard frame): {str(self.r_matrices_equal).lower()} "
                   f"(max deviation {self.max_r_deviation:.6g}, tol {self.tol:g})")
        out.append(f"R matrices entrywise deviation (no frame change): {self.raw_r_deviation:.6g}")
        return out


def check_condition6(p: CsParams, q: XParams, tol=STATE_TOL) -> Condition6Report:
    p1, p2, p3, p4, p5, p6, p7 = p.as_tuple()
    q1, q2, q3, q4, q5, q6, q7 = q.as_tuple()

    residuals = [
        abs(abs(p2) - abs((2 * (q1 + q3) - 1) / 4)),
        abs(abs(p4) - abs((2 * (q1 + q2) - 1) / 4)),
        abs(p7 - q4),
        abs(p6 - q6),
    ]
    radicand = 16 * (p1 ** 2 + p3 ** 2 + p5 ** 2) - 8 * p1 + 1
    domain_error = None
    alternate = None
    if radicand < 0:
        domain_error = f"square-root radicand is negative ({radicand:.6g})"
        residuals.append(math.inf)
    else:
        root = math.sqrt(radicand)
        residuals.append(abs(q2 + q3 - (1 - root) / 2))
        if residuals[-1] > tol:
            alternate = abs(q2 + q3 - (1 + root) / 2) <= tol
    verbatim = tuple(r <= tol for r in residuals)

    r_cs = r_matrix(cs_matrix(p))
    r_x = r_matrix(x_matrix(q))
    framed = HADAMARD_FRAME @ r_cs @ HADAMARD_FRAME.T
    dev = float(np.max(np.abs(r_x - framed)))
    raw = float(np.max(np.abs(r_x - r_cs)))
    return Condition6Report(verbatim, dev <= tol, dev, tol, raw, alternate, domain_error,
                            tuple(residuals))
