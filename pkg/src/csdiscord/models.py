"""State generators for two physical systems.

* A spin pair inside a closed nanopore under averaged dipolar coupling
  (reduced two-spin density matrix as a function of time and temperature).
* A two-qubit anisotropic XXZ Heisenberg chain with an x-axis
  Dzyaloshinskii-Moriya term, in thermal equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matkit
from .errors import DegenerateAngles, InvalidState
from .matkit import SIGMA_X, SIGMA_Y, SIGMA_Z, kron
from .states import DensityMatrix, admits, classify, validate_density


@dataclass(frozen=True)
class NanoporeParams:
    beta: float
    n_spins: int
    coupling: float
    time: float = 0.0

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValueError(f"n_spins must be an integer >= 2, got {self.n_spins!r}")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        object.__setattr__(self, "n_spins", int(self.n_spins))

    @property
    def a(self):
        return 1.5 * self.coupling


@dataclass(frozen=True)
class NanoporeCorrelations:
    p: float
    q_plus_r: float
    q_minus_r: float
    u: float


def nanopore_correlations(params: NanoporeParams) -> NanoporeCorrelations:
    th = math.tanh(params.beta / 2)
    at = params.a * params.time
    n = params.n_spins
    # integer exponents keep the sign of negative cosines
    c1 = math.cos(at)
    c2 = math.cos(2 * at)
    return NanoporeCorrelations(
        p=0.5 * th * c1 ** (n - 1),
        q_plus_r=0.25 * th * th,
        q_minus_r=0.25 * th * th * c2 ** (n - 2),
        u=0.25 * th * c1 ** (n - 2) * math.sin(at),
    )


def nanopore_matrix(params: NanoporeParams) -> np.ndarray:
    c = nanopore_correlations(params)
    up = complex(c.p / 2, -c.u)
    dn = up.conjugate()
    qm, qp = c.q_minus_r, c.q_plus_r
    return np.array([
        [0.25, up, up, qm],
        [dn, 0.25, qp, dn],
        [dn, qp, 0.25, dn],
        [qm, up, up, 0.25],
    ], dtype=np.complex128)


def nanopore_state(params: NanoporeParams) -> DensityMatrix:
    m = nanopore_matrix(params)
    try:
        return DensityMatrix(m)
    except InvalidState as exc:
        exc.details["params"] = params
        raise


@dataclass(frozen=True)
class XxzDmParams:
    j: float
    jz: float
    dx: float
    temperature: float = 1.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be > 0")

    @property
    def beta(self):
        return 1.0 / self.temperature

    @property
    def omega(self):
        return math.sqrt((self.j + self.jz) ** 2 + 4 * self.dx ** 2)


def xxz_dm_hamiltonian(params: XxzDmParams) -> np.ndarray:
    j, jz, dx = params.j, params.jz, params.dx
    return (j * kron(SIGMA_X, SIGMA_X) + j * kron(SIGMA_Y, SIGMA_Y) + jz * kron(SIGMA_Z, SIGMA_Z)
            + dx * (kron(SIGMA_Y, SIGMA_Z) - kron(SIGMA_Z, SIGMA_Y)))


def xxz_dm_thermal_oracle(params: XxzDmParams) -> DensityMatrix:
    """exp(-H/T) / Z from the eigendecomposition of the Hamiltonian."""
    h = xxz_dm_hamiltonian(params)
    # shift by the ground energy so low temperatures do not overflow
    e0 = matkit.hermitian_eigen(h).eigenvalues[0]
    w = matkit.herm_exp(h - e0 * np.eye(4), -params.beta)
    rho = DensityMatrix(w / np.trace(w).real)
    assert admits(classify(rho), "CS"), "XXZ+DM thermal state must be centrosymmetric"
    return rho


@dataclass(frozen=True)
class ClosedFormTerms:
    omega: float
    phi: float
    varphi: float
    mu_plus: float
    mu_minus: float
    nu_plus: float
    nu_minus: float
    xi: complex
    z: float


def xxz_dm_closed_terms(params: XxzDmParams) -> ClosedFormTerms:
    """The printed closed-form ingredients, evaluated exactly as written."""
    j, jz, dx, b = params.j, params.jz, params.dx, params.beta
    w = params.omega
    lo = j + jz - w
    hi = j + jz + w
    if lo == 0 or hi == 0:
        raise DegenerateAngles(f"angle denominators vanish (J+Jz-w'={lo}, J+Jz+w'={hi}); use the oracle")
    phi = math.atan(2 * dx / lo)
    varphi = math.atan(2 * dx / hi)
    e_lo = math.exp(b * (j - w))
    e_hi = math.exp(b * (j + w))
    mix_mu = e_lo * math.sin(phi) ** 2 + e_hi * math.sin(varphi) ** 2
    mix_nu = e_lo * math.cos(phi) ** 2 + e_hi * math.cos(varphi) ** 2
    mu0 = math.exp(-b * jz)
    nu0 = math.exp(-b * (jz - 2 * j))
    xi = 1j * e_lo * math.sin(phi) * math.cos(phi) + 1j * e_hi * math.sin(varphi) * math.cos(phi)
    z = 2 * math.exp(-b * j) * math.cosh(b * (j - jz)) + 2 * math.exp(b * j) * math.cosh(b * w)
    return ClosedFormTerms(w, phi, varphi, mu0 + mix_mu, mu0 - mix_mu, nu0 + mix_nu, nu0 - mix_nu, xi, z)


def xxz_dm_closed_matrix(params: XxzDmParams) -> np.ndarray:
    """Printed closed-form thermal matrix, not validated."""
    c = xxz_dm_closed_terms(params)
    xi = c.xi
    m = np.array([
        [c.mu_plus, -xi, xi, c.mu_minus],
        [xi, c.nu_plus, c.nu_minus, -xi],
        [-xi, c.nu_minus, c.nu_plus, xi],
        [c.mu_minus, xi, -xi, c.mu_plus],
    ], dtype=np.complex128)
    return m / (2 * c.z)


def xxz_dm_thermal_closed(params: XxzDmParams) -> DensityMatrix:
    """Closed-form thermal state; raises InvalidState with a deviation report
    (against the oracle) when the printed formulas do not give a valid state."""
    m = xxz_dm_closed_matrix(params)
    try:
        validate_density(m)
    except InvalidState as exc:
        exc.details["deviation"] = thermal_deviation(params)
        raise
    return DensityMatrix(m)


@dataclass(frozen=True)
class ThermalDeviation:
    params: XxzDmParams
    closed_trace: float
    max_entry_deviation: float
    diag_deviation: float
    offdiag_deviation: float
    closed_valid: bool
    failed_invariant: str | None

    def row(self):
        p = self.params
        return (p.j, p.jz, p.dx, p.temperature, self.closed_trace, self.max_entry_deviation,
                self.diag_deviation, self.offdiag_deviation, self.closed_valid, self.failed_invariant or "")


DEVIATION_HEADER = ("J", "Jz", "Dx", "T", "closed_trace", "max_abs_dev", "diag_dev", "offdiag_dev",
                    "closed_valid", "failed_invariant")


def thermal_deviation(params: XxzDmParams) -> ThermalDeviation:
    closed = xxz_dm_closed_matrix(params)
    oracle = np.asarray(xxz_dm_thermal_oracle(params))
    diff = np.abs(closed - oracle)
    mask = np.eye(4, dtype=bool)
    try:
        validate_density(closed)
        valid, failed = True, None
    except InvalidState as exc:
        valid, failed = False, exc.invariant
    return ThermalDeviation(params, float(np.trace(closed).real), float(diff.max()),
                            float(diff[mask].max()), float(diff[~mask].max()), valid, failed)


# fixed parameters read from the figure captions for the thermal model
FIGURE_PARAMS = {
    "fig3": [dict(j=1.0, dx=1.0, jz=jz) for jz in (0.0, 0.4, 0.9)],
    "fig4": [dict(j=1.0, jz=1.0, dx=dx) for dx in (0.5, 0.7, 1.0)],
    "fig5": [dict(j=1.0, jz=0.2, dx=dx) for dx in (0.5, 0.7, 1.0)],
}


def deviation_table(temperatures=(0.1, 0.5, 1.0, 2.0, 5.0)):
    """Closed-form vs oracle comparison over the figure parameter sets."""
    rows = []
    for fig, sets in FIGURE_PARAMS.items():
        for kw in sets:
            for temp in temperatures:
                rows.append((fig, thermal_deviation(XxzDmParams(temperature=temp, **kw))))
    return rows
