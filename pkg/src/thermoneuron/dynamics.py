"""Two-timescale evolution of a thermodynamic neuron.

The machine has a fast internal scale (collector/modulator thermalization
at rate ~gamma) and a slow scale set by the weak couplings mu, mu' to the
finite output reservoir.  `evolve_quasi_static` integrates only the slow
calorimetric equation

    d(beta_z)/dt = (j_C + j_M) / C,
    j_C = mu  eps_z [g_z(beta_z) - g_z(beta_v)],
    j_M = mu' eps_z [g_z(beta_z) - g_z(beta_r)],

with the fast parts pinned at their steady values.  `evolve_full`
co-integrates the collector and modulator density matrices together with
beta_z, evaluating the reservoir dissipators at the instantaneous
temperature; the two methods agree when gamma >> mu, mu'.

Entropy production is accumulated along the way: in quasi-static mode the
machine's entropy is constant and the rate reduces to

    sigma_dot = mu  eps_z [g_z(beta_v) - g_z(beta_z)] (beta_z - beta_v)
              + mu' eps_z [g_z(beta_r) - g_z(beta_z)] (beta_z - beta_r),

which is non-negative term by term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from .errors import StructuralError
from .neuron import NeuronSpec
from .quantum import (BathContact, QubitRegister, gibbs_register,
                      reset_dissipator, superoperator_matrix)
from .virtual import build_interaction_hamiltonian, virtual_temperature

__all__ = [
    "Trajectory",
    "evolve_quasi_static",
    "evolve_full",
    "accumulated_dissipation",
    "collector_register",
    "collector_hamiltonian",
    "collector_contacts",
    "modulator_register",
    "modulator_contacts",
]

CSV_HEADER = ("t", "beta_z", "j_C", "j_M", "sigma_dot", "sigma")


@dataclass
class Trajectory:
    """Sampled slow evolution: reservoir temperature, currents, dissipation.

    Full co-integration additionally records the final collector and
    modulator density matrices (None for quasi-static runs).
    """

    t: np.ndarray
    beta_z: np.ndarray
    j_collector: np.ndarray
    j_modulator: np.ndarray
    sigma_dot: np.ndarray
    sigma: np.ndarray
    final_rho_collector: np.ndarray | None = None
    final_rho_modulator: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.t)
        for name in ("beta_z", "j_collector", "j_modulator", "sigma_dot", "sigma"):
            if len(getattr(self, name)) != n:
                raise StructuralError(f"trajectory column {name} has wrong length")
        if n > 1 and not np.all(np.diff(self.t) > 0):
            raise StructuralError("trajectory times must be strictly increasing")

    @property
    def endpoint(self) -> float:
        return float(self.beta_z[-1])

    def write_csv(self, stream) -> None:
        """Emit t, beta_z, j_C, j_M, sigma_dot, sigma at 12 significant digits."""
        stream.write("# units: natural (k_B = hbar = 1)\n")
        stream.write(",".join(CSV_HEADER) + "\n")
        for row in zip(self.t, self.beta_z, self.j_collector,
                       self.j_modulator, self.sigma_dot, self.sigma):
            stream.write(",".join(f"{v:.12g}" for v in row) + "\n")


def _sample_times(tau: float, per_decade: int) -> np.ndarray:
    if tau <= 0.0:
        return np.array([0.0])
    lo = min(1e-2, tau / 10.0)
    decades = math.log10(tau / lo)
    npts = max(2, int(math.ceil(decades * per_decade)))
    ts = np.geomspace(lo, tau, npts)
    ts[-1] = tau
    return np.concatenate(([0.0], ts))


def _quasi_static_rates(spec: NeuronSpec, beta_v: float):
    g_v = spec.g_z(beta_v)
    g_r = spec.g_z(spec.beta_r)

    def currents(beta_z):
        g_bz = np.vectorize(spec.g_z)(beta_z) if np.ndim(beta_z) else spec.g_z(beta_z)
        j_c = spec.mu * spec.eps_z * (g_bz - g_v)
        j_m = spec.mu_prime * spec.eps_z * (g_bz - g_r)
        sdot = (spec.mu * spec.eps_z * (g_v - g_bz) * (beta_z - beta_v)
                + spec.mu_prime * spec.eps_z * (g_r - g_bz) * (beta_z - spec.beta_r))
        return j_c, j_m, sdot

    return currents


def evolve_quasi_static(spec: NeuronSpec, inputs: Sequence[float], beta_z0: float,
                        tau: float, *, per_decade: int = 200,
                        rtol: float = 1e-9) -> Trajectory:
    """Integrate the calorimetric equation with the fast parts at steady state."""
    if not (spec.capacity > 0.0):
        raise StructuralError("reservoir capacity must be positive")
    inputs = tuple(float(b) for b in inputs)
    if len(inputs) != spec.n:
        raise StructuralError(f"expected {spec.n} inputs, got {len(inputs)}")
    betas = (spec.beta0,) + inputs
    beta_v = virtual_temperature(spec.h, betas, spec.eps, spec.eps_z)
    currents = _quasi_static_rates(spec, beta_v)
    g_v = spec.g_z(beta_v)
    g_r = spec.g_z(spec.beta_r)

    def rhs(_t, y):
        g_bz = spec.g_z(y[0])
        j = (spec.mu * (g_bz - g_v) + spec.mu_prime * (g_bz - g_r)) * spec.eps_z
        return [j / spec.capacity]

    def jac(_t, y):
        x = y[0] * spec.eps_z
        g = spec.g_z(y[0])
        dg = -spec.eps_z * g * (1.0 - g) if math.isfinite(x) else 0.0
        return [[(spec.mu + spec.mu_prime) * spec.eps_z * dg / spec.capacity]]

    times = _sample_times(tau, per_decade)
    if tau <= 0.0:
        bz = np.array([float(beta_z0)])
    else:
        sol = solve_ivp(rhs, (0.0, tau), [float(beta_z0)], method="LSODA",
                        t_eval=times, rtol=rtol, atol=1e-13, jac=jac)
        if not sol.success:
            raise RuntimeError(f"quasi-static integration failed: {sol.message}")
        bz = sol.y[0]
    j_c, j_m, sdot = currents(bz)
    sigma = (cumulative_trapezoid(sdot, times, initial=0.0)
             if len(times) > 1 else np.zeros(1))
    return Trajectory(t=times, beta_z=bz, j_collector=np.atleast_1d(j_c),
                      j_modulator=np.atleast_1d(j_m),
                      sigma_dot=np.atleast_1d(sdot), sigma=sigma)


def collector_register(spec: NeuronSpec) -> QubitRegister:
    """Machine-part qubits followed by the target qubit C_z."""
    return QubitRegister(spec.eps + (spec.eps_z,))


def collector_hamiltonian(spec: NeuronSpec):
    """(H0, Hint) for the collector register."""
    reg = collector_register(spec)
    h0 = reg.free_hamiltonian()
    hint = build_interaction_hamiltonian(spec.h, spec.chi, reg)
    return h0, hint


def collector_contacts(spec: NeuronSpec, inputs: Sequence[float],
                       beta_z: float) -> list[BathContact]:
    """Bath contacts of the collector: reference, inputs, and the reservoir."""
    betas = (spec.beta0,) + tuple(inputs)
    contacts = [BathContact(i, b, spec.gamma) for i, b in enumerate(betas)]
    if spec.mu > 0:
        contacts.append(BathContact(len(betas), beta_z, spec.mu))
    return contacts


def modulator_register(spec: NeuronSpec) -> QubitRegister:
    return QubitRegister((spec.eps_z,))


def modulator_contacts(spec: NeuronSpec, beta_z: float) -> list[BathContact]:
    contacts = [BathContact(0, spec.beta_r, spec.gamma)]
    if spec.mu_prime > 0:
        contacts.append(BathContact(0, beta_z, spec.mu_prime))
    return contacts


def _affine_reservoir_parts(register: QubitRegister, qubit: int, rate: float):
    """Reservoir dissipator split as A + g(beta_z) B, each beta_z-independent."""
    from .quantum import _thermalize_qubit  # shared low-level helper

    tau0 = np.diag([1.0, 0.0]).astype(complex)
    dtau = np.diag([-1.0, 1.0]).astype(complex)

    def apply_a(rho):
        return rate * (_thermalize_qubit(rho, qubit, register.m, tau0) - rho)

    def apply_b(rho):
        return rate * _thermalize_qubit(rho, qubit, register.m, dtau)

    return (superoperator_matrix(apply_a, register.dim),
            superoperator_matrix(apply_b, register.dim))


def _entropy_rate(rho: np.ndarray, drho: np.ndarray) -> float:
    """dS/dt = -Tr[drho log rho], with eigenvalues floored for the log."""
    rho_h = 0.5 * (rho + rho.conj().T)
    w, u = np.linalg.eigh(rho_h)
    w = np.clip(w, 1e-18, None)
    diag = np.einsum("ij,jk,ki->i", u.conj().T, drho, u).real
    return float(-(diag * np.log(w)).sum())


def evolve_full(spec: NeuronSpec, inputs: Sequence[float], beta_z0: float,
                tau: float, *, per_decade: int = 200, rtol: float = 1e-8,
                atol: float = 1e-12) -> Trajectory:
    """Co-integrate collector state, modulator state, and the reservoir temperature.

    The collector and modulator evolve as separate registers (they share no
    Hamiltonian coupling, only the common reservoir), with the reservoir
    dissipators evaluated at the instantaneous beta_z.  Uses a stiff (BDF)
    integrator: the fast rates exceed the slow ones by a factor gamma/mu.
    """
    if not (spec.capacity > 0.0):
        raise StructuralError("reservoir capacity must be positive")
    inputs = tuple(float(b) for b in inputs)
    if len(inputs) != spec.n:
        raise StructuralError(f"expected {spec.n} inputs, got {len(inputs)}")

    reg_c = collector_register(spec)
    reg_m = modulator_register(spec)
    h0_c, hint_c = collector_hamiltonian(spec)
    h_c = h0_c + hint_c
    h_m = reg_m.free_hamiltonian()
    dim_c, dim_m = reg_c.dim, reg_m.dim
    nc, nm = dim_c * dim_c, dim_m * dim_m

    betas = (spec.beta0,) + inputs
    fixed_c = [BathContact(i, b, spec.gamma) for i, b in enumerate(betas)]

    def fixed_rhs_c(rho):
        out = -1j * (h_c @ rho - rho @ h_c)
        for c in fixed_c:
            out = out + reset_dissipator(rho, c, reg_c)
        return out

    l_c = superoperator_matrix(fixed_rhs_c, dim_c)
    l_m = superoperator_matrix(
        lambda rho: reset_dissipator(rho, BathContact(0, spec.beta_r, spec.gamma),
                                     reg_m), dim_m)
    if spec.mu > 0:
        az_c, bz_c = _affine_reservoir_parts(reg_c, reg_c.m - 1, spec.mu)
    else:
        az_c = bz_c = np.zeros((nc, nc), dtype=complex)
    if spec.mu_prime > 0:
        az_m, bz_m = _affine_reservoir_parts(reg_m, 0, spec.mu_prime)
    else:
        az_m = bz_m = np.zeros((nm, nm), dtype=complex)

    # Heat into the machine from the reservoir: Tr[H (A + g B) rho] as a row form.
    u_ca = h_c.T.reshape(-1) @ az_c
    u_cb = h_c.T.reshape(-1) @ bz_c
    u_ma = h_m.T.reshape(-1) @ az_m
    u_mb = h_m.T.reshape(-1) @ bz_m

    def unpack(y):
        rc = (y[:nc] + 1j * y[nc:2 * nc])
        rm = (y[2 * nc:2 * nc + nm] + 1j * y[2 * nc + nm:2 * nc + 2 * nm])
        return rc, rm, y[-1]

    def rhs(_t, y):
        rc, rm, bz = unpack(y)
        g = spec.g_z(bz)
        drc = (l_c + az_c + g * bz_c) @ rc if spec.mu > 0 else (l_c @ rc)
        drm = (l_m + az_m + g * bz_m) @ rm if spec.mu_prime > 0 else (l_m @ rm)
        heat = ((u_ca @ rc + u_ma @ rm) + g * (u_cb @ rc + u_mb @ rm)).real
        dbz = heat / spec.capacity
        return np.concatenate((drc.real, drc.imag, drm.real, drm.imag, [dbz]))

    rho_c0 = gibbs_register(reg_c, betas + (beta_z0,))
    rho_m0 = gibbs_register(reg_m, (spec.beta_r,))
    y0 = np.concatenate((rho_c0.reshape(-1).real, rho_c0.reshape(-1).imag,
                         rho_m0.reshape(-1).real, rho_m0.reshape(-1).imag,
                         [float(beta_z0)]))

    times = _sample_times(tau, per_decade)
    if tau <= 0.0:
        ys = y0[:, None]
    else:
        sol = solve_ivp(rhs, (0.0, tau), y0, method="BDF", t_eval=times,
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(
                f"full integration failed: {sol.message}; consider rescaling the "
                "reservoir capacity C to soften the slow time scale")
        ys = sol.y

    n_samp = ys.shape[1]
    bz_arr = ys[-1]
    j_c = np.zeros(n_samp)
    j_m = np.zeros(n_samp)
    sdot = np.zeros(n_samp)
    rho_c_last = rho_m_last = None
    for i in range(n_samp):
        rc_vec, rm_vec, bz = unpack(ys[:, i])
        g = spec.g_z(bz)
        rho_c = rc_vec.reshape(dim_c, dim_c)
        rho_m = rm_vec.reshape(dim_m, dim_m)
        rho_c = 0.5 * (rho_c + rho_c.conj().T)
        rho_m = 0.5 * (rho_m + rho_m.conj().T)
        jc = ((u_ca + g * u_cb) @ rho_c.reshape(-1)).real
        jm = ((u_ma + g * u_mb) @ rho_m.reshape(-1)).real
        j_c[i] = jc
        j_m[i] = jm
        drc = ((l_c + az_c + g * bz_c) @ rho_c.reshape(-1)).reshape(dim_c, dim_c)
        drm = ((l_m + az_m + g * bz_m) @ rho_m.reshape(-1)).reshape(dim_m, dim_m)
        ds = _entropy_rate(rho_c, drc) + _entropy_rate(rho_m, drm)
        # Heat into the machine from each fixed bath.
        bath_flux = 0.0
        for c in fixed_c:
            bath_flux += c.beta * float(
                np.trace(h_c @ reset_dissipator(rho_c, c, reg_c)).real)
        bath_flux += spec.beta_r * float(
            np.trace(h_m @ reset_dissipator(
                rho_m, BathContact(0, spec.beta_r, spec.gamma), reg_m)).real)
        bath_flux += bz * (jc + jm)
        sdot[i] = ds - bath_flux
        if i == n_samp - 1:
            rho_c_last, rho_m_last = rho_c, rho_m
    sigma = (cumulative_trapezoid(sdot, times, initial=0.0)
             if n_samp > 1 else np.zeros(1))
    return Trajectory(t=times, beta_z=bz_arr, j_collector=j_c, j_modulator=j_m,
                      sigma_dot=sdot, sigma=sigma,
                      final_rho_collector=rho_c_last,
                      final_rho_modulator=rho_m_last)


def accumulated_dissipation(trajectory: Trajectory) -> float:
    """Time-integrated entropy production, by trapezoidal quadrature."""
    if len(trajectory.t) < 2:
        return 0.0
    return float(np.trapezoid(trajectory.sigma_dot, trajectory.t))
