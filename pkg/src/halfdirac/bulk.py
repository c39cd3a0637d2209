"""Bulk model on the full plane.

Two-band symbol H(k) = [[m - eps*k^2, -kx + i*ky], [-kx - i*ky, -m + eps*k^2]],
its band functions, the transverse momentum roots at a given energy, the two
upper-band eigensections (one regular at k=0, one regular at k=infinity) with
their 4-vector boundary lifts, and the Chern number of a band as the degree of
the unit d-vector map over the compactified momentum plane.

All component-level helpers are vectorized over numpy arrays; the public
scalar API wraps them with input validation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchError,
    NoConvergence,
    OutsideBulkBand,
    SingularAtOrigin,
)


@dataclass(frozen=True)
class ModelParams:
    """Mass and quadratic regulator of the two-band symbol.

    Standing assumptions: m > 0 and 0 < eps < 1/(2m).
    """

    m: float = 1.0
    eps: float = 0.1

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got m={self.m}")
        if not (0 < self.eps < 1.0 / (2.0 * self.m)):
            raise ValueError(
                f"regulator must satisfy 0 < eps < 1/(2m), got eps={self.eps}"
            )


@dataclass(frozen=True)
class BulkSection:
    """Upper-band eigensection value and its 4-vector boundary lift.

    psi is the 2-spinor, lift = (psi, i*ky*psi) is the boundary data of the
    transverse mode e^{i*ky*y} * psi at y = 0.
    """

    psi: np.ndarray
    lift: np.ndarray


def lift4(psi, ky):
    """Boundary lift (psi, i*ky*psi) of a transverse mode."""
    psi = np.asarray(psi)
    return np.concatenate([psi, 1j * ky * psi])


def hamiltonian(p: ModelParams, kx, ky):
    """Symbol matrix H(k); ky may be complex (transverse continuation)."""
    k2 = kx * kx + ky * ky
    d3 = p.m - p.eps * k2
    return np.array(
        [[d3, -kx + 1j * ky], [-kx - 1j * ky, -d3]], dtype=complex
    )


def omega_plus(p: ModelParams, kx, ky):
    """Upper band function sqrt(k^2 + (m - eps*k^2)^2) for real momenta."""
    k2 = np.asarray(kx) ** 2 + np.asarray(ky) ** 2
    return np.sqrt(k2 + (p.m - p.eps * k2) ** 2)


def band_minimum(p: ModelParams):
    """Global minimum of omega_plus over the plane (the spectral gap edge)."""
    # omega_+^2 = t + (m - eps t)^2 in t = k^2 >= 0; vertex at
    # t* = (2 eps m - 1)/(2 eps^2) < 0 under the standing assumptions,
    # so the minimum over t >= 0 sits at t = 0.
    return abs(p.m)


def _t_roots(p: ModelParams, omega):
    """Roots t_plus >= 0 > t_minus of eps^2 t^2 + (1-2 eps m) t + m^2 - w^2.

    These are the two values of t = k^2 at which omega_plus(k) = omega.
    Vectorized; valid for omega > m (then the roots are real with
    t_plus > 0 > t_minus).
    """
    a = p.eps**2
    b = 1.0 - 2.0 * p.eps * p.m
    c = p.m**2 - np.asarray(omega) ** 2
    disc = b * b - 4.0 * a * c
    sq = np.sqrt(disc.astype(complex))
    t_plus = (-b + sq) / (2.0 * a)
    t_minus = (-b - sq) / (2.0 * a)
    return t_plus, t_minus


def momentum_roots(p: ModelParams, kx, omega, tol=1e-12):
    """Transverse roots at a bulk energy: (kappa, kappa_ev, kappa_div).

    kappa > 0 is the real propagating root, kappa_ev in i*R_+ the evanescent
    one, kappa_div = -kappa_ev.  All four of {+-kappa, kappa_ev, kappa_div}
    solve det(H(kx, ky) - omega) = 0.
    """
    w_edge = omega_plus(p, kx, 0.0)
    if omega <= w_edge + tol:
        raise OutsideBulkBand(
            f"omega={omega} is not above the band edge {w_edge} at kx={kx}"
        )
    t_plus, t_minus = _t_roots(p, omega)
    kappa = float(np.sqrt(t_plus.real - kx * kx))
    kappa_ev = 1j * float(np.sqrt(kx * kx - t_minus.real))
    return kappa, kappa_ev, -kappa_ev


def kappa_ev_of(p: ModelParams, kx, kappa):
    """Evanescent root at the energy omega_plus(kx, kappa); vectorized.

    Closed form i*sqrt(kappa^2 + 2 kx^2 + (1 - 2 eps m)/eps^2); the radicand
    is positive for all real (kx, kappa) under the standing assumptions.
    """
    rad = (
        np.asarray(kappa) ** 2
        + 2.0 * np.asarray(kx) ** 2
        + (1.0 - 2.0 * p.eps * p.m) / p.eps**2
    )
    return 1j * np.sqrt(rad)


def psi0_components(p: ModelParams, kx, ky):
    """Section regular at k=infinity, as a (2, ...) array; ky may be complex."""
    kx = np.asarray(kx, dtype=complex)
    ky = np.asarray(ky, dtype=complex)
    k2 = kx * kx + ky * ky
    w = np.sqrt(k2 + (p.m - p.eps * k2) ** 2)
    q = (p.m - p.eps * k2) / w
    pref = 1.0 / (np.sqrt(2.0) * np.sqrt(1.0 - q))
    return np.stack([pref * (kx - 1j * ky) / w, pref * (q - 1.0)])


def psi_inf_ev_components(p: ModelParams, kx, ky):
    """Section regular at k=0, on the evanescent branch ky in i*R_+.

    Uses the analytically continued quantities k~^2 = kx^2 + ky^2 < 0,
    omega~ = sqrt(k~^2 + (m - eps k~^2)^2) (equal to the bulk energy) and
    q~ = (m - eps k~^2)/omega~ > 1.  The prefactor 1/(k~ sqrt(1 - q~)) is
    evaluated on principal branches: sqrt(k~^2)*sqrt(1-q~) = i*i*sqrt(...) =
    -sqrt(k~^2 (1 - q~)), a negative real number.
    """
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=complex)
    kt2 = (kx * kx + ky * ky).real  # real and negative on this branch
    wt = np.sqrt(kt2 + (p.m - p.eps * kt2) ** 2)
    qt = (p.m - p.eps * kt2) / wt
    rad = kt2 * (1.0 - qt)
    if np.any(qt <= 1.0) or np.any(rad <= 0.0):
        raise BranchError(
            "evanescent-branch continuation requires q~ > 1 and a positive "
            "radicand k~^2 (1 - q~)"
        )
    denom = -np.sqrt(2.0) * np.sqrt(rad)
    return np.stack(
        [kt2 / wt / denom, (kx + 1j * ky) * (qt - 1.0) / denom]
    ).astype(complex)


def psi0(p: ModelParams, kx, ky, tol=1e-9):
    """Section regular at k=infinity with its boundary lift (scalar API)."""
    if abs(np.imag(ky)) < tol and (kx * kx + np.real(ky) ** 2) < tol * tol:
        raise SingularAtOrigin(
            "psi0 has a phase singularity at k=0; evaluate away from the origin"
        )
    psi = psi0_components(p, kx, ky).reshape(2)
    return BulkSection(psi=psi, lift=lift4(psi, ky))


def psi_inf(p: ModelParams, kx, ky, tol=1e-12):
    """Section regular at k=0 with its boundary lift (scalar API).

    Real ky: gauge transform psi_inf = lambda * psi0 with
    lambda = (kx + i*ky)/|k|.  Purely imaginary ky: evanescent-branch
    continuation (see psi_inf_ev_components).
    """
    if abs(np.imag(ky)) < tol:
        kyr = float(np.real(ky))
        k = np.hypot(kx, kyr)
        if k < tol:
            psi = np.array([1.0, 0.0], dtype=complex)  # the k->0 limit
            return BulkSection(psi=psi, lift=lift4(psi, ky))
        lam = (kx + 1j * kyr) / k
        psi = lam * psi0_components(p, kx, kyr).reshape(2)
        return BulkSection(psi=psi, lift=lift4(psi, kyr))
    if abs(np.real(ky)) < tol and np.imag(ky) > 0:
        psi = psi_inf_ev_components(p, kx, ky).reshape(2)
        return BulkSection(psi=psi, lift=lift4(psi, ky))
    raise BranchError(
        f"psi_inf expects real or positive-imaginary ky, got ky={ky}"
    )


def _unit_d(p: ModelParams, kx, ky):
    """Unit vector of the Pauli decomposition H = d . sigma."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    d = np.stack([-kx, -ky, p.m - p.eps * (kx * kx + ky * ky)])
    return d / np.linalg.norm(d, axis=0)


def _sphere_grid_map(p: ModelParams, n_theta):
    """Unit d-vectors on a (theta, phi) grid covering the compactified plane.

    Stereographic radius r = scale * tan(theta/2), phi the polar angle; the
    row theta = pi is the point at infinity where the unit vector tends to
    (0, 0, -sign eps).
    """
    scale = np.sqrt(abs(p.m) / abs(p.eps))
    theta = np.linspace(0.0, np.pi, n_theta + 1)
    phi = np.linspace(0.0, 2.0 * np.pi, 2 * n_theta + 1)
    r = scale * np.tan(theta[:-1] / 2.0)
    kx = r[:, None] * np.cos(phi)[None, :]
    ky = r[:, None] * np.sin(phi)[None, :]
    e = _unit_d(p, kx, ky)
    e_inf = np.array([0.0, 0.0, -np.sign(p.eps)])
    e = np.concatenate([e, np.broadcast_to(e_inf[:, None, None], (3, 1, len(phi)))], axis=1)
    return e


def _signed_solid_angle(v1, v2, v3):
    """Signed solid angle of spherical triangles, vectorized over points."""
    triple = np.einsum("i...,i...->...", v1, np.cross(v2, v3, axis=0))
    dots = (
        1.0
        + np.einsum("i...,i...->...", v1, v2)
        + np.einsum("i...,i...->...", v2, v3)
        + np.einsum("i...,i...->...", v3, v1)
    )
    return 2.0 * np.arctan2(triple, dots)


def _degree(p: ModelParams, band, n_theta):
    e = _sphere_grid_map(p, n_theta)
    if band < 0:
        e = -e
    v00 = e[:, :-1, :-1]
    v10 = e[:, 1:, :-1]
    v11 = e[:, 1:, 1:]
    v01 = e[:, :-1, 1:]
    total = np.sum(_signed_solid_angle(v00, v10, v11)) + np.sum(
        _signed_solid_angle(v00, v11, v01)
    )
    return total / (4.0 * np.pi)


def chern(p: ModelParams, band=+1, n0=64, max_doublings=4, residual_tol=0.01):
    """Chern number of a band as the degree of the unit d-vector map.

    Triangulates the compactified momentum plane through a stereographic
    sphere parametrization and sums signed solid angles of the image
    triangles; refines by grid doubling until two successive levels agree
    and the value snaps to an integer within residual_tol.
    """
    prev = None
    for level in range(max_doublings + 1):
        val = _degree(p, band, n0 << level)
        snapped = int(round(val))
        if (
            prev is not None
            and abs(val - snapped) < residual_tol
            and abs(val - prev) < residual_tol
        ):
            return snapped
        prev = val
    raise NoConvergence(
        f"degree integral did not stabilize (last value {prev})"
    )
