"""Direct edge-mode solver on the half-plane.

For fixed momentum kx along the boundary, the half-plane problem at an
in-gap energy omega admits exponentially decaying solutions exactly when a
nontrivial combination of the two decaying transverse modes satisfies the
boundary condition.  The detector is the smallest singular value of the 2x2
matrix [A(kx) Psi-hat(q1), A(kx) Psi-hat(q2)] built from unit eigenvectors of
the symbol at the two decaying roots q1, q2 (Im q > 0).  Scanning and
refining its zeros in omega, then continuing them across a kx grid, yields
the edge-mode branches and the signed count n_b of branches exchanged with
the upper band at its lower limit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .boundary import BoundaryCondition
from .bulk import ModelParams, omega_plus
from .errors import (
    AmbiguousContinuation,
    DegenerateRoots,
    NotInGap,
    WindowTooNarrow,
)


@dataclass(frozen=True)
class EdgeBranch:
    """Continuous edge-mode curve omega(kx) with endpoint classification.

    samples is an ordered tuple of (kx, omega); start_event / end_event are
    one of 'band_merge_lower_limit' (meets the lower limit of the upper
    band), 'band_merge_upper' (meets the upper limit of the lower band),
    'persists' (still approaching the band limit at the grid boundary, i.e.
    an asymptotic merge beyond the window) or 'exits_window' (leaves the grid
    unresolved in mid-gap).
    """

    samples: tuple
    start_event: str
    end_event: str


def _q_squared(p: ModelParams, kx, omega):
    """The two values of q^2 solving det(H(kx, q) - omega) = 0 (vectorized)."""
    a = p.eps**2
    b = 1.0 - 2.0 * p.eps * p.m
    c = p.m**2 - np.asarray(omega, dtype=complex) ** 2
    sq = np.sqrt(b * b - 4.0 * a * c)
    kx2 = np.asarray(kx, dtype=float) ** 2
    return (-b + sq) / (2.0 * a) - kx2, (-b - sq) / (2.0 * a) - kx2


def transverse_roots(p: ModelParams, kx, omega, tol=1e-9):
    """Four complex roots q of det(H(kx, q) - omega) = 0, in +- pairs.

    The symbol is even in q, so the quartic is a quadratic in q^2 solved in
    closed form; principal square roots give one representative per pair.
    """
    t1, t2 = _q_squared(p, float(kx), float(omega))
    q1, q2 = np.sqrt(complex(t1)), np.sqrt(complex(t2))
    roots = (q1, -q1, q2, -q2)
    scale = max(abs(q1), abs(q2), 1.0)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(roots[i] - roots[j]) < tol * scale:
                raise DegenerateRoots(
                    f"coincident transverse roots at kx={kx}, omega={omega} "
                    "(band-edge energy)"
                )
    return roots


def decaying_pair(roots, tol=1e-12):
    """The two roots with Im q > 0, sorted by imaginary part."""
    dec = [q for q in roots if q.imag > tol]
    if len(dec) != 2:
        raise NotInGap(
            f"expected 2 strictly decaying transverse modes, found {len(dec)} "
            "(energy not inside the gap region)"
        )
    return tuple(sorted(dec, key=lambda q: q.imag))


def _sigma_min_values(p: ModelParams, bc: BoundaryCondition, kx, omega):
    """Vectorized decaying-combination detector over an omega array.

    Builds unit kernel vectors of H(kx, q_i) - omega at the two decaying
    roots, lifts them to boundary 4-vectors, applies A(kx) and returns the
    smallest singular value of the column-normalized 2x2 system.
    """
    omega = np.asarray(omega, dtype=float)
    t1, t2 = _q_squared(p, kx, omega)
    qs = np.stack([np.sqrt(t1), np.sqrt(t2)])  # principal branch, Im >= 0

    k2 = kx * kx + qs * qs
    d3 = p.m - p.eps * k2
    # Kernel of [[d3-w, -kx+iq], [-kx-iq, -d3-w]] from the larger row.
    r1 = np.stack([d3 - omega, -kx + 1j * qs])
    r2 = np.stack([-kx - 1j * qs, -d3 - omega])
    n1 = np.abs(r1[0]) ** 2 + np.abs(r1[1]) ** 2
    n2 = np.abs(r2[0]) ** 2 + np.abs(r2[1]) ** 2
    use1 = n1 >= n2
    a = np.where(use1, r1[0], r2[0])
    b = np.where(use1, r1[1], r2[1])
    v = np.stack([b, -a])
    v = v / np.sqrt(np.abs(v[0]) ** 2 + np.abs(v[1]) ** 2)

    lift = np.stack([v[0], v[1], 1j * qs * v[0], 1j * qs * v[1]])
    amat_cols = np.einsum("ij,jq...->iq...", bc.A0, lift) + 1j * kx * np.einsum(
        "ij,jq...->iq...", bc.A1, lift
    )
    norms = np.sqrt(
        np.abs(amat_cols[0]) ** 2 + np.abs(amat_cols[1]) ** 2
    )
    cols = amat_cols / np.maximum(norms, 1e-300)
    det = cols[0, 0] * cols[1, 1] - cols[1, 0] * cols[0, 1]
    fro2 = np.sum(np.abs(cols) ** 2, axis=(0, 1))
    disc = np.maximum(fro2 * fro2 - 4.0 * np.abs(det) ** 2, 0.0)
    sig2 = np.maximum((fro2 - np.sqrt(disc)) / 2.0, 0.0)
    sig = np.sqrt(sig2)
    # A vanishing column means that a single decaying mode satisfies the
    # boundary condition on its own.
    return np.where(np.min(norms, axis=0) < 1e-13, 0.0, sig)


def edge_sigma_min(p: ModelParams, bc: BoundaryCondition, kx, omega):
    """Scalar detector; zero exactly on the edge-mode set (after validation)."""
    roots = transverse_roots(p, float(kx), float(omega))
    decaying_pair(roots)
    return float(_sigma_min_values(p, bc, float(kx), float(omega)))


def edge_eigenvalues(
    p: ModelParams,
    bc: BoundaryCondition,
    kx,
    n_scan=4001,
    eta=None,
    seed_tol=0.1,
    accept_tol=1e-5,
):
    """Edge-mode energies at fixed kx inside the gap region.

    Scans the detector over (-w_edge + eta, w_edge - eta), takes local
    minima below seed_tol as seeds and refines each in its bracketing
    interval; minima whose refined detector value is below accept_tol are
    accepted.
    """
    if eta is None:
        eta = 1e-4 * p.m
    w_edge = float(omega_plus(p, kx, 0.0))
    grid = np.linspace(-w_edge + eta, w_edge - eta, n_scan)
    sig = _sigma_min_values(p, bc, float(kx), grid)
    interior = (sig[1:-1] <= sig[:-2]) & (sig[1:-1] <= sig[2:])
    seeds = np.nonzero(interior & (sig[1:-1] < seed_tol))[0] + 1
    found = []
    for i in seeds:
        res = minimize_scalar(
            lambda w: float(_sigma_min_values(p, bc, float(kx), w)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < accept_tol:
            found.append(float(res.x))
    found.sort()
    merged = []
    for w in found:
        if not merged or w - merged[-1] > 1e-8 * max(1.0, w_edge):
            merged.append(w)
    return merged


def default_kx_grid(p: ModelParams, n=801, half_width=None):
    """Uniform kx window covering all finite-momentum band-merge events."""
    if half_width is None:
        half_width = max(3.0 * np.sqrt(p.m / p.eps), 10.0)
    return np.linspace(-half_width, half_width, n)


def _classify_endpoint(p, samples, at_grid_boundary, merge_tol, direction=+1):
    """Name the event at a branch endpoint from its last one or two samples.

    direction is +1 for the forward (increasing-kx) end of the branch and -1
    for its starting end when that lies on the grid boundary.
    """
    kx, w = samples[-1] if direction > 0 else samples[0]
    w_edge = float(omega_plus(p, kx, 0.0))
    d_up = w_edge - w
    d_low = w + w_edge
    slope = None
    if len(samples) >= 2:
        (kx0, w0), (kx1, w1) = samples[-2:] if direction > 0 else samples[:2]
        slope = (w1 - w0) / (kx1 - kx0)
        # Extrapolate one grid step; a branch heading into a band edge is
        # labeled a merge even when its last resolvable sample sits a steep
        # step away from the edge.
        step = direction * (kx1 - kx0)
        w_next = w + slope * step
        edge_next = float(omega_plus(p, kx + step, 0.0))
        if w_next >= edge_next:
            d_up = 0.0
        if w_next <= -edge_next:
            d_low = 0.0
    if not at_grid_boundary:
        if d_up <= merge_tol and d_up <= d_low:
            return "band_merge_lower_limit"
        if d_low <= merge_tol:
            return "band_merge_upper"
        # The zero left the scanned gap between two kx samples: attribute
        # the merge to the nearer band edge.
        return "band_merge_lower_limit" if d_up < d_low else "band_merge_upper"
    if min(d_up, d_low) <= merge_tol or slope is None:
        return "persists" if min(d_up, d_low) <= merge_tol else "exits_window"
    # At the window boundary: the branch persists if the widening gap
    # outruns it in the outward direction, otherwise the window is too
    # narrow to resolve the upcoming merge.
    h = 1e-6
    edge_slope = (
        float(omega_plus(p, kx + h, 0.0)) - float(omega_plus(p, kx - h, 0.0))
    ) / (2.0 * h)
    closing_up = direction * (edge_slope - slope) < 0.0
    closing_low = direction * (slope + edge_slope) < 0.0
    return "exits_window" if (closing_up or closing_low) else "persists"


def trace_branches(
    p: ModelParams,
    bc: BoundaryCondition,
    kx_grid=None,
    n_scan=4001,
    match_tol=None,
    merge_tol=None,
    ambiguity_ratio=0.25,
):
    """Continue the per-kx edge energies into branches with endpoint events."""
    if kx_grid is None:
        kx_grid = default_kx_grid(p)
    kx_grid = np.asarray(kx_grid, dtype=float)
    step = float(kx_grid[1] - kx_grid[0])
    if match_tol is None:
        # Edge-branch group velocities are bounded by the bulk band slope
        # over the window; 12 is a generous bound at default parameters.
        match_tol = 12.0 * step
    if merge_tol is None:
        merge_tol = 5.0 * step

    active = []  # list of dict(samples, start_at_boundary, miss)
    finished = []

    def close(br, at_boundary):
        finished.append(
            EdgeBranch(
                samples=tuple(br["samples"]),
                start_event=_classify_endpoint(
                    p, br["samples"], br["start_at_boundary"], merge_tol,
                    direction=-1,
                ),
                end_event=_classify_endpoint(
                    p, br["samples"], at_boundary, merge_tol, direction=+1
                ),
            )
        )

    for idx, kx in enumerate(kx_grid):
        omegas = edge_eigenvalues(p, bc, kx, n_scan=n_scan)
        first, last = idx == 0, idx == len(kx_grid) - 1
        claimed = [False] * len(omegas)
        still_active = []
        for br in active:
            w_prev = br["samples"][-1][1]
            dists = [
                abs(w - w_prev) if not claimed[j] else np.inf
                for j, w in enumerate(omegas)
            ]
            j_best = int(np.argmin(dists)) if dists else -1
            if j_best >= 0 and dists[j_best] < match_tol * (1 + br["miss"]):
                ranked = sorted(d for d in dists if np.isfinite(d))
                if (
                    len(ranked) >= 2
                    and ranked[1] < match_tol
                    and ranked[1] - ranked[0] < ambiguity_ratio * match_tol
                ):
                    raise AmbiguousContinuation(
                        f"two edge branches within {ranked[1]:.3g} of the same "
                        f"continuation at kx={kx}; refine the kx grid"
                    )
                claimed[j_best] = True
                br["samples"].append((float(kx), omegas[j_best]))
                br["miss"] = 0
                still_active.append(br)
            elif br["miss"] == 0 and not last:
                # Coast over a single missed sample (detection can fail for
                # one grid point when a zero narrows near a band edge).
                br["miss"] = 1
                still_active.append(br)
            else:
                close(br, at_boundary=False)
        active = still_active
        for j, w in enumerate(omegas):
            if not claimed[j]:
                active.append(
                    {
                        "samples": [(float(kx), w)],
                        "start_at_boundary": first,
                        "miss": 0,
                    }
                )
        if last:
            for br in active:
                close(br, at_boundary=True)
            active = []
    for br in active:  # pragma: no cover - loop always drains at last index
        close(br, at_boundary=True)
    return finished


def n_b_direct(p: ModelParams, bc: BoundaryCondition, kx_grid=None, **kwargs):
    """Signed count of branches exchanged with the upper band's lower limit.

    A branch emerging from the lower limit of the upper band as kx increases
    counts +1; one disappearing into it counts -1.  Branches labeled
    'persists' (asymptotic merges beyond any finite window) are excluded;
    the Levinson integral owns those events.
    """
    branches = trace_branches(p, bc, kx_grid=kx_grid, **kwargs)
    bad = [b for b in branches if "exits_window" in (b.start_event, b.end_event)]
    if bad:
        raise WindowTooNarrow(
            f"{len(bad)} branch(es) leave the kx window unresolved in mid-gap; "
            "widen kx_grid"
        )
    count = 0
    for b in branches:
        if b.start_event == "band_merge_lower_limit":
            count += 1
        if b.end_event == "band_merge_lower_limit":
            count -= 1
    return count


def spectrum_rows(p: ModelParams, bc: BoundaryCondition, kx_grid=None, **kwargs):
    """CSV-ready rows (kx, omega, branch_id); band edges get branch_id = -1.

    The band boundary samples (kx, +-omega_plus(kx, 0)) carry branch_id -1;
    edge-mode samples carry the 0-based index of their branch.
    """
    if kx_grid is None:
        kx_grid = default_kx_grid(p)
    kx_grid = np.asarray(kx_grid, dtype=float)
    branches = trace_branches(p, bc, kx_grid=kx_grid, **kwargs)
    rows = []
    for kx in kx_grid:
        w_edge = float(omega_plus(p, kx, 0.0))
        rows.append((float(kx), w_edge, -1))
        rows.append((float(kx), -w_edge, -1))
    for b_id, b in enumerate(branches):
        for kx, w in b.samples:
            rows.append((kx, w, b_id))
    return rows, branches
