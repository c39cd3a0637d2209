"""Exact scattering amplitude and the three winding engines.

For a bulk energy omega = omega_plus(kx, kappa) the scattering state mixes an
incoming wave psi0(kx, -kappa), an outgoing wave psi0(kx, +kappa) and an
evanescent component psi_inf(kx, kappa_ev).  Imposing the boundary condition
A(kx) on the 4-vector lifts and eliminating the evanescent coefficient gives
the reflection amplitude

    S(kx, kappa) = -g(kx, -kappa) / g(kx, kappa),
    g(kx, k) = det[ A(kx) Psi-hat_0(kx, k), A(kx) Psi-hat_inf(kx, kappa_ev) ],

a unimodular function of (kx, kappa) in the open upper half-plane.  Three
argument-increment integrals of S recover the bulk Chern number C_+ (the
closed circuit around the compactified half-plane), the signed edge-mode
count n_b (kx-line integral in the limit kappa -> 0, a relative Levinson
theorem), and the anomalous winding at infinity w_inf (along the
inverted-coordinate paths Gamma_delta(lambda)).

Gauge bookkeeping.  The determinant formula above evaluates the incoming and
outgoing waves on the section psi0, which is regular at infinite momentum but
carries a phase vortex at k = 0; both special points lie on the kappa = 0
boundary of the half-plane, so S is smooth and unimodular on the open
half-plane and interior loops wind by the number of enclosed defects
(generically zero).  The Chern number is carried entirely by the boundary of
the compactified half-plane, where no single incoming/outgoing section is
regular: the band-bottom line must be integrated in the gauge that extends
continuously through the origin -- obtained by multiplying S with the
transition phase ((kx - i*kappa)/|k|)^2 -- while the arc at infinite momentum
uses S itself.  The mismatch between the two trivializations is the clutching
number of the band bundle, which is why the band-bottom count n_b and the
asymptotic winding w_inf add up to C_+.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryCondition
from .bulk import ModelParams, kappa_ev_of, psi0_components, psi_inf_ev_components
from .errors import NoConvergence, PoleAtThreshold


@dataclass(frozen=True)
class WindingResult:
    """Raw phase integral, snapped integer, and refinement diagnostics."""

    phase_integral: float
    snapped: int | None
    diagnostics: tuple = ()
    max_step_arg: float = 0.0


@dataclass(frozen=True)
class DualPath:
    """Inverted-coordinate path Gamma_delta(lambda).

    The dual variable lambda_x in [-lambda, lambda] maps to
    kx = -lambda_x/(lambda_x^2 + delta^2), kappa = delta/(lambda_x^2 + delta^2),
    a circular arc through the high-momentum region kappa ~ 1/delta.

    The path parameter t in [0, 1] maps to lambda_x through a symmetric
    log-concentrated warp: the winding phase concentrates at dual scales
    lambda_x ~ delta^s with s ranging over {1/3, 1/2, 1, 2} depending on
    the boundary-condition class, so uniform lambda_x sampling at any
    fixed density aliases over the finer scales (the sub-delta ones map
    to finite kx at kappa ~ 1/delta, the top of the arc).  Log spacing
    down to a floor of delta^3 resolves every power-law scale with a
    fixed number of samples per decade.
    """

    delta: float
    lam: float

    @property
    def _warp_ratio(self):
        return self.lam / self.delta**3 + 1.0

    def points(self, t):
        s = 2.0 * np.asarray(t, dtype=float) - 1.0
        floor = self.delta**3
        lx = np.sign(s) * floor * (self._warp_ratio ** np.abs(s) - 1.0)
        denom = lx * lx + self.delta**2
        return -lx / denom, self.delta / denom


def g_values(p: ModelParams, bc: BoundaryCondition, kx, kappa_signed):
    """Vectorized determinant g(kx, kappa_signed); kappa_signed real nonzero."""
    kx = np.asarray(kx, dtype=float)
    ks = np.asarray(kappa_signed, dtype=float)
    kx, ks = np.broadcast_arrays(kx, ks)
    kev = kappa_ev_of(p, kx, ks)

    s0 = psi0_components(p, kx, ks)
    lift0 = np.stack([s0[0], s0[1], 1j * ks * s0[0], 1j * ks * s0[1]])
    si = psi_inf_ev_components(p, kx, kev)
    lifti = np.stack([si[0], si[1], 1j * kev * si[0], 1j * kev * si[1]])

    # Columns of the 2x2 system: A(kx) applied to each lift.
    c0 = np.einsum("ij,j...->i...", bc.A0, lift0) + 1j * kx * np.einsum(
        "ij,j...->i...", bc.A1, lift0
    )
    c1 = np.einsum("ij,j...->i...", bc.A0, lifti) + 1j * kx * np.einsum(
        "ij,j...->i...", bc.A1, lifti
    )
    return c0[0] * c1[1] - c0[1] * c1[0]


def s_values(p: ModelParams, bc: BoundaryCondition, kx, kappa, pole_tol=1e-12):
    """Vectorized S(kx, kappa) = -g(kx,-kappa)/g(kx,kappa); kappa > 0."""
    g_plus = g_values(p, bc, kx, +np.asarray(kappa, dtype=float))
    g_minus = g_values(p, bc, kx, -np.asarray(kappa, dtype=float))
    scale = np.abs(g_plus) + np.abs(g_minus)
    if np.any(np.abs(g_plus) <= pole_tol * np.maximum(scale, 1e-300)):
        raise PoleAtThreshold(
            "g(kx, kappa) vanishes on the sampled set (edge-mode merging point)"
        )
    return -g_minus / g_plus


def g_value(p, bc, kx, kappa_signed):
    """Scalar g(kx, kappa_signed)."""
    return complex(g_values(p, bc, float(kx), float(kappa_signed)))


def s_value(p, bc, kx, kappa, pole_tol=1e-12):
    """Scalar unimodular scattering amplitude at kappa > 0."""
    if not kappa > 0:
        raise ValueError("s_value requires kappa > 0")
    return complex(s_values(p, bc, float(kx), float(kappa), pole_tol=pole_tol))


def winding_along(
    evaluator,
    n0=256,
    snap_tol=0.1,
    max_depth=12,
    closed=False,
    max_step=np.pi / 2,
    max_n=1 << 21,
):
    """Total argument change of a nonvanishing path t in [0,1] -> C.

    evaluator must accept an array of path parameters and return the complex
    values.  The sample count doubles until every per-step principal-branch
    argument increment is below max_step and the last two refinement levels
    agree; phase_integral is the summed increment divided by 2*pi.  For
    closed=True the wrap-around step t=1 -> t=0 is included implicitly
    (evaluator is sampled on [0, 1) and the final step closes the loop).
    """
    diagnostics = []
    prev_phase = None
    max_n = max(max_n, n0)
    for level in range(max_depth + 1):
        n = n0 << level
        if n > max_n:
            break
        if closed:
            t = np.arange(n) / n
            z = np.asarray(evaluator(t))
            if np.any(z == 0):
                raise PoleAtThreshold("evaluator vanished on the path")
            steps = np.angle(np.roll(z, -1) / z)
        else:
            t = np.linspace(0.0, 1.0, n + 1)
            z = np.asarray(evaluator(t))
            if np.any(z == 0):
                raise PoleAtThreshold("evaluator vanished on the path")
            steps = np.angle(z[1:] / z[:-1])
        max_arg = float(np.abs(steps).max())
        phase = float(steps.sum() / (2.0 * np.pi))
        diagnostics.append({"n": n, "phase": phase, "max_step_arg": max_arg})
        if max_arg < max_step:
            if prev_phase is not None and abs(phase - prev_phase) < snap_tol:
                snapped = int(round(phase))
                return WindingResult(
                    phase_integral=phase,
                    snapped=snapped if abs(phase - snapped) < snap_tol else None,
                    diagnostics=tuple(diagnostics),
                    max_step_arg=max_arg,
                )
            prev_phase = phase
        else:
            prev_phase = None
    if max_arg >= max_step:
        raise NoConvergence(
            "argument steps did not fall below the refinement bound "
            f"(last max step {max_arg:.3f} rad at n={n})",
            result=WindingResult(phase, None, tuple(diagnostics), max_arg),
        )
    return WindingResult(phase, None, tuple(diagnostics), max_arg)


def _eval_nonzero(evaluator, t, lo, hi, floor=0.0):
    """Evaluate at t, nudging nodes that land on (or within noise of) a zero.

    A node value at or below `floor` carries no usable argument — exactly
    0 has none at all, and magnitudes at the cancellation-noise level
    produce a random one.  Structural zero lines (an A(kx) dropping rank
    at isolated kx) put such nodes on every path, so instead of failing
    the node is shifted by a growing fraction of its bracket [lo, hi].
    An exact zero that survives the nudges raises PoleAtThreshold.
    """
    t = np.array(t, dtype=float, copy=True)
    z = np.asarray(evaluator(t), dtype=complex)
    for k in range(3):
        hit = np.abs(z) <= floor
        if not np.any(hit):
            return t, z
        t[hit] = t[hit] + (hi[hit] - lo[hit]) * 1e-6 * 10.0 ** k
        z[hit] = np.asarray(evaluator(t[hit]))
    if np.any(z == 0):
        raise PoleAtThreshold("evaluator vanished on the path")
    return t, z


def _adaptive_ratio_phase(ev_num, ev_den, n0, max_step, max_depth, max_points):
    """Argument change of ev_num/ev_den on [0,1] by factor-driven bisection.

    Accumulates the quotient's principal-branch argument steps, but an
    interval is accepted only when *each factor's* own step is below
    max_step: a near-zero of one factor slews the quotient by a full
    2*pi inside a window that aliases to ~0 on any uniform grid, while
    the factor's own ~pi step always trips the bound and is resolved by
    local bisection at O(log(1/width)) cost.  An interval bisected down
    to machine width with the factor steps still large brackets a common
    zero line of both factors; there the quotient is smooth, so the
    interval is accepted with its (small) quotient step — unless the
    quotient step itself is large, which is a genuine on-path pole.
    Returns (phase_in_turns, max_step_arg, n_evals).
    """
    t = np.linspace(0.0, 1.0, n0 + 1)
    lo = np.concatenate([[0.0], t[:-1]])
    hi = np.concatenate([t[1:], [1.0]])
    tn, zn = _eval_nonzero(ev_num, t, lo, hi)
    td, zd = _eval_nonzero(ev_den, t, lo, hi)
    scale_n = max(float(np.median(np.abs(zn))), np.finfo(float).tiny)
    scale_d = max(float(np.median(np.abs(zd))), np.finfo(float).tiny)
    floor_n = 1e-12 * scale_n
    floor_d = 1e-12 * scale_d
    for ev, z, floor in ((ev_num, zn, floor_n), (ev_den, zd, floor_d)):
        low = np.abs(z) <= floor
        if np.any(low):
            _, z_fixed = _eval_nonzero(ev, t[low], lo[low], hi[low],
                                       floor=floor)
            z[low] = z_fixed
    ta, tb = t[:-1], t[1:]
    na, nb_ = zn[:-1], zn[1:]
    da, db = zd[:-1], zd[1:]
    total = 0.0
    max_arg = 0.0
    n_evals = 2 * t.size
    floor_hits = 0
    for _depth in range(max_depth + 1):
        step_n = np.angle(nb_ / na)
        step_d = np.angle(db / da)
        step_q = np.angle((nb_ * da) / (na * db))
        bad = np.maximum(np.abs(step_n), np.abs(step_d)) > max_step
        # an interval bisected down to a narrow bracket with all four
        # endpoint magnitudes deep below the factor scales surrounds a
        # common zero of both factors (e.g. a momentum where the boundary
        # matrix drops rank, which zeros g at every kappa): the quotient
        # is smooth there and the endpoint phases are still accurate, so
        # the interval is accepted with its quotient step
        pinched = (
            bad
            & (tb - ta < 1e-7)
            & (np.abs(na) < 1e-4 * scale_n)
            & (np.abs(nb_) < 1e-4 * scale_n)
            & (np.abs(da) < 1e-4 * scale_d)
            & (np.abs(db) < 1e-4 * scale_d)
        )
        tm = 0.5 * (ta + tb)
        stuck = bad & ~pinched & ((tm <= ta) | (tm >= tb))
        if np.any(np.abs(step_q[stuck | pinched]) > max_step):
            raise PoleAtThreshold(
                "quotient argument step stayed above the bound down to "
                "machine interval width (vortex on the path)"
            )
        floor_hits += int(stuck.sum()) + int(pinched.sum())
        bad &= ~(stuck | pinched)
        good = ~bad
        if np.any(good):
            max_arg = max(max_arg, float(np.abs(step_q[good]).max()))
            total += float(step_q[good].sum())
        if not bad.any():
            return total / (2.0 * np.pi), max_arg, n_evals, floor_hits
        ta, tb = ta[bad], tb[bad]
        na, nb_, da, db = na[bad], nb_[bad], da[bad], db[bad]
        tm = 0.5 * (ta + tb)
        _, znm = _eval_nonzero(ev_num, tm, ta, tb, floor=floor_n)
        _, zdm = _eval_nonzero(ev_den, tm, ta, tb, floor=floor_d)
        n_evals += 2 * tm.size
        if n_evals > max_points:
            raise NoConvergence(
                f"adaptive winding exceeded the {max_points}-sample budget"
            )
        ta = np.concatenate([ta, tm])
        tb = np.concatenate([tm, tb])
        na = np.concatenate([na, znm])
        nb_ = np.concatenate([znm, nb_])
        da = np.concatenate([da, zdm])
        db = np.concatenate([zdm, db])
    raise NoConvergence(
        f"adaptive winding did not resolve all steps within depth {max_depth}"
    )


def winding_adaptive(
    ev_num,
    ev_den=None,
    n0=512,
    snap_tol=0.1,
    max_step=np.pi / 4,
    max_depth=60,
    max_points=1 << 22,
):
    """Argument winding of ev_num/ev_den on [0,1] with local refinement.

    ev_den=None integrates a single nonvanishing evaluator.  The phase is
    computed on the starting grid and again on its doubling; the two
    totals must agree within snap_tol (guarding against a feature aliased
    identically by the coarse grid and all its bisections).
    """
    if ev_den is None:
        def ev_den(t):
            return np.ones(np.shape(t), dtype=complex)
    diagnostics = []
    prev = None
    for n in (n0, 2 * n0):
        phase, max_arg, n_evals, floor_hits = _adaptive_ratio_phase(
            ev_num, ev_den, n, max_step, max_depth, max_points
        )
        diagnostics.append({"n": n, "phase": phase, "max_step_arg": max_arg,
                            "n_evals": n_evals, "floor_hits": floor_hits})
        if prev is not None and abs(phase - prev) >= snap_tol:
            raise NoConvergence(
                "adaptive winding disagreed between starting grids "
                f"({prev:.4f} vs {phase:.4f})",
                result=WindingResult(phase, None, tuple(diagnostics), max_arg),
            )
        prev = phase
    snapped = int(round(phase))
    return WindingResult(
        phase_integral=phase,
        snapped=snapped if abs(phase - snapped) < snap_tol else None,
        diagnostics=tuple(diagnostics),
        max_step_arg=max_arg,
    )


def s_values_bottom_gauge(p: ModelParams, bc: BoundaryCondition, kx, kappa):
    """S in the gauge whose in/out sections extend through the band bottom.

    Multiplies the determinant-formula amplitude by the section transition
    phase ((kx - i*kappa)/|k|)^2, removing the origin vortex of the default
    sections so the amplitude is continuous across kx = 0 as kappa -> 0.
    This is the gauge in which the Levinson line integral counts edge-branch
    merging events.
    """
    s = s_values(p, bc, kx, kappa)
    z = np.asarray(kx, dtype=float) + 1j * np.asarray(kappa, dtype=float)
    return s * (np.conj(z) / np.abs(z)) ** 2


def _pow2_at_least(n):
    return 1 << max(0, int(np.ceil(np.log2(n))))


_CHERN_BOUNDARY_MEMO: dict = {}


def chern_via_scattering(
    p: ModelParams,
    bc: BoundaryCondition,
    loop_center=(0.0, 2.0),
    loop_radius=1.0,
    n0=256,
    snap_tol=0.1,
):
    """Chern number C_+ from scattering data; loop- and bc-independent.

    The amplitude is smooth on the open half-plane, so the given
    counter-clockwise loop contributes only its enclosed defect count
    (generically zero; reported as the first diagnostics entry).  The full
    invariant is the circuit around the boundary of the compactified
    half-plane: the band-bottom segment integrated in the gauge regular
    through kappa = 0 (see s_values_bottom_gauge) plus the arc at infinite
    momentum in the default gauge.  phase_integral is the sum of the three
    contributions and snaps to C_+ for every self-adjoint boundary condition.
    """
    cx, cy = loop_center
    if not cy - loop_radius > 0:
        raise ValueError("loop must stay in the open upper half-plane kappa > 0")

    def _loop_points(t):
        ang = 2.0 * np.pi * np.asarray(t)
        return cx + loop_radius * np.cos(ang), cy + loop_radius * np.sin(ang)

    def ev_out(t):
        kx, kap = _loop_points(t)
        return g_values(p, bc, kx, -kap)

    def ev_in(t):
        kx, kap = _loop_points(t)
        return g_values(p, bc, kx, kap)

    # t = 0 and t = 1 are the same loop point, so the open-path winding of
    # the quotient equals the closed-loop winding
    loop_part = winding_adaptive(ev_out, ev_in, n0=n0, snap_tol=snap_tol)

    key = (p.m, p.eps, bc.A0.tobytes(), bc.A1.tobytes())
    boundary = _CHERN_BOUNDARY_MEMO.get(key)
    if boundary is None:
        try:
            bottom = n_b_levinson(
                p, bc, kappa_seq=(0.1, 0.03), snap_tol=snap_tol
            )
        except NoConvergence:
            # slowly converging kappa -> 0 limit: extend the sequence
            bottom = n_b_levinson(
                p, bc, kappa_seq=(0.1, 0.03, 0.01), snap_tol=snap_tol
            )
        arc = w_infinity(
            p,
            bc,
            delta_seq=(3e-3, 1e-3),
            lambda_seq=(0.03, 0.02),
            snap_tol=snap_tol,
        )
        boundary = (bottom, arc)
        _CHERN_BOUNDARY_MEMO[key] = boundary
    bottom, arc = boundary

    phase = loop_part.phase_integral + bottom.phase_integral + arc.phase_integral
    snapped = int(round(phase))
    ok = (
        loop_part.snapped is not None
        and bottom.snapped is not None
        and arc.snapped is not None
        and abs(phase - snapped) < snap_tol
    )
    return WindingResult(
        phase_integral=phase,
        snapped=snapped if ok else None,
        diagnostics=(
            {"segment": "loop", "result": loop_part},
            {"segment": "band_bottom", "result": bottom},
            {"segment": "infinity_arc", "result": arc},
        ),
        max_step_arg=max(
            loop_part.max_step_arg, bottom.max_step_arg, arc.max_step_arg
        ),
    )


def default_levinson_cutoff(p: ModelParams):
    """kx half-window for the Levinson line integral.

    Chosen as 1/min(lambda) of the default w_infinity path sequence, so the
    finite-momentum count and the asymptotic winding split the kappa = 0
    axis at the same cut: an edge branch merging at |kx| between the two
    regions would otherwise be missed by both (or counted by both) and break
    the bookkeeping of C_+ = n_b + w_inf.  Merges sitting close to the cut
    itself destabilize both computations and surface as NoConvergence.
    """
    return max(3.0 * np.sqrt(p.m / p.eps), 50.0)


def n_b_levinson(
    p: ModelParams,
    bc: BoundaryCondition,
    kappa_seq=(0.1, 0.03, 0.01),
    K=None,
    n0=512,
    snap_tol=0.1,
    max_jitter=4,
):
    """Signed edge-mode count from the scattering phase along the band bottom.

    Winds kx over [-K, K] at each kappa of the decreasing sequence, in the
    band-bottom gauge (s_values_bottom_gauge); the snapped value of the
    smallest kappa is accepted when the last two kappa levels agree.  Merging
    events concentrate the phase in kx-windows of width ~kappa, so the sample
    count is scaled with K/kappa (a full 2*pi slip between two samples would
    otherwise alias to zero).  A pole on the line (an edge branch merging
    exactly at a sample energy) is retried at a jittered kappa.
    """
    if K is None:
        K = default_levinson_cutoff(p)
    diagnostics = []
    phases = []
    for kap_target in kappa_seq:
        kap = kap_target
        for attempt in range(max_jitter + 1):
            n_start = max(n0, _pow2_at_least(16.0 * K / kap))

            def ev_num(t, kap=kap):
                kx = -K + 2.0 * K * np.asarray(t)
                z = kx + 1j * kap
                return (g_values(p, bc, kx, -kap)
                        * (np.conj(z) / np.abs(z)) ** 2)

            def ev_den(t, kap=kap):
                kx = -K + 2.0 * K * np.asarray(t)
                return g_values(p, bc, kx, kap)

            try:
                # bottom-gauge amplitude as a factor quotient, so a merge
                # event grazing the line refines locally instead of
                # aliasing (see winding_adaptive)
                res = winding_adaptive(ev_num, ev_den, n0=n_start,
                                       snap_tol=snap_tol)
                break
            except PoleAtThreshold:
                if attempt == max_jitter:
                    raise
                kap = kap_target * (1.0 + 0.1 * (-1) ** attempt * (1 + attempt // 2))
        phases.append(res.phase_integral)
        diagnostics.append({"kappa": kap, "levels": res.diagnostics})
    phase = phases[-1]
    snapped = int(round(phase))
    ok = (
        abs(phase - snapped) < snap_tol
        and len(phases) >= 2
        and abs(phases[-1] - phases[-2]) < snap_tol
    )
    result = WindingResult(
        phase_integral=phase,
        snapped=snapped if ok else None,
        diagnostics=tuple(diagnostics),
        max_step_arg=res.max_step_arg,
    )
    if not ok:
        raise NoConvergence(
            f"Levinson winding did not stabilize over kappa_seq (phases {phases})",
            result=result,
        )
    return result


def w_infinity(
    p: ModelParams,
    bc: BoundaryCondition,
    delta_seq=(1e-2, 3e-3, 1e-3),
    lambda_seq=(0.05, 0.03, 0.02),
    n0=512,
    snap_tol=0.1,
    max_jitter=4,
    delta_min=1e-6,
):
    """Winding of S at infinite momentum along the paths Gamma_delta(lambda).

    The definition is an iterated limit: delta -> 0 first, then lambda -> 0.
    For each lambda, the winding is computed over the decreasing delta
    sequence — stopping early once two consecutive values agree within
    snap_tol, and extending below the listed tail (ratio 0.3 per step,
    down to delta_min) when convergence is slow — and the column is
    accepted when its last two values agree within snap_tol (the inner
    limit); the final value is the smallest-lambda column, which must
    itself be accepted and agree with the previous accepted column (the
    outer limit).  Columns whose path endpoint
    kappa = delta/(lambda^2+delta^2) grazes a finite-momentum edge-branch
    feature fail the inner test; such larger-lambda columns are discarded,
    which is what the outer lambda -> 0 limit is for — but the smallest
    lambda is never discarded, since the limit is taken at lambda -> 0.
    The winding concentrates at dual scale lambda_x ~ delta, so the sample
    count is scaled with lambda/delta.  A zero of g exactly on a sampled
    path (an edge branch crossing it) is retried at a jittered delta.

    Some boundary conditions develop a directional near-zero of g along a
    ray, which pinches a full 2*pi of the amplitude's phase slew into a
    window of width ~ delta^2 in the ray parameter — narrow enough to alias
    to zero between adjacent samples of any affordable uniform grid.  The
    amplitude is therefore integrated as a factor quotient with
    winding_adaptive: each factor's own argument steps by ~pi across the
    pinch, which always trips the step bound and is resolved by local
    bisection.
    """
    diagnostics = []
    column_values = []
    last = None
    for lam in lambda_seq:
        col = []
        failed = False
        deltas = list(delta_seq)
        i = 0
        while i < len(deltas):
            delta_target = deltas[i]
            res = None
            delta = delta_target
            for attempt in range(max_jitter + 1):
                path = DualPath(delta=delta, lam=lam)
                # the warped spacing at the path endpoints is ln(ratio)
                # times coarser than uniform; aim for ~delta/16 there so
                # band-edge features near |kx| = 1/lam land on the base
                # grid, but cap the count — factor-driven bisection in
                # winding_adaptive resolves anything the base grid misses
                n_start = max(n0, min(1 << 16, _pow2_at_least(
                    32.0 * lam * np.log(path._warp_ratio) / delta)))

                def ev_out(t, path=path):
                    kx, kap = path.points(t)
                    return g_values(p, bc, kx, -kap)

                def ev_in(t, path=path):
                    kx, kap = path.points(t)
                    return g_values(p, bc, kx, kap)

                try:
                    # S = -g(kx,-kappa)/g(kx,kappa): winding_adaptive
                    # accumulates the quotient's phase with refinement
                    # driven by the individual factors, so a directional
                    # near-zero of g (a ~pi factor step) is resolved
                    # instead of aliasing the quotient's 2*pi slew.
                    res = winding_adaptive(ev_out, ev_in, n0=n_start,
                                           snap_tol=snap_tol)
                    break
                except PoleAtThreshold:
                    if attempt == max_jitter:
                        break
                    delta = delta_target * (1.0 + 0.013 * (attempt + 1))
                except NoConvergence as exc:
                    diagnostics.append({"delta": delta, "lambda": lam,
                                        "error": str(exc)})
                    break
            if res is None:
                failed = True
                break
            last = res
            col.append(res.phase_integral)
            diagnostics.append({"delta": delta, "lambda": lam, "phase": col[-1]})
            # early stop needs a margin over the acceptance tolerance (a
            # slowly decaying column would be accepted mid-flight) and
            # proximity to an integer (a non-monotone column can plateau
            # briefly at the top of a hump); exhausting the sequence
            # still accepts on plain agreement of the last two values
            if (len(col) >= 2 and abs(col[-1] - col[-2]) < snap_tol / 3.0
                    and abs(col[-1] - round(col[-1])) < snap_tol):
                break
            # slow algebraic delta -> 0 convergence (some boundary
            # conditions approach the limit like sqrt(delta)): extend the
            # sequence below its listed tail down to delta_min
            if i == len(deltas) - 1 and deltas[-1] * 0.3 >= delta_min:
                deltas.append(deltas[-1] * 0.3)
            i += 1
        accepted = (not failed and len(col) >= 2
                    and abs(col[-1] - col[-2]) < snap_tol)
        if accepted:
            column_values.append(col[-1])
        diagnostics.append(
            {"lambda": lam, "delta_limit": col[-1] if accepted else None}
        )
        last_column_accepted = accepted
    ok = (
        len(column_values) >= 2
        and last_column_accepted
        and abs(column_values[-1] - column_values[-2]) < snap_tol
    )
    if column_values:
        phase = column_values[-1]
    elif last is not None:
        phase = last.phase_integral
    else:
        phase = float("nan")
    snapped = int(round(phase)) if np.isfinite(phase) else None
    ok = ok and snapped is not None and abs(phase - snapped) < snap_tol
    result = WindingResult(
        phase_integral=phase,
        snapped=snapped if ok else None,
        diagnostics=tuple(diagnostics),
        max_step_arg=last.max_step_arg if last is not None else float("nan"),
    )
    if not ok:
        raise NoConvergence(
            "winding at infinity did not stabilize across the iterated "
            f"(delta, lambda) limits (diagnostics {diagnostics})",
            result=result,
        )
    return result


def winding_trace(p, bc, kind, n=2048, **kwargs):
    """Sampled trace of a winding path for CSV export.

    kind is one of 'chern', 'levinson', 'infinity'; returns a list of rows
    (t, kx, kappa, Re S, Im S, cumulative_arg) at n samples of the finest
    default path of that winding.
    """
    t = np.linspace(0.0, 1.0, n + 1)
    if kind == "chern":
        cx, cy = kwargs.get("loop_center", (0.0, 2.0))
        r = kwargs.get("loop_radius", 1.0)
        ang = 2.0 * np.pi * t
        kx, kap = cx + r * np.cos(ang), cy + r * np.sin(ang)
    elif kind == "levinson":
        K = kwargs.get("K") or default_levinson_cutoff(p)
        kap0 = kwargs.get("kappa", 0.01)
        kx, kap = -K + 2.0 * K * t, np.full_like(t, kap0)
    elif kind == "infinity":
        path = DualPath(
            delta=kwargs.get("delta", 1e-3), lam=kwargs.get("lam", 0.05)
        )
        kx, kap = path.points(t)
    else:
        raise ValueError(f"unknown winding kind {kind!r}")
    if kind == "levinson":
        s = s_values_bottom_gauge(p, bc, kx, kap)
    else:
        s = s_values(p, bc, kx, kap)
    steps = np.angle(s[1:] / s[:-1])
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    return [
        (float(t[i]), float(kx[i]), float(kap[i]), float(s[i].real),
         float(s[i].imag), float(cum[i]))
        for i in range(len(t))
    ]
