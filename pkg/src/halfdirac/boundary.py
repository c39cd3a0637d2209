"""Local boundary conditions on the half-plane and their classification.

A boundary condition is a pair of 2x4 complex matrices (A0, A1) acting on the
boundary data (psi, eps * psi') through A(kx) = A0 + i*kx*A1, with the right
2x2 block of A1 identically zero.  Self-adjointness of the half-plane
operator is equivalent to A(kx) Omega^{-1} A(kx)* = 0 for every kx, with
Omega the boundary symplectic form; splitting in powers of kx reduces this to
two kx-independent 2x2 matrix relations.

Up to left multiplication by GL(2,C), every self-adjoint rank-2 condition
falls into one of seven classes, indexed by the Schubert cell of A0 when
rank(A0) = 2 (cells {1,2}, {1,4}, {2,3}, {2,4}, {3,4}; cell {1,3} admits no
self-adjoint member) and otherwise by the ranks of (A0, A1): class B for
rank(A1) = 2 and class C for rank(A0) = rank(A1) = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bulk import ModelParams
from .errors import (
    ConstraintViolation,
    InternalContradiction,
    NotRank2,
    NotSelfAdjoint,
    UnknownClass,
)

# Generic probe values of kx for almost-everywhere rank checks.
_PROBE_KX = (0.7316624790355, -1.4142135623731, 2.9014572934153)

_RANK_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryCondition:
    """Pair (A0, A1) defining the condition (A0 + i*kx*A1) Psi-hat = 0."""

    A0: np.ndarray
    A1: np.ndarray

    def __post_init__(self):
        A0 = np.array(self.A0, dtype=complex)
        A1 = np.array(self.A1, dtype=complex)
        if A0.shape != (2, 4) or A1.shape != (2, 4):
            raise ValueError("A0 and A1 must be 2x4 complex matrices")
        scale = max(np.abs(A1).max(), 1.0)
        if np.abs(A1[:, 2:]).max() > 1e-12 * scale:
            raise ValueError("right 2x2 block of A1 must be zero")
        A1[:, 2:] = 0.0
        A0.setflags(write=False)
        A1.setflags(write=False)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "A1", A1)

    def a_matrix(self, kx):
        """A(kx) = A0 + i*kx*A1."""
        return self.A0 + 1j * kx * self.A1

    def to_dict(self):
        return {"A0": _mat_to_json(self.A0), "A1": _mat_to_json(self.A1)}

    @classmethod
    def from_dict(cls, d):
        return cls(A0=_mat_from_json(d["A0"]), A1=_mat_from_json(d["A1"]))


@dataclass(frozen=True)
class ClassLabel:
    """Class tag and the canonical parameters of its table row."""

    tag: str
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "tag": self.tag,
            "params": {
                k: [float(np.real(v)), float(np.imag(v))]
                for k, v in self.params.items()
            },
        }

    @classmethod
    def from_dict(cls, d):
        params = {}
        for k, [re, im] in d.get("params", {}).items():
            params[k] = re if im == 0.0 else complex(re, im)
        return cls(tag=d["tag"], params=params)


def _mat_to_json(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M)]


def _mat_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def omega_matrix(p: ModelParams):
    """Boundary symplectic form on the 4-vector data (psi, eps*psi')."""
    e = p.eps
    return np.array(
        [
            [0, 1, e, 0],
            [-1, 0, 0, -e],
            [-e, 0, 0, 0],
            [0, e, 0, 0],
        ],
        dtype=complex,
    )


def omega_inverse(p: ModelParams):
    """Inverse of the boundary symplectic form, eps^{-2} [[0, -O1], [O1, O2]]."""
    e = p.eps
    O1 = np.array([[e, 0], [0, -e]], dtype=complex)
    O2 = np.array([[0, -1], [1, 0]], dtype=complex)
    top = np.hstack([np.zeros((2, 2)), -O1])
    bot = np.hstack([O1, O2])
    return np.vstack([top, bot]) / e**2


def _omega_blocks(p: ModelParams):
    O1 = np.array([[p.eps, 0], [0, -p.eps]], dtype=complex)
    O2 = np.array([[0, -1], [1, 0]], dtype=complex)
    return O1, O2


def sa_residual(p: ModelParams, bc: BoundaryCondition):
    """Largest entry of the two kx-split self-adjointness relations.

    With A0 = [L | R] and A1 = [B | 0] the relations are
    -L O1 R* + R O1 L* + R O2 R* = 0  (kx-independent part)
    and B O1 R* + R O1 B* = 0  (linear-in-kx part).
    """
    O1, O2 = _omega_blocks(p)
    L, R = bc.A0[:, :2], bc.A0[:, 2:]
    B = bc.A1[:, :2]
    c1 = -L @ O1 @ R.conj().T + R @ O1 @ L.conj().T + R @ O2 @ R.conj().T
    c2 = B @ O1 @ R.conj().T + R @ O1 @ B.conj().T
    return max(np.abs(c1).max(), np.abs(c2).max())


def is_self_adjoint(p: ModelParams, bc: BoundaryCondition, tol=1e-10):
    """True iff A(kx) Omega^{-1} A(kx)* = 0 for every kx (split relations)."""
    scale = max(np.abs(bc.A0).max(), np.abs(bc.A1).max(), 1.0) ** 2
    return sa_residual(p, bc) <= tol * scale


def rank_2x4(M, tol=_RANK_TOL):
    """Numerical rank of a 2x4 matrix from its singular values."""
    s = np.linalg.svd(np.asarray(M, dtype=complex), compute_uv=False)
    if s[0] <= tol * max(1.0, np.abs(M).max() if np.asarray(M).size else 1.0):
        return 0
    return int(np.sum(s > tol * s[0]))


def _rref_from_right(A0, A1, tol):
    """Row-reduce A0 with pivots scanned from the rightmost column.

    Returns (A0c, A1c, pivots) where pivots are the 0-based pivot columns of
    A0 sorted increasingly and the rows of (A0c, A1c) are ordered so that the
    first row carries the *smaller* pivot column, matching the canonical cell
    shapes.  The same GL2 row operations are applied to A1.
    """
    M = np.array(A0[:, ::-1], dtype=complex)
    N = np.array(A1, dtype=complex)
    scale = max(np.abs(M).max(), 1.0)
    piv_rev = []
    row = 0
    for col in range(4):
        if row >= 2:
            break
        i = row + int(np.argmax(np.abs(M[row:, col])))
        if abs(M[i, col]) <= tol * scale:
            continue
        if i != row:
            M[[row, i]] = M[[i, row]]
            N[[row, i]] = N[[i, row]]
        f = M[row, col]
        M[row] /= f
        N[row] /= f
        other = 1 - row
        fac = M[other, col]
        M[other] -= fac * M[row]
        N[other] -= fac * N[row]
        piv_rev.append(col)
        row += 1
    # Reversed-column pivot c corresponds to original column 3 - c; the row
    # reduced first holds the rightmost original pivot, i.e. the *second*
    # canonical row.
    A0c = M[::-1, ::-1].copy()
    A1c = N[::-1, :].copy()
    pivots = sorted(3 - c for c in piv_rev)
    return A0c, A1c, pivots


def _require_real(z, name, tol):
    if abs(np.imag(z)) > tol:
        raise InternalContradiction(
            f"canonical parameter {name} should be real, got {z}"
        )
    return float(np.real(z))


def _require_small(z, name, tol):
    if abs(z) > tol:
        raise InternalContradiction(
            f"canonical entry {name} should vanish, got {z}"
        )


def classify(p: ModelParams, bc: BoundaryCondition, tol=_RANK_TOL) -> ClassLabel:
    """Schubert-cell classification into the seven self-adjoint classes."""
    if not is_self_adjoint(p, bc):
        raise NotSelfAdjoint(
            f"self-adjointness residual {sa_residual(p, bc):.3e} exceeds tolerance"
        )
    for kx in _PROBE_KX:
        if rank_2x4(bc.a_matrix(kx), tol) != 2:
            raise NotRank2(
                f"A(kx) has rank < 2 at generic probe kx={kx}"
            )
    r0 = rank_2x4(bc.A0, tol)
    r1 = rank_2x4(bc.A1, tol)
    if r0 == 2:
        return _classify_cell_a(p, bc, tol)
    if r1 == 2:
        return _classify_b(p, bc, tol)
    if r0 == 1 and r1 == 1:
        return _classify_c(p, bc, tol)
    raise NotRank2(
        f"no admissible class for rank(A0)={r0}, rank(A1)={r1}"
    )


def _classify_cell_a(p, bc, tol):
    A0c, A1c, pivots = _rref_from_right(bc.A0, bc.A1, tol)
    vtol = 1e-7 * max(np.abs(A0c).max(), np.abs(A1c).max(), 1.0)
    piv = tuple(pivots)
    if piv == (0, 1):
        B = A1c[:, :2]
        return ClassLabel("A12", {
            "b11": B[0, 0], "b12": B[0, 1], "b21": B[1, 0], "b22": B[1, 1],
        })
    if piv == (0, 3):
        _require_small(A0c[1, 2], "A0[2,3]", vtol)
        alpha = _require_real(A0c[1, 1], "alpha", vtol)
        _require_small(A1c[0, 1], "A1[1,2]", vtol)
        beta = _require_real(-1j * A1c[1, 1], "beta", vtol)
        return ClassLabel("A14", {
            "alpha": alpha, "beta": beta,
            "b11": A1c[0, 0], "b21": A1c[1, 0],
        })
    if piv == (1, 2):
        _require_small(A0c[0, 0], "A0[1,1]", vtol)
        alpha = _require_real(A0c[1, 0], "alpha", vtol)
        _require_small(A1c[0, 0], "A1[1,1]", vtol)
        beta = _require_real(-1j * A1c[1, 0], "beta", vtol)
        return ClassLabel("A23", {
            "alpha": alpha, "beta": beta,
            "b12": A1c[0, 1], "b22": A1c[1, 1],
        })
    if piv == (1, 3):
        a11 = A0c[0, 0]
        if abs(a11) <= vtol:
            raise InternalContradiction(
                "cell {2,4} self-adjointness requires a11 != 0"
            )
        _require_small(A0c[1, 2] - 1.0 / np.conj(a11), "A0[2,3]-1/conj(a11)", vtol)
        alpha = _require_real((A0c[1, 0] - 1.0 / p.eps) / a11, "alpha", vtol)
        b11 = A1c[0, 0]
        _require_small(A1c[0, 1] - b11 / a11, "A1[1,2]-b11/a11", vtol)
        b21 = A1c[1, 0]
        beta = _require_real(-1j * (A1c[1, 1] - b21 / a11), "beta", vtol)
        return ClassLabel("A24", {
            "a11": a11, "alpha": alpha, "beta": beta, "b11": b11, "b21": b21,
        })
    if piv == (2, 3):
        alpha1 = _require_real(A0c[0, 0], "alpha1", vtol)
        alpha2 = _require_real(A0c[1, 1], "alpha2", vtol)
        a12 = A0c[0, 1]
        _require_small(A0c[1, 0] - (1.0 / p.eps - np.conj(a12)),
                       "A0[2,1]-(1/eps-conj(a12))", vtol)
        beta1 = _require_real(-1j * A1c[0, 0], "beta1", vtol)
        beta2 = _require_real(-1j * A1c[1, 1], "beta2", vtol)
        b12 = A1c[0, 1]
        _require_small(A1c[1, 0] - np.conj(b12), "A1[2,1]-conj(b12)", vtol)
        return ClassLabel("A34", {
            "alpha1": alpha1, "alpha2": alpha2, "a12": a12,
            "beta1": beta1, "beta2": beta2, "b12": b12,
        })
    if piv == (0, 2):
        raise InternalContradiction(
            "cell {1,3} contains no self-adjoint boundary condition; "
            "likely a rank-tolerance failure"
        )
    raise InternalContradiction(f"unexpected pivot set {piv}")


def _classify_b(p, bc, tol):
    B = bc.A1[:, :2]
    G = np.linalg.inv(B)
    A0c = G @ bc.A0
    scale = max(np.abs(A0c).max(), 1.0)
    vtol = 1e-7 * scale
    r1, r2 = A0c[0], A0c[1]
    if np.abs(r1).max() <= vtol:
        if np.abs(r2).max() <= vtol:
            return ClassLabel("B", {"a1": 0.0, "a2": 0.0, "mu": 0.0, "alpha": 0.0})
        raise InternalContradiction(
            "class B input outside the canonical parametrization "
            "(first canonical row vanishes, second does not)"
        )
    j = int(np.argmax(np.abs(r1)))
    mu = r2[j] / r1[j]
    if np.abs(r2 - mu * r1).max() > vtol:
        raise InternalContradiction("class B canonical rows not proportional")
    alpha = _require_real(-1j * r1[2], "alpha", vtol)
    _require_small(r1[3] - (-1j * np.conj(mu) * alpha), "a4+i*conj(mu)*alpha", vtol)
    return ClassLabel("B", {"a1": r1[0], "a2": r1[1], "mu": mu, "alpha": alpha})


def _classify_c(p, bc, tol):
    B = bc.A1[:, :2]
    scale = max(np.abs(B).max(), 1.0)
    if np.abs(B[:, 1]).max() > 1e-7 * scale:
        raise InternalContradiction(
            "class C input outside the canonical parametrization "
            "(second column of the A1 block does not vanish)"
        )
    u = B[:, 0]
    i = int(np.argmax(np.abs(u)))
    # Complete u to an invertible matrix and invert to map u -> e1.
    v = np.zeros(2, dtype=complex)
    v[1 - i] = 1.0
    G = np.linalg.inv(np.column_stack([u, v]))
    A0c = G @ bc.A0
    vtol = 1e-7 * max(np.abs(A0c).max(), 1.0)
    r1, r2 = A0c[0].copy(), A0c[1]
    if np.abs(r1).max() <= vtol:
        # Residual GL2 freedom [[1, t], [0, 1]] preserves the canonical A1;
        # use it to move the content of the second row into the first.
        r1 = r1 + r2
    j = int(np.argmax(np.abs(r1)))
    mu = r2[j] / r1[j]
    if np.abs(r2 - mu * r1).max() > vtol:
        raise InternalContradiction("class C canonical rows not proportional")
    _require_small(r1[2], "a3", vtol)
    a1, a2, a4 = r1[0], r1[1], r1[3]
    if abs(np.imag(a2 * np.conj(a4))) > vtol:
        raise InternalContradiction("class C requires Im(a2 conj(a4)) = 0")
    return ClassLabel("C", {"a1": a1, "a2": a2, "a4": a4, "mu": mu})


def _get_real(params, name, default=0.0):
    v = params.get(name, default)
    if abs(np.imag(v)) > 1e-12 * max(1.0, abs(v)):
        raise ConstraintViolation(f"parameter {name} must be real, got {v}")
    return float(np.real(v))


def make_class(tag, params, p: ModelParams) -> BoundaryCondition:
    """Emit the literal canonical matrices of a class row.

    Unknown parameters default to 0; constraints of the row (realness,
    non-vanishing, and the class-B joint constraint) are validated.
    """
    g = params.get
    if tag == "A12":
        A0 = np.array([[1, 0, 0, 0], [0, 1, 0, 0]], dtype=complex)
        A1 = np.array([[g("b11", 0), g("b12", 0), 0, 0],
                       [g("b21", 0), g("b22", 0), 0, 0]], dtype=complex)
    elif tag == "A14":
        alpha, beta = _get_real(params, "alpha"), _get_real(params, "beta")
        A0 = np.array([[1, 0, 0, 0], [0, alpha, 0, 1]], dtype=complex)
        A1 = np.array([[g("b11", 0), 0, 0, 0],
                       [g("b21", 0), 1j * beta, 0, 0]], dtype=complex)
    elif tag == "A23":
        alpha, beta = _get_real(params, "alpha"), _get_real(params, "beta")
        A0 = np.array([[0, 1, 0, 0], [alpha, 0, 1, 0]], dtype=complex)
        A1 = np.array([[0, g("b12", 0), 0, 0],
                       [1j * beta, g("b22", 0), 0, 0]], dtype=complex)
    elif tag == "A24":
        a11 = complex(g("a11", 0))
        if abs(a11) < 1e-12:
            raise ConstraintViolation("class A24 requires a11 != 0")
        alpha, beta = _get_real(params, "alpha"), _get_real(params, "beta")
        a21 = alpha * a11 + 1.0 / p.eps
        b11, b21 = complex(g("b11", 0)), complex(g("b21", 0))
        A0 = np.array([[a11, 1, 0, 0],
                       [a21, 0, 1.0 / np.conj(a11), 1]], dtype=complex)
        A1 = np.array([[b11, b11 / a11, 0, 0],
                       [b21, b21 / a11 + 1j * beta, 0, 0]], dtype=complex)
    elif tag == "A34":
        alpha1 = _get_real(params, "alpha1")
        alpha2 = _get_real(params, "alpha2")
        beta1 = _get_real(params, "beta1")
        beta2 = _get_real(params, "beta2")
        a12, b12 = complex(g("a12", 0)), complex(g("b12", 0))
        A0 = np.array([[alpha1, a12, 1, 0],
                       [1.0 / p.eps - np.conj(a12), alpha2, 0, 1]], dtype=complex)
        A1 = np.array([[1j * beta1, b12, 0, 0],
                       [np.conj(b12), 1j * beta2, 0, 0]], dtype=complex)
    elif tag == "B":
        a1, a2, mu = complex(g("a1", 0)), complex(g("a2", 0)), complex(g("mu", 0))
        alpha = _get_real(params, "alpha")
        resid = alpha * (alpha * np.imag(mu) - p.eps * np.real(a1 - a2 * mu))
        if abs(resid) > 1e-10 * max(1.0, abs(alpha)) ** 2:
            raise ConstraintViolation(
                "class B requires alpha*(alpha*Im(mu) - eps*Re(a1 - a2*mu)) = 0"
            )
        row = np.array([a1, a2, 1j * alpha, -1j * np.conj(mu) * alpha])
        A0 = np.vstack([row, mu * row])
        A1 = np.array([[1, 0, 0, 0], [0, 1, 0, 0]], dtype=complex)
    elif tag == "C":
        a1, a2 = complex(g("a1", 0)), complex(g("a2", 0))
        a4, mu = complex(g("a4", 0)), complex(g("mu", 0))
        if abs(mu) < 1e-12:
            raise ConstraintViolation("class C requires mu != 0")
        if abs(a2) < 1e-12 and abs(a4) < 1e-12:
            raise ConstraintViolation("class C requires (a2, a4) != 0")
        if abs(np.imag(a2 * np.conj(a4))) > 1e-10 * max(1.0, abs(a2) * abs(a4)):
            raise ConstraintViolation("class C requires Im(a2 conj(a4)) = 0")
        row = np.array([a1, a2, 0, a4])
        A0 = np.vstack([row, mu * row])
        A1 = np.array([[1, 0, 0, 0], [0, 0, 0, 0]], dtype=complex)
    else:
        raise UnknownClass(f"unknown class tag {tag!r}")
    return BoundaryCondition(A0=A0, A1=A1)


def transform(bc: BoundaryCondition, G) -> BoundaryCondition:
    """Left GL2 action G.(A0, A1) = (G A0, G A1) on a boundary condition."""
    G = np.asarray(G, dtype=complex)
    return BoundaryCondition(A0=G @ bc.A0, A1=G @ bc.A1)


def equivalent(bc1: BoundaryCondition, bc2: BoundaryCondition, tol=_RANK_TOL):
    """True iff the row spaces of A(kx) agree at generic probe values of kx."""
    for kx in _PROBE_KX:
        M1, M2 = bc1.a_matrix(kx), bc2.a_matrix(kx)
        if rank_2x4(M1, tol) != 2 or rank_2x4(M2, tol) != 2:
            return False
        s = np.linalg.svd(np.vstack([M1, M2]), compute_uv=False)
        if s[2] > tol * s[0]:
            return False
    return True
