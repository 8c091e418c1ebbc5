"""Dense spectral analysis: gaps, flattening, and the gapped unitary.

The flattening sign(H) = H |H|^{-1} is computed through an eigendecomposition
so that every symmetry relation of the input survives exactly (up to
roundoff).  The gapped unitary u is extracted per class after rotating the
symmetry operators to their canonical block forms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .compressions import build_bulk, build_faces, build_half_space, TruncatedOperator
from .models import (
    AntiUnitary,
    ModelError,
    evaluate_bloch,
    quaternionic_structure_basis,
    real_structure_basis,
    standard_j,
)

__all__ = [
    "SpectralData",
    "spectrum",
    "gap_check",
    "sign_flatten",
    "gapped_unitary",
    "FlattenedPair",
    "GappedUnitaryReport",
]


class GapClosedError(RuntimeError):
    """A spectral gap assumption failed."""

    def __init__(self, message, assumption="sgc1"):
        super().__init__(message)
        self.assumption = assumption


def _eigh(matrix):
    # real-symmetric input gets the much faster real driver
    if np.abs(matrix.imag).max() < 1e-14:
        ev, vec = scipy.linalg.eigh(matrix.real)
        return ev, vec.astype(complex)
    return scipy.linalg.eigh(matrix)


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition plus per-state corner weight."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    localization: np.ndarray
    corner_weights: np.ndarray
    index_map: object
    corner_radius: int

    def near_zero(self, eps):
        return np.where(np.abs(self.eigenvalues) < eps)[0]


def spectrum(op, corner_radius=None):
    """Full dense eigendecomposition of a Hermitian TruncatedOperator.

    Localization is the squared amplitude on sites within max-norm distance
    ``corner_radius`` (default window/4) of the corner site.
    """
    if op.hermitian_deviation() > 1e-9:
        raise ModelError("spectrum expects a Hermitian operator")
    radius = max(1, op.window // 4) if corner_radius is None else corner_radius
    ev, vec = _eigh(op.matrix)
    w = op.index_map.corner_weights(radius, op.corner)
    loc = (np.abs(vec) ** 2 * w[:, None]).sum(axis=0)
    return SpectralData(ev, vec, loc, w, op.index_map, radius)


def _momentum_grid(d, points):
    if d == 0:
        return [()]
    axis = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    return list(itertools.product(*[axis] * d))


def gap_check(model, region="bulk", k=None, momentum_grid=16, L=16, tol=1e-8, alpha=None):
    """Minimum |eigenvalue| of the named compression over a momentum grid.

    region: "bulk" sweeps the Bloch matrix over the full torus grid;
    "face-i" checks the i-th face of the codimension-k corner; "half"
    checks a half-space of slope alpha.
    """
    if region == "bulk":
        gap = np.inf
        for t in _momentum_grid(model.dim, momentum_grid):
            ev = np.linalg.eigvalsh(evaluate_bloch(model, t))
            gap = min(gap, float(np.abs(ev).min()))
        return gap
    if region.startswith("face"):
        i = int(region.split("-")[1])
        k = model.dim if k is None else k
        gap = np.inf
        for t in _momentum_grid(model.dim - k, momentum_grid):
            face = build_faces(model, k, momentum=t, L=L)[i]
            ev = np.linalg.eigvalsh(face.matrix)
            gap = min(gap, float(np.abs(ev).min()))
        return gap
    if region == "half":
        gap = np.inf
        for t in _momentum_grid(model.dim - (2 if model.dim > 1 else 1), momentum_grid):
            half = build_half_space(model, alpha, momentum=t, L=L)
            ev = np.linalg.eigvalsh(half.matrix)
            gap = min(gap, float(np.abs(ev).min()))
        return gap
    raise ModelError(f"unknown region {region!r}")


def sign_flatten(h, gap_floor=1e-8):
    """Spectral flattening H -> H |H|^{-1} via the eigendecomposition.

    Refuses when an eigenvalue sits below ``gap_floor``: the flattening is
    only defined for invertible operators.
    """
    h = np.asarray(h, dtype=complex)
    ev, vec = _eigh(h)
    if np.abs(ev).min() <= gap_floor:
        raise GapClosedError(
            f"cannot flatten: |eigenvalue| {np.abs(ev).min():.3e} <= {gap_floor:.3e}")
    signs = np.sign(ev)
    return (vec * signs) @ vec.conj().T


@dataclass(frozen=True)
class FlattenedPair:
    """sign(H_i) for each face plus their block-diagonal assembly."""

    flattened_faces: tuple
    combined: np.ndarray
    sites_per_face: tuple


def flatten_faces(faces, gap_floor=1e-8):
    flats = tuple(sign_flatten(f.matrix, gap_floor) for f in faces)
    combined = _block_diag(flats)
    return FlattenedPair(flats, combined, tuple(len(f.index_map.sites) for f in faces))


def _block_diag(mats):
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=complex)
    at = 0
    for m in mats:
        out[at:at + m.shape[0], at:at + m.shape[0]] = m
        at += m.shape[0]
    return out


# ---------------------------------------------------------------------------
# gapped unitary


@dataclass(frozen=True)
class GappedUnitaryReport:
    class_name: str
    relation_id: int
    u: np.ndarray
    unitary_deviation: float
    relation_deviation: float
    tol: float

    @property
    def passed(self):
        return self.unitary_deviation <= self.tol and self.relation_deviation <= self.tol


def _chiral_split(pi, tol=1e-9):
    """Orthonormal bases of the +1 and -1 eigenspaces of a chiral operator."""
    ev, vec = np.linalg.eigh(pi)
    minus = vec[:, ev < -1 + 1e-6]
    plus = vec[:, ev > 1 - 1e-6]
    if plus.shape[1] + minus.shape[1] != pi.shape[0]:
        raise ModelError("chiral operator has eigenvalues away from +-1")
    return plus, minus


def _restrict_antiunitary(a, basis):
    """Antiunitary compressed to an invariant subspace given by basis columns."""
    u = basis.conj().T @ a.matrix @ np.conj(basis)
    return AntiUnitary(u, a.square_sign)


def gapped_unitary(flattened, syms, class_info, tol=1e-8):
    """Extract the class unitary u from a flattened operator and verify its relation.

    ``flattened`` is a self-adjoint unitary on n_sites x V (for example the
    combined FlattenedPair matrix); the symmetry operators act fiberwise and
    are lifted internally.  For chiral classes u is the off-diagonal block
    of sign(h) in the canonical basis; for AI/AII it is diag(sign(h), 1);
    for D/C it is sign(h) itself.
    """
    s = np.asarray(flattened, dtype=complex)
    name = class_info.class_name
    nv = syms.orbitals
    if s.shape[0] % nv:
        raise ModelError("flattened operator size incompatible with orbital count")
    nsites = s.shape[0] // nv

    def lift(mat):
        return np.kron(np.eye(nsites), mat)

    if name in ("AI", "AII"):
        anti = syms.theta
        w = real_structure_basis(anti) if name == "AI" else quaternionic_structure_basis(anti)
        sp = lift(w).conj().T @ s @ lift(w)
        u = _block_diag([sp, np.eye(sp.shape[0])])
        if name == "AI":
            rel = max(np.abs(u - u.conj().T).max(), np.abs(u.imag).max())
        else:
            jj = _block_diag([standard_j(sp.shape[0])] * 2)
            rel = max(np.abs(u - u.conj().T).max(),
                      np.abs(jj @ u.T @ jj.conj().T - u.conj().T).max())
    elif name in ("D", "C"):
        anti = syms.xi
        w = real_structure_basis(anti) if name == "D" else quaternionic_structure_basis(anti)
        u = lift(w).conj().T @ s @ lift(w)
        if name == "D":
            rel = max(np.abs(u - u.conj().T).max(), np.abs(u.T + u).max())
        else:
            j = standard_j(u.shape[0])
            rel = max(np.abs(u - u.conj().T).max(), np.abs(j @ u.T @ j.conj().T + u).max())
    elif name in ("BDI", "CII", "DIII", "CI"):
        u, rel = _chiral_class_unitary(s, syms, name, lift)
    else:
        raise ModelError(f"gapped unitary is not defined for class {name}")

    udev = np.abs(u @ u.conj().T - np.eye(u.shape[0])).max()
    return GappedUnitaryReport(name, class_info.relation_id, u, float(udev), float(rel), tol)


def _chiral_class_unitary(s, syms, name, lift):
    plus_v, minus_v = _chiral_split(syms.pi)
    theta = syms.theta

    if name in ("BDI", "CII"):
        # Theta commutes with Pi: canonicalize within each chiral block
        t_plus = _restrict_antiunitary(theta, plus_v)
        t_minus = _restrict_antiunitary(theta, minus_v)
        if name == "BDI":
            w_plus = plus_v @ real_structure_basis(t_plus)
            w_minus = minus_v @ real_structure_basis(t_minus)
        else:
            w_plus = plus_v @ quaternionic_structure_basis(t_plus)
            w_minus = minus_v @ quaternionic_structure_basis(t_minus)
    else:
        # Theta exchanges the chiral blocks; push a basis of V^+ through it
        nb = plus_v.shape[1]
        if name == "CI":
            imgs = [theta.apply(plus_v[:, i]) for i in range(nb)]
        else:
            # DIII: pair columns so that both off-diagonal blocks of Theta
            # become the same standard quaternionic matrix
            if nb % 2:
                raise ModelError("DIII needs chiral blocks of even rank")
            imgs = [None] * nb
            for r in range(nb // 2):
                imgs[2 * r] = -theta.apply(plus_v[:, 2 * r + 1])
                imgs[2 * r + 1] = theta.apply(plus_v[:, 2 * r])
        w_plus, w_minus = plus_v, np.array(imgs).T

    # off-diagonal block: u = P_- sign(h) P_+ in the canonical lifted bases
    u = lift(w_minus).conj().T @ s @ lift(w_plus)
    if name == "BDI":
        rel = np.abs(u.imag).max()
    elif name == "CII":
        j = standard_j(u.shape[0])
        rel = np.abs(j @ u.T @ j.conj().T - u.conj().T).max()
    elif name == "DIII":
        j = standard_j(u.shape[0])
        rel = np.abs(j @ u.T @ j.conj().T - u).max()
    else:  # CI
        rel = np.abs(u.T - u).max()
    return u, rel
