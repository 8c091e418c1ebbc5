import numpy as np
import pytest

from cornerlab.models import AntiUnitary, SymmetrySet

s0 = np.eye(2, dtype=complex)
sx = np.array([[0, 1], [1, 0]], dtype=complex)
sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
sz = np.array([[1, 0], [0, -1]], dtype=complex)
j2 = np.array([[0, -1], [1, 0]], dtype=complex)


def symmetry_set_for(cls):
    """A small explicit symmetry set realizing the given AZ class."""
    if cls == "AI":
        return SymmetrySet(theta=AntiUnitary(np.eye(4), 1))
    if cls == "AII":
        return SymmetrySet(theta=AntiUnitary(np.kron(np.eye(2), j2), -1))
    if cls == "D":
        return SymmetrySet(xi=AntiUnitary(np.eye(4), 1))
    if cls == "C":
        return SymmetrySet(xi=AntiUnitary(np.kron(np.eye(2), j2), -1))
    if cls == "BDI":
        theta = AntiUnitary(np.eye(4), 1)
        xi = AntiUnitary(np.kron(sz, s0), 1)
        return SymmetrySet(theta, xi)
    if cls == "CII":
        u = np.kron(np.eye(2), j2)
        big = np.zeros((8, 8), dtype=complex)
        big[:4, :4] = u
        big[4:, 4:] = u
        theta = AntiUnitary(big, -1)
        pi = np.diag([1.0] * 4 + [-1.0] * 4).astype(complex)
        xi = AntiUnitary(pi @ big, -1)
        return SymmetrySet(theta, xi, pi)
    if cls == "DIII":
        u = np.block([[np.zeros((2, 2)), j2], [j2, np.zeros((2, 2))]])
        theta = AntiUnitary(u, -1)
        pi = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
        xi_mat = -1j * np.conj(u).T @ pi
        sign = 1 if np.allclose(xi_mat @ np.conj(xi_mat), np.eye(4)) else -1
        return SymmetrySet(theta, AntiUnitary(xi_mat, sign), pi)
    if cls == "CI":
        u = np.block([[np.zeros((2, 2)), s0], [s0, np.zeros((2, 2))]])
        theta = AntiUnitary(u, 1)
        pi = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
        xi_mat = -1j * np.conj(u).T @ pi
        sign = 1 if np.allclose(xi_mat @ np.conj(xi_mat), np.eye(4)) else -1
        return SymmetrySet(theta, AntiUnitary(xi_mat, sign), pi)
    raise KeyError(cls)


def random_symmetric_gapped(syms, rng, min_gap=0.05, tries=100):
    """Random gapped Hermitian matrix compatible with a symmetry set."""
    n = syms.orbitals
    for _ in range(tries):
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (h + h.conj().T) / 2
        if syms.theta is not None:
            h = (h + syms.theta.conjugate(h)) / 2
        if syms.xi is not None:
            h = (h - syms.xi.conjugate(h)) / 2
        if syms.pi is not None:
            h = (h - syms.pi @ h @ syms.pi) / 2
        ev = np.linalg.eigvalsh(h)
        if np.abs(ev).min() > min_gap and ev.min() < 0 < ev.max():
            return h
    raise RuntimeError("no gapped representative found")


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
