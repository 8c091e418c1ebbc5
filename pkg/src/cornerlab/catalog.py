"""Canonical first-order models and the explicit index-one corner operators.

The chains and the 2-D p-wave model are the standard inputs to the product
construction; the wedge operator A-hat (and its concave partner A-check) and
the orthant operator G realize generators of the corner K-groups and pin the
sign conventions of the whole laboratory.
"""

from __future__ import annotations

import itertools

import numpy as np

from .compressions import (
    RegionError,
    SiteIndexMap,
    Slope,
    TruncatedOperator,
    wedge_sites,
)
from .models import AntiUnitary, HoppingModel, SymmetrySet

__all__ = [
    "model_ssh",
    "model_kitaev",
    "model_pwave",
    "model_cii_chain",
    "operator_hatA",
    "operator_checkA",
    "operator_G",
    "g_kernel_vector",
    "boundary_generator",
    "diii_surrogate_family",
]

s0 = np.eye(2, dtype=complex)
sx = np.array([[0, 1], [1, 0]], dtype=complex)
sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
sz = np.array([[1, 0], [0, -1]], dtype=complex)
_j2 = np.array([[0, -1], [1, 0]], dtype=complex)


def model_ssh(v=0.5, w=1.0):
    """Two-orbital chain, intracell hopping v, intercell w; class BDI.

    Topological (one end mode per boundary) for |v| < |w|.
    """
    h0 = v * sx
    h1 = np.array([[0, 0], [w, 0]], dtype=complex)
    model = HoppingModel(1, 2, {(0,): h0, (1,): h1, (-1,): h1.conj().T})
    theta = AntiUnitary(s0, 1)
    xi = AntiUnitary(sz, 1)
    return model, SymmetrySet(theta, xi)


def model_kitaev(mu=0.0, t_hop=0.5, delta=0.5):
    """BdG chain (t = Delta sweet spot hosts exact end Majoranas); class D."""
    h0 = -mu * sz
    h1 = np.array([[-t_hop, -delta], [delta, t_hop]], dtype=complex)
    model = HoppingModel(1, 2, {(0,): h0, (1,): h1, (-1,): h1.conj().T})
    xi = AntiUnitary(sx, 1)
    return model, SymmetrySet(xi=xi)


def model_pwave(mu=2.0, t_hop=1.0, delta=1.0):
    """2-D p-wave BdG model with one chiral edge channel; class D.

    H(k) = (-mu - 2t(cos kx + cos ky)) tau_z + 2 Delta (sin kx tau_x + sin ky tau_y);
    the default parameters put the model in the unit-invariant phase.
    """
    h0 = -mu * sz
    hx = -t_hop * sz - 1j * delta * sx
    hy = -t_hop * sz - 1j * delta * sy
    model = HoppingModel(2, 2, {
        (0, 0): h0,
        (1, 0): hx, (-1, 0): hx.conj().T,
        (0, 1): hy, (0, -1): hy.conj().T,
    })
    xi = AntiUnitary(sx, 1)
    return model, SymmetrySet(xi=xi)


def model_cii_chain(v=0.5, w=1.0, soc=0.2):
    """Four-orbital chain: two SSH copies with quaternionic TRS; class CII.

    ``soc`` couples the copies without breaking any symmetry, so the chain
    is a genuinely coupled CII model; its end index is even (two Kramers
    partners per end in the topological phase |v| < |w|).
    """
    h0 = np.kron(v * sx, s0)
    h1 = np.kron(np.array([[0, 0], [1, 0]]), w * s0 + 1j * soc * sz)
    model = HoppingModel(1, 4, {(0,): h0, (1,): h1, (-1,): h1.conj().T})
    theta = AntiUnitary(np.kron(s0, 1j * sy), -1)
    xi = AntiUnitary(np.kron(-sz, 1j * sy), -1)
    return model, SymmetrySet(theta, xi)


# ---------------------------------------------------------------------------
# explicit Fredholm operators


def _wedge_operator(alpha, beta, L, convex):
    """Matrix of A = P_{0,1} + M_{1,1}(1 - P_{-1,0}) + M_{1,0}(P_{-1,0} - P_{0,1}).

    P_{m,n} projects onto wedge sites whose (m, n)-translate stays in the
    wedge; the operator is a partial permutation with 0/1 entries.
    """
    a, b = alpha.as_extended(), beta.as_extended()
    if not (0 < a <= 0.5 and 1 <= b):
        raise RegionError(
            f"wedge operator needs normalized slopes 0 < alpha <= 1/2 <= 1 <= beta, "
            f"got ({alpha}, {beta})")
    sites = wedge_sites(alpha, beta, convex, L)
    imap = SiteIndexMap(tuple(sorted(sites)), 1)

    def in_region(m, n):
        above = alpha.q * n >= alpha.p * m
        below = beta.q * n <= beta.p * m
        return (above and below) if convex else (above or below)

    mat = np.zeros((len(imap), len(imap)))
    for x in imap.sites:
        m, n = x
        if in_region(m - 0, n - 1):
            target = x  # deep sites: identity
        elif not in_region(m + 1, n + 0):
            target = (m + 1, n + 1)  # shallow strip: shift by (1, 1)
        else:
            target = (m + 1, n)  # middle strip: shift by (1, 0)
        if imap.contains(target):
            mat[imap.index(target), imap.index(x)] = 1.0
    tag = "quarter-convex" if convex else "quarter-concave"
    return TruncatedOperator(mat, imap, tag, L)


def operator_hatA(alpha=Slope(1, 2), beta=Slope(1, 1), L=20):
    """Convex-wedge shift operator with trivial kernel and a one-dimensional
    corner-localized cokernel (index -1)."""
    return _wedge_operator(alpha, beta, L, convex=True)


def operator_checkA(alpha=Slope(1, 2), beta=Slope(1, 1), L=20):
    """Concave partner of operator_hatA: one-dimensional corner kernel,
    trivial cokernel (index +1)."""
    return _wedge_operator(alpha, beta, L, convex=False)


def operator_G(k=3, L=8):
    """Orthant operator of index +1 for corners of codimension k >= 3.

    G = T + (1 - Q1) with T the down-shift on the first axis localized at
    the origin line of the other axes and Q1 the projector onto sites with
    first coordinate >= 1 and the rest at 0.
    """
    if k < 3:
        raise RegionError("operator G is defined for k >= 3")
    sites = list(itertools.product(range(L + 1), repeat=k))
    imap = SiteIndexMap(tuple(sorted(sites)), 1)
    n = len(imap)
    mat = np.eye(n)
    for x in imap.sites:
        rest_zero = all(c == 0 for c in x[1:])
        if rest_zero:
            i = imap.index(x)
            if x[0] >= 1:
                mat[i, i] -= 1.0  # remove P_{A={1}} from the subset sum
            down = (x[0] - 1,) + x[1:]
            if x[0] >= 1:
                mat[imap.index(down), i] += 1.0  # T_z^* (x) q ... q
    return TruncatedOperator(mat, imap, "orthant", L)


def g_kernel_vector(op):
    """The explicit kernel vector delta_1(x)delta_0... - delta_0(x)delta_0..."""
    k = len(op.index_map.sites[0])
    v = np.zeros(op.dim)
    v[op.index_map.index((1,) + (0,) * (k - 1))] = 1.0
    v[op.index_map.index((0,) * k)] = -1.0
    return v / np.sqrt(2)


def _halfplane_compressions(alpha, beta, L, convex=True):
    """The two half-plane compressions of the wedge operator's symbol data."""
    ops = []
    for slope, keep in ((alpha, "alpha"), (beta, "beta")):
        sites = []
        for m in range(-L, L + 1):
            for n in range(-L, L + 1):
                if keep == "alpha":
                    if slope.q * n >= slope.p * m:
                        sites.append((m, n))
                elif slope.q * n <= slope.p * m:
                    sites.append((m, n))
        imap = SiteIndexMap(tuple(sorted(sites)), 1)
        inside = imap.contains

        def in_region(m, n):
            if keep == "alpha":
                return slope.q * n >= slope.p * m
            return slope.q * n <= slope.p * m

        mat = np.zeros((len(imap), len(imap)))
        for x in imap.sites:
            m, n = x
            if in_region(m, n - 1):
                target = x
            elif not in_region(m + 1, n):
                target = (m + 1, n + 1)
            else:
                target = (m + 1, n)
            if inside(target):
                mat[imap.index(target), imap.index(x)] = 1.0
        ops.append(TruncatedOperator(mat, imap, f"half-{keep}", L))
    return ops


def diii_surrogate_family(cells=6, mass=1.0, reverse=False):
    """Finite window family with a DIII crossing pinned at angle 0.

    A chain of two-level cells whose dimerization slides with the angle:
    at 0 both chain ends are unpaired (the near end carries a Kramers pair
    in the corner window), at pi the chain is fully dimerized and gapped.
    The onsite term anticommutes with the bond structure, so the interior
    of the half loop stays gapped.  With the returned corner weights the
    invariants are (w_plus, w_minus, qsf) = (1, 0, 1); ``reverse`` swaps
    the fixed points.

    Returns (family function of the angle, corner weights, equivariance).
    """
    if cells < 4 or cells % 2:
        raise RegionError("surrogate needs an even number of cells >= 4")
    n = 2 * cells
    bond_unit = 1j * sy

    def bond(i):
        out = np.zeros((n, n), dtype=complex)
        out[2 * i:2 * i + 2, 2 * i + 2:2 * i + 4] = bond_unit
        return out + out.conj().T

    ends_free = sum(bond(i) for i in range(1, cells - 2, 2))
    paired = sum(bond(i) for i in range(0, cells - 1, 2))
    onsite = np.kron(np.eye(cells), mass * sz)

    def family(t):
        if reverse:
            t = np.pi - t
        return ((1 + np.cos(t)) / 2 * ends_free
                + (1 - np.cos(t)) / 2 * paired + np.sin(t) * onsite)

    weights = np.zeros(n)
    weights[:4] = 1.0
    equivariance = AntiUnitary(np.kron(np.eye(cells), _j2), -1)
    return family, weights, equivariance


def _stack_copies(blocks, imap, tag, L):
    """Assemble copy-space blocks into a site-major TruncatedOperator."""
    mat = np.block(blocks)
    nsites = len(imap.sites)
    copies = len(mat) // nsites
    big = SiteIndexMap(imap.sites, copies)
    perm = np.zeros(len(mat), dtype=int)
    for c in range(copies):
        for s in range(nsites):
            perm[s * copies + c] = c * nsites + s
    return TruncatedOperator(mat[np.ix_(perm, perm)], big, tag, L)


def boundary_generator(i, alpha=Slope(1, 2), beta=Slope(1, 1), L=20):
    """Corner operator realizing the degree-i boundary-map generator.

    i = 1: the wedge operator itself; Fredholm index -1 generates Z.
    i = 2: its self-adjoint class-D doubling; kernel rank mod 2 = 1.
    i = 3: the DIII-form doubling diag(A, A*); half kernel rank mod 2 = 1.
    i = 5: the quaternionic doubling diag(A, A); Fredholm index -2 in 2Z.

    Returns (face operators, corner operator, group tag, measure keyword).
    """
    if i not in (1, 2, 3, 5):
        raise RegionError("boundary generators exist in degrees 1, 2, 3 and 5 only")
    faces = _halfplane_compressions(alpha, beta, L)
    hat = operator_hatA(alpha, beta, L)
    a = hat.matrix
    z = np.zeros_like(a)
    imap = hat.index_map
    if i == 1:
        return faces, hat, "Z", "fredholm"
    if i == 2:
        op = _stack_copies([[z, a.conj().T], [a, z]], imap, hat.region_tag, L)
        return faces, op, "Z2", "kernel_mod2"
    if i == 3:
        z4 = np.zeros((2 * len(a), 2 * len(a)))
        d = np.block([[a, z], [z, a.conj().T]])
        op = _stack_copies([[z4, d.conj().T], [d, z4]], imap, hat.region_tag, L)
        return faces, op, "Z2", "half_kernel_mod2"
    d = np.block([[a, z], [z, a]])
    op = _stack_copies([[d]], imap, hat.region_tag, L)
    return faces, op, "2Z", "fredholm"
