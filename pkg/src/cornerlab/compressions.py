"""Finite truncations of bulk, half-space, wedge and orthant compressions.

All builders return a TruncatedOperator: a dense matrix on an explicit site
window together with the site/orbital index map.  Regions are cut by exact
integer inequalities; artificial far walls are hard (open) boundaries, and
faces emulate their one infinite direction by periodic wrapping.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .models import HoppingModel, ModelError, evaluate_bloch

__all__ = [
    "Slope",
    "SlopeNormalization",
    "slope_normalize",
    "SiteIndexMap",
    "TruncatedOperator",
    "reduce_transverse",
    "build_on_sites",
    "build_bulk",
    "build_half_space",
    "build_quarter",
    "build_orthant",
    "build_faces",
    "splitting_rho_prime",
    "face_monomial",
    "fredholm_criterion",
    "transform_model",
]


class RegionError(ValueError):
    """Unsupported or inconsistent region specification."""


@dataclass(frozen=True)
class Slope:
    """Boundary-line slope: p/q in lowest terms, or +-infinity, or irrational.

    Infinities are encoded as (p, q) = (+-1, 0); the irrational flag carries
    no numeric value and is only accepted by classification lookups.
    """

    p: int = 0
    q: int = 1
    irrational: bool = False

    def __post_init__(self):
        if self.irrational:
            return
        p, q = self.p, self.q
        if q < 0:
            p, q = -p, -q
        if q == 0:
            if p not in (1, -1):
                raise RegionError("infinite slope must have p = +-1")
        else:
            g = math.gcd(abs(p), q)
            if g == 0:
                raise RegionError("slope 0/0")
            p, q = p // g, q // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text):
        text = str(text).strip()
        if text in ("+inf", "inf"):
            return cls(1, 0)
        if text == "-inf":
            return cls(-1, 0)
        if text == "irrational":
            return cls(irrational=True)
        f = Fraction(text)
        return cls(f.numerator, f.denominator)

    @property
    def is_finite(self):
        return not self.irrational and self.q != 0

    def as_extended(self):
        if self.irrational:
            raise RegionError("irrational slope has no numeric value")
        if self.q == 0:
            return math.inf if self.p > 0 else -math.inf
        return Fraction(self.p, self.q)

    def __str__(self):
        if self.irrational:
            return "irrational"
        if self.q == 0:
            return "+inf" if self.p > 0 else "-inf"
        return f"{self.p}/{self.q}"


def _check_ordered(alpha, beta):
    if alpha.irrational or beta.irrational:
        raise RegionError("irrational slopes are not supported for lattices")
    a, b = alpha.as_extended(), beta.as_extended()
    if not a < b:
        raise RegionError(f"slopes must satisfy alpha < beta, got {alpha} >= {beta}")


@dataclass(frozen=True)
class SlopeNormalization:
    """SL(2,Z) change of lattice coordinates sending (alpha, beta) to (0, t/u)."""

    gamma: np.ndarray
    m: int
    n: int
    t_num: int
    u_den: int

    @property
    def gamma_slope(self):
        return Slope(self.t_num, self.u_den) if self.u_den != 0 else Slope(1, 0)


def slope_normalize(alpha, beta):
    """Solve -p m + q n = 1 and assemble Gamma = [[n, -m], [-p, q]].

    The solution with 0 <= m < q is chosen when q > 0; for alpha = -inf the
    pair (m, n) = (1, 0) is used.  Returns Gamma together with
    t = -p s + q r > 0 and u = n s - m r for beta = r/s.
    """
    _check_ordered(alpha, beta)
    p, q = alpha.p, alpha.q
    r, s = beta.p, beta.q
    if q == 0:
        m, n = -p, 0  # alpha = -inf: p = -1, so m = 1 solves -p m = 1
    else:
        # -p m + q n = 1 with canonical residue 0 <= m < q
        g, x, _ = _egcd(-p, q)
        assert g == 1
        m = x % q
        n = (1 + p * m) // q
    gamma = np.array([[n, -m], [-p, q]], dtype=int)
    assert int(round(np.linalg.det(gamma))) == 1
    t = -p * s + q * r
    u = n * s - m * r
    assert t > 0
    return SlopeNormalization(gamma, m, n, t, u)


def _egcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def transform_model(model, gamma):
    """Relabel lattice sites by an SL(2,Z) matrix: offsets v -> Gamma v."""
    if model.dim != 2:
        raise RegionError("lattice transforms are defined for dim 2")
    hops = {tuple(int(c) for c in gamma @ np.array(v)): h for v, h in model.hoppings.items()}
    return HoppingModel(2, model.orbitals, hops)


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class SiteIndexMap:
    """Deterministic bijection (site, orbital) <-> flat basis index."""

    sites: tuple
    orbitals: int

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(tuple(s) for s in self.sites))
        object.__setattr__(self, "_rank", {s: i for i, s in enumerate(self.sites)})

    def __len__(self):
        return len(self.sites) * self.orbitals

    def index(self, site, orbital=0):
        return self._rank[tuple(site)] * self.orbitals + orbital

    def contains(self, site):
        return tuple(site) in self._rank

    def site_of(self, flat):
        return self.sites[flat // self.orbitals]

    def corner_weights(self, radius, corner=None):
        """Per-basis-vector indicator of sites within max-norm radius of corner."""
        corner = tuple([0] * len(self.sites[0])) if corner is None else tuple(corner)
        w = np.zeros(len(self), dtype=float)
        for i, s in enumerate(self.sites):
            if max(abs(a - b) for a, b in zip(s, corner)) <= radius:
                w[i * self.orbitals:(i + 1) * self.orbitals] = 1.0
        return w


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense matrix on a finite site window, tagged with its region kind."""

    matrix: np.ndarray
    index_map: SiteIndexMap
    region_tag: str
    window: int
    corner: tuple = None

    def __post_init__(self):
        if self.matrix.shape != (len(self.index_map), len(self.index_map)):
            raise RegionError("matrix size does not match index map")
        if self.corner is None:
            object.__setattr__(self, "corner", tuple([0] * len(self.index_map.sites[0])))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def hermitian_deviation(self):
        return np.abs(self.matrix - self.matrix.conj().T).max()

    def lift_orbital_matrix(self, a):
        """1_sites (x) a on the window."""
        return np.kron(np.eye(len(self.index_map.sites)), a)


def reduce_transverse(model, k, momentum):
    """Partial Fourier transform: keep the first k axes, fix the rest at angles.

    Returns an effective k-dimensional model whose hoppings are
    h'_w = sum_v h_(w,v) exp(i v.t).
    """
    momentum = tuple(float(t) for t in (momentum or ()))
    if k > model.dim:
        raise RegionError("codimension exceeds model dimension")
    if len(momentum) != model.dim - k:
        raise RegionError(f"need {model.dim - k} transverse angles, got {len(momentum)}")
    if k == model.dim:
        return model
    eff = {}
    for v, h in model.hoppings.items():
        w, trans = v[:k], v[k:]
        phase = np.exp(1j * np.dot(trans, momentum))
        eff[w] = eff.get(w, 0) + h * phase
    return HoppingModel(k, model.orbitals, eff)


def build_on_sites(model, sites, region_tag, window, periodic_axes=(), periods=None, corner=None):
    """Compression of a (reduced) model to an explicit site list.

    Hopping offsets along axes in ``periodic_axes`` are wrapped modulo the
    corresponding period; everything else is a hard wall.
    """
    sites = [tuple(s) for s in sites]
    imap = SiteIndexMap(tuple(sorted(sites)), model.orbitals)
    n = model.orbitals
    mat = np.zeros((len(imap), len(imap)), dtype=complex)
    periods = periods or {}
    for ax in periodic_axes:
        if periods[ax] <= 2 * model.hopping_range:
            raise RegionError("periodic window smaller than twice the hopping range")
    for v, h in model.hoppings.items():
        for x in imap.sites:
            # H[x, x + v] = h_v, so plane waves see the symbol sum_v h_v e^{i v.t}
            y = [a + b for a, b in zip(x, v)]
            for ax in periodic_axes:
                y[ax] %= periods[ax]
            y = tuple(y)
            if imap.contains(y):
                i, j = imap.index(x), imap.index(y)
                mat[i:i + n, j:j + n] += h
    return TruncatedOperator(mat, imap, region_tag, window, corner)


def build_bulk(model, momentum=(), k=None, L=16):
    """Periodic k-torus window of size L per axis at fixed transverse momentum."""
    k = model.dim if k is None else k
    red = reduce_transverse(model, k, momentum)
    if L <= 2 * red.hopping_range:
        raise RegionError("window smaller than twice the hopping range")
    sites = itertools.product(range(L), repeat=k)
    return build_on_sites(red, sites, "bulk", L,
                          periodic_axes=range(k), periods={ax: L for ax in range(k)})


def _half_plane_sites(alpha, L):
    p, q = alpha.p, alpha.q
    return [(m, n) for m in range(-L, L + 1) for n in range(-L, L + 1)
            if q * n >= p * m]


def build_half_space(model, alpha, momentum=(), L=16):
    """Hard-wall compression to {-alpha m + n >= 0} within the [-L, L] box.

    One-dimensional models specialize to the half-line [0, L].
    """
    if model.dim - len(momentum or ()) == 1:
        red = reduce_transverse(model, 1, momentum)
        sites = [(x,) for x in range(L + 1)]
        return build_on_sites(red, sites, "half", L)
    if alpha.irrational:
        raise RegionError("irrational slopes are not supported for lattices")
    red = reduce_transverse(model, 2, momentum)
    return build_on_sites(red, _half_plane_sites(alpha, L), "half", L)


def wedge_sites(alpha, beta, convex, L):
    """Convex (AND) or concave (OR) wedge sites in the [-L, L] box."""
    _check_ordered(alpha, beta)
    p, q = alpha.p, alpha.q
    r, s = beta.p, beta.q
    out = []
    for m in range(-L, L + 1):
        for n in range(-L, L + 1):
            above_alpha = q * n >= p * m
            below_beta = s * n <= r * m
            keep = (above_alpha and below_beta) if convex else (above_alpha or below_beta)
            if keep:
                out.append((m, n))
    return out


def build_quarter(model, alpha, beta, convex=True, momentum=(), L=16):
    """Quarter-plane (convex) or concave-corner compression of the model."""
    red = reduce_transverse(model, 2, momentum)
    tag = "quarter-convex" if convex else "quarter-concave"
    return build_on_sites(red, wedge_sites(alpha, beta, convex, L), tag, L)


def build_orthant(model, k, momentum=(), L=16):
    """Compression to the coordinate orthant window [0, L]^k."""
    if not 1 <= k <= model.dim:
        raise RegionError("need 1 <= k <= dim")
    red = reduce_transverse(model, k, momentum)
    sites = itertools.product(range(L + 1), repeat=k)
    return build_on_sites(red, sites, "orthant", L)


def build_faces(model, k, momentum=(), L=16):
    """The k codimension-(k-1) faces: constraint i dropped, axis i periodic."""
    if not 1 <= k <= model.dim:
        raise RegionError("need 1 <= k <= dim")
    red = reduce_transverse(model, k, momentum)
    faces = []
    for i in range(k):
        sites = itertools.product(range(L + 1), repeat=k)
        faces.append(build_on_sites(red, sites, f"face-{i}", L,
                                    periodic_axes=(i,), periods={i: L + 1}))
    return faces


# ---------------------------------------------------------------------------
# orthant splitting and the Fredholm criterion


def _monomial_shift(sites, imap, v, periodic_axes=(), periods=None):
    """Matrix of the shift by v on the window (rows x, column x - v)."""
    periods = periods or {}
    n = imap.orbitals
    mat = np.zeros((len(imap), len(imap)))
    for x in sites:
        y = [a - b for a, b in zip(x, v)]
        for ax in periodic_axes:
            y[ax] %= periods[ax]
        y = tuple(y)
        if imap.contains(y):
            mat[imap.index(x):imap.index(x) + n, imap.index(y):imap.index(y) + n] += np.eye(n)
    return mat


def face_monomial(k, v, L, axis):
    """Face operator of the monomial symbol z^v: axis periodic, others walled."""
    sites = list(itertools.product(range(L + 1), repeat=k))
    imap = SiteIndexMap(tuple(sorted(sites)), 1)
    mat = _monomial_shift(imap.sites, imap, v, periodic_axes=(axis,), periods={axis: L + 1})
    return TruncatedOperator(mat, imap, f"face-{axis}", L)


def splitting_rho_prime(face_symbols, L):
    """Inclusion-exclusion splitting of compatible face symbols on [0, L]^k.

    Each symbol is a monomial exponent vector; all k entries must agree
    (that is the compatibility condition for monomial data).  Returns
    sum over nonempty subsets A of (-1)^{|A|+1} rho_A(T_A), where rho_A
    compresses the symbol acting freely on axes in A.
    """
    k = len(face_symbols)
    if k < 3:
        raise RegionError("splitting is defined for k >= 3")
    vs = [tuple(int(c) for c in v) for v in face_symbols]
    if any(len(v) != k for v in vs):
        raise RegionError("symbol exponent vectors must have length k")
    if len(set(vs)) != 1:
        raise RegionError("face symbols are inconsistent on double compressions")
    v = vs[0]
    sites = list(itertools.product(range(L + 1), repeat=k))
    imap = SiteIndexMap(tuple(sorted(sites)), 1)
    total = np.zeros((len(imap), len(imap)))
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(k), size):
            # rho_A compresses the free action on axes in A back to the orthant;
            # for a monomial every factor compresses to the same Toeplitz shift
            term = _monomial_shift(imap.sites, imap, v)
            total += (-1) ** (size + 1) * term
    return TruncatedOperator(total, imap, "orthant-splitting", L)


def permute_axes(model, order):
    """Model with lattice axes relabelled by the permutation ``order``."""
    hops = {tuple(v[ax] for ax in order): h for v, h in model.hoppings.items()}
    return HoppingModel(model.dim, model.orbitals, hops)


def face_gaps(model, k, momentum_grid, L):
    """Minimum |eigenvalue| of every face compression over the momentum grid.

    The infinite direction of each face is Fourier-decomposed exactly, so
    the face spectrum is the union over its momentum of (k-1)-dimensional
    orthant compressions; the grid must be even to hit the zone edge.
    """
    d = model.dim - k
    momentum_grid += momentum_grid % 2
    axis_grid = np.linspace(0, 2 * np.pi, momentum_grid, endpoint=False)
    trans_grids = [()] if d == 0 else list(itertools.product(*[axis_grid] * d))
    gaps = []
    for i in range(k):
        order = [j for j in range(k) if j != i] + [i] + list(range(k, model.dim))
        pm = permute_axes(model, order)
        g = np.inf
        for tau in axis_grid:
            for t in trans_grids:
                if k == 1:
                    ev = np.linalg.eigvalsh(evaluate_bloch(pm, (tau,) + tuple(t)))
                else:
                    red = reduce_transverse(pm, k - 1, (tau,) + tuple(t))
                    face = build_on_sites(
                        red, itertools.product(range(L + 1), repeat=k - 1),
                        f"face-{i}", L)
                    ev = np.linalg.eigvalsh(face.matrix)
                g = min(g, float(np.abs(ev).min()))
        gaps.append(g)
    return gaps


@dataclass(frozen=True)
class GapReport:
    passed: bool
    face_gaps: tuple
    tol: float
    assumption: str

    def __str__(self):
        status = "gapped" if self.passed else f"assumption {self.assumption} violated"
        gaps = ", ".join(f"{g:.6g}" for g in self.face_gaps)
        return f"{status}: face gaps [{gaps}] (tol {self.tol:g})"


def fredholm_criterion(model, syms, k, momentum_grid=8, L=16, tol=1e-8):
    """Machine form of the spectral gap assumptions.

    True iff every codimension-(k-1) face compression is invertible (min
    |eigenvalue| > tol) across the sampled transverse momenta; this is the
    invertibility criterion for the corner compression to be Fredholm.
    """
    gaps = face_gaps(model, k, momentum_grid, L)
    name = "sgc1" if k == 2 else "sgc2"
    if k == 1:
        name = "sgc1"
    return GapReport(all(g > tol for g in gaps), tuple(gaps), tol, name)
