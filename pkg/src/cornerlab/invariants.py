"""Numerical corner invariants.

Finite hard-wall windows make every raw index vanish (the matrices are
square), so each count here is spatially filtered: near-zero states are
attributed to the physical corner through their weight inside a corner
window.  Counts are computed as traces of that window indicator over the
near-zero eigenspace, which stays integer-valued even when corner and
far-wall modes hybridize into symmetric combinations.

Spectral flow uses the Phillips partition sum; the Z2-valued variant works
on the half interval of a quaternionically equivariant family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .compressions import build_orthant, build_quarter, fredholm_criterion
from .models import AntiUnitary, ModelError
from .spectra import GapClosedError, spectrum

__all__ = [
    "InvariantValue",
    "PathFamily",
    "ResolutionError",
    "localized_kernel_count",
    "chiral_index",
    "mod2_index_d",
    "mod2_index_diii",
    "localized_fredholm_index",
    "spectral_flow",
    "z2_spectral_flow",
    "weak_invariants_diii",
    "corner_invariant",
    "InvariantReport",
]

DEFAULT_LOC = 0.8
FLOW_SEGMENT_CAP = 4096


class ResolutionError(RuntimeError):
    """The finite window cannot resolve the requested invariant."""


@dataclass(frozen=True)
class InvariantValue:
    """Integer invariant tagged with the group it lives in."""

    group_tag: str  # "Z", "Z2" or "2Z"
    value: int
    invariant_name: str = ""

    def __post_init__(self):
        if self.group_tag not in ("Z", "Z2", "2Z"):
            raise ValueError(f"unknown group tag {self.group_tag!r}")
        if self.group_tag == "Z2" and self.value not in (0, 1):
            raise ValueError("Z2 value must be 0 or 1")
        if self.group_tag == "2Z" and self.value % 2:
            raise ValueError("2Z value must be even")

    @property
    def generator_multiple(self):
        """Value in units of the group generator (2 for the 2Z tag)."""
        return self.value // 2 if self.group_tag == "2Z" else self.value


def _integerize(trace, what, slack=0.1):
    near = int(round(trace))
    if abs(trace - near) > slack:
        raise ResolutionError(
            f"{what} = {trace:.4f} is not close to an integer; "
            "increase the window or tighten thresholds")
    return near


def localized_kernel_count(spec, zero_threshold=1e-6, loc_threshold=DEFAULT_LOC):
    """Number of near-zero states attributable to the corner.

    Computed as the corner-window trace over the |E| < eps eigenspace, so a
    multiplet hybridized with far-wall partners still counts correctly;
    ``loc_threshold`` only tags the per-state report.
    """
    idx = spec.near_zero(zero_threshold)
    if len(idx) == 0:
        return 0
    trace = float(spec.localization[idx].sum())
    return _integerize(trace, "corner kernel trace")


def chiral_index(spec, pi_window, zero_threshold=1e-6, loc_threshold=DEFAULT_LOC):
    """Trace of the chiral operator over corner-localized near-zero states.

    Equals dim Ker - dim Coker of the off-diagonal block of the corner
    compression, i.e. the sublattice-signed zero-mode count.
    """
    idx = spec.near_zero(zero_threshold)
    if len(idx) == 0:
        return InvariantValue("Z", 0, "ind")
    vecs = spec.eigenvectors[:, idx]
    weighted = spec.corner_weights[:, None] * (pi_window @ vecs)
    trace = float(np.real(np.einsum("ij,ij->", vecs.conj(), weighted)))
    return InvariantValue("Z", _integerize(trace, "chiral corner trace"), "ind")


def mod2_index_d(spec, zero_threshold=1e-6, loc_threshold=DEFAULT_LOC):
    """Class D mod-2 index: corner kernel rank mod 2."""
    k = localized_kernel_count(spec, zero_threshold, loc_threshold)
    return InvariantValue("Z2", k % 2, "ind1")

def mod2_index_diii(spec, zero_threshold=1e-6, loc_threshold=DEFAULT_LOC):
    """Class DIII mod-2 index: half the corner kernel rank, mod 2."""
    k = localized_kernel_count(spec, zero_threshold, loc_threshold)
    if k % 2:
        raise ResolutionError(
            f"DIII corner kernel rank {k} is odd; Kramers pairing unresolved")
    return InvariantValue("Z2", (k // 2) % 2, "ind2")


def localized_fredholm_index(op, zero_threshold=1e-6, loc_threshold=DEFAULT_LOC):
    """Index of a non-Hermitian corner operator via corner-filtered SVD.

    (corner weight of near-kernel right-singular vectors) minus (corner
    weight of near-cokernel left-singular vectors), rounded.
    """
    u, s, vh = np.linalg.svd(op.matrix)
    small = s < zero_threshold
    radius = max(1, op.window // 4)
    w = op.index_map.corner_weights(radius, op.corner)
    t_ker = float((np.abs(vh[small, :].T) ** 2 * w[:, None]).sum())
    t_coker = float((np.abs(u[:, small]) ** 2 * w[:, None]).sum())
    val = _integerize(t_ker - t_coker, "corner index trace")
    return InvariantValue("Z", val, "fredholm-index")


# ---------------------------------------------------------------------------
# spectral flow


@dataclass
class PathFamily:
    """Sampled family of Hermitian matrices over a real parameter.

    ``func`` (optional) regenerates the matrix at new parameter values so
    the partition can be refined adaptively.  ``equivariance`` (optional)
    is an antiunitary relating F(-s) to F(s).  ``drift_bound`` (optional)
    is a cheap upper bound on ||F(b) - F(a)||_2; without it the exact
    Hermitian 2-norm of the difference is used.
    """

    samples: list
    func: object = None
    equivariance: AntiUnitary | None = None
    drift_bound: object = None

    def __post_init__(self):
        self.samples = sorted(((float(s), np.asarray(m)) for s, m in self.samples),
                              key=lambda p: p[0])
        if len(self.samples) < 2:
            raise ValueError("need at least two samples")
        dims = {m.shape for _, m in self.samples}
        if len(dims) != 1:
            raise ValueError("all matrices must have the same shape")

    @classmethod
    def from_function(cls, func, grid, equivariance=None):
        return cls([(s, func(s)) for s in grid], func=func, equivariance=equivariance)

    def matrix(self, s):
        for s0, m in self.samples:
            if abs(s0 - s) < 1e-15:
                return m
        if self.func is None:
            raise ResolutionError("family needs refinement but has no generator")
        return np.asarray(self.func(s))

    def check_equivariance(self, tol=1e-8):
        if self.equivariance is None:
            raise ValueError("family has no equivariance data")
        dev = 0.0
        pts = {s for s, _ in self.samples}
        for s, m in self.samples:
            if -s in pts or abs(s) < 1e-15:
                other = self.matrix(-s)
                dev = max(dev, np.abs(self.equivariance.conjugate(other) - m).max())
        if dev > tol:
            raise ValueError(f"equivariance violated by {dev:.3e}")
        return dev


ZERO_FLOOR = 1e-10  # eigenvalues this close to 0 count as lying in [0, c]


def _eig_for_flow(matrix, localization_of=None):
    if localization_of is None:
        return np.linalg.eigvalsh(matrix), None
    if np.abs(np.asarray(matrix).imag).max() < 1e-14:
        ev, vec = scipy.linalg.eigh(np.asarray(matrix).real)
        vec = vec.astype(complex)
    else:
        ev, vec = scipy.linalg.eigh(matrix)
    loc = (np.abs(vec) ** 2 * localization_of[:, None]).sum(axis=0)
    return ev, loc


def _family_cache(family, weights):
    """Eigendecomposition cache shared by all flow passes over one family."""
    key = id(weights)
    store = getattr(family, "_eig_cache", None)
    if store is None:
        store = {}
        object.__setattr__(family, "_eig_cache", store)
    return store.setdefault(key, {})


def _flow_count(ev, loc, c):
    """Rank of chi_[0,c], corner-weighted when localization data is present."""
    sel = (ev >= -ZERO_FLOOR) & (ev <= c)
    if loc is None:
        return int(np.count_nonzero(sel))
    return _integerize(float(loc[sel].sum()), "localized level count", slack=0.3)


def _relevant_levels(ev, loc, cap):
    """Levels whose paths must not cross the cut: all of them for abstract
    families, corner-weighted ones for lattice windows."""
    lev = ev if loc is None else ev[loc >= 0.1]
    return lev if cap is None else lev[np.abs(lev) <= 2 * cap + 1.0]


def _choose_cut(lev_a, lev_b, cap):
    """Cut c in (0, cap] maximizing the distance to every |level| at the ends."""
    mags = np.sort(np.abs(np.concatenate([lev_a, lev_b])))
    top = cap if cap is not None else (mags[-1] + 1.0 if mags.size else 1.0)
    cands = [top]
    if mags.size:
        cands.append(mags[0] / 2)
        cands.extend((mags[:-1] + mags[1:]) / 2)
    best, clearance = None, -1.0
    for c in cands:
        if not 10 * ZERO_FLOOR < c <= top:
            continue
        gap = float(np.abs(mags - c).min()) if mags.size else c
        if gap > clearance:
            best, clearance = c, gap
    if best is None:
        return top, 0.0
    return best, clearance


def _partition_flow(family, lo, hi, signed, weights=None, cap=None):
    """Phillips partition sum over [lo, hi], signed (csf) or unsigned (qsf)."""
    pts = [s for s, _ in family.samples if lo - 1e-15 <= s <= hi + 1e-15]
    if not pts or abs(pts[0] - lo) > 1e-12 or abs(pts[-1] - hi) > 1e-12:
        raise ValueError(f"family must cover [{lo}, {hi}]")
    cache = _family_cache(family, weights)

    def data(s):
        if s not in cache:
            m = np.asarray(family.matrix(s))
            ev, loc = _eig_for_flow(m, weights)
            cache[s] = (ev, loc, m)
        return cache[s]

    segments = [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    total = 0
    done = 0
    while segments:
        a, b = segments.pop(0)
        done += 1
        if done + len(segments) > FLOW_SEGMENT_CAP:
            raise ResolutionError("spectral-flow refinement exceeded the segment cap")
        ev_a, loc_a, mat_a = data(a)
        ev_b, loc_b, mat_b = data(b)
        if family.drift_bound is not None:
            drift = float(family.drift_bound(a, b))
        else:
            drift = float(np.abs(np.linalg.eigvalsh(mat_b - mat_a)).max())
        lev_a = _relevant_levels(ev_a, loc_a, cap)
        lev_b = _relevant_levels(ev_b, loc_b, cap)
        c, clearance = _choose_cut(lev_a, lev_b, cap)
        if clearance <= drift:
            if family.func is None or b - a < 1e-12:
                raise ResolutionError("cannot refine segment; supply a finer sampling")
            mid = (a + b) / 2
            segments = [(a, mid), (mid, b)] + segments
            done -= 1
            continue
        count_a = _flow_count(ev_a, loc_a, c)
        count_b = _flow_count(ev_b, loc_b, c)
        total += (count_b - count_a) if signed else (count_b + count_a)
    return total


def spectral_flow(family, loc_weights=None, level_cap=None):
    """Net number of eigenvalue crossings through zero along the path.

    Endpoints must be invertible.  When ``loc_weights`` is given, only the
    corner-weighted part of the spectrum is counted (finite-window families)
    and ``level_cap`` should bound the cuts below the face gap.
    """
    lo, hi = family.samples[0][0], family.samples[-1][0]
    cache = _family_cache(family, loc_weights)
    for s in (lo, hi):
        if s not in cache:
            m = np.asarray(family.matrix(s))
            cache[s] = _eig_for_flow(m, loc_weights) + (m,)
        ev, loc, _ = cache[s]
        lev = _relevant_levels(ev, loc, level_cap)
        if lev.size and np.abs(lev).min() < 10 * ZERO_FLOOR:
            raise ValueError("spectral flow endpoints must be invertible")
    return _partition_flow(family, lo, hi, signed=True,
                           weights=loc_weights, cap=level_cap)


def z2_spectral_flow(family, loc_weights=None, level_cap=None,
                     check_equivariance=True):
    """Z2-valued spectral flow of a quaternionically equivariant family.

    The family covers [-s*, s*] (or already just the half interval
    [0, s*]); the partition sum runs over the half interval, counting both
    segment ends, and is reduced mod 2.
    """
    if check_equivariance and family.equivariance is not None:
        if family.equivariance.square_sign != -1:
            raise ValueError("Z2 flow needs a quaternionic equivariance")
        family.check_equivariance()
    lo, hi = family.samples[0][0], family.samples[-1][0]
    if lo < -1e-15:
        if abs(lo + hi) > 1e-12:
            raise ValueError("family domain must be symmetric about 0")
        if not any(abs(s) < 1e-15 for s, _ in family.samples):
            if family.func is None:
                raise ValueError("family must include the fixed point s = 0")
            family.samples.append((0.0, np.asarray(family.func(0.0))))
            family.samples.sort(key=lambda p: p[0])
        lo = 0.0
    total = _partition_flow(family, lo, hi, signed=False,
                            weights=loc_weights, cap=level_cap)
    return InvariantValue("Z2", total % 2, "qsf")


def weak_invariants_diii(family, zero_threshold=1e-6, loc_weights=None,
                         level_cap=None):
    """Strong/weak data of a DIII loop family: (w_plus, w_minus, qsf).

    The family parametrizes the half loop [0, pi] of a circle family whose
    fixed points sit at the ends; w_b is the mod-2 index (half the kernel
    rank) at the fixed points, and qsf = w_plus + w_minus mod 2.
    """
    lo, hi = family.samples[0][0], family.samples[-1][0]

    cache = _family_cache(family, loc_weights)

    def fixed_point_index(s):
        if s not in cache:
            m = np.asarray(family.matrix(s))
            cache[s] = _eig_for_flow(m, loc_weights) + (m,)
        ev, loc, _ = cache[s]
        near = np.abs(ev) < zero_threshold
        if loc is None:
            k = int(np.count_nonzero(near))
        else:
            k = _integerize(float(loc[near].sum()), "fixed-point kernel trace")
        if k % 2:
            raise ResolutionError(f"odd kernel rank {k} at a DIII fixed point")
        return (k // 2) % 2

    w_plus = fixed_point_index(lo)
    w_minus = fixed_point_index(hi)
    qsf = z2_spectral_flow(family, loc_weights=loc_weights,
                           level_cap=level_cap, check_equivariance=False)
    report = {
        "w_plus": w_plus,
        "w_minus": w_minus,
        "qsf": qsf.value,
        "strong_nonzero": w_plus != w_minus,
        "weak_only": w_plus == w_minus == 1,
    }
    return InvariantValue("Z2", w_plus, "w_plus"), InvariantValue("Z2", w_minus, "w_minus"), qsf, report


# ---------------------------------------------------------------------------
# class dispatch for lattice corners


@dataclass(frozen=True)
class InvariantReport:
    invariant: InvariantValue
    class_name: str
    n: int
    k: int
    L: int
    thresholds: dict
    face_gaps: tuple
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "invariant_name": self.invariant.invariant_name,
            "group_tag": self.invariant.group_tag,
            "value": self.invariant.value,
            "class": self.class_name,
            "n": self.n,
            "k": self.k,
            "L": self.L,
            "thresholds": self.thresholds,
            "face_gaps": list(self.face_gaps),
            **self.extras,
        }


def _build_corner(model, k, momentum, L, alpha=None, beta=None, convex=True):
    if alpha is not None and beta is not None and k == 2:
        return build_quarter(model, alpha, beta, convex=convex, momentum=momentum, L=L)
    if not convex:
        raise ModelError("concave corners are only defined for k = 2 slope pairs")
    return build_orthant(model, k, momentum=momentum, L=L)


def _chiral_corner_spectrum(op, pi, corner_radius, window):
    """Near-zero spectral data of a chiral corner operator via its block.

    In the chiral grading H = [[0, B^dag], [B, 0]], so the spectrum is
    +-(singular values of B) and eigenvectors are (v_i, +-u_i)/sqrt(2);
    only states with |E| <= window are materialized.  Equivalent to
    ``spectrum`` restricted to that window, at half the matrix size.
    """
    import scipy.linalg

    h = op.matrix
    nsites = len(op.index_map.sites)
    n_orb = pi.shape[0]
    ev, w = np.linalg.eigh(pi)
    w_minus, w_plus = w[:, ev < 0], w[:, ev > 0]
    t = h.reshape(nsites, n_orb, nsites, n_orb)
    block = np.einsum("oa,sotp,pb->satb", w_minus.conj(), t, w_plus,
                      optimize=True).reshape(nsites * w_minus.shape[1], -1)
    if np.abs(block.imag).max() < 1e-14:
        u, sig, vh = scipy.linalg.svd(block.real)
        u, vh = u.astype(complex), vh.astype(complex)
    else:
        u, sig, vh = scipy.linalg.svd(block)
    keep = np.where(sig <= window)[0]
    vals, vecs = [], []
    for i in keep:
        v_full = np.einsum("ob,sb->so", w_plus, vh[i].conj().reshape(nsites, -1))
        u_full = np.einsum("oa,sa->so", w_minus, u[:, i].reshape(nsites, -1))
        for sign in (1, -1):
            vals.append(sign * sig[i])
            vecs.append((v_full + sign * u_full).reshape(-1) / np.sqrt(2))
    order = np.argsort(vals) if vals else []
    eigenvalues = np.array([vals[i] for i in order])
    eigenvectors = (np.array([vecs[i] for i in order]).T
                    if len(vals) else np.zeros((h.shape[0], 0)))
    weights = op.index_map.corner_weights(corner_radius, op.corner)
    loc = (np.abs(eigenvectors) ** 2 * weights[:, None]).sum(axis=0)
    from .spectra import SpectralData
    return SpectralData(eigenvalues, eigenvectors, loc, weights,
                        op.index_map, corner_radius)


def corner_invariant(model, syms, class_info, k=None, L=16, grid=16,
                     zero_threshold=None, loc_threshold=DEFAULT_LOC,
                     corner_radius=None, alpha=None, beta=None, convex=True,
                     gap_grid=8, gap_tol=1e-8):
    """Dispatch the class-appropriate numerical invariant of a corner model.

    Requires the spectral gap assumption (all face compressions invertible);
    the corner dimension d = n - k must be 0 or 1.
    """
    k = model.dim if k is None else k
    d = model.dim - k
    name = class_info.class_name
    gaps = fredholm_criterion(model, syms, k, momentum_grid=gap_grid, L=L, tol=gap_tol)
    if not gaps.passed:
        raise GapClosedError(
            f"face gap closed ({gaps}); Assumption {gaps.assumption} violated",
            assumption=gaps.assumption)
    face_gap = min(gaps.face_gaps)
    eps = min(1e-6, face_gap / 20) if zero_threshold is None else zero_threshold
    thresholds = {"zero_eps": eps, "loc_lambda": loc_threshold,
                  "corner_radius": corner_radius or max(1, L // 4)}

    def finish(value, extras=None):
        return InvariantReport(value, name, model.dim, k, L, thresholds,
                               gaps.face_gaps, extras or {})

    if d == 0:
        op = _build_corner(model, k, (), L, alpha, beta, convex)
        if syms.pi is not None and op.dim > 1200:
            spec = _chiral_corner_spectrum(op, syms.pi,
                                           thresholds["corner_radius"],
                                           window=face_gap / 2)
        else:
            spec = spectrum(op, corner_radius=thresholds["corner_radius"])
        if name == "BDI":
            pi_w = op.lift_orbital_matrix(syms.pi)
            return finish(chiral_index(spec, pi_w, eps, loc_threshold))
        if name == "D":
            return finish(mod2_index_d(spec, eps, loc_threshold))
        if name == "DIII":
            return finish(mod2_index_diii(spec, eps, loc_threshold))
        if name == "CII":
            pi_w = op.lift_orbital_matrix(syms.pi)
            iv = chiral_index(spec, pi_w, eps, loc_threshold)
            if iv.value % 2:
                raise ResolutionError("CII corner index must be even")
            return finish(InvariantValue("2Z", iv.value, "ind"))
        raise ModelError(
            f"class {name} at corner dimension 0: invariant group is trivial "
            "or not numerically defined; see the classification module")

    if d == 1:
        radius = thresholds["corner_radius"]
        cap = face_gap / 2
        from .compressions import reduce_transverse

        def op_at(t):
            return _build_corner(model, k, (t % (2 * np.pi),), L, alpha, beta, convex)

        def drift_bound(a, b):
            # block-banded operators: ||H(a) - H(b)|| <= sum_w ||h_w(a) - h_w(b)||
            ra = reduce_transverse(model, k, (a % (2 * np.pi),)).hoppings
            rb = reduce_transverse(model, k, (b % (2 * np.pi),)).hoppings
            return sum(np.linalg.norm(ra[w] - rb[w], 2) for w in ra)

        sample_op = op_at(0.0)
        weights = sample_op.index_map.corner_weights(radius, sample_op.corner)

        if name in ("D", "C"):
            # base the loop at the angle with the widest localized gap
            scan = np.linspace(0, 2 * np.pi, 2 * max(grid, 8), endpoint=False)
            base, best = 0.0, -1.0
            for t in scan:
                ev, loc = _eig_for_flow(op_at(t).matrix, weights)
                lev = _relevant_levels(ev, loc, cap)
                g = float(np.abs(lev).min()) if lev.size else cap
                if g > best:
                    base, best = t, g
            fam = PathFamily.from_function(
                lambda t: op_at(t).matrix,
                np.linspace(base, base + 2 * np.pi, max(grid, 8) + 1))
            fam.drift_bound = drift_bound
            flow = spectral_flow(fam, loc_weights=weights, level_cap=cap)
            if name == "C":
                if flow % 2:
                    raise ResolutionError("class C flow must be even")
                return finish(InvariantValue("2Z", flow, "csf"))
            return finish(InvariantValue("Z", flow, "csf"))
        if name in ("DIII", "AII"):
            fam = PathFamily.from_function(
                lambda t: op_at(t).matrix,
                np.linspace(0.0, np.pi, max(grid, 8) + 1))
            fam.drift_bound = drift_bound
            if name == "DIII":
                wp, wm, qsf, rep = weak_invariants_diii(
                    fam, zero_threshold=max(eps, 1e-9), loc_weights=weights,
                    level_cap=cap)
                return finish(InvariantValue("Z2", qsf.value, "qsf"), rep)
            qsf = z2_spectral_flow(fam, loc_weights=weights, level_cap=cap,
                                   check_equivariance=False)
            return finish(InvariantValue("Z2", qsf.value, "qsf"))
        raise ModelError(
            f"class {name} at corner dimension 1: invariant group is trivial "
            "or not numerically defined; see the classification module")

    raise ModelError(
        f"corner dimension d = {d}: numerical invariants are defined only "
        "for d = 0 or 1 (gap reporting is still available)")
