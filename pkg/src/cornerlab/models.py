"""Translation-invariant lattice models and their antiunitary/unitary symmetries.

A model is a finite collection of hopping matrices h_v indexed by integer
offsets v, defining the Bloch family H(t) = sum_v h_v exp(i v.t) on the
n-torus.  Symmetries are stored as (unitary matrix, implicit complex
conjugation) pairs; the tenfold-way class is derived from which symmetries
are present and the signs of their squares.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HoppingModel",
    "AntiUnitary",
    "SymmetrySet",
    "AZClassInfo",
    "SymmetryReport",
    "evaluate_bloch",
    "verify_symmetry_relations",
    "detect_az_class",
    "real_structure_basis",
    "quaternionic_structure_basis",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "save_model",
    "AZ_SYMMETRY_PATTERNS",
    "AZ_DEGREE",
    "AZ_PHASE",
]

DEFAULT_TOL = 1e-10

# (theta_square, xi_square, chiral_present) -> class.  0 means absent.
AZ_SYMMETRY_PATTERNS = {
    (0, 0, 0): "A",
    (0, 0, 1): "AIII",
    (1, 0, 0): "AI",
    (1, 1, 1): "BDI",
    (0, 1, 0): "D",
    (-1, 1, 1): "DIII",
    (-1, 0, 0): "AII",
    (-1, -1, 1): "CII",
    (0, -1, 0): "C",
    (1, -1, 1): "CI",
}

# Degree i(class) and phase c(class) of the gapped-invariant construction,
# for the eight real classes.
AZ_DEGREE = {"AI": 0, "BDI": 1, "D": 2, "DIII": 3, "AII": 4, "CII": 5, "C": 6, "CI": -1}
AZ_PHASE = {"AI": 1, "BDI": 1, "D": 1j, "DIII": 1, "AII": 1, "CII": 1, "C": 1j, "CI": 1}

REAL_CLASSES = tuple(AZ_DEGREE)
CHIRAL_CLASSES = ("AIII", "BDI", "DIII", "CII", "CI")


class ModelError(ValueError):
    """Malformed model or symmetry data."""


class ClassificationError(ValueError):
    """Symmetry pattern does not match any tenfold-way class."""


def _as_matrix(m, name="matrix"):
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ModelError(f"{name} must be square, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class HoppingModel:
    """Finite-range hopping model on Z^dim with `orbitals` states per site.

    ``hoppings`` maps offset tuples v to complex matrices h_v and must be
    closed under v -> -v with h_{-v} = h_v^dagger.
    """

    dim: int
    orbitals: int
    hoppings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ModelError("dim must be positive")
        if self.orbitals < 1:
            raise ModelError("orbitals must be positive")
        clean = {}
        for v, h in self.hoppings.items():
            v = tuple(int(c) for c in v)
            if len(v) != self.dim:
                raise ModelError(f"offset {v} has wrong dimension")
            clean[v] = _as_matrix(h, f"h_{v}")
            if clean[v].shape[0] != self.orbitals:
                raise ModelError(f"h_{v} has wrong size")
        for v, h in clean.items():
            mv = tuple(-c for c in v)
            if mv not in clean or not np.allclose(clean[mv], h.conj().T, atol=1e-13):
                raise ModelError(f"h_{tuple(-c for c in v)} != h_{v}^dagger")
        object.__setattr__(self, "hoppings", clean)

    @property
    def hopping_range(self):
        """Largest |offset component| with a stored hopping."""
        r = 0
        for v in self.hoppings:
            r = max(r, max(abs(c) for c in v))
        return r

    def offsets(self):
        return sorted(self.hoppings)


def evaluate_bloch(model, t):
    """Bloch matrix H(t) = sum_v h_v exp(i v.t) for angles t on the torus."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (model.dim,):
        raise ModelError(f"need {model.dim} angles, got {t.shape}")
    h = np.zeros((model.orbitals, model.orbitals), dtype=complex)
    for v, hv in model.hoppings.items():
        h += hv * np.exp(1j * np.dot(v, t))
    return h


@dataclass(frozen=True)
class AntiUnitary:
    """Antiunitary operator psi -> U conj(psi), with U conj(U) = square_sign."""

    matrix: np.ndarray
    square_sign: int

    def __post_init__(self):
        u = _as_matrix(self.matrix, "antiunitary matrix")
        object.__setattr__(self, "matrix", u)
        if self.square_sign not in (1, -1):
            raise ModelError("square_sign must be +1 or -1")
        sq = u @ u.conj()
        if not np.allclose(sq, self.square_sign * np.eye(len(u)), atol=1e-10):
            raise ModelError("U conj(U) != square_sign * identity")

    def apply(self, psi):
        return self.matrix @ np.conj(psi)

    def conjugate(self, a):
        """A X A^{-1} for a linear operator X (antiunitary conjugation)."""
        return self.matrix @ np.conj(a) @ self.matrix.conj().T

    def compose_antiunitary(self, other):
        """Unitary matrix of (self o other) when other is antiunitary."""
        return self.matrix @ np.conj(other.matrix)


def _chiral_from_pair(theta, xi):
    """Normalize Theta.Xi to a unitary with square one (+1 block convention)."""
    pi = theta.compose_antiunitary(xi)
    sq = pi @ pi
    if np.allclose(sq, np.eye(len(pi)), atol=1e-10):
        return pi
    if np.allclose(sq, -np.eye(len(pi)), atol=1e-10):
        return 1j * pi
    raise ModelError("Theta.Xi does not square to +-1; inconsistent pair")


@dataclass(frozen=True)
class SymmetrySet:
    """Optional time-reversal, particle-hole and chiral operators.

    When both antiunitaries are given, the chiral operator is synthesized
    (Theta.Xi, phase-fixed so it squares to one) unless supplied explicitly.
    """

    theta: AntiUnitary | None = None
    xi: AntiUnitary | None = None
    pi: np.ndarray | None = None

    def __post_init__(self):
        if self.theta is not None and self.xi is not None and self.pi is None:
            object.__setattr__(self, "pi", _chiral_from_pair(self.theta, self.xi))
        if self.pi is not None:
            p = _as_matrix(self.pi, "pi")
            if not np.allclose(p @ p, np.eye(len(p)), atol=1e-10):
                raise ModelError("pi^2 != 1")
            if not np.allclose(p @ p.conj().T, np.eye(len(p)), atol=1e-10):
                raise ModelError("pi is not unitary")
            object.__setattr__(self, "pi", p)

    @property
    def orbitals(self):
        for op in (self.theta, self.xi):
            if op is not None:
                return op.matrix.shape[0]
        if self.pi is not None:
            return self.pi.shape[0]
        return None

    def pattern(self):
        ts = 0 if self.theta is None else self.theta.square_sign
        xs = 0 if self.xi is None else self.xi.square_sign
        return (ts, xs, 0 if self.pi is None else 1)


@dataclass(frozen=True)
class AZClassInfo:
    class_name: str
    degree_i: int | None
    phase_c: complex | None
    relation_id: int | None

    @property
    def is_chiral(self):
        return self.class_name in CHIRAL_CLASSES

    @property
    def is_real(self):
        return self.class_name in REAL_CLASSES


def detect_az_class(syms):
    """Map the symmetry presence/sign pattern to its Altland-Zirnbauer class."""
    pat = syms.pattern()
    # a consistent Theta+Xi pair always carries a chiral operator
    if pat[0] != 0 and pat[1] != 0 and pat[2] == 0:
        raise ClassificationError("Theta and Xi present but no chiral operator")
    if pat not in AZ_SYMMETRY_PATTERNS:
        raise ClassificationError(f"no AZ class for pattern {pat}")
    name = AZ_SYMMETRY_PATTERNS[pat]
    deg = AZ_DEGREE.get(name)
    return AZClassInfo(name, deg, AZ_PHASE.get(name), deg)


@dataclass(frozen=True)
class SymmetryReport:
    trs: bool | None
    phs: bool | None
    chiral: bool | None
    max_deviation: dict

    def all_pass(self):
        return all(v is None or bool(v) for v in (self.trs, self.phs, self.chiral))


def verify_symmetry_relations(model, syms, tol=DEFAULT_TOL):
    """Check TRS/PHS/chiral relations hopping-wise, in max norm.

    TRS:    U conj(h_v) U^dag = h_v,   PHS: U conj(h_v) U^dag = -h_v,
    chiral: Pi h_v Pi = -h_v,          each for every stored offset.
    """
    n = syms.orbitals
    if n is not None and n != model.orbitals:
        raise ModelError("symmetry and model dimensions disagree")
    dev = {}

    def max_dev(transform, sign):
        d = 0.0
        for v, hv in model.hoppings.items():
            d = max(d, np.abs(transform(hv) - sign * hv).max())
        return d

    trs = phs = chiral = None
    if syms.theta is not None:
        dev["trs"] = float(max_dev(syms.theta.conjugate, +1))
        trs = dev["trs"] <= tol
    if syms.xi is not None:
        dev["phs"] = float(max_dev(syms.xi.conjugate, -1))
        phs = dev["phs"] <= tol
    if syms.pi is not None:
        p = syms.pi
        dev["chiral"] = float(max_dev(lambda h: p @ h @ p, -1))
        chiral = dev["chiral"] <= tol
    return SymmetryReport(trs, phs, chiral, dev)


# ---------------------------------------------------------------------------
# canonical bases for antiunitaries


def real_structure_basis(a):
    """Unitary W whose columns are a-fixed vectors, for a with square +1.

    In the basis W the antiunitary acts as plain conjugation:
    W^dag U conj(W) = 1.
    """
    if a.square_sign != 1:
        raise ModelError("real basis needs square +1")
    n = a.matrix.shape[0]
    cols = []
    for _ in range(n):
        # project a trial vector onto the orthogonal complement of what we have
        rng_basis = np.array(cols).T if cols else np.zeros((n, 0))
        for trial in np.eye(n, dtype=complex):
            v = trial - rng_basis @ (rng_basis.conj().T @ trial) if cols else trial
            if np.linalg.norm(v) < 1e-7:
                continue
            v = v / np.linalg.norm(v)
            w = v + a.apply(v)
            if np.linalg.norm(w) < 1e-7:
                w = 1j * (v - a.apply(v))
            if cols:
                w = w - rng_basis @ (rng_basis.conj().T @ w)
            nw = np.linalg.norm(w)
            if nw > 1e-7:
                cols.append(w / nw)
                break
        else:
            raise ModelError("failed to build a real basis")
    w = np.array(cols).T
    assert np.allclose(w.conj().T @ a.matrix @ np.conj(w), np.eye(n), atol=1e-9)
    return w


def quaternionic_structure_basis(a):
    """Unitary W pairing the basis as (e, a.e, ...), for a with square -1.

    In the basis W the antiunitary matrix becomes block-diagonal with
    2x2 blocks [[0,-1],[1,0]].
    """
    if a.square_sign != -1:
        raise ModelError("quaternionic basis needs square -1")
    n = a.matrix.shape[0]
    if n % 2:
        raise ModelError("quaternionic structure needs even dimension")
    cols = []
    while len(cols) < n:
        rng_basis = np.array(cols).T if cols else np.zeros((n, 0))
        for trial in np.eye(n, dtype=complex):
            v = trial - rng_basis @ (rng_basis.conj().T @ trial) if cols else trial
            nv = np.linalg.norm(v)
            if nv < 1e-7:
                continue
            v = v / nv
            f = a.apply(v)
            if cols:
                f = f - rng_basis @ (rng_basis.conj().T @ f)
            f = f - v * (v.conj() @ f)
            nf = np.linalg.norm(f)
            if nf < 1e-7:
                continue
            cols.append(v)
            cols.append(f / nf)
            break
        else:
            raise ModelError("failed to build a quaternionic basis")
    w = np.array(cols).T
    j = standard_j(n)
    assert np.allclose(w.conj().T @ a.matrix @ np.conj(w), j, atol=1e-9)
    return w


def standard_j(n):
    """Block-diagonal quaternionic structure matrix diag([[0,-1],[1,0]], ...)."""
    if n % 2:
        raise ModelError("standard_j needs even dimension")
    j2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    return np.kron(np.eye(n // 2), j2)


# ---------------------------------------------------------------------------
# JSON model documents


def _matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def _antiunitary_to_json(a):
    return {"matrix": _matrix_to_json(a.matrix), "square": a.square_sign}


def model_to_dict(model, syms=None):
    """Serializable document; offsets are listed once per +- pair."""
    seen = set()
    hops = []
    for v in model.offsets():
        if v in seen:
            continue
        seen.add(v)
        seen.add(tuple(-c for c in v))
        hops.append({"offset": list(v), "matrix": _matrix_to_json(model.hoppings[v])})
    doc = {"dim": model.dim, "orbitals": model.orbitals, "hoppings": hops}
    if syms is not None:
        s = {}
        if syms.theta is not None:
            s["theta"] = _antiunitary_to_json(syms.theta)
        if syms.xi is not None:
            s["xi"] = _antiunitary_to_json(syms.xi)
        if syms.pi is not None:
            s["pi"] = {"matrix": _matrix_to_json(syms.pi)}
        doc["symmetries"] = s
    return doc


def model_from_dict(doc):
    """Inverse of model_to_dict; synthesizes h_{-v} from each listed offset."""
    hops = {}
    for entry in doc["hoppings"]:
        v = tuple(int(c) for c in entry["offset"])
        h = _matrix_from_json(entry["matrix"])
        if v in hops:
            raise ModelError(f"offset {v} listed twice")
        hops[v] = h
        mv = tuple(-c for c in v)
        if mv != v:
            if mv in hops:
                raise ModelError(f"offsets {v} and {mv} both listed; list one per pair")
            hops[mv] = h.conj().T
    model = HoppingModel(doc["dim"], doc["orbitals"], hops)
    syms = None
    if "symmetries" in doc:
        s = doc["symmetries"]
        theta = xi = pi = None
        if "theta" in s:
            theta = AntiUnitary(_matrix_from_json(s["theta"]["matrix"]), int(s["theta"]["square"]))
        if "xi" in s:
            xi = AntiUnitary(_matrix_from_json(s["xi"]["matrix"]), int(s["xi"]["square"]))
        if "pi" in s:
            pi = _matrix_from_json(s["pi"]["matrix"])
        syms = SymmetrySet(theta, xi, pi)
    return model, syms


def load_model(path):
    with open(path) as f:
        return model_from_dict(json.load(f))


def save_model(path, model, syms=None, extra=None):
    doc = model_to_dict(model, syms)
    if extra:
        doc.update(extra)
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
