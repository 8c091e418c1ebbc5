"""Products of two lower-order models yielding higher-order corner models.

When the first factor is chiral the product is H = H1 (x) 1 + Pi1 (x) H2;
when neither factor is chiral the Hamiltonian is doubled into an
off-diagonal block form (H-star or H-square) and the candidate symmetry
operators are assembled from tensor products of the factors' operators.
The accepted symmetry set is found by search: candidates are validated
hopping-wise and the resulting class is detected, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    AntiUnitary,
    HoppingModel,
    ModelError,
    SymmetrySet,
    detect_az_class,
    verify_symmetry_relations,
)

__all__ = ["product_hamiltonian", "ProductResult", "direct_sum"]


class ProductError(ModelError):
    """No displayed symmetry candidate validates for the class pair."""


@dataclass(frozen=True)
class ProductResult:
    model: HoppingModel
    syms: SymmetrySet
    class_name: str
    construction_tag: str
    candidates: tuple    # names of the accepted (theta, xi) candidates
    ambiguity: tuple = ()  # other validating candidate names, if any


def _tensor_anti(a1, a2):
    """Tensor product of two antiunitaries (or a unitary and an antiunitary)."""
    m1 = a1.matrix if isinstance(a1, AntiUnitary) else a1
    m2 = a2.matrix if isinstance(a2, AntiUnitary) else a2
    s1 = a1.square_sign if isinstance(a1, AntiUnitary) else None
    s2 = a2.square_sign if isinstance(a2, AntiUnitary) else None
    mat = np.kron(m1, m2)
    if s1 is None or s2 is None:
        # unitary (x) antiunitary: square must be recomputed
        sq = mat @ np.conj(mat)
        sign = 1 if np.allclose(sq, np.eye(len(mat)), atol=1e-9) else -1
        return AntiUnitary(mat, sign)
    return AntiUnitary(mat, s1 * s2)


def _antiunitary_candidates(s1, s2):
    """Named tensor candidates built from the factors' antiunitary operators."""
    out = {}
    for n1, a1 in (("theta1", s1.theta), ("xi1", s1.xi)):
        if a1 is None:
            continue
        for n2, a2 in (("theta2", s2.theta), ("xi2", s2.xi)):
            if a2 is None:
                continue
            try:
                out[f"{n1}x{n2}"] = _tensor_anti(a1, a2)
            except ModelError:
                continue
    return out


def _doubled_model(m1, m2, variant):
    """Off-diagonal doubling; variant 'star' uses H1 x 1 -+ i x H2, 'square'
    uses -+ H1 x i - 1 x H2."""
    dim = m1.dim + m2.dim
    n1, n2 = m1.orbitals, m2.orbitals
    n = n1 * n2
    hops = {}

    def add(v, upper):
        # assemble [[0, upper], [upper^dag, 0]] hopping-wise: store the block
        v = tuple(v)
        blk = np.zeros((2 * n, 2 * n), dtype=complex)
        blk[:n, n:] = upper
        hops[v] = hops.get(v, 0) + blk

    for v1, h1 in m1.hoppings.items():
        coeff = np.kron(h1, np.eye(n2)) if variant == "star" else -1j * np.kron(h1, np.eye(n2))
        add(tuple(v1) + (0,) * m2.dim, coeff)
    for v2, h2 in m2.hoppings.items():
        coeff = -1j * np.kron(np.eye(n1), h2) if variant == "star" else -np.kron(np.eye(n1), h2)
        add((0,) * m1.dim + tuple(v2), coeff)
    # hermitize: the lower blocks are fixed by h_{-v} = h_v^dagger
    full = {}
    for v, blk in hops.items():
        mv = tuple(-c for c in v)
        lower = hops.get(mv, np.zeros_like(blk))[:n, n:]
        blk = blk.copy()
        blk[n:, :n] = lower.conj().T
        full[v] = blk
    return HoppingModel(dim, 2 * n, full)


def _doubled_candidates(s1, s2):
    """Displayed antiunitary forms for the doubled construction.

    The four block forms (club, triangle, diamond, heart) plus each form
    composed with the built-in block chirality diag(1, -1); the latter turn
    a validated TRS into the matching PHS of the doubled model.
    """
    out = {}

    def register(name, mat):
        sq = mat @ np.conj(mat)
        n = len(mat)
        if np.allclose(sq, np.eye(n), atol=1e-9):
            out[name] = AntiUnitary(mat, 1)
        elif np.allclose(sq, -np.eye(n), atol=1e-9):
            out[name] = AntiUnitary(mat, -1)

    pairs = _antiunitary_candidates(s1, s2)
    forms = {}
    if "theta1xxi2" in pairs:
        a = pairs["theta1xxi2"].matrix
        z = np.zeros_like(a)
        forms["club(theta1 x xi2)"] = np.block([[a, z], [z, a]])
    if "xi1xtheta2" in pairs:
        a = pairs["xi1xtheta2"].matrix
        z = np.zeros_like(a)
        forms["triangle(xi1 x theta2)"] = np.block([[a, z], [z, a]])
    if "xi1xxi2" in pairs:
        a = pairs["xi1xxi2"].matrix
        z = np.zeros_like(a)
        forms["diamond(xi1 x xi2)"] = np.block([[z, -a], [a, z]])
    if "theta1xtheta2" in pairs:
        a = pairs["theta1xtheta2"].matrix
        z = np.zeros_like(a)
        forms["heart(theta1 x theta2)"] = np.block([[z, a], [a, z]])
    for name, mat in forms.items():
        register(name, mat)
        half = len(mat) // 2
        sigma = np.diag([1.0] * half + [-1.0] * half)
        register(name + "*sigma", sigma @ mat)
    return out


def _swap_terms(m1, m2, pi1):
    """H = H1 (x) 1 + Pi1 (x) H2 on axes (m1, m2)."""
    dim = m1.dim + m2.dim
    hops = {}

    def add(v, mat):
        v = tuple(v)
        hops[v] = hops.get(v, 0) + mat

    for v1, h1 in m1.hoppings.items():
        add(tuple(v1) + (0,) * m2.dim, np.kron(h1, np.eye(m2.orbitals)))
    for v2, h2 in m2.hoppings.items():
        add((0,) * m1.dim + tuple(v2), np.kron(pi1, h2))
    return HoppingModel(dim, m1.orbitals * m2.orbitals, hops)


def _swap_terms_right(m1, m2, pi2):
    """H = H1 (x) Pi2 + 1 (x) H2 (the transposed construction)."""
    dim = m1.dim + m2.dim
    hops = {}

    def add(v, mat):
        v = tuple(v)
        hops[v] = hops.get(v, 0) + mat

    for v1, h1 in m1.hoppings.items():
        add(tuple(v1) + (0,) * m2.dim, np.kron(h1, pi2))
    for v2, h2 in m2.hoppings.items():
        add((0,) * m1.dim + tuple(v2), np.kron(np.eye(m1.orbitals), h2))
    return HoppingModel(dim, m1.orbitals * m2.orbitals, hops)


def _validated_sets(model, theta_cands, xi_cands, tol=1e-9):
    """All (theta, xi) combinations whose relations hold for the model."""
    hits = []
    names_t = [None] + list(theta_cands)
    names_x = [None] + list(xi_cands)
    for nt in names_t:
        for nx in names_x:
            if nt is None and nx is None:
                continue
            theta = theta_cands[nt] if nt else None
            xi = xi_cands[nx] if nx else None
            try:
                syms = SymmetrySet(theta, xi)
            except ModelError:
                continue
            rep = verify_symmetry_relations(model, syms, tol)
            if rep.all_pass():
                try:
                    info = detect_az_class(syms)
                except Exception:
                    continue
                hits.append((nt, nx, syms, info))
    return hits


def _best_hit(hits):
    """Prefer the richest validated symmetry set (real class with most ops)."""
    def score(hit):
        nt, nx, syms, info = hit
        return ((nt is not None) + (nx is not None), info.is_real)
    hits = sorted(hits, key=score, reverse=True)
    best = hits[0]
    ambiguous = [f"{h[0]}|{h[1]}" for h in hits[1:]
                 if score(h) == score(best) and h[3].class_name != best[3].class_name]
    return best, tuple(ambiguous)


def product_hamiltonian(factor1, factor2, tol=1e-9):
    """Build the corner-model product of two (model, symmetry) pairs.

    The construction follows the class pair: a chiral first factor gives
    the tensor form, a chiral second factor the transposed tensor form,
    and two non-chiral factors one of the doubled forms.  The returned
    symmetry set is whichever displayed candidate set validates; product
    corners live at alpha = 0, beta = +inf (the coordinate orthant).
    """
    m1, s1 = factor1
    m2, s2 = factor2
    c1, c2 = detect_az_class(s1), detect_az_class(s2)

    if c1.is_chiral or c2.is_chiral:
        if c1.is_chiral:
            model = _swap_terms(m1, m2, s1.pi)
            tag = "tensor"
        else:
            model = _swap_terms_right(m1, m2, s2.pi)
            tag = "tensor-transposed"
        theta_cands = _antiunitary_candidates(s1, s2)
        xi_cands = dict(theta_cands)
        hits = _validated_sets(model, theta_cands, xi_cands, tol)
        if not hits:
            raise ProductError(
                f"no symmetry candidate validates for {c1.class_name} x {c2.class_name}")
        (nt, nx, syms, info), ambiguous = _best_hit(hits)
        return ProductResult(model, syms, info.class_name, tag,
                             (f"theta={nt}", f"xi={nx}"), ambiguous)

    # neither factor chiral: doubled forms
    all_hits = []
    for variant in ("star", "square"):
        model = _doubled_model(m1, m2, variant)
        cands = _doubled_candidates(s1, s2)
        hits = _validated_sets(model, cands, dict(cands), tol)
        for h in hits:
            all_hits.append((variant, model) + h)
    if not all_hits:
        raise ProductError(
            f"no doubled-form candidate validates for {c1.class_name} x {c2.class_name}")

    def score(entry):
        variant, model, nt, nx, syms, info = entry
        return ((nt is not None) + (nx is not None), info.is_real)

    all_hits.sort(key=score, reverse=True)
    variant, model, nt, nx, syms, info = all_hits[0]
    ambiguous = tuple(f"{e[0]}|{e[2]}|{e[3]}" for e in all_hits[1:]
                      if score(e) == score(all_hits[0])
                      and e[5].class_name != info.class_name)
    return ProductResult(model, syms, info.class_name, f"doubled-{variant}",
                         (f"theta={nt}", f"xi={nx}"), ambiguous)


def direct_sum(factor1, factor2):
    """Stack two models with identical dimension (for additivity tests)."""
    m1, s1 = factor1
    m2, s2 = factor2
    if m1.dim != m2.dim:
        raise ModelError("direct sum needs equal spatial dimension")
    n1, n2 = m1.orbitals, m2.orbitals
    hops = {}
    for v in set(m1.hoppings) | set(m2.hoppings):
        blk = np.zeros((n1 + n2, n1 + n2), dtype=complex)
        if v in m1.hoppings:
            blk[:n1, :n1] = m1.hoppings[v]
        if v in m2.hoppings:
            blk[n1:, n1:] = m2.hoppings[v]
        hops[v] = blk
    model = HoppingModel(m1.dim, n1 + n2, hops)

    def stack_anti(a1, a2):
        if a1 is None or a2 is None or a1.square_sign != a2.square_sign:
            return None
        z1 = np.zeros((n1, n2))
        m = np.block([[a1.matrix, z1], [z1.T, a2.matrix]])
        return AntiUnitary(m, a1.square_sign)

    theta = stack_anti(s1.theta, s2.theta)
    xi = stack_anti(s1.xi, s2.xi)
    pi = None
    if s1.pi is not None and s2.pi is not None:
        z1 = np.zeros((n1, n2))
        pi = np.block([[s1.pi, z1], [z1.T, s2.pi]])
    return model, SymmetrySet(theta, xi, pi)
