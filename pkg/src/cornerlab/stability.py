"""Seeded symmetry-preserving perturbations and invariant stability checks."""

from __future__ import annotations

import numpy as np

from .models import HoppingModel, evaluate_bloch

__all__ = ["symmetrize_hoppings", "random_perturbation", "perturbed_model",
           "stability_check"]


def symmetrize_hoppings(hoppings, syms, dim):
    """Project a raw hopping family onto the symmetry-compatible subspace.

    Averages over the symmetry (semi)group: TRS keeps the invariant part,
    PHS and chirality keep the anti-invariant parts; Hermiticity
    (h_{-v} = h_v^dagger) is enforced first.
    """
    out = {}
    for v, h in hoppings.items():
        mv = tuple(-c for c in v)
        other = hoppings.get(mv, np.zeros_like(h))
        out[v] = (h + other.conj().T) / 2
    for v in list(out):
        mv = tuple(-c for c in v)
        if mv not in out:
            out[mv] = out[v].conj().T

    def apply_map(fn):
        for v in list(out):
            out[v] = (out[v] + fn(out[v])) / 2

    if syms.theta is not None:
        apply_map(syms.theta.conjugate)
    if syms.xi is not None:
        apply_map(lambda h: -syms.xi.conjugate(h))
    if syms.pi is not None:
        apply_map(lambda h: -syms.pi @ h @ syms.pi)
    return out


def random_perturbation(model, syms, strength, rng):
    """Random symmetry-preserving hopping perturbation of symbol norm <= strength."""
    n = model.orbitals
    raw = {}
    for v in model.offsets():
        raw[v] = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    clean = symmetrize_hoppings(raw, syms, model.dim)
    norm = sum(np.linalg.norm(h, 2) for h in clean.values())
    if norm < 1e-12:
        return {v: np.zeros((n, n), dtype=complex) for v in clean}
    scale = strength / norm
    return {v: scale * h for v, h in clean.items()}


def perturbed_model(model, syms, strength, rng):
    delta = random_perturbation(model, syms, strength, rng)
    hops = {v: h.copy() for v, h in model.hoppings.items()}
    for v, d in delta.items():
        hops[v] = hops.get(v, 0) + d
    return HoppingModel(model.dim, model.orbitals, hops)


def stability_check(invariant_fn, model, syms, strength, n_trials=20, seed=0):
    """Recompute an invariant under seeded symmetry-preserving perturbations.

    ``invariant_fn(model)`` must return an integer-like value.  Returns
    (reference value, all_agree, list of perturbed values).
    """
    ref = invariant_fn(model)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(n_trials):
        pert = perturbed_model(model, syms, strength, rng)
        values.append(invariant_fn(pert))
    return ref, all(v == ref for v in values), values
