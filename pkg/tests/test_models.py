import numpy as np
import pytest

from cornerlab.catalog import model_kitaev, model_ssh
from cornerlab.models import (
    AntiUnitary,
    ClassificationError,
    HoppingModel,
    ModelError,
    SymmetrySet,
    detect_az_class,
    evaluate_bloch,
    model_from_dict,
    model_to_dict,
    quaternionic_structure_basis,
    real_structure_basis,
    standard_j,
    verify_symmetry_relations,
    AZ_SYMMETRY_PATTERNS,
)

from conftest import sx, sz, j2


class TestEvaluateBloch:
    def test_ssh_at_zero(self):
        model, _ = model_ssh(0.5, 1.0)
        assert np.allclose(evaluate_bloch(model, [0.0]),
                           [[0, 1.5], [1.5, 0]], atol=1e-14)

    def test_ssh_at_pi(self):
        # hand evaluation: v + w e^{-i pi} = -0.5 on the upper hopping
        model, _ = model_ssh(0.5, 1.0)
        assert np.allclose(evaluate_bloch(model, [np.pi]),
                           [[0, -0.5], [-0.5, 0]], atol=1e-14)

    def test_constant_symbol(self):
        h0 = np.diag([2.0, -1.0]).astype(complex)
        model = HoppingModel(2, 2, {(0, 0): h0})
        for t in ([0.1, 0.4], [2.0, 3.0]):
            assert np.allclose(evaluate_bloch(model, t), h0)

    def test_hermitian_at_random_momenta(self, rng):
        model, _ = model_kitaev(0.3, 0.7, 0.4)
        for _ in range(10):
            h = evaluate_bloch(model, rng.uniform(0, 2 * np.pi, 1))
            assert np.abs(h - h.conj().T).max() < 1e-12

    def test_rejects_inconsistent_hoppings(self):
        h1 = np.array([[0, 1], [0, 0]], dtype=complex)
        with pytest.raises(ModelError):
            HoppingModel(1, 2, {(1,): h1, (-1,): h1})


class TestSymmetryRelations:
    def test_ssh_relations(self):
        model, syms = model_ssh(0.5, 1.0)
        rep = verify_symmetry_relations(model, syms)
        assert rep.trs and rep.phs and rep.chiral

    def test_sigma_x_chirality_of_sigma_z(self):
        model = HoppingModel(1, 2, {(0,): sz})
        rep = verify_symmetry_relations(model, SymmetrySet(pi=sx))
        assert rep.chiral

    def test_identity_cannot_anticommute(self):
        model, _ = model_ssh(0.5, 1.0)
        rep = verify_symmetry_relations(model, SymmetrySet(pi=np.eye(2)))
        assert rep.chiral is False

    def test_momentum_space_forms(self, rng):
        # real-space relations imply the Bloch-matrix relations on a grid
        model, syms = model_ssh(0.4, 0.9)
        for t in np.linspace(0, 2 * np.pi, 7):
            h, hm = evaluate_bloch(model, [t]), evaluate_bloch(model, [-t])
            u = syms.theta.matrix
            assert np.abs(u @ hm.conj() @ u.conj().T - h).max() < 1e-12
            ux = syms.xi.matrix
            assert np.abs(ux @ hm.conj() @ ux.conj().T + h).max() < 1e-12
            assert np.abs(syms.pi @ h @ syms.pi + h).max() < 1e-12


class TestClassDetection:
    def test_examples(self):
        ai = SymmetrySet(theta=AntiUnitary(np.eye(2), 1))
        assert detect_az_class(ai).class_name == "AI"
        assert detect_az_class(ai).degree_i == 0
        none = SymmetrySet()
        assert detect_az_class(none).class_name == "A"

    def test_diii_pattern(self):
        from conftest import symmetry_set_for
        info = detect_az_class(symmetry_set_for("DIII"))
        assert (info.class_name, info.degree_i, info.phase_c) == ("DIII", 3, 1)

    def test_all_patterns_roundtrip(self):
        from conftest import symmetry_set_for
        for pattern, name in AZ_SYMMETRY_PATTERNS.items():
            if name in ("A", "AIII"):
                continue
            info = detect_az_class(symmetry_set_for(name))
            assert info.class_name == name
            syms = symmetry_set_for(name)
            assert syms.pattern() == pattern

    def test_degree_and_phase_table(self):
        expected = {"AI": (0, 1), "BDI": (1, 1), "D": (2, 1j), "DIII": (3, 1),
                    "AII": (4, 1), "CII": (5, 1), "C": (6, 1j), "CI": (-1, 1)}
        from conftest import symmetry_set_for
        for name, (deg, phase) in expected.items():
            info = detect_az_class(symmetry_set_for(name))
            assert info.degree_i == deg and info.phase_c == phase

    def test_inconsistent_pattern_raises(self):
        theta = AntiUnitary(np.eye(2), 1)
        xi = AntiUnitary(sz.astype(complex), 1)
        broken = SymmetrySet(theta, xi)
        object.__setattr__(broken, "pi", None)
        with pytest.raises(ClassificationError):
            detect_az_class(broken)


class TestCanonicalBases:
    def test_real_basis(self, rng):
        q = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
        u = q @ q.T  # symmetric unitary: a square +1 antiunitary
        a = AntiUnitary(u, 1)
        w = real_structure_basis(a)
        assert np.allclose(w.conj().T @ u @ np.conj(w), np.eye(4), atol=1e-9)

    def test_quaternionic_basis(self, rng):
        q = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
        u = q @ standard_j(4) @ q.T
        a = AntiUnitary(u, -1)
        w = quaternionic_structure_basis(a)
        assert np.allclose(w.conj().T @ u @ np.conj(w), standard_j(4), atol=1e-9)


class TestModelDocuments:
    def test_roundtrip(self):
        model, syms = model_ssh(0.3, 0.8)
        doc = model_to_dict(model, syms)
        # offsets listed once per pair
        offs = [tuple(e["offset"]) for e in doc["hoppings"]]
        assert len(offs) == len(set(offs))
        assert not any(tuple(-c for c in o) in offs for o in offs if o != (0,))
        m2, s2 = model_from_dict(doc)
        assert m2.hoppings.keys() == model.hoppings.keys()
        for v in model.hoppings:
            assert np.allclose(m2.hoppings[v], model.hoppings[v])
        assert verify_symmetry_relations(m2, s2).all_pass()

    def test_duplicate_offset_pair_rejected(self):
        model, _ = model_ssh(0.3, 0.8)
        doc = model_to_dict(model)
        doc["hoppings"].append({
            "offset": [-1],
            "matrix": [[[0, 0], [0, 0]], [[1, 0], [0, 0]]],
        })
        with pytest.raises(ModelError):
            model_from_dict(doc)
