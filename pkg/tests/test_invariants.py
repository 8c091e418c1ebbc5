import numpy as np
import pytest

from cornerlab.catalog import (
    diii_surrogate_family,
    g_kernel_vector,
    model_cii_chain,
    model_kitaev,
    model_pwave,
    model_ssh,
    operator_G,
    operator_checkA,
    operator_hatA,
)
from cornerlab.compressions import Slope, build_half_space, build_orthant
from cornerlab.invariants import (
    InvariantValue,
    PathFamily,
    ResolutionError,
    chiral_index,
    corner_invariant,
    localized_fredholm_index,
    localized_kernel_count,
    mod2_index_d,
    mod2_index_diii,
    spectral_flow,
    weak_invariants_diii,
    z2_spectral_flow,
)
from cornerlab.models import AntiUnitary, detect_az_class
from cornerlab.products import direct_sum
from cornerlab.spectra import spectrum

from conftest import j2


class TestInvariantValue:
    def test_group_constraints(self):
        with pytest.raises(ValueError):
            InvariantValue("Z2", 2)
        with pytest.raises(ValueError):
            InvariantValue("2Z", 3)
        assert InvariantValue("2Z", 4).generator_multiple == 2


class TestKernelCounts:
    def test_trivial_model_counts_zero(self):
        model, _ = model_ssh(1.0, 0.5)
        sp = spectrum(build_half_space(model, Slope(0, 1), L=40), 10)
        assert localized_kernel_count(sp, 1e-6) == 0

    def test_kitaev_sweet_spot(self):
        model, _ = model_kitaev(0.0, 0.5, 0.5)
        sp = spectrum(build_orthant(model, 1, L=40), 10)
        assert localized_kernel_count(sp, 1e-6) == 1

    def test_ssh_chiral_index(self):
        model, syms = model_ssh(0.5, 1.0)
        op = build_orthant(model, 1, L=40)
        sp = spectrum(op, 10)
        iv = chiral_index(sp, op.lift_orbital_matrix(syms.pi), 1e-6)
        assert iv.value == 1

    def test_mod2_additivity(self):
        kit = model_kitaev(0.0, 0.5, 0.5)
        stacked = direct_sum(kit, kit)
        op = build_orthant(stacked[0], 1, L=40)
        sp = spectrum(op, 10)
        assert localized_kernel_count(sp, 1e-6) == 2
        assert mod2_index_d(sp, 1e-6).value == 0
        assert mod2_index_diii(sp, 1e-6).value == 1

    def test_diii_odd_kernel_rejected(self):
        model, _ = model_kitaev(0.0, 0.5, 0.5)
        sp = spectrum(build_orthant(model, 1, L=40), 10)
        with pytest.raises(ResolutionError):
            mod2_index_diii(sp, 1e-6)


class TestCanonicalOperators:
    def test_hatA_index(self):
        assert localized_fredholm_index(operator_hatA(L=20)).value == -1

    def test_checkA_index(self):
        assert localized_fredholm_index(operator_checkA(L=20)).value == 1

    def test_hatA_entries_binary_real(self):
        m = operator_hatA(L=12).matrix
        assert np.abs(m.imag).max() == 0
        assert set(np.unique(m.real)) <= {0.0, 1.0}

    def test_sign_reversal_all_windows(self):
        for L in (14, 20):
            a = localized_fredholm_index(operator_hatA(L=L)).value
            b = localized_fredholm_index(operator_checkA(L=L)).value
            assert a == -b == -1

    def test_identity_index_zero(self):
        from cornerlab.compressions import SiteIndexMap, TruncatedOperator
        imap = SiteIndexMap(tuple((i,) for i in range(10)), 1)
        op = TruncatedOperator(np.eye(10), imap, "half", 9)
        assert localized_fredholm_index(op).value == 0

    def test_G_index_and_kernel(self):
        g = operator_G(3, 8)
        assert localized_fredholm_index(g).value == 1
        v = g_kernel_vector(g)
        assert np.abs(g.matrix @ v).max() < 1e-12

    def test_G_k4(self):
        assert localized_fredholm_index(operator_G(4, 6)).value == 1

    def test_G_requires_k3(self):
        with pytest.raises(Exception):
            operator_G(2, 8)


class TestSpectralFlow:
    def test_scalar_path(self):
        fam = PathFamily.from_function(lambda s: np.array([[s]]), np.linspace(-1, 1, 9))
        assert spectral_flow(fam) == 1

    def test_cancelling_pair(self):
        fam = PathFamily.from_function(lambda s: np.diag([s, -s]), np.linspace(-1, 1, 9))
        assert spectral_flow(fam) == 0

    def test_double_path(self):
        fam = PathFamily.from_function(lambda s: np.diag([s, s]), np.linspace(-1, 1, 9))
        assert spectral_flow(fam) == 2

    def test_partition_independence(self):
        # crossings: up at 0, down at 0.3, up at 0.7 -> net +1 at any sampling
        def f(s):
            return np.diag([s, 0.3 - s, s - 0.7])
        for n in (9, 17, 33):
            fam = PathFamily.from_function(f, np.linspace(-1, 1, n))
            assert spectral_flow(fam) == 1

    def test_endpoint_invertibility_required(self):
        fam = PathFamily.from_function(lambda s: np.array([[s + 1.0]]),
                                       np.linspace(-1, 1, 5))
        with pytest.raises(ValueError):
            spectral_flow(fam)

    def test_refinement_without_generator_fails(self):
        fam = PathFamily([(-1.0, np.array([[-1.0]])), (1.0, np.array([[1.0]]))])
        with pytest.raises(ResolutionError):
            spectral_flow(fam)


class TestZ2Flow:
    def j(self, copies=1):
        return AntiUnitary(np.kron(np.eye(copies), j2), -1)

    def test_kramers_crossing(self):
        fam = PathFamily.from_function(lambda s: np.diag([s, -s]),
                                       np.linspace(-1, 1, 9), equivariance=self.j())
        assert z2_spectral_flow(fam).value == 1

    def test_stacked_copies_cancel(self):
        fam = PathFamily.from_function(lambda s: np.diag([s, -s, s, -s]),
                                       np.linspace(-1, 1, 9), equivariance=self.j(2))
        assert z2_spectral_flow(fam).value == 0

    def test_constant_gapped(self):
        fam = PathFamily.from_function(lambda s: np.diag([2.0, 2.0]),
                                       np.linspace(-1, 1, 5), equivariance=self.j())
        assert z2_spectral_flow(fam).value == 0

    def test_equivariance_violation_detected(self):
        fam = PathFamily.from_function(lambda s: np.diag([1.0, -1.0]),
                                       np.linspace(-1, 1, 5), equivariance=self.j())
        with pytest.raises(ValueError):
            z2_spectral_flow(fam)


class TestWeakDIII:
    def test_surrogate_triple(self):
        fam_fn, w, _ = diii_surrogate_family()
        fam = PathFamily.from_function(fam_fn, np.linspace(0, np.pi, 17))
        wp, wm, qsf, rep = weak_invariants_diii(fam, 1e-8, loc_weights=w, level_cap=0.4)
        assert (wp.value, wm.value, qsf.value) == (1, 0, 1)
        assert rep["strong_nonzero"]

    def test_reversed_surrogate(self):
        fam_fn, w, _ = diii_surrogate_family(reverse=True)
        fam = PathFamily.from_function(fam_fn, np.linspace(0, np.pi, 17))
        wp, wm, qsf, _ = weak_invariants_diii(fam, 1e-8, loc_weights=w, level_cap=0.4)
        assert (wp.value, wm.value, qsf.value) == (0, 1, 1)

    def test_direct_sum_weak_only(self):
        f1, w, _ = diii_surrogate_family()
        f2, _, _ = diii_surrogate_family(reverse=True)

        def stacked(t):
            a, b = f1(t), f2(t)
            out = np.zeros((len(a) + len(b),) * 2, dtype=complex)
            out[:len(a), :len(a)] = a
            out[len(a):, len(a):] = b
            return out

        fam = PathFamily.from_function(stacked, np.linspace(0, np.pi, 17))
        ww = np.concatenate([w, w])
        wp, wm, qsf, rep = weak_invariants_diii(fam, 1e-8, loc_weights=ww, level_cap=0.4)
        assert (wp.value, wm.value, qsf.value) == (1, 1, 0)
        assert rep["weak_only"]

    def test_identity_on_seeded_families(self, rng):
        # qsf = w+ + w- mod 2 across random gapped paddings of the surrogate
        fam_fn, w, _ = diii_surrogate_family()
        for trial in range(20):
            phase = float(rng.uniform(0.2, 0.8))
            rev = bool(rng.integers(2))
            g2, w2, _ = diii_surrogate_family(mass=0.5 + phase, reverse=rev)

            def stacked(t, g2=g2):
                a, b = fam_fn(t), g2(t)
                out = np.zeros((len(a) + len(b),) * 2, dtype=complex)
                out[:len(a), :len(a)] = a
                out[len(a):, len(a):] = b
                return out

            fam = PathFamily.from_function(stacked, np.linspace(0, np.pi, 17))
            ww = np.concatenate([w, w2])
            wp, wm, qsf, _ = weak_invariants_diii(fam, 1e-8, loc_weights=ww,
                                                  level_cap=0.3)
            assert qsf.value == (wp.value + wm.value) % 2


class TestCornerDispatch:
    def test_pwave_edge_csf(self):
        model, syms = model_pwave(2.0, 1.0, 1.0)
        info = detect_az_class(syms)
        rep = corner_invariant(model, syms, info, k=1, L=20, grid=16)
        assert rep.invariant.group_tag == "Z"
        assert rep.invariant.value == 1

    def test_pwave_orientation_flip(self):
        model, syms = model_pwave(-2.0, 1.0, 1.0)
        info = detect_az_class(syms)
        rep = corner_invariant(model, syms, info, k=1, L=20, grid=16)
        assert rep.invariant.value == -1

    def test_unsupported_class_dimension(self):
        model, syms = model_ssh(0.5, 1.0)
        info = detect_az_class(syms)  # BDI at d = 1 is not in the dispatch
        from cornerlab.models import HoppingModel
        wide = {v + (0,): h for v, h in model.hoppings.items()}
        model2 = HoppingModel(2, 2, wide)
        with pytest.raises(Exception):
            corner_invariant(model2, syms, info, k=1, L=10)

    def test_gap_failure_raises(self):
        from cornerlab.spectra import GapClosedError
        model, syms = model_ssh(1.0, 1.0)
        info = detect_az_class(syms)
        with pytest.raises(GapClosedError) as err:
            corner_invariant(model, syms, info, k=1, L=12)
        assert err.value.assumption == "sgc1"
