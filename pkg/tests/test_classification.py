import pytest

from cornerlab.classification import (
    GROUP_0,
    GROUP_2Z,
    GROUP_Z,
    GROUP_Z2,
    AbelianGroup,
    ko_s_alpha_beta,
    ko_s_orthant,
    ko_t_hat,
    product_invariant_predict,
    strong_group_lookup,
)
from cornerlab.compressions import Slope

ZERO, INF = Slope(0, 1), Slope(1, 0)
IRR = Slope(irrational=True)

# ten hand-transcribed entries of the strong-invariant table, (class, d) -> group
HAND_ENTRIES = {
    ("A", 1): "Z", ("AIII", 0): "Z", ("AI", 3): "2Z", ("AI", 5): "Z2",
    ("BDI", 0): "Z", ("D", 0): "Z2", ("D", 1): "Z", ("DIII", 2): "Z",
    ("CII", 0): "2Z", ("C", 1): "2Z",
}


class TestAbelianGroup:
    def test_canonical_form_drops_trivial_torsion(self):
        g = AbelianGroup(1, (1, 3, 2))
        assert g.torsion == (2, 3)
        assert str(g) == "Z+Z2+Z3"

    def test_2z_marker(self):
        assert str(GROUP_2Z) == "2Z"
        assert GROUP_2Z.free_rank == 1


class TestStrongTable:
    def test_hand_entries(self):
        for (cls, d), label in HAND_ENTRIES.items():
            assert str(strong_group_lookup(cls, 8 + d, 8)) == label

    def test_bott_periodicity(self):
        for cls in ("A", "AIII", "AI", "BDI", "D", "DIII", "AII", "CII", "C", "CI"):
            for n in range(1, 10):
                for k in range(1, n + 1):
                    assert strong_group_lookup(cls, n, k) == \
                        strong_group_lookup(cls, n + 8, k)

    def test_row_shift_structure(self):
        # each real row is the previous one shifted by one column
        order = ["AI", "BDI", "D", "DIII", "AII", "CII", "C", "CI"]
        for a, b in zip(order, order[1:]):
            row_a = [strong_group_lookup(a, 8 + d, 8) for d in range(8)]
            row_b = [strong_group_lookup(b, 8 + d, 8) for d in range(8)]
            assert row_b[1:] + row_b[:1] == row_a

    def test_codimension_one_is_the_tenfold_table(self):
        # spot-check the standard first-order entries at k = 1
        assert str(strong_group_lookup("D", 1, 1)) == "Z2"    # Kitaev chain
        assert str(strong_group_lookup("D", 2, 1)) == "Z"     # p+ip
        assert str(strong_group_lookup("AII", 2, 1)) == "Z2"  # QSH
        assert str(strong_group_lookup("AII", 3, 1)) == "Z2"  # 3-D TI
        assert str(strong_group_lookup("DIII", 3, 1)) == "Z"  # He-3 B
        assert str(strong_group_lookup("A", 2, 1)) == "Z"     # IQHE

    def test_invalid_inputs(self):
        with pytest.raises(KeyError):
            strong_group_lookup("X", 2, 1)
        with pytest.raises(ValueError):
            strong_group_lookup("D", 1, 2)


class TestWedgeTables:
    def test_ko2_parity_dichotomy(self):
        assert str(ko_s_alpha_beta(2, ZERO, INF)) == "Z2+Z2"       # t = 1
        assert str(ko_s_alpha_beta(2, ZERO, Slope(2, 1))) == "Z2+Z2+Z2+Z2"

    def test_ko0_torsion(self):
        for t in (1, 2, 3, 5):
            g = ko_s_alpha_beta(0, ZERO, Slope(t, 1))
            expect = "Z" if t == 1 else f"Z+Z{t}"
            assert str(g) == expect

    def test_ko1_even_odd(self):
        assert str(ko_s_alpha_beta(1, ZERO, INF)) == "Z+Z2"
        assert str(ko_s_alpha_beta(1, ZERO, Slope(2, 1))) == "Z+Z2+Z2"

    def test_irrational_patterns(self):
        assert str(ko_s_alpha_beta(1, IRR, IRR)) == "Z+Z2+Z2+Z2"
        assert str(ko_s_alpha_beta(2, Slope(1, 2), IRR)) == "Z2+Z2+Z2"
        assert str(ko_s_alpha_beta(0, IRR, IRR)) == "Z+Z+Z"

    def test_gamma_invariance(self):
        # depends only on the rationality pattern and t
        a = ko_s_alpha_beta(3, Slope(1, 2), Slope(1, 1))   # t = 1
        b = ko_s_alpha_beta(3, Slope(0, 1), INF)           # t = 1
        assert a == b

    def test_high_degrees_vanish(self):
        for i in (6, 7):
            assert ko_s_alpha_beta(i, ZERO, INF).is_trivial


class TestOrthantAndQuarterTables:
    def test_orthant_row(self):
        expect = ["Z", "Z+Z2", "Z2+Z2", "Z2", "Z", "Z", "0", "0"]
        assert [str(ko_s_orthant(i)) for i in range(8)] == expect

    def test_quarter_plane_torsion(self):
        assert str(ko_t_hat(0, ZERO, Slope(3, 1))) == "Z+Z3"
        assert str(ko_t_hat(1, ZERO, INF)) == "Z2"
        assert str(ko_t_hat(2, ZERO, Slope(2, 1))) == "Z2+Z2+Z2"
        assert str(ko_t_hat(3, ZERO, INF)) == "0"
        assert str(ko_t_hat(5, ZERO, INF)) == "0"


class TestProductPrediction:
    def test_paper_bullets(self):
        target, value = product_invariant_predict("BDI", 1, "BDI", 1)
        assert (target, value.value, value.group_tag) == ("BDI", 1, "Z")
        target, value = product_invariant_predict("CII", 2, "CII", 2)
        assert (target, value.value) == ("BDI", 4)
        target, value = product_invariant_predict("BDI", 2, "D", 1)
        assert (target, value.value, value.group_tag) == ("D", 0, "Z2")

    def test_transposes(self):
        target, value = product_invariant_predict("CII", 2, "BDI", 1)
        assert (target, value.value, value.group_tag) == ("CII", 2, "2Z")
        target, value = product_invariant_predict("D", 1, "BDI", 3)
        assert (target, value.value) == ("D", 1)

    def test_k_n_minus_1_cases(self):
        target, value = product_invariant_predict("D", 1, "D", 1, "k=n-1")
        assert (target, value.value, value.group_tag) == ("DIII", 1, "Z2")
        target, value = product_invariant_predict("CII", 2, "C", 2, "k=n-1")
        assert (target, value.value, value.group_tag) == ("D", 4, "Z")
        target, value = product_invariant_predict("BDI", 1, "C", 2, "k=n-1")
        assert (target, value.value, value.group_tag) == ("C", 2, "2Z")

    def test_group_tags_respected(self):
        _, value = product_invariant_predict("BDI", 3, "CII", 2)
        assert value.group_tag == "2Z" and value.value % 2 == 0
        _, value = product_invariant_predict("D", 1, "D", 1)
        assert value.group_tag == "Z2" and value.value in (0, 1)

    def test_unsupported_pair(self):
        with pytest.raises(KeyError):
            product_invariant_predict("AI", 1, "AI", 1)
        with pytest.raises(KeyError):
            product_invariant_predict("DIII", 1, "DIII", 1, "k=n-1")
