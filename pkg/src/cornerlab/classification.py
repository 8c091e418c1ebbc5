"""Queryable group tables for corner-state classification.

The strong-invariant table is generated from the shifted Bott sequence
(real rows) and the period-two complex rows rather than transcribed, so a
structural check (periodicity, row shifts, the codimension-one tenfold
table) guards against transcription slips.  The K-group tables of the wedge
algebras are keyed by the rationality pattern of the slope pair, with the
even/odd dichotomy in t = -ps + qr where both slopes are rational.
"""

from __future__ import annotations

from dataclasses import dataclass

from .compressions import Slope, slope_normalize
from .models import AZ_DEGREE

__all__ = [
    "AbelianGroup",
    "strong_group_lookup",
    "ko_s_alpha_beta",
    "ko_s_orthant",
    "ko_t_hat",
    "product_invariant_predict",
    "GROUP_0",
    "GROUP_Z",
    "GROUP_Z2",
    "GROUP_2Z",
]


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group, plus a marker for even-index ranges.

    The marker distinguishes invariants ranging over 2Z from plain Z ones;
    as abstract groups both are free of rank one.
    """

    free_rank: int = 0
    torsion: tuple = ()
    even_index_marker: bool = False

    def __post_init__(self):
        tor = tuple(sorted(int(t) for t in self.torsion if int(t) > 1))
        object.__setattr__(self, "torsion", tor)

    def __add__(self, other):
        return AbelianGroup(self.free_rank + other.free_rank,
                            self.torsion + other.torsion,
                            self.even_index_marker or other.even_index_marker)

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def label(self):
        parts = []
        if self.free_rank:
            z = "2Z" if self.even_index_marker else "Z"
            parts.extend([z] * self.free_rank)
        parts.extend(f"Z{t}" for t in self.torsion)
        return "+".join(parts) if parts else "0"

    def __str__(self):
        return self.label()


GROUP_0 = AbelianGroup()
GROUP_Z = AbelianGroup(1)
GROUP_Z2 = AbelianGroup(0, (2,))
GROUP_2Z = AbelianGroup(1, (), True)


def _z2_power(j):
    return AbelianGroup(0, (2,) * j)


# KO_i(point) as invariant ranges: Z, Z2, Z2, 0, 2Z, 0, 0, 0
_KO_POINT = (GROUP_Z, GROUP_Z2, GROUP_Z2, GROUP_0, GROUP_2Z, GROUP_0, GROUP_0, GROUP_0)
_K_POINT = (GROUP_Z, GROUP_0)

REAL_CLASS_ORDER = ("AI", "BDI", "D", "DIII", "AII", "CII", "C", "CI")
COMPLEX_CLASS_DEGREE = {"A": 0, "AIII": 1}


def _build_strong_table():
    """Row for class with degree i: entry at d = KO_{i-1-d mod 8}(point)."""
    table = {}
    for name in REAL_CLASS_ORDER:
        i = AZ_DEGREE[name]
        table[name] = tuple(_KO_POINT[(i - 1 - d) % 8] for d in range(8))
    for name, i in COMPLEX_CLASS_DEGREE.items():
        table[name] = tuple(_K_POINT[(i - 1 - d) % 2] for d in range(8))
    return table


STRONG_TABLE = _build_strong_table()


def strong_group_lookup(az_class, n, k):
    """Strong corner-invariant group for an n-D system with a codimension-k
    corner, periodic in (n - k) mod 8."""
    if az_class not in STRONG_TABLE:
        raise KeyError(f"unknown AZ class {az_class!r}")
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    return STRONG_TABLE[az_class][(n - k) % 8]


# ---------------------------------------------------------------------------
# KO-groups of the wedge pullback and quarter-plane algebras


def _slope_pattern(alpha, beta):
    """(number of irrational slopes, t) with t computed only when both are
    rational or infinite."""
    n_irr = int(alpha.irrational) + int(beta.irrational)
    if n_irr:
        return n_irr, None
    norm = slope_normalize(alpha, beta)
    return 0, norm.t_num


def _z_t(t):
    return AbelianGroup(0, (t,)) if t > 1 else GROUP_0


def ko_s_alpha_beta(i, alpha, beta):
    """KO_i of the pullback algebra of the two half-plane compressions.

    Dispatches on how many of the slopes are irrational; for two rational
    (or infinite) slopes the answer branches on the parity of t.
    """
    i = i % 8
    n_irr, t = _slope_pattern(alpha, beta)
    if n_irr == 0:
        even = t % 2 == 0
        if i == 0 or i == 4:
            return GROUP_Z + _z_t(t)
        if i == 1:
            return (_z2_power(2) if even else GROUP_Z2) + GROUP_Z
        if i == 2:
            return _z2_power(4) if even else _z2_power(2)
        if i == 3:
            return _z2_power(2) if even else GROUP_Z2
        if i == 5:
            return GROUP_Z
        return GROUP_0
    if n_irr == 1:
        table = (AbelianGroup(2), _z2_power(2) + GROUP_Z, _z2_power(3), GROUP_Z2,
                 AbelianGroup(2), GROUP_Z, GROUP_0, GROUP_0)
    else:
        table = (AbelianGroup(3), _z2_power(3) + GROUP_Z, _z2_power(4), GROUP_Z2,
                 AbelianGroup(3), GROUP_Z, GROUP_0, GROUP_0)
    return table[i]


_KO_ORTHANT = (GROUP_Z, GROUP_Z + GROUP_Z2, _z2_power(2), GROUP_Z2,
               GROUP_Z, GROUP_Z, GROUP_0, GROUP_0)


def ko_s_orthant(i):
    """KO_i of the orthant boundary algebra: KO_i(pt) + KO_{i-1}(pt) as
    abstract groups (the 2Z markers play no role here)."""
    return _KO_ORTHANT[i % 8]


def ko_t_hat(i, alpha, beta):
    """KO_i of the quarter-plane Toeplitz algebra for the slope pair."""
    i = i % 8
    n_irr, t = _slope_pattern(alpha, beta)
    if n_irr == 0:
        even = t % 2 == 0
        if i == 0 or i == 4:
            return GROUP_Z + _z_t(t)
        if i == 1:
            return _z2_power(2) if even else GROUP_Z2
        if i == 2:
            return _z2_power(3) if even else GROUP_Z2
        if i == 3:
            return GROUP_Z2 if even else GROUP_0
        return GROUP_0
    rank = 1 + n_irr
    if i in (0, 4):
        return AbelianGroup(rank)
    if i in (1, 2):
        return _z2_power(rank)
    return GROUP_0


# ---------------------------------------------------------------------------
# product formula for the numerical invariants


def _pair_table(codim_case):
    # (class1, class2) -> (target, combine); combine maps integer values
    if codim_case == "k=n":
        base = {
            ("BDI", "BDI"): ("BDI", lambda a, b: a * b),
            ("BDI", "D"): ("D", lambda a, b: (a % 2) * b % 2),
            ("BDI", "DIII"): ("DIII", lambda a, b: (a % 2) * b % 2),
            ("BDI", "CII"): ("CII", lambda a, b: a * b),
            ("D", "D"): ("DIII", lambda a, b: a * b % 2),
            ("CII", "CII"): ("BDI", lambda a, b: a * b),
        }
        sym = {}
        for (c1, c2), (tgt, f) in base.items():
            sym[(c1, c2)] = (tgt, f)
            if (c2, c1) not in base:
                sym[(c2, c1)] = (tgt, lambda a, b, f=f: f(b, a))
        return sym
    if codim_case == "k=n-1":
        base = {
            ("BDI", "D"): ("D", lambda a, b: a * b),
            ("BDI", "DIII"): ("DIII", lambda a, b: (a % 2) * b % 2),
            ("BDI", "AII"): ("AII", lambda a, b: (a % 2) * b % 2),
            ("BDI", "C"): ("C", lambda a, b: a * b),
            ("D", "D"): ("DIII", lambda a, b: a * (b % 2) % 2),
            ("D", "DIII"): ("AII", lambda a, b: a * b % 2),
            ("DIII", "D"): ("AII", lambda a, b: a * (b % 2) % 2),
            ("CII", "D"): ("C", lambda a, b: a * b),
            ("CII", "C"): ("D", lambda a, b: a * b),
        }
        return base
    raise ValueError("codim_case must be 'k=n' or 'k=n-1'")


_TARGET_TAGS_K_N = {"BDI": "Z", "D": "Z2", "DIII": "Z2", "CII": "2Z"}
_TARGET_TAGS_K_N1 = {"D": "Z", "DIII": "Z2", "AII": "Z2", "C": "2Z"}


def product_invariant_predict(class1, value1, class2, value2, codim_case="k=n"):
    """Predicted corner invariant of the product model.

    ``value1``/``value2`` are InvariantValue instances (or plain integers);
    the pair must appear in the product table for the requested case
    (first factor full-codimension; for 'k=n-1' the second factor carries
    the codimension-(n-1) corner).  Returns (target class, InvariantValue).
    """
    from .invariants import InvariantValue

    v1 = value1.value if hasattr(value1, "value") else int(value1)
    v2 = value2.value if hasattr(value2, "value") else int(value2)
    table = _pair_table(codim_case)
    if (class1, class2) not in table:
        raise KeyError(
            f"pair {class1} x {class2} ({codim_case}) has no numerical product "
            "formula")
    target, combine = table[(class1, class2)]
    tags = _TARGET_TAGS_K_N if codim_case == "k=n" else _TARGET_TAGS_K_N1
    tag = tags[target]
    value = combine(v1, v2)
    if tag == "Z2":
        value %= 2
    return target, InvariantValue(tag, value, "product-prediction")
