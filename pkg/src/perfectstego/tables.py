"""Reference tables for the perfect code as printed in the source material.

The transcriptions are verbatim, including signs. ``DOUBLE_ERROR_GROUPS`` has
one known misprint (see ``DOUBLE_ERROR_ERRATA``); use
:func:`double_error_groups` to get the corrected groups.
"""
from __future__ import annotations

GENERATOR_LABELS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
LOGICAL_X_LABEL = "XXXXX"
LOGICAL_Z_LABEL = "ZZZZZ"

CHECK_MATRIX_Z = (
    (0, 1, 1, 0, 0),
    (0, 0, 1, 1, 0),
    (0, 0, 0, 1, 1),
    (1, 0, 0, 0, 1),
)
CHECK_MATRIX_X = (
    (1, 0, 0, 1, 0),
    (0, 1, 0, 0, 1),
    (1, 0, 1, 0, 0),
    (0, 1, 0, 1, 0),
)

# error -> printed syndrome, ordered by syndrome value
SYNDROME_TABLE = (
    ("IIIII", "0000"), ("IIIIZ", "0001"), ("IIZII", "0010"), ("IIIXI", "0011"),
    ("IXIII", "0100"), ("IIXII", "0101"), ("ZIIII", "0110"), ("IIYII", "0111"),
    ("XIIII", "1000"), ("IZIII", "1001"), ("IIIIX", "1010"), ("IIIIY", "1011"),
    ("IIIZI", "1100"), ("IYIII", "1101"), ("YIIII", "1110"), ("IIIYI", "1111"),
)

# (E_i, O_i, encoded error, syndrome)
SINGLE_ERROR_ENCODING = (
    ("IIII", "I", "IIIII", "0000"),
    ("IIIX", "Z", "IIIIZ", "0001"),
    ("IIXI", "I", "IIZII", "0010"),
    ("IIXX", "I", "IIIXI", "0011"),
    ("IXII", "I", "IXIII", "0100"),
    ("IXZY", "Y", "IIXII", "0101"),
    ("ZXXI", "Z", "ZIIII", "0110"),
    ("-IXYY", "Y", "IIYII", "0111"),
    ("XIII", "I", "XIIII", "1000"),
    ("XZIX", "I", "IZIII", "1001"),
    ("XIXI", "X", "IIIIX", "1010"),
    ("XIXX", "Y", "IIIIY", "1011"),
    ("XXIZ", "X", "IIIZI", "1100"),
    ("XYIX", "I", "IYIII", "1101"),
    ("YXXI", "Z", "YIIII", "1110"),
    ("XXXY", "X", "IIIYI", "1111"),
)

# syndrome -> six (E_i (x) O_i, encoded error) pairs; entry m belongs to encoding m
DOUBLE_ERROR_GROUPS = {
    "0001": (("IZIXI", "XZIII"), ("IIZYY", "IXXII"), ("-ZIZYX", "ZIYII"),
             ("IIIXI", "IIZXI"), ("ZIIYY", "YIIYI"), ("-IZIYX", "IYIZI")),
    "0010": (("ZIXIZ", "XZIII"), ("IZXZX", "IYIYI"), ("ZIXZY", "YIIZI"),
             ("IIXIX", "XIIIX"), ("IZXIY", "IZIIY"), ("IIXIZ", "IIIXZ")),
    "0011": (("ZZXXZ", "YYIII"), ("-ZIYYX", "ZIXII"), ("-IIYYY", "IXYII"),
             ("IZXXX", "IZIIX"), ("IIXXY", "XIIIY"), ("IIXXZ", "IIZIZ")),
    "0100": (("ZXIIZ", "ZIZII"), ("IXZZY", "IIYXI"), ("IXIZX", "XIIZI"),
             ("ZXIIY", "YIIIX"), ("IXIZZ", "IIIYY"), ("IXZZX", "IIXIZ")),
    "0101": (("IYIXI", "XYIII"), ("ZXIXZ", "ZIIXI"), ("IYIYX", "IZIZI"),
             ("IXIYI", "IIIYX"), ("-ZXIXX", "YIIIY"), ("IXIXZ", "IXIIZ")),
    "0110": (("IXXII", "IXZII"), ("IXYZY", "IIXXI"), ("-IYXZX", "IZIYI"),
             ("IXXZI", "IIIZX"), ("IYXIY", "IYIIY"), ("-IXYZX", "IIYIZ")),
    "0111": (("-ZYXXZ", "YZIII"), ("IXXXI", "IXIXI"), ("IXXYX", "XIIYI"),
             ("IYXXX", "IYIIX"), ("-IXXYZ", "IIIZY"), ("ZXXXI", "ZIIIZ")),
    "1000": (("XZZZY", "IYXII"), ("XIZIZ", "IIYYI"), ("XIIZX", "IXIZI"),
             ("XIIIX", "IIZIX"), ("XIIIY", "IIIXY"), ("XZIIZ", "IZIIZ")),
    "1001": (("-YIZYX", "YIYII"), ("-YIIYY", "ZIIYI"), ("XIZXZ", "IIXZI"),
             ("XIIXX", "IIIXX"), ("XIIXY", "IIZIY"), ("XIIXZ", "XIIIZ")),
    "1010": (("YIXIZ", "YXIII"), ("-XZYZY", "IYYII"), ("XIXII", "XIZII"),
             ("XZXII", "IZIXI"), ("XIYIZ", "IIXYI"), ("-YIXZY", "ZIIZI")),
    "1011": (("-YZXXZ", "ZYIII"), ("-YIYYX", "YIXII"), ("XZXXI", "IZZII"),
             ("XIXXI", "XIIXI"), ("XIXYX", "IXIYI"), ("-XIYXZ", "IIYZI")),
    "1100": (("XXIII", "XXIII"), ("-XYZZY", "IZXII"), ("YXIIZ", "YIZII"),
             ("-YXIIY", "ZIIIX"), ("XXZZI", "IIYIY"), ("XYIIZ", "IYIIZ")),
    "1101": (("XXZYY", "XIXII"), ("YXIXZ", "YIIXI"), ("XXIYX", "IIZYI"),
             ("XXZYZ", "IIYIX"), ("YXIXX", "ZIIIY"), ("XXIYY", "IIIZZ")),
    "1110": (("XYYZY", "IZYII"), ("XYXII", "IYIXI"), ("XXXZX", "IIZZI"),
             ("XXXIX", "IXIIX"), ("XXYZI", "IIXIY"), ("-XXXZY", "IIIYZ")),
    "1111": (("YYXXZ", "ZZIII"), ("-XXYYY", "XIYII"), ("XYXXI", "IYZII"),
             ("XXYYZ", "IIXIX"), ("XXXXY", "IXIIY"), ("YXXXI", "YIIIZ")),
}

# (syndrome, position) -> (printed encoded error, corrected encoded error).
# The printed entry duplicates the first error of group 0001; the corrected
# value is the only weight-2 error absent from the table, has syndrome 0010,
# and agrees with the printed pre-image ZIXIZ.
DOUBLE_ERROR_ERRATA = {("0010", 0): ("XZIII", "ZXIII")}


def double_error_groups(corrected: bool = True) -> dict[str, tuple[tuple[str, str], ...]]:
    groups = {s: tuple(rows) for s, rows in DOUBLE_ERROR_GROUPS.items()}
    if corrected:
        for (syndrome, pos), (printed, fixed) in DOUBLE_ERROR_ERRATA.items():
            rows = list(groups[syndrome])
            pre_image, encoded = rows[pos]
            assert encoded == printed
            rows[pos] = (pre_image, fixed)
            groups[syndrome] = tuple(rows)
    return groups
