"""
Application-wide constants and configuration values.

This module defines the reserved words of the formula grammar, the modality
tables shared by the logic, fragment and automata packages, default bounds
and the message templates used by the CLI and the HTTP API.
"""

# Fixpoint kinds
MU = "mu"
NU = "nu"
FIXPOINT_KINDS = (MU, NU)

# Unary modalities: (mode, direction) per operator
MODALITIES = ("Xg", "Xc", "Yg", "Yc")
MODE_OF = {"Xg": "g", "Xc": "c", "Yg": "g", "Yc": "c"}
DIRECTION_OF = {"Xg": "X", "Xc": "X", "Yg": "Y", "Yc": "Y"}
MODALITY_OF = {("X", "g"): "Xg", ("X", "c"): "Xc", ("Y", "g"): "Yg", ("Y", "c"): "Yc"}
MIRROR_MODALITY = {"Xg": "Yg", "Yg": "Xg", "Xc": "Yc", "Yc": "Xc"}

# Zeroary modalities
ZEROARIES = ("S", "P", "firstg", "firstc", "lastg", "lastc")
MIRROR_ZEROARY = {
    "S": "P", "P": "S",
    "firstg": "lastg", "lastg": "firstg",
    "firstc": "lastc", "lastc": "firstc",
}
# ~M phi == boundary(M) | M phi
BOUNDARY_OF = {"Xg": "lastg", "Xc": "lastc", "Yg": "firstg", "Yc": "firstc"}
# Modality that makes a zeroary intrinsic to a layer of that kind
INTRINSIC_ZEROARY = {"firstg": "Yg", "lastg": "Xg", "firstc": "Yc", "lastc": "Xc"}

# Temporal sugar
TEMPORAL_OPS = ("Fg", "Fc", "Gg", "Gc", "Pg", "Pc", "Hg", "Hc")
UNTIL_OPS = ("Ug", "Uc", "Sg", "Sc")
STEP_OF = {
    "Fg": "Xg", "Fc": "Xc", "Gg": "Xg", "Gc": "Xc",
    "Pg": "Yg", "Pc": "Yc", "Hg": "Yg", "Hc": "Yc",
    "Ug": "Xg", "Uc": "Xc", "Sg": "Yg", "Sc": "Yc",
}
DUAL_TEMPORAL = {
    "Fg": "Gg", "Gg": "Fg", "Fc": "Gc", "Gc": "Fc",
    "Pg": "Hg", "Hg": "Pg", "Pc": "Hc", "Hc": "Pc",
}
MIRROR_TEMPORAL = {
    "Fg": "Pg", "Pg": "Fg", "Fc": "Pc", "Pc": "Fc",
    "Gg": "Hg", "Hg": "Gg", "Gc": "Hc", "Hc": "Gc",
    "Ug": "Sg", "Sg": "Ug", "Uc": "Sc", "Sc": "Uc",
}

# Formula grammar
KEYWORDS = frozenset(
    ("true", "false", "mu", "nu", "nS", "nP")
    + ZEROARIES + MODALITIES + TEMPORAL_OPS + UNTIL_OPS
)
IDENTIFIER_PATTERN = r"[A-Za-z][A-Za-z0-9_]*"

# Data-LTL
DLTL_NEXT_OPS = MODALITIES
DLTL_EVENTUALLY_OPS = ("Fg", "Fc", "Pg", "Pc")
DLTL_ALWAYS_OPS = ("Gg", "Gc", "Hg", "Hc")
# far future / deep past not in class, future / past not in class
FAR_OPS = ("fF~", "dP~", "F~", "P~")
FAR_DUALS = {"fG~": "fF~", "dH~": "dP~", "G~": "F~", "H~": "P~"}
DLTL_KEYWORDS = frozenset(
    ("true", "false", "S", "P") + MODALITIES + DLTL_EVENTUALLY_OPS + DLTL_ALWAYS_OPS + UNTIL_OPS
)
# modal depth of an FO2-to-unary-DLTL translation per quantifier, far modalities counted once
MODAL_DEPTH_FACTOR = 3
FO2_VARIABLES = ("x", "y")

# Fragment bases and their kinds
BASIS_KINDS = {"bma": ("g", "c"), "br": ("X", "Y")}

# Oracle bounds
DEFAULT_ALPHABET = ("a", "b")
DEFAULT_MAX_LEN = 5
MAX_API_LEN = 7
MAX_FORMULA_LENGTH = 4000
MAX_API_WORKERS = 8
DEFAULT_PCP_MARKERS = ("a", "b")

# CLI exit codes
EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

# API Response Codes
HTTP_BAD_REQUEST = 400
HTTP_INTERNAL_ERROR = 500

# Error Messages
ERROR_EMPTY_FORMULA = "Formula cannot be empty"
ERROR_UNKNOWN_MODE = "Unknown normalization mode '{}'"
ERROR_UNKNOWN_TRANSLATION = "Unknown translation {} -> {}"
ERROR_REQUEST_FAILED = "Request failed: {}"

# Success Messages
SUCCESS_EQUIVALENT = "✓ No counterexample up to length {}"
SUCCESS_WITNESS_FOUND = "✓ Witness of length {} found"
WARNING_COUNTEREXAMPLE = "⚠️ Counterexample found: {}"
