"""tamecert: finite-horizon certificates for enveloping-semigroup structure.

Constructs split-circle (Sturmian), semicocycle, cos(1/x), cut-and-project,
projective and free-group boundary systems with exact arithmetic, approximates
enveloping-semigroup elements along certified approach sequences, and emits
machine-checkable certificates: determining sets, Sorgenfrey isolation,
independence-set growth and oscillation rank.
"""

__version__ = "0.1.0"

from .exactarith import (  # noqa: F401
    GOLDEN,
    SQRT2_MINUS_1,
    ApproachSequence,
    CirclePoint,
    RotationNumber,
    one_sided_approach,
    parse_rotation_number,
)
