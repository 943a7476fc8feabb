"""Exception hierarchy shared by all tropfan modules."""


class TropfanError(Exception):
    """Base class for all tropfan errors."""


class NonSymmetric(TropfanError):
    pass


class NonSimplicialCone(TropfanError):
    pass


class NotAFan(TropfanError):
    pass


class DuplicateRay(TropfanError):
    pass


class ConeNotInFan(TropfanError):
    pass


class NotCovering(TropfanError):
    pass


class RayNotInteriorToCone(TropfanError):
    pass


class NotABlowup(TropfanError):
    pass


class DimensionMismatch(TropfanError):
    pass


class NotMeromorphic(TropfanError):
    pass


class NotCodimOne(TropfanError):
    pass


class HostMismatch(TropfanError):
    pass


class NonIntegralRewrite(TropfanError):
    pass


class DegreeMismatch(TropfanError):
    pass


class NotComparable(TropfanError):
    pass


class ConeTooSmall(TropfanError):
    pass


class PDFails(TropfanError):
    pass


class MissingWitness(TropfanError):
    pass


class HypothesisFails(TropfanError):
    pass


class ExchangeFails(TropfanError):
    pass


class EmptyBases(TropfanError):
    pass


class OverlappingSets(TropfanError):
    pass


class LoopBasepoint(TropfanError):
    pass


class HasLoop(TropfanError):
    pass


class ClassViolation(TropfanError):
    pass


class InvalidFunction(TropfanError):
    pass


class PropertyFails(TropfanError):
    """A guaranteed property failed on a constructed fan: either a bug or a
    counterexample to a theorem."""


class InvalidInput(TropfanError):
    """Malformed file or CLI input."""
