"""Exception hierarchy.

Every failure mode that the library reports honestly (instead of guessing)
has its own class, so callers and the CLI can map them to diagnostics.
"""


class AGError(Exception):
    """Base class for all errors raised by agslice."""


class UnsupportedForm(AGError, ValueError):
    pass


class DegenerateInput(AGError, ValueError):
    pass


class UnboundedPolytope(AGError):
    pass


class RankTooLarge(AGError):
    pass


class NoGenericPoint(AGError):
    pass


class SegmentEscapes(AGError):
    pass


class InvolutionMismatch(AGError):
    pass


class ClusterAmbiguity(AGError):
    pass


class ThresholdAmbiguity(AGError):
    pass


class SingularInput(AGError, ValueError):
    pass


class NotInGroup(AGError, ValueError):
    pass


class NotUnipotent(AGError, ValueError):
    pass


class NotSemisimple(AGError, ValueError):
    pass


class NotNilpotent(AGError, ValueError):
    pass


class NotADerivation(AGError, ValueError):
    pass


class InconsistentSystem(AGError):
    pass


class NoTripleFound(AGError):
    pass


class NotGenericFace(AGError, ValueError):
    pass


class CertificateFailure(AGError):
    """A mandatory identity check failed; ``item`` names it."""

    def __init__(self, item, error=None, detail=""):
        self.item = item
        self.error = error
        msg = f"certificate {item!r} failed"
        if error is not None:
            msg += f" (error {error:.3e})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SearchFailed(AGError):
    pass


class OutOfDisk(AGError, ValueError):
    pass
