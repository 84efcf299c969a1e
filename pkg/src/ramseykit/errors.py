"""Exception types raised across ramseykit."""


class RamseyKitError(Exception):
    pass


class InvalidObject(RamseyKitError, ValueError):
    """A value does not satisfy the invariants of the object it claims to be."""


class UndefinedOperation(RamseyKitError, ValueError):
    pass


class SizeMismatch(RamseyKitError, ValueError):
    pass


class NotRigid(InvalidObject):
    pass


class EmptyInput(RamseyKitError, ValueError):
    pass


class PreconditionViolated(RamseyKitError, ValueError):
    pass


class NotAnchored(RamseyKitError, ValueError):
    pass


class MissingTruncation(RamseyKitError, ValueError):
    pass


class MissingNorm(RamseyKitError, ValueError):
    pass


class CarrierNotClosed(RamseyKitError, ValueError):
    """An operation on carrier elements produced an object outside the carrier."""


class EmptyFactorList(RamseyKitError, ValueError):
    pass


class AlphaOutOfRange(RamseyKitError, ValueError):
    pass


class UnknownName(RamseyKitError, KeyError):
    pass


class CutoffTooSmall(RamseyKitError, ValueError):
    pass


class NotApplicable(RamseyKitError, ValueError):
    pass


class UndefinedAction(RamseyKitError, ValueError):
    pass


class XNotInTruncatedS(RamseyKitError, ValueError):
    pass


class OracleFailure(RamseyKitError, RuntimeError):
    pass


class ConstructionTreeMissing(RamseyKitError, ValueError):
    pass


class NormMissing(MissingNorm):
    pass


class NotAWalk(InvalidObject):
    pass


class MTooSmall(RamseyKitError, ValueError):
    pass
