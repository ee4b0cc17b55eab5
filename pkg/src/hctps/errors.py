"""Exception hierarchy shared across the workbench."""


class HctpsError(Exception):
    """Base class for all workbench errors."""


class UnknownFunction(HctpsError, KeyError):
    pass


class NonFiniteInput(HctpsError, ValueError):
    pass


class BudgetExhausted(HctpsError):
    """The evaluation cap was reached; the failing evaluation was not performed."""


class WrongDimension(HctpsError, ValueError):
    pass


class DegenerateBox(HctpsError, ValueError):
    """Scaling underflowed a box width to zero in double precision."""


class LengthMismatch(HctpsError, ValueError):
    pass


class EmptyPopulation(HctpsError, ValueError):
    pass


class MissingFitness(HctpsError, ValueError):
    pass


class InsufficientOffspring(HctpsError, ValueError):
    pass


class EmptySample(HctpsError, ValueError):
    pass


class NoPhases(HctpsError, ValueError):
    pass


class MismatchedExperiment(HctpsError, ValueError):
    pass


class CorruptRecord(HctpsError, ValueError):
    """Checksum or schema-version mismatch while loading an experiment file."""


class InvalidConfig(HctpsError, ValueError):
    pass


class UnknownExperiment(HctpsError, KeyError):
    pass


class AlreadyRan(HctpsError, ValueError):
    pass


class GlobalPending(HctpsError, ValueError):
    pass


class JobInFlight(HctpsError, ValueError):
    """An experiment already has an unfinished phase job."""


class RecordFrozen(HctpsError, ValueError):
    """The decision-maker declared satisfaction; no further phases accepted."""
