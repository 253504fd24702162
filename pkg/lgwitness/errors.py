""" Exceptions raised across lgwitness.  Every error carries the exit code manage.py terminates with. """


class WitnessError(Exception):
    """ Base class for all lgwitness errors. """
    exit_code = 1


class ConfigError(WitnessError):
    """ Invalid or incomplete run configuration. """
    exit_code = 2


class IngestionError(WitnessError):
    """ A data file is malformed or lacks required entries. """
    exit_code = 3


class MissingPairError(IngestionError):
    """ A visibility table or dataset does not cover every mode pair. """

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(str(m) for m in self.missing[:10])
        if len(self.missing) > 10:
            shown += ", ... ({} in total)".format(len(self.missing))
        super(MissingPairError, self).__init__("Missing entries: {}".format(shown))


class CapacityError(WitnessError):
    """ The requested dimension exceeds the full-matrix cap. """
    exit_code = 4


class IntegrityError(WitnessError):
    """ A result violates a hard physical limit (e.g. W above 3D(D-1)/2). """
    exit_code = 5


class DomainError(WitnessError, ValueError):
    """ An argument lies outside the domain of the operation. """
    exit_code = 6


class InvalidModeSetError(DomainError):
    pass


class InvalidStateError(DomainError):
    pass


class QuadratureError(DomainError):
    """ Quadrature too coarse: a self-overlap strays from 1 beyond tolerance. """
