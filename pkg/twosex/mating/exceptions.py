from ..model.exceptions import TwosexError


class MatingError(TwosexError):
    pass


class UnverifiedMatingFunction(MatingError):
    """A plug-in mating function was used before passing the superadditivity check."""

    pass


class UnknownMatingKind(MatingError, KeyError):
    pass
