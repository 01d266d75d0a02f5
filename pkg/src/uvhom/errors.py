"""Exception types shared across the package.

The CLI maps these onto exit codes: ``InputError`` -> 2,
``InvariantViolation`` -> 3. Everything else propagates as a crash.
"""


class InputError(ValueError):
    """Malformed or out-of-contract user input."""


class NotComputedError(InputError):
    """A homology degree above the construction cap was requested."""


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (a bug, never user error)."""


class NotSimplicialError(InputError):
    """A vertex map sends some simplex outside the target complex."""

    def __init__(self, simplex, image, where="total"):
        self.simplex = tuple(simplex)
        self.image = tuple(image)
        self.where = where
        super().__init__(
            f"image {self.image} of {where} simplex {self.simplex} is not a target simplex"
        )


class LadderTooSparse(InputError):
    """No ladder rung has the property a construction needs."""
