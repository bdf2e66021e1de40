"""Exception types shared across the package."""


class HypothesisError(ValueError):
    """A check's hypothesis does not hold for the given input.

    Distinct from malformed input: the data is valid, but the statement being
    checked does not apply to it (non-commuting pair, ``FTE != TE``, ...).
    """
