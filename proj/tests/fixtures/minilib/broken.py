class Broken:
    """An operator with a malformed docstring.

    Parameters
    ----------
    alpha float default 1.0
        Missing the colon.

    beta : int, default=3
        Fine.
    """

    def __init__(self, alpha=1.0, beta=3):
        self.alpha = alpha
        self.beta = beta
