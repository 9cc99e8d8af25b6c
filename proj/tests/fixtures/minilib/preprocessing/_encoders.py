class OneHotEncoder:
    """Encode categorical integer features as a one-hot numeric array.

    Parameters
    ----------
    categories : 'auto' or a list of lists/arrays of values, \
      default='auto'.
        Categories (unique values) per feature.

    sparse : boolean, default=True
        Will return sparse matrix if set True else will return an array.

    handle_unknown : 'error' or 'ignore', default='error'.
        Whether to raise an error or ignore if an unknown categorical feature
        is present during transform.
    """

    def __init__(self, categories=None, sparse=True, handle_unknown='error'):
        self.categories = categories
        self.sparse = sparse
        self.handle_unknown = handle_unknown

    def transform(self, X):
        """Transform X using one-hot encoding.

        Parameters
        ----------
        X : array-like, shape [n_samples, n_features]
            The data to encode.

        Returns
        -------
        X_out : sparse matrix if sparse=True else a 2-d array
            Transformed input.
        """
        return X
