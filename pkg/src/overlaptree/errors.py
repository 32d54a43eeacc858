"""Exception types raised across the toolkit."""


class OverlapTreeError(Exception):
    """Base class for all toolkit errors."""


class MissingValue(OverlapTreeError):
    """A feature cell is empty, unparseable, or non-finite."""

    def __init__(self, row: int, col: str, detail: str = ""):
        self.row = row
        self.col = col
        msg = f"missing or invalid value at row {row}, column {col!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NonBinaryTreatment(OverlapTreeError):
    """A treatment cell is not 0 or 1."""

    def __init__(self, row: int, value: str):
        self.row = row
        self.value = value
        super().__init__(f"treatment value {value!r} at row {row} is not 0 or 1")


class UnknownColumn(OverlapTreeError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} not found in header")


class EmptyDataset(OverlapTreeError):
    pass


class InvalidFoldCount(OverlapTreeError):
    pass


class EmptyNode(OverlapTreeError):
    """Impurity requested for a node with zero samples."""


class DegenerateCohort(OverlapTreeError):
    """The dataset contains a single treatment group.

    The whole cohort violates positivity; there is nothing for a
    discriminating tree to learn, so this is reported instead of fit.
    """


class DimensionMismatch(OverlapTreeError):
    pass


class UndefinedAUC(OverlapTreeError):
    """AUC requested on a single-class label vector."""


class InvalidParameters(OverlapTreeError):
    """Numeric parameters outside their declared bounds."""


class UnknownLeaf(OverlapTreeError):
    def __init__(self, leaf_id: int):
        self.leaf_id = leaf_id
        super().__init__(f"no leaf with id {leaf_id}")


class DegenerateBootstrap(OverlapTreeError):
    """Bootstrap resampling kept producing single-group samples."""
