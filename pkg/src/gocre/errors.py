"""Exception types raised by the package."""


class DegenerateComponentError(ValueError):
    """A component score has zero weighted norm, so deflation is undefined."""


class DataFormatError(ValueError):
    """A CSV file is structurally malformed (bad header, ragged rows)."""


class DataParseError(ValueError):
    """A CSV cell could not be parsed as a number."""

    def __init__(self, row, column, cell):
        self.row = row
        self.column = column
        self.cell = cell
        super().__init__(
            f"data row {row}, column '{column}': could not parse {cell!r} as a number"
        )


class UnsupportedVersionError(ValueError):
    """A model file declares a format version this release cannot read."""
