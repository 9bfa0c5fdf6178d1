class RenderError(Exception):
    """Base for everything this package raises on purpose."""


class ManifestError(RenderError):
    """Missing manifest, missing file, checksum or config-hash mismatch."""


class SchemaError(RenderError):
    """A CSV does not carry the columns the figure needs."""

    def __init__(self, path, column):
        self.path = str(path)
        self.column = column
        super().__init__("%s is missing column %r" % (self.path, column))
