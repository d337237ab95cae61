"""Exception hierarchy shared by every treepack module.

Everything derives from :class:`TreePackError` so callers can catch the
package's failures with a single except clause while the CLI maps parse
problems to exit code 2 and verification problems to exit code 1.
"""


class TreePackError(Exception):
    """Base class for all treepack errors."""


class NotATreeError(TreePackError):
    """A self-map whose iterated image does not collapse to a single vertex."""


class OutOfRangeError(TreePackError):
    """A vertex or map value lies outside the expected range."""


class SingletonTreeError(TreePackError):
    """An operation that needs an edge was applied to a one-vertex tree."""


class BadSizeError(TreePackError):
    """A requested size is empty or exceeds the ambient vertex count."""


class NotAPermutationError(TreePackError):
    """A label sequence that should be a bijection of Z_n is not."""


class DimensionMismatchError(TreePackError):
    """Two objects that must share the same ambient n do not."""


class NotCompleteError(TreePackError):
    """An arc set that should orient the looped complete graph does not."""


class BoundExceededError(TreePackError):
    """An exhaustive operation was asked to run past its feasibility bound."""


class InvalidFamilyError(TreePackError):
    """A tree sequence violating the one-tree-per-size canonical layout."""


class NotAutomorphismError(TreePackError):
    """A permutation that should commute with a tree's map does not."""


class ParseError(TreePackError):
    """Malformed input document (bad JSON, missing or mistyped fields)."""


class ValidationError(TreePackError):
    """Structurally well-formed input whose content violates an invariant."""
