"""slicelab: slice rank of cubics and graded pieces of linear ideals, computed exactly."""

__version__ = "1.0.0"
