"""discoursekit: compare keyword discourse across partitioned OCR newspaper corpora."""

__version__ = "0.1.0"
