"""innerlab: a numerical laboratory for inner functions of finite entropy."""

__version__ = "0.1.0"
