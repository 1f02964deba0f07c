"""Deterministic text formatting shared by the CSV writers."""
from __future__ import annotations


def float_repr(value) -> str:
    """Shortest decimal form that round-trips to the exact same double.

    Python's ``repr`` of a float is already shortest-round-trip; the cast
    guards against numpy scalars whose ``repr`` carries a type wrapper.
    """
    return repr(float(value))
