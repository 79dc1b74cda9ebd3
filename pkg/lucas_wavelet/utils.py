import logging
import math
import time
from contextlib import contextmanager


logger = logging.getLogger(__name__)
QuadratureWarning = type("QuadratureWarning", (Warning,), dict())

# 17 significant digits round-trips a double, so residues like 8.0888e-17
# survive printing
SIGNIFICANT_DIGITS = 17


def format_real(value):
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return "{:.{}g}".format(value, SIGNIFICANT_DIGITS)


def format_complex_cell(value):
    """Render a complex number as a single ``a+bi`` cell

    :param value: A complex or real number
    :return: str such as ``1.4142135623730951+0i``
    """
    value = complex(value)
    return "{:.{digits}g}{:+.{digits}g}i".format(
        value.real, value.imag, digits=SIGNIFICANT_DIGITS)


def parse_int_list(value):
    """Parse ``"3,4,5"``, ``"3..6"`` or a mix such as ``"0,2..3"`` into a
    list of integers, preserving order and dropping duplicates

    :param value: The string from the command line or config file
    :return: list of int
    :raises ValueError: if an element is not an integer or a range is empty
    """
    result = []
    for element in filter(None, [x.strip() for x in value.split(",")]):
        if ".." in element:
            start, stop = element.split("..", 1)
            start, stop = int(start), int(stop)
            if stop < start:
                raise ValueError("Range {} is empty".format(element))
            values = range(start, stop + 1)
        else:
            values = [int(element)]
        for x in values:
            if x not in result:
                result.append(x)
    return result


@contextmanager
def stopwatch():
    """Yield a dict whose ``ms`` key holds the elapsed wall time once the
    block exits"""
    timing = {"ms": None}
    start = time.perf_counter()
    try:
        yield timing
    finally:
        timing["ms"] = (time.perf_counter() - start) * 1000.0
