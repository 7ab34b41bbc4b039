import logging
import os
import sys
from typing import Iterable

from gelfkit.error import InputError


def setup_logging(name: str, level: int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        stream = logging.StreamHandler(sys.stderr)
        stream.setFormatter(logging.Formatter(logging.BASIC_FORMAT))
        logger.addHandler(stream)
    logger.setLevel(level=level)
    return logger


def env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None or value.strip() == "":
        return default
    try:
        parsed = int(value)
    except ValueError as err:
        raise InputError(f"{name} must be an integer, got {value!r}") from err
    if parsed < 0:
        raise InputError(f"{name} must be non negative, got {parsed}")
    return parsed


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, increasing."""
    out = []
    index = 0
    while mask:
        if mask & 1:
            out.append(index)
        mask >>= 1
        index += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask
