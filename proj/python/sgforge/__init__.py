"""Python access to the sgforge storyboard toolchain.

Each job returns ``(exit_code, records, message)`` where ``records`` are the
JSON-lines records the ``sgforge`` command prints with ``--format json``.
Exit codes: 0 ok, 1 warnings, 2 errors, 3 usage.
"""

import json

from . import _sgforge
from ._sgforge import Error, normalize_condition, satisfiable

__all__ = ["Error", "validate", "paths", "simulate", "convert", "normalize_condition", "satisfiable"]


def _records(payload):
    return [json.loads(line) for line in payload.splitlines() if line]


def validate(document, max_paths=10000, max_cycle_unrolls=1):
    code, payload, message = _sgforge.validate(document, max_paths, max_cycle_unrolls)
    return code, _records(payload), message


def paths(document, max_paths=10000, max_cycle_unrolls=1):
    code, payload, message = _sgforge.paths(document, max_paths, max_cycle_unrolls)
    return code, _records(payload), message


def simulate(document, cohort, seed=None, max_steps=None, threads=1):
    code, payload, message = _sgforge.simulate(document, cohort, seed, max_steps, threads)
    return code, _records(payload), message


def convert(document, to, from_=None):
    """Returns ``(exit_code, document_or_None, message)``."""
    code, payload, message = _sgforge.convert(document, to, from_)
    return code, (payload if code != 2 else None), message
