"""Python bindings for the contagion-lab C++ core.

Structured results are returned as plain dictionaries with the same layout as
the ``results`` block of the CLI's JSON reports.
"""

import json

from . import _core
from ._core import (
    SCHEMA_VERSION,
    ClabError,
    critical_distance,
    effective_decay,
    load_panel_csv,
    panel_csv,
    reconstruct,
    synth_panel,
)

__all__ = [
    "SCHEMA_VERSION",
    "ClabError",
    "analyze",
    "bootstrap_lambda2",
    "cascade",
    "chow_test",
    "critical_distance",
    "effective_decay",
    "fit_distributions",
    "laplacian_spectrum",
    "load_panel_csv",
    "panel_csv",
    "permutation_test",
    "reconstruct",
    "sweep",
    "synth_panel",
]


def _decoded(fn):
    def wrapper(*args, **kwargs):
        return json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


analyze = _decoded(_core.analyze)
sweep = _decoded(_core.sweep)
bootstrap_lambda2 = _decoded(_core.bootstrap_lambda2)
permutation_test = _decoded(_core.permutation_test)
fit_distributions = _decoded(_core.fit_distributions)
chow_test = _decoded(_core.chow_test)
laplacian_spectrum = _decoded(_core.laplacian_spectrum)
cascade = _decoded(_core.cascade)
