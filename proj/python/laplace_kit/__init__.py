"""Laplace-approximation certificates: python bindings.

Thin wrapper over the compiled extension; certificate- and trace-returning
calls give back plain dicts (parsed from the core's canonical JSON).
"""

import json as _json

try:
    from . import _laplace_kit as _core  # installed wheel layout
except ImportError:  # build-tree layout: extension on PYTHONPATH
    import _laplace_kit as _core

model_registry = _core.model_registry
find_map = _core.find_map
effective_dimension_radius = _core.effective_dimension_radius
inverse_normal_cdf = _core.inverse_normal_cdf
set_thread_count = _core.set_thread_count


def certify(model, params=None, seed=1, x=4.0, nu=2.0 / 3.0, n_dirs=64, n_line=32):
    """Compute a certificate for a built-in model; returns a dict."""
    return _json.loads(
        _core.certify(model, params or {}, seed, x, nu, n_dirs, n_line)
    )


def optimize(model, params=None, seed=1, M=2048, a=1.5, steps=40, qmc=True):
    """Run the gradient-free sampling optimizer; returns the trace as a dict."""
    return _json.loads(_core.optimize(model, params or {}, seed, M, a, steps, qmc))


__all__ = [
    "model_registry",
    "find_map",
    "certify",
    "optimize",
    "effective_dimension_radius",
    "inverse_normal_cdf",
    "set_thread_count",
]
