"""adforge: a design-space workbench for weakly-supervised tabular anomaly
detection — benchmark any combination of pipeline design choices, then train a
meta-predictor that picks pipelines for unseen datasets zero-shot."""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
