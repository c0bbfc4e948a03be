"""Python bindings for secrit: metric-based security criticality of Java methods."""

from ._core import (
    DEFAULT_TIE_RULE,
    PLACEHOLDER,
    SecritError,
    __version__,
    analyze,
    bin_values,
    build_prompt,
    method_metrics,
    report,
    system_prompt,
)

__all__ = [
    "DEFAULT_TIE_RULE",
    "PLACEHOLDER",
    "SecritError",
    "__version__",
    "analyze",
    "bin_values",
    "build_prompt",
    "method_metrics",
    "report",
    "system_prompt",
]
