"""Kernel backend selection.

Imports the compiled extension when present and falls back to the NumPy
implementations otherwise. ``BACKEND`` reports which one is active.
"""

try:
    from ._core import (  # type: ignore[attr-defined]
        BACKEND,
        directed_hausdorff,
        integrate_orbit,
        solve_pentadiagonal,
    )
except ImportError:  # pragma: no cover - exercised via ELASTICA_FORCE_FALLBACK
    from ._fallback import (
        BACKEND,
        directed_hausdorff,
        integrate_orbit,
        solve_pentadiagonal,
    )

import os

if os.environ.get("ELASTICA_FORCE_FALLBACK"):
    from ._fallback import (  # noqa: F811
        BACKEND,
        directed_hausdorff,
        integrate_orbit,
        solve_pentadiagonal,
    )

__all__ = [
    "BACKEND",
    "directed_hausdorff",
    "integrate_orbit",
    "solve_pentadiagonal",
]
