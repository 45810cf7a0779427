from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolveResult:
    """Outcome of one solver stage.

    ``v`` is the transformed unknown (when the stage works in that variable),
    ``u`` the original one. ``history`` holds one dict per iteration with at
    least ``iteration``, ``residual`` and ``energy``; ``extra`` carries
    stage-specific diagnostics (path profiles, sup-norms, ...).
    """

    kind: str
    v: np.ndarray = None
    u: np.ndarray = None
    iterations: int = 0
    residual_norm: float = float("nan")
    energy: float = float("nan")
    min_v: float = float("nan")
    converged: bool = False
    lower_bound_ok: bool = None
    bracket_ok: bool = None
    message: str = ""
    history: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def summary(self):
        """JSON-ready scalar summary (fields are written separately)."""

        def _clean(x):
            if isinstance(x, (np.floating, float)):
                return float(x) if np.isfinite(x) else None
            if isinstance(x, np.integer):
                return int(x)
            if isinstance(x, np.bool_):
                return bool(x)
            return x

        out = {
            "kind": self.kind,
            "iterations": int(self.iterations),
            "residual_norm": _clean(self.residual_norm),
            "energy": _clean(self.energy),
            "min_v": _clean(self.min_v),
            "converged": bool(self.converged),
            "lower_bound_ok": self.lower_bound_ok,
            "bracket_ok": self.bracket_ok,
            "message": self.message,
        }
        for key, val in self.extra.items():
            if np.isscalar(val) or val is None:
                out[key] = _clean(val)
        if self.u is not None:
            out["sup_u"] = float(np.max(np.abs(self.u)))
        return out
