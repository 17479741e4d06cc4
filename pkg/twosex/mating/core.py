"""
Superadditive mating functions xi: N^q -> N^p.

Every catalog entry works on single vectors or on batches of shape (n, q),
maps zero to zero, and offers a "natural" extension to real arguments
(min, linear or indicator forms). The floor extension x -> xi(floor(x)) is
always available and is the only one for plug-in functions.
"""

from __future__ import annotations
from abc import ABC, abstractmethod
from importlib import import_module
from typing import Callable
import numpy as np
from ..model.core import COUNT_DTYPE, U64_MAX
from ..model.exceptions import DimensionMismatch, PopulationOverflow
from .exceptions import UnknownMatingKind, UnverifiedMatingFunction


class MatingFunction(ABC):
    kind: str = "abstract"
    verified: bool = True
    has_natural_extension: bool = True

    def __init__(self, p: int, q: int):
        if p < 1 or q < 1:
            raise ValueError(f"Mating dimensions must be positive, got p={p}, q={q}")
        self.p = p
        self.q = q

    def _check(self, w: np.ndarray) -> np.ndarray:
        if w.shape[-1] != self.q:
            raise DimensionMismatch(
                f"{self.kind} expects vectors of length {self.q}, got {w.shape[-1]}"
            )
        return np.atleast_2d(w)

    def apply(self, w) -> np.ndarray:
        """xi(w) for a count vector (or a batch of count vectors)."""
        raw = np.asarray(w)
        batch = self._check(raw)
        if np.any(batch < 0):
            raise ValueError("Individual counts must be nonnegative")
        image = np.asarray(self._apply_counts(batch.astype(COUNT_DTYPE)), dtype=COUNT_DTYPE)
        return image if raw.ndim > 1 else image[0]

    def apply_real(self, w, extension: str | None = None) -> np.ndarray:
        """Superadditive extension of xi to nonnegative reals.

        `extension` is "natural" (the closed form of a catalog entry), or
        "floor" (xi(floor(w))). None picks natural when it exists.
        """
        raw = np.asarray(w, dtype=float)
        batch = self._check(raw)
        if not np.all(np.isfinite(batch)) or np.any(batch < 0):
            raise ValueError("Real arguments must be finite and nonnegative")
        if extension is None:
            extension = "natural" if self.has_natural_extension else "floor"
        if extension == "natural" and self.has_natural_extension:
            image = np.asarray(self._apply_natural(batch), dtype=float)
        elif extension in ("natural", "floor"):
            image = self._apply_floor(np.floor(batch))
        else:
            raise ValueError(f"Unknown extension {extension!r}")
        return image if raw.ndim > 1 else image[0]

    @abstractmethod
    def _apply_counts(self, w: np.ndarray) -> np.ndarray: ...

    def _apply_natural(self, w: np.ndarray) -> np.ndarray:
        return self._apply_floor(np.floor(w))

    def _apply_floor(self, w: np.ndarray) -> np.ndarray:
        # w holds integral floats
        return self._apply_counts(w.astype(COUNT_DTYPE)).astype(float)

    def describe(self) -> dict:
        return {"kind": self.kind, "p": self.p, "q": self.q}

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.describe().items() if k != "kind")
        return f"{type(self).__name__}({params})"


class Identity(MatingFunction):
    """Asexual reproduction: every individual is its own mating unit."""

    kind = "identity"

    def __init__(self, p: int):
        super().__init__(p, p)

    def _apply_counts(self, w):
        return w

    def _apply_natural(self, w):
        return w


class PerfectFidelity(MatingFunction):
    """Females of type i pair with males of type i: xi(x, y) = min(x, y)."""

    kind = "perfect_fidelity"

    def __init__(self, p: int = 1):
        super().__init__(p, 2 * p)

    def _apply_counts(self, w):
        return np.minimum(w[:, : self.p], w[:, self.p :])

    def _apply_natural(self, w):
        return np.minimum(w[:, : self.p], w[:, self.p :])


class Polygamous(MatingFunction):
    """Each male of type i mates with up to d females: xi(x, y) = min(x, d*y)."""

    kind = "polygamous"

    def __init__(self, d: int, p: int = 1):
        if int(d) != d or d < 1:
            raise ValueError(f"Polygamy degree must be a positive integer, got {d}")
        super().__init__(p, 2 * p)
        self.d = int(d)

    def _apply_counts(self, w):
        males = w[:, self.p :]
        # d*y past the 64-bit range exceeds every female count
        limit = U64_MAX // COUNT_DTYPE(self.d)
        capacity = np.where(males > limit, U64_MAX, np.minimum(males, limit) * COUNT_DTYPE(self.d))
        return np.minimum(w[:, : self.p], capacity)

    def _apply_natural(self, w):
        return np.minimum(w[:, : self.p], self.d * w[:, self.p :])

    def describe(self) -> dict:
        return {**super().describe(), "d": self.d}


class CompletelyPromiscuous(MatingFunction):
    """Every female mates provided at least one male of each type is present."""

    kind = "completely_promiscuous"

    def __init__(self, p: int, n_m: int):
        super().__init__(p, p + n_m)
        self.n_m = n_m

    def _males_present(self, w) -> np.ndarray:
        return np.all(w[:, self.p :] > 0, axis=1, keepdims=True)

    def _apply_counts(self, w):
        return w[:, : self.p] * self._males_present(w).astype(COUNT_DTYPE)

    def _apply_natural(self, w):
        return w[:, : self.p] * self._males_present(w)

    def describe(self) -> dict:
        return {**super().describe(), "n_m": self.n_m}


class PromiscuousSingle(CompletelyPromiscuous):
    """Single-type promiscuous mating: xi(x, y) = x * 1{y > 0}."""

    kind = "promiscuous_single"

    def __init__(self):
        super().__init__(1, 1)

    def describe(self) -> dict:
        return {"kind": self.kind, "p": 1, "q": 2}


class MinOfLinear(MatingFunction):
    """xi(w) = floor(min_k w A_k) for nonnegative q x p matrices A_k."""

    kind = "min_of_linear"

    def __init__(self, matrices):
        arrays = [np.asarray(matrix, dtype=float) for matrix in matrices]
        if not arrays:
            raise ValueError("MinOfLinear needs at least one matrix")
        shape = arrays[0].shape
        if any(a.ndim != 2 or a.shape != shape for a in arrays):
            raise DimensionMismatch("MinOfLinear matrices must share one q x p shape")
        if any(np.any(a < 0) or not np.all(np.isfinite(a)) for a in arrays):
            raise ValueError("MinOfLinear matrices must be finite and nonnegative")
        super().__init__(shape[1], shape[0])
        self.matrices = np.stack(arrays)
        self.matrices.setflags(write=False)

    def _apply_natural(self, w):
        return np.min(np.einsum("nq,kqp->knp", w, self.matrices), axis=0)

    def _apply_counts(self, w):
        return np.floor(self._apply_natural(w.astype(float)) + 1e-9).astype(COUNT_DTYPE)

    def describe(self) -> dict:
        return {**super().describe(), "matrices": self.matrices.tolist()}


class Capped(MatingFunction):
    """Truncation min{xi(x), alpha*|x|*1_p}; increases to xi as alpha grows."""

    kind = "capped"

    def __init__(self, inner: MatingFunction, alpha: float):
        if alpha < 0:
            raise ValueError("Cap alpha must be nonnegative")
        super().__init__(inner.p, inner.q)
        self.inner = inner
        self.alpha = alpha
        self.verified = inner.verified
        self.has_natural_extension = inner.has_natural_extension

    def _apply_counts(self, w):
        cap = np.floor(self.alpha * w.sum(axis=1, dtype=float) + 1e-9).astype(COUNT_DTYPE)
        return np.minimum(self.inner._apply_counts(w), cap[:, None])

    def _apply_natural(self, w):
        return np.minimum(self.inner._apply_natural(w), self.alpha * w.sum(axis=1)[:, None])

    def describe(self) -> dict:
        return {**super().describe(), "alpha": self.alpha, "inner": self.inner.describe()}


def CappedIdentity(p: int, alpha: float) -> Capped:
    return Capped(Identity(p), alpha)


class CustomMating(MatingFunction):
    """User supplied mating function; unverified until `verify()` succeeds."""

    kind = "custom"
    has_natural_extension = False

    def __init__(self, func: Callable[[np.ndarray], any], p: int, q: int, name: str | None = None):
        super().__init__(p, q)
        self.func = func
        self.name = name or getattr(func, "__name__", "custom")
        self.verified = False

    def apply_real(self, w, extension: str | None = None) -> np.ndarray:
        if not self.verified:
            raise UnverifiedMatingFunction(f"Mating function {self.name} must pass check_superadditivity before M is evaluated")
        return super().apply_real(w, extension)

    def _apply_floor(self, w):
        image = np.vstack([np.asarray(self.func(row.copy()), dtype=float).reshape(self.p) for row in w])
        if np.any(image < 0) or np.any(image != np.floor(image)):
            raise ValueError(f"Mating function {self.name} must return nonnegative integers")
        return image

    def _apply_counts(self, w):
        image = self._apply_floor(w.astype(float))
        if np.any(image >= float(U64_MAX)):
            raise PopulationOverflow(f"Mating function {self.name} left the 64-bit range")
        return image.astype(COUNT_DTYPE)

    def verify(self, samples: int = 10_000, magnitude_cap: int = 50, seed: int = 0):
        from .checks import check_superadditivity

        report = check_superadditivity(self, samples, magnitude_cap, seed)
        self.verified = report.passed
        return report

    def describe(self) -> dict:
        return {**super().describe(), "name": self.name}


def load_plugin(target: str) -> Callable:
    """Resolves "package.module:function" to a callable."""
    module_name, _, attribute = target.partition(":")
    if not attribute:
        raise ValueError(f"Plug-in target {target!r} must look like module:function")
    return getattr(import_module(module_name), attribute)


def build_mating(kind: str, p: int, q: int, params: dict | None = None) -> MatingFunction:
    """Builds a catalog mating function from its config name and parameter block."""
    params = dict(params or {})
    match kind:
        case "identity":
            return Identity(p)
        case "perfect_fidelity":
            return PerfectFidelity(p)
        case "polygamous":
            return Polygamous(params.get("d", 1), p)
        case "promiscuous_single":
            return PromiscuousSingle()
        case "completely_promiscuous":
            return CompletelyPromiscuous(p, params.get("n_m", q - p))
        case "min_of_linear":
            return MinOfLinear(params["matrices"])
        case "capped_identity":
            return CappedIdentity(p, params["alpha"])
        case "capped":
            inner = params.get("inner", {"kind": "identity"})
            inner_fn = build_mating(inner["kind"], p, q, inner.get("params"))
            return Capped(inner_fn, params["alpha"])
        case "custom":
            return CustomMating(load_plugin(params["plugin"]), p, q, name=params["plugin"])
    raise UnknownMatingKind(f"Unknown mating kind {kind!r}")


CATALOG_KINDS = (
    "identity",
    "perfect_fidelity",
    "polygamous",
    "promiscuous_single",
    "completely_promiscuous",
    "min_of_linear",
    "capped_identity",
    "capped",
    "custom",
)
