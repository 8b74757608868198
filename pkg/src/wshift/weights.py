"""Finite descriptions of positive weight sequences.

A :class:`WeightSpec` is a finite prefix of explicit weights followed by a
:class:`TailRule` on each side.  Indexing convention:

* ``n >= 0``: ``prefix_pos[n]`` while in range, then the positive tail at the
  offset ``t = n - len(prefix_pos)`` (so ``t = 0, 1, 2, ...``).
* ``n < 0`` (bilateral only): ``prefix_neg[-n - 1]`` lists ``w_{-1}, w_{-2}, ...``;
  past it the negative tail is evaluated at the *signed* offset
  ``t = n + len(prefix_neg)`` (``t = -1, -2, ...``).

Expression tails see the signed offset directly, periodic tails use
``values[t mod p]`` (so an unprefixed periodic bilateral spec is periodic on
all of Z) and builtins see the mirrored offset ``-t - 1`` on the negative side.

Every product of weights is kept in log domain: ``log_beta(n) = L(n)`` with
``beta_n = exp(L(n))`` and ``L(0) = 0``.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    BudgetError,
    NonPositiveWeightError,
    SpecError,
    SpecParseError,
    UnboundedWeightError,
)
from .expr import Expression, parse_expression

UNILATERAL = "unilateral"
BILATERAL = "bilateral"

VALIDATION_PROBE = 64
DEFAULT_WINDOW = 4096
SUP_CAP = 1e6
MAX_INDEX_BUDGET = 1 << 22


class TailRadii(NamedTuple):
    """Closed-form asymptotic radii of a tail, ordered ``r1 <= r2 <= r3 <= r``."""

    r1: float
    r2: float
    r3: float
    r: float


# --- builtins ----------------------------------------------------------------


def _bergman_weight(t: int) -> float:
    return math.sqrt((t + 1) / (t + 2))


def _bergman_log_weights(lo: int, hi: int) -> np.ndarray:
    t = np.arange(lo, hi, dtype=float)
    return 0.5 * (np.log1p(t) - np.log(t + 2.0))


def williams_log_beta(s: int) -> int:
    """``log beta_s`` for the factorial-run sequence ``beta_{n!+k} = e^k``.

    ``s = n! + k`` with ``0 <= k < (n+1)! - n!``; ``beta_0 = 1``.
    """
    if s <= 0:
        return 0
    return s - int(_FACT_ARRAY[np.searchsorted(_FACT_ARRAY, s, side="right") - 1])


_FACT_ARRAY = np.array([math.factorial(k) for k in range(1, 21)], dtype=np.int64)


def _williams_log_beta_array(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=np.int64)
    base = _FACT_ARRAY[np.maximum(np.searchsorted(_FACT_ARRAY, s, side="right") - 1, 0)]
    return np.where(s <= 0, 0, s - base)


def _williams_log_weights(lo: int, hi: int) -> np.ndarray:
    t = np.arange(lo, hi, dtype=np.int64)
    return (_williams_log_beta_array(t + 1) - _williams_log_beta_array(t)).astype(float)


@dataclass(frozen=True)
class Builtin:
    name: str
    log_weights: Callable[[int, int], np.ndarray]  # offsets lo..hi-1, lo >= 0
    weight: Callable[[int], float]
    radii: TailRadii
    sup: float
    inf: float
    nondecreasing: bool
    description: str = ""


BUILTINS: dict[str, Builtin] = {
    "bergman": Builtin(
        name="bergman",
        log_weights=_bergman_log_weights,
        weight=_bergman_weight,
        radii=TailRadii(1.0, 1.0, 1.0, 1.0),
        sup=1.0,
        inf=math.sqrt(0.5),
        nondecreasing=True,
        description="w_t = sqrt((t+1)/(t+2)); beta_t^2 = 1/(t+1)",
    ),
    "williams_gap": Builtin(
        name="williams_gap",
        log_weights=_williams_log_weights,
        weight=lambda t: math.exp(williams_log_beta(t + 1) - williams_log_beta(t)),
        radii=TailRadii(0.0, 1.0, math.e, math.e),
        sup=math.e,
        inf=0.0,
        nondecreasing=False,
        description="beta_{n!+k} = e^k: runs of weight e broken by steep drops",
    ),
}


# --- tail rules --------------------------------------------------------------

CONSTANT = "constant"
PERIODIC = "periodic"
EXPR = "expr"
BUILTIN = "builtin"


@dataclass(frozen=True)
class TailRule:
    variant: str
    values: tuple[float, ...] = ()
    source: Optional[str] = None
    name: Optional[str] = None
    compiled: Optional[Expression] = field(default=None, compare=False, repr=False)

    @classmethod
    def constant(cls, c: float) -> "TailRule":
        return cls(CONSTANT, values=(float(c),))

    @classmethod
    def periodic(cls, values: Sequence[float]) -> "TailRule":
        values = tuple(float(v) for v in values)
        if not values:
            raise SpecError("periodic tail needs at least one value")
        return cls(PERIODIC, values=values)

    @classmethod
    def expr(cls, source: str) -> "TailRule":
        return cls(EXPR, source=source, compiled=parse_expression(source))

    @classmethod
    def builtin(cls, name: str) -> "TailRule":
        if name not in BUILTINS:
            raise SpecError(f"unknown builtin tail {name!r}; known: {sorted(BUILTINS)}")
        return cls(BUILTIN, name=name)

    @property
    def structured(self) -> bool:
        """True when sup/inf/radii follow from the rule without probing."""
        return self.variant != EXPR

    @property
    def builtin_entry(self) -> Builtin:
        return BUILTINS[self.name]

    def log_weights(self, lo: int, hi: int) -> np.ndarray:
        """Log weights at signed offsets ``lo..hi-1`` (all >= 0 or all < 0)."""
        count = hi - lo
        if count <= 0:
            return np.empty(0)
        if self.variant == CONSTANT:
            c = self.values[0]
            if not (c > 0 and math.isfinite(c)):
                raise NonPositiveWeightError(lo, c)
            return np.full(count, math.log(c))
        if self.variant == PERIODIC:
            vals = np.asarray(self.values)
            if np.any(~(vals > 0)) or not np.all(np.isfinite(vals)):
                raise NonPositiveWeightError(lo + int(np.argmin(vals > 0)), float(vals.min()))
            idx = np.mod(np.arange(lo, hi), len(vals))
            return np.log(vals)[idx]
        if self.variant == BUILTIN:
            entry = self.builtin_entry
            if lo >= 0:
                return entry.log_weights(lo, hi)
            # mirrored: offset t -> -t - 1, listed in increasing t
            return entry.log_weights(-hi, -lo)[::-1].copy()
        out = np.empty(count)
        for i, t in enumerate(range(lo, hi)):
            w = self.compiled(t)
            if not w > 0:
                raise NonPositiveWeightError(t, w)
            out[i] = math.log(w)
        return out

    def weight(self, t: int) -> float:
        if self.variant == EXPR:
            w = self.compiled(t)
            if not w > 0:
                raise NonPositiveWeightError(t, w)
            return w
        if self.variant == CONSTANT:
            return self.values[0]
        if self.variant == PERIODIC:
            return self.values[t % len(self.values)]
        entry = self.builtin_entry
        return entry.weight(t if t >= 0 else -t - 1)

    def to_dict(self) -> dict[str, Any]:
        if self.variant == CONSTANT:
            return {"constant": self.values[0]}
        if self.variant == PERIODIC:
            return {"periodic": list(self.values)}
        if self.variant == EXPR:
            return {"expr": self.source}
        return {"builtin": self.name}

    @classmethod
    def from_obj(cls, obj: Any, where: str) -> "TailRule":
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return cls.constant(obj)
        if not isinstance(obj, dict) or len(obj) != 1:
            raise SpecError(
                f"{where}: tail must be a number or an object with exactly one of "
                "'constant', 'periodic', 'expr', 'builtin'"
            )
        (key, value), = obj.items()
        if key == CONSTANT:
            return cls.constant(_as_float(value, where))
        if key == PERIODIC:
            if not isinstance(value, list):
                raise SpecError(f"{where}: periodic tail needs a list of values")
            return cls.periodic([_as_float(v, where) for v in value])
        if key == EXPR:
            if not isinstance(value, str):
                raise SpecError(f"{where}: expr tail needs a string")
            try:
                return cls.expr(value)
            except SpecParseError as exc:
                raise SpecParseError(
                    str(exc).split(": ", 1)[-1], exc.line, exc.column, field=f"{where}.expr"
                ) from None
        if key == BUILTIN:
            return cls.builtin(str(value))
        raise SpecError(f"{where}: unknown tail variant {key!r}")


def _as_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(f"{where}: expected a number, got {value!r}")
    return float(value)


# --- log beta cache -------------------------------------------------------------


class LogBeta:
    """Lazily extended cumulative sums of log weights, one array per side.

    ``_pos[n] = L(n)`` for ``n >= 0`` and ``_neg[j] = L(-j)``.  Arrays are
    only ever replaced wholesale under the lock, so a reader always sees a
    consistent prefix.
    """

    def __init__(self, spec: "WeightSpec"):
        self._spec = spec
        self._lock = threading.Lock()
        self._pos = np.zeros(1)
        self._neg = np.zeros(1)

    @property
    def max_cached(self) -> tuple[int, int]:
        return len(self._pos) - 1, len(self._neg) - 1

    def _ensure(self, side: str, m: int) -> np.ndarray:
        arr = self._pos if side == "pos" else self._neg
        if len(arr) > m:
            return arr
        if m > MAX_INDEX_BUDGET:
            raise BudgetError(f"index {m} exceeds the budget of {MAX_INDEX_BUDGET}")
        with self._lock:
            arr = self._pos if side == "pos" else self._neg
            if len(arr) > m:
                return arr
            have = len(arr)
            want = max(m + 1, 2 * have, 256)
            if side == "pos":
                lw = self._spec.log_weights(have - 1, want - 1)
                ext = arr[-1] + np.cumsum(lw)
            else:
                # L(-j-1) = L(-j) - log w_{-j-1}
                lw = self._spec.log_weights(-(want - 1), -(have - 1))[::-1]
                ext = arr[-1] - np.cumsum(lw)
            arr = np.concatenate([arr, ext])
            if side == "pos":
                self._pos = arr
            else:
                self._neg = arr
            return arr

    def __call__(self, n: int) -> float:
        if n >= 0:
            return float(self._ensure("pos", n)[n])
        return float(self._ensure("neg", -n)[-n])

    def positive(self, m: int) -> np.ndarray:
        """``L(0..m)`` as a read-only view."""
        return self._ensure("pos", m)[: m + 1]

    def negative(self, m: int) -> np.ndarray:
        """``L(0), L(-1), ..., L(-m)``."""
        return self._ensure("neg", m)[: m + 1]


# --- weight specs ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSpec:
    kind: str
    tail_pos: TailRule
    prefix_pos: tuple[float, ...] = ()
    prefix_neg: tuple[float, ...] = ()
    tail_neg: Optional[TailRule] = None
    name: Optional[str] = None
    _cache: LogBeta = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix_pos", tuple(float(w) for w in self.prefix_pos))
        object.__setattr__(self, "prefix_neg", tuple(float(w) for w in self.prefix_neg))
        if self.kind not in (UNILATERAL, BILATERAL):
            raise SpecError(f"kind must be 'unilateral' or 'bilateral', got {self.kind!r}")
        if self.kind == UNILATERAL and (self.prefix_neg or self.tail_neg is not None):
            raise SpecError("bilateral fields (prefix_neg, tail_neg) given on a unilateral spec")
        if self.kind == BILATERAL and self.tail_neg is None:
            raise SpecError("a bilateral spec needs tail_neg")
        for i, w in enumerate(self.prefix_pos):
            if not (w > 0 and math.isfinite(w)):
                raise NonPositiveWeightError(i, w)
        for j, w in enumerate(self.prefix_neg):
            if not (w > 0 and math.isfinite(w)):
                raise NonPositiveWeightError(-j - 1, w)
        object.__setattr__(self, "_cache", LogBeta(self))

    @property
    def bilateral(self) -> bool:
        return self.kind == BILATERAL

    def tails(self) -> list[TailRule]:
        return [self.tail_pos] + ([self.tail_neg] if self.tail_neg is not None else [])

    def _check_index(self, n: int) -> None:
        if n < 0 and not self.bilateral:
            raise SpecError(f"negative index {n} on a unilateral spec")

    def log_weights(self, lo: int, hi: int) -> np.ndarray:
        """Log weights at indices ``lo..hi-1``."""
        if hi <= lo:
            return np.empty(0)
        self._check_index(lo)
        parts = []
        p_neg = len(self.prefix_neg)
        neg_hi = min(hi, 0)
        tail_end = min(neg_hi, -p_neg)
        if lo < tail_end:
            parts.append(self.tail_neg.log_weights(lo + p_neg, tail_end + p_neg))
        pref_start = max(lo, -p_neg)
        if pref_start < neg_hi:
            parts.append(np.log([self.prefix_neg[-n - 1] for n in range(pref_start, neg_hi)]))
        pos_lo = max(lo, 0)
        if pos_lo < hi:
            k = len(self.prefix_pos)
            if pos_lo < k:
                parts.append(np.log(np.asarray(self.prefix_pos[pos_lo:min(hi, k)], dtype=float)))
            if hi > k:
                parts.append(self.tail_pos.log_weights(max(pos_lo, k) - k, hi - k))
        return np.concatenate(parts) if len(parts) > 1 else parts[0]

    def weight_at(self, n: int) -> float:
        self._check_index(n)
        if n >= 0:
            if n < len(self.prefix_pos):
                return self.prefix_pos[n]
            return self.tail_pos.weight(n - len(self.prefix_pos))
        j = -n - 1
        if j < len(self.prefix_neg):
            return self.prefix_neg[j]
        return self.tail_neg.weight(n + len(self.prefix_neg))

    def log_weight_at(self, n: int) -> float:
        return float(self.log_weights(n, n + 1)[0])

    def log_beta(self, n: int) -> float:
        self._check_index(n)
        return self._cache(n)

    @property
    def log_beta_cache(self) -> LogBeta:
        return self._cache

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind}
        if self.name is not None:
            doc["name"] = self.name
        doc["prefix_pos"] = list(self.prefix_pos)
        doc["tail_pos"] = self.tail_pos.to_dict()
        if self.bilateral:
            doc["prefix_neg"] = list(self.prefix_neg)
            doc["tail_neg"] = self.tail_neg.to_dict()
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


_ALLOWED_KEYS = {"kind", "name", "prefix_pos", "prefix_neg", "tail_pos", "tail_neg", "prefix", "tail"}


def spec_from_dict(doc: Any) -> WeightSpec:
    if not isinstance(doc, dict):
        raise SpecError("spec document must be an object")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    for alias, canonical in (("prefix", "prefix_pos"), ("tail", "tail_pos")):
        if alias in doc:
            if canonical in doc:
                raise SpecError(f"both {alias!r} and {canonical!r} given")
            doc = {**doc, canonical: doc[alias]}
            del doc[alias]
    if "kind" not in doc:
        raise SpecError("spec document needs a 'kind'")
    if "tail_pos" not in doc:
        raise SpecError("spec document needs 'tail_pos' (or 'tail')")
    kind = doc["kind"]
    if kind == UNILATERAL and ("prefix_neg" in doc or "tail_neg" in doc):
        raise SpecError("bilateral fields (prefix_neg, tail_neg) given on a unilateral spec")

    def prefix(key: str) -> tuple[float, ...]:
        value = doc.get(key, [])
        if not isinstance(value, list):
            raise SpecError(f"{key} must be a list of numbers")
        return tuple(_as_float(v, key) for v in value)

    tail_neg = TailRule.from_obj(doc["tail_neg"], "tail_neg") if "tail_neg" in doc else None
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise SpecError("name must be a string")
    return WeightSpec(
        kind=kind,
        name=name,
        prefix_pos=prefix("prefix_pos"),
        tail_pos=TailRule.from_obj(doc["tail_pos"], "tail_pos"),
        prefix_neg=prefix("prefix_neg"),
        tail_neg=tail_neg,
    )


def validate_spec(spec: WeightSpec, probe: int = VALIDATION_PROBE, window: int = DEFAULT_WINDOW,
                  cap: float = SUP_CAP) -> WeightSpec:
    """Probe positivity near the origin and boundedness of expression tails.

    Raises the first positivity failure by global index; expression tails
    whose probed sup exceeds ``cap`` are rejected.
    """
    sides = [(0, 1)] + ([(-1, -1)] if spec.bilateral else [])
    for start, step in sides:
        for i in range(probe + 1):
            n = start + step * i
            w = spec.weight_at(n)
            if not (w > 0 and math.isfinite(w)):
                # builtins may underflow in linear scale; their logs are authoritative
                if not math.isfinite(spec.log_weight_at(n)):
                    raise NonPositiveWeightError(n, w)
    for start, step, tail, k in _expr_sides(spec):
        for i in range(window):
            n = start + step * (k + i)
            w = spec.weight_at(n)
            if not (w > 0 and math.isfinite(w)):
                raise NonPositiveWeightError(n, w)
            if w > cap:
                raise UnboundedWeightError(n, w, cap)
    return spec


def _expr_sides(spec: WeightSpec):
    out = []
    if spec.tail_pos.variant == EXPR:
        out.append((0, 1, spec.tail_pos, len(spec.prefix_pos)))
    if spec.tail_neg is not None and spec.tail_neg.variant == EXPR:
        out.append((-1, -1, spec.tail_neg, len(spec.prefix_neg)))
    return out


def parse_weight_spec(text: str) -> WeightSpec:
    """Parse and validate a JSON spec document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, exc.lineno, exc.colno) from None
    return validate_spec(spec_from_dict(doc))


def load_spec(path: str | Path) -> WeightSpec:
    return parse_weight_spec(Path(path).read_text())


def weight_at(spec: WeightSpec, n: int) -> float:
    return spec.weight_at(n)


def log_beta(spec: WeightSpec, n: int) -> float:
    return spec.log_beta(n)


# --- sup / inf of the whole sequence ------------------------------------------------


def _tail_extreme(tail: TailRule, side_sign: int, window: int, which: str) -> tuple[float, bool]:
    if tail.variant == CONSTANT:
        return tail.values[0], True
    if tail.variant == PERIODIC:
        return (max if which == "sup" else min)(tail.values), True
    if tail.variant == BUILTIN:
        entry = tail.builtin_entry
        return (entry.sup if which == "sup" else entry.inf), True
    lo, hi = (0, window) if side_sign > 0 else (-window, 0)
    lw = tail.log_weights(lo, hi)
    return float(np.exp(lw.max() if which == "sup" else lw.min())), False


def weight_extreme(spec: WeightSpec, which: str, window: int = DEFAULT_WINDOW) -> tuple[float, bool]:
    """Sup (``which='sup'``) or inf of all weights; second item says whether it is exact."""
    pick = max if which == "sup" else min
    values = list(spec.prefix_pos) + list(spec.prefix_neg)
    v, exact = _tail_extreme(spec.tail_pos, 1, window, which)
    values.append(v)
    if spec.tail_neg is not None:
        v2, exact2 = _tail_extreme(spec.tail_neg, -1, window, which)
        values.append(v2)
        exact = exact and exact2
    return pick(values), exact


def ensure_unilateral(spec: WeightSpec, what: str) -> None:
    if spec.bilateral:
        raise SpecError(f"{what} needs a unilateral spec")


def ensure_bilateral(spec: WeightSpec, what: str) -> None:
    if not spec.bilateral:
        raise SpecError(f"{what} needs a bilateral spec")


__all__ = [
    "BUILTINS",
    "Builtin",
    "LogBeta",
    "TailRadii",
    "TailRule",
    "WeightSpec",
    "load_spec",
    "log_beta",
    "parse_weight_spec",
    "spec_from_dict",
    "validate_spec",
    "weight_at",
    "weight_extreme",
    "williams_log_beta",
]
