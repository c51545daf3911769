"""Orthonormal expansions of functions on the cube under a product measure.

The basis is phi_S(x) = prod_{i in S} (x_i - mu_i)/sigma_i, orthonormal
under the given product distribution.  `transform` computes all 2^n
coefficients by a butterfly pass per coordinate in O(n 2^n); the inverse
runs the same recursion backwards.  Expansions are stored sparsely as
{SubsetIndex: coefficient}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .cube import (
    ProductDistribution,
    SubsetIndex,
    enumerate_points,
    phi_matrix,
    point_to_index,
    weights,
)

__all__ = [
    "BooleanFunction",
    "FourierExpansion",
    "transform",
    "inverse_transform",
    "multilinear_gradient",
    "norm",
    "coefficient_mc",
    "expansion_to_text",
    "expansion_from_text",
]

# Butterfly outputs below this magnitude are treated as exact zeros and
# dropped from the sparse map.
COEFF_DROP = 1e-14


class BooleanFunction:
    """A real-valued function on {-1,+1}^n.

    Wraps either a full truth table (exact fast paths available) or an
    opaque callable (point evaluations only).  `values` on an opaque
    function evaluates all 2^n points once and caches the table.
    """

    def __init__(self, n: int, *, table: np.ndarray | None = None,
                 func: Callable[[np.ndarray], float] | None = None,
                 name: str = ""):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        if (table is None) == (func is None):
            raise ValueError("provide exactly one of table= or func=")
        self.n = int(n)
        self.name = name
        self._func = func
        if table is not None:
            t = np.asarray(table, dtype=np.float64).reshape(-1).copy()
            if t.shape[0] != (1 << self.n):
                raise ValueError("truth table must have 2^n entries")
            if not np.all(np.isfinite(t)):
                raise ValueError("truth table must be finite")
            t.flags.writeable = False
            self._table: np.ndarray | None = t
        else:
            self._table = None

    @classmethod
    def from_table(cls, table: Iterable[float], name: str = "") -> "BooleanFunction":
        t = np.asarray(list(table) if not isinstance(table, np.ndarray) else table,
                       dtype=np.float64)
        n = int(round(np.log2(t.shape[0])))
        if (1 << n) != t.shape[0]:
            raise ValueError("truth table length must be a power of two")
        return cls(n, table=t, name=name)

    @classmethod
    def from_callable(cls, n: int, func: Callable[[np.ndarray], float],
                      name: str = "") -> "BooleanFunction":
        return cls(n, func=func, name=name)

    @property
    def has_table(self) -> bool:
        return self._table is not None

    def value(self, x: np.ndarray) -> float:
        """Evaluate at one point."""
        if self._table is not None:
            return float(self._table[point_to_index(x)])
        return float(self._func(np.asarray(x)))

    def values(self) -> np.ndarray:
        """The full truth table, computing and caching it if needed."""
        if self._table is None:
            pts = enumerate_points(self.n)
            t = np.array([float(self._func(pts[m])) for m in range(pts.shape[0])])
            t.flags.writeable = False
            self._table = t
        return self._table

    def batch(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate a batch of points (rows of xs)."""
        xs = np.asarray(xs)
        if self._table is not None:
            bits = (xs > 0).astype(np.int64)
            idx = bits @ (1 << np.arange(self.n, dtype=np.int64))
            return self._table[idx]
        return np.array([float(self._func(row)) for row in xs])

    def __repr__(self) -> str:
        kind = "table" if self._table is not None else "callable"
        label = " %r" % self.name if self.name else ""
        return "BooleanFunction(n=%d, %s%s)" % (self.n, kind, label)


@dataclass
class FourierExpansion:
    """Sparse coefficient map of a function in the phi_S basis."""

    n: int
    coeffs: dict[SubsetIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        for S in self.coeffs:
            if not S.valid_for(self.n):
                raise ValueError("subset %s out of range for n=%d" % (S, self.n))

    def coefficient(self, S: SubsetIndex) -> float:
        return self.coeffs.get(S, 0.0)

    def mean(self) -> float:
        """E[f] under the defining distribution: the empty-set coefficient."""
        return self.coeffs.get(SubsetIndex.empty(), 0.0)

    def variance(self) -> float:
        """Var[f]: the sum of squared coefficients over non-empty subsets."""
        return float(sum(c * c for S, c in self.coeffs.items() if S.mask != 0))

    def norm_squared(self) -> float:
        """E[f^2]: the sum of all squared coefficients."""
        return float(sum(c * c for c in self.coeffs.values()))

    def degree(self) -> int:
        live = [S.degree for S, c in self.coeffs.items() if c != 0.0]
        return max(live, default=0)

    def restricted_to_degree(self, d: int) -> "FourierExpansion":
        """Keep only subsets of size <= d."""
        return FourierExpansion(
            self.n, {S: c for S, c in self.coeffs.items() if S.degree <= d})

    def scaled_by_degree(self, factor: Callable[[int], float]) -> "FourierExpansion":
        """Multiply each coefficient by factor(|S|)."""
        return FourierExpansion(
            self.n, {S: c * factor(S.degree) for S, c in self.coeffs.items()})

    def evaluate(self, x: np.ndarray, dist: ProductDistribution) -> float:
        """Evaluate the expansion at a point under `dist`'s phi basis."""
        ph = phi_matrix(x, dist)
        out = 0.0
        for S, c in self.coeffs.items():
            term = c
            for i in S:
                term *= ph[i]
            out += term
        return float(out)

    def evaluate_batch(self, xs: np.ndarray, dist: ProductDistribution) -> np.ndarray:
        ph = phi_matrix(xs, dist)
        out = np.zeros(ph.shape[0])
        for S, c in self.coeffs.items():
            term = np.full(ph.shape[0], c)
            for i in S:
                term = term * ph[:, i]
            out += term
        return out

    def items_sorted(self) -> list[tuple[SubsetIndex, float]]:
        """Deterministic order: by degree, then by member tuple."""
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0].degree, kv[0].members))

    def __len__(self) -> int:
        return len(self.coeffs)


def transform(f: BooleanFunction, dist: ProductDistribution) -> FourierExpansion:
    """All coefficients of f under `dist`, by a per-coordinate butterfly.

    Coordinate i splits the table into pairs (value at x_i=-1, value at
    x_i=+1); the mean part (1-p)*lo + p*hi replaces the lo slot and the
    phi part sqrt(p(1-p))*(hi - lo) the hi slot.  After all n passes,
    entry m holds the coefficient of the subset with bitmask m.
    """
    if dist.n != f.n:
        raise ValueError("distribution dimension %d != function dimension %d"
                         % (dist.n, f.n))
    work = np.array(f.values(), dtype=np.float64)
    n = f.n
    for i in range(n):
        p = dist.probs[i]
        half_sigma = np.sqrt(p * (1.0 - p))
        shaped = work.reshape(-1, 2 << i)
        lo = shaped[:, : 1 << i].copy()
        hi = shaped[:, 1 << i:].copy()
        shaped[:, : 1 << i] = (1.0 - p) * lo + p * hi
        shaped[:, 1 << i:] = half_sigma * (hi - lo)
    coeffs = {}
    for m in np.nonzero(np.abs(work) > COEFF_DROP)[0]:
        coeffs[SubsetIndex(int(m))] = float(work[m])
    return FourierExpansion(n, coeffs)


def inverse_transform(e: FourierExpansion, dist: ProductDistribution) -> BooleanFunction:
    """Reconstruct the truth table from an expansion (exact inverse of transform)."""
    if dist.n != e.n:
        raise ValueError("distribution dimension %d != expansion dimension %d"
                         % (dist.n, e.n))
    n = e.n
    work = np.zeros(1 << n)
    for S, c in e.coeffs.items():
        work[S.mask] = c
    for i in range(n - 1, -1, -1):
        p = dist.probs[i]
        # phi_i at x_i = +1 and -1; the inverse butterfly rebuilds
        # lo = a + phi(-1) b, hi = a + phi(+1) b from (a, b).
        phi_hi = np.sqrt((1.0 - p) / p)
        phi_lo = -np.sqrt(p / (1.0 - p))
        shaped = work.reshape(-1, 2 << i)
        a = shaped[:, : 1 << i].copy()
        b = shaped[:, 1 << i:].copy()
        shaped[:, : 1 << i] = a + phi_lo * b
        shaped[:, 1 << i:] = a + phi_hi * b
    return BooleanFunction(n, table=work)


def multilinear_gradient(e: FourierExpansion, x: np.ndarray,
                         dist: ProductDistribution) -> np.ndarray:
    """Gradient of the multilinear extension at a (possibly fractional) point.

    d/dx_j picks out subsets containing j: each contributes its
    coefficient over sigma_j times the phi product over the remaining
    members.
    """
    ph = phi_matrix(x, dist)
    grad = np.zeros(e.n)
    for S, c in e.coeffs.items():
        for j in S:
            term = c / dist.sigma[j]
            for i in S:
                if i != j:
                    term *= ph[i]
            grad[j] += term
    return grad


def norm(f: BooleanFunction, dist: ProductDistribution, order: float) -> float:
    """Exact moment norm by enumeration: (E |f|^order)^(1/order).

    Monotone nondecreasing in the order.
    """
    if order < 1.0:
        raise ValueError("norm order must be at least 1")
    return float((weights(dist) @ np.abs(f.values()) ** order) ** (1.0 / order))


def coefficient_mc(f: BooleanFunction, S: SubsetIndex, dist: ProductDistribution,
                   rng: np.random.Generator, samples: int) -> float:
    """Monte Carlo estimate of one coefficient: the sample mean of f * phi_S."""
    from .cube import sample as draw

    xs = draw(dist, rng, size=samples)
    ph = phi_matrix(xs, dist)
    prod = np.ones(samples)
    for i in S:
        prod *= ph[:, i]
    return float(np.mean(f.batch(xs) * prod))


def expansion_to_text(e: FourierExpansion) -> str:
    """Serialize an expansion, one `indices<TAB>coefficient` line per subset.

    Indices are comma-separated ascending; the empty subset prints as `-`.
    Lines are ordered by (degree, indices) so output is deterministic.
    Coefficients print with repr-level precision and round-trip exactly.
    """
    lines = ["# n=%d" % e.n]
    for S, c in e.items_sorted():
        key = ",".join(str(i) for i in S.members) if S.mask else "-"
        lines.append("%s\t%s" % (key, repr(c)))
    return "\n".join(lines) + "\n"


def expansion_from_text(text: str) -> FourierExpansion:
    """Parse the format written by expansion_to_text."""
    n = None
    coeffs: dict[SubsetIndex, float] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise ValueError("line %d: bad dimension header %r" % (ln, raw))
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError("line %d: expected `indices<TAB>coefficient`" % ln)
        key, val = parts
        if key == "-":
            S = SubsetIndex.empty()
        else:
            try:
                members = [int(tok) for tok in key.split(",")]
            except ValueError:
                raise ValueError("line %d: bad index list %r" % (ln, key))
            if any(i < 0 for i in members):
                raise ValueError("line %d: negative coordinate index" % ln)
            if sorted(set(members)) != members:
                raise ValueError("line %d: indices must be strictly ascending" % ln)
            S = SubsetIndex.of(members)
        try:
            c = float(val)
        except ValueError:
            raise ValueError("line %d: bad coefficient %r" % (ln, val))
        if S in coeffs:
            raise ValueError("line %d: duplicate subset %s" % (ln, S))
        coeffs[S] = c
    if n is None:
        top = max((S.members[-1] for S in coeffs if S.mask), default=-1)
        n = top + 1 if top >= 0 else 1
    return FourierExpansion(n, coeffs)
