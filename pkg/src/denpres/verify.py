"""Empirical checks: block averages over denominator-k points, denominator
preservation on windows, Monte-Carlo measure preservation, and the three
summation methods (block, Cesaro, blockwise Cesaro).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .arith import box_error_bound, cumulative_profile, jordan_totient, closed_cube_totient
from .maps import DenMap
from .points import (
    Box,
    RationalPoint,
    _anchored_count,
    denominator_sorted_array,
    enumerate_by_denominator,
    half_open_terms,
)


@dataclass(frozen=True)
class BoxIndicator:
    box: Box
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class IndicatorCombination:
    terms: tuple[BoxIndicator, ...]


@dataclass(frozen=True)
class SampledFunction:
    """A bounded function supported in ``support``; its integral is the
    midpoint rule on a ``resolution``^n grid unless ``integral`` is given."""

    func: Callable
    support: Box
    resolution: int = 200
    integral: float | None = None


@dataclass
class EquidistReport:
    k: int
    n: int
    count: int | float
    g: int
    empirical_mean: Fraction | float
    target_integral: Fraction | float
    error: Fraction | float
    bound: Fraction | None

    def to_row(self) -> dict:
        ratio = self.empirical_mean
        return {
            "k": self.k,
            "g": self.g,
            "h": str(self.count),
            "ratio": str(ratio),
            "target": str(self.target_integral),
            "error": str(self.error),
            "bound": "" if self.bound is None else str(self.bound),
            "within_bound": "" if self.bound is None else self.error <= self.bound,
        }


def _indicator_parts(ind: BoxIndicator, k: int, n: int) -> tuple[int, Fraction | None]:
    box = ind.box
    if not box.bounded:
        raise ValueError("integrand support must be bounded")
    if box.dim != n:
        raise ValueError(f"box has dimension {box.dim}, expected {n}")
    if box.is_half_open:
        terms = half_open_terms(box.lower, box.upper)
        count = sum(sign * _anchored_count(k, c) for sign, c in terms)
        return count, len(terms) * box_error_bound(k, n)
    return len(enumerate_by_denominator(box, k)), None


def equidist_statistic(integrand, k: int, n: int) -> EquidistReport:
    """Average of the integrand over the denominator-k points, against its integral.

    For half-open box indicators the bound is 2^n m(k) per anchored term of
    the box's decomposition, and ``error <= bound`` holds exactly.
    """
    g = jordan_totient(k, n)
    if isinstance(integrand, Box):
        integrand = BoxIndicator(integrand)
    if isinstance(integrand, BoxIndicator):
        integrand = IndicatorCombination((integrand,))
    if isinstance(integrand, IndicatorCombination):
        total = Fraction(0)
        target = Fraction(0)
        bound: Fraction | None = Fraction(0)
        for term in integrand.terms:
            count, b = _indicator_parts(term, k, n)
            w = Fraction(term.weight)
            total += w * count
            target += w * term.box.volume()
            bound = None if (b is None or bound is None) else bound + abs(w) * b
        mean = total / g
        return EquidistReport(k, n, total, g, mean, target, abs(mean - target), bound)
    if isinstance(integrand, SampledFunction):
        sup = integrand.support
        if not sup.bounded:
            raise ValueError("integrand support must be bounded")
        total = 0.0
        for p in enumerate_by_denominator(sup, k):
            total += float(integrand.func(p.coords))
        target = integrand.integral
        if target is None:
            target = _midpoint_integral(integrand.func, sup, integrand.resolution)
        mean = total / g
        return EquidistReport(k, n, total, g, mean, target, abs(mean - target), None)
    raise TypeError(f"unsupported integrand {type(integrand).__name__}")


def _midpoint_integral(func, box: Box, R: int) -> float:
    lo = np.array([float(x) for x in box.lower])
    hi = np.array([float(x) for x in box.upper])
    step = (hi - lo) / R
    axes = [lo[i] + step[i] * (np.arange(R) + 0.5) for i in range(len(lo))]
    total = 0.0
    for pt in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(lo)):
        total += float(func(tuple(pt)))
    return total * float(np.prod(step))


def equidist_csv(reports: Sequence[EquidistReport]) -> str:
    buf = io.StringIO()
    cols = ["k", "g", "h", "ratio", "target", "error", "bound", "within_bound"]
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.to_row())
    return buf.getvalue()


@dataclass
class PreservationVerdict:
    map: str
    k: int
    window: Box
    status: str
    witness: dict | None = None
    note: str = ""
    checked: int = 0

    def to_json(self) -> dict:
        out = {"map": self.map, "k": self.k, "window": str(self.window), "status": self.status, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


def _witness(direction: str, p: RationalPoint, q: RationalPoint) -> dict:
    return {
        "direction": direction,
        "point": [str(c) for c in p.coords],
        "image": [str(c) for c in q.coords],
        "point_denominator": p.k,
        "image_denominator": q.k,
    }


def check_preserves_denominator(m: DenMap, window: Box, k: int) -> PreservationVerdict:
    """Check on a finite window that ``m`` maps denominator-k points to denominator-k points.

    Every denominator-k point of the window is pushed forward and pulled
    back. A wrong denominator either way, or two points with one image, is a
    violation with a concrete witness. A finite window can refute
    preservation but never establish it for all of the domain.
    """
    if not window.bounded:
        raise ValueError("window must be bounded")
    if m.domain is not None and not m.domain.contains_box(window):
        raise ValueError("window is not inside the map's domain")
    pts = enumerate_by_denominator(window, k)
    verdict = PreservationVerdict(m.spec(), k, window, "preserved", checked=len(pts))
    seen: dict[RationalPoint, RationalPoint] = {}
    for p in pts:
        q = m.image_point(p)
        if q.k != k:
            verdict.status, verdict.witness = "violated", _witness("forward", p, q)
            return verdict
        if q in seen:
            verdict.status = "violated"
            verdict.witness = _witness("forward", p, q) | {"collides_with": [str(c) for c in seen[q].coords]}
            return verdict
        seen[q] = p
    outside = 0
    for p in pts:
        q = m.preimage_point(p)
        if not m.in_domain(q.coords):
            outside += 1
            continue
        if q.k != k:
            verdict.status, verdict.witness = "violated", _witness("inverse", p, q)
            return verdict
    if outside:
        verdict.status = "inconclusive"
        verdict.note = f"{outside} preimages fall outside the domain"
    return verdict


def verdicts_csv(verdicts: Sequence[PreservationVerdict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["map", "k", "window", "status", "checked", "witness"])
    for v in verdicts:
        wit = "" if v.witness is None else " ".join(v.witness["point"]) + " -> " + " ".join(v.witness["image"])
        w.writerow([v.map, v.k, str(v.window), v.status, v.checked, wit])
    return buf.getvalue()


@dataclass
class MeasureProbe:
    box: Box
    measure: float
    estimate: float
    deviation: float
    sigma: float
    samples: int
    region: tuple[tuple[float, ...], tuple[float, ...]]
    escaped: bool = False

    def to_json(self) -> dict:
        return {
            "box": str(self.box),
            "measure": self.measure,
            "estimate": self.estimate,
            "deviation": self.deviation,
            "sigma": self.sigma,
            "samples": self.samples,
            "escaped": self.escaped,
        }


def _boundary_samples(box: Box, per_edge: int) -> np.ndarray:
    lo = np.array([float(x) for x in box.lower])
    hi = np.array([float(x) for x in box.upper])
    n = len(lo)
    t = np.linspace(0.0, 1.0, per_edge)
    out = []
    for axis in range(n):
        others = [i for i in range(n) if i != axis]
        for corner in np.ndindex(*(2,) * (n - 1)):
            pts = np.empty((per_edge, n))
            pts[:, axis] = lo[axis] + t * (hi[axis] - lo[axis])
            for c, i in zip(corner, others):
                pts[:, i] = hi[i] if c else lo[i]
            out.append(pts)
    return np.concatenate(out)


def measure_preservation_test(
    m: DenMap,
    probe_boxes: Sequence[Box],
    sample_density: int,
    seed: int = 20240101,
    margin: float = 0.02,
) -> list[MeasureProbe]:
    """Stratified Monte-Carlo estimate of the measure of F^-1(W) for each probe box W.

    The preimage is bounded by pulling back a dense sample of the box
    boundary; that bounding region is cut into a regular grid with one
    uniform sample per cell. Each box gets its own substream of ``seed``.
    ``sigma`` is the binomial standard error, an upper estimate for the
    stratified estimator.
    """
    n = m.dim
    per_axis = max(1, round(sample_density ** (1.0 / n)))
    streams = np.random.SeedSequence(seed).spawn(len(probe_boxes))
    out = []
    for box, ss in zip(probe_boxes, streams):
        rng = np.random.default_rng(ss)
        bnd = m.inverse_array(_boundary_samples(box, 4097))
        escaped = m.domain is not None and not all(m.in_domain(tuple(r)) for r in bnd)
        lo, hi = bnd.min(axis=0), bnd.max(axis=0)
        pad = margin * (hi - lo) + 1e-9
        lo, hi = lo - pad, hi + pad
        cells = np.stack(np.meshgrid(*([np.arange(per_axis)] * n), indexing="ij"), axis=-1).reshape(-1, n)
        X = lo + (cells + rng.random(cells.shape)) * (hi - lo) / per_axis
        Y = m.forward_array(X)
        blo = np.array([float(x) for x in box.lower])
        bhi = np.array([float(x) for x in box.upper])
        hits = np.all((Y > blo) & (Y <= bhi), axis=1)
        N = len(X)
        p = float(hits.mean())
        vol = float(np.prod(hi - lo))
        est = vol * p
        sigma = vol * math.sqrt(p * (1 - p) / N)
        meas = float(box.volume())
        region = (tuple(float(x) for x in lo), tuple(float(x) for x in hi))
        out.append(MeasureProbe(box, meas, est, abs(est - meas), sigma, N, region, bool(escaped)))
    return out


@dataclass
class SummationReport:
    """Block averages per k, Cesaro averages per prefix length, and
    blockwise Cesaro averages per k (prefixes ending at block boundaries)."""

    block: list
    cesaro: np.ndarray
    blockwise: list
    block_ends: list[int] = field(default_factory=list)


def block_sizes(K: int, n: int, cube: str = "half-open") -> list[int]:
    f = closed_cube_totient if cube == "closed" else jordan_totient
    return [f(k, n) for k in range(1, K + 1)]


def summation_methods(sequence, K: int, n: int, cube: str = "half-open") -> SummationReport:
    """Block, Cesaro and blockwise-Cesaro averages of ``sequence`` indexed along
    a denominator-sorted enumeration (block k has g(k) or G(k) entries).

    Integer or Fraction input gives exact block and blockwise averages.
    """
    sizes = block_sizes(K, n, cube)
    total = sum(sizes)
    if len(sequence) < total:
        raise ValueError(f"sequence has {len(sequence)} terms, need {total}")
    seq = sequence[:total]
    if isinstance(seq, np.ndarray):
        exact = np.issubdtype(seq.dtype, np.integer)
        seq = [int(x) for x in seq] if exact else seq.astype(float)
    else:
        exact = all(isinstance(x, (int, Fraction)) for x in seq)
    arr = np.array([float(x) for x in seq]) if exact else np.asarray(seq, dtype=float)
    cesaro = np.cumsum(arr) / np.arange(1, total + 1)
    block, blockwise, ends = [], [], []
    start = 0
    running = Fraction(0) if exact else 0.0
    for size in sizes:
        chunk = seq[start : start + size]
        s = sum(chunk, Fraction(0)) if exact else float(np.sum(chunk))
        running += s
        start += size
        ends.append(start)
        block.append(s / size)
        blockwise.append(running / start)
    return SummationReport(block, cesaro, blockwise, ends)


def indicator_sequence(box: Box, n: int, K: int, cube: str = "half-open", order="lex") -> np.ndarray:
    """0/1 values of the box indicator along the denominator-sorted enumeration."""
    pa = denominator_sorted_array(n, K, cube, order)
    inside = np.ones(len(pa), dtype=bool)
    for i in range(n):
        a, k = pa.nums[:, i], pa.ks
        lo, hi = box.lower[i], box.upper[i]
        # compare a/k with rational bounds exactly: a*den > num*k
        if box.lower_closed[i]:
            inside &= a * lo.denominator >= lo.numerator * k
        else:
            inside &= a * lo.denominator > lo.numerator * k
        if box.upper_closed[i]:
            inside &= a * hi.denominator <= hi.numerator * k
        else:
            inside &= a * hi.denominator < hi.numerator * k
    return inside.astype(np.int64)


def alternating_block_sequence(K: int, n: int, cube: str = "half-open") -> list[int]:
    """+1 on every term of an even-k block, -1 on odd-k blocks."""
    out: list[int] = []
    for k, size in enumerate(block_sizes(K, n, cube), start=1):
        out.extend([1 if k % 2 == 0 else -1] * size)
    return out


def blockwise_cesaro_bound(K: int, n: int, terms: int = 1) -> Fraction:
    """Bound on |blockwise Cesaro average - volume| at t(K) for box indicators:
    sum_k g(k) * terms * 2^n m(k) / t(K)."""
    prof = cumulative_profile(K, n)
    return sum((Fraction(r.g) * terms * box_error_bound(r.k, n) for r in prof), Fraction(0)) / prof[-1].t
