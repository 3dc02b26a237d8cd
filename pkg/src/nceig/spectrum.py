"""Isolated eigenvalues, tracking under mesh refinement, and convergence reports.

The multiplication part ``-x^2`` contributes the essential band
``{-x^2 : x in [a, b]}``; the discrete matrices fill it with clustered
eigenvalues.  Only eigenvalues clear of the band (by a margin) are treated
as approximations of isolated eigenvalues, and those are followed across a
refinement schedule by nearest-neighbour matching.
"""

from __future__ import annotations

import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .assembly import assemble, worker_count
from .eigensolver import Spectrum, eigenvalues
from .errors import ConfigError, TrackingLossError
from .kernels import Kernel
from .mesh import uniform_partition
from .quadrature import gauss_rule

log = logging.getLogger(__name__)

__all__ = [
    "ConvergenceReport",
    "EssentialBand",
    "Matching",
    "TrackedEigenvalue",
    "convergence_study",
    "default_margin",
    "essential_band",
    "isolated_eigenvalues",
    "match_eigenvalues",
    "solve_level",
]

_TIE_TOL = 1e-14


@dataclass(frozen=True)
class EssentialBand:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def distance(self, value: float) -> float:
        if value < self.lo:
            return self.lo - value
        if value > self.hi:
            return value - self.hi
        return 0.0


def essential_band(a: float, b: float) -> EssentialBand:
    if not a < b:
        raise ConfigError(f"invalid interval: need a < b, got [{a}, {b}]")
    lo = -max(a * a, b * b)
    hi = 0.0 if a <= 0.0 <= b else -min(a * a, b * b)
    return EssentialBand(lo, hi)


def default_margin(band: EssentialBand) -> float:
    return 0.005 * (band.width + 1.0)


def _clears_band(z: complex, band: EssentialBand, margin: float) -> bool:
    return band.distance(z.real) > margin or abs(z.imag) > margin


def isolated_eigenvalues(s, band: EssentialBand, margin: float) -> list[complex]:
    """Eigenvalues of ``s`` farther than ``margin`` from the band, by descending real part."""
    if not margin > 0:
        raise ConfigError("margin must be positive")
    values = [complex(z) for z in s if _clears_band(complex(z), band, margin)]
    return sorted(values, key=lambda z: (-z.real, z.imag))


@dataclass(frozen=True)
class Matching:
    """Partial injection ``prev[i] -> next[j]`` plus the unmatched ``prev`` indices."""

    pairs: tuple[tuple[int, int], ...]
    unmatched: tuple[int, ...]
    ambiguous: bool = False

    def target(self, i: int) -> int | None:
        for pi, nj in self.pairs:
            if pi == i:
                return nj
        return None


def match_eigenvalues(prev, next, radius) -> Matching:
    """Greedy nearest-neighbour pairing; ``radius`` is a scalar or one per ``prev`` entry."""
    prev = [complex(z) for z in prev]
    next = [complex(z) for z in next]
    if isinstance(radius, (int, float)):
        radii = [float(radius)] * len(prev)
    else:
        radii = [float(r) for r in radius]
        if len(radii) != len(prev):
            raise ConfigError("need one matching radius per previous eigenvalue")

    candidates = sorted(
        (abs(p - q), i, j)
        for i, p in enumerate(prev)
        for j, q in enumerate(next)
        if abs(p - q) <= radii[i]
    )
    ambiguous = False
    for (d0, i0, j0), (d1, i1, j1) in zip(candidates, candidates[1:]):
        if abs(d1 - d0) <= _TIE_TOL and (i0 == i1 or j0 == j1):
            ambiguous = True
            log.warning("ambiguous eigenvalue match: prev %d/%d vs next %d/%d at distance %.3g",
                        i0, i1, j0, j1, d0)
    used_prev, used_next, pairs = set(), set(), []
    for _, i, j in candidates:
        if i in used_prev or j in used_next:
            continue
        used_prev.add(i)
        used_next.add(j)
        pairs.append((i, j))
    pairs.sort()
    unmatched = tuple(i for i in range(len(prev)) if i not in used_prev)
    return Matching(tuple(pairs), unmatched, ambiguous)


def _tracking_radii(values: list[complex], band: EssentialBand) -> list[float]:
    radii = []
    for i, z in enumerate(values):
        gaps = [abs(z - w) for k, w in enumerate(values) if k != i]
        gaps.append(math.hypot(band.distance(z.real), z.imag))
        radii.append(0.5 * min(gaps))
    return radii


@dataclass(frozen=True)
class TrackedEigenvalue:
    label: int
    levels: tuple[int, ...]
    values: tuple[complex, ...]
    reference: complex

    @property
    def errors(self) -> tuple[float, ...]:
        return tuple(abs(v - self.reference) for v in self.values)

    @property
    def ratios(self) -> tuple[float | None, ...]:
        errs = self.errors
        out: list[float | None] = [None]
        for e0, e1 in zip(errs, errs[1:]):
            out.append(e0 / e1 if e1 != 0 else math.inf)
        return tuple(out)


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(v, ".17g")


@dataclass(frozen=True)
class ConvergenceReport:
    levels: tuple[int, ...]
    sizes: tuple[int, ...]
    tracked: tuple[TrackedEigenvalue, ...]
    metadata: dict = field(default_factory=dict)

    def csv_header(self) -> list[str]:
        cols = ["n", "N_h"]
        for t in self.tracked:
            k = t.label
            cols += [f"lambda{k}_re", f"lambda{k}_im", f"err{k}", f"ratio{k}"]
        return cols

    def rows(self) -> list[list]:
        out = []
        for lvl, (n, size) in enumerate(zip(self.levels, self.sizes)):
            row = [n, size]
            for t in self.tracked:
                z = t.values[lvl]
                row += [z.real, z.imag, t.errors[lvl], t.ratios[lvl]]
            out.append(row)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.csv_header()) + "\n")
        for row in self.rows():
            buf.write(",".join([str(row[0]), str(row[1])] + [_fmt(v) for v in row[2:]]) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "levels": list(self.levels),
            "sizes": list(self.sizes),
            "tracked": [
                {
                    "label": t.label,
                    "reference": [t.reference.real, t.reference.imag],
                    "values": [[z.real, z.imag] for z in t.values],
                    "errors": list(t.errors),
                    "ratios": list(t.ratios),
                }
                for t in self.tracked
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self) -> str:
        """Aligned text table: errors to 4 decimals, ratios to 2."""
        md = self.metadata
        lines = [
            f"# kernel={md.get('kernel')} alpha={md.get('alpha')} interval=[{md.get('a')}, {md.get('b')}]"
            f" r={md.get('r')} reference={md.get('reference')}"
        ]
        for t in self.tracked:
            ref = t.reference
            shown = f"{ref.real:.10f}" if ref.imag == 0 else f"{ref.real:.10f}{ref.imag:+.10f}j"
            lines.append(f"# lambda({t.label}) = {shown}")
        header = f"{'n':>5}"
        for t in self.tracked:
            k = t.label
            header += f"  {f'|l_n({k})-l({k})|':>15}  {f'ratio({k})':>9}"
        lines.append(header)
        for lvl, n in enumerate(self.levels):
            line = f"{n:>5}"
            for t in self.tracked:
                ratio = t.ratios[lvl]
                line += f"  {t.errors[lvl]:>15.4f}  {'' if ratio is None else f'{ratio:.2f}':>9}"
            lines.append(line)
        return "\n".join(lines) + "\n"


def solve_level(kernel: Kernel, alpha: float, a: float, b: float, r: int, n: int) -> Spectrum:
    part = uniform_partition(a, b, n)
    return eigenvalues(assemble(kernel, alpha, part, gauss_rule(r)))


def _solve_levels(kernel, alpha, a, b, r, ns) -> list[Spectrum]:
    threads = min(worker_count(), len(ns))
    if threads <= 1:
        return [solve_level(kernel, alpha, a, b, r, n) for n in ns]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda n: solve_level(kernel, alpha, a, b, r, n), ns))


def _follow(current: list[complex], candidates: list[complex], band, what: str) -> list[complex]:
    matching = match_eigenvalues(current, candidates, _tracking_radii(current, band))
    if matching.unmatched:
        lost = ", ".join(f"{current[i]:.6g}" for i in matching.unmatched)
        raise TrackingLossError(f"lost track of eigenvalue(s) {lost} at {what}")
    return [candidates[matching.target(i)] for i in range(len(current))]


def _richardson(n1: int, z1: complex, n2: int, z2: complex) -> complex:
    # first-order extrapolation in h = (b - a) / n
    return (n2 * z2 - n1 * z1) / (n2 - n1)


def convergence_study(
    kernel: Kernel,
    alpha: float,
    interval: tuple[float, float],
    r: int,
    schedule,
    track_count: int = 2,
    reference="fine",
    margin: float | None = None,
) -> ConvergenceReport:
    """Solve on every level of ``schedule`` and tabulate errors of the tracked eigenvalues.

    ``reference`` is ``"fine"`` (one solve at 4 x the finest n), an explicit
    integer n for that solve, or ``"richardson"`` (extrapolate the two finest
    levels assuming first-order convergence).
    """
    a, b = (float(v) for v in interval)
    schedule = [int(n) for n in schedule]
    if len(schedule) < 2:
        raise ConfigError("a convergence study needs at least two mesh levels")
    if any(n1 <= n0 for n0, n1 in zip(schedule, schedule[1:])):
        raise ConfigError("schedule must be strictly increasing")
    if schedule[0] < 2:
        raise ConfigError("every level needs n >= 2")
    if track_count < 1:
        raise ConfigError("track_count must be >= 1")
    rule = gauss_rule(r)
    band = essential_band(a, b)
    if margin is None:
        margin = default_margin(band)

    if reference == "fine":
        ref_n = 4 * schedule[-1]
    elif reference == "richardson":
        ref_n = None
    else:
        ref_n = int(reference)
        if ref_n <= schedule[-1]:
            raise ConfigError("reference n must exceed the finest level")

    ns = schedule + ([ref_n] if ref_n else [])
    spectra = _solve_levels(kernel, alpha, a, b, rule.order, ns)
    isolated = [isolated_eigenvalues(s, band, margin) for s in spectra]

    metadata = {
        "kernel": kernel.source,
        "alpha": float(alpha),
        "a": a,
        "b": b,
        "r": rule.order,
        "schedule": schedule,
        "track_count": track_count,
        "margin": margin,
        "reference": "richardson" if ref_n is None else f"n_ref={ref_n}",
    }
    sizes = tuple(n * rule.order for n in schedule)

    seeds = isolated[0][:track_count]
    if len(seeds) < track_count:
        log.warning("only %d isolated eigenvalue(s) at n=%d; tracking those", len(seeds), schedule[0])
    if not seeds:
        return ConvergenceReport(tuple(schedule), sizes, (), metadata)

    paths = [list(seeds)]
    for n, candidates in zip(schedule[1:], isolated[1:len(schedule)]):
        paths.append(_follow(paths[-1], candidates, band, f"n={n}"))

    finest = paths[-1]
    extrapolated = [
        _richardson(schedule[-2], z1, schedule[-1], z2) for z1, z2 in zip(paths[-2], finest)
    ]
    if ref_n is None:
        refs = extrapolated
    else:
        refs = _follow(finest, isolated[-1], band, f"reference n={ref_n}")
        for k, (zr, ze, zf) in enumerate(zip(refs, extrapolated, finest), start=1):
            gap, err = abs(zr - ze), abs(zf - zr)
            log.info("lambda(%d): fine-mesh vs extrapolated reference differ by %.3g "
                     "(finest-level error %.3g)", k, gap, err)

    tracked = tuple(
        TrackedEigenvalue(
            label=k + 1,
            levels=tuple(schedule),
            values=tuple(path[k] for path in paths),
            reference=refs[k],
        )
        for k in range(len(seeds))
    )
    return ConvergenceReport(tuple(schedule), sizes, tracked, metadata)
