"""End-to-end check of a germ against hyperquadric targets.

The obstruction for a target ``C^{N+1}`` is the product of the determinant
operators over every layer ``m = n..N`` and every admissible row choice.
Germs of functions form an integral domain, so the product vanishes
identically exactly when one factor does.  The product is never expanded:
each factor is evaluated separately.

* A factor is *nonzero* as soon as one exact sample value or one series
  coefficient is nonzero.  This is a proof.
* A factor is *vanishing* when every sample value is exactly zero and, if
  the series expansion ran, every coefficient up to the requested order is
  zero.  This is evidence, not a proof.

The verdict is ``OBSTRUCTED`` when every factor is nonzero (the germ then
admits no transversal embedding into any hyperquadric of dimension at most
``N``), ``OBSTRUCTION_SATISFIED`` when some factor is vanishing, and
``INCONCLUSIVE`` otherwise.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from ..assoc_pde import HypersurfaceSource, PdeSystem, SamplePoint, pde_ring, source_for
from ..errors import CapExhaustedError, LeviDegenerateError
from ..hypersurface import RealDefining, real_to_complex, require_levi_nondegenerate
from ..series import GaussianRational, det_exact
from .gammas import TABLE_VERSION, make_spec
from .matrix import SeriesVanishing, build_matrix, caps_for, determinant_series
from .operator import ObstructionSpec, enumerate_alpha_choices

SATISFIED = "OBSTRUCTION_SATISFIED"
OBSTRUCTED = "OBSTRUCTED"
INCONCLUSIVE = "INCONCLUSIVE"

NONZERO = "nonzero"
VANISHING = "vanishing"
UNDETERMINED = "undetermined"

SERIES_MAX_S = 15
POINT_HEIGHT = 97


def truncate_system(sys: PdeSystem, cap: int, jet_cap: int) -> PdeSystem:
    target = pde_ring(sys.n, cap, jet_cap)
    if sys.ring == target:
        return sys
    if not sys.ring.contains(target):
        raise CapExhaustedError(f"system known on {sys.ring}, need {target}")
    mat = tuple(tuple(e.truncate(target) for e in row) for row in sys.phi)
    return PdeSystem(sys.n, mat, sys.base_z, sys.base_w, sys.base_xi, polynomial=sys.polynomial)


def sample_points(source, count: int, seed: int, height: int = POINT_HEIGHT) -> list[SamplePoint]:
    """Seeded exact sample points; coordinates have numerators and
    denominators bounded by ``height``."""
    rng = random.Random(seed)
    return [source.random_point(rng, height) for _ in range(count)]


class SystemCache:
    """PDE systems per sample point, computed once at the largest caps any
    operator needs and truncated on demand."""

    def __init__(self, source, cap: int, jet_cap: int):
        self.source = source
        self.cap = cap
        self.jet_cap = jet_cap
        self._store: dict = {}

    def get(self, point: SamplePoint, cap: int, jet_cap: int) -> PdeSystem:
        if cap > self.cap or jet_cap > self.jet_cap:
            return self.source.system(point, cap, jet_cap)
        sys = self._store.get(point)
        if sys is None:
            sys = self.source.system(point, self.cap, self.jet_cap)
            self._store[point] = sys
        return truncate_system(sys, cap, jet_cap)


@dataclass
class DeterminantData:
    """Values of one operator at exact points and its series behaviour."""

    spec: ObstructionSpec
    values: list[GaussianRational] = field(default_factory=list)
    series: SeriesVanishing | None = None
    skipped: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if any(v for v in self.values):
            return NONZERO
        if self.series is not None and not self.series.vanishes:
            return NONZERO
        if self.values or self.series is not None:
            return VANISHING
        return UNDETERMINED

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "m": self.spec.m,
            "alphas": [list(a) for a in self.spec.alphas],
            "operator": self.spec.to_json(),
            "gamma_source": self.spec.meta.get("gamma_source"),
            "values": [str(v) for v in self.values],
            "nonzero_samples": sum(1 for v in self.values if v),
            "series": None if self.series is None else self.series.to_json(),
            "status": self.status,
            "skipped": list(self.skipped),
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def det_operator(
    spec: ObstructionSpec,
    source,
    points: Sequence[SamplePoint] = (),
    order: int | None = None,
    cache: SystemCache | None = None,
) -> DeterminantData:
    """Evaluate one operator exactly at ``points`` and, when ``order`` is
    given, expand it around the base point to that total degree."""
    source = source_for(source)
    start = time.perf_counter()
    data = DeterminantData(spec)
    cap, jet_cap = caps_for(spec)
    for p in points:
        try:
            sys = cache.get(p, cap, jet_cap) if cache else source.system(p, cap, jet_cap)
        except LeviDegenerateError:
            data.skipped.append("Levi-degenerate sample point")
            continue
        data.values.append(det_exact(build_matrix(spec, sys).at_point()))
    if order is not None:
        scap, sjet = caps_for(spec, order)
        sys = source.system(source.origin(), scap, sjet)
        data.series = determinant_series(spec, sys, order)
    data.seconds = time.perf_counter() - start
    return data


def unique_alpha_sets(n: int, m: int) -> list[tuple]:
    """Admissible row choices up to reordering: permuting rows only flips
    the sign of the determinant."""
    seen = set()
    out = []
    for alphas in enumerate_alpha_choices(n, m):
        key = alphas[:n] + tuple(sorted(alphas[n:]))
        if key not in seen:
            seen.add(key)
            out.append(alphas)
    return out


@dataclass
class Verdict:
    n: int
    N: int
    conclusion: str
    factors: list[DeterminantData]
    points: list[SamplePoint]
    order: int | None
    mode: str
    seed: int
    levi_determinant: GaussianRational | None = None
    name: str | None = None
    seconds: float = 0.0

    @property
    def summary(self) -> str:
        k = len(self.points)
        if self.conclusion == OBSTRUCTED:
            return f"every factor is exactly nonzero somewhere: no embedding with N={self.N}"
        if self.conclusion == SATISFIED:
            vanish = [f for f in self.factors if f.status == VANISHING]
            f = vanish[0]
            tail = f" and as a series to order {f.series.order}" if f.series else ""
            return f"factor m={f.spec.m} vanishes at {len(f.values)} of {k} exact samples{tail}"
        return "some factors could not be decided and none vanishes"

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "target": {"n": self.n, "N": self.N},
            "germ": self.name,
            "conclusion": self.conclusion,
            "summary": self.summary,
            "mode": self.mode,
            "order": self.order,
            "seed": self.seed,
            "sample_height": POINT_HEIGHT,
            "sample_points": [
                {name: str(v) for name, v in p.coords} for p in self.points
            ],
            "levi_determinant": None if self.levi_determinant is None else str(self.levi_determinant),
            "transversality": "assumed: the verdict concerns transversal embeddings",
            "gamma_table_version": TABLE_VERSION,
            "factors": [f.to_json(timings) for f in self.factors],
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def aggregate(factors: Sequence[DeterminantData]) -> str:
    statuses = [f.status for f in factors]
    if statuses and all(s == NONZERO for s in statuses):
        return OBSTRUCTED
    if any(s == VANISHING for s in statuses):
        return SATISFIED
    return INCONCLUSIVE


def full_pipeline(
    h: RealDefining | PdeSystem,
    N: int,
    order: int = 4,
    samples: int = 20,
    seed: int = 0,
    mode: str = "both",
    m_values: Sequence[int] | None = None,
    progress=None,
) -> Verdict:
    """Evaluate every factor of the obstruction for targets of dimension
    ``N + 1``.

    ``mode`` is ``point`` (exact samples only), ``series`` (expansion at the
    base point only, for operators with at most 16 columns) or ``both``.
    """
    if mode not in ("point", "series", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    start = time.perf_counter()
    source = source_for(h)
    n = source.n
    if N < n:
        raise ValueError(f"target dimension N={N} is below n={n}")
    levi = None
    if isinstance(source, HypersurfaceSource):
        levi = require_levi_nondegenerate(real_to_complex(source.h, 4, 4))
    ms = list(m_values) if m_values is not None else list(range(n, N + 1))
    specs = [make_spec(n, m, alphas) for m in ms for alphas in unique_alpha_sets(n, m)]
    points = sample_points(source, samples, seed) if mode in ("point", "both") else []
    caps = [caps_for(sp) for sp in specs] or [(0, 0)]
    cache = SystemCache(source, max(c for c, _ in caps), max(k for _, k in caps))
    factors = []
    for sp in specs:
        use_series = mode in ("series", "both") and sp.s <= SERIES_MAX_S
        data = det_operator(sp, source, points, order if use_series else None, cache)
        if mode in ("series", "both") and not use_series:
            data.skipped.append(f"series mode skipped: {sp.s + 1} columns")
        factors.append(data)
        if progress:
            progress(data)
    name = getattr(getattr(source, "h", None), "name", None)
    return Verdict(
        n,
        N,
        aggregate(factors),
        factors,
        points,
        order if mode in ("series", "both") else None,
        mode,
        seed,
        levi,
        name,
        time.perf_counter() - start,
    )

