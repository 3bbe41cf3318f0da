"""The second-order PDE system ``w_{z_i z_j} = Phi_ij(z, w, w_z)`` whose
solutions are the Segre varieties of a germ.

Let ``(A, B)`` invert ``(z, a, b) -> (z, rho, rho_z)``.  Then
``Phi_ij(z, w, xi) = rho_{z_i z_j}(z, A, B)``.  Series variables are offsets
from the expansion point: ``xi`` stands for ``w_z - xi0`` where ``xi0`` is the
slope of the base Segre variety (zero for a normalized germ at its origin).
Sample points away from the origin are handled by re-centering an exact
polynomial ``phi`` in complexified ``(z, a, u)`` space, which keeps every
coefficient exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import CrembedError
from .hypersurface import (
    ComplexDefining,
    RealDefining,
    complexify,
    levi_matrix,
    phi_vars,
    require_levi_nondegenerate,
    z_names,
)
from .series import (
    GaussianRational,
    Ring,
    TruncatedSeries,
    det_series,
    invert_unit,
    linear_combination,
    meet_all,
    mul,
    shift_polynomial,
    solve_implicit,
    substitute,
)


class CrossCheckError(CrembedError):
    """Two independent computations of the same jet disagree."""


def xi_names(n: int) -> list[str]:
    return [f"xi{j}" for j in range(1, n + 1)]


def pde_vars(n: int) -> tuple[str, ...]:
    return tuple(z_names(n) + ["w"] + xi_names(n))


def pde_ring(n: int, cap: int, jet_cap: int | None = None) -> Ring:
    groups = [(z_names(n) + ["w"], jet_cap)] if jet_cap is not None else []
    return Ring(pde_vars(n), cap, groups)


@dataclass(frozen=True)
class InverseMap:
    """``a = A(z, w, xi)``, ``b = B(z, w, xi)``."""

    A: tuple[TruncatedSeries, ...]
    B: TruncatedSeries


@dataclass(frozen=True)
class PdeSystem:
    """Symmetric matrix of series ``Phi_ij`` in ``(z, w, xi)``.

    ``base_z``, ``base_w``, ``base_xi`` are the absolute coordinates of the
    expansion point; only ``base_xi`` enters the operators, since
    everything else is translation invariant.  ``rho`` and ``inverse`` are
    kept for systems derived from a germ (they feed the Cramer-rule cross
    check).  ``polynomial`` marks formal systems whose entries are exact
    polynomials and may therefore be re-expanded at other points.
    """

    n: int
    phi: tuple[tuple[TruncatedSeries, ...], ...]
    base_z: tuple[GaussianRational, ...]
    base_w: GaussianRational
    base_xi: tuple[GaussianRational, ...]
    rho: TruncatedSeries | None = field(default=None, compare=False)
    inverse: InverseMap | None = field(default=None, compare=False)
    polynomial: bool = False

    def __post_init__(self):
        for i in range(self.n):
            for j in range(self.n):
                if self.phi[i][j] != self.phi[j][i]:
                    raise ValueError("Phi must be symmetric")
        rings = {e.ring for row in self.phi for e in row}
        if len(rings) != 1:
            raise ValueError("Phi entries must share one ring")

    @property
    def ring(self) -> Ring:
        return self.phi[0][0].ring

    def entry(self, i: int, j: int) -> TruncatedSeries:
        """``Phi_ij`` with 1-based indices."""
        return self.phi[i - 1][j - 1]

    @classmethod
    def formal(
        cls,
        n: int,
        entries: Mapping[tuple[int, int], TruncatedSeries | Mapping],
        cap: int,
        jet_cap: int | None = None,
        base_xi: Sequence[GaussianRational] | None = None,
        polynomial: bool = True,
    ) -> "PdeSystem":
        """Build a system from given entries (1-based keys, upper triangle
        suffices); values are series or ``{exponents: coefficient}``."""
        ring = pde_ring(n, cap, jet_cap)
        mat = [[TruncatedSeries.zero(ring) for _ in range(n)] for _ in range(n)]
        for (i, j), val in entries.items():
            if isinstance(val, TruncatedSeries):
                s = TruncatedSeries.from_dict(ring, val.to_dict(), strict=False) if polynomial else val.truncate(ring)
            else:
                s = TruncatedSeries.from_dict(ring, val, strict=False)
            mat[i - 1][j - 1] = s
            mat[j - 1][i - 1] = s
        zero = GaussianRational(0)
        bx = tuple(GaussianRational.coerce(x) for x in base_xi) if base_xi else (zero,) * n
        return cls(n, tuple(tuple(r) for r in mat), (zero,) * n, zero, bx, polynomial=polynomial)

    def recentered(
        self,
        dz: Sequence[GaussianRational],
        dw: GaussianRational,
        dxi: Sequence[GaussianRational],
        cap: int | None = None,
        jet_cap: int | None = None,
    ) -> "PdeSystem":
        """Exact re-expansion at the point offset by ``(dz, dw, dxi)``."""
        if not self.polynomial:
            raise CrembedError("only exact polynomial systems can be re-centered")
        n = self.n
        cap = self.ring.cap if cap is None else cap
        target = pde_ring(n, cap, jet_cap)
        offsets = dict(zip(z_names(n), dz))
        offsets["w"] = dw
        offsets.update(zip(xi_names(n), dxi))
        big = Ring(self.ring.vars, max(self.ring.cap, 1))
        mat = []
        for i in range(n):
            row = []
            for j in range(n):
                src = TruncatedSeries.from_dict(big, self.phi[i][j].to_dict())
                moved = shift_polynomial(src, offsets)
                row.append(TruncatedSeries.from_dict(target, moved.to_dict(), strict=False))
            mat.append(tuple(row))
        return PdeSystem(
            n,
            tuple(mat),
            tuple(a + b for a, b in zip(self.base_z, dz)),
            self.base_w + dw,
            tuple(a + b for a, b in zip(self.base_xi, dxi)),
            polynomial=True,
        )

    def restricted_to_z0(self) -> tuple[tuple[TruncatedSeries, ...], ...]:
        return tuple(tuple(e.restrict_to_zero(z_names(self.n)) for e in row) for row in self.phi)


def derive_pde(
    r: ComplexDefining,
    cap: int | None = None,
    jet_cap: int | None = None,
    base: tuple | None = None,
) -> tuple[PdeSystem, InverseMap]:
    """Compute ``Phi`` and the inverse map ``(A, B)`` from ``rho``.

    ``cap`` defaults to two less than the cap of ``rho``; ``jet_cap`` bounds
    the degree in ``(z, w)`` (``rho`` then needs a ``z`` cap of ``jet_cap + 2``).
    Raises :class:`~crembed.errors.LeviDegenerateError` when the Levi
    determinant vanishes.
    """
    n = r.n
    rho = r.rho
    cap = rho.cap - 2 if cap is None else cap
    require_levi_nondegenerate(r)
    zs = z_names(n)
    rho_z = [rho.derivative(z) for z in zs]
    xi0 = tuple(s.constant_term() for s in rho_z)
    params = pde_ring(n, cap, jet_cap)
    unknowns = [f"a{j}" for j in range(1, n + 1)] + ["b"]
    groups = [(zs + ["w"], jet_cap)] if jet_cap is not None else []
    eq_ring = Ring(pde_vars(n) + tuple(unknowns), cap, groups)
    eqs = [TruncatedSeries.variable(eq_ring, "w") - rho.embed(eq_ring)]
    for j in range(n):
        eqs.append(
            TruncatedSeries.variable(eq_ring, f"xi{j + 1}") + xi0[j] - rho_z[j].embed(eq_ring)
        )
    sol = solve_implicit(eqs, unknowns, params)
    inverse = InverseMap(tuple(sol[f"a{j}"] for j in range(1, n + 1)), sol["b"])
    mat = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            second = rho_z[i].derivative(zs[j])
            val = substitute(second, sol, ring=params)
            mat[i][j] = val
            mat[j][i] = val
    if base is None:
        zero = GaussianRational(0)
        base = ((zero,) * n, zero, xi0)
    system = PdeSystem(
        n,
        tuple(tuple(row) for row in mat),
        tuple(base[0]),
        base[1],
        tuple(base[2]),
        rho=rho,
        inverse=inverse,
    )
    return system, inverse


# ---------------------------------------------------------------------------
# sample points


@dataclass(frozen=True)
class SamplePoint:
    """Offset of an expansion point.

    For germs the offset lives in complexified ``(z, a, u)`` space; for
    formal systems in ``(z, w, xi)`` space.
    """

    kind: str
    coords: tuple[tuple[str, GaussianRational], ...]

    def as_dict(self) -> dict[str, GaussianRational]:
        return dict(self.coords)

    def is_origin(self) -> bool:
        return all(not v for _, v in self.coords)


def random_gaussian(rng: random.Random, height: int = 97) -> GaussianRational:
    from fractions import Fraction

    return GaussianRational(
        Fraction(rng.randint(-height, height), rng.randint(1, height)),
        Fraction(rng.randint(-height, height), rng.randint(1, height)),
    )


class HypersurfaceSource:
    """Produces the PDE system of a germ expanded at exact sample points."""

    kind = "germ"

    def __init__(self, h: RealDefining):
        self.h = h
        self.n = h.n

    def origin(self) -> SamplePoint:
        return SamplePoint("germ", tuple((v, GaussianRational(0)) for v in phi_vars(self.n)))

    def random_point(self, rng: random.Random, height: int = 97) -> SamplePoint:
        if not self.h.polynomial:
            raise CrembedError("sample points away from the origin need an exact polynomial germ")
        return SamplePoint("germ", tuple((v, random_gaussian(rng, height)) for v in phi_vars(self.n)))

    def complex_defining(self, point: SamplePoint, cap: int, z_cap: int | None = None):
        """Re-centered ``rho`` plus the absolute base point ``(z*, w*)``."""
        n = self.n
        shift = point.as_dict()
        if point.is_origin():
            phi = self.h.phi
            phi_star = GaussianRational(0)
        else:
            moved = shift_polynomial(self.h.phi, shift)
            phi_star = moved.constant_term()
            phi = moved - phi_star if phi_star else moved
        r = complexify(phi, n, cap, z_cap, polynomial=self.h.polynomial)
        z_star = tuple(shift[z] for z in z_names(n))
        w_star = shift["u"] + GaussianRational(0, 1) * phi_star
        return r, z_star, w_star

    def system(self, point: SamplePoint, cap: int, jet_cap: int | None = None) -> PdeSystem:
        r, z_star, w_star = self.complex_defining(
            point, cap + 2, None if jet_cap is None else jet_cap + 2
        )
        xi_star = tuple(r.rho.derivative(z).constant_term() for z in z_names(self.n))
        sys, _ = derive_pde(r, cap, jet_cap, base=(z_star, w_star, xi_star))
        return sys


class FormalSource:
    """Sample points of a polynomial formal system."""

    kind = "formal"

    def __init__(self, system: PdeSystem):
        self.sys = system
        self.n = system.n

    def origin(self) -> SamplePoint:
        return SamplePoint("formal", tuple((v, GaussianRational(0)) for v in pde_vars(self.n)))

    def random_point(self, rng: random.Random, height: int = 97) -> SamplePoint:
        if not self.sys.polynomial:
            raise CrembedError("sample points away from the origin need a polynomial system")
        return SamplePoint("formal", tuple((v, random_gaussian(rng, height)) for v in pde_vars(self.n)))

    def system(self, point: SamplePoint, cap: int, jet_cap: int | None = None) -> PdeSystem:
        d = point.as_dict()
        n = self.n
        if point.is_origin() and self.sys.ring == pde_ring(n, cap, jet_cap):
            return self.sys
        if self.sys.polynomial:
            return self.sys.recentered(
                [d[z] for z in z_names(n)], d["w"], [d[x] for x in xi_names(n)], cap, jet_cap
            )
        if not point.is_origin():
            raise CrembedError("non-polynomial formal systems can only be used at their origin")
        target = pde_ring(n, cap, jet_cap)
        mat = tuple(tuple(e.truncate(target) for e in row) for row in self.sys.phi)
        return PdeSystem(n, mat, self.sys.base_z, self.sys.base_w, self.sys.base_xi)


def source_for(obj) -> HypersurfaceSource | FormalSource:
    if isinstance(obj, (HypersurfaceSource, FormalSource)):
        return obj
    if isinstance(obj, RealDefining):
        return HypersurfaceSource(obj)
    if isinstance(obj, PdeSystem):
        return FormalSource(obj)
    raise TypeError(f"cannot build PDE systems from {type(obj).__name__}")


# ---------------------------------------------------------------------------
# jets


def _orders(n: int, derivative) -> dict[str, int]:
    names = pde_vars(n)
    if isinstance(derivative, Mapping):
        out = dict(derivative)
    else:
        out = dict(zip(names, derivative))
    for k in out:
        if k not in names:
            raise ValueError(f"unknown jet variable {k!r}")
    return {k: v for k, v in out.items() if v}


def _align(series: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    ring = meet_all([s.ring for s in series])
    return [s.truncate(ring) for s in series]


def cramer_jet(sys: PdeSystem, derivative, i: int = 1, j: int = 1) -> TruncatedSeries:
    """A jet of ``Phi_ij`` computed only from jets of ``rho``.

    The coordinate fields of ``(z, w, xi)`` are pulled back to ``(z, a, b)``
    through the inverse of the Levi matrix, assembled by Cramer's rule
    (cofactors over the determinant), and applied to ``rho_{z_i z_j}``.
    """
    if sys.rho is None or sys.inverse is None:
        raise CrembedError("the Cramer recursion needs a system derived from a germ")
    n = sys.n
    rho = sys.rho
    zs = z_names(n)
    cols = ["b"] + [f"a{k}" for k in range(1, n + 1)]
    lm = levi_matrix(rho, n)
    pz = [[row_f.derivative(z) for z in zs] for row_f in [rho] + [rho.derivative(z) for z in zs]]
    flat = _align([e for row in lm for e in row] + [e for row in pz for e in row])
    size = n + 1
    M = [flat[r * size : (r + 1) * size] for r in range(size)]
    P = [flat[size * size + r * n : size * size + (r + 1) * n] for r in range(size)]
    ring = flat[0].ring
    det = det_series(M)
    inv_det = invert_unit(det)
    minv = [[None] * size for _ in range(size)]
    for r in range(size):
        for c in range(size):
            minor = [[M[a][b] for b in range(size) if b != c] for a in range(size) if a != r]
            cof = det_series(minor) if minor else TruncatedSeries.one(ring)
            if (r + c) % 2:
                cof = -cof
            minv[c][r] = mul(cof, inv_det)
    fields: dict[str, tuple[str | None, list[TruncatedSeries]]] = {}
    fields["w"] = (None, [minv[c][0] for c in range(size)])
    for m in range(n):
        fields[f"xi{m + 1}"] = (None, [minv[c][m + 1] for c in range(size)])
    for k, z in enumerate(zs):
        coef = [
            -linear_combination(ring, [(1, mul(minv[c][r], P[r][k])) for r in range(size)])
            for c in range(size)
        ]
        fields[z] = (z, coef)

    def apply(name: str, f: TruncatedSeries) -> TruncatedSeries:
        zvar, coef = fields[name]
        parts = [f.derivative(col) for col in cols]
        if zvar is not None:
            parts.append(f.derivative(zvar))
        pr = meet_all([p.ring for p in parts] + [c.ring for c in coef])
        acc = [(1, mul(c.truncate(pr), p.truncate(pr))) for c, p in zip(coef, parts)]
        if zvar is not None:
            acc.append((1, parts[-1].truncate(pr)))
        return linear_combination(pr, acc)

    f = rho.derivative(zs[i - 1]).derivative(zs[j - 1])
    for name, cnt in _orders(n, derivative).items():
        for _ in range(cnt):
            f = apply(name, f)
    target = sys.phi[i - 1][j - 1]
    for name, cnt in _orders(n, derivative).items():
        target = target.derivative(name, cnt)
    tr = target.ring
    A = [a.truncate(tr) for a in sys.inverse.A]
    B = sys.inverse.B.truncate(tr)
    assignment = {f"a{k}": A[k - 1] for k in range(1, n + 1)}
    assignment["b"] = B
    return substitute(f, assignment, ring=tr)


def phi_jet(sys: PdeSystem, derivative, i: int = 1, j: int = 1, check: bool = True) -> TruncatedSeries:
    """Partial derivative of ``Phi_ij``.

    For systems derived from a germ, jets of order at most three are also
    recomputed through the Cramer-rule recursion and must agree exactly.
    """
    out = sys.phi[i - 1][j - 1]
    orders = _orders(sys.n, derivative)
    for name, cnt in orders.items():
        out = out.derivative(name, cnt)
    if check and sys.rho is not None and sum(orders.values()) <= 3:
        other = cramer_jet(sys, orders, i, j)
        if other != out:
            raise CrossCheckError(f"jet {orders} of Phi_{i}{j} disagrees with the Cramer recursion")
    return out


def total_derivative(sys: PdeSystem, k: int, f: TruncatedSeries) -> TruncatedSeries:
    """``D_k f = f_{z_k} + xi_k f_w + sum_l Phi_lk f_{xi_l}`` (1-based ``k``)."""
    n = sys.n
    ring = f.ring
    xi_k = TruncatedSeries.variable(ring, f"xi{k}") + sys.base_xi[k - 1]
    parts = [f.derivative(f"z{k}"), f.derivative("w")]
    parts += [f.derivative(f"xi{l}") for l in range(1, n + 1)]
    phis = [sys.phi[l - 1][k - 1] for l in range(1, n + 1)]
    pr = meet_all([p.ring for p in parts] + [p.ring for p in phis])
    xi_k = xi_k.truncate(pr)
    acc = [(1, parts[0].truncate(pr)), (1, mul(xi_k, parts[1].truncate(pr)))]
    for l in range(n):
        acc.append((1, mul(phis[l].truncate(pr), parts[2 + l].truncate(pr))))
    return linear_combination(pr, acc)


@dataclass(frozen=True)
class IntegrabilityReport:
    residuals: dict
    order: int

    @property
    def is_zero(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    @property
    def max_norm(self):
        best = 0
        for r in self.residuals.values():
            for _, c in r.terms():
                best = max(best, abs(c.re), abs(c.im))
        return best


def integrability_residual(sys: PdeSystem, order: int | None = None) -> IntegrabilityReport:
    """Compare the two evaluations ``D_k Phi_ij`` and ``D_j Phi_ik`` of each
    third jet ``w_{ijk}``; all residuals vanish for systems coming from a germ."""
    n = sys.n
    out = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                a = total_derivative(sys, k, sys.phi[i - 1][j - 1])
                b = total_derivative(sys, j, sys.phi[i - 1][k - 1])
                ring = a.ring.meet(b.ring)
                if order is not None and order < ring.cap:
                    ring = ring.with_cap(order)
                out[(i, j, k)] = a.truncate(ring) - b.truncate(ring)
    cap = min((r.cap for r in out.values()), default=sys.ring.cap)
    return IntegrabilityReport(out, cap)


def segre_graph(sys: PdeSystem, cap: int) -> TruncatedSeries:
    """The Segre variety ``w(z) = rho(z, 0, 0)`` through the expansion point."""
    if sys.rho is None:
        raise CrembedError("needs a system derived from a germ")
    n = sys.n
    ring = Ring(tuple(z_names(n)), cap)
    zero = {f"a{j}": TruncatedSeries.zero(ring) for j in range(1, n + 1)}
    zero["b"] = TruncatedSeries.zero(ring)
    return substitute(sys.rho, zero, ring=ring)


def segre_residuals(sys: PdeSystem, cap: int) -> dict[tuple[int, int], TruncatedSeries]:
    """``w_{z_i z_j} - Phi_ij(z, w, w_z - xi0)`` along :func:`segre_graph`."""
    n = sys.n
    g = segre_graph(sys, cap + 2)
    target = Ring(tuple(z_names(n)), cap)
    first = [g.derivative(z) for z in z_names(n)]
    assignment = {"w": g.truncate(target)}
    for j in range(n):
        assignment[f"xi{j + 1}"] = (first[j] - sys.base_xi[j]).truncate(target)
    out = {}
    for i in range(n):
        for j in range(i, n):
            lhs = first[i].derivative(f"z{j + 1}").truncate(target)
            rhs = substitute(sys.phi[i][j], assignment, ring=target)
            out[(i + 1, j + 1)] = lhs - rhs
    return out


def segre_ray_residuals(
    sys: PdeSystem, params: Sequence[GaussianRational], cap: int
) -> dict[tuple[int, int], TruncatedSeries]:
    """Residuals of the system along the Segre family ``w = rho(z, t a0, t b0)``.

    ``params`` is ``(a0_1, ..., a0_n, b0)``.  The result is a series in
    ``(z, t)``: its vanishing to ``cap`` means every Segre variety with
    parameters on that ray solves the system to that order.  Everything stays
    at the expansion point, so coefficients remain small.
    """
    if sys.rho is None:
        raise CrembedError("needs a system derived from a germ")
    n = sys.n
    zs = z_names(n)
    if len(params) != n + 1:
        raise ValueError(f"expected {n + 1} Segre parameters")
    big = Ring(tuple(zs) + ("t",), cap + 2)
    t = TruncatedSeries.variable(big, "t")
    assign = {z: TruncatedSeries.variable(big, z) for z in zs}
    for j in range(n):
        assign[f"a{j + 1}"] = t.scale(params[j])
    assign["b"] = t.scale(params[n])
    g = substitute(sys.rho, assign, ring=big)
    target = Ring(big.vars, cap)
    first = [g.derivative(z) for z in zs]
    point = {"w": g.truncate(target)}
    for j in range(n):
        point[f"xi{j + 1}"] = (first[j] - sys.base_xi[j]).truncate(target)
    out = {}
    for i in range(n):
        for j in range(i, n):
            lhs = first[i].derivative(zs[j]).truncate(target)
            out[(i + 1, j + 1)] = lhs - substitute(sys.phi[i][j], point, ring=target)
    return out
