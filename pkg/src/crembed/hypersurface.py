"""Real hypersurface germs, their complex defining functions and
hyperquadric embedding certificates.

A germ is ``Im w = phi(z, zbar, Re w)`` in normal form: ``phi`` has no
constant or linear part.  Coefficients of ``phi`` live on monomials
``z^alpha c^beta u^k`` where ``c`` stands for ``zbar`` and ``u`` for ``Re w``.
The complex defining function ``rho(z, a, b)`` solves
``rho = u + i phi(z, a, u)`` with ``b = u - i phi(z, a, u)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dsl import parse_polynomial, split_source
from .errors import (
    CapExhaustedError,
    LeviDegenerateError,
    NormalizationError,
    RealityError,
)
from .series import (
    GaussianRational,
    Ring,
    TruncatedSeries,
    det_exact,
    shift_polynomial,
    solve_implicit,
    substitute,
)

DEFAULT_PARSE_CAP = 32
I = GaussianRational(0, 1)


def z_names(n: int) -> list[str]:
    return [f"z{j}" for j in range(1, n + 1)]


def phi_vars(n: int) -> tuple[str, ...]:
    return tuple(z_names(n) + [f"c{j}" for j in range(1, n + 1)] + ["u"])


def rho_vars(n: int) -> tuple[str, ...]:
    return tuple(z_names(n) + [f"a{j}" for j in range(1, n + 1)] + ["b"])


def cert_vars(n: int) -> tuple[str, ...]:
    return tuple(z_names(n) + ["w"])


def _polynomial_in(ring: Ring, s: TruncatedSeries) -> TruncatedSeries:
    """Re-express an exact polynomial in another ring of the same variables."""
    return TruncatedSeries.from_dict(ring, s.to_dict(), strict=False)


def reality_violations(phi: TruncatedSeries, n: int) -> list[tuple[tuple[int, ...], GaussianRational, GaussianRational]]:
    """Monomials whose coefficient is not the conjugate of its mirror's."""
    coeffs = phi.to_dict()
    bad = []
    for exps, c in coeffs.items():
        mirror = exps[n : 2 * n] + exps[:n] + exps[2 * n :]
        other = coeffs.get(mirror, GaussianRational(0))
        if c != other.conjugate():
            bad.append((exps, c, other))
    return bad


@dataclass(frozen=True)
class RealDefining:
    """Normalized real defining function ``phi`` of a germ at the origin.

    ``polynomial`` marks ``phi`` as an exact polynomial (terms above its cap
    vanish), which is what allows exact re-expansion at other points.
    """

    n: int
    phi: TruncatedSeries
    name: str | None = None
    polynomial: bool = True

    def __post_init__(self):
        if self.phi.vars != phi_vars(self.n):
            raise ValueError(f"phi must be a series in {phi_vars(self.n)}")
        for exps, c in self.phi.terms():
            if sum(exps) <= 1:
                raise NormalizationError(
                    f"phi has a constant or linear term {c} at {exps}; normalize first"
                )
        bad = reality_violations(self.phi, self.n)
        if bad:
            exps, c, other = bad[0]
            raise RealityError(
                f"reality fails at monomial {exps}: coefficient {c} is not the conjugate of {other}"
            )

    @property
    def base(self) -> tuple[GaussianRational, ...]:
        return tuple(GaussianRational(0) for _ in range(self.n + 1))

    @property
    def cap(self) -> int:
        return self.phi.cap

    def phi_at(self, cap: int) -> TruncatedSeries:
        ring = Ring(phi_vars(self.n), cap)
        if cap <= self.phi.cap:
            return self.phi.truncate(ring)
        if not self.polynomial:
            raise CapExhaustedError(f"phi is only known to order {self.phi.cap}")
        return _polynomial_in(ring, self.phi)

    def text(self) -> str:
        return str(self.phi)


def parse_defining(text: str, n: int, cap: int = DEFAULT_PARSE_CAP) -> RealDefining:
    """Parse DSL text into a normalized real germ.

    Raises :class:`~crembed.errors.DSLSyntaxError` with a position,
    :class:`RealityError` when the coefficients fail the reality condition and
    :class:`NormalizationError` for constant or linear parts.
    """
    src = split_source(text)
    poly = parse_polynomial(src.body, phi_vars(n), max_power=cap)
    deg = max((sum(e) for e in poly), default=0)
    if deg > cap:
        raise CapExhaustedError(f"polynomial degree {deg} exceeds the cap {cap}")
    ring = Ring(phi_vars(n), max(deg, 2))
    phi = TruncatedSeries.from_dict(ring, poly)
    return RealDefining(n, phi, name=src.name, polynomial=True)


def germ_from_dict(n: int, coeffs, name: str | None = None) -> RealDefining:
    deg = max((sum(e) for e in coeffs), default=2)
    ring = Ring(phi_vars(n), max(deg, 2))
    return RealDefining(n, TruncatedSeries.from_dict(ring, coeffs), name=name)


# ---------------------------------------------------------------------------
# complexification


@dataclass(frozen=True)
class ComplexDefining:
    """``rho(z, a, b)`` with the ring it is known in.

    ``source`` is the complexified ``phi`` (possibly non-real, e.g. after
    re-centering) when it is an exact polynomial; it lets callers rebuild
    ``rho`` to any order.
    """

    n: int
    rho: TruncatedSeries
    source: TruncatedSeries | None = field(default=None, compare=False)

    @property
    def ring(self) -> Ring:
        return self.rho.ring


def rho_ring(n: int, cap: int, z_cap: int | None = None) -> Ring:
    groups = [(z_names(n), z_cap)] if z_cap is not None else []
    return Ring(rho_vars(n), cap, groups)


def complexify(
    phi: TruncatedSeries, n: int, cap: int, z_cap: int | None = None, polynomial: bool = True
) -> ComplexDefining:
    """Solve ``b = u - i phi(z, a, u)`` for ``u`` and return ``rho = 2u - b``.

    ``phi`` may be any (complex) series with zero constant term; the base
    point needs ``1 - i phi_u(0) != 0``.
    """
    target = rho_ring(n, cap, z_cap)
    names = z_names(n)
    groups = [(names, z_cap)] if z_cap is not None else []
    eq_ring = Ring(rho_vars(n) + ("u",), cap, groups)
    rename = {f"c{j}": f"a{j}" for j in range(1, n + 1)}
    phi_a = phi.rename(rename)
    # reorder variables: (z, a, u) -> (z, a, b, u)
    if polynomial:
        coeffs = {}
        for exps, c in phi_a.terms():
            coeffs[exps[: 2 * n] + (0,) + exps[2 * n :]] = c
        phi_e = TruncatedSeries.from_dict(eq_ring, coeffs, strict=False)
    else:
        phi_e = phi_a.embed(eq_ring)
    u = TruncatedSeries.variable(eq_ring, "u")
    b = TruncatedSeries.variable(eq_ring, "b")
    eq = b - u + phi_e.scale(I)
    sol = solve_implicit([eq], ["u"], target)
    rho = sol["u"].scale(2) - TruncatedSeries.variable(target, "b")
    src = phi if polynomial else None
    return ComplexDefining(n, rho, source=src)


def real_to_complex(h: RealDefining, cap: int | None = None, z_cap: int | None = None) -> ComplexDefining:
    cap = h.phi.cap if cap is None else cap
    phi = h.phi_at(cap) if not h.polynomial else h.phi
    return complexify(phi, h.n, cap, z_cap, polynomial=h.polynomial)


def shift_germ(phi: TruncatedSeries, shift: dict[str, GaussianRational]) -> TruncatedSeries:
    """Exact re-expansion ``phi(. + shift) - phi(shift)`` of a polynomial."""
    moved = shift_polynomial(phi, shift)
    c0 = moved.constant_term()
    return moved - c0 if c0 else moved


def levi_matrix(rho: TruncatedSeries, n: int) -> list[list[TruncatedSeries]]:
    """Rows ``(rho, rho_z1, ..., rho_zn)``, columns ``(d/db, d/da1, ..., d/dan)``."""
    rows = [rho] + [rho.derivative(z) for z in z_names(n)]
    cols = ["b"] + [f"a{j}" for j in range(1, n + 1)]
    return [[r.derivative(c) for c in cols] for r in rows]


def levi_determinant(r: ComplexDefining, at: Sequence | None = None) -> GaussianRational:
    """Levi determinant of ``(z, a, b) -> (z, rho, rho_z)``.

    The sphere ``rho = b + 2i z a`` gives ``2i``.  Evaluation away from the
    origin uses the stored polynomial and is exact only for exact data.
    """
    mat = levi_matrix(r.rho, r.n)
    if at is None:
        vals = [[e.constant_term() for e in row] for row in mat]
    else:
        vals = [[e.evaluate(at) for e in row] for row in mat]
    return det_exact(vals)


def require_levi_nondegenerate(r: ComplexDefining) -> GaussianRational:
    d = levi_determinant(r)
    if not d:
        raise LeviDegenerateError("Levi form is degenerate at the base point", d)
    return d


def reality_residual(r: ComplexDefining) -> TruncatedSeries:
    """``conj(rho)(a, z, rho(z, a, b)) - b``; vanishes for real germs."""
    n = r.n
    ring = r.rho.ring
    rho_bar = r.rho.conjugate_coefficients()
    assignment = {}
    for j in range(1, n + 1):
        assignment[f"z{j}"] = TruncatedSeries.variable(ring, f"a{j}")
        assignment[f"a{j}"] = TruncatedSeries.variable(ring, f"z{j}")
    assignment["b"] = r.rho
    return substitute(rho_bar, assignment, ring=ring) - TruncatedSeries.variable(ring, "b")


def phi_from_rho(r: ComplexDefining, cap: int | None = None) -> TruncatedSeries:
    """Recover ``phi`` by solving ``u + i v = rho(z, c, u - i v)`` for ``v``."""
    n = r.n
    cap = r.rho.cap if cap is None else cap
    target = Ring(phi_vars(n), cap)
    ring = Ring(phi_vars(n) + ("v",), cap)
    u = TruncatedSeries.variable(ring, "u")
    v = TruncatedSeries.variable(ring, "v")
    assignment = {f"z{j}": TruncatedSeries.variable(ring, f"z{j}") for j in range(1, n + 1)}
    assignment.update({f"a{j}": TruncatedSeries.variable(ring, f"c{j}") for j in range(1, n + 1)})
    assignment["b"] = u - v.scale(I)
    rho = r.rho if not r.rho.ring.groups else r.rho
    eq = substitute(rho, assignment, ring=ring) - u - v.scale(I)
    return solve_implicit([eq], ["v"], target)["v"]


def rho_b_identity_residual(h: RealDefining, r: ComplexDefining, cap: int) -> TruncatedSeries:
    """``rho_b(z, a, b) - (1 + i phi_u)/(1 - i phi_u)`` evaluated at ``u = U(z, a, b)``."""
    n = h.n
    target = rho_ring(n, cap)
    rho = r.rho.truncate(r.rho.ring.with_cap(cap + 1)) if r.rho.cap > cap + 1 else r.rho
    rho_b = rho.derivative("b").truncate(target)
    u_series = (rho + TruncatedSeries.variable(rho.ring, "b")).scale(Fraction(1, 2))
    u_series = u_series.truncate(target)
    phi_u = h.phi_at(cap + 1).derivative("u")
    assignment = {f"z{j}": TruncatedSeries.variable(target, f"z{j}") for j in range(1, n + 1)}
    assignment.update({f"c{j}": TruncatedSeries.variable(target, f"a{j}") for j in range(1, n + 1)})
    assignment["u"] = u_series
    pu = substitute(phi_u, assignment, ring=target, polynomial=h.polynomial)
    ratio = (1 + pu.scale(I)) / (1 - pu.scale(I))
    return rho_b - ratio


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class EmbeddingCertificate:
    """Candidate map ``(f_1, ..., f_m, g)`` into the hyperquadric
    ``Im g = -sum_{j<=l} |f_j|^2 + sum_{j>l} |f_j|^2``.

    Components are series in ``(z1, ..., zn, w)``.
    """

    m: int
    signature_l: int
    components: tuple[TruncatedSeries, ...]
    polynomial: bool = True

    def __post_init__(self):
        if len(self.components) != self.m + 1:
            raise ValueError("a certificate needs m + 1 components (f_1..f_m, g)")
        if not 0 <= self.signature_l <= self.m:
            raise ValueError("signature must satisfy 0 <= l <= m")
        vs = {c.vars for c in self.components}
        if len(vs) != 1:
            raise ValueError("certificate components must share variables")

    @property
    def n(self) -> int:
        return len(self.components[0].vars) - 1


def certificate_from_text(n: int, m: int, l: int, texts: Sequence[str]) -> EmbeddingCertificate:
    comps = []
    for t in texts:
        poly = parse_polynomial(t, cert_vars(n))
        deg = max((sum(e) for e in poly), default=1)
        comps.append(TruncatedSeries.from_dict(Ring(cert_vars(n), max(deg, 1)), poly))
    return EmbeddingCertificate(m, l, tuple(comps))


def _compose_component(f: TruncatedSeries, n: int, w_value: TruncatedSeries, conj: bool, polynomial: bool):
    ring = w_value.ring
    if conj:
        f = f.conjugate_coefficients()
    if polynomial and f.cap < ring.cap:
        f = TruncatedSeries.from_dict(Ring(f.vars, ring.cap), f.to_dict())
    assignment = {}
    for j in range(1, n + 1):
        name = f"c{j}" if conj else f"z{j}"
        assignment[f"z{j}"] = TruncatedSeries.variable(ring, name)
    assignment["w"] = w_value
    return substitute(f, assignment, ring=ring, polynomial=False)


def certificate_residual(h: RealDefining, cert: EmbeddingCertificate, order: int) -> TruncatedSeries:
    """``(g - gbar)/(2i) - sum_j sign_j f_j fbar_j`` on the germ, to ``order``."""
    n = h.n
    if cert.n != n:
        raise ValueError("certificate and germ dimensions differ")
    ring = Ring(phi_vars(n), order)
    phi = h.phi_at(order)
    u = TruncatedSeries.variable(ring, "u")
    w = u + phi.scale(I)
    wbar = u - phi.scale(I)
    comps = [_compose_component(c, n, w, False, cert.polynomial) for c in cert.components]
    bars = [_compose_component(c, n, wbar, True, cert.polynomial) for c in cert.components]
    g, gbar = comps[-1], bars[-1]
    res = (g - gbar).scale(GaussianRational(0, -1) / 2)
    for j in range(cert.m):
        sign = -1 if j < cert.signature_l else 1
        term = comps[j] * bars[j]
        res = res - term if sign > 0 else res + term
    return res


def verify_certificate(h: RealDefining, cert: EmbeddingCertificate, order: int) -> bool:
    """True when the certificate maps the germ into its hyperquadric to ``order``."""
    return certificate_residual(h, cert, order).is_zero()


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    germ: RealDefining
    certificate: EmbeddingCertificate | None
    note: str = ""


def _abs_power_sum(n_powers: Sequence[int]) -> dict:
    return {(k, k, 0): 1 for k in n_powers}


def random_germ(n: int = 1, degree: int = 4, seed: int = 0, with_u: bool = True, density: float = 0.35) -> RealDefining:
    """Seeded random real polynomial germ ``sum |z_j|^2 + higher order``."""
    rng = random.Random(seed)
    nv = 2 * n + 1
    coeffs: dict[tuple[int, ...], GaussianRational] = {}
    for j in range(n):
        e = [0] * nv
        e[j] = 1
        e[n + j] = 1
        coeffs[tuple(e)] = GaussianRational(1)

    def monos(total, pos):
        if pos == nv - 1:
            yield (total,)
            return
        for e in range(total, -1, -1):
            for rest in monos(total - e, pos + 1):
                yield (e,) + rest

    def rnd() -> Fraction:
        return Fraction(rng.randint(-5, 5), rng.randint(1, 5))

    for d in range(3, degree + 1):
        for e in monos(d, 0):
            if not with_u and e[-1]:
                continue
            mirror = e[n : 2 * n] + e[:n] + e[2 * n :]
            if e in coeffs or mirror in coeffs:
                continue
            if rng.random() > density:
                continue
            if mirror == e:
                c = GaussianRational(rnd())
            else:
                c = GaussianRational(rnd(), rnd())
            if not c:
                continue
            coeffs[e] = c
            if mirror != e:
                coeffs[mirror] = c.conjugate()
    return germ_from_dict(n, coeffs, name=f"random_n{n}_deg{degree}_seed{seed}")


def _quadric(n: int, l: int) -> CorpusEntry:
    coeffs = {}
    for j in range(n):
        e = [0] * (2 * n + 1)
        e[j] = 1
        e[n + j] = 1
        coeffs[tuple(e)] = -1 if j < l else 1
    name = "sphere" if (n, l) == (1, 0) else f"quadric_n{n}_l{l}"
    germ = germ_from_dict(n, coeffs, name=name)
    ring = Ring(cert_vars(n), 1)
    comps = []
    for j in range(n):
        e = [0] * (n + 1)
        e[j] = 1
        comps.append(TruncatedSeries.from_dict(ring, {tuple(e): 1}))
    comps.append(TruncatedSeries.variable(ring, "w"))
    cert = EmbeddingCertificate(n, l, tuple(comps))
    return CorpusEntry(name, germ, cert, note="hyperquadric")


def _abs_family(k: int) -> CorpusEntry:
    name = f"abs2_{2 * k}"
    germ = germ_from_dict(1, _abs_power_sum([1, k]), name=name)
    ring = Ring(cert_vars(1), k)
    cert = EmbeddingCertificate(
        2,
        0,
        (
            TruncatedSeries.from_dict(ring, {(1, 0): 1}),
            TruncatedSeries.from_dict(ring, {(k, 0): 1}),
            TruncatedSeries.from_dict(ring, {(0, 1): 1}),
        ),
    )
    return CorpusEntry(name, germ, cert, note=f"|z|^2 + |z|^{2 * k} into a quadric of dimension 3")


def abs_2_4_6() -> RealDefining:
    return germ_from_dict(1, _abs_power_sum([1, 2, 3]), name="abs2_4_6")


def corpus(random_count: int = 1, random_degree: int = 4, random_seed: int = 0) -> list[CorpusEntry]:
    """Standard germs with known embedding certificates, the uncertified
    ``|z|^2 + |z|^4 + |z|^6`` and seeded random germs."""
    out = [_quadric(1, 0), _quadric(1, 1), _quadric(2, 0), _quadric(2, 1), _quadric(2, 2)]
    out += [_abs_family(k) for k in (2, 3, 4)]
    out.append(CorpusEntry("abs2_4_6", abs_2_4_6(), None, note="no certificate known"))
    for t in range(random_count):
        g = random_germ(1, random_degree, random_seed + t)
        out.append(CorpusEntry(g.name, g, None, note="random"))
    return out


def corpus_entry(name: str) -> CorpusEntry:
    for e in corpus():
        if e.name == name:
            return e
    raise KeyError(name)
