"""Invariant suite behind ``crembed selfcheck``."""

from __future__ import annotations

import random
import time
import traceback
from typing import Callable

from .assoc_pde import HypersurfaceSource
from .bounds import mu_of, nu_of, p_of, s_bound
from .hypersurface import corpus, corpus_entry, verify_certificate
from .obstruction.gammas import load_table, make_spec, search_gammas, table_entry
from .obstruction.matrix import build_matrix, build_row0, caps_for, pq_row0_direct
from .obstruction.operator import default_basis
from .obstruction.pipeline import OBSTRUCTED, full_pipeline, unique_alpha_sets
from .prolong import multi_indices_up_to, prolongation_poly
from .wronskian import extract_dependence, fibre_family

PQ = ((1,), (2,), (3,))


def check_gamma_table(quick: bool, seed: int) -> str:
    table = load_table()
    pairs = [(1, 1), (1, 2), (2, 2)] if quick else [(1, 1), (1, 2), (2, 2), (3, 3)]
    for n, m in pairs:
        for alphas in unique_alpha_sets(n, m):
            kind, basis = default_basis(n, alphas)
            cached = table_entry(n, m, alphas, kind, basis)
            if cached is None:
                raise AssertionError(f"no entry for n={n}, m={m}, alphas={alphas}")
            found = search_gammas(n, m, alphas, basis, seed=table.get("seed", 0))
            if found != cached:
                raise AssertionError(f"entry for {alphas} differs from a fresh search")
    return f"{len(table['entries'])} entries, version {table['version']}"


def check_bounds(quick: bool, seed: int) -> str:
    assert p_of(2, 1) == 3 and p_of(2, 2) == 5 and p_of(1, 1) == 2
    assert s_bound(2, 1) == 84 and s_bound(1, 1) == 10 and s_bound(2, 2) == 462
    assert nu_of(1, 2) == 87 and nu_of(1, 1) == 12
    for n in range(1, 7):
        for N in range(n, 7):
            assert mu_of(n, N) == nu_of(n, N)
    return "bound arithmetic exact"


def check_prolongation_degree(quick: bool, seed: int) -> str:
    top = 4 if quick else 5
    count = 0
    for n in range(1, 4):
        for beta in multi_indices_up_to(n, top, 2):
            q = prolongation_poly(beta)
            if q.degree() > sum(beta) - 1:
                raise AssertionError(f"deg Q_{beta} = {q.degree()}")
            count += 1
    return f"{count} universal polynomials within the degree bound"


def check_certificates(quick: bool, seed: int) -> str:
    order = 6 if quick else 10
    names = []
    for e in corpus():
        if e.certificate is not None:
            if not verify_certificate(e.germ, e.certificate, order):
                raise AssertionError(f"certificate of {e.name} fails to order {order}")
            names.append(e.name)
    return f"{len(names)} certificates verified to order {order}"


def check_soundness(quick: bool, seed: int) -> str:
    samples, order = (3, 2) if quick else (20, 4)
    names = ["sphere", "abs2_4"] if quick else [
        "sphere", "quadric_n1_l1", "quadric_n2_l0", "quadric_n2_l1", "quadric_n2_l2", "abs2_4", "abs2_6"
    ]
    for name in names:
        e = corpus_entry(name)
        if e.certificate.m > 2:
            continue
        v = full_pipeline(e.germ, 2, order=order, samples=samples, seed=seed)
        if v.conclusion == OBSTRUCTED:
            raise AssertionError(f"{name} is certified embeddable but was reported obstructed")
    return f"{len(names)} certified germs, {samples} samples, series order {order}"


def check_agreement(quick: bool, seed: int) -> str:
    spec = make_spec(1, 2, PQ)
    cap, jet = caps_for(spec)
    names = ["sphere", "abs2_4"] if quick else [e.name for e in corpus() if e.germ.n == 1]
    for name in names:
        src = HypersurfaceSource(corpus_entry(name).germ)
        sys = src.system(src.origin(), cap, jet)
        generic = build_matrix(spec, sys)
        direct = build_matrix(spec, sys, pq_row0_direct(sys))
        if generic.rows != direct.rows:
            raise AssertionError(f"matrices differ on {name}")
    return f"{len(names)} germs agree entry by entry"


def check_oracle(quick: bool, seed: int) -> str:
    spec = make_spec(1, 2, PQ)
    src = HypersurfaceSource(corpus_entry("abs2_4").germ)
    point = src.random_point(random.Random(seed))
    sys = src.system(point, 20, 1)
    lam = extract_dependence(fibre_family(build_row0(spec, sys), 1), None, max_level=17, with_values=True)
    if lam is None:
        raise AssertionError("no constant annihilator found for a certified germ")
    return "constant annihilator of the row-0 functions found"


CHECKS: list[tuple[str, Callable[[bool, int], str]]] = [
    ("gamma-table", check_gamma_table),
    ("bounds", check_bounds),
    ("prolongation-degree", check_prolongation_degree),
    ("certificates", check_certificates),
    ("soundness", check_soundness),
    ("specialized-generic-agreement", check_agreement),
    ("wronskian-oracle", check_oracle),
]


def run_selfcheck(quick: bool = False, seed: int = 0) -> list[dict]:
    out = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            detail = fn(quick, seed)
            passed = True
        except Exception as exc:  # every failure is reported, none aborts the suite
            passed = False
            detail = f"{type(exc).__name__}: {exc}"
            if not str(exc):
                detail += " " + traceback.format_exc(limit=1).strip().splitlines()[-1]
        out.append({"name": name, "passed": passed, "detail": detail, "seconds": round(time.perf_counter() - start, 2)})
    return out
