"""Choosing the derivative multi-indices of the operator rows.

For ``n = 1`` the rows are forced to be successive ``xi``-derivatives.  In
more variables we pick, greedily and in graded order, multi-indices whose
rows raise the rank of the matrix built on a seeded random formal system.
Since a random system is generic with overwhelming probability, a choice
that gives full rank there gives an operator that is not identically zero.
Found choices are cached in a versioned JSON table shipped with the package.
"""

from __future__ import annotations

import json
import os
import random
from functools import lru_cache
from importlib import resources
from math import factorial
from pathlib import Path
from typing import Sequence

from ..assoc_pde import PdeSystem, pde_vars
from ..errors import GammaSearchError, GammaTableError
from ..prolong import JetMonomial, multi_indices
from ..series import GaussianRational, Ring
from .matrix import build_row0
from .operator import MultiIndex, ObstructionSpec, default_basis, wronskian_gammas

TABLE_VERSION = "1"
TABLE_FILE = "gamma_table.json"


def trial_system(n: int, cap: int, jet_cap: int, seed: int = 0, height: int = 9) -> PdeSystem:
    """Dense random polynomial system with small integer coefficients and a
    random nonzero base value of ``xi``."""
    rng = random.Random(seed)
    ring = Ring(pde_vars(n), cap, [(pde_vars(n)[: n + 1], jet_cap)])
    entries = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            coeffs = {}
            for e in ring.monomials():
                c = rng.randint(-height, height)
                if c:
                    coeffs[e] = GaussianRational(c)
            entries[(i, j)] = coeffs
    base = [GaussianRational(rng.randint(1, height), rng.randint(-height, height)) for _ in range(n)]
    return PdeSystem.formal(n, entries, cap, jet_cap, base_xi=base)


class _Echelon:
    """Incrementally maintained row echelon form over ``Q(i)``."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[tuple[int, list[GaussianRational]]] = []

    def reduce(self, row: Sequence[GaussianRational]) -> list[GaussianRational]:
        row = list(row)
        for piv, r in self.rows:
            c = row[piv]
            if c:
                row = [a - c * b for a, b in zip(row, r)]
        return row

    def try_add(self, row: Sequence[GaussianRational]) -> bool:
        red = self.reduce(row)
        piv = next((i for i, c in enumerate(red) if c), None)
        if piv is None:
            return False
        inv = red[piv].inverse()
        red = [c * inv for c in red]
        self.rows.append((piv, red))
        return True

    @property
    def rank(self) -> int:
        return len(self.rows)


def _derivative_row(row0, gamma: MultiIndex) -> list[GaussianRational]:
    """``d^gamma/dxi^gamma`` of each entry at the expansion point."""
    n = len(gamma)
    exps = (0,) * (n + 1) + tuple(gamma)
    scale = 1
    for g in gamma:
        scale *= factorial(g)
    return [e.coeff(exps) * scale for e in row0]


def _greedy(row0, n: int, s: int, top: int) -> tuple[list[MultiIndex], int]:
    candidates = [g for d in range(1, top + 1) for g in multi_indices(n, d)]
    ech = _Echelon(s + 1)
    if not ech.try_add([e.constant_term() for e in row0]):
        return [], 0
    chosen: list[MultiIndex] = []
    for j in range(1, s + 1):
        for g in candidates:
            if sum(g) > j:
                break
            if g in chosen:
                continue
            if ech.try_add(_derivative_row(row0, g)):
                chosen.append(g)
                break
        else:
            break
    return chosen, ech.rank


def search_gammas(
    n: int,
    m: int,
    alphas: Sequence[MultiIndex],
    basis: Sequence[JetMonomial],
    seed: int = 0,
    budget: int = 3,
    trial: PdeSystem | None = None,
) -> tuple[MultiIndex, ...]:
    """Greedy rank-increasing choice of ``gamma^1..gamma^s``.

    Candidates for the ``j``-th row are multi-indices with ``1 <= |gamma| <= j``
    in graded order (lexicographically descending within a degree) that
    were not used before.  Each of the ``budget`` attempts uses a fresh
    random trial system (or the given ``trial`` system) and allows higher
    derivative orders than the previous one.  Failure raises
    :class:`GammaSearchError` carrying the best rank reached; it does not
    prove that no choice exists.
    """
    s = len(basis) - 1
    k = m - n + 1
    probe = ObstructionSpec(
        n, m, tuple(map(tuple, alphas)), tuple(((j,) + (0,) * (n - 1)) for j in range(1, s + 1)), tuple(basis)
    )
    low = 1
    while sum(len(multi_indices(n, d)) for d in range(1, low + 1)) < s:
        low += 1
    best = 0
    for attempt in range(budget):
        top = s if n == 1 else min(s, low + 2 * attempt + 1)
        if trial is not None:
            sys = trial
            top = min(top, sys.ring.cap - (k - 1))
        else:
            sys = trial_system(n, top + k - 1, k - 1, seed=seed + attempt)
        chosen, rank = _greedy(build_row0(probe, sys), n, s, top)
        best = max(best, rank)
        if len(chosen) == s:
            return tuple(chosen)
    raise GammaSearchError(
        f"no admissible derivative rows found for n={n}, m={m}, alphas={list(alphas)}: "
        f"best rank {best} of {s + 1} after {budget} attempts",
        best,
    )


# ---------------------------------------------------------------------------
# table


def _key(n: int, m: int, alphas: Sequence[MultiIndex], basis_kind: str) -> str:
    return f"{n}|{m}|{';'.join(','.join(map(str, a)) for a in alphas)}|{basis_kind}"


def _default_table_path() -> Path:
    return Path(str(resources.files("crembed.obstruction") / "data" / TABLE_FILE))


def table_path() -> Path:
    """The shipped table, unless ``CREMBED_GAMMA_TABLE`` names another file."""
    override = os.environ.get("CREMBED_GAMMA_TABLE")
    return Path(override) if override else _default_table_path()


def validate_table(data: dict) -> dict:
    if not isinstance(data, dict) or data.get("version") != TABLE_VERSION:
        raise GammaTableError(f"expected a derivative table of version {TABLE_VERSION}")
    entries = data.get("entries")
    if not isinstance(entries, dict):
        raise GammaTableError("table has no entries")
    for key, entry in entries.items():
        try:
            n = int(key.split("|")[0])
            gammas = [tuple(g) for g in entry["gammas"]]
            basis = entry["basis"]
        except (KeyError, ValueError, TypeError) as exc:
            raise GammaTableError(f"malformed entry {key!r}") from exc
        if len(gammas) != len(basis) - 1 or any(len(g) != n for g in gammas):
            raise GammaTableError(f"entry {key!r} has inconsistent sizes")
        for j, g in enumerate(gammas, start=1):
            if any(not isinstance(x, int) or x < 0 for x in g) or not 1 <= sum(g) <= j:
                raise GammaTableError(f"entry {key!r}: derivative row {j} is {list(g)}")
        if len(set(gammas)) != len(gammas):
            raise GammaTableError(f"entry {key!r} repeats a derivative row")
    return data


def load_table(path: str | Path | None = None) -> dict:
    return _load(str(path or table_path()))


@lru_cache(maxsize=None)
def _load(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise GammaTableError(f"derivative table {p} does not exist")
    try:
        data = json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GammaTableError(f"{p}: {exc}") from exc
    return validate_table(data)


def table_entry(n: int, m: int, alphas: Sequence[MultiIndex], basis_kind: str, basis: Sequence[JetMonomial]):
    entry = load_table()["entries"].get(_key(n, m, alphas, basis_kind))
    if entry is None:
        return None
    if entry["basis"] != [b.label() for b in basis]:
        raise GammaTableError(f"cached basis for {_key(n, m, alphas, basis_kind)} does not match")
    return tuple(tuple(g) for g in entry["gammas"])


def make_spec(n: int, m: int, alphas: Sequence[MultiIndex], search: bool = True, seed: int = 0) -> ObstructionSpec:
    """Operator for the given rows, with basis and derivative rows filled in
    from the table (or searched for when missing and ``search`` is set)."""
    alphas = tuple(tuple(a) for a in alphas)
    kind, basis = default_basis(n, alphas)
    gammas = table_entry(n, m, alphas, kind, basis)
    source = "table"
    if gammas is None:
        if not search:
            raise GammaTableError(f"no cached derivative rows for {_key(n, m, alphas, kind)}")
        gammas = search_gammas(n, m, alphas, basis, seed=seed) if n > 1 else wronskian_gammas(len(basis) - 1)
        source = "search"
    return ObstructionSpec(n, m, alphas, gammas, tuple(basis), kind, meta={"gamma_source": source})


def build_table(pairs: Sequence[tuple[int, int]], seed: int = 0) -> dict:
    from .operator import enumerate_alpha_choices

    entries = {}
    for n, m in pairs:
        for alphas in enumerate_alpha_choices(n, m):
            kind, basis = default_basis(n, alphas)
            gammas = search_gammas(n, m, alphas, basis, seed=seed)
            entries[_key(n, m, alphas, kind)] = {
                "basis": [b.label() for b in basis],
                "gammas": [list(g) for g in gammas],
            }
    return {"version": TABLE_VERSION, "seed": seed, "entries": entries}


def main(argv: Sequence[str] | None = None) -> None:
    """Regenerate the shipped table: ``python3 -m crembed.obstruction.gammas``."""
    import argparse

    ap = argparse.ArgumentParser(description=main.__doc__)
    ap.add_argument("--pairs", default="1:1,1:2,2:2")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--output", default=str(_default_table_path()))
    args = ap.parse_args(argv)
    pairs = [tuple(int(x) for x in p.split(":")) for p in args.pairs.split(",")]
    table = build_table(pairs, args.seed)
    Path(args.output).write_text(json.dumps(table, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
