"""
sampling.py – Seeded random elements, modules and instances
===========================================================

Random instances are built as a·(f·w) = b·((a·f/b)·w) with b a random
divisor of a·f, so they are valid by construction and both refinable and
non-refinable shapes turn up. ``run_sample`` collects outcomes into a
pandas DataFrame (one row per instance) for CSV export.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from psmodules.arith import DomainDescriptor, ImagQuadOrder, Integers, divisors_up_to_units
from psmodules.errors import UnsupportedError
from psmodules.modules import AnyModule, FgModule, LocModuleView, module_from_generators
from psmodules.refine import (
    FOUND,
    UNKNOWN,
    Instance,
    brute_force_refinable,
    find_refinement,
)

log = logging.getLogger(__name__)


def random_element(D: DomainDescriptor, rng: np.random.Generator, norm_bound: int, nonzero: bool = True):
    """Uniform-ish element of norm <= norm_bound."""
    if isinstance(D, Integers):
        while True:
            v = int(rng.integers(-norm_bound, norm_bound + 1))
            if v or not nonzero:
                return v
    if isinstance(D, ImagQuadOrder):
        vmax = math.isqrt(norm_bound // D.m)
        while True:
            v = int(rng.integers(-vmax, vmax + 1))
            umax = math.isqrt(norm_bound - D.m * v * v)
            u = int(rng.integers(-umax, umax + 1))
            e = D.element(u, v)
            if e or not nonzero:
                return e
    raise UnsupportedError(f"no random elements over {D}")


def random_module(
    D: DomainDescriptor,
    rank: int,
    rng: np.random.Generator,
    extra_gens: int = 1,
    entry_bound: int = 6,
) -> FgModule:
    """Nonzero submodule of A^rank on rank + extra_gens random generators."""
    while True:
        gens = [
            tuple(random_element(D, rng, entry_bound, nonzero=False) for _ in range(rank))
            for _ in range(rank + extra_gens)
        ]
        M = module_from_generators(D, rank, gens)
        if M.basis:
            return M


def random_vector(M: AnyModule, rng: np.random.Generator, height: int = 2):
    """Integer combination of the lattice basis; a random S-denominator in M_S."""
    base = M.base if isinstance(M, LocModuleView) else M
    D = base.domain
    coeffs = rng.integers(-height, height + 1, size=len(base.basis))
    v = tuple(D.zero for _ in range(base.rank))
    for k, b in zip(coeffs, base.basis_vectors()):
        v = tuple(D.add(vi, D.mul(D.coerce(int(k)), bi)) for vi, bi in zip(v, b))
    if isinstance(M, LocModuleView):
        exps = tuple(int(e) for e in rng.integers(0, 2, size=len(M.s_generators)))
        return M.make(v, exps)
    return v


def _nonzero_vector(M: AnyModule, rng: np.random.Generator, height: int):
    while True:
        v = random_vector(M, rng, height)
        if not M.is_zero(v):
            return v


def random_instance(M: AnyModule, rng: np.random.Generator, norm_bound: int = 20, height: int = 2) -> Instance:
    """a·(f·w) = b·((a·f/b)·w); scalars are drawn in the base ring."""
    A = M.domain
    D = M.local_domain if isinstance(M, LocModuleView) else A
    a = A.normalize(random_element(A, rng, norm_bound))
    f = random_element(A, rng, norm_bound)
    w = _nonzero_vector(M, rng, height)
    af = A.mul(a, f)
    divs = divisors_up_to_units(A, af)
    b = divs[int(rng.integers(0, len(divs)))]
    units = A.units()
    b = A.mul(units[int(rng.integers(0, len(units)))], b)
    x = M.scale(D.coerce(f), w)
    y = M.scale(D.coerce(A.exact_div(b, af)), w)
    return Instance(D, M, D.coerce(a), D.coerce(b), x, y)


def _row(inst: Instance) -> Dict[str, Any]:
    d = inst.to_dict()
    return {"a": d["a"], "b": d["b"], "x": d["x"], "y": d["y"]}


def run_sample(
    M: AnyModule,
    count: int,
    seed: int,
    norm_bound: int = 20,
    oracle: bool = True,
    out: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """Decide ``count`` random instances; one row each, optional CSV."""
    rng = np.random.default_rng(seed)
    rows: List[Dict[str, Any]] = []
    for _ in range(count):
        inst = random_instance(M, rng, norm_bound)
        cert = find_refinement(inst)
        row = _row(inst)
        row["outcome"] = cert.outcome
        row["method"] = cert.method
        row["candidates"] = len(cert.candidates)
        if oracle and inst.domain.enumerable and cert.outcome != UNKNOWN:
            row["oracle_agrees"] = (brute_force_refinable(inst) is not None) == (cert.outcome == FOUND)
        rows.append(row)
    df = pd.DataFrame(rows)
    if not df.empty:
        log.info(f"sample of {len(df)}: {int((df['outcome'] == FOUND).sum())} found")
    if out is not None:
        df.to_csv(out, index=False)
        log.info(f"sample written to {out}")
    return df
