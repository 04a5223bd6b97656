from __future__ import annotations

from typing import Dict, Mapping, Optional

from ..diagnostics import HDDLError
from ..grounding import GroundMethod
from ..model.core import TaskNetwork


class DecompositionError(HDDLError):
    pass


def decompose_step(
    tn: TaskNetwork, i: str, method: GroundMethod, rename: Optional[Mapping[str, str]] = None
) -> TaskNetwork:
    """Replace identifier ``i`` by a renamed copy of the method's network.

    Every predecessor of ``i`` comes before all new identifiers and every
    successor after them; pairs mentioning ``i`` disappear. The new
    identifiers take the place of ``i`` in the listing order. By default
    the method's k-th identifier becomes ``"{i}.{k}"``.
    """
    if i not in tn.alpha:
        raise DecompositionError(f"no task identifier '{i}' in the network")
    if tn.alpha[i] != method.task:
        raise DecompositionError(f"method {method.key} decomposes {method.task}, not {tn.alpha[i]}")
    sub = method.network
    if rename is None:
        rename = {j: f"{i}.{k}" for k, j in enumerate(sub.ids)}
    fresh = [rename[j] for j in sub.ids]
    kept = [x for x in tn.ids if x != i]
    if len(set(fresh)) != len(fresh) or set(fresh) & set(kept):
        raise DecompositionError(f"renaming of {method.key} is not fresh")

    before = {a for a, b in tn.order if b == i}
    after = {b for a, b in tn.order if a == i}
    order = set(tn.order)
    order |= {(rename[a], rename[b]) for a, b in sub.order}
    order |= {(p, m) for p in before for m in fresh}
    order |= {(m, s) for m in fresh for s in after}
    order = {(a, b) for a, b in order if a != i and b != i}

    pos = tn.ids.index(i)
    ids = tuple(kept[:pos]) + tuple(fresh) + tuple(kept[pos:])
    alpha: Dict[str, object] = {x: tn.alpha[x] for x in kept}
    for j in sub.ids:
        alpha[rename[j]] = sub.alpha[j]
    return TaskNetwork(ids, frozenset(order), alpha, tn.vc)
