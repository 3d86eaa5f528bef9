"""Desk-scale corpora: every separated category on a few points, every functor.

Carriers use a fixed label alphabet so that two corpora over the same
quantale agree object-for-object.  Enumeration is a full scan of structure
matrices filtered through the category laws; the only shortcut is that
diagonal entries are drawn from the up-set of the unit, which reflexivity
forces anyway.
"""

import itertools

from .category import TVCategory, TVFunctor, check_category, is_functor, \
    is_separated
from .core import FinSet, Fn, InputError
from .quantale import VRelation

CORPUS_LABELS = ("a", "b", "c", "d")


def seed_categories(M, max_size: int) -> list:
    """All separated categories with carriers up to max_size, smallest first."""
    if max_size >= len(CORPUS_LABELS):
        raise InputError("corpus carriers stop at %d points"
                         % len(CORPUS_LABELS))
    q = M.q
    diag = [v for v in range(q.n) if q.leq_m[q.unit][v]]
    out = []
    for n in range(max_size + 1):
        X = FinSet(CORPUS_LABELS[:n])
        tx = M.T_obj(X)
        cells = [diag if i == j else range(q.n)
                 for i in range(n) for j in range(n)]
        kept = 0
        for combo in itertools.product(*cells):
            rel = VRelation(q, tx, X,
                            (combo[i * n:(i + 1) * n] for i in range(n)))
            C = TVCategory(M, X, rel, "c%d_%02d" % (n, kept))
            if check_category(C).ok and is_separated(C):
                out.append(C)
                kept += 1
    return out


def seed_functors(cats) -> list:
    """Every functor between every ordered pair of corpus categories."""
    out = []
    for C in cats:
        for D in cats:
            kept = 0
            for table in itertools.product(range(len(D.carrier)),
                                           repeat=len(C.carrier)):
                fn = Fn(C.carrier, D.carrier, table)
                if is_functor(C, D, fn):
                    out.append(TVFunctor(C, D, fn, "%s>%s#%d"
                                         % (C.name, D.name, kept)))
                    kept += 1
    return out


def seed_corpus(M, max_size: int):
    cats = seed_categories(M, max_size)
    return cats, seed_functors(cats)


def _relabelled(rows, p):
    return tuple(tuple(rows[p[i]][p[j]] for j in range(len(p)))
                 for i in range(len(p)))


def arrow_iso_key(f: TVFunctor):
    """Canonical form of an arrow under relabelling of both carriers.

    Two functors with the same key differ by a pair of bijections, so any
    relabelling-invariant suite (all of the law suites are) has the same
    outcome on both.
    """
    ns, nd = len(f.src.carrier), len(f.dst.carrier)
    best = None
    for ps in itertools.permutations(range(ns)):
        a = _relabelled(f.src.structure.rows, ps)
        for pd in itertools.permutations(range(nd)):
            inv = {old: new for new, old in enumerate(pd)}
            key = (a, _relabelled(f.dst.structure.rows, pd),
                   tuple(inv[f.fn.table[ps[i]]] for i in range(ns)))
            if best is None or key < best:
                best = key
    return (ns, nd) + best


def iso_representatives(fns) -> list:
    """One functor per relabelling class, first in corpus order wins."""
    seen = set()
    reps = []
    for f in fns:
        k = arrow_iso_key(f)
        if k not in seen:
            seen.add(k)
            reps.append(f)
    return reps
