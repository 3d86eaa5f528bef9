"""Commutative unital quantales on finite carriers, and relations valued in them.

A quantale here is a finite complete lattice with a commutative monoid
structure that distributes over joins.  All operations are exact table
lookups over a canonical element order; no floating point anywhere.
The internal hom is always recomputed from the tensor by scanning, never
trusted from input (an input hom table is validated against the scan).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from .core import EngineError, FinSet, Fn, InputError, ValidationError
from .report import LawReport

BUILTIN_NAMES = ("boolean", "truncated_chain", "lukasiewicz_chain", "powerset_frame")


def _closure(n: int, leq: list[list[bool]]) -> None:
    """Reflexive-transitive closure, in place."""
    for i in range(n):
        leq[i][i] = True
    for k in range(n):
        rk = leq[k]
        for i in range(n):
            if leq[i][k]:
                ri = leq[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True


class Quantale:
    """Finite commutative unital quantale with precomputed operation tables.

    Elements are addressed by index into `elements`; the string names only
    matter at the I/O boundary.  Constructed through `build_quantale` or one
    of the builtin helpers, which validate every law first.
    """

    __slots__ = ("elements", "n", "leq_m", "tensor_m", "unit", "bottom", "top",
                 "join_m", "meet_m", "hom_m", "_vset")

    def __init__(self, elements, leq_m, tensor_m, unit, join_m, meet_m, hom_m,
                 bottom, top):
        self.elements = tuple(elements)
        self.n = len(self.elements)
        self.leq_m = leq_m
        self.tensor_m = tensor_m
        self.unit = unit
        self.join_m = join_m
        self.meet_m = meet_m
        self.hom_m = hom_m
        self.bottom = bottom
        self.top = top
        self._vset = FinSet(self.elements)

    # -- index-level operations ------------------------------------------

    def leq_ix(self, a: int, b: int) -> bool:
        return self.leq_m[a][b]

    def tensor_ix(self, a: int, b: int) -> int:
        return self.tensor_m[a][b]

    def join_ix(self, a: int, b: int) -> int:
        return self.join_m[a][b]

    def meet_ix(self, a: int, b: int) -> int:
        return self.meet_m[a][b]

    def hom_ix(self, a: int, b: int) -> int:
        return self.hom_m[a][b]

    def join_all(self, items: Iterable[int]) -> int:
        acc = self.bottom
        jm, top = self.join_m, self.top
        for v in items:
            acc = jm[acc][v]
            if acc == top:
                return top
        return acc

    def meet_all(self, items: Iterable[int]) -> int:
        acc = self.top
        mm, bottom = self.meet_m, self.bottom
        for v in items:
            acc = mm[acc][v]
            if acc == bottom:
                return bottom
        return acc

    # -- name-level conveniences ------------------------------------------

    def index_of(self, name: str) -> int:
        try:
            return self.elements.index(name)
        except ValueError:
            raise InputError("unknown quantale element %r (have %r)"
                             % (name, self.elements))

    def name(self, i: int) -> str:
        return self.elements[i]

    def leq(self, a: str, b: str) -> bool:
        return self.leq_m[self.index_of(a)][self.index_of(b)]

    def tensor(self, a: str, b: str) -> str:
        return self.elements[self.tensor_m[self.index_of(a)][self.index_of(b)]]

    def hom(self, a: str, b: str) -> str:
        return self.elements[self.hom_m[self.index_of(a)][self.index_of(b)]]

    def carrier(self) -> FinSet:
        return self._vset

    def __repr__(self) -> str:
        return "Quantale(%s; unit=%s)" % (",".join(self.elements),
                                          self.elements[self.unit])


# ---------------------------------------------------------------------------
# raw table validation
# ---------------------------------------------------------------------------

def _scan_laws(elements: Sequence[str], leq_pairs, tensor: dict, unit: int,
               rep: LawReport, hom_given=None) -> dict | None:
    """Run every quantale law over raw tables, recording one check per law.

    Returns the derived tables when the scan ends in a usable state, else
    None.  Later laws that need earlier structure are skipped when it is
    missing rather than reported as spurious failures.
    """
    n = len(elements)
    leq = [[False] * n for _ in range(n)]
    for (a, b) in leq_pairs:
        leq[a][b] = True
    _closure(n, leq)

    anti = next(((a, b) for a in range(n) for b in range(a + 1, n)
                 if leq[a][b] and leq[b][a]), None)
    rep.add("order-antisymmetry", anti is None,
            "closure of the order table is a partial order" if anti is None
            else "witness: %s <= %s <= %s" % (elements[anti[0]], elements[anti[1]],
                                              elements[anti[0]]))
    if anti is not None:
        return None

    def lub(members: list[int]):
        ubs = [c for c in range(n) if all(leq[m][c] for m in members)]
        for c in ubs:
            if all(leq[c][d] for d in ubs):
                return c
        return None

    def glb(members: list[int]):
        lbs = [c for c in range(n) if all(leq[c][m] for m in members)]
        for c in lbs:
            if all(leq[d][c] for d in lbs):
                return c
        return None

    # completeness: every subset has a join and a meet
    if n <= 12:
        bad = None
        for mask in range(1 << n):
            members = [i for i in range(n) if mask >> i & 1]
            if lub(members) is None or glb(members) is None:
                bad = members
                break
        rep.add("lattice-completeness", bad is None,
                "checked for all %d subsets" % (1 << n) if bad is None
                else "no join/meet for {%s}" % ",".join(elements[i] for i in bad))
        if bad is not None:
            return None
    else:
        # binary joins/meets plus bounds suffice at finite scale
        bad = next((pair for pair in ((a, b) for a in range(n) for b in range(n))
                    if lub(list(pair)) is None or glb(list(pair)) is None), None)
        ok = bad is None and lub([]) is not None and glb([]) is not None
        rep.add("lattice-completeness", ok,
                "checked binary joins/meets and bounds (carrier too large for "
                "the full subset scan)")
        if not ok:
            return None

    bottom = lub([])
    top = glb([])
    join_m = tuple(tuple(lub([a, b]) for b in range(n)) for a in range(n))
    meet_m = tuple(tuple(glb([a, b]) for b in range(n)) for a in range(n))

    missing = [(a, b) for a in range(n) for b in range(n) if (a, b) not in tensor]
    if missing:
        a, b = missing[0]
        rep.add("tensor-total", False,
                "missing tensor entry for (%s,%s)" % (elements[a], elements[b]))
        return None
    rep.add("tensor-total", True, "all %d entries present" % (n * n))
    tm = tuple(tuple(tensor[(a, b)] for b in range(n)) for a in range(n))

    w = next(((a, b) for a in range(n) for b in range(n)
              if tm[a][b] != tm[b][a]), None)
    rep.add("tensor-commutative", w is None,
            "checked for all %d pairs" % (n * n) if w is None
            else "witness: %s,%s" % (elements[w[0]], elements[w[1]]))

    w3 = next(((a, b, c) for a in range(n) for b in range(n) for c in range(n)
               if tm[tm[a][b]][c] != tm[a][tm[b][c]]), None)
    rep.add("tensor-associative", w3 is None,
            "checked for all %d triples" % (n ** 3) if w3 is None
            else "witness: %s,%s,%s" % tuple(elements[i] for i in w3))

    w = next((a for a in range(n) if tm[a][unit] != a or tm[unit][a] != a), None)
    rep.add("tensor-unit", w is None,
            "unit is %s" % elements[unit] if w is None
            else "witness: %s (*) unit = %s" % (elements[w], elements[tm[w][unit]]))

    rep.add("unit-not-bottom", unit != bottom,
            "" if unit != bottom else "the unit equals the bottom element")

    w3 = next(((a, b, c) for a in range(n) for b in range(n) for c in range(n)
               if tm[a][join_m[b][c]] != join_m[tm[a][b]][tm[a][c]]), None)
    wb = next((a for a in range(n) if tm[a][bottom] != bottom), None)
    ok = w3 is None and wb is None
    rep.add("tensor-join-distributive", ok,
            "checked for all %d triples and the empty join" % (n ** 3) if ok
            else ("witness: %s,(%s v %s)" % tuple(elements[i] for i in w3)
                  if w3 is not None
                  else "witness: %s (*) bottom /= bottom" % elements[wb]))

    # internal hom by scanning; the adjunction then holds by construction on
    # one side, the other side needs distributivity and is still checked
    hom_m = tuple(tuple(lub([b for b in range(n) if leq[tm[a][b]][c]])
                        for c in range(n))
                  for a in range(n))

    w3 = next(((a, b, c) for a in range(n) for b in range(n) for c in range(n)
               if leq[tm[a][b]][c] != leq[b][hom_m[a][c]]), None)
    rep.add("hom-adjunction", w3 is None,
            "checked for all %d triples" % (n ** 3) if w3 is None
            else "witness: %s,%s,%s" % tuple(elements[i] for i in w3))

    if hom_given is not None:
        w = next(((a, c) for a in range(n) for c in range(n)
                  if hom_given.get((a, c)) != hom_m[a][c]), None)
        rep.add("hom-table-matches", w is None,
                "input hom table agrees with the recomputed one" if w is None
                else "witness: hom(%s,%s)" % (elements[w[0]], elements[w[1]]))

    if not rep.ok:
        return None
    leq_t = tuple(tuple(row) for row in leq)
    return {"leq": leq_t, "tensor": tm, "unit": unit, "join": join_m,
            "meet": meet_m, "hom": hom_m, "bottom": bottom, "top": top}


def _raw_from_spec(spec: dict):
    """Parse an explicit quantale description into raw index tables."""
    for field in ("elements", "leq", "tensor", "unit"):
        if field not in spec:
            raise InputError("quantale description missing %r" % field)
    elements = tuple(spec["elements"])
    if len(set(elements)) != len(elements):
        raise InputError("duplicate quantale element names")
    ix = {e: i for i, e in enumerate(elements)}

    def need(name):
        if name not in ix:
            raise InputError("unknown quantale element %r" % name)
        return ix[name]

    leq_pairs = [(need(a), need(b)) for a, b in spec["leq"]]
    tensor = {}
    for key, val in spec["tensor"].items():
        parts = key.split("|")
        if len(parts) != 2:
            raise InputError("bad tensor key %r, expected 'a|b'" % key)
        tensor[(need(parts[0]), need(parts[1]))] = need(val)
    unit = need(spec["unit"])
    hom_given = None
    if "hom" in spec:
        hom_given = {}
        for key, val in spec["hom"].items():
            parts = key.split("|")
            if len(parts) != 2:
                raise InputError("bad hom key %r, expected 'a|b'" % key)
            hom_given[(need(parts[0]), need(parts[1]))] = need(val)
    return elements, leq_pairs, tensor, unit, hom_given


def _builtin_spec(name: str, n: int | None) -> dict:
    if name == "boolean":
        return {"elements": ["0", "1"], "leq": [["0", "1"]],
                "tensor": {"0|0": "0", "0|1": "0", "1|0": "0", "1|1": "1"},
                "unit": "1"}
    if name == "truncated_chain":
        if n is None or n < 0:
            raise InputError("truncated_chain needs n >= 0")
        # numeric values 0..n plus inf; the quantale order is numeric >=,
        # so 0 is the top and the unit, inf is the bottom
        names = [str(i) for i in range(n + 1)] + ["inf"]
        INF = n + 1  # numeric stand-in for inf
        num = {name_: i for i, name_ in enumerate(names)}
        leq = [[a, b] for a in names for b in names if num[a] >= num[b]]
        tensor = {}
        for a in names:
            for b in names:
                s = num[a] + num[b]
                tensor["%s|%s" % (a, b)] = names[min(s, INF)] if s <= n else "inf"
        return {"elements": names, "leq": leq, "tensor": tensor, "unit": "0"}
    if name == "lukasiewicz_chain":
        if n is None or n < 1:
            raise InputError("lukasiewicz_chain needs n >= 1")
        names = [str(i) for i in range(n + 1)]
        leq = [[str(a), str(b)] for a in range(n + 1) for b in range(n + 1) if a <= b]
        tensor = {"%d|%d" % (a, b): str(max(a + b - n, 0))
                  for a in range(n + 1) for b in range(n + 1)}
        return {"elements": names, "leq": leq, "tensor": tensor, "unit": str(n)}
    if name == "powerset_frame":
        if n is None or n < 0:
            raise InputError("powerset_frame needs n >= 0")
        def label(mask):
            return "{%s}" % ",".join(str(i + 1) for i in range(n) if mask >> i & 1)
        masks = list(range(1 << n))
        names = [label(m) for m in masks]
        leq = [[label(a), label(b)] for a in masks for b in masks if a & b == a]
        tensor = {"%s|%s" % (label(a), label(b)): label(a & b)
                  for a in masks for b in masks}
        return {"elements": names, "leq": leq, "tensor": tensor,
                "unit": label((1 << n) - 1)}
    raise InputError("unknown builtin quantale %r (have %s)"
                     % (name, ", ".join(BUILTIN_NAMES)))


def check_quantale_laws(spec) -> LawReport:
    """Validate every quantale law for a description or an existing quantale.

    Accepts the same dict format as `build_quantale`, or a Quantale (whose
    tables are rescanned from scratch).
    """
    rep = LawReport("quantale laws")
    try:
        if isinstance(spec, Quantale):
            elements = spec.elements
            leq_pairs = [(a, b) for a in range(spec.n) for b in range(spec.n)
                         if spec.leq_m[a][b]]
            tensor = {(a, b): spec.tensor_m[a][b]
                      for a in range(spec.n) for b in range(spec.n)}
            unit, hom_given = spec.unit, None
        else:
            if "builtin" in spec:
                spec = _builtin_spec(spec["builtin"], spec.get("n"))
            elements, leq_pairs, tensor, unit, hom_given = _raw_from_spec(spec)
        _scan_laws(elements, leq_pairs, tensor, unit, rep, hom_given)
    except InputError as exc:
        rep.add("well-formed", False, str(exc))
    return rep


def build_quantale(spec: dict) -> Quantale:
    """Build a validated quantale from a description dict.

    Either {"builtin": name, "n": int} or an explicit table
    {"elements": [...], "leq": [[a,b],...], "tensor": {"a|b": c,...},
    "unit": k}.  Unlisted leq pairs are closed reflexively/transitively;
    missing tensor entries are an error.
    """
    if "builtin" in spec:
        spec = _builtin_spec(spec["builtin"], spec.get("n"))
    elements, leq_pairs, tensor, unit, hom_given = _raw_from_spec(spec)
    rep = LawReport()
    tables = _scan_laws(elements, leq_pairs, tensor, unit, rep, hom_given)
    if tables is None:
        first = rep.failures[0]
        raise ValidationError("not a quantale: %s (%s)" % (first.name, first.detail))
    return Quantale(elements, tables["leq"], tables["tensor"], tables["unit"],
                    tables["join"], tables["meet"], tables["hom"],
                    tables["bottom"], tables["top"])


# The builtin constructors memoise: downstream caches key spaces and
# factorisations by object identity, so handing back the same Quantale
# lets a rebuilt corpus reuse them.
@lru_cache(maxsize=None)
def boolean_quantale() -> Quantale:
    return build_quantale({"builtin": "boolean"})


@lru_cache(maxsize=None)
def truncated_chain(n: int) -> Quantale:
    return build_quantale({"builtin": "truncated_chain", "n": n})


@lru_cache(maxsize=None)
def lukasiewicz_chain(n: int) -> Quantale:
    return build_quantale({"builtin": "lukasiewicz_chain", "n": n})


@lru_cache(maxsize=None)
def powerset_frame(n: int) -> Quantale:
    return build_quantale({"builtin": "powerset_frame", "n": n})


# ---------------------------------------------------------------------------
# V-valued relations
# ---------------------------------------------------------------------------

class VRelation:
    """A quantale-valued relation between two finite sets.

    Stored densely: rows[i][j] is the index of the value at
    (src[i], dst[j]).  Relations between value-equal carriers compose even
    when the FinSet objects differ; the quantale must be the same object.
    """

    __slots__ = ("q", "src", "dst", "rows")

    def __init__(self, q: Quantale, src: FinSet, dst: FinSet, rows):
        self.q = q
        self.src = src
        self.dst = dst
        self.rows = tuple(tuple(r) for r in rows)
        if len(self.rows) != len(src) or any(len(r) != len(dst) for r in self.rows):
            raise InputError("relation shape %dx%d does not match carriers %dx%d"
                             % (len(self.rows),
                                len(self.rows[0]) if self.rows else 0,
                                len(src), len(dst)))

    @classmethod
    def from_entries(cls, q: Quantale, src: FinSet, dst: FinSet,
                     entries: dict, default=None) -> "VRelation":
        """Build from a ((x,y) -> value) dict; values are indices or names."""
        def ix(v):
            return v if isinstance(v, int) else q.index_of(v)
        rows = []
        for x in src:
            row = []
            for y in dst:
                if (x, y) in entries:
                    row.append(ix(entries[(x, y)]))
                elif default is not None:
                    row.append(ix(default))
                else:
                    raise InputError("missing relation entry (%s,%s) and no default"
                                     % (x, y))
            rows.append(row)
        return cls(q, src, dst, rows)

    @classmethod
    def from_fn(cls, q: Quantale, f: Fn) -> "VRelation":
        """The graph of a map: unit on the graph, bottom elsewhere."""
        k, bot = q.unit, q.bottom
        return cls(q, f.src, f.dst,
                   (tuple(k if f.table[i] == j else bot for j in range(len(f.dst)))
                    for i in range(len(f.src))))

    @classmethod
    def identity(cls, q: Quantale, X: FinSet) -> "VRelation":
        return cls.from_fn(q, Fn.identity(X))

    @classmethod
    def constant(cls, q: Quantale, src: FinSet, dst: FinSet, v) -> "VRelation":
        if not isinstance(v, int):
            v = q.index_of(v)
        return cls(q, src, dst, ((v,) * len(dst),) * len(src))

    def at(self, i: int, j: int) -> int:
        return self.rows[i][j]

    def entry(self, x: str, y: str) -> str:
        return self.q.elements[self.rows[self.src.index_of(x)][self.dst.index_of(y)]]

    def transpose(self) -> "VRelation":
        return VRelation(self.q, self.dst, self.src, zip(*self.rows)) \
            if self.rows else VRelation(self.q, self.dst, self.src,
                                        ((),) * len(self.dst))

    @property
    def T(self) -> "VRelation":
        return self.transpose()

    def _check_parallel(self, other: "VRelation"):
        if self.q is not other.q:
            raise InputError("relations live over different quantale objects")
        if self.src != other.src or self.dst != other.dst:
            raise InputError("relations are not parallel")

    def __matmul__(self, other: "VRelation") -> "VRelation":
        """self (*) other = 'self after other': (s @ r)(x,z) = V_y r(x,y) ⊗ s(y,z)."""
        r, s = other, self
        if r.q is not s.q:
            raise InputError("relations live over different quantale objects")
        if r.dst != s.src:
            raise InputError("cannot compose: middle carriers %r and %r differ"
                             % (r.dst.elements, s.src.elements))
        q = r.q
        tm, jm, bot, top = q.tensor_m, q.join_m, q.bottom, q.top
        nz = len(s.dst)
        if q.n == 2 and q.unit == q.top:
            # boolean relations compose as bitmask rows
            smask = [sum(1 << kk for kk in range(nz) if row[kk] == top)
                     for row in s.rows]
            out = []
            for ri in r.rows:
                acc = 0
                for j, v in enumerate(ri):
                    if v == top:
                        acc |= smask[j]
                out.append([top if acc >> kk & 1 else bot
                            for kk in range(nz)])
            return VRelation(q, r.src, s.dst, out)
        scols = list(zip(*s.rows)) if s.rows else [()] * nz
        out = []
        for ri in r.rows:
            live = [(j, v) for j, v in enumerate(ri) if v != bot]
            row = []
            for kk in range(nz):
                sk = scols[kk]
                acc = bot
                for j, v in live:
                    acc = jm[acc][tm[v][sk[j]]]
                    if acc == top:
                        break
                row.append(acc)
            out.append(row)
        return VRelation(q, r.src, s.dst, out)

    def leq(self, other: "VRelation") -> bool:
        self._check_parallel(other)
        lm = self.q.leq_m
        return all(lm[a][b] for ra, rb in zip(self.rows, other.rows)
                   for a, b in zip(ra, rb))

    def __le__(self, other: "VRelation") -> bool:
        return self.leq(other)

    def first_violation(self, other: "VRelation"):
        """First (x,y) where self(x,y) is not below other(x,y), or None."""
        self._check_parallel(other)
        lm = self.q.leq_m
        for i in range(len(self.src)):
            for j in range(len(self.dst)):
                if not lm[self.rows[i][j]][other.rows[i][j]]:
                    return (self.src.elements[i], self.dst.elements[j])
        return None

    def meet(self, other: "VRelation") -> "VRelation":
        self._check_parallel(other)
        mm = self.q.meet_m
        return VRelation(self.q, self.src, self.dst,
                         (tuple(mm[a][b] for a, b in zip(ra, rb))
                          for ra, rb in zip(self.rows, other.rows)))

    def join(self, other: "VRelation") -> "VRelation":
        self._check_parallel(other)
        jm = self.q.join_m
        return VRelation(self.q, self.src, self.dst,
                         (tuple(jm[a][b] for a, b in zip(ra, rb))
                          for ra, rb in zip(self.rows, other.rows)))

    def __and__(self, other):
        return self.meet(other)

    def __or__(self, other):
        return self.join(other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, VRelation) and self.q is other.q
                and self.src == other.src and self.dst == other.dst
                and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.src.elements, self.dst.elements, self.rows))

    def __repr__(self) -> str:
        cells = ["%s,%s:%s" % (x, y, self.q.elements[self.rows[i][j]])
                 for i, x in enumerate(self.src)
                 for j, y in enumerate(self.dst)]
        return "VRelation(%s)" % "; ".join(cells)


def residual_left(t: VRelation, r: VRelation) -> VRelation:
    """Largest s with s @ r <= t.

    Shapes: r: X -/-> Y, t: X -/-> Z, result: Y -/-> Z.  Pointwise this is
    (y,z) |-> meet over x of hom(r(x,y), t(x,z)); the law suite checks it
    against a brute-force largest-solution search.
    """
    if r.q is not t.q:
        raise InputError("relations live over different quantale objects")
    if r.src != t.src:
        raise InputError("left residual needs r and t with the same source")
    q = r.q
    rows = []
    for j in range(len(r.dst)):
        row = []
        for kz in range(len(t.dst)):
            row.append(q.meet_all(q.hom_m[r.rows[i][j]][t.rows[i][kz]]
                                  for i in range(len(r.src))))
        rows.append(row)
    return VRelation(q, r.dst, t.dst, rows)


def residual_right(r: VRelation, t: VRelation) -> VRelation:
    """Largest u with r @ u <= t.

    Shapes: r: X -/-> Y, t: Z -/-> Y, result: Z -/-> X.  Pointwise
    (z,x) |-> meet over y of hom(r(x,y), t(z,y)).
    """
    if r.q is not t.q:
        raise InputError("relations live over different quantale objects")
    if r.dst != t.dst:
        raise InputError("right residual needs r and t with the same target")
    q = r.q
    rows = []
    for iz in range(len(t.src)):
        row = []
        for ix in range(len(r.src)):
            row.append(q.meet_all(q.hom_m[r.rows[ix][j]][t.rows[iz][j]]
                                  for j in range(len(r.dst))))
        rows.append(row)
    return VRelation(q, t.src, r.src, rows)


def vrel_residual(side: str, r: VRelation, t: VRelation) -> VRelation:
    if side == "left":
        return residual_left(t, r)
    if side == "right":
        return residual_right(r, t)
    raise InputError("residual side must be 'left' or 'right', not %r" % side)
