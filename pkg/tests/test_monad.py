"""Monad instances: genuine ultrafilter calculus, algebras, lax extensions."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tvcat import FinSet, Fn, InputError, boolean_quantale, truncated_chain
from tvcat.monad import (MonadInstance, check_monad_laws, filter_pushforward,
                         filter_sum, instantiate_monad, kleisli, lax_extend,
                         principal_filter, principal_witness, subsets,
                         ultrafilters_concrete, xi_concrete)
from tvcat.quantale import VRelation, lukasiewicz_chain, powerset_frame

BOOL = boolean_quantale()
CHAIN1 = truncated_chain(1)


def test_ultrafilters_on_two_points_are_the_two_principal_filters():
    ultras = ultrafilters_concrete(["a", "b"])
    assert len(ultras) == 2
    at_a = frozenset({frozenset({"a"}), frozenset({"a", "b"})})
    at_b = frozenset({frozenset({"b"}), frozenset({"a", "b"})})
    assert set(ultras) == {at_a, at_b}
    assert sorted(principal_witness(F, ["a", "b"]) for F in ultras) == ["a", "b"]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_ultrafilter_count_equals_carrier_size(n):
    items = ["p%d" % i for i in range(n)]
    ultras = ultrafilters_concrete(items)
    assert len(ultras) == n
    for F in ultras:
        x = principal_witness(F, items)
        assert F == principal_filter(x, items)


def test_pushforward_and_sum_stay_principal():
    src = ["a", "b", "c"]
    dst = ["u", "v"]
    f = {"a": "u", "b": "u", "c": "v"}
    F = principal_filter("b", src)
    assert filter_pushforward(F, f, src, dst) == principal_filter("u", dst)
    ultras = [principal_filter(x, src) for x in src]
    FF = frozenset(S for S in subsets(ultras) if ultras[2] in S)
    assert filter_sum(FF, ultras, src) == principal_filter("c", src)


def test_xi_concrete_is_identity_at_principal_points():
    # the join of the down-set of v is v, for any quantale
    for q in (BOOL, CHAIN1, lukasiewicz_chain(2), powerset_frame(2)):
        for v, name in enumerate(q.elements):
            F = principal_filter(name, q.elements)
            assert xi_concrete(q, F, q.elements) == v


def test_instance_runs_on_labels():
    M = instantiate_monad("finite_ultrafilter", BOOL)
    X = FinSet(["a", "b"])
    assert M.T_obj(X) == X
    assert M.unit(X).is_identity()
    assert M.mult(X).is_identity()
    f = Fn.from_dict(X, X, {"a": "b", "b": "b"})
    assert M.T_fn(f) == f


def test_unknown_kind_rejected():
    with pytest.raises(InputError):
        instantiate_monad("double_powerset", BOOL)


def test_extension_fixes_relations_at_this_scale():
    # every ultrafilter in sight is principal, so the extension of r is r
    X, Y = FinSet(["a", "b"]), FinSet(["c"])
    for kind in ("identity", "finite_ultrafilter"):
        M = instantiate_monad(kind, BOOL)
        for rows in itertools.product([0, 1], repeat=2):
            r = VRelation(BOOL, X, Y, [[rows[0]], [rows[1]]])
            assert lax_extend(M, r) == r


def test_extension_on_empty_carriers():
    M = instantiate_monad("finite_ultrafilter", BOOL)
    E = FinSet([])
    X = FinSet(["a"])
    assert lax_extend(M, VRelation.constant(BOOL, E, X, "0")).rows == ()
    r = VRelation.constant(BOOL, X, E, "0")
    assert lax_extend(M, r) == r


def test_kleisli_is_plain_composition_here():
    M = instantiate_monad("finite_ultrafilter", CHAIN1)
    X, Y, Z = FinSet(["a", "b"]), FinSet(["c", "d"]), FinSet(["e"])
    r = VRelation.from_entries(CHAIN1, X, Y,
                               {("a", "c"): "0", ("a", "d"): "1",
                                ("b", "c"): "inf", ("b", "d"): "1"})
    s = VRelation.from_entries(CHAIN1, Y, Z, {("c", "e"): "1", ("d", "e"): "0"})
    assert kleisli(M, s, r, X) == s @ r


def test_kleisli_shape_errors():
    M = instantiate_monad("identity", BOOL)
    X, Y = FinSet(["a"]), FinSet(["b", "c"])
    r = VRelation.constant(BOOL, X, Y, "1")
    s = VRelation.constant(BOOL, Y, X, "1")
    with pytest.raises(InputError):
        kleisli(M, s, r, Y)  # r does not start at T(Y)


@pytest.mark.parametrize("kind,q", [
    ("identity", BOOL),
    ("finite_ultrafilter", BOOL),
    ("finite_ultrafilter", CHAIN1),
])
def test_law_suite_passes(kind, q):
    rep = check_monad_laws(instantiate_monad(kind, q), size_limit=3)
    assert rep.ok, rep.to_text()


def test_law_suite_smoke_on_wider_quantales():
    for q in (lukasiewicz_chain(2), powerset_frame(2)):
        rep = check_monad_laws(instantiate_monad("finite_ultrafilter", q),
                               size_limit=2, rel_samples=40)
        assert rep.ok, rep.to_text()


class _BrokenMult(MonadInstance):
    def mult(self, X):
        m = super().mult(X)
        if len(m.src) >= 2:
            table = list(m.table)
            table[0], table[1] = table[1], table[0]
            m = Fn(m.src, m.dst, table)
        return m


class _BrokenXi(MonadInstance):
    def _build_xi(self):
        return tuple(self.q.unit for _ in range(self.q.n))


def test_corrupted_multiplication_is_caught():
    rep = check_monad_laws(_BrokenMult("identity", BOOL), size_limit=2,
                           rel_samples=10)
    names = {c.name for c in rep.failures}
    assert "unit-laws" in names


def test_corrupted_algebra_is_caught():
    rep = check_monad_laws(_BrokenXi("identity", BOOL), size_limit=2,
                           rel_samples=10)
    names = {c.name for c in rep.failures}
    assert "algebra-unit" in names


def test_presheaf_structure_rows_frozen():
    M = instantiate_monad("identity", BOOL)
    k, bot = BOOL.index_of("1"), BOOL.index_of("0")
    rows = M.presheaf_structure([(k,), (bot,)])
    assert rows == [[1, 0], [1, 1]]


def _rel(q, X, Y, data):
    n = q.n
    rows = [[data[i * len(Y) + j] % n for j in range(len(Y))]
            for i in range(len(X))]
    return VRelation(q, X, Y, rows)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=4, max_size=4),
       st.lists(st.integers(0, 3), min_size=4, max_size=4),
       st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_kleisli_associativity(rdata, sdata, tdata):
    q = truncated_chain(2)
    M = instantiate_monad("finite_ultrafilter", q)
    X, Y = FinSet(["a", "b"]), FinSet(["c", "d"])
    Z, W = FinSet(["e", "f"]), FinSet(["g"])
    r = _rel(q, X, Y, rdata)
    s = _rel(q, Y, Z, sdata)
    t = _rel(q, Z, W, tdata)
    left = kleisli(M, kleisli(M, t, s, Y), r, X)
    right = kleisli(M, t, kleisli(M, s, r, X), X)
    assert left == right


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=6, max_size=6))
def test_extension_is_identity_on_relations(data):
    q = truncated_chain(2)
    M = instantiate_monad("finite_ultrafilter", q)
    X, Y = FinSet(["a", "b"]), FinSet(["c", "d", "e"])
    r = _rel(q, X, Y, data)
    assert lax_extend(M, r) == r
