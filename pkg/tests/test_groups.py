import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtanner.groups import (
    GroupDescriptorError,
    cyclic,
    direct_product,
    from_table,
    is_right_transitive,
    left_regular_perm,
    parse_group,
    permutation_matrix,
    quaternion8,
    right_regular_perm,
    semidirect_c4_c4,
)

DESCRIPTORS = [
    "cyclic(1)",
    "cyclic(5)",
    "cyclic(12)",
    "product(cyclic(2),cyclic(2))",
    "product(cyclic(3), product(cyclic(2), cyclic(2)))",
    "quaternion8",
    "semidirect_c4_c4(nontrivial)",
    "semidirect_c4_c4(trivial)",
]

groups = st.sampled_from(DESCRIPTORS).map(parse_group)


def naive_group_check(g):
    n = g.order
    t = g.table
    e = g.identity
    for a in range(n):
        assert t[e, a] == a and t[a, e] == a
        assert t[a, g.inv(a)] == e
    for a, b, c in itertools.product(range(n), repeat=3):
        assert t[t[a, b], c] == t[a, t[b, c]]


@pytest.mark.parametrize("desc", DESCRIPTORS)
def test_axioms(desc):
    naive_group_check(parse_group(desc))


@pytest.mark.parametrize(
    "desc,order,abelian,n_aut",
    [
        ("cyclic(5)", 5, True, 4),
        ("cyclic(12)", 12, True, 4),
        ("product(cyclic(2),cyclic(2))", 4, True, 6),
        ("quaternion8", 8, False, 24),
        ("semidirect_c4_c4(trivial)", 16, True, 96),
        ("semidirect_c4_c4(nontrivial)", 16, False, 32),
    ],
)
def test_known_invariants(desc, order, abelian, n_aut):
    g = parse_group(desc)
    assert g.order == order
    assert g.is_abelian() == abelian
    assert len(g.automorphisms()) == n_aut


@given(groups)
def test_automorphisms_are_homomorphisms(g):
    for phi in g.automorphisms()[:8]:
        assert sorted(phi) == list(range(g.order))
        for a in range(g.order):
            for b in range(g.order):
                assert phi[g.mul(a, b)] == g.mul(phi[a], phi[b])


def test_quaternion_relations():
    q = quaternion8()
    i, j, k, m1 = (q.index(x) for x in ("i", "j", "k", "-1"))
    assert q.mul(i, i) == q.mul(j, j) == q.mul(k, k) == m1
    assert q.mul(q.mul(i, j), k) == m1
    assert q.mul(i, j) == k and q.mul(j, i) == q.index("-k")


def test_semidirect_twist():
    g = semidirect_c4_c4("nontrivial")
    a, b = g.index("(1,0)"), g.index("(0,1)")
    assert g.mul(g.mul(b, a), g.inv(b)) == g.inv(a)
    h = semidirect_c4_c4("trivial")
    assert h.mul(h.index("(1,0)"), h.index("(0,1)")) == h.mul(h.index("(0,1)"), h.index("(1,0)"))


@given(groups, st.data())
def test_left_and_right_actions_commute(g, data):
    a = data.draw(st.integers(0, g.order - 1))
    b = data.draw(st.integers(0, g.order - 1))
    la, rb = left_regular_perm(g, a), right_regular_perm(g, b)
    assert np.array_equal(la[rb], rb[la])
    # g -> a g and g -> g b^-1
    x = data.draw(st.integers(0, g.order - 1))
    assert la[x] == g.mul(a, x)
    assert rb[x] == g.mul(x, g.inv(b))


@given(groups, st.data())
def test_permutation_matrix_is_orthogonal(g, data):
    a = data.draw(st.integers(0, g.order - 1))
    p = permutation_matrix(left_regular_perm(g, a)).to_dense().astype(int)
    assert np.array_equal(p @ p.T, np.eye(g.order, dtype=int))


def test_right_transitivity():
    c5 = cyclic(5)
    assert all(is_right_transitive(c5, x) for x in range(1, 5))
    assert not is_right_transitive(c5, 0)
    c6 = cyclic(6)
    assert [x for x in range(6) if is_right_transitive(c6, x)] == [1, 5]
    v4 = direct_product(cyclic(2), cyclic(2))
    assert not any(is_right_transitive(v4, x) for x in range(4))


def test_labels_and_index():
    g = direct_product(cyclic(2), cyclic(3))
    assert g.labels[g.index("(1,2)")] == "(1,2)"
    assert g.index(4) == 4
    with pytest.raises(ValueError):
        g.index("(5,5)")


@pytest.mark.parametrize(
    "desc,col",
    [
        ("cyclc(5)", 1),
        ("product(cyclic(2), cyclc(3))", 20),
        ("cyclic(5", 9),
        ("cyclic(5) x", 11),
        ("cyclic()", 8),
    ],
)
def test_descriptor_errors_report_column(desc, col):
    with pytest.raises(GroupDescriptorError, match=f"column {col}:"):
        parse_group(desc)


def test_inline_table():
    g = parse_group("table([[0,1,2],[1,2,0],[2,0,1]])")
    assert g.order == 3 and is_right_transitive(g, 1)
    with pytest.raises(GroupDescriptorError):
        parse_group("table([[0,1],[0,1]])")
    with pytest.raises(ValueError):
        from_table([[1, 0], [0, 0]])


def test_descriptor_roundtrip():
    for d in DESCRIPTORS:
        g = parse_group(d)
        assert parse_group(g.descriptor) == g
