import pytest

from softdecomp import (
    QuerySyntaxError,
    SQL_QUERIES,
    UnsupportedSqlError,
    gallery,
    parse_cq,
    sql_to_cq,
)


def test_parse_with_head():
    cq, h = parse_cq("ans(x,z) :- r(x,y), s(y,z).")
    assert cq.output == ("x", "z")
    assert [a.relation for a in cq.atoms] == ["r", "s"]
    assert h.vertex_names == ("x", "y", "z")
    assert not cq.boolean


def test_parse_bare_body_is_boolean():
    cq, h = parse_cq("r(x,y), s(y,z)")
    assert cq.boolean and cq.output == ()


def test_repeated_variable_collapses_in_hypergraph():
    cq, h = parse_cq("r(x,x,y)")
    assert cq.atoms[0].variables == ("x", "x", "y")
    assert h.edge_vertex_ids == ((0, 1),)


def test_repeated_relation_gets_distinct_atom_names():
    cq, _ = parse_cq("r(x,y), r(y,z)")
    assert [a.name for a in cq.atoms] == ["r_0", "r_1"]
    assert {a.relation for a in cq.atoms} == {"r"}


def test_mixed_arity_warns():
    with pytest.warns(UserWarning, match="arities"):
        parse_cq("r(x,y), r(z)")


@pytest.mark.parametrize(
    "bad",
    ["", "r(x,y) s(y,z)", "r()", "ans(x) :- r(y)", "ans(x,) : r(x)"],
)
def test_syntax_errors(bad):
    with pytest.raises(QuerySyntaxError):
        parse_cq(bad)


def test_atom_text_reparses_to_same_query():
    cq, h = parse_cq("ans(x,z) :- r(x,y), s(y,z), r(z,x).")
    again, h2 = parse_cq(cq.atom_text())
    assert again.output == cq.output
    assert [a.variables for a in again.atoms] == [a.variables for a in cq.atoms]
    assert h2.vertex_names == h.vertex_names


# --- SQL extraction --------------------------------------------------------


SQL = """
SELECT MIN(ws.ws_item_sk) FROM web_sales AS ws, store_sales AS ss, item
WHERE ws.ws_item_sk = ss.ss_item_sk AND ss.ss_item_sk = item.i_item_sk
"""


def test_sql_basic_extraction():
    cq, h = sql_to_cq(SQL)
    assert [a.relation for a in cq.atoms] == ["web_sales", "store_sales", "item"]
    assert [a.name for a in cq.atoms] == ["ws", "ss", "item"]
    # all three columns sit in one equivalence class
    assert h.n_vertices == 1
    assert len(cq.output) == 1


def test_sql_head_outside_joins_is_dropped():
    cq, _ = sql_to_cq(SQL.replace("MIN(ws.ws_item_sk)", "MIN(ws.ws_quantity)"))
    assert cq.output == () and cq.boolean


def test_sql_drops_unjoined_columns_unless_asked():
    sql = """
    SELECT ws.ws_sold_date FROM web_sales AS ws, item
    WHERE ws.ws_item_sk = item.i_item_sk
    """
    cq, h = sql_to_cq(sql)
    assert len(cq.atoms[0].variables) == 1  # only the join column kept
    cq2, h2 = sql_to_cq(sql, include_all_columns=True)
    assert len(cq2.atoms[0].variables) == 2
    assert len(cq2.output) == 1


def test_sql_bare_columns_resolve_by_initialism():
    sql = """
    SELECT MIN(ws_quantity) FROM web_sales, store_sales
    WHERE ws_item_sk = ss_item_sk
    """
    cq, h = sql_to_cq(sql)
    assert {a.name for a in cq.atoms} == {"web_sales", "store_sales"}
    assert h.n_vertices == 1


def test_sql_join_on_syntax():
    sql = """
    SELECT a.x_id FROM alpha AS a JOIN beta AS b ON a.x_id = b.x_id
    JOIN gamma AS g ON b.y_id = g.y_id
    """
    cq, h = sql_to_cq(sql)
    assert len(cq.atoms) == 3
    assert h.n_vertices == 2


@pytest.mark.parametrize(
    "sql",
    [
        "SELECT * FROM r, s WHERE r.a = s.a OR r.b = s.b",
        "SELECT * FROM r WHERE r.a > 3",
        "SELECT * FROM r, s WHERE r.a = s.a GROUP BY r.a",
        "SELECT * FROM r LEFT JOIN s ON r.a = s.a",
        "SELECT * FROM r WHERE r.a = (SELECT MIN(b) FROM s)",
        "SELECT * FROM r, s WHERE r.a LIKE 'x%'",
    ],
)
def test_unsupported_sql_errors_loudly(sql):
    with pytest.raises(UnsupportedSqlError):
        sql_to_cq(sql)


def test_from_item_outside_every_join_is_an_error():
    with pytest.raises(UnsupportedSqlError):
        sql_to_cq("SELECT * FROM r, s, t WHERE r.a = s.a")


def test_unknown_alias_is_an_error():
    with pytest.raises(QuerySyntaxError):
        sql_to_cq("SELECT * FROM r AS x WHERE y.a = x.a")


def _degree_profile(h):
    deg = {}
    for e in h.edge_vertex_ids:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    return sorted(sorted(deg[v] for v in e) for e in h.edge_vertex_ids)


@pytest.mark.parametrize("name", ["q_ds", "q_hto", "q_hto2", "q_hto3", "q_hto4", "q_lb"])
def test_bundled_sql_reproduces_gallery_structure(name):
    cq, h = sql_to_cq(SQL_QUERIES[name])
    g = gallery(name).hypergraph
    assert h.n_vertices == g.n_vertices
    assert h.n_edges == g.n_edges
    assert _degree_profile(h) == _degree_profile(g)
