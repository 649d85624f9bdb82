import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from collabsec.errors import DisconnectedGraphError, EmptyNetworkError
from collabsec.ingestion import PaperRecord
from collabsec.network import (
    CollaborationEdge,
    EmailIdentity,
    breach_histogram,
    build_network,
    compute_metrics,
    largest_component,
    load_network,
    save_network,
    to_dot,
    write_graphml,
)
from conftest import complete_edges, graph, path_edges


def rec(pid, *emails):
    return PaperRecord(pid, tuple(EmailIdentity.parse(e) for e in emails))


class TestEmailIdentity:
    def test_normalizes(self):
        e = EmailIdentity.parse("  Alice.B@Uni.EDU ")
        assert str(e) == "alice.b@uni.edu"
        assert EmailIdentity.parse(str(e)) == e

    @pytest.mark.parametrize("bad", ["", "@x.edu", "a@", "a@localhost", "a b@x.edu", "ab"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            EmailIdentity.parse(bad)

    def test_plus_alias_is_distinct(self):
        assert EmailIdentity.parse("a+tag@x.edu") != EmailIdentity.parse("a@x.edu")


class TestBuildNetwork:
    def test_filters_domain_and_counts_per_record(self):
        g = build_network(
            [rec("p1", "a@x.edu", "b@x.edu"), rec("p2", "a@x.edu", "b@x.edu", "c@y.edu")],
            "x.edu",
        )
        assert [str(n.email) for n in g.nodes] == ["a@x.edu", "b@x.edu"]
        assert g.edges == (CollaborationEdge(0, 1, 2),)
        assert all(n.breach_count == 0 for n in g.nodes)

    def test_singleton_record(self):
        g = build_network([rec("p1", "a@x.edu")], "x.edu")
        assert g.n_nodes == 1 and g.n_edges == 0

    def test_within_record_dedup(self):
        g = build_network([rec("p1", "a@x.edu", "A@x.edu", "b@x.edu")], "x.edu")
        assert g.edges == (CollaborationEdge(0, 1, 1),)

    def test_no_match(self):
        with pytest.raises(EmptyNetworkError):
            build_network([rec("p1", "a@y.edu")], "x.edu")

    def test_subdomain_is_outside(self):
        g = build_network([rec("p1", "a@x.edu", "b@cs.x.edu")], "X.EDU")
        assert g.n_nodes == 1

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.lists(st.sampled_from(["a@x.edu", "b@x.edu", "c@x.edu", "d@x.edu", "e@y.edu"]), max_size=5),
            min_size=1,
            max_size=12,
        ).filter(lambda rs: any(e.endswith("x.edu") for r in rs for e in r))
    )
    def test_weight_equals_recount(self, raw):
        records = [rec(f"p{i}", *emails) for i, emails in enumerate(raw)]
        g = build_network(records, "x.edu")
        emails = [str(n.email) for n in g.nodes]
        assert all(e.endswith("@x.edu") for e in emails)
        seen = {e.key for e in g.edges}
        assert len(seen) == g.n_edges
        for e in g.edges:
            a, b = emails[e.u], emails[e.v]
            assert e.weight == sum(1 for r in raw if a in r and b in r)
        for u in range(g.n_nodes):
            for v in g.adjacency[u]:
                assert u in g.adjacency[v]
        # every co-occurring pair has an edge
        for r in raw:
            inside = sorted({e for e in r if e.endswith("@x.edu")})
            for i, a in enumerate(inside):
                for b in inside[i + 1:]:
                    key = tuple(sorted((emails.index(a), emails.index(b))))
                    assert key in seen


class TestLargestComponent:
    def test_connected_is_identity(self):
        g = graph(4, path_edges(4))
        h = largest_component(g)
        assert h == g

    def test_picks_bigger(self):
        g = graph(8, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)])
        h = largest_component(g)
        assert h.n_nodes == 5
        assert [str(n.email) for n in h.nodes] == [f"n{i}@x.edu" for i in range(3, 8)]
        assert [n.id for n in h.nodes] == list(range(5))
        assert h.is_connected()

    def test_tie_goes_to_node_zero(self):
        g = graph(6, [(3, 4), (4, 5), (0, 1), (1, 2)])
        h = largest_component(g)
        assert str(h.nodes[0].email) == "n0@x.edu"
        assert h.n_nodes == 3

    def test_tie_breaks_on_smallest_original_id_not_order(self):
        g = graph(6, [(1, 3), (3, 5), (0, 2), (2, 4)])
        h = largest_component(g)
        assert {str(n.email) for n in h.nodes} == {"n0@x.edu", "n2@x.edu", "n4@x.edu"}

    def test_empty(self):
        with pytest.raises(EmptyNetworkError):
            largest_component(graph(0, []))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 15), st.lists(st.tuples(st.integers(0, 14), st.integers(0, 14)), max_size=20))
    def test_result_connected_and_maximal(self, n, pairs):
        edges = sorted({(min(a, b), max(a, b)) for a, b in pairs if a != b and a < n and b < n})
        g = graph(n, edges)
        h = largest_component(g)
        assert h.is_connected()
        assert h.n_nodes == max(len(c) for c in g.components())


class TestMetrics:
    def test_triangle(self):
        m = compute_metrics(graph(3, complete_edges(3)))
        assert m.avg_clustering == 1.0
        assert m.avg_shortest_path == 1.0
        assert m.degree_assortativity is None
        assert not m.assortativity_defined

    def test_path(self):
        m = compute_metrics(graph(3, path_edges(3)))
        assert m.avg_clustering == 0.0
        assert m.avg_shortest_path == pytest.approx(4 / 3)

    def test_star_is_perfectly_disassortative(self):
        m = compute_metrics(graph(5, [(0, i) for i in range(1, 5)]))
        # oriented entries: four (4, 1) and four (1, 4)
        x = [4] * 4 + [1] * 4
        y = [1] * 4 + [4] * 4
        assert np.corrcoef(x, y)[0, 1] == pytest.approx(-1.0)
        assert m.degree_assortativity == pytest.approx(-1.0)

    def test_weights_ignored(self):
        a = compute_metrics(graph(4, [(0, 1, 1), (1, 2, 9), (2, 3, 1), (0, 2, 5)]))
        b = compute_metrics(graph(4, [(0, 1), (1, 2), (2, 3), (0, 2)]))
        assert a == b

    def test_disconnected(self):
        with pytest.raises(DisconnectedGraphError):
            compute_metrics(graph(4, [(0, 1), (2, 3)]))

    def test_too_small(self):
        with pytest.raises(EmptyNetworkError):
            compute_metrics(graph(1, []))

    @pytest.mark.parametrize("seed", range(40))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        edges = oracles.random_connected_edges(rng, n, rng.uniform(0.1, 0.9))
        m = compute_metrics(graph(n, edges))
        assert m.avg_clustering == pytest.approx(oracles.avg_clustering(n, edges), abs=1e-9)
        assert m.avg_shortest_path == pytest.approx(oracles.avg_shortest_path(n, edges), abs=1e-9)
        expected = oracles.assortativity(n, edges)
        if expected is None:
            assert m.degree_assortativity is None
        else:
            assert m.degree_assortativity == pytest.approx(expected, abs=1e-9)
            assert -1.0 <= m.degree_assortativity <= 1.0
        assert 0.0 <= m.avg_clustering <= 1.0


class TestHistogram:
    def test_all_zero(self):
        g = graph(4, path_edges(4))
        assert breach_histogram(g) == {0: 4}

    def test_counts(self):
        g = graph(4, path_edges(4), breaches=[0, 13, 0, 2])
        assert breach_histogram(g) == {0: 2, 2: 1, 13: 1}

    @settings(max_examples=30)
    @given(st.lists(st.integers(0, 20), min_size=1, max_size=30))
    def test_conservation(self, counts):
        g = graph(len(counts), [], breaches=counts)
        assert sum(breach_histogram(g).values()) == len(counts)


class TestPersistence:
    def test_json_round_trip(self):
        g = graph(4, [(0, 1, 3), (1, 2, 1), (2, 3, 2)], breaches=[0, 1, 2, 3])
        buf = io.StringIO()
        save_network(g, buf)
        assert load_network(io.StringIO(buf.getvalue())) == g

    def test_graphml(self, tmp_path):
        import networkx as nx

        g = graph(3, [(0, 1, 4), (1, 2, 1)], breaches=[5, 0, 1])
        write_graphml(g, tmp_path / "g.graphml", redact=True)
        h = nx.read_graphml(tmp_path / "g.graphml")
        assert h.number_of_edges() == 2
        assert h.nodes["0"]["breach_count"] == 5
        assert h.nodes["0"]["label"] == g.nodes[0].email.digest()
        assert "@" not in (tmp_path / "g.graphml").read_text()
        assert h.edges["0", "1"]["weight"] == 4

    def test_dot(self):
        g = graph(2, [(0, 1, 2)], breaches=[1, 0])
        text = to_dot(g)
        assert '0 [label="n0@x.edu", breach_count=1];' in text
        assert "0 -- 1 [weight=2];" in text
        redacted = to_dot(g, redact=True)
        assert "@" not in redacted

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            CollaborationEdge(1, 1)
        with pytest.raises(ValueError):
            CollaborationEdge(0, 1, 0)
        with pytest.raises(ValueError):
            graph(2, [(0, 1), (1, 0)])
