import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutplan.graph import (
    Graph,
    connected_components,
    gen_erdos_renyi,
    gen_geometric,
    gen_grid,
    gen_preferential_attachment,
    gen_small_world,
    load_edge_list,
    save_edge_list,
    spectral_radius,
)


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestGraph:
    def test_canonical_and_dedup(self):
        g = Graph(4, [(2, 1), (1, 2), (0, 3), (3, 0)])
        assert g.n_edges == 2
        assert g.edges.tolist() == [[0, 3], [1, 2]]
        g.validate()

    def test_degree_and_neighbors(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3)])
        assert g.degree.tolist() == [3, 1, 1, 1]
        assert g.max_degree == 3
        assert g.neighbors(0).tolist() == [1, 2, 3]
        assert g.has_edge(2, 0) and not g.has_edge(1, 2)

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError, match="self loop"):
            Graph(3, [(1, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="out of range"):
            Graph(3, [(0, 3)])
        with pytest.raises(ValueError):
            Graph(-1)

    def test_empty(self):
        g = Graph(0)
        assert g.n_nodes == 0 and g.n_edges == 0 and g.max_degree == 0

    def test_induced_subgraph(self):
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
        sub, ids = g.induced_subgraph([4, 0, 1])
        assert ids.tolist() == [0, 1, 4]
        assert sub.n_nodes == 3
        assert sub.edges.tolist() == [[0, 1], [0, 2]]

    @given(st.integers(2, 12), st.lists(st.tuples(st.integers(0, 11), st.integers(0, 11)), max_size=40))
    @settings(max_examples=150, deadline=None)
    def test_invariants_random(self, n, raw):
        edges = [(u % n, v % n) for u, v in raw if u % n != v % n]
        g = Graph(n, edges)
        g.validate()
        assert int(g.degree.sum()) == 2 * g.n_edges
        assert g.adjacency_matrix().nnz == 2 * g.n_edges


class TestGenerators:
    def test_er_determinism(self):
        assert gen_erdos_renyi(50, 0.2, seed=7) == gen_erdos_renyi(50, 0.2, seed=7)
        assert gen_erdos_renyi(50, 0.2, seed=7) != gen_erdos_renyi(50, 0.2, seed=8)

    def test_er_extremes(self):
        assert gen_erdos_renyi(20, 0.0, seed=1).n_edges == 0
        assert gen_erdos_renyi(20, 1.0, seed=1).n_edges == 190

    def test_er_edge_count_plausible(self):
        # Binomial(499500, 0.01): mean 4995, sd 70.32; 4 sigma band
        m = gen_erdos_renyi(1000, 0.01, seed=3).n_edges
        assert 4995 - 282 <= m <= 4995 + 282

    def test_er_param_errors(self):
        with pytest.raises(ValueError):
            gen_erdos_renyi(0, 0.5)
        with pytest.raises(ValueError):
            gen_erdos_renyi(10, 1.5)

    def test_pa_edge_count(self):
        g = gen_preferential_attachment(500, 2, seed=0)
        assert g.n_nodes == 500
        # (m+1)-clique then m edges per remaining node
        assert g.n_edges == 3 + 497 * 2 == 997
        assert int(g.degree.min()) >= 2
        g.validate()

    def test_pa_clique_start(self):
        assert gen_preferential_attachment(4, 3, seed=5) == complete_graph(4)

    def test_pa_param_errors(self):
        with pytest.raises(ValueError):
            gen_preferential_attachment(5, 0)
        with pytest.raises(ValueError):
            gen_preferential_attachment(3, 3)

    def test_ws_lattice(self):
        g = gen_small_world(10, 4, 0.0, seed=0)
        assert np.all(g.degree == 4)
        assert g.n_edges == 20

    def test_ws_complete_when_k_saturates(self):
        assert gen_small_world(5, 4, 0.0, seed=2) == complete_graph(5)
        # rewiring can never change a complete lattice
        assert gen_small_world(5, 4, 1.0, seed=2) == complete_graph(5)

    def test_ws_preserves_edge_count(self):
        g = gen_small_world(40, 6, 0.5, seed=11)
        assert g.n_edges == 120
        g.validate()

    def test_ws_determinism(self):
        assert gen_small_world(30, 4, 0.3, seed=4) == gen_small_world(30, 4, 0.3, seed=4)

    def test_ws_param_errors(self):
        with pytest.raises(ValueError):
            gen_small_world(10, 3, 0.1)
        with pytest.raises(ValueError):
            gen_small_world(4, 4, 0.1)

    def test_geometric_matches_brute_force(self):
        g, pts = gen_geometric(30, 0.3, seed=9, return_points=True)
        expect = set()
        for i in range(30):
            for j in range(i + 1, 30):
                if np.hypot(*(pts[i] - pts[j])) <= 0.3:
                    expect.add((i, j))
        assert set(map(tuple, g.edges.tolist())) == expect

    def test_geometric_full_radius(self):
        assert gen_geometric(5, math.sqrt(2), seed=1) == complete_graph(5)

    def test_geometric_param_errors(self):
        with pytest.raises(ValueError):
            gen_geometric(0, 0.5)
        with pytest.raises(ValueError):
            gen_geometric(5, 0.0)

    def test_grid(self):
        g = gen_grid(3, 3)
        assert g.n_nodes == 9 and g.n_edges == 12
        assert sorted(g.degree.tolist()) == [2, 2, 2, 2, 3, 3, 3, 3, 4]
        assert gen_grid(1, 1).n_edges == 0
        assert gen_grid(1, 5).n_edges == 4
        with pytest.raises(ValueError):
            gen_grid(0, 3)


class TestIO:
    def test_round_trip(self, tmp_path):
        g = gen_erdos_renyi(25, 0.2, seed=6)
        p = tmp_path / "g.edges"
        save_edge_list(g, str(p), header=["model=er"])
        assert load_edge_list(str(p)) == g

    def test_id_compaction(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("5 9\n300 5\n")
        g = load_edge_list(str(p))
        assert g.n_nodes == 3
        assert g.edges.tolist() == [[0, 1], [0, 2]]

    def test_self_loops_dropped_with_warning(self, tmp_path, caplog):
        p = tmp_path / "g.edges"
        p.write_text("0 0\n1 2\n3 3\n")
        with caplog.at_level("WARNING", logger="cutplan.graph"):
            g = load_edge_list(str(p))
        assert g.n_edges == 1
        assert "2 self loop" in caplog.text

    def test_comments_and_blanks(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("# header\n\n0 1\n# mid\n1 2\n")
        assert load_edge_list(str(p)).n_edges == 2

    def test_parse_error_has_line_number(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("0 1\n1 2 3\n")
        with pytest.raises(ValueError, match=r":2:"):
            load_edge_list(str(p))
        p.write_text("0 x\n")
        with pytest.raises(ValueError, match=r":1:"):
            load_edge_list(str(p))
        p.write_text("0 -2\n")
        with pytest.raises(ValueError, match="negative"):
            load_edge_list(str(p))

    def test_empty_file(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("# nothing\n")
        assert load_edge_list(str(p)).n_nodes == 0

    def test_duplicates_collapse(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("0 1\n1 0\n0 1\n")
        assert load_edge_list(str(p)).n_edges == 1


class TestSpectralRadius:
    def test_path3(self):
        lam, v = spectral_radius(Graph(3, [(0, 1), (1, 2)]))
        assert lam == pytest.approx(math.sqrt(2), abs=1e-8)
        assert np.all(v >= -1e-12) and np.linalg.norm(v) == pytest.approx(1.0)

    def test_star_bipartite_shift_path(self):
        # K_{1,4} is bipartite; plain power iteration oscillates
        g = Graph(5, [(0, i) for i in range(1, 5)])
        lam, v = spectral_radius(g)
        assert lam == pytest.approx(2.0, abs=1e-8)
        # hub carries the largest weight
        assert int(np.argmax(v)) == 0

    def test_complete(self):
        lam, _ = spectral_radius(complete_graph(5))
        assert lam == pytest.approx(4.0, abs=1e-8)

    def test_edgeless(self):
        lam, v = spectral_radius(Graph(4))
        assert lam == 0.0
        assert np.allclose(v, 0.5)

    def test_matches_dense_eig(self):
        for seed in range(5):
            g = gen_erdos_renyi(30, 0.2, seed=seed)
            lam, _ = spectral_radius(g)
            dense = g.adjacency_matrix().toarray()
            assert lam == pytest.approx(np.linalg.eigvalsh(dense)[-1], abs=1e-7)

    def test_lower_bounds(self):
        g = gen_erdos_renyi(60, 0.1, seed=2)
        lam, _ = spectral_radius(g)
        assert lam >= 2 * g.n_edges / g.n_nodes - 1e-9
        assert lam >= math.sqrt(g.max_degree) - 1e-9

    def test_empty_graph_rejected(self):
        with pytest.raises(ValueError):
            spectral_radius(Graph(0))


class TestComponents:
    def test_split(self):
        g = Graph(7, [(0, 1), (1, 2), (0, 2), (4, 5), (5, 6)])
        comps = connected_components(g)
        assert [c.tolist() for c in comps] == [[0, 1, 2], [3], [4, 5, 6]]

    def test_partition_property(self):
        g = gen_erdos_renyi(40, 0.05, seed=1)
        comps = connected_components(g)
        allids = np.concatenate(comps)
        assert sorted(allids.tolist()) == list(range(40))

    def test_connected(self):
        assert len(connected_components(complete_graph(4))) == 1
