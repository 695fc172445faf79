# Copyright 2026 The charnet Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import itertools
import json
import pathlib

import numpy as np
import pytest

import charnet

FIXTURE = pathlib.Path(__file__).resolve().parents[2] / "data" / "fixture"


@pytest.fixture(scope="module")
def fixture_run():
    corpus = charnet.read_manifest(FIXTURE / "manifest.json")
    aliases = charnet.read_alias_file(FIXTURE / "aliases.tsv")
    mentions = charnet.extract_mentions(corpus, aliases)
    return corpus, aliases, mentions


def test_fixture_edges_match_gold(fixture_run):
    corpus, _, mentions = fixture_run
    with open(FIXTURE / "gold_edges.csv") as f:
        gold = {(r["u"], r["v"]): int(r["weight"]) for r in csv.DictReader(f)}
    got = {(u, v): w for u, v, w in charnet.sentence_cooccurrences(mentions, corpus)}
    assert got == gold


def test_fixture_mention_counts(fixture_run):
    _, _, mentions = fixture_run
    gold = json.loads((FIXTURE / "gold_mention_counts.json").read_text())
    counts = {}
    for m in mentions:
        counts[m.canonical_id] = counts.get(m.canonical_id, 0) + 1
    assert counts == gold


def test_density_and_degree():
    g = charnet.CharacterGraph([("a", "b", 1), ("b", "c", 2)])
    assert len(g) == 3 and g.edge_count() == 2
    # m / (n (n - 1))
    assert g.density() == pytest.approx(2 / 6)
    assert charnet.density_from_counts(3, 2) == pytest.approx(2 / 6)
    assert g.degree("b") == 2


def _brute_betweenness(nodes, edges):
    adj = {v: set() for v in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)

    def all_shortest(s, t):
        frontier, paths = [[s]], []
        while frontier and not paths:
            nxt = []
            for p in frontier:
                for w in adj[p[-1]]:
                    if w in p:
                        continue
                    (paths if w == t else nxt).append(p + [w])
            frontier = nxt
        return paths

    bc = {v: 0.0 for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        paths = all_shortest(s, t)
        for v in nodes:
            if v not in (s, t) and paths:
                bc[v] += sum(v in p for p in paths) / len(paths)
    return bc


def test_betweenness_against_path_enumeration():
    edges = [("a", "b"), ("b", "c"), ("c", "d"), ("a", "c"), ("d", "e")]
    g = charnet.CharacterGraph([(u, v, 1) for u, v in edges])
    want = _brute_betweenness(g.nodes, edges)
    got = g.betweenness(normalized=False)
    for v in g.nodes:
        assert got[v] == pytest.approx(want[v], abs=1e-9)


def test_transition_probabilities_sum_to_one():
    g = charnet.CharacterGraph([("a", "b", 1), ("b", "c", 1), ("a", "c", 1), ("c", "d", 1)])
    pr = charnet.transition_probabilities(g, "a", "c", p=0.5, q=2.0)
    assert sum(pr.values()) == pytest.approx(1.0, abs=1e-12)
    # return weight 1/p = 2, triangle neighbour 1, outward 1/q = 0.5
    assert pr["a"] == pytest.approx(2 / 3.5)
    assert pr["d"] == pytest.approx(0.5 / 3.5)


def test_laplacian_eigenmap_triangle():
    g = charnet.CharacterGraph([("a", "b", 1), ("b", "c", 1), ("a", "c", 1)])
    r = charnet.laplacian_eigenmap(g, dim=2)
    assert np.allclose(r["eigenvalues"], [1.5, 1.5], atol=1e-9)


@pytest.mark.parametrize("model", ["gcn", "gat", "logistic"])
def test_gradient_check(model):
    assert charnet.gradient_check(model, n=5, seed=0) < 1e-4


def test_auc_examples():
    assert charnet.roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert charnet.roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0]) == pytest.approx(0.0)
    rng = np.random.default_rng(0)
    s = rng.random(200).tolist()
    y = [int(i % 2) for i in range(200)]
    assert charnet.roc_auc(s, y) == pytest.approx(charnet.roc_auc_trapezoid(s, y), abs=1e-9)


def test_planted_partition_classification():
    g, labels = charnet.planted_partition(seed=2024)
    x = charnet.one_hot_features(len(g))
    mask = [i % 5 != 0 for i in range(len(g))]
    r = charnet.train_node_classifier(g, x, labels, mask, model="gcn", seed=1)
    held = [i for i in range(len(g)) if not mask[i]]
    f1 = charnet.macro_prf([labels[i] for i in held], [r["predictions"][i] for i in held])["f1"]
    assert f1 >= 0.8


def test_node2vec_is_deterministic():
    g, _ = charnet.planted_partition(blocks=2, block_size=8, p_in=0.6, p_out=0.05, seed=3)
    a = charnet.node2vec(g, dim=4, walks_per_node=2, walk_length=10, seed=9)
    b = charnet.node2vec(g, dim=4, walks_per_node=2, walk_length=10, seed=9)
    assert np.array_equal(np.asarray(a["vectors"]), np.asarray(b["vectors"]))


def test_errors_are_value_errors():
    g = charnet.CharacterGraph([("a", "b", 1)])
    with pytest.raises(ValueError):
        g.degree("zzz")
    with pytest.raises(charnet.DomainError):
        charnet.roc_auc([0.1, 0.2], [1, 1])


def test_config_hash_stable():
    assert charnet.config_hash({"a": 1, "b": [1, 2]}) == charnet.config_hash({"b": [1, 2], "a": 1})
