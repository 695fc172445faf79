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

"""Character networks from novels.

Thin Python layer over the C++ core: text ingestion, alias resolution,
co-occurrence graphs, graph metrics, node2vec / Laplacian eigenmaps, GCN and
GAT training, and the evaluation helpers.
"""

import json as _json

from . import _charnet
from ._charnet import (
    AliasTable,
    CharacterGraph,
    Corpus,
    DomainError,
    InputError,
    Mention,
    compile_alias_table,
    density_from_counts,
    derive_labels,
    edge_split,
    extract_mentions,
    gradient_check,
    laplacian_eigenmap,
    load_text,
    macro_prf,
    mean_degree_from_counts,
    mention_stats,
    narrative_chart,
    node2vec,
    normalize_adjacency,
    one_hot_features,
    planted_partition,
    read_alias_file,
    read_manifest,
    roc_auc,
    roc_auc_trapezoid,
    sentence_cooccurrences,
    stratified_folds,
    tokenize,
    train_link_predictor,
    train_node_classifier,
    transition_probabilities,
    window_cooccurrences,
    word_embeddings,
)

__all__ = [name for name in dir(_charnet) if not name.startswith("_")] + [
    "config_hash",
    "kfold_node_cv",
    "run_experiment",
]


def config_hash(config):
    """FNV-1a hash of a JSON-serialisable config, as written to sidecars."""
    return _charnet.config_hash(_json.dumps(config))


def kfold_node_cv(graph, features, labels, k=10, model="gcn", epochs=None, lr=None, seed=1):
    """k-fold node classification; returns the report as a dict.

    labels uses -1 for unlabeled nodes; model is gcn, gat or logistic.
    """
    return _json.loads(
        _charnet.kfold_node_cv(graph, features, labels, k=k, model=model, epochs=epochs, lr=lr, seed=seed)
    )


def run_experiment(config, base_dir="."):
    """Runs an experiment grid. Returns (results_csv, list of report dicts)."""
    csv, reports = _charnet.run_experiment(_json.dumps(config), base_dir)
    return csv, _json.loads(reports)
