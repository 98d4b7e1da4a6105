#pragma once

// Bagged similarity forests: B trees, each trained on its own uniformly
// subsampled pair batch. Aggregation is the mean of per-tree scores
// rescaled to [0,1] by (score - 1) / (2^D - 1).

#include "simtree/treerank.hpp"

namespace simtree {

struct SimilarityForest {
    std::vector<SimilarityTree> trees;
    std::vector<RngSeed> tree_seeds;

    double score_fx(const double* fx) const {
        double sum = 0;
        for (const auto& t : trees) {
            const double denom = double((std::size_t(1) << t.depth) - 1);
            sum += denom > 0 ? double(t.score_fx(fx) - 1) / denom : 0.0;
        }
        return sum / double(trees.size());
    }

    double score(const std::vector<double>& x, const std::vector<double>& xp) const {
        if (trees.empty()) throw Error("cannot score with an empty forest");
        return score_fx(trees[0].transform.apply(x, xp).data());
    }
};

inline SimilarityForest train_forest(const Dataset& d, const SymmetricTransform& t,
                                     std::size_t n_trees, std::size_t depth,
                                     std::optional<std::uint64_t> pairs_per_tree,
                                     const LeafConfig& cfg, RngSeed seed) {
    if (n_trees == 0) throw Error("a forest needs at least one tree");
    SimilarityForest f;
    f.trees.resize(n_trees);
    f.tree_seeds.resize(n_trees);
    for (std::size_t b = 0; b < n_trees; ++b) f.tree_seeds[b] = derive(seed, "forest.tree", b);
    // per-tree seeds make the result independent of scheduling
    parallel_for(n_trees, [&](std::size_t b) {
        const PairBatch batch = build_pairs(d, t, pairs_per_tree, f.tree_seeds[b]);
        f.trees[b] = train(batch, depth, cfg);
    });
    return f;
}

}  // namespace simtree
