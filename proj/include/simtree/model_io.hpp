#pragma once

// Model files: a small JSON envelope shared by trees, forests and
// synthetic ground truths.
//
//   { "version": 1, "kind": "...", "transform": "diag"|"minmax",
//     "q": <int>, "metadata": {...}, "payload": {...} }
//
// Doubles go through nlohmann's shortest round-trip printer, so
// save/load is exact and reruns produce byte-identical files.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "simtree/forest.hpp"
#include "simtree/synth.hpp"
#include "simtree/treerank.hpp"

namespace simtree {

using json = nlohmann::json;

inline constexpr int kModelVersion = 1;

enum class ModelKind { tree, forest, ground_truth };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::tree: return "tree";
        case ModelKind::forest: return "forest";
        default: return "synthetic-ground-truth";
    }
}

namespace detail {

inline json classifier_to_json(const SymClassifier& c) {
    json nodes = json::array();
    for (const auto& nd : c.nodes) {
        switch (nd.op) {
            case SymClassifier::Op::leaf:
                nodes.push_back({{"op", "leaf"}, {"label", int(nd.label)}});
                break;
            case SymClassifier::Op::axis:
                nodes.push_back({{"op", "axis"},
                                 {"feature", nd.feature},
                                 {"threshold", nd.threshold},
                                 {"left", nd.left},
                                 {"right", nd.right}});
                break;
            case SymClassifier::Op::straddle:
                nodes.push_back({{"op", "straddle"},
                                 {"feature", nd.feature},
                                 {"threshold", nd.threshold},
                                 {"left", nd.left},
                                 {"right", nd.right}});
                break;
        }
    }
    return {{"dim", c.dim}, {"nodes", std::move(nodes)}};
}

inline SymClassifier classifier_from_json(const json& j) {
    SymClassifier c;
    c.dim = j.at("dim").get<std::size_t>();
    for (const auto& nj : j.at("nodes")) {
        SymClassifier::Node nd;
        const std::string op = nj.at("op").get<std::string>();
        if (op == "leaf") {
            nd.op = SymClassifier::Op::leaf;
            nd.label = std::int8_t(nj.at("label").get<int>());
        } else if (op == "axis" || op == "straddle") {
            nd.op = op == "axis" ? SymClassifier::Op::axis : SymClassifier::Op::straddle;
            nd.feature = nj.at("feature").get<int>();
            nd.threshold = nj.at("threshold").get<double>();
            nd.left = nj.at("left").get<int>();
            nd.right = nj.at("right").get<int>();
        } else {
            throw Error("unknown classifier node op \"" + op + "\"");
        }
        c.nodes.push_back(nd);
    }
    if (c.nodes.empty()) throw Error("classifier has no nodes");
    return c;
}

inline json tree_payload(const SimilarityTree& t) {
    json nodes = json::array();
    for (const auto& nd : t.nodes) {
        switch (nd.state) {
            case SimilarityTree::NodeState::pass: nodes.push_back({{"state", "pass"}}); break;
            case SimilarityTree::NodeState::merged: nodes.push_back({{"state", "merged"}}); break;
            case SimilarityTree::NodeState::split:
                nodes.push_back({{"state", "split"}, {"classifier", classifier_to_json(nd.cls)}});
                break;
        }
    }
    return {{"depth", t.depth},       {"nodes", std::move(nodes)}, {"cum_neg", t.cum_neg},
            {"cum_pos", t.cum_pos},   {"n_neg", t.n_neg},          {"n_pos", t.n_pos},
            {"active_knots", t.active_knots}};
}

inline SimilarityTree tree_from_payload(const json& j, SymmetricTransform tr) {
    SimilarityTree t;
    t.transform = tr;
    t.depth = j.at("depth").get<std::size_t>();
    const std::size_t leaves = std::size_t(1) << t.depth;
    for (const auto& nj : j.at("nodes")) {
        SimilarityTree::Node nd;
        const std::string state = nj.at("state").get<std::string>();
        if (state == "pass") {
            nd.state = SimilarityTree::NodeState::pass;
        } else if (state == "merged") {
            nd.state = SimilarityTree::NodeState::merged;
        } else if (state == "split") {
            nd.state = SimilarityTree::NodeState::split;
            nd.cls = classifier_from_json(nj.at("classifier"));
        } else {
            throw Error("unknown tree node state \"" + state + "\"");
        }
        t.nodes.push_back(std::move(nd));
    }
    if (t.nodes.size() != leaves - 1) throw Error("tree node count does not match depth");
    t.cum_neg = j.at("cum_neg").get<std::vector<std::int64_t>>();
    t.cum_pos = j.at("cum_pos").get<std::vector<std::int64_t>>();
    if (t.cum_neg.size() != leaves + 1 || t.cum_pos.size() != leaves + 1)
        throw Error("tree knot arrays do not match depth");
    t.n_neg = j.at("n_neg").get<std::int64_t>();
    t.n_pos = j.at("n_pos").get<std::int64_t>();
    t.active_knots = j.at("active_knots").get<std::vector<std::uint32_t>>();
    if (t.active_knots.size() < 2 || t.active_knots.front() != 0 || t.active_knots.back() != leaves)
        throw Error("tree active knots must run from 0 to the leaf count");
    return t;
}

inline json envelope(ModelKind kind, SymmetricTransform tr, json payload, json metadata) {
    return {{"version", kModelVersion},
            {"kind", to_string(kind)},
            {"transform", to_string(tr.kind)},
            {"q", tr.q},
            {"metadata", std::move(metadata)},
            {"payload", std::move(payload)}};
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open \"" + path + "\" for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed while writing \"" + path + "\"");
}

}  // namespace detail

// A loaded model of any kind, scoring through one interface. Trees give
// their integer leaf score, forests the average of per-tree scores mapped
// to [0,1], ground truths the likelihood ratio of the landed cell; each
// is a similarity (larger = more alike).
struct ModelArtifact {
    ModelKind kind = ModelKind::tree;
    SimilarityTree tree;
    SimilarityForest forest;
    SyntheticModel gt;
    json metadata;

    SymmetricTransform transform() const {
        switch (kind) {
            case ModelKind::tree: return tree.transform;
            case ModelKind::forest:
                return forest.trees.empty() ? SymmetricTransform{} : forest.trees[0].transform;
            default: return gt.gt_transform();
        }
    }

    double score(const std::vector<double>& x, const std::vector<double>& xp) const {
        switch (kind) {
            case ModelKind::tree: return double(tree.score(x, xp));
            case ModelKind::forest: return forest.score(x, xp);
            default: return gt.oracle_score(x, xp);
        }
    }

    // Pointer form for bulk scoring; x and xp hold q coordinates each.
    double score_raw(const double* x, const double* xp) const {
        const SymmetricTransform tr = transform();
        std::vector<double> fx(tr.out_dim());
        tr.apply_to(x, xp, fx.data());
        switch (kind) {
            case ModelKind::tree: return double(tree.score_fx(fx.data()));
            case ModelKind::forest: return forest.score_fx(fx.data());
            default: return gt.oracle_score_fx(fx.data());
        }
    }
};

inline void save_model(const std::string& path, const SimilarityTree& t, json metadata = json::object()) {
    detail::write_json_file(
        path, detail::envelope(ModelKind::tree, t.transform, detail::tree_payload(t), std::move(metadata)));
}

inline void save_model(const std::string& path, const SimilarityForest& f, json metadata = json::object()) {
    if (f.trees.empty()) throw Error("refusing to save an empty forest");
    json trees = json::array();
    for (const auto& t : f.trees) trees.push_back(detail::tree_payload(t));
    json payload = {{"trees", std::move(trees)}, {"tree_seeds", f.tree_seeds}};
    detail::write_json_file(path, detail::envelope(ModelKind::forest, f.trees[0].transform,
                                                   std::move(payload), std::move(metadata)));
}

inline void save_model(const std::string& path, const SyntheticModel& m, json metadata = json::object()) {
    json nodes = json::array();
    for (const auto& nd : m.nodes) nodes.push_back({{"feature", nd.feature}, {"threshold", nd.threshold}});
    json payload = {{"gt_depth", m.params.gt_depth}, {"delta", m.params.delta},
                    {"p_plus", m.params.p_plus},     {"seed", m.seed},
                    {"nodes", std::move(nodes)}};
    detail::write_json_file(path, detail::envelope(ModelKind::ground_truth, m.gt_transform(),
                                                   std::move(payload), std::move(metadata)));
}

inline ModelArtifact load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file \"" + path + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("model file \"" + path + "\" is not valid JSON: " + e.what());
    }
    try {
        const int version = j.at("version").get<int>();
        if (version != kModelVersion)
            throw Error("model version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kModelVersion) + ")");
        const std::string kind = j.at("kind").get<std::string>();
        const SymmetricTransform tr{parse_transform(j.at("transform").get<std::string>()),
                                    j.at("q").get<std::size_t>()};
        ModelArtifact art;
        art.metadata = j.value("metadata", json::object());
        const json& payload = j.at("payload");
        if (kind == "tree") {
            art.kind = ModelKind::tree;
            art.tree = detail::tree_from_payload(payload, tr);
        } else if (kind == "forest") {
            art.kind = ModelKind::forest;
            for (const auto& tj : payload.at("trees"))
                art.forest.trees.push_back(detail::tree_from_payload(tj, tr));
            art.forest.tree_seeds = payload.at("tree_seeds").get<std::vector<RngSeed>>();
            if (art.forest.trees.empty()) throw Error("forest holds no trees");
        } else if (kind == "synthetic-ground-truth") {
            art.kind = ModelKind::ground_truth;
            if (tr.kind != TransformKind::diag)
                throw Error("synthetic ground truths are defined over the diag transform");
            SyntheticModel::Params p;
            p.gt_depth = payload.at("gt_depth").get<std::size_t>();
            p.q = tr.q;
            p.delta = payload.at("delta").get<double>();
            p.p_plus = payload.at("p_plus").get<double>();
            std::vector<SyntheticModel::GtNode> nodes;
            for (const auto& nj : payload.at("nodes"))
                nodes.push_back({nj.at("feature").get<int>(), nj.at("threshold").get<double>()});
            art.gt = SyntheticModel::from_parts(p, std::move(nodes), payload.at("seed").get<RngSeed>());
        } else {
            throw Error("unknown model kind \"" + kind + "\"");
        }
        return art;
    } catch (const json::exception& e) {
        throw Error("model file \"" + path + "\" is malformed: " + e.what());
    }
}

}  // namespace simtree
