#pragma once

// Seeded benchmark harness over the synthetic generator: draw a ground
// truth, sample training pairs, fit a tree, and measure how far its ROC
// curve sits from the optimal one on a large test sample.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "simtree/synth.hpp"
#include "simtree/treerank.hpp"

namespace simtree {

// n_train schedule tied to ground-truth complexity: 150 * (5/4)^(D_gt^2).
inline std::size_t n_train_rule(std::size_t gt_depth) {
    return std::size_t(std::llround(150.0 * std::pow(1.25, double(gt_depth * gt_depth))));
}

struct ExperimentSetting {
    std::string label;
    SyntheticModel::Params gt;
    std::size_t train_depth = 3;
    std::size_t n_train = 0;  // 0 = apply n_train_rule(gt.gt_depth)
};

struct ExperimentSpec {
    std::string block;
    std::vector<ExperimentSetting> settings;
    std::size_t runs = 40;
    std::size_t n_test = 100000;
    // Single-threshold proposal regions. The benchmark's cells are axis
    // boxes in the transformed space, and the prescribed training sizes
    // are small; deeper split classifiers mostly fit noise here.
    LeafConfig leaf{LeafFamily::stump, 1, 8};
};

struct RunMetrics {
    double d1 = 0, d_inf = 0, auc = 0, auc_star = 0;
};

struct CellStats {
    double mean = 0, ci = 0;  // normal-approximation 95% half-width
};

inline CellStats aggregate(const std::vector<double>& v) {
    CellStats s;
    if (v.empty()) return s;
    double sum = 0;
    for (const double x : v) sum += x;
    s.mean = sum / double(v.size());
    if (v.size() < 2) return s;
    double ss = 0;
    for (const double x : v) ss += (x - s.mean) * (x - s.mean);
    const double sd = std::sqrt(ss / double(v.size() - 1));
    s.ci = 1.96 * sd / std::sqrt(double(v.size()));
    return s;
}

// One gen -> sample -> train -> eval repetition. A training sample that
// happens to hold a single pair class (routine when p_plus is tiny)
// falls back to the constant scorer instead of failing: its ROC is the
// diagonal, which is exactly what an untrainable sample earns.
inline RunMetrics run_once(const ExperimentSetting& s, const LeafConfig& leaf, std::size_t n_test,
                           RngSeed run_seed) {
    const SyntheticModel model = SyntheticModel::generate(s.gt, derive(run_seed, "gt"));
    const std::size_t n_train = s.n_train ? s.n_train : n_train_rule(s.gt.gt_depth);

    const RawPairs train_raw = model.sample_raw(n_train, derive(run_seed, "train"));
    const PairBatch batch = to_batch(train_raw, TransformKind::diag);
    SimilarityTree tree;
    if (batch.n_plus == 0 || batch.n_minus == 0)
        tree = SimilarityTree::trivial({TransformKind::diag, s.gt.q});
    else
        tree = train(batch, s.train_depth, leaf);

    const RawPairs test_raw = model.sample_raw(n_test, derive(run_seed, "test"));
    const PairBatch test = to_batch(test_raw, TransformKind::diag);
    std::vector<double> scores(test.size());
    for (std::size_t r = 0; r < test.size(); ++r) scores[r] = double(tree.score_fx(test.row(r)));

    const RocCurve roc = roc_from_scores(scores, test.z);
    const RocCurve star = model.optimal_roc();
    RunMetrics m;
    m.d1 = l1_dist(roc, star);
    m.d_inf = sup_dist(roc, star);
    m.auc = auc(roc);
    m.auc_star = auc(star);
    return m;
}

struct BlockResult {
    ExperimentSpec spec;
    std::vector<std::vector<RunMetrics>> runs;  // [setting][run]
};

inline BlockResult run_block(const ExperimentSpec& spec, RngSeed master, unsigned threads = thread_count()) {
    BlockResult out;
    out.spec = spec;
    out.runs.assign(spec.settings.size(), std::vector<RunMetrics>(spec.runs));
    const std::size_t total = spec.settings.size() * spec.runs;
    parallel_for(
        total,
        [&](std::size_t i) {
            const std::size_t si = i / spec.runs, r = i % spec.runs;
            const RngSeed run_seed =
                derive(derive(master, spec.block + "/" + spec.settings[si].label), "run", r);
            out.runs[si][r] = run_once(spec.settings[si], spec.leaf, spec.n_test, run_seed);
        },
        threads);
    return out;
}

inline std::vector<double> metric_column(const std::vector<RunMetrics>& runs, double RunMetrics::*m) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*m);
    return v;
}

// ------------------------------------------------------------------
// Default parameter blocks. Shared: q=3, delta=0.01, n_test=1e5,
// n_train from the rule above, 40 repetitions.
// ------------------------------------------------------------------

inline ExperimentSpec block_class_asymmetry() {
    ExperimentSpec spec;
    spec.block = "class-asymmetry";
    for (const double p : {0.5, 1e-1, 1e-3, 2e-4}) {
        ExperimentSetting s;
        s.label = "p+=" + fmt_double(p);
        s.gt = {3, 3, 0.01, p};
        s.train_depth = 3;
        spec.settings.push_back(std::move(s));
    }
    return spec;
}

inline ExperimentSpec block_model_complexity() {
    ExperimentSpec spec;
    spec.block = "model-complexity";
    for (const std::size_t d : {1u, 2u, 3u, 4u}) {
        ExperimentSetting s;
        s.label = "D_gt=D=" + std::to_string(d);
        s.gt = {d, 3, 0.01, 0.5};
        s.train_depth = d;
        spec.settings.push_back(std::move(s));
    }
    return spec;
}

inline ExperimentSpec block_model_bias() {
    ExperimentSpec spec;
    spec.block = "model-bias";
    for (const std::size_t d : {1u, 2u, 3u, 8u}) {
        ExperimentSetting s;
        s.label = "D=" + std::to_string(d);
        s.gt = {3, 3, 0.01, 0.5};
        s.train_depth = d;
        spec.settings.push_back(std::move(s));
    }
    return spec;
}

inline std::vector<ExperimentSpec> default_blocks() {
    return {block_class_asymmetry(), block_model_complexity(), block_model_bias()};
}

// ------------------------------------------------------------------
// Output: a per-setting summary CSV, a per-run CSV, and a plain-text
// table with 95% confidence half-widths in parentheses.
// ------------------------------------------------------------------

inline void write_summary_csv(std::ostream& out, const std::vector<BlockResult>& results) {
    out << "block,setting,gt_depth,train_depth,p_plus,n_train,n_test,runs,"
           "d1_mean,d1_ci,dinf_mean,dinf_ci,auc_mean,auc_ci,auc_star_mean\n";
    for (const auto& res : results) {
        for (std::size_t si = 0; si < res.spec.settings.size(); ++si) {
            const auto& s = res.spec.settings[si];
            const auto d1 = aggregate(metric_column(res.runs[si], &RunMetrics::d1));
            const auto di = aggregate(metric_column(res.runs[si], &RunMetrics::d_inf));
            const auto au = aggregate(metric_column(res.runs[si], &RunMetrics::auc));
            const auto as = aggregate(metric_column(res.runs[si], &RunMetrics::auc_star));
            out << res.spec.block << ',' << s.label << ',' << s.gt.gt_depth << ',' << s.train_depth
                << ',' << fmt_double(s.gt.p_plus) << ','
                << (s.n_train ? s.n_train : n_train_rule(s.gt.gt_depth)) << ',' << res.spec.n_test
                << ',' << res.spec.runs << ',' << fmt_double(d1.mean) << ',' << fmt_double(d1.ci)
                << ',' << fmt_double(di.mean) << ',' << fmt_double(di.ci) << ','
                << fmt_double(au.mean) << ',' << fmt_double(au.ci) << ',' << fmt_double(as.mean)
                << '\n';
        }
    }
}

inline void write_runs_csv(std::ostream& out, const std::vector<BlockResult>& results) {
    out << "block,setting,run,d1,d_inf,auc,auc_star\n";
    for (const auto& res : results)
        for (std::size_t si = 0; si < res.spec.settings.size(); ++si)
            for (std::size_t r = 0; r < res.runs[si].size(); ++r) {
                const auto& m = res.runs[si][r];
                out << res.spec.block << ',' << res.spec.settings[si].label << ',' << r << ','
                    << fmt_double(m.d1) << ',' << fmt_double(m.d_inf) << ',' << fmt_double(m.auc)
                    << ',' << fmt_double(m.auc_star) << '\n';
            }
}

inline void print_table(std::ostream& out, const BlockResult& res) {
    out << res.spec.block << "  (q=" << res.spec.settings[0].gt.q
        << ", delta=" << fmt_double(res.spec.settings[0].gt.delta) << ", runs=" << res.spec.runs
        << ", n_test=" << res.spec.n_test << ")\n";
    char line[160];
    std::snprintf(line, sizeof(line), "  %-14s %9s %18s %18s\n", "setting", "n_train", "D1", "Dinf");
    out << line;
    for (std::size_t si = 0; si < res.spec.settings.size(); ++si) {
        const auto& s = res.spec.settings[si];
        const auto d1 = aggregate(metric_column(res.runs[si], &RunMetrics::d1));
        const auto di = aggregate(metric_column(res.runs[si], &RunMetrics::d_inf));
        std::snprintf(line, sizeof(line), "  %-14s %9zu    %.3f (%.3f)    %.3f (%.3f)\n",
                      s.label.c_str(), s.n_train ? s.n_train : n_train_rule(s.gt.gt_depth), d1.mean,
                      d1.ci, di.mean, di.ci);
        out << line;
    }
}

}  // namespace simtree
