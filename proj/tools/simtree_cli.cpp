// simtree: train, evaluate and benchmark tree-structured similarity
// scorers on labeled pairs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simtree/simtree.hpp"

namespace fs = std::filesystem;
using namespace simtree;

namespace {

LeafConfig leaf_options(CLI::App* cmd, std::string& family) {
    LeafConfig cfg;
    cmd->add_option("--leaf-family", family, "split classifier family: stump, tree or straddle")
        ->default_val("tree");
    cmd->add_option("--leaf-depth", cfg.leaf_depth, "max depth of each split classifier")
        ->default_val(5);
    cmd->add_option("--min-split", cfg.min_split_rows, "smallest node worth splitting")
        ->default_val(8);
    return cfg;
}

// Training input: either raw pairs (x*,xp*,z header) or a labeled
// dataset, in which case pairs are formed here.
PairBatch load_training_pairs(const std::string& path, TransformKind kind,
                              std::optional<std::uint64_t> budget, RngSeed seed,
                              const std::string& label_column) {
    if (looks_like_pairs_csv(path)) {
        return to_batch(load_pairs_csv(path), kind);
    }
    const Dataset d = load_dataset(path, label_column);
    return build_pairs(d, {kind, d.q}, budget, seed);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open \"" + path + "\" for writing");
    out << text;
    if (!out) throw Error("failed while writing \"" + path + "\"");
}

int run(int argc, char** argv) {
    CLI::App app{"tree-structured similarity learning on labeled pairs"};
    app.require_subcommand(1);

    // ---- gen ----------------------------------------------------
    auto* gen = app.add_subcommand("gen", "draw a synthetic ground truth and sample pair sets");
    SyntheticModel::Params gp;
    std::size_t gen_n_train = 0, gen_n_test = 100000;
    RngSeed gen_seed = 1;
    std::string gen_out = ".";
    gen->add_option("--gt-depth", gp.gt_depth, "ground-truth tree depth")->default_val(3);
    gen->add_option("--q", gp.q, "instance dimension")->default_val(3);
    gen->add_option("--delta", gp.delta, "cell mass decay")->default_val(0.01);
    gen->add_option("--p-plus", gp.p_plus, "probability of a positive pair")->default_val(0.5);
    gen->add_option("--n-train", gen_n_train, "training pairs (default: 150*(5/4)^(gt_depth^2))");
    gen->add_option("--n-test", gen_n_test, "test pairs")->default_val(100000);
    gen->add_option("--seed", gen_seed, "master seed")->default_val(1);
    gen->add_option("--out", gen_out, "output directory")->default_val(".");
    gen->callback([&] {
        const SyntheticModel model = SyntheticModel::generate(gp, derive(gen_seed, "cli.gen.gt"));
        const std::size_t n_train = gen_n_train ? gen_n_train : n_train_rule(gp.gt_depth);
        fs::create_directories(gen_out);
        const auto dir = fs::path(gen_out);
        write_pairs_csv((dir / "train.csv").string(),
                        model.sample_raw(n_train, derive(gen_seed, "cli.gen.train")));
        write_pairs_csv((dir / "test.csv").string(),
                        model.sample_raw(gen_n_test, derive(gen_seed, "cli.gen.test")));
        save_model((dir / "ground_truth.json").string(), model,
                   {{"seed", gen_seed}, {"n_train", n_train}, {"n_test", gen_n_test}});
        std::cout << "wrote " << (dir / "train.csv").string() << " (" << n_train << " pairs), "
                  << (dir / "test.csv").string() << " (" << gen_n_test << " pairs), "
                  << (dir / "ground_truth.json").string() << " (AUC* = "
                  << fmt_double(model.optimal_auc()) << ")\n";
    });

    // ---- train --------------------------------------------------
    auto* tr = app.add_subcommand("train", "fit a similarity tree on pairs or a labeled dataset");
    std::string tr_data, tr_out = "model.json", tr_transform = "diag", tr_family;
    std::string tr_label_column = "label";
    std::size_t tr_depth = 0;
    std::optional<std::uint64_t> tr_budget;
    RngSeed tr_seed = 1;
    LeafConfig tr_leaf = leaf_options(tr, tr_family);
    tr->add_option("--data", tr_data, "pairs CSV (x*,xp*,z) or dataset CSV (features + label)")
        ->required();
    tr->add_option("--depth", tr_depth, "tree depth (default: round(sqrt(ln n)))");
    tr->add_option("--transform", tr_transform, "pair feature map: diag or minmax")
        ->default_val("diag");
    tr->add_option("--pairs-budget", tr_budget, "subsample this many pairs from a dataset input");
    tr->add_option("--label-column", tr_label_column, "label column name for dataset input")
        ->default_val("label");
    tr->add_option("--seed", tr_seed, "seed for pair subsampling")->default_val(1);
    tr->add_option("--out", tr_out, "model file to write")->default_val("model.json");
    tr->callback([&] {
        tr_leaf.family = parse_leaf_family(tr_family);
        const TransformKind kind = parse_transform(tr_transform);
        const PairBatch b = load_training_pairs(tr_data, kind, tr_budget, tr_seed, tr_label_column);
        const std::size_t depth = tr_depth ? tr_depth : default_depth(b.size());
        const SimilarityTree t = train(b, depth, tr_leaf);
        save_model(tr_out, t,
                   {{"trained_on", tr_data},
                    {"n_pairs", b.size()},
                    {"leaf_family", tr_family},
                    {"empirical_auc", t.empirical_auc()}});
        std::cout << "trained depth-" << depth << " tree on " << b.size()
                  << " pairs; training AUC = " << fmt_double(t.empirical_auc()) << "; wrote "
                  << tr_out << "\n";
    });

    // ---- train-forest -------------------------------------------
    auto* trf = app.add_subcommand("train-forest", "fit a bagged forest on a labeled dataset");
    std::string trf_data, trf_out = "forest.json", trf_transform = "diag", trf_family;
    std::string trf_label_column = "label";
    std::size_t trf_trees = 44, trf_depth = 0;
    std::uint64_t trf_ppt = 100000;
    RngSeed trf_seed = 1;
    LeafConfig trf_leaf = leaf_options(trf, trf_family);
    trf->add_option("--data", trf_data, "dataset CSV (features + label column)")->required();
    trf->add_option("--trees", trf_trees, "number of trees")->default_val(44);
    trf->add_option("--depth", trf_depth, "per-tree depth (default: round(sqrt(ln pairs_per_tree)))");
    trf->add_option("--pairs-per-tree", trf_ppt, "pairs subsampled per tree")->default_val(100000);
    trf->add_option("--transform", trf_transform, "pair feature map: diag or minmax")
        ->default_val("diag");
    trf->add_option("--label-column", trf_label_column, "label column name")->default_val("label");
    trf->add_option("--seed", trf_seed, "master seed")->default_val(1);
    trf->add_option("--out", trf_out, "model file to write")->default_val("forest.json");
    trf->callback([&] {
        trf_leaf.family = parse_leaf_family(trf_family);
        const Dataset d = load_dataset(trf_data, trf_label_column);
        const SymmetricTransform t{parse_transform(trf_transform), d.q};
        const std::size_t depth = trf_depth ? trf_depth : default_depth(trf_ppt);
        const SimilarityForest f = train_forest(d, t, trf_trees, depth, trf_ppt, trf_leaf, trf_seed);
        save_model(trf_out, f, {{"trained_on", trf_data}, {"trees", trf_trees}, {"depth", depth}});
        std::cout << "trained " << trf_trees << " depth-" << depth << " trees; wrote " << trf_out
                  << "\n";
    });

    // ---- prune --------------------------------------------------
    auto* pr = app.add_subcommand("prune", "merge tree leaves that do not help validation AUC");
    std::string pr_model, pr_val, pr_out;
    pr->add_option("--model", pr_model, "tree model file")->required();
    pr->add_option("--validation", pr_val, "validation pairs CSV")->required();
    pr->add_option("--out", pr_out, "output model file (default: overwrite input)");
    pr->callback([&] {
        ModelArtifact art = load_model(pr_model);
        if (art.kind != ModelKind::tree) throw Error("prune expects a tree model");
        const PairBatch val = to_batch(load_pairs_csv(pr_val), art.tree.transform.kind);
        const SimilarityTree before = art.tree;
        const SimilarityTree after = prune(before, val);
        const std::string out_path = pr_out.empty() ? pr_model : pr_out;
        json meta = art.metadata;
        meta["pruned_with"] = pr_val;
        save_model(out_path, after, std::move(meta));
        std::cout << "knots " << before.active_knots.size() << " -> " << after.active_knots.size()
                  << "; wrote " << out_path << "\n";
    });

    // ---- score --------------------------------------------------
    auto* sc = app.add_subcommand("score", "score a pairs CSV with a saved model");
    std::string sc_model, sc_pairs, sc_out = "scores.csv";
    sc->add_option("--model", sc_model, "model file (tree, forest or ground truth)")->required();
    sc->add_option("--pairs", sc_pairs, "pairs CSV to score")->required();
    sc->add_option("--out", sc_out, "scores CSV to write")->default_val("scores.csv");
    sc->callback([&] {
        const ModelArtifact art = load_model(sc_model);
        const RawPairs raw = load_pairs_csv(sc_pairs);
        std::ostringstream out;
        out << "score\n";
        for (std::size_t t = 0; t < raw.z.size(); ++t)
            out << fmt_double(art.score_raw(raw.x_row(t), raw.xp_row(t))) << "\n";
        write_text_file(sc_out, out.str());
        std::cout << "wrote " << raw.z.size() << " scores to " << sc_out << "\n";
    });

    // ---- eval ---------------------------------------------------
    auto* ev = app.add_subcommand("eval", "ROC metrics of a model on labeled pairs");
    std::string ev_model, ev_pairs, ev_gt, ev_roc_out, ev_report;
    ev->add_option("--model", ev_model, "model file")->required();
    ev->add_option("--pairs", ev_pairs, "labeled pairs CSV")->required();
    ev->add_option("--ground-truth", ev_gt, "ground-truth model file; enables d1/d_inf");
    ev->add_option("--roc-out", ev_roc_out, "write the model's ROC knots to this CSV");
    ev->add_option("--report", ev_report, "write the JSON report here as well as stdout");
    ev->callback([&] {
        const ModelArtifact art = load_model(ev_model);
        const RawPairs raw = load_pairs_csv(ev_pairs);
        std::vector<double> scores(raw.z.size());
        for (std::size_t t = 0; t < raw.z.size(); ++t)
            scores[t] = art.score_raw(raw.x_row(t), raw.xp_row(t));
        const RocCurve roc = roc_from_scores(scores, raw.z);
        json report = {{"model", ev_model}, {"pairs", ev_pairs}, {"n_pairs", raw.z.size()},
                       {"auc", auc(roc)}};
        if (!ev_gt.empty()) {
            const ModelArtifact gt = load_model(ev_gt);
            if (gt.kind != ModelKind::ground_truth)
                throw Error("--ground-truth must name a synthetic ground-truth model");
            const RocCurve star = gt.gt.optimal_roc();
            report["auc_star"] = auc(star);
            report["d1"] = l1_dist(roc, star);
            report["d_inf"] = sup_dist(roc, star);
        }
        if (!ev_roc_out.empty()) {
            write_roc_csv(ev_roc_out, roc);
            report["roc_csv"] = ev_roc_out;
        }
        const std::string text = report.dump(2) + "\n";
        if (!ev_report.empty()) write_text_file(ev_report, text);
        std::cout << text;
    });

    // ---- reproduce ----------------------------------------------
    auto* rp = app.add_subcommand("reproduce", "run the synthetic benchmark blocks");
    std::string rp_experiment = "all", rp_out = ".", rp_family;
    std::size_t rp_runs = 40, rp_n_test = 100000;
    RngSeed rp_seed = 1;
    LeafConfig rp_leaf = leaf_options(rp, rp_family);
    rp->add_option("--experiment", rp_experiment,
                   "all, class-asymmetry, model-complexity or model-bias")
        ->default_val("all");
    rp->add_option("--runs", rp_runs, "repetitions per setting")->default_val(40);
    rp->add_option("--n-test", rp_n_test, "test pairs per run")->default_val(100000);
    rp->add_option("--seed", rp_seed, "master seed")->default_val(1);
    rp->add_option("--out", rp_out, "directory for summary.csv and runs.csv")->default_val(".");
    rp->callback([&] {
        if (rp_runs < 2) throw Error("reproduce needs --runs >= 2 for confidence intervals");
        rp_leaf.family = parse_leaf_family(rp_family);
        std::vector<ExperimentSpec> blocks;
        for (auto& spec : default_blocks())
            if (rp_experiment == "all" || rp_experiment == spec.block) blocks.push_back(spec);
        if (blocks.empty())
            throw Error("unknown experiment \"" + rp_experiment +
                        "\" (expected all, class-asymmetry, model-complexity or model-bias)");
        std::vector<BlockResult> results;
        for (auto& spec : blocks) {
            spec.runs = rp_runs;
            spec.n_test = rp_n_test;
            spec.leaf = rp_leaf;
            results.push_back(run_block(spec, rp_seed));
            print_table(std::cout, results.back());
            std::cout << "\n";
        }
        fs::create_directories(rp_out);
        {
            std::ostringstream s;
            write_summary_csv(s, results);
            write_text_file((fs::path(rp_out) / "summary.csv").string(), s.str());
        }
        {
            std::ostringstream s;
            write_runs_csv(s, results);
            write_text_file((fs::path(rp_out) / "runs.csv").string(), s.str());
        }
        std::cout << "wrote " << (fs::path(rp_out) / "summary.csv").string() << " and "
                  << (fs::path(rp_out) / "runs.csv").string() << "\n";
    });

    // ---- plot ---------------------------------------------------
    auto* pl = app.add_subcommand("plot", "overlay ROC CSVs in one SVG");
    std::vector<std::string> pl_inputs;
    std::string pl_out = "roc.svg", pl_title = "ROC";
    pl->add_option("curves", pl_inputs, "ROC CSV files (alpha,beta)")->required();
    pl->add_option("--out", pl_out, "SVG file to write")->default_val("roc.svg");
    pl->add_option("--title", pl_title, "plot title")->default_val("ROC");
    pl->callback([&] {
        std::vector<NamedCurve> curves;
        for (const auto& path : pl_inputs)
            curves.push_back({fs::path(path).stem().string(), load_roc_csv(path)});
        write_roc_svg(pl_out, curves, pl_title);
        std::cout << "wrote " << pl_out << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
