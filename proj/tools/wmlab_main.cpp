// wmlab command line: config-driven watermark pipeline stages.
//
//   wmlab pipeline --config lab.conf --out out/
//   wmlab generate --config lab.conf
//   wmlab validate-config --config lab.conf
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure,
// 3 acceptance-threshold failure (eval.min_clean_auc gate).

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmlab/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    int workers = -1;
    std::string schemes;
    std::string conditions;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

wmlab::RunConfig load_config(const CliOptions& opt) {
    wmlab::ConfigTree tree = wmlab::ConfigTree::parse_file(opt.config_path);
    // flag overrides participate in the config hash: they change the run
    if (!opt.out_dir.empty()) tree.set("run.out_dir", opt.out_dir);
    if (!opt.seed.empty()) tree.set("run.seed", opt.seed);
    if (opt.workers >= 0) tree.set("run.workers", std::to_string(opt.workers));
    wmlab::RunConfig cfg = wmlab::RunConfig::from_tree(std::move(tree));

    if (!opt.schemes.empty()) {
        std::vector<std::string> wanted = split_csv(opt.schemes);
        std::vector<std::string> filtered;
        for (const auto& s : cfg.schemes)
            if (std::find(wanted.begin(), wanted.end(), s) != wanted.end()) filtered.push_back(s);
        for (const auto& w : wanted)
            if (std::find(cfg.schemes.begin(), cfg.schemes.end(), w) == cfg.schemes.end())
                throw wmlab::Error("--schemes names unknown or disabled scheme: " + w);
        cfg.schemes = std::move(filtered);
    }
    if (!opt.conditions.empty()) {
        std::vector<std::string> wanted = split_csv(opt.conditions);
        std::vector<wmlab::AttackChannel> filtered;
        for (const auto& ch : cfg.attacks) {
            std::string name = wmlab::to_string(ch.kind);
            if (std::find(wanted.begin(), wanted.end(), name) != wanted.end())
                filtered.push_back(ch);
        }
        for (const auto& w : wanted)
            if (w != "clean" &&
                std::none_of(cfg.attacks.begin(), cfg.attacks.end(), [&](const auto& ch) {
                    return wmlab::to_string(ch.kind) == w;
                }))
                throw wmlab::Error("--conditions names unknown or disabled condition: " + w);
        cfg.attacks = std::move(filtered);
    }
    cfg.validate();
    return cfg;
}

wmlab::PipelineContext make_context(const CliOptions& opt) {
    wmlab::PipelineContext ctx;
    ctx.cfg = load_config(opt);
    ctx.out_dir = ctx.cfg.out_dir;
    try {
        ctx.manifest = wmlab::RunManifest::load(ctx.out_dir + "/manifest.json");
        ctx.manifest.created_utc.clear();  // refreshed on save
    } catch (const wmlab::Error&) {
        // fresh run directory
    }
    return ctx;
}

int check_gate(const wmlab::RunConfig& cfg, const wmlab::EvalReport& report) {
    if (cfg.min_clean_auc <= 0.0) return 0;
    bool ok = true;
    for (const auto& cell : report.cells) {
        if (cell.condition != "clean") continue;
        if (!cell.auc || *cell.auc < cfg.min_clean_auc) {
            std::fprintf(stderr, "acceptance gate: %s clean AUC %s < %.4f\n", cell.scheme.c_str(),
                         cell.auc ? std::to_string(*cell.auc).c_str() : "undefined",
                         cfg.min_clean_auc);
            ok = false;
        }
    }
    return ok ? 0 : 3;
}

void print_report(const wmlab::EvalReport& report) {
    for (const auto& cell : report.cells) {
        if (cell.auc)
            std::printf("%-10s %-20s auc=%.4f tpr=%.4f fpr=%.4f n=%d+%d\n", cell.scheme.c_str(),
                        cell.condition.c_str(), *cell.auc, cell.tpr, cell.fpr, cell.n_pos,
                        cell.n_neg);
        else
            std::printf("%-10s %-20s auc=--      tpr=%.4f fpr=%.4f n=%d+%d\n", cell.scheme.c_str(),
                        cell.condition.c_str(), cell.tpr, cell.fpr, cell.n_pos, cell.n_neg);
    }
    for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wmlab: watermark generation, attack, detection and analysis pipeline"};
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "Path to the run configuration file")
        ->required();
    app.add_option("--out", opt.out_dir, "Output directory (overrides run.out_dir)");
    app.add_option("--seed", opt.seed, "Global seed (overrides run.seed)");
    app.add_option("--workers", opt.workers, "Worker threads (overrides run.workers)");
    app.add_option("--schemes", opt.schemes, "Comma list restricting enabled schemes");
    app.add_option("--conditions", opt.conditions, "Comma list restricting attack conditions");

    auto* cmd_generate = app.add_subcommand("generate", "Generate paired plain/watermarked text");
    auto* cmd_attack = app.add_subcommand("attack", "Apply attack channels to generated text");
    auto* cmd_detect = app.add_subcommand("detect", "Run watermark detectors");
    auto* cmd_analyze = app.add_subcommand("analyze", "Extract linguistic features");
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Compute AUCs, correlations and plots");
    auto* cmd_pipeline = app.add_subcommand("pipeline", "Run every stage in order");
    auto* cmd_validate = app.add_subcommand("validate-config", "Parse and validate the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits 0, parse errors collapse to 1
    }

    try {
        if (cmd_validate->parsed()) {
            wmlab::RunConfig cfg = load_config(opt);
            std::printf("config ok: hash=%s schemes=%zu attacks=%zu\n", cfg.config_hash.c_str(),
                        cfg.schemes.size(), cfg.attacks.size());
            return 0;
        }

        wmlab::PipelineContext ctx = make_context(opt);
        if (cmd_generate->parsed()) {
            wmlab::stage_generate(ctx);
            std::printf("generated %d documents into %s\n",
                        ctx.manifest.stage_counts["generate_documents"], ctx.out_dir.c_str());
        } else if (cmd_attack->parsed()) {
            wmlab::stage_attack(ctx);
            std::printf("attacked %d documents\n", ctx.manifest.stage_counts["attack_documents"]);
        } else if (cmd_detect->parsed()) {
            wmlab::stage_detect(ctx);
            std::printf("wrote %d detection records\n",
                        ctx.manifest.stage_counts["detect_records"]);
        } else if (cmd_analyze->parsed()) {
            wmlab::stage_analyze(ctx);
            std::printf("analyzed %d documents\n",
                        ctx.manifest.stage_counts["analyze_documents"]);
        } else if (cmd_evaluate->parsed()) {
            wmlab::EvalReport report = wmlab::stage_evaluate(ctx);
            print_report(report);
            return check_gate(ctx.cfg, report);
        } else if (cmd_pipeline->parsed()) {
            wmlab::EvalReport report = wmlab::run_pipeline(ctx);
            print_report(report);
            return check_gate(ctx.cfg, report);
        }
        return 0;
    } catch (const wmlab::Error& e) {
        std::string msg = e.what();
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        bool config_problem = msg.rfind("invalid configuration", 0) == 0 ||
                              msg.rfind("cannot open config", 0) == 0 ||
                              msg.rfind("config ", 0) == 0 ||
                              msg.rfind("--schemes", 0) == 0 || msg.rfind("--conditions", 0) == 0;
        return config_problem ? 1 : 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
