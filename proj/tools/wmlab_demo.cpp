// Writes a synthetic demo corpus (JSONL) plus a ready-to-run config so the
// pipeline can be exercised without external data:
//
//   wmlab-demo --out demo --docs 120 --seed 7
//   wmlab pipeline --config demo/lab.conf

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "wmlab/corpus.hpp"

int main(int argc, char** argv) {
    CLI::App app{"wmlab-demo: synthesize a demo corpus and config"};
    std::string out_dir = "demo";
    int docs = 120;
    std::uint64_t seed = 7;
    int num_prompts = 40;
    int gen_length = 120;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--docs", docs, "Number of corpus documents");
    app.add_option("--seed", seed, "Corpus seed");
    app.add_option("--prompts", num_prompts, "Prompts used by the generate stage");
    app.add_option("--length", gen_length, "Tokens generated per document");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        auto corpus = wmlab::synthesize_corpus(docs, seed);
        std::string corpus_path = out_dir + "/corpus.jsonl";
        wmlab::write_corpus_jsonl(corpus, corpus_path);

        std::string config_path = out_dir + "/lab.conf";
        std::ofstream conf(config_path, std::ios::binary);
        conf << "[corpus]\n"
             << "path = " << corpus_path << "\n"
             << "min_words = 50\nmax_words = 500\nvocab_cap = 50000\n\n"
             << "[model]\nkind = builtin\norder = 3\ntemperature = 1.0\n\n"
             << "[generate]\n"
             << "num_prompts = " << num_prompts << "\n"
             << "prompt_tokens = 20\n"
             << "length = " << gen_length << "\n\n"
             << "[watermark]\nsecret = 0x5741544552303142\ncontext_width = 1\n\n"
             << "[watermark.kgw]\nenabled = true\ngamma = 0.5\ndelta = 2.0\nz_threshold = 4.0\n\n"
             << "[watermark.sir]\nenabled = true\nembed_dim = 16\nbias_scale = 1.5\n"
             << "z_threshold = 4.0\n\n"
             << "[watermark.unbiased]\nenabled = true\nz_threshold = 4.0\n\n"
             << "[watermark.ewd]\nenabled = true\ngamma = 0.5\ndelta = 2.0\nweight_floor = 0.0\n"
             << "z_threshold = 4.0\n\n"
             << "[attack.sim_paraphrase]\nenabled = true\nstrength = 0.3\n\n"
             << "[attack.sim_backtranslate]\nenabled = true\nstrength = 0.5\n\n"
             << "[run]\nseed = 42\nworkers = 0\nout_dir = " << out_dir << "/out\n";
        conf.close();

        std::printf("wrote %zu documents to %s\nwrote config to %s\n", corpus.size(),
                    corpus_path.c_str(), config_path.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
