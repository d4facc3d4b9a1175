#pragma once
// Stage orchestration: generate -> attack -> detect -> analyze ->
// evaluate, with JSONL artifacts between stages and a run manifest.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wmlab/config.hpp"
#include "wmlab/evaluation.hpp"
#include "wmlab/types.hpp"

namespace wmlab {

struct SkipRecord {
    std::string stage;
    std::string doc_id;
    std::string reason;
};

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::map<std::string, int> stage_counts;     // documents out of each stage
    std::map<std::string, double> timings_ms;    // excluded from determinism
    std::vector<SkipRecord> skips;
    std::string created_utc;                     // excluded from determinism

    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

// Documents carry their evaluation condition between stages.
struct StagedDocument {
    Document doc;
    std::string condition;  // "clean" or the attack channel name
};

// JSONL with a leading {"_meta":...} header line carrying the config hash.
void write_documents_jsonl(const std::string& path, const std::vector<StagedDocument>& docs,
                           const std::string& artifact, const std::string& config_hash);
std::vector<StagedDocument> read_documents_jsonl(const std::string& path, const Vocabulary& vocab);

struct PipelineContext {
    RunConfig cfg;
    std::string out_dir;
    RunManifest manifest;
};

// Each stage reads its upstream artifact from ctx.out_dir and writes its
// own; a missing upstream raises an error naming the stage to run.
void stage_generate(PipelineContext& ctx);
void stage_attack(PipelineContext& ctx);
void stage_detect(PipelineContext& ctx);
void stage_analyze(PipelineContext& ctx);
// Returns the evaluation report; writes eval_report.json/.csv and plots.
EvalReport stage_evaluate(PipelineContext& ctx);
// All stages in order under one manifest.
EvalReport run_pipeline(PipelineContext& ctx);

// Index-parallel map with a bounded worker pool; results keep input order.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wmlab
