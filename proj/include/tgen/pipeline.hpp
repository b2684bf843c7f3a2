#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgen/cfg_generation.hpp"
#include "tgen/dataset.hpp"
#include "tgen/eval.hpp"
#include "tgen/llm.hpp"
#include "tgen/model.hpp"
#include "tgen/paths.hpp"
#include "tgen/testcase.hpp"
#include "tgen/validation.hpp"

namespace tgen {

struct PipelineError : std::runtime_error {
    PipelineError(std::string step, const std::string& what)
        : std::runtime_error("[" + step + "] " + what), step(std::move(step)) {}
    std::string step;
};

enum class GeneratorKind { llm, builder };

struct PipelineConfig {
    GeneratorKind generator = GeneratorKind::llm;
    GenerationConfig generation;
    RenderConfig render;
    PathBudget budget;
};

// Fixture input format for the deterministic builder: one step per
// non-empty line, a "condition: " prefix marking condition steps.
inline FlowSteps flow_steps_from_lines(const std::string& text) {
    FlowSteps flow;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (is_condition_step(t))
            flow.steps.push_back({t.substr(std::string("condition: ").size()), true});
        else
            flow.steps.push_back({t, false});
    }
    return flow;
}

struct PipelineResult {
    Cfg cfg;
    PathSet paths;
    std::vector<TestCase> suite;
    int cfg_attempts = 0;
};

// Step 1 (CFG generation), step 2 (path extraction), step 3 (test-case
// creation), in order. Errors are tagged with the failing step.
inline PipelineResult run_pipeline(const UseCase& use_case, Provider* provider,
                                   const PipelineConfig& config = {}) {
    PipelineResult result;
    try {
        if (config.generator == GeneratorKind::builder) {
            result.cfg = build_cfg_from_steps(flow_steps_from_lines(use_case.text));
            result.cfg_attempts = 0;
        } else {
            if (!provider) throw std::invalid_argument("llm generator requires a provider");
            auto gen = generate_cfg(use_case, *provider, config.generation);
            result.cfg = std::move(gen.cfg);
            result.cfg_attempts = gen.attempts;
        }
    } catch (const std::runtime_error& e) {
        throw PipelineError("step-1", e.what());
    }
    try {
        result.paths = extract_paths(result.cfg, config.budget);
    } catch (const std::runtime_error& e) {
        throw PipelineError("step-2", e.what());
    }
    try {
        result.suite = render_test_suite(use_case, result.paths.translated, provider, config.render);
    } catch (const std::runtime_error& e) {
        throw PipelineError("step-3", e.what());
    }
    return result;
}

// Compares a generated CFG against its ground truth: node/edge P/R/F1,
// nGED (exact under the cap, otherwise a match-seeded upper bound), and
// both path counts.
inline EvalRow evaluate_against_truth(const std::string& use_case_id, const Cfg& generated,
                                      const Cfg& truth, const SimilarityConfig& sim = {},
                                      const PathBudget& budget = {}) {
    EvalRow row;
    row.use_case_id = use_case_id;
    MatchResult match = match_nodes(generated, truth, sim);
    row.node = prf1(match.node_counts);
    Counts edge_counts = compare_edges(generated, truth, match.pairs);
    row.edge = prf1(edge_counts);
    try {
        row.nged = nged(generated, truth);
    } catch (const SizeCapExceeded&) {
        row.nged = nged_from_ged(ged_upper_bound(generated, truth, match.pairs), generated, truth);
        row.nged_is_bound = true;
    }
    row.generated_path_count = static_cast<int>(enumerate_node_paths(generated, budget).size());
    row.truth_path_count = static_cast<int>(enumerate_node_paths(truth, budget).size());
    return row;
}

struct ManifestEntry {
    std::string use_case_id;
    int cfg_attempts = 0;
    int path_count = 0;
    int test_case_count = 0;
    std::vector<std::string> artifacts;
};

struct RunManifest {
    std::string timestamp;
    std::string provider_identity;
    nlohmann::json config_snapshot;
    std::vector<ManifestEntry> entries;

    // honors SOURCE_DATE_EPOCH for reproducible runs
    static std::string now_iso8601() {
        std::time_t t;
        if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"))
            t = static_cast<std::time_t>(std::stoll(sde));
        else
            t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        return buf;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["timestamp"] = timestamp;
        j["provider"] = provider_identity;
        j["config"] = config_snapshot;
        j["use_cases"] = nlohmann::json::array();
        for (const auto& e : entries) {
            // recorded as bare filenames so replayed runs compare equal
            std::vector<std::string> names;
            for (const auto& a : e.artifacts) {
                if (!std::filesystem::exists(a))
                    throw std::logic_error("manifest references missing artifact: " + a);
                names.push_back(std::filesystem::path(a).filename().string());
            }
            j["use_cases"].push_back({{"id", e.use_case_id},
                                      {"cfg_attempts", e.cfg_attempts},
                                      {"path_count", e.path_count},
                                      {"test_case_count", e.test_case_count},
                                      {"artifacts", names}});
        }
        return j;
    }
};

// Persists cfg.json, paths.json, testcases.json under out_dir and
// returns the manifest entry.
inline ManifestEntry persist_run(const UseCase& use_case, const PipelineResult& result,
                                 const std::filesystem::path& out_dir) {
    ManifestEntry entry;
    entry.use_case_id = use_case.id;
    entry.cfg_attempts = result.cfg_attempts;
    entry.path_count = static_cast<int>(result.paths.translated.size());
    entry.test_case_count = static_cast<int>(result.suite.size());

    auto cfg_path = out_dir / "cfg.json";
    auto paths_path = out_dir / "paths.json";
    auto tc_path = out_dir / "testcases.json";
    write_file(cfg_path, serialize_cfg_document(result.cfg));
    write_file(paths_path, serialize_path_document(result.paths.translated));
    write_file(tc_path, serialize_test_case_document(result.suite));
    entry.artifacts = {cfg_path.string(), paths_path.string(), tc_path.string()};
    return entry;
}

}  // namespace tgen
