#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tgen/llm.hpp"
#include "tgen/model.hpp"
#include "tgen/validation.hpp"

namespace tgen {

struct DanglingCondition : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GenerationExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlowStep {
    std::string statement;
    bool is_condition = false;
};

// Pre-segmented, merged step sequence consumed by the deterministic
// builder. Natural-language segmentation is out of scope; the builder
// exists as an offline oracle and fixture path.
struct FlowSteps {
    std::vector<FlowStep> steps;
};

struct GenerationConfig {
    int max_regeneration_attempts = 5;
    std::string prompt_template_version = "v1";
};

inline constexpr const char* kCfgSystemRole =
    "You are a software engineering expert specializing in control-flow analysis of "
    "requirements.";

// Prompt #1: role, task instructions, construction algorithm, output
// specification, then the verbatim use-case text last.
inline std::string assemble_cfg_prompt(const UseCase& use_case) {
    std::string p;
    p += "Act as a software engineering expert in requirements-based testing.\n\n";

    p += "Task instructions:\n"
         "- Read the use-case description below and extract every step of the main flow, "
         "alternative flows, and extension flows as graph nodes.\n"
         "- Handle conditional branches explicitly: a condition produces one edge for the "
         "true outcome and one edge for the false outcome.\n"
         "- Link alternative and extension flows to the main flow so that no orphan nodes "
         "remain: every node must appear in at least one edge, and every non-root node must "
         "have an incoming edge.\n\n";

    p += "Construction algorithm:\n"
         "1. Merge all steps of all flows into one ordered sequence S1..Sn.\n"
         "2. The first node S1 is the root. Add edge S1 -> S2 with weight 1.\n"
         "3. For each step Si: if step S(i+1) contains a condition, add edge Si -> S(i+1) "
         "for the true outcome and edge Si -> S(i+2) for the false outcome, both with "
         "weight W(previous edge) + 1; otherwise add edge Si -> S(i+1) with weight "
         "W(previous edge) + 1.\n"
         "4. Attach the condition text to the guarded edge's \"condition\" field.\n\n";

    p += "Output specification: respond with valid JSON only, following this schema: "
         "{\"nodes\":[{\"id\":\"S1\",\"statement\":\"...\"}],"
         "\"edges\":[{\"from\":\"S1\",\"to\":\"S2\",\"weight\":1,\"condition\":null}]}. "
         "Node ids are S1..Sn in order; \"condition\" is a string or null.\n\n";

    p += "Use case:\n";
    p += use_case.text;
    return p;
}

// Deterministic CFG construction from a merged step sequence. Condition
// steps become nodes; the step before a condition branches to both the
// condition node (true) and the step after it (false). A branch pair
// shares one weight; otherwise weights increase by one per edge.
inline Cfg build_cfg_from_steps(const FlowSteps& flow) {
    const auto& steps = flow.steps;
    if (steps.empty()) throw std::invalid_argument("flow has no steps");
    if (steps.front().is_condition)
        throw std::invalid_argument("first flow step must not be a condition");
    if (steps.back().is_condition)
        throw DanglingCondition("condition step at end of sequence has no false-branch target");

    Cfg cfg;
    for (size_t i = 0; i < steps.size(); ++i)
        cfg.nodes.push_back({"S" + std::to_string(i + 1), steps[i].statement});

    auto has_edge = [&](const std::string& from, const std::string& to) {
        for (const auto& e : cfg.edges)
            if (e.from == from && e.to == to) return true;
        return false;
    };
    auto sid = [](size_t i) { return "S" + std::to_string(i + 1); };

    if (steps.size() == 1) return cfg;

    cfg.edges.push_back({sid(0), sid(1), 1,
                         steps[1].is_condition ? std::optional(steps[1].statement)
                                               : std::nullopt});
    int last_weight = 1;

    for (size_t i = 0; i + 1 < steps.size(); ++i) {
        if (steps[i + 1].is_condition) {
            int w = last_weight + 1;
            bool emitted = false;
            if (!has_edge(sid(i), sid(i + 1))) {
                cfg.edges.push_back({sid(i), sid(i + 1), w, steps[i + 1].statement});
                emitted = true;
            }
            // false branch skips the condition node
            if (!has_edge(sid(i), sid(i + 2))) {
                cfg.edges.push_back({sid(i), sid(i + 2), w, std::nullopt});
                emitted = true;
            }
            if (emitted) last_weight = w;
        } else {
            if (!has_edge(sid(i), sid(i + 1))) {
                cfg.edges.push_back({sid(i), sid(i + 1), last_weight + 1, std::nullopt});
                last_weight += 1;
            }
        }
    }
    return cfg;
}

// Strips a leading/trailing Markdown code fence, a common LLM
// formatting artifact.
inline std::string strip_code_fence(const std::string& text) {
    size_t start = text.find_first_not_of(" \t\r\n");
    if (start == std::string::npos || text.compare(start, 3, "```") != 0) return text;
    size_t body = text.find('\n', start);
    if (body == std::string::npos) return text;
    ++body;
    size_t end = text.rfind("```");
    if (end == std::string::npos || end <= body) return text;
    return text.substr(body, end - body);
}

struct CfgGenerationResult {
    Cfg cfg;
    int attempts = 0;
};

// Prompt #1 -> LLM -> parse -> validate, regenerating on invalid output
// up to the configured bound.
inline CfgGenerationResult generate_cfg(const UseCase& use_case, Provider& provider,
                                        const GenerationConfig& config = {}) {
    if (config.max_regeneration_attempts < 1)
        throw std::invalid_argument("max_regeneration_attempts must be >= 1");

    GenerationRequest request;
    request.system_role = kCfgSystemRole;
    request.user_prompt = assemble_cfg_prompt(use_case);

    std::string last_failure = "no attempts made";
    for (int attempt = 1; attempt <= config.max_regeneration_attempts; ++attempt) {
        std::string raw = provider.complete(request);
        Cfg cfg;
        try {
            cfg = parse_cfg_document(strip_code_fence(raw));
        } catch (const std::runtime_error& e) {
            last_failure = std::string("attempt ") + std::to_string(attempt) +
                           ": unparseable response: " + e.what();
            continue;
        }
        ValidationVerdict verdict = validate_cfg(cfg);
        if (verdict.valid) return {std::move(cfg), attempt};
        last_failure = "attempt " + std::to_string(attempt) + ": invalid CFG:";
        for (const auto& f : verdict.failures)
            last_failure += std::string(" [") + to_string(f.rule) +
                            (f.subject.empty() ? "" : " " + f.subject) + "]";
    }
    throw GenerationExhausted("CFG generation failed after " +
                              std::to_string(config.max_regeneration_attempts) +
                              " attempts; " + last_failure);
}

}  // namespace tgen
