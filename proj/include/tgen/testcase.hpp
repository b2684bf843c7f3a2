#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tgen/cfg_generation.hpp"
#include "tgen/llm.hpp"
#include "tgen/model.hpp"
#include "tgen/paths.hpp"

namespace tgen {

struct RenderExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Renderer { llm, template_ };

struct RenderConfig {
    Renderer renderer = Renderer::llm;
    int max_regeneration_attempts = 3;
};

inline constexpr const char* kTestCaseSystemRole =
    "You are an experienced software test engineer writing abstract test cases from "
    "requirements.";

// Prompt #2: role, instructions, one example test case in the output
// schema, the use-case text, then the path steps in order.
inline std::string assemble_testcase_prompt(const UseCase& use_case, const TestPath& path) {
    if (path.steps.empty()) throw std::invalid_argument("path has no steps");
    std::string p;
    p += "Act as a software test engineer.\n\n";

    p += "Instructions:\n"
         "- Write one complete abstract test case covering the execution path below.\n"
         "- Give it a short descriptive title, the preconditions implied by the use case, "
         "and one step per path statement with a concrete expected result.\n"
         "- Treat \"condition: ...\" steps as the branch taken; fold each into the "
         "expected outcome of the following step rather than emitting a separate step.\n"
         "- Respond with valid JSON only, using the schema shown in the example.\n\n";

    p += "Example test case:\n"
         "{\"title\":\"Verify successful login\","
         "\"preconditions\":[\"A registered user account exists\"],"
         "\"steps\":[{\"action\":\"User enters valid credentials\","
         "\"expected_result\":\"Credentials are accepted\"},"
         "{\"action\":\"User submits the login form\","
         "\"expected_result\":\"The dashboard is displayed\"}]}\n\n";

    p += "Use case:\n" + use_case.text + "\n\n";

    p += "Test path:\n";
    for (size_t i = 0; i < path.steps.size(); ++i)
        p += std::to_string(i + 1) + ". " + path.steps[i] + "\n";
    return p;
}

namespace detail {
inline std::string truncate(const std::string& s, size_t n) {
    return s.size() <= n ? s : s.substr(0, n);
}
}  // namespace detail

// Deterministic fallback renderer: statement steps become actions, a
// condition step becomes a "Given <condition>, " prefix on the next
// action's expected result.
inline TestCase render_template_test_case(const UseCase& use_case, const TestPath& path) {
    if (path.steps.empty()) throw std::invalid_argument("path has no steps");
    TestCase tc;
    std::string terminal;
    for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it)
        if (!is_condition_step(*it)) {
            terminal = *it;
            break;
        }
    tc.title = "Verify: " + detail::truncate(terminal, 80);
    tc.preconditions.push_back("Use case " + (use_case.title ? *use_case.title : use_case.id) +
                               " is available");
    std::string pending_condition;
    for (const auto& step : path.steps) {
        if (is_condition_step(step)) {
            pending_condition = step.substr(std::string("condition: ").size());
            continue;
        }
        TestStep ts;
        ts.action = step;
        ts.expected_result = pending_condition.empty()
                                 ? "Step completes as described"
                                 : "Given " + pending_condition + ", step completes as described";
        pending_condition.clear();
        tc.steps.push_back(std::move(ts));
    }
    return tc;
}

// One test case per path, via Prompt #2 with format-validation-driven
// regeneration, or via the deterministic template.
inline TestCase create_test_case(const UseCase& use_case, const TestPath& path,
                                 Provider* provider, const RenderConfig& config = {}) {
    if (path.steps.empty()) throw std::invalid_argument("path has no steps");
    if (config.renderer == Renderer::template_) return render_template_test_case(use_case, path);

    if (!provider) throw std::invalid_argument("llm renderer requires a provider");
    GenerationRequest request;
    request.system_role = kTestCaseSystemRole;
    request.user_prompt = assemble_testcase_prompt(use_case, path);

    std::string last_failure;
    for (int attempt = 1; attempt <= config.max_regeneration_attempts; ++attempt) {
        std::string raw = provider->complete(request);
        try {
            nlohmann::json jt = nlohmann::json::parse(strip_code_fence(raw));
            return test_case_from_json(jt);
        } catch (const nlohmann::json::parse_error& e) {
            last_failure = e.what();
        } catch (const MalformedDocument& e) {
            last_failure = e.what();
        }
    }
    throw RenderExhausted("test-case rendering failed after " +
                          std::to_string(config.max_regeneration_attempts) + " attempts: " +
                          last_failure);
}

// Renders the full suite in path order; ids are TC-001.. and
// source_path_index links each case to its path.
inline std::vector<TestCase> render_test_suite(const UseCase& use_case,
                                               const std::vector<TestPath>& paths,
                                               Provider* provider,
                                               const RenderConfig& config = {}) {
    std::vector<TestCase> suite;
    for (size_t i = 0; i < paths.size(); ++i) {
        TestCase tc;
        try {
            tc = create_test_case(use_case, paths[i], provider, config);
        } catch (const RenderExhausted& e) {
            throw RenderExhausted("path " + std::to_string(i) + ": " + e.what());
        }
        char id[16];
        std::snprintf(id, sizeof id, "TC-%03zu", i + 1);
        tc.id = id;
        tc.source_path_index = static_cast<int>(i);
        suite.push_back(std::move(tc));
    }
    return suite;
}

// Markdown export, one section per test case.
inline std::string export_markdown(const std::vector<TestCase>& suite) {
    std::string md;
    for (const auto& tc : suite) {
        md += "## " + tc.id + ": " + tc.title + "\n\n";
        md += "**Preconditions**\n\n";
        for (const auto& p : tc.preconditions) md += "- " + p + "\n";
        md += "\n**Steps**\n\n";
        md += "| # | Action | Expected Result |\n|---|--------|----------------|\n";
        for (size_t i = 0; i < tc.steps.size(); ++i)
            md += "| " + std::to_string(i + 1) + " | " + tc.steps[i].action + " | " +
                  tc.steps[i].expected_result + " |\n";
        md += "\n";
    }
    return md;
}

}  // namespace tgen
