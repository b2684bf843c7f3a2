#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tgen {

struct MalformedDocument : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DuplicateNodeId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UseCase {
    std::string id;
    std::optional<std::string> title;
    std::string text;
};

struct Node {
    std::string id;
    std::string statement;

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string from;
    std::string to;
    int weight = 1;
    std::optional<std::string> condition;

    bool operator==(const Edge&) const = default;
};

// Directed control-flow graph. The root is the first node in `nodes`;
// node order is significant and preserved by the codecs.
struct Cfg {
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    bool operator==(const Cfg&) const = default;

    const Node& root() const {
        if (nodes.empty()) throw std::logic_error("root() on empty Cfg");
        return nodes.front();
    }
    const Node* find_node(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
};

// One test path: statement steps plus "condition: ..." steps.
struct TestPath {
    std::vector<std::string> steps;

    bool operator==(const TestPath&) const = default;
};

inline std::string condition_step(const std::string& guard) { return "condition: " + guard; }
inline bool is_condition_step(const std::string& step) { return step.rfind("condition: ", 0) == 0; }

struct TestStep {
    std::string action;
    std::string expected_result;

    bool operator==(const TestStep&) const = default;
};

struct TestCase {
    std::string id;
    std::string title;
    std::vector<std::string> preconditions;
    std::vector<TestStep> steps;
    int source_path_index = 0;

    bool operator==(const TestCase&) const = default;
};

// --- CFG document codec ------------------------------------------------

inline Cfg parse_cfg_document(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedDocument(std::string("not a JSON document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
        throw MalformedDocument("missing \"nodes\" array");
    if (!doc.contains("edges") || !doc["edges"].is_array())
        throw MalformedDocument("missing \"edges\" array");

    Cfg cfg;
    for (const auto& jn : doc["nodes"]) {
        if (!jn.is_object() || !jn.contains("id") || !jn["id"].is_string())
            throw MalformedDocument("node without string \"id\"");
        if (!jn.contains("statement") || !jn["statement"].is_string())
            throw MalformedDocument("node without string \"statement\"");
        Node n{jn["id"].get<std::string>(), jn["statement"].get<std::string>()};
        for (const auto& seen : cfg.nodes)
            if (seen.id == n.id) throw DuplicateNodeId("duplicate node id: " + n.id);
        cfg.nodes.push_back(std::move(n));
    }
    for (const auto& je : doc["edges"]) {
        if (!je.is_object() || !je.contains("from") || !je["from"].is_string())
            throw MalformedDocument("edge without string \"from\"");
        if (!je.contains("to") || !je["to"].is_string())
            throw MalformedDocument("edge without string \"to\"");
        Edge e;
        e.from = je["from"].get<std::string>();
        e.to = je["to"].get<std::string>();
        if (je.contains("weight") && je["weight"].is_number())
            e.weight = je["weight"].get<int>();
        if (je.contains("condition") && je["condition"].is_string())
            e.condition = je["condition"].get<std::string>();
        cfg.edges.push_back(std::move(e));
    }
    return cfg;
}

inline std::string serialize_cfg_document(const Cfg& cfg) {
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& n : cfg.nodes)
        doc["nodes"].push_back({{"id", n.id}, {"statement", n.statement}});
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : cfg.edges) {
        nlohmann::json je{{"from", e.from}, {"to", e.to}, {"weight", e.weight}};
        // absent condition is serialized as explicit null
        je["condition"] = e.condition ? nlohmann::json(*e.condition) : nlohmann::json(nullptr);
        doc["edges"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

// --- path document codec -----------------------------------------------

inline std::string serialize_path_document(const std::vector<TestPath>& paths) {
    nlohmann::json doc;
    doc["paths"] = nlohmann::json::array();
    for (const auto& p : paths) doc["paths"].push_back(p.steps);
    return doc.dump(2) + "\n";
}

inline std::vector<TestPath> parse_path_document(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedDocument(std::string("not a JSON document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("paths") || !doc["paths"].is_array())
        throw MalformedDocument("missing \"paths\" array");
    std::vector<TestPath> out;
    for (const auto& jp : doc["paths"]) {
        if (!jp.is_array()) throw MalformedDocument("path is not an array");
        TestPath p;
        for (const auto& step : jp) {
            if (!step.is_string()) throw MalformedDocument("path step is not a string");
            p.steps.push_back(step.get<std::string>());
        }
        out.push_back(std::move(p));
    }
    return out;
}

// --- test-case document codec -------------------------------------------

inline nlohmann::json test_case_to_json(const TestCase& tc) {
    nlohmann::json jt;
    jt["id"] = tc.id;
    jt["title"] = tc.title;
    jt["preconditions"] = tc.preconditions;
    jt["steps"] = nlohmann::json::array();
    for (const auto& s : tc.steps)
        jt["steps"].push_back({{"action", s.action}, {"expected_result", s.expected_result}});
    jt["source_path_index"] = tc.source_path_index;
    return jt;
}

inline TestCase test_case_from_json(const nlohmann::json& jt) {
    if (!jt.is_object()) throw MalformedDocument("test case is not an object");
    TestCase tc;
    if (jt.contains("id") && jt["id"].is_string()) tc.id = jt["id"].get<std::string>();
    if (!jt.contains("title") || !jt["title"].is_string())
        throw MalformedDocument("test case without string \"title\"");
    tc.title = jt["title"].get<std::string>();
    if (jt.contains("preconditions")) {
        if (!jt["preconditions"].is_array())
            throw MalformedDocument("\"preconditions\" is not an array");
        for (const auto& p : jt["preconditions"]) {
            if (!p.is_string()) throw MalformedDocument("precondition is not a string");
            tc.preconditions.push_back(p.get<std::string>());
        }
    }
    if (!jt.contains("steps") || !jt["steps"].is_array() || jt["steps"].empty())
        throw MalformedDocument("test case without non-empty \"steps\" array");
    for (const auto& js : jt["steps"]) {
        if (!js.is_object() || !js.contains("action") || !js["action"].is_string())
            throw MalformedDocument("step without string \"action\"");
        TestStep s;
        s.action = js["action"].get<std::string>();
        if (s.action.empty()) throw MalformedDocument("step with empty action");
        if (js.contains("expected_result") && js["expected_result"].is_string())
            s.expected_result = js["expected_result"].get<std::string>();
        tc.steps.push_back(std::move(s));
    }
    if (jt.contains("source_path_index") && jt["source_path_index"].is_number_integer())
        tc.source_path_index = jt["source_path_index"].get<int>();
    return tc;
}

inline std::string serialize_test_case_document(const std::vector<TestCase>& cases) {
    nlohmann::json doc;
    doc["test_cases"] = nlohmann::json::array();
    for (const auto& tc : cases) doc["test_cases"].push_back(test_case_to_json(tc));
    return doc.dump(2) + "\n";
}

inline std::vector<TestCase> parse_test_case_document(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedDocument(std::string("not a JSON document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("test_cases") || !doc["test_cases"].is_array())
        throw MalformedDocument("missing \"test_cases\" array");
    std::vector<TestCase> out;
    for (const auto& jt : doc["test_cases"]) out.push_back(test_case_from_json(jt));
    return out;
}

}  // namespace tgen
