#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgen/model.hpp"
#include "tgen/validation.hpp"

namespace tgen {

struct LayoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::string name;
    std::vector<UseCase> use_cases;
    std::map<std::string, Cfg> ground_truth;

    const UseCase* find(const std::string& id) const {
        for (const auto& uc : use_cases)
            if (uc.id == id) return &uc;
        return nullptr;
    }
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LayoutError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LayoutError("cannot write file: " + path.string());
    out << content;
}

namespace detail {
inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace detail

// A use case is a .txt file; a first line "Title: ..." becomes the
// title, the rest is the verbatim description.
inline UseCase load_use_case(const std::filesystem::path& path) {
    UseCase uc;
    uc.id = path.stem().string();
    std::string content = read_file(path);
    if (content.rfind("Title:", 0) == 0) {
        auto eol = content.find('\n');
        std::string first = eol == std::string::npos ? content : content.substr(0, eol);
        uc.title = detail::trim(first.substr(std::string("Title:").size()));
        content = eol == std::string::npos ? "" : content.substr(eol + 1);
    }
    uc.text = content;
    if (detail::trim(uc.text).empty())
        throw LayoutError("use case " + uc.id + " has empty text: " + path.string());
    return uc;
}

struct IngestWarning {
    std::string use_case_id;
    std::string message;
};

// Layout: <root>/usecases/<id>.txt and <root>/groundtruth/<id>.cfg.json.
// Use cases load in lexicographic filename order; invalid ground-truth
// CFGs produce warnings, not failures.
inline Dataset ingest_dataset(const std::filesystem::path& root,
                              std::vector<IngestWarning>* warnings = nullptr) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw LayoutError("dataset root is not a directory: " + root.string());
    fs::path uc_dir = root / "usecases";
    if (!fs::is_directory(uc_dir))
        throw LayoutError("missing usecases/ directory under " + root.string());

    Dataset ds;
    ds.name = root.filename().string();

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(uc_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) ds.use_cases.push_back(load_use_case(f));

    fs::path gt_dir = root / "groundtruth";
    if (fs::is_directory(gt_dir)) {
        std::vector<fs::path> gt_files;
        for (const auto& entry : fs::directory_iterator(gt_dir))
            if (entry.is_regular_file()) gt_files.push_back(entry.path());
        std::sort(gt_files.begin(), gt_files.end());
        for (const auto& f : gt_files) {
            std::string name = f.filename().string();
            const std::string suffix = ".cfg.json";
            if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix)
                throw LayoutError("unexpected ground-truth file: " + f.string());
            std::string id = name.substr(0, name.size() - suffix.size());
            if (!ds.find(id))
                throw LayoutError("ground-truth file for unknown use case: " + f.string());
            Cfg cfg;
            try {
                cfg = parse_cfg_document(read_file(f));
            } catch (const std::runtime_error& e) {
                throw LayoutError("ground truth " + f.string() + ": " + e.what());
            }
            ValidationVerdict v = validate_cfg(cfg);
            if (!v.valid && warnings)
                for (const auto& fail : v.failures)
                    warnings->push_back({id, std::string(to_string(fail.rule)) +
                                                 (fail.subject.empty() ? "" : " " + fail.subject)});
            ds.ground_truth.emplace(std::move(id), std::move(cfg));
        }
    }
    return ds;
}

namespace detail {
inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c == '\n' ? ' ' : c);
    }
    return out;
}
}  // namespace detail

inline std::string export_dot(const Cfg& cfg) {
    std::string dot = "digraph cfg {\n";
    for (const auto& n : cfg.nodes)
        dot += "  \"" + detail::dot_escape(n.id) + "\" [label=\"" + detail::dot_escape(n.id) +
               ": " + detail::dot_escape(n.statement) + "\"];\n";
    for (const auto& e : cfg.edges) {
        dot += "  \"" + detail::dot_escape(e.from) + "\" -> \"" + detail::dot_escape(e.to) + "\"";
        if (e.condition) dot += " [label=\"" + detail::dot_escape(*e.condition) + "\"]";
        dot += ";\n";
    }
    dot += "}\n";
    return dot;
}

}  // namespace tgen
