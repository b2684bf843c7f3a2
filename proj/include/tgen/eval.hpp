#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "tgen/model.hpp"

namespace tgen {

struct EndpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SizeCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedForEmptyPair : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyRecordSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- statement similarity ----------------------------------------------

enum class SimilarityProvider { lexical, embedding_endpoint };

struct SimilarityConfig {
    SimilarityProvider provider = SimilarityProvider::lexical;
    double threshold = 0.75;
    std::string endpoint_url;  // embedding provider only
};

inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

// Term-frequency cosine over lowercase alphanumeric tokens.
inline double lexical_similarity(const std::string& a, const std::string& b) {
    std::map<std::string, int> fa, fb;
    for (const auto& t : tokenize(a)) ++fa[t];
    for (const auto& t : tokenize(b)) ++fb[t];
    if (fa.empty() || fb.empty()) return fa.empty() && fb.empty() ? 1.0 : 0.0;
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, c] : fa) {
        na += double(c) * c;
        auto it = fb.find(t);
        if (it != fb.end()) dot += double(c) * it->second;
    }
    for (const auto& [t, c] : fb) nb += double(c) * c;
    double s = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(s, 0.0, 1.0);
}

// HTTP adapter: POST {"texts":[...]} -> {"vectors":[[...],...]}.
inline std::vector<std::vector<double>> fetch_embeddings(const std::string& endpoint_url,
                                                         const std::vector<std::string>& texts) {
    auto slash = endpoint_url.find('/', endpoint_url.find("//") == std::string::npos
                                            ? 0
                                            : endpoint_url.find("//") + 2);
    std::string host = slash == std::string::npos ? endpoint_url : endpoint_url.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : endpoint_url.substr(slash);
    httplib::Client client(host);
    nlohmann::json body{{"texts", texts}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) throw EndpointError("embedding endpoint unreachable: " + host);
    if (res->status != 200)
        throw EndpointError("embedding endpoint HTTP " + std::to_string(res->status));
    try {
        nlohmann::json reply = nlohmann::json::parse(res->body);
        return reply.at("vectors").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw EndpointError(std::string("bad embedding response: ") + e.what());
    }
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) throw EndpointError("embedding dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

inline double similarity(const std::string& a, const std::string& b,
                         const SimilarityConfig& config = {}) {
    if (config.provider == SimilarityProvider::lexical) return lexical_similarity(a, b);
    auto vecs = fetch_embeddings(config.endpoint_url, {a, b});
    if (vecs.size() != 2) throw EndpointError("expected 2 embedding vectors");
    return cosine(vecs[0], vecs[1]);
}

// --- optimal assignment -------------------------------------------------

// Maximum-total-similarity matching of size min(m,n), solved as a
// square min-cost assignment on (1 - score) with zero-padding. A tiny
// index-ordered perturbation makes tie-breaking deterministic (lowest
// (row, col) first).
inline std::vector<std::pair<int, int>> solve_assignment(
    const std::vector<std::vector<double>>& scores) {
    const int m = static_cast<int>(scores.size());
    const int n = m == 0 ? 0 : static_cast<int>(scores[0].size());
    if (m == 0 || n == 0) return {};
    for (const auto& row : scores)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("score matrix is ragged");

    const int N = std::max(m, n);
    const double eps = 1e-12 / (double(N) * N + 1);
    std::vector<std::vector<double>> cost(N + 1, std::vector<double>(N + 1, 0.0));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double s = (i < m && j < n) ? scores[i][j] : 0.0;
            cost[i + 1][j + 1] = (1.0 - s) + eps * (double(i) * N + j);
        }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(N + 1, 0.0), v(N + 1, 0.0);
    std::vector<int> p(N + 1, 0), way(N + 1, 0);
    for (int i = 1; i <= N; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(N + 1, inf);
        std::vector<char> used(N + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= N; ++j)
                if (!used[j]) {
                    double cur = cost[i0][j] - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            for (int j = 0; j <= N; ++j)
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<std::pair<int, int>> pairs;
    for (int j = 1; j <= N; ++j) {
        int i = p[j];
        if (i >= 1 && i <= m && j <= n) pairs.emplace_back(i - 1, j - 1);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

// --- node matching and P/R/F1 -------------------------------------------

struct Counts {
    int tp = 0, fp = 0, fn = 0;

    bool operator==(const Counts&) const = default;
};

struct MatchedPair {
    std::string generated_id;
    std::string truth_id;
    double score = 0.0;
};

struct MatchResult {
    std::vector<MatchedPair> pairs;
    Counts node_counts;
    Counts edge_counts;
};

// Full pairwise similarity matrix -> optimal assignment -> threshold
// cut. Generated ids of matched nodes are relabeled to truth ids for
// the edge comparison.
inline MatchResult match_nodes(const Cfg& generated, const Cfg& truth,
                               const SimilarityConfig& config = {}) {
    MatchResult r;
    const int m = static_cast<int>(generated.nodes.size());
    const int n = static_cast<int>(truth.nodes.size());
    if (m > 0 && n > 0) {
        std::vector<std::vector<double>> scores(m, std::vector<double>(n));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                scores[i][j] =
                    similarity(generated.nodes[i].statement, truth.nodes[j].statement, config);
        for (auto [i, j] : solve_assignment(scores))
            if (scores[i][j] >= config.threshold)
                r.pairs.push_back({generated.nodes[i].id, truth.nodes[j].id, scores[i][j]});
    }
    r.node_counts.tp = static_cast<int>(r.pairs.size());
    r.node_counts.fp = m - r.node_counts.tp;
    r.node_counts.fn = n - r.node_counts.tp;
    return r;
}

// Directed-edge multiset comparison after id synchronization. Edges
// touching an unmatched endpoint are unconditional FP (generated) or
// FN (truth); conditions and weights are ignored.
inline Counts compare_edges(const Cfg& generated, const Cfg& truth,
                            const std::vector<MatchedPair>& pairs) {
    std::map<std::string, std::string> relabel;
    for (const auto& p : pairs) relabel[p.generated_id] = p.truth_id;
    std::map<std::string, int> matched_truth;
    for (const auto& p : pairs) matched_truth[p.truth_id] = 1;

    std::map<std::pair<std::string, std::string>, int> truth_edges;
    Counts c;
    for (const auto& e : truth.edges) {
        if (matched_truth.count(e.from) && matched_truth.count(e.to))
            ++truth_edges[{e.from, e.to}];
        else
            ++c.fn;  // endpoint never matched -> edge cannot be recovered
    }
    for (const auto& e : generated.edges) {
        auto f = relabel.find(e.from);
        auto t = relabel.find(e.to);
        if (f == relabel.end() || t == relabel.end()) {
            ++c.fp;
            continue;
        }
        auto it = truth_edges.find({f->second, t->second});
        if (it != truth_edges.end() && it->second > 0) {
            --it->second;
            ++c.tp;
        } else {
            ++c.fp;
        }
    }
    for (const auto& [key, count] : truth_edges) c.fn += count;
    return c;
}

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Empty-vs-empty comparisons score perfect; otherwise a zero
// denominator scores zero.
inline Prf1 prf1(int tp, int fp, int fn) {
    if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("negative count");
    Prf1 r;
    if (tp + fp == 0)
        r.precision = (fn == 0) ? 1.0 : 0.0;
    else
        r.precision = double(tp) / (tp + fp);
    if (tp + fn == 0)
        r.recall = (fp == 0) ? 1.0 : 0.0;
    else
        r.recall = double(tp) / (tp + fn);
    r.f1 = (r.precision + r.recall > 0) ? 2 * r.precision * r.recall / (r.precision + r.recall)
                                        : 0.0;
    return r;
}

inline Prf1 prf1(const Counts& c) { return prf1(c.tp, c.fp, c.fn); }

// --- graph edit distance ------------------------------------------------

namespace detail {

struct GedGraph {
    int n = 0;
    std::vector<std::vector<int>> edge_count;  // n x n directed multiset

    static GedGraph from_cfg(const Cfg& cfg) {
        GedGraph g;
        g.n = static_cast<int>(cfg.nodes.size());
        g.edge_count.assign(g.n, std::vector<int>(g.n, 0));
        std::map<std::string, int> index;
        for (int i = 0; i < g.n; ++i) index[cfg.nodes[i].id] = i;
        for (const auto& e : cfg.edges) {
            auto f = index.find(e.from);
            auto t = index.find(e.to);
            if (f == index.end() || t == index.end())
                throw std::invalid_argument("GED requires edges over declared nodes");
            ++g.edge_count[f->second][t->second];
        }
        return g;
    }

    int edge_total() const {
        int total = 0;
        for (const auto& row : edge_count)
            for (int c : row) total += c;
        return total;
    }
};

// Branch-and-bound over injective node mappings. Node insert/delete
// cost 1, edge insert/delete cost 1, substitutions free.
class GedSearch {
public:
    GedSearch(const GedGraph& a, const GedGraph& b) : a_(a), b_(b) {
        mapping_.assign(a_.n, -1);
        used_b_.assign(b_.n, 0);
        remaining_ = b_.edge_count;  // b edges not yet matched
        remaining_b_edges_ = b_.edge_total();
        best_ = std::numeric_limits<int>::max();
    }

    int run() {
        recurse(0, 0, 0);
        return best_;
    }

private:
    void recurse(int i, int cost, int used_b_count) {
        int remaining_a = a_.n - i;
        int unused_b = b_.n - used_b_count;
        // G2 nodes that cannot receive a mapping must be inserted.
        int bound = cost + std::max(0, unused_b - remaining_a);
        if (bound >= best_) return;

        if (i == a_.n) {
            int total = cost + unused_b + remaining_b_edges_;
            best_ = std::min(best_, total);
            return;
        }

        // map node i to each unused target
        for (int t = 0; t < b_.n; ++t) {
            if (used_b_[t]) continue;
            used_b_[t] = 1;
            mapping_[i] = t;
            std::vector<std::pair<std::pair<int, int>, int>> consumed;
            int delta = apply_edges(i, t, consumed);
            recurse(i + 1, cost + delta, used_b_count + 1);
            for (const auto& [key, count] : consumed) {
                remaining_[key.first][key.second] += count;
                remaining_b_edges_ += count;
            }
            mapping_[i] = -1;
            used_b_[t] = 0;
        }

        // delete node i: all its edges to decided nodes are deletions
        int del = 1;
        for (int j = 0; j <= i; ++j) {
            del += a_.edge_count[i][j];
            if (j < i) del += a_.edge_count[j][i];
        }
        mapping_[i] = -1;
        recurse(i + 1, cost + del, used_b_count);
    }

    // Settle edges between node i and all decided nodes j <= i:
    // consume matching b-edges, record the consumption for undo, and
    // return the deletion cost of unmatched a-edges.
    int apply_edges(int i, int t, std::vector<std::pair<std::pair<int, int>, int>>& consumed) {
        int cost = 0;
        for (int j = 0; j <= i; ++j) {
            int tj = mapping_[j];
            cost += settle(a_.edge_count[i][j], t, tj, consumed);
            if (j < i) cost += settle(a_.edge_count[j][i], tj, t, consumed);
        }
        return cost;
    }

    int settle(int count, int from_t, int to_t,
               std::vector<std::pair<std::pair<int, int>, int>>& consumed) {
        if (count == 0) return 0;
        if (from_t < 0 || to_t < 0) return count;  // endpoint deleted
        int matched = std::min(count, remaining_[from_t][to_t]);
        if (matched > 0) {
            remaining_[from_t][to_t] -= matched;
            remaining_b_edges_ -= matched;
            consumed.push_back({{from_t, to_t}, matched});
        }
        return count - matched;
    }

    const GedGraph& a_;
    const GedGraph& b_;
    std::vector<int> mapping_;
    std::vector<char> used_b_;
    std::vector<std::vector<int>> remaining_;
    int remaining_b_edges_ = 0;
    int best_ = 0;
};

}  // namespace detail

inline constexpr int kGedExactCap = 12;

// Exact structure-only graph edit distance (node/edge insert and delete
// cost 1, substitutions free), minimized over injective node mappings.
inline int ged(const Cfg& g1, const Cfg& g2, int size_cap = kGedExactCap) {
    if (static_cast<int>(g1.nodes.size()) > size_cap ||
        static_cast<int>(g2.nodes.size()) > size_cap)
        throw SizeCapExceeded("exact GED capped at " + std::to_string(size_cap) +
                              " nodes per graph; use ged_upper_bound");
    detail::GedGraph a = detail::GedGraph::from_cfg(g1);
    detail::GedGraph b = detail::GedGraph::from_cfg(g2);
    return detail::GedSearch(a, b).run();
}

// Upper bound from a fixed node mapping (e.g. the match_nodes pairs),
// for graphs above the exact-search cap.
inline int ged_upper_bound(const Cfg& g1, const Cfg& g2, const std::vector<MatchedPair>& pairs) {
    std::map<std::string, std::string> relabel;
    std::map<std::string, int> mapped_truth;
    for (const auto& p : pairs) {
        relabel[p.generated_id] = p.truth_id;
        mapped_truth[p.truth_id] = 1;
    }
    int cost = static_cast<int>(g1.nodes.size() - relabel.size());  // deletions
    cost += static_cast<int>(g2.nodes.size() - mapped_truth.size());  // insertions

    std::map<std::pair<std::string, std::string>, int> truth_edges;
    for (const auto& e : g2.edges) ++truth_edges[{e.from, e.to}];
    for (const auto& e : g1.edges) {
        auto f = relabel.find(e.from);
        auto t = relabel.find(e.to);
        if (f == relabel.end() || t == relabel.end()) {
            ++cost;
            continue;
        }
        auto it = truth_edges.find({f->second, t->second});
        if (it != truth_edges.end() && it->second > 0)
            --it->second;
        else
            ++cost;
    }
    for (const auto& [key, count] : truth_edges) cost += count;
    return cost;
}

// nGED = 1 - GED / (|V1| + |E1| + |V2| + |E2|).
inline double nged_from_ged(int ged_value, const Cfg& g1, const Cfg& g2) {
    double denom = double(g1.nodes.size() + g1.edges.size() + g2.nodes.size() + g2.edges.size());
    if (denom == 0) throw UndefinedForEmptyPair("nGED undefined for two empty graphs");
    return 1.0 - double(ged_value) / denom;
}

inline double nged(const Cfg& g1, const Cfg& g2, int size_cap = kGedExactCap) {
    return nged_from_ged(ged(g1, g2, size_cap), g1, g2);
}

// --- path-count metrics -------------------------------------------------

struct PathCountRecord {
    std::string use_case_id;
    int generated_path_count = 0;
    int truth_path_count = 0;
};

inline double discrepancy_rate(const std::vector<PathCountRecord>& records) {
    if (records.empty()) throw EmptyRecordSet("discrepancy rate over zero use cases");
    int diff = 0;
    for (const auto& r : records)
        if (r.generated_path_count != r.truth_path_count) ++diff;
    return 100.0 * diff / static_cast<double>(records.size());
}

inline double avg_abs_delta(const std::vector<PathCountRecord>& records) {
    if (records.empty()) throw EmptyRecordSet("avg |delta| over zero use cases");
    double sum = 0;
    for (const auto& r : records) sum += std::abs(r.generated_path_count - r.truth_path_count);
    return sum / static_cast<double>(records.size());
}

// --- report -------------------------------------------------------------

struct EvalRow {
    std::string use_case_id;
    Prf1 node;
    Prf1 edge;
    double nged = 0.0;
    bool nged_is_bound = false;  // true when the upper-bound mode was used
    int generated_path_count = 0;
    int truth_path_count = 0;
};

struct EvalAggregates {
    Prf1 node;
    Prf1 edge;
    double nged = 0.0;
    double discrepancy_rate = 0.0;
    double avg_abs_delta = 0.0;
    int n_diff = 0;
    int n_use_cases = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    EvalAggregates aggregates;

    static EvalAggregates aggregate(const std::vector<EvalRow>& rows) {
        EvalAggregates a;
        a.n_use_cases = static_cast<int>(rows.size());
        if (rows.empty()) return a;
        std::vector<PathCountRecord> recs;
        for (const auto& r : rows) {
            a.node.precision += r.node.precision;
            a.node.recall += r.node.recall;
            a.node.f1 += r.node.f1;
            a.edge.precision += r.edge.precision;
            a.edge.recall += r.edge.recall;
            a.edge.f1 += r.edge.f1;
            a.nged += r.nged;
            recs.push_back({r.use_case_id, r.generated_path_count, r.truth_path_count});
            if (r.generated_path_count != r.truth_path_count) ++a.n_diff;
        }
        double n = static_cast<double>(rows.size());
        a.node.precision /= n;
        a.node.recall /= n;
        a.node.f1 /= n;
        a.edge.precision /= n;
        a.edge.recall /= n;
        a.edge.f1 /= n;
        a.nged /= n;
        a.discrepancy_rate = discrepancy_rate(recs);
        a.avg_abs_delta = avg_abs_delta(recs);
        return a;
    }

    static EvalReport from_rows(std::vector<EvalRow> rows) {
        EvalReport r;
        r.aggregates = aggregate(rows);
        r.rows = std::move(rows);
        return r;
    }

    nlohmann::json to_json() const {
        auto prf_json = [](const Prf1& p) {
            return nlohmann::json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
        };
        // aggregates must be recomputable from rows
        EvalAggregates check = aggregate(rows);
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
        if (!close(check.nged, aggregates.nged) ||
            !close(check.discrepancy_rate, aggregates.discrepancy_rate) ||
            !close(check.avg_abs_delta, aggregates.avg_abs_delta) ||
            !close(check.node.f1, aggregates.node.f1) || !close(check.edge.f1, aggregates.edge.f1))
            throw std::logic_error("report aggregates disagree with rows");

        nlohmann::json j;
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows)
            j["rows"].push_back({{"use_case_id", r.use_case_id},
                                 {"node", prf_json(r.node)},
                                 {"edge", prf_json(r.edge)},
                                 {"nged", r.nged},
                                 {"nged_is_bound", r.nged_is_bound},
                                 {"generated_path_count", r.generated_path_count},
                                 {"truth_path_count", r.truth_path_count}});
        j["aggregates"] = {{"node", prf_json(aggregates.node)},
                           {"edge", prf_json(aggregates.edge)},
                           {"nged", aggregates.nged},
                           {"discrepancy_rate", aggregates.discrepancy_rate},
                           {"avg_abs_delta", aggregates.avg_abs_delta},
                           {"n_diff", aggregates.n_diff},
                           {"n_use_cases", aggregates.n_use_cases}};
        return j;
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "use_case,node_precision,node_recall,node_f1,edge_precision,edge_recall,edge_f1,"
              "nged,generated_paths,truth_paths\n";
        os.setf(std::ios::fixed);
        os.precision(4);
        for (const auto& r : rows)
            os << r.use_case_id << ',' << r.node.precision << ',' << r.node.recall << ','
               << r.node.f1 << ',' << r.edge.precision << ',' << r.edge.recall << ',' << r.edge.f1
               << ',' << r.nged << ',' << r.generated_path_count << ',' << r.truth_path_count
               << '\n';
        os << "TOTAL," << aggregates.node.precision << ',' << aggregates.node.recall << ','
           << aggregates.node.f1 << ',' << aggregates.edge.precision << ','
           << aggregates.edge.recall << ',' << aggregates.edge.f1 << ',' << aggregates.nged << ','
           << aggregates.discrepancy_rate << ',' << aggregates.avg_abs_delta << '\n';
        return os.str();
    }
};

}  // namespace tgen
