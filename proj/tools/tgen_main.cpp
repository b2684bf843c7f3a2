// tgen: use-case -> CFG -> test-path -> test-case pipeline with
// ground-truth evaluation.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "tgen/tgen.hpp"

namespace fs = std::filesystem;
using namespace tgen;

namespace {

struct ProviderOptions {
    std::string provider = "builder";
    std::string transcript;
    std::string record_to;
};

void add_provider_flags(CLI::App* cmd, ProviderOptions& opts) {
    cmd->add_option("--provider", opts.provider, "Generation backend")
        ->check(CLI::IsMember({"live", "replay", "builder"}))
        ->capture_default_str();
    cmd->add_option("--transcript", opts.transcript, "Replay transcript file");
    cmd->add_option("--record", opts.record_to, "Record live responses to a transcript file");
}

struct ProviderBundle {
    std::shared_ptr<Provider> provider;           // null in builder mode
    std::shared_ptr<RecordingProvider> recorder;  // set when recording
};

ProviderBundle make_provider(const ProviderOptions& opts) {
    ProviderBundle b;
    if (opts.provider == "builder") return b;
    if (opts.provider == "replay") {
        if (opts.transcript.empty())
            throw CLI::ValidationError("--transcript is required with --provider replay");
        b.provider = std::make_shared<ReplayProvider>(ProviderTranscript::load(opts.transcript));
        return b;
    }
    b.provider = std::make_shared<LiveProvider>(LiveProviderConfig::from_env());
    if (!opts.record_to.empty()) {
        b.recorder = std::make_shared<RecordingProvider>(b.provider);
        b.provider = b.recorder;
    }
    return b;
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-")
        std::cout << content;
    else
        write_file(out, content);
}

PipelineConfig make_pipeline_config(const ProviderOptions& popts, const std::string& renderer,
                                    int max_retries) {
    PipelineConfig cfg;
    cfg.generator = popts.provider == "builder" ? GeneratorKind::builder : GeneratorKind::llm;
    cfg.generation.max_regeneration_attempts = max_retries;
    cfg.render.renderer = renderer == "template" ? Renderer::template_ : Renderer::llm;
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"Use-case to test-case pipeline"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a CFG from a use-case file");
    std::string gen_input, gen_out;
    ProviderOptions gen_popts;
    int gen_retries = 5;
    generate->add_option("usecase", gen_input, "Use-case .txt file")->required();
    generate->add_option("--out", gen_out, "Output CFG JSON path (default stdout)");
    generate->add_option("--max-retries", gen_retries, "CFG regeneration bound");
    add_provider_flags(generate, gen_popts);

    // paths
    auto* paths_cmd = app.add_subcommand("paths", "Enumerate test paths of a CFG document");
    std::string paths_input, paths_out;
    paths_cmd->add_option("cfg", paths_input, "CFG JSON file")->required();
    paths_cmd->add_option("--out", paths_out, "Output path document (default stdout)");

    // testcases
    auto* tc_cmd = app.add_subcommand("testcases", "Render test cases from a path document");
    std::string tc_usecase, tc_paths, tc_out, tc_renderer = "template";
    ProviderOptions tc_popts;
    int tc_retries = 3;
    tc_cmd->add_option("usecase", tc_usecase, "Use-case .txt file")->required();
    tc_cmd->add_option("paths", tc_paths, "Path document")->required();
    tc_cmd->add_option("--out", tc_out, "Output test-case document (default stdout)");
    tc_cmd->add_option("--renderer", tc_renderer, "Test-case renderer")
        ->check(CLI::IsMember({"llm", "template"}))
        ->capture_default_str();
    tc_cmd->add_option("--max-retries", tc_retries, "Render regeneration bound");
    add_provider_flags(tc_cmd, tc_popts);

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run all three steps and persist artifacts");
    std::string pipe_usecase, pipe_out = "out", pipe_renderer = "template";
    ProviderOptions pipe_popts;
    int pipe_retries = 5;
    pipe_cmd->add_option("usecase", pipe_usecase, "Use-case .txt file")->required();
    pipe_cmd->add_option("--out", pipe_out, "Output directory")->capture_default_str();
    pipe_cmd->add_option("--renderer", pipe_renderer, "Test-case renderer")
        ->check(CLI::IsMember({"llm", "template"}))
        ->capture_default_str();
    pipe_cmd->add_option("--max-retries", pipe_retries, "CFG regeneration bound");
    add_provider_flags(pipe_cmd, pipe_popts);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate generated CFGs against ground truth");
    std::string eval_root, eval_out, eval_report = "json", eval_renderer = "template";
    ProviderOptions eval_popts;
    double eval_threshold = 0.75;
    int eval_retries = 5;
    eval_cmd->add_option("dataset", eval_root, "Dataset root directory")->required();
    eval_cmd->add_option("--out", eval_out, "Report output path (default stdout)");
    eval_cmd->add_option("--report", eval_report, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    eval_cmd->add_option("--threshold", eval_threshold, "Node-similarity threshold")
        ->capture_default_str();
    eval_cmd->add_option("--max-retries", eval_retries, "CFG regeneration bound");
    eval_cmd->add_option("--renderer", eval_renderer, "Unused in evaluate; accepted for symmetry");
    add_provider_flags(eval_cmd, eval_popts);

    // export-dot
    auto* dot_cmd = app.add_subcommand("export-dot", "Render a CFG document as Graphviz DOT");
    std::string dot_input, dot_out;
    dot_cmd->add_option("cfg", dot_input, "CFG JSON file")->required();
    dot_cmd->add_option("--out", dot_out, "Output DOT path (default stdout)");

    // ingest-check
    auto* ingest_cmd = app.add_subcommand("ingest-check", "Validate a dataset directory layout");
    std::string ingest_root;
    ingest_cmd->add_option("dataset", ingest_root, "Dataset root directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    if (generate->parsed()) {
        UseCase uc = load_use_case(gen_input);
        ProviderBundle b = make_provider(gen_popts);
        Cfg cfg;
        if (gen_popts.provider == "builder") {
            cfg = build_cfg_from_steps(flow_steps_from_lines(uc.text));
        } else {
            GenerationConfig gc;
            gc.max_regeneration_attempts = gen_retries;
            auto res = generate_cfg(uc, *b.provider, gc);
            cfg = std::move(res.cfg);
            std::cerr << "attempts: " << res.attempts << "\n";
        }
        emit(gen_out, serialize_cfg_document(cfg));
        if (b.recorder) b.recorder->transcript().save(gen_popts.record_to);
        return 0;
    }

    if (paths_cmd->parsed()) {
        Cfg cfg = parse_cfg_document(read_file(paths_input));
        ValidationVerdict v = validate_cfg(cfg);
        if (!v.valid) {
            std::cerr << "invalid CFG:\n" << v.to_json().dump(2) << "\n";
            return 1;
        }
        emit(paths_out, serialize_path_document(extract_paths(cfg).translated));
        return 0;
    }

    if (tc_cmd->parsed()) {
        UseCase uc = load_use_case(tc_usecase);
        auto paths = parse_path_document(read_file(tc_paths));
        RenderConfig rc;
        rc.renderer = tc_renderer == "template" ? Renderer::template_ : Renderer::llm;
        rc.max_regeneration_attempts = tc_retries;
        ProviderBundle b = make_provider(tc_popts);
        auto suite = render_test_suite(uc, paths, b.provider.get(), rc);
        emit(tc_out, serialize_test_case_document(suite));
        if (b.recorder) b.recorder->transcript().save(tc_popts.record_to);
        return 0;
    }

    if (pipe_cmd->parsed()) {
        UseCase uc = load_use_case(pipe_usecase);
        ProviderBundle b = make_provider(pipe_popts);
        PipelineConfig pc = make_pipeline_config(pipe_popts, pipe_renderer, pipe_retries);
        PipelineResult result = run_pipeline(uc, b.provider.get(), pc);

        RunManifest manifest;
        manifest.timestamp = RunManifest::now_iso8601();
        manifest.provider_identity = b.provider ? b.provider->name() : "builder";
        manifest.config_snapshot = {{"renderer", pipe_renderer},
                                    {"max_retries", pipe_retries},
                                    {"provider", pipe_popts.provider}};
        manifest.entries.push_back(persist_run(uc, result, pipe_out));
        write_file(fs::path(pipe_out) / "manifest.json", manifest.to_json().dump(2) + "\n");
        if (b.recorder) b.recorder->transcript().save(pipe_popts.record_to);
        std::cerr << "paths: " << result.paths.translated.size()
                  << ", test cases: " << result.suite.size() << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        std::vector<IngestWarning> warnings;
        Dataset ds = ingest_dataset(eval_root, &warnings);
        for (const auto& w : warnings)
            std::cerr << "warning: ground truth " << w.use_case_id << ": " << w.message << "\n";
        ProviderBundle b = make_provider(eval_popts);
        PipelineConfig pc = make_pipeline_config(eval_popts, "template", eval_retries);
        SimilarityConfig sim;
        sim.threshold = eval_threshold;

        std::vector<EvalRow> rows;
        for (const auto& uc : ds.use_cases) {
            auto truth = ds.ground_truth.find(uc.id);
            if (truth == ds.ground_truth.end()) {
                std::cerr << "warning: no ground truth for " << uc.id << ", skipping\n";
                continue;
            }
            Cfg generated;
            if (pc.generator == GeneratorKind::builder)
                generated = build_cfg_from_steps(flow_steps_from_lines(uc.text));
            else
                generated = generate_cfg(uc, *b.provider, pc.generation).cfg;
            rows.push_back(evaluate_against_truth(uc.id, generated, truth->second, sim));
        }
        if (rows.empty()) {
            std::cerr << "no use cases with ground truth\n";
            return 1;
        }
        EvalReport report = EvalReport::from_rows(std::move(rows));
        emit(eval_out, eval_report == "csv" ? report.to_csv()
                                            : report.to_json().dump(2) + "\n");
        if (b.recorder) b.recorder->transcript().save(eval_popts.record_to);
        return 0;
    }

    if (dot_cmd->parsed()) {
        emit(dot_out, export_dot(parse_cfg_document(read_file(dot_input))));
        return 0;
    }

    if (ingest_cmd->parsed()) {
        std::vector<IngestWarning> warnings;
        Dataset ds = ingest_dataset(ingest_root, &warnings);
        std::cout << "dataset: " << ds.name << "\nuse cases: " << ds.use_cases.size()
                  << "\nground truth CFGs: " << ds.ground_truth.size() << "\n";
        for (const auto& w : warnings)
            std::cout << "warning: " << w.use_case_id << ": " << w.message << "\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const AuthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
