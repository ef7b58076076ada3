// Command-line front end: dataset generation, pipeline runs, evaluation,
// and overlay re-rendering.

#include "trail/config.hpp"
#include "trail/dataset.hpp"
#include "trail/pipeline.hpp"
#include "trail/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int cmd_gen(const std::string& suite, const std::string& out, std::uint64_t seed) {
    std::vector<trail::SceneSpec> specs = trail::standard_suites(seed);
    bool matched = false;
    for (const trail::SceneSpec& spec : specs) {
        if (suite != "all" && spec.name != suite) continue;
        matched = true;
        trail::Dataset ds = trail::render_sequence(spec);
        fs::path dir = fs::path(out) / spec.name;
        trail::save_dataset(dir, ds);
        std::cerr << "wrote " << ds.frames.size() << " keyframes to " << dir.string() << "\n";
    }
    if (!matched) {
        std::cerr << "error: unknown suite '" << suite << "' (expected S1..S5 or all)\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_run(const std::string& data, const std::string& config_path, const std::string& report_path,
            const std::string& annotate, const std::string& mode, bool timings) {
    trail::RunConfig config = trail::load_config_file(config_path);
    trail::PipelineOptions options;
    options.mode = trail::run_mode_from_string(mode);
    options.timings = timings;
    if (!annotate.empty()) options.annotate_dir = fs::path(annotate);

    trail::Dataset ds = trail::load_dataset(data);
    trail::PipelineResult result = trail::run_pipeline(ds, config, options);

    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw trail::DataError("cannot open report for writing: " + report_path);
    out << result.report_jsonl;
    std::cerr << "processed " << result.frames.size() << " keyframes";
    if (result.evaluated > 0) {
        std::cerr << ", success rate " << result.successes << "/" << result.evaluated;
    }
    std::cerr << "\n";
    return kExitOk;
}

struct ReportStats {
    json header;
    int frames = 0;
    int successes = 0;
    int evaluated = 0;
    double overlap_sum = 0.0;
    std::map<std::string, int> verdicts;
};

ReportStats read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw trail::DataError("cannot open report: " + path);
    ReportStats stats;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw trail::DataError("malformed report line in " + path);
        std::string type = j.value("type", "");
        if (type == "header") {
            stats.header = j;
            continue;
        }
        if (type != "frame") throw trail::DataError("unexpected record type in " + path);
        stats.frames += 1;
        stats.overlap_sum += j.value("overlap_fraction", 0.0);
        stats.verdicts[j.value("verdict", "unknown")] += 1;
        std::string eval = j.value("eval", "na");
        if (eval != "na") {
            stats.evaluated += 1;
            if (eval == "success") stats.successes += 1;
        }
    }
    return stats;
}

int cmd_eval(const std::string& report_path, const std::string& data) {
    ReportStats stats = read_report(report_path);
    json summary;
    summary["suite"] = fs::path(data).filename().string();
    summary["mode"] = stats.header.value("mode", "unknown");
    summary["frames"] = stats.frames;
    summary["evaluated"] = stats.evaluated;
    summary["successes"] = stats.successes;
    summary["success_rate"] =
        stats.evaluated > 0 ? json(static_cast<double>(stats.successes) / stats.evaluated) : json(nullptr);
    summary["mean_overlap_fraction"] = stats.frames > 0 ? stats.overlap_sum / stats.frames : 0.0;
    summary["verdicts"] = stats.verdicts;
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_annotate(const std::string& report_path, const std::string& data, const std::string& out) {
    ReportStats stats = read_report(report_path);
    if (stats.header.is_null() || !stats.header.contains("config")) {
        throw trail::DataError("report has no header; cannot re-render annotations: " + report_path);
    }
    trail::RunConfig config = trail::config_from_json(stats.header.at("config"));
    trail::PipelineOptions options;
    options.mode = trail::run_mode_from_string(stats.header.value("mode", "full"));
    options.annotate_dir = fs::path(out);

    trail::Dataset ds = trail::load_dataset(data);
    trail::run_pipeline(ds, config, options);
    std::cerr << "annotated frames written to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Keyframe trail detection with obstacle-aware swarm tracking"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Generate a synthetic keyframe dataset");
    std::string gen_suite = "all", gen_out;
    std::uint64_t gen_seed = 1;
    gen->add_option("--suite", gen_suite, "Suite name (S1..S5) or 'all'");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--seed", gen_seed, "Scene seed");

    auto* run = app.add_subcommand("run", "Run the detection pipeline over a dataset");
    std::string run_data, run_config, run_report, run_annotate, run_mode = "full";
    bool run_timings = false;
    run->add_option("--data", run_data, "Dataset directory")->required();
    run->add_option("--config", run_config, "RunConfig JSON file (defaults when omitted)");
    run->add_option("--report", run_report, "Report JSONL output path")->required();
    run->add_option("--annotate", run_annotate, "Directory for overlay frames");
    run->add_option("--mode", run_mode, "full | original");
    run->add_flag("--timings", run_timings, "Include stage timings in the report");

    auto* eval = app.add_subcommand("eval", "Summarize a report against a dataset");
    std::string eval_report, eval_data;
    eval->add_option("--report", eval_report, "Report JSONL path")->required();
    eval->add_option("--data", eval_data, "Dataset directory")->required();

    auto* annotate = app.add_subcommand("annotate", "Re-render overlays from a saved report");
    std::string ann_report, ann_data, ann_out;
    annotate->add_option("--report", ann_report, "Report JSONL path")->required();
    annotate->add_option("--data", ann_data, "Dataset directory")->required();
    annotate->add_option("--out", ann_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_suite, gen_out, gen_seed);
        if (run->parsed()) return cmd_run(run_data, run_config, run_report, run_annotate, run_mode, run_timings);
        if (eval->parsed()) return cmd_eval(eval_report, eval_data);
        if (annotate->parsed()) return cmd_annotate(ann_report, ann_data, ann_out);
    } catch (const trail::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const trail::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
