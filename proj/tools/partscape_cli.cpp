// partscape: generate partitions by quality-proportional sampling, then
// group them around k representatives.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "partscape.hpp"

namespace {

using namespace partscape;

void log_line(const std::string& msg) { std::cerr << "partscape: " << msg << '\n'; }

std::string flag_name(std::string key) {
    for (char& c : key)
        if (c == '_') c = '-';
    return "--" + key;
}

struct StageFiles {
    std::string dataset = run_files::dataset;
    std::string samples = run_files::samples;
    std::string distances = run_files::distances;
    std::string grouping = run_files::grouping;
    std::string summary = run_files::summary;
    std::string mds = run_files::landscape;
    std::string figures = run_files::figures;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sample partitions of a dataset in proportion to their quality and pick k diverse representatives.\n"
                 "Settings come from --config (key = value lines) and flags; flags win."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "configuration file of key = value lines")->check(CLI::ExistingFile);
    std::map<std::string, std::string> flag_values;
    std::map<std::string, CLI::Option*> flag_options;
    for (const auto& [key, help] : RunConfig::keys())
        flag_options[key] = app.add_option(flag_name(key), flag_values[key], help);

    StageFiles files;
    auto* synth = app.add_subcommand("synth", "write the dataset (synthetic or CSV) in run format");
    synth->add_option("--dataset", files.dataset, "output dataset CSV");

    auto* sample = app.add_subcommand("sample", "k-means seed, bandwidth and Gibbs chains");
    sample->add_option("--dataset", files.dataset, "input dataset CSV");
    sample->add_option("--samples", files.samples, "output sample set");

    auto* dist = app.add_subcommand("dist", "pairwise distance matrix over the samples");
    dist->add_option("--dataset", files.dataset, "input dataset CSV");
    dist->add_option("--samples", files.samples, "input sample set");
    dist->add_option("--distances", files.distances, "output distance matrix");

    auto* group = app.add_subcommand("group", "Gonzalez k-center over the distance matrix");
    group->add_option("--samples", files.samples, "input sample set");
    group->add_option("--distances", files.distances, "input distance matrix");
    group->add_option("--grouping", files.grouping, "output grouping record");
    group->add_option("--summary", files.summary, "output grouping summary CSV");

    auto* mds = app.add_subcommand("mds", "2D landscape of the representatives");
    mds->add_option("--distances", files.distances, "input distance matrix");
    mds->add_option("--grouping", files.grouping, "input grouping record");
    mds->add_option("--mds", files.mds, "output landscape CSV");

    auto* report = app.add_subcommand("report", "figure data and SVG plots");
    report->add_option("--dataset", files.dataset, "input dataset CSV");
    report->add_option("--samples", files.samples, "input sample set");
    report->add_option("--distances", files.distances, "input distance matrix");
    report->add_option("--grouping", files.grouping, "input grouping record");
    report->add_option("--mds", files.mds, "input landscape CSV");
    report->add_option("--figures", files.figures, "output directory");

    auto* pipeline = app.add_subcommand("pipeline", "all stages into <out>/<config hash>/ with a manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code(ErrorCategory::config);
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            for (const auto& [key, value] : RunConfig::parse_file(config_path)) cfg.set(key, value);
        for (const auto& [key, opt] : flag_options)
            if (opt->count() > 0) cfg.set(key, flag_values[key]);

        if (pipeline->parsed()) {
            const RunResult r = run_pipeline(cfg, log_line);
            std::cout << r.directory << '\n';
        } else if (synth->parsed()) {
            if (cfg.csv.empty() == cfg.synthetic.empty()) throw ParameterError("set exactly one of csv or synthetic");
            if (!cfg.synthetic.empty() && cfg.synthetic != "2d5c")
                throw ParameterError("unknown synthetic dataset '" + cfg.synthetic + "' (2d5c)");
            stage_synth(cfg, files.dataset);
        } else if (sample->parsed()) {
            stage_sample(cfg, files.dataset, files.samples, log_line);
        } else if (dist->parsed()) {
            stage_dist(cfg, files.dataset, files.samples, files.distances, log_line);
        } else if (group->parsed()) {
            stage_group(cfg, files.samples, files.distances, files.grouping, files.summary);
        } else if (mds->parsed()) {
            stage_mds(files.distances, files.grouping, files.mds);
        } else if (report->parsed()) {
            for (const auto& path : stage_report(cfg, files.dataset, files.samples, files.distances, files.grouping,
                                                 files.mds, files.figures))
                std::cout << path << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "partscape: " << (e.stage().empty() ? "" : "stage " + e.stage() + ": ") << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "partscape: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
