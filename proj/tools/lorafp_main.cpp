#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lorafp/dataset.hpp"
#include "lorafp/errors.hpp"
#include "lorafp/harness.hpp"
#include "lorafp/parallel.hpp"
#include "lorafp/report.hpp"

namespace {

using namespace lorafp;

struct CommonArgs {
    std::string config;
    std::optional<std::int64_t> seed;
    int jobs = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* config = cmd->add_option("--config", args.config, "experiment config file (JSON)");
    if (config_required) config->required();
    cmd->add_option("--seed", args.seed, "override the split and model seeds");
    cmd->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
    cmd->add_option("--out", args.out, "output directory (overrides the config)");
}

ExperimentSpec load_spec(const CommonArgs& args) {
    set_jobs(args.jobs);
    ExperimentSpec spec = load_experiment_spec(args.config);
    if (args.seed) {
        spec.split.seed = *args.seed;
        spec.etrees.seed = *args.seed;
        spec.mlp.seed = static_cast<std::uint64_t>(*args.seed);
    }
    if (!args.out.empty()) spec.output_dir = args.out;
    return spec;
}

std::string stats_line(const ErrorStats& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean %.1f m, median %.1f m, p90 %.1f m, p95 %.1f m (n=%zu)",
                  s.mean, s.median, s.p90, s.p95, s.count);
    return buf;
}

int cmd_ingest_check(const CommonArgs& args, double bin_width) {
    const ExperimentSpec spec = load_spec(args);
    const Dataset ds = load_dataset(spec.dataset_path, spec.mapping);
    const auto hist = gateway_histogram(ds);

    std::cout << "records: " << ds.size() << "\n";
    std::cout << "gateways  messages\n";
    for (const auto& [g, count] : hist) std::cout << "       " << g << "  " << count << "\n";

    ensure_directory(spec.output_dir);
    write_table1_csv(spec.output_dir + "/table1.csv", hist);
    const auto bins = rssi_histogram(ds, bin_width);
    write_rssi_hist_csv(spec.output_dir + "/fig2_hist.csv", bins);
    std::cout << "wrote table1.csv and fig2_hist.csv to " << spec.output_dir << "\n";
    return 0;
}

int cmd_split(const CommonArgs& args) {
    const ExperimentSpec spec = load_spec(args);
    const PreparedData data = prepare(spec);
    ensure_directory(spec.output_dir);
    const std::string path = spec.output_dir + "/split.txt";
    save_split(data.split, path);
    std::cout << "split sizes: train " << data.split.train_indices.size() << ", val "
              << data.split.val_indices.size() << ", test " << data.split.test_indices.size()
              << "\n"
              << "manifest written to " << path << "\n";
    return 0;
}

int cmd_sweep_scalar(const CommonArgs& args, bool alpha) {
    const ExperimentSpec spec = load_spec(args);
    const PreparedData data = prepare(spec);
    const SweepResult sweep = alpha ? sweep_alpha(spec, data) : sweep_beta(spec, data);

    ensure_directory(spec.output_dir);
    const std::string fig = alpha ? "fig3_alpha.csv" : "fig4_beta.csv";
    const std::string summary = alpha ? "sweep_alpha_summary.csv" : "sweep_beta_summary.csv";
    write_sweep_csv(spec.output_dir + "/" + fig, sweep);
    write_sweep_summary_csv(spec.output_dir + "/" + summary, sweep);

    std::cout << sweep.axis << " sweep over " << sweep.points.size() << " values\n";
    for (const SweepPoint& p : sweep.points) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "  %-8s %-6g val mean %8.1f m   median %8.1f m%s",
                      sweep.axis.c_str(), p.value, p.val_mean, p.val_median,
                      p.value == sweep.best_value ? "   <- best" : "");
        std::cout << buf << "\n";
    }
    std::cout << "test at best " << sweep.axis << "=" << sweep.best_value << ": "
              << stats_line(sweep.test_at_best) << "\n"
              << "wrote " << fig << " and " << summary << " to " << spec.output_dir << "\n";
    return 0;
}

int cmd_sweep_table2(const CommonArgs& args, bool include_boolean, std::size_t kmax) {
    const ExperimentSpec spec = load_spec(args);
    const PreparedData data = prepare(spec);
    if (kmax == 0) kmax = spec.knn.k_max;

    const RepresentationKind reps[] = {RepresentationKind::Positive, RepresentationKind::Normalized,
                                       RepresentationKind::Exponential, RepresentationKind::Powed};
    Table2Result table = sweep_metric_k(spec, data, kTable2Metrics, reps, kmax);
    if (include_boolean) {
        const Table2Result boolean = run_boolean_family(spec, data);
        table.cells.insert(table.cells.end(), boolean.cells.begin(), boolean.cells.end());
    }

    ensure_directory(spec.output_dir);
    write_table2_csv(spec.output_dir + "/table2.csv", table);

    std::cout << "metric        representation  best_k  val_mean_m  val_median_m\n";
    for (const Table2Cell& c : table.cells) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "%-12s  %-14s  %6zu  %10.1f  %12.1f",
                      to_string(c.metric).c_str(), to_string(c.representation).c_str(), c.best_k,
                      c.val_mean, c.val_median);
        std::cout << buf << "\n";
    }
    std::cout << "wrote table2.csv to " << spec.output_dir << "\n";
    return 0;
}

int cmd_run(const CommonArgs& args) {
    const ExperimentSpec spec = load_spec(args);
    const PreparedData data = prepare(spec);
    const RunResult result = run_experiment(spec, data);
    std::cout << "method: " << to_string(result.method) << "\n"
              << "train: " << stats_line(result.train_stats) << "\n"
              << "val:   " << stats_line(result.val_stats) << "\n"
              << "test:  " << stats_line(result.test_stats) << "\n";
    if (result.method == Method::Mlp)
        std::cout << "epochs: " << result.history.train_loss.size() << " (best "
                  << result.history.best_epoch << ")\n";
    if (!spec.output_dir.empty())
        std::cout << "wrote predictions and table3.csv to " << spec.output_dir << "\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    const std::vector<std::string> written = render_report(dir);
    if (written.empty()) {
        std::cout << "no report files found in " << dir << "\n";
        return 0;
    }
    std::cout << "rendered in " << dir << ":\n";
    for (const std::string& name : written) std::cout << "  " << name << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSSI fingerprint localization experiments"};
    app.require_subcommand(1);

    CommonArgs ingest_args;
    double bin_width = 1.0;
    auto* ingest = app.add_subcommand("ingest-check", "validate the dataset, emit Table 1 and histogram data");
    add_common(ingest, ingest_args);
    ingest->add_option("--bin-width", bin_width, "RSSI histogram bin width in dBm")
        ->check(CLI::PositiveNumber);

    CommonArgs split_args;
    auto* split = app.add_subcommand("split", "create and persist a train/val/test split");
    add_common(split, split_args);

    CommonArgs alpha_args;
    auto* alpha = app.add_subcommand("sweep-alpha", "sweep the exponential representation's alpha");
    add_common(alpha, alpha_args);

    CommonArgs beta_args;
    auto* beta = app.add_subcommand("sweep-beta", "sweep the powed representation's beta");
    add_common(beta, beta_args);

    CommonArgs table2_args;
    bool include_boolean = false;
    std::size_t kmax = 0;
    auto* table2 = app.add_subcommand("sweep-table2", "best k per (metric, representation) cell");
    add_common(table2, table2_args);
    table2->add_flag("--include-boolean", include_boolean, "also sweep the binarized metrics");
    table2->add_option("--kmax", kmax, "k sweep upper bound (default: knn.k_max from config)");

    CommonArgs run_args;
    auto* run = app.add_subcommand("run", "fit the configured method and evaluate all splits");
    add_common(run, run_args);

    std::string report_dir;
    auto* report = app.add_subcommand("report", "render charts and a digest from emitted CSV files");
    report->add_option("--out", report_dir, "directory holding the report CSV files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest_check(ingest_args, bin_width);
        if (split->parsed()) return cmd_split(split_args);
        if (alpha->parsed()) return cmd_sweep_scalar(alpha_args, true);
        if (beta->parsed()) return cmd_sweep_scalar(beta_args, false);
        if (table2->parsed()) return cmd_sweep_table2(table2_args, include_boolean, kmax);
        if (run->parsed()) return cmd_run(run_args);
        if (report->parsed()) return cmd_report(report_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
