// icls: learning curves, cross-validation, the 1-D never-worse harness and
// the property self-check from the command line.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "icls/dataset.hpp"
#include "icls/experiment.hpp"
#include "icls/parallel.hpp"
#include "icls/results_io.hpp"
#include "icls/theory1d.hpp"
#include "icls/verify/suite.hpp"

namespace fs = std::filesystem;

namespace {

struct DataFlags {
    std::string data;
    std::string label_column = "label";
    std::string positive_label;
    bool drop_constant = false;
    bool synthetic = false;
    std::size_t synthetic_n = 2000;
    std::size_t synthetic_dim = 10;
    double separation = 2.0;
};

struct RunFlags {
    DataFlags data;
    std::string methods = "supervised,self,usm,icls,oracle";
    std::uint64_t seed = 1;
    std::size_t repeats = 10;
    std::optional<std::size_t> labeled;
    std::string u_schedule;
    std::string output;
    std::string format = "csv";
    std::size_t threads = icls::default_thread_count();
    bool timing = false;
    bool no_intercept = false;
};

std::vector<std::size_t> parse_schedule(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size() || item[0] == '-') {
            throw icls::ContractError("--U: '" + item + "' is not a non-negative integer");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
        throw icls::ContractError("--U: empty schedule");
    }
    return out;
}

icls::Dataset load_data(const DataFlags& f, std::uint64_t seed)
{
    icls::Dataset data;
    if (f.synthetic) {
        data = icls::two_gaussians(f.synthetic_n, f.synthetic_dim, f.separation,
                                   icls::derive_seed(seed, "two-gaussians", 0));
    } else {
        if (f.data.empty()) {
            throw icls::ContractError("--data is required (or --synthetic)");
        }
        if (!fs::exists(f.data)) {
            throw icls::DataError(f.data + ": no such file");
        }
        std::optional<std::string> positive;
        if (!f.positive_label.empty()) positive = f.positive_label;
        data = icls::load_dataset_csv(f.data, f.label_column, positive);
    }
    if (f.drop_constant) {
        data = icls::drop_constant_features(std::move(data));
    }
    return data;
}

fs::path output_path(const RunFlags& f, const std::string& dataset, const std::string& command)
{
    if (!f.output.empty()) {
        return f.output;
    }
    fs::path dir = ".";
    if (const char* env = std::getenv("ICLS_OUTPUT_DIR"); env && *env) {
        dir = env;
    }
    return dir / (dataset + "_" + command + (f.format == "jsonl" ? ".jsonl" : ".csv"));
}

fs::path summary_path(const fs::path& results)
{
    fs::path p = results;
    p.replace_extension();
    p += ".summary.csv";
    return p;
}

void print_summary(const std::vector<icls::SummaryRow>& rows)
{
    std::cout << std::left << std::setw(12) << "method" << std::right << std::setw(6) << "L" << std::setw(7)
              << "U" << std::setw(9) << "repeats" << std::setw(12) << "mean_error" << std::setw(10)
              << "se" << std::setw(8) << "worse" << std::setw(12) << "wilcoxon_p" << '\n';
    for (const auto& r : rows) {
        std::cout << std::left << std::setw(12) << icls::method_name(r.method) << std::right << std::setw(6)
                  << r.labeled << std::setw(7) << r.unlabeled << std::setw(9) << r.repeats << std::fixed
                  << std::setprecision(4) << std::setw(12) << r.mean_error << std::setw(10) << r.se_error
                  << std::setw(8) << (r.worse_than_supervised ? std::to_string(*r.worse_than_supervised) : "-")
                  << std::setw(12);
        if (r.wilcoxon_p) {
            std::cout << *r.wilcoxon_p;
        } else {
            std::cout << "-";
        }
        std::cout << '\n';
    }
}

int run_benchmark(const RunFlags& f, bool cv)
{
    const auto format = icls::parse_format(f.format);
    const auto methods = icls::parse_methods(f.methods);
    const icls::Dataset data = load_data(f.data, f.seed);

    icls::ExperimentOptions options;
    options.intercept = !f.no_intercept;
    options.labeled = f.labeled;
    options.threads = f.threads;
    options.measure_time = f.timing;
    options.notice = [](const std::string& msg) { std::cerr << "icls: note: " << msg << '\n'; };

    std::vector<icls::RepeatResult> results;
    if (cv) {
        if (!f.u_schedule.empty()) {
            throw icls::ContractError("--U does not apply to cv");
        }
        results = icls::cross_validate(data, methods, f.repeats, f.seed, options);
    } else {
        const auto schedule = f.u_schedule.empty() ? icls::default_u_schedule() : parse_schedule(f.u_schedule);
        results = icls::learning_curve(data, methods, schedule, f.repeats, f.seed, options);
    }
    if (results.empty()) {
        throw icls::ContractError("no feasible runs for " + data.name);
    }

    const auto rows = icls::summarize(results);
    const std::string body = format == icls::ResultFormat::Csv ? icls::results_to_csv(results)
                                                               : icls::results_to_jsonl(results);
    const fs::path out = output_path(f, data.name, cv ? "cv" : "learning_curve");
    const fs::path summary = summary_path(out);
    icls::write_file_atomic(out, body);
    try {
        icls::write_file_atomic(summary, icls::summary_to_csv(rows));
    } catch (...) {
        std::error_code ignored;
        fs::remove(out, ignored);
        throw;
    }

    std::cout << data.name << ": n=" << data.size() << " d=" << data.dim() << " majority=" << std::fixed
              << std::setprecision(4) << data.majority_fraction() << '\n';
    print_summary(rows);
    std::cout << "results: " << out.string() << "\nsummary: " << summary.string() << '\n';
    return 0;
}

icls::theory::Distribution1D distribution_by_name(const std::string& name)
{
    if (name == "uniform-sign") return icls::theory::uniform_sign();
    if (name == "gaussian-mixture") return icls::theory::gaussian_mixture();
    if (name == "normal-logistic") return icls::theory::normal_logistic();
    throw icls::ContractError("unknown distribution '" + name +
                              "' (expected uniform-sign, gaussian-mixture or normal-logistic)");
}

int run_theorem1(const std::string& dist_name, std::size_t labeled, std::size_t trials, std::uint64_t seed,
                 std::size_t threads)
{
    const auto dist = distribution_by_name(dist_name);
    const auto s = icls::theory::run_theorem1(dist, labeled, trials, seed, threads);
    const auto interval = icls::theory::cbeta_interval(dist);
    std::cout << "distribution " << dist.name << ", L=" << labeled << ", trials=" << s.trials << '\n'
              << std::setprecision(6) << "C_beta = [" << interval.lo << ", " << interval.hi
              << "], beta* = " << icls::theory::optimal_beta(dist) << '\n'
              << std::fixed << std::setprecision(4)
              << "fraction risk_semi <= risk_sup: " << s.fraction_never_worse() << '\n'
              << "fraction strictly better: "
              << (s.trials ? static_cast<double>(s.strictly_better) / static_cast<double>(s.trials) : 0.0) << '\n'
              << std::scientific << std::setprecision(4) << "mean improvement: " << s.mean_improvement
              << " (se " << s.stderr_improvement << ")\n"
              << "worst violation: " << s.worst_violation << '\n';
    return s.never_worse == s.trials ? 0 : 1;
}

int run_selfcheck(std::uint64_t seed, std::size_t threads, bool quick)
{
    icls::verify::SuiteConfig cfg;
    cfg.seed = seed;
    cfg.threads = threads;
    if (quick) {
        cfg.theorem_trials = 1000;
        cfg.curve_repeats = 20;
    }
    bool ok = true;
    for (const auto& r : icls::verify::run_property_suite(cfg, !quick)) {
        std::cout << icls::verify::format_check(r) << std::endl;
        ok = ok && (r.passed || r.skipped);
    }
    return ok ? 0 : 1;
}

void add_data_flags(CLI::App* cmd, DataFlags& f)
{
    cmd->add_option("--data", f.data, "CSV file with a header row");
    cmd->add_option("--label-column", f.label_column, "label column name or 0-based index")
        ->capture_default_str();
    cmd->add_option("--positive-label", f.positive_label, "label value mapped to class 1");
    cmd->add_flag("--drop-constant-features", f.drop_constant, "remove features that never vary");
    cmd->add_flag("--synthetic", f.synthetic, "use two Gaussian classes instead of --data");
    cmd->add_option("--synthetic-n", f.synthetic_n, "objects in the synthetic set")->capture_default_str();
    cmd->add_option("--synthetic-dim", f.synthetic_dim, "features in the synthetic set")->capture_default_str();
    cmd->add_option("--separation", f.separation, "distance between the synthetic class means")
        ->capture_default_str();
}

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_schedule)
{
    add_data_flags(cmd, f.data);
    cmd->add_option("--methods", f.methods, "comma list of supervised,self,usm,icls,oracle")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "master seed")->capture_default_str();
    cmd->add_option("--repeats", f.repeats, "number of repeats")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--L", f.labeled, "labeled objects (default max(d+5, 20))");
    if (with_schedule) {
        cmd->add_option("--U", f.u_schedule, "comma list of unlabeled sizes (default 2,4,...,1024)");
    }
    cmd->add_option("--output", f.output, "result file (default $ICLS_OUTPUT_DIR/<dataset>_<command>.<format>)");
    cmd->add_option("--format", f.format, "csv or jsonl")->capture_default_str();
    cmd->add_option("--threads", f.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_flag("--timing", f.timing, "record wall-clock training time (outputs are then not reproducible)");
    cmd->add_flag("--no-intercept", f.no_intercept, "fit without an intercept column");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Implicitly constrained least squares: experiments and checks"};
    app.require_subcommand(1);

    RunFlags lc_flags;
    auto* lc = app.add_subcommand("learning-curve", "error as a function of the number of unlabeled objects");
    add_run_flags(lc, lc_flags, true);

    RunFlags cv_flags;
    cv_flags.repeats = 100;
    auto* cv = app.add_subcommand("cv", "repeated 10-fold cross-validation");
    add_run_flags(cv, cv_flags, false);

    std::string dist = "uniform-sign";
    std::size_t th_labeled = 1;
    std::size_t trials = 10000;
    std::uint64_t th_seed = 1;
    std::size_t th_threads = icls::default_thread_count();
    auto* th = app.add_subcommand("theorem1", "1-D never-worse certification");
    th->add_option("--dist", dist, "uniform-sign, gaussian-mixture or normal-logistic")->capture_default_str();
    th->add_option("--L", th_labeled, "labeled objects per trial")->capture_default_str()->check(CLI::PositiveNumber);
    th->add_option("--trials", trials, "number of trials")->capture_default_str()->check(CLI::PositiveNumber);
    th->add_option("--seed", th_seed, "master seed")->capture_default_str();
    th->add_option("--threads", th_threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    std::uint64_t sc_seed = icls::verify::SuiteConfig{}.seed;
    std::size_t sc_threads = icls::default_thread_count();
    bool quick = false;
    auto* sc = app.add_subcommand("selfcheck", "randomized property checks");
    sc->add_option("--seed", sc_seed, "master seed")->capture_default_str();
    sc->add_option("--threads", sc_threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sc->add_flag("--quick", quick, "fewer trials, skip the learning-curve check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (lc->parsed()) return run_benchmark(lc_flags, false);
        if (cv->parsed()) return run_benchmark(cv_flags, true);
        if (th->parsed()) return run_theorem1(dist, th_labeled, trials, th_seed, th_threads);
        if (sc->parsed()) return run_selfcheck(sc_seed, sc_threads, quick);
    } catch (const std::exception& e) {
        std::cerr << "icls: error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
