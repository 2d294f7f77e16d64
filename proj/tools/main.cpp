#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kldesign/bench.hpp"
#include "kldesign/criteria.hpp"
#include "kldesign/design.hpp"
#include "kldesign/entropy.hpp"
#include "kldesign/generators.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_runtime = 1;
constexpr int exit_usage = 2;

struct GenerateArgs {
    std::string method;
    std::size_t n = 0;
    std::size_t d = 0;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t max_proposals = 0;
    std::size_t max_stale = 0;
    std::string out;
    std::string trace;
};

// CLI11 validator: point counts below 2 are never meaningful
const CLI::Validator point_count_check(
    [](std::string& value) -> std::string {
        try {
            if (std::stoull(value) < 2) return "point count must be >= 2";
        } catch (const std::exception&) {
            return "not a valid count: " + value;
        }
        return {};
    },
    "UINT>=2");

int run_generate(const GenerateArgs& args) {
    const auto method = kld::parse_method(args.method);
    if (!method) {
        std::cerr << "error: unknown method '" << args.method << "'\n";
        return exit_usage;
    }
    if (!args.trace.empty() && !kld::is_optimized(*method)) {
        std::cerr << "error: --trace requires an optimizer-backed method "
                     "(mcgauss, ppv, maximin)\n";
        return exit_usage;
    }

    kld::GeneratorSpec spec;
    spec.method = *method;
    spec.n = args.n;
    spec.d = args.d;
    spec.seed = args.seed;
    spec.opt.restarts = args.restarts;
    spec.opt.max_proposals = args.max_proposals;
    spec.opt.max_consecutive_rejects = args.max_stale;

    const auto generated = kld::generate(spec);
    if (args.out.empty()) {
        kld::write_design(generated.design, std::cout);
    } else {
        kld::write_design(generated.design, std::filesystem::path(args.out));
    }
    if (!args.trace.empty() && generated.trace)
        kld::write_trace_csv(*generated.trace, std::filesystem::path(args.trace));
    return exit_ok;
}

int run_eval(const std::string& in, const std::string& format) {
    const kld::Design design = kld::read_design(std::filesystem::path(in));
    const kld::CriteriaReport report = kld::evaluate_all(design);
    if (format == "csv") {
        std::cout << kld::criteria_csv_header << "\n" << kld::to_csv_row(report) << "\n";
    } else {
        std::cout << kld::to_json(report) << "\n";
    }
    return exit_ok;
}

int run_entropy(const std::string& in, const std::string& estimator,
                std::optional<double> bandwidth_override) {
    const kld::Design design = kld::read_design(std::filesystem::path(in));
    const std::size_t n = design.n();
    const std::size_t d = design.d();

    double value = 0.0;
    if (estimator == "nn") {
        value = kld::entropy_nn_value(design);
    } else {
        const double h = bandwidth_override ? *bandwidth_override : kld::bandwidth(n, d);
        if (estimator == "mc-gauss") {
            value = kld::entropy_mc_value(design, kld::KernelSpec::gaussian(d, h));
        } else {  // mc-epan, diagnostic use only
            kld::SeededRng alpha_rng(0);
            value = kld::entropy_mc_value(
                design, kld::KernelSpec::epanechnikov_spherical(d, h, alpha_rng));
        }
    }
    std::printf("%.6f\n", value);
    return exit_ok;
}

int run_bench_cmd(const std::string& methods_csv, std::size_t n, std::size_t d, std::size_t reps,
                  std::uint64_t seed, const std::string& out_dir) {
    kld::BenchConfig config;
    for (const auto& token : kld::detail::split_csv_line(methods_csv)) {
        const auto method = kld::parse_method(kld::detail::trim(token));
        if (!method) {
            std::cerr << "error: unknown method '" << token
                      << "' (valid: random, lhs, halton, hammersley, mcgauss, ppv, maximin)\n";
            return exit_usage;
        }
        config.methods.push_back(*method);
    }
    if (config.methods.empty()) {
        std::cerr << "error: --methods list is empty\n";
        return exit_usage;
    }
    config.n = n;
    config.d = d;
    config.reps = reps;
    config.seed = seed;

    const kld::BenchReport report = kld::run_bench(config);
    for (const auto& row : report.rows)
        if (!row.error.empty())
            std::cerr << "warning: " << kld::method_name(row.method) << " rep " << row.rep
                      << " failed: " << row.error << "\n";
    kld::write_bench_csvs(report, std::filesystem::path(out_dir));
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "rows.csv").string() << " ("
              << report.rows.size() << " rows) and "
              << (std::filesystem::path(out_dir) / "summary.csv").string() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-filling designs in [0,1]^d by entropy maximization, "
                 "with classical generators and a criteria benchmark"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_generate =
        app.add_subcommand("generate", "Generate a design and write it as CSV");
    cmd_generate
        ->add_option("--method", gen.method, "random|lhs|halton|hammersley|mcgauss|ppv|maximin")
        ->required()
        ->check(CLI::IsMember(
            {"random", "lhs", "halton", "hammersley", "mcgauss", "ppv", "maximin"}));
    cmd_generate->add_option("--n", gen.n, "point count (default 10*d)")->check(point_count_check);
    cmd_generate->add_option("--d", gen.d, "dimension")->required()->check(CLI::PositiveNumber);
    cmd_generate->add_option("--seed", gen.seed, "rng seed")->required();
    cmd_generate->add_option("--restarts", gen.restarts, "multi-start count (default 5)")
        ->check(CLI::PositiveNumber);
    cmd_generate->add_option("--max-proposals", gen.max_proposals,
                             "exchange proposal cap (default 1000*d)");
    cmd_generate->add_option("--max-stale", gen.max_stale,
                             "consecutive rejects before stopping (default 100*d)");
    cmd_generate->add_option("--out", gen.out, "output CSV path (default stdout)");
    cmd_generate->add_option("--trace", gen.trace,
                             "write the best restart's exchange trace CSV here");

    std::string eval_in;
    std::string eval_format = "json";
    auto* cmd_eval = app.add_subcommand("eval", "Score a design file with the criteria battery");
    cmd_eval->add_option("--in", eval_in, "design CSV path")->required();
    cmd_eval->add_option("--format", eval_format, "json|csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string entropy_in;
    std::string entropy_estimator;
    double entropy_bandwidth = 0.0;
    auto* cmd_entropy = app.add_subcommand("entropy", "Print an entropy estimate for a design");
    cmd_entropy->add_option("--in", entropy_in, "design CSV path")->required();
    cmd_entropy->add_option("--estimator", entropy_estimator, "mc-gauss|mc-epan|nn")
        ->required()
        ->check(CLI::IsMember({"mc-gauss", "mc-epan", "nn"}));
    auto* bandwidth_opt =
        cmd_entropy->add_option("--bandwidth", entropy_bandwidth, "KDE bandwidth override")
            ->check(CLI::PositiveNumber);

    std::string bench_methods;
    std::size_t bench_n = 0;
    std::size_t bench_d = 0;
    std::size_t bench_reps = 20;
    std::uint64_t bench_seed = 0;
    std::string bench_out_dir;
    auto* cmd_bench =
        app.add_subcommand("bench", "Generate method x replicate designs and score them all");
    cmd_bench->add_option("--methods", bench_methods, "comma-separated method list")->required();
    cmd_bench->add_option("--n", bench_n, "point count (default 10*d)")->check(point_count_check);
    cmd_bench->add_option("--d", bench_d, "dimension")->required()->check(CLI::PositiveNumber);
    cmd_bench->add_option("--reps", bench_reps, "replicates per method")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd_bench->add_option("--seed", bench_seed, "base seed")->required();
    cmd_bench->add_option("--out-dir", bench_out_dir, "directory for rows.csv and summary.csv")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (cmd_generate->parsed()) return run_generate(gen);
        if (cmd_eval->parsed()) return run_eval(eval_in, eval_format);
        if (cmd_entropy->parsed()) {
            std::optional<double> bw_override;
            if (bandwidth_opt->count() > 0) bw_override = entropy_bandwidth;
            return run_entropy(entropy_in, entropy_estimator, bw_override);
        }
        if (cmd_bench->parsed())
            return run_bench_cmd(bench_methods, bench_n, bench_d, bench_reps, bench_seed,
                                 bench_out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}
