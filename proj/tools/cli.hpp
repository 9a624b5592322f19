// Copyright 2026 The statconc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command-line front end. Kept header-only so the test suite can drive every
// subcommand in-process through statconc::cli::run.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error,
// 3 self-check failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "statconc/statconc.hpp"

namespace statconc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSelfCheck = 3;

inline constexpr const char* kSweepHeader =
    "alpha2,beta2,n,statistics,flip,detector,p_exact,p_closed,entropy_final,efficiency,procrustean,asymptotic";

/// 12 significant digits, shortest form.
inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

/// Value rounded to 12 significant digits, for JSON output.
inline double round12(double x) { return std::strtod(num(x).c_str(), nullptr); }

/// Grid min, min + step, ... up to max inclusive; empty when max < min.
inline std::vector<double> make_grid(double lo, double hi, double step) {
    std::vector<double> grid;
    if (hi < lo) return grid;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) grid.push_back(round12(lo + static_cast<double>(i) * step));
    return grid;
}

/// Inclusive |alpha|^2 grid: min, min + step, ..., max.
struct Grid {
    double min = 0.0;
    double max = 0.0;
    double step = 0.1;
};

struct Options {
    double alpha2 = 0.5;
    double alpha_phase = 0.0;
    int n = 6;
    std::vector<int> n_list{6};
    std::string statistics = "fermion";
    std::string detector = "nonabsorbing";
    bool no_flip = false;
    std::string flip = "on";
    bool json = false;
    std::string format = "csv";
    std::string out_path;
    Grid sweep_grid{0.1, 0.9, 0.1};
    Grid compare_grid{0.01, 0.99, 0.01};
    std::int64_t trials = 100000;
    std::uint64_t seed = 2001;
    bool self_check = false;
    std::string spin_left = "up", spin_right = "up";
    std::string convention = "real";
};

namespace detail {

inline Statistics parse_statistics(const std::string& s) {
    return s == "boson" ? Statistics::Boson : Statistics::Fermion;
}
inline DetectorModel parse_detector(const std::string& s) {
    return s == "absorbing" ? DetectorModel::Absorbing : DetectorModel::NonAbsorbing;
}
inline Spin parse_spin(const std::string& s) { return s == "down" ? Spin::Down : Spin::Up; }

inline ProtocolConfig make_config(const Options& opts, double alpha2, int n, Statistics st, bool flip) {
    ProtocolConfig c = ProtocolConfig::from_alpha2(alpha2, n, opts.alpha_phase);
    c.statistics = st;
    c.detector = parse_detector(opts.detector);
    c.apply_flip = flip;
    c.validate();
    return c;
}

/// Writes `text` to --out when given, else to `out`.
inline int emit(const Options& opts, const std::string& text, std::ostream& out, std::ostream& err) {
    if (opts.out_path.empty()) {
        out << text;
        return kExitOk;
    }
    std::ofstream file(opts.out_path, std::ios::binary);
    if (!file) {
        err << "error: cannot open output file '" << opts.out_path << "'\n";
        return kExitIo;
    }
    file << text;
    file.close();
    if (!file) {
        err << "error: failed writing '" << opts.out_path << "'\n";
        return kExitIo;
    }
    return kExitOk;
}

/// Evaluates work(i) for i in [0, count) on a small thread pool; results land
/// at their own index so output order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& work) {
    std::vector<T> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    results[i] = work(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace detail

inline int cmd_run(const Options& opts, std::ostream& out, std::ostream& err) {
    const ProtocolConfig config =
        detail::make_config(opts, opts.alpha2, opts.n, detail::parse_statistics(opts.statistics), !opts.no_flip);
    const ProtocolReport report = run_protocol(config);
    const double residual = limit_state_check(report);

    std::ostringstream text;
    if (opts.json) {
        nlohmann::ordered_json j;
        j["alpha2"] = round12(opts.alpha2);
        j["beta2"] = round12(1.0 - opts.alpha2);
        j["alpha_phase"] = round12(opts.alpha_phase);
        j["n"] = config.n;
        j["statistics"] = to_string(config.statistics);
        j["detector"] = to_string(config.detector);
        j["flip"] = config.apply_flip;
        auto rounds = nlohmann::ordered_json::array();
        for (const auto& r : report.rounds) {
            rounds.push_back({{"slot", r.slot},
                              {"kept_probability", round12(r.kept_probability)},
                              {"cumulative_probability", round12(r.cumulative_probability)},
                              {"post_state_norm", round12(r.post_state_norm_check)}});
        }
        j["rounds"] = rounds;
        j["cumulative_probability"] = round12(report.cumulative_probability);
        j["closed_form_cumulative"] = round12(report.closed_form_cumulative);
        j["final_entropy_ebits"] = round12(report.final_entropy_ebits);
        j["efficiency"] = round12(report.efficiency);
        j["finite_yield"] = round12(report.finite_yield);
        j["residual_weight"] = round12(residual);
        j["final_terms"] = report.final_state.size();
        text << j.dump(2) << "\n";
    } else {
        text << "alpha2=" << num(opts.alpha2) << " beta2=" << num(1.0 - opts.alpha2) << " n=" << config.n
             << " statistics=" << to_string(config.statistics) << " detector=" << to_string(config.detector)
             << " flip=" << (config.apply_flip ? "on" : "off") << "\n";
        text << "round slot kept_probability cumulative_probability post_state_norm\n";
        for (std::size_t i = 0; i < report.rounds.size(); ++i) {
            const auto& r = report.rounds[i];
            text << (i + 1) << " " << r.slot << " " << num(r.kept_probability) << " " << num(r.cumulative_probability)
                 << " " << num(r.post_state_norm_check) << "\n";
        }
        text << "cumulative_probability " << num(report.cumulative_probability) << "\n";
        text << "closed_form_cumulative " << num(report.closed_form_cumulative) << "\n";
        text << "final_entropy_ebits " << num(report.final_entropy_ebits) << "\n";
        text << "efficiency " << num(report.efficiency) << "\n";
        text << "finite_yield " << num(report.finite_yield) << "\n";
        text << "residual_weight " << num(residual) << "\n";
    }
    return detail::emit(opts, text.str(), out, err);
}

inline int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err) {
    struct Item {
        double alpha2;
        int n;
        Statistics statistics;
        bool flip;
    };
    std::vector<Statistics> stats;
    if (opts.statistics != "boson") stats.push_back(Statistics::Fermion);
    if (opts.statistics != "fermion") stats.push_back(Statistics::Boson);
    std::vector<bool> flips;
    if (opts.flip != "off") flips.push_back(true);
    if (opts.flip != "on") flips.push_back(false);

    std::vector<Item> items;
    for (double a2 : make_grid(opts.sweep_grid.min, opts.sweep_grid.max, opts.sweep_grid.step))
        for (int n : opts.n_list)
            for (Statistics s : stats)
                for (bool f : flips) items.push_back({a2, n, s, f});
    // Reject bad combinations before doing any work.
    for (const auto& it : items) detail::make_config(opts, it.alpha2, it.n, it.statistics, it.flip);

    const auto rows = detail::parallel_map<std::vector<std::string>>(items.size(), [&](std::size_t i) {
        const auto& it = items[i];
        const ProtocolReport r = run_protocol(detail::make_config(opts, it.alpha2, it.n, it.statistics, it.flip));
        const EfficiencyTable e = efficiency_row(it.alpha2);
        return std::vector<std::string>{num(it.alpha2),
                                        num(1.0 - it.alpha2),
                                        std::to_string(it.n),
                                        to_string(it.statistics),
                                        it.flip ? "on" : "off",
                                        to_string(r.config.detector),
                                        num(r.cumulative_probability),
                                        num(r.closed_form_cumulative),
                                        num(r.final_entropy_ebits),
                                        num(r.efficiency),
                                        num(e.procrustean),
                                        num(e.asymptotic)};
    });

    std::ostringstream text;
    if (opts.format == "json") {
        std::vector<std::string> cols;
        std::stringstream header(kSweepHeader);
        for (std::string c; std::getline(header, c, ',');) cols.push_back(c);
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json obj;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const bool textual = c == 3 || c == 4 || c == 5;
                if (textual)
                    obj[cols[c]] = row[c];
                else
                    obj[cols[c]] = std::strtod(row[c].c_str(), nullptr);
            }
            arr.push_back(obj);
        }
        text << arr.dump(2) << "\n";
    } else {
        text << kSweepHeader << "\n";
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) text << (c ? "," : "") << row[c];
            text << "\n";
        }
    }
    return detail::emit(opts, text.str(), out, err);
}

inline int cmd_sample(const Options& opts, std::ostream& out, std::ostream& err) {
    const ProtocolConfig config =
        detail::make_config(opts, opts.alpha2, opts.n, detail::parse_statistics(opts.statistics), !opts.no_flip);
    const McReport mc = monte_carlo(config, opts.trials, opts.seed);
    const int rounds = config.rounds();
    const double exact = config.apply_flip ? closed_form_cumulative(config.alpha, config.beta, rounds)
                                           : closed_form_cumulative_without_flip(config.alpha, config.beta, rounds);
    const double deviation = std::abs(mc.estimate - exact);

    std::ostringstream text;
    if (opts.json) {
        nlohmann::ordered_json j;
        j["trials"] = mc.trials;
        j["successes"] = mc.successes;
        j["estimate"] = round12(mc.estimate);
        j["std_error"] = round12(mc.std_error);
        j["seed"] = mc.seed;
        j["closed_form"] = round12(exact);
        text << j.dump(2) << "\n";
    } else {
        text << "trials " << mc.trials << "\n";
        text << "successes " << mc.successes << "\n";
        text << "estimate " << num(mc.estimate) << "\n";
        text << "std_error " << num(mc.std_error) << "\n";
        text << "seed " << mc.seed << "\n";
        text << "closed_form " << num(exact) << "\n";
    }
    if (int rc = detail::emit(opts, text.str(), out, err); rc != kExitOk) return rc;
    if (opts.self_check && deviation > 5.0 * mc.std_error) {
        err << "self-check failed: |estimate - closed_form| = " << num(deviation) << " > 5 std_error\n";
        return kExitSelfCheck;
    }
    return kExitOk;
}

inline int cmd_compare(const Options& opts, std::ostream& out, std::ostream& err) {
    const auto grid = make_grid(opts.compare_grid.min, opts.compare_grid.max, opts.compare_grid.step);
    const auto table = efficiency_table(grid);
    bool all_ordered = true;
    std::ostringstream text;
    text << "alpha2,protocol,procrustean,asymptotic,ordered\n";
    for (const auto& row : table) {
        const bool ordered = row.protocol <= row.procrustean && row.procrustean <= row.asymptotic + 1e-15;
        all_ordered = all_ordered && ordered;
        text << num(row.alpha_sq) << "," << num(row.protocol) << "," << num(row.procrustean) << ","
             << num(row.asymptotic) << "," << (ordered ? "true" : "false") << "\n";
    }
    if (int rc = detail::emit(opts, text.str(), out, err); rc != kExitOk) return rc;
    return all_ordered ? kExitOk : kExitSelfCheck;
}

inline int cmd_hom(const Options& opts, std::ostream& out, std::ostream& err) {
    const Statistics st = detail::parse_statistics(opts.statistics);
    const Mode left = Mode::source(Party::B, Pair::L, 1, detail::parse_spin(opts.spin_left));
    const Mode right = Mode::source(Party::B, Pair::R, 1, detail::parse_spin(opts.spin_right));
    const auto convention = opts.convention == "symmetric" ? BeamSplitterConvention::Symmetric : BeamSplitterConvention::Real;
    const SparseState input = create(create(vacuum(st), right), left);
    const auto results = measure_path(beam_splitter(input, 1, convention), 1, DetectorModel::NonAbsorbing);

    std::array<double, 3> p{};
    double kept = 0.0;
    for (const auto& r : results) {
        p[static_cast<std::size_t>(r.outcome.kind)] = r.probability;
        if (is_kept(r.outcome.kind, st)) kept += r.probability;
    }
    std::ostringstream text;
    if (opts.json) {
        nlohmann::ordered_json j;
        j["statistics"] = to_string(st);
        j["spin_left"] = opts.spin_left;
        j["spin_right"] = opts.spin_right;
        j["antibunch"] = round12(p[0]);
        j["bunch_left"] = round12(p[1]);
        j["bunch_right"] = round12(p[2]);
        j["kept"] = round12(kept);
        text << j.dump(2) << "\n";
    } else {
        text << "statistics " << to_string(st) << " spins " << opts.spin_left << "," << opts.spin_right << "\n";
        text << "antibunch " << num(p[0]) << "\n";
        text << "bunch_left " << num(p[1]) << "\n";
        text << "bunch_right " << num(p[2]) << "\n";
        text << "bunch " << num(p[1] + p[2]) << "\n";
        text << "kept " << num(kept) << "\n";
    }
    return detail::emit(opts, text.str(), out, err);
}

/// Parses argv and dispatches to a subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"Exact simulator of entanglement concentration driven by particle statistics"};
    app.require_subcommand(1);

    const auto stats_check = CLI::IsMember({"fermion", "boson"});
    const auto detector_check = CLI::IsMember({"nonabsorbing", "absorbing"});

    auto add_state_flags = [&](CLI::App* sub) {
        sub->add_option("--alpha2", opts.alpha2, "|alpha|^2 of each input pair")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        sub->add_option("--alpha-phase", opts.alpha_phase, "phase of alpha in radians")->capture_default_str();
        sub->add_option("--n", opts.n, "particles per party and pair")->check(CLI::Range(1, kMaxSlots))->capture_default_str();
        sub->add_option("--statistics", opts.statistics, "fermion or boson")->check(stats_check)->capture_default_str();
        sub->add_option("--detector", opts.detector, "nonabsorbing or absorbing")->check(detector_check)->capture_default_str();
        sub->add_flag("--no-flip", opts.no_flip, "skip the spin flip on arm l");
        sub->add_flag("--json", opts.json, "emit one JSON document");
        sub->add_option("--out", opts.out_path, "write output to this file");
    };
    auto add_grid_flags = [&](CLI::App* sub, Grid& grid) {
        sub->add_option("--alpha2-min", grid.min, "first grid value")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        sub->add_option("--alpha2-max", grid.max, "last grid value (inclusive)")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        sub->add_option("--alpha2-step", grid.step, "grid spacing")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--out", opts.out_path, "write output to this file");
    };

    auto* run_cmd = app.add_subcommand("run", "run one protocol instance and print its report");
    add_state_flags(run_cmd);

    auto* sweep = app.add_subcommand("sweep", "CSV over a grid of |alpha|^2, n, statistics and flip");
    add_grid_flags(sweep, opts.sweep_grid);
    sweep->add_option("--alpha-phase", opts.alpha_phase, "phase of alpha in radians")->capture_default_str();
    sweep->add_option("--n", opts.n_list, "comma-separated list of n")->delimiter(',')->check(CLI::Range(1, kMaxSlots))->capture_default_str();
    sweep->add_option("--statistics", opts.statistics, "fermion, boson or both")->check(CLI::IsMember({"fermion", "boson", "both"}))->capture_default_str();
    sweep->add_option("--flip", opts.flip, "on, off or both")->check(CLI::IsMember({"on", "off", "both"}))->capture_default_str();
    sweep->add_option("--detector", opts.detector, "nonabsorbing or absorbing")->check(detector_check)->capture_default_str();
    sweep->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    auto* sample = app.add_subcommand("sample", "Monte Carlo estimate of the cumulative success probability");
    add_state_flags(sample);
    sample->add_option("--trials", opts.trials, "number of sampled runs")->check(CLI::Range(std::int64_t{1}, std::int64_t{1'000'000'000}))->capture_default_str();
    sample->add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
    sample->add_flag("--self-check", opts.self_check, "exit 3 if the estimate is more than 5 standard errors off");

    auto* compare = app.add_subcommand("compare", "efficiency against procrustean and asymptotic concentration");
    add_grid_flags(compare, opts.compare_grid);

    auto* hom = app.add_subcommand("hom", "two particles on one 50/50 beam splitter");
    hom->add_option("--statistics", opts.statistics, "fermion or boson")->check(stats_check)->capture_default_str();
    hom->add_option("--spin-left", opts.spin_left, "spin in arm l")->check(CLI::IsMember({"up", "down"}))->capture_default_str();
    hom->add_option("--spin-right", opts.spin_right, "spin in arm r")->check(CLI::IsMember({"up", "down"}))->capture_default_str();
    hom->add_option("--convention", opts.convention, "real or symmetric beam splitter")->check(CLI::IsMember({"real", "symmetric"}))->capture_default_str();
    hom->add_flag("--json", opts.json, "emit one JSON document");
    hom->add_option("--out", opts.out_path, "write output to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (compare->parsed()) return cmd_compare(opts, out, err);
        if (run_cmd->parsed()) return cmd_run(opts, out, err);
        if (sweep->parsed()) return cmd_sweep(opts, out, err);
        if (sample->parsed()) return cmd_sample(opts, out, err);
        if (hom->parsed()) return cmd_hom(opts, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace statconc::cli
