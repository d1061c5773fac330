// Command-line front end for the ordelay library: reproducible CSV/JSON
// tables for gamma solving, policy construction, cost metrics, finite-memory
// forecasting, complexity scans, and Monte Carlo simulation.

#include <cstdio>
#include <cxxabi.h>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <typeinfo>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordelay/ordelay.hpp"

namespace {

using nlohmann::json;

std::string demangled_name(const std::exception& e) {
    int status = 0;
    std::unique_ptr<char, void (*)(void*)> name(
        abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status), std::free);
    if (status != 0 || !name) return typeid(e).name();
    std::string s = name.get();
    if (const auto pos = s.rfind("::"); pos != std::string::npos) s = s.substr(pos + 2);
    return s;
}

struct OutputOptions {
    std::string format = "csv";
    std::string path;  // empty = stdout
    int precision = 6;
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", out.path, "Output file (default stdout)");
    cmd->add_option("--precision", out.precision, "Significant digits for floats")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
}

std::string fmt(double v, int precision) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

/// A rectangular table with a fixed column order, rendered as CSV (comma
/// separated, '.' decimal, LF endings, header always present) or as a JSON
/// array of row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void emit(const OutputOptions& out) const {
        std::ostringstream os;
        if (out.format == "csv") {
            for (std::size_t c = 0; c < columns.size(); ++c)
                os << columns[c] << (c + 1 < columns.size() ? "," : "");
            os << "\n";
            for (const auto& row : rows) {
                for (std::size_t c = 0; c < row.size(); ++c)
                    os << row[c] << (c + 1 < row.size() ? "," : "");
                os << "\n";
            }
        } else {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj;
                for (std::size_t c = 0; c < columns.size(); ++c) {
                    // Re-parse the formatted value so JSON gets numbers, not strings.
                    try {
                        std::size_t used = 0;
                        const double v = std::stod(row[c], &used);
                        if (used == row[c].size()) {
                            obj[columns[c]] = v;
                            continue;
                        }
                    } catch (const std::exception&) {
                    }
                    obj[columns[c]] = row[c];
                }
                arr.push_back(obj);
            }
            os << arr.dump(2) << "\n";
        }
        if (out.path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(out.path, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot open output file: " + out.path);
            f << os.str();
        }
    }
};

void emit_json_object(const json& obj, const OutputOptions& out) {
    if (out.path.empty()) {
        std::cout << obj.dump(2) << "\n";
    } else {
        std::ofstream f(out.path, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file: " + out.path);
        f << obj.dump(2) << "\n";
    }
}

const double kTable1Kappas[] = {0.001, 0.01, 0.1, 0.5, 1.0, 2.0, ordelay::kSqrt5};
const int kTable1Ms[] = {0, 1, 2, 5, 10, 20, 50, 100};

int run_gamma(double kappa, const OutputOptions& out) {
    const auto sol = ordelay::solve_gamma(kappa);
    Table t;
    t.columns = {"kappa", "gamma", "residual"};
    t.rows.push_back({fmt(sol.kappa, out.precision), fmt(sol.gamma, out.precision),
                      fmt(sol.residual, 3)});
    t.emit(out);
    return 0;
}

int run_policy(double kappa, int m, const std::string& family, const OutputOptions& out) {
    ordelay::RationalTransfer tf = family == "ma1" ? ordelay::ma1_optimal(kappa)
                                                   : ordelay::arma_approx(kappa, m);
    json obj;
    obj["kappa"] = kappa;
    obj["family"] = family;
    obj["m"] = m;
    obj["ma_coefficients"] = tf.numerator().coeffs();
    obj["ar_coefficients"] = tf.denominator().coeffs();
    obj["group_delay"] = ordelay::group_delay(tf);
    obj["invertible"] = tf.is_invertible();
    if (out.format == "json") {
        emit_json_object(obj, out);
    } else {
        Table t;
        t.columns = {"kind", "index", "value"};
        const auto& ma = tf.numerator().coeffs();
        const auto& ar = tf.denominator().coeffs();
        for (std::size_t j = 0; j < ma.size(); ++j)
            t.rows.push_back({"ma", std::to_string(j), fmt(ma[j], out.precision)});
        for (std::size_t j = 0; j < ar.size(); ++j)
            t.rows.push_back({"ar", std::to_string(j), fmt(ar[j], out.precision)});
        t.rows.push_back({"group_delay", "", fmt(ordelay::group_delay(tf), out.precision)});
        t.rows.push_back({"invertible", "", tf.is_invertible() ? "1" : "0"});
        t.emit(out);
    }
    return 0;
}

int run_table1(const OutputOptions& out) {
    Table t;
    t.columns = {"kappa"};
    for (int m : kTable1Ms) t.columns.push_back("m" + std::to_string(m));
    for (double kappa : kTable1Kappas) {
        std::vector<std::string> row{fmt(kappa, 7)};
        for (int m : kTable1Ms) {
            const auto tf = ordelay::arma_approx(kappa, m);
            const auto pm = ordelay::policy_metrics(tf, kappa);
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", pm.relative_cost);
            row.push_back(buf);
        }
        t.rows.push_back(std::move(row));
    }
    t.emit(out);
    return 0;
}

int run_impulse(double kappa, int m, int n_terms, const OutputOptions& out) {
    const auto tf = ordelay::arma_approx(kappa, m);
    const auto psi = ordelay::impulse_response(tf, static_cast<std::size_t>(n_terms));
    Table t;
    t.columns = {"n", "psi_n"};
    for (std::size_t j = 0; j < psi.size(); ++j)
        t.rows.push_back({std::to_string(j), fmt(psi[j], out.precision)});
    t.emit(out);
    return 0;
}

int run_metrics(double kappa, int m, const OutputOptions& out) {
    const auto tf = ordelay::arma_approx(kappa, m);
    const auto pm = ordelay::policy_metrics(tf, kappa);
    Table t;
    t.columns = {"kappa", "m", "sigma_I_sq", "sigma_S_sq", "group_delay", "total_cost",
                 "relative_cost"};
    t.rows.push_back({fmt(kappa, 7), std::to_string(m), fmt(pm.sigma_I_sq, out.precision),
                      fmt(pm.sigma_S_sq, out.precision), fmt(pm.group_delay, out.precision),
                      fmt(pm.total_cost, out.precision), fmt(pm.relative_cost, out.precision)});
    t.emit(out);
    return 0;
}

int run_finite(double kappa, int m, int n_max, const OutputOptions& out) {
    const auto tf = ordelay::arma_approx(kappa, m);
    const double sigma_I_sq = ordelay::inventory_variance(tf);
    const double c_star = ordelay::optimal_cost(kappa);
    Table t;
    t.columns = {"n", "msfe", "total_cost", "relative_cost"};
    const auto acvs = ordelay::autocovariances(tf, static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double msfe = ordelay::finite_past_msfe(acvs, n).msfe;
        const double cost = kappa * std::sqrt(sigma_I_sq) + std::sqrt(msfe);
        t.rows.push_back({std::to_string(n), fmt(msfe, out.precision), fmt(cost, out.precision),
                          fmt(cost / c_star, out.precision)});
    }
    t.emit(out);
    return 0;
}

int run_scan_m(double kappa, int n, int m_max, const OutputOptions& out) {
    const auto scan = ordelay::optimal_complexity_scan(kappa, n, m_max);
    Table t;
    t.columns = {"m", "total_cost", "is_minimum"};
    for (int m = 0; m <= m_max; ++m)
        t.rows.push_back({std::to_string(m),
                          fmt(scan.cost_curve[static_cast<std::size_t>(m)], out.precision),
                          m == scan.m_star ? "1" : "0"});
    t.emit(out);
    return 0;
}

int run_simulate(double kappa, int m, std::size_t periods, std::uint64_t seed,
                 const std::string& memory, double h_r, double b_r, double h_s, double b_s,
                 double mean_demand, double shock_std, const OutputOptions& out) {
    ordelay::SimulationConfig cfg;
    cfg.policy = ordelay::arma_approx(kappa, m);
    cfg.periods = periods;
    cfg.seed = seed;
    cfg.mean_demand = mean_demand;
    cfg.shock_std = shock_std;
    cfg.cost_params = ordelay::cost_constants(h_r, b_r, h_s, b_s);
    if (memory == "full") {
        cfg.forecaster = ordelay::FullHistory{};
    } else {
        int n = 0;
        try {
            std::size_t used = 0;
            n = std::stoi(memory, &used);
            if (used != memory.size() || n < 0) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("--memory must be 'full' or a nonnegative integer");
        }
        cfg.forecaster = ordelay::FiniteMemory{n};
    }
    const auto result = ordelay::simulate(cfg);
    if (out.format == "json") {
        emit_json_object(ordelay::to_json(result), out);
    } else {
        const json obj = ordelay::to_json(result);
        Table t;
        t.columns = {"field", "value"};
        for (const auto& [key, value] : obj.items())
            t.rows.push_back({key, value.is_number_float()
                                       ? fmt(value.get<double>(), out.precision)
                                       : value.dump()});
        t.emit(out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-delay ordering policies: construction, metrics, and simulation"};
    app.require_subcommand(1);

    double kappa = 1.0;
    int m = 1, k = 1, n = 0, n_max = 20, m_max = 50, n_terms = 64;
    std::size_t periods = 1'000'000;
    std::uint64_t seed = 0;
    std::string family = "arma", memory = "full";
    double h_r = 1.0, b_r = 1.0, h_s = 1.0, b_s = 1.0, mean_demand = 0.0, shock_std = 1.0;
    (void)k;
    OutputOptions out;

    auto* c_gamma = app.add_subcommand("gamma", "Solve the delay-intensity equation");
    c_gamma->add_option("--kappa", kappa, "Cost ratio")->required()->check(CLI::PositiveNumber);
    add_output_flags(c_gamma, out);

    auto* c_policy = app.add_subcommand("policy", "ARMA policy coefficients");
    c_policy->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_policy->add_option("--m", m)->check(CLI::NonNegativeNumber);
    c_policy->add_option("--family", family)->check(CLI::IsMember({"arma", "ma1"}));
    add_output_flags(c_policy, out);

    auto* c_table1 = app.add_subcommand("table1", "Relative-cost grid over (kappa, m)");
    add_output_flags(c_table1, out);

    auto* c_impulse = app.add_subcommand("impulse", "Impulse-response coefficients");
    c_impulse->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_impulse->add_option("--m", m)->check(CLI::NonNegativeNumber);
    c_impulse->add_option("--n-terms", n_terms)->check(CLI::PositiveNumber);
    add_output_flags(c_impulse, out);

    auto* c_metrics = app.add_subcommand("metrics", "Variance, delay, and cost metrics");
    c_metrics->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_metrics->add_option("--m", m)->check(CLI::NonNegativeNumber);
    add_output_flags(c_metrics, out);

    auto* c_finite = app.add_subcommand("finite", "Finite-memory forecast error curve");
    c_finite->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_finite->add_option("--m", m)->check(CLI::NonNegativeNumber);
    c_finite->add_option("--n-max", n_max)->check(CLI::NonNegativeNumber);
    add_output_flags(c_finite, out);

    auto* c_scan = app.add_subcommand("scan-m", "Cost versus policy complexity at fixed memory");
    c_scan->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_scan->add_option("--n", n)->required()->check(CLI::NonNegativeNumber);
    c_scan->add_option("--m-max", m_max)->check(CLI::PositiveNumber);
    add_output_flags(c_scan, out);

    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo supply-chain simulation");
    c_sim->add_option("--kappa", kappa)->required()->check(CLI::PositiveNumber);
    c_sim->add_option("--m", m)->check(CLI::NonNegativeNumber);
    c_sim->add_option("--periods", periods)->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", seed);
    c_sim->add_option("--memory", memory, "'full' or a nonnegative memory length");
    c_sim->add_option("--h-r", h_r)->check(CLI::PositiveNumber);
    c_sim->add_option("--b-r", b_r)->check(CLI::PositiveNumber);
    c_sim->add_option("--h-s", h_s)->check(CLI::PositiveNumber);
    c_sim->add_option("--b-s", b_s)->check(CLI::PositiveNumber);
    c_sim->add_option("--mean-demand", mean_demand);
    c_sim->add_option("--shock-std", shock_std)->check(CLI::PositiveNumber);
    add_output_flags(c_sim, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_gamma->parsed()) return run_gamma(kappa, out);
        if (c_policy->parsed()) return run_policy(kappa, m, family, out);
        if (c_table1->parsed()) return run_table1(out);
        if (c_impulse->parsed()) return run_impulse(kappa, m, n_terms, out);
        if (c_metrics->parsed()) return run_metrics(kappa, m, out);
        if (c_finite->parsed()) return run_finite(kappa, m, n_max, out);
        if (c_scan->parsed()) return run_scan_m(kappa, n, m_max, out);
        if (c_sim->parsed())
            return run_simulate(kappa, m, periods, seed, memory, h_r, b_r, h_s, b_s,
                                mean_demand, shock_std, out);
    } catch (const ordelay::NumericalError& e) {
        std::cerr << demangled_name(e) << ": " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << demangled_name(e) << ": " << e.what() << "\n";
        return 2;
    }
    return 2;
}
