#include "cli.hpp"

#include "syshock/calibration.hpp"
#include "syshock/dependence.hpp"
#include "syshock/error.hpp"
#include "syshock/market_data.hpp"
#include "syshock/montecarlo.hpp"
#include "syshock/shock_model.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace syshock::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20170101;

struct Globals {
    std::uint64_t seed = kDefaultSeed;
    std::string out_dir = ".";
    int precision = 6;
    std::string config;
    int workers = 1;
};

struct ModelFlags {
    std::string family;
    std::string alpha;
    std::string theta;
    std::string beta;
    double lambda0 = 1.0;
};

struct TauFlags {
    ModelFlags model;
    std::size_t grid = 1000;
};

struct SimulateFlags {
    ModelFlags model;
    std::size_t n = 100000;
    double t = 0.0;
};

struct CalibrateFlags {
    std::string spreads;
    int year = 0;
    std::string family = "clayton";
    double lgd = 0.6;
    double rate = 0.0;
    int restarts = 20;
    int max_iters = 5000;
    double tol = 1e-8;
    std::string tau_on = "levels";
};

struct SynthesizeFlags {
    ModelFlags model;
    std::string base;
    std::string entities;
    std::size_t days = 250;
    int year = 2021;
    double lgd = 0.6;
    std::string file = "spreads.csv";
};

class Formatter {
public:
    explicit Formatter(int precision) : precision_(precision) {}
    std::string operator()(double v) const {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
        return buf;
    }

private:
    int precision_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(text);
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t"));
        cell.erase(cell.find_last_not_of(" \t") + 1);
        out.push_back(cell);
    }
    return out;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const auto& cell : split_list(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (cell.empty() || used != cell.size() || !std::isfinite(v))
            throw ValidationError(flag + ": '" + cell + "' is not a number");
        out.push_back(v);
    }
    return out;
}

// One value broadcasts to all d entities.
template <typename T>
std::vector<T> per_entity(std::vector<T> values, std::size_t d, const std::string& flag) {
    if (values.size() == 1 && d > 1) values.assign(d, values.front());
    if (values.size() != d)
        throw ValidationError(flag + " needs 1 or " + std::to_string(d) + " values, got " +
                              std::to_string(values.size()));
    return values;
}

ModelParams build_params(const ModelFlags& f) {
    if (f.alpha.empty()) throw ValidationError("--alpha is required");
    if (f.theta.empty()) throw ValidationError("--theta is required");
    if (f.family.empty()) throw ValidationError("--family is required");
    const auto alpha = parse_numbers(f.alpha, "--alpha");
    const auto theta = parse_numbers(f.theta, "--theta");
    const std::size_t d = alpha.size();
    std::vector<Family> families;
    for (const auto& name : split_list(f.family)) families.push_back(parse_family(name));
    families = per_entity(families, d, "--family");
    const bool need_beta = std::any_of(families.begin(), families.end(),
                                       [](Family fam) { return fam != Family::Independence; });
    std::vector<double> beta(d, 0.0);
    if (need_beta) {
        if (f.beta.empty()) throw ValidationError("--beta is required for clayton and gumbel");
        beta = per_entity(parse_numbers(f.beta, "--beta"), d, "--beta");
    }
    std::vector<Generator> gens;
    for (std::size_t j = 0; j < d; ++j) gens.emplace_back(families[j], beta[j]);
    return make_params(alpha, theta, gens, f.lambda0);
}

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--family", f.family, "clayton, gumbel or independence (one or one per entity)");
    cmd->add_option("--alpha", f.alpha, "alpha_1,...,alpha_d in (0,1]");
    cmd->add_option("--theta", f.theta, "theta_0,theta_1,...,theta_d summing to 1");
    cmd->add_option("--beta", f.beta, "generator parameters (one or one per entity)");
    cmd->add_option("--lambda0", f.lambda0, "systemic intensity")->capture_default_str();
}

std::ofstream open_output(const Globals& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / name;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

std::string json_to_arg(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : ",") + json_to_arg(e);
        return out;
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw ValidationError("config values must be strings, numbers, booleans or arrays");
}

// Fills options that were not given on the command line from a flat JSON
// object. Keys name long options without the dashes.
void apply_config(const std::string& path, CLI::App& app, CLI::App* sub) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config file '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config file must hold a flat JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "config") throw ValidationError("config files cannot nest --config");
        const std::string name = "--" + key;
        CLI::Option* opt = sub ? sub->get_option_no_throw(name) : nullptr;
        if (!opt) opt = app.get_option_no_throw(name);
        if (!opt) throw ValidationError("unknown config key '" + key + "'");
        if (opt->count() > 0) continue;
        opt->add_result(json_to_arg(value));
        opt->run_callback();
    }
}

void check_globals(const Globals& g) {
    if (g.precision < 1 || g.precision > 17) throw ValidationError("--precision must be in [1, 17]");
    if (g.workers < 1) throw ValidationError("--workers must be at least 1");
}

int cmd_tau(const Globals& g, const TauFlags& f, std::ostream& out) {
    const ModelParams p = build_params(f.model);
    if (f.grid < 1) throw ValidationError("--grid must be positive");
    const Formatter num(g.precision);
    const std::size_t d = p.dim();

    auto taus = open_output(g, "taus.csv");
    taus << "i,k,tau,tau_mo,tau_bar_i,tau_bar_k\n";
    out << "pair      tau          tau_MO       tau_bar_i    tau_bar_k\n";
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = i + 1; k < d; ++k) {
            const KendallReport rep = tau_lifetimes(p, i, k, f.grid, g.workers);
            taus << i + 1 << ',' << k + 1 << ',' << num(rep.tau);
            char line[160];
            if (rep.decomposition) {
                const auto& dec = *rep.decomposition;
                taus << ',' << num(dec.tau_mo) << ',' << num(dec.tau_bar_i) << ',' << num(dec.tau_bar_k);
                std::snprintf(line, sizeof line, "%-9s %-12s %-12s %-12s %s\n", rep.pair.c_str(),
                              num(rep.tau).c_str(), num(dec.tau_mo).c_str(),
                              num(dec.tau_bar_i).c_str(), num(dec.tau_bar_k).c_str());
            } else {
                taus << ",,,";
                std::snprintf(line, sizeof line, "%-9s %-12s %-12s %-12s %s\n", rep.pair.c_str(),
                              num(rep.tau).c_str(), "-", "-", "-");
            }
            taus << '\n';
            out << line;
            auto grid = open_output(g, "kendall_fn_" + std::to_string(i + 1) + "_" +
                                           std::to_string(k + 1) + ".csv");
            grid << "t,K\n";
            for (std::size_t m = 0; m < rep.grid_t.size(); ++m)
                grid << num(rep.grid_t[m]) << ',' << num(rep.grid_k[m]) << '\n';
        }
    }

    auto sys = open_output(g, "systemic.csv");
    sys << "entity,tau_X0_Xj,tau_X0_Tj\n";
    out << "\nentity    tau_X0_Xj    tau_X0_Tj\n";
    for (std::size_t j = 0; j < d; ++j) {
        const double xj = tau_systemic(p, j, SystemicMode::VsIdiosyncratic);
        const double tj = tau_systemic(p, j, SystemicMode::VsLifetime);
        sys << j + 1 << ',' << num(xj) << ',' << num(tj) << '\n';
        char line[96];
        std::snprintf(line, sizeof line, "%-9zu %-12s %s\n", j + 1, num(xj).c_str(), num(tj).c_str());
        out << line;
    }
    out << "\nP(T_1 = ... = T_d) = " << num(simultaneous_default_prob(p, 0.0)) << '\n';
    return kOk;
}

int cmd_simulate(const Globals& g, const SimulateFlags& f, std::ostream& out) {
    const ModelParams p = build_params(f.model);
    if (f.n < 1000) throw ValidationError("--n must be at least 1000");
    if (!(f.t >= 0.0)) throw ValidationError("--t must be nonnegative");
    const Formatter num(g.precision);
    SimulationConfig cfg;
    cfg.n_samples = f.n;
    cfg.seed = g.seed;
    cfg.n_workers = g.workers;
    const SampleBatch batch = sample_model(p, cfg);
    const std::size_t d = p.dim();

    struct Row {
        std::string name;
        double empirical, closed, se;
    };
    std::vector<Row> rows;
    const double tau_se = tau_standard_error(f.n);
    std::vector<std::vector<double>> cols(d);
    for (std::size_t j = 0; j < d; ++j) cols[j] = batch.column(j);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = i + 1; k < d; ++k)
            rows.push_back({"tau_T" + std::to_string(i + 1) + "_T" + std::to_string(k + 1),
                            empirical_tau(cols[i], cols[k]), tau_lifetimes_value(p, i, k), tau_se});
    for (std::size_t j = 0; j < d; ++j)
        rows.push_back({"tau_X0_T" + std::to_string(j + 1), empirical_tau(batch.systemic, cols[j]),
                        tau_systemic(p, j, SystemicMode::VsLifetime), tau_se});
    const double closed = simultaneous_default_prob(p, f.t);
    rows.push_back({"simultaneous_gt_t", empirical_simultaneous(batch, f.t), closed,
                    std::sqrt(std::max(closed * (1.0 - closed), 1e-300) / static_cast<double>(f.n))});

    auto csv = open_output(g, "simulation.csv");
    csv << "quantity,empirical,closed_form,std_error,z_score\n";
    out << "n = " << f.n << ", seed = " << g.seed << ", t = " << num(f.t) << "\n";
    out << "quantity             empirical    closed_form  z\n";
    for (const auto& r : rows) {
        const double z = (r.empirical - r.closed) / r.se;
        csv << r.name << ',' << num(r.empirical) << ',' << num(r.closed) << ',' << num(r.se) << ','
            << num(z) << '\n';
        char line[160];
        std::snprintf(line, sizeof line, "%-20s %-12s %-12s %s\n", r.name.c_str(), num(r.empirical).c_str(),
                      num(r.closed).c_str(), num(z).c_str());
        out << line;
    }
    return kOk;
}

int cmd_calibrate(const Globals& g, const CalibrateFlags& f, std::ostream& out, std::ostream& err) {
    if (f.spreads.empty()) throw ValidationError("--spreads is required");
    const Family family = parse_family(f.family);
    if (family == Family::Independence) throw ValidationError("--family must be clayton or gumbel");
    const TauOn on = parse_tau_on(f.tau_on);
    if (!(f.lgd > 0.0 && f.lgd <= 1.0)) throw ValidationError("--lgd must lie in (0, 1]");
    const LoadedSpreads loaded = load_spreads(f.spreads);
    err << "cleaning: " << loaded.report.summary() << '\n';
    const IntensityPanel panel = extract_intensities(loaded.panel, f.lgd, f.rate);
    if (panel.cols() < 2) throw DataError("calibration needs at least two entities");
    std::vector<int> todo = f.year != 0 ? std::vector<int>{f.year} : years(panel);
    if (todo.empty()) throw DataError("spread file has no usable rows");

    OptimizerSettings opts;
    opts.max_iters = f.max_iters;
    opts.restarts = f.restarts;
    opts.seed = g.seed;
    opts.tolerance = f.tol;
    opts.workers = g.workers;
    const Formatter num(g.precision);

    for (int year : todo) {
        const TauMatrix target = yearly_empirical_taus(panel, year, on, g.workers);
        // The model cannot produce negative or unit taus.
        TauMatrix clipped = target;
        std::size_t n_clipped = 0;
        for (std::size_t i = 0; i < target.dim(); ++i) {
            for (std::size_t k = i + 1; k < target.dim(); ++k) {
                const double v = std::clamp(target.at(i, k), 0.0, 1.0 - 1e-9);
                if (v != target.at(i, k)) ++n_clipped;
                clipped.set(i, k, v);
            }
        }
        if (n_clipped > 0)
            err << "year " << year << ": " << n_clipped << " empirical taus clipped to [0, 1)\n";
        const CalibrationResult res = calibrate(clipped, family, opts);
        const auto report = riskiness_report(res);

        double rss = 0.0;
        for (std::size_t c = 0; c < target.pairs(); ++c)
            rss += std::pow(res.fitted_taus.values()[c] - target.values()[c], 2);
        const double rms = std::sqrt(rss / static_cast<double>(target.pairs()));

        const std::string ys = std::to_string(year);
        auto risk = open_output(g, "riskiness_" + ys + ".csv");
        risk << "entity,tau_X0_Xj,tau_X0_Tj\n";
        for (const auto& r : report) risk << r.entity << ',' << num(r.tau_X0_Xj) << ',' << num(r.tau_X0_Tj) << '\n';

        auto cal = open_output(g, "calibration_" + ys + ".csv");
        cal << "quantity,value\n";
        cal << "year," << year << '\n';
        cal << "family," << to_string(family) << '\n';
        cal << "objective," << num(res.objective) << '\n';
        cal << "converged," << (res.converged ? "true" : "false") << '\n';
        cal << "boundary," << (res.boundary ? "true" : "false") << '\n';
        cal << "restarts," << res.n_restarts_used << '\n';
        cal << "best_restart," << res.best_restart << '\n';
        cal << "residual_rms," << num(rms) << '\n';
        cal << "theta_0," << num(res.params.theta0()) << '\n';
        for (std::size_t j = 0; j < res.params.dim(); ++j) {
            const std::string& e = panel.entities[j];
            cal << "alpha_" << e << ',' << num(res.params.alpha[j]) << '\n';
            cal << "theta_" << e << ',' << num(res.params.theta_of(j)) << '\n';
            cal << "beta_" << e << ',' << num(res.params.gens[j].beta()) << '\n';
        }
        for (std::size_t i = 0; i < target.dim(); ++i) {
            for (std::size_t k = i + 1; k < target.dim(); ++k) {
                const std::string pair = panel.entities[i] + ":" + panel.entities[k];
                cal << "target_tau_" << pair << ',' << num(target.at(i, k)) << '\n';
                cal << "fitted_tau_" << pair << ',' << num(res.fitted_taus.at(i, k)) << '\n';
            }
        }

        out << "year " << year << ": objective " << num(res.objective) << ", converged "
            << (res.converged ? "yes" : "no") << (res.boundary ? " (boundary fit)" : "")
            << ", residual rms " << num(rms) << '\n';
        out << "entity    tau_X0_Xj    tau_X0_Tj\n";
        for (const auto& r : report) {
            char line[160];
            std::snprintf(line, sizeof line, "%-9s %-12s %s\n", r.entity.c_str(), num(r.tau_X0_Xj).c_str(),
                          num(r.tau_X0_Tj).c_str());
            out << line;
        }
    }
    return kOk;
}

int cmd_synthesize(const Globals& g, const SynthesizeFlags& f, std::ostream& out) {
    const ModelParams p = build_params(f.model);
    if (f.base.empty()) throw ValidationError("--base is required");
    SyntheticSpec spec;
    spec.year = f.year;
    spec.days = f.days;
    spec.seed = g.seed;
    spec.lgd = f.lgd;
    spec.base_intensity = per_entity(parse_numbers(f.base, "--base"), p.dim(), "--base");
    if (!f.entities.empty()) spec.entities = split_list(f.entities);
    spec.workers = g.workers;
    const SpreadPanel panel = synthesize_spreads(p, spec);
    auto file = open_output(g, f.file);
    write_spreads(panel, file, g.precision);
    out << "wrote " << panel.rows() << " days x " << panel.cols() << " entities to "
        << (fs::path(g.out_dir) / f.file).string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Systemic shock lifetime model: Kendall taus, simulation and calibration", "syshock"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "random seed (default 20170101)")->capture_default_str();
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--precision", g.precision, "significant digits in CSV output")->capture_default_str();
    app.add_option("--config", g.config, "flat JSON file supplying any flag");
    app.add_option("--workers", g.workers, "OpenMP threads")->capture_default_str();

    TauFlags tau;
    auto* tau_cmd = app.add_subcommand("tau", "pairwise and systemic Kendall taus of a parameter set");
    add_model_flags(tau_cmd, tau.model);
    tau_cmd->add_option("--grid", tau.grid, "Kendall function grid points")->capture_default_str();

    SimulateFlags sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo check of the closed forms");
    add_model_flags(sim_cmd, sim.model);
    sim_cmd->add_option("--n", sim.n, "samples (>= 1000)")->capture_default_str();
    sim_cmd->add_option("--t", sim.t, "horizon for P(T_1 = ... = T_d > t)")->capture_default_str();

    CalibrateFlags cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "yearly Kendall-tau calibration from CDS spreads");
    cal_cmd->add_option("--spreads", cal.spreads, "CSV: date,<entity1>,...");
    cal_cmd->add_option("--year", cal.year, "calendar year (default: every year in the file)");
    cal_cmd->add_option("--family", cal.family, "clayton or gumbel")->capture_default_str();
    cal_cmd->add_option("--lgd", cal.lgd, "loss given default")->capture_default_str();
    cal_cmd->add_option("--rate", cal.rate, "flat interest rate (metadata)")->capture_default_str();
    cal_cmd->add_option("--restarts", cal.restarts, "Nelder-Mead restarts")->capture_default_str();
    cal_cmd->add_option("--max-iters", cal.max_iters, "iterations per restart")->capture_default_str();
    cal_cmd->add_option("--tol", cal.tol, "simplex diameter tolerance")->capture_default_str();
    cal_cmd->add_option("--tau-on", cal.tau_on, "levels or diffs")->capture_default_str();

    SynthesizeFlags syn;
    auto* syn_cmd = app.add_subcommand("synthesize", "write a synthetic spread panel drawn from the model");
    add_model_flags(syn_cmd, syn.model);
    syn_cmd->add_option("--base", syn.base, "base intensity per entity");
    syn_cmd->add_option("--entities", syn.entities, "entity names");
    syn_cmd->add_option("--days", syn.days, "weekdays to generate")->capture_default_str();
    syn_cmd->add_option("--year", syn.year, "calendar year")->capture_default_str();
    syn_cmd->add_option("--lgd", syn.lgd, "loss given default")->capture_default_str();
    syn_cmd->add_option("--file", syn.file, "output file name inside --out")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!g.config.empty()) apply_config(g.config, app, sub);
        check_globals(g);
        if (sub == tau_cmd) return cmd_tau(g, tau, out);
        if (sub == sim_cmd) return cmd_simulate(g, sim, out);
        if (sub == cal_cmd) return cmd_calibrate(g, cal, out, err);
        return cmd_synthesize(g, syn, out);
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace syshock::cli
