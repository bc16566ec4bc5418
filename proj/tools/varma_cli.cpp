// varmakit: simulate VARMA data, inject AO/IO outliers, run the Monte Carlo
// bias/RMSE experiments, fit with the iterative patch removal procedure, and
// compare model orders. See README.md for the config schemas.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "varma/contaminate.hpp"
#include "varma/csv.hpp"
#include "varma/estimate.hpp"
#include "varma/montecarlo.hpp"
#include "varma/process.hpp"
#include "varma/rng.hpp"
#include "varma/subsample.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Hash of the canonical serialization; nlohmann objects iterate in key order,
// so the hash is stable under field reordering in the file.
std::string config_hash(const json& config) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["config_hash"] = config_hash(config);
    manifest["seed"] = seed;
    manifest["toolkit_version"] = kVersion;
    manifest["timestamp"] = timestamp_utc();
    manifest["outputs"] = outputs;
    varma::write_file_atomic((fs::path(out_dir) / "manifest.json").string(),
                             manifest.dump(2) + "\n");
}

json load_config(const std::string& path) {
    try {
        return json::parse(varma::read_file(path));
    } catch (const json::exception& e) {
        throw varma::config_error(std::string("config parse error: ") + e.what());
    }
}

varma::Matrix parse_matrix(const json& j, int d, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != d)
        throw varma::config_error(name + " must be a " + std::to_string(d) + "x" +
                                  std::to_string(d) + " matrix");
    varma::Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != d)
            throw varma::config_error(name + " row " + std::to_string(r) + " has wrong length");
        for (int c = 0; c < d; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

varma::VarmaModel parse_model(const json& j) {
    if (!j.contains("sigma")) throw varma::config_error("model: missing sigma");
    const int d = static_cast<int>(j["sigma"].size());
    std::vector<varma::Matrix> phi, theta;
    if (j.contains("phi"))
        for (std::size_t i = 0; i < j["phi"].size(); ++i)
            phi.push_back(parse_matrix(j["phi"][i], d, "phi[" + std::to_string(i) + "]"));
    if (j.contains("theta"))
        for (std::size_t i = 0; i < j["theta"].size(); ++i)
            theta.push_back(parse_matrix(j["theta"][i], d, "theta[" + std::to_string(i) + "]"));
    try {
        return varma::VarmaModel(d, std::move(phi), std::move(theta),
                                 parse_matrix(j["sigma"], d, "sigma"));
    } catch (const varma::dimension_error& e) {
        throw varma::config_error(e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw varma::config_error(std::string("config: missing '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw varma::config_error(std::string("config: bad value for '") + key + "'");
    }
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    const json config = load_config(config_path);
    const varma::VarmaModel model = parse_model(
        config.contains("model") ? config["model"]
                                 : throw varma::config_error("config: missing 'model'"));
    const int T = require<int>(config, "T");
    const int burn_in = config.value("burn_in", 500);
    const std::uint64_t seed = seed_override.value_or(require<std::uint64_t>(config, "seed"));

    const varma::SimulationResult sim = varma::simulate(model, T, burn_in, seed);
    const std::string series_path = (fs::path(out_dir) / "series.csv").string();
    varma::write_file_atomic(series_path, varma::time_series_to_csv(sim.series));
    write_manifest(out_dir, "simulate", config, seed, {series_path});
    std::cout << "wrote " << series_path << " (" << T << " x " << model.d << ")\n";
    return 0;
}

// -------------------------------------------------------------- montecarlo

varma::ContKind parse_kind(const std::string& s) {
    if (s == "CLEAN") return varma::ContKind::CLEAN;
    if (s == "AO") return varma::ContKind::AO;
    if (s == "IO") return varma::ContKind::IO;
    throw varma::config_error("unknown contamination kind '" + s + "'");
}

varma::ModelKind parse_model_kind(const std::string& s) {
    if (s == "VAR1") return varma::ModelKind::VAR1;
    if (s == "VMA1") return varma::ModelKind::VMA1;
    if (s == "VARMA11") return varma::ModelKind::VARMA11;
    throw varma::config_error("unknown model kind '" + s + "'");
}

int cmd_montecarlo(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override) {
    const json config = load_config(config_path);
    const varma::ModelKind model = parse_model_kind(require<std::string>(config, "model"));
    const auto t_list = require<std::vector<int>>(config, "T");
    const auto alpha_list = require<std::vector<double>>(config, "alpha");
    const auto zeta_list = require<std::vector<double>>(config, "zeta");
    const auto kind_names = require<std::vector<std::string>>(config, "kind");
    const auto kappa_list = require<std::vector<int>>(config, "kappa");
    const int replications = require<int>(config, "replications");
    const std::uint64_t base_seed =
        seed_override.value_or(require<std::uint64_t>(config, "base_seed"));
    const std::string subset = config.value("subset", "oracle");
    if (subset != "oracle" && subset != "huber_skip")
        throw varma::config_error("subset must be 'oracle' or 'huber_skip'");

    std::vector<varma::AggregateRow> all_rows;
    for (const std::string& kind_name : kind_names) {
        for (int T : t_list) {
            for (double zeta : zeta_list) {
                for (double alpha : alpha_list) {
                    varma::ExperimentConfig cell;
                    cell.model = model;
                    cell.T = T;
                    cell.alpha = alpha;
                    cell.zeta = zeta;
                    cell.kind = parse_kind(kind_name);
                    cell.kappa_list = kappa_list;
                    cell.replications = replications;
                    cell.base_seed = base_seed;
                    cell.subset_mode = subset == "oracle" ? varma::SubsetMode::Oracle
                                                          : varma::SubsetMode::HuberSkip;
                    cell.burn_in = config.value("burn_in", 500);
                    cell.validate();
                    const auto rows = varma::run_experiment(cell);
                    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
                }
            }
        }
    }

    const std::string csv_path = (fs::path(out_dir) / "results.csv").string();
    const std::string md_path = (fs::path(out_dir) / "results.md").string();
    varma::write_file_atomic(csv_path, varma::emit_table(all_rows, varma::TableFormat::Csv));
    varma::write_file_atomic(md_path, varma::emit_table(all_rows, varma::TableFormat::Markdown));
    write_manifest(out_dir, "montecarlo", config, base_seed, {csv_path, md_path});
    std::cout << varma::emit_table(all_rows, varma::TableFormat::Markdown);
    return 0;
}

// --------------------------------------------------------------------- fit

json matrix_to_json(const varma::Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

int cmd_fit(const std::string& data_path, int p, int q, double alpha, int kappa, int max_outer,
            const std::string& out_dir) {
    const varma::TimeSeries series = varma::read_time_series(data_path);
    const int d = series.dim();
    const int warmup = std::max(p, q);

    varma::FitOptions opts;
    opts.demean = true;
    std::vector<varma::Matrix> phi0(static_cast<std::size_t>(p), varma::Matrix::Zero(d, d));
    std::vector<varma::Matrix> theta0(static_cast<std::size_t>(q), varma::Matrix::Zero(d, d));
    opts.init = varma::VarmaModel(d, phi0, theta0, varma::Matrix::Identity(d, d));

    auto [result, trace] = varma::iterate_patch_removal(series, p, q, alpha, kappa, opts,
                                                        max_outer);

    const int k = varma::aic_param_count(d, p, q, true);
    const varma::ResidualSeries patch_resid =
        varma::residuals_centered(series, result.params, result.center);
    const double aic_patch = varma::aic_avg(
        varma::gaussian_loglik(patch_resid, result.h_used).loglik, k, result.h_used.size());

    const varma::FitResult full_fit =
        varma::fit(series, p, q, varma::IndexSet::full(series.length()), opts);
    const varma::ResidualSeries full_resid =
        varma::residuals_centered(series, full_fit.params, full_fit.center);
    const double aic_full =
        varma::aic_avg(varma::gaussian_loglik(full_resid, varma::IndexSet::full(series.length())).loglik,
                       k, series.length());

    // Flagged outliers: indices inside the scoring window that the final
    // screening pass rejected.
    const varma::IndexSet& final_screen = trace.steps.back().H;
    varma::IndexSet flagged;
    flagged.T = series.length();
    for (int t = warmup + 1; t <= series.length(); ++t)
        if (!final_screen.contains(t)) flagged.members.push_back(t);

    json out;
    out["p"] = p;
    out["q"] = q;
    out["alpha"] = alpha;
    out["kappa"] = kappa;
    out["converged"] = result.converged;
    out["terminated_by"] =
        trace.terminated_by == varma::Termination::FixedPoint ? "fixed-point" : "max-iterations";
    out["outer_iterations"] = trace.steps.size() - 1;
    json phis = json::array(), thetas = json::array();
    for (const auto& m : result.params.phi) phis.push_back(matrix_to_json(m));
    for (const auto& m : result.params.theta) thetas.push_back(matrix_to_json(m));
    out["phi"] = phis;
    out["theta"] = thetas;
    json center = json::array();
    for (int i = 0; i < d; ++i) center.push_back(result.center(i));
    out["center"] = center;
    out["criterion"] = result.criterion_value;
    out["n_retained"] = result.h_used.size();
    out["n_flagged"] = flagged.size();
    out["aic_avg_patch"] = aic_patch;
    out["aic_avg_full"] = aic_full;
    out["n_criterion_evals"] = result.n_criterion_evals;

    std::ostringstream trace_csv;
    trace_csv << "m,screened_size\n";
    for (const auto& step : trace.steps) trace_csv << step.m << ',' << step.H.size() << '\n';

    const std::string fit_path = (fs::path(out_dir) / "fit.json").string();
    const std::string retained_path = (fs::path(out_dir) / "retained.csv").string();
    const std::string flagged_path = (fs::path(out_dir) / "flagged.csv").string();
    const std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
    varma::write_file_atomic(fit_path, out.dump(2) + "\n");
    varma::write_file_atomic(retained_path, varma::index_set_to_csv(result.h_used));
    varma::write_file_atomic(flagged_path, varma::index_set_to_csv(flagged));
    varma::write_file_atomic(trace_path, trace_csv.str());

    json config;
    config["data"] = data_path;
    config["p"] = p;
    config["q"] = q;
    config["alpha"] = alpha;
    config["kappa"] = kappa;
    write_manifest(out_dir, "fit", config, 0, {fit_path, retained_path, flagged_path, trace_path});
    std::cout << out.dump(2) << '\n';
    return 0;
}

// ------------------------------------------------------------------ select

std::vector<std::pair<int, int>> parse_grid(const std::string& spec) {
    std::vector<std::pair<int, int>> grid;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        int p = 0, q = 0;
        char comma = 0;
        std::istringstream cell(item);
        if (!(cell >> p >> comma >> q) || comma != ',' || p < 0 || q < 0)
            throw varma::config_error("bad grid cell '" + item + "' (expected p,q)");
        grid.emplace_back(p, q);
    }
    if (grid.empty()) throw varma::config_error("empty model grid");
    return grid;
}

int cmd_select(const std::string& data_path, const std::string& grid_spec, double alpha, int kappa,
               const std::string& out_dir) {
    const varma::TimeSeries series = varma::read_time_series(data_path);
    const auto grid = parse_grid(grid_spec);

    varma::FitOptions opts;
    const auto rows = varma::select_model(series, grid, alpha, kappa, opts);

    std::ostringstream csv;
    csv << "p,q,n_eff,aic_avg_patch,aic_avg_full\n";
    for (const auto& row : rows)
        csv << row.p << ',' << row.q << ',' << row.n_eff << ','
            << varma::format_full(row.aic_avg_patch) << ','
            << varma::format_full(row.aic_avg_full) << '\n';

    const std::string csv_path = (fs::path(out_dir) / "selection.csv").string();
    varma::write_file_atomic(csv_path, csv.str());

    json config;
    config["data"] = data_path;
    config["grid"] = grid_spec;
    config["alpha"] = alpha;
    config["kappa"] = kappa;
    write_manifest(out_dir, "select", config, 0, {csv_path});

    std::cout << "p q n_eff aic_avg_patch aic_avg_full converged\n";
    for (const auto& row : rows) {
        std::cout << row.p << ' ' << row.q << ' ' << row.n_eff << ' ' << row.aic_avg_patch << ' '
                  << row.aic_avg_full << ' ' << (row.converged ? "yes" : "NO");
        if (!row.note.empty()) std::cout << "  (" << row.note << ')';
        std::cout << '\n';
    }
    return 0;
}

// ------------------------------------------------------------------- trace

int cmd_trace(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
    const json config = load_config(config_path);
    const double phi = config.value("phi", 0.7);
    const double theta = config.value("theta", 0.5);
    const int T = config.value("T", 200);
    const int tau = config.value("tau", T / 2);
    const double zeta = config.value("zeta", 10.0);
    const double sigma2 = config.value("sigma2", 1.0);
    const std::uint64_t seed = seed_override.value_or(require<std::uint64_t>(config, "seed"));
    if (tau < 1 || tau > T) throw varma::config_error("trace: tau must lie in [1, T]");

    struct Block {
        const char* name;
        varma::VarmaModel model;
    };
    const std::vector<Block> blocks = {
        {"AR1", varma::scalar_ar1(phi, sigma2)},
        {"MA1", varma::scalar_ma1(theta, sigma2)},
        {"ARMA11", varma::scalar_arma11(phi, theta, sigma2)},
    };

    std::vector<std::uint8_t> delta(static_cast<std::size_t>(T), 0);
    delta[tau - 1] = 1;

    std::ostringstream csv;
    csv << "model,kind,t,series,residual,clean_series,clean_residual,is_outlier_time\n";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const varma::SimulationResult sim =
            varma::simulate(blocks[b].model, T, 500, varma::derive_seed(seed, b + 1));
        const varma::ResidualSeries clean_resid = varma::residuals(sim.series, blocks[b].model);
        for (const char* kind : {"AO", "IO"}) {
            const bool is_ao = std::string(kind) == "AO";
            const varma::ContaminationSpec spec = varma::constant_magnitude_spec(
                is_ao ? varma::OutlierKind::AO : varma::OutlierKind::IO, delta, zeta, 1);
            const varma::TimeSeries observed =
                is_ao ? varma::apply_ao(sim.series, spec)
                      : varma::apply_io(sim.series, spec, blocks[b].model);
            const varma::ResidualSeries resid = varma::residuals(observed, blocks[b].model);
            for (int t = 0; t < T; ++t) {
                csv << blocks[b].name << ',' << kind << ',' << (t + 1) << ','
                    << varma::format_full(observed.values(t, 0)) << ','
                    << varma::format_full(resid.values(t, 0)) << ','
                    << varma::format_full(sim.series.values(t, 0)) << ','
                    << varma::format_full(clean_resid.values(t, 0)) << ','
                    << (t + 1 == tau ? 1 : 0) << '\n';
            }
        }
    }

    const std::string trace_path = (fs::path(out_dir) / "trace.csv").string();
    varma::write_file_atomic(trace_path, csv.str());
    write_manifest(out_dir, "trace", config, seed, {trace_path});
    std::cout << "wrote " << trace_path << '\n';
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"varmakit: robust VARMA estimation with patch removal"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after the subcommand name

    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 0;
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed_override, "Override the config seed");
    app.add_option("--threads", threads,
                   "OpenMP thread count (default: OMP_NUM_THREADS or all cores)");

    std::string config_path, data_path, grid_spec = "1,0;2,0;3,0";
    int p = 1, q = 0, kappa = 0, max_outer = 50;
    double alpha = 0.1;

    CLI::App* simulate = app.add_subcommand("simulate", "Simulate a VARMA series to CSV");
    simulate->add_option("--config", config_path, "JSON config")->required();

    CLI::App* montecarlo = app.add_subcommand("montecarlo", "Run a bias/RMSE experiment panel");
    montecarlo->add_option("--config", config_path, "JSON config")->required();

    CLI::App* fit = app.add_subcommand("fit", "Iterative patch removal fit on a CSV series");
    fit->add_option("--data", data_path, "Input series CSV")->required();
    fit->add_option("--p", p, "AR order")->required();
    fit->add_option("--q", q, "MA order")->required();
    fit->add_option("--alpha", alpha, "Trimming proportion")->capture_default_str();
    fit->add_option("--kappa", kappa, "Patch length")->capture_default_str();
    fit->add_option("--max-outer", max_outer, "Outer iteration budget")->capture_default_str();

    CLI::App* select = app.add_subcommand("select", "Model comparison over a (p,q) grid");
    select->add_option("--data", data_path, "Input series CSV")->required();
    select->add_option("--grid", grid_spec, "Semicolon list of p,q cells")->capture_default_str();
    select->add_option("--alpha", alpha, "Trimming proportion")->capture_default_str();
    select->add_option("--kappa", kappa, "Patch length")->capture_default_str();

    CLI::App* trace = app.add_subcommand("trace", "Emit observed/residual traces per outlier kind");
    trace->add_option("--config", config_path, "JSON config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads > 0) {
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
    }

    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, seed_override);
    if (montecarlo->parsed()) return cmd_montecarlo(config_path, out_dir, seed_override);
    if (fit->parsed()) return cmd_fit(data_path, p, q, alpha, kappa, max_outer, out_dir);
    if (select->parsed()) return cmd_select(data_path, grid_spec, alpha, kappa, out_dir);
    if (trace->parsed()) return cmd_trace(config_path, out_dir, seed_override);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const varma::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const varma::selection_collapse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const varma::degenerate_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const varma::model_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const varma::dimension_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const varma::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
