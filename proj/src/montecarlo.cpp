#include "varma/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "varma/contaminate.hpp"
#include "varma/csv.hpp"
#include "varma/process.hpp"
#include "varma/rng.hpp"

namespace varma {

VarmaModel design_model(ModelKind kind) {
    Matrix a(2, 2), sigma(2, 2);
    a << 0.7, 0.0, 0.3, 0.7;
    sigma << 1.0, 0.2, 0.2, 1.0;
    switch (kind) {
        case ModelKind::VAR1:
            return VarmaModel(2, {a}, {}, sigma);
        case ModelKind::VMA1:
            return VarmaModel(2, {}, {a}, sigma);
        case ModelKind::VARMA11:
            return VarmaModel(2, {a}, {a}, sigma);
    }
    throw config_error("design_model: unknown kind");
}

void ExperimentConfig::validate() const {
    if (T < 1) throw config_error("ExperimentConfig: T must be >= 1");
    if (alpha < 0 || alpha >= 0.5) throw config_error("ExperimentConfig: alpha must be in [0,0.5)");
    if (replications < 1) throw config_error("ExperimentConfig: replications must be >= 1");
    if (kappa_list.empty()) throw config_error("ExperimentConfig: kappa list must be nonempty");
    for (int k : kappa_list)
        if (k < 0) throw config_error("ExperimentConfig: kappa must be >= 0");
    if (!std::isfinite(zeta)) throw config_error("ExperimentConfig: zeta must be finite");
    if (burn_in < 0) throw config_error("ExperimentConfig: burn_in must be >= 0");
}

std::pair<double, double> bias_rmse(const std::vector<Vector>& estimates, const Vector& truth) {
    if (estimates.empty()) throw dimension_error("bias_rmse: empty estimate list");
    const Eigen::Index n = truth.size();
    Vector mean_err = Vector::Zero(n);
    Vector mean_sq = Vector::Zero(n);
    for (const Vector& est : estimates) {
        if (est.size() != n) throw dimension_error("bias_rmse: estimate dimension mismatch");
        const Vector err = est - truth;
        mean_err += err;
        mean_sq += err.cwiseProduct(err);
    }
    mean_err /= static_cast<double>(estimates.size());
    mean_sq /= static_cast<double>(estimates.size());
    return {mean_err.norm(), std::sqrt(mean_sq.sum())};
}

namespace {

struct RepOutcome {
    std::vector<Vector> per_kappa;  // empty vector = fit did not converge
};

// One replication: simulate, contaminate, build the subset, run the patch
// estimator at every kappa. All randomness comes from the replication seed
// base_seed ^ i; the two sub-streams (innovations, outlier locations) do not
// depend on the contamination kind, so CLEAN/AO/IO share draws.
RepOutcome run_replication(const ExperimentConfig& cfg, int i) {
    const VarmaModel truth = design_model(cfg.model);
    const std::uint64_t rep_seed = cfg.base_seed ^ static_cast<std::uint64_t>(i);
    const std::uint64_t sim_seed = derive_seed(rep_seed, 1);
    const std::uint64_t delta_seed = derive_seed(rep_seed, 2);

    const SimulationResult sim = simulate(truth, cfg.T, cfg.burn_in, sim_seed);
    const std::vector<std::uint8_t> delta = make_indicator(cfg.T, cfg.alpha, delta_seed, cfg.guard);

    TimeSeries observed = sim.series;
    if (cfg.kind == ContKind::AO) {
        observed = apply_ao(sim.series,
                            constant_magnitude_spec(OutlierKind::AO, delta, cfg.zeta, truth.d));
    } else if (cfg.kind == ContKind::IO) {
        observed = apply_io(sim.series,
                            constant_magnitude_spec(OutlierKind::IO, delta, cfg.zeta, truth.d),
                            truth);
    }

    FitOptions opts;
    opts.init = truth;  // experiments initialize at the true parameter

    IndexSet H;
    if (cfg.subset_mode == SubsetMode::Oracle) {
        H = oracle_select(delta);
    } else {
        const int warmup = std::max(truth.p, truth.q);
        H = huber_skip_select(residuals(observed, truth), cfg.alpha, warmup);
    }

    RepOutcome outcome;
    outcome.per_kappa.resize(cfg.kappa_list.size());
    for (std::size_t k = 0; k < cfg.kappa_list.size(); ++k) {
        try {
            const FitResult fr =
                patch_estimator(observed, truth.p, truth.q, H, cfg.kappa_list[k], opts);
            if (fr.converged) outcome.per_kappa[k] = fr.params.dynamic_params();
        } catch (const error&) {
            // leave empty: counted out of m_effective
        }
    }
    return outcome;
}

std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg,
                                    const std::vector<RepOutcome>& outcomes) {
    const Vector truth = design_model(cfg.model).dynamic_params();
    std::vector<AggregateRow> rows;
    rows.reserve(cfg.kappa_list.size());
    for (std::size_t k = 0; k < cfg.kappa_list.size(); ++k) {
        std::vector<Vector> estimates;
        estimates.reserve(outcomes.size());
        for (const RepOutcome& o : outcomes)
            if (o.per_kappa[k].size() > 0) estimates.push_back(o.per_kappa[k]);
        if (estimates.empty())
            throw degenerate_error("run_experiment: all replications non-convergent at kappa " +
                                   std::to_string(cfg.kappa_list[k]));
        AggregateRow row;
        row.kind = cfg.kind;
        row.zeta = cfg.zeta;
        row.alpha = cfg.alpha;
        row.T = cfg.T;
        row.kappa = cfg.kappa_list[k];
        std::tie(row.bias, row.rmse) = bias_rmse(estimates, truth);
        row.m_effective = static_cast<int>(estimates.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::vector<Vector> replication_estimates(const ExperimentConfig& config, int kappa,
                                          bool parallel) {
    ExperimentConfig cfg = config;
    cfg.kappa_list = {kappa};
    cfg.validate();
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.replications));
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.replications; ++i) outcomes[i] = run_replication(cfg, i);
    } else {
        for (int i = 0; i < cfg.replications; ++i) outcomes[i] = run_replication(cfg, i);
    }
    std::vector<Vector> estimates(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i) estimates[i] = outcomes[i].per_kappa[0];
    return estimates;
}

std::vector<AggregateRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.replications));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < config.replications; ++i) outcomes[i] = run_replication(config, i);
    return aggregate(config, outcomes);
}

std::vector<AggregateRow> run_experiment_serial(const ExperimentConfig& config) {
    config.validate();
    std::vector<RepOutcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(config.replications));
    for (int i = 0; i < config.replications; ++i) outcomes.push_back(run_replication(config, i));
    return aggregate(config, outcomes);
}

const char* to_string(ContKind kind) {
    switch (kind) {
        case ContKind::CLEAN: return "CLEAN";
        case ContKind::AO: return "AO";
        case ContKind::IO: return "IO";
    }
    return "?";
}

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::VAR1: return "VAR1";
        case ModelKind::VMA1: return "VMA1";
        case ModelKind::VARMA11: return "VARMA11";
    }
    return "?";
}

namespace {

int kind_order(ContKind k) {
    switch (k) {
        case ContKind::CLEAN: return 0;
        case ContKind::AO: return 1;
        case ContKind::IO: return 2;
    }
    return 3;
}

std::string round4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

}  // namespace

std::string emit_table(const std::vector<AggregateRow>& results, TableFormat format) {
    if (results.empty()) throw dimension_error("emit_table: empty result set");

    using RowKey = std::pair<double, double>;               // (zeta, alpha)
    using ColKey = std::tuple<int, int, int>;               // (T, kind order, kappa)
    std::set<RowKey> row_keys;
    std::set<ColKey> col_keys;
    std::map<std::pair<RowKey, ColKey>, const AggregateRow*> cells;
    for (const AggregateRow& r : results) {
        const RowKey rk{r.zeta, r.alpha};
        const ColKey ck{r.T, kind_order(r.kind), r.kappa};
        row_keys.insert(rk);
        col_keys.insert(ck);
        cells[{rk, ck}] = &r;
    }

    auto col_label = [&](const ColKey& ck, char sep) {
        const auto& [T, ko, kappa] = ck;
        const char* kind_name = ko == 0 ? "CLEAN" : (ko == 1 ? "AO" : "IO");
        std::ostringstream os;
        os << "T" << T << sep << kind_name << sep << "k" << kappa;
        return os.str();
    };

    std::ostringstream out;
    const char* panels[] = {"bias", "rmse", "m_effective"};
    if (format == TableFormat::Csv) {
        out << "panel,zeta,alpha";
        for (const ColKey& ck : col_keys) out << ',' << col_label(ck, '.');
        out << '\n';
        for (int pnl = 0; pnl < 3; ++pnl) {
            for (const RowKey& rk : row_keys) {
                out << panels[pnl] << ',' << format_full(rk.first) << ','
                    << format_full(rk.second);
                for (const ColKey& ck : col_keys) {
                    out << ',';
                    auto it = cells.find({rk, ck});
                    if (it == cells.end()) continue;
                    const AggregateRow& r = *it->second;
                    if (pnl == 0) out << format_full(r.bias);
                    else if (pnl == 1) out << format_full(r.rmse);
                    else out << r.m_effective;
                }
                out << '\n';
            }
        }
        return out.str();
    }

    const char* titles[] = {"Total bias", "RMSE", "Effective replications"};
    for (int pnl = 0; pnl < 3; ++pnl) {
        out << "### " << titles[pnl] << "\n\n";
        out << "| zeta | alpha |";
        for (const ColKey& ck : col_keys) out << ' ' << col_label(ck, ' ') << " |";
        out << "\n|---:|---:|";
        for (std::size_t c = 0; c < col_keys.size(); ++c) out << "---:|";
        out << '\n';
        for (const RowKey& rk : row_keys) {
            out << "| " << rk.first << " | " << rk.second << " |";
            for (const ColKey& ck : col_keys) {
                auto it = cells.find({rk, ck});
                out << ' ';
                if (it != cells.end()) {
                    const AggregateRow& r = *it->second;
                    if (pnl == 0) out << round4(r.bias);
                    else if (pnl == 1) out << round4(r.rmse);
                    else out << r.m_effective;
                }
                out << " |";
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace varma
