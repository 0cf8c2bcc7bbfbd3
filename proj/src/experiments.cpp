#include "seqmon/experiments.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/model.hpp"
#include "seqmon/monitor.hpp"
#include "seqmon/parallel.hpp"
#include "seqmon/rng.hpp"
#include "seqmon/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace seqmon {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::vector<ReplicationOutcome> simulate_stopping_times(const DgpSpec& spec, std::span<const MonitorSetting> settings,
                                                        long reps, long horizon) {
    spec.validate();
    if (settings.empty()) throw ParameterError("no monitoring settings given");
    if (reps < 1) throw ParameterError("reps must be >= 1");
    if (horizon < 1) throw ParameterError("horizon must be >= 1");
    if (spec.extra_horizon < horizon) throw ParameterError("spec.extra_horizon is shorter than the monitoring horizon");

    const long M = spec.M;
    std::vector<MonitorConfig> configs;
    configs.reserve(settings.size());
    for (const auto& s : settings) {
        MonitorConfig cfg;
        cfg.boundary = BoundaryParams{s.c, s.gamma, s.corrected, std::nullopt};
        cfg.horizon = ClosedEnd{horizon};
        cfg.M = M;
        cfg.validate();
        cfg.raw_schedule = make_raw_schedule(M, horizon, cfg.boundary);
        configs.push_back(std::move(cfg));
    }

    std::vector<ReplicationOutcome> out(static_cast<std::size_t>(reps));
    parallel_for(out.size(), [&](std::size_t r) {
        const SimulatedSeries series = simulate(spec, r);
        const RowMajor exog = series.exog;
        const auto k = static_cast<std::size_t>(exog.cols());
        const auto sample = TrainingSample::with_warmup(std::span<const double>(series.y).first(static_cast<std::size_t>(M) + 1),
                                                        series.exog.topRows(M + 1));
        const FittedModel model = fit_ols(sample);

        auto& taus = out[r].tau;
        taus.assign(configs.size(), 0);
        for (std::size_t j = 0; j < configs.size(); ++j) {
            MonitorState state(model, configs[j], series.y[static_cast<std::size_t>(M)]);
            for (long t = M + 1; t <= M + horizon; ++t) {
                const auto row = static_cast<std::size_t>(t);
                const Decision dec = state.step(std::span<const double>(exog.data() + row * k, k), series.y[row]);
                if (dec.kind == Decision::Kind::Stop) {
                    taus[j] = dec.s;
                    break;
                }
                if (dec.kind == Decision::Kind::Censored) break;
            }
        }
    });
    return out;
}

void ExperimentPlan::validate() const {
    if (dgps.empty() || Ms.empty() || gammas.empty() || alphas.empty())
        throw ParameterError("experiment grids must be non-empty");
    if (reps < 1) throw ParameterError("reps must be >= 1");
    if (horizon_multiple < 1) throw ParameterError("horizon_multiple must be >= 1");
    for (long M : Ms) {
        if (M < 7) throw ParameterError("M must exceed the design dimension d = 6");
    }
    for (double g : gammas) {
        if (!(g >= 0.0 && g < 0.5)) throw ParameterError("gamma outside [0, 0.5)");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw ParameterError("alpha outside (0, 1)");
    }
    if (c_override && !(*c_override > 0.0)) throw ParameterError("c override must be positive");
}

std::uint64_t cell_seed(std::uint64_t master, DgpId id, long M, long s_star, std::optional<double> delta_d) {
    return mix_seed({master, static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(M),
                     static_cast<std::uint64_t>(s_star), delta_d ? key_of(*delta_d) : ~std::uint64_t{0}});
}

namespace {

struct CellKey {
    DgpId id;
    long M;
    long s_star;
    std::optional<double> delta_d;
};

std::vector<CellKey> expand_cells(const ExperimentPlan& plan, bool size_study) {
    std::vector<CellKey> cells;
    for (DgpId id : plan.dgps) {
        if (size_study != is_null_dgp(id)) {
            throw ParameterError(size_study ? "size studies accept only the no-change designs i..iv (got " +
                                                  to_string(id) + ")"
                                            : "power studies accept only the change designs v..xii (got " +
                                                  to_string(id) + ")");
        }
        std::vector<std::optional<double>> deltas;
        const int n = static_cast<int>(id);
        if (size_study || n == 5 || n == 6) {
            deltas.push_back(std::nullopt);
        } else {
            if (plan.delta_ds.empty()) throw ParameterError("DGP(" + to_string(id) + ") needs delta_ds");
            for (double d : plan.delta_ds) deltas.emplace_back(d);
        }
        for (long M : plan.Ms) {
            if (size_study) {
                cells.push_back({id, M, 0, std::nullopt});
                continue;
            }
            for (long s : plan.s_stars) {
                for (const auto& d : deltas) cells.push_back({id, M, s, d});
            }
        }
    }
    return cells;
}

TauSummary summarize(std::vector<double> taus) {
    std::sort(taus.begin(), taus.end());
    TauSummary s;
    s.mean = stats::mean(taus);
    s.q25 = stats::quantile_sorted(taus, 0.25);
    s.median = stats::quantile_sorted(taus, 0.5);
    s.q75 = stats::quantile_sorted(taus, 0.75);
    return s;
}

ExperimentReport run_study(const ExperimentPlan& plan, bool size_study) {
    plan.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto cells = expand_cells(plan, size_study);

    // c(gamma, alpha) once per pair.
    std::map<std::pair<double, double>, double> cvals;
    for (double g : plan.gammas) {
        for (double a : plan.alphas) {
            cvals[{g, a}] = plan.c_override ? *plan.c_override : critical_value(g, a, plan.cv_source).value;
        }
    }

    ExperimentReport report;
    report.kind = size_study ? "size" : "power";
    report.master_seed = plan.master_seed;
    report.reps = plan.reps;

    for (const auto& cell : cells) {
        DgpSpec spec = size_study ? make_dgp(cell.id, cell.M, 1, std::nullopt, 0)
                                  : make_dgp(cell.id, cell.M, cell.s_star, cell.delta_d, 0);
        spec.seed = cell_seed(plan.master_seed, cell.id, cell.M, cell.s_star, cell.delta_d);
        const long horizon = plan.horizon_multiple * cell.M;
        spec.extra_horizon = horizon;

        std::vector<MonitorSetting> settings;
        for (double g : plan.gammas) {
            for (double a : plan.alphas) settings.push_back({g, cvals[{g, a}], plan.corrected});
        }
        const auto outcomes = simulate_stopping_times(spec, settings, plan.reps, horizon);

        std::size_t j = 0;
        for (double g : plan.gammas) {
            for (double a : plan.alphas) {
                CellResult res;
                res.dgp = to_string(cell.id);
                res.M = cell.M;
                res.s_star = cell.s_star;
                res.delta_d = size_study ? std::nullopt
                                         : std::optional<double>(spec.change ? spec.change->delta_d : 0.0);
                res.gamma = g;
                res.alpha = a;
                res.c = settings[j].c;
                res.reps = plan.reps;
                std::vector<double> taus;
                for (const auto& o : outcomes) {
                    if (o.tau[j] > 0) taus.push_back(static_cast<double>(o.tau[j]));
                }
                res.detections = static_cast<long>(taus.size());
                const double p = static_cast<double>(res.detections) / static_cast<double>(plan.reps);
                res.rate_percent = 100.0 * p;
                res.se_percent = 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(plan.reps));
                if (size_study) {
                    for (long i = 1; i <= plan.horizon_multiple; ++i) {
                        const double cap = static_cast<double>(i * cell.M);
                        const auto hits = std::count_if(taus.begin(), taus.end(), [&](double t) { return t <= cap; });
                        res.horizon_rates.push_back(100.0 * static_cast<double>(hits) /
                                                    static_cast<double>(plan.reps));
                    }
                }
                if (!taus.empty()) res.tau = summarize(std::move(taus));
                report.cells.push_back(std::move(res));
                ++j;
            }
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

}  // namespace

ExperimentReport run_size_study(const ExperimentPlan& plan) { return run_study(plan, true); }

ExperimentReport run_power_study(const ExperimentPlan& plan) { return run_study(plan, false); }

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    std::size_t nh = 0;
    for (const auto& c : cells) nh = std::max(nh, c.horizon_rates.size());
    os << "dgp,M,s_star,delta_d,gamma,alpha,c,reps,detections,rate_percent,se_percent,tau_mean,tau_q25,tau_median,"
          "tau_q75";
    for (std::size_t h = 1; h <= nh; ++h) os << ",rate_h" << h;
    os << '\n';
    for (const auto& c : cells) {
        os << c.dgp << ',' << c.M << ',' << c.s_star << ',' << (c.delta_d ? fmt(*c.delta_d) : "") << ','
           << fmt(c.gamma) << ',' << fmt(c.alpha) << ',' << fmt(c.c) << ',' << c.reps << ',' << c.detections << ','
           << fmt(c.rate_percent) << ',' << fmt(c.se_percent);
        if (c.tau) {
            os << ',' << fmt(c.tau->mean) << ',' << fmt(c.tau->q25) << ',' << fmt(c.tau->median) << ','
               << fmt(c.tau->q75);
        } else {
            os << ",,,,";
        }
        for (std::size_t h = 0; h < nh; ++h) {
            os << ',';
            if (h < c.horizon_rates.size()) os << fmt(c.horizon_rates[h]);
        }
        os << '\n';
    }
    return os.str();
}

std::string ExperimentReport::horizon_csv() const {
    std::ostringstream os;
    os << "dgp,M,gamma,alpha,horizon,rate_percent\n";
    for (const auto& c : cells) {
        for (std::size_t h = 0; h < c.horizon_rates.size(); ++h) {
            os << c.dgp << ',' << c.M << ',' << fmt(c.gamma) << ',' << fmt(c.alpha) << ','
               << static_cast<long>(h + 1) * c.M << ',' << fmt(c.horizon_rates[h]) << '\n';
        }
    }
    return os.str();
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["master_seed"] = master_seed;
    j["reps"] = reps;
    j["wall_seconds"] = wall_seconds;
    auto& arr = j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : cells) {
        nlohmann::ordered_json e;
        e["dgp"] = c.dgp;
        e["M"] = c.M;
        e["s_star"] = c.s_star;
        e["delta_d"] = c.delta_d ? nlohmann::ordered_json(*c.delta_d) : nlohmann::ordered_json(nullptr);
        e["gamma"] = c.gamma;
        e["alpha"] = c.alpha;
        e["c"] = c.c;
        e["reps"] = c.reps;
        e["detections"] = c.detections;
        e["rate_percent"] = c.rate_percent;
        e["se_percent"] = c.se_percent;
        if (c.tau) {
            e["tau"] = {{"mean", c.tau->mean}, {"q25", c.tau->q25}, {"median", c.tau->median}, {"q75", c.tau->q75}};
        } else {
            e["tau"] = nullptr;
        }
        if (!c.horizon_rates.empty()) e["horizon_rates"] = c.horizon_rates;
        arr.push_back(std::move(e));
    }
    return j.dump(2);
}

TauDensity tau_density(const TauDensityRequest& request) {
    if (!request.spec.change) throw ParameterError("tau_density needs a change design");
    if (request.bins < 1 || request.density_points < 2) throw ParameterError("bins and density_points must be positive");
    DgpSpec spec = request.spec;
    const long horizon = request.horizon > 0 ? request.horizon : 10 * spec.M;
    spec.extra_horizon = std::max(spec.extra_horizon, horizon);
    const MonitorSetting settings[] = {request.setting};
    const auto outcomes = simulate_stopping_times(spec, settings, request.reps, horizon);

    TauDensity out;
    for (const auto& o : outcomes) {
        if (o.tau[0] > 0) out.taus.push_back(o.tau[0]);
    }
    std::sort(out.taus.begin(), out.taus.end());
    out.censored_fraction =
        1.0 - static_cast<double>(out.taus.size()) / static_cast<double>(request.reps);
    if (out.taus.empty()) return out;

    const double lo = static_cast<double>(out.taus.front()) - 0.5;
    const double hi = static_cast<double>(out.taus.back()) + 0.5;
    const double width = (hi - lo) / request.bins;
    out.bin_edges.resize(static_cast<std::size_t>(request.bins) + 1);
    for (int b = 0; b <= request.bins; ++b) out.bin_edges[static_cast<std::size_t>(b)] = lo + b * width;
    out.counts.assign(static_cast<std::size_t>(request.bins), 0);
    for (long t : out.taus) {
        auto b = static_cast<std::size_t>((static_cast<double>(t) - lo) / width);
        b = std::min(b, out.counts.size() - 1);
        ++out.counts[b];
    }

    std::vector<double> sample(out.taus.begin(), out.taus.end());
    out.density_x.resize(static_cast<std::size_t>(request.density_points));
    for (int i = 0; i < request.density_points; ++i) {
        out.density_x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (request.density_points - 1);
    }
    out.density_y = stats::kernel_density(sample, out.density_x);
    return out;
}

std::string TauDensity::histogram_csv() const {
    std::ostringstream os;
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < counts.size(); ++b) {
        os << fmt(bin_edges[b], 10) << ',' << fmt(bin_edges[b + 1], 10) << ',' << counts[b] << '\n';
    }
    return os.str();
}

std::string TauDensity::density_csv() const {
    std::ostringstream os;
    os << "tau,density\n";
    for (std::size_t i = 0; i < density_x.size(); ++i) os << fmt(density_x[i], 10) << ',' << fmt(density_y[i], 10) << '\n';
    return os.str();
}

}  // namespace seqmon
