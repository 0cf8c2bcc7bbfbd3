#include "seqmon/dgp.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace seqmon {

namespace {

// Substream tags inside one replication.
constexpr std::uint64_t kRegressorStream = 1;
constexpr std::uint64_t kErrorStream = 2;

void check_garch(double omega, double phi, double psi, const char* what) {
    if (!(omega > 0.0) || phi < 0.0 || psi < 0.0 || !(phi + psi < 1.0)) {
        std::ostringstream msg;
        msg << what << ": GARCH(1,1) needs omega > 0, phi, psi >= 0 and phi + psi < 1 (got " << omega << ", "
            << phi << ", " << psi << ")";
        throw ParameterError(msg.str());
    }
}

bool contains(std::initializer_list<double> set, double v) {
    return std::any_of(set.begin(), set.end(), [&](double x) { return std::abs(x - v) < 1e-9; });
}

}  // namespace

std::size_t RegressorProcess::dim() const {
    return std::visit(
        [](const auto& k) -> std::size_t {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Ar1Regressors>) {
                return k.rho.size();
            } else {
                return k.omega.size();
            }
        },
        kind);
}

void RegressorProcess::validate() const {
    if (const auto* ar = std::get_if<Ar1Regressors>(&kind)) {
        for (double r : ar->rho) {
            if (!(std::abs(r) < 1.0)) throw ParameterError("AR(1) regressor needs |rho| < 1");
        }
        return;
    }
    const auto& g = std::get<GarchRegressors>(kind);
    if (g.phi.size() != g.omega.size() || g.psi.size() != g.omega.size())
        throw DimensionError("GARCH regressor parameter vectors differ in length");
    for (std::size_t k = 0; k < g.omega.size(); ++k) check_garch(g.omega[k], g.phi[k], g.psi[k], "regressor");
}

void ErrorProcess::validate() const {
    if (const auto* iid = std::get_if<IidNormalErrors>(&kind)) {
        if (!(iid->variance > 0.0)) throw ParameterError("error variance must be positive");
        return;
    }
    const auto& g = std::get<GarchErrors>(kind);
    check_garch(g.omega, g.phi, g.psi, "errors");
}

double ErrorProcess::variance() const {
    if (const auto* iid = std::get_if<IidNormalErrors>(&kind)) return iid->variance;
    const auto& g = std::get<GarchErrors>(kind);
    return g.omega / (1.0 - g.phi - g.psi);
}

void DgpSpec::validate() const {
    regressors.validate();
    errors.validate();
    if (regressors.dim() + 1 != beta0_bar.size())
        throw DimensionError("beta0_bar must hold the intercept plus one coefficient per regressor");
    if (!(std::abs(beta0_d) < 1.0)) throw ParameterError("|beta0_d| < 1 is required under the null");
    if (M < 1 || extra_horizon < 0 || burn_in < 0) throw ParameterError("M, horizon and burn-in must be valid");
    if (change) {
        if (change->s_star < 1) throw ParameterError("change time s_star must be >= 1");
        if (change->delta_bar.size() != beta0_bar.size())
            throw DimensionError("delta_bar and beta0_bar differ in length");
    }
}

Eigen::MatrixXd gen_regressors(const RegressorProcess& proc, long n, long burn_in, std::uint64_t seed,
                               std::uint64_t stream) {
    proc.validate();
    if (n < 0 || burn_in < 0) throw ParameterError("negative length");
    const auto k = static_cast<Eigen::Index>(proc.dim());
    Eigen::MatrixXd out(n, k);
    Rng rng(seed, stream);
    std::vector<double> innov(static_cast<std::size_t>(k));
    auto draw = [&] {
        if (proc.shared_innovations) {
            const double z = rng.normal();
            std::fill(innov.begin(), innov.end(), z);
        } else {
            for (auto& z : innov) z = rng.normal();
        }
    };

    if (const auto* ar = std::get_if<Ar1Regressors>(&proc.kind)) {
        std::vector<double> x(static_cast<std::size_t>(k), 0.0);
        for (long t = -burn_in; t < n; ++t) {
            draw();
            for (Eigen::Index j = 0; j < k; ++j) {
                auto& xj = x[static_cast<std::size_t>(j)];
                xj = ar->rho[static_cast<std::size_t>(j)] * xj + innov[static_cast<std::size_t>(j)];
                if (t >= 0) out(t, j) = xj;
            }
        }
        return out;
    }

    const auto& g = std::get<GarchRegressors>(proc.kind);
    std::vector<double> var(static_cast<std::size_t>(k));
    std::vector<double> xsq(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < var.size(); ++j) {
        var[j] = g.omega[j] / (1.0 - g.phi[j] - g.psi[j]);
        xsq[j] = var[j];
    }
    for (long t = -burn_in; t < n; ++t) {
        draw();
        for (Eigen::Index j = 0; j < k; ++j) {
            const auto u = static_cast<std::size_t>(j);
            var[u] = g.omega[u] + g.phi[u] * xsq[u] + g.psi[u] * var[u];
            const double x = std::sqrt(var[u]) * innov[u];
            xsq[u] = x * x;
            if (t >= 0) out(t, j) = x;
        }
    }
    return out;
}

std::vector<double> gen_errors(const ErrorProcess& proc, long n, long burn_in, std::uint64_t seed,
                               std::uint64_t stream) {
    proc.validate();
    if (n < 0 || burn_in < 0) throw ParameterError("negative length");
    std::vector<double> out(static_cast<std::size_t>(n));
    Rng rng(seed, stream);
    if (const auto* iid = std::get_if<IidNormalErrors>(&proc.kind)) {
        const double sd = std::sqrt(iid->variance);
        for (long t = -burn_in; t < n; ++t) {
            const double e = sd * rng.normal();
            if (t >= 0) out[static_cast<std::size_t>(t)] = e;
        }
        return out;
    }
    const auto& g = std::get<GarchErrors>(proc.kind);
    double var = g.omega / (1.0 - g.phi - g.psi);
    double esq = var;
    for (long t = -burn_in; t < n; ++t) {
        var = g.omega + g.phi * esq + g.psi * var;
        const double e = std::sqrt(var) * rng.normal();
        esq = e * e;
        if (t >= 0) out[static_cast<std::size_t>(t)] = e;
    }
    return out;
}

SimulatedSeries gen_response(const Eigen::MatrixXd& regressors, std::span<const double> errors,
                             std::span<const double> beta0_bar, double beta0_d,
                             const std::optional<ChangeSpec>& change, long M, long burn_in) {
    const auto n = static_cast<long>(errors.size());
    if (regressors.rows() != n) throw DimensionError("regressor and error series differ in length");
    if (static_cast<Eigen::Index>(beta0_bar.size()) != regressors.cols() + 1)
        throw DimensionError("beta0_bar must hold the intercept plus one coefficient per regressor");
    if (!(std::abs(beta0_d) < 1.0)) throw ParameterError("|beta0_d| < 1 is required under the null");
    if (burn_in < 0 || n <= burn_in) throw DimensionError("series shorter than the burn-in");
    if (change && change->delta_bar.size() != beta0_bar.size())
        throw DimensionError("delta_bar and beta0_bar differ in length");

    const long T = n - burn_in - 1;
    const long change_index = change ? M + change->s_star : -1;
    const Eigen::Index k = regressors.cols();

    SimulatedSeries out;
    out.exog = regressors.bottomRows(T + 1);
    out.y.resize(static_cast<std::size_t>(T + 1));
    out.eps.assign(errors.begin() + burn_in, errors.end());
    out.change_index = change_index;

    double y_prev = 0.0;
    for (long i = 0; i < n; ++i) {
        const long t = i - burn_in;  // time index; negative during burn-in
        const bool post = change && t > change_index;
        const std::span<const double> coef = post ? std::span<const double>(change->delta_bar) : beta0_bar;
        const double ar = post ? change->delta_d : beta0_d;
        double v = coef[0];
        for (Eigen::Index j = 0; j < k; ++j) v += regressors(i, j) * coef[static_cast<std::size_t>(j) + 1];
        const double y = v + ar * y_prev + errors[static_cast<std::size_t>(i)];
        if (t >= 0) out.y[static_cast<std::size_t>(t)] = y;
        y_prev = y;
    }
    return out;
}

SimulatedSeries simulate(const DgpSpec& spec, std::uint64_t replication) {
    spec.validate();
    const long T = spec.M + spec.extra_horizon;
    const long n = spec.burn_in + T + 1;
    const std::uint64_t base = mix_seed({spec.seed, replication});
    const Eigen::MatrixXd x = gen_regressors(spec.regressors, n, spec.burn_in, base, kRegressorStream);
    const std::vector<double> e = gen_errors(spec.errors, n, spec.burn_in, base, kErrorStream);
    return gen_response(x, e, spec.beta0_bar, spec.beta0_d, spec.change, spec.M, spec.burn_in);
}

DgpId parse_dgp_id(const std::string& roman) {
    static const std::array<const char*, 12> names{"i", "ii", "iii", "iv", "v", "vi",
                                                   "vii", "viii", "ix", "x", "xi", "xii"};
    std::string lower = roman;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (lower == names[i]) return static_cast<DgpId>(i + 1);
    }
    throw ParameterError("unknown DGP id '" + roman + "' (expected i..xii)");
}

std::string to_string(DgpId id) {
    static const std::array<const char*, 12> names{"i", "ii", "iii", "iv", "v", "vi",
                                                   "vii", "viii", "ix", "x", "xi", "xii"};
    return names[static_cast<std::size_t>(id) - 1];
}

bool is_null_dgp(DgpId id) { return static_cast<int>(id) <= 4; }

DgpSpec make_dgp(DgpId id, long M, long s_star, std::optional<double> delta_d, std::uint64_t seed) {
    using namespace dgp_params;
    DgpSpec spec;
    spec.name = to_string(id);
    spec.M = M;
    spec.extra_horizon = 10 * M;
    spec.seed = seed;
    spec.beta0_bar = kBeta0Bar;
    spec.beta0_d = kBeta0d;

    const Ar1Regressors ar{kRho};
    const GarchRegressors garch{kOmega, kPhi, kPsi};
    const ErrorProcess iid{IidNormalErrors{1.0}};
    const ErrorProcess garch_err{kGarchErrors};

    const int n = static_cast<int>(id);
    if (is_null_dgp(id)) {
        if (delta_d) throw ParameterError("DGP(" + spec.name + ") is a no-change design; delta_d must be empty");
        switch (id) {
            case DgpId::I:
                spec.regressors = {ar, false};
                spec.errors = garch_err;
                break;
            case DgpId::II:
                spec.regressors = {ar, true};
                spec.errors = iid;
                break;
            case DgpId::III:
                spec.regressors = {garch, false};
                spec.errors = garch_err;
                break;
            default:
                spec.regressors = {garch, true};
                spec.errors = iid;
                break;
        }
        spec.validate();
        return spec;
    }

    // Alternatives: regressors as in DGP(ii); even ids use GARCH errors.
    spec.regressors = {ar, true};
    spec.errors = (n % 2 == 0) ? garch_err : iid;
    ChangeSpec change;
    change.s_star = s_star;
    switch (id) {
        case DgpId::V:
        case DgpId::VI:
            if (delta_d && std::abs(*delta_d - kDeltaDV) > 1e-12)
                throw ParameterError("DGP(v)/(vi) fix delta_d = 0.60");
            change.delta_bar = kDeltaBarV;
            change.delta_d = kDeltaDV;
            break;
        case DgpId::VII:
        case DgpId::VIII:
        case DgpId::IX:
        case DgpId::X:
            if (!delta_d || !contains({0.90, 0.95, 0.99, 1.00}, *delta_d))
                throw ParameterError("DGP(" + spec.name + ") needs delta_d in {0.90, 0.95, 0.99, 1}");
            change.delta_bar = (id == DgpId::VII || id == DgpId::VIII) ? kBeta0Bar : kDeltaBarV;
            change.delta_d = *delta_d;
            break;
        default:
            if (!delta_d || !contains({1.01, 1.05, 1.10, 1.25}, *delta_d))
                throw ParameterError("DGP(" + spec.name + ") needs delta_d in {1.01, 1.05, 1.10, 1.25}");
            change.delta_bar = kDeltaBarV;
            change.delta_d = *delta_d;
            break;
    }
    spec.change = std::move(change);
    spec.validate();
    return spec;
}

}  // namespace seqmon
