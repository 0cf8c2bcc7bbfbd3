#include "seqmon/cli_io.hpp"

#include "seqmon/errors.hpp"
#include "seqmon/model.hpp"

#include <json.hpp>
#include <toml.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace seqmon {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    if (quoted) throw DataError("unterminated quote on line " + std::to_string(line_no));
    out.push_back(trim(field));
    return out;
}

double parse_number(const std::string& text, const std::string& column, std::size_t row) {
    std::size_t used = 0;
    double v = kNaN;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw DataError("column '" + column + "', row " + std::to_string(row) + ": '" + text + "' is not a finite number");
    }
    return v;
}

}  // namespace

// ColumnTransform ------------------------------------------------------------

int ColumnTransform::depth() const {
    switch (op) {
        case Op::Identity:
            return 0;
        case Op::DiffLog:
            return 1;
        case Op::Lag:
            return k;
        case Op::DiffLogThenLag:
            return 1 + k;
    }
    return 0;
}

void ColumnTransform::validate() const {
    if (column.empty()) throw ConfigError("transform without a source column");
    if ((op == Op::Lag || op == Op::DiffLogThenLag) && k < 1)
        throw ConfigError("column '" + column + "': lag depth k must be >= 1");
}

std::string ColumnTransform::describe() const {
    switch (op) {
        case Op::Identity:
            return "identity";
        case Op::DiffLog:
            return "diff_log";
        case Op::Lag:
            return "lag(" + std::to_string(k) + ")";
        case Op::DiffLogThenLag:
            return "diff_log_then_lag(" + std::to_string(k) + ")";
    }
    return "unknown";
}

ColumnTransform::Op parse_transform_op(const std::string& name) {
    if (name == "identity") return ColumnTransform::Op::Identity;
    if (name == "diff_log") return ColumnTransform::Op::DiffLog;
    if (name == "lag") return ColumnTransform::Op::Lag;
    if (name == "diff_log_then_lag") return ColumnTransform::Op::DiffLogThenLag;
    throw ConfigError("unknown transform '" + name + "' (identity, diff_log, lag, diff_log_then_lag)");
}

// CSV ------------------------------------------------------------------------

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw DataError("missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw DataError("CSV input has no header row");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in);
}

std::vector<double> apply_transform(std::span<const double> raw, const ColumnTransform& t) {
    t.validate();
    const std::size_t n = raw.size();
    std::vector<double> base(raw.begin(), raw.end());
    if (t.op == ColumnTransform::Op::DiffLog || t.op == ColumnTransform::Op::DiffLogThenLag) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!(raw[i] > 0.0)) {
                throw DataError("column '" + t.column + "', row " + std::to_string(i + 1) +
                                ": diff_log needs strictly positive values (got " + std::to_string(raw[i]) + ")");
            }
        }
        base.assign(n, kNaN);
        for (std::size_t i = 1; i < n; ++i) base[i] = std::log(raw[i]) - std::log(raw[i - 1]);
    }
    if (t.op == ColumnTransform::Op::Lag || t.op == ColumnTransform::Op::DiffLogThenLag) {
        const auto k = static_cast<std::size_t>(t.k);
        std::vector<double> lagged(n, kNaN);
        for (std::size_t i = k; i < n; ++i) lagged[i] = base[i - k];
        base = std::move(lagged);
    }
    return base;
}

Dataset ingest_csv(const CsvTable& table, const ColumnMap& map) {
    map.response.validate();
    for (const auto& t : map.exog) t.validate();

    auto raw_column = [&](const std::string& name) {
        const std::size_t idx = table.column_index(name);
        std::vector<double> v(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) v[r] = parse_number(table.rows[r][idx], name, r + 1);
        return v;
    };

    int offset = map.response.depth();
    for (const auto& t : map.exog) offset = std::max(offset, t.depth());
    const auto n_raw = static_cast<long>(table.rows.size());
    if (n_raw <= offset) throw DataError("not enough rows left after the transforms");
    const auto n = static_cast<std::size_t>(n_raw - offset);

    Dataset ds;
    ds.offset = offset;
    const auto y_full = apply_transform(raw_column(map.response.column), map.response);
    ds.y.assign(y_full.begin() + offset, y_full.end());
    ds.exog.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(map.exog.size()));
    for (std::size_t j = 0; j < map.exog.size(); ++j) {
        const auto col = apply_transform(raw_column(map.exog[j].column), map.exog[j]);
        for (std::size_t i = 0; i < n; ++i) {
            ds.exog(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i + static_cast<std::size_t>(offset)];
        }
        ds.exog_names.push_back(map.exog[j].column + ":" + map.exog[j].describe());
    }
    if (!map.date_column.empty()) {
        const std::size_t idx = table.column_index(map.date_column);
        for (std::size_t i = 0; i < n; ++i) ds.dates.push_back(table.rows[i + static_cast<std::size_t>(offset)][idx]);
    } else {
        for (std::size_t i = 0; i < n; ++i) ds.dates.push_back(std::to_string(i + static_cast<std::size_t>(offset) + 1));
    }
    return ds;
}

Dataset ingest_csv(const std::string& path, const ColumnMap& map) { return ingest_csv(read_csv_file(path), map); }

// Config documents -------------------------------------------------------------

namespace {

Json parse_document(const std::string& text, bool toml) {
    try {
        if (toml) {
            const toml::table tbl = toml::parse(text);
            std::ostringstream os;
            os << toml::json_formatter{tbl};
            return Json::parse(os.str());
        }
        return Json::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(msg.str());
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
}

std::pair<std::string, bool> read_document_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    const bool toml = std::filesystem::path(path).extension() == ".toml";
    return {os.str(), toml};
}

/// Rejects keys outside `allowed` so typos surface as errors.
void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("'" + where + "' must be a table");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

/// A key set to null counts as absent, so the JSON mirror of a config parses back.
bool present(const Json& obj, const char* key) { return obj.contains(key) && !obj.at(key).is_null(); }

template <class T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
    if (!present(obj, key)) return fallback;
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!obj.at(key).is_number()) throw ConfigError("");
        }
        if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!obj.at(key).is_number_integer()) throw ConfigError("");
        }
        return obj.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
    }
}

template <class T>
T require(const Json& obj, const char* key, const std::string& where) {
    if (!present(obj, key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
    return get_or<T>(obj, key, T{}, where);
}

std::vector<double> get_reals(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
    const Json& v = obj.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("key '" + std::string(key) + "' in " + where + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("key '" + std::string(key) + "' in " + where + " must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<long> get_integers(const Json& obj, const char* key, const std::string& where) {
    std::vector<long> out;
    for (double v : get_reals(obj, key, where)) {
        if (v != std::floor(v)) throw ConfigError("key '" + std::string(key) + "' in " + where + " must hold integers");
        out.push_back(static_cast<long>(v));
    }
    return out;
}

ColumnTransform parse_transform(const Json& obj, const std::string& where) {
    check_keys(obj, {"column", "transform", "k"}, where);
    ColumnTransform t;
    t.column = require<std::string>(obj, "column", where);
    t.op = parse_transform_op(get_or<std::string>(obj, "transform", "identity", where));
    t.k = get_or<int>(obj, "k", t.op == ColumnTransform::Op::Identity || t.op == ColumnTransform::Op::DiffLog ? 0 : 1,
                      where);
    t.validate();
    return t;
}

Json transform_to_json(const ColumnTransform& t) {
    static const char* names[] = {"identity", "diff_log", "lag", "diff_log_then_lag"};
    Json j;
    j["column"] = t.column;
    j["transform"] = names[static_cast<int>(t.op)];
    j["k"] = t.k;
    return j;
}

CriticalValueSource parse_cv_source(const Json& obj, std::optional<double>& c_override, const std::string& where) {
    check_keys(obj, {"source", "grid", "reps", "seed", "value"}, where);
    if (present(obj, "value")) c_override = get_or<double>(obj, "value", 0.0, where);
    const auto source = get_or<std::string>(obj, "source", "table", where);
    if (source == "table") return TableSource{};
    if (source == "simulation") {
        SimulationSource sim;
        sim.grid_size = get_or<int>(obj, "grid", sim.grid_size, where);
        sim.reps = get_or<long>(obj, "reps", sim.reps, where);
        sim.seed = get_or<std::uint64_t>(obj, "seed", sim.seed, where);
        return sim;
    }
    throw ConfigError("critical_value.source must be 'table' or 'simulation'");
}

Json cv_source_to_json(const CriticalValueSource& src, const std::optional<double>& c_override) {
    Json j;
    if (const auto* sim = std::get_if<SimulationSource>(&src)) {
        j["source"] = "simulation";
        j["grid"] = sim->grid_size;
        j["reps"] = sim->reps;
        j["seed"] = sim->seed;
    } else {
        j["source"] = "table";
    }
    j["value"] = c_override ? Json(*c_override) : Json(nullptr);
    return j;
}

}  // namespace

void MonitorRunConfig::validate() const {
    columns.response.validate();
    for (const auto& t : columns.exog) t.validate();
    const long d = static_cast<long>(columns.exog.size()) + 2;
    if (M <= d) throw ConfigError("training size M must exceed the design dimension d = " + std::to_string(d));
    if (training_start < 1) throw ConfigError("training.start must be >= 1");
    if (!(gamma >= 0.0 && gamma < 0.5)) throw ConfigError("gamma must lie in [0, 0.5)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (c_override && !(*c_override > 0.0)) throw ConfigError("critical_value.value must be positive");
    if (closed_end_N && *closed_end_N < 1) throw ConfigError("monitor.closed_end_N must be >= 1");
    if (max_steps < 1) throw ConfigError("monitor.max_steps must be >= 1");
    if (y0 && !std::isfinite(*y0)) throw ConfigError("training.y0 must be finite");
    if (trajectory_file.empty()) throw ConfigError("output.trajectory must be non-empty");
}

MonitorRunConfig parse_monitor_config(const std::string& text, bool toml) {
    const Json doc = parse_document(text, toml);
    check_keys(doc, {"data", "training", "monitor", "critical_value", "output"}, "config");
    MonitorRunConfig cfg;

    const Json data = doc.value("data", Json::object());
    check_keys(data, {"path", "date_column", "response", "exog"}, "data");
    cfg.data_path = get_or<std::string>(data, "path", "", "data");
    cfg.columns.date_column = get_or<std::string>(data, "date_column", "", "data");
    if (!data.contains("response")) throw ConfigError("missing table data.response");
    cfg.columns.response = parse_transform(data.at("response"), "data.response");
    if (data.contains("exog")) {
        if (!data.at("exog").is_array()) throw ConfigError("data.exog must be a list of tables");
        for (const auto& e : data.at("exog")) cfg.columns.exog.push_back(parse_transform(e, "data.exog"));
    }

    const Json training = doc.value("training", Json::object());
    check_keys(training, {"start", "M", "y0"}, "training");
    cfg.training_start = get_or<long>(training, "start", 1, "training");
    cfg.M = require<long>(training, "M", "training");
    if (present(training, "y0")) cfg.y0 = get_or<double>(training, "y0", 0.0, "training");

    const Json mon = doc.value("monitor", Json::object());
    check_keys(mon, {"gamma", "alpha", "corrected", "closed_end_N", "max_steps"}, "monitor");
    cfg.gamma = require<double>(mon, "gamma", "monitor");
    cfg.alpha = require<double>(mon, "alpha", "monitor");
    cfg.corrected = get_or<bool>(mon, "corrected", true, "monitor");
    if (present(mon, "closed_end_N")) cfg.closed_end_N = get_or<long>(mon, "closed_end_N", 0, "monitor");
    cfg.max_steps = get_or<long>(mon, "max_steps", kDefaultMaxSteps, "monitor");

    cfg.cv_source = parse_cv_source(doc.value("critical_value", Json::object()), cfg.c_override, "critical_value");

    const Json out = doc.value("output", Json::object());
    check_keys(out, {"dir", "trajectory"}, "output");
    cfg.output_dir = get_or<std::string>(out, "dir", ".", "output");
    cfg.trajectory_file = get_or<std::string>(out, "trajectory", "trajectory.csv", "output");

    cfg.validate();
    return cfg;
}

MonitorRunConfig load_monitor_config(const std::string& path) {
    const auto [text, toml] = read_document_file(path);
    return parse_monitor_config(text, toml);
}

std::string monitor_config_to_json(const MonitorRunConfig& cfg) {
    Json j;
    j["data"]["path"] = cfg.data_path;
    j["data"]["date_column"] = cfg.columns.date_column;
    j["data"]["response"] = transform_to_json(cfg.columns.response);
    j["data"]["exog"] = Json::array();
    for (const auto& t : cfg.columns.exog) j["data"]["exog"].push_back(transform_to_json(t));
    j["training"]["start"] = cfg.training_start;
    j["training"]["M"] = cfg.M;
    j["training"]["y0"] = cfg.y0 ? Json(*cfg.y0) : Json(nullptr);
    j["monitor"]["gamma"] = cfg.gamma;
    j["monitor"]["alpha"] = cfg.alpha;
    j["monitor"]["corrected"] = cfg.corrected;
    j["monitor"]["closed_end_N"] = cfg.closed_end_N ? Json(*cfg.closed_end_N) : Json(nullptr);
    j["monitor"]["max_steps"] = cfg.max_steps;
    j["critical_value"] = cv_source_to_json(cfg.cv_source, cfg.c_override);
    j["output"]["dir"] = cfg.output_dir;
    j["output"]["trajectory"] = cfg.trajectory_file;
    return j.dump(2);
}

// DGP spec documents -------------------------------------------------------------

namespace {

DgpSpec dgp_spec_from_json(const Json& doc, const std::string& where) {
    if (doc.contains("dgp")) {
        check_keys(doc, {"dgp", "M", "s_star", "delta_d", "seed", "burn_in", "extra_horizon"}, where);
        const DgpId id = parse_dgp_id(require<std::string>(doc, "dgp", where));
        std::optional<double> delta;
        if (present(doc, "delta_d")) delta = get_or<double>(doc, "delta_d", 0.0, where);
        DgpSpec spec = make_dgp(id, require<long>(doc, "M", where), get_or<long>(doc, "s_star", 1, where), delta,
                                get_or<std::uint64_t>(doc, "seed", 0, where));
        spec.burn_in = get_or<long>(doc, "burn_in", spec.burn_in, where);
        spec.extra_horizon = get_or<long>(doc, "extra_horizon", spec.extra_horizon, where);
        spec.validate();
        return spec;
    }

    check_keys(doc, {"name", "regressors", "errors", "beta0_bar", "beta0_d", "change", "M", "extra_horizon", "burn_in",
                     "seed"},
               where);
    DgpSpec spec;
    spec.name = get_or<std::string>(doc, "name", "", where);
    if (!doc.contains("regressors")) throw ConfigError("missing table regressors in " + where);
    const Json& reg = doc.at("regressors");
    check_keys(reg, {"kind", "rho", "omega", "phi", "psi", "shared_innovations"}, where + ".regressors");
    const auto rkind = require<std::string>(reg, "kind", where + ".regressors");
    if (rkind == "ar1") {
        spec.regressors.kind = Ar1Regressors{get_reals(reg, "rho", where + ".regressors")};
    } else if (rkind == "garch") {
        spec.regressors.kind = GarchRegressors{get_reals(reg, "omega", where + ".regressors"),
                                               get_reals(reg, "phi", where + ".regressors"),
                                               get_reals(reg, "psi", where + ".regressors")};
    } else {
        throw ConfigError("regressors.kind must be 'ar1' or 'garch'");
    }
    spec.regressors.shared_innovations = get_or<bool>(reg, "shared_innovations", false, where + ".regressors");

    const Json err = doc.value("errors", Json{{"kind", "iid"}});
    check_keys(err, {"kind", "variance", "omega", "phi", "psi"}, where + ".errors");
    const auto ekind = require<std::string>(err, "kind", where + ".errors");
    if (ekind == "iid") {
        spec.errors.kind = IidNormalErrors{get_or<double>(err, "variance", 1.0, where + ".errors")};
    } else if (ekind == "garch") {
        spec.errors.kind = GarchErrors{require<double>(err, "omega", where + ".errors"),
                                       require<double>(err, "phi", where + ".errors"),
                                       require<double>(err, "psi", where + ".errors")};
    } else {
        throw ConfigError("errors.kind must be 'iid' or 'garch'");
    }

    spec.beta0_bar = get_reals(doc, "beta0_bar", where);
    spec.beta0_d = require<double>(doc, "beta0_d", where);
    if (doc.contains("change")) {
        const Json& ch = doc.at("change");
        check_keys(ch, {"s_star", "delta_bar", "delta_d"}, where + ".change");
        ChangeSpec c;
        c.s_star = get_or<long>(ch, "s_star", 1, where + ".change");
        c.delta_bar = get_reals(ch, "delta_bar", where + ".change");
        c.delta_d = require<double>(ch, "delta_d", where + ".change");
        spec.change = std::move(c);
    }
    spec.M = require<long>(doc, "M", where);
    spec.extra_horizon = get_or<long>(doc, "extra_horizon", 10 * spec.M, where);
    spec.burn_in = get_or<long>(doc, "burn_in", kDefaultBurnIn, where);
    spec.seed = get_or<std::uint64_t>(doc, "seed", 0, where);
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    } catch (const DimensionError& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

}  // namespace

DgpSpec parse_dgp_spec(const std::string& text, bool toml) {
    const Json doc = parse_document(text, toml);
    try {
        return dgp_spec_from_json(doc, "spec");
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

std::string dgp_spec_to_json(const DgpSpec& spec) {
    Json j;
    j["name"] = spec.name;
    if (const auto* ar = std::get_if<Ar1Regressors>(&spec.regressors.kind)) {
        j["regressors"] = {{"kind", "ar1"}, {"rho", ar->rho}};
    } else {
        const auto& g = std::get<GarchRegressors>(spec.regressors.kind);
        j["regressors"] = {{"kind", "garch"}, {"omega", g.omega}, {"phi", g.phi}, {"psi", g.psi}};
    }
    j["regressors"]["shared_innovations"] = spec.regressors.shared_innovations;
    if (const auto* iid = std::get_if<IidNormalErrors>(&spec.errors.kind)) {
        j["errors"] = {{"kind", "iid"}, {"variance", iid->variance}};
    } else {
        const auto& g = std::get<GarchErrors>(spec.errors.kind);
        j["errors"] = {{"kind", "garch"}, {"omega", g.omega}, {"phi", g.phi}, {"psi", g.psi}};
    }
    j["beta0_bar"] = spec.beta0_bar;
    j["beta0_d"] = spec.beta0_d;
    if (spec.change) {
        j["change"] = {{"s_star", spec.change->s_star},
                       {"delta_bar", spec.change->delta_bar},
                       {"delta_d", spec.change->delta_d}};
    }
    j["M"] = spec.M;
    j["extra_horizon"] = spec.extra_horizon;
    j["burn_in"] = spec.burn_in;
    j["seed"] = spec.seed;
    return j.dump(2);
}

// Experiment documents -------------------------------------------------------------

ExperimentPlan parse_experiment_plan(const std::string& text, bool toml) {
    const Json doc = parse_document(text, toml);
    const std::string where = "plan";
    check_keys(doc, {"dgps", "M", "gamma", "alpha", "s_star", "delta_d", "reps", "horizon_multiple", "seed",
                     "corrected", "critical_value"},
               where);
    ExperimentPlan plan;
    if (!doc.contains("dgps") || !doc.at("dgps").is_array()) throw ConfigError("plan needs a 'dgps' list");
    for (const auto& id : doc.at("dgps")) {
        if (!id.is_string()) throw ConfigError("plan.dgps must hold strings such as \"v\"");
        try {
            plan.dgps.push_back(parse_dgp_id(id.get<std::string>()));
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    if (doc.contains("M")) plan.Ms = get_integers(doc, "M", where);
    if (doc.contains("gamma")) plan.gammas = get_reals(doc, "gamma", where);
    if (doc.contains("alpha")) plan.alphas = get_reals(doc, "alpha", where);
    if (doc.contains("s_star")) plan.s_stars = get_integers(doc, "s_star", where);
    if (doc.contains("delta_d")) plan.delta_ds = get_reals(doc, "delta_d", where);
    plan.reps = get_or<long>(doc, "reps", plan.reps, where);
    plan.horizon_multiple = get_or<long>(doc, "horizon_multiple", plan.horizon_multiple, where);
    plan.master_seed = get_or<std::uint64_t>(doc, "seed", plan.master_seed, where);
    plan.corrected = get_or<bool>(doc, "corrected", plan.corrected, where);
    plan.cv_source = parse_cv_source(doc.value("critical_value", Json::object()), plan.c_override, "critical_value");
    try {
        plan.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return plan;
}

ExperimentPlan load_experiment_plan(const std::string& path) {
    const auto [text, toml] = read_document_file(path);
    return parse_experiment_plan(text, toml);
}

TauDensityRequest parse_tau_density_request(const std::string& text, bool toml) {
    const Json doc = parse_document(text, toml);
    const std::string where = "tau-density spec";
    check_keys(doc, {"dgp", "gamma", "alpha", "corrected", "critical_value", "reps", "horizon", "bins",
                     "density_points"},
               where);
    if (!doc.contains("dgp")) throw ConfigError("missing table 'dgp' in " + where);
    TauDensityRequest req;
    try {
        req.spec = dgp_spec_from_json(doc.at("dgp"), "dgp");
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    const double gamma = require<double>(doc, "gamma", where);
    const double alpha = get_or<double>(doc, "alpha", 0.05, where);
    std::optional<double> c_override;
    const auto src = parse_cv_source(doc.value("critical_value", Json::object()), c_override, "critical_value");
    try {
        req.setting.gamma = gamma;
        req.setting.c = c_override ? *c_override : critical_value(gamma, alpha, src).value;
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    req.setting.corrected = get_or<bool>(doc, "corrected", true, where);
    req.reps = get_or<long>(doc, "reps", req.reps, where);
    req.horizon = get_or<long>(doc, "horizon", 0, where);
    req.bins = get_or<int>(doc, "bins", req.bins, where);
    req.density_points = get_or<int>(doc, "density_points", req.density_points, where);
    if (req.reps < 1 || req.bins < 1 || req.density_points < 2 || req.horizon < 0)
        throw ConfigError("reps, bins, density_points and horizon must be positive");
    return req;
}

TauDensityRequest load_tau_density_request(const std::string& path) {
    const auto [text, toml] = read_document_file(path);
    return parse_tau_density_request(text, toml);
}

std::string series_to_csv(const SimulatedSeries& series, bool include_eps) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "t,y";
    for (Eigen::Index k = 0; k < series.exog.cols(); ++k) os << ",x" << k + 2;
    if (include_eps) os << ",eps";
    os << '\n';
    for (std::size_t t = 0; t < series.y.size(); ++t) {
        os << t << ',' << series.y[t];
        for (Eigen::Index k = 0; k < series.exog.cols(); ++k) os << ',' << series.exog(static_cast<Eigen::Index>(t), k);
        if (include_eps) os << ',' << series.eps[t];
        os << '\n';
    }
    return os.str();
}

// Commands -------------------------------------------------------------------

std::string trajectory_to_csv(const std::vector<TrajectoryPoint>& trajectory) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "s,detector,boundary,decision\n";
    for (const auto& p : trajectory) {
        os << p.s << ',' << p.detector << ',' << p.boundary << ',' << to_string(p.decision) << '\n';
    }
    return os.str();
}

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace

MonitorReport remonitor_command(const MonitorRunConfig& config, const Dataset& data, long new_training_start,
                                std::optional<long> previous_detection_row, const CommandOptions& options) {
    MonitorRunConfig shifted = config;
    shifted.training_start = new_training_start;
    shifted.y0.reset();
    std::vector<std::string> warnings;
    if (previous_detection_row && new_training_start < *previous_detection_row) {
        warnings.push_back("training window starts at row " + std::to_string(new_training_start) +
                           ", before the previous detection at row " + std::to_string(*previous_detection_row) +
                           "; the windows overlap");
    }
    MonitorReport report = monitor_command(shifted, data, options);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    return report;
}

MonitorReport monitor_command(const MonitorRunConfig& config, const Dataset& data, const CommandOptions& options) {
    config.validate();
    const auto n = static_cast<long>(data.y.size());
    if (data.exog.rows() != n) throw DataError("dataset regressors and responses differ in length");
    if (static_cast<std::size_t>(data.exog.cols()) != config.columns.exog.size())
        throw DataError("dataset has a different number of regressors than the configuration");

    MonitorReport report;
    report.config_json = monitor_config_to_json(config);

    // Training rows first..last (1-based) and the lag of the first one.
    long first = config.training_start;
    double y0 = 0.0;
    if (config.y0) {
        y0 = *config.y0;
    } else if (first >= 2) {
        y0 = data.y[static_cast<std::size_t>(first - 2)];
    } else {
        first = 2;
        y0 = data.y[0];
        report.warnings.push_back("row 1 supplies the initial lag only; training uses rows 2.." +
                                  std::to_string(config.M + 1));
    }
    const long last = first + config.M - 1;
    if (last > n) {
        throw DataError("training window rows " + std::to_string(first) + ".." + std::to_string(last) +
                        " exceeds the " + std::to_string(n) + " available rows");
    }
    report.training_first_row = first;
    report.training_last_row = last;

    const auto i0 = static_cast<Eigen::Index>(first - 1);
    const std::span<const double> y_train(data.y.data() + (first - 1), static_cast<std::size_t>(config.M));
    const Eigen::MatrixXd x_train = data.exog.middleRows(i0, config.M);
    const FittedModel model = fit_ols(TrainingSample::from_series(y_train, x_train, y0));

    // Critical value.
    CriticalValue cv;
    if (config.c_override) {
        cv.value = *config.c_override;
        cv.provenance = "override";
    } else if (config.closed_end_N && std::holds_alternative<SimulationSource>(config.cv_source)) {
        cv = closed_end_critical_value(config.gamma, config.alpha,
                                       static_cast<double>(*config.closed_end_N) / static_cast<double>(config.M),
                                       std::get<SimulationSource>(config.cv_source));
    } else {
        cv = critical_value(config.gamma, config.alpha, config.cv_source);
        if (config.closed_end_N) {
            report.warnings.push_back("open-ended critical value used for closed-end monitoring (conservative)");
        }
    }
    if (cv.bias_warning) report.warnings.push_back("simulated critical value near gamma = 0.5 is biased low by the grid");

    MonitorConfig mc;
    mc.boundary = BoundaryParams{cv.value, config.gamma, config.corrected, std::nullopt};
    mc.M = config.M;
    if (config.closed_end_N) {
        mc.horizon = ClosedEnd{*config.closed_end_N};
    } else {
        mc.horizon = OpenEnded{config.max_steps};
    }

    const Eigen::MatrixXd x_mon = data.exog.bottomRows(n - last);
    const std::span<const double> y_mon(data.y.data() + last, static_cast<std::size_t>(n - last));
    const StoppingResult result = run_stream(model, mc, data.y[static_cast<std::size_t>(last - 1)], x_mon, y_mon, true);

    report.censored = result.censored();
    report.steps_monitored = static_cast<long>(result.trajectory->size());
    report.censor_value = result.censored() ? result.value : 0;
    if (result.stopped) {
        report.tau = result.value;
        report.date = data.dates.at(static_cast<std::size_t>(last + result.value - 1));
    }
    report.gamma = config.gamma;
    report.alpha = config.alpha;
    report.c = cv.value;
    report.c_source = cv.provenance;
    report.M = config.M;
    report.sigma_hat = model.sigma_hat();
    report.beta_hat.assign(model.beta_hat().data(), model.beta_hat().data() + model.beta_hat().size());

    if (options.write_trajectory) {
        std::filesystem::create_directories(config.output_dir);
        const auto path = std::filesystem::path(config.output_dir) / config.trajectory_file;
        std::ofstream out(path);
        if (!out) throw DataError("cannot write trajectory file '" + path.string() + "'");
        out << trajectory_to_csv(*result.trajectory);
        report.trajectory_path = path.string();
    }
    if (options.timestamp) report.timestamp = utc_timestamp();
    return report;
}

std::string MonitorReport::to_json() const {
    Json j;
    j["tau"] = tau ? Json(*tau) : Json(nullptr);
    j["censored"] = censored;
    j["date"] = date ? Json(*date) : Json(nullptr);
    j["gamma"] = gamma;
    j["alpha"] = alpha;
    j["c"] = c;
    j["c_source"] = c_source;
    j["M"] = M;
    j["sigma_hat"] = sigma_hat;
    j["trajectory_path"] = trajectory_path.empty() ? Json(nullptr) : Json(trajectory_path);
    Json manifest;
    manifest["version"] = kVersion;
    manifest["steps_monitored"] = steps_monitored;
    manifest["censor_value"] = censor_value;
    manifest["training_rows"] = {training_first_row, training_last_row};
    manifest["beta_hat"] = beta_hat;
    manifest["warnings"] = warnings;
    manifest["config"] = Json::parse(config_json);
    manifest["timestamp"] = timestamp ? Json(*timestamp) : Json(nullptr);
    j["manifest"] = std::move(manifest);
    return j.dump(2);
}

std::string MonitorReport::to_text() const {
    std::ostringstream os;
    os << std::setprecision(6);
    if (tau) {
        os << "change detected: tau = " << *tau;
        if (date) os << " (" << *date << ")";
        os << '\n';
    } else {
        os << "no change detected; censored after " << steps_monitored << " monitored observations\n";
    }
    os << "training rows " << training_first_row << ".." << training_last_row << " (M = " << M
       << "), sigma_hat = " << sigma_hat << '\n';
    os << "gamma = " << gamma << ", alpha = " << alpha << ", c = " << c << " [" << c_source << "]\n";
    if (!trajectory_path.empty()) os << "trajectory: " << trajectory_path << '\n';
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    return os.str();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const toml::parse_error*>(&e)) return 2;
    return 3;
}

}  // namespace seqmon
