#pragma once

// Configuration files, result tables and run manifests.
//
// Configs are JSON with an explicit schema_version. Angle-valued entries
// (t12 sweeps live on pi-rational points) accept either numbers or symbolic
// strings like "pi/2", "2*pi/3", "0.4+pi". Unknown keys are rejected with
// their key path. Results are written as CSV (header row, '.' decimal,
// %.17g floats, so read(write(x)) == x) and/or JSON mirroring the same
// schema. Every output directory carries exactly one manifest.json with the
// resolved config, the seed policy and an FNV-1a digest per result file.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ladder/common.hpp"
#include "ladder/nonmarkov.hpp"
#include "ladder/trajectory.hpp"
#include "ladder/version.hpp"

namespace ladder {

using nlohmann::json;

// --- symbolic angle expressions ------------------------------------------------

namespace detail {

struct PiParser {
    const std::string& s;
    std::size_t pos = 0;

    explicit PiParser(const std::string& str) : s(str) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    double factor() {
        skip();
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) throw config_error("pi expression: missing ')' in '" + s + "'");
            return v;
        }
        if (eat('-')) return -factor();
        if (pos + 1 < s.size() + 1 && s.compare(pos, 2, "pi") == 0) {
            pos += 2;
            return kPi;
        }
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(s.substr(pos), &consumed);
        } catch (const std::exception&) {
            throw config_error("pi expression: cannot parse '" + s + "'");
        }
        pos += consumed;
        return v;
    }
    double term() {
        double v = factor();
        for (;;) {
            if (eat('*'))
                v *= factor();
            else if (eat('/'))
                v /= factor();
            else
                return v;
        }
    }
    double expr() {
        double v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
};

}  // namespace detail

inline double parse_pi_expression(const std::string& s) {
    detail::PiParser p(s);
    const double v = p.expr();
    p.skip();
    if (p.pos != s.size()) throw config_error("pi expression: trailing junk in '" + s + "'");
    return v;
}

inline double number_or_pi(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_pi_expression(v.get<std::string>());
    throw config_error("config key '" + key + "': expected number or pi expression");
}

// --- configuration ---------------------------------------------------------------

struct ScanSpec {
    std::vector<double> t12_values;
    std::vector<double> t2_values;
    ScanQuantity quantity = ScanQuantity::delta_S;
};

struct BlpSpec {
    int n_pairs = 100;
    int t_max = 100;
    ed::PairMode mode = ed::PairMode::orthogonal_pure;
};

struct D2Spec {
    int n_pairs = 50;
    int n_traj = 50;
    int t_max = 100;
};

struct FitSpec {
    std::string input;          // CSV produced by the engine
    std::string model = "entropy_ansatz";  // or negativity_ansatz / eta_powerlaw / residuals
    int l_min = 0;
    int l_max = 0;
    double eta_cut = 0.1;
};

struct Config {
    int schema_version = 1;
    LadderParams params;
    RunConfig run;
    std::vector<ObservableSpec> observables;
    std::optional<ScanSpec> scan;
    std::optional<BlpSpec> blp;
    std::optional<D2Spec> d2;
    std::optional<FitSpec> fit;
    json snapshot;  // resolved values, embedded in the manifest
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& path) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed)
            if (item.key() == key) ok = true;
        if (!ok) throw config_error("unknown config key '" + path + item.key() + "'");
    }
}

inline std::vector<double> parse_axis(const json& ax, const std::string& path) {
    if (ax.is_array()) {
        std::vector<double> values;
        for (const auto& v : ax) values.push_back(number_or_pi(v, path));
        if (values.empty()) throw config_error("config key '" + path + "': empty axis");
        return values;
    }
    if (!ax.is_object()) throw config_error("config key '" + path + "': expected array or object");
    reject_unknown_keys(ax, {"min", "max", "n"}, path + ".");
    if (!ax.contains("min") || !ax.contains("max") || !ax.contains("n"))
        throw config_error("config key '" + path + "': need min, max, n");
    const double lo = number_or_pi(ax.at("min"), path + ".min");
    const double hi = number_or_pi(ax.at("max"), path + ".max");
    const int n = ax.at("n").get<int>();
    if (n < 1) throw config_error("config key '" + path + ".n': must be positive");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        values[static_cast<std::size_t>(i)] =
            n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return values;
}

// Observable tokens: "S:8", "S:1-16", "E:8", "E:2-32:2", "I:4" (diametrically
// opposite arcs of length 4).
inline void parse_observable_token(const std::string& tok, int L,
                                   std::vector<ObservableSpec>& out) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0)
        throw config_error("observable token '" + tok + "': expected KIND:RANGE");
    const std::string kind = tok.substr(0, colon);
    const std::string range = tok.substr(colon + 1);
    int lo = 0, hi = 0, stride = 1;
    const auto dash = range.find('-');
    try {
        if (dash == std::string::npos) {
            lo = hi = std::stoi(range);
        } else {
            lo = std::stoi(range.substr(0, dash));
            std::string rest = range.substr(dash + 1);
            const auto colon2 = rest.find(':');
            if (colon2 != std::string::npos) {
                stride = std::stoi(rest.substr(colon2 + 1));
                rest = rest.substr(0, colon2);
            }
            hi = std::stoi(rest);
        }
    } catch (const std::exception&) {
        throw config_error("observable token '" + tok + "': bad range");
    }
    if (lo < 1 || hi < lo || stride < 1)
        throw config_error("observable token '" + tok + "': bad range");
    for (int len = lo; len <= hi; len += stride) {
        if (kind == "S") {
            out.push_back(ObservableSpec::entropy(len));
        } else if (kind == "E") {
            if (len >= L) throw config_error("observable token '" + tok + "': E needs len < L");
            out.push_back(ObservableSpec::negativity(len));
        } else if (kind == "I") {
            if (2 * len > L)
                throw config_error("observable token '" + tok + "': I needs 2*len <= L");
            out.push_back(ObservableSpec::mutual_opposite(len, L));
        } else {
            throw config_error("observable token '" + tok + "': kind must be S, E or I");
        }
    }
}

}  // namespace detail

inline Config parse_config_json(const json& root) {
    detail::reject_unknown_keys(root,
                                {"schema_version", "L", "t1", "t2", "t12", "tau_u", "p", "t_st",
                                 "m", "n_traj", "seed", "observables", "scan", "blp", "d2",
                                 "fit"},
                                "");
    Config cfg;
    if (root.contains("schema_version")) cfg.schema_version = root.at("schema_version").get<int>();
    if (cfg.schema_version != 1) throw config_error("unsupported schema_version");
    for (const char* key : {"L", "t2", "t12", "p"})
        if (!root.contains(key)) throw config_error(std::string("missing config key '") + key + "'");

    cfg.params.L = root.at("L").get<int>();
    cfg.params.t1 = root.contains("t1") ? number_or_pi(root.at("t1"), "t1") : 1.0;
    cfg.params.t2 = number_or_pi(root.at("t2"), "t2");
    cfg.params.t12 = number_or_pi(root.at("t12"), "t12");
    cfg.params.tau_u = root.contains("tau_u") ? number_or_pi(root.at("tau_u"), "tau_u") : 1.0;
    cfg.params.p = number_or_pi(root.at("p"), "p");
    try {
        cfg.params.validate();
    } catch (const parameter_error& e) {
        throw config_error(e.what());
    }

    if (root.contains("t_st")) cfg.run.t_st = root.at("t_st").get<int>();
    if (root.contains("m")) cfg.run.m = root.at("m").get<int>();
    if (root.contains("n_traj")) cfg.run.n_traj = root.at("n_traj").get<int>();
    if (root.contains("seed")) cfg.run.base_seed = root.at("seed").get<std::uint64_t>();
    try {
        cfg.run.validate();
    } catch (const parameter_error& e) {
        throw config_error(e.what());
    }

    if (root.contains("observables")) {
        for (const auto& tok : root.at("observables"))
            detail::parse_observable_token(tok.get<std::string>(), cfg.params.L,
                                           cfg.observables);
    }

    if (root.contains("scan")) {
        const json& s = root.at("scan");
        detail::reject_unknown_keys(s, {"t12", "t2", "quantity"}, "scan.");
        ScanSpec spec;
        if (!s.contains("t12") || !s.contains("t2"))
            throw config_error("scan: need t12 and t2 axes");
        spec.t12_values = detail::parse_axis(s.at("t12"), "scan.t12");
        spec.t2_values = detail::parse_axis(s.at("t2"), "scan.t2");
        if (s.contains("quantity")) {
            const std::string q = s.at("quantity").get<std::string>();
            if (q == "delta_S")
                spec.quantity = ScanQuantity::delta_S;
            else if (q == "delta_E")
                spec.quantity = ScanQuantity::delta_E;
            else
                throw config_error("scan.quantity: must be delta_S or delta_E");
        }
        cfg.scan = spec;
    }

    if (root.contains("blp")) {
        const json& b = root.at("blp");
        detail::reject_unknown_keys(b, {"n_pairs", "t_max", "mode"}, "blp.");
        BlpSpec spec;
        if (b.contains("n_pairs")) spec.n_pairs = b.at("n_pairs").get<int>();
        if (b.contains("t_max")) spec.t_max = b.at("t_max").get<int>();
        if (b.contains("mode")) {
            const std::string m = b.at("mode").get<std::string>();
            if (m == "orthogonal_pure")
                spec.mode = ed::PairMode::orthogonal_pure;
            else if (m == "random_pure_product")
                spec.mode = ed::PairMode::random_pure_product;
            else if (m == "random_mixed")
                spec.mode = ed::PairMode::random_mixed;
            else
                throw config_error("blp.mode: unknown mode '" + m + "'");
        }
        if (spec.n_pairs < 1 || spec.t_max < 1) throw config_error("blp: counts must be positive");
        cfg.blp = spec;
    }

    if (root.contains("d2")) {
        const json& d = root.at("d2");
        detail::reject_unknown_keys(d, {"n_pairs", "n_traj", "t_max"}, "d2.");
        D2Spec spec;
        if (d.contains("n_pairs")) spec.n_pairs = d.at("n_pairs").get<int>();
        if (d.contains("n_traj")) spec.n_traj = d.at("n_traj").get<int>();
        if (d.contains("t_max")) spec.t_max = d.at("t_max").get<int>();
        if (spec.n_pairs < 1 || spec.n_traj < 1 || spec.t_max < 1)
            throw config_error("d2: counts must be positive");
        cfg.d2 = spec;
    }

    if (root.contains("fit")) {
        const json& f = root.at("fit");
        detail::reject_unknown_keys(f, {"input", "model", "l_min", "l_max", "eta_cut"}, "fit.");
        FitSpec spec;
        if (f.contains("input")) spec.input = f.at("input").get<std::string>();
        if (f.contains("model")) spec.model = f.at("model").get<std::string>();
        if (f.contains("l_min")) spec.l_min = f.at("l_min").get<int>();
        if (f.contains("l_max")) spec.l_max = f.at("l_max").get<int>();
        if (f.contains("eta_cut")) spec.eta_cut = f.at("eta_cut").get<double>();
        cfg.fit = spec;
    }

    cfg.snapshot = root;
    cfg.snapshot["t12"] = cfg.params.t12;  // resolved numeric values
    cfg.snapshot["t2"] = cfg.params.t2;
    cfg.snapshot["t1"] = cfg.params.t1;
    cfg.snapshot["tau_u"] = cfg.params.tau_u;
    cfg.snapshot["p"] = cfg.params.p;
    return cfg;
}

inline Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw config_error("config parse error in '" + path + "': " + e.what());
    }
    return parse_config_json(root);
}

// --- result tables ----------------------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::initializer_list<double> values) {
        if (values.size() != columns.size()) throw parameter_error("Table: row width mismatch");
        rows.emplace_back(values);
    }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(const Table& table, const std::string& path) {
    if (table.rows.empty()) throw parameter_error("write_csv: empty table");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

inline void write_json_table(const Table& table, const std::string& path) {
    if (table.rows.empty()) throw parameter_error("write_json_table: empty table");
    json arr = json::array();
    for (const auto& row : table.rows) {
        json obj;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (std::isnan(row[c]))
                obj[table.columns[c]] = nullptr;
            else
                obj[table.columns[c]] = row[c];
        }
        arr.push_back(obj);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json_table: cannot open " + path);
    out << arr.dump(2) << "\n";
}

inline Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != table.columns.size())
            throw std::runtime_error("read_csv: ragged row in " + path);
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline int table_column(const Table& t, const std::string& name) {
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        if (t.columns[c] == name) return static_cast<int>(c);
    throw parameter_error("table has no column '" + name + "'");
}

// --- manifests ----------------------------------------------------------------------

inline std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("digest: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct RunManifest {
    std::string command;
    json config;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;  // paths relative to the manifest dir
    json extra;                        // figure anchors, scale notes, ...

    json to_json(const std::string& dir) const {
        json m;
        m["schema_version"] = 1;
        m["command"] = command;
        m["config"] = config;
        m["seed"] = seed;
        m["seed_policy"] = "splitmix64 tag-path derivation; trajectory stream = "
                           "(base_seed, stream_tag, trajectory_index)";
        m["code_version"] = kVersion;
        m["created_utc"] = []() {
            std::time_t t = std::time(nullptr);
            char buf[32];
            std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
            return std::string(buf);
        }();
        json digests;
        for (const auto& rel : outputs) digests[rel] = hex64(fnv1a64_file(dir + "/" + rel));
        m["outputs"] = digests;
        if (!extra.is_null()) m["notes"] = extra;
        return m;
    }
};

// Refuses to reuse a directory that already holds a manifest; checkpoints may
// exist (resume), results may not be overwritten in place.
inline void prepare_output_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    if (fs::exists(fs::path(dir) / "manifest.json"))
        throw std::runtime_error("output directory '" + dir +
                                 "' already holds a manifest; pick a fresh directory");
}

inline void write_manifest(const RunManifest& manifest, const std::string& dir) {
    std::ofstream out(dir + "/manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + dir);
    out << manifest.to_json(dir).dump(2) << "\n";
}

inline bool verify_manifest(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) return false;
    json m;
    in >> m;
    for (const auto& item : m.at("outputs").items()) {
        const std::string expect = item.value().get<std::string>();
        if (hex64(fnv1a64_file(dir + "/" + item.key())) != expect) return false;
    }
    return true;
}

}  // namespace ladder
