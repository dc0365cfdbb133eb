#include "cylwiener/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cylwiener/errors.hpp"

namespace cylwiener {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& path, const std::string& why) {
    throw ConfigError("config field '" + path + "': " + why);
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) bad_field(path + key, "missing");
    return j.at(key);
}

double get_number(const json& j, const std::string& path) {
    if (j.is_string()) {
        // Allow "inf" for sup-norm spaces.
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "infinity")
            return std::numeric_limits<double>::infinity();
        bad_field(path, "expected a number, got string \"" + s + "\"");
    }
    if (!j.is_number()) bad_field(path, "expected a number");
    return j.get<double>();
}

long get_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad_field(path, "expected an integer");
    return j.get<long>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad_field(path, "expected a string");
    return j.get<std::string>();
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad_field(path, "expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array() || j[0].empty())
        bad_field(path, "expected rows to be non-empty arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            bad_field(path, "ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = get_number(row[static_cast<std::size_t>(c)],
                                 path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

SpaceSpec parse_space(const json& j, const std::string& path) {
    if (!j.is_object()) bad_field(path, "expected an object");
    SpaceSpec s;
    s.dim = static_cast<int>(get_integer(need(j, path + ".", "dim"), path + ".dim"));
    s.p = j.contains("p") ? get_number(j.at("p"), path + ".p") : 2.0;
    std::string kind = j.contains("kind") ? get_string(j.at("kind"), path + ".kind") : "finite";
    if (kind == "finite")
        s.kind = SpaceSpec::Kind::Finite;
    else if (kind == "truncated")
        s.kind = SpaceSpec::Kind::TruncatedSequence;
    else
        bad_field(path + ".kind", "expected \"finite\" or \"truncated\"");
    s.validate();
    return s;
}

}  // namespace

bool OutputSpec::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root: expected a JSON object");

    static const std::set<std::string> known{
        "space",     "target_space", "covariance", "grid",
        "paths",     "seed",         "functionals", "integrand",
        "checks",    "expect",       "p_moment",   "levels",
        "fixture",   "drift",        "output",     "tolerance_multiplier",
        "significance", "eig_tol",   "serial"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key())) bad_field(it.key(), "unknown field");

    ExperimentConfig c;
    c.raw = doc;
    c.space = parse_space(need(doc, "", "space"), "space");
    if (doc.contains("target_space"))
        c.target_space = parse_space(doc.at("target_space"), "target_space");

    const json& cov = need(doc, "", "covariance");
    if (!cov.is_object()) bad_field("covariance", "expected an object");
    const std::string type = get_string(need(cov, "covariance.", "type"), "covariance.type");
    if (type == "dense") {
        c.cov_is_spectral = false;
        c.cov_matrix = get_matrix(need(cov, "covariance.", "matrix"), "covariance.matrix");
        if (c.cov_matrix.rows() != c.space.dim)
            bad_field("covariance.matrix",
                      "shape does not match space.dim = " + std::to_string(c.space.dim));
    } else if (type == "spectral") {
        c.cov_is_spectral = true;
        const std::string formula =
            get_string(need(cov, "covariance.", "formula"), "covariance.formula");
        try {
            if (formula == "power") {
                const double alpha =
                    get_number(need(cov, "covariance.", "alpha"), "covariance.alpha");
                const int trunc = cov.contains("truncation")
                                      ? static_cast<int>(get_integer(cov.at("truncation"),
                                                                     "covariance.truncation"))
                                      : c.space.dim;
                c.cov_family = SpectralFamily::power(alpha, trunc);
            } else if (formula == "geometric") {
                const double rho = get_number(need(cov, "covariance.", "rho"), "covariance.rho");
                const int trunc = cov.contains("truncation")
                                      ? static_cast<int>(get_integer(cov.at("truncation"),
                                                                     "covariance.truncation"))
                                      : c.space.dim;
                c.cov_family = SpectralFamily::geometric(rho, trunc);
            } else if (formula == "explicit") {
                const json& vals = need(cov, "covariance.", "values");
                if (!vals.is_array() || vals.empty())
                    bad_field("covariance.values", "expected a non-empty array");
                std::vector<double> lam;
                for (std::size_t i = 0; i < vals.size(); ++i)
                    lam.push_back(get_number(vals[i],
                                             "covariance.values[" + std::to_string(i) + "]"));
                c.cov_family = SpectralFamily::explicit_list(std::move(lam));
            } else {
                bad_field("covariance.formula",
                          "expected \"power\", \"geometric\" or \"explicit\"");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config field 'covariance': ") + e.what());
        }
        if (c.cov_family->truncation() > c.space.dim)
            bad_field("covariance.truncation",
                      "exceeds space.dim = " + std::to_string(c.space.dim));
    } else {
        bad_field("covariance.type", "expected \"dense\" or \"spectral\"");
    }

    if (doc.contains("grid")) {
        const json& g = doc.at("grid");
        if (!g.is_object()) bad_field("grid", "expected an object");
        c.grid.horizon = get_number(need(g, "grid.", "horizon"), "grid.horizon");
        c.grid.steps = static_cast<int>(get_integer(need(g, "grid.", "steps"), "grid.steps"));
        c.grid.validate();
    }
    if (doc.contains("paths")) {
        c.paths = get_integer(doc.at("paths"), "paths");
        if (c.paths < 1) bad_field("paths", "must be >= 1");
    }
    if (doc.contains("seed")) {
        const long s = get_integer(doc.at("seed"), "seed");
        if (s < 0) bad_field("seed", "must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }

    if (doc.contains("functionals")) {
        const json& fj = doc.at("functionals");
        if (!fj.is_array()) bad_field("functionals", "expected an array of coefficient vectors");
        for (std::size_t i = 0; i < fj.size(); ++i) {
            const json& v = fj[i];
            const std::string p = "functionals[" + std::to_string(i) + "]";
            if (!v.is_array() || v.empty()) bad_field(p, "expected a non-empty number array");
            Eigen::VectorXd coeffs(static_cast<Eigen::Index>(v.size()));
            for (std::size_t k = 0; k < v.size(); ++k)
                coeffs(static_cast<Eigen::Index>(k)) =
                    get_number(v[k], p + "[" + std::to_string(k) + "]");
            c.functionals.push_back(Functional{std::move(coeffs)});
        }
    }

    if (doc.contains("integrand")) {
        const json& ij = doc.at("integrand");
        if (!ij.is_object()) bad_field("integrand", "expected an object");
        const json& pj = need(ij, "integrand.", "pieces");
        if (!pj.is_array() || pj.empty())
            bad_field("integrand.pieces", "expected a non-empty array");
        std::vector<IntegrandPiece> pieces;
        for (std::size_t i = 0; i < pj.size(); ++i) {
            const std::string p = "integrand.pieces[" + std::to_string(i) + "]";
            const json& one = pj[i];
            if (!one.is_object()) bad_field(p, "expected an object");
            IntegrandPiece piece;
            piece.t_start = get_number(need(one, p + ".", "t_start"), p + ".t_start");
            piece.t_end = get_number(need(one, p + ".", "t_end"), p + ".t_end");
            piece.matrix = get_matrix(need(one, p + ".", "matrix"), p + ".matrix");
            pieces.push_back(std::move(piece));
        }
        try {
            c.integrand.emplace(std::move(pieces));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config field 'integrand': ") + e.what());
        }
    }

    if (doc.contains("checks")) {
        const json& ch = doc.at("checks");
        if (!ch.is_array()) bad_field("checks", "expected an array of names");
        for (std::size_t i = 0; i < ch.size(); ++i)
            c.checks.push_back(get_string(ch[i], "checks[" + std::to_string(i) + "]"));
    }
    if (doc.contains("expect")) {
        c.expect = get_string(doc.at("expect"), "expect");
        if (c.expect != "radonifying" && c.expect != "not-radonifying")
            bad_field("expect", "expected \"radonifying\" or \"not-radonifying\"");
    }
    if (doc.contains("p_moment")) {
        c.p_moment = get_number(doc.at("p_moment"), "p_moment");
        if (!(c.p_moment >= 1.0 && c.p_moment <= 4.0))
            bad_field("p_moment", "must lie in [1, 4]");
    }
    if (doc.contains("levels")) {
        const json& lv = doc.at("levels");
        if (!lv.is_array()) bad_field("levels", "expected an array of integers");
        for (std::size_t i = 0; i < lv.size(); ++i)
            c.levels.push_back(get_integer(lv[i], "levels[" + std::to_string(i) + "]"));
    }
    if (doc.contains("fixture")) {
        c.fixture = get_string(doc.at("fixture"), "fixture");
        if (c.fixture != "none" && c.fixture != "increment-drift")
            bad_field("fixture", "expected \"none\" or \"increment-drift\"");
    }
    if (doc.contains("drift")) c.drift = get_number(doc.at("drift"), "drift");

    if (doc.contains("output")) {
        const json& oj = doc.at("output");
        if (!oj.is_object()) bad_field("output", "expected an object");
        if (oj.contains("directory"))
            c.output.directory = get_string(oj.at("directory"), "output.directory");
        if (oj.contains("formats")) {
            const json& fj = oj.at("formats");
            if (!fj.is_array()) bad_field("output.formats", "expected an array");
            c.output.formats.clear();
            for (std::size_t i = 0; i < fj.size(); ++i) {
                const std::string f =
                    get_string(fj[i], "output.formats[" + std::to_string(i) + "]");
                if (f != "json" && f != "csv" && f != "bin")
                    bad_field("output.formats[" + std::to_string(i) + "]",
                              "expected \"json\", \"csv\" or \"bin\"");
                c.output.formats.push_back(f);
            }
        }
    }
    if (doc.contains("tolerance_multiplier")) {
        c.tolerance_multiplier =
            get_number(doc.at("tolerance_multiplier"), "tolerance_multiplier");
        if (!(c.tolerance_multiplier > 0.0)) bad_field("tolerance_multiplier", "must be > 0");
    }
    if (doc.contains("significance")) {
        c.significance = get_number(doc.at("significance"), "significance");
        if (!(c.significance > 0.0 && c.significance < 1.0))
            bad_field("significance", "must lie in (0, 1)");
    }
    if (doc.contains("eig_tol")) {
        c.eig_tol = get_number(doc.at("eig_tol"), "eig_tol");
        if (!(c.eig_tol >= 0.0 && c.eig_tol < 1.0)) bad_field("eig_tol", "must lie in [0, 1)");
    }
    if (doc.contains("serial")) {
        if (!doc.at("serial").is_boolean()) bad_field("serial", "expected a boolean");
        c.serial = doc.at("serial").get<bool>();
    }

    for (std::size_t i = 0; i < c.functionals.size(); ++i) {
        // Dimension checks against the command-specific space happen in the
        // runner; here only basic sanity.
        if (c.functionals[i].coeffs.size() < 1)
            bad_field("functionals[" + std::to_string(i) + "]", "empty vector");
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return from_json(doc);
}

void ExperimentConfig::override_seed(std::uint64_t s) {
    seed = s;
    raw["seed"] = s;
}

void ExperimentConfig::override_paths(long n) {
    if (n < 1) throw ConfigError("--paths must be >= 1");
    paths = n;
    raw["paths"] = n;
}

void ExperimentConfig::override_out_dir(const std::string& dir) {
    output.directory = dir;
    if (!raw.contains("output") || !raw["output"].is_object())
        raw["output"] = nlohmann::json::object();
    raw["output"]["directory"] = dir;
}

void ExperimentConfig::override_serial() {
    serial = true;
    raw["serial"] = true;
}

CovOperator ExperimentConfig::cov_operator() const {
    try {
        if (cov_is_spectral) {
            // Realize the family on the full space, zero beyond truncation.
            Eigen::VectorXd d = Eigen::VectorXd::Zero(space.dim);
            for (int k = 0; k < cov_family->truncation(); ++k) d(k) = cov_family->lambda(k + 1);
            return CovOperator::diagonal(std::move(d));
        }
        return CovOperator::dense(cov_matrix);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config field 'covariance': ") + e.what());
    }
}

MCConfig ExperimentConfig::mc() const {
    MCConfig m;
    m.n_samples = paths;
    m.seed = seed;
    m.tolerance_multiplier = tolerance_multiplier;
    m.significance = significance;
    return m;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(raw.dump()); }

CheckContext ExperimentConfig::context(const std::string& anchor) const {
    return CheckContext{anchor, seed, hash()};
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace cylwiener
