#pragma once

#include <filesystem>

#include "fdtd.hpp"
#include "io.hpp"

namespace lamb {

inline constexpr int config_schema_version = 1;

struct AppendixConfig {
    std::vector<double> ts;           // uniform, starting at 0
    std::vector<double> ks = {0.5, 1.0, 2.0};
    ICSign sign = ICSign::Verbatim;
    int inversion_nodes = 64;
    double surface_y = 0.005;         // route (c): 2 f(y) - f(2y)
};

struct RunConfig {
    json doc;                          // effective document after overrides
    std::vector<std::string> overrides;
    ProblemSpec problem;
    std::vector<double> xs, ys, ts;
    SolverOptions quad;
    FdtdConfig oracle;
    bool oracle_present = false;
    double compare_threshold = 0.05;
    bool compare_refine = false;       // also rerun at eps_x / 2
    AppendixConfig appendix;
    std::string output = "out";
};

namespace detail {

// line of the innermost key along `path`, searching forward from each parent
inline int line_of(const std::string& text, const std::vector<std::string>& path) {
    size_t pos = 0;
    bool found = false;
    for (auto& key : path) {
        size_t p = text.find("\"" + key + "\"", pos);
        if (p == std::string::npos) break;
        pos = p;
        found = true;
    }
    if (!found || text.empty()) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

struct Reader {
    const std::string& text;

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
        std::string dotted;
        for (auto& k : path) dotted += (dotted.empty() ? "" : ".") + k;
        int ln = line_of(text, path);
        throw ConfigError((ln > 0 ? "line " + std::to_string(ln) + ": " : std::string()) + dotted + ": " + msg);
    }

    void keys(const json& j, const std::vector<std::string>& path, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) fail(path, "expected an object");
        for (auto& [k, v] : j.items()) {
            bool ok = false;
            for (auto a : allowed)
                if (k == a) ok = true;
            if (!ok) {
                auto p = path;
                p.push_back(k);
                fail(p, "unknown key");
            }
        }
    }

    double number(const json& j, std::vector<std::string> path, const char* key, double def) const {
        if (!j.contains(key)) return def;
        path.push_back(key);
        if (!j[key].is_number()) fail(path, "expected a number");
        double x = j[key].get<double>();
        if (!std::isfinite(x)) fail(path, "not finite");
        return x;
    }

    double positive(const json& j, const std::vector<std::string>& path, const char* key, double def) const {
        double x = number(j, path, key, def);
        if (!(x > 0)) {
            auto p = path;
            p.push_back(key);
            fail(p, "must be > 0");
        }
        return x;
    }

    double nonneg(const json& j, const std::vector<std::string>& path, const char* key, double def) const {
        double x = number(j, path, key, def);
        if (x < 0) {
            auto p = path;
            p.push_back(key);
            fail(p, "must be >= 0");
        }
        return x;
    }

    std::string string(const json& j, std::vector<std::string> path, const char* key, const std::string& def) const {
        if (!j.contains(key)) return def;
        path.push_back(key);
        if (!j[key].is_string()) fail(path, "expected a string");
        return j[key].get<std::string>();
    }

    bool boolean(const json& j, std::vector<std::string> path, const char* key, bool def) const {
        if (!j.contains(key)) return def;
        path.push_back(key);
        if (!j[key].is_boolean()) fail(path, "expected true/false");
        return j[key].get<bool>();
    }

    // [a, b, ...] or {"from", "to", "step"} or {"from", "to", "count"}
    std::vector<double> nodes(const json& j, const std::vector<std::string>& path) const {
        std::vector<double> r;
        if (j.is_array()) {
            for (auto& v : j) {
                if (!v.is_number()) fail(path, "node lists hold numbers");
                r.push_back(v.get<double>());
            }
            return r;
        }
        keys(j, path, {"from", "to", "step", "count"});
        double a = number(j, path, "from", 0.0), b = number(j, path, "to", 0.0);
        if (!j.contains("from") || !j.contains("to")) fail(path, "range needs 'from' and 'to'");
        if (b < a) fail(path, "'to' < 'from'");
        if (j.contains("step") == j.contains("count")) fail(path, "range needs exactly one of 'step' or 'count'");
        long n;
        if (j.contains("step")) {
            double s = positive(j, path, "step", 1.0);
            n = std::lround(std::floor((b - a) / s + 1e-9)) + 1;
            for (long i = 0; i < n; ++i) r.push_back(a + i * s);
        } else {
            double c = number(j, path, "count", 0);
            if (c < 1 || c != std::floor(c)) fail(path, "'count' must be a positive integer");
            n = static_cast<long>(c);
            for (long i = 0; i < n; ++i) r.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        }
        return r;
    }
};

inline int bump_field(const std::string& s) {
    if (s == "u0") return 0;
    if (s == "u1") return 1;
    if (s == "v0") return 2;
    if (s == "v1") return 3;
    return -1;
}

inline std::string resolve(const std::string& base, const std::string& p) {
    std::filesystem::path q(p);
    if (q.is_absolute() || base.empty()) return p;
    return (std::filesystem::path(base) / q).string();
}

inline TimeProfile read_profile(const Reader& R, const json& j, const std::vector<std::string>& path) {
    R.keys(j, path, {"kind", "tau", "dt", "values"});
    std::string k = R.string(j, path, "kind", "heaviside");
    if (k == "heaviside") return TimeProfile::heaviside();
    if (k == "smoothed") {
        if (!j.contains("tau")) R.fail(path, "smoothed profile needs 'tau'");
        return TimeProfile::smoothed(R.positive(j, path, "tau", 0.0));
    }
    if (k == "sampled") {
        double dt = R.positive(j, path, "dt", 0.0);
        auto vp = path;
        vp.push_back("values");
        if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) R.fail(vp, "expected a non-empty array");
        std::vector<cplx> v;
        for (auto& x : j["values"]) {
            if (!x.is_number()) R.fail(vp, "expected numbers");
            v.push_back(x.get<double>());
        }
        return TimeProfile::sampled(dt, v);
    }
    auto p = path;
    p.push_back("kind");
    R.fail(p, "unknown profile kind '" + k + "' (heaviside, smoothed, sampled)");
}

inline BoundaryForcing read_forcing(const Reader& R, const json& j, const std::vector<std::string>& path,
                                    const std::string& base) {
    R.keys(j, path, {"kind", "sigma0", "mollifier", "profile", "speed", "file"});
    std::string k = R.string(j, path, "kind", "none");
    double s0 = R.number(j, path, "sigma0", 1.0), eps = R.nonneg(j, path, "mollifier", 0.0);
    auto pp = path;
    pp.push_back("profile");
    if (k == "none") return BoundaryForcing::none();
    if (k == "normal" || k == "tangential") {
        TimeProfile pr = j.contains("profile") ? read_profile(R, j["profile"], pp) : TimeProfile::heaviside();
        return k == "normal" ? BoundaryForcing::normal(s0, pr, eps) : BoundaryForcing::tangential(s0, pr, eps);
    }
    if (k == "moving") {
        if (j.contains("profile")) R.fail(pp, "a moving load has no time profile");
        return BoundaryForcing::moving(s0, R.nonneg(j, path, "speed", 0.0), eps);
    }
    if (k == "sampled") {
        std::string f = R.string(j, path, "file", "");
        if (f.empty()) R.fail(path, "sampled forcing needs 'file' (CSV x,t,g1,g2)");
        return read_sampled_forcing(resolve(base, f));
    }
    auto p = path;
    p.push_back("kind");
    R.fail(p, "unknown forcing kind '" + k + "' (none, normal, tangential, moving, sampled)");
}

inline InitialData read_initial(const Reader& R, const json& j, const std::vector<std::string>& path, const std::string& base) {
    R.keys(j, path, {"kind", "bumps", "file"});
    std::string k = R.string(j, path, "kind", "zero");
    InitialData d;
    if (k == "zero") return d;
    if (k == "gaussian") {
        d.kind = InitialData::Gaussian;
        auto bp = path;
        bp.push_back("bumps");
        if (!j.contains("bumps") || !j["bumps"].is_array()) R.fail(bp, "expected an array of bumps");
        for (auto& b : j["bumps"]) {
            R.keys(b, bp, {"field", "amplitude", "x0", "y0", "width"});
            GaussianBump g;
            g.field = bump_field(R.string(b, bp, "field", ""));
            if (g.field < 0) R.fail(bp, "bump 'field' must be one of u0, u1, v0, v1");
            g.amplitude = R.number(b, bp, "amplitude", 1.0);
            g.x0 = R.number(b, bp, "x0", 0.0);
            g.y0 = R.number(b, bp, "y0", 0.0);
            g.width = R.positive(b, bp, "width", 0.1);
            d.bumps.push_back(g);
        }
        return d;
    }
    if (k == "sampled") {
        std::string f = R.string(j, path, "file", "");
        if (f.empty()) R.fail(path, "sampled initial data needs 'file' (CSV x,y,u0,u1,v0,v1)");
        return read_sampled_initial(resolve(base, f));
    }
    auto p = path;
    p.push_back("kind");
    R.fail(p, "unknown initial kind '" + k + "' (zero, gaussian, sampled)");
}

// "a.b.c=value"; value parsed as JSON, otherwise taken as a string
inline void apply_override(json& doc, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "': expected key=value");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    json v;
    try {
        v = json::parse(val);
    } catch (const json::parse_error&) {
        v = val;
    }
    json* cur = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        if (parts[i].empty()) throw ConfigError("override '" + kv + "': empty key segment");
        if (!cur->contains(parts[i])) (*cur)[parts[i]] = json::object();
        cur = &(*cur)[parts[i]];
        if (!cur->is_object()) throw ConfigError("override '" + kv + "': '" + parts[i] + "' is not an object");
    }
    (*cur)[parts.back()] = v;
}

} // namespace detail

// text: the JSON document; base: directory for relative data files
inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                              const std::string& base = "") {
    RunConfig c;
    try {
        c.doc = text.empty() ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "line L, column C" in what()
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (auto& o : overrides) detail::apply_override(c.doc, o);
    c.overrides = overrides;
    const json& d = c.doc;
    detail::Reader R{text};
    R.keys(d, {}, {"schema_version", "material", "problem", "eval", "quad", "oracle", "appendix", "normalization", "output"});
    if (d.contains("schema_version") && (!d["schema_version"].is_number_integer() || d["schema_version"] != config_schema_version))
        R.fail({"schema_version"}, "unsupported (this build reads version " + std::to_string(config_schema_version) + ")");

    if (d.contains("material")) {
        R.keys(d["material"], {"material"}, {"lambda", "mu"});
        c.problem.material.lambda = R.number(d["material"], {"material"}, "lambda", 2.0);
        c.problem.material.mu = R.number(d["material"], {"material"}, "mu", 1.0);
    }
    if (!(c.problem.material.mu > 0)) R.fail({"material", "mu"}, "must be > 0");
    try {
        c.problem.material.validate();
    } catch (const DomainError& e) {
        R.fail({"material", "lambda"}, std::string(e.what()).substr(10));  // drop "material: "
    }

    if (d.contains("problem")) {
        const json& p = d["problem"];
        R.keys(p, {"problem"}, {"initial", "forcing"});
        try {
            if (p.contains("initial")) c.problem.initial = detail::read_initial(R, p["initial"], {"problem", "initial"}, base);
            if (p.contains("forcing")) c.problem.forcing = detail::read_forcing(R, p["forcing"], {"problem", "forcing"}, base);
        } catch (const DomainError& e) {
            R.fail({"problem"}, e.what());
        }
    }

    std::string nrm = R.string(d, {}, "normalization", "fourier-consistent");
    if (nrm == "fourier-consistent")
        c.problem.normalization = Normalization::FourierConsistent;
    else if (nrm == "paper-final-verbatim")
        c.problem.normalization = Normalization::PaperFinalVerbatim;
    else
        R.fail({"normalization"}, "expected 'fourier-consistent' or 'paper-final-verbatim'");

    if (d.contains("eval")) {
        R.keys(d["eval"], {"eval"}, {"x", "y", "t"});
        if (d["eval"].contains("x")) c.xs = R.nodes(d["eval"]["x"], {"eval", "x"});
        if (d["eval"].contains("y")) c.ys = R.nodes(d["eval"]["y"], {"eval", "y"});
        if (d["eval"].contains("t")) c.ts = R.nodes(d["eval"]["t"], {"eval", "t"});
        for (double y : c.ys)
            if (!(y > 0)) R.fail({"eval", "y"}, "field nodes need y > 0 (the surface value is a one-sided limit)");
        for (double t : c.ts)
            if (t < 0) R.fail({"eval", "t"}, "t must be >= 0");
    }

    if (d.contains("quad")) {
        const json& q = d["quad"];
        R.keys(q, {"quad"}, {"tol", "L_l", "L_k", "clearance"});
        c.quad.tol = R.positive(q, {"quad"}, "tol", c.quad.tol);
        c.quad.L_l = R.nonneg(q, {"quad"}, "L_l", c.quad.L_l);
        c.quad.L_k = R.nonneg(q, {"quad"}, "L_k", c.quad.L_k);
        c.quad.clearance = R.positive(q, {"quad"}, "clearance", c.quad.clearance);
        if (c.quad.tol >= 1) R.fail({"quad", "tol"}, "must be < 1");
    }

    if (d.contains("oracle")) {
        const json& o = d["oracle"];
        c.oracle_present = true;
        R.keys(o, {"oracle"}, {"h", "dt", "X", "Y", "layer", "sigma_max", "threshold", "refine"});
        c.oracle.h = R.positive(o, {"oracle"}, "h", c.oracle.h);
        c.oracle.dt = R.nonneg(o, {"oracle"}, "dt", 0.0);
        c.oracle.X = R.positive(o, {"oracle"}, "X", c.oracle.X);
        c.oracle.Y = R.positive(o, {"oracle"}, "Y", c.oracle.Y);
        c.oracle.layer = R.positive(o, {"oracle"}, "layer", c.oracle.layer);
        c.oracle.sigma_max = R.nonneg(o, {"oracle"}, "sigma_max", 0.0);
        c.compare_threshold = R.positive(o, {"oracle"}, "threshold", c.compare_threshold);
        c.compare_refine = R.boolean(o, {"oracle"}, "refine", false);
        if (c.oracle.dt > 0.5 * c.oracle.h / c.problem.material.cp() * (1 + 1e-12))
            R.fail({"oracle", "dt"}, "CFL: dt must be <= 0.5 h / cp");
    }

    if (d.contains("appendix")) {
        const json& a = d["appendix"];
        R.keys(a, {"appendix"}, {"t_grid", "k_list", "sign", "inversion_nodes", "surface_y"});
        if (a.contains("t_grid")) c.appendix.ts = R.nodes(a["t_grid"], {"appendix", "t_grid"});
        if (a.contains("k_list")) c.appendix.ks = R.nodes(a["k_list"], {"appendix", "k_list"});
        std::string s = R.string(a, {"appendix"}, "sign", "verbatim");
        if (s == "verbatim")
            c.appendix.sign = ICSign::Verbatim;
        else if (s == "derived")
            c.appendix.sign = ICSign::Derived;
        else
            R.fail({"appendix", "sign"}, "expected 'verbatim' or 'derived'");
        double n = R.positive(a, {"appendix"}, "inversion_nodes", 64);
        if (n != std::floor(n) || n < 8) R.fail({"appendix", "inversion_nodes"}, "integer >= 8");
        c.appendix.inversion_nodes = static_cast<int>(n);
        c.appendix.surface_y = R.positive(a, {"appendix"}, "surface_y", c.appendix.surface_y);
        for (double k : c.appendix.ks)
            if (k == 0) R.fail({"appendix", "k_list"}, "k = 0 is excluded");
    }
    if (c.appendix.ts.empty())
        for (int n = 0; n <= 200; ++n) c.appendix.ts.push_back(0.01 * n);
    if (c.appendix.ts.size() < 2 || std::abs(c.appendix.ts[0]) > 1e-12)
        R.fail({"appendix", "t_grid"}, "needs >= 2 uniform times starting at 0");
    for (size_t i = 2; i < c.appendix.ts.size(); ++i)
        if (std::abs((c.appendix.ts[i] - c.appendix.ts[i - 1]) - (c.appendix.ts[1] - c.appendix.ts[0])) > 1e-9)
            R.fail({"appendix", "t_grid"}, "must be uniform");

    c.output = R.string(d, {}, "output", c.output);
    return c;
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), overrides, std::filesystem::path(path).parent_path().string());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace lamb
