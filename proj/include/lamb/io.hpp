#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "contour.hpp"
#include "laplace_path.hpp"
#include "solver.hpp"

namespace lamb {

using json = nlohmann::ordered_json;

namespace detail {

inline std::string num(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x == 0.0 ? 0.0 : x);  // no "-0"
    return b;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r' && ch != ' ' && ch != '\t') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// numeric table with a fixed header; errors carry file:line
inline std::vector<std::vector<double>> read_table(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::string line;
    int ln = 0;
    std::vector<std::vector<double>> rows;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line);
        if (!seen_header) {
            if (f != header) {
                std::string want;
                for (auto& h : header) want += (want.empty() ? "" : ",") + h;
                throw ConfigError(path + ":" + std::to_string(ln) + ": expected header '" + want + "'");
            }
            seen_header = true;
            continue;
        }
        if (f.size() != header.size())
            throw ConfigError(path + ":" + std::to_string(ln) + ": expected " + std::to_string(header.size()) + " columns");
        std::vector<double> r;
        for (auto& s : f) {
            char* end = nullptr;
            double x = std::strtod(s.c_str(), &end);
            if (s.empty() || *end != '\0' || !std::isfinite(x))
                throw ConfigError(path + ":" + std::to_string(ln) + ": bad number '" + s + "'");
            r.push_back(x);
        }
        rows.push_back(std::move(r));
    }
    if (!seen_header) throw ConfigError(path + ": empty file");
    return rows;
}

// sorted distinct values of a column; must form a uniform grid
inline std::vector<double> axis(const std::vector<std::vector<double>>& rows, int col, const std::string& what) {
    std::set<double> s;
    for (auto& r : rows) s.insert(r[col]);
    std::vector<double> a(s.begin(), s.end());
    if (a.size() >= 2) {
        double d = a[1] - a[0];
        for (size_t i = 1; i < a.size(); ++i)
            if (std::abs(a[i] - a[i - 1] - d) > 1e-9 * std::max(1.0, std::abs(d)) + 1e-12)
                throw ConfigError(what + ": column '" + std::to_string(col) + "' is not a uniform grid");
    }
    return a;
}

inline int index_on(const std::vector<double>& a, double x) {
    double d = a.size() > 1 ? a[1] - a[0] : 1.0;
    long i = std::lround((x - a[0]) / d);
    return static_cast<int>(i);
}

} // namespace detail

// ---------------------------------------------------------------------------
// field grids: x,y,t,u,v ; t slowest, x fastest

inline void write_field_csv(const std::string& path, const FieldGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path + ": cannot write");
    out << "x,y,t,u,v\n";
    for (size_t n = 0; n < g.nt(); ++n)
        for (size_t j = 0; j < g.ny(); ++j)
            for (size_t i = 0; i < g.nx(); ++i) {
                size_t q = g.idx(i, j, n);
                out << detail::num(g.xs[i]) << ',' << detail::num(g.ys[j]) << ',' << detail::num(g.ts[n]) << ','
                    << detail::num(g.u[q]) << ',' << detail::num(g.v[q]) << '\n';
            }
}

inline FieldGrid read_field_csv(const std::string& path) {
    auto rows = detail::read_table(path, {"x", "y", "t", "u", "v"});
    FieldGrid g;
    std::set<double> xs, ys, ts;
    for (auto& r : rows) {
        xs.insert(r[0]);
        ys.insert(r[1]);
        ts.insert(r[2]);
    }
    g.xs.assign(xs.begin(), xs.end());
    g.ys.assign(ys.begin(), ys.end());
    g.ts.assign(ts.begin(), ts.end());
    g.allocate();
    if (rows.size() != g.u.size()) throw ConfigError(path + ": not a full tensor grid");
    auto pos = [](const std::vector<double>& a, double x) { return size_t(std::lower_bound(a.begin(), a.end(), x) - a.begin()); };
    for (auto& r : rows) {
        size_t q = g.idx(pos(g.xs, r[0]), pos(g.ys, r[1]), pos(g.ts, r[2]));
        g.u[q] = r[3];
        g.v[q] = r[4];
    }
    return g;
}

// ---------------------------------------------------------------------------
// boundary traces: k,t,re_u,im_u,re_v,im_v

inline void write_trace_csv(const std::string& path, const std::vector<BoundaryTrace>& trs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path + ": cannot write");
    out << "k,t,re_u,im_u,re_v,im_v\n";
    for (auto& tr : trs)
        for (size_t n = 0; n < tr.ts.size(); ++n)
            out << detail::num(tr.k) << ',' << detail::num(tr.ts[n]) << ',' << detail::num(tr.u[n].real()) << ','
                << detail::num(tr.u[n].imag()) << ',' << detail::num(tr.v[n].real()) << ','
                << detail::num(tr.v[n].imag()) << '\n';
}

// ---------------------------------------------------------------------------
// sampled data

// x,t,g1,g2 on a uniform (x, t) tensor grid starting at t = 0
inline BoundaryForcing read_sampled_forcing(const std::string& path) {
    auto rows = detail::read_table(path, {"x", "t", "g1", "g2"});
    auto xs = detail::axis(rows, 0, path), ts = detail::axis(rows, 1, path);
    if (xs.size() < 2 || ts.size() < 2) throw ConfigError(path + ": need at least 2 x and 2 t values");
    if (std::abs(ts[0]) > 1e-12) throw ConfigError(path + ": time axis must start at t = 0");
    if (rows.size() != xs.size() * ts.size()) throw ConfigError(path + ": not a full (x, t) grid");
    BoundaryForcing f;
    f.kind = BoundaryForcing::Sampled;
    f.x0 = xs[0];
    f.dx = xs[1] - xs[0];
    f.dt = ts[1] - ts[0];
    f.nx = static_cast<int>(xs.size());
    f.nt = static_cast<int>(ts.size());
    f.g1.assign(xs.size() * ts.size(), 0.0);
    f.g2.assign(f.g1.size(), 0.0);
    for (auto& r : rows) {
        size_t q = size_t(detail::index_on(ts, r[1])) * f.nx + detail::index_on(xs, r[0]);
        f.g1[q] = r[2];
        f.g2[q] = r[3];
    }
    return f;
}

// x,y,u0,u1,v0,v1 on a uniform (x, y) tensor grid
inline InitialData read_sampled_initial(const std::string& path) {
    auto rows = detail::read_table(path, {"x", "y", "u0", "u1", "v0", "v1"});
    auto xs = detail::axis(rows, 0, path), ys = detail::axis(rows, 1, path);
    if (xs.size() < 2 || ys.size() < 2) throw ConfigError(path + ": need at least 2 x and 2 y values");
    if (ys[0] < 0) throw ConfigError(path + ": initial data must live in y >= 0");
    if (rows.size() != xs.size() * ys.size()) throw ConfigError(path + ": not a full (x, y) grid");
    InitialData d;
    d.kind = InitialData::Sampled;
    d.x0 = xs[0];
    d.dx = xs[1] - xs[0];
    d.y0 = ys[0];
    d.dy = ys[1] - ys[0];
    d.nx = static_cast<int>(xs.size());
    d.ny = static_cast<int>(ys.size());
    for (auto& f : d.fields) f.assign(xs.size() * ys.size(), 0.0);
    for (auto& r : rows) {
        size_t q = size_t(detail::index_on(ys, r[1])) * d.nx + detail::index_on(xs, r[0]);
        for (int c = 0; c < 4; ++c) d.fields[c][q] = r[2 + c];
    }
    return d;
}

// ---------------------------------------------------------------------------
// metadata

inline json certificate_summary(const Material& m, const std::vector<double>& ks, const SolverOptions& o) {
    json out = json::array();
    for (double k : ks) {
        GammaOptions go;
        go.clearance = o.clearance;
        go.clearance_cap = o.clearance_cap;
        auto p = build_gamma_k(m, k, go);
        json c;
        c["k"] = k;
        c["clearance"] = p.clearance;
        c["segments"] = p.segments.size();
        json ex = json::array();
        for (auto& e : p.certificate)
            ex.push_back({{"kind", exclusion_name(e.kind)},
                          {"re", e.z.real()},
                          {"im", e.z.imag()},
                          {"must_clear", e.must_clear},
                          {"distance", e.distance}});
        c["exclusions"] = ex;
        out.push_back(c);
    }
    return out;
}

inline json grid_metadata(const FieldGrid& g) {
    json j;
    j["source"] = g.source;
    j["normalization"] = g.normalization;
    j["nodes"] = {{"nx", g.nx()}, {"ny", g.ny()}, {"nt", g.nt()}};
    if (g.source == "spectral") {
        j["tolerance"] = g.tol;
        j["truncation"] = {{"L_l", g.L_l}, {"L_k", g.L_k}};
        j["clearance"] = g.clearance;
        j["k_nodes"] = g.k_nodes;
        j["max_l_nodes"] = g.max_l_nodes;
        j["error_estimate"] = g.error_estimate;
        j["max_imag"] = {{"u", g.max_imag_u}, {"v", g.max_imag_v}};
    }
    j["tolerance_flagged"] = g.tolerance_flagged;
    return j;
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path + ": cannot write");
    out << j.dump(2) << '\n';
}

} // namespace lamb
