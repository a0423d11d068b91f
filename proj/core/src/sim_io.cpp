#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "macf/sim.hpp"

namespace macf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError("bad number for '" + key + "': " + v);
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("bad integer for '" + key + "': " + v);
    return out;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
void put(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("snapshot: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

constexpr char kMagic[5] = {'M', 'A', 'C', 'F', '1'};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        if (seen[key]++) throw ConfigError("duplicate key '" + key + "'");
        if (key == "epsilon") cfg.epsilon = parse_double(key, val);
        else if (key == "dt") cfg.dt = parse_double(key, val);
        else if (key == "t_end") cfg.t_end = parse_double(key, val);
        else if (key == "scheme") {
            if (val == "semi-implicit") cfg.scheme = Scheme::semi_implicit;
            else if (val == "explicit") cfg.scheme = Scheme::explicit_euler;
            else throw ConfigError("scheme must be semi-implicit or explicit");
        } else if (key == "n") cfg.n = parse_uint(key, val);
        else if (key == "m") cfg.m = static_cast<int>(parse_uint(key, val));
        else if (key == "grid") cfg.grid = parse_uint(key, val);
        else if (key == "length") cfg.length = parse_double(key, val);
        else if (key == "init.kind") {
            if (val == "flat") cfg.init = InitKind::flat;
            else if (val == "circle") cfg.init = InitKind::circle;
            else if (val == "file") cfg.init = InitKind::file;
            else throw ConfigError("init.kind must be flat, circle or file");
        } else if (key == "init.radius") cfg.radius = parse_double(key, val);
        else if (key == "init.phase") cfg.phase = parse_double(key, val);
        else if (key == "init.twist") cfg.twist = parse_double(key, val);
        else if (key == "init.noise") cfg.noise = parse_double(key, val);
        else if (key == "init.file") cfg.init_file = val;
        else if (key == "diag_stride") cfg.diag_stride = parse_uint(key, val);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "seed") cfg.seed = parse_uint(key, val);
        else throw ConfigError("unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream os;
    const char* kinds[] = {"flat", "circle", "file"};
    os << "epsilon = " << fmt(cfg.epsilon) << "\n"
       << "dt = " << fmt(cfg.time_step()) << "\n"
       << "t_end = " << fmt(cfg.t_end) << "\n"
       << "scheme = " << (cfg.scheme == Scheme::semi_implicit ? "semi-implicit" : "explicit") << "\n"
       << "n = " << cfg.n << "\n"
       << "m = " << cfg.m << "\n"
       << "grid = " << cfg.grid << "\n"
       << "length = " << fmt(cfg.length) << "\n"
       << "init.kind = " << kinds[static_cast<int>(cfg.init)] << "\n"
       << "init.radius = " << fmt(cfg.radius) << "\n"
       << "init.phase = " << fmt(cfg.phase) << "\n"
       << "init.twist = " << fmt(cfg.twist) << "\n"
       << "init.noise = " << fmt(cfg.noise) << "\n";
    if (!cfg.init_file.empty()) os << "init.file = " << cfg.init_file << "\n";
    os << "diag_stride = " << cfg.diag_stride << "\n"
       << "out_dir = " << cfg.out_dir << "\n"
       << "seed = " << cfg.seed << "\n";
    return os.str();
}

std::string records_csv(const std::vector<DiagRecord>& records) {
    std::ostringstream os;
    os << "step,time,energy,interface_measure,interface_points,radius_estimate,fit_rms,bulk_defect_plus,"
          "bulk_defect_minus,minimal_pair_residual,neumann_jump_residual,angle_residual,skipped_probes\n";
    for (const auto& r : records) {
        os << r.step << ',' << fmt(r.time) << ',' << fmt(r.energy) << ',' << fmt(r.interface_measure) << ','
           << r.interface_points << ',' << fmt(r.radius_estimate) << ',' << fmt(r.fit_rms) << ','
           << fmt(r.bulk_defect_plus) << ',' << fmt(r.bulk_defect_minus) << ',' << fmt(r.minimal_pair_residual) << ','
           << fmt(r.neumann_jump_residual) << ',' << fmt(r.angle_residual) << ',' << r.skipped_probes << '\n';
    }
    return os.str();
}

void write_records_csv(const std::string& path, const std::vector<DiagRecord>& records) {
    write_text(path, records_csv(records));
}

void write_snapshot(const std::string& path, const MatrixField& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write snapshot " + path);
    const auto& g = field.grid();
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(field.n()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.m()));
    for (int a = 0; a < g.m(); ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(g.size(a)));
    put<double>(os, field.time());
    const std::size_t nn = field.n() * field.n();
    const auto& v = field.values();
    for (std::size_t k = 0; k < g.cells(); ++k)
        for (std::size_t c = 0; c < nn; ++c) put<double>(os, v[c * g.cells() + k]);
    if (!os) throw Error("error writing snapshot " + path);
}

MatrixField read_snapshot(const std::string& path, std::array<double, 2> lengths) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open snapshot " + path);
    char magic[5];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw Error("snapshot: bad magic in " + path);
    const auto n = get<std::uint32_t>(is);
    const auto m = get<std::uint32_t>(is);
    if (m != 1 && m != 2) throw Error("snapshot: bad spatial dimension");
    std::array<std::size_t, 2> sizes{1, 1};
    for (std::uint32_t a = 0; a < m; ++a) sizes[a] = get<std::uint32_t>(is);
    const double time = get<double>(is);
    MatrixField field(PeriodicGrid(static_cast<int>(m), sizes, lengths), n, time);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const std::size_t cells = field.grid().cells();
    auto& v = field.values();
    for (std::size_t k = 0; k < cells; ++k)
        for (std::size_t c = 0; c < nn; ++c) v[c * cells + k] = get<double>(is);
    return field;
}

std::string summary_json(const RunConfig& cfg, const RunResult& result) {
    using Json = nlohmann::ordered_json;
    auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    Json j;
    Json c = {{"epsilon", cfg.epsilon},
              {"dt", cfg.time_step()},
              {"t_end", cfg.t_end},
              {"scheme", cfg.scheme == Scheme::semi_implicit ? "semi-implicit" : "explicit"},
              {"n", cfg.n},
              {"m", cfg.m},
              {"grid", cfg.grid},
              {"length", cfg.length},
              {"init.kind", cfg.init == InitKind::flat ? "flat" : cfg.init == InitKind::circle ? "circle" : "file"},
              {"init.radius", cfg.radius},
              {"init.phase", cfg.phase},
              {"init.twist", cfg.twist},
              {"init.noise", cfg.noise},
              {"init.file", cfg.init_file},
              {"diag_stride", cfg.diag_stride},
              {"out_dir", cfg.out_dir},
              {"seed", cfg.seed}};
    j["config"] = c;
    j["steps"] = result.steps;
    j["records"] = result.records.size();
    j["max_energy_increase"] = num(result.max_energy_increase);
    j["energy_monotone"] = result.max_energy_increase <= 1e-8;
    double bp = 0.0, bm = 0.0;
    for (const auto& r : result.records) {
        bp = std::max(bp, r.bulk_defect_plus);
        bm = std::max(bm, r.bulk_defect_minus);
    }
    j["max_bulk_defect_plus"] = bp;
    j["max_bulk_defect_minus"] = bm;
    const auto& f = result.records.back();
    j["final"] = {{"step", f.step},
                  {"time", num(f.time)},
                  {"energy", num(f.energy)},
                  {"interface_measure", num(f.interface_measure)},
                  {"radius_estimate", num(f.radius_estimate)},
                  {"minimal_pair_residual", num(f.minimal_pair_residual)},
                  {"neumann_jump_residual", num(f.neumann_jump_residual)},
                  {"angle_residual", num(f.angle_residual)}};
    if (cfg.init == InitKind::circle) {
        try {
            const auto mcf = mcf_compare(result.records, cfg.epsilon);
            j["mcf"] = {{"slope", mcf.slope}, {"deviation", mcf.deviation}, {"points", mcf.points}};
        } catch (const DomainError& e) {
            j["mcf"] = {{"error", e.what()}};
        }
    }
    return j.dump(2) + "\n";
}

std::string svg_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel) {
    constexpr double W = 480, H = 320, L = 70, R = 20, T = 30, B = 45;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        if (std::isfinite(x[i]) && std::isfinite(y[i])) ok.push_back(i);
    if (!ok.empty()) {
        x0 = x1 = x[ok[0]];
        y0 = y1 = y[ok[0]];
        for (auto i : ok) {
            x0 = std::min(x0, x[i]);
            x1 = std::max(x1, x[i]);
            y0 = std::min(y0, y[i]);
            y1 = std::max(y1, y[i]);
        }
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
       << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
       << "\" stroke=\"black\"/>\n"
       << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">"
       << xlabel << "</text>\n"
       << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 "
       << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    char buf[64];
    for (auto [v, anchor, xx, yy] : {std::tuple{x0, "start", px(x0), H - B + 16}, std::tuple{x1, "end", px(x1), H - B + 16}}) {
        std::snprintf(buf, sizeof buf, "%.4g", v);
        os << "<text x=\"" << xx << "\" y=\"" << yy << "\" text-anchor=\"" << anchor << "\" font-size=\"10\">" << buf
           << "</text>\n";
    }
    for (double v : {y0, y1}) {
        std::snprintf(buf, sizeof buf, "%.4g", v);
        os << "<text x=\"" << L - 4 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"10\">" << buf
           << "</text>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (auto i : ok) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(y[i]));
        os << buf;
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

void write_run_outputs(const RunConfig& cfg, const RunResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_records_csv((dir / "records.csv").string(), result.records);
    write_snapshot((dir / "final.macf").string(), result.field);
    write_text(dir / "summary.json", summary_json(cfg, result));
    std::vector<double> t, e, r2;
    for (const auto& r : result.records) {
        t.push_back(r.time);
        e.push_back(r.energy);
        r2.push_back(r.radius_estimate * r.radius_estimate);
    }
    write_text(dir / "energy.svg", svg_plot(t, e, "energy", "t", "E"));
    if (cfg.init == InitKind::circle) write_text(dir / "radius2.svg", svg_plot(t, r2, "R(t)^2", "t", "R^2"));
}

}  // namespace macf
