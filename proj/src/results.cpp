#include "nakano/results.hpp"

#include <fftw3.h>

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nakano/plots.hpp"

namespace nakano {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json step_json(const PathStep& s) {
    return {{"t", s.t},
            {"step", s.step},
            {"residual_sup", s.residual_sup},
            {"min_eigenvalue", s.min_eigenvalue},
            {"c", s.c},
            {"sup_u", s.sup_u},
            {"sup_du", s.sup_du},
            {"sup_ddbar_u", s.sup_ddbar_u},
            {"c2_ratio", s.c2_ratio},
            {"newton_iterations", s.newton_iterations},
            {"krylov_iterations", s.krylov_iterations},
            {"residual_history", s.residual_history}};
}

}  // namespace

std::string version_string() {
    return "nakano 0.1.0; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
           "." + std::to_string(EIGEN_MINOR_VERSION) + "; " + fftw_version;
}

ResultBundle run_solve(const ScenarioConfig& config) {
    ResultBundle b;
    b.config = config;
    b.hash = scenario_hash(config);
    auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = build_scenario(config);
    b.timings.build_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    b.start_residual = residual(sc, ScalarField(sc.grid), 1.0, 0.0).sup_norm;
    b.result = continuity_solve(sc, config.solver);
    b.timings.solve_seconds = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    b.diagnostics = diagnostics(b.result.trace);
    if (b.result.success) {
        const ResidualOperator R(sc);
        b.final_min_eigenvalue = min_nakano_eigenvalue(R.theta(b.result.state.u));
        if (sc.lambda > 0.0) b.bound = assert_c0_bound(sc, b.result.state);
        if (const auto ustar = manufactured_solution(config)) b.manufactured_error = (b.result.state.u - *ustar).sup_norm();
    }
    b.timings.diagnostics_seconds = seconds_since(t0);
    return b;
}

json summary_json(const ResultBundle& b) {
    const SolverState& st = b.result.state;
    json trace = json::array();
    for (const auto& s : b.result.trace.steps) trace.push_back(step_json(s));
    json bound = nullptr;
    if (b.bound)
        bound = {{"sup_abs_u", b.bound->sup_abs_u},   {"bound", b.bound->bound},
                 {"sup_abs_phi1", b.bound->sup_abs_phi1}, {"sup_abs_phi", b.bound->sup_abs_phi},
                 {"pass", b.bound->pass}};
    const DiagnosticsSummary& d = b.diagnostics;
    return {{"scenario", to_json(b.config)},
            {"scenario_hash", b.hash},
            {"seed", b.config.seed},
            {"versions", version_string()},
            {"success", b.result.success},
            {"failure", b.result.failure},
            {"t_reached", b.result.t_reached},
            {"c", st.c},
            {"start_residual", b.start_residual},
            {"residual_sup", st.residual_sup},
            {"min_eigenvalue", b.final_min_eigenvalue},
            {"newton_iterations", st.newton_iterations},
            {"krylov_iterations", st.krylov_iterations},
            {"sup_u", st.u.size() ? st.u.sup_norm() : 0.0},
            {"manufactured_error", b.manufactured_error ? json(*b.manufactured_error) : json(nullptr)},
            {"trace", trace},
            {"c0_bound", bound},
            {"diagnostics",
             {{"max_sup_du", d.max_sup_du},
              {"max_c2_ratio", d.max_c2_ratio},
              {"max_inverse_min_eigenvalue", d.max_inverse_min_eigenvalue},
              {"final_sup_du", d.final_sup_du},
              {"final_c2_ratio", d.final_c2_ratio},
              {"final_inverse_min_eigenvalue", d.final_inverse_min_eigenvalue},
              {"note", d.note}}},
            {"timings",
             {{"build_seconds", b.timings.build_seconds},
              {"solve_seconds", b.timings.solve_seconds},
              {"diagnostics_seconds", b.timings.diagnostics_seconds}}}};
}

void write_grid_csv(const std::string& path, const ScalarField& u, double c, const std::string& label) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    const GridSpec& g = u.grid;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", g.period);
    out << "# field=" << label << "\n";
    out << "# n=" << g.n << " N=" << g.points_per_axis << " period=" << buf << " stencil_order=" << g.stencil_order
        << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", c);
    out << "# c=" << buf << "\n";
    out << "# layout=row-major axes=(x1,y1[,x2,y2]) last axis along each line\n";
    const int N = g.points_per_axis;
    for (std::size_t p = 0; p < u.size(); ++p) {
        std::snprintf(buf, sizeof buf, "%.17g", u[p]);
        out << buf << ((p + 1) % N == 0 ? "\n" : ",");
    }
    if (!out) throw IoError("write failed for " + path);
}

GridCsv read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    GridCsv out;
    bool have_grid = false;
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# n=%d N=%d period=%lf stencil_order=%d", &out.grid.n,
                            &out.grid.points_per_axis, &out.grid.period, &out.grid.stencil_order) == 4)
                have_grid = true;
            std::sscanf(line.c_str(), "# c=%lf", &out.c);
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw IoError("malformed value '" + cell + "' in " + path);
            values.push_back(v);
        }
    }
    if (!have_grid) throw IoError("missing grid metadata in " + path);
    try {
        out.grid.validate();
    } catch (const InvalidGrid& e) {
        throw IoError(std::string("bad grid metadata in ") + path + ": " + e.what());
    }
    if (values.size() != out.grid.size()) throw IoError("value count does not match grid in " + path);
    out.u = ScalarField(out.grid);
    out.u.values = std::move(values);
    return out;
}

void write_bundle(const ResultBundle& b, const std::string& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory + ": " + ec.message());
    const OutputConfig& o = b.config.outputs;
    const std::string dir = directory + "/";
    const ScalarField& u = b.result.state.u;
    if (o.wants("csv")) write_grid_csv(dir + "u.csv", u, b.result.state.c, "u");
    if (o.wants("json")) {
        std::ofstream out(dir + "summary.json");
        if (!out) throw IoError("cannot write " + dir + "summary.json");
        out << summary_json(b).dump(2) << "\n";
    }
    const int scale = std::max(1, 256 / b.config.grid.points_per_axis);
    if (o.wants("pgm")) {
        write_pgm(dir + "u.pgm", heatmap(u, scale));
        const Scenario sc = build_scenario(b.config);
        const ResidualOperator R(sc);
        write_pgm(dir + "min_eigenvalue.pgm", heatmap(min_eigenvalue_field(R.theta(u)), scale));
    }
    if (o.wants("ppm")) {
        std::vector<std::pair<double, double>> pts{{1.0, b.start_residual}};
        for (const auto& s : b.result.trace.steps) pts.emplace_back(s.t, s.residual_sup);
        write_ppm(dir + "residual.ppm", residual_chart(pts));
    }
}

bool VerifyReport::pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerifyReport verify_bundle(const std::string& directory) {
    VerifyReport rep;
    auto add = [&](std::string name, bool pass, std::string detail) {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return std::string(buf);
    };

    std::ifstream in(directory + "/summary.json");
    if (!in) throw IoError("cannot read " + directory + "/summary.json");
    json summary;
    try {
        summary = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("summary.json is not valid JSON: ") + e.what());
    }
    const ScenarioConfig config = parse_config(summary.at("scenario"));
    const std::string hash = scenario_hash(config);
    add("scenario_hash", hash == summary.value("scenario_hash", ""), "recomputed " + hash);
    add("solve_success", summary.value("success", false), summary.value("failure", ""));

    const GridCsv csv = read_grid_csv(directory + "/u.csv");
    const bool same_grid = csv.grid == config.grid;
    add("grid_metadata", same_grid, same_grid ? "matches scenario" : "u.csv grid differs from scenario");
    if (!same_grid) return rep;

    const Scenario sc = build_scenario(config);
    const SolverOptions& opt = config.solver;
    const double c = sc.lambda == 0.0 ? csv.c : 0.0;
    add("c_consistency", sc.lambda == 0.0 || csv.c == 0.0, "c = " + fmt(csv.c));
    try {
        const ResidualReport r = residual(sc, csv.u, 0.0, c);
        add("residual", r.sup_norm <= opt.newton_tolerance,
            "sup " + fmt(r.sup_norm) + " vs tolerance " + fmt(opt.newton_tolerance));
        const double floor = opt.margin_factor * sc.margin;
        add("cone", r.theta_min_eig >= floor, "min eigenvalue " + fmt(r.theta_min_eig) + " vs " + fmt(floor));
    } catch (const OutsideCone& e) {
        add("residual", false, e.what());
        add("cone", false, e.what());
    }
    if (sc.normalization == Normalization::sup_zero)
        add("normalization", std::abs(csv.u.max()) <= 1e-12, "sup u = " + fmt(csv.u.max()));
    if (sc.lambda > 0.0) {
        SolverState st;
        st.u = csv.u;
        const BoundReport b = assert_c0_bound(sc, st);
        add("c0_bound", b.pass, "sup|u| " + fmt(b.sup_abs_u) + " <= " + fmt(b.bound));
    }

    bool trace_ok = true;
    double last_t = 1.0;
    const double floor = opt.margin_factor * sc.margin;
    for (const auto& s : summary.at("trace")) {
        const double t = s.at("t").get<double>();
        trace_ok = trace_ok && t < last_t && s.at("min_eigenvalue").get<double>() >= floor &&
                   s.at("residual_sup").get<double>() <= opt.newton_tolerance && s.contains("sup_du") &&
                   s.contains("c2_ratio");
        last_t = t;
    }
    trace_ok = trace_ok && last_t == 0.0;
    add("trace", trace_ok, std::to_string(summary.at("trace").size()) + " steps");
    return rep;
}

}  // namespace nakano
