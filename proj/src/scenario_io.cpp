#include "nakano/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace nakano {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) throw SchemaError(path.empty() ? key : path + "." + key, "unknown key");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json* find(const json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& need(const json& obj, const std::string& path, const std::string& key) {
    const json* v = find(obj, key);
    if (!v) throw SchemaError(join(path, key), "required key missing");
    return *v;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw SchemaError(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(key, "must be finite");
    return d;
}

long long integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw SchemaError(key, "must be an integer");
    return v.get<long long>();
}

std::string string(const json& v, const std::string& key) {
    if (!v.is_string()) throw SchemaError(key, "must be a string");
    return v.get<std::string>();
}

void opt_number(const json& obj, const std::string& path, const char* key, double& out) {
    if (const json* v = find(obj, key)) out = number(*v, join(path, key));
}

void opt_int(const json& obj, const std::string& path, const char* key, int& out) {
    if (const json* v = find(obj, key)) out = static_cast<int>(integer(*v, join(path, key)));
}

cplx complex_entry(const json& v, const std::string& key) {
    if (v.is_number()) return {number(v, key), 0.0};
    if (v.is_array() && v.size() == 2) return {number(v[0], key), number(v[1], key)};
    throw SchemaError(key, "must be a number or a [re, im] pair");
}

Eigen::MatrixXcd parse_matrix(const json& v, const std::string& key, int dim) {
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
        throw SchemaError(key, "must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    Eigen::MatrixXcd M(dim, dim);
    for (int i = 0; i < dim; ++i) {
        if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim)
            throw SchemaError(key, "row " + std::to_string(i) + " has the wrong length");
        for (int j = 0; j < dim; ++j) M(i, j) = complex_entry(v[i][j], key);
    }
    return M;
}

json matrix_json(const Eigen::MatrixXcd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

FourierSpec parse_modes(const json& v, const std::string& key, int real_axes) {
    if (!v.is_array()) throw SchemaError(key, "must be a list of modes");
    FourierSpec spec;
    for (std::size_t m = 0; m < v.size(); ++m) {
        const std::string mk = key + "[" + std::to_string(m) + "]";
        only_keys(v[m], mk, {"k", "re", "im"});
        const json& k = need(v[m], mk, "k");
        if (!k.is_array() || static_cast<int>(k.size()) != real_axes)
            throw SchemaError(mk + ".k", "needs one integer per real axis (" + std::to_string(real_axes) + ")");
        FourierMode mode;
        for (const auto& e : k) mode.k.push_back(static_cast<int>(integer(e, mk + ".k")));
        double re = 0.0, im = 0.0;
        opt_number(v[m], mk, "re", re);
        opt_number(v[m], mk, "im", im);
        mode.amplitude = {re, im};
        spec.modes.push_back(std::move(mode));
    }
    return spec;
}

json modes_json(const FourierSpec& spec) {
    json arr = json::array();
    for (const auto& m : spec.modes) arr.push_back({{"k", m.k}, {"re", m.amplitude.real()}, {"im", m.amplitude.imag()}});
    return arr;
}

GridSpec parse_grid(const json& v) {
    only_keys(v, "grid", {"n", "N", "period", "stencil_order"});
    GridSpec g;
    g.n = static_cast<int>(integer(need(v, "grid", "n"), "grid.n"));
    g.points_per_axis = static_cast<int>(integer(need(v, "grid", "N"), "grid.N"));
    opt_number(v, "grid", "period", g.period);
    opt_int(v, "grid", "stencil_order", g.stencil_order);
    if (g.n != 1 && g.n != 2) throw SchemaError("grid.n", "must be 1 or 2");
    if (g.points_per_axis < 8 || g.points_per_axis % 2 != 0) throw SchemaError("grid.N", "must be even and >= 8");
    if (!(g.period > 0.0)) throw SchemaError("grid.period", "must be positive");
    if (g.stencil_order != 2 && g.stencil_order != 4) throw SchemaError("grid.stencil_order", "must be 2 or 4");
    return g;
}

BackgroundConfig parse_background(const json& v, int n, int rank) {
    const std::string kind = string(need(v, "background", "kind"), "background.kind");
    BackgroundConfig b;
    b.kind = kind;
    if (kind == "flat") {
        only_keys(v, "background", {"kind", "tau"});
        opt_number(v, "background", "tau", b.tau);
    } else if (kind == "diagonal_torus") {
        only_keys(v, "background", {"kind", "tau", "potentials"});
        opt_number(v, "background", "tau", b.tau);
        const json& pots = need(v, "background", "potentials");
        if (!pots.is_array() || static_cast<int>(pots.size()) != rank)
            throw SchemaError("background.potentials", "needs one mode list per bundle index (rank)");
        for (std::size_t a = 0; a < pots.size(); ++a)
            b.potentials.push_back(parse_modes(pots[a], "background.potentials[" + std::to_string(a) + "]", 2 * n));
    } else if (kind == "explicit") {
        only_keys(v, "background", {"kind", "theta", "metric"});
        b.theta = parse_matrix(need(v, "background", "theta"), "background.theta", n * rank);
        if (const json* m = find(v, "metric")) b.metric = parse_matrix(*m, "background.metric", n);
    } else if (kind == "random") {
        only_keys(v, "background", {"kind", "level", "amplitude", "max_wavenumber"});
        opt_number(v, "background", "level", b.level);
        opt_number(v, "background", "amplitude", b.amplitude);
        opt_int(v, "background", "max_wavenumber", b.max_wavenumber);
        if (!(b.level > 0.0)) throw SchemaError("background.level", "must be positive");
        if (!(b.amplitude >= 0.0)) throw SchemaError("background.amplitude", "must be >= 0");
        if (b.max_wavenumber < 1) throw SchemaError("background.max_wavenumber", "must be >= 1");
    } else {
        throw SchemaError("background.kind", "expected flat, diagonal_torus, explicit or random");
    }
    if ((kind == "flat" || kind == "diagonal_torus") && !(b.tau > 0.0))
        throw SchemaError("background.tau", "must be positive");
    return b;
}

PhiConfig parse_phi(const json& v, int n) {
    const std::string kind = string(need(v, "phi", "kind"), "phi.kind");
    PhiConfig p;
    p.kind = kind;
    if (kind == "none") {
        only_keys(v, "phi", {"kind"});
    } else if (kind == "fourier") {
        only_keys(v, "phi", {"kind", "modes"});
        p.modes = parse_modes(need(v, "phi", "modes"), "phi.modes", 2 * n);
    } else if (kind == "random") {
        only_keys(v, "phi", {"kind", "amplitude", "mode_count", "max_wavenumber"});
        opt_number(v, "phi", "amplitude", p.amplitude);
        opt_int(v, "phi", "mode_count", p.mode_count);
        opt_int(v, "phi", "max_wavenumber", p.max_wavenumber);
        if (p.mode_count < 0) throw SchemaError("phi.mode_count", "must be >= 0");
        if (p.max_wavenumber < 1) throw SchemaError("phi.max_wavenumber", "must be >= 1");
    } else if (kind == "manufactured") {
        only_keys(v, "phi", {"kind", "u_star", "exact"});
        p.u_star = parse_modes(need(v, "phi", "u_star"), "phi.u_star", 2 * n);
        if (const json* e = find(v, "exact")) p.exact = string(*e, "phi.exact");
        if (p.exact != "discrete" && p.exact != "continuum")
            throw SchemaError("phi.exact", "expected discrete or continuum");
    } else {
        throw SchemaError("phi.kind", "expected none, fourier, random or manufactured");
    }
    return p;
}

SolverOptions parse_solver(const json& v) {
    only_keys(v, "solver",
              {"newton_tolerance", "max_newton_iterations", "max_damping_halvings", "krylov_tolerance",
               "krylov_max_iterations", "initial_step", "step_growth", "step_floor", "easy_newton_iterations",
               "margin_factor"});
    SolverOptions o;
    opt_number(v, "solver", "newton_tolerance", o.newton_tolerance);
    opt_int(v, "solver", "max_newton_iterations", o.max_newton_iterations);
    opt_int(v, "solver", "max_damping_halvings", o.max_damping_halvings);
    opt_number(v, "solver", "krylov_tolerance", o.krylov.tolerance);
    opt_int(v, "solver", "krylov_max_iterations", o.krylov.max_iterations);
    opt_number(v, "solver", "initial_step", o.initial_step);
    opt_number(v, "solver", "step_growth", o.step_growth);
    opt_number(v, "solver", "step_floor", o.step_floor);
    opt_int(v, "solver", "easy_newton_iterations", o.easy_newton_iterations);
    opt_number(v, "solver", "margin_factor", o.margin_factor);
    if (!(o.newton_tolerance > 0.0)) throw SchemaError("solver.newton_tolerance", "must be positive");
    if (!(o.krylov.tolerance > 0.0)) throw SchemaError("solver.krylov_tolerance", "must be positive");
    if (!(o.initial_step > 0.0 && o.initial_step <= 1.0)) throw SchemaError("solver.initial_step", "must lie in (0, 1]");
    if (!(o.step_growth >= 1.0)) throw SchemaError("solver.step_growth", "must be >= 1");
    if (!(o.step_floor > 0.0)) throw SchemaError("solver.step_floor", "must be positive");
    if (!(o.margin_factor > 0.0 && o.margin_factor <= 1.0)) throw SchemaError("solver.margin_factor", "must lie in (0, 1]");
    if (o.max_newton_iterations < 1) throw SchemaError("solver.max_newton_iterations", "must be >= 1");
    if (o.max_damping_halvings < 0) throw SchemaError("solver.max_damping_halvings", "must be >= 0");
    if (o.krylov.max_iterations < 1) throw SchemaError("solver.krylov_max_iterations", "must be >= 1");
    return o;
}

OutputConfig parse_outputs(const json& v) {
    only_keys(v, "outputs", {"directory", "formats"});
    OutputConfig o;
    if (const json* d = find(v, "directory")) o.directory = string(*d, "outputs.directory");
    if (const json* f = find(v, "formats")) {
        if (!f->is_array()) throw SchemaError("outputs.formats", "must be a list");
        o.formats.clear();
        for (const auto& e : *f) {
            const std::string s = string(e, "outputs.formats");
            if (s != "csv" && s != "json" && s != "pgm" && s != "ppm")
                throw SchemaError("outputs.formats", "unknown format '" + s + "'");
            o.formats.push_back(s);
        }
    }
    return o;
}

}  // namespace

bool OutputConfig::wants(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
}

ScenarioConfig parse_config(const json& doc) {
    only_keys(doc, "", {"seed", "grid", "rank", "lambda", "margin", "background", "phi", "solver", "outputs"});
    ScenarioConfig c;
    if (const json* s = find(doc, "seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
            throw SchemaError("seed", "must be a non-negative integer");
        c.seed = s->get<std::uint64_t>();
    }
    c.grid = parse_grid(need(doc, "", "grid"));
    c.rank = static_cast<int>(integer(need(doc, "", "rank"), "rank"));
    if (c.rank < 1 || c.rank > 8) throw SchemaError("rank", "must lie in [1, 8]");
    c.lambda = number(need(doc, "", "lambda"), "lambda");
    if (!(c.lambda >= 0.0)) throw SchemaError("lambda", "must be >= 0");
    opt_number(doc, "", "margin", c.margin);
    if (!(c.margin > 0.0)) throw SchemaError("margin", "must be positive");
    c.background = parse_background(need(doc, "", "background"), c.grid.n, c.rank);
    c.phi = parse_phi(need(doc, "", "phi"), c.grid.n);
    if (const json* s = find(doc, "solver")) c.solver = parse_solver(*s);
    if (const json* o = find(doc, "outputs")) c.outputs = parse_outputs(*o);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read scenario file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("<document>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const ScenarioConfig& c) {
    json doc;
    doc["seed"] = c.seed;
    doc["grid"] = {{"n", c.grid.n}, {"N", c.grid.points_per_axis}, {"period", c.grid.period},
                   {"stencil_order", c.grid.stencil_order}};
    doc["rank"] = c.rank;
    doc["lambda"] = c.lambda;
    doc["margin"] = c.margin;

    const BackgroundConfig& b = c.background;
    json bg{{"kind", b.kind}};
    if (b.kind == "flat") {
        bg["tau"] = b.tau;
    } else if (b.kind == "diagonal_torus") {
        bg["tau"] = b.tau;
        json pots = json::array();
        for (const auto& p : b.potentials) pots.push_back(modes_json(p));
        bg["potentials"] = pots;
    } else if (b.kind == "explicit") {
        bg["theta"] = matrix_json(b.theta);
        if (b.metric) bg["metric"] = matrix_json(*b.metric);
    } else if (b.kind == "random") {
        bg["level"] = b.level;
        bg["amplitude"] = b.amplitude;
        bg["max_wavenumber"] = b.max_wavenumber;
    }
    doc["background"] = bg;

    const PhiConfig& p = c.phi;
    json ph{{"kind", p.kind}};
    if (p.kind == "fourier") {
        ph["modes"] = modes_json(p.modes);
    } else if (p.kind == "random") {
        ph["amplitude"] = p.amplitude;
        ph["mode_count"] = p.mode_count;
        ph["max_wavenumber"] = p.max_wavenumber;
    } else if (p.kind == "manufactured") {
        ph["u_star"] = modes_json(p.u_star);
        ph["exact"] = p.exact;
    }
    doc["phi"] = ph;

    const SolverOptions& o = c.solver;
    doc["solver"] = {{"newton_tolerance", o.newton_tolerance},
                     {"max_newton_iterations", o.max_newton_iterations},
                     {"max_damping_halvings", o.max_damping_halvings},
                     {"krylov_tolerance", o.krylov.tolerance},
                     {"krylov_max_iterations", o.krylov.max_iterations},
                     {"initial_step", o.initial_step},
                     {"step_growth", o.step_growth},
                     {"step_floor", o.step_floor},
                     {"easy_newton_iterations", o.easy_newton_iterations},
                     {"margin_factor", o.margin_factor}};
    doc["outputs"] = {{"directory", c.outputs.directory}, {"formats", c.outputs.formats}};
    return doc;
}

Scenario build_scenario(const ScenarioConfig& c) {
    const GridSpec& g = c.grid;
    g.validate();
    const BackgroundConfig& b = c.background;

    ScalarField phi(g);
    if (c.phi.kind == "fourier") {
        phi = build_field(c.phi.modes, g);
    } else if (c.phi.kind == "random") {
        phi = build_field(random_fourier_spec(g.real_axes(), c.seed + 1, c.phi.amplitude, c.phi.max_wavenumber,
                                              c.phi.mode_count),
                          g);
    }

    Scenario sc;
    if (b.kind == "flat") {
        sc = make_diagonal_torus_scenario(g, c.rank, std::vector<FourierSpec>(c.rank), b.tau, {}, c.lambda, c.margin);
    } else if (b.kind == "diagonal_torus") {
        sc = make_diagonal_torus_scenario(g, c.rank, b.potentials, b.tau, {}, c.lambda, c.margin);
    } else if (b.kind == "explicit") {
        const NakanoTensorField F = NakanoTensorField::constant(g, c.rank, b.theta);
        if (b.metric) {
            const HermitianMetricField metric = HermitianMetricField::constant(g, *b.metric);
            sc = make_scenario(F, &metric, ScalarField(g), c.lambda, c.margin);
        } else {
            sc = make_scenario(F, nullptr, ScalarField(g), c.lambda, c.margin);
        }
    } else if (b.kind == "random") {
        const NakanoTensorField F = random_nakano_field(g, c.rank, c.seed, b.level, b.amplitude, b.max_wavenumber);
        sc = make_scenario(F, nullptr, ScalarField(g), c.lambda, c.margin);
    } else {
        throw SchemaError("background.kind", "unknown kind '" + b.kind + "'");
    }

    if (c.phi.kind == "manufactured") {
        phi = c.phi.exact == "continuum" ? manufacture_phi_exact(sc, c.phi.u_star)
                                         : manufacture_phi(sc, build_field(c.phi.u_star, g));
    }
    return with_phi(sc, std::move(phi));
}

Scenario parse_scenario(const std::string& path) { return build_scenario(load_config(path)); }

std::optional<ScalarField> manufactured_solution(const ScenarioConfig& c) {
    if (c.phi.kind != "manufactured") return std::nullopt;
    ScalarField u = build_field(c.phi.u_star, c.grid);
    if (c.lambda == 0.0) {
        const double top = u.max();
        for (double& v : u.values) v -= top;
    }
    return u;
}

std::string scenario_hash(const ScenarioConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool identical(const Scenario& a, const Scenario& b) {
    return a.grid == b.grid && a.rank == b.rank && a.background == b.background && a.metric == b.metric &&
           a.phi.grid == b.phi.grid && a.phi.values == b.phi.values && a.lambda == b.lambda &&
           a.volume_convention == b.volume_convention && a.margin == b.margin &&
           a.normalization == b.normalization && a.coupling_discrepancy == b.coupling_discrepancy;
}

}  // namespace nakano
