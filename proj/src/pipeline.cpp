#include "nsfix/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nsfix/operators.hpp"

namespace nsfix {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct LineParser {
    std::string where;

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(where + ": " + what); }

    double real(const std::string& v) const
    {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (used != v.size() || !std::isfinite(out)) {
            fail("expected a finite number, got '" + v + "'");
        }
        return out;
    }

    long integer(const std::string& v) const
    {
        std::size_t used = 0;
        long out = 0;
        try {
            out = std::stol(v, &used);
        } catch (const std::exception&) {
            fail("expected an integer, got '" + v + "'");
        }
        if (used != v.size()) {
            fail("expected an integer, got '" + v + "'");
        }
        return out;
    }

    std::vector<std::string> words(const std::string& v) const
    {
        std::string s = v;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<std::string> out;
        for (std::string w; in >> w;) {
            out.push_back(w);
        }
        return out;
    }
};

std::string grading_name(Grading g)
{
    return g == Grading::Uniform ? "uniform" : "quadratic";
}

} // namespace

RunConfig parse_config(std::istream& in, const std::string& source)
{
    RunConfig c;
    std::set<std::string> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const LineParser p{source + ":" + std::to_string(number)};
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail("expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) {
            p.fail("missing value for '" + key + "'");
        }
        if (key != "perturbation" && !seen.insert(key).second) {
            p.fail("duplicate key '" + key + "'");
        }
        if (key == "background") {
            if (value == "bump") {
                c.background = BackgroundKind::Bump;
            } else if (value == "polynomial") {
                c.background = BackgroundKind::Polynomial;
            } else {
                p.fail("background must be 'bump' or 'polynomial'");
            }
        } else if (key == "background.r_star") {
            c.r_star = p.real(value);
        } else if (key == "background.amplitude") {
            c.amplitude = p.real(value);
        } else if (key == "background.power") {
            c.power = static_cast<int>(p.integer(value));
        } else if (key == "background.coefficients") {
            c.coefficients.clear();
            for (const auto& w : p.words(value)) {
                c.coefficients.push_back(p.real(w));
            }
        } else if (key == "perturbation") {
            const auto w = p.words(value);
            if (w.size() != 3 && w.size() != 4) {
                p.fail("perturbation expects 'n family re [im]'");
            }
            PerturbationTerm t;
            t.n = static_cast<int>(p.integer(w[0]));
            try {
                t.family = parse_family(w[1]);
            } catch (const Error& e) {
                p.fail(e.what());
            }
            t.amplitude = {p.real(w[2]), w.size() == 4 ? p.real(w[3]) : 0.0};
            if (t.n < 0) {
                p.fail("perturbation mode must be >= 0 (the conjugate -n is implied)");
            }
            c.perturbation.push_back(t);
        } else if (key == "alpha") {
            if (value == "auto") {
                c.alpha.reset();
            } else {
                c.alpha = p.real(value);
            }
        } else if (key == "kappa") {
            c.kappa = p.real(value);
        } else if (key == "modes") {
            c.modes = static_cast<int>(p.integer(value));
        } else if (key == "grid.nodes") {
            c.nodes = p.integer(value);
        } else if (key == "grid.r_max") {
            c.r_max = p.real(value);
        } else if (key == "grid.grading") {
            if (value == "uniform") {
                c.grading = Grading::Uniform;
            } else if (value == "quadratic") {
                c.grading = Grading::Quadratic;
            } else {
                p.fail("grid.grading must be 'uniform' or 'quadratic'");
            }
        } else if (key == "tol") {
            c.tol = p.real(value);
        } else if (key == "max_iter") {
            c.max_iter = static_cast<int>(p.integer(value));
        } else if (key == "delta") {
            c.delta = p.real(value);
        } else if (key == "epsilon") {
            c.epsilon = p.real(value);
        } else if (key == "residual_tol") {
            c.residual_tol = p.real(value);
        } else if (key == "matching_tol") {
            c.matching_tol = p.real(value);
        } else if (key == "decay.angles") {
            c.decay_angles = p.integer(value);
        } else if (key == "field.stride") {
            c.field_stride = p.integer(value);
        } else if (key == "field.angles") {
            c.field_angles = p.integer(value);
        } else {
            p.fail("unknown key '" + key + "'");
        }
    }
    if (c.background == BackgroundKind::Polynomial && c.coefficients.empty()) {
        throw ConfigError(source + ": background = polynomial needs background.coefficients");
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    return parse_config(in, path.string());
}

std::string format_config(const RunConfig& c)
{
    std::ostringstream out;
    out << "background = " << (c.background == BackgroundKind::Bump ? "bump" : "polynomial") << "\n";
    out << "background.r_star = " << num(c.r_star) << "\n";
    if (c.background == BackgroundKind::Bump) {
        out << "background.amplitude = " << num(c.amplitude) << "\n";
        out << "background.power = " << c.power << "\n";
    } else {
        out << "background.coefficients =";
        for (std::size_t k = 0; k < c.coefficients.size(); ++k) {
            out << (k == 0 ? " " : ", ") << num(c.coefficients[k]);
        }
        out << "\n";
    }
    for (const auto& t : c.perturbation) {
        out << "perturbation = " << t.n << " " << family_name(t.family) << " "
            << num(t.amplitude.real()) << " " << num(t.amplitude.imag()) << "\n";
    }
    out << "alpha = " << (c.alpha ? num(*c.alpha) : std::string("auto")) << "\n";
    out << "kappa = " << num(c.kappa) << "\n";
    out << "modes = " << c.modes << "\n";
    out << "grid.nodes = " << c.nodes << "\n";
    out << "grid.r_max = " << num(c.r_max) << "\n";
    out << "grid.grading = " << grading_name(c.grading) << "\n";
    out << "tol = " << num(c.tol) << "\n";
    out << "max_iter = " << c.max_iter << "\n";
    out << "delta = " << num(c.delta) << "\n";
    out << "epsilon = " << num(c.epsilon) << "\n";
    out << "residual_tol = " << num(c.residual_tol) << "\n";
    out << "matching_tol = " << num(c.matching_tol) << "\n";
    out << "decay.angles = " << c.decay_angles << "\n";
    out << "field.stride = " << c.field_stride << "\n";
    out << "field.angles = " << c.field_angles << "\n";
    return out.str();
}

namespace {

void check_ranges(const RunConfig& c)
{
    const auto need = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    need(c.modes >= 0, "modes must be >= 0");
    need(c.kappa > 1.0, "kappa must exceed 1");
    need(c.tol > 0.0, "tol must be positive");
    need(c.max_iter >= 1, "max_iter must be >= 1");
    need(c.delta > 0.0, "delta must be positive");
    need(c.epsilon > 0.0, "epsilon must be positive");
    need(c.residual_tol > 0.0 && c.matching_tol > 0.0, "residual_tol and matching_tol must be positive");
    need(c.decay_angles >= 4 && c.field_angles >= 1 && c.field_stride >= 1,
         "decay.angles must be >= 4, field.angles and field.stride >= 1");
    need(c.background != BackgroundKind::Bump || c.power >= 2,
         "background.power must be >= 2 for a C^1 background");
}

RadialFunction background_profile(const RunConfig& c)
{
    return c.background == BackgroundKind::Bump ? bump_profile(c.amplitude, c.r_star, c.power)
                                                 : polynomial_profile(c.coefficients, c.r_star);
}

struct Setup {
    GridPtr grid;
    BackgroundFlow bg;
    SolverSettings settings;
    FourierVector phi;
};

Setup prepare(const RunConfig& c)
{
    check_ranges(c);
    Setup s;
    try {
        s.grid = build_grid(c.r_star, c.r_max, c.nodes, c.grading);
        s.bg = background_from_phi(background_profile(c), s.grid, c.delta);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const double ceiling = std::min(0.5, s.bg.rho_star);
    const double alpha = c.alpha.value_or(0.9 * ceiling);
    if (!(alpha > 0.0 && alpha < ceiling)) {
        throw ConfigError("alpha = " + num(alpha) +
                          " violates the existence range 0 < alpha < min(1/2, rho*) = " +
                          num(ceiling) + " (rho* = " + num(s.bg.rho_star) + ")");
    }
    s.settings.alpha = alpha;
    s.settings.kappa = c.kappa;
    s.settings.tol = c.tol;
    s.settings.max_iter = c.max_iter;
    s.settings.epsilon_config = c.epsilon;
    try {
        s.phi = build_perturbation(c.perturbation, s.grid, c.modes, alpha);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return s;
}

bool finite(const FourierVector& f)
{
    for (int n = 0; n <= f.cutoff(); ++n) {
        if (!f.mode(n).values().isFinite().all()) {
            return false;
        }
    }
    return true;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& config)
{
    Setup s = prepare(config);
    PipelineResult res;
    res.config = config;
    res.grid = s.grid;
    res.background = std::move(s.bg);
    res.settings = s.settings;
    res.phi = std::move(s.phi);

    const WeightedNormSpec u1 = res.settings.iterate_norm();
    res.data_norm = norm_weighted(res.phi, u1);
    if (res.data_norm > config.epsilon) {
        res.background.warnings.push_back("data norm " + num(res.data_norm) +
                                          " exceeds epsilon_config " + num(config.epsilon));
    }
    res.picard = picard_solve(res.phi, res.background, res.settings);
    const IterationReport& it = res.picard.report;
    res.solution_norm = norm_weighted(res.picard.w, u1);

    if (it.converged && finite(res.picard.w)) {
        res.fields = reconstruct_solution(res.picard.w, res.background, res.settings);
        res.residuals =
            residual_system(res.fields->gamma, res.picard.w, res.phi, res.background, res.settings);
        res.consistency = consistency_Gstar_H(res.fields->gamma, res.picard.w, res.background.stream);
        res.matching = matching_gap(res.picard.w);
        res.decay = decay_metric(*res.fields, res.phi, res.background, res.settings.alpha,
                                 config.decay_angles);
    }

    if (it.diverged) {
        res.exit_status = kExitDiverged;
        res.verdict = it.status;
    } else if (!it.converged) {
        res.exit_status = kExitDiverged;
        res.verdict = it.status;
    } else {
        const double r1 = res.residuals->vorticity_relative();
        const double r2 = res.residuals->source_relative();
        const double gap = std::max(res.matching->value, res.matching->slope);
        if (!(r1 <= config.residual_tol && r2 <= config.residual_tol)) {
            res.exit_status = kExitDiverged;
            res.verdict = "converged, but residual check failed: " + num(std::max(r1, r2)) +
                          " > " + num(config.residual_tol);
        } else if (!(gap <= config.matching_tol)) {
            res.exit_status = kExitDiverged;
            res.verdict = "converged, but matching check failed: " + num(gap) + " > " +
                          num(config.matching_tol);
        } else {
            res.exit_status = kExitOk;
            res.verdict = "converged; residual and matching checks passed";
        }
    }
    return res;
}

nlohmann::ordered_json report_json(const PipelineResult& r)
{
    using json = nlohmann::ordered_json;
    const BackgroundFlow& bg = r.background;
    const IterationReport& it = r.picard.report;
    json j;
    j["schema"] = "nsfix-report/1";
    j["config"] = format_config(r.config);
    j["background"] = {{"mu_star", bg.mu_star},
                       {"rho_star", bg.rho_star},
                       {"nu_star", bg.nu_star},
                       {"smallness", bg.smallness},
                       {"delta_config", bg.delta_config},
                       {"warnings", bg.warnings}};
    json zeta = json::array();
    for (int n = 0; n <= r.config.modes; ++n) {
        const Complex z = bg.zeta(n);
        zeta.push_back({{"n", n}, {"re", z.real()}, {"im", z.imag()}});
    }
    j["zeta"] = zeta;
    j["alpha"] = r.settings.alpha;
    j["kappa"] = r.settings.kappa;
    j["norms"] = {{"label", "band-limited U^1_{alpha+2,kappa+2}, sup over |n| <= N"},
                  {"data", r.data_norm},
                  {"solution", r.solution_norm}};
    json steps = json::array();
    for (const auto& s : it.steps) {
        steps.push_back(
            {{"j", s.index}, {"norm", s.norm}, {"increment", s.increment}, {"ratio", s.ratio}});
    }
    j["iteration"] = {{"converged", it.converged},
                      {"diverged", it.diverged},
                      {"divergence_step", it.divergence_step},
                      {"status", it.status},
                      {"steps", steps},
                      {"budget",
                       {{"delta_config", it.budget.delta_config},
                        {"epsilon_config", it.budget.epsilon_config},
                        {"data_norm", it.budget.data_norm},
                        {"max_ratio", it.budget.max_ratio},
                        {"max_norm", it.budget.max_norm}}}};
    if (r.residuals) {
        j["residuals"] = {{"vorticity", r.residuals->vorticity},
                          {"vorticity_relative", r.residuals->vorticity_relative()},
                          {"source", r.residuals->source},
                          {"source_relative", r.residuals->source_relative()},
                          {"per_mode_vorticity", r.residuals->per_mode_vorticity},
                          {"per_mode_source", r.residuals->per_mode_source}};
    } else {
        j["residuals"] = nullptr;
    }
    j["consistency"] = r.consistency ? json{{"relative", r.consistency->relative},
                                            {"raw", r.consistency->raw}}
                                     : json(nullptr);
    j["matching_gaps"] =
        r.matching ? json{{"value", r.matching->value}, {"slope", r.matching->slope}} : json(nullptr);
    if (r.decay) {
        j["decay"] = {{"alpha_used", r.decay->alpha_used},
                      {"sup_value", r.decay->sup_value},
                      {"fitted_slope", r.decay->fitted_slope},
                      {"window", {r.decay->window_lo, r.decay->window_hi}},
                      {"window_points", r.decay->window_points}};
    } else {
        j["decay"] = nullptr;
    }
    j["exit_status"] = r.exit_status;
    j["verdict"] = r.verdict;
    return j;
}

void emit_report(const PipelineResult& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) {
            throw Error("cannot write " + (dir / name).string());
        }
        return out;
    };
    const RadialGrid& g = *r.grid;
    {
        std::ofstream out = open("modes.csv");
        out << "r,n,re_w,im_w,re_gamma,im_gamma\n";
        for (int n = 0; n <= r.picard.w.cutoff(); ++n) {
            const RadialProfile& w = r.picard.w.mode(n);
            for (Index i = 0; i < g.size(); ++i) {
                const Complex gm = r.fields ? r.fields->gamma.mode(n)[i] : Complex{NAN, NAN};
                out << num(g.node(i)) << ',' << n << ',' << num(w[i].real()) << ','
                    << num(w[i].imag()) << ',' << num(gm.real()) << ',' << num(gm.imag()) << '\n';
            }
        }
    }
    {
        std::ofstream out = open("field.csv");
        out << "x1,x2,u1,u2,omega\n";
        if (r.fields) {
            const RealArray thetas = theta_grid(r.config.field_angles);
            const auto ur = synthesize_angular(r.fields->u_r, thetas);
            const auto ut = synthesize_angular(r.fields->u_theta, thetas);
            const auto om = synthesize_angular(r.fields->omega, thetas);
            for (Index i = 0; i < g.size(); i += r.config.field_stride) {
                const double rad = g.node(i);
                for (Index k = 0; k < thetas.size(); ++k) {
                    const double c = std::cos(thetas[k]), s = std::sin(thetas[k]);
                    out << num(rad * c) << ',' << num(rad * s) << ','
                        << num(ur(i, k) * c - ut(i, k) * s) << ','
                        << num(ur(i, k) * s + ut(i, k) * c) << ',' << num(om(i, k)) << '\n';
                }
            }
        }
    }
    {
        std::ofstream out = open("report.json");
        out << report_json(r).dump(2) << '\n';
    }
}

std::vector<TableCheck> verify_tables(const std::filesystem::path& dir)
{
    std::ifstream rin(dir / "report.json");
    if (!rin) {
        throw ConfigError((dir / "report.json").string() + ": cannot open");
    }
    const auto report = nlohmann::json::parse(rin, nullptr, true);
    std::istringstream cin(report.at("config").get<std::string>());
    RunConfig config = parse_config(cin, (dir / "report.json").string() + "#config");
    config.alpha = report.at("alpha").get<double>();
    const Setup s = prepare(config);
    const RadialGrid& g = *s.grid;
    const int cutoff = config.modes;

    std::ifstream min(dir / "modes.csv");
    if (!min) {
        throw ConfigError((dir / "modes.csv").string() + ": cannot open");
    }
    std::vector<ComplexArray> wv(static_cast<std::size_t>(cutoff) + 1, ComplexArray(g.size()));
    auto gv = wv;
    std::string line;
    std::getline(min, line);
    Index row = 0;
    while (std::getline(min, line)) {
        std::vector<double> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            f.push_back(std::stod(cell));
        }
        require(f.size() == 6, "modes.csv: malformed row " + std::to_string(row + 2));
        const auto n = static_cast<std::size_t>(f[1]);
        const Index i = row % g.size();
        require(n <= static_cast<std::size_t>(cutoff) && f[0] == g.node(i),
                "modes.csv: row " + std::to_string(row + 2) + " does not match the grid");
        wv[n][i] = {f[2], f[3]};
        gv[n][i] = {f[4], f[5]};
        ++row;
    }
    require(row == (cutoff + 1) * g.size(), "modes.csv: wrong number of rows");

    const double alpha = s.settings.alpha;
    std::vector<RadialProfile> wm;
    for (int n = 0; n <= cutoff; ++n) {
        RadialProfile p(s.grid, wv[static_cast<std::size_t>(n)]);
        p.set_derivative(1, differentiate(p, 1).values());
        p.set_tail(fit_tail(g, p.values(), alpha + 2.0));
        wm.push_back(std::move(p));
    }
    const FourierVector w(std::move(wm));
    const FourierVector gamma_map = map_L(w, alpha);
    FourierVector gamma = gamma_map;
    double table_gap = 0.0, table_scale = 0.0;
    for (int n = 0; n <= cutoff; ++n) {
        RadialProfile p = gamma.mode(n);
        const ComplexArray& table = gv[static_cast<std::size_t>(n)];
        table_gap = std::max(table_gap, (table - p.values()).abs().maxCoeff());
        table_scale = std::max(table_scale, p.values().abs().maxCoeff());
        p.values() = table;
        gamma.set_mode(n, std::move(p));
    }

    const ResidualReport res = residual_system(gamma, w, s.phi, s.bg, s.settings);
    const ConsistencyReport cons = consistency_Gstar_H(gamma_map, w, s.bg.stream);
    double slope_gap = 0.0;
    if (cutoff >= 2) {
        const Index rs = g.r_star_index();
        const ComplexArray& v = wv[2];
        const double scale = differentiate(w.mode(2), 1).values().abs().maxCoeff();
        const double gap = std::abs(derivative_at(g, v, rs, 1, false) - derivative_at(g, v, rs, 1, true));
        slope_gap = gap == 0.0 ? 0.0 : gap / scale;
    }

    const auto reported = [&](const char* block, const char* key) {
        const auto& b = report.at(block);
        return b.is_null() || b.at(key).is_null() ? NAN : b.at(key).get<double>();
    };
    std::vector<TableCheck> out;
    const auto add = [&](std::string name, double rep, double rec, double tol) {
        out.push_back({std::move(name), rep, rec, tol, rec <= tol});
    };
    add("vorticity residual (relative)", reported("residuals", "vorticity_relative"),
        res.vorticity_relative(), config.residual_tol);
    add("source residual (relative)", reported("residuals", "source_relative"),
        res.source_relative(), config.residual_tol);
    add("n=2 slope gap at R* (one-sided differences)", reported("matching_gaps", "slope"), slope_gap,
        config.matching_tol);
    add("G*/H consistency", reported("consistency", "relative"), cons.relative, 1e-6);
    add("gamma table vs Green inversion of w", 0.0,
        table_gap == 0.0 ? 0.0 : table_gap / table_scale, 1e-10);
    return out;
}

} // namespace nsfix
