// ftcalc command line: reproduces the numerical studies as CSV/JSON tables
// plus optional gnuplot scripts. Links against the public C API only.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ftcalc.h"
#include "json.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

struct CliError {
    int code;
    std::string msg;
};

void check(ftc_status st) {
    if (st == FTC_OK) return;
    throw CliError{st == FTC_ERR_NUMERICAL ? 3 : 2, ftc_last_error()};
}

std::string d17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Config {
    std::string model = "nonlocal";
    bool model_set = false;
    int r = 0;
    int tau = 0;
    double epsilon = 1.0;
    bool tau_optimize = false;
    std::vector<double> base;
    std::vector<double> direction;
    std::vector<double> scales;
    double lo = 0.0;
    double hi = 0.0;
    double rel_tol = 1e-3;
    ftc_flow_options fopt{};
    std::vector<double> gw_grid;
    std::string sweep_variable;
    std::vector<double> sweep_grid;
    std::vector<int> sweep_r;
    double sweep_epsilon = 1.0;
    int an_r = 1;
    int an_a = 514;
    int an_k = 1;
    int an_levels = 5;
    double an_gamma0 = std::numeric_limits<double>::quiet_NaN();
    int component = -1;
    std::vector<double> guess;
};

struct Model {
    ftc_model* h = nullptr;
    explicit Model(ftc_model* p) : h(p) {
        if (!h) throw CliError{2, ftc_last_error()};
    }
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;
    ~Model() { ftc_model_destroy(h); }
    int dim() const { return ftc_model_dim(h); }
};

Model make_model(const Config& c) {
    if (c.model == "nonlocal") return Model(ftc_model_create_nonlocal());
    if (c.tau_optimize)
        throw CliError{2, "geometry tau=\"optimize\" is only valid for sweeps"};
    if (c.r < 1 || c.tau < 1)
        throw CliError{2, "local model requires geometry r and tau "
                          "(--r/--tau or a config geometry block)"};
    return Model(ftc_model_create_local(c.r, c.tau, c.epsilon));
}

std::vector<std::string> rate_names(int dim) {
    if (dim == 5) return {"g1", "g2", "gw", "g1m", "gp"};
    return {"g1", "g2", "gw1", "gw2", "gmd", "gwd", "g1m", "gp"};
}

std::vector<double> resolve_base(const Config& c, int dim) {
    if (c.base.empty()) return std::vector<double>(dim, 0.0);
    if (static_cast<int>(c.base.size()) != dim)
        throw CliError{2, "ray base has " + std::to_string(c.base.size()) +
                              " components, model needs " + std::to_string(dim)};
    return c.base;
}

// Standard profile as a unit-scale direction. Probed at a power-of-two scale
// small enough to stay inside the unit cube, then rescaled exactly.
std::vector<double> standard_direction(const Model& m) {
    const double probe = 0x1p-30;
    std::vector<double> d(m.dim());
    check(ftc_model_standard_rates(m.h, probe, d.data()));
    for (double& v : d) v /= probe;
    return d;
}

std::vector<double> resolve_direction(const Config& c, const Model& m) {
    if (c.direction.empty()) return standard_direction(m);
    if (static_cast<int>(c.direction.size()) != m.dim())
        throw CliError{2, "ray direction has " +
                              std::to_string(c.direction.size()) +
                              " components, model needs " +
                              std::to_string(m.dim())};
    return c.direction;
}

void resolve_bracket(Config& c, const std::string& cmd) {
    const bool local = c.model == "local" || cmd == "sweep";
    if (c.lo == 0.0) c.lo = local ? 1e-7 : 1e-5;
    if (c.hi == 0.0) c.hi = cmd == "pseudothreshold" ? 5e-2 : 1e-2;
    if (!(c.lo > 0.0) || !(c.hi > c.lo) || !(c.rel_tol > 0.0))
        throw CliError{2, "bracket needs 0 < lo < hi and rel_tol > 0"};
}

void require_monotone(const std::vector<double>& grid, const std::string& what) {
    if (grid.empty()) throw CliError{2, what + " grid is empty"};
    for (double v : grid)
        if (!std::isfinite(v)) throw CliError{2, what + " grid has a non-finite entry"};
    if (grid.size() < 2) return;
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const bool ok = up ? grid[i + 1] > grid[i] : grid[i + 1] < grid[i];
        if (!ok) throw CliError{2, what + " grid must be strictly monotone"};
    }
}

template <class F>
void parallel_for(int n, int workers, F&& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex mu;
    std::exception_ptr first;
    auto run = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!first) first = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

// ---- presets -------------------------------------------------------------

void apply_preset(Config& c, const std::string& name, const std::string& cmd) {
    auto expect = [&](const char* want) {
        if (cmd != want)
            throw CliError{2, "preset " + name + " belongs to the " + want +
                                  " subcommand"};
    };
    c.model_set = true;
    if (name == "fig3") {
        expect("flow");
        c.model = "nonlocal";
        c.scales = {3.2e-4, 3.35e-4, 3.45e-4, 3.6e-4};
    } else if (name == "fig4") {
        expect("flow");
        c.model = "nonlocal";
        c.direction = {1.0, 4.0, 0.1, 2.0, 1.0};
        c.scales = {1.3e-4, 1.44e-4, 1.48e-4, 1.65e-4};
    } else if (name == "fig5") {
        expect("flow");
        c.model = "nonlocal";
        c.direction = {1.0, 0.5, 0.1, 2.0, 1.0};
        c.scales = {3.9e-4, 4.3e-4, 4.45e-4, 4.9e-4};
    } else if (name == "fig6") {
        expect("threshold-line");
        c.model = "nonlocal";
        c.direction = {1.0, 1.0, 0.0, 2.0, 1.0};
        c.gw_grid = {0.0, 1.5e-5, 3e-5, 4.5e-5, 6e-5, 7.5e-5};
    } else if (name == "fig7") {
        expect("sweep");
        c.model = "local";
        c.sweep_variable = "r";
        c.sweep_grid = {10, 20, 40, 80};
        c.sweep_epsilon = 1.0;
    } else if (name == "fig8") {
        expect("sweep");
        c.model = "local";
        c.sweep_variable = "tau";
        c.sweep_grid.clear();
        for (int t = 1; t <= 16; ++t) c.sweep_grid.push_back(t);
        c.sweep_r = {50};
        c.sweep_epsilon = 1.0;
    } else if (name == "fig9") {
        expect("sweep");
        c.model = "local";
        c.sweep_variable = "epsilon";
        c.sweep_grid = {0.01, 0.03, 0.1, 0.3, 1.0};
        c.sweep_r = {20, 50, 80};
    } else {
        throw CliError{2, "unknown preset: " + name +
                              " (known: fig3 fig4 fig5 fig6 fig7 fig8 fig9)"};
    }
}

// ---- config file ---------------------------------------------------------

double want_number(const ordered_json& j, const std::string& where) {
    if (!j.is_number()) throw CliError{2, where + " must be a number"};
    return j.get<double>();
}

int want_int(const ordered_json& j, const std::string& where) {
    if (!j.is_number_integer()) throw CliError{2, where + " must be an integer"};
    return j.get<int>();
}

std::vector<double> want_array(const ordered_json& j, const std::string& where) {
    if (!j.is_array()) throw CliError{2, where + " must be an array of numbers"};
    std::vector<double> out;
    for (const auto& v : j) out.push_back(want_number(v, where + " entry"));
    return out;
}

void check_keys(const ordered_json& j, const std::set<std::string>& known,
                const std::string& where) {
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw CliError{2, "unknown config key: " + where + item.key()};
}

void load_config(const std::string& path, Config& c) {
    std::ifstream f(path);
    if (!f) throw CliError{2, "cannot open config file: " + path};
    ordered_json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw CliError{2, std::string("config parse error: ") + e.what()};
    }
    if (!j.is_object()) throw CliError{2, "config root must be a JSON object"};
    check_keys(j,
               {"model", "geometry", "ray", "scales", "bracket", "flow",
                "threshold_line", "sweep", "analytic", "component", "guess"},
               "");
    if (j.contains("model")) {
        c.model = j["model"].get<std::string>();
        c.model_set = true;
        if (c.model != "nonlocal" && c.model != "local")
            throw CliError{2, "config model must be \"nonlocal\" or \"local\""};
    }
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        check_keys(g, {"r", "tau", "epsilon"}, "geometry.");
        if (g.contains("r")) c.r = want_int(g["r"], "geometry.r");
        if (g.contains("tau")) {
            if (g["tau"].is_string() && g["tau"].get<std::string>() == "optimize")
                c.tau_optimize = true;
            else
                c.tau = want_int(g["tau"], "geometry.tau");
        }
        if (g.contains("epsilon"))
            c.epsilon = want_number(g["epsilon"], "geometry.epsilon");
    }
    if (j.contains("ray")) {
        const auto& r = j["ray"];
        check_keys(r, {"base", "direction"}, "ray.");
        if (r.contains("base")) c.base = want_array(r["base"], "ray.base");
        if (r.contains("direction"))
            c.direction = want_array(r["direction"], "ray.direction");
    }
    if (j.contains("scales")) c.scales = want_array(j["scales"], "scales");
    if (j.contains("bracket")) {
        const auto& b = j["bracket"];
        check_keys(b, {"lo", "hi", "rel_tol"}, "bracket.");
        if (b.contains("lo")) c.lo = want_number(b["lo"], "bracket.lo");
        if (b.contains("hi")) c.hi = want_number(b["hi"], "bracket.hi");
        if (b.contains("rel_tol"))
            c.rel_tol = want_number(b["rel_tol"], "bracket.rel_tol");
    }
    if (j.contains("flow")) {
        const auto& fl = j["flow"];
        check_keys(fl, {"max_iter", "floor", "ceiling"}, "flow.");
        if (fl.contains("max_iter"))
            c.fopt.max_iter = want_int(fl["max_iter"], "flow.max_iter");
        if (fl.contains("floor"))
            c.fopt.convergence_floor = want_number(fl["floor"], "flow.floor");
        if (fl.contains("ceiling"))
            c.fopt.divergence_ceiling = want_number(fl["ceiling"], "flow.ceiling");
    }
    if (j.contains("threshold_line")) {
        const auto& t = j["threshold_line"];
        check_keys(t, {"gamma_w"}, "threshold_line.");
        if (t.contains("gamma_w"))
            c.gw_grid = want_array(t["gamma_w"], "threshold_line.gamma_w");
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        check_keys(s, {"variable", "grid", "r", "epsilon"}, "sweep.");
        if (s.contains("variable")) c.sweep_variable = s["variable"].get<std::string>();
        if (s.contains("grid")) c.sweep_grid = want_array(s["grid"], "sweep.grid");
        if (s.contains("r")) {
            c.sweep_r.clear();
            if (s["r"].is_array())
                for (const auto& v : s["r"])
                    c.sweep_r.push_back(want_int(v, "sweep.r entry"));
            else
                c.sweep_r.push_back(want_int(s["r"], "sweep.r"));
        }
        if (s.contains("epsilon"))
            c.sweep_epsilon = want_number(s["epsilon"], "sweep.epsilon");
    }
    if (j.contains("analytic")) {
        const auto& a = j["analytic"];
        check_keys(a, {"r", "a_lc", "k", "gamma0", "levels"}, "analytic.");
        if (a.contains("r")) c.an_r = want_int(a["r"], "analytic.r");
        if (a.contains("a_lc")) c.an_a = want_int(a["a_lc"], "analytic.a_lc");
        if (a.contains("k")) c.an_k = want_int(a["k"], "analytic.k");
        if (a.contains("gamma0"))
            c.an_gamma0 = want_number(a["gamma0"], "analytic.gamma0");
        if (a.contains("levels")) c.an_levels = want_int(a["levels"], "analytic.levels");
    }
    if (j.contains("component")) c.component = want_int(j["component"], "component");
    if (j.contains("guess")) c.guess = want_array(j["guess"], "guess");
}

ordered_json dump_config(const Config& c, const std::string& cmd) {
    ordered_json j;
    j["model"] = c.model;
    if (c.model == "local" && cmd != "sweep") {
        ordered_json g;
        g["r"] = c.r;
        if (c.tau_optimize)
            g["tau"] = "optimize";
        else
            g["tau"] = c.tau;
        g["epsilon"] = c.epsilon;
        j["geometry"] = g;
    }
    if (!c.base.empty() || !c.direction.empty()) {
        ordered_json r;
        if (!c.base.empty()) r["base"] = c.base;
        if (!c.direction.empty()) r["direction"] = c.direction;
        j["ray"] = r;
    }
    if (cmd == "flow" && !c.scales.empty()) j["scales"] = c.scales;
    if (cmd == "threshold" || cmd == "threshold-line" || cmd == "pseudothreshold" ||
        cmd == "sweep") {
        j["bracket"] = {{"lo", c.lo}, {"hi", c.hi}, {"rel_tol", c.rel_tol}};
    }
    if (cmd == "flow" || cmd == "threshold" || cmd == "threshold-line" ||
        cmd == "sweep") {
        j["flow"] = {{"max_iter", c.fopt.max_iter},
                     {"floor", c.fopt.convergence_floor},
                     {"ceiling", c.fopt.divergence_ceiling}};
    }
    if (cmd == "threshold-line") j["threshold_line"] = {{"gamma_w", c.gw_grid}};
    if (cmd == "sweep") {
        ordered_json s;
        s["variable"] = c.sweep_variable;
        s["grid"] = c.sweep_grid;
        if (!c.sweep_r.empty()) s["r"] = c.sweep_r;
        s["epsilon"] = c.sweep_epsilon;
        j["sweep"] = s;
    }
    if (cmd == "analytic") {
        ordered_json a;
        a["r"] = c.an_r;
        a["a_lc"] = c.an_a;
        a["k"] = c.an_k;
        if (!std::isnan(c.an_gamma0)) a["gamma0"] = c.an_gamma0;
        a["levels"] = c.an_levels;
        j["analytic"] = a;
    }
    if (cmd == "pseudothreshold") j["component"] = c.component;
    if (!c.guess.empty() && (cmd == "fixed-point" || cmd == "flow"))
        j["guess"] = c.guess;
    return j;
}

// ---- output --------------------------------------------------------------

struct Output {
    std::string text;
    std::string gnuplot;
};

std::string csv_prologue(const std::string& cmd) {
    std::string s = "# ftcalc ";
    s += ftc_version();
    s += "\n# command: " + cmd + "\n";
    return s;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError{2, "cannot open output file: " + path};
    f << text;
    if (!f) throw CliError{2, "write failed: " + path};
}

void emit(const Output& out, const std::string& out_path, bool json) {
    if (out_path.empty()) {
        std::fputs(out.text.c_str(), stdout);
        return;
    }
    write_file(out_path, out.text);
    if (!json && !out.gnuplot.empty()) write_file(out_path + ".gnuplot", out.gnuplot);
}

std::string gnuplot_header(const std::string& csv_path) {
    std::string s = "# gnuplot script generated by ftcalc ";
    s += ftc_version();
    s += "\nset datafile separator \",\"\nset datafile missing \"nan\"\n";
    s += "csv = \"" + csv_path + "\"\n";
    return s;
}

// ---- subcommands ----------------------------------------------------------

Output cmd_flow(const Config& cfg, bool json, const std::string& out_path) {
    const Model m = make_model(cfg);
    const int dim = m.dim();
    if (cfg.scales.empty())
        throw CliError{2, "flow needs starting scales (--scale, a preset, or a "
                          "config \"scales\" array)"};
    for (double s : cfg.scales)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw CliError{2, "flow scales must be finite and nonnegative"};
    const auto base = resolve_base(cfg, dim);
    const auto dir = resolve_direction(cfg, m);
    const auto names = rate_names(dim);

    struct ScaleRun {
        double scale;
        int classification;
        int iterations;
        std::vector<std::vector<double>> levels;  // rates then alpha, beta
    };
    std::vector<ScaleRun> runs;
    for (double s : cfg.scales) {
        ScaleRun run;
        run.scale = s;
        std::vector<double> cur(dim);
        for (int i = 0; i < dim; ++i) cur[i] = base[i] + s * dir[i];
        check(ftc_classify(m.h, cur.data(), &cfg.fopt, &run.classification,
                           &run.iterations));
        for (int lvl = 0; lvl < run.iterations; ++lvl) {
            double alpha, beta, danc;
            check(ftc_model_stats(m.h, cur.data(), &alpha, &beta, &danc));
            std::vector<double> row = cur;
            row.push_back(alpha);
            row.push_back(beta);
            run.levels.push_back(std::move(row));
            if (lvl + 1 < run.iterations) {
                std::vector<double> next(dim);
                check(ftc_model_step(m.h, cur.data(), next.data()));
                cur = next;
            }
        }
        runs.push_back(std::move(run));
    }

    bool have_fp = false;
    std::vector<double> fp_loc(dim), fp_eigs(dim);
    double fp_res = 0.0;
    int fp_unstable = 0;
    std::vector<double> guess = cfg.guess;
    if (guess.empty() && cfg.model == "nonlocal")
        guess = {7e-5, 1.5e-4, 7e-5, 7e-5, 7e-5};
    if (!guess.empty()) {
        if (static_cast<int>(guess.size()) != dim)
            throw CliError{2, "guess has " + std::to_string(guess.size()) +
                                  " components, model needs " + std::to_string(dim)};
        check(ftc_fixed_point(m.h, guess.data(), fp_loc.data(), &fp_res,
                              fp_eigs.data(), &fp_unstable));
        have_fp = true;
    }

    const char* cls_name[] = {"below", "above", "undecided"};
    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "flow";
        j["model"] = cfg.model;
        ordered_json cols = ordered_json::array({"scale", "level"});
        for (const auto& n : names) cols.push_back(n);
        cols.push_back("alpha");
        cols.push_back("beta");
        j["columns"] = cols;
        ordered_json rows = ordered_json::array();
        for (const auto& run : runs)
            for (std::size_t lvl = 0; lvl < run.levels.size(); ++lvl) {
                ordered_json row = ordered_json::array();
                row.push_back(run.scale);
                row.push_back(static_cast<int>(lvl));
                for (double v : run.levels[lvl]) row.push_back(v);
                rows.push_back(std::move(row));
            }
        j["rows"] = rows;
        ordered_json cl = ordered_json::array();
        for (const auto& run : runs)
            cl.push_back({{"scale", run.scale},
                          {"classification", cls_name[run.classification]},
                          {"iterations", run.iterations}});
        j["classifications"] = cl;
        if (have_fp)
            j["fixed_point"] = {{"location", fp_loc},
                                {"residual", fp_res},
                                {"eigenvalue_magnitudes", fp_eigs},
                                {"unstable_count", fp_unstable}};
        out.text = j.dump(2) + "\n";
        return out;
    }

    std::string& t = out.text;
    t = csv_prologue("flow");
    t += "scale,level";
    for (const auto& n : names) t += "," + n;
    t += ",alpha,beta\n";
    for (const auto& run : runs)
        for (std::size_t lvl = 0; lvl < run.levels.size(); ++lvl) {
            t += d17(run.scale) + "," + std::to_string(lvl);
            for (double v : run.levels[lvl]) t += "," + d17(v);
            t += "\n";
        }
    for (const auto& run : runs)
        t += "# classification scale=" + d17(run.scale) + " result=" +
             cls_name[run.classification] +
             " iterations=" + std::to_string(run.iterations) + "\n";
    if (have_fp) {
        t += "# fixed_point location=";
        for (int i = 0; i < dim; ++i) t += (i ? "," : "") + d17(fp_loc[i]);
        t += " residual=" + d17(fp_res) + " eigenvalue_magnitudes=";
        for (int i = 0; i < dim; ++i) t += (i ? "," : "") + d17(fp_eigs[i]);
        t += " unstable_count=" + std::to_string(fp_unstable) + "\n";
    }

    if (!out_path.empty()) {
        std::string g = gnuplot_header(out_path);
        g += "set logscale xy\nset xlabel \"gamma_1\"\nset ylabel \"gamma_2\"\n";
        g += "set key outside\nplot ";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (i) g += ", \\\n     ";
            const std::string s = d17(runs[i].scale);
            g += "csv using ($1==" + s + "?$3:1/0):4 with linespoints title \"" +
                 s + "\"";
        }
        g += "\n";
        out.gnuplot = g;
    }
    return out;
}

Output cmd_threshold(Config cfg, bool json) {
    const Model m = make_model(cfg);
    const auto base = resolve_base(cfg, m.dim());
    const auto dir = resolve_direction(cfg, m);
    double scale = 0.0;
    int undecided = 0;
    check(ftc_threshold(m.h, base.data(), dir.data(), cfg.lo, cfg.hi, cfg.rel_tol,
                        &cfg.fopt, &scale, &undecided));
    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "threshold";
        j["model"] = cfg.model;
        j["lo"] = cfg.lo;
        j["hi"] = cfg.hi;
        j["rel_tol"] = cfg.rel_tol;
        j["scale"] = scale;
        j["undecided"] = undecided != 0;
        out.text = j.dump(2) + "\n";
    } else {
        out.text = csv_prologue("threshold") + "lo,hi,rel_tol,scale,undecided\n" +
                   d17(cfg.lo) + "," + d17(cfg.hi) + "," + d17(cfg.rel_tol) + "," +
                   d17(scale) + "," + std::to_string(undecided) + "\n";
    }
    return out;
}

Output cmd_threshold_line(const Config& cfg, bool json, int workers,
                          const std::string& out_path) {
    if (cfg.model != "nonlocal")
        throw CliError{2, "threshold-line is defined for the nonlocal model"};
    require_monotone(cfg.gw_grid, "threshold_line.gamma_w");
    std::vector<double> dir = cfg.direction;
    if (dir.empty()) dir = {1.0, 1.0, 0.0, 2.0, 1.0};
    if (dir.size() != 5) throw CliError{2, "ray direction needs 5 components"};
    std::vector<double> base0 = cfg.base.empty()
                                    ? std::vector<double>(5, 0.0)
                                    : cfg.base;
    if (base0.size() != 5) throw CliError{2, "ray base needs 5 components"};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double pseudo_hi = std::max(cfg.hi, 5e-2);

    struct Cell {
        double gw, threshold, pg1, pg2, pgw;
        int undecided;
    };
    std::vector<Cell> cells(cfg.gw_grid.size());
    parallel_for(static_cast<int>(cfg.gw_grid.size()), workers, [&](int i) {
        const Model m(ftc_model_create_nonlocal());
        std::vector<double> base = base0;
        base[2] = cfg.gw_grid[static_cast<std::size_t>(i)];
        Cell c{base[2], nan, nan, nan, nan, 0};
        double scale = 0.0;
        int undecided = 0;
        ftc_flow_options fopt = cfg.fopt;
        if (ftc_threshold(m.h, base.data(), dir.data(), cfg.lo, cfg.hi,
                          cfg.rel_tol, &fopt, &scale, &undecided) == FTC_OK) {
            c.threshold = scale;
            c.undecided = undecided;
        }
        // The pseudothreshold curves bend into the origin: close to the axis
        // the component first rises, so the sign change sits above a dip.
        // Escalate the lower bracket decade by decade before flagging.
        double* slots[] = {&c.pg1, &c.pg2, &c.pgw};
        const int comps[] = {0, 1, 2};
        for (int k = 0; k < 3; ++k) {
            for (double plo = cfg.lo; plo < pseudo_hi; plo *= 10.0) {
                double ps = 0.0;
                if (ftc_pseudothreshold(m.h, base.data(), dir.data(), comps[k],
                                        plo, pseudo_hi, cfg.rel_tol,
                                        &ps) == FTC_OK) {
                    *slots[k] = ps;
                    break;
                }
            }
        }
        cells[static_cast<std::size_t>(i)] = c;
    });

    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "threshold-line";
        j["columns"] = {"gamma_w", "threshold", "undecided",
                        "pseudo_g1", "pseudo_g2", "pseudo_gw"};
        ordered_json rows = ordered_json::array();
        for (const auto& c : cells)
            rows.push_back({c.gw, c.threshold, c.undecided, c.pg1, c.pg2, c.pgw});
        j["rows"] = rows;
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::string& t = out.text;
    t = csv_prologue("threshold-line");
    t += "gamma_w,threshold,undecided,pseudo_g1,pseudo_g2,pseudo_gw\n";
    for (const auto& c : cells)
        t += d17(c.gw) + "," + d17(c.threshold) + "," + std::to_string(c.undecided) +
             "," + d17(c.pg1) + "," + d17(c.pg2) + "," + d17(c.pgw) + "\n";
    if (!out_path.empty()) {
        std::string g = gnuplot_header(out_path);
        g += "set logscale y\nset xlabel \"gamma_w\"\nset ylabel \"gamma_else\"\n";
        g += "set key outside\n";
        g += "plot csv using 1:2 with linespoints title \"threshold\", \\\n"
             "     csv using 1:4 with linespoints title \"pseudo g1\", \\\n"
             "     csv using 1:5 with linespoints title \"pseudo g2\", \\\n"
             "     csv using 1:6 with linespoints title \"pseudo gw\"\n";
        out.gnuplot = g;
    }
    return out;
}

Output cmd_fixed_point(const Config& cfg, bool json) {
    const Model m = make_model(cfg);
    const int dim = m.dim();
    std::vector<double> guess = cfg.guess;
    if (guess.empty()) {
        if (cfg.model != "nonlocal")
            throw CliError{2, "fixed-point on the local model needs a guess "
                              "(--guess or a config \"guess\" array)"};
        guess = {7e-5, 1.5e-4, 7e-5, 7e-5, 7e-5};
    }
    if (static_cast<int>(guess.size()) != dim)
        throw CliError{2, "guess has " + std::to_string(guess.size()) +
                              " components, model needs " + std::to_string(dim)};
    std::vector<double> loc(dim), eigs(dim);
    double res = 0.0;
    int unstable = 0;
    check(ftc_fixed_point(m.h, guess.data(), loc.data(), &res, eigs.data(),
                          &unstable));
    const auto names = rate_names(dim);
    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "fixed-point";
        j["model"] = cfg.model;
        j["guess"] = guess;
        j["location"] = loc;
        j["residual"] = res;
        j["eigenvalue_magnitudes"] = eigs;
        j["unstable_count"] = unstable;
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::string& t = out.text;
    t = csv_prologue("fixed-point");
    for (const auto& n : names) t += n + ",";
    t += "residual";
    for (int i = 0; i < dim; ++i) t += ",eig" + std::to_string(i + 1);
    t += ",unstable_count\n";
    for (int i = 0; i < dim; ++i) t += d17(loc[i]) + ",";
    t += d17(res);
    for (int i = 0; i < dim; ++i) t += "," + d17(eigs[i]);
    t += "," + std::to_string(unstable) + "\n";
    return out;
}

Output cmd_pseudothreshold(const Config& cfg, bool json) {
    const Model m = make_model(cfg);
    if (cfg.component < 0)
        throw CliError{2, "pseudothreshold needs --component (0-based rate index)"};
    const auto base = resolve_base(cfg, m.dim());
    const auto dir = resolve_direction(cfg, m);
    double scale = 0.0;
    check(ftc_pseudothreshold(m.h, base.data(), dir.data(), cfg.component, cfg.lo,
                              cfg.hi, cfg.rel_tol, &scale));
    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "pseudothreshold";
        j["model"] = cfg.model;
        j["component"] = cfg.component;
        j["lo"] = cfg.lo;
        j["hi"] = cfg.hi;
        j["rel_tol"] = cfg.rel_tol;
        j["scale"] = scale;
        out.text = j.dump(2) + "\n";
    } else {
        out.text = csv_prologue("pseudothreshold") +
                   "component,lo,hi,rel_tol,scale\n" +
                   std::to_string(cfg.component) + "," + d17(cfg.lo) + "," +
                   d17(cfg.hi) + "," + d17(cfg.rel_tol) + "," + d17(scale) + "\n";
    }
    return out;
}

Output cmd_sweep(const Config& cfg, bool json, int workers,
                 const std::string& out_path) {
    if (cfg.model == "nonlocal")
        throw CliError{2, "sweep drives the local model; drop --model nonlocal"};
    const std::string& var = cfg.sweep_variable;
    if (var != "r" && var != "tau" && var != "epsilon")
        throw CliError{2, "sweep variable must be one of r, tau, epsilon"};
    require_monotone(cfg.sweep_grid, "sweep");

    auto grid_int = [&](const char* what) {
        std::vector<int> out;
        for (double v : cfg.sweep_grid) {
            const int iv = static_cast<int>(v);
            if (v != iv || iv < 1)
                throw CliError{2, std::string(what) + " grid entries must be "
                                  "positive integers"};
            out.push_back(iv);
        }
        return out;
    };

    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
    bool have_slope = false;
    double slope = 0.0;

    if (var == "r") {
        const auto rs = grid_int("r");
        cols = {"r", "tau", "threshold"};
        rows.assign(rs.size(), {});
        parallel_for(static_cast<int>(rs.size()), workers, [&](int i) {
            int tau_star = 0;
            double thr = 0.0;
            check(ftc_optimize_tau(rs[static_cast<std::size_t>(i)],
                                   cfg.sweep_epsilon, 1, 0, cfg.lo, cfg.hi,
                                   cfg.rel_tol, &cfg.fopt, &tau_star, &thr));
            rows[static_cast<std::size_t>(i)] = {
                static_cast<double>(rs[static_cast<std::size_t>(i)]),
                static_cast<double>(tau_star), thr};
        });
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(rows.size());
        for (const auto& row : rows) {
            const double x = std::log(row[0]), y = std::log(row[2]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        if (rows.size() >= 2) {
            slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            have_slope = true;
        }
    } else if (var == "tau") {
        if (cfg.sweep_r.size() != 1)
            throw CliError{2, "tau sweep needs a single r (--r or sweep.r)"};
        const int r = cfg.sweep_r[0];
        const auto taus = grid_int("tau");
        cols = {"tau", "threshold", "undecided"};
        rows.assign(taus.size(), {});
        parallel_for(static_cast<int>(taus.size()), workers, [&](int i) {
            const int tau = taus[static_cast<std::size_t>(i)];
            const Model m(ftc_model_create_local(r, tau, cfg.sweep_epsilon));
            const std::vector<double> dir = standard_direction(m);
            const std::vector<double> base(8, 0.0);
            double thr = 0.0;
            int undecided = 0;
            ftc_flow_options fopt = cfg.fopt;
            check(ftc_threshold(m.h, base.data(), dir.data(), cfg.lo, cfg.hi,
                                cfg.rel_tol, &fopt, &thr, &undecided));
            rows[static_cast<std::size_t>(i)] = {static_cast<double>(tau), thr,
                                                 static_cast<double>(undecided)};
        });
    } else {
        if (cfg.sweep_r.empty())
            throw CliError{2, "epsilon sweep needs r values (--r or sweep.r)"};
        for (double e : cfg.sweep_grid)
            if (!(e >= 0.0))
                throw CliError{2, "epsilon grid entries must be nonnegative"};
        cols = {"r", "epsilon", "tau", "threshold"};
        const int ncells = static_cast<int>(cfg.sweep_r.size() *
                                            cfg.sweep_grid.size());
        rows.assign(static_cast<std::size_t>(ncells), {});
        parallel_for(ncells, workers, [&](int i) {
            const std::size_t ir = static_cast<std::size_t>(i) /
                                   cfg.sweep_grid.size();
            const std::size_t ie = static_cast<std::size_t>(i) %
                                   cfg.sweep_grid.size();
            const int r = cfg.sweep_r[ir];
            const double eps = cfg.sweep_grid[ie];
            int tau_star = 0;
            double thr = 0.0;
            check(ftc_optimize_tau(r, eps, 1, 0, cfg.lo, cfg.hi, cfg.rel_tol,
                                   &cfg.fopt, &tau_star, &thr));
            rows[static_cast<std::size_t>(i)] = {static_cast<double>(r), eps,
                                                 static_cast<double>(tau_star), thr};
        });
    }

    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "sweep";
        j["variable"] = var;
        j["columns"] = cols;
        ordered_json jrows = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json jr = ordered_json::array();
            for (std::size_t k = 0; k < row.size(); ++k) {
                const bool integral = cols[k] == "r" || cols[k] == "tau" ||
                                      cols[k] == "undecided";
                if (integral)
                    jr.push_back(static_cast<int>(row[k]));
                else
                    jr.push_back(row[k]);
            }
            jrows.push_back(std::move(jr));
        }
        j["rows"] = jrows;
        if (have_slope) j["slope"] = slope;
        out.text = j.dump(2) + "\n";
        return out;
    }

    std::string& t = out.text;
    t = csv_prologue("sweep");
    t += "# variable: " + var + "\n";
    for (std::size_t k = 0; k < cols.size(); ++k) t += (k ? "," : "") + cols[k];
    t += "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) t += ",";
            const bool integral = cols[k] == "r" || cols[k] == "tau" ||
                                  cols[k] == "undecided";
            t += integral ? std::to_string(static_cast<int>(row[k])) : d17(row[k]);
        }
        t += "\n";
    }
    if (have_slope) t += "# slope=" + d17(slope) + "\n";

    if (!out_path.empty()) {
        std::string g = gnuplot_header(out_path);
        if (var == "r") {
            g += "set logscale xy\nset xlabel \"r\"\nset ylabel \"threshold\"\n";
            g += "plot csv using 1:3 with linespoints title \"threshold\"\n";
        } else if (var == "tau") {
            g += "set xlabel \"tau\"\nset ylabel \"threshold\"\n";
            g += "plot csv using 1:2 with linespoints title \"threshold\"\n";
        } else {
            g += "set logscale x\nset xlabel \"epsilon\"\nset ylabel "
                 "\"threshold\"\nset key outside\nplot ";
            for (std::size_t i = 0; i < cfg.sweep_r.size(); ++i) {
                if (i) g += ", \\\n     ";
                const std::string rs = std::to_string(cfg.sweep_r[i]);
                g += "csv using ($1==" + rs + "?$2:1/0):4 with linespoints title "
                     "\"r=" + rs + "\"";
            }
            g += "\n";
        }
        out.gnuplot = g;
    }
    return out;
}

Output cmd_analytic(const Config& cfg, bool json) {
    double gcrit = 0.0;
    check(ftc_gamma_crit(cfg.an_r, cfg.an_a, cfg.an_k, &gcrit));
    const bool have_g0 = !std::isnan(cfg.an_gamma0);
    std::vector<double> levels;
    double delta = 0.0;
    if (have_g0) {
        if (cfg.an_gamma0 >= gcrit)
            throw CliError{2, "gamma0 = " + d17(cfg.an_gamma0) +
                                  " is above analytic threshold gamma_crit = " +
                                  d17(gcrit)};
        if (cfg.an_levels < 1) throw CliError{2, "levels must be at least 1"};
        levels.resize(static_cast<std::size_t>(cfg.an_levels));
        check(ftc_sparse_prob_lower_bound(cfg.an_gamma0, cfg.an_r, cfg.an_a,
                                          cfg.an_k, cfg.an_levels, levels.data(),
                                          &delta));
    }
    Output out;
    if (json) {
        ordered_json j;
        j["ftcalc"] = ftc_version();
        j["command"] = "analytic";
        j["r"] = cfg.an_r;
        j["a_lc"] = cfg.an_a;
        j["k"] = cfg.an_k;
        j["gamma_crit"] = gcrit;
        if (have_g0) {
            j["gamma0"] = cfg.an_gamma0;
            j["delta"] = delta;
            j["p_levels"] = levels;
        }
        out.text = j.dump(2) + "\n";
        return out;
    }
    std::string& t = out.text;
    t = csv_prologue("analytic");
    t += "# r=" + std::to_string(cfg.an_r) + " a_lc=" + std::to_string(cfg.an_a) +
         " k=" + std::to_string(cfg.an_k) + "\n";
    t += "# gamma_crit=" + d17(gcrit) + "\n";
    if (have_g0) {
        t += "# gamma0=" + d17(cfg.an_gamma0) + "\n";
        t += "# delta=" + d17(delta) + "\n";
    }
    t += "level,p_lower\n";
    for (std::size_t i = 0; i < levels.size(); ++i)
        t += std::to_string(i + 1) + "," + d17(levels[i]) + "\n";
    return out;
}

Output cmd_catalog() {
    char* s = ftc_catalog_json();
    if (!s) throw CliError{3, ftc_last_error()};
    Output out;
    out.text = s;
    if (out.text.empty() || out.text.back() != '\n') out.text += "\n";
    ftc_string_free(s);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold calculus for the concatenated [[7,1,3]] code"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ftc_version());

    struct Flags {
        std::string model, preset, config, out, format = "csv", dump_config;
        int workers = 1;
        bool seedless = false;
        int r = 0, tau = 0;
        double epsilon = 1.0;
        std::vector<double> base, direction, scales, grid, gamma_w, guess;
        double lo = 0.0, hi = 0.0, rel_tol = 1e-3;
        int component = -1;
        std::string variable;
        std::vector<int> sweep_r;
        int an_r = 1, an_a = 514, an_k = 1, an_levels = 5;
        double an_gamma0 = std::numeric_limits<double>::quiet_NaN();
    } f;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", f.model, "nonlocal or local")
            ->check(CLI::IsMember({"nonlocal", "local"}));
        sub->add_option("--preset", f.preset, "named experiment (fig3..fig9)");
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--out", f.out, "output path (default stdout)");
        sub->add_option("--format", f.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--workers", f.workers, "worker threads for sweeps")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--seedless", f.seedless,
                      "reserved; every computation is already deterministic");
        sub->add_option("--dump-config", f.dump_config,
                        "write the effective config to this path");
    };
    auto add_geometry = [&](CLI::App* sub) {
        sub->add_option("--r", f.r, "local model: separation r");
        sub->add_option("--tau", f.tau, "local model: EC insertion period");
        sub->add_option("--epsilon", f.epsilon, "local model: movement noise");
    };
    auto add_ray = [&](CLI::App* sub) {
        sub->add_option("--base", f.base, "ray base point")->delimiter(',');
        sub->add_option("--direction", f.direction, "ray direction")
            ->delimiter(',');
    };
    auto add_bracket = [&](CLI::App* sub) {
        sub->add_option("--lo", f.lo, "bisection bracket low end");
        sub->add_option("--hi", f.hi, "bisection bracket high end");
        sub->add_option("--rel-tol", f.rel_tol, "bisection relative tolerance");
    };

    CLI::App* flow = app.add_subcommand("flow", "concatenation trajectories");
    add_common(flow);
    add_geometry(flow);
    add_ray(flow);
    flow->add_option("--scale", f.scales, "starting scale along the ray")
        ->delimiter(',');
    flow->add_option("--guess", f.guess, "fixed point guess for the footer")
        ->delimiter(',');

    CLI::App* thr = app.add_subcommand("threshold", "bisect the threshold scale");
    add_common(thr);
    add_geometry(thr);
    add_ray(thr);
    add_bracket(thr);

    CLI::App* line = app.add_subcommand(
        "threshold-line", "threshold and pseudothresholds on a gamma_w grid");
    add_common(line);
    add_ray(line);
    add_bracket(line);
    line->add_option("--gamma-w", f.gamma_w, "gamma_w grid")->delimiter(',');

    CLI::App* fp = app.add_subcommand("fixed-point", "damped Newton fixed point");
    add_common(fp);
    add_geometry(fp);
    fp->add_option("--guess", f.guess, "starting guess")->delimiter(',');

    CLI::App* pseudo = app.add_subcommand(
        "pseudothreshold", "scale where one map application stops helping");
    add_common(pseudo);
    add_geometry(pseudo);
    add_ray(pseudo);
    add_bracket(pseudo);
    pseudo->add_option("--component", f.component, "rate component (0-based)");

    CLI::App* sweep = app.add_subcommand("sweep", "r / tau / epsilon sweeps");
    add_common(sweep);
    add_bracket(sweep);
    sweep->add_option("--variable", f.variable, "r, tau, or epsilon")
        ->check(CLI::IsMember({"r", "tau", "epsilon"}));
    sweep->add_option("--grid", f.grid, "sweep grid")->delimiter(',');
    sweep->add_option("--r", f.sweep_r, "base r value(s)")->delimiter(',');
    sweep->add_option("--epsilon", f.epsilon, "movement noise for r/tau sweeps");

    CLI::App* analytic = app.add_subcommand("analytic", "locality lower bound");
    add_common(analytic);
    analytic->add_option("--r", f.an_r, "scale parameter r");
    analytic->add_option("--a-lc", f.an_a, "rectangle location count");
    analytic->add_option("--k", f.an_k, "independent-fault order k");
    analytic->add_option("--gamma0", f.an_gamma0, "physical rate gamma_0");
    analytic->add_option("--levels", f.an_levels, "levels to bound");

    CLI::App* catalog = app.add_subcommand("catalog", "circuit catalog as JSON");
    add_common(catalog);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    auto supplied = [&](const char* name) {
        const CLI::Option* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };

    try {
        if (f.seedless)
            throw CliError{2, "--seedless is reserved: there is no randomness "
                              "to disable"};

        Config cfg;
        if (supplied("--preset")) apply_preset(cfg, f.preset, cmd);
        if (supplied("--config")) load_config(f.config, cfg);
        if (supplied("--model")) {
            cfg.model = f.model;
            cfg.model_set = true;
        }
        if (supplied("--r")) {
            if (cmd == "analytic")
                cfg.an_r = f.an_r;
            else if (cmd == "sweep")
                cfg.sweep_r = f.sweep_r;
            else
                cfg.r = f.r;
        }
        if (supplied("--tau")) cfg.tau = f.tau;
        if (supplied("--epsilon")) {
            if (cmd == "sweep")
                cfg.sweep_epsilon = f.epsilon;
            else
                cfg.epsilon = f.epsilon;
        }
        if (supplied("--base")) cfg.base = f.base;
        if (supplied("--direction")) cfg.direction = f.direction;
        if (supplied("--scale")) cfg.scales = f.scales;
        if (supplied("--guess")) cfg.guess = f.guess;
        if (supplied("--lo")) cfg.lo = f.lo;
        if (supplied("--hi")) cfg.hi = f.hi;
        if (supplied("--rel-tol")) cfg.rel_tol = f.rel_tol;
        if (supplied("--gamma-w")) cfg.gw_grid = f.gamma_w;
        if (supplied("--component")) cfg.component = f.component;
        if (supplied("--variable")) cfg.sweep_variable = f.variable;
        if (supplied("--grid")) cfg.sweep_grid = f.grid;
        if (supplied("--a-lc")) cfg.an_a = f.an_a;
        if (supplied("--k")) cfg.an_k = f.an_k;
        if (supplied("--gamma0")) cfg.an_gamma0 = f.an_gamma0;
        if (supplied("--levels")) cfg.an_levels = f.an_levels;

        ftc_flow_options defaults;
        ftc_flow_options_default(&defaults);
        if (cfg.fopt.max_iter == 0) cfg.fopt.max_iter = defaults.max_iter;
        if (cfg.fopt.convergence_floor == 0.0)
            cfg.fopt.convergence_floor = defaults.convergence_floor;
        if (cfg.fopt.divergence_ceiling == 0.0)
            cfg.fopt.divergence_ceiling = defaults.divergence_ceiling;
        if (cmd == "sweep" && !cfg.model_set) cfg.model = "local";
        if (cmd == "threshold" || cmd == "threshold-line" ||
            cmd == "pseudothreshold" || cmd == "sweep")
            resolve_bracket(cfg, cmd);

        const bool json = f.format == "json";
        if (cmd == "catalog" && supplied("--format") && !json)
            throw CliError{2, "catalog output is JSON only"};

        if (!f.dump_config.empty())
            write_file(f.dump_config, dump_config(cfg, cmd).dump(2) + "\n");

        Output out;
        if (cmd == "flow")
            out = cmd_flow(cfg, json, f.out);
        else if (cmd == "threshold")
            out = cmd_threshold(cfg, json);
        else if (cmd == "threshold-line")
            out = cmd_threshold_line(cfg, json, f.workers, f.out);
        else if (cmd == "fixed-point")
            out = cmd_fixed_point(cfg, json);
        else if (cmd == "pseudothreshold")
            out = cmd_pseudothreshold(cfg, json);
        else if (cmd == "sweep")
            out = cmd_sweep(cfg, json, f.workers, f.out);
        else if (cmd == "analytic")
            out = cmd_analytic(cfg, json);
        else
            out = cmd_catalog();
        emit(out, f.out, json);
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.msg.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
