#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpconv/cli.hpp"
#include "warpconv/errors.hpp"
#include "warpconv/geodesy.hpp"
#include "warpconv/io.hpp"

namespace warpconv {

namespace {

std::vector<double> parse_numbers(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
            throw InvalidInput(std::string(what) + ": not a number list: " + s);
        }
        out.push_back(v);
    }
    if (out.empty()) throw InvalidInput(std::string(what) + ": empty list");
    return out;
}

std::vector<int> parse_js(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_numbers(s, "--j")) {
        if (v < 1 || v != std::floor(v) || v > 1 << 20) throw InvalidInput("--j entries must be positive integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

SurfacePoint parse_point(const std::string& s, const char* what) {
    const auto v = parse_numbers(s, what);
    if (v.size() != 2) throw InvalidInput(std::string(what) + " expects r,theta");
    return {v[0], v[1]};
}

GridSpec parse_grid(const std::string& s) {
    const auto v = parse_numbers(s, "--grid");
    if (v.size() != 3) throw InvalidInput("--grid expects n_r,n_theta,k");
    GridSpec g;
    g.n_r = static_cast<int>(v[0]);
    g.n_theta = static_cast<int>(v[1]);
    g.k = static_cast<int>(v[2]);
    if (g.n_r < 2 || g.n_theta < 2 || g.k < 1) throw InvalidInput("--grid sizes out of range");
    return g;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path);
}

// Inline JSON text, or @path to read it from a file.
Json parse_json_arg(const std::string& s) {
    return Json::parse(!s.empty() && s[0] == '@' ? read_file(s.substr(1)) : s);
}

SequenceFamily make_family(const std::string& name, std::optional<double> h0, double level, const std::string& base) {
    SequenceFamily f;
    f.kind = parse_family(name);
    const bool cinch = f.kind == FamilyKind::CinchedTorus || f.kind == FamilyKind::MovingCinch;
    f.h0 = h0 ? *h0 : (cinch ? 0.5 : 2.0);
    f.level = level;
    if (base != "interval" && base != "circle") throw InvalidInput("--base must be interval or circle");
    f.base_shape = base == "circle" ? BaseSpace::Kind::Circle : BaseSpace::Kind::Interval;
    f.validate();
    return f;
}

GeodesicResult best_geodesic(const WarpedSpace& space, const SurfacePoint& p, const SurfacePoint& q,
                             const std::string& method, const GridSpec& grid) {
    if (method == "grid") return grid_distance(space, grid, p, q);
    GeodesicResult r = clairaut_distance(space, p, q);
    if (method == "clairaut" || r.converged) return r;
    return grid_distance(space, grid, p, q);
}

// Options shared by converge and audit.
struct FamilyArgs {
    std::string scenario;
    std::string family = "single-ridge";
    std::string j = "4,8,16,32";
    double h0 = 0.0;
    double level = 1.0;
    std::string base = "interval";
    std::string grid;
    std::uint64_t seed = 0;
    int sources = 16;
    int targets = 8;
    bool no_audit = false;
    std::string csv, json, svg;

    void add(CLI::App* app) {
        app->add_option("--scenario", scenario, "scenario JSON file");
        app->add_option("--family", family, "sequence family, e.g. single-ridge");
        app->add_option("--j", j, "comma-separated indices");
        app->add_option("--h0", h0, "cinch depth or ridge height");
        app->add_option("--level", level, "level of the constant family");
        app->add_option("--base", base, "interval or circle");
        app->add_option("--grid", grid, "n_r,n_theta,k (default per family and j)");
        app->add_option("--seed", seed, "sample plan seed");
        app->add_option("--sources", sources, "Halton sources");
        app->add_option("--targets", targets, "Halton targets per source");
        app->add_flag("--no-audit", no_audit, "skip theorem-bound audits");
        app->add_option("--csv", csv, "CSV output path (default stdout)");
        app->add_option("--json", json, "JSON report path");
        app->add_option("--svg", svg, "SVG plot path");
    }

    // Explicit flags override scenario values.
    Scenario resolve(const CLI::App* app) const {
        Scenario s;
        if (!scenario.empty()) s = scenario_from_json(Json::parse(read_file(scenario)));
        auto given = [&](const char* name) { return app->count(name) > 0; };
        if (scenario.empty() || given("--family")) s.family = family;
        if (scenario.empty() || given("--j")) s.j_list = parse_js(j);
        if (given("--h0")) s.h0 = h0;
        if (given("--level")) s.level = level;
        if (given("--base")) s.base = base;
        if (given("--grid")) s.grid = parse_grid(grid);
        if (given("--seed")) s.plan.seed = seed;
        if (given("--sources")) s.plan.sources = sources;
        if (given("--targets")) s.plan.targets = targets;
        if (no_audit) s.audit = false;
        if (given("--csv")) s.csv = csv;
        if (given("--json")) s.json = json;
        if (given("--svg")) s.svg = svg;
        if (s.plan.sources < 1 || s.plan.targets < 1) throw InvalidInput("sources and targets must be positive");
        return s;
    }
};

void emit_report(const ConvergenceReport& report, const Scenario& s, std::ostream& out) {
    const std::string csv = report_csv(report);
    if (s.csv.empty()) out << csv;
    else write_file(s.csv, csv);
    if (!s.json.empty()) write_file(s.json, report_to_json(report).dump(2) + "\n");
    if (!s.svg.empty()) write_file(s.svg, svg_convergence(report));
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical lab for warped-product metric spaces", "warpconv"};
    app.require_subcommand(1);

    auto* distance = app.add_subcommand("distance", "distance between two points of a warped product");
    std::string profile_arg, p_arg, q_arg, method = "auto", grid_arg = "256,256,2", base_arg = "interval";
    double fiber_c = kTwoPi;
    distance->add_option("--profile", profile_arg, "profile JSON, or @file")->required();
    distance->add_option("--p", p_arg, "r,theta")->required();
    distance->add_option("--q", q_arg, "r,theta")->required();
    distance->add_option("--method", method, "auto, clairaut or grid");
    distance->add_option("--grid", grid_arg, "n_r,n_theta,k");
    distance->add_option("--base", base_arg, "interval or circle");
    distance->add_option("--fiber", fiber_c, "fiber circumference");

    auto* ret = app.add_subcommand("ret", "RET metric distance or balls");
    double R = 2.0, ds = 0.0, dsigma = 0.0;
    std::string radii_arg, ret_csv, ret_svg;
    int ball_samples = 720;
    ret->add_option("--R", R, "stretch factor (> 1)");
    ret->add_option("--ds", ds, "base separation");
    ret->add_option("--dsigma", dsigma, "fiber separation");
    ret->add_option("--radii", radii_arg, "ball radii, comma-separated");
    ret->add_option("--samples", ball_samples, "boundary vertices per ball");
    ret->add_option("--csv", ret_csv, "ball boundary points");
    ret->add_option("--svg", ret_svg, "ball plot");

    auto* converge = app.add_subcommand("converge", "discrepancy of a sequence family against its limits");
    FamilyArgs conv_args;
    conv_args.add(converge);

    auto* audit = app.add_subcommand("audit", "theorem-bound slack table; exit 1 on a violated bound");
    FamilyArgs audit_args;
    audit_args.add(audit);

    auto* torus3 = app.add_subcommand("torus3", "3-torus moving-bump experiment against the flat limit");
    std::string t3_scenario, t3_j = "2,4,8", t3_csv, t3_json, t3_svg;
    int t3_n = 64, t3_sources = 8, t3_targets = 8;
    double t3_c = 1.0, t3_h0 = 2.0;
    std::uint64_t t3_seed = 0;
    torus3->add_option("--scenario", t3_scenario, "scenario JSON file");
    torus3->add_option("--j", t3_j, "comma-separated indices");
    torus3->add_option("--n", t3_n, "nodes per axis");
    torus3->add_option("--c", t3_c, "limit level");
    torus3->add_option("--h0", t3_h0, "bump peak");
    torus3->add_option("--seed", t3_seed, "sample plan seed");
    torus3->add_option("--sources", t3_sources, "Halton sources");
    torus3->add_option("--targets", t3_targets, "Halton targets per source");
    torus3->add_option("--csv", t3_csv, "CSV output path (default stdout)");
    torus3->add_option("--json", t3_json, "JSON report path");
    torus3->add_option("--svg", t3_svg, "SVG plot path");

    auto* plot = app.add_subcommand("plot", "SVG figures");
    std::string kind, plot_out, report_arg, range_arg, plot_family, plot_j, plot_radii = "0.5,1,2";
    std::vector<std::string> plot_profiles, plot_pairs;
    double plot_R = 2.0, plot_h0 = 0.0;
    plot->add_option("--kind", kind, "profiles, convergence, ret-balls or geodesics")->required();
    plot->add_option("--out", plot_out, "SVG path (default stdout)");
    plot->add_option("--profile", plot_profiles, "profile JSON or @file (repeatable)");
    plot->add_option("--family", plot_family, "plot members of a sequence family");
    plot->add_option("--j", plot_j, "family indices");
    plot->add_option("--h0", plot_h0, "family depth or height");
    plot->add_option("--range", range_arg, "a,b base range");
    plot->add_option("--report", report_arg, "report JSON file");
    plot->add_option("--R", plot_R, "RET stretch factor");
    plot->add_option("--radii", plot_radii, "RET ball radii");
    plot->add_option("--pair", plot_pairs, "r1,theta1,r2,theta2 (repeatable)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (distance->parsed()) {
            const WarpingProfile profile = profile_from_json(parse_json_arg(profile_arg));
            if (base_arg != "interval" && base_arg != "circle") throw InvalidInput("--base must be interval or circle");
            const BaseSpace base =
                base_arg == "circle" ? BaseSpace::circle() : BaseSpace::interval(-std::numbers::pi, std::numbers::pi);
            const WarpedSpace space(base, FiberSpace(fiber_c), profile);
            if (method != "auto" && method != "clairaut" && method != "grid") {
                throw InvalidInput("--method must be auto, clairaut or grid");
            }
            const GeodesicResult g =
                best_geodesic(space, parse_point(p_arg, "--p"), parse_point(q_arg, "--q"), method, parse_grid(grid_arg));
            out << geodesic_to_json(g).dump(2) << "\n";
            return 0;
        }
        if (ret->parsed()) {
            if (ret->count("--radii") == 0) {
                out << format_number(ret_distance(R, ds, dsigma)) << "\n";
                return 0;
            }
            const auto radii = parse_numbers(radii_arg, "--radii");
            if (!ret_csv.empty()) {
                const RETParams params{R, BaseSpace::interval(-1e6, 1e6), FiberSpace(1e7)};
                std::ostringstream csv;
                csv << "radius,s,theta\n";
                for (double r : radii) {
                    for (const SurfacePoint& v : ret_ball_boundary(params, {0.0, 0.0}, r, ball_samples).vertices) {
                        csv << format_number(r) << ',' << format_number(v.r) << ',' << format_number(v.theta) << "\n";
                    }
                }
                write_file(ret_csv, csv.str());
            }
            const std::string svg = svg_ret_balls(R, radii, ball_samples);
            if (!ret_svg.empty()) write_file(ret_svg, svg);
            else if (ret_csv.empty()) out << svg;
            return 0;
        }
        if (converge->parsed()) {
            const Scenario s = conv_args.resolve(converge);
            ExperimentOptions o;
            o.grid = s.grid;
            o.plan = s.plan;
            o.audit = s.audit;
            const auto report = run_family_experiment(make_family(s.family, s.h0, s.level, s.base), s.j_list, o);
            emit_report(report, s, out);
            return 0;
        }
        if (audit->parsed()) {
            const Scenario s = audit_args.resolve(audit);
            const SequenceFamily family = make_family(s.family, s.h0, s.level, s.base);
            std::vector<SlackRow> rows;
            for (int j : s.j_list) {
                const GridSpec grid = s.grid ? *s.grid : experiment_grid(family, j);
                for (SlackRow& r : audit_theorem_bounds(family, j, grid, sample_plan(family, j, s.plan))) {
                    rows.push_back(std::move(r));
                }
            }
            const std::string csv = slack_csv(rows);
            if (s.csv.empty()) out << csv;
            else write_file(s.csv, csv);
            if (!s.json.empty()) {
                ConvergenceReport report;
                report.label = to_string(family.kind);
                report.family = family;
                report.slacks = rows;
                write_file(s.json, report_to_json(report).dump(2) + "\n");
            }
            const bool ok = std::all_of(rows.begin(), rows.end(), [](const SlackRow& r) { return r.ok(); });
            return ok ? 0 : 1;
        }
        if (torus3->parsed()) {
            Scenario s;
            s.j_list = parse_js(t3_j);
            s.level = t3_c;
            s.h0 = t3_h0;
            s.n3 = t3_n;
            s.plan = {t3_sources, t3_targets, t3_seed};
            if (!t3_scenario.empty()) {
                Scenario f = scenario_from_json(Json::parse(read_file(t3_scenario)));
                if (torus3->count("--j")) f.j_list = s.j_list;
                if (torus3->count("--c")) f.level = t3_c;
                if (torus3->count("--h0") || !f.h0) f.h0 = t3_h0;
                if (torus3->count("--n") || !f.n3) f.n3 = t3_n;
                if (torus3->count("--seed")) f.plan.seed = t3_seed;
                s = f;
            }
            if (s.grid) throw InvalidInput("torus3 grids are given as {\"n\": ...}");
            if (torus3->count("--csv")) s.csv = t3_csv;
            if (torus3->count("--json")) s.json = t3_json;
            if (torus3->count("--svg")) s.svg = t3_svg;
            Torus3Options o;
            o.c = s.level;
            o.h0 = *s.h0;
            o.grid.n = *s.n3;
            o.plan = s.plan;
            emit_report(run_torus3_experiment(s.j_list, o), s, out);
            return 0;
        }
        if (plot->parsed()) {
            std::string svg;
            if (kind == "profiles") {
                std::vector<LabeledProfile> profiles;
                for (const std::string& p : plot_profiles) {
                    const WarpingProfile wp = profile_from_json(parse_json_arg(p));
                    profiles.push_back({wp.describe(), wp});
                }
                if (!plot_family.empty()) {
                    const SequenceFamily family = make_family(
                        plot_family, plot->count("--h0") ? std::optional<double>(plot_h0) : std::nullopt, 1.0, "interval");
                    for (int j : parse_js(plot_j.empty() ? "1,2,3" : plot_j)) {
                        profiles.push_back({"j = " + std::to_string(j), family_profile(family, j)});
                    }
                }
                double a = -std::numbers::pi, b = std::numbers::pi;
                if (!range_arg.empty()) {
                    const auto v = parse_numbers(range_arg, "--range");
                    if (v.size() != 2) throw InvalidInput("--range expects a,b");
                    a = v[0];
                    b = v[1];
                }
                svg = svg_profiles(profiles, a, b);
            } else if (kind == "convergence") {
                if (report_arg.empty()) throw InvalidInput("--report is required for convergence plots");
                svg = svg_convergence(report_from_json(Json::parse(read_file(report_arg))));
            } else if (kind == "ret-balls") {
                svg = svg_ret_balls(plot_R, parse_numbers(plot_radii, "--radii"));
            } else if (kind == "geodesics") {
                if (plot_profiles.size() != 1) throw InvalidInput("geodesic plots need exactly one --profile");
                const WarpedSpace space(BaseSpace::interval(-std::numbers::pi, std::numbers::pi), FiberSpace(),
                                        profile_from_json(parse_json_arg(plot_profiles.front())));
                std::vector<GeodesicResult> paths;
                for (const std::string& pair : plot_pairs) {
                    const auto v = parse_numbers(pair, "--pair");
                    if (v.size() != 4) throw InvalidInput("--pair expects r1,theta1,r2,theta2");
                    paths.push_back(best_geodesic(space, {v[0], v[1]}, {v[2], v[3]}, "auto", {256, 256, 2, {}}));
                }
                svg = svg_geodesics(space, paths);
            } else {
                throw InvalidInput("--kind must be profiles, convergence, ret-balls or geodesics");
            }
            if (plot_out.empty() || plot_out == "-") out << svg;
            else write_file(plot_out, svg);
            return 0;
        }
    } catch (const NumericalGuard& e) {
        err << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        err << "hypothesis error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        err << "invalid JSON: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace warpconv
