#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "warpconv/errors.hpp"
#include "warpconv/io.hpp"

namespace warpconv {

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw InvalidInput(where + ": expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.count(key)) throw InvalidInput(where + ": unknown field '" + key + "'");
    }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InvalidInput(where + ": missing field '" + key + "'");
    return *it;
}

double number(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_number()) throw InvalidInput(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const Json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::int64_t integer(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_number_integer()) throw InvalidInput(where + ": field '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string text(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_string()) throw InvalidInput(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

bool boolean(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_boolean()) throw InvalidInput(where + ": field '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::vector<double> numbers(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (!v.is_array()) throw InvalidInput(where + ": field '" + key + "' must be an array");
    std::vector<double> out;
    for (const Json& x : v) {
        if (!x.is_number()) throw InvalidInput(where + ": field '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Json num(double v) {
    if (!std::isfinite(v)) return v > 0 ? Json("inf") : v < 0 ? Json("-inf") : Json(nullptr);
    return round12(v);
}

double read_num(const Json& obj, const char* key, const std::string& where) {
    const Json& v = field(obj, key, where);
    if (v.is_string() && v == "inf") return INFINITY;
    if (v.is_string() && v == "-inf") return -INFINITY;
    if (v.is_null()) return NAN;
    return number(obj, key, where);
}

const char* limit_kind_name(LimitMetric::Kind k) {
    switch (k) {
        case LimitMetric::Kind::IsometricProduct: return "IsometricProduct";
        case LimitMetric::Kind::CinchLimit: return "CinchLimit";
        case LimitMetric::Kind::RET: return "RET";
    }
    return "?";
}

LimitMetric::Kind parse_limit_kind(const std::string& s) {
    for (auto k : {LimitMetric::Kind::IsometricProduct, LimitMetric::Kind::CinchLimit, LimitMetric::Kind::RET}) {
        if (s == limit_kind_name(k)) return k;
    }
    throw InvalidInput("unknown limit kind: " + s);
}

Json grid_to_json(const GridSpec& g) {
    Json j;
    j["n_r"] = g.n_r;
    j["n_theta"] = g.n_theta;
    j["k"] = g.k;
    j["anchor"] = g.anchor ? num(*g.anchor) : Json(nullptr);
    return j;
}

GridSpec grid_from_json(const Json& j, const std::string& where) {
    check_keys(j, {"n_r", "n_theta", "k", "anchor"}, where);
    GridSpec g;
    g.n_r = static_cast<int>(integer(j, "n_r", where));
    g.n_theta = static_cast<int>(integer(j, "n_theta", where));
    g.k = static_cast<int>(integer(j, "k", where));
    if (j.contains("anchor") && !j["anchor"].is_null()) g.anchor = number(j, "anchor", where);
    if (g.n_r < 2 || g.n_theta < 2 || g.k < 1) throw InvalidInput(where + ": grid sizes out of range");
    return g;
}

std::vector<int> j_values(const Json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw InvalidInput(where + ": j_list must be a nonempty array");
    std::vector<int> out;
    for (const Json& x : v) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 1) {
            throw InvalidInput(where + ": j_list entries must be positive integers");
        }
        out.push_back(x.get<int>());
    }
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

WarpingProfile profile_from_json(const Json& d) {
    const std::string where = "profile";
    check_keys(d, {"family", "params"}, where);
    const std::string family = text(d, "family", where);
    const Json params = d.contains("params") ? d["params"] : Json::object();
    const std::string pw = "profile params";
    if (family == "constant") {
        check_keys(params, {"c"}, pw);
        return WarpingProfile::constant(number(params, "c", pw));
    }
    if (family == "cinch" || family == "ridge") {
        check_keys(params, {"h0", "center", "half_width"}, pw);
        const double h0 = number(params, "h0", pw), c = number(params, "center", pw);
        const double w = number(params, "half_width", pw);
        return family == "cinch" ? WarpingProfile::cinch(h0, c, w) : WarpingProfile::ridge(h0, c, w);
    }
    if (family == "sum_of_bumps") {
        check_keys(params, {"level", "bumps"}, pw);
        std::vector<Bump> bumps;
        const Json& list = field(params, "bumps", pw);
        if (!list.is_array()) throw InvalidInput(pw + ": bumps must be an array");
        for (const Json& b : list) {
            check_keys(b, {"center", "half_width", "peak"}, "bump");
            bumps.push_back({number(b, "center", "bump"), number(b, "half_width", "bump"), number(b, "peak", "bump")});
        }
        return WarpingProfile::sum_of_bumps(number(params, "level", pw), std::move(bumps));
    }
    if (family == "bump_train") {
        check_keys(params, {"level", "peak", "first_center", "spacing", "count", "half_width"}, pw);
        BumpTrainParams t;
        t.level = number(params, "level", pw);
        t.peak = number(params, "peak", pw);
        t.first_center = number(params, "first_center", pw);
        t.spacing = number(params, "spacing", pw);
        const std::int64_t count = integer(params, "count", pw);
        if (count < 0) throw InvalidInput(pw + ": count must be nonnegative");
        t.count = static_cast<std::uint64_t>(count);
        t.half_width = number(params, "half_width", pw);
        return WarpingProfile::bump_train(t);
    }
    if (family == "tabulated") {
        check_keys(params, {"r", "f"}, pw);
        return WarpingProfile::tabulated(numbers(params, "r", pw), numbers(params, "f", pw));
    }
    SequenceFamily seq;
    seq.kind = parse_family(family);
    check_keys(params, {"j", "h0", "level"}, pw);
    seq.h0 = number_or(params, "h0", seq.h0, pw);
    seq.level = number_or(params, "level", seq.level, pw);
    if (seq.kind == FamilyKind::CinchedTorus || seq.kind == FamilyKind::MovingCinch) {
        seq.h0 = number_or(params, "h0", 0.5, pw);
    }
    seq.validate();
    const std::int64_t j = integer(params, "j", pw);
    if (j < 1 || j > 1 << 20) throw InvalidInput(pw + ": j out of range");
    return family_profile(seq, static_cast<int>(j));
}

Json profile_to_json(const WarpingProfile& p) {
    Json out;
    Json params;
    switch (p.family()) {
        case ProfileFamily::Constant:
            out["family"] = "constant";
            params["c"] = p.level();
            break;
        case ProfileFamily::CinchBump:
        case ProfileFamily::RidgeBump: {
            const Bump& b = p.bumps().front();
            out["family"] = p.family() == ProfileFamily::CinchBump ? "cinch" : "ridge";
            params["h0"] = b.peak;
            params["center"] = b.center;
            params["half_width"] = b.half_width;
            break;
        }
        case ProfileFamily::SumOfBumps: {
            out["family"] = "sum_of_bumps";
            params["level"] = p.level();
            params["bumps"] = Json::array();
            for (const Bump& b : p.bumps()) {
                params["bumps"].push_back({{"center", b.center}, {"half_width", b.half_width}, {"peak", b.peak}});
            }
            break;
        }
        case ProfileFamily::BumpTrain: {
            const BumpTrainParams& t = p.train();
            out["family"] = "bump_train";
            params["level"] = t.level;
            params["peak"] = t.peak;
            params["first_center"] = t.first_center;
            params["spacing"] = t.spacing;
            params["count"] = t.count;
            params["half_width"] = t.half_width;
            break;
        }
        case ProfileFamily::Tabulated:
            out["family"] = "tabulated";
            params["r"] = p.table_r();
            params["f"] = p.table_f();
            break;
    }
    out["params"] = params;
    return out;
}

Json geodesic_to_json(const GeodesicResult& g) {
    Json out;
    out["distance"] = num(g.distance);
    out["method"] = to_string(g.method);
    out["error_estimate"] = num(g.error_estimate);
    out["converged"] = g.converged;
    Json path = Json::array();
    for (const SurfacePoint& v : g.path.vertices) path.push_back({num(v.r), num(v.theta)});
    out["path"] = path;
    if (!g.path.wraps.empty()) {
        Json wraps = Json::array();
        for (const SegmentWrap& w : g.path.wraps) wraps.push_back({w.base, w.fiber});
        out["wraps"] = wraps;
    }
    return out;
}

std::string report_csv(const ConvergenceReport& report, std::size_t limit) {
    std::ostringstream out;
    out << "j,eps_hat,grid_err,l2_norm,lambda,gh_bound,flat_bound,worst_pair\n";
    for (const ReportRow& r : report.rows) {
        if (limit >= r.eps.size()) throw InvalidInput("report has no limit " + std::to_string(limit));
        const Discrepancy& e = r.eps[limit];
        out << r.j << ',' << format_number(e.eps_hat) << ',' << format_number(e.error) << ','
            << format_number(r.l2) << ',' << format_number(r.lambda) << ',' << format_number(r.gh_bound) << ','
            << format_number(r.flat_bound) << ',' << e.worst << '\n';
    }
    return out.str();
}

std::string slack_csv(const std::vector<SlackRow>& slacks) {
    std::ostringstream out;
    out << "lemma,j,bound,observed,slack,tol,status,item\n";
    for (const SlackRow& s : slacks) {
        out << s.lemma << ',' << s.j << ',';
        if (s.skipped) {
            out << ",,,,skipped," << '"' << s.reason << '"' << '\n';
            continue;
        }
        out << format_number(s.bound) << ',' << format_number(s.observed) << ',' << format_number(s.slack) << ','
            << format_number(s.tol) << ',' << (s.ok() ? "ok" : "FAIL") << ',' << '"' << s.item << '"' << '\n';
    }
    return out.str();
}

Json report_to_json(const ConvergenceReport& report) {
    Json out;
    out["label"] = report.label;
    out["dimension"] = report.dimension;
    out["family"] = {{"kind", to_string(report.family.kind)},
                     {"h0", num(report.family.h0)},
                     {"base", report.family.base_shape == BaseSpace::Kind::Circle ? "circle" : "interval"},
                     {"level", num(report.family.level)}};
    out["fixed_pairs"] = report.fixed_pairs;
    Json limits = Json::array();
    for (const LimitMetric& m : report.limits) {
        limits.push_back({{"kind", limit_kind_name(m.kind)},
                          {"name", m.name()},
                          {"level", num(m.level)},
                          {"h0", num(m.h0)},
                          {"cinch_r", num(m.cinch_r)},
                          {"R", num(m.R)}});
    }
    out["limits"] = limits;
    Json rows = Json::array();
    for (const ReportRow& r : report.rows) {
        Json row;
        row["j"] = r.j;
        row["grid"] = grid_to_json(r.grid);
        row["samples"] = r.samples;
        Json eps = Json::array();
        for (const Discrepancy& e : r.eps) {
            Json pp = Json::array(), pe = Json::array();
            for (double v : e.per_pair) pp.push_back(num(v));
            for (double v : e.per_pair_error) pe.push_back(num(v));
            eps.push_back({{"eps_hat", num(e.eps_hat)},
                           {"error", num(e.error)},
                           {"corrected", num(e.corrected)},
                           {"worst_pair", e.worst},
                           {"per_pair", pp},
                           {"per_pair_error", pe}});
        }
        row["eps"] = eps;
        row["l2_norm"] = num(r.l2);
        row["l2_bound"] = num(r.l2_bound);
        row["lambda"] = num(r.lambda);
        row["mass"] = num(r.mass);
        row["gh_bound"] = num(r.gh_bound);
        row["flat_bound"] = num(r.flat_bound);
        rows.push_back(row);
    }
    out["rows"] = rows;
    Json slacks = Json::array();
    for (const SlackRow& s : report.slacks) {
        slacks.push_back({{"lemma", s.lemma},
                          {"j", s.j},
                          {"item", s.item},
                          {"bound", num(s.bound)},
                          {"observed", num(s.observed)},
                          {"slack", num(s.slack)},
                          {"tol", num(s.tol)},
                          {"skipped", s.skipped},
                          {"reason", s.reason},
                          {"ok", s.ok()}});
    }
    out["slacks"] = slacks;
    return out;
}

ConvergenceReport report_from_json(const Json& j) {
    const std::string w = "report";
    check_keys(j, {"label", "dimension", "family", "fixed_pairs", "limits", "rows", "slacks"}, w);
    ConvergenceReport r;
    r.label = text(j, "label", w);
    r.dimension = static_cast<int>(integer(j, "dimension", w));
    if (r.dimension != 2 && r.dimension != 3) throw InvalidInput(w + ": dimension must be 2 or 3");
    const Json& fam = field(j, "family", w);
    check_keys(fam, {"kind", "h0", "base", "level"}, "family");
    r.family.kind = parse_family(text(fam, "kind", "family"));
    r.family.h0 = number(fam, "h0", "family");
    const std::string base = text(fam, "base", "family");
    if (base != "interval" && base != "circle") throw InvalidInput("family: base must be interval or circle");
    r.family.base_shape = base == "circle" ? BaseSpace::Kind::Circle : BaseSpace::Kind::Interval;
    r.family.level = number(fam, "level", "family");
    const std::int64_t fixed = integer(j, "fixed_pairs", w);
    if (fixed < 0) throw InvalidInput(w + ": fixed_pairs must be nonnegative");
    r.fixed_pairs = static_cast<std::size_t>(fixed);

    const Json& limits = field(j, "limits", w);
    if (!limits.is_array()) throw InvalidInput(w + ": limits must be an array");
    for (const Json& l : limits) {
        check_keys(l, {"kind", "name", "level", "h0", "cinch_r", "R"}, "limit");
        LimitMetric m;
        m.kind = parse_limit_kind(text(l, "kind", "limit"));
        m.level = number(l, "level", "limit");
        m.h0 = number(l, "h0", "limit");
        m.cinch_r = number(l, "cinch_r", "limit");
        m.R = number(l, "R", "limit");
        if (text(l, "name", "limit") != m.name()) throw InvalidInput("limit: name does not match parameters");
        r.limits.push_back(m);
    }

    const Json& rows = field(j, "rows", w);
    if (!rows.is_array()) throw InvalidInput(w + ": rows must be an array");
    for (const Json& x : rows) {
        const std::string rw = "row";
        check_keys(x, {"j", "grid", "samples", "eps", "l2_norm", "l2_bound", "lambda", "mass", "gh_bound",
                       "flat_bound"},
                   rw);
        ReportRow row;
        row.j = static_cast<int>(integer(x, "j", rw));
        row.grid = grid_from_json(field(x, "grid", rw), "grid");
        row.samples = static_cast<std::size_t>(integer(x, "samples", rw));
        const Json& eps = field(x, "eps", rw);
        if (!eps.is_array() || eps.size() != r.limits.size()) {
            throw InvalidInput(rw + ": eps must hold one entry per limit");
        }
        for (const Json& e : eps) {
            check_keys(e, {"eps_hat", "error", "corrected", "worst_pair", "per_pair", "per_pair_error"}, "eps");
            Discrepancy d;
            d.eps_hat = read_num(e, "eps_hat", "eps");
            d.error = read_num(e, "error", "eps");
            d.corrected = read_num(e, "corrected", "eps");
            d.worst = static_cast<std::size_t>(integer(e, "worst_pair", "eps"));
            d.per_pair = numbers(e, "per_pair", "eps");
            d.per_pair_error = numbers(e, "per_pair_error", "eps");
            if (d.per_pair.size() != d.per_pair_error.size()) throw InvalidInput("eps: per-pair arrays differ in size");
            row.eps.push_back(std::move(d));
        }
        row.l2 = read_num(x, "l2_norm", rw);
        row.l2_bound = read_num(x, "l2_bound", rw);
        row.lambda = read_num(x, "lambda", rw);
        row.mass = read_num(x, "mass", rw);
        row.gh_bound = read_num(x, "gh_bound", rw);
        row.flat_bound = read_num(x, "flat_bound", rw);
        r.rows.push_back(std::move(row));
    }

    const Json& slacks = field(j, "slacks", w);
    if (!slacks.is_array()) throw InvalidInput(w + ": slacks must be an array");
    for (const Json& x : slacks) {
        const std::string sw = "slack";
        check_keys(x, {"lemma", "j", "item", "bound", "observed", "slack", "tol", "skipped", "reason", "ok"}, sw);
        SlackRow s;
        s.lemma = text(x, "lemma", sw);
        s.j = static_cast<int>(integer(x, "j", sw));
        s.item = text(x, "item", sw);
        s.bound = read_num(x, "bound", sw);
        s.observed = read_num(x, "observed", sw);
        s.slack = read_num(x, "slack", sw);
        s.tol = read_num(x, "tol", sw);
        s.skipped = boolean(x, "skipped", sw);
        s.reason = text(x, "reason", sw);
        if (boolean(x, "ok", sw) != s.ok()) throw InvalidInput(sw + ": ok flag does not match the slack");
        r.slacks.push_back(std::move(s));
    }
    return r;
}

Scenario scenario_from_json(const Json& j) {
    const std::string w = "scenario";
    check_keys(j, {"family", "j_list", "h0", "level", "base", "grid", "seed", "sources", "targets", "audit",
                   "outputs"},
               w);
    Scenario s;
    if (j.contains("family")) s.family = text(j, "family", w);
    s.j_list = j_values(field(j, "j_list", w), w);
    if (j.contains("h0")) s.h0 = number(j, "h0", w);
    s.level = number_or(j, "level", s.level, w);
    if (j.contains("base")) {
        s.base = text(j, "base", w);
        if (s.base != "interval" && s.base != "circle") throw InvalidInput(w + ": base must be interval or circle");
    }
    if (j.contains("grid")) {
        const Json& g = j["grid"];
        if (g.is_object() && g.contains("n")) {
            check_keys(g, {"n"}, "grid");
            s.n3 = static_cast<int>(integer(g, "n", "grid"));
        } else {
            s.grid = grid_from_json(g, "grid");
        }
    }
    if (j.contains("seed")) {
        const std::int64_t seed = integer(j, "seed", w);
        if (seed < 0) throw InvalidInput(w + ": seed must be nonnegative");
        s.plan.seed = static_cast<std::uint64_t>(seed);
    }
    if (j.contains("sources")) s.plan.sources = static_cast<int>(integer(j, "sources", w));
    if (j.contains("targets")) s.plan.targets = static_cast<int>(integer(j, "targets", w));
    if (s.plan.sources < 1 || s.plan.targets < 1) throw InvalidInput(w + ": sources and targets must be positive");
    if (j.contains("audit")) s.audit = boolean(j, "audit", w);
    if (j.contains("outputs")) {
        const Json& o = j["outputs"];
        check_keys(o, {"csv", "json", "svg"}, "outputs");
        if (o.contains("csv")) s.csv = text(o, "csv", "outputs");
        if (o.contains("json")) s.json = text(o, "json", "outputs");
        if (o.contains("svg")) s.svg = text(o, "svg", "outputs");
    }
    return s;
}

}  // namespace warpconv
