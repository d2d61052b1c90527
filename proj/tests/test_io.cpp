#include <doctest.h>

#include <cmath>
#include <sstream>

#include "warpconv/cli.hpp"
#include "warpconv/errors.hpp"
#include "warpconv/io.hpp"

using namespace warpconv;

namespace {

int run(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int code = cli_main(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

ConvergenceReport small_report() {
    SequenceFamily f;
    f.kind = FamilyKind::SingleRidge;
    ExperimentOptions o;
    o.grid = GridSpec{48, 48, 2, std::nullopt};
    o.plan = {3, 3, 0};
    return run_family_experiment(f, {2, 4}, o);
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting") {
    CHECK(format_number(M_PI) == "3.14159265359");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(1e-20) == "1e-20");
    CHECK(round12(M_PI) == 3.14159265359);
    CHECK(format_number(round12(1.0 / 3.0)) == format_number(1.0 / 3.0));
}

TEST_CASE("profile descriptors round trip") {
    const std::vector<WarpingProfile> profiles = {
        WarpingProfile::constant(1.5),
        WarpingProfile::cinch(0.4, 0.3, 0.5),
        WarpingProfile::ridge(1.8, -1.0, 0.25),
        WarpingProfile::sum_of_bumps(1.0, {{-1.0, 0.5, 2.0}, {1.0, 0.5, 0.5}}),
        WarpingProfile::bump_train({1.0, 2.0, -2.0, 1.0, 4, 0.1}),
        WarpingProfile::tabulated({-3.0, 0.0, 3.0}, {1.0, 2.0, 1.5}),
    };
    for (const WarpingProfile& p : profiles) {
        const Json j = Json::parse(profile_to_json(p).dump());
        const WarpingProfile q = profile_from_json(j);
        CHECK(q.family() == p.family());
        for (double r = -3.0; r <= 3.0; r += 0.01) CHECK(q(r) == p(r));
    }
    const WarpingProfile member = profile_from_json(Json::parse(R"({"family":"single-ridge","params":{"j":3}})"));
    SequenceFamily f;
    CHECK(member(0.3) == family_profile(f, 3)(0.3));
    const WarpingProfile cinch = profile_from_json(Json::parse(R"({"family":"cinched_torus","params":{"j":2}})"));
    CHECK(cinch.min_on(-M_PI, M_PI) == doctest::Approx(0.5));
}

TEST_CASE("profile descriptors reject bad input") {
    for (const char* text : {
             R"({"family":"constant","params":{"c":1,"extra":0}})",
             R"({"family":"constant","params":{"c":"1"}})",
             R"({"family":"constant"})",
             R"({"family":"spiral","params":{}})",
             R"({"family":"constant","params":{"c":1},"note":"x"})",
             R"({"family":"single-ridge","params":{"h0":2}})",
             R"({"family":"single-ridge","params":{"j":0}})",
             R"({"family":"bump_train","params":{"level":1,"peak":2,"first_center":0,"spacing":1,"count":-1,"half_width":0.1}})",
         }) {
        CHECK_THROWS_AS(profile_from_json(Json::parse(text)), InvalidInput);
    }
}

TEST_CASE("report JSON round trip and CSV") {
    const ConvergenceReport report = small_report();
    const std::string text = report_to_json(report).dump(2);
    const ConvergenceReport back = report_from_json(Json::parse(text));
    CHECK(report_to_json(back).dump(2) == text);
    CHECK(report_csv(back) == report_csv(report));
    CHECK(back.rows.size() == 2);
    CHECK(back.slacks.size() == report.slacks.size());
    CHECK(back.limits.front().name() == report.limits.front().name());

    const std::string csv = report_csv(report);
    CHECK(csv.rfind("j,eps_hat,grid_err,l2_norm,lambda,gh_bound,flat_bound,worst_pair\n", 0) == 0);
    CHECK(count_lines(csv) == 3);
    CHECK_THROWS_AS(report_csv(report, 5), InvalidInput);
    CHECK(count_lines(slack_csv(report.slacks)) == report.slacks.size() + 1);

    Json extra = Json::parse(text);
    extra["rows"][0]["note"] = 1;
    CHECK_THROWS_AS(report_from_json(extra), InvalidInput);
    Json flipped = Json::parse(text);
    flipped["slacks"][0]["ok"] = !flipped["slacks"][0]["ok"].get<bool>();
    CHECK_THROWS_AS(report_from_json(flipped), InvalidInput);
    Json missing = Json::parse(text);
    missing.erase("limits");
    CHECK_THROWS_AS(report_from_json(missing), InvalidInput);
}

TEST_CASE("3-torus reports serialize") {
    Torus3Options o;
    o.grid = {32, 1};
    o.plan = {2, 2, 0};
    const auto report = run_torus3_experiment({1}, o);
    const std::string text = report_to_json(report).dump();
    const auto back = report_from_json(Json::parse(text));
    CHECK(back.dimension == 3);
    CHECK(back.label == "MovingBump2D");
    CHECK(report_to_json(back).dump() == text);
}

TEST_CASE("scenario schema") {
    const Scenario s = scenario_from_json(Json::parse(
        R"({"family":"cinched-torus","j_list":[4,8],"h0":0.5,"grid":{"n_r":64,"n_theta":64,"k":2},
            "seed":3,"sources":4,"targets":2,"audit":false,"outputs":{"csv":"a.csv"}})"));
    CHECK(s.family == "cinched-torus");
    CHECK(s.j_list == std::vector<int>{4, 8});
    CHECK(*s.h0 == 0.5);
    CHECK(s.grid->n_r == 64);
    CHECK(s.plan.seed == 3);
    CHECK_FALSE(s.audit);
    CHECK(s.csv == "a.csv");
    CHECK(scenario_from_json(Json::parse(R"({"j_list":[2],"grid":{"n":48}})")).n3 == 48);
    for (const char* text : {R"({"j_list":[4],"colour":1})", R"({"j_list":[]})", R"({"j_list":[0]})",
                             R"({"family":"x"})", R"({"j_list":[4],"outputs":{"pdf":"a"}})",
                             R"({"j_list":[4],"grid":{"n_r":64,"n_theta":64}})", R"({"j_list":[4],"seed":-1})"}) {
        CHECK_THROWS_AS(scenario_from_json(Json::parse(text)), InvalidInput);
    }
}

TEST_CASE("svg output is self-contained") {
    const std::vector<std::string> docs = {
        svg_profiles({{"f", WarpingProfile::ridge(2.0, 0.0, 0.5)}}, -M_PI, M_PI),
        svg_convergence(small_report()),
        svg_ret_balls(2.0, {0.5, 1.0}),
        svg_geodesics(WarpedSpace(BaseSpace::circle(), FiberSpace(), WarpingProfile::cinch(0.5, 0.0, 1.0)),
                      {grid_distance(WarpedSpace(BaseSpace::circle(), FiberSpace(), WarpingProfile::cinch(0.5, 0.0, 1.0)),
                                     {64, 64, 2, {}}, {-3.0, 0.2}, {3.0, 6.0})}),
    };
    for (const std::string& d : docs) {
        CHECK(d.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0) == 0);
        CHECK(d.find("</svg>") == d.size() - 7);
        CHECK(d.find("<script") == std::string::npos);
        CHECK(d.find("href") == std::string::npos);
        CHECK((d.find("<polyline") != std::string::npos || d.find("<polygon") != std::string::npos));
    }
    CHECK(docs[2].find("<polygon") != std::string::npos);
    CHECK_THROWS_AS(svg_profiles({}, 0, 1), InvalidInput);
}

TEST_CASE("cli examples") {
    std::string out, err;
    CHECK(run({"ret", "--R", "5", "--ds", "3.14159", "--dsigma", "3.14159"}, &out) == 0);
    CHECK(std::stod(out) == doctest::Approx(6.2199).epsilon(1e-4));

    CHECK(run({"distance", "--profile", R"({"family":"constant","params":{"c":1}})", "--p", "0,0", "--q", "0,3.14159"},
              &out) == 0);
    const Json g = Json::parse(out);
    CHECK(std::abs(g["distance"].get<double>() - 3.14159) <= g["error_estimate"].get<double>() + 1e-12);
    CHECK(g["path"].size() >= 2);

    CHECK(run({"distance", "--profile", R"({"family":"constant","params":{"c":1}})", "--p", "0,0", "--q", "1,1",
               "--method", "grid", "--grid", "64,64,2"},
              &out) == 0);
    CHECK(Json::parse(out)["method"] == "grid");
}

TEST_CASE("cli exit codes") {
    std::string out, err;
    CHECK(run({}, &out, &err) == 2);
    CHECK(run({"bogus"}, &out, &err) == 2);
    CHECK(run({"ret", "--R", "1", "--ds", "1", "--dsigma", "1"}, &out, &err) == 2);
    CHECK(run({"distance", "--profile", R"({"family":"constant","params":{"c":1,"k":2}})", "--p", "0,0", "--q", "0,1"},
              &out, &err) == 2);
    CHECK(err.find("unknown field") != std::string::npos);
    CHECK(run({"distance", "--profile", "{not json", "--p", "0,0", "--q", "0,1"}, &out, &err) == 2);
    CHECK(run({"distance", "--profile", R"({"family":"constant","params":{"c":1}})", "--p", "9,0", "--q", "0,1"}, &out,
              &err) == 2);
    CHECK(run({"converge", "--family", "single-ridge", "--j", "4,x"}, &out, &err) == 2);
    CHECK(run({"converge", "--family", "cinched-torus", "--h0", "3", "--j", "4"}, &out, &err) == 2);
    CHECK(run({"converge", "--scenario", "/nonexistent/scenario.json"}, &out, &err) == 2);
    CHECK(run({"torus3", "--n", "300", "--j", "2"}, &out, &err) == 3);
    CHECK(run({"torus3", "--n", "16", "--j", "2"}, &out, &err) == 2);
    CHECK(run({"plot", "--kind", "pie"}, &out, &err) == 2);
    CHECK(run({"--help"}, &out, &err) == 0);
}

TEST_CASE("cli converge, audit and plot") {
    const std::vector<std::string> args = {"converge", "--family", "single-ridge", "--j", "2,4",   "--grid",
                                           "48,48,2",  "--sources", "3",          "--targets", "3", "--no-audit"};
    std::string a, b;
    CHECK(run(args, &a) == 0);
    CHECK(run(args, &b) == 0);
    CHECK(a == b);
    CHECK(count_lines(a) == 3);

    std::string audit;
    const int code = run({"audit", "--family", "single-ridge", "--j", "2", "--grid", "48,48,2", "--sources", "3",
                          "--targets", "3"},
                         &audit);
    CHECK(audit.rfind("lemma,j,bound,observed,slack,tol,status,item\n", 0) == 0);
    CHECK(code == (audit.find(",FAIL,") == std::string::npos ? 0 : 1));

    std::string svg;
    CHECK(run({"plot", "--kind", "ret-balls", "--R", "2", "--radii", "1"}, &svg) == 0);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(run({"plot", "--kind", "profiles", "--family", "many-ridges", "--j", "1,2"}, &svg) == 0);
    CHECK(svg.find("j = 2") != std::string::npos);
}

}
