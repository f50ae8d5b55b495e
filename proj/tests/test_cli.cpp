#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "excessd/dataset.hpp"
#include "excessd/serialize.hpp"

using namespace excessd;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string binary_path() {
    const char* env = std::getenv("EXCESSD_BIN");
    REQUIRE_MESSAGE(env != nullptr, "EXCESSD_BIN must point at the excessd binary");
    return env;
}

RunResult run(const std::string& args) {
    std::string cmd = binary_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTmp = "/tmp/excessd_cli_test";

struct Workspace {
    Workspace() {
        std::string cmd = std::string("rm -rf ") + kTmp + " && mkdir -p " + kTmp;
        REQUIRE(std::system(cmd.c_str()) == 0);
    }
};

std::string path(const std::string& name) { return std::string(kTmp) + "/" + name; }

const std::string kFitFlags =
    " --chains 2 --iterations 400 --warmup 200 --seed 5 --timestamp 2020-01-02T03:04:05Z";

} // namespace

TEST_CASE("cli end-to-end: synth, fit, excess, placebo, report, plots") {
    Workspace ws;
    std::string csv = path("demo.csv");

    RunResult synth = run("synth --out " + csv + " --append-2017 --seed 1");
    CHECK(synth.exit_code == 0);
    MonthlySeries series = load_csv(csv);
    CHECK(series.size() == 96);

    SUBCASE("fit writes draws and summary artifacts") {
        RunResult fit = run("fit --csv " + csv + " --model 3 --years 2010:2016" + kFitFlags +
                            " --out-draws " + path("draws.json") + " --out-summary " +
                            path("summary.json"));
        CHECK(fit.exit_code == 0);
        CHECK(fit.output.find("alpha") != std::string::npos);

        json draws_json = parse_json_file(path("draws.json"));
        PosteriorDraws draws = draws_from_json(draws_json);
        CHECK(draws.n_chains() == 2);
        CHECK(draws.fit_years().count(2016) == 1);
        CHECK(draws_json.at("manifest").at("command") == "fit");

        json summary_json = parse_json_file(path("summary.json"));
        fit_summary_from_json(summary_json);

        SUBCASE("excess consumes the draws and honors the leakage guard") {
            RunResult ex = run("excess --csv " + csv + " --draws " + path("draws.json") +
                               " --window 2017-09:2017-10 --out " + path("excess.json") +
                               " --timestamp 2020-01-02T03:04:05Z");
            CHECK(ex.exit_code == 0);
            CHECK(ex.output.find("central") != std::string::npos);
            ExcessEstimate est = excess_from_json(parse_json_file(path("excess.json")));
            CHECK(est.window.size() == 2);
            CHECK(est.central > 0.0);

            RunResult leak = run("excess --csv " + csv + " --draws " + path("draws.json") +
                                 " --window 2016-01:2016-01");
            CHECK(leak.exit_code == 3);
            CHECK(leak.output.find("overlaps fitting years") != std::string::npos);

            SUBCASE("reports merge artifacts and embed the comparison table") {
                RunResult rep = run("report --excess " + path("excess.json") + " --out " +
                                    path("report.json") +
                                    " --timestamp 2020-01-02T03:04:05Z");
                CHECK(rep.exit_code == 0);
                json report = parse_json_file(path("report.json"));
                CHECK(report.at("schema") == "excessd/report/v1");
                CHECK(report.at("placebo") == json("not run"));
                CHECK(report.at("published_comparisons").at("rows").size() == 5);

                // identical manifests give byte-identical reports
                RunResult rep2 = run("report --excess " + path("excess.json") + " --out " +
                                     path("report2.json") +
                                     " --timestamp 2020-01-02T03:04:05Z");
                CHECK(rep2.exit_code == 0);
                CHECK(slurp(path("report.json")) == slurp(path("report2.json")));
            }
        }

        SUBCASE("repeated fits with the same manifest are byte-identical") {
            RunResult fit2 = run("fit --csv " + csv + " --model 3 --years 2010:2016" +
                                 kFitFlags + " --out-draws " + path("draws2.json"));
            CHECK(fit2.exit_code == 0);
            CHECK(slurp(path("draws.json")) == slurp(path("draws2.json")));
        }

        SUBCASE("plots emit svg documents with embedded data") {
            for (int figure : {1, 2, 3, 4, 5}) {
                std::string out = path("fig" + std::to_string(figure) + ".svg");
                RunResult plot = run("plot --csv " + csv + " --figure " +
                                     std::to_string(figure) + " --draws " +
                                     path("draws.json") + " --out " + out);
                CHECK(plot.exit_code == 0);
                std::string svg = slurp(out);
                CHECK(svg.rfind("<?xml", 0) == 0);
                CHECK(svg.find("<svg") != std::string::npos);
                CHECK(svg.find("data:") != std::string::npos);
                CHECK(svg.find("manifest:") != std::string::npos);
            }
        }

        SUBCASE("the fitted intercept tracks the reference january level") {
            FitSummary summary = fit_summary_from_json(parse_json_file(path("summary.json")));
            REQUIRE(summary.params.front().name == "alpha");
            CHECK(summary.params.front().mean > 2450.0);
            CHECK(summary.params.front().mean < 2720.0);
        }
    }
}

TEST_CASE("cli error paths use the documented exit codes") {
    Workspace ws;
    std::string csv = path("demo.csv");
    RunResult synth = run("synth --out " + csv + " --append-2017 --seed 2");
    REQUIRE(synth.exit_code == 0);

    // usage error: invalid model number
    RunResult bad_model = run("fit --csv " + csv + " --model 5" + kFitFlags);
    CHECK(bad_model.exit_code == 2);

    // usage error: unknown flag
    RunResult bad_flag = run("fit --csv " + csv + " --model 3 --nonsense" + kFitFlags);
    CHECK(bad_flag.exit_code == 2);

    // data error: missing csv
    RunResult no_csv = run("summary --csv " + path("missing.csv"));
    CHECK(no_csv.exit_code == 3);

    // data error: malformed csv
    std::ofstream bad(path("bad.csv"));
    bad << "year,month,deaths\n2016,12,1\n2017,2,1\n";
    bad.close();
    RunResult gap = run("summary --csv " + path("bad.csv"));
    CHECK(gap.exit_code == 3);

    // data error: placebo on too little data
    std::ofstream small(path("small.csv"));
    small << "year,month,deaths\n";
    for (int y = 2015; y <= 2016; ++y)
        for (int m = 1; m <= 12; ++m)
            small << y << "," << m << "," << 2400 << "\n";
    small.close();
    RunResult loyo = run("placebo --csv " + path("small.csv") +
                         " --scheme loyo --window 9:10" + kFitFlags);
    CHECK(loyo.exit_code == 3);

    // unknown scheme
    RunResult scheme = run("placebo --csv " + csv + " --scheme bogus" + kFitFlags);
    CHECK(scheme.exit_code == 2);

    // --strict escalates convergence warnings (deliberately truncated warm-up)
    RunResult strict = run("fit --csv " + csv + " --model 3 --chains 2 --iterations 40"
                           " --warmup 20 --seed 5 --strict");
    CHECK(strict.exit_code == 4);
}

TEST_CASE("the seed environment variable provides the default seed") {
    Workspace ws;
    std::string a = path("a.csv"), b = path("b.csv");
    CHECK(run("synth --out " + a + " --seed 42").exit_code == 0);
    std::string cmd =
        "EXCESSD_SEED=42 " + binary_path() + " synth --out " + b + " >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cli excess can refit with exclusions and informative priors") {
    Workspace ws;
    std::string csv = path("demo.csv");
    REQUIRE(run("synth --out " + csv + " --append-2017 --seed 3").exit_code == 0);

    RunResult base = run("excess --csv " + csv + " --model 3 --years 2010:2016" + kFitFlags +
                         " --window 2017-09:2017-10 --out " + path("base.json"));
    CHECK(base.exit_code == 0);

    RunResult excl = run("excess --csv " + csv + " --model 3 --years 2010:2016" + kFitFlags +
                         " --window 2017-09:2017-10 --exclude 2014-10 --out " +
                         path("excl.json"));
    CHECK(excl.exit_code == 0);

    RunResult info = run("excess --csv " + csv + " --model 3 --years 2010:2016" + kFitFlags +
                         " --window 2017-09:2017-10 --informative-prior 2010:2011 --out " +
                         path("info.json"));
    CHECK(info.exit_code == 0);
    ExcessEstimate info_est = excess_from_json(parse_json_file(path("info.json")));
    CHECK(info_est.fit_years == std::set<int>{2012, 2013, 2014, 2015, 2016});

    ExcessEstimate base_est = excess_from_json(parse_json_file(path("base.json")));
    ExcessEstimate excl_est = excess_from_json(parse_json_file(path("excl.json")));
    CHECK(base_est.central_raw != excl_est.central_raw);
}
