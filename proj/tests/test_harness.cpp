#include <doctest.h>

#include <cmath>
#include <numbers>

#include "widthlab/harness.hpp"

using namespace widthlab;

namespace {

std::string base_config(const std::string& extra = "") {
    return R"({
      "seed": 4242,
      "class": {"kind": "smooth_mother", "input_dim": 1, "param_count": 2},
      "norm": {"p": 2.0, "domain": {"type": "monte_carlo", "size": 150}},
      "dictionary": {"mode": "random", "count": 30},
      "sweep": {"n": [2, 4, 8, 16, 30]},
      "solver": {"tol": 1e-9, "max_iter": 80, "trials": 6})" +
           extra + "\n}";
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
    SUBCASE("a full document round-trips into the struct") {
        const ExperimentConfig cfg = parse_config(base_config(
            R"(, "bounds": {"K_const": 2.0},
               "output": {"dir": "tmp", "format": "json", "include_timing": true, "svg": true},
               "jobs": 4)"));
        CHECK(cfg.seed == 4242);
        CHECK(cfg.jobs == 4);
        CHECK(cfg.klass.kind == "smooth_mother");
        CHECK(cfg.klass.param_count == 2);
        CHECK(cfg.domain.size == 150);
        CHECK(cfg.dictionary.count == 30);
        CHECK(cfg.sweep_n == std::vector<std::size_t>{2, 4, 8, 16, 30});
        CHECK(cfg.solver.tol == 1e-9);
        CHECK(cfg.k_const == 2.0);
        CHECK(cfg.output.format == "json");
        CHECK(cfg.output.include_timing);
        CHECK(cfg.output.svg);
    }
    SUBCASE("seed is mandatory") {
        CHECK_THROWS_AS(parse_config(R"({"jobs": 1})"), ConfigError);
    }
    SUBCASE("unknown top-level keys are rejected") {
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "sweeps": {}})"), ConfigError);
    }
    SUBCASE("unknown nested keys are rejected") {
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "solver": {"tolerance": 1e-9}})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "output": {"file": "x"}})"), ConfigError);
    }
    SUBCASE("sweeps must be strictly increasing") {
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "sweep": {"n": [4, 4, 9]}})"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "sweep": {"epsilon": [0.5, 0.25]}})"),
                        ConfigError);
    }
    SUBCASE("invalid JSON and bad enums are config errors") {
        CHECK_THROWS_AS(parse_config("{"), ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "output": {"format": "xml"}})"),
                        ConfigError);
        CHECK_THROWS_AS(parse_config(R"({"seed": 1, "dictionary": {"mode": "sobol"}})"),
                        ConfigError);
    }
}

TEST_CASE("fit_rate") {
    SUBCASE("an exact power law is recovered exactly") {
        std::vector<RateRecord> records;
        for (std::size_t n : {2, 4, 8, 16, 32}) {
            RateRecord rec;
            rec.n = n;
            rec.measured_error = std::pow(static_cast<double>(n), -0.5);
            records.push_back(rec);
        }
        const RateFit fit = fit_rate(records, RateField::measured_error, 1e-12, -0.5);
        CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.points_used == 5);
        CHECK(fit.excluded.empty());
    }
    SUBCASE("zero and plateau errors are excluded with a note") {
        std::vector<RateRecord> records;
        for (std::size_t n : {2, 4, 8, 16, 32, 64}) {
            RateRecord rec;
            rec.n = n;
            rec.measured_error = n == 64 ? 0.0 : std::pow(static_cast<double>(n), -1.0);
            records.push_back(rec);
        }
        records[4].measured_error = 5e-9;  // below 10 * tol
        const RateFit fit = fit_rate(records, RateField::measured_error, 1e-9, -1.0);
        CHECK(fit.points_used == 4);
        CHECK(fit.excluded == std::vector<std::size_t>{32, 64});
        CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("fewer than four usable points is an error") {
        std::vector<RateRecord> records(3);
        records[0] = {2, 0, 0.5, 0, 0, 0};
        records[1] = {4, 0, 0.25, 0, 0, 0};
        records[2] = {8, 0, 0.125, 0, 0, 0};
        CHECK_THROWS_AS(fit_rate(records, RateField::measured_error, 1e-9, -1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("bound inversion to error-at-n form") {
    ExperimentConfig cfg = parse_config(base_config());
    CHECK(bound_error_at(cfg, 16) == doctest::Approx(std::pow(16.0, -0.5)).epsilon(1e-12));

    cfg.klass.kind = "linear_threshold";
    cfg.klass.input_dim = 2;
    cfg.p = 1.0;
    const double v = 3.0;
    const double c = std::pow(v * std::pow(4.0 * std::numbers::e, v), 1.0 / 2.0);
    CHECK(bound_error_at(cfg, 9) == doctest::Approx(c / 3.0).epsilon(1e-12));

    cfg.klass.kind = "fourier_atom";
    CHECK(std::isnan(bound_error_at(cfg, 4)));
}

TEST_CASE("run_sweep on a small smooth dictionary") {
    const ExperimentConfig cfg = parse_config(base_config());
    const std::vector<RateRecord> records = run_sweep(cfg);
    REQUIRE(records.size() == 5);

    SUBCASE("records are sorted by n and obey the width certificate") {
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (i > 0) CHECK(records[i].n > records[i - 1].n);
            CHECK(records[i].measured_error >= 0.0);
            CHECK(records[i].measured_error <=
                  records[i].epsilon_used + 10.0 * cfg.solver.tol + 1e-8);
            CHECK(records[i].cover_size <= records[i].n);
        }
    }
    SUBCASE("errors are nonincreasing across the nested bases") {
        for (std::size_t i = 1; i < records.size(); ++i)
            CHECK(records[i].measured_error <= records[i - 1].measured_error + 1e-9);
    }
    SUBCASE("a basis spanning the whole dictionary drives the error to the tolerance") {
        CHECK(records.back().n == 30);
        CHECK(records.back().measured_error <= 10.0 * cfg.solver.tol);
    }
    SUBCASE("reruns are bit-identical and job counts do not matter") {
        const std::string csv = records_to_csv(records, false);
        CHECK(records_to_csv(run_sweep(cfg), false) == csv);
        ExperimentConfig parallel = cfg;
        parallel.jobs = 4;
        CHECK(records_to_csv(run_sweep(parallel), false) == csv);
    }
}

TEST_CASE("run_sweep accepts epsilon sweeps") {
    ExperimentConfig cfg = parse_config(base_config());
    cfg.sweep_n.clear();
    cfg.sweep_epsilon = {0.05, 0.2};
    const std::vector<RateRecord> records = run_sweep(cfg);
    REQUIRE(records.size() == 2);
    for (const RateRecord& rec : records) {
        CHECK(rec.cover_size >= 1);
        CHECK(rec.measured_error <= rec.epsilon_used + 10.0 * cfg.solver.tol + 1e-8);
    }
    CHECK(records.front().epsilon_used >= records.back().epsilon_used);
}

TEST_CASE("run_sweep rejects contradictory sweeps") {
    ExperimentConfig cfg = parse_config(base_config());
    cfg.sweep_epsilon = {0.1};
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
    cfg.sweep_epsilon.clear();
    cfg.sweep_n.clear();
    CHECK_THROWS_AS(run_sweep(cfg), ConfigError);
}

TEST_CASE("csv output format") {
    std::vector<RateRecord> records(2);
    records[0] = {4, 0.5, 0.123456789012, 0.7071, 4, 1.25};
    records[1] = {9, 0.25, 0.05, std::numeric_limits<double>::quiet_NaN(), 9, 2.5};
    const std::string csv = records_to_csv(records, false);
    const std::string expected =
        "n,epsilon_used,measured_error,bound_error,cover_size,wall_time_s\n"
        "4,0.5,0.123456789,0.7071,4,0\n"
        "9,0.25,0.05,nan,9,0\n";
    CHECK(csv == expected);
    // timings only appear when explicitly requested
    const std::string timed = records_to_csv(records, true);
    CHECK(timed.find("1.25") != std::string::npos);
}

TEST_CASE("svg output is a plausible standalone plot") {
    std::vector<RateRecord> records;
    for (std::size_t n : {4, 9, 16, 25}) {
        RateRecord rec;
        rec.n = n;
        rec.epsilon_used = std::pow(static_cast<double>(n), -0.5);
        rec.measured_error = 0.8 * rec.epsilon_used;
        rec.bound_error = 2.0 * rec.epsilon_used;
        records.push_back(rec);
    }
    const RateFit fit = fit_rate(records, RateField::measured_error, 1e-12, -0.5);
    const std::string svg = records_to_svg(records, fit);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("verify_constructions passes on randomized instances") {
    ExperimentConfig cfg = parse_config(R"({"seed": 99,
        "verify": {"instances": 60, "max_dim": 16, "max_atoms": 8}})");
    const VerifyReport report = verify_constructions(cfg);
    CHECK(report.passed);
    CHECK(report.shift_passes == 60);
    CHECK(report.collapse_passes == 60);
    CHECK(report.max_reconstruction_residual <= 1e-10);
    CHECK(report.max_shift_excess <= 1e-12);
    CHECK(report.max_mass_deviation <= 1e-12);
    CHECK(report.max_collapse_excess <= 1e-10);
    CHECK(report.max_mass_increase <= 1e-12);
    CHECK_FALSE(report.certificates.empty());
    for (const auto& cert : report.certificates) CHECK(cert.n >= 1);

    SUBCASE("parallel and serial verification agree") {
        ExperimentConfig parallel = cfg;
        parallel.jobs = 4;
        const VerifyReport par = verify_constructions(parallel);
        CHECK(par.max_reconstruction_residual == report.max_reconstruction_residual);
        CHECK(par.max_collapse_excess == report.max_collapse_excess);
        CHECK(par.shift_passes == report.shift_passes);
    }
}

}  // TEST_SUITE
