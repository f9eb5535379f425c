#include "doctest.h"
#include "siegelmate/config.hpp"
#include "siegelmate/render.hpp"

#include <cmath>
#include <numbers>

using namespace siegelmate;

TEST_CASE("config parsing and validation") {
    auto cfg = JobConfig::parse("# fixture\n[job]\ntheta = silver\nangle = 3/7  # airplane\n[depths]\nprobe = 12\n");
    CHECK(cfg.get("job.theta") == "silver");
    CHECK(cfg.spec().characteristic_angle == Angle(3, 7));
    CHECK(cfg.count("depths.probe") == 12);
    CHECK(cfg.number("tolerances.probe_ratio") == 0.1);
    CHECK_NOTHROW(cfg.validate());

    CHECK_THROWS_AS(cfg.set("job.colour", "red"), ValidationError);
    CHECK_THROWS_AS(JobConfig::parse("[job\n"), ValidationError);
    CHECK_THROWS_AS(JobConfig::parse("[job]\ntheta\n"), ValidationError);

    cfg.set("job.period", "0");
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.set("job.period", "2");
    CHECK_THROWS_AS(cfg.validate(), ValidationError);  // 3/7 has period 3
    cfg.set("job.period", "3");
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("explicit parameters resolve through the fixture table") {
    JobConfig cfg;
    cfg.set("job.c", "-2");
    CHECK(cfg.spec().characteristic_angle == Angle(1, 2));
    cfg.set("job.c", "-1.54368");
    CHECK(cfg.spec().characteristic_angle == Angle(5, 12));
    cfg.set("job.c", "0.25");
    CHECK_THROWS_AS(cfg.spec(), ValidationError);
}

TEST_CASE("report envelope rounds floats and echoes the job") {
    JobConfig cfg;
    auto rep = report_envelope("angles", cfg, {{"x", 0.1 + 0.2}, {"v", {1.0 / 3.0}}});
    CHECK(rep["result"]["x"].get<double>() == 0.3);
    CHECK(rep["result"]["v"][0].dump() == "0.333333333333");
    CHECK(rep["command"] == "angles");
    CHECK(rep["versions"]["cli_reports"] == kVersion);
    CHECK(rep["config"]["job.theta"] == cfg.get("job.theta"));
}

TEST_CASE("inverse iteration lies on the known Julia sets") {
    for (const auto& z : julia_points({-2.0, 0.0}, 2000, 3)) {
        CHECK(std::abs(z.imag()) < 1e-9);
        CHECK(std::abs(z.real()) <= 2.0 + 1e-9);
    }
    for (const auto& z : julia_points({0.0, 0.0}, 2000, 3)) CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
}

TEST_CASE("raster geometry and ppm header") {
    ImageSpec spec;
    spec.width = 40;
    spec.height = 20;
    spec.span = 4.0;
    int x = 0, y = 0;
    REQUIRE(spec.to_pixel(spec.pixel(13, 7), x, y));
    CHECK(x == 13);
    CHECK(y == 7);
    CHECK_FALSE(spec.to_pixel({5.0, 0.0}, x, y));

    auto r = render_polynomial({-1.0, 0.0}, spec);
    auto bytes = r.ppm();
    CHECK(bytes.rfind("P6\n40 20\n255\n", 0) == 0);
    CHECK(bytes.size() == std::string("P6\n40 20\n255\n").size() + 40 * 20 * 3);
}
