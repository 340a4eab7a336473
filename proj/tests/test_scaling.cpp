#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <random>

#include "ecmpower/io.hpp"
#include "ecmpower/scaling.hpp"

using namespace ecmpower;

namespace {

KernelDescription bundled(const std::string& name) {
    return load_kernel(std::string(ECMPOWER_SOURCE_DIR) + "/kernels/" + name);
}

ScalingModel triad_model() {
    return build_scaling_model(bundled("schoenauer-triad"), sandy_bridge_ep(), "memory",
                               2.7, Hypothesis::no_overlap);
}

}  // namespace

TEST_CASE("triad scaling saturates between two and three cores") {
    auto model = triad_model();
    auto sat = saturation_point(model);
    CHECK(sat.t_continuous == doctest::Approx(2.09).epsilon(5e-3));
    CHECK(sat.cores == 3);

    auto curve = scaling_curve(model);
    REQUIRE(curve.size() == 8);
    CHECK(curve[0].second < model.pmax);
    CHECK(curve[1].second < model.pmax);
    CHECK(curve[2].second == doctest::Approx(model.pmax));
    CHECK(curve[2].second / curve[0].second == doctest::Approx(2.09).epsilon(5e-3));
}

TEST_CASE("LBM AVX saturates at three to four cores at 2.7 GHz") {
    auto model = build_scaling_model(bundled("lbm-d3q19-avx"), sandy_bridge_ep(),
                                     "memory", 2.7, Hypothesis::no_overlap);
    auto sat = saturation_point(model);
    CHECK(sat.t_continuous > 3.0);
    CHECK(sat.t_continuous < 4.0);
    CHECK(sat.cores == 4);
}

TEST_CASE("linear scaling without a cap") {
    ScalingModel model{100.0, std::numeric_limits<double>::infinity(), 8, 0.0};
    auto curve = scaling_curve(model);
    for (const auto& [t, p] : curve)
        CHECK(p == doctest::Approx(100.0 * t));
}

TEST_CASE("already-saturated model has t_s = 1") {
    ScalingModel model{100.0, 100.0, 8, 0.0};
    auto sat = saturation_point(model);
    CHECK(sat.t_continuous == doctest::Approx(1.0));
    CHECK(sat.cores == 1);
}

TEST_CASE("roofline bounds") {
    auto m = sandy_bridge_ep();
    SUBCASE("STREAM triad chip bound") {
        CHECK(roofline_gflops(bundled("stream-triad"), m, 2.7, 8) ==
              doctest::Approx(2.25));
    }
    SUBCASE("Jacobi chip bound") {
        CHECK(roofline_gflops(bundled("jacobi-2d"), m, 2.7, 8) == doctest::Approx(6.0));
    }
    SUBCASE("compute-bound kernel hits peak") {
        KernelDescription k;
        k.flops_per_iteration = 1000.0;
        k.streams.push_back({"a", StreamKind::load, 1, 8.0, false});
        CHECK(roofline_gflops(k, m, 2.7, 8) == doctest::Approx(m.peak_gflops(2.7, 8)));
    }
    SUBCASE("zero-flop kernel is a domain error") {
        KernelDescription k;
        k.streams.push_back({"a", StreamKind::load, 1, 8.0, false});
        CHECK_THROWS_AS(roofline_gflops(k, m, 2.7, 8), std::invalid_argument);
    }
}

TEST_CASE("scaling curve is concave and monotone") {
    std::mt19937 rng(211);
    std::uniform_real_distribution<double> p0(1.0, 100.0);
    std::uniform_real_distribution<double> pmax(1.0, 500.0);
    std::uniform_real_distribution<double> dnu(-0.5, 0.5);
    for (int i = 0; i < 300; ++i) {
        ScalingModel model{p0(rng), pmax(rng), 16, dnu(rng)};
        auto curve = scaling_curve(model);
        double prev_inc = std::numeric_limits<double>::infinity();
        for (std::size_t t = 1; t < curve.size(); ++t) {
            double inc = curve[t].second - curve[t - 1].second;
            CHECK(inc >= -1e-9);
            CHECK(inc <= prev_inc + 1e-9);
            prev_inc = inc;
        }
    }
}

TEST_CASE("ceil(t_s) is the first core count that reaches Pmax") {
    std::mt19937 rng(223);
    std::uniform_real_distribution<double> p0(1.0, 50.0);
    std::uniform_real_distribution<double> pmax(1.0, 400.0);
    for (int i = 0; i < 300; ++i) {
        ScalingModel model{p0(rng), pmax(rng), 32, 0.0};
        auto sat = saturation_point(model);
        auto curve = scaling_curve(model);
        int first = model.cores + 1;
        for (const auto& [t, p] : curve)
            if (p >= model.pmax - 1e-9) {
                first = t;
                break;
            }
        if (first <= model.cores)
            CHECK(sat.cores == first);
        else
            CHECK(sat.cores == model.cores);
    }
}

TEST_CASE("raising P0 never raises t_s") {
    std::mt19937 rng(227);
    std::uniform_real_distribution<double> p0(1.0, 50.0);
    std::uniform_real_distribution<double> pmax(1.0, 400.0);
    std::uniform_real_distribution<double> boost(1.0, 4.0);
    for (int i = 0; i < 300; ++i) {
        ScalingModel model{p0(rng), pmax(rng), 32, 0.0};
        ScalingModel faster = model;
        faster.p0 *= boost(rng);
        CHECK(saturation_point(faster).t_continuous <=
              saturation_point(model).t_continuous + 1e-12);
    }
}
