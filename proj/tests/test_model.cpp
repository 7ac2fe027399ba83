#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "etsim/model.hpp"

using namespace etsim;

TEST_CASE("ballistic doping profile")
{
    const auto d = DopingProfile::ballistic_diode();
    CHECK(doping_at(d, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(doping_at(d, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(doping_at(d, 0.5) - 0.5) <= 1e-8);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        const double c = doping_at(d, x);
        CHECK(c >= 0.5 - 1e-12);
        CHECK(c <= 1.0 + 1e-12);
        CHECK(std::abs(c - doping_at(d, 1.0 - x)) <= 1e-12);
    }
    CHECK_THROWS_AS((void)doping_at(d, -0.01), std::domain_error);
    CHECK_THROWS_AS((void)doping_at(d, 1.01), std::domain_error);
}

TEST_CASE("lattice temperature profiles")
{
    const auto cool = LatticeProfile::cooling();
    const auto heat = LatticeProfile::heating();
    CHECK(lattice_at(cool, 0.0) == doctest::Approx(0.625));
    CHECK(lattice_at(cool, 0.5) == doctest::Approx(0.5));
    CHECK(lattice_at(heat, 0.0) == doctest::Approx(1.0));
    CHECK(lattice_at(heat, 0.5) == doctest::Approx(1.75));
    CHECK(lattice_at(LatticeProfile::uniform(1.3), 0.7) == 1.3);
}

TEST_CASE("tabulated profiles interpolate linearly")
{
    Table t{{0.0, 0.5, 1.0}, {1.0, 2.0, 4.0}};
    const auto d = DopingProfile::tabulated(t);
    CHECK(doping_at(d, 0.25) == doctest::Approx(1.5));
    CHECK(doping_at(d, 0.75) == doctest::Approx(3.0));
    Table bad{{0.0, 0.5, 0.5}, {1.0, 2.0, 3.0}};
    CHECK_THROWS(DopingProfile::tabulated(bad).validate());
}

TEST_CASE("monitor bounds")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 0.2);
    cfg.scaled.tau = 3.126;
    cfg.scaled.lambda2 = 3.0e-3;
    const auto b = monitor_bounds(cfg);
    CHECK(b.m == doctest::Approx(0.5));
    CHECK(b.M == doctest::Approx(0.625));
    CHECK(b.k0 == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(b.K0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(b.alpha - 333.53) <= 333.53e-3);
    CHECK(b.beta == doctest::Approx(0.625 / 3.126));

    auto hot = cfg;
    hot.lattice = LatticeProfile::heating();
    const auto h = monitor_bounds(hot);
    CHECK(h.m == doctest::Approx(1.0));
    CHECK(h.M == doctest::Approx(1.75));
    CHECK(h.M >= b.M);
    CHECK(h.alpha >= b.alpha);

    CHECK_THROWS_AS((void)monitor_bounds(cfg, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("initial state and boundary data")
{
    const auto cfg = DeviceConfig::ballistic(LatticeProfile::heating(), 1.0);
    const auto bc = boundary_data(cfg);
    CHECK(bc.v.left == 0.0);
    CHECK(bc.v.right == doctest::Approx(38.68).epsilon(1e-3));
    const State s = initial_state(cfg);
    REQUIRE(s.size() == 201);
    CHECK(s.t == 0.0);
    CHECK(s.v.front() == 0.0);
    CHECK(s.v.back() == doctest::Approx(bc.v.right));
    CHECK(s.v[100] == doctest::Approx(0.5 * bc.v.right));
    CHECK(s.n[100] == doctest::Approx(doping_at(cfg.doping, 0.5)));
    CHECK(s.theta[100] == doctest::Approx(1.75));
}

TEST_CASE("scheme names round trip")
{
    for (auto s : {Scheme::ConsistentTrapezoidal, Scheme::PaperLiteral, Scheme::ImplicitEuler}) {
        CHECK(scheme_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS((void)scheme_from_string("euler"), std::invalid_argument);
}

TEST_CASE("configuration JSON")
{
    SUBCASE("defaults and round trip")
    {
        const auto cfg = device_config_from_json(nlohmann::json::object());
        CHECK(cfg.grid.N == 201);
        CHECK(cfg.lattice.kind == LatticeProfile::Kind::Cooling);
        auto heated = DeviceConfig::ballistic(LatticeProfile::heating(), 0.2);
        heated.scheme = Scheme::PaperLiteral;
        const nlohmann::json j = heated;
        const auto back = device_config_from_json(j);
        CHECK(back.bias_scaled == heated.bias_scaled);
        CHECK(back.scheme == Scheme::PaperLiteral);
        CHECK(back.lattice.kind == LatticeProfile::Kind::Heating);
        CHECK(nlohmann::json(back) == j);
    }
    SUBCASE("too few nodes")
    {
        const auto j = nlohmann::json::parse(R"({"grid": {"N": 2}})");
        CHECK_THROWS_AS((void)device_config_from_json(j), std::invalid_argument);
        const auto neg = nlohmann::json::parse(R"({"grid": {"N": -5}})");
        CHECK_THROWS_AS((void)device_config_from_json(neg), std::invalid_argument);
    }
    SUBCASE("bad values")
    {
        CHECK_THROWS((void)device_config_from_json(nlohmann::json::parse(R"({"grid": {"dt": 0}})")));
        CHECK_THROWS((void)device_config_from_json(nlohmann::json::parse(R"({"lattice": {"kind": "warm"}})")));
        CHECK_THROWS((void)device_config_from_json(nlohmann::json::parse(R"({"scheme": "rk4"})")));
    }
}
