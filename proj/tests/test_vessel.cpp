#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "usv/errors.hpp"
#include "usv/vessel.hpp"

using namespace usv::sim;
using doctest::Approx;

namespace {

VesselState mirrored(const VesselState& s) { return {s.x, -s.y, -s.psi, s.u, -s.v, -s.r}; }

}  // namespace

TEST_CASE("default parameters are valid") {
  CHECK_NOTHROW(VesselParams::defaults().validate());
}

TEST_CASE("parameter validation rejects bad values") {
  auto rejects = [](auto mutate) {
    VesselParams p = VesselParams::defaults();
    mutate(p);
    CHECK_THROWS_AS(p.validate(), usv::ConfigError);
  };
  rejects([](VesselParams& p) { p.mass(0, 1) = 5.0; });
  rejects([](VesselParams& p) { p.mass(2, 2) = -1.0; });
  rejects([](VesselParams& p) { p.bow_max = 0.0; });
  rejects([](VesselParams& p) { p.tau_stern = 0.0; });
  rejects([](VesselParams& p) { p.bus_voltage = 0.0; });
  rejects([](VesselParams& p) { p.damping_linear(1, 1) = std::nan(""); });
}

TEST_CASE("equilibrium has zero derivative") {
  const auto d = vessel_derivative({}, {}, {}, VesselParams::defaults());
  CHECK(d.eta_dot.norm() == 0.0);
  CHECK(d.nu_dot.norm() == 0.0);
}

TEST_CASE("symmetric stern thrust from rest accelerates in pure surge") {
  const VesselParams p = VesselParams::defaults();
  const double f = 80.0;
  const auto d = vessel_derivative({}, {f, f, 0.0}, {}, p);
  const Eigen::Vector3d expected =
      p.mass.inverse() * Eigen::Vector3d(2.0 * f * std::cos(p.stern_angle), 0.0, 0.0);
  CHECK((d.nu_dot - expected).norm() < 1e-12);
}

TEST_CASE("drifting with a uniform current produces no hydrodynamic force") {
  const VesselParams p = VesselParams::defaults();
  EnvForces env;
  env.current = {0.3, -0.4};
  for (double psi : {0.0, 0.7, -2.1, 3.0}) {
    const Eigen::Vector3d nu_c = rotation(psi).transpose() * Eigen::Vector3d(0.3, -0.4, 0.0);
    const VesselState s{1.0, 2.0, psi, nu_c[0], nu_c[1], 0.0};
    const auto d = vessel_derivative(s, {}, env, p);
    CHECK(d.nu_dot.norm() < 1e-12);
    CHECK(d.eta_dot[0] == Approx(0.3));
    CHECK(d.eta_dot[1] == Approx(-0.4));
  }
}

TEST_CASE("a beam current overpowers the bow thruster") {
  const VesselParams p = VesselParams::defaults();
  EnvForces env;
  env.current = {0.0, 0.5};
  const auto d = vessel_derivative({}, {}, env, p);
  const double sway_force = (p.mass * d.nu_dot)[1];
  CHECK(sway_force > p.bow_max);
}

TEST_CASE("thruster lag fixed point") {
  Simulator sim(VesselParams::defaults(), {});
  for (int k = 0; k < 3000; ++k) sim.step({100.0, 100.0, 20.0}, {}, 0.01);
  const ThrustCommand before = sim.thrusters().actual;
  sim.step({100.0, 100.0, 20.0}, {}, 0.01);
  CHECK(sim.thrusters().actual.stern_left == Approx(before.stern_left).epsilon(1e-12));
  CHECK(sim.thrusters().actual.bow == Approx(before.bow).epsilon(1e-12));
}

TEST_CASE("stern thruster step reaches 1 - 1/e of the command after one time constant") {
  const VesselParams p = VesselParams::defaults();
  REQUIRE(p.tau_stern == 0.5);
  Simulator sim(p, {});
  for (int k = 0; k < 50; ++k) sim.step({100.0, 0.0, 0.0}, {}, 0.01);
  const double oracle = 100.0 * (1.0 - std::exp(-1.0));
  CHECK(sim.thrusters().actual.stern_left == Approx(oracle).epsilon(0.01));
  CHECK(sim.thrusters().actual.stern_left == Approx(63.2).epsilon(0.01));
}

TEST_CASE("charge for a constant 100 N over 100 s matches the closed form") {
  VesselParams p = VesselParams::defaults();
  p.k_power = 1.0;
  p.bus_voltage = 48.0;
  Simulator sim(p, {});
  // Let the lag settle so the delivered thrust is the constant 100 N.
  for (int k = 0; k < 3000; ++k) sim.step({100.0, 0.0, 0.0}, {}, 0.01);
  const double start = sim.charge_used_ah();
  for (int k = 0; k < 10000; ++k) sim.step({100.0, 0.0, 0.0}, {}, 0.01);
  const double used = sim.charge_used_ah() - start;
  const double oracle = 1.0 * std::pow(100.0, 1.5) * 100.0 / (48.0 * 3600.0);
  CHECK(used == Approx(oracle).epsilon(1e-9));
  CHECK(used == Approx(0.5787).epsilon(1e-4));
}

TEST_CASE("delivered thrust never exceeds the limits") {
  const VesselParams p = VesselParams::defaults();
  Simulator sim(p, {});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> huge(-1e5, 1e5);
  for (int k = 0; k < 2000; ++k) {
    const ThrustCommand cmd{huge(rng), huge(rng), huge(rng)};
    const auto res = sim.step(cmd, {}, 0.01);
    CHECK(res.clamped[0] == (std::abs(cmd.stern_left) > p.stern_max));
    const ThrustCommand& a = sim.thrusters().actual;
    CHECK(std::abs(a.stern_left) <= p.stern_max);
    CHECK(std::abs(a.stern_right) <= p.stern_max);
    CHECK(std::abs(a.bow) <= p.bow_max);
  }
}

TEST_CASE("charge is nondecreasing and zero without thrust") {
  Simulator idle(VesselParams::defaults(), {});
  for (int k = 0; k < 500; ++k) idle.step({}, {}, 0.01);
  CHECK(idle.charge_used_ah() == 0.0);

  Simulator sim(VesselParams::defaults(), {});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> cmd(-300.0, 300.0);
  double prev = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const auto res = sim.step({cmd(rng), cmd(rng), cmd(rng)}, {}, 0.01);
    CHECK(res.charge_delta_ah >= 0.0);
    CHECK(sim.charge_used_ah() >= prev);
    prev = sim.charge_used_ah();
  }
}

TEST_CASE("mirrored commands mirror the trajectory") {
  const VesselParams p = VesselParams::defaults();
  Simulator a(p, {});
  Simulator b(p, {});
  for (int k = 0; k < 4000; ++k) {
    const double t = k * 0.01;
    const ThrustCommand cmd{120.0 + 30.0 * std::sin(0.3 * t), 60.0, 25.0 * std::cos(0.2 * t)};
    a.step(cmd, {}, 0.01);
    b.step({cmd.stern_right, cmd.stern_left, -cmd.bow}, {}, 0.01);
    const VesselState m = mirrored(b.state());
    const VesselState& s = a.state();
    REQUIRE(std::abs(s.x - m.x) < 1e-9);
    REQUIRE(std::abs(s.y - m.y) < 1e-9);
    REQUIRE(std::abs(s.psi - m.psi) < 1e-9);
    REQUIRE(std::abs(s.v - m.v) < 1e-9);
    REQUIRE(std::abs(s.r - m.r) < 1e-9);
  }
}

TEST_CASE("a drifting hull translates with the current") {
  const VesselParams p = VesselParams::defaults();
  EnvForces env;
  env.current = {0.2, 0.45};

  SUBCASE("started at the current velocity it moves exactly with the water") {
    const double psi = 0.4;
    const Eigen::Vector3d nu_c = rotation(psi).transpose() * Eigen::Vector3d(0.2, 0.45, 0.0);
    Simulator sim(p, {3.0, -1.0, psi, nu_c[0], nu_c[1], 0.0});
    for (int k = 0; k < 5000; ++k) sim.step({}, env, 0.01);
    CHECK(sim.state().x == Approx(3.0 + 0.2 * 50.0).epsilon(1e-9));
    CHECK(sim.state().y == Approx(-1.0 + 0.45 * 50.0).epsilon(1e-9));
    CHECK(sim.state().psi == Approx(psi).epsilon(1e-12));
  }
  SUBCASE("started at rest it converges onto the current") {
    Simulator sim(p, {});
    for (int k = 0; k < 30000; ++k) sim.step({}, env, 0.01);
    const Eigen::Vector3d world = rotation(sim.state().psi) * sim.state().nu();
    CHECK(std::abs(world[0] - 0.2) < 1e-3);
    CHECK(std::abs(world[1] - 0.45) < 1e-3);
    // Once settled, position advances by V_c * t like the still-water hull.
    const double x0 = sim.state().x, y0 = sim.state().y;
    for (int k = 0; k < 1000; ++k) sim.step({}, env, 0.01);
    CHECK(sim.state().x - x0 == Approx(0.2 * 10.0).epsilon(1e-3));
    CHECK(sim.state().y - y0 == Approx(0.45 * 10.0).epsilon(1e-3));
  }
}

TEST_CASE("non-positive step is rejected and heading stays wrapped") {
  Simulator sim(VesselParams::defaults(), {0.0, 0.0, 7.0, 0.0, 0.0, 0.0});
  CHECK(std::abs(sim.state().psi) <= M_PI);
  CHECK_THROWS_AS(sim.step({}, {}, 0.0), usv::ConfigError);
  for (int k = 0; k < 3000; ++k) {
    sim.step({80.0, -80.0, 0.0}, {}, 0.01);
    REQUIRE(std::abs(sim.state().psi) <= M_PI);
  }
}

TEST_CASE("non-finite environment is a numerical error") {
  Simulator sim(VesselParams::defaults(), {});
  EnvForces env;
  env.wave[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(sim.step({}, env, 0.01), usv::NumericalError);
}

TEST_CASE("spin manoeuvre stays in place") {
  const auto spin = run_spin(VesselParams::defaults(), 0.01);
  double drift = 0.0;
  for (const auto& s : spin) drift = std::max(drift, std::hypot(s.state.x, s.state.y));
  CHECK(drift < 0.5);
  CHECK(std::abs(spin.back().state.r) > 0.1);
}

TEST_CASE("zig-zag yaw rate alternates each phase") {
  const auto zz = run_zigzag(VesselParams::defaults(), 0.01);
  std::vector<double> rates;
  for (const auto& s : zz) {
    if (s.t > 0.0 && std::abs(std::remainder(s.t, 10.0)) < 1e-9) rates.push_back(s.state.r);
  }
  REQUIRE(rates.size() == 6);
  for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] * rates[i - 1] < 0.0);
}

TEST_CASE("RK4 observed order on the zig-zag is at least 3.5") {
  const double order = zigzag_convergence_order(VesselParams::defaults());
  MESSAGE("observed order " << order);
  CHECK(order >= 3.5);
}

TEST_CASE("verification manoeuvres all pass on the default vessel") {
  for (const auto& c : verify_manoeuvres(VesselParams::defaults())) {
    INFO(c.name << " = " << c.value);
    CHECK(c.passed);
  }
}
