#include "catenary_oracle.hpp"

#include "moorfd/errors.hpp"
#include "moorfd/mooring.hpp"

#include <doctest.h>

#include <cmath>

using namespace moorfd;
using mooring::Vector6d;

TEST_CASE("submerged weight of the shipped chain") {
  const double w = mooring::submerged_weight(594.0, 0.18);
  const double displaced = 1025.0 * M_PI / 4.0 * 0.18 * 0.18;
  CHECK(w == doctest::Approx((594.0 - displaced) * 9.81).epsilon(1e-12));
}

TEST_CASE("hanging chain limit above the anchor") {
  const double w = 5000.0, ea = 1e9;
  const auto s = mooring::solve_catenary_span(0.0, 150.0, 600.0, w, ea);
  CHECK(s.h == 0.0);
  const double hang = (std::sqrt(1.0 + 2.0 * w * 150.0 / ea) - 1.0) * ea / w;
  CHECK(s.v == doctest::Approx(w * hang).epsilon(1e-12));
  CHECK(hang == doctest::Approx(150.0).epsilon(1e-3));
}

TEST_CASE("catenary agrees with the shooting integrator on the design geometry") {
  const auto lines = mooring::default_lines();
  for (const auto& line : lines) {
    for (double surge : {-20.0, 0.0, 20.0}) {
      for (double heave : {-5.0, 0.0, 5.0}) {
        Vector6d pose = Vector6d::Zero();
        pose(0) = surge;
        pose(2) = heave;
        const Eigen::Vector3d f = mooring::fairlead_position(line, pose);
        const Eigen::Vector3d d = f - line.anchor;
        const auto s = mooring::solve_catenary(line, f);
        const auto ref = oracle::shoot_catenary(std::hypot(d.x(), d.y()), d.z(),
                                                line.length_unstretched, line.weight_submerged,
                                                line.ea);
        const double t_ref = std::hypot(ref.h, ref.v);
        CHECK(std::abs(s.tension - t_ref) <= 1e-3 * t_ref);
        CHECK(std::abs(s.h - ref.h) <= 1e-3 * t_ref);
      }
    }
  }
}

TEST_CASE("symmetric layout cancels horizontal loads at the design position") {
  const auto lines = mooring::default_lines();
  const auto states = mooring::healthy_states(lines);
  const auto loads = mooring::mooring_loads(Vector6d::Zero(), lines, states);
  const Eigen::Vector3d d = mooring::fairlead_position(lines[0], Vector6d::Zero()) - lines[0].anchor;
  const double h1 = mooring::solve_catenary_span(std::hypot(d.x(), d.y()), d.z(),
                                                 lines[0].length_unstretched,
                                                 lines[0].weight_submerged, lines[0].ea).h;
  CHECK(std::abs(loads.force(0)) < 1e-6 * h1);
  CHECK(std::abs(loads.force(1)) < 1e-6 * h1);
  CHECK(loads.force(2) < 0.0);
}

TEST_CASE("stiffness is restoring in surge and nearly symmetric") {
  const auto lines = mooring::default_lines();
  const auto states = mooring::healthy_states(lines);
  const auto k = mooring::linearize_mooring_stiffness(lines, states, Vector6d::Zero());
  CHECK(k(0, 0) > 0.0);
  CHECK(k(2, 2) > 0.0);
  const double asym = (k - k.transpose()).norm() / k.norm();
  CHECK(asym < 0.05);
}

TEST_CASE("fairlead release zeroes the line and is idempotent") {
  const auto lines = mooring::default_lines();
  auto states = mooring::healthy_states(lines);
  const mooring::FaultEvent release{mooring::FaultKind::FairleadRelease, 1, 10.0, 0.0};
  CHECK(mooring::apply_mooring_fault(states, release, 9.0)[0].mode == mooring::LineMode::Healthy);
  states = mooring::apply_mooring_fault(states, release, 10.0);
  CHECK(states[0].mode == mooring::LineMode::FairleadReleased);
  const auto again = mooring::apply_mooring_fault(states, release, 20.0);
  CHECK(again[0].mode == states[0].mode);
  const auto loads = mooring::mooring_loads(Vector6d::Zero(), lines, states);
  CHECK(loads.tensions[0] == 0.0);

  auto all = mooring::healthy_states(lines);
  for (int i = 1; i <= 3; ++i) {
    all = mooring::apply_mooring_fault(all, {mooring::FaultKind::FairleadRelease, i, 0.0, 0.0}, 0.0);
  }
  CHECK(mooring::mooring_force(Vector6d::Zero(), lines, all).norm() == 0.0);
}

TEST_CASE("anchor slip changes the effective length") {
  const auto lines = mooring::default_lines();
  auto states = mooring::healthy_states(lines);
  states = mooring::apply_mooring_fault(states, {mooring::FaultKind::AnchorSlip, 1, 0.0, 857.0}, 0.0);
  CHECK(states[0].mode == mooring::LineMode::AnchorSlipped);
  CHECK(states[0].effective_length == 857.0);
  Vector6d pose = Vector6d::Zero();
  pose(0) = 30.0;
  const auto healthy = mooring::mooring_loads(pose, lines, mooring::healthy_states(lines));
  const auto slipped = mooring::mooring_loads(pose, lines, states);
  CHECK(slipped.tensions[0] < healthy.tensions[0]);
  CHECK_THROWS_AS(
      mooring::apply_mooring_fault(states, {mooring::FaultKind::AnchorSlip, 4, 0.0, 800.0}, 0.0),
      ConfigError);
  CHECK(mooring::parse_fault_kind("anchor_slip") == mooring::FaultKind::AnchorSlip);
  CHECK_THROWS_AS(mooring::parse_fault_kind("snap"), ConfigError);
}

TEST_CASE("tension is continuous along small pose changes") {
  const auto lines = mooring::default_lines();
  const auto states = mooring::healthy_states(lines);
  Vector6d pose = Vector6d::Zero();
  double prev = mooring::mooring_loads(pose, lines, states).tensions[0];
  for (int i = 1; i <= 200; ++i) {
    pose(0) = 1e-7 * i;
    const double t = mooring::mooring_loads(pose, lines, states).tensions[0];
    CHECK(std::abs(t - prev) < 1.0);
    prev = t;
  }
}
