// Writes the exact-arithmetic expectations for the hand pencils as JSON.
// The output is committed under tests/fixtures and compared against the
// library by the acceptance suite.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exact_oracle.hpp"

namespace {

using oracle::Mat;
using oracle::Pencil;

struct Case {
  std::string name;
  Pencil p;
};

std::vector<Case> hand_pencils() {
  return {
      {"P1", {Mat(1, 1, {0}), Mat(1, 1, {1})}},
      {"P2", {Mat(2, 2, {1, 0, 0, 1}), Mat(2, 2, {1, 0, 0, 2})}},
      {"P3", {Mat(2, 2, {0, 1, 0, 0}), Mat(2, 2, {1, 0, 0, 1})}},
      {"P4", {Mat(1, 2, {1, 0}), Mat(1, 2, {0, 1})}},
      {"P5", {Mat(2, 1, {1, 0}), Mat(2, 1, {0, 1})}},
      {"zero_1x1", {Mat(1, 1, {0}), Mat(1, 1, {0})}},
      {"J2_3", {Mat(2, 2, {1, 0, 0, 1}), Mat(2, 2, {3, 1, 0, 3})}},
      {"N3", {Mat(3, 3, {0, 1, 0, 0, 0, 1, 0, 0, 0}), Mat(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1})}},
  };
}

nlohmann::json to_json(const Mat& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    auto row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols; ++j) {
      const auto& q = m(i, j);
      if (q.denominator() != 1) {
        throw std::runtime_error("hand pencils use integer entries");
      }
      row.push_back(q.numerator());
    }
    rows.push_back(row);
  }
  return rows;
}

std::string rational(const oracle::Q& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

} // namespace

int main() {
  nlohmann::json out;
  out["generator"] = "exact rational brute-force reduction";
  for (const auto& c : hand_pencils()) {
    const auto prof = oracle::profile(c.p);
    nlohmann::json j;
    j["m"] = c.p.e.rows;
    j["n"] = c.p.e.cols;
    j["E"] = to_json(c.p.e);
    j["A"] = to_json(c.p.a);
    j["alpha"] = prof.alpha;
    j["beta_obs"] = prof.beta_obs;
    j["beta_ctrl"] = prof.beta_ctrl;
    j["regular"] = prof.regular;
    j["resolvent"] = oracle::to_string(oracle::resolvent_kind(c.p));
    if (auto poly = oracle::characteristic_polynomial(c.p)) {
      auto coeffs = nlohmann::json::array();
      for (const auto& q : *poly) {
        coeffs.push_back(rational(q));
      }
      j["det_coefficients"] = coeffs;
    }
    const auto first_obs = oracle::observation_step(c.p);
    j["first_obs_shape"] = {first_obs.reduced.e.rows, first_obs.reduced.e.cols};
    const auto first_ctrl = oracle::control_step(c.p);
    j["first_ctrl_shape"] = {first_ctrl.reduced.e.rows, first_ctrl.reduced.e.cols};
    out["pencils"][c.name] = j;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}
