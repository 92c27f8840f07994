#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vtag {

struct GradCheckRow {
  std::string config;
  std::string group;  // parameter tensor name
  std::size_t entries = 0;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  bool pass = true;
};

// Central finite differences against the analytic gradients over tiny model
// instances covering every layer type, both losses and both heads. An entry
// passes when |analytic - numeric| <= max(tolerance * max(|analytic|,
// |numeric|), 1e-10).
GradCheckReport run_gradcheck(std::uint64_t seed, double tolerance = 1e-5,
                              double step = 1e-5);

std::string format_gradcheck(const GradCheckReport& report);

}  // namespace vtag
