#pragma once

#include <string>

#include "projmod/extension.hpp"
#include "projmod/io.hpp"

namespace projmod {

/// Rank-one idempotent over the 2-torus built from a winding map into the
/// sphere: p = (1 + n.sigma)/2 with
///   n ~ (sin 2 pi k x, sin 2 pi y, 1 - cos 2 pi k x - cos 2 pi y),
/// normalized pointwise, band-limited, then retracted. winding = 0 yields
/// the constant diag(1, 0). Throws NoConvergence (reporting the smallest
/// viable band) when the band is too small for the requested winding.
Idempotent gen_bott(const BackendPtr& backend, int winding, int band);

/// First Chern number tau(p [d1 p, d2 p]) / (2 pi i); integer-quantized
/// and equal to +-winding for gen_bott outputs.
double chern_number(const Idempotent& p);

struct ScenarioRecord {
  std::string name;
  std::string check;  ///< the verified identity, spelled out
  int samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ScenarioReport {
  std::string scenario;
  BackendConfig backend;
  std::uint64_t seed = 0;
  std::vector<ScenarioRecord> records;
  double wall_ms = 0.0;
  bool pass() const;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int band = 8;      ///< torus Fourier band N
  int cap = 64;      ///< hard degree cap M
  double theta = 0.6180339887;
  int nc_band = 6;
  int winding = 1;   ///< Bott winding number
  double tol = 1e-9;
  bool quick = false;  ///< reduced sample counts, for exploration only
};

const std::vector<std::string>& scenario_names();
ScenarioReport run_scenario(const std::string& name,
                            const ScenarioConfig& cfg);

/// Report JSON; timing is excluded by default so reruns with one seed are
/// byte-identical.
Json to_json(const ScenarioReport& report, bool include_timing = false);

}  // namespace projmod
