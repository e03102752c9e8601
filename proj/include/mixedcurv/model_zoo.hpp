#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "mixedcurv/special_geometries.hpp"

namespace mixedcurv {

struct ModelParams {
  std::vector<int> dims;                   // split override where meaningful
  std::map<std::string, double> num;       // named scalar parameters
  double get(const std::string& key, double fallback) const {
    auto it = num.find(key);
    return it == num.end() ? fallback : it->second;
  }
};

struct ModelInstance {
  std::string name;
  Chart chart;
  SplitSpec split;
  AdaptedFrameField frame;
  std::optional<SasakiStructure> sasaki;
  CheckReport load_checks;

  // deterministic interior sample points
  std::vector<std::vector<double>> sample_points(int count, std::uint64_t seed) const;
};

// one factor of a twisted product
struct TwistedFactor {
  int dim = 1;
  std::vector<double> lo, hi;
  std::vector<std::uint8_t> periodic;
  MatrixFieldFn metric;  // dim x dim; identity when empty
};

namespace model_zoo {

std::vector<std::string> model_names();
std::string describe(const std::string& name);

// flat_torus(n, split), surface_circle(K), sphere3_lie(), sasaki7(),
// warped_paper_example(f1, f2), twisted_3d(), warped_paper_perturbed(q)
ModelInstance instantiate(const std::string& name, const ModelParams& params);

ModelInstance make_twisted_product(const std::vector<TwistedFactor>& factors,
                                   const std::vector<std::function<double(const double*)>>& twists);

}  // namespace model_zoo

}  // namespace mixedcurv
