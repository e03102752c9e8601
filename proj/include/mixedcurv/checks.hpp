#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace mixedcurv {

struct CheckLine {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool pass = true;
  void add(const std::string& name, double measured, double expected, double tol) {
    CheckLine l{name, measured, expected, tol, std::fabs(measured - expected) <= tol};
    pass = pass && l.pass;
    lines.push_back(std::move(l));
  }
};

}  // namespace mixedcurv
