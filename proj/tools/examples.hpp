#pragma once

#include <string>
#include <utility>
#include <vector>

#include "extdesign/criteria.hpp"
#include "extdesign/design.hpp"
#include "extdesign/model.hpp"

namespace extdesign::examples {

/// Model, nominal parameter, parameter box and candidate design space of a
/// worked example, together with its published reference designs.
struct Setup {
  RegressionModel model;
  ParameterVector theta0;
  Box box;
  DesignSpace space;
  std::vector<std::pair<std::string, DesignMeasure>> designs;

  const DesignMeasure& design(const std::string& name) const;
  ParameterDomain domain() const { return ParameterDomain(box); }
  CriterionSpec spec(CriterionKind kind) const;
};

DesignSpace points_1d(const std::vector<double>& xs);
/// Inclusive range a, a + step, ..., b.
DesignSpace range_1d(double a, double step, double b);

/// Two-point design {(0, u), (pi/2, u)} with equal weights for the circle model.
DesignMeasure circle_design(double u);

/// Bilinear model, theta0 = (1/8, 1/8), box [-3, 4] x [-2, 2], the four vertices
/// of the unit square. Designs: xi_D, xi_E.
Setup example2();
/// One-compartment model, theta0 = (21.80, 0.05884, 4.298), box
/// [16, 27] x [0.03, 0.08] x [3, 6], space 0.2:0.2:24. Designs: xi_D, xi_E,
/// xi_c1..xi_c3.
Setup example3();
/// One-compartment model, theta0 = (0.773, 0.214, 2.09), box [0, 5]^3, space
/// 0:0.1:16. Designs: xi_0 (uniform on 1..16), xi_D, xi_E.
Setup example4();

/// Candidate support for the ec design of functional i (1..3) in example 3:
/// the union of the supports of xi_D, xi_E and xi_ci.
DesignSpace example3_ec_support(const Setup& ex3, int i);
/// "auc", "tmax", "cmax" for i = 1, 2, 3.
std::string pk1_functional_name(int i);

}  // namespace extdesign::examples
