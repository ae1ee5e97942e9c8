#include "droplab/physics.hpp"

#include <cmath>

#include "droplab/error.hpp"

namespace droplab {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::NonPositiveInput, std::string(what) + " must be positive");
}

void require_radius(double radius_um) {
  if (!(radius_um > 0.0) || !std::isfinite(radius_um))
    throw Error(ErrorCode::NonPositiveRadius, "radius must be positive");
}

}  // namespace

SedimentationModel::SedimentationModel(double eta, double rho, double g) : eta_(eta), rho_(rho), g_(g) {
  require_positive(eta, "viscosity");
  require_positive(rho, "density");
  require_positive(g, "gravity");
}

double sedimentation_time(const SedimentationModel& model, double radius_um, double height_um) {
  require_radius(radius_um);
  if (!(height_um >= 0.0)) throw Error(ErrorCode::NonPositiveInput, "height must be non-negative");
  return model.phi() * height_um / (radius_um * radius_um);
}

double terminal_velocity(const SedimentationModel& model, double radius_um) {
  require_radius(radius_um);
  return radius_um * radius_um / model.phi();
}

double estimate_radius(const SedimentationModel& model, double fall_height_um, double fall_time_s) {
  require_positive(fall_height_um, "fall height");
  require_positive(fall_time_s, "fall time");
  return std::sqrt(model.phi() * fall_height_um / fall_time_s);
}

double min_detectable_radius(const SedimentationModel& model, double fall_height_um, double max_track_time_s) {
  return estimate_radius(model, fall_height_um, max_track_time_s);
}

}  // namespace droplab
