#pragma once

namespace droplab {

// Stokes settling of a spherical water droplet in still air.
//
// Units: lengths in micrometres, time in seconds, mass in grams. The
// prefactor phi = 9 eta / (2 rho g) carries units of um*s, so that the
// settling time from height z is phi * z / R^2. No slip correction is
// applied; the model loses accuracy below roughly 1 um. Evaporation is not
// modelled.
class SedimentationModel {
 public:
  static constexpr double kAirViscosity = 1.86e-8;  // g / (um s), air at 25 C
  static constexpr double kWaterDensity = 1e-12;    // g / um^3
  static constexpr double kGravity = 9.8e6;         // um / s^2

  // Throws NonPositiveInput unless every constant is strictly positive.
  explicit SedimentationModel(double eta = kAirViscosity, double rho = kWaterDensity, double g = kGravity);

  double eta() const noexcept { return eta_; }
  double rho() const noexcept { return rho_; }
  double gravity() const noexcept { return g_; }
  // Always derived from the constants.
  double phi() const noexcept { return 9.0 * eta_ / (2.0 * rho_ * g_); }

 private:
  double eta_;
  double rho_;
  double g_;
};

// tau = phi * height / radius^2. Throws NonPositiveRadius, or
// NonPositiveInput for a negative height.
double sedimentation_time(const SedimentationModel& model, double radius_um, double height_um);

// v = radius^2 / phi, in um/s.
double terminal_velocity(const SedimentationModel& model, double radius_um);

// R = sqrt(phi * height / time). Throws NonPositiveInput.
double estimate_radius(const SedimentationModel& model, double fall_height_um, double fall_time_s);

// Smallest radius that completes a fall of fall_height_um within
// max_track_time_s; same closed form as estimate_radius.
double min_detectable_radius(const SedimentationModel& model, double fall_height_um, double max_track_time_s);

}  // namespace droplab
