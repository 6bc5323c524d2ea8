#include "segbeam/steering.hpp"

#include <cmath>

namespace segbeam {

void validate_geometry(const ArrayGeometry& geom) {
  if (geom.num_elements < 2)
    throw ContractViolation("array needs at least two elements");
  if (!(geom.spacing > 0.0)) throw ContractViolation("spacing must be positive");
  if (!(geom.wave_speed > 0.0))
    throw ContractViolation("wave speed must be positive");
  if (!(geom.frequency > 0.0))
    throw ContractViolation("frequency must be positive");
}

bool spacing_aliases(const ArrayGeometry& geom) {
  return geom.spacing > 0.5 * geom.wavelength();
}

SteeringVector ula_steering(const ArrayGeometry& geom, double angle_deg) {
  validate_geometry(geom);
  if (!std::isfinite(angle_deg))
    throw ContractViolation("bearing must be finite");

  constexpr double kPi = 3.141592653589793238463;
  const double cos_theta = std::cos(angle_deg * kPi / 180.0);
  const double phase_step =
      -2.0 * kPi * geom.frequency * geom.spacing * cos_theta / geom.wave_speed;

  SteeringVector s;
  s.angle_deg = angle_deg;
  s.v.resize(geom.num_elements);
  for (int m = 0; m < geom.num_elements; ++m)
    s.v[m] = std::polar(1.0, phase_step * m);
  return s;
}

}  // namespace segbeam
