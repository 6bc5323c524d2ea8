#pragma once

#include "segbeam/linalg.hpp"

namespace segbeam {

// Uniform linear array. Element m sits at m*spacing along the array axis,
// m = 0..num_elements-1.
struct ArrayGeometry {
  int num_elements = 0;
  double spacing = 0.0;     // meters
  double wave_speed = 0.0;  // meters per second
  double frequency = 0.0;   // hertz, narrowband carrier

  double wavelength() const { return wave_speed / frequency; }
};

// Throws ContractViolation unless num_elements >= 2 and spacing, speed,
// frequency are all positive.
void validate_geometry(const ArrayGeometry& geom);

// True when spacing > wavelength/2, i.e. the array has grating lobes and
// two bearings can alias onto the same steering vector.
bool spacing_aliases(const ArrayGeometry& geom);

struct SteeringVector {
  CVector v;                   // unit-modulus phase ramp, |v_m| = 1
  double angle_deg = 0.0;      // bearing it was built for
  int dim() const { return static_cast<int>(v.size()); }
};

// Narrowband plane-wave steering for a ULA. angle_deg is measured from
// endfire (the array axis), so 90 degrees is broadside and yields the
// all-ones vector. Element m gets phase -2*pi*f*m*spacing*cos(angle)/c.
SteeringVector ula_steering(const ArrayGeometry& geom, double angle_deg);

}  // namespace segbeam
