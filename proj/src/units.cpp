#include "beatscope/units.hpp"

#include <cmath>

#include "beatscope/error.hpp"

namespace beatscope {

double nm_to_wavenumber(double nm) {
  if (!(nm > 0.0) || !std::isfinite(nm)) {
    throw Error(ErrorKind::NonPositive, "wavelength must be positive, got " + std::to_string(nm));
  }
  return 1.0e7 / nm;
}

double wavenumber_to_nm(double wavenumber_cm) {
  if (!(wavenumber_cm > 0.0) || !std::isfinite(wavenumber_cm)) {
    throw Error(ErrorKind::NonPositive, "wavenumber must be positive, got " + std::to_string(wavenumber_cm));
  }
  return 1.0e7 / wavenumber_cm;
}

}  // namespace beatscope
