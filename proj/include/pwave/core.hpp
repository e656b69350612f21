/**
 * @file core.hpp
 * @brief Shared vocabulary: vectors, physical constants, error categories.
 */
#pragma once

#include <Eigen/Core>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pwave {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace constants {
// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double speed_of_light = 299792458.0;      // m/s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double coulomb_constant = 8.9875517923e9;  // N m^2 / C^2
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double beryllium9_mass = 9.012 * atomic_mass_unit;
}  // namespace constants

/// Hz <-> rad/s at the boundary of the library.
inline constexpr double to_angular(double hz) { return kTwoPi * hz; }
inline constexpr double to_hz(double angular) { return angular / kTwoPi; }

/// Failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  kUsage = 2,
  kConfig = 3,
  kValidation = 4,
  kParse = 5,
  kNumerical = 6,
  kCapability = 7,
  kIo = 8,
};

const char* category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace pwave
