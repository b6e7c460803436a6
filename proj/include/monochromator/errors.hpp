#pragma once

#include <stdexcept>
#include <string>

namespace monochromator {

// Root of everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (v <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or incomplete configuration (missing reflection probability,
// span longer than the device, malformed config file, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The grating equation has no real solution: the order does not propagate.
// Callers enumerating paths treat this as "discard", not as a failure.
class EvanescentOrder : public Error {
 public:
  EvanescentOrder(int order, double sine)
      : Error("diffraction order " + std::to_string(order) +
              " is evanescent (sin = " + std::to_string(sine) + ")"),
        order_(order),
        sine_(sine) {}

  int order() const noexcept { return order_; }
  double sine() const noexcept { return sine_; }

 private:
  int order_;
  double sine_;
};

// dtheta/dv diverges at a grazing exit (|sin| -> 1).
class GrazingSingularity : public Error {
 public:
  using Error::Error;
};

// The requested velocity cannot be brought to the fixed exit angle at this
// total order (incidence angle would be negative or undefined).
class BelowCutoff : public Error {
 public:
  BelowCutoff(double velocity, int order)
      : Error("velocity " + std::to_string(velocity) +
              " m/s is below the cutoff of total order " +
              std::to_string(order)),
        velocity_(velocity),
        order_(order) {}

  double velocity() const noexcept { return velocity_; }
  int order() const noexcept { return order_; }

 private:
  double velocity_;
  int order_;
};

// No ray made it through every aperture.
class EmptyTransmission : public Error {
 public:
  using Error::Error;
};

}  // namespace monochromator
