#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cstrph {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Manipulated inputs of the reactor: volumetric flow and jacket heat flow.
struct InputVector {
    double q = 0.0;     // m^3/s
    double Qdot = 0.0;  // J/s

    Eigen::Vector2d as_vector() const { return {q, Qdot}; }
    static InputVector from_vector(const Eigen::Vector2d& v) { return {v(0), v(1)}; }
    bool operator==(const InputVector&) const = default;
};

/// Raised when a thermodynamic evaluation is asked for outside its domain
/// (non-positive mole numbers or temperature).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cstrph
