#pragma once

#include <complex>

#include <Eigen/Dense>

#include "fembem/errors.hpp"

namespace fembem {

using Complex = std::complex<double>;

/// Plane wave amplitude * exp(i k d.x) with |d| = 1.
class IncidentWave {
  public:
    IncidentWave(double k, const Eigen::Vector2d& direction, double amplitude = 1.0)
        : k_(k), amplitude_(amplitude) {
        if (!(k > 0.0)) throw config_error("incident wave: wavenumber must be positive");
        const double n = direction.norm();
        if (!(n > 0.0)) throw config_error("incident wave: direction must be nonzero");
        dir_ = direction / n;
    }

    double wavenumber() const { return k_; }
    const Eigen::Vector2d& direction() const { return dir_; }
    double amplitude() const { return amplitude_; }

    Complex value(const Eigen::Vector2d& p) const {
        return amplitude_ * std::exp(Complex(0.0, k_ * dir_.dot(p)));
    }

    Eigen::Vector2cd gradient(const Eigen::Vector2d& p) const {
        const Complex ikv = Complex(0.0, k_) * value(p);
        return Eigen::Vector2cd(dir_.x() * ikv, dir_.y() * ikv);
    }

  private:
    double k_;
    Eigen::Vector2d dir_;
    double amplitude_;
};

}  // namespace fembem
