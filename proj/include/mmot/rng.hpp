#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mmot {

/// Deterministic random source. mt19937_64 output is fully specified by the
/// standard, and the uniform/normal conversions below avoid the
/// implementation-defined std distributions, so streams are reproducible
/// across platforms for a fixed seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::vector<double> unit_vector(int d) {
        if (d == 1) return {uniform01() < 0.5 ? -1.0 : 1.0};
        for (;;) {
            std::vector<double> v(d);
            double norm2 = 0.0;
            for (auto& x : v) {
                x = normal();
                norm2 += x * x;
            }
            if (norm2 > 1e-24) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (auto& x : v) x *= inv;
                return v;
            }
        }
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mmot
