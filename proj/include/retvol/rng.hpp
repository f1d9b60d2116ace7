#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace retvol {

// Seeded generator with hand-rolled transforms. std::normal_distribution and
// std::uniform_int_distribution are implementation-defined sequences, so we
// avoid them: output files must be reproducible for a given seed.
// Identification string for run metadata: "mt19937_64/box-muller".
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  // uniform in [0,1), 53-bit mantissa
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller, caching the second deviate
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - u01();  // (0,1], keeps log finite
    double u2 = u01();
    double rad = std::sqrt(-2.0 * std::log(u1));
    double ang = 6.283185307179586476925286766559 * u2;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  // uniform integer in [0,n), rejection-sampled so every n is unbiased
  std::uint64_t index(std::uint64_t n) {
    std::uint64_t threshold = (-n) % n;  // 2^64 mod n
    std::uint64_t r = eng_();
    while (r < threshold) r = eng_();
    return r % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace retvol
