#include "mcg/beam_info.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcg {

double CsqmiTermination::beam_info(const std::vector<double>& q) const {
  const std::size_t n = q.size();
  // Suffix products of (q^2 + (1-q)^2); suf[i] covers cells i..n-1.
  std::vector<double> suf(n + 1, 1.0);
  for (std::size_t i = n; i-- > 0;) {
    double m = q[i] * q[i] + (1.0 - q[i]) * (1.0 - q[i]);
    suf[i] = m * suf[i + 1];
  }
  const double a = suf[0];

  double pm = 1.0, pm2 = 1.0;  // prefix miss products (linear, squared)
  double b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = q[i] * pm;                      // terminate at cell i
    double s = q[i] * q[i] * pm2 * suf[i + 1]; // squared-config mass of that event
    b += e * e;
    c += e * s;
    pm *= 1.0 - q[i];
    pm2 *= (1.0 - q[i]) * (1.0 - q[i]);
  }
  b += pm * pm;  // pass-through event
  c += pm * pm2;
  return 2.0 * std::log(a) + std::log(b) - 2.0 * std::log(c);
}

double ReachableUnknownCount::beam_info(const std::vector<double>& q) const {
  double count = 0.0;
  for (double v : q) {
    if (v >= 1.0) break;
    if (v == 0.5) count += 1.0;
  }
  return count;
}

std::unique_ptr<BeamInformation> make_beam_information(const std::string& name) {
  if (name == "csqmi") return std::make_unique<CsqmiTermination>();
  if (name == "unknown_count") return std::make_unique<ReachableUnknownCount>();
  throw std::invalid_argument("unknown beam information measure: " + name);
}

}  // namespace mcg
