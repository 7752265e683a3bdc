#include "rkl/lsh.hpp"

#include <cmath>
#include <string>

#include "rkl/errors.hpp"

namespace rkl {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("hash inputs differ in dimension");
  double s = 0.0;
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double d = x[c] - y[c];
    s += d * d;
  }
  return s;
}

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double b, double fb, double m, double fm,
                        double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

BinaryHashFamily draw_binary_family(const ParticleEnsemble& ensemble, int bits, int dimension,
                                    RandomSource& rng) {
  if (bits < 1 || dimension < 1) throw ConfigError("binary hash family needs bits >= 1, dimension >= 1");
  BinaryHashFamily family;
  family.frequencies.resize(bits, dimension);
  family.phases.resize(bits);
  family.thresholds.resize(bits);
  RandomSource base = rng.child();
  const int N = ensemble.size();
  for (int i = 0; i < bits; ++i) {
    RandomSource sub = base.substream(static_cast<std::uint64_t>(i));
    const double xi = ensemble.particle(static_cast<int>(sub.integer(static_cast<std::uint64_t>(N))));
    const double sigma = std::sqrt(2.0 * xi);
    for (int c = 0; c < dimension; ++c) family.frequencies(i, c) = sigma * sub.normal();
    family.phases(i) = sub.uniform(-kPi, kPi);
    family.thresholds(i) = sub.uniform(-1.0, 1.0);
  }
  return family;
}

HashCode binary_hash(const BinaryHashFamily& family, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != family.dimension()) {
    throw ConfigError("binary_hash: input dimension does not match family");
  }
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd arg = family.frequencies * xv + family.phases;
  HashCode code;
  code.alphabet = 2;
  code.symbols.resize(static_cast<std::size_t>(family.bits()));
  for (int i = 0; i < family.bits(); ++i) {
    // sign(0) fixed to +1 so equality at the threshold is deterministic.
    code.symbols[static_cast<std::size_t>(i)] =
        (family.thresholds(i) + std::cos(arg(i)) >= 0.0) ? 1 : 0;
  }
  return code;
}

double collision_curve_hK(const KernelUnderMeasure& kernel, const std::vector<double>& x,
                          const std::vector<double>& y, int terms) {
  if (terms < 1) throw ConfigError("collision curve needs terms >= 1");
  const double d2 = squared_distance(x, y);
  // Partial sum of sum_{m>=1} (1 - K(m^2 d^2))/(4m^2 - 1) plus the settled
  // tail: beyond the cutoff the kernel factor is effectively constant, and
  // sum_{m>T} 1/(4m^2-1) telescopes to 1/(2(2T+1)). This keeps x == y at
  // exactly 0 and reaches the K -> 0 limit 4/pi^2 exactly.
  double s = 0.0;
  for (int m = 1; m <= terms; ++m) {
    const double md2 = static_cast<double>(m) * m * d2;
    s += (1.0 - kernel.valueAtSquaredDistance(md2)) / (4.0 * m * m - 1.0);
  }
  const double settled = 1.0 - kernel.valueAtSquaredDistance(
                                   static_cast<double>(terms + 1) * (terms + 1) * d2);
  s += settled / (2.0 * (2.0 * terms + 1.0));
  return 8.0 / (kPi * kPi) * s;
}

double hK_tail_bound(int terms) { return 8.0 / (kPi * kPi * (2.0 * terms - 1.0)); }

QaryHashFamily draw_qary_family(const FeatureBank& bank, int alphabet, int codeLength,
                                RandomSource& rng) {
  if (alphabet < 2) throw ConfigError("q-ary hash family needs alphabet >= 2");
  if (codeLength < 1) throw ConfigError("q-ary hash family needs codeLength >= 1");
  QaryHashFamily family;
  family.alphabet = alphabet;
  family.featureBank = bank;
  family.weights.resize(codeLength, bank.count());
  family.offsets.resize(codeLength);
  RandomSource base = rng.child();
  for (int i = 0; i < codeLength; ++i) {
    RandomSource sub = base.substream(static_cast<std::uint64_t>(i));
    for (int k = 0; k < bank.count(); ++k) family.weights(i, k) = sub.normal();
    family.offsets(i) = static_cast<double>(alphabet) * sub.uniform();
  }
  return family;
}

HashCode qary_hash(const QaryHashFamily& family, const std::vector<double>& x) {
  const std::vector<double> phi = feature_map(family.featureBank, x);
  const Eigen::Map<const Eigen::VectorXd> phiv(phi.data(), static_cast<Eigen::Index>(phi.size()));
  const Eigen::VectorXd proj = family.weights * phiv + family.offsets;
  const int q = family.alphabet;
  HashCode code;
  code.alphabet = q;
  code.symbols.resize(static_cast<std::size_t>(family.codeLength()));
  for (int i = 0; i < family.codeLength(); ++i) {
    const auto bucket = static_cast<long long>(std::ceil(proj(i) / q));
    int sym = static_cast<int>(bucket % q);
    if (sym < 0) sym += q;
    code.symbols[static_cast<std::size_t>(i)] = sym;
  }
  return code;
}

double psi_q(double u, int q, double quadratureTolerance) {
  if (q < 2) throw ConfigError("psi_q needs q >= 2");
  if (!(quadratureTolerance > 0.0)) throw ConfigError("psi_q needs a positive tolerance");
  if (u < 0.0) throw ConfigError("psi_q defined for kernel values u >= 0");
  if (u >= 1.0) return 1.0;  // zero feature distance: collision certain
  const double a = 1.0 - u;
  const double norm = 1.0 / std::sqrt(kPi * a);
  const auto f = [&](double s) { return norm * std::exp(-s * s / (4.0 * a)) * (1.0 - s / q); };
  const double lo = 0.0;
  const double hi = static_cast<double>(q);
  const double mid = 0.5 * (lo + hi);
  const double flo = f(lo);
  const double fmi = f(mid);
  const double fhi = f(hi);
  const double whole = simpson(flo, fmi, fhi, hi - lo);
  return adaptive_simpson(f, lo, flo, hi, fhi, mid, fmi, whole, quadratureTolerance, 40);
}

int hamming_distance(const HashCode& a, const HashCode& b) {
  if (a.length() != b.length()) throw ConfigError("hamming_distance: code lengths differ");
  int d = 0;
  for (std::size_t i = 0; i < a.symbols.size(); ++i) d += a.symbols[i] != b.symbols[i] ? 1 : 0;
  return d;
}

int lee_distance(const HashCode& a, const HashCode& b, int q) {
  if (a.length() != b.length()) throw ConfigError("lee_distance: code lengths differ");
  if (q < 2) throw ConfigError("lee_distance: alphabet must be >= 2");
  int d = 0;
  for (std::size_t i = 0; i < a.symbols.size(); ++i) {
    const int x = a.symbols[i];
    const int y = b.symbols[i];
    if (x < 0 || x >= q || y < 0 || y >= q) throw ConfigError("lee_distance: symbol outside alphabet");
    const int forward = ((x - y) % q + q) % q;
    const int backward = ((y - x) % q + q) % q;
    d += std::min(forward, backward);
  }
  return d;
}

}  // namespace rkl
