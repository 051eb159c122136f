#include "rplap/noise.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rplap {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -x : x;
}

BrownianPath sample_brownian(std::uint64_t seed, int n_steps, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian: dt must be > 0");
  if (n_steps < 0) throw std::invalid_argument("sample_brownian: n_steps must be >= 0");
  BrownianPath path{dt, seed, {}};
  path.increments.reserve(static_cast<size_t>(n_steps));
  std::mt19937_64 rng(seed);
  const double scale = std::sqrt(dt);
  for (int i = 0; i < n_steps; ++i)
    path.increments.push_back(scale * normal_quantile(uniform01(rng)));
  return path;
}

BrownianPath coarsen(const BrownianPath& fine, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
  if (fine.n_steps() % factor != 0)
    throw std::invalid_argument("coarsen: step count not divisible by factor");
  BrownianPath out{fine.dt * factor, fine.seed, {}};
  out.increments.reserve(static_cast<size_t>(fine.n_steps() / factor));
  for (int i = 0; i < fine.n_steps(); i += factor) {
    double s = 0.0;
    for (int j = 0; j < factor; ++j) s += fine.increments[static_cast<size_t>(i + j)];
    out.increments.push_back(s);
  }
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

NoiseField make_noise_field(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("make_noise_field: empty spec");
  auto num = [&](size_t i) {
    if (i >= parts.size())
      throw std::invalid_argument("make_noise_field: missing parameter in '" + spec + "'");
    size_t pos = 0;
    const double v = std::stod(parts[i], &pos);
    if (pos != parts[i].size())
      throw std::invalid_argument("make_noise_field: bad number in '" + spec + "'");
    return v;
  };
  const std::string& name = parts[0];
  if (name == "zero")
    return {spec, 0.0, true, [](double, double, double) { return 0.0; }};
  if (name == "const") {
    const double c = num(1);
    return {spec, std::abs(c), true, [c](double, double, double) { return c; }};
  }
  if (name == "sinprod") {
    const double a = num(1);
    return {spec, std::abs(a), false, [a](double t, double x, double y) {
              const double sy = y == 0.0 ? 1.0 : std::sin(M_PI * y);
              return a * std::cos(M_PI * t) * std::sin(M_PI * x) * sy;
            }};
  }
  if (name == "space") {
    if (parts.size() < 2)
      throw std::invalid_argument("make_noise_field: missing profile in '" + spec + "'");
    if (parts[1] == "sin")
      return {spec, 1.0, true, [](double, double x, double y) {
                const double sy = y == 0.0 ? 1.0 : std::sin(M_PI * y);
                return std::sin(M_PI * x) * sy;
              }};
    if (parts[1] == "bump")
      return {spec, 1.0, true, [](double, double x, double y) {
                const double by = y == 0.0 ? 1.0 : 16.0 * y * y * (1.0 - y) * (1.0 - y);
                return 16.0 * x * x * (1.0 - x) * (1.0 - x) * by;
              }};
    throw std::invalid_argument("make_noise_field: unknown profile '" + parts[1] + "'");
  }
  throw std::invalid_argument("make_noise_field: unknown field '" + spec + "'");
}

GridFunction sample_field(const NoiseField& phi, double t, const Mesh& mesh) {
  GridFunction out(mesh);
  for (int i = 0; i < out.size(); ++i) {
    const auto c = mesh.node_coord(i);
    out[i] = phi.eval(t, c[0], mesh.dim == 2 ? c[1] : 0.0);
  }
  return out;
}

GridFunction ito_forcing(const NoiseField& phi, double t_n, double dbeta,
                         const Mesh& mesh) {
  GridFunction out = sample_field(phi, t_n, mesh);
  for (double& v : out.values) v *= dbeta;
  return out;
}

}  // namespace rplap
