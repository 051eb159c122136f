#include "rplap/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rplap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

}  // namespace

double t_k(double r, double k) {
  require_positive(k, "t_k: k");
  return std::clamp(r, -k, k);
}

double t_k_d1(double r, double k) {
  require_positive(k, "t_k: k");
  return std::abs(r) < k ? 1.0 : 0.0;
}

double tilde_t_k(double s, double k) {
  require_positive(k, "tilde_t_k: k");
  const double a = std::abs(s);
  return a <= k ? 0.5 * s * s : 0.5 * k * k + k * (a - k);
}

double theta(double r, double k, double kp) {
  return t_k(r, k + kp) - t_k(r, k);
}

double h_l(double r, double l) {
  require_positive(l, "h_l: l");
  const double a = std::abs(r);
  if (a <= l) return 1.0;
  if (a >= l + 1.0) return 0.0;
  return l + 1.0 - a;
}

double ts_sigma_d1(double r, double s, double sigma) {
  require_positive(s, "ts_sigma: s");
  require_positive(sigma, "ts_sigma: sigma");
  const double a = std::abs(r);
  if (a <= s) return 1.0;
  if (a >= s + sigma) return 0.0;
  return (s + sigma - a) / sigma;
}

double ts_sigma_d2(double r, double s, double sigma) {
  require_positive(s, "ts_sigma: s");
  require_positive(sigma, "ts_sigma: sigma");
  const double a = std::abs(r);
  if (a <= s || a >= s + sigma) return 0.0;
  return -sign(r) / sigma;
}

double ts_sigma_value(double r, double s, double sigma) {
  require_positive(s, "ts_sigma: s");
  require_positive(sigma, "ts_sigma: sigma");
  const double a = std::abs(r);
  if (a <= s) return r;
  if (a >= s + sigma) return sign(r) * (s + 0.5 * sigma);
  // s + integral of the ramp over (s, |r|)
  const double w = a - s;
  return sign(r) * (s + w - 0.5 * w * w / sigma);
}

double hk_delta_d2(double r, double k, double delta) {
  require_positive(k, "hk_delta: k");
  require_positive(delta, "hk_delta: delta");
  const double a = std::abs(r);
  if (a < k) return 1.0;
  if (a <= k + 1.0 / delta) return -k * delta;
  return 0.0;
}

double integrate_piecewise(const std::function<double(double)>& f,
                           const std::vector<double>& breakpoints, double r) {
  if (r == 0.0) return 0.0;
  const double lo = std::min(0.0, r), hi = std::max(0.0, r);
  std::vector<double> cuts{lo, hi};
  for (double b : breakpoints)
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  // 2-point Gauss per piece, exact through cubic integrands
  constexpr double kNode = 0.5773502691896257645091488;
  double acc = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double half = 0.5 * (cuts[i + 1] - cuts[i]);
    acc += half * (f(mid - half * kNode) + f(mid + half * kNode));
  }
  return r < 0.0 ? -acc : acc;
}

ScalarFamily tk_family(double k) {
  require_positive(k, "tk_family: k");
  return {"tk:" + std::to_string(k),
          FamilyClass::kinked,
          k,
          {-k, k},
          [k](double r) { return t_k(r, k); },
          [k](double r) { return t_k_d1(r, k); },
          [](double) { return 0.0; }};
}

ScalarFamily tilde_tk_family(double k) {
  require_positive(k, "tilde_tk_family: k");
  return {"tilde_tk:" + std::to_string(k),
          FamilyClass::w2inf,
          kInf,
          {-k, k},
          [k](double r) { return tilde_t_k(r, k); },
          [k](double r) { return t_k(r, k); },
          [k](double r) { return t_k_d1(r, k); }};
}

ScalarFamily theta_family(double k, double kp) {
  require_positive(k, "theta_family: k");
  require_positive(kp, "theta_family: kp");
  return {"theta:" + std::to_string(k) + ":" + std::to_string(kp),
          FamilyClass::kinked,
          k + kp,
          {-(k + kp), -k, k, k + kp},
          [k, kp](double r) { return theta(r, k, kp); },
          [k, kp](double r) {
            const double a = std::abs(r);
            return a > k && a < k + kp ? 1.0 : 0.0;
          },
          [](double) { return 0.0; }};
}

ScalarFamily hl_family(double l) {
  require_positive(l, "hl_family: l");
  return {"hl:" + std::to_string(l),
          FamilyClass::w2inf,
          l + 1.0,
          {-(l + 1.0), -l, l, l + 1.0},
          [l](double r) {
            const double a = std::abs(r);
            if (a <= l) return r;
            if (a >= l + 1.0) return sign(r) * (l + 0.5);
            const double w = a - l;
            return sign(r) * (l + w - 0.5 * w * w);
          },
          [l](double r) { return h_l(r, l); },
          [l](double r) {
            const double a = std::abs(r);
            return a > l && a < l + 1.0 ? -sign(r) : 0.0;
          }};
}

ScalarFamily tssigma_family(double s, double sigma) {
  require_positive(s, "tssigma_family: s");
  require_positive(sigma, "tssigma_family: sigma");
  return {"tssigma:" + std::to_string(s) + ":" + std::to_string(sigma),
          FamilyClass::w2inf,
          s + sigma,
          {-(s + sigma), -s, s, s + sigma},
          [s, sigma](double r) { return ts_sigma_value(r, s, sigma); },
          [s, sigma](double r) { return ts_sigma_d1(r, s, sigma); },
          [s, sigma](double r) { return ts_sigma_d2(r, s, sigma); }};
}

ScalarFamily compact_s_family(double k, double l) {
  require_positive(k, "compact_s_family: k");
  require_positive(l, "compact_s_family: l");
  std::vector<double> breaks;
  for (double b : {k, k + 1.0, l, l + 1.0}) {
    breaks.push_back(-b);
    breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  auto d1 = [k, l](double r) { return h_l(r, l) * theta(r, k, 1.0); };
  auto d2 = [k, l](double r) {
    const double a = std::abs(r);
    const double hl_d = (a > l && a < l + 1.0) ? -sign(r) : 0.0;
    const double th_d = (a > k && a < k + 1.0) ? 1.0 : 0.0;
    return hl_d * theta(r, k, 1.0) + h_l(r, l) * th_d;
  };
  auto breaks_copy = breaks;
  auto value = [d1, breaks_copy](double r) {
    return integrate_piecewise(d1, breaks_copy, r);
  };
  return {"compact_s:" + std::to_string(k) + ":" + std::to_string(l),
          FamilyClass::compact_prime,
          l + 1.0,
          breaks,
          value,
          d1,
          d2};
}

ScalarFamily hk_delta_family(double k, double delta) {
  require_positive(k, "hk_delta_family: k");
  require_positive(delta, "hk_delta_family: delta");
  const double outer = k + 1.0 / delta;
  std::vector<double> breaks{-outer, -k, k, outer};
  auto d2 = [k, delta](double r) { return hk_delta_d2(r, k, delta); };
  auto d1 = [k, delta, outer](double r) {
    const double a = std::abs(r);
    if (a < k) return r;
    if (a > outer) return 0.0;
    return sign(r) * (k - k * delta * (a - k));
  };
  auto value = [d1, breaks](double r) { return integrate_piecewise(d1, breaks, r); };
  return {"hk_delta:" + std::to_string(k) + ":" + std::to_string(delta),
          FamilyClass::w2inf,
          outer,
          breaks,
          value,
          d1,
          d2};
}

ScalarFamily make_family(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("make_family: empty spec");
  auto num = [&](size_t i) {
    if (i >= parts.size())
      throw std::invalid_argument("make_family: missing parameter in '" + spec + "'");
    size_t pos = 0;
    const double v = std::stod(parts[i], &pos);
    if (pos != parts[i].size())
      throw std::invalid_argument("make_family: bad number in '" + spec + "'");
    return v;
  };
  const std::string& name = parts[0];
  if (name == "tk") return tk_family(num(1));
  if (name == "tilde_tk") return tilde_tk_family(num(1));
  if (name == "theta") return theta_family(num(1), num(2));
  if (name == "hl") return hl_family(num(1));
  if (name == "tssigma") return tssigma_family(num(1), num(2));
  if (name == "compact_s") return compact_s_family(num(1), num(2));
  if (name == "hk_delta") return hk_delta_family(num(1), num(2));
  throw std::invalid_argument("make_family: unknown family '" + spec + "'");
}

}  // namespace rplap
