#include "rplap/verifier.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace rplap {

namespace {

constexpr double kPi = 3.14159265358979323846;

double edge_average(const GridFunction& u, const GridEdge& e) {
  const double va = e.a < 0 ? 0.0 : u[e.a];
  const double vb = e.b < 0 ? 0.0 : u[e.b];
  return 0.5 * (va + vb);
}

std::array<double, 2> edge_midpoint(const Mesh& mesh, const GridEdge& e) {
  std::array<double, 2> c =
      e.b >= 0 ? mesh.node_coord(e.b) : mesh.node_coord(e.a);
  c[e.axis] += e.b >= 0 ? -0.5 * mesh.h : 0.5 * mesh.h;
  return c;
}

void check_coupled(const Trajectory& a, const Trajectory& b) {
  if (!(a.mesh == b.mesh)) throw MismatchedCouplingError("meshes differ");
  if (a.start_time != b.start_time || a.dt != b.dt || a.n_steps() != b.n_steps())
    throw MismatchedCouplingError("time grids differ");
  if (a.path.seed != b.path.seed || a.path.dt != b.path.dt)
    throw MismatchedCouplingError("noise paths differ");
  if (a.phi.label != b.phi.label) throw MismatchedCouplingError("noise fields differ");
  if (a.params.p != b.params.p || a.params.eps != b.params.eps)
    throw MismatchedCouplingError("operator parameters differ");
}

}  // namespace

TestFunctionSpec make_test_function(const std::string& spec) {
  auto sin_prod = [](double x, double y) {
    return std::sin(kPi * x) * (y == 0.0 ? 1.0 : std::sin(kPi * y));
  };
  auto sin_prod_dx = [](double x, double y) {
    return kPi * std::cos(kPi * x) * (y == 0.0 ? 1.0 : std::sin(kPi * y));
  };
  auto sin_prod_dy = [](double x, double y) {
    return y == 0.0 ? 0.0 : kPi * std::sin(kPi * x) * std::cos(kPi * y);
  };
  if (spec == "one")
    return {spec, false,
            [](double, double, double) { return 1.0; },
            [](double, double, double) { return 0.0; },
            [](double, double, double) { return 0.0; },
            [](double, double, double) { return 0.0; }};
  if (spec == "space_sin")
    return {spec, true,
            [sin_prod](double, double x, double y) { return sin_prod(x, y); },
            [](double, double, double) { return 0.0; },
            [sin_prod_dx](double, double x, double y) { return sin_prod_dx(x, y); },
            [sin_prod_dy](double, double x, double y) { return sin_prod_dy(x, y); }};
  if (spec == "cos_t_space_sin")
    return {spec, true,
            [sin_prod](double t, double x, double y) {
              return std::cos(kPi * t) * sin_prod(x, y);
            },
            [sin_prod](double t, double x, double y) {
              return -kPi * std::sin(kPi * t) * sin_prod(x, y);
            },
            [sin_prod_dx](double t, double x, double y) {
              return std::cos(kPi * t) * sin_prod_dx(x, y);
            },
            [sin_prod_dy](double t, double x, double y) {
              return std::cos(kPi * t) * sin_prod_dy(x, y);
            }};
  throw std::invalid_argument("make_test_function: unknown spec '" + spec + "'");
}

ResidualReport renorm_residual(const Trajectory& traj, const ScalarFamily& S,
                               const TestFunctionSpec& psi, double t_eval) {
  if (S.d1(0.0) != 0.0 && !psi.vanishes_on_boundary) throw InadmissiblePairError();
  const int m = traj.step_index_of(t_eval);
  const Mesh& mesh = traj.mesh;
  const double vol = std::pow(mesh.h, mesh.dim);
  const double dt = traj.dt;
  const auto edges = make_edges(mesh);

  auto psi_at = [&](double t, int node) {
    const auto c = mesh.node_coord(node);
    return psi.value(t, c[0], mesh.dim == 2 ? c[1] : 0.0);
  };

  double term_endpoints = 0.0;
  {
    const GridFunction& u_end = traj.states[static_cast<size_t>(m)];
    const GridFunction& u_0 = traj.initial();
    const double t_end = traj.time(m), t_0 = traj.time(0);
    for (int i = 0; i < u_end.size(); ++i)
      term_endpoints +=
          S.value(u_end[i]) * psi_at(t_end, i) - S.value(u_0[i]) * psi_at(t_0, i);
    term_endpoints *= vol;
  }

  double term_grad_psi = 0.0, term_spp_grad = 0.0;
  double term_ito = 0.0, term_psi_t = 0.0, term_spp_phi2 = 0.0;
  for (int n = 0; n < m; ++n) {
    const GridFunction& u = traj.states[static_cast<size_t>(n)];
    const double t_n = traj.time(n);
    const double dbeta = traj.increment(n);
    const EdgeField g = discrete_gradient(u);
    for (size_t e = 0; e < edges.size(); ++e) {
      const double ge = g.values[e];
      const double flux = plap_weight(ge, traj.params) * ge;
      const double ubar = edge_average(u, edges[e]);
      const auto mid = edge_midpoint(mesh, edges[e]);
      const double y = mesh.dim == 2 ? mid[1] : 0.0;
      const double psi_mid = psi.value(t_n, mid[0], y);
      const double gpsi = edges[e].axis == 0 ? psi.ddx(t_n, mid[0], y)
                                             : psi.ddy(t_n, mid[0], y);
      term_spp_grad += dt * vol * S.d2(ubar) * flux * ge * psi_mid;
      term_grad_psi += dt * vol * S.d1(ubar) * flux * gpsi;
    }
    for (int i = 0; i < u.size(); ++i) {
      const auto c = mesh.node_coord(i);
      const double y = mesh.dim == 2 ? c[1] : 0.0;
      const double phi_i = traj.phi.eval(t_n, c[0], y);
      const double psi_i = psi.value(t_n, c[0], y);
      term_ito += dbeta * vol * S.d1(u[i]) * phi_i * psi_i;
      term_psi_t += dt * vol * S.value(u[i]) * psi.ddt(t_n, c[0], y);
      term_spp_phi2 += 0.5 * dt * vol * S.d2(u[i]) * phi_i * phi_i * psi_i;
    }
  }

  ResidualReport report;
  report.identity = "renorm[" + S.label + "," + psi.label + "]";
  report.t_eval = t_eval;
  report.dt = dt;
  report.h = mesh.h;
  report.eps = traj.params.eps;
  report.terms = {{"term_S_endpoints", term_endpoints},
                  {"term_grad_psi", term_grad_psi},
                  {"term_Spp_grad", term_spp_grad},
                  {"term_ito", term_ito},
                  {"term_psi_t", term_psi_t},
                  {"term_Spp_phi2", term_spp_phi2}};
  report.lhs = term_endpoints + term_grad_psi + term_spp_grad;
  report.rhs = term_ito + term_psi_t + term_spp_phi2;
  report.residual = std::abs(report.lhs - report.rhs);
  return report;
}

ResidualReport ito_product_residual(const Trajectory& u_traj,
                                    const Trajectory& v_traj,
                                    const ScalarFamily& H, const ScalarFamily& Z,
                                    double t_eval) {
  check_coupled(u_traj, v_traj);
  if (Z.value(0.0) != 0.0 || Z.d1(0.0) != 0.0) throw InadmissibleZError();
  const int m = u_traj.step_index_of(t_eval);
  const Mesh& mesh = u_traj.mesh;
  const double vol = std::pow(mesh.h, mesh.dim);
  const double dt = u_traj.dt;
  const auto edges = make_edges(mesh);

  double lhs = 0.0, term_endpoints = 0.0;
  {
    const GridFunction& ue = u_traj.states[static_cast<size_t>(m)];
    const GridFunction& ve = v_traj.states[static_cast<size_t>(m)];
    for (int i = 0; i < ue.size(); ++i)
      lhs += Z.value(ue[i] - ve[i]) * H.value(ue[i]);
    lhs *= vol;
    const GridFunction& u0 = u_traj.initial();
    const GridFunction& v0 = v_traj.initial();
    for (int i = 0; i < u0.size(); ++i)
      term_endpoints += Z.value(u0[i] - v0[i]) * H.value(u0[i]);
    term_endpoints *= vol;
  }

  double term_dual_diff = 0.0, term_dual_u = 0.0, term_ito = 0.0, term_phi2 = 0.0;
  GridFunction w1(mesh), w2(mesh);
  for (int n = 0; n < m; ++n) {
    const GridFunction& u = u_traj.states[static_cast<size_t>(n)];
    const GridFunction& v = v_traj.states[static_cast<size_t>(n)];
    const double t_n = u_traj.time(n);
    const double dbeta = u_traj.increment(n);
    const EdgeField gu = discrete_gradient(u);
    const EdgeField gv = discrete_gradient(v);
    for (int i = 0; i < u.size(); ++i) {
      w1[i] = H.value(u[i]) * Z.d1(u[i] - v[i]);
      w2[i] = H.d1(u[i]) * Z.value(u[i] - v[i]);
    }
    const EdgeField gw1 = discrete_gradient(w1);
    const EdgeField gw2 = discrete_gradient(w2);
    double dual_diff = 0.0, dual_u = 0.0;
    for (size_t e = 0; e < edges.size(); ++e) {
      const double flux_u = plap_weight(gu.values[e], u_traj.params) * gu.values[e];
      const double flux_v = plap_weight(gv.values[e], v_traj.params) * gv.values[e];
      dual_diff += (flux_u - flux_v) * gw1.values[e];
      dual_u += flux_u * gw2.values[e];
    }
    term_dual_diff -= dt * vol * dual_diff;
    term_dual_u -= dt * vol * dual_u;
    for (int i = 0; i < u.size(); ++i) {
      const auto c = mesh.node_coord(i);
      const double phi_i = u_traj.phi.eval(t_n, c[0], mesh.dim == 2 ? c[1] : 0.0);
      term_ito += dbeta * vol * phi_i * H.d1(u[i]) * Z.value(u[i] - v[i]);
      term_phi2 += 0.5 * dt * vol * phi_i * phi_i * H.d2(u[i]) * Z.value(u[i] - v[i]);
    }
  }

  ResidualReport report;
  report.identity = "ito_product[" + H.label + "," + Z.label + "]";
  report.t_eval = t_eval;
  report.dt = dt;
  report.h = mesh.h;
  report.eps = u_traj.params.eps;
  report.terms = {{"term_endpoints", term_endpoints},
                  {"term_dual_diff", term_dual_diff},
                  {"term_dual_u", term_dual_u},
                  {"term_ito", term_ito},
                  {"term_phi2", term_phi2}};
  report.lhs = lhs;
  report.rhs = term_endpoints + term_dual_diff + term_dual_u + term_ito + term_phi2;
  report.residual = std::abs(report.lhs - report.rhs);
  return report;
}

TruncationEnergy truncation_energy(const std::vector<Trajectory>& ensemble,
                                   double k) {
  if (ensemble.empty())
    throw std::invalid_argument("truncation_energy: empty ensemble");
  if (!(k > 0.0)) throw std::invalid_argument("truncation_energy: k must be > 0");
  const Mesh& mesh = ensemble.front().mesh;
  const double vol = std::pow(mesh.h, mesh.dim);
  std::vector<double> energies, surrogates;
  for (const Trajectory& traj : ensemble) {
    if (!(traj.mesh == mesh) || traj.dt != ensemble.front().dt)
      throw std::invalid_argument("truncation_energy: mixed discretizations");
    const double p = traj.params.p;
    double e_acc = 0.0, chi_phi2 = 0.0;
    GridFunction trunc(mesh);
    for (int n = 0; n < traj.n_steps(); ++n) {
      const GridFunction& u = traj.states[static_cast<size_t>(n)];
      for (int i = 0; i < u.size(); ++i) trunc[i] = t_k(u[i], k);
      const EdgeField g = discrete_gradient(trunc);
      for (double ge : g.values) e_acc += std::pow(std::abs(ge), p);
      const double t_n = traj.time(n);
      for (int i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) < k) {
          const auto c = mesh.node_coord(i);
          const double phi_i = traj.phi.eval(t_n, c[0], mesh.dim == 2 ? c[1] : 0.0);
          chi_phi2 += phi_i * phi_i;
        }
      }
    }
    double tilde_term = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      tilde_term += tilde_t_k(traj.final()[i], k) - tilde_t_k(traj.initial()[i], k);
    energies.push_back(traj.dt * vol * e_acc);
    surrogates.push_back(vol * tilde_term + 0.5 * traj.dt * vol * chi_phi2);
  }
  TruncationEnergy out;
  const auto n = static_cast<double>(energies.size());
  for (size_t i = 0; i < energies.size(); ++i) {
    out.energy += energies[i];
    out.bound_surrogate += surrogates[i];
  }
  out.energy /= n;
  out.bound_surrogate /= n;
  if (energies.size() > 1) {
    double var = 0.0;
    for (double e : energies) var += (e - out.energy) * (e - out.energy);
    out.std_error = std::sqrt(var / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<std::pair<double, double>> dissipation_profile(
    const std::vector<Trajectory>& ensemble, const std::vector<double>& ks) {
  if (ensemble.empty())
    throw std::invalid_argument("dissipation_profile: empty ensemble");
  for (size_t i = 1; i < ks.size(); ++i)
    if (!(ks[i] > ks[i - 1]))
      throw std::invalid_argument("dissipation_profile: ks must be increasing");
  const Mesh& mesh = ensemble.front().mesh;
  const double vol = std::pow(mesh.h, mesh.dim);
  const auto edges = make_edges(mesh);
  std::vector<std::pair<double, double>> profile;
  for (double k : ks) {
    double mean = 0.0;
    for (const Trajectory& traj : ensemble) {
      const double p = traj.params.p;
      double acc = 0.0;
      for (int n = 0; n < traj.n_steps(); ++n) {
        const GridFunction& u = traj.states[static_cast<size_t>(n)];
        const EdgeField g = discrete_gradient(u);
        for (size_t e = 0; e < edges.size(); ++e) {
          const double va = edges[e].a < 0 ? 0.0 : std::abs(u[edges[e].a]);
          const double vb = edges[e].b < 0 ? 0.0 : std::abs(u[edges[e].b]);
          // edge counts only when both endpoint moduli lie in the band
          if (va > k && va < k + 1.0 && vb > k && vb < k + 1.0)
            acc += std::pow(std::abs(g.values[e]), p);
        }
      }
      mean += traj.dt * vol * acc;
    }
    profile.emplace_back(k, mean / static_cast<double>(ensemble.size()));
  }
  return profile;
}

void write_residual_csv(const std::vector<ResidualReport>& reports,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (reports.empty()) return;
  out << "t_eval,dt,h,eps";
  for (const auto& term : reports.front().terms) out << ',' << term.first;
  out << ",residual\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << sep;
  };
  for (const auto& r : reports) {
    put(r.t_eval, ',');
    put(r.dt, ',');
    put(r.h, ',');
    put(r.eps, ',');
    for (const auto& term : r.terms) put(term.second, ',');
    put(r.residual, '\n');
  }
}

}  // namespace rplap
