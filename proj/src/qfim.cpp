#include "qestkit/qfim.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <utility>

#include "qestkit/numkit.hpp"

namespace qestkit {

namespace {

void check_drho_shapes(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos) {
  if (drhos.empty()) fail(errc::dimension_mismatch, "no parameter derivatives supplied");
  for (const auto& dr : drhos)
    if (dr.rows() != rho.dim() || dr.cols() != rho.dim())
      fail(errc::dimension_mismatch, "derivative shape does not match the state");
}

RealMatrix eigen_fim_core(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos,
                          double tol) {
  const std::size_t d = rho.dim(), n = drhos.size();
  const auto eig = hermitian_eigen(rho.mat());
  const double cutoff = tol * rho.mat().trace().real();
  std::vector<ComplexMatrix> in_basis;
  in_basis.reserve(n);
  for (const auto& dr : drhos)
    in_basis.push_back(mat_mul(mat_mul(eig.eigenvectors.dagger(), dr), eig.eigenvectors));

  RealMatrix f(n, n);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = mu; nu < n; ++nu) {
      double s = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
          if (denom <= cutoff) continue;
          s += 2.0 * (in_basis[mu](i, j) * in_basis[nu](j, i)).real() / denom;
        }
      f(mu, nu) = s;
      f(nu, mu) = s;
    }
  return f;
}

// crb, uhlmann, quantumness from an already-filled fim + slds. The
// quantumness block is skipped when the inverse fell back to the
// pseudo-inverse: R needs F^{-1/2} on the full space.
void finish_report(QfimReport& rep, const DensityMatrix& rho) {
  rep.crb = sym_inverse(rep.fim, &rep.crb_pseudo_inverse);
  rep.uhlmann = uhlmann_matrix(rho, rep.slds);
  if (rep.fim.rows() >= 2 && !rep.crb_pseudo_inverse) {
    const auto q = quantumness(rep.fim, rep.uhlmann);
    rep.quantumness = q.value;
    rep.quantumness_clamped = q.clamped;
  }
}

}  // namespace

QfimReport qfim_eigen(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos,
                      double tol) {
  check_drho_shapes(rho, drhos);
  QfimReport rep;
  rep.method = "eigen";
  rep.trunc_tol = tol;
  rep.fim = eigen_fim_core(rho, drhos, tol);
  for (std::size_t mu = 0; mu < drhos.size(); ++mu)
    rep.slds.push_back(sld_eigenbasis(rho, drhos[mu], tol, mu));
  finish_report(rep, rho);
  return rep;
}

QfimReport qfim_eigen(const ParamFamily& fam, const std::vector<double>& theta, double tol) {
  return qfim_eigen(fam.evaluate(theta), fam.derivatives(theta), tol);
}

RealMatrix qfim_bloch_qubit(const std::vector<double>& r,
                            const std::vector<std::vector<double>>& dr) {
  if (r.size() != 3) fail(errc::dimension_mismatch, "qubit Bloch vector has 3 components");
  double r2 = 0;
  for (double c : r) r2 += c * c;
  if (r2 > 1.0 + 1e-10) fail(errc::bloch_norm_exceeded, "Bloch vector lies outside the ball");
  const std::size_t n = dr.size();
  RealMatrix f(n, n);
  const bool pure = r2 >= 1.0 - 1e-10;
  for (std::size_t mu = 0; mu < n; ++mu) {
    if (dr[mu].size() != 3) fail(errc::dimension_mismatch, "Bloch derivative has 3 components");
    for (std::size_t nu = mu; nu < n; ++nu) {
      double dot = 0, rmu = 0, rnu = 0;
      for (std::size_t i = 0; i < 3; ++i) {
        dot += dr[mu][i] * dr[nu][i];
        rmu += r[i] * dr[mu][i];
        rnu += r[i] * dr[nu][i];
      }
      const double v = pure ? dot : dot + rmu * rnu / (1.0 - r2);
      f(mu, nu) = v;
      f(nu, mu) = v;
    }
  }
  return f;
}

RealMatrix qfim_bloch_general(const std::vector<double>& r,
                              const std::vector<std::vector<double>>& dr, std::size_t d) {
  const std::size_t ng = d * d - 1;
  if (r.size() != ng) fail(errc::dimension_mismatch, "Bloch vector length must be d^2-1");
  const auto gens = su_generators(d);

  // A = d/(2(d-1)) G - r r^T with G_ij = (2/d) delta_ij + c sum_m v_ijm r_m.
  const double c = std::sqrt((d - 1.0) / (2.0 * d));
  RealMatrix a(ng, ng);
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = i; j < ng; ++j) {
      const auto anti = anticommutator(gens[i], gens[j]);
      double g = (i == j) ? 2.0 / d : 0.0;
      for (std::size_t m = 0; m < ng; ++m)
        g += c * 0.5 * mat_mul(anti, gens[m]).trace().real() * r[m];
      const double v = d / (2.0 * (d - 1.0)) * g - r[i] * r[j];
      a(i, j) = v;
      a(j, i) = v;
    }

  const std::size_t n = dr.size();
  RealMatrix f(n, n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    if (dr[mu].size() != ng) fail(errc::dimension_mismatch, "Bloch derivative length must be d^2-1");
    for (std::size_t nu = mu; nu < n; ++nu) {
      double v = 0;
      for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ng; ++j) v += dr[nu][i] * a(i, j) * dr[mu][j];
      f(mu, nu) = v;
      f(nu, mu) = v;
    }
  }
  return f;
}

namespace {

enum class MSide { conj_left, conj_right };

ComplexMatrix liouville_m(const ComplexMatrix& rho, MSide side) {
  const auto id = ComplexMatrix::identity(rho.rows());
  if (side == MSide::conj_left) return kron(rho.conjugate(), id) + kron(id, rho);
  return kron(rho, id) + kron(id, rho.conjugate());
}

double vec_qfi_once(const ComplexMatrix& rho, const ComplexMatrix& drho, MSide side) {
  const auto m = liouville_m(rho, side);
  const auto b = vec(drho);
  const auto x = solve_hpd(m, b);
  cplx acc = 0;
  for (std::size_t k = 0; k < b.size(); ++k) acc += std::conj(b[k]) * x[k];
  return 2.0 * acc.real();
}

// Which factor of the superoperator carries the conjugate depends on the
// vec convention; settle it once against the spectral route on a fixed
// full-rank qubit family rather than trusting either notation.
MSide liouville_side() {
  static MSide side = MSide::conj_left;
  static std::once_flag flag;
  std::call_once(flag, [] {
    const ComplexMatrix rho{{0.6, cplx(0.1, 0.2)}, {cplx(0.1, -0.2), 0.4}};
    const ComplexMatrix h{{0.3, cplx(0.5, -0.1)}, {cplx(0.5, 0.1), -0.2}};
    const ComplexMatrix drho = commutator(h, rho) * cplx(0, -1);
    const DensityMatrix dm(rho);
    const double f_eigen = eigen_fim_core(dm, {drho}, 1e-12)(0, 0);
    const double tol = 1e-8 * std::max(1.0, std::abs(f_eigen));
    if (std::abs(vec_qfi_once(rho, drho, MSide::conj_left) - f_eigen) <= tol)
      side = MSide::conj_left;
    else if (std::abs(vec_qfi_once(rho, drho, MSide::conj_right) - f_eigen) <= tol)
      side = MSide::conj_right;
    else
      fail(errc::convergence_failure, "Liouville conjugation self-test matched neither side");
  });
  return side;
}

}  // namespace

QfimReport qfim_vectorized(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos) {
  check_drho_shapes(rho, drhos);
  const std::size_t d = rho.dim(), n = drhos.size();
  const auto eig = hermitian_eigen(rho.mat());
  const double tr = rho.mat().trace().real();
  if (eig.eigenvalues.front() <= 1e-10 * tr)
    fail(errc::rank_deficient, "vectorized route needs a full-rank state");

  const auto m = liouville_m(rho.mat(), liouville_side());
  std::vector<std::vector<cplx>> vecs(n), sols(n);
  QfimReport rep;
  rep.method = "vectorized";
  rep.trunc_tol = 0.0;
  for (std::size_t mu = 0; mu < n; ++mu) {
    vecs[mu] = vec(drhos[mu]);
    sols[mu] = solve_hpd(m, vecs[mu]);
    auto l = unvec(sols[mu], d);
    l *= 2.0;
    l += l.dagger();
    l *= 0.5;  // rounding can leave a skew part; the SLD is Hermitian
    Sld sld;
    sld.op = std::move(l);
    sld.param_index = mu;
    sld.truncation_tol = 0.0;
    sld.support_rank = d;
    rep.slds.push_back(std::move(sld));
  }
  rep.fim = RealMatrix(n, n);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = mu; nu < n; ++nu) {
      cplx acc = 0;
      for (std::size_t k = 0; k < vecs[mu].size(); ++k)
        acc += std::conj(vecs[mu][k]) * sols[nu][k];
      const double v = 2.0 * acc.real();
      rep.fim(mu, nu) = v;
      rep.fim(nu, mu) = v;
    }
  finish_report(rep, rho);
  return rep;
}

QfimReport qfim_vectorized_regularized(const DensityMatrix& rho,
                                       const std::vector<ComplexMatrix>& drhos,
                                       std::array<double, 3> s_schedule) {
  check_drho_shapes(rho, drhos);
  const std::size_t d = rho.dim(), n = drhos.size();
  for (double s : s_schedule)
    if (!(s > 0) || !(s < 1)) fail(errc::domain_violation, "mixing weights must lie in (0,1)");

  std::array<QfimReport, 3> at;
  for (std::size_t k = 0; k < 3; ++k) {
    const double s = s_schedule[k];
    ComplexMatrix mixed = rho.mat();
    mixed *= (1.0 - s);
    ComplexMatrix id = ComplexMatrix::identity(d);
    id *= s / static_cast<double>(d);
    mixed += id;
    std::vector<ComplexMatrix> dscaled;
    dscaled.reserve(n);
    for (const auto& dr : drhos) {
      auto ds = dr;
      ds *= (1.0 - s);
      dscaled.push_back(std::move(ds));
    }
    at[k] = qfim_vectorized(DensityMatrix(std::move(mixed)), dscaled);
  }

  // Linear Richardson step on the fine pair; the coarse pair monitors decay.
  QfimReport rep;
  rep.method = "vectorized-regularized";
  rep.trunc_tol = 0.0;
  rep.fim = RealMatrix(n, n);
  double r1 = 0, r2 = 0, scale = 0;
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = 0; nu < n; ++nu) {
      rep.fim(mu, nu) = 2.0 * at[2].fim(mu, nu) - at[1].fim(mu, nu);
      r1 = std::max(r1, std::abs(at[1].fim(mu, nu) - at[0].fim(mu, nu)));
      r2 = std::max(r2, std::abs(at[2].fim(mu, nu) - at[1].fim(mu, nu)));
      scale = std::max(scale, std::abs(rep.fim(mu, nu)));
    }
  // allow exact ties at rounding level so full-rank inputs pass through
  if (r2 > r1 && r2 > 1e-12 * std::max(1.0, scale))
    fail(errc::extrapolation_unstable, "residuals do not shrink along the mixing schedule");

  for (std::size_t mu = 0; mu < n; ++mu) {
    Sld sld;
    sld.op = at[2].slds[mu].op;
    sld.op *= 2.0;
    sld.op -= at[1].slds[mu].op;
    sld.param_index = mu;
    sld.truncation_tol = 0.0;
    sld.support_rank = d;
    rep.slds.push_back(std::move(sld));
  }
  finish_report(rep, rho);
  return rep;
}

namespace {

bool is_x_pattern(const ComplexMatrix& m, double tol) {
  static constexpr std::pair<std::size_t, std::size_t> off[] = {
      {0, 1}, {0, 2}, {1, 0}, {2, 0}, {1, 3}, {3, 1}, {2, 3}, {3, 2}};
  for (const auto& [i, j] : off)
    if (std::abs(m(i, j)) > tol) return false;
  return true;
}

}  // namespace

QfimReport qfim_xstate(const ParamFamily& fam, const std::vector<double>& theta, double tol) {
  const auto rho = fam.evaluate(theta);
  if (rho.dim() != 4) fail(errc::not_x_state, "X-pattern route is for two-qubit states");
  const double scale = std::max(1.0, rho.mat().norm_inf());
  if (!is_x_pattern(rho.mat(), 1e-12 * scale))
    fail(errc::not_x_state, "state entries leave the X pattern");

  // The pattern must persist under the parameter shifts used for derivatives.
  const std::size_t n = fam.n_params();
  for (std::size_t mu = 0; mu < n; ++mu) {
    const double h = fam.fd_step() * std::max(1.0, std::abs(theta[mu]));
    for (double sgn : {1.0, -1.0}) {
      auto shifted = theta;
      shifted[mu] += sgn * h;
      if (fam.domain() && !fam.domain()->contains(shifted)) continue;
      const auto rs = fam.evaluate(shifted);
      if (!is_x_pattern(rs.mat(), 1e-12 * std::max(1.0, rs.mat().norm_inf())))
        fail(errc::not_x_state, "state entries leave the X pattern near theta");
    }
  }

  const auto drhos = fam.derivatives(theta);
  const double tr = rho.mat().trace().real();
  const double cutoff = tol * tr;

  QfimReport rep;
  rep.method = "xstate";
  rep.trunc_tol = tol;
  rep.fim = RealMatrix(n, n);

  static constexpr std::size_t blocks[2][2] = {{0, 3}, {1, 2}};
  for (const auto& idx : blocks) {
    ComplexMatrix b2(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) b2(i, j) = rho.mat()(idx[i], idx[j]);
    const double trb = b2.trace().real();
    if (trb <= cutoff) continue;  // block carries no weight

    std::vector<ComplexMatrix> db(n, ComplexMatrix(2, 2));
    for (std::size_t mu = 0; mu < n; ++mu)
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) db[mu](i, j) = drhos[mu](idx[i], idx[j]);

    const auto eig = hermitian_eigen(b2);
    const double lm = eig.eigenvalues[0], lp = eig.eigenvalues[1];

    if (lp - lm < 1e-8 * tr) {
      // Degenerate block: the eigenvector-rotation terms are singular, so use
      // the plain truncated spectral sum on the block instead.
      std::vector<ComplexMatrix> dt(n);
      for (std::size_t mu = 0; mu < n; ++mu)
        dt[mu] = mat_mul(mat_mul(eig.eigenvectors.dagger(), db[mu]), eig.eigenvectors);
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = mu; nu < n; ++nu) {
          double s = 0;
          for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
              const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
              if (denom <= cutoff) continue;
              s += 2.0 * (dt[mu](i, j) * dt[nu](j, i)).real() / denom;
            }
          rep.fim(mu, nu) += s;
          rep.fim(nu, mu) = rep.fim(mu, nu);
        }
      continue;
    }

    std::vector<cplx> vm(2), vp(2);
    for (std::size_t i = 0; i < 2; ++i) {
      vm[i] = eig.eigenvectors(i, 0);
      vp[i] = eig.eigenvectors(i, 1);
    }
    auto sandwich = [](const std::vector<cplx>& u, const ComplexMatrix& m,
                       const std::vector<cplx>& v) {
      cplx acc = 0;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) acc += std::conj(u[i]) * m(i, j) * v[j];
      return acc;
    };

    std::vector<double> dlp(n), dlm(n);
    std::vector<cplx> coefp(n), coefm(n);
    for (std::size_t mu = 0; mu < n; ++mu) {
      dlp[mu] = sandwich(vp, db[mu], vp).real();
      dlm[mu] = sandwich(vm, db[mu], vm).real();
      coefp[mu] = sandwich(vm, db[mu], vp) / (lp - lm);  // minus-component of d|plus>
      coefm[mu] = sandwich(vp, db[mu], vm) / (lm - lp);
    }

    for (std::size_t mu = 0; mu < n; ++mu)
      for (std::size_t nu = mu; nu < n; ++nu) {
        double t1 = 0;
        if (lp > cutoff) t1 += dlp[mu] * dlp[nu] / lp;
        if (lm > cutoff) t1 += dlm[mu] * dlm[nu] / lm;
        // pure-state information of each rotating eigenvector (gauge-zero)
        const double t2 = lp * 4.0 * (std::conj(coefp[mu]) * coefp[nu]).real() +
                          lm * 4.0 * (std::conj(coefm[mu]) * coefm[nu]).real();
        // mixing correction between the two eigenvectors of the block
        const double t3 =
            -16.0 * (lp * lm) / trb * (std::conj(coefp[mu]) * coefp[nu]).real();
        rep.fim(mu, nu) += t1 + t2 + t3;
        rep.fim(nu, mu) = rep.fim(mu, nu);
      }
  }

  for (std::size_t mu = 0; mu < n; ++mu)
    rep.slds.push_back(sld_eigenbasis(rho, drhos[mu], tol, mu));
  finish_report(rep, rho);
  return rep;
}

RealMatrix uhlmann_matrix(const DensityMatrix& rho, const std::vector<Sld>& slds) {
  const std::size_t n = slds.size();
  RealMatrix u(n, n);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = mu + 1; nu < n; ++nu) {
      const auto comm = commutator(slds[mu].op, slds[nu].op);
      // -(i/4) Tr(rho [L_mu, L_nu]) is real because the trace is imaginary
      const double v = 0.25 * mat_mul(rho.mat(), comm).trace().imag();
      u(mu, nu) = v;
      u(nu, mu) = -v;
    }
  return u;
}

QuantumnessResult quantumness(const RealMatrix& fim, const RealMatrix& uhlmann) {
  const std::size_t n = fim.rows();
  if (fim.cols() != n || uhlmann.rows() != n || uhlmann.cols() != n)
    fail(errc::dimension_mismatch, "information and curvature matrices must match");

  const auto eig = real_sym_eigen(fim);
  const double wmax = eig.eigenvalues.back();
  if (!(wmax > 0)) fail(errc::singular_fim, "information matrix has no positive direction");
  const double cut = 1e-12 * wmax;

  QuantumnessResult out;
  RealMatrix fis(n, n);  // F^{-1/2} restricted to the support
  for (std::size_t k = 0; k < n; ++k) {
    const double w = eig.eigenvalues[k];
    if (w <= cut) {
      // A flat direction is only tolerable if the curvature ignores it too.
      double coupling = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double y = 0;
        for (std::size_t j = 0; j < n; ++j) y += uhlmann(i, j) * eig.eigenvectors(j, k);
        coupling = std::max(coupling, std::abs(y));
      }
      if (coupling > 1e-10 * std::max(1.0, uhlmann.norm_inf()))
        fail(errc::singular_fim, "information matrix singular along a curved direction");
      out.pseudo_inverse = true;
      continue;
    }
    const double inv = 1.0 / std::sqrt(w);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        fis(i, j) += inv * eig.eigenvectors(i, k) * eig.eigenvectors(j, k);
  }

  const auto a = real_mul(real_mul(fis, uhlmann), fis);
  ComplexMatrix h(n, n);  // 2i A is Hermitian for antisymmetric real A
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = cplx(0.0, 2.0 * a(i, j));
  const auto hev = hermitian_eigen(h);
  double r = 0;
  for (double w : hev.eigenvalues) r = std::max(r, std::abs(w));

  if (r > 1.0 + 1e-6)
    fail(errc::range_violation, "quantumness " + std::to_string(r) + " exceeds 1");
  if (r > 1.0) {
    out.clamped = true;
    r = 1.0;
  }
  out.value = r;
  return out;
}

std::vector<double> crb_matrix(const QfimReport& report, long n_trials) {
  if (n_trials < 1) fail(errc::domain_violation, "n_trials must be >= 1");
  const std::size_t n = report.crb.rows();
  std::vector<double> out(n);
  for (std::size_t mu = 0; mu < n; ++mu)
    out[mu] = report.crb(mu, mu) / static_cast<double>(n_trials);
  return out;
}

RealMatrix HeisenbergOracle::fim() const {
  RealMatrix f(2, 2);
  f(0, 0) = f_bb;
  f(0, 1) = f(1, 0) = f_bt;
  f(1, 1) = f_tt;
  return f;
}

ComplexMatrix HeisenbergOracle::gamma_block() const {
  auto block4 = [](double d0, double d1, double d2, double d3, double off) {
    ComplexMatrix m(4, 4);
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    m(3, 3) = d3;
    m(1, 2) = m(2, 1) = off;
    return m;
  };
  const auto g11 = block4(alpha, xi, xi, lam, delta);
  const auto g22 = block4(xi, kappa, kappa, vartheta, eta);
  const auto g23 = block4(mu, eta, eta, tau, varpi);
  const auto g44 = block4(lam, vartheta, vartheta, alpha_bar, tau);

  ComplexMatrix g(16, 16);
  auto put = [&g](std::size_t bi, std::size_t bj, const ComplexMatrix& blk) {
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) g(4 * bi + i, 4 * bj + j) = blk(i, j);
  };
  put(0, 0, g11);
  put(1, 1, g22);
  put(2, 2, g22);
  put(1, 2, g23);
  put(2, 1, g23);
  put(3, 3, g44);
  return g;
}

HeisenbergOracle heisenberg_oracle(double j, double b, double t) {
  if (!(t > 0) || !std::isfinite(t) || !std::isfinite(j) || !std::isfinite(b))
    fail(errc::domain_violation, "oracle needs finite couplings and T > 0");
  if (j == 0) fail(errc::domain_violation, "closed forms divide by the exchange coupling");

  HeisenbergOracle o;
  o.j = j;
  o.b = b;
  o.t = t;

  const double beta = 1.0 / t;
  const double chb = std::cosh(beta * b), shb = std::sinh(beta * b);
  const double chj = std::cosh(beta * j), shj = std::sinh(beta * j);
  const double eb = std::exp(beta * b), emb = std::exp(-beta * b);
  const double den = 2.0 * (chb + chj);

  o.chi = emb / den;
  o.pi = eb / den;
  o.gam = chj / den;
  o.sig = -shj / den;

  const double dbden = 2.0 * (b * shb + j * shj);  // d den / d beta
  const double den2 = den * den;
  const double dchi_dbeta = -emb * (b * den + dbden) / den2;
  const double dpi_dbeta = eb * (b * den - dbden) / den2;
  const double dgam_dbeta = (j * shj * den - chj * dbden) / den2;
  const double dsig_dbeta = (-j * chj * den + shj * dbden) / den2;
  const double bt2 = -1.0 / (t * t);  // d beta / d T
  o.dchi_dt = bt2 * dchi_dbeta;
  o.dpi_dt = bt2 * dpi_dbeta;
  o.dgam_dt = bt2 * dgam_dbeta;
  o.dsig_dt = bt2 * dsig_dbeta;
  o.dchi_db = -beta * emb * (den + 2.0 * shb) / den2;
  o.dpi_db = beta * eb * (den - 2.0 * shb) / den2;
  o.dgam_db = -2.0 * beta * chj * shb / den2;
  o.dsig_db = 2.0 * beta * shj * shb / den2;

  o.alpha = eb * (chb + chj);
  o.alpha_bar = emb * (chb + chj);
  o.xi = 1.0 + eb * chj;
  o.delta = eb * shj;
  o.lam = 1.0 + chj / chb;
  o.tau = (chb - shb) * shj;
  o.kappa = 0.25 * (chb + chj) * (3.0 + std::cosh(2.0 * beta * j)) / chj;
  o.eta = 0.5 * (chb + chj) * shj;
  o.vartheta = 1.0 + emb * chj;
  o.mu = eb * shj;
  o.varpi = 0.5 * (chb + chj) * std::tanh(beta * j) * shj;

  const double eb2 = eb * eb;
  const double bracket = (1.0 + eb2) * (b * b + j * j) * chj +
                         2.0 * (eb * (b * b + j * j) - b * (eb2 - 1.0) * j * shj);
  const double denf = 1.0 + eb2 + 2.0 * eb * chj;
  const double cbj3 = (chb + chj) * (chb + chj) * (chb + chj);
  o.f_tt = emb * emb * denf * bracket / (4.0 * t * t * t * t * cbj3);
  o.f_bb = 2.0 * eb * (2.0 * eb + (1.0 + eb2) * chj) / (t * t * denf * denf);
  o.f_bt = -2.0 * eb * (2.0 * b * eb + b * (1.0 + eb2) * chj - (eb2 - 1.0) * j * shj) /
           (t * t * t * denf * denf);
  o.var_min_t = emb * t * t * t * t * (2.0 * eb + (1.0 + eb2) * chj) / (2.0 * j * j);
  o.var_min_b = emb * emb * emb * emb * t * t * denf * denf * denf * bracket /
                (16.0 * j * j * cbj3);

  auto sld_from = [&o](double dchi, double dpi, double dgam, double dsig) {
    ComplexMatrix l(4, 4);
    l(0, 0) = 2.0 * o.alpha * dchi;
    l(3, 3) = 2.0 * o.alpha_bar * dpi;
    l(1, 1) = l(2, 2) = 2.0 * ((o.kappa + o.varpi) * dgam + 2.0 * o.eta * dsig);
    l(1, 2) = l(2, 1) = 2.0 * ((o.kappa + o.varpi) * dsig + 2.0 * o.eta * dgam);
    return l;
  };
  o.sld_b = sld_from(o.dchi_db, o.dpi_db, o.dgam_db, o.dsig_db);
  o.sld_t = sld_from(o.dchi_dt, o.dpi_dt, o.dgam_dt, o.dsig_dt);
  return o;
}

double measure_bloch_general_gap(const ParamFamily& fam, const std::vector<double>& theta) {
  const auto rho = fam.evaluate(theta);
  const auto drhos = fam.derivatives(theta);
  const std::size_t d = rho.dim(), n = drhos.size();
  const auto bloch = state_to_bloch(rho);
  const double coef = std::sqrt(d / (2.0 * (d - 1.0)));
  const auto gens = su_generators(d);
  std::vector<std::vector<double>> dr(n, std::vector<double>(gens.size()));
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t i = 0; i < gens.size(); ++i)
      dr[mu][i] = coef * mat_mul(drhos[mu], gens[i]).trace().real();

  const auto f_bloch = qfim_bloch_general(bloch.r, dr, d);
  const auto f_eigen = eigen_fim_core(rho, drhos, 1e-12);
  double gap = 0;
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = 0; nu < n; ++nu)
      gap = std::max(gap, std::abs(f_bloch(mu, nu) - f_eigen(mu, nu)));
  return gap;
}

}  // namespace qestkit
