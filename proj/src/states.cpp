#include "qestkit/states.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include <json.hpp>

#include "qestkit/numkit.hpp"

namespace qestkit {

DensityMatrix::DensityMatrix(ComplexMatrix mat, double psd_tolerance)
    : mat_(std::move(mat)), psd_tol_(psd_tolerance) {
  if (!mat_.is_square()) fail(errc::not_square, "density matrix not square");
  const double scale = std::max(1.0, mat_.norm_inf());
  if (!mat_.is_hermitian(1e-10 * scale)) fail(errc::not_hermitian, "density matrix not Hermitian");
  if (std::abs(mat_.trace() - cplx(1, 0)) > 1e-10)
    fail(errc::not_normalized, "density matrix trace differs from 1");
  auto eig = hermitian_eigen(mat_);
  if (eig.eigenvalues.front() < -psd_tol_)
    fail(errc::not_psd, "density matrix has eigenvalue below -psd_tolerance");
}

bool ParamDomain::contains(const std::vector<double>& theta) const {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double l = i < lo.size() ? lo[i] : -std::numeric_limits<double>::infinity();
    const double h = i < hi.size() ? hi[i] : std::numeric_limits<double>::infinity();
    if (theta[i] <= l || theta[i] >= h) return false;
  }
  return true;
}

ParamFamily::ParamFamily(std::size_t n_params, EvalFn eval)
    : n_params_(n_params), eval_(std::move(eval)) {}

ParamFamily::ParamFamily(std::size_t n_params, EvalFn eval, DerivFn analytic)
    : n_params_(n_params), eval_(std::move(eval)), analytic_(std::move(analytic)) {}

DensityMatrix ParamFamily::evaluate(const std::vector<double>& theta) const {
  if (theta.size() != n_params_) fail(errc::dimension_mismatch, "theta length mismatch");
  if (domain_ && !domain_->contains(theta)) fail(errc::domain_violation, "theta outside domain");
  return eval_(theta);
}

ComplexMatrix ParamFamily::derivative(const std::vector<double>& theta, std::size_t mu) const {
  if (theta.size() != n_params_ || mu >= n_params_)
    fail(errc::dimension_mismatch, "derivative index out of range");
  if (domain_ && !domain_->contains(theta)) fail(errc::domain_violation, "theta outside domain");
  ComplexMatrix d;
  if (analytic_) {
    d = analytic_(theta, mu);
  } else {
    const double h = fd_step_ * std::max(1.0, std::abs(theta[mu]));
    std::vector<double> tp = theta, tm = theta;
    tp[mu] += h;
    tm[mu] -= h;
    if (tp[mu] == theta[mu] || tm[mu] == theta[mu])
      fail(errc::step_underflow, "finite-difference step vanished");
    if (domain_ && (!domain_->contains(tp) || !domain_->contains(tm)))
      fail(errc::domain_violation, "theta +- h leaves the domain");
    ComplexMatrix diff = eval_(tp).mat() - eval_(tm).mat();
    d = (1.0 / (2.0 * h)) * diff;
  }
  const double scale = std::max(1.0, d.norm_inf());
  if (!d.is_hermitian(2e-8 * scale))
    fail(errc::not_hermitian, "family derivative is not Hermitian");
  if (std::abs(d.trace()) > 2e-8 * scale)
    fail(errc::bad_input, "family derivative is not traceless");
  return d;
}

std::vector<ComplexMatrix> ParamFamily::derivatives(const std::vector<double>& theta) const {
  std::vector<ComplexMatrix> out;
  out.reserve(n_params_);
  for (std::size_t mu = 0; mu < n_params_; ++mu) out.push_back(derivative(theta, mu));
  return out;
}

ComplexMatrix family_derivative(const ParamFamily& fam, const std::vector<double>& theta,
                                std::size_t mu) {
  return fam.derivative(theta, mu);
}

DensityMatrix thermal_state(const ComplexMatrix& h, double beta) {
  if (!std::isfinite(beta) || beta < 0) fail(errc::domain_violation, "beta must be finite and >= 0");
  auto eig = hermitian_eigen(h);
  const std::size_t d = h.rows();
  // shift so the largest exponent is zero: exponents -beta(E_i - E_min)
  const double emin = eig.eigenvalues.front();
  std::vector<double> w(d);
  double z = 0;
  for (std::size_t i = 0; i < d; ++i) {
    w[i] = std::exp(-beta * (eig.eigenvalues[i] - emin));
    z += w[i];
  }
  ComplexMatrix rho(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      cplx s = 0;
      for (std::size_t k = 0; k < d; ++k)
        s += eig.eigenvectors(i, k) * (w[k] / z) * std::conj(eig.eigenvectors(j, k));
      rho(i, j) = s;
    }
  return DensityMatrix(std::move(rho));
}

ParamFamily unitary_family(const DensityMatrix& rho0, const ComplexMatrix& h) {
  if (h.rows() != rho0.dim() || h.cols() != rho0.dim())
    fail(errc::dimension_mismatch, "generator dimension mismatch");
  auto eig = hermitian_eigen(h);
  const std::size_t d = rho0.dim();
  ComplexMatrix r0 = rho0.mat();
  auto propagate = [eig, r0, d](double theta) {
    // U = V exp(-i theta Lambda) V^dagger, not just V exp(-i theta Lambda):
    // without the closing V^dagger the curve starts at V r0 V^dagger.
    ComplexMatrix u(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        cplx acc = 0;
        for (std::size_t k = 0; k < d; ++k)
          acc += eig.eigenvectors(i, k) * std::exp(cplx(0, -theta * eig.eigenvalues[k])) *
                 std::conj(eig.eigenvectors(j, k));
        u(i, j) = acc;
      }
    return mat_mul(mat_mul(u, r0), u.dagger());
  };
  ParamFamily fam(
      1,
      [propagate](const std::vector<double>& th) { return DensityMatrix(propagate(th[0])); },
      [propagate, h](const std::vector<double>& th, std::size_t) {
        ComplexMatrix rt = propagate(th[0]);
        return cplx(0, -1) * commutator(h, rt);
      });
  return fam;
}

DensityMatrix bloch_to_state(const BlochVector& b) {
  const std::size_t d = b.d;
  if (b.r.size() != d * d - 1) fail(errc::dimension_mismatch, "Bloch vector length mismatch");
  auto gens = su_generators(d);
  ComplexMatrix rho = ComplexMatrix::identity(d);
  const double coef = std::sqrt(d * (d - 1.0) / 2.0);
  for (std::size_t i = 0; i < gens.size(); ++i) rho += (coef * b.r[i]) * gens[i];
  rho *= cplx(1.0 / d, 0);
  return DensityMatrix(std::move(rho));  // NotPSD when r leaves the state space
}

BlochVector state_to_bloch(const DensityMatrix& rho) {
  const std::size_t d = rho.dim();
  auto gens = su_generators(d);
  BlochVector b;
  b.d = d;
  b.r.resize(gens.size());
  const double coef = std::sqrt(d / (2.0 * (d - 1.0)));
  for (std::size_t i = 0; i < gens.size(); ++i)
    b.r[i] = coef * mat_mul(rho.mat(), gens[i]).trace().real();
  return b;
}

ComplexMatrix heisenberg_xy_hamiltonian(double j, double b) {
  // 2J(Sx Sx + Sy Sy) + B(Sz1 + Sz2) in the computational product basis
  ComplexMatrix h(4, 4);
  h(0, 0) = b;
  h(1, 2) = j;
  h(2, 1) = j;
  h(3, 3) = -b;
  return h;
}

namespace {

struct HeisScalars {
  double chi, pi, gam, sig;
  double dchi_db, dpi_db, dgam_db, dsig_db;
  double dchi_dt, dpi_dt, dgam_dt, dsig_dt;
};

HeisScalars heis_scalars(double j, double b, double t) {
  const double be = 1.0 / t;
  const double chb = std::cosh(be * b), shb = std::sinh(be * b);
  const double chj = std::cosh(be * j), shj = std::sinh(be * j);
  const double dd = 2.0 * (chb + chj);
  const double dbe_dd = 2.0 * (b * shb + j * shj);  // d/dbeta of the normalizer
  const double emb = std::exp(-be * b), epb = std::exp(be * b);

  HeisScalars s;
  s.chi = emb / dd;
  s.pi = epb / dd;
  s.gam = chj / dd;
  s.sig = -shj / dd;

  const double dd2 = dd * dd;
  const double dchi_dbe = -emb * (b * dd + dbe_dd) / dd2;
  const double dpi_dbe = epb * (b * dd - dbe_dd) / dd2;
  const double dgam_dbe = (j * shj * dd - chj * dbe_dd) / dd2;
  const double dsig_dbe = (-j * chj * dd + shj * dbe_dd) / dd2;

  s.dchi_db = -be * emb * (dd + 2.0 * shb) / dd2;
  s.dpi_db = be * epb * (dd - 2.0 * shb) / dd2;
  s.dgam_db = -2.0 * be * chj * shb / dd2;
  s.dsig_db = 2.0 * be * shj * shb / dd2;

  const double jac = -be * be;  // d beta / d T = -1/T^2
  s.dchi_dt = jac * dchi_dbe;
  s.dpi_dt = jac * dpi_dbe;
  s.dgam_dt = jac * dgam_dbe;
  s.dsig_dt = jac * dsig_dbe;
  return s;
}

ComplexMatrix heis_pattern(double e00, double emid, double eoff, double e33) {
  ComplexMatrix m(4, 4);
  m(0, 0) = e00;
  m(1, 1) = emid;
  m(2, 2) = emid;
  m(1, 2) = eoff;
  m(2, 1) = eoff;
  m(3, 3) = e33;
  return m;
}

}  // namespace

ParamFamily heisenberg_xy_family(double j) {
  if (j == 0) fail(errc::domain_violation, "coupling J must be nonzero");
  ParamFamily fam(
      2,
      [j](const std::vector<double>& th) {
        const HeisScalars s = heis_scalars(j, th[0], th[1]);
        return DensityMatrix(heis_pattern(s.chi, s.gam, s.sig, s.pi));
      },
      [j](const std::vector<double>& th, std::size_t mu) {
        const HeisScalars s = heis_scalars(j, th[0], th[1]);
        if (mu == 0) return heis_pattern(s.dchi_db, s.dgam_db, s.dsig_db, s.dpi_db);
        return heis_pattern(s.dchi_dt, s.dgam_dt, s.dsig_dt, s.dpi_dt);
      });
  ParamDomain dom;
  dom.lo = {-std::numeric_limits<double>::infinity(), 0.0};  // T > 0
  dom.hi = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  fam.set_domain(std::move(dom));
  return fam;
}

std::pair<double, double> qubit_pvm_model(double theta) {
  if (!(theta >= 0.0 && theta <= 3.14159265358979323846))
    fail(errc::domain_violation, "theta must lie in [0, pi]");
  const double c = std::cos(theta / 2.0);
  return {(1.0 + c) / 2.0, (1.0 - c) / 2.0};
}

namespace {

ComplexMatrix parse_matrix(const nlohmann::json& doc, std::vector<std::size_t>* dims_out) {
  if (!doc.contains("matrix") || !doc["matrix"].is_array())
    fail(errc::bad_input, "missing or malformed \"matrix\" field");
  std::vector<std::size_t> dims;
  if (doc.contains("dims")) {
    for (const auto& d : doc["dims"]) dims.push_back(d.get<std::size_t>());
  }
  const auto& rows = doc["matrix"];
  const std::size_t n = rows.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n)
      fail(errc::bad_input, "matrix rows must all have length " + std::to_string(n));
    for (std::size_t jj = 0; jj < n; ++jj) {
      const auto& e = row[jj];
      if (!e.is_array() || e.size() != 2)
        fail(errc::bad_input, "matrix entries must be [re, im] pairs");
      m(i, jj) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  if (!m.all_finite()) fail(errc::bad_input, "non-finite matrix entry");
  if (!dims.empty()) {
    std::size_t prod = 1;
    for (std::size_t d : dims) prod *= d;
    if (prod != n) fail(errc::bad_input, "dims do not factor the matrix dimension");
  } else {
    dims = {n};
  }
  if (dims_out) *dims_out = dims;
  return m;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_input, "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::bad_input, path + ": " + e.what());
  }
  return doc;
}

}  // namespace

ComplexMatrix load_matrix_json(const std::string& path, std::vector<std::size_t>* dims_out) {
  return parse_matrix(load_json_file(path), dims_out);
}

DensityMatrix load_state_json(const std::string& path, std::vector<std::size_t>* dims_out) {
  return DensityMatrix(load_matrix_json(path, dims_out));
}

}  // namespace qestkit
