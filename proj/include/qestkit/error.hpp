#pragma once

#include <stdexcept>
#include <string>

namespace qestkit {

enum class errc {
  not_square,
  not_hermitian,
  not_psd,
  not_normalized,
  convergence_failure,
  dimension_mismatch,
  dimension_cap_exceeded,
  domain_violation,
  step_underflow,
  zero_probability,
  regularity_violation,
  quadrature_failure,
  non_positive_information,
  not_a_povm,
  degenerate_spectrum,
  rank_deficient,
  solve_failure,
  extrapolation_unstable,
  not_x_state,
  singular_fim,
  range_violation,
  bloch_norm_exceeded,
  not_a_qubit_side,
  dimension_not_power_of_two,
  zero_correlation,
  bad_input,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace qestkit
