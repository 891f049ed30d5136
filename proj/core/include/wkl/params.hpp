#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wkl {

using cplx = std::complex<double>;

struct Multiplicities {
  std::vector<double> v_a;
  std::vector<int> m_a;
  std::vector<int> M_a;
  std::vector<double> v_b;
  std::vector<int> m_b;
  std::vector<int> M_b;
};

struct RawParams {
  std::vector<double> a_plus;
  std::vector<double> b_plus;
  double c_plus = 0.0;
  std::vector<double> a_minus;
  std::vector<double> b_minus;
};

class WandererParams {
 public:
  WandererParams() = default;

  const std::vector<double>& a_plus() const { return a_plus_; }
  const std::vector<double>& b_plus() const { return b_plus_; }
  const std::vector<double>& a_minus() const { return a_minus_; }
  const std::vector<double>& b_minus() const { return b_minus_; }
  double c_plus() const { return c_plus_; }
  double c_minus() const { return 0.0; }

  int J_a() const { return J_a_; }
  int J_b() const { return J_b_; }
  double underline_a() const { return underline_a_; }
  double underline_b() const { return underline_b_; }

  bool has_minus() const { return !a_minus_.empty() || !b_minus_.empty(); }
  bool is_pos() const { return !has_minus() && c_plus_ == 0.0; }
  bool is_zero() const { return J_a_ == 0 && J_b_ == 0 && !has_minus() && c_plus_ == 0.0; }

  // (b, a, c): the parameters of the time-reflected ensemble.
  WandererParams swapped() const;
  WandererParams with_c_plus(double c) const;

  // Nonzero prefixes, which are what the kernels use.
  std::vector<double> a_nonzero() const;
  std::vector<double> b_nonzero() const;

  friend WandererParams validate_params(const RawParams& raw);

 private:
  std::vector<double> a_plus_, b_plus_, a_minus_, b_minus_;
  double c_plus_ = 0.0;
  int J_a_ = 0;
  int J_b_ = 0;
  double underline_a_ = 0.0;
  double underline_b_ = 0.0;
};

WandererParams validate_params(const RawParams& raw);
WandererParams make_params(std::vector<double> a_plus, std::vector<double> b_plus = {},
                           double c_plus = 0.0);

Multiplicities multiplicities(const WandererParams& p);

// Inverse of the (v, m) compression; returns the nonincreasing sequence.
std::vector<double> reconstruct(const std::vector<double>& v, const std::vector<int>& m);

std::pair<double, double> underline_bounds(const WandererParams& p);

cplx phi(cplx z, const WandererParams& p, double eps = 1e-10);
cplx log_phi(cplx z, const WandererParams& p);

// key = value lines, '#' comments.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::vector<double> parse_list(const std::string& text);
WandererParams params_from_config(const std::map<std::string, std::string>& kv);
WandererParams load_params(const std::string& path);
std::string format_params(const WandererParams& p);

}  // namespace wkl
