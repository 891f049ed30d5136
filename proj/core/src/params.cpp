#include "wkl/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wkl/errors.hpp"

namespace wkl {

namespace {

void check_sequence(const std::vector<double>& seq, const char* name) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!std::isfinite(seq[i])) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " has a non-finite entry");
    }
    if (seq[i] < 0.0) {
      throw Error(ErrorCode::NegativeEntry, std::string(name) + " has a negative entry");
    }
    if (i > 0 && seq[i] > seq[i - 1]) {
      throw Error(ErrorCode::NotNonincreasing, std::string(name) + " is not nonincreasing");
    }
  }
}

int count_positive(const std::vector<double>& seq) {
  int k = 0;
  while (k < static_cast<int>(seq.size()) && seq[k] > 0.0) ++k;
  return k;
}

std::vector<double> strip_zeros(const std::vector<double>& seq) {
  return std::vector<double>(seq.begin(), seq.begin() + count_positive(seq));
}

void compress(const std::vector<double>& seq, std::vector<double>& v, std::vector<int>& m,
              std::vector<int>& M) {
  v.clear();
  m.clear();
  M.clear();
  for (double x : seq) {
    if (x <= 0.0) break;
    if (!v.empty() && v.back() == x) {
      ++m.back();
    } else {
      v.push_back(x);
      m.push_back(1);
    }
  }
  int total = 0;
  for (int mk : m) {
    total += mk;
    M.push_back(total);
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

WandererParams validate_params(const RawParams& raw) {
  check_sequence(raw.a_plus, "a_plus");
  check_sequence(raw.b_plus, "b_plus");
  check_sequence(raw.a_minus, "a_minus");
  check_sequence(raw.b_minus, "b_minus");
  if (!std::isfinite(raw.c_plus)) {
    throw Error(ErrorCode::InvalidArgument, "c_plus must be finite");
  }
  WandererParams p;
  p.a_plus_ = raw.a_plus;
  p.b_plus_ = raw.b_plus;
  p.a_minus_ = strip_zeros(raw.a_minus);
  p.b_minus_ = strip_zeros(raw.b_minus);
  p.c_plus_ = raw.c_plus;
  p.J_a_ = count_positive(raw.a_plus);
  p.J_b_ = count_positive(raw.b_plus);
  const double inf = std::numeric_limits<double>::infinity();
  const bool minus_active = !p.a_minus_.empty() || !p.b_minus_.empty();
  if (minus_active) {
    p.underline_a_ = 0.0;
    p.underline_b_ = 0.0;
  } else {
    p.underline_a_ = p.J_a_ == 0 ? inf : 1.0 / raw.a_plus[0];
    p.underline_b_ = p.J_b_ == 0 ? -inf : -1.0 / raw.b_plus[0];
  }
  return p;
}

WandererParams make_params(std::vector<double> a_plus, std::vector<double> b_plus, double c_plus) {
  RawParams raw;
  raw.a_plus = std::move(a_plus);
  raw.b_plus = std::move(b_plus);
  raw.c_plus = c_plus;
  return validate_params(raw);
}

WandererParams WandererParams::swapped() const {
  RawParams raw;
  raw.a_plus = b_plus_;
  raw.b_plus = a_plus_;
  raw.a_minus = b_minus_;
  raw.b_minus = a_minus_;
  raw.c_plus = c_plus_;
  return validate_params(raw);
}

WandererParams WandererParams::with_c_plus(double c) const {
  RawParams raw;
  raw.a_plus = a_plus_;
  raw.b_plus = b_plus_;
  raw.a_minus = a_minus_;
  raw.b_minus = b_minus_;
  raw.c_plus = c;
  return validate_params(raw);
}

std::vector<double> WandererParams::a_nonzero() const { return strip_zeros(a_plus_); }
std::vector<double> WandererParams::b_nonzero() const { return strip_zeros(b_plus_); }

Multiplicities multiplicities(const WandererParams& p) {
  Multiplicities out;
  compress(p.a_plus(), out.v_a, out.m_a, out.M_a);
  compress(p.b_plus(), out.v_b, out.m_b, out.M_b);
  return out;
}

std::vector<double> reconstruct(const std::vector<double>& v, const std::vector<int>& m) {
  if (v.size() != m.size()) {
    throw Error(ErrorCode::InvalidArgument, "v and m differ in length");
  }
  std::vector<double> seq;
  for (std::size_t g = 0; g < v.size(); ++g) {
    if (m[g] < 1) throw Error(ErrorCode::InvalidArgument, "multiplicity must be positive");
    if (g > 0 && !(v[g] < v[g - 1])) {
      throw Error(ErrorCode::NotNonincreasing, "v must be strictly decreasing");
    }
    seq.insert(seq.end(), m[g], v[g]);
  }
  return seq;
}

std::pair<double, double> underline_bounds(const WandererParams& p) {
  return {p.underline_a(), p.underline_b()};
}

cplx phi(cplx z, const WandererParams& p, double eps) {
  const bool minus_active = p.has_minus();
  if (minus_active && std::abs(z) < eps) {
    throw Error(ErrorCode::PoleHit, "z = 0 with minus-parameters active");
  }
  cplx value = std::exp(p.c_plus() * z);
  for (double a : p.a_plus()) {
    if (a <= 0.0) break;
    const double pole = 1.0 / a;
    if (std::abs(z - pole) <= eps * pole) {
      throw Error(ErrorCode::PoleHit, "z is within tolerance of a pole 1/a");
    }
    value /= (1.0 - a * z);
  }
  for (double b : p.b_plus()) {
    if (b <= 0.0) break;
    value *= (1.0 + b * z);
  }
  for (double a : p.a_minus()) {
    if (std::abs(z - a) <= eps * a) {
      throw Error(ErrorCode::PoleHit, "z is within tolerance of a pole a^-");
    }
    value /= (1.0 - a / z);
  }
  for (double b : p.b_minus()) value *= (1.0 + b / z);
  return value;
}

cplx log_phi(cplx z, const WandererParams& p) {
  cplx value = p.c_plus() * z;
  for (double a : p.a_plus()) {
    if (a <= 0.0) break;
    value -= std::log(1.0 - a * z);
  }
  for (double b : p.b_plus()) {
    if (b <= 0.0) break;
    value += std::log(1.0 + b * z);
  }
  for (double a : p.a_minus()) value -= std::log(1.0 - a / z);
  for (double b : p.b_minus()) value += std::log(1.0 + b / z);
  return value;
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "not a number: '" + item + "'");
    }
    if (used != item.size()) throw Error(ErrorCode::ConfigError, "not a number: '" + item + "'");
    out.push_back(x);
  }
  return out;
}

WandererParams params_from_config(const std::map<std::string, std::string>& kv) {
  RawParams raw;
  for (const auto& [key, value] : kv) {
    if (key == "a_plus") {
      raw.a_plus = parse_list(value);
    } else if (key == "b_plus") {
      raw.b_plus = parse_list(value);
    } else if (key == "c_plus") {
      auto list = parse_list(value);
      if (list.size() != 1) throw Error(ErrorCode::ConfigError, "c_plus takes one value");
      raw.c_plus = list[0];
    } else if (key == "a_minus") {
      raw.a_minus = parse_list(value);
    } else if (key == "b_minus") {
      raw.b_minus = parse_list(value);
    } else if (key == "c_minus") {
      auto list = parse_list(value);
      if (list.size() != 1 || list[0] != 0.0) {
        throw Error(ErrorCode::ConfigError, "c_minus is fixed to 0");
      }
    }
  }
  return validate_params(raw);
}

WandererParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  return params_from_config(parse_key_values(in));
}

std::string format_params(const WandererParams& p) {
  auto list = [](const std::vector<double>& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ", ";
      os << v[i];
    }
    return os.str();
  };
  std::ostringstream os;
  os << std::setprecision(17);
  os << "a_plus = " << list(p.a_plus()) << '\n';
  os << "b_plus = " << list(p.b_plus()) << '\n';
  os << "c_plus = " << p.c_plus() << '\n';
  if (!p.a_minus().empty()) os << "a_minus = " << list(p.a_minus()) << '\n';
  if (!p.b_minus().empty()) os << "b_minus = " << list(p.b_minus()) << '\n';
  return os.str();
}

}  // namespace wkl
