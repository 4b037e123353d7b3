#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ssplab {

/// A plain Runge-Kutta tableau. The abscissae c are not stored; they are
/// defined as the row sums of a.
struct RKTableau {
  int stages = 0;
  std::vector<double> a;  // row-major, stages x stages
  std::vector<double> b;

  double A(int i, int j) const { return a[static_cast<size_t>(i) * stages + j]; }
  double& A(int i, int j) { return a[static_cast<size_t>(i) * stages + j]; }

  double c(int i) const {
    double s = 0.0;
    for (int j = 0; j < stages; ++j) s += A(i, j);
    return s;
  }

  bool is_explicit() const {
    for (int i = 0; i < stages; ++i)
      for (int j = i; j < stages; ++j)
        if (A(i, j) != 0.0) return false;
    return true;
  }

  bool is_dirk() const {
    for (int i = 0; i < stages; ++i)
      for (int j = i + 1; j < stages; ++j)
        if (A(i, j) != 0.0) return false;
    return true;
  }

  void validate() const {
    if (stages <= 0) throw std::invalid_argument("tableau: stage count must be positive");
    if (a.size() != static_cast<size_t>(stages) * stages || b.size() != static_cast<size_t>(stages))
      throw std::invalid_argument("tableau: array sizes inconsistent with stage count");
    double bsum = 0.0;
    for (double w : b) bsum += w;
    if (std::abs(bsum - 1.0) > 1e-14)
      throw std::invalid_argument("tableau: weights do not sum to 1");
  }
};

/// A pair of tableaux for an additive (IMEX) method: strictly lower
/// triangular explicit part, DIRK implicit part, shared stage count.
struct AdditiveTableau {
  RKTableau explicit_part;
  RKTableau implicit_part;
  std::string label;
  std::optional<double> gamma;  // set only for the imex_ssp2_222 family

  int stages() const { return explicit_part.stages; }

  void validate() const {
    explicit_part.validate();
    implicit_part.validate();
    if (explicit_part.stages != implicit_part.stages)
      throw std::invalid_argument("additive tableau: stage counts differ");
    if (!explicit_part.is_explicit())
      throw std::invalid_argument("additive tableau: explicit part is not strictly lower triangular");
    if (!implicit_part.is_dirk())
      throw std::invalid_argument("additive tableau: implicit part is not lower triangular");
  }
};

using AnyTableau = std::variant<RKTableau, AdditiveTableau>;

namespace detail {

inline RKTableau make_rk(int s, std::vector<double> a, std::vector<double> b) {
  RKTableau t{s, std::move(a), std::move(b)};
  t.validate();
  return t;
}

}  // namespace detail

inline constexpr double default_gamma_222 = 0.29289321881345247560;  // 1 - 1/sqrt(2)

/// Construct a named builtin scheme. gamma is only accepted for
/// imex_ssp2_222 and must lie in [0, 1/2].
inline AnyTableau builtin(std::string_view name, std::optional<double> gamma = std::nullopt) {
  if (gamma && name != "imex_ssp2_222")
    throw std::invalid_argument("gamma parameter only supported by imex_ssp2_222");

  if (name == "forward_euler") return detail::make_rk(1, {0.0}, {1.0});
  if (name == "ssprk22") return detail::make_rk(2, {0, 0, 1, 0}, {0.5, 0.5});
  if (name == "ssprk32")
    return detail::make_rk(3, {0, 0, 0, 0.5, 0, 0, 0.5, 0.5, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  if (name == "ssprk33")
    return detail::make_rk(3, {0, 0, 0, 1, 0, 0, 0.25, 0.25, 0}, {1.0 / 6, 1.0 / 6, 2.0 / 3});
  if (name == "heun3")
    return detail::make_rk(3, {0, 0, 0, 1.0 / 3, 0, 0, 0, 2.0 / 3, 0}, {0.25, 0, 0.75});

  if (name == "imex_ssp2_222") {
    const double g = gamma.value_or(default_gamma_222);
    if (g < 0.0 || g > 0.5) throw std::invalid_argument("imex_ssp2_222: gamma must lie in [0, 1/2]");
    AdditiveTableau t;
    t.explicit_part = detail::make_rk(2, {0, 0, 1, 0}, {0.5, 0.5});
    t.implicit_part = detail::make_rk(2, {g, 0, 1 - 2 * g, g}, {0.5, 0.5});
    t.label = "imex_ssp2_222";
    t.gamma = g;
    t.validate();
    return t;
  }
  if (name == "imex_ssp2_332") {
    AdditiveTableau t;
    t.explicit_part = detail::make_rk(3, {0, 0, 0, 0.5, 0, 0, 0.5, 0.5, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    t.implicit_part = detail::make_rk(
        3, {0.2, 0, 0, 0.1, 0.2, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    t.label = "imex_ssp2_332";
    t.validate();
    return t;
  }
  if (name == "pr_ssp2_332_original") {
    AdditiveTableau t;
    t.explicit_part = detail::make_rk(3, {0, 0, 0, 0.5, 0, 0, 0.5, 0.5, 0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    t.implicit_part = detail::make_rk(
        3, {0.25, 0, 0, 0, 0.25, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    t.label = "pr_ssp2_332_original";
    t.validate();
    return t;
  }
  if (name == "imex_ssp3_333") {
    AdditiveTableau t;
    t.explicit_part = detail::make_rk(3, {0, 0, 0, 1, 0, 0, 0.25, 0.25, 0}, {1.0 / 6, 1.0 / 6, 2.0 / 3});
    t.implicit_part = detail::make_rk(
        3, {0, 0, 0, 14.0 / 15, 1.0 / 15, 0, 7.0 / 30, 0.2, 1.0 / 15}, {1.0 / 6, 1.0 / 6, 2.0 / 3});
    t.label = "imex_ssp3_333";
    t.validate();
    return t;
  }
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

inline AdditiveTableau builtin_additive(std::string_view name, std::optional<double> gamma = std::nullopt) {
  AnyTableau t = builtin(name, gamma);
  if (auto* at = std::get_if<AdditiveTableau>(&t)) return *at;
  throw std::invalid_argument(std::string(name) + " is not an additive scheme");
}

inline RKTableau builtin_plain(std::string_view name) {
  AnyTableau t = builtin(name);
  if (auto* rt = std::get_if<RKTableau>(&t)) return *rt;
  throw std::invalid_argument(std::string(name) + " is not a plain scheme");
}

/// Classical order conditions up to order 3.
inline bool check_order_conditions(const RKTableau& t, int p, double tol = 1e-12) {
  if (p < 1 || p > 3) throw std::invalid_argument("check_order_conditions: p must be in 1..3");
  const int s = t.stages;
  std::vector<double> c(s);
  for (int i = 0; i < s; ++i) c[i] = t.c(i);

  double be = 0, bc = 0, bc2 = 0, bac = 0;
  for (int i = 0; i < s; ++i) {
    be += t.b[i];
    bc += t.b[i] * c[i];
    bc2 += t.b[i] * c[i] * c[i];
    double ac = 0;
    for (int j = 0; j < s; ++j) ac += t.A(i, j) * c[j];
    bac += t.b[i] * ac;
  }
  if (std::abs(be - 1.0) > tol) return false;
  if (p >= 2 && std::abs(bc - 0.5) > tol) return false;
  if (p >= 3 && (std::abs(bc2 - 1.0 / 3) > tol || std::abs(bac - 1.0 / 6) > tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Tableau file format: line oriented, '#' starts a comment.
//   stages <s>
//   explicit
//   <s rows of s entries, fractions like 1/3 allowed>
//   b <s entries>
//   implicit
//   <s rows>
//   bt <s entries>
// ---------------------------------------------------------------------------

namespace detail {

inline double parse_entry(const std::string& tok) {
  auto slash = tok.find('/');
  try {
    if (slash == std::string::npos) {
      size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      return v;
    }
    size_t p1 = 0, p2 = 0;
    const std::string num = tok.substr(0, slash), den = tok.substr(slash + 1);
    double n = std::stod(num, &p1);
    double d = std::stod(den, &p2);
    if (p1 != num.size() || p2 != den.size() || d == 0.0) throw std::invalid_argument(tok);
    return n / d;
  } catch (const std::exception&) {
    throw std::invalid_argument("tableau file: bad numeric entry '" + tok + "'");
  }
}

inline std::vector<std::string> tokenize_line(const std::string& line) {
  std::string body = line.substr(0, line.find('#'));
  std::istringstream is(body);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

inline std::string format_entry(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline AdditiveTableau parse_tableau(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::vector<std::string>> lines;
  while (std::getline(is, line)) {
    auto toks = detail::tokenize_line(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  size_t pos = 0;
  auto next = [&]() -> const std::vector<std::string>& {
    if (pos >= lines.size()) throw std::invalid_argument("tableau file: unexpected end of file");
    return lines[pos++];
  };

  const auto& header = next();
  if (header.size() != 2 || header[0] != "stages")
    throw std::invalid_argument("tableau file: expected 'stages <s>' header");
  const int s = std::stoi(header[1]);
  if (s <= 0) throw std::invalid_argument("tableau file: stage count must be positive");

  auto read_block = [&](const std::string& kw, const std::string& weight_kw) {
    const auto& tag = next();
    if (tag.size() != 1 || tag[0] != kw)
      throw std::invalid_argument("tableau file: expected '" + kw + "' block");
    RKTableau t;
    t.stages = s;
    t.a.resize(static_cast<size_t>(s) * s);
    for (int i = 0; i < s; ++i) {
      const auto& row = next();
      if (static_cast<int>(row.size()) != s)
        throw std::invalid_argument("tableau file: row with wrong number of entries in '" + kw + "' block");
      for (int j = 0; j < s; ++j) t.A(i, j) = detail::parse_entry(row[j]);
    }
    const auto& wrow = next();
    if (wrow.empty() || wrow[0] != weight_kw || static_cast<int>(wrow.size()) != s + 1)
      throw std::invalid_argument("tableau file: expected '" + weight_kw + "' row with " + std::to_string(s) + " entries");
    for (int j = 0; j < s; ++j) t.b.push_back(detail::parse_entry(wrow[j + 1]));
    return t;
  };

  AdditiveTableau t;
  t.explicit_part = read_block("explicit", "b");
  t.implicit_part = read_block("implicit", "bt");
  t.label = "from_file";
  t.validate();
  return t;
}

inline std::string serialize_tableau(const AdditiveTableau& t) {
  std::ostringstream os;
  const int s = t.stages();
  os << "stages " << s << "\n";
  auto dump = [&](const RKTableau& part, const char* kw, const char* weight_kw) {
    os << kw << "\n";
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) os << (j ? " " : "") << detail::format_entry(part.A(i, j));
      os << "\n";
    }
    os << weight_kw;
    for (int j = 0; j < s; ++j) os << " " << detail::format_entry(part.b[j]);
    os << "\n";
  };
  dump(t.explicit_part, "explicit", "b");
  dump(t.implicit_part, "implicit", "bt");
  return os.str();
}

}  // namespace ssplab
