#pragma once

// Exact rational interval arithmetic and box subdivision for the five
// parameter systems B1..B5 (plus the relaxed control "B1-relaxed").
//
// Every constraint is normalised to g >= 0. A strict constraint g > 0 is
// tightened to g - margin >= 0. gamma is not a variable: it is 4/3 - beta.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace ckb {

using Rational = mpq_class;

/// Variable order doubles as the bisection tie-break order.
enum class Var { kX, kY, kZ, kZeta, kBeta };
inline constexpr int kVarCount = 5;

std::string to_string(Var v);
Var var_from_string(const std::string& s);

std::string to_string(const Rational& q);
Rational rational_from_string(const std::string& s);

struct Interval {
  Rational lo;
  Rational hi;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval pow(const Interval& a, int e);
/// Throws InvariantViolation when the intervals are disjoint.
Interval intersect(const Interval& a, const Interval& b);

struct Box {
  std::array<std::optional<Interval>, kVarCount> iv;

  bool has(Var v) const { return iv[static_cast<int>(v)].has_value(); }
  /// Throws PreconditionError when v is absent.
  const Interval& at(Var v) const;
  void set(Var v, Interval i) { iv[static_cast<int>(v)] = std::move(i); }
  std::vector<Var> vars() const;
  /// Widest variable, ties broken by variable order.
  Var widest() const;
  std::pair<Box, Box> bisect(Var v) const;
  Rational volume() const;
  bool contains(const Box& other) const;
};

using Point = std::array<Rational, kVarCount>;

/// Sparse polynomial with rational coefficients over the five variables.
class Polynomial {
 public:
  using Exponents = std::array<unsigned char, kVarCount>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(google-explicit-constructor)
  static Polynomial variable(Var v);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;

  Polynomial derivative(Var v) const;
  /// p(v + c).
  Polynomial shift(Var v, const Rational& c) const;
  int degree(Var v) const;
  bool uses(Var v) const { return degree(v) > 0; }
  Rational evaluate(const Point& p) const;
  /// Term-wise enclosure.
  Interval naive(const Box& b) const;
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  std::string str() const;

 private:
  void add_term(const Exponents& e, const Rational& c);
  std::map<Exponents, Rational> terms_;
};

/// Expression tree kept in the factored form it was written in.
class Expr {
 public:
  Expr(const Rational& c);  // NOLINT(google-explicit-constructor)
  Expr(int c) : Expr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  static Expr variable(Var v);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);

  Polynomial expand() const;
  Interval eval(const Box& b) const;
  Rational evaluate(const Point& p) const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Enclosure of an expanded polynomial: the intersection of the term-wise
/// bound, the bound after shifting every variable to start at 0, and the
/// bound after pinning variables on which the polynomial is monotone.
Interval interval_eval(const Polynomial& p, const Box& b);
/// Enclosure of a factored expression intersected with that of its expansion.
Interval interval_eval(const Expr& e, const Box& b);

struct Constraint {
  std::string name;
  Expr expr;
  Polynomial poly;
  bool strict = false;
};

struct LemmaSystem {
  std::string id;
  Rational margin;
  Box root;
  /// Constraints with the margin already applied to strict ones.
  std::vector<Constraint> constraints;
  /// Variable whose root interval is a cap on an unbounded range.
  std::optional<Var> capped;
};

Rational default_margin();

/// Ids: B1..B5, and B1-relaxed (B1 with y >= 1/2 weakened to y >= 0).
LemmaSystem lemma_system(const std::string& id, const Rational& margin = default_margin());

/// Whether p satisfies every constraint exactly.
bool satisfies(const LemmaSystem& s, const Point& p);

struct Leaf {
  Box box;
  int depth = 0;
  int constraint = -1;
  /// -1 unless the leaf is ruled out by constraint + lambda * partner.
  int partner = -1;
  Rational lambda;
  /// Upper bound of the (combined) constraint over the box; negative.
  Rational upper;
};

/// Why raising the capped variable above its cap cannot create solutions.
struct TailCheck {
  int constraint = -1;
  /// "nonincreasing": the constraint is affine in the variable with
  /// derivative at most `bound` <= 0. "holds-at-cap": at the cap the
  /// constraint is at least `bound` >= 0 on the root box.
  std::string kind;
  Rational bound;
};

struct Certificate {
  std::string lemma;
  Rational margin;
  Box root;
  std::vector<Leaf> leaves;
  int max_depth = 0;
  std::optional<Var> capped;
  std::vector<TailCheck> tail;
};

struct CertifyResult {
  bool certified = false;
  std::optional<Certificate> certificate;
  std::optional<Point> feasible_point;
  /// Smallest undecided box when the depth ran out.
  std::optional<Box> undecided;
  long boxes = 0;
  double millis = 0;
};

CertifyResult certify_infeasible(const LemmaSystem& s, int max_depth = 40);
CertifyResult certify_infeasible(const std::string& id, int max_depth = 40,
                                 const Rational& margin = default_margin());

/// Re-evaluates every leaf, checks that the leaves tile the root box and
/// re-checks the tail argument. On failure writes the reason to *why.
bool verify_certificate(const Certificate& c, std::string* why = nullptr);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);
nlohmann::json box_to_json(const Box& b);
nlohmann::json point_to_json(const Point& p, const Box& shape);

struct GridResult {
  Point point{};
  /// max over constraints of max(0, -g) at the point.
  Rational violation;
  long nodes = 0;
};

/// Minimises the violation over the grid with `resolution` steps per axis of
/// the root box (resolution + 1 points each). Exact: sub-boxes whose
/// enclosure cannot beat the incumbent are skipped. Requires resolution >= 2.
GridResult grid_scan(const LemmaSystem& s, int resolution);

}  // namespace ckb
