#include "ckb/inequality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>

#include <fmt/format.h>

#include "ckb/core.hpp"
#include "ckb/io.hpp"

namespace ckb {

namespace {

int idx(Var v) { return static_cast<int>(v); }

constexpr std::array<Var, kVarCount> kAllVars{Var::kX, Var::kY, Var::kZ, Var::kZeta, Var::kBeta};

Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

Rational rpow(const Rational& q, int e) {
  Rational out = 1;
  for (int i = 0; i < e; ++i) out *= q;
  return out;
}

Rational binomial(int n, int k) {
  Rational out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

std::string to_string(Var v) {
  switch (v) {
    case Var::kX: return "x";
    case Var::kY: return "y";
    case Var::kZ: return "z";
    case Var::kZeta: return "zeta";
    case Var::kBeta: return "beta";
  }
  return "?";
}

Var var_from_string(const std::string& s) {
  for (Var v : kAllVars) {
    if (to_string(v) == s) return v;
  }
  throw FormatError("unknown variable '" + s + "'");
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational rational_from_string(const std::string& s) {
  try {
    Rational q(s, 10);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw FormatError("not a rational number: '" + s + "'");
  }
}

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  const Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {rmin(rmin(p1, p2), rmin(p3, p4)), rmax(rmax(p1, p2), rmax(p3, p4))};
}

Interval pow(const Interval& a, int e) {
  if (e == 0) return {1, 1};
  const Rational l = rpow(a.lo, e), h = rpow(a.hi, e);
  if (e % 2 == 1 || a.lo >= 0) return {l, h};
  if (a.hi <= 0) return {h, l};
  return {0, rmax(l, h)};
}

Interval intersect(const Interval& a, const Interval& b) {
  Interval out{rmax(a.lo, b.lo), rmin(a.hi, b.hi)};
  if (out.lo > out.hi) {
    throw InvariantViolation(fmt::format("disjoint enclosures [{}, {}] and [{}, {}]", to_string(a.lo),
                                         to_string(a.hi), to_string(b.lo), to_string(b.hi)));
  }
  return out;
}

const Interval& Box::at(Var v) const {
  if (!has(v)) throw PreconditionError("variable " + to_string(v) + " is not in the box");
  return *iv[idx(v)];
}

std::vector<Var> Box::vars() const {
  std::vector<Var> out;
  for (Var v : kAllVars) {
    if (has(v)) out.push_back(v);
  }
  return out;
}

Var Box::widest() const {
  std::optional<Var> best;
  Rational width = -1;
  for (Var v : vars()) {
    const Rational w = at(v).hi - at(v).lo;
    if (w > width) {
      width = w;
      best = v;
    }
  }
  if (!best) throw PreconditionError("empty box");
  return *best;
}

std::pair<Box, Box> Box::bisect(Var v) const {
  const Interval& i = at(v);
  const Rational mid = (i.lo + i.hi) / 2;
  Box a = *this, b = *this;
  a.set(v, {i.lo, mid});
  b.set(v, {mid, i.hi});
  return {a, b};
}

Rational Box::volume() const {
  Rational out = 1;
  for (Var v : vars()) out *= at(v).hi - at(v).lo;
  return out;
}

bool Box::contains(const Box& other) const {
  for (Var v : kAllVars) {
    if (has(v) != other.has(v)) return false;
    if (has(v) && (other.at(v).lo < at(v).lo || other.at(v).hi > at(v).hi)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_[{}] = c;
}

Polynomial Polynomial::variable(Var v) {
  Polynomial p;
  Exponents e{};
  e[idx(v)] = 1;
  p.terms_[e] = 1;
  return p;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exponents e{};
      for (int i = 0; i < kVarCount; ++i) e[i] = static_cast<unsigned char>(e1[i] + e2[i]);
      out.add_term(e, c1 * c2);
    }
  }
  return out;
}

Polynomial Polynomial::derivative(Var v) const {
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (e[idx(v)] == 0) continue;
    Exponents d = e;
    --d[idx(v)];
    out.add_term(d, c * e[idx(v)]);
  }
  return out;
}

Polynomial Polynomial::shift(Var v, const Rational& c) const {
  if (c == 0) return *this;
  Polynomial out;
  for (const auto& [e, coef] : terms_) {
    const int n = e[idx(v)];
    for (int j = 0; j <= n; ++j) {
      Exponents f = e;
      f[idx(v)] = static_cast<unsigned char>(j);
      out.add_term(f, coef * binomial(n, j) * rpow(c, n - j));
    }
  }
  return out;
}

int Polynomial::degree(Var v) const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max<int>(d, e[idx(v)]);
  return d;
}

Rational Polynomial::evaluate(const Point& p) const {
  Rational out = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < kVarCount; ++i) t *= rpow(p[i], e[i]);
    out += t;
  }
  return out;
}

Interval Polynomial::naive(const Box& b) const {
  Interval out{0, 0};
  for (const auto& [e, c] : terms_) {
    Interval t{c, c};
    for (int i = 0; i < kVarCount; ++i) {
      if (e[i] > 0) t = t * pow(b.at(kAllVars[i]), e[i]);
    }
    out = out + t;
  }
  return out;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += to_string(c);
    for (int i = 0; i < kVarCount; ++i) {
      if (e[i] == 0) continue;
      out += "*" + to_string(kAllVars[i]);
      if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Expr::Node {
  enum class Op { kConst, kVar, kAdd, kSub, kMul } op;
  Rational value;
  Var var = Var::kX;
  std::shared_ptr<const Node> a, b;
};

Expr::Expr(const Rational& c) : node_(std::make_shared<const Node>(Node{Node::Op::kConst, c, Var::kX, {}, {}})) {}

Expr Expr::variable(Var v) { return Expr(std::make_shared<const Node>(Node{Node::Op::kVar, 0, v, {}, {}})); }

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Op::kAdd, 0, Var::kX, a.node_, b.node_}));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Op::kSub, 0, Var::kX, a.node_, b.node_}));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{Expr::Node::Op::kMul, 0, Var::kX, a.node_, b.node_}));
}

Polynomial Expr::expand() const {
  std::function<Polynomial(const Node&)> go = [&](const Node& n) -> Polynomial {
    switch (n.op) {
      case Node::Op::kConst: return Polynomial(n.value);
      case Node::Op::kVar: return Polynomial::variable(n.var);
      case Node::Op::kAdd: return go(*n.a) + go(*n.b);
      case Node::Op::kSub: return go(*n.a) - go(*n.b);
      case Node::Op::kMul: return go(*n.a) * go(*n.b);
    }
    return {};
  };
  return go(*node_);
}

Interval Expr::eval(const Box& b) const {
  std::function<Interval(const Node&)> go = [&](const Node& n) -> Interval {
    switch (n.op) {
      case Node::Op::kConst: return {n.value, n.value};
      case Node::Op::kVar: return b.at(n.var);
      case Node::Op::kAdd: return go(*n.a) + go(*n.b);
      case Node::Op::kSub: return go(*n.a) - go(*n.b);
      case Node::Op::kMul: return go(*n.a) * go(*n.b);
    }
    return {};
  };
  return go(*node_);
}

Rational Expr::evaluate(const Point& p) const {
  std::function<Rational(const Node&)> go = [&](const Node& n) -> Rational {
    switch (n.op) {
      case Node::Op::kConst: return n.value;
      case Node::Op::kVar: return p[idx(n.var)];
      case Node::Op::kAdd: return go(*n.a) + go(*n.b);
      case Node::Op::kSub: return go(*n.a) - go(*n.b);
      case Node::Op::kMul: return go(*n.a) * go(*n.b);
    }
    return 0;
  };
  return go(*node_);
}

Interval interval_eval(const Polynomial& p, const Box& b) {
  for (Var v : kAllVars) {
    if (p.uses(v) && !b.has(v)) throw PreconditionError("variable " + to_string(v) + " is not in the box");
  }
  Interval out = p.naive(b);

  // Every variable shifted to range over [0, width].
  Polynomial shifted = p;
  Box zero = b;
  for (Var v : b.vars()) {
    shifted = shifted.shift(v, b.at(v).lo);
    zero.set(v, {0, b.at(v).hi - b.at(v).lo});
  }
  out = intersect(out, shifted.naive(zero));

  // Pin variables on which p is monotone, separately for each end.
  Box up = b, down = b;
  for (int round = 0; round < 2; ++round) {
    for (Var v : b.vars()) {
      if (!p.uses(v)) continue;
      const Polynomial d = p.derivative(v);
      const Interval du = d.naive(up);
      if (up.at(v).lo != up.at(v).hi) {
        if (du.lo >= 0) up.set(v, {up.at(v).hi, up.at(v).hi});
        else if (du.hi <= 0) up.set(v, {up.at(v).lo, up.at(v).lo});
      }
      const Interval dd = d.naive(down);
      if (down.at(v).lo != down.at(v).hi) {
        if (dd.lo >= 0) down.set(v, {down.at(v).lo, down.at(v).lo});
        else if (dd.hi <= 0) down.set(v, {down.at(v).hi, down.at(v).hi});
      }
    }
  }
  return intersect(out, {p.naive(down).lo, p.naive(up).hi});
}

Interval interval_eval(const Expr& e, const Box& b) { return intersect(e.eval(b), interval_eval(e.expand(), b)); }

namespace {

Interval enclose(const Expr& e, const Polynomial& p, const Box& b) { return intersect(e.eval(b), interval_eval(p, b)); }

Interval enclose(const Constraint& c, const Box& b) { return enclose(c.expr, c.poly, b); }

Expr X() { return Expr::variable(Var::kX); }
Expr Y() { return Expr::variable(Var::kY); }
Expr Z() { return Expr::variable(Var::kZ); }
Expr Zeta() { return Expr::variable(Var::kZeta); }
Expr Beta() { return Expr::variable(Var::kBeta); }
Expr q(long p, long d) { return Expr(Rational(p, d)); }

}  // namespace

Rational default_margin() { return Rational(1, 1000000); }

LemmaSystem lemma_system(const std::string& id, const Rational& margin) {
  if (margin < 0) throw PreconditionError("margin must be non-negative");
  LemmaSystem s;
  s.id = id;
  s.margin = margin;
  const Expr gamma = q(4, 3) - Beta();
  std::vector<std::pair<std::string, Expr>> weak;
  auto iv = [](long p1, long d1, long p2, long d2) { return Interval{Rational(p1, d1), Rational(p2, d2)}; };
  s.root.set(Var::kBeta, iv(1, 2, 2, 3));
  // The upper ends of x, y, z (and the lower end of zeta) follow from
  // x + y + z < 1 and the lower bounds of the other variables.
  if (id == "B1" || id == "B1-relaxed") {
    const bool relaxed = id == "B1-relaxed";
    s.root.set(Var::kX, relaxed ? iv(1, 3, 1, 1) : iv(1, 3, 1, 2));
    s.root.set(Var::kY, relaxed ? iv(0, 1, 2, 3) : iv(1, 2, 2, 3));
    s.root.set(Var::kZ, relaxed ? iv(0, 1, 2, 3) : iv(0, 1, 1, 6));
    weak = {{"x >= 1/3", X() - q(1, 3)},
            {relaxed ? "y >= 0" : "y >= 1/2", relaxed ? Y() : Y() - q(1, 2)},
            {"z >= beta - 1/2", Z() - Beta() + q(1, 2)},
            {"1/2 <= beta <= 2/3", (Beta() - q(1, 2)) * (q(2, 3) - Beta())},
            {"(1-gamma)(z-beta+1/2) >= (1/2-z)(beta-x)",
             (1 - gamma) * (Z() - Beta() + q(1, 2)) - (q(1, 2) - Z()) * (Beta() - X())}};
  } else if (id == "B2") {
    s.root.set(Var::kX, iv(1, 3, 7, 12));
    s.root.set(Var::kY, iv(5, 12, 2, 3));
    s.root.set(Var::kZ, iv(0, 1, 1, 4));
    weak = {{"x >= 1/3", X() - q(1, 3)},
            {"y >= 5/12", Y() - q(5, 12)},
            {"z >= beta - 1/2", Z() - Beta() + q(1, 2)},
            {"1/2 <= beta <= 2/3", (Beta() - q(1, 2)) * (q(2, 3) - Beta())},
            {"(1-gamma)(1-z) >= (1-x)(beta-z)", (1 - gamma) * (1 - Z()) - (1 - X()) * (Beta() - Z())}};
  } else if (id == "B3") {
    s.root.set(Var::kX, iv(1, 3, 2, 3));
    s.root.set(Var::kY, iv(1, 3, 2, 3));
    s.root.set(Var::kZ, iv(0, 1, 1, 3));
    weak = {{"x >= 1/3", X() - q(1, 3)},
            {"y >= 1/3", Y() - q(1, 3)},
            {"z >= beta - 1/2", Z() - Beta() + q(1, 2)},
            {"1/2 <= beta <= 2/3", (Beta() - q(1, 2)) * (q(2, 3) - Beta())},
            {"(1-gamma)(z-beta+1/2) >= (beta-z)(1/2-y)",
             (1 - gamma) * (Z() - Beta() + q(1, 2)) - (Beta() - Z()) * (q(1, 2) - Y())},
            {"(1-gamma)(z-beta+1/2) >= (beta-x)(1/2-z)",
             (1 - gamma) * (Z() - Beta() + q(1, 2)) - (Beta() - X()) * (q(1, 2) - Z())},
            {"(1-gamma)(1-z) >= (1-x)(beta-z)", (1 - gamma) * (1 - Z()) - (1 - X()) * (Beta() - Z())}};
  } else if (id == "B4") {
    s.root.set(Var::kX, iv(1, 3, 5, 6));
    s.root.set(Var::kY, iv(1, 6, 1, 3));
    s.root.set(Var::kZ, iv(0, 1, 1, 2));
    weak = {{"x >= 1/3", X() - q(1, 3)},
            {"y <= 1/3", q(1, 3) - Y()},
            {"y >= gamma - 1/2", Y() - gamma + q(1, 2)},
            {"z >= beta - 1/2", Z() - Beta() + q(1, 2)},
            {"1/2 <= beta <= 2/3", (Beta() - q(1, 2)) * (q(2, 3) - Beta())},
            {"(1-beta)(y-gamma+1/2) >= (gamma-y)(1/2-z)",
             (1 - Beta()) * (Y() - gamma + q(1, 2)) - (gamma - Y()) * (q(1, 2) - Z())}};
  } else if (id == "B5") {
    s.root.set(Var::kX, iv(1, 3, 7, 12));
    s.root.set(Var::kY, iv(1, 6, 1, 3));
    s.root.set(Var::kZ, iv(1, 4, 1, 2));
    s.root.set(Var::kZeta, iv(1, 6, 1, 1));
    s.capped = Var::kZeta;
    weak = {{"x >= 1/3", X() - q(1, 3)},
            {"y <= 1/3", q(1, 3) - Y()},
            {"y >= gamma - 1/2", Y() - gamma + q(1, 2)},
            {"z >= beta - 1/4", Z() - Beta() + q(1, 4)},
            {"zeta >= 1/2 - y", Zeta() - q(1, 2) + Y()},
            {"1/2 <= beta <= 2/3", (Beta() - q(1, 2)) * (q(2, 3) - Beta())},
            {"(1-y-2zeta)(beta-x) <= 2(1-beta)(1-gamma-zeta)",
             2 * (1 - Beta()) * (1 - gamma - Zeta()) - (1 - Y() - 2 * Zeta()) * (Beta() - X())}};
  } else {
    throw PreconditionError("unknown lemma id '" + id + "' (expected B1..B5 or B1-relaxed)");
  }
  const Expr strict = 1 - X() - Y() - Z() - Expr(margin);
  s.constraints.push_back({"x + y + z < 1", strict, strict.expand(), true});
  for (auto& [name, e] : weak) s.constraints.push_back({name, e, e.expand(), false});
  return s;
}

bool satisfies(const LemmaSystem& s, const Point& p) {
  return std::all_of(s.constraints.begin(), s.constraints.end(),
                     [&](const Constraint& c) { return c.poly.evaluate(p) >= 0; });
}

namespace {

Point center(const Box& b) {
  Point p{};
  for (Var v : b.vars()) p[idx(v)] = (b.at(v).lo + b.at(v).hi) / 2;
  return p;
}

// Simplest rational within 1e-4 relative tolerance, via continued fractions.
Rational simple_rational(double x) {
  const long max_den = 10000;
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int i = 0; i < 40; ++i) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= 1e-4 * std::abs(x)) break;
    if (r - a < 1e-12) break;
    r = 1 / (r - a);
  }
  if (k1 == 0) return 0;
  return Rational(h1, k1);
}

std::vector<Rational> candidate_lambdas(const std::vector<double>& gi, const std::vector<double>& gj) {
  std::vector<double> raw;
  double dot = 0, norm = 0;
  for (std::size_t v = 0; v < gi.size(); ++v) {
    dot += gi[v] * gj[v];
    norm += gj[v] * gj[v];
  }
  if (norm > 0) raw.push_back(-dot / norm);
  for (std::size_t v = 0; v < gi.size(); ++v) {
    if (gj[v] != 0) raw.push_back(-gi[v] / gj[v]);
  }
  std::vector<Rational> out;
  for (double l : raw) {
    if (!(l > 0) || !std::isfinite(l)) continue;
    Rational q = simple_rational(l);
    if (q <= 0) continue;
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

Rational combined_upper(const LemmaSystem& s, const Leaf& leaf, const Box& b) {
  const Constraint& ci = s.constraints.at(leaf.constraint);
  if (leaf.partner < 0) return enclose(ci, b).hi;
  const Constraint& cj = s.constraints.at(leaf.partner);
  return enclose(ci.expr + Expr(leaf.lambda) * cj.expr, ci.poly + Polynomial(leaf.lambda) * cj.poly, b).hi;
}

std::optional<std::vector<TailCheck>> tail_checks(const LemmaSystem& s) {
  std::vector<TailCheck> out;
  if (!s.capped) return out;
  const Var v = *s.capped;
  const Rational cap = s.root.at(v).hi;
  Box at_cap = s.root;
  at_cap.set(v, {cap, cap});
  for (std::size_t i = 0; i < s.constraints.size(); ++i) {
    const Constraint& c = s.constraints[i];
    if (!c.poly.uses(v)) continue;
    if (c.poly.degree(v) == 1) {
      const Rational d = interval_eval(c.poly.derivative(v), s.root).hi;
      if (d <= 0) {
        out.push_back({static_cast<int>(i), "nonincreasing", d});
        continue;
      }
    }
    const Rational lo = enclose(c, at_cap).lo;
    if (lo < 0) return std::nullopt;
    out.push_back({static_cast<int>(i), "holds-at-cap", lo});
  }
  return out;
}

bool corner_less(const Leaf& a, const Leaf& b) {
  for (Var v : kAllVars) {
    if (!a.box.has(v)) continue;
    if (a.box.at(v).lo != b.box.at(v).lo) return a.box.at(v).lo < b.box.at(v).lo;
  }
  return a.depth < b.depth;
}

}  // namespace

CertifyResult certify_infeasible(const LemmaSystem& s, int max_depth) {
  const auto start = std::chrono::steady_clock::now();
  CertifyResult out;
  Certificate cert{s.id, s.margin, s.root, {}, 0, s.capped, {}};
  const auto tail = tail_checks(s);
  if (!tail) throw InvariantViolation("no monotone argument covers the capped variable");
  cert.tail = *tail;

  const std::size_t nc = s.constraints.size();
  std::vector<std::vector<Polynomial>> grads(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    for (Var v : s.root.vars()) grads[i].push_back(s.constraints[i].poly.derivative(v));
  }

  // Breadth first, so a feasible centre at a shallow level is seen before
  // the depth limit is hit elsewhere.
  std::deque<std::pair<Box, int>> queue{{s.root, 0}};
  auto finish = [&] {
    out.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  while (!queue.empty()) {
    auto [box, depth] = std::move(queue.front());
    queue.pop_front();
    ++out.boxes;
    cert.max_depth = std::max(cert.max_depth, depth);

    std::vector<Interval> single;
    std::optional<Leaf> leaf;
    for (std::size_t i = 0; i < nc && !leaf; ++i) {
      single.push_back(enclose(s.constraints[i], box));
      if (single.back().hi < 0) leaf = Leaf{box, depth, static_cast<int>(i), -1, 0, single.back().hi};
    }
    if (!leaf) {
      // Non-negative combinations g_i + lambda g_j, lambda read off the
      // gradients at the centre.
      const Point c = center(box);
      std::vector<std::vector<double>> g(nc);
      for (std::size_t i = 0; i < nc; ++i) {
        for (const Polynomial& d : grads[i]) g[i].push_back(d.evaluate(c).get_d());
      }
      for (std::size_t i = 0; i < nc && !leaf; ++i) {
        for (std::size_t j = 0; j < nc && !leaf; ++j) {
          if (i == j || single[j].lo >= 0) continue;
          for (const Rational& lambda : candidate_lambdas(g[i], g[j])) {
            Leaf cand{box, depth, static_cast<int>(i), static_cast<int>(j), lambda, 0};
            cand.upper = combined_upper(s, cand, box);
            if (cand.upper < 0) {
              leaf = std::move(cand);
              break;
            }
          }
        }
      }
    }
    if (leaf) {
      cert.leaves.push_back(std::move(*leaf));
      continue;
    }
    const Point c = center(box);
    if (satisfies(s, c)) {
      out.feasible_point = c;
      finish();
      return out;
    }
    if (depth >= max_depth) {
      if (!out.undecided) out.undecided = box;
      continue;
    }
    auto [lo, hi] = box.bisect(box.widest());
    queue.emplace_back(std::move(lo), depth + 1);
    queue.emplace_back(std::move(hi), depth + 1);
  }
  if (out.undecided) {
    finish();
    return out;
  }
  std::sort(cert.leaves.begin(), cert.leaves.end(), corner_less);
  out.certified = true;
  out.certificate = std::move(cert);
  finish();
  return out;
}

CertifyResult certify_infeasible(const std::string& id, int max_depth, const Rational& margin) {
  return certify_infeasible(lemma_system(id, margin), max_depth);
}

bool verify_certificate(const Certificate& c, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  LemmaSystem s;
  try {
    s = lemma_system(c.lemma, c.margin);
  } catch (const Error& e) {
    return fail(e.what());
  }
  if (!s.root.contains(c.root) || !c.root.contains(s.root)) return fail("root box differs from the system's");
  if (c.capped != s.capped) return fail("capped variable differs from the system's");
  const auto tail = tail_checks(s);
  if (!tail) return fail("tail argument fails");
  if (tail->size() != c.tail.size()) return fail("tail checks differ");
  for (std::size_t i = 0; i < tail->size(); ++i) {
    const TailCheck& a = (*tail)[i];
    const TailCheck& b = c.tail[i];
    if (a.constraint != b.constraint || a.kind != b.kind || a.bound != b.bound) {
      return fail(fmt::format("tail check {} does not reproduce", i));
    }
  }
  Rational volume = 0;
  for (std::size_t i = 0; i < c.leaves.size(); ++i) {
    const Leaf& leaf = c.leaves[i];
    if (!s.root.contains(leaf.box)) return fail(fmt::format("leaf {} leaves the root box", i));
    const int nc = static_cast<int>(s.constraints.size());
    if (leaf.constraint < 0 || leaf.constraint >= nc || leaf.partner >= nc || leaf.partner == leaf.constraint ||
        (leaf.partner >= 0 && leaf.lambda <= 0)) {
      return fail(fmt::format("leaf {} names an invalid constraint combination", i));
    }
    const Rational upper = combined_upper(s, leaf, leaf.box);
    if (upper != leaf.upper) return fail(fmt::format("leaf {} bound does not reproduce", i));
    if (upper >= 0) return fail(fmt::format("leaf {} bound is not negative", i));
    volume += leaf.box.volume();
  }
  if (volume != s.root.volume()) return fail("leaf volumes do not add up to the root volume");
  const auto vars = s.root.vars();
  for (std::size_t i = 0; i < c.leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < c.leaves.size(); ++j) {
      const Box& a = c.leaves[i].box;
      const Box& b = c.leaves[j].box;
      const bool apart = std::any_of(vars.begin(), vars.end(), [&](Var v) {
        return a.at(v).hi <= b.at(v).lo || b.at(v).hi <= a.at(v).lo;
      });
      if (!apart) return fail(fmt::format("leaves {} and {} overlap", i, j));
    }
  }
  return true;
}

nlohmann::json box_to_json(const Box& b) {
  nlohmann::json out = nlohmann::json::object();
  for (Var v : b.vars()) out[to_string(v)] = {to_string(b.at(v).lo), to_string(b.at(v).hi)};
  return out;
}

nlohmann::json point_to_json(const Point& p, const Box& shape) {
  nlohmann::json out = nlohmann::json::object();
  for (Var v : shape.vars()) out[to_string(v)] = to_string(p[idx(v)]);
  return out;
}

namespace {

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("box must be an object");
  Box b;
  for (const auto& [name, range] : j.items()) {
    if (!range.is_array() || range.size() != 2) throw FormatError("box range must be [lo, hi]");
    Interval i{rational_from_string(range[0].get<std::string>()), rational_from_string(range[1].get<std::string>())};
    if (i.lo > i.hi) throw FormatError("box range has lo > hi");
    b.set(var_from_string(name), i);
  }
  return b;
}

}  // namespace

nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json leaves = nlohmann::json::array();
  for (const Leaf& l : c.leaves) {
    nlohmann::json jl{{"box", box_to_json(l.box)}, {"depth", l.depth}, {"constraint", l.constraint},
                      {"upper", to_string(l.upper)}};
    if (l.partner >= 0) {
      jl["partner"] = l.partner;
      jl["lambda"] = to_string(l.lambda);
    }
    leaves.push_back(std::move(jl));
  }
  nlohmann::json tail = nlohmann::json::array();
  for (const TailCheck& t : c.tail) {
    tail.push_back({{"constraint", t.constraint}, {"kind", t.kind}, {"bound", to_string(t.bound)}});
  }
  return {{"format", "ckblowup/1"},
          {"kind", "certificate"},
          {"lemma", c.lemma},
          {"margin", to_string(c.margin)},
          {"root", box_to_json(c.root)},
          {"max_depth", c.max_depth},
          {"leaf_count", c.leaves.size()},
          {"capped", c.capped ? nlohmann::json(to_string(*c.capped)) : nlohmann::json(nullptr)},
          {"tail", tail},
          {"leaves", leaves}};
}

Certificate certificate_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "ckblowup/1" || j.at("kind") != "certificate") throw FormatError("not a certificate");
    Certificate c;
    c.lemma = j.at("lemma").get<std::string>();
    c.margin = rational_from_string(j.at("margin").get<std::string>());
    c.root = box_from_json(j.at("root"));
    c.max_depth = j.at("max_depth").get<int>();
    if (!j.at("capped").is_null()) c.capped = var_from_string(j.at("capped").get<std::string>());
    for (const auto& t : j.at("tail")) {
      c.tail.push_back({t.at("constraint").get<int>(), t.at("kind").get<std::string>(),
                        rational_from_string(t.at("bound").get<std::string>())});
    }
    for (const auto& jl : j.at("leaves")) {
      Leaf l;
      l.box = box_from_json(jl.at("box"));
      l.depth = jl.at("depth").get<int>();
      l.constraint = jl.at("constraint").get<int>();
      l.upper = rational_from_string(jl.at("upper").get<std::string>());
      if (jl.contains("partner")) {
        l.partner = jl.at("partner").get<int>();
        l.lambda = rational_from_string(jl.at("lambda").get<std::string>());
      }
      c.leaves.push_back(std::move(l));
    }
    if (j.at("leaf_count").get<std::size_t>() != c.leaves.size()) throw FormatError("leaf_count mismatch");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed certificate: ") + e.what());
  }
}

GridResult grid_scan(const LemmaSystem& s, int resolution) {
  if (resolution < 2) throw PreconditionError("grid resolution must be at least 2");
  const auto vars = s.root.vars();
  const std::size_t nv = vars.size();
  std::vector<Rational> step(nv);
  for (std::size_t a = 0; a < nv; ++a) {
    const Interval& r = s.root.at(vars[a]);
    step[a] = (r.hi - r.lo) / resolution;
  }
  auto coord = [&](std::size_t a, int i) -> Rational { return s.root.at(vars[a]).lo + step[a] * i; };

  GridResult out;
  std::optional<Rational> best;
  std::vector<std::pair<int, int>> range(nv, {0, resolution});
  std::function<void()> go = [&] {
    ++out.nodes;
    Box b = s.root;
    bool single = true;
    for (std::size_t a = 0; a < nv; ++a) {
      b.set(vars[a], {coord(a, range[a].first), coord(a, range[a].second)});
      single = single && range[a].first == range[a].second;
    }
    if (single) {
      Point p{};
      for (std::size_t a = 0; a < nv; ++a) p[idx(vars[a])] = coord(a, range[a].first);
      Rational viol = 0;
      for (const Constraint& c : s.constraints) viol = rmax(viol, -c.poly.evaluate(p));
      if (!best || viol < *best) {
        best = viol;
        out.point = p;
        out.violation = viol;
      }
      return;
    }
    Rational lower = 0;
    for (const Constraint& c : s.constraints) lower = rmax(lower, -enclose(c, b).hi);
    if (best && lower >= *best) return;
    std::size_t split = 0;
    for (std::size_t a = 1; a < nv; ++a) {
      const int wa = range[a].second - range[a].first;
      const int ws = range[split].second - range[split].first;
      if (wa * step[a] > ws * step[split]) split = a;
    }
    const auto saved = range[split];
    const int mid = (saved.first + saved.second) / 2;
    range[split] = {saved.first, mid};
    go();
    if (best && *best == 0) {
      range[split] = saved;
      return;
    }
    range[split] = {mid + 1, saved.second};
    go();
    range[split] = saved;
  };
  go();
  return out;
}

}  // namespace ckb
