#include "declmon/formula.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace declmon {

struct Formula::Node {
  Op op;
  std::string name;
  std::vector<Formula> kids;
  std::size_t hash;
  std::size_t nodes;
  std::size_t symbols;
  bool temporal_free;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// FNV-1a, so hashes do not depend on the standard library.
std::size_t hash_name(const std::string &s) {
  std::size_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

Formula Formula::make(Op op, std::string name, std::vector<Formula> kids) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->hash = mix(static_cast<std::size_t>(op) * 31 + 7, hash_name(name));
  n->nodes = 1;
  n->temporal_free = !(op == Op::Next || op == Op::Finally ||
                       op == Op::Globally || op == Op::Until);
  std::size_t kid_symbols = 0;
  for (const auto &k : kids) {
    n->hash = mix(n->hash, k.hash());
    n->nodes += k.node_count();
    kid_symbols += k.symbol_count();
    n->temporal_free = n->temporal_free && k.is_temporal_free();
  }
  switch (op) {
  case Op::True:
  case Op::Atom:
    n->symbols = 1;
    break;
  case Op::And:
  case Op::Or:
    n->symbols = kid_symbols + kids.size() - 1;
    break;
  default:
    n->symbols = kid_symbols + 1;
  }
  n->name = std::move(name);
  n->kids = std::move(kids);
  return Formula(std::move(n));
}

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const Formula t = make(Op::True, "", {});
  return t;
}

Formula Formula::bottom() {
  static const Formula f = make(Op::Not, "", {top()});
  return f;
}

Formula Formula::atom(std::string name) {
  if (name.empty())
    throw Error("atom name must be nonempty");
  return make(Op::Atom, std::move(name), {});
}

Formula Formula::negate(Formula f) { return make(Op::Not, "", {std::move(f)}); }

Formula Formula::make_nary(Op op, std::vector<Formula> kids) {
  std::vector<Formula> flat;
  flat.reserve(kids.size());
  for (auto &k : kids) {
    if (k.op() == op)
      flat.insert(flat.end(), k.children().begin(), k.children().end());
    else
      flat.push_back(std::move(k));
  }
  if (flat.empty())
    return op == Op::And ? top() : bottom();
  if (flat.size() == 1)
    return flat.front();
  return make(op, "", std::move(flat));
}

Formula Formula::conj(std::vector<Formula> children) {
  return make_nary(Op::And, std::move(children));
}
Formula Formula::disj(std::vector<Formula> children) {
  return make_nary(Op::Or, std::move(children));
}
Formula Formula::next(Formula f) { return make(Op::Next, "", {std::move(f)}); }
Formula Formula::finally(Formula f) {
  return make(Op::Finally, "", {std::move(f)});
}
Formula Formula::globally(Formula f) {
  return make(Op::Globally, "", {std::move(f)});
}
Formula Formula::until(Formula lhs, Formula rhs) {
  return make(Op::Until, "", {std::move(lhs), std::move(rhs)});
}
Formula Formula::implies(Formula lhs, Formula rhs) {
  return disj({negate(std::move(lhs)), std::move(rhs)});
}

Op Formula::op() const noexcept { return node_->op; }
const std::string &Formula::name() const { return node_->name; }
const std::vector<Formula> &Formula::children() const noexcept {
  return node_->kids;
}
bool Formula::is_false() const noexcept {
  return op() == Op::Not && node_->kids[0].is_true();
}
bool Formula::is_literal() const noexcept {
  return op() == Op::Atom || (op() == Op::Not && node_->kids[0].is_atom());
}
bool Formula::is_temporal_op() const noexcept {
  return op() == Op::Next || op() == Op::Finally || op() == Op::Globally ||
         op() == Op::Until;
}
bool Formula::is_temporal_free() const noexcept {
  return node_->temporal_free;
}
std::size_t Formula::hash() const noexcept { return node_->hash; }
std::size_t Formula::node_count() const noexcept { return node_->nodes; }
std::size_t Formula::symbol_count() const noexcept { return node_->symbols; }

bool operator==(const Formula &a, const Formula &b) noexcept {
  if (a.node_ == b.node_)
    return true;
  if (a.hash() != b.hash() || a.op() != b.op() || a.name() != b.name())
    return false;
  return a.children() == b.children();
}

std::strong_ordering operator<=>(const Formula &a, const Formula &b) noexcept {
  if (a.node_ == b.node_)
    return std::strong_ordering::equal;
  if (auto c = a.op() <=> b.op(); c != 0)
    return c;
  if (auto c = a.name().compare(b.name()); c != 0)
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  const auto &ka = a.children();
  const auto &kb = b.children();
  for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
    if (auto c = ka[i] <=> kb[i]; c != 0)
      return c;
  return ka.size() <=> kb.size();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Formula &f) {
  switch (f.op()) {
  case Op::Or:
    return 1;
  case Op::And:
    return 2;
  case Op::Until:
    return 3;
  default:
    return 4;
  }
}

void print(std::ostream &os, const Formula &f);

void print_operand(std::ostream &os, const Formula &f, int min_prec) {
  if (precedence(f) < min_prec) {
    os << '(';
    print(os, f);
    os << ')';
  } else {
    print(os, f);
  }
}

void print_unary(std::ostream &os, const char *op, const Formula &arg) {
  os << op;
  if (precedence(arg) < 4) {
    os << '(';
    print(os, arg);
    os << ')';
  } else {
    if (*op != '!')
      os << ' ';
    print(os, arg);
  }
}

void print(std::ostream &os, const Formula &f) {
  switch (f.op()) {
  case Op::True:
    os << "true";
    return;
  case Op::Atom:
    os << f.name();
    return;
  case Op::Not:
    if (f.child().is_true()) {
      os << "false";
      return;
    }
    print_unary(os, "!", f.child());
    return;
  case Op::Next:
    print_unary(os, "X", f.child());
    return;
  case Op::Finally:
    print_unary(os, "F", f.child());
    return;
  case Op::Globally:
    print_unary(os, "G", f.child());
    return;
  case Op::Until:
    // right-associative: parenthesize a left Until
    print_operand(os, f.child(0), 4);
    os << " U ";
    print_operand(os, f.child(1), 3);
    return;
  case Op::And:
  case Op::Or: {
    const char *sep = f.op() == Op::And ? " & " : " | ";
    int p = precedence(f);
    bool first = true;
    for (const auto &k : f.children()) {
      if (!first)
        os << sep;
      first = false;
      // a nested same-op child cannot exist, so strict > is enough
      print_operand(os, k, p + 1);
    }
    return;
  }
  }
}

} // namespace

std::string Formula::to_string() const {
  std::ostringstream os;
  print(os, *this);
  return os.str();
}

std::ostream &operator<<(std::ostream &os, const Formula &f) {
  print(os, f);
  return os;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = implication();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input");
    return f;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  // Peeks an identifier-shaped word without consuming it.
  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    if (end < text_.size() &&
        std::isalpha(static_cast<unsigned char>(text_[end]))) {
      ++end;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_'))
        ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept("->"))
      return Formula::implies(lhs, implication());
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> parts{conjunction()};
    while (accept("|"))
      parts.push_back(conjunction());
    return Formula::disj(std::move(parts));
  }

  Formula conjunction() {
    std::vector<Formula> parts{until()};
    while (accept("&"))
      parts.push_back(until());
    return Formula::conj(std::move(parts));
  }

  Formula until() {
    Formula lhs = unary();
    if (peek_word() == "U") {
      pos_ += 1;
      return Formula::until(lhs, until());
    }
    return lhs;
  }

  Formula unary() {
    skip_ws();
    if (accept("!"))
      return Formula::negate(unary());
    if (accept("(")) {
      Formula f = implication();
      if (!accept(")"))
        fail("expected ')'");
      return f;
    }
    std::string_view w = peek_word();
    if (w.empty()) {
      if (pos_ >= text_.size())
        fail("unexpected end of input");
      fail(std::string("unexpected character '") + text_[pos_] + "'");
    }
    pos_ += w.size();
    if (w == "X")
      return Formula::next(unary());
    if (w == "F")
      return Formula::finally(unary());
    if (w == "G")
      return Formula::globally(unary());
    if (w == "U") {
      pos_ -= w.size();
      fail("'U' needs a left operand");
    }
    if (w == "true")
      return Formula::top();
    if (w == "false")
      return Formula::bottom();
    return Formula::atom(std::string(w));
  }
};

} // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Queries

namespace {

void collect_atoms(const Formula &f, std::vector<std::string> &out,
                   std::unordered_set<std::string> &seen) {
  if (f.is_atom()) {
    if (seen.insert(f.name()).second)
      out.push_back(f.name());
    return;
  }
  for (const auto &k : f.children())
    collect_atoms(k, out, seen);
}

} // namespace

std::set<std::string> atoms(const Formula &f) {
  auto v = atoms_ordered(f);
  return {v.begin(), v.end()};
}

std::vector<std::string> atoms_ordered(const Formula &f) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_atoms(f, out, seen);
  return out;
}

std::set<LogicalOp> lop(const Formula &f) {
  std::set<LogicalOp> out;
  std::function<void(const Formula &)> walk = [&](const Formula &g) {
    switch (g.op()) {
    case Op::And:
      out.insert(LogicalOp::And);
      break;
    case Op::Or:
      out.insert(LogicalOp::Or);
      break;
    case Op::Not:
      out.insert(LogicalOp::Not);
      break;
    default:
      break;
    }
    for (const auto &k : g.children())
      walk(k);
  };
  walk(f);
  return out;
}

std::set<TemporalOp> top(const Formula &f) {
  std::set<TemporalOp> out;
  std::function<void(const Formula &)> walk = [&](const Formula &g) {
    switch (g.op()) {
    case Op::Next:
      out.insert(TemporalOp::Next);
      break;
    case Op::Finally:
      out.insert(TemporalOp::Finally);
      break;
    case Op::Globally:
      out.insert(TemporalOp::Globally);
      break;
    case Op::Until:
      out.insert(TemporalOp::Until);
      break;
    default:
      break;
    }
    for (const auto &k : g.children())
      walk(k);
  };
  walk(f);
  return out;
}

std::size_t size(const Formula &f) {
  std::size_t n = f.is_temporal_op() ? 1 : 0;
  for (const auto &k : f.children())
    n += size(k);
  return n;
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

Formula nnf_neg(const Formula &f);

Formula nnf_pos(const Formula &f) {
  switch (f.op()) {
  case Op::True:
  case Op::Atom:
    return f;
  case Op::Not:
    return nnf_neg(f.child());
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children())
      kids.push_back(nnf_pos(k));
    return f.op() == Op::And ? Formula::conj(std::move(kids))
                             : Formula::disj(std::move(kids));
  }
  case Op::Next:
    return Formula::next(nnf_pos(f.child()));
  case Op::Finally:
    return Formula::finally(nnf_pos(f.child()));
  case Op::Globally:
    return Formula::globally(nnf_pos(f.child()));
  case Op::Until:
    return Formula::until(nnf_pos(f.child(0)), nnf_pos(f.child(1)));
  }
  return f;
}

// nnf of !f
Formula nnf_neg(const Formula &f) {
  switch (f.op()) {
  case Op::True:
  case Op::Atom:
    return Formula::negate(f);
  case Op::Not:
    return nnf_pos(f.child());
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children())
      kids.push_back(nnf_neg(k));
    return f.op() == Op::And ? Formula::disj(std::move(kids))
                             : Formula::conj(std::move(kids));
  }
  case Op::Next:
    return Formula::next(nnf_neg(f.child()));
  case Op::Finally:
    return Formula::globally(nnf_neg(f.child()));
  case Op::Globally:
    return Formula::finally(nnf_neg(f.child()));
  case Op::Until: {
    // !(a U b) == (!b U (!a & !b)) | G !b
    Formula na = nnf_neg(f.child(0));
    Formula nb = nnf_neg(f.child(1));
    return Formula::disj({Formula::until(nb, Formula::conj({na, nb})),
                          Formula::globally(nb)});
  }
  }
  return f;
}

Formula fold_nary(Op op, std::vector<Formula> kids) {
  const bool is_and = op == Op::And;
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  for (auto &k : kids) {
    std::vector<Formula> parts;
    if (k.op() == op)
      parts = k.children();
    else
      parts.push_back(std::move(k));
    for (auto &p : parts) {
      if (is_and ? p.is_true() : p.is_false())
        continue; // neutral element
      if (is_and ? p.is_false() : p.is_true())
        return p; // absorbing element
      if (seen.insert(p).second)
        out.push_back(std::move(p));
    }
  }
  for (const auto &p : out)
    if (p.is_literal() && seen.count(p.op() == Op::Not
                                         ? p.child()
                                         : Formula::negate(p)))
      return is_and ? Formula::bottom() : Formula::top();
  return is_and ? Formula::conj(std::move(out)) : Formula::disj(std::move(out));
}

} // namespace

Formula nnf(const Formula &f) { return nnf_pos(f); }

Formula simplify(const Formula &f) {
  switch (f.op()) {
  case Op::True:
  case Op::Atom:
    return f;
  case Op::Not: {
    Formula k = simplify(f.child());
    if (k.op() == Op::Not)
      return k.child();
    return Formula::negate(k);
  }
  case Op::And:
  case Op::Or: {
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children())
      kids.push_back(simplify(k));
    return fold_nary(f.op(), std::move(kids));
  }
  case Op::Next:
  case Op::Finally:
  case Op::Globally: {
    Formula k = simplify(f.child());
    if (k.is_true() || k.is_false())
      return k;
    if (f.op() == Op::Next)
      return Formula::next(k);
    // FF a == F a, GG a == G a
    if (k.op() == f.op())
      return k;
    return f.op() == Op::Finally ? Formula::finally(k) : Formula::globally(k);
  }
  case Op::Until: {
    Formula a = simplify(f.child(0));
    Formula b = simplify(f.child(1));
    if (b.is_true() || b.is_false())
      return b;
    if (a.is_false())
      return b;
    if (a.is_true())
      return Formula::finally(b);
    return Formula::until(a, b);
  }
  }
  return f;
}

} // namespace declmon
