#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace declmon {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed formula, trace, or alphabet text. `position` is a byte offset
/// (or a 1-based line number for line-oriented files).
class ParseError : public Error {
public:
  ParseError(const std::string &msg, std::size_t position)
      : Error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

enum class Op { True, Atom, Not, And, Or, Next, Finally, Globally, Until };

/// Immutable LTL formula. Copies share structure. And/Or are n-ary and kept
/// flattened: no And has a direct And child (same for Or).
class Formula {
public:
  /// The constant `true`.
  Formula();

  static Formula top();
  static Formula bottom(); // !true
  static Formula atom(std::string name);
  static Formula negate(Formula f);
  /// Flattens nested conjunctions. Zero children gives `true`, one child
  /// gives the child itself.
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula next(Formula f);
  static Formula finally(Formula f);
  static Formula globally(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  static Formula implies(Formula lhs, Formula rhs);

  Op op() const noexcept;
  const std::string &name() const; // Atom only
  const std::vector<Formula> &children() const noexcept;
  const Formula &child(std::size_t i = 0) const { return children().at(i); }

  bool is_true() const noexcept { return op() == Op::True; }
  bool is_false() const noexcept;
  bool is_atom() const noexcept { return op() == Op::Atom; }
  /// Atom or negated atom.
  bool is_literal() const noexcept;
  bool is_temporal_op() const noexcept;
  /// No temporal operator anywhere below (and including) this node.
  bool is_temporal_free() const noexcept;

  std::size_t hash() const noexcept;
  /// Number of AST nodes.
  std::size_t node_count() const noexcept;
  /// Printed symbols: atoms, constants, unary operators, and one binary
  /// operator per adjacent pair of n-ary operands.
  std::size_t symbol_count() const noexcept;

  friend bool operator==(const Formula &a, const Formula &b) noexcept;
  friend std::strong_ordering operator<=>(const Formula &a,
                                          const Formula &b) noexcept;

  std::string to_string() const;

private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Op op, std::string name, std::vector<Formula> kids);
  static Formula make_nary(Op op, std::vector<Formula> kids);

  std::shared_ptr<const Node> node_;
};

std::ostream &operator<<(std::ostream &os, const Formula &f);

struct FormulaHash {
  std::size_t operator()(const Formula &f) const noexcept { return f.hash(); }
};

/// Parses the ASCII grammar:
///   true | false | ident | !f | f & f | f | f | f -> f | X f | F f | G f
///   | f U f | (f)
/// Precedence: unary > U > & > | > ->. U and -> associate to the right.
Formula parse(std::string_view text);

enum class LogicalOp { And, Or, Not };
enum class TemporalOp { Next, Finally, Globally, Until };

std::set<std::string> atoms(const Formula &f);
/// Atoms in order of first occurrence (left to right).
std::vector<std::string> atoms_ordered(const Formula &f);
std::set<LogicalOp> lop(const Formula &f);
std::set<TemporalOp> top(const Formula &f);

/// Negation normal form: negations only on atoms and on `true`.
/// !(a U b) becomes (!b U (!a & !b)) | G !b.
Formula nnf(const Formula &f);

/// Count of temporal-operator occurrences.
std::size_t size(const Formula &f);

/// Constant folding and flattening: true/false absorption, duplicate
/// operands, complementary literal pairs, double negation, and constant
/// arguments of temporal operators. Applied bottom-up, which reaches the
/// fixpoint of the rule set in one pass.
Formula simplify(const Formula &f);

} // namespace declmon

template <> struct std::hash<declmon::Formula> {
  std::size_t operator()(const declmon::Formula &f) const noexcept {
    return f.hash();
  }
};
