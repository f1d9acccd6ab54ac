#ifndef NMODAL_FORMULA_HPP
#define NMODAL_FORMULA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmodal {

// Modal formula constructors. Iff is surface sugar only and never appears
// in an AST.
enum class Conn : std::uint8_t { Bottom, Top, Var, Not, And, Or, Imp, Box };

class Formula;

/// Canonical code of a formula: its Polish-notation serialization read as a
/// numeral whose digits are the symbol codes of symbol_table.md (see README).
/// We store the digit string itself; comparisons are numeric (shorter digit
/// strings denote smaller numbers, equal lengths compare lexicographically).
struct GNumber {
  std::string digits;

  bool operator==(const GNumber& o) const { return digits == o.digits; }
  bool operator!=(const GNumber& o) const { return digits != o.digits; }
  bool operator<(const GNumber& o) const {
    if (digits.size() != o.digits.size()) return digits.size() < o.digits.size();
    return digits < o.digits;
  }
  bool operator<=(const GNumber& o) const { return *this == o || *this < o; }
  bool operator>(const GNumber& o) const { return o < *this; }

  /// Decimal rendering of the numeral (base = number of symbol codes + 1).
  std::string toDecimal() const;
};

class Formula {
 public:
  Formula() = delete;

  static Formula bottom();
  static Formula top();
  static Formula var(const std::string& name);
  static Formula lnot(Formula a);
  static Formula land(Formula a, Formula b);
  static Formula lor(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula box(Formula a);

  Conn conn() const { return node_->conn; }
  const std::string& name() const { return node_->name; }
  Formula left() const;
  Formula right() const;
  Formula child() const { return left(); }

  bool isVar() const { return conn() == Conn::Var; }
  bool isNot() const { return conn() == Conn::Not; }
  bool isBox() const { return conn() == Conn::Box; }
  bool isBinary() const {
    return conn() == Conn::And || conn() == Conn::Or || conn() == Conn::Imp;
  }
  // Variables and boxed formulas are the propositionally atomic ones.
  bool isPropAtomic() const { return isVar() || isBox(); }

  std::size_t size() const { return node_->size; }  // AST node count

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

  /// Surface-syntax rendering; parse(text()) == *this.
  std::string text() const;

  /// Polish-notation digit string; injective, one byte per symbol.
  const std::string& ser() const { return node_->ser; }

 private:
  struct Node {
    Conn conn;
    std::string name;               // Var only
    std::shared_ptr<const Node> a;  // first child
    std::shared_ptr<const Node> b;  // second child (binary only)
    std::string ser;
    std::size_t size;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)),
        position(pos) {}
};

/// Parses the surface grammar (~ ! [] box, & | -> <->, true false, idents).
Formula parse(const std::string& text);

/// Round-trips with parse; decodes a Polish digit string back to a formula.
Formula deserialize(const std::string& ser);

/// gn is injective and strictly larger than the gn of any proper subformula.
GNumber gn(const Formula& a);

/// Orders formulas by their canonical code.
struct GnLess {
  bool operator()(const Formula& a, const Formula& b) const {
    const std::string& x = a.ser();
    const std::string& y = b.ser();
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  }
};

using FormulaSet = std::set<Formula, GnLess>;

/// ~A: strips one negation if possible, otherwise negates.
Formula negCompanion(const Formula& a);

/// k nested negations in front of a.
Formula iteratedNeg(std::size_t k, const Formula& a);

/// Star normal form: with a = ¬^n ψ (ψ not a negation), ψ for even n and
/// ¬ψ for odd n.
Formula starNormal(const Formula& a);

/// Number of leading negations.
std::size_t negDepth(const Formula& a);

/// Bijection between propositionally atomic formulas and propositional atoms.
class PropAtomMap {
 public:
  int atomOf(const Formula& a);                 // inserts on first use
  int lookup(const Formula& a) const;           // -1 when unmapped
  const Formula& formulaOf(int id) const { return atoms_.at(id); }
  std::size_t count() const { return atoms_.size(); }

 private:
  std::map<std::string, int> index_;
  std::vector<Formula> atoms_;
};

/// Homomorphic propositional translation; Box subformulas become opaque
/// atoms named a<k>. Throws std::out_of_range on an unmapped atom.
Formula translateI(const Formula& a, const PropAtomMap& m);

/// Tautological consequence: the translated implication
/// (/\ premises) -> goal is a propositional tautology over the atoms of
/// premises and goal only.
bool tcEntails(const std::vector<Formula>& premises, const Formula& goal);

/// Enumerates every formula whose serialization length is exactly `len`,
/// with variables drawn from `vars`; result is sorted in gn order.
std::vector<Formula> formulasOfSerLength(std::size_t len,
                                         const std::vector<std::string>& vars);

/// First `count` formulas over `vars` in ascending gn order.
std::vector<Formula> enumerateFormulas(std::size_t count,
                                       const std::vector<std::string>& vars);

// Symbol codes shared by the modal and sandbox serializations. Identifier
// characters occupy the range [IdentBase, IdentBase + 63).
namespace sym {
constexpr char Bottom = 1;
constexpr char Top = 2;
constexpr char Not = 3;
constexpr char And = 4;
constexpr char Or = 5;
constexpr char Imp = 6;
constexpr char Box = 7;
constexpr char PrR = 8;
constexpr char PrA = 9;
constexpr char PrDagger = 10;
constexpr char FAtom = 11;
constexpr char Lambda = 12;
constexpr char AlphaAll = 13;
constexpr char AlphaInst = 14;
constexpr char BetaAll = 15;
constexpr char BetaInst = 16;
constexpr char End = 17;  // terminates identifiers and numerals
constexpr char IdentBase = 18;

int identIndex(char c);     // -1 when c is not an identifier character
char identChar(int index);  // inverse of identIndex
std::string encodeIdent(const std::string& name);
std::string encodeNumber(unsigned long n);
}  // namespace sym

}  // namespace nmodal

#endif
