#include "nmodal/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>

namespace nmodal {

namespace sym {

namespace {
const std::string kIdentChars =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ_abcdefghijklmnopqrstuvwxyz";
}

int identIndex(char c) {
  auto p = kIdentChars.find(c);
  return p == std::string::npos ? -1 : static_cast<int>(p);
}

char identChar(int index) { return kIdentChars.at(index); }

std::string encodeIdent(const std::string& name) {
  std::string out;
  for (char c : name) {
    int i = identIndex(c);
    if (i < 0) throw std::invalid_argument("bad identifier character");
    out.push_back(static_cast<char>(IdentBase + i));
  }
  out.push_back(End);
  return out;
}

std::string encodeNumber(unsigned long n) {
  return encodeIdent(std::to_string(n));
}

}  // namespace sym

std::string GNumber::toDecimal() const {
  // base-81 digit string -> decimal, schoolbook.
  std::vector<std::uint32_t> acc{0};
  for (unsigned char d : digits) {
    std::uint64_t carry = d;
    for (auto& limb : acc) {
      std::uint64_t v = static_cast<std::uint64_t>(limb) * 81 + carry;
      limb = static_cast<std::uint32_t>(v % 1000000000u);
      carry = v / 1000000000u;
    }
    while (carry) {
      acc.push_back(static_cast<std::uint32_t>(carry % 1000000000u));
      carry /= 1000000000u;
    }
  }
  std::string out = std::to_string(acc.back());
  for (auto it = acc.rbegin() + 1; it != acc.rend(); ++it) {
    std::string limb = std::to_string(*it);
    out += std::string(9 - limb.size(), '0') + limb;
  }
  return out;
}

Formula Formula::bottom() {
  static const Formula f{std::make_shared<Node>(
      Node{Conn::Bottom, "", nullptr, nullptr, std::string(1, sym::Bottom), 1})};
  return f;
}

Formula Formula::top() {
  static const Formula f{std::make_shared<Node>(
      Node{Conn::Top, "", nullptr, nullptr, std::string(1, sym::Top), 1})};
  return f;
}

Formula Formula::var(const std::string& name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
    throw std::invalid_argument("variable names start with a letter");
  return Formula{std::make_shared<Node>(
      Node{Conn::Var, name, nullptr, nullptr, sym::encodeIdent(name), 1})};
}

Formula Formula::lnot(Formula a) {
  std::string s(1, sym::Not);
  s += a.ser();
  return Formula{std::make_shared<Node>(
      Node{Conn::Not, "", a.node_, nullptr, std::move(s), a.size() + 1})};
}

Formula Formula::box(Formula a) {
  std::string s(1, sym::Box);
  s += a.ser();
  return Formula{std::make_shared<Node>(
      Node{Conn::Box, "", a.node_, nullptr, std::move(s), a.size() + 1})};
}

static char binCode(Conn c) {
  switch (c) {
    case Conn::And: return sym::And;
    case Conn::Or: return sym::Or;
    default: return sym::Imp;
  }
}

Formula Formula::land(Formula a, Formula b) {
  std::string s(1, binCode(Conn::And));
  s += a.ser();
  s += b.ser();
  return Formula{std::make_shared<Node>(Node{Conn::And, "", a.node_, b.node_,
                                             std::move(s),
                                             a.size() + b.size() + 1})};
}

Formula Formula::lor(Formula a, Formula b) {
  std::string s(1, binCode(Conn::Or));
  s += a.ser();
  s += b.ser();
  return Formula{std::make_shared<Node>(Node{Conn::Or, "", a.node_, b.node_,
                                             std::move(s),
                                             a.size() + b.size() + 1})};
}

Formula Formula::imp(Formula a, Formula b) {
  std::string s(1, binCode(Conn::Imp));
  s += a.ser();
  s += b.ser();
  return Formula{std::make_shared<Node>(Node{Conn::Imp, "", a.node_, b.node_,
                                             std::move(s),
                                             a.size() + b.size() + 1})};
}

Formula Formula::left() const { return Formula{node_->a}; }
Formula Formula::right() const { return Formula{node_->b}; }

bool Formula::operator==(const Formula& o) const {
  return node_ == o.node_ || node_->ser == o.node_->ser;
}

GNumber gn(const Formula& a) { return GNumber{a.ser()}; }

Formula negCompanion(const Formula& a) {
  if (a.isNot()) return a.child();
  return Formula::lnot(a);
}

Formula iteratedNeg(std::size_t k, const Formula& a) {
  Formula r = a;
  for (std::size_t i = 0; i < k; ++i) r = Formula::lnot(r);
  return r;
}

std::size_t negDepth(const Formula& a) {
  std::size_t n = 0;
  Formula cur = a;
  while (cur.isNot()) {
    ++n;
    cur = cur.child();
  }
  return n;
}

Formula starNormal(const Formula& a) {
  Formula base = a;
  std::size_t n = 0;
  while (base.isNot()) {
    ++n;
    base = base.child();
  }
  return n % 2 == 0 ? base : Formula::lnot(base);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Formula run() {
    Formula f = iff();
    skipWs();
    if (pos_ != s_.size()) throw ParseError("trailing input", pos_);
    return f;
  }

 private:
  Formula iff() {
    Formula f = imp();
    skipWs();
    while (lookahead("<->")) {
      pos_ += 3;
      Formula g = imp();
      f = Formula::land(Formula::imp(f, g), Formula::imp(g, f));
      skipWs();
    }
    return f;
  }

  Formula imp() {
    Formula f = disj();
    skipWs();
    if (lookahead("->")) {
      pos_ += 2;
      return Formula::imp(f, imp());
    }
    return f;
  }

  Formula disj() {
    Formula f = conj();
    skipWs();
    while (pos_ < s_.size() && s_[pos_] == '|') {
      ++pos_;
      f = Formula::lor(f, conj());
      skipWs();
    }
    return f;
  }

  Formula conj() {
    Formula f = unary();
    skipWs();
    while (pos_ < s_.size() && s_[pos_] == '&') {
      ++pos_;
      f = Formula::land(f, unary());
      skipWs();
    }
    return f;
  }

  Formula unary() {
    skipWs();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '~' || c == '!') {
      ++pos_;
      return Formula::lnot(unary());
    }
    if (lookahead("[]")) {
      pos_ += 2;
      return Formula::box(unary());
    }
    if (lookaheadWord("box")) {
      pos_ += 3;
      return Formula::box(unary());
    }
    return atom();
  }

  Formula atom() {
    skipWs();
    if (pos_ >= s_.size()) throw ParseError("expected a formula", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Formula f = iff();
      skipWs();
      if (pos_ >= s_.size() || s_[pos_] != ')')
        throw ParseError("expected ')'", pos_);
      ++pos_;
      return f;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
              s_[pos_] == '_'))
        ++pos_;
      std::string word = s_.substr(start, pos_ - start);
      if (word == "false") return Formula::bottom();
      if (word == "true") return Formula::top();
      return Formula::var(word);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  bool lookahead(const char* lit) const {
    return s_.compare(pos_, std::string::traits_type::length(lit), lit) == 0;
  }

  bool lookaheadWord(const char* lit) const {
    std::size_t n = std::string::traits_type::length(lit);
    if (!lookahead(lit)) return false;
    std::size_t after = pos_ + n;
    return after >= s_.size() ||
           !(std::isalnum(static_cast<unsigned char>(s_[after])) ||
             s_[after] == '_');
  }

  void skipWs() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

Formula deserialize(const std::string& ser) {
  std::size_t pos = 0;
  std::function<Formula()> rec = [&]() -> Formula {
    if (pos >= ser.size()) throw ParseError("truncated serialization", pos);
    char c = ser[pos++];
    switch (c) {
      case sym::Bottom: return Formula::bottom();
      case sym::Top: return Formula::top();
      case sym::Not: return Formula::lnot(rec());
      case sym::Box: return Formula::box(rec());
      case sym::And: {
        Formula a = rec();
        return Formula::land(a, rec());
      }
      case sym::Or: {
        Formula a = rec();
        return Formula::lor(a, rec());
      }
      case sym::Imp: {
        Formula a = rec();
        return Formula::imp(a, rec());
      }
      default: {
        std::string name;
        --pos;
        while (pos < ser.size() && ser[pos] != sym::End) {
          int i = ser[pos] - sym::IdentBase;
          if (i < 0 || i >= 64)
            throw ParseError("bad serialization digit", pos);
          name.push_back(sym::identChar(i));
          ++pos;
        }
        if (pos >= ser.size()) throw ParseError("unterminated name", pos);
        ++pos;  // End
        return Formula::var(name);
      }
    }
  };
  Formula f = rec();
  if (pos != ser.size()) throw ParseError("trailing serialization", pos);
  return f;
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

// Precedence levels per the grammar: imp(1) < or(2) < and(3) < unary(4).
int precOf(Conn c) {
  switch (c) {
    case Conn::Imp: return 1;
    case Conn::Or: return 2;
    case Conn::And: return 3;
    default: return 4;
  }
}

void printRec(const Formula& f, int minPrec, bool impRight, std::string& out) {
  int p = precOf(f.conn());
  bool paren = p < minPrec || (p == 1 && minPrec == 1 && !impRight);
  switch (f.conn()) {
    case Conn::Bottom: out += "false"; return;
    case Conn::Top: out += "true"; return;
    case Conn::Var: out += f.name(); return;
    case Conn::Not:
      out += "~";
      printRec(f.child(), 4, false, out);
      return;
    case Conn::Box:
      out += "[]";
      printRec(f.child(), 4, false, out);
      return;
    case Conn::And:
      if (paren) out += "(";
      printRec(f.left(), 3, false, out);
      out += " & ";
      printRec(f.right(), 4, false, out);
      if (paren) out += ")";
      return;
    case Conn::Or:
      if (paren) out += "(";
      printRec(f.left(), 2, false, out);
      out += " | ";
      printRec(f.right(), 3, false, out);
      if (paren) out += ")";
      return;
    case Conn::Imp:
      if (paren) out += "(";
      printRec(f.left(), 2, false, out);
      out += " -> ";
      printRec(f.right(), 1, true, out);
      if (paren) out += ")";
      return;
  }
}

}  // namespace

std::string Formula::text() const {
  std::string out;
  printRec(*this, 0, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Propositional translation and tautological consequence
// ---------------------------------------------------------------------------

int PropAtomMap::atomOf(const Formula& a) {
  if (!a.isPropAtomic())
    throw std::invalid_argument("not a propositionally atomic formula");
  auto [it, inserted] =
      index_.try_emplace(a.ser(), static_cast<int>(atoms_.size()));
  if (inserted) atoms_.push_back(a);
  return it->second;
}

int PropAtomMap::lookup(const Formula& a) const {
  auto it = index_.find(a.ser());
  return it == index_.end() ? -1 : it->second;
}

Formula translateI(const Formula& a, const PropAtomMap& m) {
  if (a.isPropAtomic()) {
    int id = m.lookup(a);
    if (id < 0) throw std::out_of_range("unmapped atom: " + a.text());
    return Formula::var("a" + std::to_string(id));
  }
  switch (a.conn()) {
    case Conn::Bottom: return Formula::bottom();
    case Conn::Top: return Formula::top();
    case Conn::Not: return Formula::lnot(translateI(a.child(), m));
    case Conn::And:
      return Formula::land(translateI(a.left(), m), translateI(a.right(), m));
    case Conn::Or:
      return Formula::lor(translateI(a.left(), m), translateI(a.right(), m));
    case Conn::Imp:
      return Formula::imp(translateI(a.left(), m), translateI(a.right(), m));
    default: throw std::logic_error("unreachable");
  }
}

namespace {

enum class TV : std::uint8_t { False, True, Unknown };

void collectAtoms(const Formula& a, PropAtomMap& m) {
  if (a.isPropAtomic()) {
    m.atomOf(a);
    return;
  }
  switch (a.conn()) {
    case Conn::Not: collectAtoms(a.child(), m); break;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collectAtoms(a.left(), m);
      collectAtoms(a.right(), m);
      break;
    default: break;
  }
}

// Three-valued evaluation under a partial assignment.
TV eval3(const Formula& a, PropAtomMap& m, const std::vector<TV>& assign) {
  if (a.isPropAtomic()) return assign[static_cast<std::size_t>(m.atomOf(a))];
  switch (a.conn()) {
    case Conn::Bottom: return TV::False;
    case Conn::Top: return TV::True;
    case Conn::Not: {
      TV v = eval3(a.child(), m, assign);
      if (v == TV::Unknown) return v;
      return v == TV::True ? TV::False : TV::True;
    }
    case Conn::And: {
      TV l = eval3(a.left(), m, assign);
      if (l == TV::False) return TV::False;
      TV r = eval3(a.right(), m, assign);
      if (r == TV::False) return TV::False;
      if (l == TV::True && r == TV::True) return TV::True;
      return TV::Unknown;
    }
    case Conn::Or: {
      TV l = eval3(a.left(), m, assign);
      if (l == TV::True) return TV::True;
      TV r = eval3(a.right(), m, assign);
      if (r == TV::True) return TV::True;
      if (l == TV::False && r == TV::False) return TV::False;
      return TV::Unknown;
    }
    case Conn::Imp: {
      TV l = eval3(a.left(), m, assign);
      if (l == TV::False) return TV::True;
      TV r = eval3(a.right(), m, assign);
      if (r == TV::True) return TV::True;
      if (l == TV::True && r == TV::False) return TV::False;
      return TV::Unknown;
    }
    default: return TV::Unknown;
  }
}

// Searches for an assignment making every premise true and the goal false.
bool findCounterValuation(const std::vector<Formula>& premises,
                          const Formula& goal, PropAtomMap& m,
                          std::vector<TV>& assign, std::size_t next) {
  for (const Formula& p : premises)
    if (eval3(p, m, assign) == TV::False) return false;
  if (eval3(goal, m, assign) == TV::True) return false;
  if (next >= assign.size()) return true;  // everything decided
  for (TV v : {TV::False, TV::True}) {
    assign[next] = v;
    if (findCounterValuation(premises, goal, m, assign, next + 1)) return true;
  }
  assign[next] = TV::Unknown;
  return false;
}

}  // namespace

bool tcEntails(const std::vector<Formula>& premises, const Formula& goal) {
  PropAtomMap m;
  for (const Formula& p : premises) collectAtoms(p, m);
  collectAtoms(goal, m);
  std::vector<TV> assign(m.count(), TV::Unknown);
  return !findCounterValuation(premises, goal, m, assign, 0);
}

// ---------------------------------------------------------------------------
// Enumeration in gn order
// ---------------------------------------------------------------------------

std::vector<Formula> formulasOfSerLength(std::size_t len,
                                         const std::vector<std::string>& vars) {
  std::vector<std::vector<Formula>> byLen(len + 1);
  for (std::size_t l = 1; l <= len; ++l) {
    auto& out = byLen[l];
    if (l == 1) {
      out.push_back(Formula::bottom());
      out.push_back(Formula::top());
    }
    for (const auto& v : vars)
      if (v.size() + 1 == l) out.push_back(Formula::var(v));
    if (l >= 2) {
      for (const auto& f : byLen[l - 1]) {
        out.push_back(Formula::lnot(f));
        out.push_back(Formula::box(f));
      }
    }
    if (l >= 3) {
      for (std::size_t la = 1; la + 1 < l; ++la) {
        for (const auto& a : byLen[la])
          for (const auto& b : byLen[l - 1 - la]) {
            out.push_back(Formula::land(a, b));
            out.push_back(Formula::lor(a, b));
            out.push_back(Formula::imp(a, b));
          }
      }
    }
  }
  auto& res = byLen[len];
  std::sort(res.begin(), res.end(), GnLess{});
  return res;
}

std::vector<Formula> enumerateFormulas(std::size_t count,
                                       const std::vector<std::string>& vars) {
  std::vector<Formula> out;
  for (std::size_t len = 1; out.size() < count && len < 64; ++len) {
    for (const auto& f : formulasOfSerLength(len, vars)) {
      out.push_back(f);
      if (out.size() == count) break;
    }
  }
  return out;
}

}  // namespace nmodal
