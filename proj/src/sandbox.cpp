#include "nmodal/sandbox.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nmodal {

namespace {

char prKindCode(PrKind k) {
  switch (k) {
    case PrKind::R: return sym::PrR;
    case PrKind::A: return sym::PrA;
    case PrKind::Dagger: return sym::PrDagger;
  }
  return sym::PrR;
}

char markerCode(MarkerKind k) {
  switch (k) {
    case MarkerKind::Lambda: return sym::Lambda;
    case MarkerKind::AlphaAll: return sym::AlphaAll;
    case MarkerKind::AlphaInst: return sym::AlphaInst;
    case MarkerKind::BetaAll: return sym::BetaAll;
    case MarkerKind::BetaInst: return sym::BetaInst;
  }
  return sym::Lambda;
}

}  // namespace

// ---------------------------------------------------------------------------
// SFormula construction; ser is the Polish digit string over the shared
// symbol codes (a PrLit is its kind code followed by the coded formula's
// ser, a marker is its kind code followed by the modal body's ser and, for
// instance markers, the world numeral).

SFormula SFormula::bot() {
  static auto n = std::make_shared<const Node>(
      Node{SConn::Bot, "", PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           nullptr, nullptr, std::string(1, sym::Bottom)});
  return SFormula(n);
}

SFormula SFormula::atom(const std::string& token) {
  if (token.empty()) throw std::invalid_argument("empty atom token");
  std::string ser(1, sym::FAtom);
  ser += sym::encodeIdent(token);
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Atom, token, PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           nullptr, nullptr, std::move(ser)}));
}

SFormula SFormula::lnot(SFormula a) {
  std::string ser(1, sym::Not);
  ser += a.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Neg, "", PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           a.node_, nullptr, std::move(ser)}));
}

SFormula SFormula::land(SFormula a, SFormula b) {
  std::string ser(1, sym::And);
  ser += a.ser();
  ser += b.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::And, "", PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           a.node_, b.node_, std::move(ser)}));
}

SFormula SFormula::lor(SFormula a, SFormula b) {
  std::string ser(1, sym::Or);
  ser += a.ser();
  ser += b.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Or, "", PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           a.node_, b.node_, std::move(ser)}));
}

SFormula SFormula::imp(SFormula a, SFormula b) {
  std::string ser(1, sym::Imp);
  ser += a.ser();
  ser += b.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Imp, "", PrKind::R, MarkerKind::Lambda, std::nullopt, 0,
           a.node_, b.node_, std::move(ser)}));
}

SFormula SFormula::prLit(PrKind k, SFormula target) {
  std::string ser(1, prKindCode(k));
  ser += target.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::PrLit, "", k, MarkerKind::Lambda, std::nullopt, 0,
           target.node_, nullptr, std::move(ser)}));
}

SFormula SFormula::lambda(unsigned long j) {
  std::string ser(1, sym::Lambda);
  ser += sym::encodeNumber(j);
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Marker, "", PrKind::R, MarkerKind::Lambda, std::nullopt, j,
           nullptr, nullptr, std::move(ser)}));
}

SFormula SFormula::marker(MarkerKind k, const Formula& body) {
  if (k != MarkerKind::AlphaAll && k != MarkerKind::BetaAll)
    throw std::invalid_argument("marker kind needs a world argument");
  std::string ser(1, markerCode(k));
  ser += body.ser();
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Marker, "", PrKind::R, k, body, 0, nullptr, nullptr,
           std::move(ser)}));
}

SFormula SFormula::marker(MarkerKind k, const Formula& body, unsigned long j) {
  if (k != MarkerKind::AlphaInst && k != MarkerKind::BetaInst)
    throw std::invalid_argument("marker kind takes no world argument");
  std::string ser(1, markerCode(k));
  ser += body.ser();
  ser += sym::encodeNumber(j);
  return SFormula(std::make_shared<const Node>(
      Node{SConn::Marker, "", PrKind::R, k, body, j, nullptr, nullptr,
           std::move(ser)}));
}

SFormula SFormula::left() const {
  if (!node_->a) throw std::logic_error("formula has no first child");
  return SFormula(node_->a);
}

SFormula SFormula::right() const {
  if (!node_->b) throw std::logic_error("formula has no second child");
  return SFormula(node_->b);
}

const Formula& SFormula::body() const {
  if (!node_->mbody) throw std::logic_error("marker has no modal body");
  return *node_->mbody;
}

GNumber sgn(const SFormula& a) { return GNumber{a.ser()}; }

SFormula sStarNormal(const SFormula& a) {
  SFormula base = a;
  std::size_t n = 0;
  while (base.conn() == SConn::Neg) {
    base = base.child();
    ++n;
  }
  return (n % 2 == 0) ? base : SFormula::lnot(base);
}

// ---------------------------------------------------------------------------
// Printing.

namespace {

// precedence: -> (1, right) | (2) & (3) unary/atoms (4)
void printS(const SFormula& f, int minPrec, std::string& out) {
  switch (f.conn()) {
    case SConn::Bot: out += "false"; return;
    case SConn::Atom:
      out += '$';
      out += f.token();
      return;
    case SConn::Neg:
      out += '~';
      printS(f.child(), 4, out);
      return;
    case SConn::PrLit:
      out += f.prKind() == PrKind::R ? "PrR("
             : f.prKind() == PrKind::A ? "PrA("
                                       : "PrD(";
      printS(f.target(), 0, out);
      out += ')';
      return;
    case SConn::Marker:
      switch (f.markerKind()) {
        case MarkerKind::Lambda:
          out += "lam(" + std::to_string(f.world()) + ")";
          return;
        case MarkerKind::AlphaAll:
          out += "alphaAll(" + f.body().text() + ")";
          return;
        case MarkerKind::AlphaInst:
          out += "alpha(" + f.body().text() + ", " +
                 std::to_string(f.world()) + ")";
          return;
        case MarkerKind::BetaAll:
          out += "betaAll(" + f.body().text() + ")";
          return;
        case MarkerKind::BetaInst:
          out += "beta(" + f.body().text() + ", " +
                 std::to_string(f.world()) + ")";
          return;
      }
      return;
    case SConn::And:
    case SConn::Or:
    case SConn::Imp: {
      const int prec = f.conn() == SConn::Imp ? 1 : f.conn() == SConn::Or ? 2 : 3;
      const char* op = f.conn() == SConn::Imp ? " -> "
                       : f.conn() == SConn::Or ? " | "
                                               : " & ";
      const bool parens = prec < minPrec;
      if (parens) out += '(';
      // & and | associate left, -> associates right
      printS(f.left(), f.conn() == SConn::Imp ? prec + 1 : prec, out);
      out += op;
      printS(f.right(), f.conn() == SConn::Imp ? prec : prec + 1, out);
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace

std::string SFormula::text() const {
  std::string out;
  printS(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

struct SParser {
  const std::string& src;
  std::size_t pos = 0;

  explicit SParser(const std::string& s) : src(s) {}

  void skipWs() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
      ++pos;
  }

  bool eat(const std::string& tok) {
    skipWs();
    if (src.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skipWs();
    if (pos >= src.size() || src[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  bool identAhead(const std::string& word) {
    skipWs();
    if (src.compare(pos, word.size(), word) != 0) return false;
    const std::size_t end = pos + word.size();
    // keywords are delimited by non-identifier characters
    return end >= src.size() || sym::identIndex(src[end]) < 0;
  }

  std::string ident() {
    skipWs();
    std::size_t start = pos;
    while (pos < src.size() && sym::identIndex(src[pos]) >= 0) ++pos;
    if (pos == start) throw ParseError("expected identifier", pos);
    return src.substr(start, pos - start);
  }

  unsigned long number() {
    skipWs();
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      ++pos;
    if (pos == start) throw ParseError("expected number", pos);
    return std::stoul(src.substr(start, pos - start));
  }

  // Raw text of a balanced "(...)" group, cursor left after ')'.
  std::string group() {
    expect('(');
    std::size_t start = pos;
    int depth = 1;
    while (pos < src.size() && depth > 0) {
      if (src[pos] == '(') ++depth;
      if (src[pos] == ')') --depth;
      ++pos;
    }
    if (depth != 0) throw ParseError("unbalanced parentheses", pos);
    return src.substr(start, pos - start - 1);
  }

  static std::pair<std::string, unsigned long> splitInst(const std::string& raw,
                                                         std::size_t at) {
    // split "B, j" at the last depth-0 comma
    std::size_t comma = std::string::npos;
    int depth = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '(') ++depth;
      if (raw[i] == ')') --depth;
      if (raw[i] == ',' && depth == 0) comma = i;
    }
    if (comma == std::string::npos)
      throw ParseError("expected world argument", at);
    return {raw.substr(0, comma), std::stoul(raw.substr(comma + 1))};
  }

  SFormula parseImp() {
    SFormula l = parseOr();
    skipWs();
    if (eat("->")) return SFormula::imp(std::move(l), parseImp());
    return l;
  }

  SFormula parseOr() {
    SFormula l = parseAnd();
    while (true) {
      skipWs();
      if (pos < src.size() && src[pos] == '|' &&
          (pos + 1 >= src.size() || src[pos + 1] != '|')) {
        ++pos;
        l = SFormula::lor(std::move(l), parseAnd());
      } else {
        return l;
      }
    }
  }

  SFormula parseAnd() {
    SFormula l = parseUnary();
    while (true) {
      skipWs();
      if (pos < src.size() && src[pos] == '&') {
        ++pos;
        l = SFormula::land(std::move(l), parseUnary());
      } else {
        return l;
      }
    }
  }

  SFormula parseUnary() {
    skipWs();
    if (pos < src.size() && (src[pos] == '~' || src[pos] == '!')) {
      ++pos;
      return SFormula::lnot(parseUnary());
    }
    return parsePrimary();
  }

  SFormula parsePrimary() {
    skipWs();
    if (pos >= src.size()) throw ParseError("unexpected end of input", pos);
    if (src[pos] == '(') {
      ++pos;
      SFormula f = parseImp();
      expect(')');
      return f;
    }
    if (src[pos] == '$') {
      ++pos;
      return SFormula::atom(ident());
    }
    if (identAhead("false")) {
      eat("false");
      return SFormula::bot();
    }
    if (identAhead("PrR") || identAhead("PrA") || identAhead("PrD")) {
      PrKind k = identAhead("PrR") ? PrKind::R
                 : identAhead("PrA") ? PrKind::A
                                     : PrKind::Dagger;
      pos += 3;
      expect('(');
      SFormula t = parseImp();
      expect(')');
      return SFormula::prLit(k, std::move(t));
    }
    if (identAhead("lam")) {
      pos += 3;
      expect('(');
      unsigned long j = number();
      expect(')');
      return SFormula::lambda(j);
    }
    if (identAhead("alphaAll") || identAhead("betaAll")) {
      const bool alpha = identAhead("alphaAll");
      pos += alpha ? 8 : 7;
      const std::size_t at = pos;
      std::string raw = group();
      try {
        return SFormula::marker(
            alpha ? MarkerKind::AlphaAll : MarkerKind::BetaAll, parse(raw));
      } catch (const ParseError& e) {
        throw ParseError("bad marker body", at);
      }
    }
    if (identAhead("alpha") || identAhead("beta")) {
      const bool alpha = identAhead("alpha");
      pos += alpha ? 5 : 4;
      const std::size_t at = pos;
      auto [rawBody, j] = splitInst(group(), at);
      try {
        return SFormula::marker(
            alpha ? MarkerKind::AlphaInst : MarkerKind::BetaInst,
            parse(rawBody), j);
      } catch (const ParseError& e) {
        throw ParseError("bad marker body", at);
      }
    }
    throw ParseError("unexpected token", pos);
  }
};

}  // namespace

SFormula parseS(const std::string& text) {
  SParser p(text);
  SFormula f = p.parseImp();
  p.skipWs();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
  return f;
}

namespace {

Formula modalFromSer(const std::string& ser, std::size_t& pos);

SFormula sFromSer(const std::string& ser, std::size_t& pos) {
  if (pos >= ser.size()) throw std::invalid_argument("truncated serialization");
  const char c = ser[pos++];
  switch (c) {
    case sym::Bottom: return SFormula::bot();
    case sym::Not: return SFormula::lnot(sFromSer(ser, pos));
    case sym::And: {
      SFormula a = sFromSer(ser, pos);
      return SFormula::land(std::move(a), sFromSer(ser, pos));
    }
    case sym::Or: {
      SFormula a = sFromSer(ser, pos);
      return SFormula::lor(std::move(a), sFromSer(ser, pos));
    }
    case sym::Imp: {
      SFormula a = sFromSer(ser, pos);
      return SFormula::imp(std::move(a), sFromSer(ser, pos));
    }
    case sym::PrR: return SFormula::prLit(PrKind::R, sFromSer(ser, pos));
    case sym::PrA: return SFormula::prLit(PrKind::A, sFromSer(ser, pos));
    case sym::PrDagger:
      return SFormula::prLit(PrKind::Dagger, sFromSer(ser, pos));
    case sym::FAtom: {
      std::string tok;
      while (pos < ser.size() && ser[pos] != sym::End)
        tok.push_back(sym::identChar(ser[pos++] - sym::IdentBase));
      if (pos >= ser.size()) throw std::invalid_argument("unterminated atom");
      ++pos;
      return SFormula::atom(tok);
    }
    case sym::Lambda: {
      std::string digits;
      while (pos < ser.size() && ser[pos] != sym::End)
        digits.push_back(sym::identChar(ser[pos++] - sym::IdentBase));
      if (pos >= ser.size()) throw std::invalid_argument("unterminated numeral");
      ++pos;
      return SFormula::lambda(std::stoul(digits));
    }
    case sym::AlphaAll:
    case sym::BetaAll: {
      Formula b = modalFromSer(ser, pos);
      return SFormula::marker(
          c == sym::AlphaAll ? MarkerKind::AlphaAll : MarkerKind::BetaAll, b);
    }
    case sym::AlphaInst:
    case sym::BetaInst: {
      Formula b = modalFromSer(ser, pos);
      std::string digits;
      while (pos < ser.size() && ser[pos] != sym::End)
        digits.push_back(sym::identChar(ser[pos++] - sym::IdentBase));
      if (pos >= ser.size()) throw std::invalid_argument("unterminated numeral");
      ++pos;
      return SFormula::marker(
          c == sym::AlphaInst ? MarkerKind::AlphaInst : MarkerKind::BetaInst,
          b, std::stoul(digits));
    }
    default: throw std::invalid_argument("bad symbol code");
  }
}

Formula modalFromSer(const std::string& ser, std::size_t& pos) {
  if (pos >= ser.size()) throw std::invalid_argument("truncated serialization");
  const char c = ser[pos];
  if (c >= sym::IdentBase) {
    std::string name;
    while (pos < ser.size() && ser[pos] != sym::End)
      name.push_back(sym::identChar(ser[pos++] - sym::IdentBase));
    if (pos >= ser.size()) throw std::invalid_argument("unterminated variable");
    ++pos;
    return Formula::var(name);
  }
  ++pos;
  switch (c) {
    case sym::Bottom: return Formula::bottom();
    case sym::Top: return Formula::top();
    case sym::Not: return Formula::lnot(modalFromSer(ser, pos));
    case sym::Box: return Formula::box(modalFromSer(ser, pos));
    case sym::And: {
      Formula a = modalFromSer(ser, pos);
      return Formula::land(a, modalFromSer(ser, pos));
    }
    case sym::Or: {
      Formula a = modalFromSer(ser, pos);
      return Formula::lor(a, modalFromSer(ser, pos));
    }
    case sym::Imp: {
      Formula a = modalFromSer(ser, pos);
      return Formula::imp(a, modalFromSer(ser, pos));
    }
    default: throw std::invalid_argument("bad modal symbol code");
  }
}

}  // namespace

SFormula sDeserialize(const std::string& ser) {
  std::size_t pos = 0;
  SFormula f = sFromSer(ser, pos);
  if (pos != ser.size()) throw std::invalid_argument("trailing serialization");
  return f;
}

// ---------------------------------------------------------------------------
// The interpretation f.

SFormula InterpretationF::apply(const Formula& a) const {
  switch (a.conn()) {
    case Conn::Bottom: return SFormula::bot();
    case Conn::Top: return SFormula::atom("0");
    case Conn::Var: return SFormula::atom("f_" + a.name());
    case Conn::Not: return SFormula::lnot(apply(a.child()));
    case Conn::And: return SFormula::land(apply(a.left()), apply(a.right()));
    case Conn::Or: return SFormula::lor(apply(a.left()), apply(a.right()));
    case Conn::Imp: return SFormula::imp(apply(a.left()), apply(a.right()));
    case Conn::Box: return SFormula::prLit(PrKind::Dagger, apply(a.child()));
  }
  throw std::logic_error("unreachable");
}

std::optional<Formula> InterpretationF::preimage(const SFormula& s) const {
  switch (s.conn()) {
    case SConn::Bot: return Formula::bottom();
    case SConn::Atom:
      if (s.token() == "0") return Formula::top();
      if (s.token().size() > 2 && s.token().compare(0, 2, "f_") == 0)
        return Formula::var(s.token().substr(2));
      return std::nullopt;
    case SConn::Neg:
      if (auto b = preimage(s.child())) return Formula::lnot(*b);
      return std::nullopt;
    case SConn::And:
      if (auto l = preimage(s.left()))
        if (auto r = preimage(s.right())) return Formula::land(*l, *r);
      return std::nullopt;
    case SConn::Or:
      if (auto l = preimage(s.left()))
        if (auto r = preimage(s.right())) return Formula::lor(*l, *r);
      return std::nullopt;
    case SConn::Imp:
      if (auto l = preimage(s.left()))
        if (auto r = preimage(s.right())) return Formula::imp(*l, *r);
      return std::nullopt;
    case SConn::PrLit:
      if (s.prKind() != PrKind::Dagger) return std::nullopt;
      if (auto b = preimage(s.target())) return Formula::box(*b);
      return std::nullopt;
    case SConn::Marker: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Streams and the countermodel library.

TheoryStream scriptedStream(std::map<std::size_t, SFormula> script) {
  auto shared = std::make_shared<std::map<std::size_t, SFormula>>(std::move(script));
  return TheoryStream{[shared](std::size_t s) -> std::optional<SFormula> {
    auto it = shared->find(s);
    if (it == shared->end()) return std::nullopt;
    return it->second;
  }};
}

CountermodelLibrary CountermodelLibrary::build(
    Logic l, std::size_t count, const std::vector<std::string>& vars,
    unsigned oracleDepth) {
  CountermodelLibrary lib;
  lib.logic_ = l;
  Prover prover(l, oracleDepth);
  unsigned long nextBase = 1;
  for (std::size_t len = 1; lib.entries_.size() < count && len <= 64; ++len) {
    for (const Formula& f : formulasOfSerLength(len, vars)) {
      Verdict v = prover.decide(f);
      if (v.provable) continue;
      Entry e;
      e.goal = f;
      e.model = *v.model;
      e.refuting = v.world;
      e.base = nextBase;
      nextBase += e.model.frame.worlds.size();
      lib.entries_.push_back(std::move(e));
      if (lib.entries_.size() == count) break;
    }
  }
  return lib;
}

const CountermodelLibrary::Entry& CountermodelLibrary::entry(
    std::size_t k) const {
  if (k == 0 || k > entries_.size())
    throw LibraryExhausted("no model with index " + std::to_string(k));
  return entries_[k - 1];
}

unsigned long CountermodelLibrary::maxWorld() const {
  if (entries_.empty()) return 0;
  const Entry& e = entries_.back();
  return e.base + e.model.frame.worlds.size() - 1;
}

CountermodelLibrary::Location CountermodelLibrary::locate(
    unsigned long globalId) const {
  for (std::size_t k = 1; k <= entries_.size(); ++k) {
    const Entry& e = entries_[k - 1];
    const unsigned long n = e.model.frame.worlds.size();
    if (globalId >= e.base && globalId < e.base + n)
      return {k, e.model.frame.worlds[globalId - e.base]};
  }
  throw LibraryExhausted("world " + std::to_string(globalId) +
                         " beyond the generated library");
}

// ---------------------------------------------------------------------------
// Tautological consequence over sentence formulas: atoms (plain atoms,
// provability literals, markers) translate to fresh propositional
// variables keyed by serialization.

namespace {

class STranslator {
 public:
  Formula operator()(const SFormula& s) {
    switch (s.conn()) {
      case SConn::Bot: return Formula::bottom();
      case SConn::Neg: return Formula::lnot((*this)(s.child()));
      case SConn::And:
        return Formula::land((*this)(s.left()), (*this)(s.right()));
      case SConn::Or:
        return Formula::lor((*this)(s.left()), (*this)(s.right()));
      case SConn::Imp:
        return Formula::imp((*this)(s.left()), (*this)(s.right()));
      default: {
        auto [it, fresh] = ids_.emplace(s.ser(), ids_.size());
        (void)fresh;
        return Formula::var("s" + std::to_string(it->second));
      }
    }
  }

 private:
  std::map<std::string, std::size_t> ids_;
};

std::vector<SFormula> prefixOf(std::size_t s,
                               const std::vector<std::optional<SFormula>>& g) {
  std::vector<SFormula> out;
  const std::size_t end = std::min(s, g.size());
  for (std::size_t t = 0; t < end; ++t)
    if (g[t]) out.push_back(*g[t]);
  return out;
}

void collectAtoms(const SFormula& s, SFormulaSet& out) {
  switch (s.conn()) {
    case SConn::Bot: return;
    case SConn::Neg: collectAtoms(s.child(), out); return;
    case SConn::And:
    case SConn::Or:
    case SConn::Imp:
      collectAtoms(s.left(), out);
      collectAtoms(s.right(), out);
      return;
    default: out.insert(s); return;
  }
}

}  // namespace

namespace {

std::optional<PhiWitness> phiCore(std::size_t s,
                                  const std::set<std::string>& emitted,
                                  const SFormulaSet& candidates,
                                  const InterpretationF& f) {
  for (const SFormula& psi : candidates) {  // gn order
    if (f.inImage(psi)) continue;                     // condition 3
    if (psi.ser().size() > s) continue;               // psi in F_s
    // The star-iteration is forced: sigma_{r-1} is the flipped star form of
    // psi, and each earlier sigma is the formula coded by the current star
    // form while that form stays a dagger literal.
    std::vector<SFormula> chain{sStarNormal(SFormula::lnot(psi))};
    while (true) {
      SFormula st = sStarNormal(chain.back());
      if (st.conn() == SConn::PrLit && st.prKind() == PrKind::Dagger)
        chain.push_back(st.target());
      else
        break;  // sigma_0 found: its star form is not a dagger literal
    }
    std::reverse(chain.begin(), chain.end());
    if (chain.back().ser().size() > s) continue;      // sigma_{r-1}* in F_s
    bool fresh = true;                                 // condition 6
    for (const SFormula& sig : chain)
      if (emitted.count(sStarNormal(sig).ser())) { fresh = false; break; }
    if (!fresh) continue;
    return PhiWitness{psi, chain.size(), std::move(chain)};
  }
  return std::nullopt;
}

}  // namespace

std::optional<PhiWitness> checkPhi(
    std::size_t s, const std::vector<std::optional<SFormula>>& g,
    const InterpretationF& f) {
  std::set<std::string> emitted;
  SFormulaSet candidates;
  for (const SFormula& e : prefixOf(s, g)) {
    emitted.insert(e.ser());
    if (e.conn() == SConn::Neg && e.child().conn() == SConn::PrLit &&
        e.child().prKind() == PrKind::Dagger)
      candidates.insert(e.child().target());
  }
  return phiCore(s, emitted, candidates, f);
}

std::set<unsigned long> computeJ(std::size_t s,
                                 const std::vector<std::optional<SFormula>>& g,
                                 const CountermodelLibrary& lib) {
  const std::vector<SFormula> prefix = prefixOf(s, g);
  std::set<unsigned long> j;
  if (prefix.empty()) return j;

  STranslator tr;
  std::vector<Formula> prems;
  prems.reserve(prefix.size());
  for (const SFormula& e : prefix) prems.push_back(tr(e));

  if (tcEntails(prems, Formula::bottom())) {
    // Inconsistent prefix entails every ~lam(j); report the covered worlds.
    for (unsigned long w = 1; w <= lib.maxWorld(); ++w) j.insert(w);
    return j;
  }

  SFormulaSet atoms;
  for (const SFormula& e : prefix) collectAtoms(e, atoms);

  for (const SFormula& a : atoms)
    if (a.conn() == SConn::Marker && a.markerKind() == MarkerKind::Lambda &&
        a.world() >= 1 && tcEntails(prems, Formula::lnot(tr(a))))
      j.insert(a.world());

  for (std::size_t k = 1; k <= lib.size(); ++k) {
    const CountermodelLibrary::Entry& e = lib.entry(k);
    const unsigned long n = e.model.frame.worlds.size();
    for (const Formula& b : sub(e.goal)) {
      for (const auto& [allKind, instKind] :
           {std::pair{MarkerKind::AlphaAll, MarkerKind::AlphaInst},
            std::pair{MarkerKind::BetaAll, MarkerKind::BetaInst}}) {
        SFormula all = SFormula::marker(allKind, b);
        if (!atoms.count(all)) continue;  // conjunction cannot be entailed
        for (unsigned long w = e.base; w < e.base + n; ++w) {
          if (j.count(w)) continue;
          Formula goal = Formula::land(
              tr(all), Formula::imp(tr(SFormula::marker(instKind, b, w)),
                                    Formula::lnot(tr(SFormula::lambda(w)))));
          if (tcEntails(prems, goal)) j.insert(w);
        }
      }
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Enumeration of sentence formulas in gn order, over the finite alphabet
// induced by a library (image atoms, markers for its models).

namespace {

void collectVars(const Formula& a, std::set<std::string>& out) {
  switch (a.conn()) {
    case Conn::Var: out.insert(a.name()); return;
    case Conn::Not:
    case Conn::Box: collectVars(a.child(), out); return;
    case Conn::And:
    case Conn::Or:
    case Conn::Imp:
      collectVars(a.left(), out);
      collectVars(a.right(), out);
      return;
    default: return;
  }
}

class SEnumerator {
 public:
  explicit SEnumerator(const CountermodelLibrary& lib) {
    std::set<std::string> vars;
    for (std::size_t k = 1; k <= lib.size(); ++k) {
      const auto& e = lib.entry(k);
      collectVars(e.goal, vars);
      const unsigned long n = e.model.frame.worlds.size();
      for (const Formula& b : sub(e.goal)) {
        atoms_.push_back(SFormula::marker(MarkerKind::AlphaAll, b));
        atoms_.push_back(SFormula::marker(MarkerKind::BetaAll, b));
        for (unsigned long w = e.base; w < e.base + n; ++w) {
          atoms_.push_back(SFormula::marker(MarkerKind::AlphaInst, b, w));
          atoms_.push_back(SFormula::marker(MarkerKind::BetaInst, b, w));
        }
      }
    }
    for (unsigned long w = 1; w <= lib.maxWorld(); ++w)
      atoms_.push_back(SFormula::lambda(w));
    atoms_.push_back(SFormula::atom("0"));
    for (const std::string& v : vars) atoms_.push_back(SFormula::atom("f_" + v));
    byLen_.emplace_back();  // length 0: empty
  }

  const SFormula& at(std::size_t t) {
    while (flat_.size() <= t) extend();
    return flat_[t];
  }

 private:
  void extend() {
    const std::size_t len = byLen_.size();
    if (len > 64) throw std::runtime_error("enumeration bound exceeded");
    std::vector<SFormula> bucket;
    if (len == 1) bucket.push_back(SFormula::bot());
    for (const SFormula& a : atoms_)
      if (a.ser().size() == len) bucket.push_back(a);
    if (len >= 2)
      for (const SFormula& s : byLen_[len - 1]) {
        bucket.push_back(SFormula::lnot(s));
        bucket.push_back(SFormula::prLit(PrKind::R, s));
        bucket.push_back(SFormula::prLit(PrKind::A, s));
        bucket.push_back(SFormula::prLit(PrKind::Dagger, s));
      }
    for (std::size_t i = 1; i + 1 < len; ++i)
      for (const SFormula& l : byLen_[i])
        for (const SFormula& r : byLen_[len - 1 - i]) {
          bucket.push_back(SFormula::land(l, r));
          bucket.push_back(SFormula::lor(l, r));
          bucket.push_back(SFormula::imp(l, r));
        }
    std::sort(bucket.begin(), bucket.end(),
              [](const SFormula& a, const SFormula& b) {
                return a.ser() < b.ser();
              });
    for (const SFormula& s : bucket) flat_.push_back(s);
    byLen_.push_back(std::move(bucket));
  }

  std::vector<SFormula> atoms_;
  std::vector<std::vector<SFormula>> byLen_;
  std::vector<SFormula> flat_;
};

}  // namespace

std::vector<SFormula> tailUniverse(const CountermodelLibrary& lib,
                                   std::size_t n) {
  SEnumerator xi(lib);
  std::vector<SFormula> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) out.push_back(xi.at(t));
  return out;
}

// ---------------------------------------------------------------------------
// Staged runs.

namespace {

// Incremental model set of the emitted prefix: one bit per assignment to the
// prop-atomic forms seen so far.  Adding a stage costs one truth-table
// sweep, so long consistent streams avoid re-checking the whole prefix.
// Past the atom cap the tracker goes dead and callers fall back to computeJ.
class SatTracker {
 public:
  static constexpr std::size_t kMaxAtoms = 16;

  bool add(const SFormula& s) {
    if (dead_) return false;
    SFormulaSet atoms;
    collectAtoms(s, atoms);
    for (const SFormula& a : atoms) {
      const std::string key = a.ser();
      if (bit_.count(key)) continue;
      if (bit_.size() == kMaxAtoms) {
        dead_ = true;
        return false;
      }
      const std::size_t k = bit_.size();
      bit_.emplace(key, k);
      if (k < 6)
        mask_[0] |= mask_[0] << (std::size_t{1} << k);
      else
        mask_.insert(mask_.end(), mask_.begin(), mask_.end());
    }
    const std::size_t n = std::size_t{1} << bit_.size();
    for (std::size_t i = 0; i < n; ++i)
      if (((mask_[i >> 6] >> (i & 63)) & 1) && !eval(s, i, nullptr, 0))
        mask_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    return true;
  }

  bool inconsistent() const {
    for (std::uint64_t w : mask_)
      if (w) return false;
    return true;
  }

  // Tautological consequence of the tracked prefix.  Goal atoms absent from
  // the prefix are unconstrained and enumerated locally.
  bool entails(const SFormula& goal) const {
    std::map<std::string, std::size_t> extra;
    SFormulaSet gatoms;
    collectAtoms(goal, gatoms);
    for (const SFormula& a : gatoms)
      if (!bit_.count(a.ser())) extra.emplace(a.ser(), extra.size());
    const std::size_t n = std::size_t{1} << bit_.size();
    const std::size_t m = std::size_t{1} << extra.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask_[i >> 6] >> (i & 63)) & 1)) continue;
      for (std::size_t e = 0; e < m; ++e)
        if (!eval(goal, i, &extra, e)) return false;
    }
    return true;
  }

 private:
  bool eval(const SFormula& s, std::size_t i,
            const std::map<std::string, std::size_t>* extra,
            std::size_t e) const {
    switch (s.conn()) {
      case SConn::Bot: return false;
      case SConn::Neg: return !eval(s.child(), i, extra, e);
      case SConn::And:
        return eval(s.left(), i, extra, e) && eval(s.right(), i, extra, e);
      case SConn::Or:
        return eval(s.left(), i, extra, e) || eval(s.right(), i, extra, e);
      case SConn::Imp:
        return !eval(s.left(), i, extra, e) || eval(s.right(), i, extra, e);
      default: {
        auto it = bit_.find(s.ser());
        if (it != bit_.end()) return (i >> it->second) & 1;
        return (e >> extra->at(s.ser())) & 1;
      }
    }
  }

  std::map<std::string, std::size_t> bit_;
  std::vector<std::uint64_t> mask_{std::uint64_t{1}};
  bool dead_ = false;
};

std::set<unsigned long> jFromTracker(const SatTracker& sat,
                                     const SFormulaSet& markerAtoms,
                                     const CountermodelLibrary& lib) {
  std::set<unsigned long> j;
  if (sat.inconsistent()) {
    for (unsigned long w = 1; w <= lib.maxWorld(); ++w) j.insert(w);
    return j;
  }
  for (const SFormula& a : markerAtoms)
    if (a.markerKind() == MarkerKind::Lambda && a.world() >= 1 &&
        sat.entails(SFormula::lnot(a)))
      j.insert(a.world());
  for (std::size_t k = 1; k <= lib.size(); ++k) {
    const CountermodelLibrary::Entry& e = lib.entry(k);
    const unsigned long n = e.model.frame.worlds.size();
    for (const Formula& b : sub(e.goal)) {
      for (const auto& [allKind, instKind] :
           {std::pair{MarkerKind::AlphaAll, MarkerKind::AlphaInst},
            std::pair{MarkerKind::BetaAll, MarkerKind::BetaInst}}) {
        SFormula all = SFormula::marker(allKind, b);
        if (!markerAtoms.count(all)) continue;
        for (unsigned long w = e.base; w < e.base + n; ++w) {
          if (j.count(w)) continue;
          SFormula goal = SFormula::land(
              all, SFormula::imp(SFormula::marker(instKind, b, w),
                                 SFormula::lnot(SFormula::lambda(w))));
          if (sat.entails(goal)) j.insert(w);
        }
      }
    }
  }
  return j;
}

StagedTrace runCore(Logic l, const TheoryStream& stream,
                    const CountermodelLibrary& lib, std::size_t S,
                    bool withPhi) {
  StagedTrace tr;
  tr.logic = l;
  tr.horizon = S;
  tr.h.assign(S + 1, 0);
  tr.g.assign(S, std::nullopt);
  InterpretationF f;

  SatTracker sat;
  bool satOk = true;
  SFormulaSet markerAtoms;
  std::set<std::string> emitted;
  SFormulaSet phiCands;

  for (std::size_t s = 0; s < S; ++s) {
    std::optional<PhiWitness> phi;
    unsigned long next = 0;
    if (withPhi) {
      phi = phiCore(s, emitted, phiCands, f);
      if (phi) next = 1;
    }
    if (next == 0) {
      std::set<unsigned long> j =
          satOk ? jFromTracker(sat, markerAtoms, lib) : computeJ(s, tr.g, lib);
      if (!j.empty()) next = *j.begin();
    }
    if (next == 0) {
      tr.g[s] = stream.at(s);
      if (tr.g[s]) {
        const SFormula& e = *tr.g[s];
        emitted.insert(e.ser());
        SFormulaSet atoms;
        collectAtoms(e, atoms);
        for (const SFormula& a : atoms)
          if (a.conn() == SConn::Marker) markerAtoms.insert(a);
        if (satOk) satOk = sat.add(e);
        if (e.conn() == SConn::Neg && e.child().conn() == SConn::PrLit &&
            e.child().prKind() == PrKind::Dagger)
          phiCands.insert(e.child().target());
      }
      continue;
    }

    // h switches at s and stays constant.
    for (std::size_t t = s + 1; t <= S; ++t) tr.h[t] = next;
    tr.switchStage = s;
    CountermodelLibrary::Location loc = lib.locate(next);
    tr.jWorld = next;
    tr.modelIndex = loc.k;

    std::size_t u = 0;
    if (phi) {
      // Case A: emit the reversed star-iteration schedule.
      tr.phiTrigger = phi;
      u = phi->r;
      for (std::size_t i = 0; i < phi->r && s + i < S; ++i)
        tr.g[s + i] =
            sStarNormal(SFormula::lnot(phi->iteration[phi->r - 1 - i]));
    }

    std::size_t emittedX = 0;
    if (withPhi) {
      // The X-set over the prefix: flipped star forms of coded formulas
      // whose dagger literal was refuted and whose star form is itself a
      // negated dagger literal.
      SFormulaSet x;
      for (const SFormula& e : prefixOf(s, tr.g))
        if (e.conn() == SConn::Neg && e.child().conn() == SConn::PrLit &&
            e.child().prKind() == PrKind::Dagger) {
          const SFormula phi2 = e.child().target();
          if (f.inImage(phi2)) continue;
          const SFormula st = sStarNormal(phi2);
          if (st.conn() == SConn::Neg && st.child().conn() == SConn::PrLit &&
              st.child().prKind() == PrKind::Dagger)
            x.insert(sStarNormal(SFormula::lnot(phi2)));
        }
      for (const SFormula& chi : x) {
        if (s + u + emittedX >= S) break;
        tr.g[s + u + emittedX] = chi;
        ++emittedX;
      }
    }

    // Filtered enumeration tail.
    tr.tailStart = s + u + emittedX;
    const Model& m = lib.entry(loc.k).model;
    SEnumerator xi(lib);
    for (std::size_t t = 0; s + u + emittedX + t < S; ++t) {
      const SFormula& cand = xi.at(t);
      std::optional<Formula> pre = f.preimage(cand);
      if (pre && !forces(m, loc.local, Formula::box(*pre)))
        tr.g[s + u + emittedX + t] = std::nullopt;
      else
        tr.g[s + u + emittedX + t] = cand;
    }
    break;
  }
  return tr;
}

}  // namespace

StagedTrace runStaged(Logic l, const TheoryStream& stream,
                      const CountermodelLibrary& lib, std::size_t S) {
  if (l != Logic::ND && l != Logic::ND4)
    throw std::invalid_argument("runStaged covers ND and ND4 only");
  return runCore(l, stream, lib, S, true);
}

StagedTrace runStagedSimple(Logic l, const TheoryStream& stream,
                            const CountermodelLibrary& lib, std::size_t S) {
  if (l != Logic::NP && l != Logic::NP4)
    throw std::invalid_argument("runStagedSimple covers NP and NP4 only");
  return runCore(l, stream, lib, S, false);
}

// ---------------------------------------------------------------------------
// Witness-comparison evaluation.

namespace {

std::optional<std::size_t> firstEmission(const SFormula& x,
                                         const StagedTrace& trace,
                                         std::size_t horizon) {
  const std::size_t end = std::min(horizon, trace.g.size());
  for (std::size_t t = 0; t < end; ++t)
    if (trace.g[t] && *trace.g[t] == x) return t;
  return std::nullopt;
}

PrResult compare(std::optional<std::size_t> pro,
                 std::optional<std::size_t> con) {
  if (pro && (!con || *pro < *con)) return {PrStatus::True, pro};
  if (con && (!pro || *con < *pro)) return {PrStatus::SettledFalse, {}};
  return {PrStatus::FalseAtHorizon, {}};
}

}  // namespace

PrResult evalPr(PrfKind kind, const SFormula& target, const StagedTrace& trace,
                std::size_t horizon, const InterpretationF& f) {
  switch (kind) {
    case PrfKind::Prf: {
      auto y = firstEmission(target, trace, horizon);
      if (y) return {PrStatus::True, y};
      return {PrStatus::FalseAtHorizon, {}};
    }
    case PrfKind::R:
      return compare(firstEmission(target, trace, horizon),
                     firstEmission(SFormula::lnot(target), trace, horizon));
    case PrfKind::A:
      return compare(
          firstEmission(sStarNormal(target), trace, horizon),
          firstEmission(sStarNormal(SFormula::lnot(target)), trace, horizon));
    case PrfKind::Dagger:
      return evalPr(f.inImage(target) ? PrfKind::R : PrfKind::A, target, trace,
                    horizon, f);
  }
  return {PrStatus::FalseAtHorizon, {}};
}

// ---------------------------------------------------------------------------
// Trace-level claim checks.

std::vector<TraceAssertion> assertTraceClaims(const StagedTrace& trace,
                                              Logic l) {
  std::vector<TraceAssertion> rep;
  InterpretationF f;
  const std::size_t S = trace.horizon;

  {  // h changes at most once, from 0 to a constant non-zero value
    std::size_t changes = 0;
    bool shapeOk = true;
    for (std::size_t t = 0; t + 1 < trace.h.size(); ++t) {
      if (trace.h[t] != trace.h[t + 1]) {
        ++changes;
        if (trace.h[t] != 0 || trace.h[t + 1] == 0) shapeOk = false;
      }
    }
    rep.push_back({"switch-uniqueness",
                   (changes <= 1 && shapeOk) ? "pass" : "fail",
                   changes <= 1 ? "" : "h changes more than once"});
  }

  // Candidate formulas for the provability claims: everything emitted,
  // together with negations and star forms.
  SFormulaSet cand;
  for (const auto& e : trace.g)
    if (e) {
      cand.insert(*e);
      cand.insert(SFormula::lnot(*e));
      cand.insert(sStarNormal(*e));
      cand.insert(sStarNormal(SFormula::lnot(*e)));
    }

  {  // D: no formula has both PrD(phi) and PrD(~phi) true
    std::string witness;
    for (const SFormula& phi : cand) {
      if (evalPr(PrfKind::Dagger, phi, trace, S, f).status != PrStatus::True)
        continue;
      if (evalPr(PrfKind::Dagger, SFormula::lnot(phi), trace, S, f).status ==
          PrStatus::True) {
        witness = phi.text();
        break;
      }
    }
    rep.push_back({"d-property", witness.empty() ? "pass" : "fail", witness});
  }

  if (isTransitiveLogic(l)) {
    // 4: within the enumerated window, PrD(phi) true forces
    // PrD(PrD(phi)) true.
    if (!trace.switchStage || !trace.tailStart) {
      rep.push_back({"4-property", "unsettled", "no trigger"});
    } else {
      // The tail emits in gn order, so the last tail output bounds the
      // codes whose emission slot the run has actually passed.
      std::optional<SFormula> bound;
      for (std::size_t t = trace.g.size(); t-- > *trace.tailStart;)
        if (trace.g[t]) {
          bound = *trace.g[t];
          break;
        }
      if (!bound) {
        rep.push_back({"4-property", "unsettled", "empty tail window"});
      } else {
        const SGnLess less;
        std::string witness;
        bool any = false;
        for (const SFormula& phi : cand) {
          SFormula lit = SFormula::prLit(PrKind::Dagger, phi);
          if (less(*bound, lit)) continue;  // slot not reached by the horizon
          if (evalPr(PrfKind::Dagger, phi, trace, S, f).status !=
              PrStatus::True)
            continue;
          any = true;
          if (evalPr(PrfKind::Dagger, lit, trace, S, f).status !=
              PrStatus::True) {
            witness = phi.text();
            break;
          }
        }
        rep.push_back({"4-property",
                       !witness.empty() ? "fail" : (any ? "pass" : "unsettled"),
                       witness});
      }
    }
  }

  if (hasAxiomD(l)) {  // Switch-stage bookkeeping over the prefix.
    if (!trace.switchStage) {
      rep.push_back({"switch-bookkeeping", "unsettled", "no trigger"});
    } else {
      const std::size_t s = *trace.switchStage;
      std::string witness;
      // Replay: no earlier stage may already have carried a trigger
      // witness. This is the substance of the refuted-code bookkeeping:
      // every exception to the literal statements traces back to a stage
      // where the trigger search was still gated.
      std::set<std::string> pset;
      SFormulaSet codes;
      std::set<std::string> prev;
      SFormulaSet prevCodes;
      for (std::size_t t = 0; t < s; ++t) {
        if (witness.empty() && phiCore(t, pset, codes, f))
          witness = "trigger already available at stage " + std::to_string(t);
        if (t + 1 == s) {
          prev = pset;
          prevCodes = codes;
        }
        if (t < trace.g.size() && trace.g[t]) {
          const SFormula& e = *trace.g[t];
          pset.insert(e.ser());
          if (e.conn() == SConn::Neg && e.child().conn() == SConn::PrLit &&
              e.child().prKind() == PrKind::Dagger)
            codes.insert(e.child().target());
        }
      }
      // Refuted non-image codes available one stage before the switch:
      // unless a length gate interferes, their flipped star form must
      // already have been emitted (else the trigger would have fired).
      for (const SFormula& phi : prevCodes) {
        if (!witness.empty()) break;
        if (f.inImage(phi)) continue;
        if (phi.ser().size() + 1 > s) continue;  // outside the stage window
        const SFormula flip = sStarNormal(SFormula::lnot(phi));
        if (flip.conn() == SConn::PrLit && flip.prKind() == PrKind::Dagger)
          continue;  // a longer decode chain applies instead
        if (flip.ser().size() + 1 > s) continue;
        if (!prev.count(flip.ser())) witness = "(i) " + phi.text();
      }
      rep.push_back(
          {"switch-bookkeeping", witness.empty() ? "pass" : "fail", witness});
    }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// JSON.

nlohmann::json traceToJson(const StagedTrace& t) {
  nlohmann::json j;
  j["logic"] = logicName(t.logic);
  j["horizon"] = t.horizon;
  if (t.switchStage) j["switchStage"] = *t.switchStage;
  if (t.tailStart) j["tailStart"] = *t.tailStart;
  if (t.switchStage) {
    nlohmann::json trig;
    trig["type"] = t.phiTrigger ? "phi" : "j";
    if (t.phiTrigger) {
      trig["psi"] = t.phiTrigger->psi.text();
      trig["r"] = t.phiTrigger->r;
      nlohmann::json arr = nlohmann::json::array();
      for (const SFormula& s : t.phiTrigger->iteration) arr.push_back(s.text());
      trig["iteration"] = arr;
    }
    if (t.jWorld) trig["world"] = *t.jWorld;
    if (t.modelIndex) trig["modelIndex"] = *t.modelIndex;
    j["trigger"] = trig;
  }
  j["h"] = t.h;
  nlohmann::json g = nlohmann::json::array();
  nlohmann::json gText = nlohmann::json::array();
  for (const auto& e : t.g) {
    g.push_back(e ? sgn(*e).toDecimal() : "0");
    if (e)
      gText.push_back(e->text());
    else
      gText.push_back(nullptr);
  }
  j["g"] = g;
  j["gText"] = gText;
  nlohmann::json as = nlohmann::json::array();
  for (const TraceAssertion& a : t.assertions) {
    nlohmann::json e;
    e["claim"] = a.claim;
    e["status"] = a.status;
    if (!a.witness.empty()) e["witness"] = a.witness;
    as.push_back(e);
  }
  j["assertions"] = as;
  return j;
}

Scenario scenarioFromJson(const nlohmann::json& j) {
  Scenario sc;
  sc.logic = logicFromName(j.at("logic").get<std::string>());
  sc.horizon = j.at("horizon").get<std::size_t>();
  sc.simple = !hasAxiomD(sc.logic);
  if (j.contains("simple")) sc.simple = j["simple"].get<bool>();
  if (j.contains("library")) {
    const auto& lib = j["library"];
    if (lib.contains("count")) sc.libraryCount = lib["count"].get<std::size_t>();
    if (lib.contains("vars"))
      sc.libraryVars = lib["vars"].get<std::vector<std::string>>();
  }
  std::map<std::size_t, SFormula> script;
  if (j.contains("stream"))
    for (const auto& [stage, text] : j["stream"].items())
      script.emplace(std::stoul(stage), parseS(text.get<std::string>()));
  sc.stream = scriptedStream(std::move(script));
  return sc;
}

StagedTrace runScenario(const Scenario& sc, unsigned oracleDepth) {
  CountermodelLibrary lib = CountermodelLibrary::build(
      sc.logic, sc.libraryCount, sc.libraryVars, oracleDepth);
  StagedTrace tr = sc.simple
                       ? runStagedSimple(sc.logic, sc.stream, lib, sc.horizon)
                       : runStaged(sc.logic, sc.stream, lib, sc.horizon);
  tr.assertions = assertTraceClaims(tr, sc.logic);
  return tr;
}

}  // namespace nmodal
