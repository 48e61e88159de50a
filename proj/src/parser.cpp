#include "dppl/parser.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "dppl/dist.hpp"

namespace dppl {

std::string format_diagnostic(const Diagnostic& d, std::string_view filename) {
  return std::string(filename) + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
         d.severity + ": " + d.message;
}

ParseError::ParseError(Diagnostic d) : std::runtime_error(d.message), diag_(std::move(d)) {}

namespace {

enum class Tok {
  Ident,
  Number,
  Nat,  // integer right after a projection dot
  LParen,
  RParen,
  Comma,
  Dot,
  Colon,
  Equals,
  Semi,
  Plus,
  Minus,
  Star,
  Slash,
  Arrow,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  Effect effect = Effect::Det;  // for Arrow
  SourcePos pos;
};

const std::set<std::string, std::less<>> kKeywords = {
    "lam",   "let",    "in",      "if",     "then",   "else",        "assume",  "weight", "infer",
    "diffA", "diffP",  "diff1A",  "diff1P", "solve",  "observe",     "from",    "unroll", "iterate",
    "sin",   "cos",    "pdfGaussian", "pdfBeta", "wiener", "Gaussian", "Beta", "Wiener", "RealA",
    "RealP", "RealN",  "Dist"};

[[noreturn]] void fail(SourcePos pos, std::string msg) {
  throw ParseError(Diagnostic{"error", std::move(msg), pos.line, pos.column});
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool space = skip_space();
      SourcePos pos{line_, col_};
      if (i_ >= src_.size()) {
        out.push_back({Tok::End, "", 0.0, Effect::Det, pos});
        return out;
      }
      char c = src_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = i_;
        while (i_ < src_.size() && ident_char(src_[i_])) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), 0.0, Effect::Det, pos});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        bool after_proj = !out.empty() && out.back().kind == Tok::Dot && out.back().number == 1.0;
        out.push_back(after_proj ? nat(pos) : number(pos));
        continue;
      }
      advance();
      switch (c) {
        case '(': out.push_back({Tok::LParen, "(", 0, Effect::Det, pos}); break;
        case ')': out.push_back({Tok::RParen, ")", 0, Effect::Det, pos}); break;
        case ',': out.push_back({Tok::Comma, ",", 0, Effect::Det, pos}); break;
        case ':': out.push_back({Tok::Colon, ":", 0, Effect::Det, pos}); break;
        case '=': out.push_back({Tok::Equals, "=", 0, Effect::Det, pos}); break;
        case ';': out.push_back({Tok::Semi, ";", 0, Effect::Det, pos}); break;
        case '+': out.push_back({Tok::Plus, "+", 0, Effect::Det, pos}); break;
        case '*': out.push_back({Tok::Star, "*", 0, Effect::Det, pos}); break;
        case '/': out.push_back({Tok::Slash, "/", 0, Effect::Det, pos}); break;
        case '.': {
          // A dot glued to the previous token and followed by a digit is a
          // projection; the digits after it are then a bare index.
          bool glued = !space && !out.empty() &&
                       (out.back().kind == Tok::Ident || out.back().kind == Tok::RParen ||
                        out.back().kind == Tok::Nat) &&
                       i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]));
          out.push_back({Tok::Dot, ".", glued ? 1.0 : 0.0, Effect::Det, pos});
          break;
        }
        case '-': {
          if (i_ < src_.size() && src_[i_] == '>') {
            advance();
            std::size_t start = i_;
            while (i_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[i_]))) advance();
            std::string_view eff = src_.substr(start, i_ - start);
            if (eff == "det") {
              out.push_back({Tok::Arrow, "->det", 0, Effect::Det, pos});
            } else if (eff == "rnd") {
              out.push_back({Tok::Arrow, "->rnd", 0, Effect::Rnd, pos});
            } else {
              fail(pos, "arrow must be '->det' or '->rnd'");
            }
          } else {
            out.push_back({Tok::Minus, "-", 0, Effect::Det, pos});
          }
          break;
        }
        default: fail(pos, std::string("unexpected character '") + c + "'");
      }
    }
  }

 private:
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '%';
  }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  bool skip_space() {
    bool any = false;
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
      any = true;
    }
    return any;
  }

  Token nat(SourcePos pos) {
    std::size_t start = i_;
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    std::string text(src_.substr(start, i_ - start));
    return {Tok::Nat, text, std::strtod(text.c_str(), nullptr), Effect::Det, pos};
  }

  Token number(SourcePos pos) {
    std::size_t start = i_;
    auto digits = [&] {
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
    };
    digits();
    if (i_ < src_.size() && src_[i_] == '.' &&
        (i_ + 1 >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[i_ + 1])))) {
      advance();
      digits();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t save = i_;
      int save_col = col_;
      advance();
      if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) advance();
      if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
        digits();
      } else {
        i_ = save;
        col_ = save_col;
      }
    }
    std::string text(src_.substr(start, i_ - start));
    return {Tok::Number, text, std::strtod(text.c_str(), nullptr), Effect::Det, pos};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Binding patterns: a name or a (possibly nested) tuple of patterns.
struct Pattern {
  std::optional<Symbol> name;
  std::vector<Pattern> elems;
  SourcePos pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  TermPtr program() {
    TermPtr t = term();
    expect(Tok::End, "end of input");
    return t;
  }

  TypePtr whole_type() {
    TypePtr t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == kw;
  }

  const Token& expect(Tok k, std::string_view what) {
    if (!at(k)) fail(peek().pos, "expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail(peek().pos, "expected '" + std::string(kw) + "', found " + describe(peek()));
    next();
  }

  Symbol ident() {
    const Token& t = expect(Tok::Ident, "identifier");
    if (kKeywords.count(t.text)) fail(t.pos, "keyword '" + t.text + "' cannot be used as an identifier");
    return Symbol(t.text);
  }

  std::size_t literal_nat(std::string_view what) {
    const Token& t = peek();
    if ((t.kind != Tok::Number && t.kind != Tok::Nat) || t.number < 0 || std::floor(t.number) != t.number ||
        t.text.find_first_of(".eE") != std::string::npos) {
      fail(t.pos, std::string(what) + " must be a literal natural number");
    }
    next();
    return static_cast<std::size_t>(t.number);
  }

  Symbol fresh(std::string_view stem) {
    return Symbol(std::string(stem) + "%" + std::to_string(counter_++));
  }

  // ---- types

  TypePtr type() {
    TypePtr arg = btype();
    if (at(Tok::Arrow)) {
      Effect e = next().effect;
      return arrow_type(arg, e, type());
    }
    return arg;
  }

  TypePtr btype() {
    const Token& t = peek();
    if (t.kind == Tok::Ident) {
      if (t.text == "RealA") return next(), real_type(Coeffect::A);
      if (t.text == "RealP") return next(), real_type(Coeffect::P);
      if (t.text == "RealN") return next(), real_type(Coeffect::N);
      if (t.text == "Dist") return next(), dist_type(btype());
    }
    if (t.kind == Tok::LParen) {
      next();
      std::vector<TypePtr> elems;
      if (!at(Tok::RParen)) {
        elems.push_back(type());
        while (at(Tok::Comma)) {
          next();
          elems.push_back(type());
        }
      }
      expect(Tok::RParen, "')'");
      return tuple_type(std::move(elems));
    }
    fail(t.pos, "expected a type, found " + describe(t));
  }

  // ---- patterns

  Pattern pattern() {
    Pattern p;
    p.pos = peek().pos;
    if (at(Tok::LParen)) {
      next();
      p.elems.push_back(pattern());
      while (at(Tok::Comma)) {
        next();
        p.elems.push_back(pattern());
      }
      expect(Tok::RParen, "')'");
      if (p.elems.size() == 1) return std::move(p.elems.front());
      return p;
    }
    p.name = ident();
    return p;
  }

  // let-binds the components of `source` (a variable) according to `p`.
  TermPtr destructure(const Pattern& p, const TermPtr& source, TermPtr body) {
    if (p.name) return let_in(*p.name, source, std::move(body), nullptr, p.pos);
    std::vector<Symbol> names;
    for (std::size_t i = 0; i < p.elems.size(); ++i) {
      names.push_back(p.elems[i].name ? *p.elems[i].name : fresh("p"));
    }
    for (std::size_t i = p.elems.size(); i-- > 0;) {
      if (!p.elems[i].name) body = destructure(p.elems[i], var(names[i], p.pos), std::move(body));
    }
    for (std::size_t i = p.elems.size(); i-- > 0;) {
      body = let_in(names[i], proj(i + 1, source, p.elems.size(), p.pos), std::move(body), nullptr, p.pos);
    }
    return body;
  }

  // ---- terms

  TermPtr term() {
    SourcePos pos = peek().pos;
    TermPtr first = expr();
    if (at(Tok::Semi)) {
      next();
      return let_in(Symbol("_"), first, term(), nullptr, pos);
    }
    return first;
  }

  TermPtr expr() {
    SourcePos pos = peek().pos;
    if (at_kw("lam")) {
      next();
      Pattern p = pattern();
      expect(Tok::Colon, "':'");
      TypePtr annot = type();
      expect(Tok::Dot, "'.'");
      TermPtr body = term();
      if (p.name) return lam(*p.name, annot, body, pos);
      Symbol q = fresh("p");
      return lam(q, annot, destructure(p, var(q, pos), body), pos);
    }
    if (at_kw("let")) {
      next();
      Pattern p = pattern();
      TypePtr annot;
      if (at(Tok::Colon)) {
        next();
        annot = type();
      }
      expect(Tok::Equals, "'='");
      TermPtr bound = term();
      expect_kw("in");
      TermPtr body = term();
      if (p.name) return let_in(*p.name, bound, body, annot, pos);
      Symbol q = fresh("p");
      return let_in(q, bound, destructure(p, var(q, pos), body), annot, pos);
    }
    if (at_kw("if")) {
      next();
      TermPtr c = term();
      expect_kw("then");
      TermPtr a = term();
      expect_kw("else");
      TermPtr b = term();
      return make_term(If{c, a, b}, pos);
    }
    return arith();
  }

  TermPtr arith() {
    TermPtr lhs = product();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      SourcePos pos = peek().pos;
      PrimOp op = next().kind == Tok::Plus ? PrimOp::Add : PrimOp::Sub;
      lhs = prim(op, {lhs, product()}, pos);
    }
    return lhs;
  }

  TermPtr product() {
    TermPtr lhs = unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      SourcePos pos = peek().pos;
      PrimOp op = next().kind == Tok::Star ? PrimOp::Mul : PrimOp::Div;
      lhs = prim(op, {lhs, unary()}, pos);
    }
    return lhs;
  }

  TermPtr unary() {
    SourcePos pos = peek().pos;
    if (peek().kind != Tok::Ident) return appterm();
    const std::string& kw = peek().text;
    if (kw == "assume") return next(), make_term(Assume{aterm()}, pos);
    if (kw == "weight") return next(), make_term(Weight{aterm()}, pos);
    if (kw == "infer") return next(), make_term(Infer{aterm()}, pos);
    if (kw == "diffA" || kw == "diffP" || kw == "diff1A" || kw == "diff1P") {
      bool scalar = kw.size() == 6;
      Coeffect mode = kw.back() == 'A' ? Coeffect::A : Coeffect::P;
      next();
      TermPtr f = aterm();
      TermPtr p = aterm();
      TermPtr d = make_term(Diff{mode, f, p}, pos);
      return scalar ? app(d, real(1.0, pos), pos) : d;
    }
    if (kw == "solve") {
      next();
      TermPtr f = aterm();
      TermPtr y0 = aterm();
      TermPtr x1 = aterm();
      return make_term(Solve{f, y0, x1}, pos);
    }
    if (kw == "observe") {
      next();
      TermPtr obs = aterm();
      expect_kw("from");
      SourcePos dpos = peek().pos;
      TermPtr d = dist();
      const auto& dc = std::get<DistCon>(d->node);
      if (dc.dist == PrimDist::WienerProcess) fail(dpos, "cannot observe from Wiener(): it has no density");
      PrimOp op = dc.dist == PrimDist::Gaussian ? PrimOp::PdfGaussian : PrimOp::PdfBeta;
      return make_term(Weight{prim(op, {dc.params[0], dc.params[1], obs}, pos)}, pos);
    }
    if (kw == "unroll") {
      next();
      std::size_t n = literal_nat("unroll count");
      return unroll(n, pos);
    }
    if (kw == "iterate") {
      next();
      std::size_t n = literal_nat("iterate count");
      TermPtr f = aterm();
      TermPtr init = aterm();
      return iterate(n, f, init, pos);
    }
    return appterm();
  }

  // Instantiates the template once per index. A template written as a
  // lambda has its binder replaced by the index literal, which may also be
  // used as a projection index inside the body.
  TermPtr unroll(std::size_t n, SourcePos pos) {
    bool is_lambda = at(Tok::LParen) && at_kw("lam", 1) && peek(2).kind == Tok::Ident;
    if (!is_lambda) {
      TermPtr f = aterm();
      std::vector<TermPtr> elems;
      for (std::size_t i = 1; i <= n; ++i) elems.push_back(app(f, real(static_cast<double>(i), pos), pos));
      return tuple(std::move(elems), pos);
    }
    std::string binder = peek(2).text;
    std::size_t start = pos_;
    std::vector<TermPtr> elems;
    std::optional<std::size_t> saved;
    if (auto it = unroll_env_.find(binder); it != unroll_env_.end()) saved = it->second;
    for (std::size_t i = 1; i <= std::max<std::size_t>(n, 1); ++i) {
      pos_ = start;
      unroll_env_[binder] = i;
      TermPtr f = aterm();
      const auto* abs = f->as<Abs>();
      if (!abs) fail(pos, "unroll template must be a lambda");
      if (i <= n) elems.push_back(subst(abs->body, abs->param, real(static_cast<double>(i), pos)));
    }
    if (saved) {
      unroll_env_[binder] = *saved;
    } else {
      unroll_env_.erase(binder);
    }
    if (n == 0) return unit();
    return tuple(std::move(elems), pos);
  }

  // s0 = init; s_i = f i s_(i-1); result (s_1, ..., s_n).
  TermPtr iterate(std::size_t n, const TermPtr& f, const TermPtr& init, SourcePos pos) {
    std::vector<Symbol> states;
    for (std::size_t i = 0; i <= n; ++i) states.push_back(fresh("s"));
    std::vector<TermPtr> results;
    for (std::size_t i = 1; i <= n; ++i) results.push_back(var(states[i], pos));
    TermPtr body = n == 0 ? unit() : tuple(std::move(results), pos);
    for (std::size_t i = n; i >= 1; --i) {
      TermPtr step = app(app(f, real(static_cast<double>(i), pos), pos), var(states[i - 1], pos), pos);
      body = let_in(states[i], step, body, nullptr, pos);
    }
    return let_in(states[0], init, body, nullptr, pos);
  }

  bool starts_aterm() const {
    const Token& t = peek();
    if (t.kind == Tok::Number || t.kind == Tok::LParen) return true;
    if (t.kind != Tok::Ident) return false;
    static const std::set<std::string, std::less<>> starters = {
        "sin", "cos", "pdfGaussian", "pdfBeta", "wiener", "Gaussian", "Beta", "Wiener"};
    return !kKeywords.count(t.text) || starters.count(t.text);
  }

  TermPtr appterm() {
    SourcePos pos = peek().pos;
    TermPtr f = aterm();
    while (starts_aterm()) f = app(f, aterm(), pos);
    return f;
  }

  TermPtr aterm() {
    TermPtr t = atom();
    while (at(Tok::Dot)) {
      SourcePos pos = next().pos;
      std::size_t index = 0;
      if (at(Tok::Ident)) {
        auto it = unroll_env_.find(peek().text);
        if (it == unroll_env_.end()) fail(peek().pos, "projection index must be a literal natural number");
        next();
        index = it->second;
      } else {
        index = literal_nat("projection index");
      }
      if (index == 0) fail(pos, "projection index must be at least 1");
      t = proj(index, t, 0, pos);
    }
    return t;
  }

  std::vector<TermPtr> args() {
    expect(Tok::LParen, "'('");
    std::vector<TermPtr> out;
    if (!at(Tok::RParen)) {
      out.push_back(term());
      while (at(Tok::Comma)) {
        next();
        out.push_back(term());
      }
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  TermPtr dist() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    PrimDist d;
    if (at_kw("Gaussian")) {
      d = PrimDist::Gaussian;
    } else if (at_kw("Beta")) {
      d = PrimDist::Beta;
    } else if (at_kw("Wiener")) {
      d = PrimDist::WienerProcess;
    } else {
      fail(pos, "expected a distribution, found " + describe(t));
    }
    std::string name = t.text;
    next();
    auto ps = args();
    if (ps.size() != arity(d)) {
      fail(pos, name + " expects " + std::to_string(arity(d)) + " parameter(s), found " + std::to_string(ps.size()));
    }
    return make_term(DistCon{d, std::move(ps)}, pos);
  }

  double signed_literal() {
    bool neg = false;
    if (at(Tok::LParen) && peek(1).kind == Tok::Minus) {
      next();
      next();
      neg = true;
    }
    const Token& t = expect(Tok::Number, "number");
    double v = t.number;
    if (neg) expect(Tok::RParen, "')'");
    return neg ? -v : v;
  }

  TermPtr atom() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case Tok::Number:
        next();
        return real(t.number, pos);
      case Tok::LParen: {
        next();
        if (at(Tok::Minus) && peek(1).kind == Tok::Number && peek(2).kind == Tok::RParen) {
          next();
          double v = -next().number;
          next();
          return real(v, pos);
        }
        std::vector<TermPtr> elems;
        if (!at(Tok::RParen)) {
          elems.push_back(term());
          while (at(Tok::Comma)) {
            next();
            elems.push_back(term());
          }
        }
        expect(Tok::RParen, "')'");
        return tuple(std::move(elems), pos);
      }
      case Tok::Ident: break;
      default: fail(pos, "expected a term, found " + describe(t));
    }
    const std::string& name = t.text;
    static const std::map<std::string, PrimOp, std::less<>> prims = {
        {"sin", PrimOp::Sin},
        {"cos", PrimOp::Cos},
        {"pdfGaussian", PrimOp::PdfGaussian},
        {"pdfBeta", PrimOp::PdfBeta}};
    if (auto it = prims.find(name); it != prims.end()) {
      next();
      auto as = args();
      if (as.size() != arity(it->second)) {
        fail(pos, name + " expects " + std::to_string(arity(it->second)) + " argument(s), found " +
                      std::to_string(as.size()));
      }
      return prim(it->second, std::move(as), pos);
    }
    if (name == "wiener") {
      next();
      expect(Tok::LParen, "'('");
      double handle = signed_literal();
      expect(Tok::Comma, "','");
      TermPtr x = term();
      expect(Tok::RParen, "')'");
      return make_term(PrimApp{PrimFn{PrimOp::Wiener, std::make_shared<const WienerPath>(handle)}, {x}}, pos);
    }
    if (name == "Gaussian" || name == "Beta" || name == "Wiener") return dist();
    return var(ident(), pos);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int counter_ = 0;
  std::map<std::string, std::size_t, std::less<>> unroll_env_;
};

bool core_list(const std::vector<TermPtr>& ts);

bool core(const TermPtr& t, bool let_position) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var> || std::is_same_v<T, RealLit>) {
          return true;
        } else if constexpr (std::is_same_v<T, Abs>) {
          return (n.annot || let_position) && core(n.body, false);
        } else if constexpr (std::is_same_v<T, App>) {
          return core(n.fn, true) && core(n.arg, false);
        } else if constexpr (std::is_same_v<T, PrimApp>) {
          return core_list(n.args);
        } else if constexpr (std::is_same_v<T, TupleCon>) {
          return n.elems.size() != 1 && core_list(n.elems);
        } else if constexpr (std::is_same_v<T, Proj>) {
          return n.index >= 1 && (n.arity == 0 || n.index <= n.arity) && core(n.tuple, false);
        } else if constexpr (std::is_same_v<T, If>) {
          return core(n.cond, false) && core(n.then_branch, false) && core(n.else_branch, false);
        } else if constexpr (std::is_same_v<T, DistCon>) {
          return n.params.size() == arity(n.dist) && core_list(n.params);
        } else if constexpr (std::is_same_v<T, Assume>) {
          return core(n.dist, false);
        } else if constexpr (std::is_same_v<T, Weight>) {
          return core(n.arg, false);
        } else if constexpr (std::is_same_v<T, Infer>) {
          return core(n.model, false);
        } else if constexpr (std::is_same_v<T, Diff>) {
          return n.mode != Coeffect::N && core(n.fn, false) && core(n.point, false);
        } else if constexpr (std::is_same_v<T, Solve>) {
          return core(n.rhs, false) && core(n.init, false) && core(n.end, false);
        } else {
          return false;
        }
      },
      t->node);
}

bool core_list(const std::vector<TermPtr>& ts) {
  for (const auto& t : ts) {
    if (!core(t, false)) return false;
  }
  return true;
}

}  // namespace

TermPtr parse(const SourceProgram& src) {
  Parser p(Lexer(src.text).run());
  return p.program();
}

TermPtr parse(std::string_view text) { return parse(SourceProgram{std::string(text)}); }

TypePtr parse_type(std::string_view text) {
  Parser p(Lexer(text).run());
  return p.whole_type();
}

bool is_core(const TermPtr& t) { return core(t, false); }

}  // namespace dppl
