#include "hardymean/funcdsl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace hardymean::dsl {

struct FunctionExpr::Node {
  enum class Kind {
    number,
    var,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    exp,
    ln,
    sqrt,
    abs,
    indicator,
    piecewise,
  };

  Kind kind{};
  double number = 0;
  double lo = 0, hi = 0;  // indicator bounds
  std::vector<std::shared_ptr<const Node>> kids;
  // piecewise: clauses[i] is the half-open interval [lo, hi) guarding
  // kids[i]; kids.back() is the default branch.
  std::vector<std::pair<double, double>> clauses;
};

namespace {

using Node = FunctionExpr::Node;
using Kind = Node::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::number;
  n->number = v;
  return n;
}

NodePtr make_unary(Kind k, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids.push_back(std::move(a));
  return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids.push_back(std::move(a));
  n->kids.push_back(std::move(b));
  return n;
}

[[noreturn]] void domain_err(const std::string& what, double at) {
  throw EvalError(EvalErrorKind::domain, what, at);
}

[[noreturn]] void range_err(const std::string& what, double at) {
  throw EvalError(EvalErrorKind::range, what, at);
}

double check_finite(double v, const char* op, double at) {
  if (!std::isfinite(v))
    range_err(std::string(op) + " overflowed to a non-finite value", at);
  return v;
}

double eval_node(const Node& n, double x) {
  switch (n.kind) {
    case Kind::number:
      return n.number;
    case Kind::var:
      return x;
    case Kind::add:
      return check_finite(eval_node(*n.kids[0], x) + eval_node(*n.kids[1], x),
                          "+", x);
    case Kind::sub:
      return check_finite(eval_node(*n.kids[0], x) - eval_node(*n.kids[1], x),
                          "-", x);
    case Kind::mul:
      return check_finite(eval_node(*n.kids[0], x) * eval_node(*n.kids[1], x),
                          "*", x);
    case Kind::div: {
      double den = eval_node(*n.kids[1], x);
      if (den == 0) domain_err("division by zero", x);
      return check_finite(eval_node(*n.kids[0], x) / den, "/", x);
    }
    case Kind::pow: {
      double base = eval_node(*n.kids[0], x);
      double expo = eval_node(*n.kids[1], x);
      if (base == 0) {
        if (expo > 0) return 0;
        if (expo == 0) return 1;
        domain_err("0 raised to a negative power", x);
      }
      if (base < 0) {
        double ip;
        if (std::modf(expo, &ip) != 0)
          domain_err("negative base with non-integer exponent", x);
      }
      return check_finite(std::pow(base, expo), "^", x);
    }
    case Kind::neg:
      return -eval_node(*n.kids[0], x);
    case Kind::exp:
      return check_finite(std::exp(eval_node(*n.kids[0], x)), "exp", x);
    case Kind::ln: {
      double v = eval_node(*n.kids[0], x);
      if (v <= 0) domain_err("ln of a non-positive value", x);
      return std::log(v);
    }
    case Kind::sqrt: {
      double v = eval_node(*n.kids[0], x);
      if (v < 0) domain_err("sqrt of a negative value", x);
      return std::sqrt(v);
    }
    case Kind::abs:
      return std::abs(eval_node(*n.kids[0], x));
    case Kind::indicator:
      return (x > n.lo && x < n.hi) ? 1.0 : 0.0;
    case Kind::piecewise: {
      for (size_t i = 0; i < n.clauses.size(); ++i) {
        if (x >= n.clauses[i].first && x < n.clauses[i].second)
          return eval_node(*n.kids[i], x);
      }
      return eval_node(*n.kids.back(), x);
    }
  }
  domain_err("corrupt expression node", x);
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen,
                 rparen, comma, end };

struct Token {
  Tok type = Tok::end;
  double number = 0;
  std::string ident;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) {
      cur_.type = Tok::end;
      return;
    }
    char c = src_[pos_];
    // UTF-8 minus sign (U+2212) is accepted as '-'.
    if (c == '\xe2' && pos_ + 2 < src_.size() && src_[pos_ + 1] == '\x88' &&
        src_[pos_ + 2] == '\x92') {
      bump(3);
      cur_.type = Tok::minus;
      return;
    }
    switch (c) {
      case '+': bump(1); cur_.type = Tok::plus; return;
      case '-': bump(1); cur_.type = Tok::minus; return;
      case '*': bump(1); cur_.type = Tok::star; return;
      case '/': bump(1); cur_.type = Tok::slash; return;
      case '^': bump(1); cur_.type = Tok::caret; return;
      case '(': bump(1); cur_.type = Tok::lparen; return;
      case ')': bump(1); cur_.type = Tok::rparen; return;
      case ',': bump(1); cur_.type = Tok::comma; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        bump(1);
      cur_.type = Tok::ident;
      cur_.ident = std::string(src_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_,
                     col_);
  }

  void lex_number() {
    size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_])))
      bump(1);
    if (pos_ < src_.size() && src_[pos_] == '.') {
      bump(1);
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump(1);
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t mark = pos_;
      bump(1);
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        bump(1);
      if (pos_ < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[pos_])))
          bump(1);
      } else {
        pos_ = mark;  // trailing 'e' belongs to an identifier, not this number
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    char* endp = nullptr;
    double v = std::strtod(text.c_str(), &endp);
    if (endp != text.c_str() + text.size() || !std::isfinite(v))
      throw ParseError("malformed number '" + text + "'", line_, cur_.col);
    cur_.type = Tok::number;
    cur_.number = v;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump(1);
      } else {
        break;
      }
    }
  }

  void bump(int n) {
    pos_ += n;
    col_ += n;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.type != Tok::end)
      throw ParseError("trailing input after expression", t.line, t.col);
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      Tok t = lex_.peek().type;
      if (t == Tok::plus || t == Tok::minus) {
        lex_.take();
        NodePtr rhs = parse_term();
        lhs = make_binary(t == Tok::plus ? Kind::add : Kind::sub,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      Tok t = lex_.peek().type;
      if (t == Tok::star || t == Tok::slash) {
        lex_.take();
        NodePtr rhs = parse_unary();
        lhs = make_binary(t == Tok::star ? Kind::mul : Kind::div,
                          std::move(lhs), std::move(rhs));
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (lex_.peek().type == Tok::minus) {
      lex_.take();
      NodePtr inner = parse_unary();
      // Fold negated literals so that "-0.49" round-trips structurally.
      if (inner->kind == Kind::number) return make_number(-inner->number);
      return make_unary(Kind::neg, std::move(inner));
    }
    return parse_factor();
  }

  NodePtr parse_factor() {
    NodePtr base = parse_atom();
    if (lex_.peek().type == Tok::caret) {
      lex_.take();
      NodePtr expo = parse_factor();  // right-associative
      return make_binary(Kind::pow, std::move(base), std::move(expo));
    }
    return base;
  }

  NodePtr parse_atom() {
    Token t = lex_.take();
    switch (t.type) {
      case Tok::number:
        return make_number(t.number);
      case Tok::lparen: {
        NodePtr e = parse_expr();
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::ident:
        return parse_ident(t);
      default:
        throw ParseError("expected a number, 'x', a function call or '('",
                         t.line, t.col);
    }
  }

  NodePtr parse_ident(const Token& t) {
    if (t.ident == "x") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::var;
      return n;
    }
    static const struct { const char* name; Kind kind; } unary_funcs[] = {
        {"exp", Kind::exp}, {"ln", Kind::ln}, {"sqrt", Kind::sqrt},
        {"abs", Kind::abs}};
    for (const auto& uf : unary_funcs) {
      if (t.ident == uf.name) {
        expect(Tok::lparen, "'('");
        NodePtr arg = parse_expr();
        expect(Tok::rparen, "')'");
        return make_unary(uf.kind, std::move(arg));
      }
    }
    if (t.ident == "indicator") return parse_indicator(t);
    if (t.ident == "piecewise") return parse_piecewise(t);
    throw ParseError("unknown identifier '" + t.ident + "'", t.line, t.col);
  }

  NodePtr parse_indicator(const Token& at) {
    expect(Tok::lparen, "'('");
    double lo = parse_const_value("indicator lower bound");
    expect(Tok::comma, "','");
    double hi = parse_const_value("indicator upper bound");
    expect(Tok::rparen, "')'");
    if (!(lo < hi))
      throw ParseError("indicator bounds must satisfy a < b", at.line, at.col);
    auto n = std::make_shared<Node>();
    n->kind = Kind::indicator;
    n->lo = lo;
    n->hi = hi;
    return n;
  }

  // piecewise((in(a,b), expr), ..., default)
  NodePtr parse_piecewise(const Token& at) {
    expect(Tok::lparen, "'('");
    auto n = std::make_shared<Node>();
    n->kind = Kind::piecewise;
    bool have_default = false;
    while (true) {
      if (lex_.peek().type == Tok::lparen && clause_ahead()) {
        lex_.take();  // '('
        Token kw = lex_.take();
        if (kw.type != Tok::ident || kw.ident != "in")
          throw ParseError("expected interval condition 'in(a,b)'", kw.line,
                           kw.col);
        expect(Tok::lparen, "'('");
        double lo = parse_const_value("interval lower bound");
        expect(Tok::comma, "','");
        double hi = parse_const_value("interval upper bound");
        expect(Tok::rparen, "')'");
        if (!(lo < hi))
          throw ParseError("interval bounds must satisfy a < b", kw.line,
                           kw.col);
        expect(Tok::comma, "','");
        NodePtr branch = parse_expr();
        expect(Tok::rparen, "')'");
        n->clauses.emplace_back(lo, hi);
        n->kids.push_back(std::move(branch));
      } else {
        NodePtr branch = parse_expr();
        n->kids.push_back(std::move(branch));
        have_default = true;
      }
      Token sep = lex_.take();
      if (sep.type == Tok::rparen) break;
      if (sep.type != Tok::comma)
        throw ParseError("expected ',' or ')' in piecewise", sep.line,
                         sep.col);
      if (have_default)
        throw ParseError("piecewise default must be the last argument",
                         sep.line, sep.col);
    }
    if (!have_default)
      throw ParseError("piecewise requires a default expression", at.line,
                       at.col);
    if (n->clauses.empty())
      throw ParseError("piecewise requires at least one (in(a,b), expr) clause",
                       at.line, at.col);
    return n;
  }

  // Distinguishes a clause "(in(" from a parenthesized default expression.
  bool clause_ahead() {
    // The lexer has no lookahead; cheapest correct approach is to re-lex
    // from the current token onwards.  Clause heads are exactly "( in (".
    Lexer probe = lex_;
    probe.take();  // '('
    Token t1 = probe.take();
    if (t1.type != Tok::ident || t1.ident != "in") return false;
    return probe.take().type == Tok::lparen;
  }

  double parse_const_value(const char* what) {
    const Token& at = lex_.peek();
    NodePtr e = parse_expr();
    if (contains_var(*e))
      throw ParseError(std::string(what) + " must be a constant expression",
                       at.line, at.col);
    try {
      return eval_node(*e, 1.0);
    } catch (const EvalError& err) {
      throw ParseError(std::string(what) + " failed to evaluate: " +
                           err.what(),
                       at.line, at.col);
    }
  }

  static bool contains_var(const Node& n) {
    if (n.kind == Kind::var) return true;
    for (const auto& k : n.kids)
      if (contains_var(*k)) return true;
    return false;
  }

  void expect(Tok type, const char* what) {
    Token t = lex_.take();
    if (t.type != type)
      throw ParseError(std::string("expected ") + what, t.line, t.col);
  }

  Lexer lex_;
};

// ---------------------------------------------------------------------------
// Printer

enum Prec { kPrecAdd = 1, kPrecMul = 2, kPrecUnary = 3, kPrecPow = 4,
            kPrecAtom = 5 };

int node_prec(const Node& n) {
  switch (n.kind) {
    case Kind::add:
    case Kind::sub:
      return kPrecAdd;
    case Kind::mul:
    case Kind::div:
      return kPrecMul;
    case Kind::neg:
      return kPrecUnary;
    case Kind::pow:
      return kPrecPow;
    default:
      return kPrecAtom;
  }
}

void print_node(const Node& n, std::string& out, int parent_prec);

void print_wrapped(const Node& n, std::string& out, int parent_prec,
                   int my_prec) {
  if (my_prec < parent_prec) {
    out += '(';
    print_node(n, out, 0);
    out += ')';
  } else {
    print_node(n, out, parent_prec);
  }
}

void print_node(const Node& n, std::string& out, int parent_prec) {
  switch (n.kind) {
    case Kind::number: {
      if (n.number < 0 && parent_prec > kPrecAdd) {
        out += '(';
        out += format_double(n.number);
        out += ')';
      } else {
        out += format_double(n.number);
      }
      return;
    }
    case Kind::var:
      out += 'x';
      return;
    case Kind::add:
    case Kind::sub: {
      bool wrap = parent_prec > kPrecAdd;
      if (wrap) out += '(';
      print_node(*n.kids[0], out, kPrecAdd);
      out += (n.kind == Kind::add) ? '+' : '-';
      print_node(*n.kids[1], out, kPrecAdd + 1);
      if (wrap) out += ')';
      return;
    }
    case Kind::mul:
    case Kind::div: {
      bool wrap = parent_prec > kPrecMul;
      if (wrap) out += '(';
      print_node(*n.kids[0], out, kPrecMul);
      out += (n.kind == Kind::mul) ? '*' : '/';
      print_node(*n.kids[1], out, kPrecMul + 1);
      if (wrap) out += ')';
      return;
    }
    case Kind::neg: {
      bool wrap = parent_prec > kPrecUnary;
      if (wrap) out += '(';
      out += '-';
      print_node(*n.kids[0], out, kPrecUnary);
      if (wrap) out += ')';
      return;
    }
    case Kind::pow: {
      // Base must be an atom; exponent needs parens unless it is a
      // non-negative literal, 'x', or another atom-level node.
      print_wrapped(*n.kids[0], out, kPrecAtom, node_prec(*n.kids[0]));
      out += '^';
      const Node& e = *n.kids[1];
      bool plain = (e.kind == Kind::number && e.number >= 0) ||
                   e.kind == Kind::var || node_prec(e) == kPrecAtom;
      if (plain) {
        print_node(e, out, kPrecAtom);
      } else {
        out += '(';
        print_node(e, out, 0);
        out += ')';
      }
      return;
    }
    case Kind::exp:
    case Kind::ln:
    case Kind::sqrt:
    case Kind::abs: {
      const char* name = n.kind == Kind::exp    ? "exp"
                         : n.kind == Kind::ln   ? "ln"
                         : n.kind == Kind::sqrt ? "sqrt"
                                                : "abs";
      out += name;
      out += '(';
      print_node(*n.kids[0], out, 0);
      out += ')';
      return;
    }
    case Kind::indicator:
      out += "indicator(";
      out += format_double(n.lo);
      out += ',';
      out += format_double(n.hi);
      out += ')';
      return;
    case Kind::piecewise: {
      out += "piecewise(";
      for (size_t i = 0; i < n.clauses.size(); ++i) {
        out += "(in(";
        out += format_double(n.clauses[i].first);
        out += ',';
        out += format_double(n.clauses[i].second);
        out += "),";
        print_node(*n.kids[i], out, 0);
        out += "),";
      }
      print_node(*n.kids.back(), out, 0);
      out += ')';
      return;
    }
  }
}

void collect_breakpoints(const Node& n, std::vector<double>& out) {
  if (n.kind == Kind::indicator) {
    out.push_back(n.lo);
    out.push_back(n.hi);
  } else if (n.kind == Kind::piecewise) {
    for (const auto& c : n.clauses) {
      out.push_back(c.first);
      out.push_back(c.second);
    }
  }
  for (const auto& k : n.kids) collect_breakpoints(*k, out);
}

}  // namespace

FunctionExpr::FunctionExpr(std::shared_ptr<const Node> root)
    : root_(std::move(root)) {}

FunctionExpr FunctionExpr::parse(std::string_view source) {
  Parser p(source);
  return FunctionExpr(p.parse_all());
}

FunctionExpr FunctionExpr::constant(double value) {
  return FunctionExpr(make_number(value));
}

double FunctionExpr::eval(double x) const {
  if (!std::isfinite(x))
    throw EvalError(EvalErrorKind::domain, "evaluation point is not finite",
                    x);
  return eval_node(*root_, x);
}

std::string FunctionExpr::str() const {
  std::string out;
  print_node(*root_, out, 0);
  return out;
}

std::vector<double> FunctionExpr::breakpoints() const {
  std::vector<double> pts;
  collect_breakpoints(*root_, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

bool FunctionExpr::is_constant() const {
  struct Walk {
    static bool no_var(const Node& n) {
      if (n.kind == Kind::var) return false;
      for (const auto& k : n.kids)
        if (!no_var(*k)) return false;
      return true;
    }
  };
  return Walk::no_var(*root_);
}

double derivative(const FunctionExpr& f, double x, int order, double step) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative order must be 1 or 2");
  if (!(step > 0)) throw std::invalid_argument("derivative step must be > 0");
  double h = step * std::max(std::abs(x), 1.0);
  if (order == 1) return (f.eval(x + h) - f.eval(x - h)) / (2 * h);
  return (f.eval(x + h) - 2 * f.eval(x) + f.eval(x - h)) / (h * h);
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace hardymean::dsl
