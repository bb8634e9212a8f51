#include "mps/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace mps {

ParseError::ParseError(std::string c, Span s, const std::string& msg)
    : std::runtime_error(std::to_string(s.line) + ":" + std::to_string(s.col) + ": " + msg),
      code(std::move(c)),
      span(s) {}

namespace {

enum class Tok { Ident, Int, Str, Sym, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t value = 0;
  Span span;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* kSyms[] = {"==>", "::", "=>", "->", "-o", "==", "!=", "<=", ">=", "&&", "||"};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.span = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError("parse-error", t.span, "integer literal out of range");
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      for (;;) {
        if (i >= src.size()) throw ParseError("parse-error", t.span, "unterminated string");
        char d = src[i];
        if (d == '"') break;
        if (d == '\\') {
          if (i + 1 >= src.size() || (src[i + 1] != '"' && src[i + 1] != '\\'))
            throw ParseError("parse-error", Span{line, col}, "unsupported escape");
          s += src[i + 1];
          advance(2);
          continue;
        }
        s += d;
        advance(1);
      }
      advance(1);
      t.kind = Tok::Str;
      t.text = std::move(s);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* sym : kSyms) {
      std::size_t n = std::char_traits<char>::length(sym);
      if (src.compare(i, n, sym) != 0) continue;
      if (std::string(sym) == "-o" && i + 2 < src.size() &&
          (std::isalnum(static_cast<unsigned char>(src[i + 2])) || src[i + 2] == '_'))
        continue;
      t.kind = Tok::Sym;
      t.text = sym;
      advance(n);
      matched = true;
      break;
    }
    if (matched) {
      out.push_back(t);
      continue;
    }
    if (std::string("(){}[]<>,;:.=+-*/!|^").find(c) == std::string::npos)
      throw ParseError("parse-error", t.span, std::string("unexpected character '") + c + "'");
    t.kind = Tok::Sym;
    t.text = std::string(1, c);
    advance(1);
    out.push_back(t);
  }
  Token eof;
  eof.span = {line, col};
  out.push_back(eof);
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "protocol", "roles", "universe", "def",   "main",   "let",    "in",     "if",
      "then",     "else",  "case",     "of",    "inl",    "inr",    "lam",    "fix",
      "tlam",     "fn",    "forall",   "exists", "msg",   "end",    "quan",   "branch",
      "chan",     "sum",   "guard",    "unguard", "assert", "pack", "fst",    "snd",
      "true",     "false", "unit",     "int",   "bool",   "string", "full",   "union",
      "dunion",   "inter", "minus",    "compl", "subset", "ite",    "neg",    "notin",
      "thread",   "channel"};
  return k;
}

template <class T>
std::shared_ptr<const T> at(std::shared_ptr<const T> p, Span s) {
  auto q = std::make_shared<T>(*p);
  q->span = s;
  return q;
}

class Parser {
 public:
  Parser(const std::string& text, bool pool_mode) : toks_(lex(text)), pool_mode_(pool_mode) {}

  Program program() {
    while (!at_eof()) {
      if (is_kw("protocol")) {
        protocol();
      } else if (is_kw("def")) {
        Span s = next().span;
        std::string name = ident();
        expect("=");
        dyn_scope_.clear();
        static_scope_.clear();
        TermPtr body = expr();
        end_item();
        if (std::count(defs_.begin(), defs_.end(), name))
          throw ParseError("parse-error", s, "duplicate definition '" + name + "'");
        prog_.defs.push_back({name, body, s});
        defs_.push_back(name);
      } else if (is_kw("main")) {
        Span s = next().span;
        expect("=");
        if (prog_.main) throw ParseError("parse-error", s, "duplicate main");
        dyn_scope_.clear();
        static_scope_.clear();
        prog_.main = expr();
        end_item();
      } else if (pool_mode_ && is_kw("channel")) {
        next();
        Token t = peek();
        ChannelId id = channel_name();
        expect(":");
        static_scope_.clear();
        StaticPtr s = stat(0);
        end_item();
        if (pool_.channels.count(id)) throw ParseError("parse-error", t.span, "duplicate channel");
        pool_.channels[id] = s;
      } else if (pool_mode_ && is_kw("thread")) {
        Token t = next();
        Token n = next();
        if (n.kind != Tok::Int) throw ParseError("parse-error", n.span, "expected thread id");
        expect("=");
        dyn_scope_.clear();
        static_scope_.clear();
        TermPtr body = expr();
        end_item();
        if (pool_.threads.count(static_cast<int>(n.value)))
          throw ParseError("parse-error", t.span, "duplicate thread");
        pool_.threads[static_cast<int>(n.value)] = body;
      } else {
        fail("expected 'protocol', 'def' or 'main'");
      }
    }
    if (!prog_.main && !pool_mode_) prog_.main = dy::unit();
    return prog_;
  }

  PoolFile pool() {
    pool_.program = program();
    return pool_;
  }

  StaticPtr single_static() {
    StaticPtr s = stat(0);
    if (!at_eof()) fail("unexpected trailing input");
    return s;
  }

  TermPtr single_term() {
    for (const auto& d : prog_.defs) defs_.push_back(d.name);
    TermPtr t = expr();
    if (!at_eof()) fail("unexpected trailing input");
    return t;
  }

  void set_context(const Program& p) { prog_ = p; }

 private:
  // ------------------------------------------------------------ tokens
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_eof() const { return peek().kind == Tok::Eof; }
  bool is_sym(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_kw(const char* s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  bool accept(const char* s) {
    if (is_sym(s) || is_kw(s)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == Tok::Eof ? "end of input" : "'" + t.text + "'";
    throw ParseError("parse-error", t.span, msg + " at " + near);
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected '") + s + "'");
  }
  std::string ident() {
    if (peek().kind != Tok::Ident || keywords().count(peek().text)) fail("expected identifier");
    return next().text;
  }
  std::string binder() {
    std::string n = ident();
    if (api_from_name(n)) throw ParseError("parse-error", peek().span, "'" + n + "' is reserved");
    return n;
  }
  bool item_start(std::size_t k) const {
    const Token& t = peek(k);
    if (t.kind == Tok::Eof) return true;
    if (t.kind != Tok::Ident) return false;
    return t.text == "protocol" || t.text == "def" || t.text == "main" ||
           (pool_mode_ && (t.text == "thread" || t.text == "channel"));
  }
  void end_item() {
    expect(";");
    if (!item_start(0)) fail("expected end of item");
  }

  ChannelId channel_name() {
    Token t = next();
    if (t.kind != Tok::Ident || t.text.size() < 2 || t.text[0] != 'c' ||
        !std::all_of(t.text.begin() + 1, t.text.end(), ::isdigit))
      throw ParseError("parse-error", t.span, "expected channel name such as c0");
    return std::stoi(t.text.substr(1));
  }

  // ------------------------------------------------------------ sorts
  SortPtr sort() {
    SortPtr dom;
    if (accept("(")) {
      dom = sort();
      expect(")");
    } else {
      Token t = next();
      if (t.kind != Tok::Ident) throw ParseError("parse-error", t.span, "expected sort");
      if (t.text == "int") dom = sort_int();
      else if (t.text == "bool") dom = sort_bool();
      else if (t.text == "set") dom = sort_set();
      else if (t.text == "stype") dom = sort_stype();
      else if (t.text == "type") dom = sort_type();
      else if (t.text == "vtype") dom = sort_vtype();
      else throw ParseError("parse-error", t.span, "unknown sort '" + t.text + "'");
    }
    if (accept("->")) return Sort::arrow(dom, sort());
    return dom;
  }

  // ------------------------------------------------------------ protocols
  void protocol() {
    Span s = next().span;
    ProtocolDecl d;
    d.span = s;
    d.name = ident();
    if (prog_.find_protocol(d.name))
      throw ParseError("parse-error", s, "duplicate protocol '" + d.name + "'");
    static_scope_.clear();
    if (accept("(")) {
      do {
        std::string p = ident();
        expect(":");
        d.params.emplace_back(p, sort());
        static_scope_.push_back(p);
      } while (accept(","));
      expect(")");
    }
    if (accept("roles")) {
      do {
        Token n = peek();
        std::string alias = ident();
        expect("=");
        int v = static_cast<int>(signed_int());
        auto it = prog_.role_aliases.find(alias);
        if (it != prog_.role_aliases.end() && it->second != v)
          throw ParseError("parse-error", n.span, "role alias '" + alias + "' redefined");
        prog_.role_aliases[alias] = v;
        d.roles.emplace_back(alias, v);
      } while (accept(","));
    }
    expect("universe");
    d.universe = role_literal();
    expect("=");
    // Registered before its body so that the body may refer to it.
    prog_.protocols.push_back(std::move(d));
    StaticPtr def = stat(0);
    prog_.protocols.back().def = def;
    end_item();
    static_scope_.clear();
  }

  std::int64_t signed_int() {
    bool neg = accept("-");
    Token t = next();
    if (t.kind != Tok::Int) throw ParseError("parse-error", t.span, "expected integer");
    return neg ? -t.value : t.value;
  }

  std::vector<int> role_literal() {
    expect("{");
    std::vector<int> roles;
    if (!is_sym("}")) {
      do {
        if (peek().kind == Tok::Ident) {
          Token t = next();
          auto it = prog_.role_aliases.find(t.text);
          if (it == prog_.role_aliases.end())
            throw ParseError("unbound-name", t.span, "unknown role '" + t.text + "'");
          roles.push_back(it->second);
        } else {
          roles.push_back(static_cast<int>(signed_int()));
        }
      } while (accept(","));
    }
    expect("}");
    std::sort(roles.begin(), roles.end());
    roles.erase(std::unique(roles.begin(), roles.end()), roles.end());
    return roles;
  }

  // ------------------------------------------------------------ statics
  bool static_bound(const std::string& n) const {
    return std::find(static_scope_.rbegin(), static_scope_.rend(), n) != static_scope_.rend();
  }

  std::optional<std::vector<int>> universe_of(const StaticPtr& session) const {
    const Static* h = session.get();
    while (h->kind == SKind::App) h = h->kids[0].get();
    if (h->kind == SKind::Proto) {
      if (const ProtocolDecl* d = prog_.find_protocol(h->name)) return d->universe;
    }
    return std::nullopt;
  }

  std::vector<StaticPtr> static_args(std::size_t n) {
    expect("(");
    std::vector<StaticPtr> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) expect(",");
      out.push_back(stat(0));
    }
    expect(")");
    return out;
  }

  StaticPtr bin(SOp op, StaticPtr a, StaticPtr b, Span s) {
    return at(st::op(op, {std::move(a), std::move(b)}), s);
  }

  // Levels: 0 binders, 1 arrows, 2 ==>, 3 ||, 4 &&, 5 relations, 6 additive,
  // 7 multiplicative, 8 unary, 9 application.
  StaticPtr stat(int level) {
    Span s = peek().span;
    switch (level) {
      case 0:
      case 1: {
        StaticPtr l = stat(2);
        if (is_sym("->") || is_sym("-o")) {
          bool linear = next().text == "-o";
          return at(st::fun(l, stat(1), linear), s);
        }
        return l;
      }
      case 2: {
        StaticPtr l = stat(3);
        if (accept("==>")) return bin(SOp::Imp, l, stat(2), s);
        return l;
      }
      case 3: {
        StaticPtr l = stat(4);
        while (accept("||")) l = bin(SOp::Or, l, stat(4), s);
        return l;
      }
      case 4: {
        StaticPtr l = stat(5);
        while (accept("&&")) l = bin(SOp::And, l, stat(5), s);
        return l;
      }
      case 5: {
        StaticPtr l = stat(6);
        static const std::pair<const char*, SOp> rels[] = {
            {"==", SOp::Eq}, {"!=", SOp::Neq}, {"<=", SOp::Le},  {">=", SOp::Ge},
            {"<", SOp::Lt},  {">", SOp::Gt},   {"in", SOp::In}, {"notin", SOp::NotIn}};
        for (const auto& [txt, op] : rels) {
          if (is_sym(txt) || is_kw(txt)) {
            next();
            return bin(op, l, stat(6), s);
          }
        }
        return l;
      }
      case 6: {
        StaticPtr l = stat(7);
        for (;;) {
          if (accept("+")) l = bin(SOp::Add, l, stat(7), s);
          else if (accept("-")) l = bin(SOp::Sub, l, stat(7), s);
          else return l;
        }
      }
      case 7: {
        StaticPtr l = stat(8);
        for (;;) {
          if (accept("*")) l = bin(SOp::Mul, l, stat(8), s);
          else if (accept("/")) l = bin(SOp::Div, l, stat(8), s);
          else return l;
        }
      }
      case 8: {
        if (accept("!")) return at(st::op(SOp::Not, {stat(8)}), s);
        if (is_sym("-") && peek(1).kind == Tok::Int) {
          next();
          return at(st::integer(-next().value), s);
        }
        if (accept("-")) return bin(SOp::Sub, st::integer(0), stat(8), s);
        return stat(9);
      }
      default: {
        StaticPtr head = static_atom();
        while (is_sym("(") &&
               (head->kind == SKind::Var || head->kind == SKind::Proto || head->kind == SKind::App ||
                head->kind == SKind::Lam)) {
          next();
          do {
            head = at(st::app(head, stat(0)), s);
          } while (accept(","));
          expect(")");
        }
        return head;
      }
    }
  }

  StaticPtr msg_type(Span s) {
    expect("(");
    StaticPtr r1 = stat(2);
    StaticPtr r2;
    if (accept("->")) r2 = stat(0);
    expect(",");
    StaticPtr payload = stat(0);
    expect(")");
    expect("::");
    StaticPtr cont = stat(0);
    if (r2) return at(st::pmsg(r1, r2, payload, cont), s);
    return at(st::bmsg(r1, payload, cont), s);
  }

  StaticPtr static_atom() {
    Token t = peek();
    Span s = t.span;
    if (t.kind == Tok::Int) {
      next();
      return at(st::integer(t.value), s);
    }
    if (is_sym("{")) return at(st::set(role_literal()), s);
    if (accept("(")) {
      StaticPtr a = stat(0);
      if (accept(",")) {
        StaticPtr b = stat(0);
        expect(")");
        return at(st::pair(a, b), s);
      }
      expect(")");
      return a;
    }
    if (t.kind != Tok::Ident) fail("expected static term");
    const std::string& w = t.text;
    if (static_bound(w)) {
      next();
      return at(st::var(w), s);
    }
    next();
    if (w == "true" || w == "false") return at(st::boolean(w == "true"), s);
    if (w == "full") return at(st::full(), s);
    if (w == "unit") return at(st::unit(), s);
    if (w == "string") return at(st::base("string"), s);
    if (w == "int" || w == "bool") {
      if (is_sym("(")) return at(st::base(w, static_args(1)), s);
      return at(st::base(w), s);
    }
    if (w == "fn" || w == "forall" || w == "exists") {
      std::string a = binder();
      SortPtr so = sort_stype();
      if (w == "fn") {
        if (accept(":")) so = sort();
        expect("=>");
      } else {
        expect(":");
        so = sort();
        expect(".");
      }
      static_scope_.push_back(a);
      StaticPtr body = stat(0);
      static_scope_.pop_back();
      if (w == "fn") return at(st::lam(a, so, body), s);
      if (w == "forall") return at(st::forall(a, so, body), s);
      return at(st::exists(a, so, body), s);
    }
    if (w == "msg") return msg_type(s);
    if (w == "end") return at(st::end(static_args(1)[0]), s);
    if (w == "quan") {
      auto a = static_args(2);
      return at(st::quan(a[0], a[1]), s);
    }
    if (w == "branch") {
      auto a = static_args(3);
      return at(st::branch(a[0], a[1], a[2]), s);
    }
    if (w == "fix") return at(st::fix(static_args(1)[0]), s);
    if (w == "chan") {
      auto a = static_args(2);
      if (a[0]->kind == SKind::Int) a[0] = at(st::set({static_cast<int>(a[0]->value)}), a[0]->span);
      return at(st::chan(a[0], a[1], universe_of(a[1])), s);
    }
    if (w == "sum") {
      auto a = static_args(2);
      return at(st::sum(a[0], a[1]), s);
    }
    if (w == "guard" || w == "assert") {
      auto a = static_args(2);
      return at(w == "guard" ? st::guard(a[0], a[1]) : st::assertion(a[0], a[1]), s);
    }
    static const std::pair<const char*, SOp> calls[] = {
        {"union", SOp::Union}, {"dunion", SOp::DUnion}, {"inter", SOp::Inter},
        {"minus", SOp::Minus}, {"compl", SOp::Compl},   {"subset", SOp::Subset},
        {"ite", SOp::Ite},     {"neg", SOp::Neg}};
    for (const auto& [name, op] : calls)
      if (w == name) return at(st::op(op, static_args(op_arity(op))), s);
    if (const ProtocolDecl* d = prog_.find_protocol(w)) {
      auto p = std::make_shared<Static>(*st::proto(w));
      p->roles = d->universe;
      p->span = s;
      return p;
    }
    auto it = prog_.role_aliases.find(w);
    if (it != prog_.role_aliases.end()) return at(st::integer(it->second), s);
    if (keywords().count(w)) throw ParseError("parse-error", s, "unexpected '" + w + "'");
    throw ParseError("unbound-name", s, "unbound static name '" + w + "'");
  }

  // ------------------------------------------------------------ dynamics
  bool dyn_bound(const std::string& n) const {
    return std::find(dyn_scope_.rbegin(), dyn_scope_.rend(), n) != dyn_scope_.rend() ||
           std::find(defs_.begin(), defs_.end(), n) != defs_.end();
  }

  TermPtr scoped(const std::vector<std::string>& names) {
    for (const auto& n : names) dyn_scope_.push_back(n);
    TermPtr e = expr();
    dyn_scope_.resize(dyn_scope_.size() - names.size());
    return e;
  }

  TermPtr expr() {
    Span s = peek().span;
    if (accept("lam")) {
      std::string x;
      StaticPtr ty;
      if (accept("(")) {
        x = binder();
        expect(":");
        ty = stat(0);
        expect(")");
      } else {
        x = binder();
      }
      expect("=>");
      return at(dy::lam(x, ty, scoped({x})), s);
    }
    if (accept("fix")) {
      std::string g = binder();
      expect("(");
      std::string x = binder();
      expect(":");
      StaticPtr param = stat(0);
      expect(")");
      expect(":");
      StaticPtr result = stat(0);
      expect("=>");
      return at(dy::fix(g, x, param, result, scoped({g, x})), s);
    }
    if (accept("tlam")) {
      expect("[");
      std::string a = binder();
      expect(":");
      SortPtr so = sort();
      expect("]");
      expect("=>");
      static_scope_.push_back(a);
      TermPtr body = expr();
      static_scope_.pop_back();
      return at(dy::forall_intro(a, so, body), s);
    }
    if (accept("let")) return let_form(s);
    if (accept("if")) {
      TermPtr c = expr();
      expect("then");
      TermPtr th = expr();
      expect("else");
      TermPtr el = expr();
      return at(dy::if_(c, th, el), s);
    }
    if (accept("case")) {
      TermPtr scrut = expr();
      expect("of");
      expect("inl");
      std::string x = binder();
      expect("=>");
      TermPtr l = scoped({x});
      expect("|");
      expect("inr");
      std::string y = binder();
      expect("=>");
      TermPtr r = scoped({y});
      return at(dy::case_(scrut, x, l, y, r), s);
    }
    TermPtr first = postfix();
    if (is_sym(";") && !item_start(1)) {
      next();
      return at(dy::seq(first, expr()), s);
    }
    return first;
  }

  TermPtr let_form(Span s) {
    if (accept("<")) {
      std::string x = binder();
      expect(",");
      std::string y = binder();
      expect(">");
      expect("=");
      TermPtr bound = expr();
      expect("in");
      return at(dy::let_pair(x, y, bound, scoped({x, y})), s);
    }
    if (accept("assert")) {
      std::string x = binder();
      expect("=");
      TermPtr bound = expr();
      expect("in");
      return at(dy::let_assert(x, bound, scoped({x})), s);
    }
    if (accept("exists")) {
      std::string a;
      if (accept("[")) {
        a = binder();
        expect("]");
      }
      std::string x = binder();
      expect("=");
      TermPtr bound = expr();
      expect("in");
      if (!a.empty()) static_scope_.push_back(a);
      TermPtr body = scoped({x});
      if (!a.empty()) static_scope_.pop_back();
      return at(dy::let_exists(a, x, bound, body), s);
    }
    std::string x = binder();
    expect("=");
    TermPtr bound = expr();
    expect("in");
    TermPtr body = scoped({x});
    auto lam = at(dy::lam(x, nullptr, body), s);
    return at(dy::app(lam, bound), s);
  }

  TermPtr postfix() {
    Span s = peek().span;
    TermPtr e = primary();
    for (;;) {
      if (accept("(")) {
        TermPtr a = expr();
        expect(")");
        e = at(dy::app(e, a), s);
      } else if (accept("[")) {
        StaticPtr arg;
        if (!is_sym("]")) arg = stat(0);
        expect("]");
        e = at(dy::forall_elim(e, arg), s);
      } else {
        return e;
      }
    }
  }

  TermPtr unary_arg() {
    expect("(");
    TermPtr e = expr();
    expect(")");
    return e;
  }

  TermPtr primary() {
    Token t = peek();
    Span s = t.span;
    if (t.kind == Tok::Int) {
      next();
      return at(dy::integer(t.value), s);
    }
    if (is_sym("-") && peek(1).kind == Tok::Int) {
      next();
      return at(dy::integer(-next().value), s);
    }
    if (t.kind == Tok::Str) {
      next();
      return at(dy::str(t.text), s);
    }
    if (accept("(")) {
      if (accept(")")) return at(dy::unit(), s);
      TermPtr e = expr();
      if (accept(":")) {
        StaticPtr ty = stat(0);
        expect(")");
        return at(dy::annot(e, ty), s);
      }
      expect(")");
      return e;
    }
    if (accept("<")) {
      TermPtr a = expr();
      expect(",");
      TermPtr b = expr();
      expect(">");
      return at(dy::pair(a, b), s);
    }
    if (t.kind != Tok::Ident) fail("expected expression");
    const std::string& w = t.text;
    if (pool_mode_ && is_sym("^", 1) && w.size() >= 2 && w[0] == 'c' &&
        std::all_of(w.begin() + 1, w.end(), ::isdigit)) {
      ChannelId c = channel_name();
      expect("^");
      return at(dy::endpoint(Endpoint{c, role_literal()}), s);
    }
    if (dyn_bound(w)) {
      next();
      return at(dy::var(w), s);
    }
    if (auto api = api_from_name(w)) {
      next();
      expect("(");
      std::vector<TermPtr> args;
      if (!is_sym(")")) {
        do {
          args.push_back(expr());
        } while (accept(","));
      }
      expect(")");
      if (static_cast<int>(args.size()) != api_arity(*api))
        throw ParseError("parse-error", s,
                         std::string("'") + w + "' expects " + std::to_string(api_arity(*api)) +
                             " argument(s)");
      return at(dy::call(*api, args), s);
    }
    next();
    if (w == "true" || w == "false") return at(dy::boolean(w == "true"), s);
    if (w == "fst") return at(dy::fst(unary_arg()), s);
    if (w == "snd") return at(dy::snd(unary_arg()), s);
    if (w == "guard") return at(dy::guard_intro(unary_arg()), s);
    if (w == "unguard") return at(dy::guard_elim(unary_arg()), s);
    if (w == "assert") return at(dy::assert_intro(unary_arg()), s);
    if (w == "inl" || w == "inr") {
      StaticPtr ty;
      if (accept("[")) {
        ty = stat(0);
        expect("]");
      }
      TermPtr e = unary_arg();
      return at(w == "inl" ? dy::inl(e, ty) : dy::inr(e, ty), s);
    }
    if (w == "pack") {
      StaticPtr witness, ty;
      if (accept("[")) {
        if (is_kw("_")) {
          next();
        } else {
          witness = stat(0);
        }
        if (accept(":")) ty = stat(0);
        expect("]");
      }
      return at(dy::exists_intro(unary_arg(), witness, ty), s);
    }
    if (keywords().count(w)) throw ParseError("parse-error", s, "unexpected '" + w + "'");
    throw ParseError("unbound-name", s, "unbound name '" + w + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool pool_mode_ = false;
  Program prog_;
  PoolFile pool_;
  std::vector<std::string> defs_;
  std::vector<std::string> static_scope_;
  std::vector<std::string> dyn_scope_;
};

}  // namespace

Program parse_program(const std::string& text) { return Parser(text, false).program(); }

PoolFile parse_pool(const std::string& text) { return Parser(text, true).pool(); }

StaticPtr parse_static(const std::string& text, const Program& context) {
  Parser p(text, false);
  p.set_context(context);
  return p.single_static();
}

TermPtr parse_term(const std::string& text, const Program& context) {
  Parser p(text, false);
  p.set_context(context);
  return p.single_term();
}

TermPtr program_term(const Program& p) {
  TermPtr t = p.main ? p.main : dy::unit();
  for (auto it = p.defs.rbegin(); it != p.defs.rend(); ++it) t = dy::let(it->name, it->body, t);
  return t;
}

}  // namespace mps
