#include "mps/pretty.hpp"

#include <sstream>

namespace mps {

namespace {

// Static precedence levels; a term printed below its own level is wrapped.
enum SLevel {
  kBind = 0,
  kArrow = 1,
  kImp = 2,
  kOr = 3,
  kAnd = 4,
  kRel = 5,
  kAdd = 6,
  kMul = 7,
  kUnary = 8,
  kPost = 9,
  kAtom = 10,
};

int level_of(const Static& s) {
  switch (s.kind) {
    case SKind::Lam:
    case SKind::Forall:
    case SKind::Exists:
    case SKind::BMsg:
    case SKind::PMsg: return kBind;
    case SKind::Fun: return kArrow;
    case SKind::App: return kPost;
    case SKind::Op:
      switch (s.op) {
        case SOp::Imp: return kImp;
        case SOp::Or: return kOr;
        case SOp::And: return kAnd;
        case SOp::In:
        case SOp::NotIn:
        case SOp::Eq:
        case SOp::Neq:
        case SOp::Lt:
        case SOp::Le:
        case SOp::Gt:
        case SOp::Ge: return kRel;
        case SOp::Add:
        case SOp::Sub: return kAdd;
        case SOp::Mul:
        case SOp::Div: return kMul;
        case SOp::Not: return kUnary;
        default: return kAtom;
      }
    case SKind::Int: return s.value < 0 ? kUnary : kAtom;
    default: return kAtom;
  }
}

class StaticPrinter {
 public:
  explicit StaticPrinter(const RoleNames* names) : names_(names) {}

  void print(const Static& s, int ctx, std::ostream& out) {
    bool paren = level_of(s) < ctx;
    if (paren) out << '(';
    body(s, out);
    if (paren) out << ')';
  }

 private:
  void role(const Static& r, std::ostream& out) {
    if (names_ && r.kind == SKind::Int) {
      auto it = names_->find(static_cast<int>(r.value));
      if (it != names_->end()) {
        out << it->second;
        return;
      }
    }
    print(r, kImp, out);
  }

  void args(const std::vector<StaticPtr>& kids, std::ostream& out) {
    out << '(';
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) out << ", ";
      print(*kids[i], kBind, out);
    }
    out << ')';
  }

  void body(const Static& s, std::ostream& out) {
    switch (s.kind) {
      case SKind::Var: out << s.name; return;
      case SKind::Int: out << s.value; return;
      case SKind::Bool: out << (s.value ? "true" : "false"); return;
      case SKind::Set: out << pretty_roles(s.roles); return;
      case SKind::Full: out << "full"; return;
      case SKind::Proto: out << s.name; return;
      case SKind::Lam:
        out << "fn " << s.name << ": " << to_string(*s.sort) << " => ";
        print(*s.kids[0], kBind, out);
        return;
      case SKind::Forall:
      case SKind::Exists:
        out << (s.kind == SKind::Forall ? "forall " : "exists ") << s.name << ": "
            << to_string(*s.sort) << ". ";
        print(*s.kids[0], kBind, out);
        return;
      case SKind::App: {
        std::vector<const Static*> spine;
        const Static* head = &s;
        while (head->kind == SKind::App) {
          spine.push_back(head->kids[1].get());
          head = head->kids[0].get();
        }
        print(*head, kPost, out);
        out << '(';
        for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
          if (it != spine.rbegin()) out << ", ";
          print(**it, kBind, out);
        }
        out << ')';
        return;
      }
      case SKind::Op: op(s, out); return;
      case SKind::End:
        out << "end(";
        role(*s.kids[0], out);
        out << ')';
        return;
      case SKind::BMsg:
        out << "msg(";
        role(*s.kids[0], out);
        out << ", ";
        print(*s.kids[1], kBind, out);
        out << ") :: ";
        print(*s.kids[2], kBind, out);
        return;
      case SKind::PMsg:
        out << "msg(";
        role(*s.kids[0], out);
        out << " -> ";
        role(*s.kids[1], out);
        out << ", ";
        print(*s.kids[2], kBind, out);
        out << ") :: ";
        print(*s.kids[3], kBind, out);
        return;
      case SKind::Quan:
        out << "quan(";
        role(*s.kids[0], out);
        out << ", ";
        print(*s.kids[1], kBind, out);
        out << ')';
        return;
      case SKind::Branch:
        out << "branch(";
        role(*s.kids[0], out);
        out << ", ";
        print(*s.kids[1], kBind, out);
        out << ", ";
        print(*s.kids[2], kBind, out);
        out << ')';
        return;
      case SKind::Fix:
        out << "fix";
        args(s.kids, out);
        return;
      case SKind::Unit: out << "unit"; return;
      case SKind::Base:
        out << s.name;
        if (!s.kids.empty()) args(s.kids, out);
        return;
      case SKind::Chan: out << "chan"; args(s.kids, out); return;
      case SKind::Pair: args(s.kids, out); return;
      case SKind::Sum: out << "sum"; args(s.kids, out); return;
      case SKind::Guard: out << "guard"; args(s.kids, out); return;
      case SKind::Assert: out << "assert"; args(s.kids, out); return;
      case SKind::Fun:
        print(*s.kids[0], kImp, out);
        out << (s.value ? " -o " : " -> ");
        print(*s.kids[1], kArrow, out);
        return;
    }
  }

  void op(const Static& s, std::ostream& out) {
    auto infix = [&](int l, int r) {
      print(*s.kids[0], l, out);
      out << ' ' << op_name(s.op) << ' ';
      print(*s.kids[1], r, out);
    };
    switch (s.op) {
      case SOp::Imp: infix(kOr, kImp); return;
      case SOp::Or: infix(kOr, kAnd); return;
      case SOp::And: infix(kAnd, kRel); return;
      case SOp::In:
      case SOp::NotIn:
      case SOp::Eq:
      case SOp::Neq:
      case SOp::Lt:
      case SOp::Le:
      case SOp::Gt:
      case SOp::Ge: infix(kAdd, kAdd); return;
      case SOp::Add:
      case SOp::Sub: infix(kAdd, kMul); return;
      case SOp::Mul:
      case SOp::Div: infix(kMul, kUnary); return;
      case SOp::Not:
        out << '!';
        print(*s.kids[0], kUnary, out);
        return;
      default:
        out << op_name(s.op);
        args(s.kids, out);
        return;
    }
  }

  const RoleNames* names_;
};

// Dynamic precedence levels.
enum DLevel { dBind = 0, dSeq = 1, dPost = 2, dAtom = 3 };

bool is_let(const Term& t) {
  return t.kind == TKind::App && t.kids[0]->kind == TKind::Lam && t.kids[0]->statics.empty();
}
bool is_seq(const Term& t) { return t.kind == TKind::Snd && t.kids[0]->kind == TKind::Pair; }

int level_of(const Term& t) {
  if (is_let(t)) return dBind;
  if (is_seq(t)) return dSeq;
  switch (t.kind) {
    case TKind::Lam:
    case TKind::Fix:
    case TKind::LetPair:
    case TKind::LetAssert:
    case TKind::LetExists:
    case TKind::If:
    case TKind::Case:
    case TKind::ForallIntro: return dBind;
    case TKind::App:
    case TKind::ForallElim: return dPost;
    default: return dAtom;
  }
}

std::string quote(const std::string& s) {
  std::string r = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') r += '\\';
    r += c;
  }
  return r + "\"";
}

class TermPrinter {
 public:
  void print(const Term& t, int ctx, std::ostream& out) {
    bool paren = level_of(t) < ctx;
    if (paren) out << '(';
    body(t, out);
    if (paren) out << ')';
  }

 private:
  void st(const StaticPtr& s, std::ostream& out) { out << pretty(s); }

  void body(const Term& t, std::ostream& out) {
    if (is_let(t)) {
      const Term& lam = *t.kids[0];
      out << "let " << lam.name << " = ";
      print(*t.kids[1], dBind, out);
      out << " in ";
      print(*lam.kids[0], dBind, out);
      return;
    }
    if (is_seq(t)) {
      const Term& p = *t.kids[0];
      print(*p.kids[0], dPost, out);
      out << "; ";
      print(*p.kids[1], dBind, out);
      return;
    }
    switch (t.kind) {
      case TKind::Var: out << t.name; return;
      case TKind::Unit: out << "()"; return;
      case TKind::Int: out << t.value; return;
      case TKind::Bool: out << (t.value ? "true" : "false"); return;
      case TKind::Str: out << quote(t.text); return;
      case TKind::Endpoint: out << pretty(t.endpoint); return;
      case TKind::Lam:
        out << "lam ";
        if (t.statics.empty()) {
          out << t.name;
        } else {
          out << '(' << t.name << ": ";
          st(t.statics[0], out);
          out << ')';
        }
        out << " => ";
        print(*t.kids[0], dBind, out);
        return;
      case TKind::Fix:
        out << "fix " << t.name << " (" << t.name2 << ": ";
        st(t.statics[0], out);
        out << "): ";
        st(t.statics[1], out);
        out << " => ";
        print(*t.kids[0], dBind, out);
        return;
      case TKind::App:
        print(*t.kids[0], dPost, out);
        out << '(';
        print(*t.kids[1], dBind, out);
        out << ')';
        return;
      case TKind::Pair:
        out << '<';
        print(*t.kids[0], dBind, out);
        out << ", ";
        print(*t.kids[1], dBind, out);
        out << '>';
        return;
      case TKind::Fst: unary("fst", t, out); return;
      case TKind::Snd: unary("snd", t, out); return;
      case TKind::GuardIntro: unary("guard", t, out); return;
      case TKind::GuardElim: unary("unguard", t, out); return;
      case TKind::AssertIntro: unary("assert", t, out); return;
      case TKind::LetPair:
        out << "let <" << t.name << ", " << t.name2 << "> = ";
        print(*t.kids[0], dBind, out);
        out << " in ";
        print(*t.kids[1], dBind, out);
        return;
      case TKind::LetAssert:
        out << "let assert " << t.name << " = ";
        print(*t.kids[0], dBind, out);
        out << " in ";
        print(*t.kids[1], dBind, out);
        return;
      case TKind::LetExists:
        out << "let exists ";
        if (!t.name.empty()) out << '[' << t.name << "] ";
        out << t.name2 << " = ";
        print(*t.kids[0], dBind, out);
        out << " in ";
        print(*t.kids[1], dBind, out);
        return;
      case TKind::If:
        out << "if ";
        print(*t.kids[0], dBind, out);
        out << " then ";
        print(*t.kids[1], dBind, out);
        out << " else ";
        print(*t.kids[2], dBind, out);
        return;
      case TKind::Case:
        out << "case ";
        print(*t.kids[0], dBind, out);
        out << " of inl " << t.name << " => ";
        print(*t.kids[1], dSeq, out);
        out << " | inr " << t.name2 << " => ";
        print(*t.kids[2], dBind, out);
        return;
      case TKind::ForallIntro:
        out << "tlam [" << t.name << ": " << to_string(*t.sort) << "] => ";
        print(*t.kids[0], dBind, out);
        return;
      case TKind::ForallElim:
        print(*t.kids[0], dPost, out);
        out << '[';
        if (t.statics[0]) st(t.statics[0], out);
        out << ']';
        return;
      case TKind::ExistsIntro:
        out << "pack";
        if (t.statics[0] || t.statics[1]) {
          out << '[';
          if (t.statics[0]) {
            st(t.statics[0], out);
          } else {
            out << '_';
          }
          if (t.statics[1]) {
            out << " : ";
            st(t.statics[1], out);
          }
          out << ']';
        }
        out << '(';
        print(*t.kids[0], dBind, out);
        out << ')';
        return;
      case TKind::Inl:
      case TKind::Inr:
        out << (t.kind == TKind::Inl ? "inl" : "inr");
        if (t.statics[0]) {
          out << '[';
          st(t.statics[0], out);
          out << ']';
        }
        out << '(';
        print(*t.kids[0], dBind, out);
        out << ')';
        return;
      case TKind::Annot:
        out << '(';
        print(*t.kids[0], dBind, out);
        out << " : ";
        st(t.statics[0], out);
        out << ')';
        return;
      case TKind::ApiCall:
        out << api_name(t.api) << '(';
        for (std::size_t i = 0; i < t.kids.size(); ++i) {
          if (i) out << ", ";
          print(*t.kids[i], dBind, out);
        }
        out << ')';
        return;
    }
  }

  void unary(const char* name, const Term& t, std::ostream& out) {
    out << name << '(';
    print(*t.kids[0], dBind, out);
    out << ')';
  }
};

}  // namespace

std::string pretty_roles(const std::vector<int>& roles) {
  std::string r = "{";
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i) r += ",";
    r += std::to_string(roles[i]);
  }
  return r + "}";
}

std::string pretty(const Endpoint& ep) {
  return "c" + std::to_string(ep.channel) + "^" + pretty_roles(ep.roles);
}

std::string pretty(const Static& s, const RoleNames* names) {
  std::ostringstream out;
  StaticPrinter(names).print(s, kBind, out);
  return out.str();
}

std::string pretty(const Term& t) {
  std::ostringstream out;
  TermPrinter().print(t, dBind, out);
  return out.str();
}

std::string pretty(const Program& p) {
  std::ostringstream out;
  for (const auto& d : p.protocols) {
    out << "protocol " << d.name;
    if (!d.params.empty()) {
      out << '(';
      for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) out << ", ";
        out << d.params[i].first << ": " << to_string(*d.params[i].second);
      }
      out << ')';
    }
    out << " roles ";
    for (std::size_t i = 0; i < d.roles.size(); ++i) {
      if (i) out << ", ";
      out << d.roles[i].first << '=' << d.roles[i].second;
    }
    out << " universe " << pretty_roles(d.universe) << " = " << pretty(*d.def) << ";\n";
  }
  for (const auto& d : p.defs) out << "def " << d.name << " = " << pretty(*d.body) << ";\n";
  if (p.main) out << "main = " << pretty(*p.main) << ";\n";
  return out.str();
}

}  // namespace mps
