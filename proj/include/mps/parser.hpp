#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "mps/syntax.hpp"

namespace mps {

/// Raised for malformed input (code "parse-error") and for references to
/// undeclared names (code "unbound-name").
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string code, Span span, const std::string& msg);
  std::string code;
  Span span;
};

Program parse_program(const std::string& text);

/// A hand-written pool: protocols plus explicit channels and threads whose
/// bodies may mention endpoint literals such as `c0^{1}`. Pools built this way
/// bypass the checker and exist for testing the runtime and the analyzer.
struct PoolFile {
  Program program;
  std::map<ChannelId, StaticPtr> channels;
  std::map<int, TermPtr> threads;
};

PoolFile parse_pool(const std::string& text);

StaticPtr parse_static(const std::string& text, const Program& context);
TermPtr parse_term(const std::string& text, const Program& context);

/// The program as one closed term: definitions become nested lets around main.
TermPtr program_term(const Program& p);

}  // namespace mps
