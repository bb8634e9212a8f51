#pragma once

// The commands behind the `mps` executable, callable with explicit streams.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "mps/parser.hpp"
#include "mps/runtime.hpp"

namespace mps {

enum class Format { Text, Records };

struct DriverOptions {
  std::optional<std::uint64_t> seed;  // round-robin when absent
  std::uint64_t max_steps = 100000;
  bool checked = false;
  bool erase_proofs = false;
  bool assert_runtime = false;
  std::optional<std::uint64_t> solver_budget;
  Format format = Format::Text;
  bool unsafe_backdoor = false;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int rejected = 1;  // check: type/sort/parse error
inline constexpr int deadlock = 1;
inline constexpr int io = 2;
inline constexpr int step_limit = 3;
inline constexpr int invariant = 4;
}  // namespace exit_code

/// Builds the pool a hand-written pool file describes.
Pool pool_from_file(const PoolFile& pf);

int cmd_check(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err);
int cmd_trace(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const std::string& file, const DriverOptions& opts, std::ostream& out, std::ostream& err);

int exit_code_for(Outcome::Kind k);

}  // namespace mps
