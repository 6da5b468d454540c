#pragma once

// Scenario runner behind the command-line tool. A scenario names a system, a
// dynamics, a command and options; running it produces a deterministic JSON
// report and an exit code (0 ok, 1 mathematical failure, 2 malformed input).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "ucpext/catalog.hpp"

namespace ucpext::cli {

using nlohmann::json;

inline constexpr const char* kToolName = "ucpext";
inline constexpr const char* kToolVersion = "0.1.0";

// Command-line overrides; they win over the scenario's "options".
struct RunFlags {
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<double> omega;
  std::optional<std::size_t> starts;
  catalog::G2Prefactor g2_prefactor = catalog::G2Prefactor::derived;
};

enum class Status { ok, failed, invalid_input };

struct Report {
  json doc;
  Status status = Status::ok;
  int exit_code() const { return status == Status::ok ? 0 : status == Status::failed ? 1 : 2; }
};

const char* to_string(Status s);

Report run_scenario(const json& scenario, const RunFlags& flags = {});
Report run_file(const std::filesystem::path& path, const RunFlags& flags = {});
Report demo_rebit(const RunFlags& flags = {}, double delta = 1.0, double omega = 1.0);

// Human-readable rendering; residual-like values use 3 significant digits.
std::string render_text(const json& report);

}  // namespace ucpext::cli
