#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace rweld::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlagged = 2;
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kSeedEnv = "RWELD_SEED";

/// Registers options on a subcommand and remembers how to print each
/// effective value, so the manifest can replay the run.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& ref, const std::string& help) {
    dump_.emplace_back(name, [&ref] { return show(ref); });
    return app_->add_option("--" + name, ref, help)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& ref, const std::string& help);

  /// Effective values keyed by option name.
  std::map<std::string, std::string> values() const;
  CLI::App* app() const { return app_; }

 private:
  static std::string show(double v);
  static std::string show(const std::string& v) { return v; }
  template <class T>
  static std::string show(T v) {
    return std::to_string(v);
  }

  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> dump_;
};

/// Output directory, seed bookkeeping, the manifest and the files written.
class Run {
 public:
  Run(std::string subcommand, const Params& params, std::filesystem::path out_dir);

  /// Applies the environment seed override when present.
  static std::uint64_t resolve_seed(std::uint64_t flag_seed, bool* from_env);

  std::filesystem::path path(const std::string& file) const { return out_dir_ / file; }
  void wrote(const std::string& file) { outputs_.push_back(file); }
  nlohmann::json& results() { return results_; }
  void set_config(const std::string& key, const std::string& value) { config_[key] = value; }

  /// Writes <subcommand>_manifest.json and returns `exit_code`.
  int finish(int exit_code, const std::string& status);

 private:
  std::string subcommand_;
  std::map<std::string, std::string> config_;
  std::filesystem::path out_dir_;
  std::vector<std::string> outputs_;
  nlohmann::json results_ = nlohmann::json::object();
  std::chrono::steady_clock::time_point start_;
};

/// Splits "a,b,c" into numbers; entries may be fractions such as 1/6.
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Rewrites argv so that entries of a --config file (flat key=value, or the
/// "config" object of a manifest) come right after the subcommand name and
/// before the user's own flags; with last-wins options, flags override.
std::vector<std::string> overlay_config(int argc, char** argv);

}  // namespace rweld::cli
