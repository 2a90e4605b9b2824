#include "cli_support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rweld/error.hpp"
#include "rweld/io.hpp"

namespace rweld::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

}  // namespace

std::string Params::show(double v) { return io::format_number(v); }

CLI::Option* Params::flag(const std::string& name, bool& ref, const std::string& help) {
  dump_.emplace_back(name, [&ref] { return std::string(ref ? "true" : "false"); });
  return app_->add_flag("--" + name, ref, help);
}

std::map<std::string, std::string> Params::values() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, show] : dump_) out[name] = show();
  return out;
}

Run::Run(std::string subcommand, const Params& params, std::filesystem::path out_dir)
    : subcommand_(std::move(subcommand)),
      config_(params.values()),
      out_dir_(std::move(out_dir)),
      start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(out_dir_);
}

std::uint64_t Run::resolve_seed(std::uint64_t flag_seed, bool* from_env) {
  *from_env = false;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return flag_seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ConfigError(std::string(kSeedEnv) + " must be a non-negative integer");
  *from_env = true;
  return v;
}

int Run::finish(int exit_code, const std::string& status) {
  nlohmann::json m;
  m["schema_version"] = kSchemaVersion;
  m["subcommand"] = subcommand_;
  m["config"] = config_;
  m["outputs"] = outputs_;
  m["results"] = results_;
  m["status"] = status;
  m["exit_code"] = exit_code;
  m["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  io::write_text(path(subcommand_ + "_manifest.json"), m.dump(2) + "\n");
  return exit_code;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    try {
      const auto slash = item.find('/');
      if (slash == std::string::npos) {
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const std::string a = item.substr(0, slash), b = item.substr(slash + 1);
        std::size_t ua = 0, ub = 0;
        const double num = std::stod(a, &ua), den = std::stod(b, &ub);
        if (ua != a.size() || ub != b.size() || den == 0.0) throw std::invalid_argument(item);
        out.push_back(num / den);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_number_list(text)) {
    if (v != static_cast<int>(v)) throw ConfigError("expected integers in list: " + text);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> overlay_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2 || args[1].empty() || args[1][0] == '-') return args;

  std::string config_path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::map<std::string, std::string> entries;
  if (std::filesystem::path(config_path).extension() == ".json") {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed manifest " + config_path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw ConfigError("manifest has no config object: " + config_path);
    }
    for (const auto& [k, v] : j["config"].items()) entries[k] = v.get<std::string>();
  } else {
    entries = io::load_config(config_path);
  }

  std::vector<std::string> out(args.begin(), args.begin() + 2);
  for (const auto& [key, v] : entries) {
    std::string k = key;
    for (auto& c : k) c = c == '_' ? '-' : c;
    if (k == "config") continue;
    out.push_back("--" + k + "=" + v);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

}  // namespace rweld::cli
