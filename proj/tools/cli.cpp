#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

namespace fracbench {

namespace {

const std::vector<std::string> kValueKeys = {"alpha", "tau",  "deltaT", "B",      "eps",
                                             "eps0",  "T",    "m",      "r",      "sigma",
                                             "interp", "mode", "threads", "N",    "out"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw UsageError("empty number");
  const auto caret = s.find('^');
  if (caret != std::string::npos)
    return std::pow(parse_number(s.substr(0, caret)), parse_number(s.substr(caret + 1)));
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: '" + s + "'");
  return v;
}

// One comma-free item: a number, a power, or a range of either.
void expand_item(const std::string& item, std::vector<double>& out) {
  const auto dots = item.find("..");
  if (dots == std::string::npos) {
    out.push_back(parse_number(item));
    return;
  }
  const std::string lo = trim(item.substr(0, dots));
  const std::string hi = trim(item.substr(dots + 2));
  const auto c1 = lo.find('^');
  const auto c2 = hi.find('^');
  if ((c1 == std::string::npos) != (c2 == std::string::npos))
    throw UsageError("range ends must both be powers or both plain: '" + item + "'");
  double a, b, base = 0.0;
  if (c1 != std::string::npos) {
    base = parse_number(lo.substr(0, c1));
    if (parse_number(hi.substr(0, c2)) != base)
      throw UsageError("range ends need the same base: '" + item + "'");
    a = parse_number(lo.substr(c1 + 1));
    b = parse_number(hi.substr(c2 + 1));
  } else {
    a = parse_number(lo);
    b = parse_number(hi);
  }
  if (a != std::round(a) || b != std::round(b))
    throw UsageError("range steps must be integers: '" + item + "'");
  const int step = b >= a ? 1 : -1;
  for (long k = std::lround(a);; k += step) {
    out.push_back(base != 0.0 ? std::pow(base, static_cast<double>(k)) : static_cast<double>(k));
    if (k == std::lround(b)) break;
  }
}

int parse_int(const std::string& s, const char* what) {
  const double v = parse_number(s);
  if (v != std::round(v)) throw UsageError(std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

std::vector<double> parse_sweep(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) throw UsageError("empty entry in list '" + text + "'");
    expand_item(item, out);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Invocation parse_arguments(const std::vector<std::string>& args) {
  CLI::App app{"Fast convolution experiments"};
  app.require_subcommand(0, 1);
  std::map<std::string, std::string> given;
  for (const auto& k : kValueKeys) given[k];
  std::string config_path;
  bool no_trajectory = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", given["alpha"], "kernel or derivative order(s)");
    sub->add_option("--tau", given["tau"], "step size(s)");
    sub->add_option("--deltaT", given["deltaT"], "memory length(s)");
    sub->add_option("--B", given["B"], "level base(s)");
    sub->add_option("--eps", given["eps"], "level tolerance(s)");
    sub->add_option("--eps0", given["eps0"], "truncation tolerance");
    sub->add_option("--T", given["T"], "final time(s)");
    sub->add_option("--m", given["m"], "correction count(s)");
    sub->add_option("--r", given["r"], "grading exponent(s)");
    sub->add_option("--sigma", given["sigma"], "correction exponents");
    sub->add_option("--interp", given["interp"], "linear or quadratic");
    sub->add_option("--mode", given["mode"], "fast or direct");
    sub->add_option("--threads", given["threads"], "worker threads");
    sub->add_option("--N", given["N"], "rule order for rule-dump");
    sub->add_option("--out", given["out"], "output directory");
    sub->add_option("--config", config_path, "key=value file; flags win");
    sub->add_flag("--no-trajectory", no_trajectory, "skip the trajectory CSV");
  };
  for (const auto& name : fracfast::experiment_names()) add_common(app.add_subcommand(name));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  Invocation inv;
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    inv.help = true;
    inv.help_text = app.help();
    return inv;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  const auto chosen = app.get_subcommands();
  if (chosen.empty()) throw UsageError("a subcommand is required; try --help");
  const CLI::App* sub = chosen.front();
  inv.config.name = sub->get_name();

  std::map<std::string, std::string> values;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw UsageError("cannot read config file " + config_path);
    std::stringstream buf;
    buf << is.rdbuf();
    values = parse_config_text(buf.str());
    for (const auto& [k, v] : values) {
      if (k != "no-trajectory" && given.find(k) == given.end())
        throw UsageError("unknown config key '" + k + "'");
    }
  }
  for (const auto& k : kValueKeys)
    if (sub->count("--" + k) > 0) values[k] = given[k];
  if (sub->count("--no-trajectory") > 0) values["no-trajectory"] = "1";

  auto& c = inv.config;
  auto sweep = [&](const char* key, std::vector<double>& dst) {
    if (auto it = values.find(key); it != values.end()) dst = parse_sweep(it->second);
  };
  sweep("alpha", c.alpha);
  sweep("tau", c.tau);
  sweep("deltaT", c.deltaT);
  sweep("B", c.B);
  sweep("eps", c.eps);
  sweep("T", c.T);
  sweep("m", c.m);
  sweep("r", c.r);
  sweep("sigma", c.sigma);
  if (auto it = values.find("eps0"); it != values.end()) c.eps0 = parse_number(it->second);
  if (auto it = values.find("N"); it != values.end()) c.N = parse_int(it->second, "N");
  if (auto it = values.find("threads"); it != values.end())
    c.threads = parse_int(it->second, "threads");
  if (auto it = values.find("interp"); it != values.end()) {
    c.kind_set = true;
    if (it->second == "linear") {
      c.kind = fracfast::InterpKind::Linear;
    } else if (it->second == "quadratic") {
      c.kind = fracfast::InterpKind::Quadratic;
    } else {
      throw UsageError("--interp must be linear or quadratic");
    }
  }
  if (auto it = values.find("mode"); it != values.end()) {
    c.mode_set = true;
    if (it->second == "fast") {
      c.mode = fracfast::OperatorMode::Fast;
    } else if (it->second == "direct") {
      c.mode = fracfast::OperatorMode::Direct;
    } else {
      throw UsageError("--mode must be fast or direct");
    }
  }
  if (auto it = values.find("no-trajectory"); it != values.end())
    c.keep_trajectory = !(it->second == "1" || it->second == "true");
  if (auto it = values.find("out"); it != values.end()) inv.out_dir = it->second;
  if (c.threads < 1) throw UsageError("--threads must be positive");
  return inv;
}

}  // namespace fracbench
