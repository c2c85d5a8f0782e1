#include "lowlight/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lowlight/error.hpp"

namespace lowlight {

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw input_error("config: lr must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw input_error("config: beta1 in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw input_error("config: beta2 in [0,1)");
  if (!(eps > 0.0)) throw input_error("config: eps must be positive");
  if (epochs < 0) throw input_error("config: epochs must be >= 0");
  if (batch_size < 1) throw input_error("config: batch_size must be >= 1");
  if (patch < 8 || patch % 8 != 0)
    throw input_error("config: patch must be a positive multiple of 8");
  if (width < 8) throw input_error("config: width must be >= 8");
  if (!(weights.gamma >= 0.0 && weights.gamma <= 1.0))
    throw input_error("config: gamma must lie in [0,1]");
  if (!(weights.lambda1 >= 0.0 && weights.lambda2 >= 0.0))
    throw input_error("config: lambda weights must be >= 0");
  if (!(weights.alpha > 0.0)) throw input_error("config: alpha must be positive");
  if (!(photon_scale > 0.0))
    throw input_error("config: photon_scale must be positive");
  if (ckpt_every < 1) throw input_error("config: ckpt_every must be >= 1");
  if (!(clip_norm >= 0.0)) throw input_error("config: clip_norm must be >= 0");
  if (!(val_split >= 0.0 && val_split < 1.0))
    throw input_error("config: val_split in [0,1)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw input_error("config: bad numeric value for '" + key + "': " + v);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw input_error("config: bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw input_error("config: bad boolean value for '" + key + "': " + v);
}

}  // namespace

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw input_error("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_kv_text(ss.str());
}

void apply_config_keys(TrainConfig& cfg,
                       const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "lr") cfg.lr = parse_double(key, value);
    else if (key == "beta1") cfg.beta1 = parse_double(key, value);
    else if (key == "beta2") cfg.beta2 = parse_double(key, value);
    else if (key == "eps") cfg.eps = parse_double(key, value);
    else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
    else if (key == "batch_size")
      cfg.batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "patch") cfg.patch = static_cast<int>(parse_int(key, value));
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "width") cfg.width = static_cast<int>(parse_int(key, value));
    else if (key == "lambda1") cfg.weights.lambda1 = parse_double(key, value);
    else if (key == "lambda2") cfg.weights.lambda2 = parse_double(key, value);
    else if (key == "gamma") cfg.weights.gamma = parse_double(key, value);
    else if (key == "beta") cfg.weights.beta = parse_double(key, value);
    else if (key == "alpha") cfg.weights.alpha = parse_double(key, value);
    else if (key == "photon_scale") cfg.photon_scale = parse_double(key, value);
    else if (key == "ckpt_every")
      cfg.ckpt_every = static_cast<int>(parse_int(key, value));
    else if (key == "clip_norm") cfg.clip_norm = parse_double(key, value);
    else if (key == "cosine_decay") cfg.cosine_decay = parse_bool(key, value);
    else if (key == "val_split") cfg.val_split = parse_double(key, value);
    else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(key, value));
    else throw input_error("config: unknown key '" + key + "'");
  }
  cfg.validate();
}

TrainConfig load_train_config(const std::string& path) {
  TrainConfig cfg;
  apply_config_keys(cfg, parse_kv_file(path));
  return cfg;
}

std::string config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "lr = " << cfg.lr << "\n"
      << "beta1 = " << cfg.beta1 << "\n"
      << "beta2 = " << cfg.beta2 << "\n"
      << "eps = " << cfg.eps << "\n"
      << "epochs = " << cfg.epochs << "\n"
      << "batch_size = " << cfg.batch_size << "\n"
      << "patch = " << cfg.patch << "\n"
      << "seed = " << cfg.seed << "\n"
      << "width = " << cfg.width << "\n"
      << "lambda1 = " << cfg.weights.lambda1 << "\n"
      << "lambda2 = " << cfg.weights.lambda2 << "\n"
      << "gamma = " << cfg.weights.gamma << "\n"
      << "beta = " << cfg.weights.beta << "\n"
      << "alpha = " << cfg.weights.alpha << "\n"
      << "photon_scale = " << cfg.photon_scale << "\n"
      << "ckpt_every = " << cfg.ckpt_every << "\n"
      << "clip_norm = " << cfg.clip_norm << "\n"
      << "cosine_decay = " << (cfg.cosine_decay ? "true" : "false") << "\n"
      << "val_split = " << cfg.val_split << "\n"
      << "jobs = " << cfg.jobs << "\n";
  return out.str();
}

}  // namespace lowlight
