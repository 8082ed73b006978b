#include "fflab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fflab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  raise(Errc::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::int64_t to_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) parse_fail(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    parse_fail(line, "expected integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, int line) {
  if (v == "on" || v == "true") return true;
  if (v == "off" || v == "false") return false;
  parse_fail(line, "expected on/off, got '" + v + "'");
}

Variant to_variant(const std::string& v, int line) {
  if (v == "tob_prob") return Variant::tob_prob;
  if (v == "tob_3sf") return Variant::tob_3sf;
  if (v == "rlmd") return Variant::rlmd;
  if (v == "rlmd_3sf") return Variant::rlmd_3sf;
  parse_fail(line, "unknown variant '" + v + "'");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::tob_prob: return "tob_prob";
    case Variant::tob_3sf: return "tob_3sf";
    case Variant::rlmd: return "rlmd";
    case Variant::rlmd_3sf: return "rlmd_3sf";
  }
  return "?";
}

// "a@b" -> (a, b)
std::pair<std::int64_t, std::int64_t> split_at(const std::string& v, int line) {
  std::size_t at = v.find('@');
  if (at == std::string::npos) parse_fail(line, "expected '<x>@<y>', got '" + v + "'");
  return {to_int(trim(v.substr(0, at)), line), to_int(trim(v.substr(at + 1)), line)};
}

}  // namespace

SimConfig parse_scenario(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool t_a_set = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) parse_fail(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (val.empty()) parse_fail(line, "empty value for '" + key + "'");

    if (key == "n") {
      cfg.n = static_cast<std::uint32_t>(to_int(val, line));
    } else if (key == "variant") {
      cfg.variant = to_variant(val, line);
    } else if (key == "acks") {
      cfg.acks_enabled = to_bool(val, line);
    } else if (key == "delta") {
      cfg.delta = to_int(val, line);
    } else if (key == "kappa") {
      cfg.kappa = to_int(val, line);
    } else if (key == "pi") {
      cfg.pi = to_int(val, line);
    } else if (key == "t_a") {
      if (val == "none") {
        cfg.t_a.reset();
      } else {
        cfg.t_a = to_int(val, line);
      }
      t_a_set = cfg.t_a.has_value();
    } else if (key == "gst") {
      cfg.gst_round = to_int(val, line);
    } else if (key == "gat") {
      cfg.gat_round = to_int(val, line);
    } else if (key == "slots") {
      cfg.num_slots = to_int(val, line);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(val, line));
    } else if (key == "adversary") {
      cfg.adversary = val;
    } else if (key == "corrupt") {
      auto [id, round] = split_at(val, line);
      cfg.corruptions[static_cast<ValidatorId>(id)] = round;
    } else if (key == "sleep") {
      std::size_t at = val.find('@');
      std::size_t dash = val.find('-', at == std::string::npos ? 0 : at);
      if (at == std::string::npos || dash == std::string::npos)
        parse_fail(line, "expected '<id>@<from>-<to>'");
      ValidatorId id = static_cast<ValidatorId>(to_int(trim(val.substr(0, at)), line));
      Round from = to_int(trim(val.substr(at + 1, dash - at - 1)), line);
      Round to = to_int(trim(val.substr(dash + 1)), line);
      if (to <= from) parse_fail(line, "empty sleep interval");
      cfg.sleep[id].push_back(SleepInterval{from, to});
    } else if (key == "tx") {
      auto [tx, round] = split_at(val, line);
      cfg.tx_schedule.push_back({round, static_cast<TxId>(tx)});
    } else if (key == "groups") {
      cfg.adversary_groups.clear();
      std::istringstream gs(val);
      std::string group;
      while (std::getline(gs, group, '|')) {
        std::vector<ValidatorId> ids;
        std::istringstream is(group);
        std::string idtxt;
        while (std::getline(is, idtxt, ','))
          ids.push_back(static_cast<ValidatorId>(to_int(trim(idtxt), line)));
        cfg.adversary_groups.push_back(std::move(ids));
      }
    } else if (key == "uniform_chainfin") {
      cfg.uniform_chainfin = to_bool(val, line);
    } else if (key == "sender_level_intersection") {
      cfg.sender_level_intersection = to_bool(val, line);
    } else if (key == "c4") {
      std::size_t slash = val.find('/');
      if (slash == std::string::npos) parse_fail(line, "expected '<num>/<den>'");
      cfg.c4_num = static_cast<std::uint32_t>(to_int(trim(val.substr(0, slash)), line));
      cfg.c4_den = static_cast<std::uint32_t>(to_int(trim(val.substr(slash + 1)), line));
    } else {
      parse_fail(line, "unknown key '" + key + "'");
    }
  }

  if (cfg.n == 0) raise(Errc::constraint_error, "n must be positive");
  if (cfg.delta < 1) raise(Errc::constraint_error, "delta must be >= 1");
  if (cfg.kappa <= 1) raise(Errc::constraint_error, "kappa must exceed 1");
  if (cfg.pi < 0) raise(Errc::constraint_error, "pi must be >= 0");
  if (cfg.num_slots < 0) raise(Errc::constraint_error, "slots must be >= 0");
  if (t_a_set && cfg.pi == 0)
    raise(Errc::constraint_error, "t_a is only meaningful with pi > 0");
  if (cfg.pi > 0 && !cfg.t_a)
    raise(Errc::constraint_error, "pi > 0 requires t_a");
  if (cfg.c4_den == 0) raise(Errc::constraint_error, "c4 denominator must be positive");
  for (auto& [id, ivs] : cfg.sleep) {
    if (id >= cfg.n) raise(Errc::constraint_error, "sleep id out of range");
    std::sort(ivs.begin(), ivs.end());
  }
  for (const auto& [id, r] : cfg.corruptions)
    if (id >= cfg.n) raise(Errc::constraint_error, "corrupt id out of range");
  std::sort(cfg.tx_schedule.begin(), cfg.tx_schedule.end());
  return cfg;
}

std::string serialize_scenario(const SimConfig& cfg) {
  std::ostringstream os;
  os << "n = " << cfg.n << "\n";
  os << "variant = " << variant_name(cfg.variant) << "\n";
  os << "acks = " << (cfg.acks_enabled ? "on" : "off") << "\n";
  os << "delta = " << cfg.delta << "\n";
  os << "kappa = " << cfg.kappa << "\n";
  os << "pi = " << cfg.pi << "\n";
  os << "# eta = " << cfg.eta() << "\n";
  if (cfg.t_a) os << "t_a = " << *cfg.t_a << "\n";
  os << "gst = " << cfg.gst_round << "\n";
  os << "gat = " << cfg.gat_round << "\n";
  os << "slots = " << cfg.num_slots << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "adversary = " << cfg.adversary << "\n";
  for (const auto& [id, round] : cfg.corruptions) os << "corrupt = " << id << "@" << round << "\n";
  for (const auto& [id, ivs] : cfg.sleep)
    for (const SleepInterval& s : ivs)
      os << "sleep = " << id << "@" << s.from << "-" << s.to << "\n";
  for (const auto& [round, tx] : cfg.tx_schedule) os << "tx = " << tx << "@" << round << "\n";
  if (!cfg.adversary_groups.empty()) {
    os << "groups = ";
    for (std::size_t g = 0; g < cfg.adversary_groups.size(); ++g) {
      if (g) os << "|";
      for (std::size_t i = 0; i < cfg.adversary_groups[g].size(); ++i) {
        if (i) os << ",";
        os << cfg.adversary_groups[g][i];
      }
    }
    os << "\n";
  }
  if (cfg.uniform_chainfin) os << "uniform_chainfin = on\n";
  if (cfg.sender_level_intersection) os << "sender_level_intersection = on\n";
  if (cfg.c4_num != 2 || cfg.c4_den != 3)
    os << "c4 = " << cfg.c4_num << "/" << cfg.c4_den << "\n";
  return os.str();
}

SimConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::parse_error, "cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace fflab
