#include "tdcoop/harness.hpp"

#include "tdcoop/errors.hpp"
#include "tdcoop/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace tdcoop {

namespace {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

std::string fmt_double(const char* spec, double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

Point2 parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("config: points are [x, y] arrays");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> per_node(const json& j, std::size_t size, const char* what) {
  if (j.is_number()) return std::vector<double>(size, j.get<double>());
  auto v = j.get<std::vector<double>>();
  if (v.size() != size) {
    throw ConfigError(std::string("config: ") + what + " needs " + std::to_string(size) + " entries");
  }
  return v;
}

MultihopMode parse_mode(const std::string& s) {
  if (s == "accumulating") return MultihopMode::Accumulating;
  if (s == "per-fraction") return MultihopMode::PerFraction;
  throw ConfigError("config: multihop_mode must be 'accumulating' or 'per-fraction'");
}

StrategySpec parse_strategy_entry(const json& j) {
  if (j.is_string()) return parse_strategy(j.get<std::string>());
  if (!j.is_object() || !j.contains("name")) throw ConfigError("config: strategy needs a name");
  StrategySpec s = parse_strategy(j.at("name").get<std::string>());
  s.theta_star = get_or(j, "theta_star", s.theta_star);
  s.optimize_theta_star = get_or(j, "optimize_theta_star", s.optimize_theta_star);
  if (j.contains("theta_star_multihop")) {
    s.theta_star_multihop = j.at("theta_star_multihop").get<std::vector<double>>();
  }
  if (j.contains("multihop_mode")) s.multihop_mode = parse_mode(j.at("multihop_mode").get<std::string>());
  if (j.contains("cooperating_sets")) {
    // one-based user numbers in the file
    for (const auto& set : j.at("cooperating_sets")) {
      std::vector<std::size_t> members;
      for (const auto& u : set) {
        const auto v = u.get<long long>();
        if (v < 1) throw ConfigError("config: cooperating sets use user numbers starting at 1");
        members.push_back(static_cast<std::size_t>(v - 1));
      }
      s.cooperating_sets.push_back(std::move(members));
    }
  }
  return s;
}

std::vector<double> parse_sweep(const json& j) {
  if (j.contains("points_db")) return j.at("points_db").get<std::vector<double>>();
  const double start = j.at("start_db").get<double>();
  const double stop = j.at("stop_db").get<double>();
  const double step = j.at("step_db").get<double>();
  if (!(step > 0.0)) throw ConfigError("config: sweep step must be positive");
  std::vector<double> out;
  for (long long i = 0;; ++i) {
    const double x = start + static_cast<double>(i) * step;
    if (x > stop + 1e-9 * step) break;
    out.push_back(x);
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  geometry.validate();
  if (power.num_users() != geometry.num_users) {
    throw ConfigError("config: power settings must cover every user");
  }
  power.validate();
  trials.validate();
  if (strategies.empty()) throw ConfigError("config: strategy list is empty");
  for (const auto& s : strategies) s.validate(geometry.num_users);
  if (sweep_db.empty()) throw ConfigError("config: SNR sweep is empty");
  for (std::size_t i = 1; i < sweep_db.size(); ++i) {
    if (!(sweep_db[i] > sweep_db[i - 1])) throw ConfigError("config: SNR sweep must be strictly increasing");
  }
  if (placements.empty() && num_placements == 0) throw ConfigError("config: need at least one placement");
  for (const auto& p : placements) {
    if (p.num_users() != geometry.num_users) throw ConfigError("config: placement user count mismatch");
  }
}

std::vector<NodePlacement> experiment_placements(const ExperimentConfig& cfg) {
  if (!cfg.placements.empty()) return cfg.placements;
  std::vector<NodePlacement> out;
  out.reserve(cfg.num_placements);
  for (std::size_t i = 0; i < cfg.num_placements; ++i) {
    RandomStream rng(derive_key(cfg.seed, StreamDomain::Geometry, i));
    out.push_back(sample_placement(cfg.geometry, rng, i));
  }
  return out;
}

std::optional<double> user_power_for_total(const StrategySpec& spec, const PowerConfig& pc,
                                           double ptot) {
  const double floor = total_power(spec, pc.with_user_power(0.0));
  const double slope = total_power(spec, pc.with_user_power(1.0)) - floor;
  const double p1 = (ptot - floor) / slope;
  if (!(p1 > 0.0)) return std::nullopt;
  return p1;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<NodePlacement> placements = experiment_placements(cfg);
  const std::size_t users = cfg.geometry.num_users;
  const double gamma = cfg.geometry.path_loss_exponent;

  struct Point {
    std::size_t strategy;
    double snr_db;
    double ptot_db;
    PowerConfig pc;
  };
  std::vector<Point> points;
  for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
    const StrategySpec& spec = cfg.strategies[s];
    for (double x : cfg.sweep_db) {
      if (cfg.x_axis == XAxis::TransmitSnr) {
        PowerConfig pc = cfg.power.with_user_power(db_to_linear(x));
        const double ptot = total_power(spec, pc);
        points.push_back({s, x, linear_to_db(ptot), std::move(pc)});
      } else {
        const auto p1 = user_power_for_total(spec, cfg.power, db_to_linear(x));
        if (!p1) continue;
        points.push_back({s, linear_to_db(*p1), x, cfg.power.with_user_power(*p1)});
      }
    }
  }

  const std::size_t per_point = placements.size() * users;
  std::vector<OutageEstimate> results(points.size() * per_point);
  parallel_for(results.size(), cfg.workers, [&](std::size_t job) {
    const Point& pt = points[job / per_point];
    const std::size_t rest = job % per_point;
    const NodePlacement& placement = placements[rest / users];
    const std::size_t k = rest % users;
    const StrategySpec& spec = cfg.strategies[pt.strategy];
    OutageEstimate est;
    if (!cfg.bounds_only) {
      est = estimate_user_outage(spec, placement, pt.pc, gamma, k, cfg.trials, cfg.seed);
    }
    est.bounds = user_bounds(spec, placement, pt.pc, gamma, k);
    results[job] = std::move(est);
  });

  auto make_row = [&](const Point& pt, std::string user, const OutageEstimate& e) {
    ResultRow row;
    row.strategy = cfg.strategies[pt.strategy].name();
    row.user = std::move(user);
    row.snr_db = pt.snr_db;
    row.ptot_db = pt.ptot_db;
    row.outage = cfg.bounds_only ? std::nan("") : e.outage;
    row.ci95 = cfg.bounds_only ? std::nan("") : e.half_width;
    row.bound_lower = e.bounds ? e.bounds->lower : std::nan("");
    row.bound_upper = e.bounds ? e.bounds->upper : std::nan("");
    row.trials = e.trials;
    row.ceiling = e.ceiling;
    return row;
  };

  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::pair<std::uint64_t, std::vector<OutageEstimate>>> grouped;
    for (std::size_t p = 0; p < placements.size(); ++p) {
      const auto first = results.begin() + static_cast<std::ptrdiff_t>(i * per_point + p * users);
      grouped.emplace_back(placements[p].index(), std::vector<OutageEstimate>(first, first + static_cast<std::ptrdiff_t>(users)));
    }
    rows.push_back(make_row(points[i], "avg", combine_estimates(grouped)));
    if (!cfg.per_user_rows) continue;
    for (std::size_t k = 0; k < users; ++k) {
      std::vector<std::pair<std::uint64_t, std::vector<OutageEstimate>>> single;
      for (const auto& [index, ests] : grouped) single.emplace_back(index, std::vector<OutageEstimate>{ests[k]});
      rows.push_back(make_row(points[i], std::to_string(k + 1), combine_estimates(single)));
    }
  }
  return rows;
}

std::string csv_header() {
  return "strategy,user_k,snr_db,ptot_db,outage,ci95,bound_lower,bound_upper,trials,ceiling_flag";
}

std::string format_row(const ResultRow& r) {
  std::ostringstream os;
  os << r.strategy << ',' << r.user << ',' << fmt_double("%.4f", r.snr_db) << ','
     << fmt_double("%.4f", r.ptot_db) << ',' << fmt_double("%.9e", r.outage) << ','
     << fmt_double("%.9e", r.ci95) << ',' << fmt_double("%.9e", r.bound_lower) << ','
     << fmt_double("%.9e", r.bound_upper) << ',' << r.trials << ',' << (r.ceiling ? 1 : 0);
  return os.str();
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << csv_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  out.flush();
  if (!out) throw OutputError("failed writing '" + path + "'");
}

void write_placements(const std::string& path, const std::vector<NodePlacement>& placements) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out << "placement,node,x,y\n";
  for (const auto& p : placements) {
    auto line = [&](NodeId n) {
      const Point2 q = p.position(n);
      out << p.index() << ',' << n.label() << ',' << fmt_double("%.17g", q.x) << ','
          << fmt_double("%.17g", q.y) << '\n';
    };
    line(NodeId::destination());
    line(NodeId::relay());
    for (std::size_t k = 0; k < p.num_users(); ++k) line(NodeId::user(k));
  }
  out.flush();
  if (!out) throw OutputError("failed writing '" + path + "'");
}

std::vector<NodePlacement> read_placements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read placements file '" + path + "'");
  struct Partial {
    std::optional<Point2> dest, relay;
    std::map<std::size_t, Point2> users;
  };
  std::map<std::uint64_t, Partial> parts;
  std::string line;
  std::getline(in, line);
  if (line.rfind("placement,node,x,y", 0) != 0) throw ConfigError("placements file: bad header");
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string idx, node, x, y;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, node, ',') || !std::getline(ss, x, ',') ||
        !std::getline(ss, y)) {
      throw ConfigError("placements file: malformed row '" + line + "'");
    }
    Point2 q;
    std::uint64_t index = 0;
    try {
      index = std::stoull(idx);
      q = {std::stod(x), std::stod(y)};
    } catch (const std::exception&) {
      throw ConfigError("placements file: malformed row '" + line + "'");
    }
    Partial& part = parts[index];
    const NodeId n = NodeId::parse(node);
    switch (n.role()) {
      case NodeId::Role::Destination: part.dest = q; break;
      case NodeId::Role::Relay: part.relay = q; break;
      case NodeId::Role::User: part.users[n.user_index()] = q; break;
    }
  }
  std::vector<NodePlacement> out;
  for (auto& [index, part] : parts) {
    if (!part.dest || !part.relay || part.users.empty()) {
      throw ConfigError("placements file: placement " + std::to_string(index) + " is incomplete");
    }
    std::vector<Point2> users;
    for (std::size_t k = 0; k < part.users.size(); ++k) {
      const auto it = part.users.find(k);
      if (it == part.users.end()) throw ConfigError("placements file: users must be numbered 1..K");
      users.push_back(it->second);
    }
    out.emplace_back(std::move(users), *part.relay, *part.dest, index);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.num_placements = get_or<std::size_t>(j, "placements", cfg.num_placements);
    cfg.workers = get_or<unsigned>(j, "workers", cfg.workers);
    cfg.bounds_only = get_or(j, "bounds_only", cfg.bounds_only);

    if (j.contains("geometry")) {
      const json& g = j.at("geometry");
      GeometryParams& gp = cfg.geometry;
      gp.sector_radius = get_or(g, "sector_radius", gp.sector_radius);
      gp.sector_angle = get_or(g, "sector_angle", gp.sector_angle);
      if (g.contains("sector_angle_deg")) gp.sector_angle = g.at("sector_angle_deg").get<double>() * std::numbers::pi / 180.0;
      gp.exclusion_radius = get_or(g, "exclusion_radius", gp.exclusion_radius);
      if (g.contains("destination")) gp.destination = parse_point(g.at("destination"));
      if (g.contains("relay")) gp.relay = parse_point(g.at("relay"));
      gp.path_loss_exponent = get_or(g, "path_loss_exponent", gp.path_loss_exponent);
      gp.num_users = get_or(g, "num_users", gp.num_users);
    }
    const std::size_t K = cfg.geometry.num_users;

    const json p = j.value("power", json::object());
    cfg.power.user_power.assign(K, 1.0);
    cfg.power.relay_factor = get_or(p, "relay_factor", 0.5);
    cfg.power.rate = per_node(p.value("rate", json(0.25)), K, "rate");
    cfg.power.encode_factor = per_node(p.value("encode", json(0.01)), K + 1, "encode");
    cfg.power.decode_factor = per_node(p.value("decode", json(0.01)), K + 1, "decode");
    cfg.power.overhead = per_node(p.value("overhead", json(0.0)), K + 1, "overhead");

    if (j.contains("strategies")) {
      cfg.strategies.clear();
      for (const auto& s : j.at("strategies")) cfg.strategies.push_back(parse_strategy_entry(s));
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      cfg.sweep_db = parse_sweep(s);
      const std::string axis = get_or<std::string>(s, "x_axis", "transmit-snr");
      if (axis == "transmit-snr") {
        cfg.x_axis = XAxis::TransmitSnr;
      } else if (axis == "total-power") {
        cfg.x_axis = XAxis::TotalPower;
      } else {
        throw ConfigError("config: x_axis must be 'transmit-snr' or 'total-power'");
      }
    }
    if (j.contains("trials")) {
      const json& t = j.at("trials");
      TrialPolicy& tp = cfg.trials;
      tp.min_trials = get_or(t, "min", tp.min_trials);
      tp.max_trials = get_or(t, "max", tp.max_trials);
      tp.min_events = get_or(t, "min_events", tp.min_events);
      tp.first_round = get_or(t, "first_round", tp.first_round);
      tp.target_rel_halfwidth = get_or(t, "target_rel_halfwidth", tp.target_rel_halfwidth);
      tp.importance_sampling = get_or(t, "importance_sampling", tp.importance_sampling);
      tp.bias_scale = get_or(t, "bias_scale", tp.bias_scale);
      tp.defensive_mix = get_or(t, "defensive_mix", tp.defensive_mix);
      tp.conditional_af = get_or(t, "conditional_af", tp.conditional_af);
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      cfg.output_path = get_or(o, "path", cfg.output_path);
      cfg.per_user_rows = get_or(o, "per_user_rows", cfg.per_user_rows);
    }
    if (j.contains("placements_file")) cfg.placements = read_placements(j.at("placements_file").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace tdcoop
