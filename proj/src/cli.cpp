#include "morreylab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "morreylab/content.hpp"
#include "morreylab/errors.hpp"
#include "morreylab/exponents.hpp"
#include "morreylab/grid_function.hpp"
#include "morreylab/maximal.hpp"
#include "morreylab/norms.hpp"
#include "morreylab/parallel.hpp"
#include "morreylab/report.hpp"
#include "morreylab/tree.hpp"
#include "morreylab/twoweight.hpp"
#include "morreylab/weights.hpp"

namespace morreylab {

namespace {

struct Common {
  int n = 1;
  int L = 4;
  double p = 2.0;
  double q = 2.0;
  double lambda = 0.5;
  double a = 2.0;
  std::vector<double> box_offset;
  double box_scale = 1.0;
  std::uint64_t seed = 12345;
  std::string out = "report";
  bool deterministic = false;
  int threads = 0;
  std::string emit_config;
  std::string config_file;

  GridLayout layout() const {
    RootBox box;
    box.offset = box_offset;
    box.scale = box_scale;
    return GridLayout{n, L, box};
  }
  ExponentConfig exponents() const { return ExponentConfig{n, p, q, lambda, a}; }
};

void add_common(CLI::App* cmd, Common& c) {
  // config-file values are spliced in ahead of explicit flags; the last
  // occurrence wins
  const auto last = CLI::MultiOptionPolicy::TakeLast;
  cmd->add_option("--n", c.n, "dimension")->multi_option_policy(last);
  cmd->add_option("--L", c.L, "grid depth (finest dyadic level)")->multi_option_policy(last);
  cmd->add_option("--p", c.p, "exponent p")->multi_option_policy(last);
  cmd->add_option("--q", c.q, "exponent q")->multi_option_policy(last);
  cmd->add_option("--lambda", c.lambda, "Morrey exponent lambda")->multi_option_policy(last);
  cmd->add_option("--a", c.a, "enlargement exponent a > 1")->multi_option_policy(last);
  cmd->add_option("--box-offset", c.box_offset, "root box offset (one value per axis)")
      ->multi_option_policy(last);
  cmd->add_option("--box-scale", c.box_scale, "root box side length")->multi_option_policy(last);
  cmd->add_option("--seed", c.seed, "RNG seed for randomized families")->multi_option_policy(last);
  cmd->add_option("--out", c.out, "output path prefix (.csv/.json)")->multi_option_policy(last);
  cmd->add_flag("--deterministic", c.deterministic, "suppress the timestamp field");
  cmd->add_option("--threads", c.threads, "module parallelism cap")->multi_option_policy(last);
  cmd->add_option("--emit-config", c.emit_config, "write the effective config to this file")
      ->multi_option_policy(last);
  cmd->add_option("--config", c.config_file, "read options from a key = value file")
      ->multi_option_policy(last);
}

std::vector<double> parse_floats(const std::string& s, char sep) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& s, char sep = ',') {
  std::vector<std::int64_t> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (!item.empty()) out.push_back(std::stoll(item));
  return out;
}

// Expression grammar for functions and weights:
//   const:c=<float>                     constant
//   power:alpha=<float>,offset=<f/f..>  |x-offset|^alpha realized on the grid
//   file:<path>                         grid file "dim L" + cells
//   indicator:level=<k>,index=<flat>    1_Q
struct ParsedExpr {
  GridFunction f;
  std::optional<double> power_alpha;
};

ParsedExpr parse_grid_expr(const std::string& expr, const GridLayout& layout) {
  const auto colon = expr.find(':');
  if (colon == std::string::npos)
    throw CLI::ValidationError("expression", "expected kind:args in '" + expr + "'");
  const std::string kind = expr.substr(0, colon);
  const std::string rest = expr.substr(colon + 1);

  std::map<std::string, std::string> kv;
  std::string bare;
  {
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) bare = item;
      else kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }

  if (kind == "const") {
    const double c = kv.count("c") ? std::stod(kv.at("c")) : std::stod(bare);
    return {GridFunction::constant(layout, c), std::nullopt};
  }
  if (kind == "power") {
    if (!kv.count("alpha")) throw CLI::ValidationError("expression", "power needs alpha=");
    const double alpha = std::stod(kv.at("alpha"));
    std::vector<double> offset(static_cast<std::size_t>(layout.dim), 0.0);
    if (kv.count("offset")) {
      offset = parse_floats(kv.at("offset"), '/');
      offset.resize(static_cast<std::size_t>(layout.dim), 0.0);
    }
    return {power_weight(alpha, offset, layout).realized, alpha};
  }
  if (kind == "file") return {read_grid_file(rest, layout.box), std::nullopt};
  if (kind == "indicator") {
    const int level = kv.count("level") ? std::stoi(kv.at("level")) : 0;
    const std::int64_t flat = kv.count("index") ? std::stoll(kv.at("index")) : 0;
    return {indicator(layout, DyadicCube::from_flat(layout.dim, level, flat)), std::nullopt};
  }
  throw CLI::ValidationError("expression", "unknown expression kind '" + kind + "'");
}

std::string cube_str(const std::optional<DyadicCube>& q) { return q ? q->str() : "-"; }

struct ReportSink {
  ReportSink(const Common& c, std::string cmd) : common(c), command(std::move(cmd)) {}

  const Common& common;
  std::string command;
  std::string csv_header;
  std::vector<std::string> csv_rows;
  Json results = Json::object();
  Json witnesses = Json::array();
  Json notes = Json::array();
  std::vector<std::pair<std::string, std::string>> config_extra;

  void row(const std::string& r) { csv_rows.push_back(r); }

  Json config_json() const {
    Json cfg = Json::object();
    cfg.set("n", Json::integer(common.n));
    cfg.set("L", Json::integer(common.L));
    cfg.set("p", Json::number(common.p));
    cfg.set("q", Json::number(common.q));
    cfg.set("lambda", Json::number(common.lambda));
    cfg.set("a", Json::number(common.a));
    Json off = Json::array();
    for (double v : common.box_offset) off.push(Json::number(v));
    cfg.set("box_offset", std::move(off));
    cfg.set("box_scale", Json::number(common.box_scale));
    cfg.set("seed", Json::integer(static_cast<std::int64_t>(common.seed)));
    cfg.set("threads", Json::integer(common.threads));
    cfg.set("deterministic", Json::boolean(common.deterministic));
    for (const auto& [k, v] : config_extra) cfg.set(k, Json::str(v));
    return cfg;
  }

  void write() const {
    {
      std::ofstream csv(common.out + ".csv");
      if (!csv) throw std::runtime_error("cannot write " + common.out + ".csv");
      csv << csv_header << "\n";
      for (const auto& r : csv_rows) csv << r << "\n";
    }
    Json root = Json::object();
    root.set("command", Json::str(command));
    root.set("config", config_json());
    root.set("results", results);
    root.set("witnesses", witnesses);
    root.set("notes", notes);
    if (!common.deterministic) {
      char buf[64];
      const std::time_t now = std::time(nullptr);
      std::tm tm{};
      gmtime_r(&now, &tm);
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
      root.set("timestamp", Json::str(buf));
    }
    std::ofstream js(common.out + ".json");
    if (!js) throw std::runtime_error("cannot write " + common.out + ".json");
    js << root.dump();
  }

  void emit_config_file() const {
    if (common.emit_config.empty()) return;
    std::ofstream os(common.emit_config);
    if (!os) throw std::runtime_error("cannot write " + common.emit_config);
    os << "n = " << common.n << "\n";
    os << "L = " << common.L << "\n";
    os << "p = " << fmt17(common.p) << "\n";
    os << "q = " << fmt17(common.q) << "\n";
    os << "lambda = " << fmt17(common.lambda) << "\n";
    os << "a = " << fmt17(common.a) << "\n";
    if (!common.box_offset.empty()) {
      os << "box-offset =";
      for (double v : common.box_offset) os << " " << fmt17(v);
      os << "\n";
    }
    os << "box-scale = " << fmt17(common.box_scale) << "\n";
    os << "seed = " << common.seed << "\n";
    os << "out = " << common.out << "\n";
    if (common.deterministic) os << "deterministic = true\n";
    if (common.threads) os << "threads = " << common.threads << "\n";
    for (const auto& [k, v] : config_extra) os << k << " = " << v << "\n";
  }
};

Json norm_json(const NormValue& nv) {
  Json j = Json::object();
  j.set("kind", Json::str(nv.kind));
  j.set("value", Json::number(nv.as_double()));
  j.set("infinite", Json::boolean(nv.infinite));
  j.set("witness", Json::str(cube_str(nv.witness)));
  j.set("witness2", Json::str(cube_str(nv.witness2)));
  if (!nv.note.empty()) j.set("note", Json::str(nv.note));
  return j;
}

Json condition_json(const ConditionReport& rep) {
  Json j = Json::object();
  j.set("condition", Json::str(ConditionReport::kind_name(rep.condition)));
  j.set("value", Json::number(rep.infinite ? std::numeric_limits<double>::infinity() : rep.value));
  j.set("witness_outer", Json::str(rep.witness_outer.str()));
  j.set("witness_inner", Json::str(cube_str(rep.witness_inner)));
  j.set("candidate", Json::str(rep.candidate_b.value_or("-")));
  if (!rep.companion_kind.empty()) {
    j.set("companion_kind", Json::str(rep.companion_kind));
    j.set("companion", Json::number(rep.companion));
  }
  Json n = Json::array();
  for (const auto& s : rep.notes) n.push(Json::str(s));
  j.set("notes", std::move(n));
  return j;
}

// Inserts options from a "key = value" file ahead of the explicit arguments,
// so command-line flags win.
std::vector<std::string> splice_config(const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  std::string path;
  for (std::size_t i = 1; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  if (path.empty()) return args;

  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") continue;
    if (key == "deterministic") {
      if (value == "true" || value == "1") injected.push_back("--deterministic");
      continue;
    }
    if (key == "box-offset") {
      injected.push_back("--box-offset");
      std::istringstream vs(value);
      std::string tok;
      while (vs >> tok) injected.push_back(tok);
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::vector<std::string> out;
  out.push_back(args[0]);
  for (const auto& s : injected) out.push_back(s);
  for (std::size_t i = 1; i < args.size(); ++i) out.push_back(args[i]);
  return out;
}

// ---- subcommand runners -------------------------------------------------

int run_maximal(const Common& c, const std::string& f_expr, const std::string& mu_expr,
                const std::string& restrict_expr) {
  const auto layout = c.layout();
  ReportSink sink{c, "maximal"};
  sink.config_extra.emplace_back("f", f_expr);
  const GridFunction f = parse_grid_expr(f_expr, layout).f;

  MaximalField field = [&]() {
    if (!mu_expr.empty()) {
      sink.config_extra.emplace_back("mu", mu_expr);
      return maximal_weighted(f, parse_grid_expr(mu_expr, layout).f);
    }
    if (!restrict_expr.empty()) {
      sink.config_extra.emplace_back("restrict", restrict_expr);
      const auto ints = parse_ints(restrict_expr, ':');
      return maximal(f, DyadicCube::from_flat(layout.dim, static_cast<int>(ints.at(0)), ints.at(1)));
    }
    return maximal(f);
  }();

  sink.csv_header = "cell,f,Mf,arg_level";
  for (std::int64_t i = 0; i < f.size(); ++i)
    sink.row(std::to_string(i) + "," + fmt17(f[i]) + "," + fmt17(field.out[i]) + "," +
             std::to_string(field.arg_level[static_cast<std::size_t>(i)]));
  sink.results.set("max_value", Json::number(field.out.max_value()));
  sink.write();
  sink.emit_config_file();
  std::cout << "maximal: max " << fmt17(field.out.max_value()) << "\n";
  return 0;
}

int run_norm(const Common& c, const std::string& kind, const std::string& f_expr,
             const std::string& w_expr) {
  const auto layout = c.layout();
  ReportSink sink{c, "norm"};
  sink.config_extra.emplace_back("kind", kind);
  sink.config_extra.emplace_back("f", f_expr);
  const GridFunction f = parse_grid_expr(f_expr, layout).f;
  std::optional<GridFunction> w;
  if (!w_expr.empty()) {
    sink.config_extra.emplace_back("w", w_expr);
    w = parse_grid_expr(w_expr, layout).f;
  }

  NormValue nv;
  if (kind == "lebesgue") nv = lebesgue_norm(f, c.p, w ? &*w : nullptr);
  else if (kind == "morrey") nv = morrey_norm(f, c.p, c.lambda, w ? &*w : nullptr);
  else throw CLI::ValidationError("--kind", "expected lebesgue|morrey");

  sink.csv_header = "kind,p,lambda,value,witness";
  sink.row(kind + "," + fmt17(c.p) + "," + fmt17(c.lambda) + "," + fmt17(nv.as_double()) + "," +
           cube_str(nv.witness));
  sink.results.set("norm", norm_json(nv));
  sink.write();
  sink.emit_config_file();
  std::cout << "norm(" << kind << "): " << fmt17(nv.as_double()) << "\n";
  return 0;
}

int run_apconst(const Common& c, const std::string& kind, const std::string& w_expr) {
  const auto layout = c.layout();
  ReportSink sink{c, "apconst"};
  sink.config_extra.emplace_back("kind", kind);
  sink.config_extra.emplace_back("w", w_expr);
  const auto parsed = parse_grid_expr(w_expr, layout);

  NormValue nv;
  if (kind == "ap") nv = ap_constant(parsed.f, c.p);
  else if (kind == "a1") nv = a1_constant(parsed.f);
  else if (kind == "cond12") nv = cond_1_2_value(parsed.f, c.exponents());
  else throw CLI::ValidationError("--kind", "expected ap|a1|cond12");

  sink.csv_header = "kind,p,lambda,value,witness_outer,witness_inner";
  sink.row(kind + "," + fmt17(c.p) + "," + fmt17(c.lambda) + "," + fmt17(nv.as_double()) + "," +
           cube_str(nv.witness) + "," + cube_str(nv.witness2));
  sink.results.set("constant", norm_json(nv));
  if (parsed.power_alpha) {
    const auto cfg = c.exponents();
    Json ranges = Json::object();
    for (auto [name, kindr] : {std::pair<const char*, RangeKind>{"ap", RangeKind::ap},
                               {"cond_1_2", RangeKind::cond_1_2},
                               {"morrey_sharp", RangeKind::morrey_sharp}}) {
      const auto iv = admissible_range(kindr, cfg);
      Json r = Json::object();
      r.set("interval", Json::str(iv.str()));
      r.set("contains_alpha", Json::boolean(iv.contains(*parsed.power_alpha)));
      ranges.set(name, std::move(r));
    }
    sink.results.set("alpha", Json::number(*parsed.power_alpha));
    sink.results.set("ranges", std::move(ranges));
  }
  sink.write();
  sink.emit_config_file();
  std::cout << "apconst(" << kind << "): " << fmt17(nv.as_double()) << "\n";
  return 0;
}

int run_hcontent(const Common& c, const std::string& cells_csv, double alpha) {
  const auto layout = c.layout();
  ReportSink sink{c, "hcontent"};
  sink.config_extra.emplace_back("cells", cells_csv);
  sink.config_extra.emplace_back("alpha", fmt17(alpha));
  const auto cover = hausdorff_content(CellSet::from_indices(layout, parse_ints(cells_csv)), alpha);

  std::string joined;
  Json jcover = Json::array();
  for (const auto& qc : cover.cover) {
    if (!joined.empty()) joined += ";";
    joined += qc.str();
    jcover.push(Json::str(qc.str()));
  }
  sink.csv_header = "alpha,value,cover";
  sink.row(fmt17(alpha) + "," + fmt17(cover.value) + "," + joined);
  sink.results.set("value", Json::number(cover.value));
  sink.results.set("cover", std::move(jcover));
  sink.write();
  sink.emit_config_file();
  std::cout << "hcontent: " << fmt17(cover.value) << "\n";
  return 0;
}

int run_choquet(const Common& c, const std::string& phi_expr, double alpha) {
  const auto layout = c.layout();
  ReportSink sink{c, "choquet"};
  sink.config_extra.emplace_back("phi", phi_expr);
  sink.config_extra.emplace_back("alpha", fmt17(alpha));
  const double value = choquet_integral(parse_grid_expr(phi_expr, layout).f, alpha);
  sink.csv_header = "alpha,value";
  sink.row(fmt17(alpha) + "," + fmt17(value));
  sink.results.set("value", Json::number(value));
  sink.write();
  sink.emit_config_file();
  std::cout << "choquet: " << fmt17(value) << "\n";
  return 0;
}

BasisCandidate parse_basis_expr(const std::string& expr, const GridLayout& layout, double lambda) {
  const auto colon = expr.find(':');
  const std::string kind = colon == std::string::npos ? expr : expr.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : expr.substr(colon + 1);
  std::map<std::string, std::string> kv;
  {
    std::istringstream is(rest);
    std::string item;
    while (std::getline(is, item, ',')) {
      const auto eq = item.find('=');
      if (eq != std::string::npos) kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  if (kind == "b1") {
    const int level = kv.count("level") ? std::stoi(kv.at("level")) : 0;
    const std::int64_t flat = kv.count("index") ? std::stoll(kv.at("index")) : 0;
    const double lambda0 = kv.count("lambda0") ? std::stod(kv.at("lambda0"))
                                               : (lambda + static_cast<double>(layout.dim)) / 2.0;
    return make_b1(DyadicCube::from_flat(layout.dim, level, flat), layout, lambda, lambda0);
  }
  if (kind == "b2") {
    const double lambda1 = std::stod(kv.at("lambda1"));
    const double d = std::stod(kv.at("d"));
    return make_b2(layout, lambda, lambda1, d);
  }
  if (kind == "file") {
    GridFunction raw = read_grid_file(rest, layout.box);
    const double ch = choquet_integral(raw, lambda);
    GridFunction b = raw.cellwise([ch](double v) { return v / ch; }, true);
    return BasisCandidate{b, a1_constant(b).as_double(), choquet_integral(b, lambda), "user"};
  }
  throw CLI::ValidationError("--b", "expected b1:...|b2:...|file:path");
}

int run_decompose(const Common& c, const std::string& f_expr, const std::string& b_expr) {
  const auto layout = c.layout();
  ReportSink sink{c, "decompose"};
  sink.config_extra.emplace_back("f", f_expr);
  sink.config_extra.emplace_back("b", b_expr);
  const GridFunction f = parse_grid_expr(f_expr, layout).f;
  const BasisCandidate b = parse_basis_expr(b_expr, layout, c.lambda);
  const auto cfg = c.exponents();
  const auto dec = atomic_decompose(f, cfg, b);

  const double pc = cfg.pconj();
  sink.csv_header = "k,support,coeff,atom_lp,atom_bound";
  for (const auto& atom : dec.atoms) {
    const double lp = lebesgue_norm(atom.atom, cfg.p).value;
    const double bound = std::pow(atom.support.side(layout.box), -c.lambda / pc);
    sink.row(std::to_string(atom.k) + "," + atom.support.str() + "," + fmt17(atom.coeff) + "," +
             fmt17(lp) + "," + fmt17(bound));
  }
  const GridFunction rec = dec.reconstruct(layout);
  double err = 0.0;
  double scale = f.max_value();
  for (std::int64_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(rec[i] - f[i]));
  sink.results.set("atoms", Json::integer(static_cast<std::int64_t>(dec.atoms.size())));
  sink.results.set("coeff_l1", Json::number(dec.coeff_l1));
  sink.results.set("holder_chain_bound", Json::number(dec.holder_chain_bound));
  sink.results.set("reconstruction_max_error", Json::number(scale > 0 ? err / scale : err));
  sink.results.set("basis", Json::str(dec.basis_tag));
  sink.write();
  sink.emit_config_file();
  std::cout << "decompose: " << dec.atoms.size() << " atoms, l1 " << fmt17(dec.coeff_l1) << "\n";
  return 0;
}

int run_test_conditions(const Common& c, const std::string& u_expr, const std::string& v_expr,
                        const std::string& which, bool no_adaptive, int trials) {
  const auto layout = c.layout();
  ReportSink sink{c, "test-conditions"};
  sink.config_extra.emplace_back("u", u_expr);
  sink.config_extra.emplace_back("v", v_expr);
  sink.config_extra.emplace_back("conditions", which);
  const GridFunction u = parse_grid_expr(u_expr, layout).f;
  const GridFunction v = parse_grid_expr(v_expr, layout).f;
  const auto cfg = c.exponents();
  const auto roster = default_roster(layout, c.lambda);
  ConditionOptions opts;
  opts.adaptive_b1 = !no_adaptive;
  opts.pairing_trials = trials;
  opts.seed = c.seed;

  sink.csv_header = "condition,value,witness_outer,witness_inner,candidate,companion";
  Json jconds = Json::array();
  std::istringstream is(which);
  std::string name;
  std::string summary;
  while (std::getline(is, name, ',')) {
    ConditionReport rep;
    if (name == "b") rep = test_condition_b(u, v, cfg, roster, opts);
    else if (name == "c") rep = test_condition_c(u, v, cfg, roster, opts);
    else if (name == "d") rep = test_condition_d(u, v, cfg, c.a, roster, opts);
    else if (name == "e") rep = test_condition_e(u, v, cfg, roster, opts);
    else if (name == "sawyer") rep = test_sawyer(u, v, c.p, c.q);
    else throw CLI::ValidationError("--conditions", "unknown condition '" + name + "'");
    sink.row(name + "," + fmt17(rep.value) + "," + rep.witness_outer.str() + "," +
             cube_str(rep.witness_inner) + "," + rep.candidate_b.value_or("-") + "," +
             fmt17(rep.companion));
    jconds.push(condition_json(rep));
    if (!summary.empty()) summary += ", ";
    summary += name + "=" + fmt17(rep.value);
  }
  sink.results.set("conditions", std::move(jconds));
  sink.results.set("roster_size", Json::integer(static_cast<std::int64_t>(roster.size())));
  sink.write();
  sink.emit_config_file();
  std::cout << "test-conditions: " << summary << "\n";
  return 0;
}

int run_power_sweep(const Common& c, const std::string& alphas_csv, const std::string& depths_csv,
                    int random_members) {
  ReportSink sink{c, "power-sweep"};
  sink.config_extra.emplace_back("alphas", alphas_csv);
  sink.config_extra.emplace_back("depths", depths_csv);
  const auto alphas = parse_floats(alphas_csv, ',');
  const auto depths = parse_ints(depths_csv);
  const auto cfg = c.exponents();

  Json ranges = Json::object();
  for (auto [name, kindr] : {std::pair<const char*, RangeKind>{"ap", RangeKind::ap},
                             {"cond_1_2", RangeKind::cond_1_2},
                             {"morrey_sharp", RangeKind::morrey_sharp}})
    ranges.set(name, Json::str(admissible_range(kindr, cfg).str()));
  sink.results.set("ranges", std::move(ranges));

  TestFamilySpec family;
  family.random_sparse = random_members;

  sink.csv_header = "alpha,depth,estimate_global,estimate_localized,in_ap,in_cond12,in_sharp";
  Json rows = Json::array();
  for (double alpha : alphas) {
    for (auto depth : depths) {
      Common cc = c;
      cc.L = static_cast<int>(depth);
      const auto layout = cc.layout();
      const std::vector<double> origin(static_cast<std::size_t>(layout.dim), 0.0);
      const GridFunction w = power_weight(alpha, origin, layout).realized;
      const auto est = estimate_inequality(w, w, cfg, family, c.seed);
      const bool in_ap = admissible_range(RangeKind::ap, cfg).contains(alpha);
      const bool in_cond = admissible_range(RangeKind::cond_1_2, cfg).contains(alpha);
      const bool in_sharp = admissible_range(RangeKind::morrey_sharp, cfg).contains(alpha);
      sink.row(fmt17(alpha) + "," + std::to_string(depth) + "," + fmt17(est.global_value) + "," +
               fmt17(est.localized_value) + "," + (in_ap ? "1" : "0") + "," +
               (in_cond ? "1" : "0") + "," + (in_sharp ? "1" : "0"));
      Json r = Json::object();
      r.set("alpha", Json::number(alpha));
      r.set("depth", Json::integer(depth));
      r.set("estimate_global", Json::number(est.global_value));
      r.set("estimate_localized", Json::number(est.localized_value));
      r.set("witness", Json::str(est.witness));
      r.set("evaluated", Json::integer(est.evaluated));
      rows.push(std::move(r));
    }
  }
  sink.results.set("rows", std::move(rows));
  sink.write();
  sink.emit_config_file();
  std::cout << "power-sweep: " << alphas.size() << " alphas x " << depths.size() << " depths\n";
  return 0;
}

int run_upper_triangle(const Common& c, const std::string& u_expr, const std::string& v_expr,
                       int random_members) {
  const auto layout = c.layout();
  ReportSink sink{c, "upper-triangle"};
  sink.config_extra.emplace_back("u", u_expr);
  sink.config_extra.emplace_back("v", v_expr);
  const GridFunction u = parse_grid_expr(u_expr, layout).f;
  const GridFunction v = parse_grid_expr(v_expr, layout).f;
  TestFamilySpec family;
  family.random_sparse = random_members;
  const auto rep = prop51_check(u, v, c.exponents(), family, c.seed);

  sink.csv_header = "r,norm,empirical_ratio";
  sink.row(fmt17(c.exponents().r()) + "," + fmt17(rep.value) + "," + fmt17(rep.companion));
  sink.results.set("prop51", condition_json(rep));
  sink.write();
  sink.emit_config_file();
  std::cout << "upper-triangle: norm " << fmt17(rep.value) << ", empirical "
            << fmt17(rep.companion) << "\n";
  return 0;
}

int run_estimate(const Common& c, const std::string& u_expr, const std::string& v_expr,
                 int random_members) {
  const auto layout = c.layout();
  ReportSink sink{c, "estimate"};
  sink.config_extra.emplace_back("u", u_expr);
  sink.config_extra.emplace_back("v", v_expr);
  const GridFunction u = parse_grid_expr(u_expr, layout).f;
  const GridFunction v = parse_grid_expr(v_expr, layout).f;
  TestFamilySpec family;
  family.random_sparse = random_members;
  const auto est = estimate_inequality(u, v, c.exponents(), family, c.seed);

  sink.csv_header = "variant,value,witness";
  sink.row("global," + fmt17(est.global_value) + "," + est.witness);
  sink.row("localized," + fmt17(est.localized_value) + ",");
  sink.results.set("estimate_global", Json::number(est.global_value));
  sink.results.set("estimate_localized", Json::number(est.localized_value));
  sink.results.set("witness", Json::str(est.witness));
  sink.results.set("evaluated", Json::integer(est.evaluated));
  for (const auto& s : est.skipped) sink.notes.push(Json::str(s));
  sink.write();
  sink.emit_config_file();
  std::cout << "estimate: global " << fmt17(est.global_value) << " (witness " << est.witness
            << ")\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args) {
  std::vector<std::string> args;
  try {
    args = splice_config(raw_args);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  CLI::App app{"desk-scale dyadic toolkit for weighted Morrey-space inequalities"};
  app.require_subcommand(1);

  struct {
    Common common;
    std::string f, mu, restrict_cube, w, u, v = "const:c=1";
    std::string kind = "morrey";
    std::string ap_kind = "ap";
    std::string cells = "0";
    double alpha = 0.5;
    std::string b = "b1:level=0,index=0";
    std::string conditions = "b,c,d";
    bool no_adaptive = false;
    int trials = 16;
    int random_members = 32;
    std::string alphas = "-0.8,-0.4,0,0.5,1.0,1.4,1.6";
    std::string depths = "4,6";
  } o;

  auto* cmd_maximal = app.add_subcommand("maximal", "dyadic maximal operator of f");
  add_common(cmd_maximal, o.common);
  cmd_maximal->add_option("--f", o.f, "input function expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_maximal->add_option("--mu", o.mu, "weight for the mu-maximal operator")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_maximal->add_option("--restrict", o.restrict_cube, "localization cube level:flat")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_norm = app.add_subcommand("norm", "Lebesgue/Morrey norm of f");
  add_common(cmd_norm, o.common);
  cmd_norm->add_option("--kind", o.kind, "lebesgue|morrey")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_norm->add_option("--f", o.f, "input function expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_norm->add_option("--w", o.w, "weight expression")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_ap = app.add_subcommand("apconst", "Muckenhoupt-type constants of a weight");
  add_common(cmd_ap, o.common);
  cmd_ap->add_option("--kind", o.ap_kind, "ap|a1|cond12")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ap->add_option("--w", o.w, "weight expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_hc = app.add_subcommand("hcontent", "dyadic Hausdorff content of a cell set");
  add_common(cmd_hc, o.common);
  cmd_hc->add_option("--cells", o.cells, "comma-separated finest-cell indices")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_hc->add_option("--alpha", o.alpha, "content exponent")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_ch = app.add_subcommand("choquet", "Choquet integral of phi against H^alpha");
  add_common(cmd_ch, o.common);
  cmd_ch->add_option("--phi", o.f, "integrand expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ch->add_option("--alpha", o.alpha, "content exponent")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_dec = app.add_subcommand("decompose", "atomic decomposition of f against a candidate");
  add_common(cmd_dec, o.common);
  cmd_dec->add_option("--f", o.f, "input function expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_dec->add_option("--b", o.b, "basis candidate (b1:...|b2:...|file:path)")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_tc = app.add_subcommand("test-conditions", "testing conditions for a weight pair");
  add_common(cmd_tc, o.common);
  cmd_tc->add_option("--u", o.u, "left weight expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_tc->add_option("--v", o.v, "right weight expression")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_tc->add_option("--conditions", o.conditions, "subset of b,c,d,e,sawyer")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_tc->add_flag("--no-adaptive", o.no_adaptive, "disable the cube-adapted b1 candidates");
  cmd_tc->add_option("--trials", o.trials, "pairing trials for the condition-b lower bound")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_ps = app.add_subcommand("power-sweep", "operator-ratio sweep over power weights");
  add_common(cmd_ps, o.common);
  cmd_ps->add_option("--alphas", o.alphas, "comma-separated power exponents")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ps->add_option("--depths", o.depths, "comma-separated grid depths")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ps->add_option("--random", o.random_members, "random family members per estimate")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_ut = app.add_subcommand("upper-triangle", "q<p two-weight criterion");
  add_common(cmd_ut, o.common);
  cmd_ut->add_option("--u", o.u, "left weight expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ut->add_option("--v", o.v, "right weight expression")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_ut->add_option("--random", o.random_members, "random family members")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* cmd_est = app.add_subcommand("estimate", "empirical operator-norm estimate");
  add_common(cmd_est, o.common);
  cmd_est->add_option("--u", o.u, "left weight expression")->required()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_est->add_option("--v", o.v, "right weight expression")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd_est->add_option("--random", o.random_members, "random family members")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<const char*> argv;
  argv.push_back("morreylab");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int threads = o.common.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("MORREYLAB_THREADS")) threads = std::atoi(env);
  }
  set_thread_cap(threads > 0 ? threads : 1);

  try {
    if (cmd_maximal->parsed()) return run_maximal(o.common, o.f, o.mu, o.restrict_cube);
    if (cmd_norm->parsed()) return run_norm(o.common, o.kind, o.f, o.w);
    if (cmd_ap->parsed()) return run_apconst(o.common, o.ap_kind, o.w);
    if (cmd_hc->parsed()) return run_hcontent(o.common, o.cells, o.alpha);
    if (cmd_ch->parsed()) return run_choquet(o.common, o.f, o.alpha);
    if (cmd_dec->parsed()) return run_decompose(o.common, o.f, o.b);
    if (cmd_tc->parsed())
      return run_test_conditions(o.common, o.u, o.v, o.conditions, o.no_adaptive, o.trials);
    if (cmd_ps->parsed()) return run_power_sweep(o.common, o.alphas, o.depths, o.random_members);
    if (cmd_ut->parsed()) return run_upper_triangle(o.common, o.u, o.v, o.random_members);
    if (cmd_est->parsed()) return run_estimate(o.common, o.u, o.v, o.random_members);
  } catch (const DomainError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace morreylab
