#include "deconv/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deconv/error.hpp"
#include "deconv/inference.hpp"
#include "deconv/nj_model.hpp"
#include "deconv/parallel.hpp"
#include "deconv/pn_bound.hpp"
#include "deconv/profile_io.hpp"
#include "deconv/shape_sim.hpp"
#include "deconv/structures.hpp"

namespace deconv::cli {

namespace {

constexpr int kCsvDigits = 12;
constexpr int kProfileDigits = 9;

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Output tables

using Cell = std::variant<double, long long, std::string, bool, std::nullptr_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<int> digits;  // per column, for doubles in CSV
  std::vector<std::vector<Cell>> rows;
  bool single_record = false;

  Table(std::vector<std::string> cols, bool single = false)
      : columns(std::move(cols)), digits(columns.size(), kCsvDigits),
        single_record(single) {}
};

std::string csv_cell(const Cell& c, int digits) {
  struct Visitor {
    int digits;
    std::string operator()(double v) const { return format_significant(v, digits); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(std::nullptr_t) const { return ""; }
  };
  return std::visit(Visitor{digits}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(double v) const { return v; }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(std::nullptr_t) const { return nullptr; }
  };
  return std::visit(Visitor{}, c);
}

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      os << (i ? "," : "") << t.columns[i];
    }
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        os << (i ? "," : "") << csv_cell(row[i], t.digits[i]);
      }
      os << '\n';
    }
    return os.str();
  }
  auto record = [&](const std::vector<Cell>& row) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    return obj;
  };
  nlohmann::ordered_json doc;
  if (t.single_record && t.rows.size() == 1) {
    doc = record(t.rows.front());
  } else {
    doc = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) doc.push_back(record(row));
  }
  os << doc.dump(2) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Input helpers

std::string read_first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  return line;
}

bool looks_like_mask(const std::string& s) {
  return !s.empty() && s.find_first_not_of("x.") == std::string::npos;
}

// "@path" reads the mask from a file; a bare argument is a mask string when
// it only holds 'x' and '.', otherwise a path.
PairingMask load_mask(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    return PairingMask::parse(read_first_line(arg.substr(1)));
  }
  if (looks_like_mask(arg)) return PairingMask::parse(arg);
  std::ifstream probe(arg);
  if (probe) return PairingMask::parse(read_first_line(arg));
  return PairingMask::parse(arg);  // reports the offending character
}

ShapeProfile load_profile(const std::string& arg) {
  const std::string path = (!arg.empty() && arg.front() == '@') ? arg.substr(1) : arg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile CSV '" + path + "'");
  return read_profile_csv(in);
}

void require_unit_grid(const std::vector<double>& grid, bool open) {
  for (double p : grid) {
    const bool ok = open ? (p > 0.0 && p < 1.0) : (p >= 0.0 && p <= 1.0);
    if (!ok) {
      throw InvalidArgument(std::string("grid value ") + format_significant(p, 12) +
                            (open ? " outside (0, 1)" : " outside [0, 1]"));
    }
  }
}

Table profile_table(const ShapeProfile& profile) {
  Table t({"index", "reactivity"});
  t.digits[1] = kProfileDigits;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    t.rows.push_back({static_cast<long long>(i), profile[i]});
  }
  return t;
}

// ---------------------------------------------------------------------------

struct Common {
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format;
};

struct Command {
  CLI::App* app = nullptr;
  std::string default_format;
  std::function<Table()> body;
};

void add_common(CLI::App* sub, Common& common, const std::string& default_format) {
  sub->add_option("--seed", common.seed, "Run seed; every random stream derives from it")
      ->capture_default_str();
  sub->add_option("--out", common.out_path, "Write the artifact here instead of stdout");
  sub->add_option("--format", common.format,
                  "Output format (default " + default_format + ")")
      ->check(CLI::IsMember({"csv", "json"}));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return kMalformedInput;
  if (dynamic_cast<const CapExceeded*>(&e)) return kCapExceeded;
  if (dynamic_cast<const UndefinedCrossover*>(&e)) return kUndefinedCrossover;
  if (dynamic_cast<const NoInformativePositions*>(&e)) return kNoInformativePositions;
  if (dynamic_cast<const QuadratureError*>(&e)) return kQuadrature;
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const InvalidArgument*>(&e)) return kInvalidArgument;
  return kFailure;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
      throw InvalidArgument("grid spec '" + spec + "': bad number '" + text + "'");
    }
    return v;
  };

  std::vector<std::string> parts;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= spec.size(); ++i) {
    if (i == spec.size() || spec[i] == ':') {
      parts.push_back(spec.substr(begin, i - begin));
      begin = i + 1;
    }
  }
  if (parts.size() == 1) return {number(parts[0])};
  if (parts.size() != 3) {
    throw InvalidArgument("grid spec '" + spec + "': expected start:stop:step");
  }
  const double start = number(parts[0]);
  const double stop = number(parts[1]);
  const double step = number(parts[2]);
  if (!(step > 0.0) || stop < start) {
    throw InvalidArgument("grid spec '" + spec + "': need step > 0 and stop >= start");
  }
  const double span = (stop - start) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  if (count > 10'000'000) throw InvalidArgument("grid spec '" + spec + "': too many points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (std::abs(v - stop) <= 1e-9 * std::max(1.0, std::abs(stop))) v = stop;
    grid[i] = v;
  }
  return grid;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformational-ratio deconvolution toolkit: pseudoenergy crossover "
               "analysis, failure-probability bounds, reactivity simulation and "
               "likelihood-based ratio estimation."};
  app.name("deconv");
  app.require_subcommand(1);

  Common common;
  std::vector<Command> commands;

  // Shared option storage; each subcommand registers what it uses.
  std::string mask_arg, mask_a_arg, mask_b_arg, data_arg, s_arg, t_arg;
  std::string p_grid_spec, n_range_spec;
  double q = 0.6;
  double c = 1.0;
  double rt = kDefaultRT;
  std::optional<double> p_value;
  std::size_t n_value = 0;
  std::size_t trials = 1;
  std::size_t cap = kDefaultEnumerationCap;

  // simulate -----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "simulate",
        "Simulate a reactivity profile for a mask: unpaired positions draw from "
        "the exponential fit (lambda 1.46797), paired positions from the "
        "center-paired GEV fit (xi 0.762581, sigma 0.0492536, mu 0.0395857).");
    sub->add_option("--mask", mask_arg, "Mask string ('x' paired, '.' unpaired) or @file")
        ->required();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          const PairingMask mask = load_mask(mask_arg);
                          Rng rng = Rng::for_task(common.seed, 0);
                          return profile_table(simulate_profile(mask, rng));
                        }});
  }

  // mix ----------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "mix", "Mixture profile M(p) = p S + (1 - p) T of two reactivity profiles.");
    sub->add_option("--s", s_arg, "Profile CSV for structure A (path or @path)")->required();
    sub->add_option("--t", t_arg, "Profile CSV for structure B (path or @path)")->required();
    sub->add_option("--p", p_value, "Mixture ratio of structure A in [0, 1]")->required();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          const auto m = mix_profiles(load_profile(s_arg),
                                                      load_profile(t_arg), *p_value);
                          return profile_table(m.values);
                        }});
  }

  // estimate -----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "estimate",
        "Maximum-likelihood conformational ratio from the reactivities at "
        "positions where the two masks differ, with its Cramer-Rao variance "
        "bound 1 / (k I(p) + l I(1 - p)).");
    sub->add_option("--data", data_arg, "Profile CSV (path or @path)")->required();
    sub->add_option("--mask-a", mask_a_arg, "Mask of structure A, or @file")->required();
    sub->add_option("--mask-b", mask_b_arg, "Mask of structure B, or @file")->required();
    add_common(sub, common, "json");
    commands.push_back({sub, "json", [&] {
                          const ShapeProfile data = load_profile(data_arg);
                          const PairingMask a = load_mask(mask_a_arg);
                          const PairingMask b = load_mask(mask_b_arg);
                          if (a.size() != b.size() || a.size() != data.size()) {
                            throw InvalidArgument("estimate: masks and data differ in length");
                          }
                          const auto est = mle_estimate(data, DifferingPositions::between(a, b));
                          Table t({"p_hat", "log_likelihood", "cr_variance_bound", "k", "l"},
                                  true);
                          t.rows.push_back({est.p_hat, est.log_likelihood,
                                            est.cr_variance_bound,
                                            static_cast<long long>(est.k),
                                            static_cast<long long>(est.l)});
                          return t;
                        }});
  }

  // fisher -------------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "fisher",
        "Fisher information I(p) = int (d/dp log g)^2 g dx of one reactivity "
        "drawn from the unpaired/center-paired mixture density g(x, p).");
    auto* single = sub->add_option("--p", p_value, "Single ratio in (0, 1)");
    sub->add_option("--p-grid", p_grid_spec, "Grid start:stop:step inside (0, 1)")
        ->excludes(single);
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          std::vector<double> grid;
                          if (p_value) {
                            grid = {*p_value};
                          } else if (!p_grid_spec.empty()) {
                            grid = parse_grid(p_grid_spec);
                          } else {
                            throw InvalidArgument("fisher: give --p or --p-grid");
                          }
                          require_unit_grid(grid, true);
                          const FisherResult r = fisher_curve(grid);
                          Table t({"p", "I"});
                          for (const auto& pt : r.grid) t.rows.push_back({pt.p, pt.information});
                          return t;
                        }});
  }

  // crossover ----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "crossover",
        "Crossover point p* = 1/2 + 1/(2C) - |A-B| / (C |A delta B|) and "
        "crossover window (P(A)/P(B) within [1/9, 9]) for the Nussinov-Jacobson "
        "energy with a data-agreement term.");
    sub->add_option("--mask-a", mask_a_arg, "Mask of structure A, or @file")->required();
    sub->add_option("--mask-b", mask_b_arg, "Mask of structure B, or @file")->required();
    sub->add_option("--c", c, "Pseudoenergy weight C > 0")->capture_default_str();
    sub->add_option("--rt", rt, "RT in kcal/mol")->capture_default_str();
    add_common(sub, common, "json");
    commands.push_back({sub, "json", [&] {
                          const PairingMask a = load_mask(mask_a_arg);
                          const PairingMask b = load_mask(mask_b_arg);
                          const NJParams params(c, rt);
                          const PairStats s = pair_stats(a, b);
                          const CrossoverResult r = crossover_window(a, b, params);
                          Table t({"p_star", "p_star_in_range", "window_bound",
                                   "window_lo", "window_hi", "bp_a_minus_b",
                                   "bp_b_minus_a", "bp_symdiff"},
                                  true);
                          Cell lo = nullptr;
                          Cell hi = nullptr;
                          if (r.window) {
                            lo = r.window->lo;
                            hi = r.window->hi;
                          }
                          t.rows.push_back({r.p_star, r.p_star_in_range, r.window_bound, lo,
                                            hi, static_cast<long long>(s.bp_a_minus_b),
                                            static_cast<long long>(s.bp_b_minus_a),
                                            static_cast<long long>(s.bp_symdiff)});
                          return t;
                        }});
  }

  // pn-bound -----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "pn-bound",
        "Lower bound on the probability that two random masks of length n have "
        "a ratio the Nussinov-Jacobson model cannot reconstruct within total "
        "variation distance 0.25, optimized over the case cutoff.");
    auto* single = sub->add_option("--n", n_value, "Single length n >= 1");
    sub->add_option("--n-range", n_range_spec, "Lengths first:last (inclusive)")
        ->excludes(single);
    sub->add_option("--q", q, "Pairing probability in (0, 1)")->capture_default_str();
    sub->add_option("--rt", rt, "RT in kcal/mol")->capture_default_str();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          std::size_t first = n_value;
                          std::size_t last = n_value;
                          if (!n_range_spec.empty()) {
                            const auto colon = n_range_spec.find(':');
                            try {
                              if (colon == std::string::npos) throw std::invalid_argument("");
                              first = std::stoul(n_range_spec.substr(0, colon));
                              last = std::stoul(n_range_spec.substr(colon + 1));
                            } catch (const std::exception&) {
                              throw InvalidArgument("pn-bound: --n-range expects first:last");
                            }
                          }
                          if (first == 0 || last < first) {
                            throw InvalidArgument("pn-bound: need 1 <= first <= last (use --n or --n-range)");
                          }
                          std::vector<PnResult> results(last - first + 1);
                          parallel_for(results.size(), [&](std::size_t i) {
                            results[i] = pn_lower_bound(PnQuery(first + i, q, rt));
                          });
                          Table t({"n", "best_cutoff", "case1", "case2", "lower_bound"});
                          for (const auto& r : results) {
                            t.rows.push_back({static_cast<long long>(r.n), r.best_cutoff,
                                              r.case1, r.case2, r.lower_bound});
                          }
                          return t;
                        }});
  }

  // tvd-sweep ----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "tvd-sweep",
        "Total variation distance |p - p_hat| where p_hat is the probability, "
        "under the full Boltzmann ensemble of masks given M(p), of a mask closer "
        "to A than to B by F-measure (ties count half).");
    sub->add_option("--mask-a", mask_a_arg, "Mask of structure A, or @file")->required();
    sub->add_option("--mask-b", mask_b_arg, "Mask of structure B, or @file")->required();
    sub->add_option("--c", c, "Pseudoenergy weight C")->capture_default_str();
    sub->add_option("--rt", rt, "RT in kcal/mol")->capture_default_str();
    p_grid_spec = "0:1:0.05";
    sub->add_option("--p-grid", p_grid_spec, "Grid start:stop:step in [0, 1]")
        ->capture_default_str();
    sub->add_option("--cap", cap, "Largest mask length to enumerate")->capture_default_str();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          const PairingMask a = load_mask(mask_a_arg);
                          const PairingMask b = load_mask(mask_b_arg);
                          const auto grid = parse_grid(p_grid_spec);
                          require_unit_grid(grid, false);
                          const auto sweep = tvd_sweep(a, b, NJParams(c, rt), grid, cap);
                          Table t({"p", "p_hat", "tvd"});
                          for (const auto& pt : sweep) t.rows.push_back({pt.p, pt.p_hat, pt.tvd});
                          return t;
                        }});
  }

  // ensemble -----------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "ensemble",
        "Exact Boltzmann distribution over all 2^n masks under the "
        "Nussinov-Jacobson energy with data term, for a profile CSV or for the "
        "noiseless mixture M(p) of two masks.");
    sub->add_option("--data", data_arg, "Profile CSV (path or @path)");
    sub->add_option("--mask-a", mask_a_arg, "Mask of structure A, with --mask-b and --p");
    sub->add_option("--mask-b", mask_b_arg, "Mask of structure B");
    sub->add_option("--p", p_value, "Mixture ratio for the noiseless mixture");
    sub->add_option("--c", c, "Pseudoenergy weight C")->capture_default_str();
    sub->add_option("--rt", rt, "RT in kcal/mol")->capture_default_str();
    sub->add_option("--cap", cap, "Largest mask length to enumerate")->capture_default_str();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          ShapeProfile m;
                          if (!data_arg.empty()) {
                            m = load_profile(data_arg);
                          } else if (!mask_a_arg.empty() && !mask_b_arg.empty() && p_value) {
                            m = mix_profiles(noiseless_profile(load_mask(mask_a_arg)),
                                             noiseless_profile(load_mask(mask_b_arg)),
                                             *p_value)
                                    .values;
                          } else {
                            throw InvalidArgument(
                                "ensemble: give --data, or --mask-a, --mask-b and --p");
                          }
                          const NJParams params(c, rt);
                          const Ensemble e = full_ensemble(m, params, cap);
                          Table t({"mask", "energy", "probability"});
                          for (std::size_t bits = 0; bits < e.probabilities.size(); ++bits) {
                            const PairingMask mask = PairingMask::from_bits(bits, e.n);
                            t.rows.push_back({mask.to_string(), nj_energy(mask, m, params),
                                              e.probabilities[bits]});
                          }
                          return t;
                        }});
  }

  // mle-experiment -------------------------------------------------------------
  {
    auto* sub = app.add_subcommand(
        "mle-experiment",
        "Recovery experiment: simulate profiles for both masks, mix at each p, "
        "estimate p by maximum likelihood and report mean / max |p_hat - p|.");
    sub->add_option("--mask-a", mask_a_arg, "Mask of structure A, or @file")->required();
    sub->add_option("--mask-b", mask_b_arg, "Mask of structure B, or @file")->required();
    sub->add_option("--p-grid", p_grid_spec, "Grid start:stop:step in [0, 1]")
        ->capture_default_str();
    sub->add_option("--trials", trials, "Trials per grid value")->capture_default_str();
    add_common(sub, common, "csv");
    commands.push_back({sub, "csv", [&] {
                          const auto grid = parse_grid(p_grid_spec);
                          require_unit_grid(grid, false);
                          const auto ex = mle_experiment(load_mask(mask_a_arg),
                                                         load_mask(mask_b_arg), grid,
                                                         trials, common.seed);
                          Table t({"p", "mean_abs_error", "max_abs_error"});
                          for (const auto& r : ex.rows) {
                            t.rows.push_back({r.p, r.mean_abs_error, r.max_abs_error});
                          }
                          return t;
                        }});
  }

  std::vector<const char*> argv;
  argv.push_back("deconv");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "deconv: " << e.what() << '\n';
    return kUsage;
  }

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    try {
      const Table table = cmd.body();
      const std::string format = common.format.empty() ? cmd.default_format : common.format;
      const std::string text = render(table, format);
      if (common.out_path.empty()) {
        out << text;
      } else {
        std::ofstream file(common.out_path, std::ios::binary);
        if (!file) throw IoError("cannot write '" + common.out_path + "'");
        file << text;
        if (!file) throw IoError("write to '" + common.out_path + "' failed");
      }
      return kOk;
    } catch (const std::exception& e) {
      err << "deconv " << cmd.app->get_name() << ": " << e.what() << '\n';
      return exit_code_for(e);
    }
  }
  err << "deconv: no subcommand given\n";
  return kUsage;
}

}  // namespace deconv::cli
