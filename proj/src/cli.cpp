#include "qcorr/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace qcorr::cli {
namespace {

using io::json;

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }
json optional_bool(const std::optional<bool>& x) { return x ? json(*x) : json(nullptr); }

std::filesystem::path resolve_output(const std::filesystem::path& p) {
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / p;
  return p;
}

void emit(const std::string& text, const std::optional<std::filesystem::path>& path,
          std::ostream& out) {
  if (path)
    io::write_file_atomic(resolve_output(*path), text);
  else
    out << text;
}

json subset_labels(const EventSpace& events, EventSubset subset) {
  json labels = json::array();
  for (const std::size_t i : members(subset)) labels.push_back(events.labels()[i]);
  return labels;
}

json tightness_to_json(const LinearLhvModel<double>& m, const TightnessReport& r) {
  json failing = json::array(), masks = json::array();
  for (const EventSubset s : r.failing_subsets) {
    failing.push_back(subset_labels(m.events(r.side), s));
    masks.push_back(s);
  }
  return {{"side", to_string(r.side)},
          {"tight", r.tight},
          {"pairwise_criterion", r.pairwise_criterion},
          {"failing_subsets", std::move(failing)},
          {"failing_masks", std::move(masks)}};
}

std::uint64_t parse_uint(const std::string& text, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || text.front() == '-')
    throw InvalidParameter(std::string(what) + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty())
    throw InvalidParameter(std::string(what) + ": expected a number, got '" + text + "'");
  return v;
}

Dims parse_dims(const std::string& text) {
  const auto sep = text.find_first_of("x,");
  if (sep == std::string::npos) throw InvalidParameter("--dims: expected AxB, got '" + text + "'");
  const auto a = parse_uint(text.substr(0, sep), "--dims");
  const auto b = parse_uint(text.substr(sep + 1), "--dims");
  if (a < 1 || b < 1 || a * b > 64) throw InvalidParameter("--dims: unsupported dimensions");
  return {static_cast<Index>(a), static_cast<Index>(b)};
}

void summarize(const std::string& name, const ClassificationReport& r, std::ostream& err) {
  auto num = [](const std::optional<double>& x) {
    if (!x) return std::string("n/a");
    std::ostringstream s;
    s << std::setprecision(6) << *x;
    return s.str();
  };
  err << name << ": dims " << to_string(r.dims) << ", entangled " << to_string(r.ppt.verdict())
      << ", D(b|a) " << num(r.discord_ba) << ", D(a|b) " << num(r.discord_ab)
      << ", zero discord " << (r.zero_discord ? "yes" : "no") << ", linear LHV "
      << (r.lhv.built ? "built (" + r.lhv.source + ")" : std::string("not built"));
  if (r.lhv.built)
    err << ", tight a/b " << (r.lhv.tight_a.value_or(false) ? "yes" : "no") << "/"
        << (r.lhv.tight_b.value_or(false) ? "yes" : "no");
  if (r.chsh_max) err << ", CHSH " << num(r.chsh_max);
  err << "\n";
}

// p_ij Pi_i (x) Pi_j, keeping only the populated cells.
SeparableDecomposition<double> as_separable(const CCDecomposition<double>& d) {
  std::vector<double> weights;
  std::vector<SeparableDecomposition<double>::Pair> pairs;
  for (Index i = 0; i < d.weights().rows(); ++i)
    for (Index j = 0; j < d.weights().cols(); ++j) {
      if (d.weights()(i, j) <= 0) continue;
      weights.push_back(d.weights()(i, j));
      pairs.emplace_back(DensityMatrix<double>::pure(d.basis_a().vector(i)),
                         DensityMatrix<double>::pure(d.basis_b().vector(j)));
    }
  return SeparableDecomposition<double>(std::move(weights), std::move(pairs));
}

int cmd_classify(const std::vector<std::string>& files,
                 const std::optional<std::string>& decomposition_file, const CliConfig& cfg,
                 std::ostream& out, std::ostream& err) {
  std::optional<SeparableDecomposition<double>> decomposition;
  if (decomposition_file) {
    auto d = io::decomposition_from_json(io::read_json_file(*decomposition_file), cfg.tol);
    if (auto* sep = std::get_if<SeparableDecomposition<double>>(&d))
      decomposition = std::move(*sep);
    else
      decomposition = as_separable(std::get<CCDecomposition<double>>(d));
  }
  std::vector<std::pair<std::string, ClassificationReport>> reports;
  for (const auto& file : files) {
    const json doc = io::read_json_file(file);
    const io::RawState raw = io::raw_state_from_json(doc);
    const Validity v = check_density(raw.matrix, cfg.tol);
    if (!v.ok()) {
      err << file << ": not a valid state (hermitian " << v.hermitian << ", unit trace "
          << v.unit_trace << ", psd " << v.psd << ")\n";
      throw InvalidState(file + ": invalid density matrix");
    }
    const BipartiteState<double> state = io::state_from_json(doc, cfg.tol);
    reports.emplace_back(file, classify(state, cfg, decomposition));
  }
  json doc;
  if (reports.size() == 1) {
    doc = reports.front().second.to_json();
  } else {
    doc = json::object();
    for (const auto& [name, r] : reports) doc[name] = r.to_json();
  }
  emit(io::dump(doc), cfg.out, out);
  for (const auto& [name, r] : reports) summarize(name, r, err);
  return kSuccess;
}

int cmd_gen(const std::string& family, const std::optional<std::string>& param,
            const std::string& dims_text, const std::optional<std::string>& decomposition_out,
            const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::optional<json> decomposition;
  std::optional<BipartiteState<double>> state;
  if (family == "bell") {
    const auto k = param ? parse_uint(*param, "bell index") : 0;
    if (k > 3) throw InvalidParameter("bell index must be in 0..3");
    state = bell_state(static_cast<int>(k));
  } else if (family == "werner") {
    if (!param) throw InvalidParameter("werner requires the mixing parameter p");
    state = werner(parse_real(*param, "werner p"));
  } else if (family == "cc") {
    if (param) throw InvalidParameter("cc takes no positional parameter; use --seed and --dims");
    Rng rng(cfg.seed);
    const auto cc = random_cc_decomposition(parse_dims(dims_text), rng);
    state = from_cc_decomposition(cc);
    decomposition = io::decomposition_to_json(cc);
  } else if (family == "asym") {
    if (param) throw InvalidParameter("asym takes no parameter");
    const auto sep = asymmetric_decomposition();
    state = from_separable_decomposition(sep);
    decomposition = io::decomposition_to_json(sep);
  } else {
    throw InvalidParameter("unknown family '" + family + "' (expected bell, werner, cc, asym)");
  }
  if (decomposition_out && !decomposition)
    throw InvalidParameter("family '" + family + "' has no decomposition to write");
  const std::string state_text = io::dump(io::state_to_json(*state));
  if (decomposition_out)
    io::write_file_atomic(resolve_output(*decomposition_out), io::dump(*decomposition));
  emit(state_text, cfg.out, out);
  err << "generated " << family << " state, dims " << to_string(state->dims()) << "\n";
  return kSuccess;
}

int cmd_lhv_build(const std::string& decomposition_file, const CliConfig& cfg, std::ostream& out,
                  std::ostream& err) {
  const auto d = io::decomposition_from_json(io::read_json_file(decomposition_file), cfg.tol);
  const LinearLhvModel<double> model = std::visit(
      [](const auto& dec) -> LinearLhvModel<double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(dec)>, CCDecomposition<double>>)
          return build_tight_from_cc(dec);
        else
          return build_from_separable(dec);
      },
      d);
  emit(io::dump(io::model_to_json(model)), cfg.out, out);
  err << "built linear LHV model with " << model.events(Side::a).size() << " x "
      << model.events(Side::b).size() << " events\n";
  return kSuccess;
}

int cmd_lhv_verify(const std::string& model_file, const std::string& state_file,
                   const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto model = io::model_from_json(io::read_json_file(model_file), cfg.tol);
  const auto state = io::state_from_json(io::read_json_file(state_file), cfg.tol);
  const VerificationReport r = verify_against_state(model, state, cfg.samples, cfg.seed);
  const json doc = {{"max_deviation", r.max_abs_deviation},
                    {"samples", r.samples},
                    {"seed", cfg.seed},
                    {"vacuous", r.vacuous}};
  emit(io::dump(doc), cfg.out, out);
  err << "max deviation " << r.max_abs_deviation << " over " << r.samples << " samples\n";
  return kSuccess;
}

int cmd_lhv_audit(const std::string& model_file, const CliConfig& cfg, std::ostream& out,
                  std::ostream& err) {
  const auto model = io::model_from_json(io::read_json_file(model_file), cfg.tol);
  const TightnessReport ra = is_tight(model, Side::a);
  const TightnessReport rb = is_tight(model, Side::b);
  const json doc = {{"a", tightness_to_json(model, ra)}, {"b", tightness_to_json(model, rb)}};
  emit(io::dump(doc), cfg.out, out);
  err << "tight on a: " << (ra.tight ? "yes" : "no") << ", tight on b: " << (rb.tight ? "yes" : "no")
      << "\n";
  return kSuccess;
}

}  // namespace

void CliConfig::validate() const {
  if (!(tol > 0)) throw InvalidParameter("--tol must be positive");
  if (samples < 1) throw InvalidParameter("--samples must be positive");
  if (grid < 8) throw InvalidParameter("--grid must be at least 8");
}

io::json ClassificationReport::to_json() const {
  json lhv_doc = {{"built", lhv.built},
                  {"source", lhv.source.empty() ? json(nullptr) : json(lhv.source)},
                  {"tight_a", optional_bool(lhv.tight_a)},
                  {"tight_b", optional_bool(lhv.tight_b)},
                  {"max_deviation", optional_number(lhv.max_deviation)},
                  {"samples", lhv.samples},
                  {"note", lhv.note}};
  return {{"dims", json::array({dims.a, dims.b})},
          {"validity",
           {{"hermitian", validity.hermitian},
            {"unit_trace", validity.unit_trace},
            {"psd", validity.psd}}},
          {"ppt", !ppt.npt},
          {"ppt_min_eigenvalue", ppt.min_eigenvalue},
          {"entangled", to_string(ppt.verdict())},
          {"discord_ba", optional_number(discord_ba)},
          {"discord_ab", optional_number(discord_ab)},
          {"classical_quantum_a", classical_quantum_a},
          {"classical_quantum_b", classical_quantum_b},
          {"zero_discord", zero_discord},
          {"chsh_max", optional_number(chsh_max)},
          {"lhv", std::move(lhv_doc)},
          {"quasi",
           {{"negativity_sic", optional_number(negativity_sic)},
            {"min_weight", optional_number(min_weight_sic)}}}};
}

ClassificationReport classify(const BipartiteState<double>& state, const CliConfig& cfg,
                              const std::optional<SeparableDecomposition<double>>& decomposition) {
  cfg.validate();
  ClassificationReport r;
  const Dims dims = state.dims();
  r.dims = dims;
  r.validity = check_density(state.matrix(), cfg.tol);
  r.ppt = ppt_test(state, cfg.tol);

  DiscordConfig dc;
  dc.grid_resolution = cfg.grid;
  if (dims.a == 2) r.discord_ba = discord(state, DiscordDirection::b_given_a, dc).value;
  if (dims.b == 2) r.discord_ab = discord(state, DiscordDirection::a_given_b, dc).value;
  r.classical_quantum_a = is_classical_quantum(state, Side::a, cfg.tol);
  r.classical_quantum_b = is_classical_quantum(state, Side::b, cfg.tol);
  r.zero_discord = r.classical_quantum_a && r.classical_quantum_b;
  if (dims == Dims{2, 2}) r.chsh_max = chsh_max(state);

  auto finish_model = [&](const LinearLhvModel<double>& model, const std::string& source) {
    r.lhv.built = true;
    r.lhv.source = source;
    if (model.events(Side::a).size() <= kMaxTightnessEvents)
      r.lhv.tight_a = is_tight(model, Side::a).tight;
    if (model.events(Side::b).size() <= kMaxTightnessEvents)
      r.lhv.tight_b = is_tight(model, Side::b).tight;
    const auto v = verify_against_state(model, state, cfg.samples, cfg.seed);
    r.lhv.max_deviation = v.max_abs_deviation;
    r.lhv.samples = v.samples;
  };

  if (r.zero_discord) {
    try {
      finish_model(build_tight_from_cc(extract_cc_decomposition(state, cfg.tol, cfg.seed)), "cc");
    } catch (const DegeneracyUnresolved& e) {
      r.zero_discord = false;
      r.lhv.note = std::string("classical decomposition could not be extracted: ") + e.what();
    } catch (const NotClassical& e) {
      r.zero_discord = false;
      r.lhv.note = std::string("classical decomposition could not be extracted: ") + e.what();
    }
  }
  if (!r.lhv.built && decomposition) {
    if (decomposition->dims() != dims)
      throw DimensionMismatch("decomposition dims " + to_string(decomposition->dims()) +
                              " differ from state dims " + to_string(dims));
    const double distance =
        trace_distance(from_separable_decomposition(*decomposition).matrix(), state.matrix());
    if (r.ppt.verdict() == Entanglement::entangled || distance > cfg.tol)
      r.lhv.note = "supplied decomposition does not reproduce the state";
    else
      finish_model(build_from_separable(*decomposition), "separable");
  }
  if (!r.lhv.built && r.lhv.note.empty()) {
    r.lhv.note = r.ppt.verdict() == Entanglement::entangled
                     ? "state is entangled; no linear LHV representation exists"
                     : "no zero-discord certificate and no separable decomposition supplied";
  }

  if (dims == Dims{2, 2}) {
    const auto sic = qubit_sic_frame();
    const auto q = represent_state(state, sic, sic);
    r.negativity_sic = negativity(q);
    r.min_weight_sic = q.min_weight();
  }
  return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classify bipartite quantum states by entanglement, discord and LHV structure",
               "qcorr"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::string out_path;
  app.option_defaults()->always_capture_default();
  app.add_option("--tol", cfg.tol, "validation and certificate tolerance");
  app.add_option("--seed", cfg.seed, "seed for sampling and randomized steps");
  app.add_option("--samples", cfg.samples, "random product effects used in verification");
  app.add_option("--grid", cfg.grid, "discord grid resolution (theta samples)");
  app.add_option("--out", out_path, "write the document to this path instead of stdout");

  auto* classify_cmd = app.add_subcommand("classify", "run the classification pipeline");
  classify_cmd->fallthrough();
  std::vector<std::string> state_files;
  std::string decomposition_file;
  classify_cmd->add_option("state", state_files, "state file(s)")->required();
  classify_cmd->add_option("--decomposition", decomposition_file,
                           "separable decomposition used to build a linear LHV model");

  auto* gen_cmd = app.add_subcommand("gen", "write a state file for a named family");
  gen_cmd->fallthrough();
  std::string family, param, dims_text = "2x2", gen_decomposition;
  gen_cmd->add_option("family", family, "bell | werner | cc | asym")->required();
  gen_cmd->add_option("param", param, "bell index or werner p");
  gen_cmd->add_option("--dims", dims_text, "dimensions for cc (AxB)");
  gen_cmd->add_option("--decomposition", gen_decomposition,
                      "also write the generating decomposition (cc, asym)");

  auto* lhv_cmd = app.add_subcommand("lhv", "build, verify or audit linear LHV models");
  lhv_cmd->fallthrough();
  lhv_cmd->require_subcommand(1);
  std::string build_input, verify_model, verify_state, audit_model;
  auto* build_cmd = lhv_cmd->add_subcommand("build", "model from a decomposition file");
  build_cmd->fallthrough();
  build_cmd->add_option("decomposition", build_input)->required();
  auto* verify_cmd = lhv_cmd->add_subcommand("verify", "compare a model with a state");
  verify_cmd->fallthrough();
  verify_cmd->add_option("model", verify_model)->required();
  verify_cmd->add_option("state", verify_state)->required();
  auto* audit_cmd = lhv_cmd->add_subcommand("audit", "power-set tightness audit");
  audit_cmd->fallthrough();
  audit_cmd->add_option("model", audit_model)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (!out_path.empty()) cfg.out = out_path;
    cfg.validate();
    if (*classify_cmd)
      return cmd_classify(state_files,
                          decomposition_file.empty() ? std::nullopt
                                                     : std::optional<std::string>(decomposition_file),
                          cfg, out, err);
    if (*gen_cmd)
      return cmd_gen(family, param.empty() ? std::nullopt : std::optional<std::string>(param),
                     dims_text,
                     gen_decomposition.empty() ? std::nullopt
                                               : std::optional<std::string>(gen_decomposition),
                     cfg, out, err);
    if (*build_cmd) return cmd_lhv_build(build_input, cfg, out, err);
    if (*verify_cmd) return cmd_lhv_verify(verify_model, verify_state, cfg, out, err);
    if (*audit_cmd) return cmd_lhv_audit(audit_model, cfg, out, err);
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InvalidParameter& e) {
    err << "bad parameter: " << e.what() << "\n";
    return kParseError;
  } catch (const DimensionMismatch& e) {
    err << "dimension mismatch: " << e.what() << "\n";
    return kDimensionMismatch;
  } catch (const InvalidState& e) {
    err << "invalid state: " << e.what() << "\n";
    return kInvalidState;
  } catch (const NotHermitian& e) {
    err << "invalid state: " << e.what() << "\n";
    return kInvalidState;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kParseError;
}

}  // namespace qcorr::cli
