#include "cli_app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>

#include "calnet/comparison.hpp"
#include "calnet/currents.hpp"
#include "calnet/io.hpp"
#include "calnet/network.hpp"
#include "calnet/partitions.hpp"
#include "calnet/svg.hpp"

namespace calnet::cli {

namespace {

using io::json;

constexpr std::size_t kComassSamples = 100000;

Network load_network(const std::string& path) {
  return io::network_from_json(io::parse(io::read_text(path), path));
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_minimal:
    case ErrorKind::not_alignable:
    case ErrorKind::calibration_failure:
    case ErrorKind::no_coloring:
    case ErrorKind::inconsistent_assignment:
      return certification_failure;
    case ErrorKind::hypothesis_violation:
    case ErrorKind::threshold_violation:
    case ErrorKind::non_transverse:
      return hypothesis_violation;
    default:
      return input_error;
  }
}

template <class T>
int calibrate_current(const RunConfig& cfg, const Network& net, json& result) {
  const auto induced = induce_current<T>(net, cfg.tol);
  const auto bd = boundary(induced.current, cfg.tol.eps_len);
  const T m = mass(induced.current);
  const auto report = verify_identity_calibration(induced.current, kComassSamples, cfg.tol);
  T len{};
  bool equal = false;
  if constexpr (is_exact_v<T>) {
    len = exact_length(net);
    equal = m == len;
  } else {
    len = length(net);
    equal = std::abs(m - len) <= cfg.tol.eps_len * std::max(1.0, len);
  }
  result = {{"mass", io::scalar(m)},
            {"length", io::scalar(len)},
            {"mass_equals_length", equal},
            {"rotation", induced.rotation},
            {"current", io::to_json(induced.current)},
            {"boundary", io::to_json(bd)},
            {"boundary_sums_to_zero", sum_boundary_check(bd)},
            {"calibration", io::to_json(report)}};
  return report.passed && equal ? pass : certification_failure;
}

int cmd_check_minimal(const RunConfig& cfg, json& result) {
  const auto net = load_network(cfg.inputs.at(0));
  validate(net, cfg.tol);
  const auto cert = check_minimal(net, cfg.tol);
  result = io::to_json(cert);
  if (cfg.svg_out) svg::write_file(*cfg.svg_out, svg::network_svg(net));
  return cert.is_minimal ? pass : certification_failure;
}

int cmd_calibrate_current(const RunConfig& cfg, json& result) {
  const auto net = load_network(cfg.inputs.at(0));
  validate(net, cfg.tol);
  const auto cert = check_minimal(net, cfg.tol);
  if (!cert.is_minimal) {
    result = {{"minimality", io::to_json(cert)}};
    return certification_failure;
  }
  if (cfg.svg_out) svg::write_file(*cfg.svg_out, svg::network_svg(net));
  return cfg.exact_mode ? calibrate_current<QSqrt3>(cfg, net, result) : calibrate_current<double>(cfg, net, result);
}

int cmd_compare(const RunConfig& cfg, json& result) {
  const auto ref = load_network(cfg.inputs.at(0));
  const auto comp = load_network(cfg.inputs.at(1));
  QuotientSpec quotient;
  if (cfg.quotient_path) quotient = io::quotient_from_json(io::parse(io::read_text(*cfg.quotient_path), *cfg.quotient_path));
  bool verdict = false;
  if (cfg.mode == "same") {
    if (cfg.exact_mode) {
      const auto c = compare_same_topology<QSqrt3>(ref, comp, cfg.tol);
      result = io::to_json(c);
      verdict = c.verdict;
    } else {
      const auto c = compare_same_topology<double>(ref, comp, cfg.tol);
      result = io::to_json(c);
      verdict = c.verdict;
    }
  } else {
    if (cfg.exact_mode) throw Unsupported("--exact applies to --mode same only");
    ComparisonCertificate<double> c;
    if (cfg.mode == "embed") {
      Embedding emb;
      if (cfg.embedding_path) {
        emb = io::embedding_from_json(io::parse(io::read_text(*cfg.embedding_path), *cfg.embedding_path));
      } else if (cfg.quotient_path) {
        emb = find_embedded_copy(ref, comp, quotient, cfg.tol);
      } else {
        throw InvalidInput("--mode embed needs --embedding or --quotient");
      }
      c = compare_embedded_copy(ref, comp, emb, cfg.tol);
      result = io::to_json(c);
      result["embedding"] = io::to_json(emb);
    } else if (cfg.mode == "richer") {
      c = compare_quotient_richer(ref, comp, quotient, cfg.tol);
      result = io::to_json(c);
    } else {
      c = compare_quotient_poorer(ref, comp, quotient, cfg.tol);
      result = io::to_json(c);
    }
    verdict = c.verdict;
  }
  result["mode"] = cfg.mode;
  if (cfg.svg_out) svg::write_file(*cfg.svg_out, svg::network_svg(comp));
  return verdict ? pass : certification_failure;
}

template <class T>
T parse_scalar(const std::string& text) {
  if constexpr (is_exact_v<T>) {
    return QSqrt3::parse(text);
  } else {
    return QSqrt3::parse(text).to_double();
  }
}

template <class T>
int calibrate_partition(const RunConfig& cfg, const Network& net, json& result) {
  T delta{};
  if (cfg.delta) {
    delta = parse_scalar<T>(*cfg.delta);
  } else {
    std::optional<T> d;
    for (const auto& seg : net.template segments<T>()) {
      const T len = length(seg.direction());
      if (!d || len < *d) d = len;
    }
    if (!d) throw InvalidInput("network has no edges");
    delta = T(9) * sqrt3_value<T>() * *d / T(80);
  }
  const T delta_prime = parse_scalar<T>(cfg.delta_prime.value_or("3/10"));
  std::optional<Polygon<T>> clip;
  if (cfg.clip_path) {
    const auto j = io::parse(io::read_text(*cfg.clip_path), *cfg.clip_path);
    if constexpr (is_exact_v<T>) {
      clip = io::exact_polygon_from_json(j);
    } else {
      clip = io::polygon_from_json(j);
    }
  }
  const auto domain = build_partition_domain<T>(net, delta, delta_prime, clip, cfg.tol);
  const auto coloring = three_color_faces(domain.extended);
  const auto fields = assign_fields(domain, coloring, cfg.tol);
  const auto spec = partition_spec(domain, coloring, cfg.tol);
  const auto report = verify_paired_calibration(spec, fields, cfg.tol);
  result = io::to_json(report, cfg.traces);
  result["delta"] = io::scalar(delta);
  result["delta_prime"] = io::scalar(delta_prime);
  result["perimeter"] = io::scalar(perimeter_energy(spec));
  result["face_colors"] = coloring.color;
  result["cells"] = fields.cells.size();
  result["interfaces"] = spec.interfaces.size();
  if (cfg.svg_out) {
    if constexpr (is_exact_v<T>) {
      const auto fd = to_double(fields);
      svg::write_file(*cfg.svg_out, svg::partition_svg(to_double(spec), &fd));
    } else {
      svg::write_file(*cfg.svg_out, svg::partition_svg(spec, &fields));
    }
  }
  return report.verdict ? pass : certification_failure;
}

int cmd_calibrate_partition(const RunConfig& cfg, json& result) {
  const auto net = load_network(cfg.inputs.at(0));
  return cfg.exact_mode ? calibrate_partition<QSqrt3>(cfg, net, result) : calibrate_partition<double>(cfg, net, result);
}

int cmd_counterexample(const RunConfig& cfg, json& result) {
  const double d = parse_scalar<double>(cfg.d), h = parse_scalar<double>(cfg.h);
  const auto r = counterexample(d, parse_scalar<double>(cfg.outer_len), h, parse_scalar<double>(cfg.cx_delta), cfg.tol);
  result = io::to_json(r);
  result["closed_form"] = 4 * h / std::sqrt(3.0) - d;
  if (cfg.svg_out) svg::write_file(*cfg.svg_out, svg::counterexample_svg(r));
  return pass;
}

int cmd_oracle(const RunConfig& cfg, json& result) {
  std::vector<Point2> terminals;
  for (const auto& token : cfg.inputs) {
    const auto comma = token.find(',');
    if (comma == std::string::npos) throw InvalidInput("terminal '" + token + "' is not of the form x,y");
    try {
      terminals.push_back({QSqrt3::parse(token.substr(0, comma)).to_double(),
                           QSqrt3::parse(token.substr(comma + 1)).to_double()});
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw InvalidInput("terminal '" + token + "': " + e.what());
    }
  }
  const auto sol = steiner_oracle(terminals);
  result = io::to_json(sol);
  if (cfg.svg_out) svg::write_file(*cfg.svg_out, svg::network_svg(sol.network));
  return pass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Calibration certificates for minimal networks and partitions", "calnet"};
  app.require_subcommand(1);
  app.add_flag("--exact", cfg.exact_mode, "Use exact arithmetic in Q(sqrt3)");
  app.add_option("--eps-len", cfg.tol.eps_len, "Length tolerance");
  app.add_option("--eps-angle", cfg.tol.eps_angle, "Angle tolerance");
  app.add_option("--eps-field", cfg.tol.eps_field, "Field residual tolerance");
  app.add_option("--svg", cfg.svg_out, "Write an SVG figure to this path");
  app.add_option("--seed", cfg.seed, "Seed (all commands are deterministic)");
  app.fallthrough();

  auto* check = app.add_subcommand("check-minimal", "Check the minimal network conditions");
  check->add_option("network", cfg.inputs, "Network JSON, - for stdin")->required()->expected(1);
  check->callback([&] { cfg.command = Command::check_minimal; });

  auto* current = app.add_subcommand("calibrate-current", "Induce the lattice current and verify its calibration");
  current->add_option("network", cfg.inputs, "Network JSON, - for stdin")->required()->expected(1);
  current->callback([&] { cfg.command = Command::calibrate_current; });

  auto* compare = app.add_subcommand("compare", "Compare a competitor against a minimal network");
  compare->add_option("networks", cfg.inputs, "Reference and competitor JSON")->required()->expected(2);
  compare->add_option("--mode", cfg.mode, "same, embed, richer or poorer")
      ->check(CLI::IsMember({"same", "embed", "richer", "poorer"}));
  compare->add_option("--quotient", cfg.quotient_path, "Collapsed subgraphs JSON");
  compare->add_option("--embedding", cfg.embedding_path, "Embedding JSON for --mode embed");
  compare->callback([&] { cfg.command = Command::compare; });

  auto* partition = app.add_subcommand("calibrate-partition", "Build and verify a paired calibration");
  partition->add_option("network", cfg.inputs, "Network JSON, - for stdin")->required()->expected(1);
  partition->add_option("--delta", cfg.delta, "Tube half width (default 0.9 sqrt3 d / 8)");
  partition->add_option("--delta-prime", cfg.delta_prime, "Endpoint extension in (0,1) (default 3/10)");
  partition->add_option("--clip", cfg.clip_path, "Convex clip polygon JSON");
  partition->add_flag("--traces", cfg.traces, "Include every trace check in the report");
  partition->callback([&] { cfg.command = Command::calibrate_partition; });

  auto* cx = app.add_subcommand("counterexample", "Double tripod against its channel competitor");
  cx->set_help_flag("--help", "Print this help message and exit");
  cx->add_option("--d", cfg.d, "Central edge length");
  cx->add_option("--h", cfg.h, "Channel half width")->required();
  cx->add_option("--outer-len", cfg.outer_len, "Outer edge length");
  cx->add_option("--delta", cfg.cx_delta, "Tube half width");
  cx->callback([&] { cfg.command = Command::counterexample; });

  auto* oracle = app.add_subcommand("oracle", "Shortest Steiner tree for 2 to 5 terminals");
  oracle->add_option("terminals", cfg.inputs, "Terminals as x,y")->required();
  oracle->callback([&] { cfg.command = Command::oracle; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? pass : input_error;
  }

  json result;
  int code = pass;
  try {
    cfg.tol.validate();
    switch (cfg.command) {
      case Command::check_minimal: code = cmd_check_minimal(cfg, result); break;
      case Command::calibrate_current: code = cmd_calibrate_current(cfg, result); break;
      case Command::compare: code = cmd_compare(cfg, result); break;
      case Command::calibrate_partition: code = cmd_calibrate_partition(cfg, result); break;
      case Command::counterexample: code = cmd_counterexample(cfg, result); break;
      case Command::oracle: code = cmd_oracle(cfg, result); break;
    }
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    result = {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
    err << "calnet: " << to_string(e.kind()) << ": " << e.what() << '\n';
  } catch (const io::json::exception& e) {
    code = input_error;
    result = {{"error", "InvalidInput"}, {"message", e.what()}};
    err << "calnet: InvalidInput: " << e.what() << '\n';
  }
  out << result.dump(2) << '\n';
  return code;
}

}  // namespace calnet::cli
