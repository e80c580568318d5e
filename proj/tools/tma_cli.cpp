#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tma/network.hpp"
#include "tma/psi.hpp"
#include "tma/report.hpp"
#include "tma/runner.hpp"
#include "tma/simd.hpp"
#include "tma/tensor.hpp"
#include "tma/verify.hpp"

namespace {

using tma::Precision;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;

std::optional<Precision> parse_precision(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "int5") return Precision::int5;
  if (s == "int8") return Precision::int8;
  throw CLI::ValidationError("--precision", "must be int5 or int8");
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << body;
}

int cmd_run(const std::string& net_path, const std::string& mode, const std::string& precision,
            double freq_mhz, uint64_t seed, const std::string& format, const std::string& out,
            const std::string& input, const std::string& save_output, bool force_scalar) {
  if (force_scalar) tma::simd::set_force_scalar(true);
  tma::NetworkSpec net = tma::load_network(net_path);
  tma::RunOptions opt;
  opt.mode = mode;
  opt.precision = parse_precision(precision);
  opt.freq_mhz = freq_mhz;
  opt.seed = seed;
  opt.input_tmat = input;
  opt.save_output = save_output;
  try {
    tma::RunReport rep = tma::run(net, opt);
    tma::emit_report(rep, format, out);
  } catch (const tma::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_decompose(const std::string& precision, const std::string& weights_path,
                  const std::string& format, const std::string& out) {
  const Precision mode = parse_precision(precision.empty() ? "int5" : precision).value();
  const tma::ModeInfo mi = tma::mode_info(mode);

  std::vector<int32_t> values;
  if (!weights_path.empty()) {
    tma::AnyTensor t = tma::read_tmat(weights_path);
    if (t.dtype != tma::Dtype::i32)
      throw std::invalid_argument("decompose expects an i32 TMAT tensor");
    values = t.i32.data;
  } else {
    for (int w = mi.w_min; w <= mi.w_max; ++w) values.push_back(w);
  }

  if (format == "json") {
    nlohmann::ordered_json j;
    j["precision"] = tma::mode_name(mode);
    j["worst_rel_error"] = tma::worst_case_relative_error(mode).str();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int32_t w : values) {
      tma::ErrorReport r = tma::error_report(w, mode);
      rows.push_back(nlohmann::ordered_json{{"weight", r.weight},
                                            {"effective", r.effective},
                                            {"abs_error", r.abs_error},
                                            {"rel_error", r.rel_error.str()}});
    }
    j["weights"] = rows;
    write_text(out, j.dump(2) + "\n");
  } else if (format == "csv") {
    std::string body = "weight,effective,abs_error,rel_error\n";
    for (int32_t w : values) {
      tma::ErrorReport r = tma::error_report(w, mode);
      body += std::to_string(r.weight) + "," + std::to_string(r.effective) + "," +
              std::to_string(r.abs_error) + "," + r.rel_error.str() + "\n";
    }
    write_text(out, body);
  } else {
    throw CLI::ValidationError("--format", "must be json or csv");
  }
  return kExitOk;
}

int cmd_verify(uint64_t seed, int layers, int moa_cases, bool force_scalar) {
  if (force_scalar) tma::simd::set_force_scalar(true);
  bool ok = true;
  ok = tma::verify::psi_suite() && ok;
  ok = tma::verify::moa_suite(seed, moa_cases) && ok;
  ok = tma::verify::simd_suite(seed) && ok;
  ok = tma::verify::layer_suite(seed, layers) && ok;
  std::printf("%s\n", ok ? "all checks passed" : "checks FAILED");
  return ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bit-exact functional and cycle-level simulator of a multiplier-less "
               "shift-and-add CNN accelerator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Simulate or model a network and emit a report");
  std::string net_path, mode = "stats", precision, format = "json", out, input, save_output;
  double freq_mhz = 250.0;
  uint64_t seed = 1;
  bool force_scalar = false;
  run->add_option("--net", net_path, "network description file")->required();
  run->add_option("--mode", mode, "stats | functional | both")
      ->check(CLI::IsMember({"stats", "functional", "both"}));
  run->add_option("--precision", precision, "override weight precision: int5 | int8");
  run->add_option("--freq-mhz", freq_mhz, "clock frequency in MHz (default 250)");
  run->add_option("--seed", seed, "seed for synthetic tensors");
  run->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out, "report path (stdout when omitted)");
  run->add_option("--input", input, "u8 TMAT input tensor (random when omitted)");
  run->add_option("--save-output", save_output, "write final activations as TMAT");
  run->add_flag("--scalar", force_scalar, "force the scalar kernels");

  // decompose
  auto* dec = app.add_subcommand("decompose", "Report decomposition error per weight");
  std::string dprecision = "int5", dweights, dformat = "json", dout;
  dec->add_option("--precision", dprecision, "int5 | int8");
  dec->add_option("--weights", dweights, "i32 TMAT tensor (full weight range when omitted)");
  dec->add_option("--format", dformat, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  dec->add_option("--out", dout, "output path (stdout when omitted)");

  // verify
  auto* ver = app.add_subcommand("verify", "Run the property suites");
  uint64_t vseed = 1;
  int vlayers = 5, vmoa = 1000000;
  bool vscalar = false;
  ver->add_option("--seed", vseed, "seed");
  ver->add_option("--layers", vlayers, "random layers per configuration case");
  ver->add_option("--moa-cases", vmoa, "random multi-operand reductions");
  ver->add_flag("--scalar", vscalar, "force the scalar kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (run->parsed())
      return cmd_run(net_path, mode, precision, freq_mhz, seed, format, out, input, save_output,
                     force_scalar);
    if (dec->parsed()) return cmd_decompose(dprecision, dweights, dformat, dout);
    if (ver->parsed()) return cmd_verify(vseed, vlayers, vmoa, vscalar);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
