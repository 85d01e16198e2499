#include "lop/counterexample.hpp"
#include "lop/distill.hpp"
#include "lop/factories.hpp"
#include "lop/json_io.hpp"
#include "lop/layout.hpp"
#include "lop/monotones.hpp"
#include "lop/protocol.hpp"
#include "lop/states.hpp"
#include "lop/verify_suites.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

// Exit codes: 0 success, 1 a check or verdict failed, 2 bad input
// (unreadable files, malformed JSON, invalid flag combinations).

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    lop::write_text_file(out_path, text);
  }
}

struct PrepareTarget {
  lop::ProtocolTree tree;
  lop::SystemLayout layout;
  lop::ComplexMatrix input_ket;
  lop::ComplexMatrix target_ket;
  std::vector<std::string> outputs;
};

PrepareTarget make_prepare_target(const std::string& target, int n,
                                  const std::string& topology) {
  if (target == "ghz") {
    lop::GhzTopology topo;
    if (topology == "single") {
      topo = lop::GhzTopology::single_wire;
    } else if (topology == "chain") {
      topo = lop::GhzTopology::chain;
    } else {
      throw lop::JsonError(0, 0,
                           "ghz topology must be \"single\" or \"chain\"");
    }
    return {lop::prepare_ghz(n, topo), lop::ghz_input_layout(n, topo),
            lop::ghz_input_ket(n, topo), lop::ghz_target_ket(n),
            lop::ghz_output_registers(n, topo)};
  }
  if (target == "w") {
    lop::WTopology topo;
    if (topology == "single") {
      topo = lop::WTopology::single_wire;
    } else if (topology == "two-wire") {
      topo = lop::WTopology::two_wire;
    } else {
      throw lop::JsonError(0, 0,
                           "w topology must be \"single\" or \"two-wire\"");
    }
    return {lop::prepare_w(n, topo), lop::w_input_layout(n, topo),
            lop::w_input_ket(n, topo), lop::w_target_ket(n, topo),
            lop::w_output_registers(n, topo)};
  }
  throw lop::JsonError(0, 0, "target must be \"ghz\" or \"w\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator for protocols built from wire permutations, wire phases, "
      "observed quantum operations, and wire-to-quantum forwarding"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  std::string run_protocol_path, run_state_path, run_out;
  CLI::App* run = app.add_subcommand(
      "run", "Execute a protocol file on a state file; report every branch");
  run->add_option("--protocol", run_protocol_path, "protocol JSON file")
      ->required();
  run->add_option("--state", run_state_path, "state+layout JSON file")
      ->required();
  run->add_option("--out", run_out, "write the report here (default stdout)");

  // --- prepare -----------------------------------------------------------
  std::string prep_target, prep_topology = "single", prep_out, prep_tree_out;
  int prep_n = 3;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "Run a named preparation protocol on its canonical input");
  prepare->add_option("--target", prep_target, "ghz or w")->required();
  prepare->add_option("--n", prep_n, "number of output qubits (default 3)");
  prepare->add_option("--topology", prep_topology,
                      "single (default), chain (ghz), two-wire (w)");
  prepare->add_option("--out", prep_out,
                      "write the output state file here (default stdout)");
  prepare->add_option("--protocol-out", prep_tree_out,
                      "also write the protocol tree as JSON");

  // --- monotone ----------------------------------------------------------
  std::string mono_state_path, mono_out;
  CLI::App* monotone = app.add_subcommand(
      "monotone", "Coherence and entanglement quantifiers of a state file");
  monotone->add_option("--state", mono_state_path, "state+layout JSON file")
      ->required();
  monotone->add_option("--out", mono_out,
                       "write the report here (default stdout)");

  // --- distill -----------------------------------------------------------
  lop::DistillParams dist;
  std::string dist_out;
  CLI::App* distill = app.add_subcommand(
      "distill", "Monte Carlo coherence-pumping chain; emits CSV");
  distill->add_option("--p0", dist.p0, "initial off-diagonal x2 (0.02)");
  distill->add_option("--q", dist.q, "helper off-diagonal x2 (0.02)");
  distill->add_option("--trials", dist.trials, "independent trials (1000)");
  distill->add_option("--steps", dist.steps, "pumping steps (5000)");
  distill->add_option("--seed", dist.seed, "base RNG seed (1)");
  distill->add_option("--drop-negative", dist.drop_negative,
                      "drop a trial when its p turns negative (true)");
  distill->add_option("--out", dist_out, "write CSV here (default stdout)");

  // --- counterexample ----------------------------------------------------
  std::string cx_out;
  CLI::App* counterexample = app.add_subcommand(
      "counterexample",
      "Certificate for the four-Kraus qutrit channel outside the protocol "
      "class");
  counterexample->add_option("--out", cx_out,
                             "write the certificate here (default stdout)");

  // --- verify ------------------------------------------------------------
  std::string verify_suite;
  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run one named check suite on randomized instances");
  std::string suite_help = "one of:";
  for (const std::string& s : lop::suite_names()) suite_help += " " + s;
  verify->add_option("--suite", verify_suite, suite_help)->required();
  verify->add_option("--seed", verify_seed, "RNG seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (run->parsed()) {
      const lop::ProtocolTree tree =
          lop::parse_protocol(lop::read_text_file(run_protocol_path));
      const auto [rho, layout] =
          lop::parse_state_file(lop::read_text_file(run_state_path));
      const lop::BranchReport report =
          lop::execute_all_branches(tree, rho, layout);
      emit(run_out, lop::json_of_branch_report(report) + "\n");
      return kOk;
    }

    if (prepare->parsed()) {
      const PrepareTarget t =
          make_prepare_target(prep_target, prep_n, prep_topology);
      if (!prep_tree_out.empty())
        lop::write_text_file(prep_tree_out,
                             lop::json_of_protocol(t.tree) + "\n");
      const lop::DensityMatrix input = lop::PureState(t.input_ket).density();
      const auto [state, layout] =
          lop::execute_average(t.tree, input, t.layout);
      const lop::DensityMatrix reduced =
          lop::partial_trace(state, layout, t.outputs);
      const lop::SystemLayout out_layout = layout.restricted_to(t.outputs);
      const double fidelity =
          lop::state_fidelity(lop::PureState(t.target_ket), reduced);
      emit(prep_out, lop::json_of_state_file(reduced, out_layout) + "\n");
      std::fprintf(stderr, "fidelity: %.17g\n", fidelity);
      return fidelity >= 1.0 - 1e-9 ? kOk : kCheckFailed;
    }

    if (monotone->parsed()) {
      const auto [rho, layout] =
          lop::parse_state_file(lop::read_text_file(mono_state_path));
      emit(mono_out,
           lop::json_of_monotone_report(lop::monotone_report(rho, layout)) +
               "\n");
      return kOk;
    }

    if (distill->parsed()) {
      emit(dist_out, lop::trace_csv(lop::run_chain(dist)));
      return kOk;
    }

    if (counterexample->parsed()) {
      const lop::ObstructionCertificate cert =
          lop::certify_not_lop(lop::build_counterexample());
      emit(cx_out, lop::json_of_certificate(cert) + "\n");
      return cert.verdict ? kOk : kCheckFailed;
    }

    if (verify->parsed()) {
      const lop::SuiteReport report =
          lop::run_suite(verify_suite, verify_seed);
      std::fputs(lop::format_report(report).c_str(), stdout);
      return report.passed() ? kOk : kCheckFailed;
    }
  } catch (const lop::JsonError& e) {
    if (e.line() > 0) {
      std::fprintf(stderr, "input error at line %d, column %d: %s\n",
                   e.line(), e.column(), e.what());
    } else {
      std::fprintf(stderr, "input error: %s\n", e.what());
    }
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
