#include "qproc/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

namespace qproc {

namespace {

struct CommonOpts {
  std::string behavior_path, state_path, channel_path, process_path;
  std::string witness_path, superprocess_path, a_povms_path, b_povms_path;
  std::string out_path;
  std::uint64_t seed = 1;
  int restarts = 0;  // 0 = library default
  int max_iters = 0;
  double tol = 0.0;
  std::string normalization = "corrected";
  int settings = 2;
  bool filter = false;
  bool oracle = false;
};

RelEntConfig rel_ent_config(const CommonOpts& o) {
  RelEntConfig cfg;
  if (o.restarts > 0) cfg.restarts = o.restarts;
  if (o.max_iters > 0) cfg.max_iters = o.max_iters;
  cfg.seed = o.seed;
  return cfg;
}

WitnessNormalization parse_normalization(const std::string& tag) {
  if (tag == "paper") return WitnessNormalization::Paper316;
  if (tag == "corrected") return WitnessNormalization::Corrected316DeltaQuarter;
  throw ValidationError("--normalization must be \"paper\" or \"corrected\"");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

const char* resource_name(ResourceKind k) {
  switch (k) {
    case ResourceKind::None: return "none";
    case ResourceKind::Entanglement: return "entanglement";
    case ResourceKind::BellNonlocality: return "bell_nonlocality";
    default: return "unknown";
  }
}

Json cmd_validate(const CommonOpts& o) {
  Json out;
  if (!o.behavior_path.empty()) {
    behavior_from_json(load_json_file(o.behavior_path));
    out["valid"] = true;
    out["kind"] = "behavior";
  } else if (!o.state_path.empty()) {
    state_from_json(load_json_file(o.state_path));
    out["valid"] = true;
    out["kind"] = "state";
  } else if (!o.channel_path.empty()) {
    channel_from_json(load_json_file(o.channel_path));
    out["valid"] = true;
    out["kind"] = "channel";
  } else if (!o.process_path.empty()) {
    Process p = process_from_json(load_json_file(o.process_path));
    out["valid"] = true;
    out["kind"] = "process";
    out["realizable"] = check_realizable(p);
  } else {
    throw ValidationError("validate: pass one of --behavior/--state/--channel/--process");
  }
  return out;
}

Json cmd_born(const CommonOpts& o) {
  DensityMatrix rho = state_from_json(load_json_file(o.state_path));
  std::vector<Povm> a = povm_list_from_json(load_json_file(o.a_povms_path));
  std::vector<Povm> b = povm_list_from_json(load_json_file(o.b_povms_path));
  return behavior_to_json(behavior_from_state(rho, a, b));
}

Json cmd_is_local(const CommonOpts& o) {
  Behavior b = behavior_from_json(load_json_file(o.behavior_path));
  LocalTestResult res = is_local(b);
  Json out;
  out["local"] = res.local;
  if (res.local) {
    out["weights"] = res.weights;
    out["residual"] = res.residual;
  } else {
    out["certificate"] = functional_to_json(*res.certificate);
    out["violation"] = res.violation;
  }
  return out;
}

Json cmd_chsh(const CommonOpts& o) {
  Behavior b = behavior_from_json(load_json_file(o.behavior_path));
  return Json{{"chsh", chsh_value(b)}};
}

std::pair<Json, bool> cmd_rel_ent(const CommonOpts& o) {
  Behavior b = behavior_from_json(load_json_file(o.behavior_path));
  MeasureResult r = o.oracle ? rel_entropy_nonlocality_oracle(b, rel_ent_config(o))
                             : rel_entropy_nonlocality(b, rel_ent_config(o));
  return {measure_result_to_json(r), r.converged};
}

std::pair<Json, bool> cmd_min_ext(const CommonOpts& o) {
  DensityMatrix rho = state_from_json(load_json_file(o.state_path));
  MinExtConfig cfg;
  cfg.n_settings = o.settings;
  cfg.enable_filter = o.filter;
  cfg.seed = o.seed;
  if (o.restarts > 0) cfg.restarts = o.restarts;
  if (o.max_iters > 0) cfg.final_eval.max_iters = o.max_iters;
  MeasureResult r = minimal_extension_state(rho, cfg);
  return {measure_result_to_json(r), r.converged};
}

Json cmd_witness_build(const CommonOpts& o) {
  return witness_to_json(standard_chsh_povm_witness(parse_normalization(o.normalization)));
}

Json cmd_witness_eval(const CommonOpts& o) {
  WitnessOperator w = witness_from_json(load_json_file(o.witness_path));
  QuantumChannel c = channel_from_json(load_json_file(o.channel_path));
  Json out;
  out["value"] = evaluate_witness(w, c);
  out["losr_min"] = losr_min_witness_value(w);
  out["normalization"] = o.normalization;
  return out;
}

Json cmd_witness_separate(const CommonOpts& o) {
  QuantumChannel c = channel_from_json(load_json_file(o.channel_path));
  SeparabilityVerdict v = choi_separability(c);
  Json out;
  switch (v.verdict) {
    case SeparabilityVerdict::Separable: out["verdict"] = "separable"; break;
    case SeparabilityVerdict::Entangled: out["verdict"] = "entangled"; break;
    default: out["verdict"] = "inconclusive"; break;
  }
  out["evidence"] = v.evidence;
  out["min_pt_eigenvalue"] = v.min_pt_eigenvalue;
  return out;
}

Json cmd_process_classify(const CommonOpts& o) {
  Process p = process_from_json(load_json_file(o.process_path));
  ProcessClassification c = classify(p);
  Json out;
  out["instantaneous"] = c.instantaneous;
  out["free"] = verdict_name(c.free);
  out["resource_kind"] = resource_name(c.resource_kind);
  return out;
}

Json cmd_process_check(const CommonOpts& o) {
  Process p = process_from_json(load_json_file(o.process_path));
  Signalling s = p.signalling();
  Json out;
  out["realizable"] = check_realizable(p);
  out["signalling_a_to_b"] = s.a_to_b;
  out["signalling_b_to_a"] = s.b_to_a;
  return out;
}

Json cmd_process_compose(const CommonOpts& o) {
  Process p = process_from_json(load_json_file(o.process_path));
  Superprocess sp = superprocess_from_json(load_json_file(o.superprocess_path));
  return process_to_json(apply_superprocess(sp, p));
}

Json cmd_demo_filtering() {
  HiddenNonlocalityReport r = demo_hidden_nonlocality();
  Json out;
  out["pre_chsh"] = r.pre_chsh;
  out["post_chsh"] = r.post_chsh;
  out["filter_success_prob"] = r.filter_success_prob;
  out["state"] = state_to_json(r.state);
  out["filtered_state"] = state_to_json(r.filtered_state);
  return out;
}

}  // namespace

CliResult run_command(const std::vector<std::string>& args) {
  CLI::App app{"quantum process toolkit: Bell behaviors, delay-time processes, "
               "nonlocality measures, and POVM-channel witnesses"};
  app.require_subcommand(1);
  CommonOpts o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out_path, "write the result JSON to this file");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--restarts", o.restarts, "solver restarts");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--tol", o.tol, "tolerance override (accepted, informational)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a JSON object's invariants");
  validate->add_option("--behavior", o.behavior_path, "behavior file");
  validate->add_option("--state", o.state_path, "state file");
  validate->add_option("--channel", o.channel_path, "channel file");
  validate->add_option("--process", o.process_path, "process file");
  add_common(validate);

  CLI::App* born = app.add_subcommand("born", "behavior from a state and local POVMs");
  born->add_option("--state", o.state_path)->required();
  born->add_option("--a-povms", o.a_povms_path)->required();
  born->add_option("--b-povms", o.b_povms_path)->required();
  add_common(born);

  CLI::App* islocal = app.add_subcommand("is-local", "local-polytope membership with certificate");
  islocal->add_option("--behavior", o.behavior_path)->required();
  add_common(islocal);

  CLI::App* chsh = app.add_subcommand("chsh", "CHSH value of a behavior");
  chsh->add_option("--behavior", o.behavior_path)->required();
  add_common(chsh);

  CLI::App* relent = app.add_subcommand("rel-ent", "relative entropy of Bell nonlocality");
  relent->add_option("--behavior", o.behavior_path)->required();
  relent->add_flag("--oracle", o.oracle, "use the independent saddle-point solver");
  add_common(relent);

  CLI::App* minext = app.add_subcommand("min-ext", "minimal-extension lower bound for a state");
  minext->add_option("--state", o.state_path)->required();
  minext->add_option("--settings", o.settings, "measurement settings per party");
  minext->add_flag("--filter", o.filter, "enable one local filter round");
  add_common(minext);

  CLI::App* witness = app.add_subcommand("witness", "POVM-channel witness tools");
  witness->require_subcommand(1);
  CLI::App* wbuild = witness->add_subcommand("build", "construct the CHSH witness");
  wbuild->add_option("--normalization", o.normalization, "paper | corrected");
  add_common(wbuild);
  CLI::App* weval = witness->add_subcommand("eval", "evaluate a witness on a qc channel");
  weval->add_option("--witness", o.witness_path)->required();
  weval->add_option("--channel", o.channel_path)->required();
  add_common(weval);
  CLI::App* wsep = witness->add_subcommand("separate", "Choi separability verdict");
  wsep->add_option("--channel", o.channel_path)->required();
  add_common(wsep);

  CLI::App* process = app.add_subcommand("process", "delay-time process tools");
  process->require_subcommand(1);
  CLI::App* pclassify = process->add_subcommand("classify", "freeness classification");
  pclassify->add_option("--process", o.process_path)->required();
  add_common(pclassify);
  CLI::App* pcompose = process->add_subcommand("compose", "apply a superprocess");
  pcompose->add_option("--process", o.process_path)->required();
  pcompose->add_option("--superprocess", o.superprocess_path)->required();
  add_common(pcompose);
  CLI::App* pcheck = process->add_subcommand("check", "realizability check");
  pcheck->add_option("--process", o.process_path)->required();
  add_common(pcheck);

  CLI::App* demo = app.add_subcommand("demo", "built-in demonstrations");
  demo->require_subcommand(1);
  CLI::App* dfilter = demo->add_subcommand("filtering", "hidden nonlocality via local filters");
  add_common(dfilter);

  CliResult result;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    result.exit_code = 0;
    result.message = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = 64;
    result.message = std::string("usage error: ") + e.what();
    return result;
  }

  try {
    bool converged = true;
    if (validate->parsed()) {
      result.output = cmd_validate(o);
    } else if (born->parsed()) {
      result.output = cmd_born(o);
    } else if (islocal->parsed()) {
      result.output = cmd_is_local(o);
    } else if (chsh->parsed()) {
      result.output = cmd_chsh(o);
    } else if (relent->parsed()) {
      std::tie(result.output, converged) = cmd_rel_ent(o);
    } else if (minext->parsed()) {
      std::tie(result.output, converged) = cmd_min_ext(o);
    } else if (witness->parsed()) {
      if (wbuild->parsed()) result.output = cmd_witness_build(o);
      if (weval->parsed()) result.output = cmd_witness_eval(o);
      if (wsep->parsed()) result.output = cmd_witness_separate(o);
    } else if (process->parsed()) {
      if (pclassify->parsed()) result.output = cmd_process_classify(o);
      if (pcompose->parsed()) result.output = cmd_process_compose(o);
      if (pcheck->parsed()) result.output = cmd_process_check(o);
    } else if (demo->parsed()) {
      result.output = cmd_demo_filtering();
    }
    if (!converged) {
      result.exit_code = 3;
      result.message = "solver did not converge; best-so-far result emitted";
    }
  } catch (const JsonFormatError& e) {
    result.exit_code = 65;
    result.message = e.what();
    return result;
  } catch (const ValidationError& e) {
    result.exit_code = 2;
    result.message = e.what();
    return result;
  }

  if (!o.out_path.empty() && result.exit_code != 64) {
    std::ofstream out(o.out_path);
    if (!out) {
      result.exit_code = 2;
      result.message = "cannot write output file: " + o.out_path;
      return result;
    }
    out << result.output.dump(2) << "\n";
  }
  return result;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CliResult r = run_command(args);
  if (!r.message.empty()) std::cerr << r.message << "\n";
  if (!r.output.is_null()) std::cout << r.output.dump(2) << "\n";
  return r.exit_code;
}

}  // namespace qproc
