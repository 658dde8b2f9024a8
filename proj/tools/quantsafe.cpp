// quantsafe: analyses for quantitative automata (exact rational arithmetic).
//
//   quantsafe <eval|top|closure|constant|safety|liveness|decompose|limited|gen|gadget> ...
//
// Exit codes: 0 success (verdicts are data, not exit codes), 2 parse or
// validation error, 3 unsupported combination.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "quantsafe/closure.hpp"
#include "quantsafe/decide.hpp"
#include "quantsafe/decompose.hpp"
#include "quantsafe/eval.hpp"
#include "quantsafe/format.hpp"
#include "quantsafe/gen.hpp"
#include "quantsafe/limitedness.hpp"
#include "quantsafe/omega.hpp"
#include "quantsafe/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quantsafe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnsupported = 3;

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Splits a lasso argument into alphabet symbols: whitespace/comma separated
// tokens; a single token that is not itself a symbol is split into
// one-character symbols.
std::vector<int> parse_letters(const Automaton& a, const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  if (toks.size() == 1 && !a.letter_index(toks[0])) {
    std::string word = toks[0];
    toks.clear();
    for (char c : word) toks.push_back(std::string(1, c));
  }
  std::vector<int> out;
  for (const auto& t : toks) {
    auto i = a.letter_index(t);
    if (!i) throw ValidationError("letter '" + t + "' is not in the alphabet");
    out.push_back(*i);
  }
  return out;
}

std::string render_value(const Rational& v, int decimal_digits) {
  if (decimal_digits > 0) return v.decimal(decimal_digits);
  return v.str();
}

std::string describe_witness(const Verdict& v, const std::vector<std::string>& alphabet) {
  std::ostringstream out;
  if (v.lasso_witness) {
    out << "witness lasso: " << v.lasso_witness->str(alphabet);
  } else if (v.prefix_witness) {
    out << "witness prefix:";
    for (int s : *v.prefix_witness) out << " " << alphabet[s];
  }
  return out.str();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string emit(const json& report, const Verdict& v, const std::vector<std::string>& alphabet,
                 bool as_json, int decimal_digits) {
  std::ostringstream out;
  if (as_json) {
    out << report.dump(2) << "\n";
    return out.str();
  }
  out << question_name(v.question) << ": " << (v.answer ? "true" : "false");
  if (v.value) out << "  (top value " << render_value(*v.value, decimal_digits) << ")";
  out << "\n";
  std::string w = describe_witness(v, alphabet);
  if (!w.empty()) out << w << "\n";
  return out.str();
}

// Runs `analysis` on one file or on every *.qa file of a directory, with
// --jobs worker threads; per-file analyses are independent.
int run_batch(const std::string& path, int jobs,
              const std::function<std::string(const std::string&)>& analysis) {
  if (!fs::is_directory(path)) {
    std::cout << analysis(path);
    return kExitOk;
  }
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(path))
    if (e.path().extension() == ".qa") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::mutex out_mutex;
  std::atomic<size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= files.size()) break;
      try {
        std::string text = analysis(files[i]);
        std::lock_guard<std::mutex> lock(out_mutex);
        std::cout << "== " << files[i] << "\n" << text;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(out_mutex);
        std::cerr << files[i] << ": " << e.what() << "\n";
        failures++;
      }
    }
  };
  int n = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int i = 0; i < n; i++) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return failures ? kExitInput : kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"analyses for quantitative automata"};
  app.require_subcommand(1);
  int decimal_digits = 0;
  app.add_option("--decimal", decimal_digits, "render rationals with N decimal digits (display only)");

  std::string file, lasso_arg, prefix_arg, loop_arg, out_arg;
  bool as_json = false;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd, bool batchable) {
    cmd->add_option("file", file, "input automaton")->required();
    cmd->add_flag("--json", as_json, "machine-readable report");
    if (batchable) cmd->add_option("--jobs", jobs, "parallel workers for directory inputs");
  };

  auto* cmd_eval = app.add_subcommand("eval", "value on a lasso word");
  add_common(cmd_eval, false);
  cmd_eval->add_option("--lasso", lasso_arg, "loop-only lasso (u empty)");
  cmd_eval->add_option("--prefix", prefix_arg, "lasso prefix u");
  cmd_eval->add_option("--loop", loop_arg, "lasso loop v");

  auto* cmd_top = app.add_subcommand("top", "top value and witness");
  add_common(cmd_top, true);

  auto* cmd_closure = app.add_subcommand("closure", "safety closure");
  add_common(cmd_closure, false);
  bool det = false;
  cmd_closure->add_flag("--det", det, "determinize the Inf-form closure");
  cmd_closure->add_option("-o,--output", out_arg, "write the closure automaton to a file");

  auto* cmd_constant = app.add_subcommand("constant", "constant-function check");
  add_common(cmd_constant, true);
  auto* cmd_safety = app.add_subcommand("safety", "safety check");
  add_common(cmd_safety, true);
  auto* cmd_liveness = app.add_subcommand("liveness", "liveness check");
  add_common(cmd_liveness, true);

  auto* cmd_decompose = app.add_subcommand("decompose", "safety-liveness decomposition");
  add_common(cmd_decompose, false);
  cmd_decompose->add_option("-o,--output", out_arg, "output directory (B.qa, C.qa, manifest.json)")
      ->required();

  auto* cmd_limited = app.add_subcommand("limited", "distance-automaton limitedness");
  add_common(cmd_limited, false);

  auto* cmd_gen = app.add_subcommand("gen", "seeded random automaton");
  uint64_t seed = 0;
  int g_states = 3, g_letters = 2;
  std::string g_valfn = "limsup", g_weights = "0,1,2", g_discount = "1/2";
  bool g_det = false;
  cmd_gen->add_option("--seed", seed, "PRNG seed")->required();
  cmd_gen->add_option("--states", g_states, "number of states");
  cmd_gen->add_option("--letters", g_letters, "alphabet size");
  cmd_gen->add_option("--valfn", g_valfn, "value function");
  cmd_gen->add_option("--weights", g_weights, "comma-separated weight pool");
  cmd_gen->add_option("--discount", g_discount, "discount factor for dsum");
  cmd_gen->add_flag("--deterministic", g_det, "exactly one transition per (state, letter)");
  cmd_gen->add_option("-o,--output", out_arg, "output file (default stdout)");

  auto* cmd_gadget = app.add_subcommand("gadget", "constant-check hardness gadget from an NFA");
  std::string gadget_valfn = "limsup";
  cmd_gadget->add_option("file", file, "NFA fixture file")->required();
  cmd_gadget->add_option("--valfn", gadget_valfn, "value function of the gadget");
  cmd_gadget->add_option("--discount", g_discount, "discount factor for dsum");
  cmd_gadget->add_option("-o,--output", out_arg, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitUsage : kExitOk;
  }

  auto report_verdict = [&](const std::string& question, const std::string& path,
                            const Verdict& v, const Automaton& a, const Timer& timer) {
    json r = make_report(question, slurp(path), verdict_json(v, a.alphabet()), timer.ms());
    return emit(r, v, a.alphabet(), as_json, decimal_digits);
  };

  if (*cmd_eval) {
    Automaton a = load_automaton(file);
    std::vector<int> prefix, loop;
    if (!lasso_arg.empty()) {
      loop = parse_letters(a, lasso_arg);
    } else {
      if (!prefix_arg.empty()) prefix = parse_letters(a, prefix_arg);
      if (loop_arg.empty()) throw ValidationError("eval needs --lasso or --loop");
      loop = parse_letters(a, loop_arg);
    }
    LassoWord w(prefix, loop);
    Timer timer;
    Rational v = evaluate_lasso(a, w);
    if (as_json) {
      json body;
      body["value"] = v.str();
      body["lasso"] = lasso_json(w, a.alphabet());
      std::cout << make_report("eval", slurp(file), body, timer.ms()).dump(2) << "\n";
    } else {
      std::cout << render_value(v, decimal_digits) << "\n";
    }
    return kExitOk;
  }

  if (*cmd_top) {
    return run_batch(file, jobs, [&](const std::string& path) {
      Automaton a = load_automaton(path);
      Timer timer;
      TopResult t = top_value(a);
      std::ostringstream out;
      if (as_json) {
        json body;
        body["value"] = t.value.str();
        body["witness"] = lasso_json(t.witness, a.alphabet());
        out << make_report("top", slurp(path), body, timer.ms()).dump(2) << "\n";
      } else {
        out << "top: " << render_value(t.value, decimal_digits) << "\n"
            << "witness lasso: " << t.witness.str(a.alphabet()) << "\n";
      }
      return out.str();
    });
  }

  if (*cmd_closure) {
    Automaton a = load_automaton(file);
    Timer timer;
    ClosureArtifact art = safety_closure_inf(a);
    Automaton result = det && art.closure.valfn().tag == ValFn::Inf
                           ? determinize_inf(art.closure)
                           : art.closure;
    std::string text = serialize_automaton(result);
    if (!out_arg.empty()) {
      std::ofstream f(out_arg);
      f << text;
    }
    if (as_json) {
      json body;
      body["kind"] = art.kind == ClosureKind::Identity ? "identity" : "inf-form";
      body["determinized"] = det;
      body["automaton"] = text;
      std::cout << make_report("closure", slurp(file), body, timer.ms()).dump(2) << "\n";
    } else if (out_arg.empty()) {
      std::cout << text;
    }
    return kExitOk;
  }

  auto verdict_cmd = [&](CLI::App* cmd, const std::string& question,
                         Verdict (*fn)(const Automaton&)) -> std::optional<int> {
    if (!*cmd) return std::nullopt;
    return run_batch(file, jobs, [&, fn, question](const std::string& path) {
      Automaton a = load_automaton(path);
      Timer timer;
      Verdict v = fn(a);
      return report_verdict(question, path, v, a, timer);
    });
  };

  if (auto rc = verdict_cmd(cmd_constant, "constant", is_constant)) return *rc;
  if (auto rc = verdict_cmd(cmd_safety, "safety", is_safe)) return *rc;
  if (auto rc = verdict_cmd(cmd_liveness, "liveness", is_live)) return *rc;

  if (*cmd_decompose) {
    Automaton a = load_automaton(file);
    ValFn tag = a.valfn().tag;
    if (is_limit_average(tag))
      throw UnsupportedError(
          "decomposition of limit-average automata is open (closure under safety-liveness "
          "decomposition is not known)");
    Timer timer;
    Automaton input = a;
    bool determinized = false;
    if (!a.deterministic()) {
      switch (tag) {
        case ValFn::Sup: input = determinize_sup(a); determinized = true; break;
        case ValFn::LimInf: input = determinize_liminf(a); determinized = true; break;
        case ValFn::Inf: input = determinize_inf(a); determinized = true; break;
        case ValFn::LimSup:
          throw UnsupportedError(
              "nondeterministic LimSup automata cannot always be determinized; their "
              "safety-liveness decomposition is open");
        case ValFn::DSum:
          throw UnsupportedError("no determinization procedure for nondeterministic DSum");
        default:
          break;
      }
    }
    Decomposition d = decompose(input);
    fs::create_directories(out_arg);
    std::string b_text = serialize_automaton(d.safety_part);
    std::string c_text = serialize_automaton(d.liveness_part);
    {
      std::ofstream bf(out_arg + "/B.qa");
      bf << b_text;
      std::ofstream cf(out_arg + "/C.qa");
      cf << c_text;
    }
    json manifest;
    manifest["schema"] = kReportSchema;
    manifest["tool_version"] = kToolVersion;
    manifest["question"] = "decompose";
    manifest["input_digest"] = input_digest(slurp(file));
    manifest["determinized_first"] = determinized;
    manifest["safety_part"] = "B.qa";
    manifest["liveness_part"] = "C.qa";
    manifest["valfn_B"] = valfn_name(d.safety_part.valfn().tag);
    manifest["valfn_C"] = valfn_name(d.liveness_part.valfn().tag);
    manifest["timing_ms"] = timer.ms();
    std::ofstream mf(out_arg + "/manifest.json");
    mf << manifest.dump(2) << "\n";
    if (as_json) std::cout << manifest.dump(2) << "\n";
    return kExitOk;
  }

  if (*cmd_limited) {
    DistanceAutomaton d = load_distance_automaton(file);
    Timer timer;
    bool limited = is_limited(d);
    json body;
    body["limited"] = limited;
    std::string witness_text;
    if (!limited && d.is_total() && d.all_accepting()) {
      UnlimitedWitness uw = unlimited_witness(d);
      body["witness"] = lasso_json(uw.word, d.alphabet);
      body["max_segment_len"] = uw.max_segment_len;
      witness_text = "witness lasso: " + uw.word.str(d.alphabet);
    }
    if (as_json) {
      std::cout << make_report("limited", slurp(file), body, timer.ms()).dump(2) << "\n";
    } else {
      std::cout << "limited: " << (limited ? "true" : "false") << "\n";
      if (!witness_text.empty()) std::cout << witness_text << "\n";
    }
    return kExitOk;
  }

  if (*cmd_gen) {
    GenParams p;
    p.seed = seed;
    p.states = g_states;
    p.letters = g_letters;
    auto vf = valfn_from_name(g_valfn);
    if (!vf) throw ValidationError("unknown value function '" + g_valfn + "'");
    p.valfn = *vf;
    p.weights.clear();
    std::istringstream ws(g_weights);
    std::string tok;
    while (std::getline(ws, tok, ',')) p.weights.push_back(Rational::parse(tok));
    p.discount = Rational::parse(g_discount);
    p.deterministic = g_det;
    std::string text = serialize_automaton(gen_random_automaton(p));
    if (out_arg.empty())
      std::cout << text;
    else {
      std::ofstream f(out_arg);
      f << text;
    }
    return kExitOk;
  }

  if (*cmd_gadget) {
    Nfa n = load_nfa(file);
    auto vf = valfn_from_name(gadget_valfn);
    if (!vf) throw ValidationError("unknown value function '" + gadget_valfn + "'");
    std::string text =
        serialize_automaton(build_gadget(n, *vf, Rational::parse(g_discount)));
    if (out_arg.empty())
      std::cout << text;
    else {
      std::ofstream f(out_arg);
      f << text;
    }
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
