// mispron: clarity scoring, mispronunciation localization and error-type
// classification for read speech, driven by a JSON manifest.
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 internal invariant violation.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mispron/pipeline.hpp"

namespace {

struct Flags {
  std::string manifest;
  std::string out = "out";
  std::optional<std::string> lexicon;
  std::optional<std::string> override_labels;
  std::optional<unsigned> abs_threshold;
  std::optional<double> rel_threshold;
  std::optional<double> sim_threshold;
  std::optional<std::string> grouping;
  unsigned jobs = 1;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("-m,--manifest", f.manifest, "Run manifest (JSON)")->required();
  sub->add_option("-o,--out", f.out, "Output directory")->capture_default_str();
  sub->add_option("--lexicon", f.lexicon, "CMUdict-format pronunciation lexicon (overrides the manifest)");
  sub->add_option("--override-labels", f.override_labels, "CSV raw_label,error_class resolving unmapped labels");
  sub->add_option("--abs-threshold", f.abs_threshold, "Max phoneme edits for a phoneme-level error [3]");
  sub->add_option("--rel-threshold", f.rel_threshold, "Max phoneme edits per reference phoneme [0.6]");
  sub->add_option("--sim-threshold", f.sim_threshold, "Max normalized phoneme distance for an exact-error match [0.5]");
  sub->add_option("--grouping", f.grouping, "Aggregate evaluation by speaker or recording")
      ->check(CLI::IsMember({"speaker", "recording"}));
  sub->add_option("-j,--jobs", f.jobs, "Entries processed in parallel")->capture_default_str();
}

int run(mispron::Command cmd, const Flags& f) {
  auto manifest = mispron::load_manifest(f.manifest);
  if (f.lexicon) manifest.lexicon = *f.lexicon;
  if (f.override_labels) manifest.override_labels = *f.override_labels;
  auto& o = manifest.options;
  if (f.abs_threshold) o.thresholds.abs = *f.abs_threshold;
  if (f.rel_threshold) o.thresholds.rel = *f.rel_threshold;
  if (f.sim_threshold) o.sim_threshold = *f.sim_threshold;
  if (f.grouping) o.grouping = *mispron::grouping_from_string(*f.grouping);
  o.jobs = f.jobs;

  const auto session = mispron::open_session(std::move(manifest));
  const auto result = mispron::run_command(cmd, session);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  mispron::write_outputs(f.out, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable mispronunciation assessment for read speech"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    mispron::Command cmd;
  };
  const Sub subs[] = {
      {"clarity", "Stage 1: ASR clarity (1 - WER) and therapist clarity per entry", mispron::Command::Clarity},
      {"localize", "Stage 2: timed error regions scored against therapist annotations", mispron::Command::Localize},
      {"classify", "Stage 3: error-type confusion matrix and exact-error matching", mispron::Command::Classify},
      {"evaluate", "Cross-speaker correlation and distance against therapist scores", mispron::Command::Evaluate},
  };
  std::optional<mispron::Command> chosen;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, flags);
    sub->callback([&chosen, cmd = s.cmd] { chosen = cmd; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return run(*chosen, flags);
  } catch (const mispron::InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const mispron::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
