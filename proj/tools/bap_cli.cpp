#include "bap/report.hpp"
#include "bap_corpus.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best approximation pairs between convex sets: solve, certify, verify."};
  std::string command;
  std::string spec_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<double> resolution;
  bool quiet = false;

  app.add_option("command", command, "solve | certify | oracle | reproduce-paper")
      ->required()
      ->check(CLI::IsMember({"solve", "certify", "oracle", "reproduce-paper"}));
  app.add_option("--spec", spec_path, "problem spec (JSON)");
  app.add_option("--out", out_path, "report path (default: stdout)");
  app.add_option("--seed", seed, "override the solver seed");
  app.add_option("--starts", starts, "override the multistart count");
  app.add_option("--resolution", resolution, "override the oracle grid resolution");
  app.add_flag("--quiet", quiet, "no report on stdout and no summary on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? bap::kExitOk : bap::kExitUsage;
  }

  const bap::Command cmd = *bap::parse_command(command);
  bap::RunFlags flags{seed, starts, resolution};
  std::optional<bap::ProblemSpec> spec;
  try {
    if (cmd != bap::Command::ReproducePaper) {
      if (spec_path.empty()) {
        std::cerr << "error: " << command << " needs --spec PATH\n";
        return bap::kExitUsage;
      }
      const auto text = read_file(spec_path);
      if (!text) {
        std::cerr << "error: cannot read " << spec_path << "\n";
        return bap::kExitUsage;
      }
      spec = bap::parse_problem(*text);
    }

    const bap::RunOutcome outcome = bap::run(cmd, spec, flags, bap::builtin_corpus());
    const std::string report = outcome.report.dump(2) + "\n";
    if (!out_path.empty()) {
      if (!write_file(out_path, report)) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return bap::kExitUsage;
      }
    } else if (!quiet) {
      std::cout << report;
    }
    if (!outcome.plotdata.empty()) {
      std::string stem = out_path;
      if (stem.empty()) stem = std::filesystem::path(spec_path).stem().string();
      const std::string csv = stem + ".plotdata.csv";
      if (!write_file(csv, outcome.plotdata)) {
        std::cerr << "error: cannot write " << csv << "\n";
        return bap::kExitUsage;
      }
    }
    if (!quiet) {
      if (cmd == bap::Command::ReproducePaper) {
        std::cerr << bap::corpus_table_text(outcome.report["corpus"]);
      } else if (outcome.exit_code == bap::kExitNotConverged) {
        const auto& s = outcome.report["solve"];
        std::cerr << "note: " << (s.contains("note") ? s["note"].get<std::string>() : std::string("solver did not converge"))
                  << "\n";
      }
    }
    return outcome.exit_code;
  } catch (const bap::SchemaError& e) {
    std::cerr << e.what() << "\n";
    return bap::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bap::kExitUsage;
  }
}
