#ifndef SYNTAXPROBE_CLI_HPP
#define SYNTAXPROBE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace syntaxprobe {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Entry point of the `syntaxprobe` tool: subcommands filter, gram, probe,
/// synth and report, plus `--replay run.json`. `args` excludes the program
/// name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace syntaxprobe

#endif
