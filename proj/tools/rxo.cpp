// rxo: script runner and interactive shell.

#include "rxo/cli/shell.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

int main(int argc, char** argv) {
  CLI::App app{"Object layer over a relational machine: runs scripts or an interactive shell."};
  std::string db;
  std::vector<std::string> scripts;
  std::vector<std::string> execs;
  bool tabs = false, echo = false, keep_going = false;
  if (const char* env = std::getenv("RXO_DB")) db = env;
  app.add_option("--db", db, "Database directory (default: $RXO_DB; in-memory when empty)");
  app.add_option("--script", scripts, "Script file to run; repeatable")->check(CLI::ExistingFile);
  app.add_option("--exec", execs, "Command text to run after the scripts; repeatable");
  app.add_flag("--tabs", tabs, "Tab-separated output with NULL as \\N");
  app.add_flag("--echo", echo, "Print each command before its result");
  app.add_flag("--keep-going", keep_going, "Continue after a failing command");
  CLI11_PARSE(app, argc, argv);

  rxo::cli::ShellOptions opts;
  if (!db.empty()) opts.db = db;
  opts.mode = tabs ? rxo::cli::OutputMode::Tabs : rxo::cli::OutputMode::Aligned;
  opts.echo = echo;
  opts.keep_going = keep_going;

  try {
    rxo::cli::Shell shell(opts, std::cout, std::cerr);
    bool go = true;
    for (const auto& path : scripts) {
      if (!go) break;
      std::ifstream in(path);
      if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        return 1;
      }
      go = shell.run(in, path);
    }
    for (std::size_t i = 0; go && i < execs.size(); ++i) go = shell.run_text(execs[i], "--exec");
    if (go && scripts.empty() && execs.empty()) shell.run(std::cin, "stdin", isatty(STDIN_FILENO));
    shell.persist();
    return shell.error_count() == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
