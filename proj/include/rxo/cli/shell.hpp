#pragma once

#include "rxo/oo/session.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rxo::cli {

enum class OutputMode { Aligned, Tabs };

/// Header of attribute names, then the rows in tuple order (NULL first).
/// Aligned mode pads columns and prints NULL as an empty cell; tab mode
/// separates cells with tabs and prints NULL as `\N`.
std::string format_relation(const Relation& rel, OutputMode mode);

struct ShellOptions {
  std::optional<std::filesystem::path> db; // empty: in-memory
  OutputMode mode = OutputMode::Aligned;
  bool echo = false;
  bool keep_going = false;
};

/// Line-oriented front end over a session. Object-language commands, raw
/// machine commands and backslash meta-commands may be mixed; a command may
/// span lines and runs once its terminating `;` has been read.
class Shell {
public:
  Shell(ShellOptions opts, std::ostream& out, std::ostream& err);

  /// Feeds every line of `in`. Returns false when input stopped early
  /// because of `\quit` or an error without keep-going.
  bool run(std::istream& in, const std::string& origin, bool prompt = false);
  bool run_text(const std::string& text, const std::string& origin);

  /// Saves to the database directory, if there is one.
  void persist();

  int error_count() const { return errors_; }
  bool quit_requested() const { return quit_; }
  oo::Session& session() { return session_; }

private:
  bool feed(const std::string& line);
  bool flush_incomplete();
  void meta(const std::string& line);
  void execute(const std::string& text, int first_line);
  void report(int line, const std::string& message, bool command = true);
  bool halted() const { return quit_ || (errors_ > 0 && !opts_.keep_going && !interactive_); }

  ShellOptions opts_;
  std::ostream& out_;
  std::ostream& err_;
  oo::Session session_;
  std::string origin_;
  std::string pending_;
  int pending_line_ = 0;
  int line_ = 0;
  int commands_ = 0;
  int errors_ = 0;
  bool quit_ = false;
  bool interactive_ = false;
};

} // namespace rxo::cli
