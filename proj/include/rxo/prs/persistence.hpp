#pragma once

#include "rxo/prs/database.hpp"

#include <filesystem>

namespace rxo::prs {

/// Writes `db` into directory `dir` (created when missing): `catalog.txt` plus
/// one `<relvar>.tuples` file per REAL relvar. Throws IoError.
void save_database(const Database& db, const std::filesystem::path& dir);

/// Throws IoError when `dir` is unreadable, FormatError (with file and line)
/// when its contents are malformed or missing.
Database load_database(const std::filesystem::path& dir);

} // namespace rxo::prs
