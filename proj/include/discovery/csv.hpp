// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal RFC 4180 style CSV reading and writing.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace discovery::csv {

using Row = std::vector<std::string>;

/// Quotes a field when it holds a comma, quote or newline.
std::string escape(std::string_view field);
std::string join(const Row& row);

/// Parses a whole document; a trailing newline does not produce an empty row.
std::vector<Row> parse(std::string_view text);

/// Header-indexed table.
struct Table
{
    Row header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws IoError when the column is absent.
    std::size_t require_column(std::string_view name) const;
};

Table parse_table(std::string_view text);
std::string format_table(const Table& table);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view contents);

} // namespace discovery::csv
