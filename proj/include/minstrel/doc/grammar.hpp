#pragma once

#include "minstrel/doc/document.hpp"

#include <string>
#include <string_view>

namespace minstrel::doc {

/// Parses `.lgpt.md` text. CRLF/CR line endings are normalized to LF and a
/// leading UTF-8 BOM is dropped.
///
/// Throws Error with code MissingRole, DuplicateModule or MalformedHeading
/// (the latter two carry the offending 1-based line).
PromptDocument parse(std::string_view text);

/// Canonical text: blocks in canonical order, a single blank line between
/// blocks, `- ` bullets, numbered action steps, trailing newline.
std::string render(const PromptDocument& doc);

/// Canonical text of one block (no trailing blank line).
std::string render_block(const ModuleBlock& block);

/// Markup-free rendering meant for pasting into a chat box.
std::string render_flat(const PromptDocument& doc);

/// Parses a single module block given in canonical syntax ("## Kind" ... or
/// "# Role: name" ...). Throws MalformedHeading when the text holds anything
/// other than exactly one block.
ModuleBlock parse_block(std::string_view text);

}  // namespace minstrel::doc
