#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared across modules.
namespace minstrel::text {

std::string_view trim(std::string_view s) noexcept;
std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view s, std::string_view prefix) noexcept;
/// Case-insensitive find; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0) noexcept;
std::vector<std::string_view> split_lines(std::string_view s);
/// Lowercase ASCII slug: runs of non-alphanumerics collapse to '-'.
std::string slugify(std::string_view s);

}  // namespace minstrel::text
