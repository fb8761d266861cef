#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace converter::util {

// ---- strings ----------------------------------------------------------

std::string to_lower(std::string s);
std::string trim(const std::string& s);

/// Collapses internal whitespace runs to single spaces and trims the ends.
/// Idempotent.
std::string normalize_ws(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);

bool starts_with(const std::string& s, const std::string& prefix);

// ---- URIs --------------------------------------------------------------

/// True when the string has an RFC 3986 scheme component
/// (ALPHA *(ALPHA / DIGIT / "+" / "-" / ".") ":").
bool is_absolute_uri(const std::string& s);

/// Percent-encodes everything except RFC 3986 unreserved characters
/// (ALPHA / DIGIT / "-" / "." / "_" / "~"). Uppercase hex.
std::string percent_encode(const std::string& s);

std::optional<std::string> percent_decode(const std::string& s);

struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;  // resolved default when absent
    std::string path;  // always starts with '/', query excluded
};

/// Splits an absolute http(s) URL. Returns nullopt for anything else.
std::optional<UrlParts> parse_http_url(const std::string& url);

/// Language tag shape check: alpha{2,3} primary subtag, optional
/// "-" alphanumeric{1,8} subtags.
bool lang_tag_valid(const std::string& tag);

// ---- time --------------------------------------------------------------

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDThh:mm:ssZ" into epoch seconds (UTC).
std::optional<std::int64_t> parse_datestamp(const std::string& s);

std::string format_datetime_utc(std::int64_t epoch_seconds);  // YYYY-MM-DDThh:mm:ssZ
std::string format_date_utc(std::int64_t epoch_seconds);      // YYYY-MM-DD

/// Epoch seconds for a civil date, no time-of-day.
std::int64_t civil_to_epoch(int year, int month, int day);

// ---- filesystem --------------------------------------------------------

std::string read_file(const std::string& path);  // throws IoError

/// Writes via a temp file in the same directory then renames over the
/// destination, so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace converter::util
