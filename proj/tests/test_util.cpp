#include <doctest.h>

#include "converter/errors.hpp"
#include "converter/util.hpp"

using namespace converter;

TEST_CASE("normalize_ws trims and collapses") {
    CHECK(util::normalize_ws("  a  b\n\tc ") == "a b c");
    CHECK(util::normalize_ws("") == "");
    CHECK(util::normalize_ws("   ") == "");
}

TEST_CASE("normalize_ws is idempotent") {
    for (const std::string s : {"  x   y ", "multi\nline\r\n text", "plain", " \t "}) {
        std::string once = util::normalize_ws(s);
        CHECK(util::normalize_ws(once) == once);
    }
}

TEST_CASE("is_absolute_uri requires scheme") {
    CHECK(util::is_absolute_uri("http://example.org"));
    CHECK(util::is_absolute_uri("urn:isbn:12345"));
    CHECK(util::is_absolute_uri("oai:mock:1") == true);
    CHECK_FALSE(util::is_absolute_uri("/relative/path"));
    CHECK_FALSE(util::is_absolute_uri("example.org/no-scheme"));
    CHECK_FALSE(util::is_absolute_uri(""));
    CHECK_FALSE(util::is_absolute_uri("1http://x"));
}

TEST_CASE("percent encoding matches the reference encoder") {
    // Pinned with python urllib.parse.quote(safe="-._~").
    CHECK(util::percent_encode("oai:fu:123") == "oai%3Afu%3A123");
    CHECK(util::percent_encode("a b/c:d?e=f&g#h") == "a%20b%2Fc%3Ad%3Fe%3Df%26g%23h");
    CHECK(util::percent_encode("S\xC3\xA4ure") == "S%C3%A4ure");
    CHECK(util::percent_encode("AZaz09-._~") == "AZaz09-._~");
}

TEST_CASE("percent decode inverts encode") {
    for (const std::string s : {"oai:fu:123", "a b/c", "S\xC3\xA4ure &x", "plain"}) {
        auto decoded = util::percent_decode(util::percent_encode(s));
        REQUIRE(decoded.has_value());
        CHECK(*decoded == s);
    }
    CHECK_FALSE(util::percent_decode("%GG").has_value());
    CHECK_FALSE(util::percent_decode("%2").has_value());
}

TEST_CASE("parse_http_url splits scheme host port path") {
    auto p = util::parse_http_url("http://127.0.0.1:8181/oai?verb=Identify");
    REQUIRE(p.has_value());
    CHECK(p->scheme == "http");
    CHECK(p->host == "127.0.0.1");
    CHECK(p->port == 8181);
    CHECK(p->path == "/oai");

    auto q = util::parse_http_url("https://repo.example.org/oai/request");
    REQUIRE(q.has_value());
    CHECK(q->port == 443);
    CHECK(q->path == "/oai/request");

    CHECK_FALSE(util::parse_http_url("ftp://x/y").has_value());
    CHECK_FALSE(util::parse_http_url("http://").has_value());
}

TEST_CASE("lang_tag_valid follows the alpha{2,3} grammar") {
    CHECK(util::lang_tag_valid("en"));
    CHECK(util::lang_tag_valid("eng"));
    CHECK(util::lang_tag_valid("en-US"));
    CHECK(util::lang_tag_valid("de-Latn-DE"));
    CHECK_FALSE(util::lang_tag_valid("e!"));
    CHECK_FALSE(util::lang_tag_valid("e"));
    CHECK_FALSE(util::lang_tag_valid("english"));
    CHECK_FALSE(util::lang_tag_valid("en-"));
    CHECK_FALSE(util::lang_tag_valid(""));
    CHECK_FALSE(util::lang_tag_valid("en-123456789"));
}

TEST_CASE("datestamp parsing round trips") {
    auto t = util::parse_datestamp("2024-03-05T10:15:00Z");
    REQUIRE(t.has_value());
    CHECK(util::format_datetime_utc(*t) == "2024-03-05T10:15:00Z");
    CHECK(util::format_date_utc(*t) == "2024-03-05");

    auto d = util::parse_datestamp("2021-05-03");
    REQUIRE(d.has_value());
    CHECK(util::format_datetime_utc(*d) == "2021-05-03T00:00:00Z");

    CHECK_FALSE(util::parse_datestamp("2021-13-03").has_value());
    CHECK_FALSE(util::parse_datestamp("2021-05-03T25:00:00Z").has_value());
    CHECK_FALSE(util::parse_datestamp("yesterday").has_value());
    CHECK_FALSE(util::parse_datestamp("2021").has_value());
}

TEST_CASE("datestamp ordering matches epoch ordering") {
    auto a = util::parse_datestamp("2024-02-29T23:59:59Z");
    auto b = util::parse_datestamp("2024-03-01T00:00:00Z");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a + 1 == *b);
}

TEST_CASE("atomic_write_file then read_file round trips") {
    std::string path = "test_tmp_util/atomic.txt";
    util::atomic_write_file(path, "hello\n");
    CHECK(util::read_file(path) == "hello\n");
    util::atomic_write_file(path, "replaced");
    CHECK(util::read_file(path) == "replaced");
    CHECK_THROWS_AS(util::read_file("test_tmp_util/missing.txt"), IoError);
}
