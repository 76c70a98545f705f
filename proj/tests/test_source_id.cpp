#include <catch2/catch.hpp>

#include "relnet/source_id.hpp"

using relnet::ParseError;
using relnet::SourceId;

TEST_CASE("canonicalization lowercases and strips www") {
    CHECK(SourceId::canonical("nytimes.com").str() == "nytimes.com");
    CHECK(SourceId::canonical("WWW.NYTimes.COM").str() == "nytimes.com");
    CHECK(SourceId::canonical("BBC.CO.UK").str() == "bbc.co.uk");
    CHECK(SourceId::canonical("www.example.com").str() == "example.com");
    // only a leading "www." is collapsed; subdomains stay distinct
    CHECK(SourceId::canonical("news.example.com").str() == "news.example.com");
    CHECK(SourceId::canonical("wwwx.example.com").str() == "wwwx.example.com");
}

TEST_CASE("single registrable label is allowed") {
    CHECK(SourceId::canonical("localhost").str() == "localhost");
}

TEST_CASE("malformed domains are rejected") {
    CHECK_THROWS_AS(SourceId::canonical(""), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("www."), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("a b.com"), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("a/b.com"), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("host:8080"), ParseError);
    CHECK_THROWS_AS(SourceId::canonical(".example.com"), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("example.com."), ParseError);
    CHECK_THROWS_AS(SourceId::canonical("a..b"), ParseError);
    CHECK(!SourceId::try_canonical("user@host").has_value());
}

TEST_CASE("ordering and equality follow the canonical string") {
    CHECK(SourceId::canonical("A.com") == SourceId::canonical("a.com"));
    CHECK(SourceId::canonical("a.com") < SourceId::canonical("b.com"));
}
