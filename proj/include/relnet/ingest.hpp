#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relnet/graph.hpp"
#include "relnet/source_id.hpp"

namespace relnet {

/// One pre-extracted news article: its absolute URL and the hyperlinks
/// found in its body. Relative or unparseable links are tolerated here and
/// tallied during graph construction.
struct ArticleRecord {
    std::string url;
    std::vector<std::string> links;
};

struct IngestConfig {
    bool allow_self_links = false;
};

struct IngestStats {
    std::uint64_t articles_read = 0;      // records successfully consumed
    std::uint64_t records_skipped = 0;    // unreadable records (bad JSON / bad URL)
    std::uint64_t links_parsed = 0;       // link strings resolved to a domain
    std::uint64_t links_skipped = 0;      // link strings with no usable domain
    std::uint64_t self_links_dropped = 0; // parsed links discarded by the self-link policy
    std::uint64_t distinct_sources = 0;   // distinct article domains seen
};

inline void to_json(nlohmann::json& j, const IngestStats& s) {
    j = nlohmann::json{{"articles_read", s.articles_read},
                       {"records_skipped", s.records_skipped},
                       {"links_parsed", s.links_parsed},
                       {"links_skipped", s.links_skipped},
                       {"self_links_dropped", s.self_links_dropped},
                       {"distinct_sources", s.distinct_sources}};
}

/// Extracts the canonical source domain from an absolute URL.
/// "https://www.nytimes.com/2020/a.html" -> "nytimes.com".
/// Throws ParseError when the URL has no host component.
inline SourceId extract_domain(std::string_view url) {
    // scheme ":" "//" authority; anything without an authority (mailto:,
    // javascript:, relative paths) has no host.
    const auto colon = url.find(':');
    if (colon == 0 || colon == std::string_view::npos)
        throw ParseError("not an absolute URL: \"" + std::string(url) + "\"");
    for (std::size_t i = 0; i < colon; ++i) {
        const char c = url[i];
        const bool scheme_char = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')
                                 || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
        if ((i == 0 && !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) || !scheme_char)
            throw ParseError("not an absolute URL: \"" + std::string(url) + "\"");
    }
    std::string_view rest = url.substr(colon + 1);
    if (!rest.starts_with("//"))
        throw ParseError("URL has no host: \"" + std::string(url) + "\"");
    rest.remove_prefix(2);

    auto end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, end);

    // Credentials, then port.
    if (auto at = authority.rfind('@'); at != std::string_view::npos)
        authority.remove_prefix(at + 1);
    if (!authority.empty() && authority.front() == '[') {
        // Bracketed IPv6 literals are not news domains; SourceId rejects
        // the ':' characters anyway, so just strip the brackets.
        auto close = authority.find(']');
        authority = authority.substr(1, close == std::string_view::npos ? close : close - 1);
    } else if (auto port = authority.rfind(':'); port != std::string_view::npos) {
        authority = authority.substr(0, port);
    }

    if (authority.empty())
        throw ParseError("URL has no host: \"" + std::string(url) + "\"");
    return SourceId::canonical(authority);
}

struct IngestResult {
    SourceGraph graph;
    IngestStats stats;
};

namespace detail {

class RecordAccumulator {
public:
    explicit RecordAccumulator(const IngestConfig& cfg) : builder_(cfg.allow_self_links) {}

    void add(const ArticleRecord& rec) {
        SourceId src = [&] {
            try {
                return extract_domain(rec.url);
            } catch (const ParseError&) {
                stats_.records_skipped++;
                throw;
            }
        }();
        stats_.articles_read++;
        if (sources_.insert(src.str()).second) stats_.distinct_sources++;
        builder_.touch(src);
        for (const auto& link : rec.links) {
            std::optional<SourceId> dst;
            try {
                dst = extract_domain(link);
            } catch (const ParseError&) {
            }
            if (!dst) {
                stats_.links_skipped++;
                continue;
            }
            stats_.links_parsed++;
            if (*dst == src && !builder_.self_links_allowed()) {
                stats_.self_links_dropped++;
                continue;
            }
            builder_.add_links(src, *dst, 1);
        }
    }

    void skip_record() { stats_.records_skipped++; }
    void skip_link() { stats_.links_skipped++; }

    IngestResult finish() const { return {builder_.normalize(), stats_}; }

private:
    GraphBuilder builder_;
    IngestStats stats_;
    std::set<std::string> sources_;
};

} // namespace detail

/// Builds the source graph from in-memory records. Every article of a
/// domain contributes all of its links; repeated links count each time.
inline IngestResult build_graph(std::span<const ArticleRecord> records,
                                const IngestConfig& cfg = {}) {
    detail::RecordAccumulator acc(cfg);
    for (const auto& rec : records) {
        try {
            acc.add(rec);
        } catch (const ParseError&) {
            // bad article URL: already tallied, keep going
        }
    }
    return acc.finish();
}

namespace detail {

inline void ingest_jsonl(std::istream& in, RecordAccumulator& acc) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("url") || !j["url"].is_string()
            || (j.contains("links") && !j["links"].is_array())) {
            acc.skip_record();
            continue;
        }
        ArticleRecord rec;
        rec.url = j["url"].get<std::string>();
        std::size_t bad_links = 0;
        if (j.contains("links")) {
            for (const auto& l : j["links"]) {
                if (l.is_string())
                    rec.links.push_back(l.get<std::string>());
                else
                    ++bad_links; // counted as seen-but-unusable link strings
            }
        }
        try {
            acc.add(rec);
            for (std::size_t i = 0; i < bad_links; ++i) acc.skip_link();
        } catch (const ParseError&) {
            // bad article URL: record tallied as skipped; its links are not
            // link strings of any consumed article
        }
    }
    if (in.bad()) throw ParseError("I/O failure while reading article records");
}

} // namespace detail

/// Builds the source graph from a JSONL stream, one object per line with
/// fields `url` (string) and `links` (array of strings). Unreadable lines
/// are skipped and tallied; a stream-level read failure propagates.
inline IngestResult build_graph(std::istream& in, const IngestConfig& cfg = {}) {
    detail::RecordAccumulator acc(cfg);
    detail::ingest_jsonl(in, acc);
    return acc.finish();
}

/// One graph from several JSONL files treated as a single record stream.
inline IngestResult build_graph_files(std::span<const std::string> paths,
                                      const IngestConfig& cfg = {}) {
    detail::RecordAccumulator acc(cfg);
    for (const auto& path : paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open " + path);
        detail::ingest_jsonl(in, acc);
    }
    return acc.finish();
}

inline IngestResult build_graph_file(const std::string& path, const IngestConfig& cfg = {}) {
    std::array<std::string, 1> one{path};
    return build_graph_files(one, cfg);
}

} // namespace relnet
