#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "relnet/error.hpp"

namespace relnet {

/// Canonical identifier of a news-media source: a bare domain name,
/// lowercase, without scheme, path, port, credentials, or a leading "www.".
///
/// Construct through canonical()/try_canonical(); the raw constructor is
/// private so every SourceId in the system satisfies the invariants.
class SourceId {
public:
    /// Canonicalizes a host string: ASCII-lowercases, strips one leading
    /// "www.", and validates. Throws ParseError on malformed input.
    static SourceId canonical(std::string_view raw);

    /// Non-throwing variant of canonical().
    static std::optional<SourceId> try_canonical(std::string_view raw) noexcept;

    const std::string& str() const noexcept { return value_; }

    auto operator<=>(const SourceId&) const = default;

private:
    explicit SourceId(std::string value) : value_(std::move(value)) {}

    std::string value_;
};

namespace detail {

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool valid_domain_char(char c) {
    // Letters, digits, hyphen, dot, underscore. Underscore appears in real
    // hostnames even though RFC 1035 forbids it.
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
}

} // namespace detail

inline std::optional<SourceId> SourceId::try_canonical(std::string_view raw) noexcept {
    std::string host;
    host.reserve(raw.size());
    for (char c : raw) host.push_back(detail::ascii_lower(c));

    if (host.starts_with("www.")) host.erase(0, 4);

    if (host.empty()) return std::nullopt;
    if (host.front() == '.' || host.back() == '.') return std::nullopt;
    for (char c : host) {
        if (!detail::valid_domain_char(c)) return std::nullopt;
    }
    if (host.find("..") != std::string::npos) return std::nullopt;
    return SourceId(std::move(host));
}

inline SourceId SourceId::canonical(std::string_view raw) {
    auto id = try_canonical(raw);
    if (!id) throw ParseError("invalid source domain: \"" + std::string(raw) + "\"");
    return *std::move(id);
}

} // namespace relnet

template <>
struct std::hash<relnet::SourceId> {
    std::size_t operator()(const relnet::SourceId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
