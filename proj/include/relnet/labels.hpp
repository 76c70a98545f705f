#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "relnet/error.hpp"
#include "relnet/graph.hpp"
#include "relnet/source_id.hpp"

namespace relnet {

enum class ReliabilityLabel { Reliable, Mixed, Unreliable };

inline const char* to_string(ReliabilityLabel l) {
    switch (l) {
        case ReliabilityLabel::Reliable: return "reliable";
        case ReliabilityLabel::Mixed: return "mixed";
        case ReliabilityLabel::Unreliable: return "unreliable";
    }
    return "?";
}

inline std::optional<ReliabilityLabel> parse_label(std::string_view s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s) t.push_back(detail::ascii_lower(c));
    if (t == "reliable") return ReliabilityLabel::Reliable;
    if (t == "mixed") return ReliabilityLabel::Mixed;
    if (t == "unreliable") return ReliabilityLabel::Unreliable;
    return std::nullopt;
}

/// Ground-truth reliability labels keyed by canonical domain, each entry
/// tagged with the dataset it came from.
struct LabeledDataset {
    struct Entry {
        ReliabilityLabel label;
        std::string origin;

        bool operator==(const Entry&) const = default;
    };

    std::string name;
    std::map<SourceId, Entry> entries;

    std::size_t size() const noexcept { return entries.size(); }

    std::size_t count(ReliabilityLabel l) const {
        std::size_t n = 0;
        for (const auto& [id, e] : entries) n += (e.label == l);
        return n;
    }
};

/// Reward signal r(s) in {+1, 0, -1}. Lookup is total: any domain not in
/// the map has reward 0.
class RewardAssignment {
public:
    void set(const SourceId& id, int value) {
        if (value < -1 || value > 1)
            throw std::invalid_argument("reward must be in {-1, 0, +1}");
        if (value == 0)
            rewards_.erase(id);
        else
            rewards_[id] = value;
    }

    int value(const SourceId& id) const {
        auto it = rewards_.find(id);
        return it == rewards_.end() ? 0 : it->second;
    }

    const std::map<SourceId, int>& nonzero() const noexcept { return rewards_; }

    /// Dense reward vector aligned with the graph's node ids.
    std::vector<double> densify(const SourceGraph& g) const {
        std::vector<double> r(g.node_count(), 0.0);
        for (const auto& [id, v] : rewards_) {
            if (auto n = g.find(id)) r[*n] = static_cast<double>(v);
        }
        return r;
    }

private:
    std::map<SourceId, int> rewards_;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.pop_back();
    }
    return fields;
}

inline std::string lower(std::string_view s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s) t.push_back(ascii_lower(c));
    return t;
}

inline void strip_bom(std::string& line) {
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
}

} // namespace detail

/// Loads a label CSV with header `domain,label[,origin]`. Labels are
/// case-insensitive members of {reliable, mixed, unreliable}. When the
/// origin column is absent, every entry is tagged with `name`. Duplicate
/// domains are an error listing all offenders.
inline LabeledDataset load_labels(std::istream& in, const std::string& name,
                                  const std::string& path = "<stream>") {
    LabeledDataset ds;
    ds.name = name;

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty label file");
    detail::strip_bom(line);
    auto header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::lower(h);
    bool has_origin;
    if (header.size() == 2 && header[0] == "domain" && header[1] == "label")
        has_origin = false;
    else if (header.size() == 3 && header[0] == "domain" && header[1] == "label"
             && header[2] == "origin")
        has_origin = true;
    else
        throw ParseError(path, 1, "expected header \"domain,label[,origin]\"");

    std::vector<std::string> duplicates;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(path, lineno, "expected " + std::to_string(header.size())
                                           + " fields, got " + std::to_string(fields.size()));
        SourceId id = [&] {
            try {
                return SourceId::canonical(fields[0]);
            } catch (const ParseError& e) {
                throw ParseError(path, lineno, e.what());
            }
        }();
        auto label = parse_label(fields[1]);
        if (!label)
            throw ParseError(path, lineno, "unknown label \"" + fields[1] + "\"");
        const std::string origin = has_origin && !fields[2].empty() ? fields[2] : name;
        auto [it, inserted] = ds.entries.try_emplace(id, LabeledDataset::Entry{*label, origin});
        if (!inserted) duplicates.push_back(id.str());
    }
    if (!duplicates.empty()) {
        std::string msg = "duplicate domains:";
        for (const auto& d : duplicates) msg += " " + d;
        throw ParseError(path + ": " + msg);
    }
    return ds;
}

inline LabeledDataset load_labels(const std::string& path, std::string name = "") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    if (name.empty()) {
        auto slash = path.find_last_of("/\\");
        name = slash == std::string::npos ? path : path.substr(slash + 1);
        if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
    }
    return load_labels(in, name, path);
}

struct MergeReport {
    LabeledDataset merged;
    std::size_t conflicts = 0; // domains where datasets disagreed on the label
};

/// Merges datasets; on a label disagreement, the entry whose origin ranks
/// highest in `precedence` (earlier = stronger) wins. Every origin tag
/// appearing in the inputs must be covered by the precedence list.
inline MergeReport merge_datasets(std::span<const LabeledDataset> datasets,
                                  const std::vector<std::string>& precedence,
                                  const std::string& merged_name = "merged") {
    std::unordered_map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < precedence.size(); ++i) rank.emplace(precedence[i], i);

    MergeReport out;
    out.merged.name = merged_name;
    for (const auto& ds : datasets) {
        for (const auto& [id, entry] : ds.entries) {
            auto r = rank.find(entry.origin);
            if (r == rank.end())
                throw std::invalid_argument("origin tag \"" + entry.origin
                                            + "\" missing from precedence list");
            auto [it, inserted] = out.merged.entries.try_emplace(id, entry);
            if (!inserted) {
                if (it->second.label != entry.label) {
                    out.conflicts++;
                    if (r->second < rank.at(it->second.origin)) it->second = entry;
                } else if (r->second < rank.at(it->second.origin)) {
                    it->second = entry; // same label, keep the stronger origin tag
                }
            }
        }
    }
    return out;
}

enum class RewardPolicy {
    Strict, // mixed -> 0
    Merged  // mixed -> -1
};

/// reliable -> +1, unreliable -> -1, mixed per policy; everything else 0.
inline RewardAssignment to_rewards(const LabeledDataset& ds,
                                   RewardPolicy policy = RewardPolicy::Merged) {
    RewardAssignment r;
    for (const auto& [id, e] : ds.entries) {
        switch (e.label) {
            case ReliabilityLabel::Reliable: r.set(id, +1); break;
            case ReliabilityLabel::Unreliable: r.set(id, -1); break;
            case ReliabilityLabel::Mixed:
                if (policy == RewardPolicy::Merged) r.set(id, -1);
                break;
        }
    }
    return r;
}

enum class ExpsetMode {
    A,     // mixed merged into unreliable
    B,     // mixed merged into unreliable
    BMinus // mixed dropped
};

inline const char* to_string(ExpsetMode m) {
    switch (m) {
        case ExpsetMode::A: return "a";
        case ExpsetMode::B: return "b";
        case ExpsetMode::BMinus: return "b-minus";
    }
    return "?";
}

inline std::optional<ExpsetMode> parse_expset(std::string_view s) {
    auto t = detail::lower(s);
    if (t == "a") return ExpsetMode::A;
    if (t == "b") return ExpsetMode::B;
    if (t == "b-minus" || t == "bminus" || t == "b_minus") return ExpsetMode::BMinus;
    return std::nullopt;
}

struct Expset {
    LabeledDataset dataset; // binary: reliable / unreliable only
    std::size_t reliable = 0;
    std::size_t unreliable = 0;
    std::size_t dropped_mixed = 0;
    std::size_t out_of_graph = 0;
};

/// Restricts the dataset to domains present in the graph and binarizes the
/// labels per mode. Errors when nothing usable remains.
inline Expset build_expset(const LabeledDataset& ds, const SourceGraph& g, ExpsetMode mode) {
    Expset out;
    out.dataset.name = ds.name + "/" + to_string(mode);
    for (const auto& [id, e] : ds.entries) {
        if (!g.find(id)) {
            out.out_of_graph++;
            continue;
        }
        ReliabilityLabel label = e.label;
        if (label == ReliabilityLabel::Mixed) {
            if (mode == ExpsetMode::BMinus) {
                out.dropped_mixed++;
                continue;
            }
            label = ReliabilityLabel::Unreliable;
        }
        out.dataset.entries.emplace(id, LabeledDataset::Entry{label, e.origin});
        (label == ReliabilityLabel::Reliable ? out.reliable : out.unreliable)++;
    }
    if (out.dataset.entries.empty())
        throw std::invalid_argument("experiment set is empty: no labeled domain is in the graph"
                                    + std::string(mode == ExpsetMode::BMinus
                                                       ? " (after dropping mixed labels)"
                                                       : ""));
    return out;
}

/// Journalist score CSV: header `domain,score`, score in [0, 100].
inline std::map<SourceId, double> load_scores_csv(std::istream& in,
                                                  const std::string& path = "<stream>") {
    std::map<SourceId, double> scores;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty score file");
    detail::strip_bom(line);
    auto header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::lower(h);
    if (header.size() != 2 || header[0] != "domain" || header[1] != "score")
        throw ParseError(path, 1, "expected header \"domain,score\"");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2) throw ParseError(path, lineno, "expected 2 fields");
        SourceId id = [&] {
            try {
                return SourceId::canonical(fields[0]);
            } catch (const ParseError& e) {
                throw ParseError(path, lineno, e.what());
            }
        }();
        double score = 0;
        try {
            std::size_t pos = 0;
            score = std::stod(fields[1], &pos);
            if (pos != fields[1].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "score must be a number, got \"" + fields[1] + "\"");
        }
        if (score < 0.0 || score > 100.0)
            throw ParseError(path, lineno, "score out of range [0, 100]");
        if (!scores.emplace(id, score).second)
            throw ParseError(path, lineno, "duplicate domain " + id.str());
    }
    return scores;
}

inline std::map<SourceId, double> load_scores_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return load_scores_csv(in, path);
}

/// External binary predictions (for the voting ensemble): header
/// `domain,label` with labels reliable/unreliable.
inline std::map<SourceId, ReliabilityLabel> load_predictions_csv(std::istream& in,
                                                                 const std::string& path
                                                                 = "<stream>") {
    std::map<SourceId, ReliabilityLabel> preds;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty predictions file");
    detail::strip_bom(line);
    auto header = detail::split_csv_line(line);
    for (auto& h : header) h = detail::lower(h);
    if (header.size() != 2 || header[0] != "domain" || header[1] != "label")
        throw ParseError(path, 1, "expected header \"domain,label\"");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 2) throw ParseError(path, lineno, "expected 2 fields");
        SourceId id = [&] {
            try {
                return SourceId::canonical(fields[0]);
            } catch (const ParseError& e) {
                throw ParseError(path, lineno, e.what());
            }
        }();
        auto label = parse_label(fields[1]);
        if (!label || *label == ReliabilityLabel::Mixed)
            throw ParseError(path, lineno, "label must be reliable or unreliable");
        if (!preds.emplace(id, *label).second)
            throw ParseError(path, lineno, "duplicate domain " + id.str());
    }
    return preds;
}

inline std::map<SourceId, ReliabilityLabel> load_predictions_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    return load_predictions_csv(in, path);
}

} // namespace relnet
