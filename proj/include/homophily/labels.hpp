#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homophily/error.hpp"
#include "homophily/graph.hpp"
#include "homophily/io.hpp"

namespace homophily {

/// Known home-location labels Y_L: user id -> opaque region token.
/// Stored sorted by user id; immutable after load.
class LabelMap {
  public:
    struct Entry {
        UserId user;
        std::string label;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    LabelMap() = default;

    explicit LabelMap(std::vector<Entry> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.user < b.user; });
        for (std::size_t i = 1; i < entries_.size(); ++i) {
            if (entries_[i].user == entries_[i - 1].user) {
                throw ValidationError("duplicate label for user " +
                                      std::to_string(entries_[i].user));
            }
        }
        for (const Entry& e : entries_) {
            if (e.label.empty()) {
                throw ValidationError("empty label for user " + std::to_string(e.user));
            }
        }
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    bool contains(UserId user) const noexcept { return find(user) != nullptr; }

    std::optional<std::string_view> label(UserId user) const noexcept {
        const Entry* e = find(user);
        if (e == nullptr) {
            return std::nullopt;
        }
        return std::string_view(e->label);
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }

    std::vector<UserId> users() const {
        std::vector<UserId> ids;
        ids.reserve(entries_.size());
        for (const Entry& e : entries_) {
            ids.push_back(e.user);
        }
        return ids;
    }

    LabelMap without(UserId user) const {
        std::vector<Entry> kept;
        kept.reserve(entries_.size());
        for (const Entry& e : entries_) {
            if (e.user != user) {
                kept.push_back(e);
            }
        }
        return LabelMap(std::move(kept));
    }

    void write(std::ostream& out) const {
        for (const Entry& e : entries_) {
            out << e.user << '\t' << e.label << '\n';
        }
    }

  private:
    const Entry* find(UserId user) const noexcept {
        const auto it =
            std::lower_bound(entries_.begin(), entries_.end(), user,
                             [](const Entry& e, UserId id) { return e.user < id; });
        if (it == entries_.end() || it->user != user) {
            return nullptr;
        }
        return &*it;
    }

    std::vector<Entry> entries_;
};

/// Parses a label file: one user per line, id and label token, tab separated.
inline LabelMap load_labels(std::istream& in) {
    std::vector<LabelMap::Entry> entries;
    detail::for_each_data_line(in, [&](std::string_view line, std::size_t line_number) {
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 2 || fields[1].empty()) {
            throw ParseError("expected user id and non-empty label, tab-separated", line_number);
        }
        const UserId id = detail::parse_u64(fields[0], line_number, "user id");
        entries.push_back({id, std::string(fields[1])});
    });
    return LabelMap(std::move(entries));
}

} // namespace homophily
