#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homophily/error.hpp"
#include "homophily/graph.hpp"
#include "homophily/io.hpp"

namespace homophily {

/// The three profile attributes the filters operate on.
enum class Attribute { friends, followers, ratio };

inline std::string_view attribute_name(Attribute a) {
    switch (a) {
    case Attribute::friends: return "friends";
    case Attribute::followers: return "followers";
    case Attribute::ratio: return "ratio";
    }
    return "?";
}

/// Display names used in the report tables.
inline std::string_view attribute_display_name(Attribute a) {
    switch (a) {
    case Attribute::friends: return "#friends";
    case Attribute::followers: return "#followers";
    case Attribute::ratio: return "#friends/#followers";
    }
    return "?";
}

inline Attribute attribute_from_name(std::string_view name) {
    if (name == "friends") return Attribute::friends;
    if (name == "followers") return Attribute::followers;
    if (name == "ratio") return Attribute::ratio;
    throw ValidationError("unknown attribute '" + std::string(name) +
                          "' (expected friends, followers or ratio)");
}

/// Per-user profile attributes. The follow ratio is derived once at load:
/// (friends + 1) / (followers + 1), so it is positive and equals 1 exactly
/// when the two counts agree.
class AttributeTable {
  public:
    struct Record {
        UserId user;
        std::uint64_t friends_count;
        std::uint64_t followers_count;
        double follow_ratio;

        friend bool operator==(const Record&, const Record&) = default;
    };

    static double compute_ratio(std::uint64_t friends_count, std::uint64_t followers_count) {
        return (static_cast<double>(friends_count) + 1.0) /
               (static_cast<double>(followers_count) + 1.0);
    }

    AttributeTable() = default;

    /// Records are keyed by user id; duplicates are a validation error.
    /// follow_ratio is (re)derived here regardless of the incoming value.
    explicit AttributeTable(std::vector<Record> records) : records_(std::move(records)) {
        std::sort(records_.begin(), records_.end(),
                  [](const Record& a, const Record& b) { return a.user < b.user; });
        for (std::size_t i = 1; i < records_.size(); ++i) {
            if (records_[i].user == records_[i - 1].user) {
                throw ValidationError("duplicate attribute record for user " +
                                      std::to_string(records_[i].user));
            }
        }
        for (Record& r : records_) {
            r.follow_ratio = compute_ratio(r.friends_count, r.followers_count);
        }
    }

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const std::vector<Record>& records() const noexcept { return records_; }

    bool contains(UserId user) const noexcept { return find(user) != nullptr; }

    const Record& record(UserId user) const {
        const Record* r = find(user);
        if (r == nullptr) {
            throw NotFoundError("no attribute record for user " + std::to_string(user));
        }
        return *r;
    }

    double value(const Record& r, Attribute which) const {
        switch (which) {
        case Attribute::friends: return static_cast<double>(r.friends_count);
        case Attribute::followers: return static_cast<double>(r.followers_count);
        case Attribute::ratio: return r.follow_ratio;
        }
        return 0.0;
    }

    double value(UserId user, Attribute which) const { return value(record(user), which); }

    void write(std::ostream& out) const {
        for (const Record& r : records_) {
            out << r.user << '\t' << r.friends_count << '\t' << r.followers_count << '\n';
        }
    }

  private:
    const Record* find(UserId user) const noexcept {
        const auto it =
            std::lower_bound(records_.begin(), records_.end(), user,
                             [](const Record& r, UserId id) { return r.user < id; });
        if (it == records_.end() || it->user != user) {
            return nullptr;
        }
        return &*it;
    }

    std::vector<Record> records_;
};

/// Parses an attribute file: one user per line with id, friends_count,
/// followers_count, tab separated. Negative counts are a validation error.
inline AttributeTable load_attributes(std::istream& in) {
    std::vector<AttributeTable::Record> records;
    detail::for_each_data_line(in, [&](std::string_view line, std::size_t line_number) {
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 3) {
            throw ParseError("expected user id, friends count and followers count", line_number);
        }
        const UserId id = detail::parse_u64(fields[0], line_number, "user id");
        for (int i = 1; i <= 2; ++i) {
            if (!fields[i].empty() && fields[i].front() == '-') {
                throw ValidationError("line " + std::to_string(line_number) +
                                      ": negative count for user " + std::to_string(id));
            }
        }
        const std::uint64_t friends_count = detail::parse_u64(fields[1], line_number, "count");
        const std::uint64_t followers_count = detail::parse_u64(fields[2], line_number, "count");
        records.push_back({id, friends_count, followers_count, 0.0});
    });
    return AttributeTable(std::move(records));
}

/// Attribute values for the given users in ascending user-id order.
/// Users missing from the table are reported together in one error.
inline std::vector<double> attribute_values(const AttributeTable& table, Attribute which,
                                            std::span<const UserId> users) {
    std::vector<UserId> sorted(users.begin(), users.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<double> values;
    values.reserve(sorted.size());
    std::vector<UserId> missing;
    for (const UserId id : sorted) {
        if (!table.contains(id)) {
            missing.push_back(id);
            continue;
        }
        values.push_back(table.value(id, which));
    }
    if (!missing.empty()) {
        std::string msg = "no attribute record for users:";
        const std::size_t shown = std::min<std::size_t>(missing.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) {
            msg += ' ' + std::to_string(missing[i]);
        }
        if (missing.size() > shown) {
            msg += " (and " + std::to_string(missing.size() - shown) + " more)";
        }
        throw NotFoundError(msg);
    }
    return values;
}

} // namespace homophily
